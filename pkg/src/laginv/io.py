"""JSON file formats and content digests."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import LagInvError, ValidationError
from .mesh import build_mesh

SCHEMA_VERSION = 1


class InputError(LagInvError):
    exit_code = 4


def digest_arrays(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


def mesh_digest(mesh):
    return digest_arrays(mesh.vertices, mesh.triangles, mesh.frames)


def file_digest(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def write_json(path, payload):
    try:
        Path(path).write_text(dumps(payload) + "\n", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def dumps(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def mesh_to_json(mesh):
    data = {
        "schema_version": SCHEMA_VERSION,
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "frames": mesh.frames.tolist(),
    }
    if mesh.lattice is not None:
        data["lattice"] = mesh.lattice.tolist()
        data["lattice_size"] = int(mesh.lattice_size)
    if mesh.name:
        data["name"] = mesh.name
    return data


def mesh_from_json(data):
    if not isinstance(data, dict):
        raise ValidationError("mesh file must hold a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"mesh file needs \"schema_version\": {SCHEMA_VERSION}")
    for key in ("vertices", "triangles"):
        if key not in data:
            raise ValidationError(f"mesh file is missing {key!r}")
    return build_mesh(
        data["vertices"],
        data["triangles"],
        frames=data.get("frames"),
        lattice=data.get("lattice"),
        lattice_size=data.get("lattice_size"),
        name=data.get("name", ""),
    )


def load_mesh(path):
    return mesh_from_json(read_json(path))
