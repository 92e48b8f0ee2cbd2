"""Regenerate the JSON files under fixtures/.

Run ``python tests/make_fixtures.py [outdir]``; the test suite checks that
the shipped files are reproduced byte for byte.
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from maps import constant_map, handle_map, hopf_map, reverse  # noqa: E402

from laginv.classifier import IsotopyPath  # noqa: E402
from laginv.forms import (  # noqa: E402
    ZeroSectionFormField,
    canonical_field,
    realize_from_automorphism,
    symplectic_plus_field,
)
from laginv.io import SCHEMA_VERSION, mesh_to_json, write_json  # noqa: E402
from laginv.mesh import genus2_mesh, standard_fixture, tetrahedron_mesh, torus_mesh  # noqa: E402
from laginv.winding import MatrixField, rotation  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent


def nonmanifold():
    # three triangles on one edge
    return {"schema_version": SCHEMA_VERSION,
            "vertices": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1]],
            "triangles": [[0, 1, 2], [1, 0, 3], [0, 1, 4]]}


def form_file(field):
    return {"schema_version": SCHEMA_VERSION, **field.to_json()}


def rotation_path(mesh, T):
    can = canonical_field(mesh)
    plus = symplectic_plus_field(mesh)
    omegas = []
    for k in range(T + 1):
        R = np.broadcast_to(rotation(2 * np.pi * k / T), (mesh.n_vertices, 2, 2)).copy()
        omegas.append(realize_from_automorphism(MatrixField(mesh, R)))
    omegas[0] = omegas[-1] = can
    pluses = [ZeroSectionFormField(mesh, w.omega + plus.omega - can.omega, lagrangian=False) for w in omegas]
    return IsotopyPath(mesh, omegas, pluses, np.eye(4))


def build(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    tet = tetrahedron_mesh()
    sphere = standard_fixture("sphere", 4)
    torus = torus_mesh(8)
    genus2 = genus2_mesh(12)
    for name, mesh in (("tetrahedron", tet), ("sphere", sphere), ("torus", torus), ("genus2", genus2)):
        write_json(out / f"{name}.json", mesh_to_json(mesh))
    write_json(out / "nonmanifold.json", nonmanifold())
    write_json(out / "omega_can_torus.json", form_file(canonical_field(torus)))
    write_json(out / "omega_can_sphere.json", form_file(canonical_field(sphere)))
    write_json(out / "constant_map_sphere.json", constant_map(sphere, 3).to_json())
    hopf = hopf_map(sphere, 8)
    write_json(out / "hopf_map_sphere.json", hopf.to_json())
    write_json(out / "hopf_map_sphere_reversed.json", reverse(hopf).to_json())
    write_json(out / "handle2_map_torus.json", handle_map(torus, 6, 2).to_json())
    T = 6
    can, plus = canonical_field(torus), symplectic_plus_field(torus)
    write_json(out / "path_constant_torus.json", IsotopyPath(torus, [can] * (T + 1), [plus] * (T + 1), np.eye(4)).to_json())
    write_json(out / "path_rotation_torus.json", rotation_path(torus, T).to_json())
    bad = rotation_path(torus, T)
    bad.omegas[0] = bad.omegas[1]
    bad.omega_plus[0] = bad.omega_plus[1]
    write_json(out / "path_violating_torus.json", bad.to_json())


if __name__ == "__main__":
    build(sys.argv[1] if len(sys.argv) > 1 else ROOT / "fixtures")
