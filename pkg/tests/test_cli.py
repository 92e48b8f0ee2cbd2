import json
import subprocess
import sys

import numpy as np
import pytest

from laginv.cli import main, run
from laginv.forms import block_matrix
from laginv.io import SCHEMA_VERSION, mesh_to_json, write_json

from conftest import FIXTURES, cached_torus
from make_fixtures import build


def fx(name):
    return str(FIXTURES / name)


def test_validate_ok():
    code, rep = run(["validate", "--mesh", fx("tetrahedron.json")])
    assert code == 0 and rep["result"]["genus"] == 0
    code, rep = run(["validate", "--mesh", fx("torus.json")])
    assert code == 0 and rep["result"]["genus"] == 1
    assert set(rep) == {"schema_version", "command", "input_digests", "result", "tool_version", "elapsed_ms"}


def test_validate_non_manifold():
    code, rep = run(["validate", "--mesh", fx("nonmanifold.json")])
    assert code == 1 and rep["error"]["type"] == "NonManifold"


def test_missing_file_is_io_error(tmp_path):
    code, rep = run(["validate", "--mesh", str(tmp_path / "nope.json")])
    assert code == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["validate", "--mesh", str(bad)])[0] == 4


def test_schema_version_required(tmp_path):
    data = json.loads((FIXTURES / "tetrahedron.json").read_text())
    del data["schema_version"]
    p = tmp_path / "m.json"
    p.write_text(json.dumps(data))
    assert run(["validate", "--mesh", str(p)])[0] == 1


def test_lambda_canonical():
    code, rep = run(["lambda", "--mesh", fx("torus.json"), "--omega-prime", fx("omega_can_torus.json"),
                     "--omega", fx("omega_can_torus.json")])
    assert code == 0 and rep["result"]["lambda"] == 0
    code, rep = run(["lambda", "--mesh", fx("sphere.json"), "--omega-prime", fx("omega_can_sphere.json"),
                     "--omega", fx("omega_can_sphere.json")])
    assert code == 0 and rep["result"]["lambda"] == 0


def test_realize_round_trip(tmp_path):
    out = tmp_path / "w.json"
    code, rep = run(["realize", "--mesh", fx("torus.json"), "--vector", "1,0", "--out", str(out)])
    assert code == 0
    code, rep = run(["lambda", "--mesh", fx("torus.json"), "--omega-prime", str(out), "--omega", fx("omega_can_torus.json")])
    assert rep["result"]["lambda"] == 1


def test_realize_zero_is_canonical(tmp_path):
    out = tmp_path / "z.json"
    assert run(["realize", "--mesh", fx("torus.json"), "--vector", "0,0", "--out", str(out)])[0] == 0
    a = np.array(json.loads(out.read_text())["omega"])
    b = np.array(json.loads((FIXTURES / "omega_can_torus.json").read_text())["omega"])
    assert np.max(np.abs(a - b)) <= 1e-12
    out2 = tmp_path / "s.json"
    assert run(["realize", "--mesh", fx("sphere.json"), "--out", str(out2)])[0] == 0
    assert out2.read_text() == (FIXTURES / "omega_can_sphere.json").read_text()


def test_realize_genus_mismatch(tmp_path):
    code, rep = run(["realize", "--mesh", fx("torus.json"), "--vector", "1,0,0", "--out", str(tmp_path / "x.json")])
    assert code == 1 and rep["error"]["type"] == "WrongGenus"
    assert run(["realize", "--mesh", fx("torus.json"), "--vector", "a,b", "--out", str(tmp_path / "x.json")])[0] == 1


def test_resolution_error_exit_code(tmp_path):
    # a half turn between neighbouring vertices
    m = cached_torus(8)
    mesh_file = tmp_path / "t.json"
    write_json(mesh_file, mesh_to_json(m))
    theta = np.pi * (m.lattice[:, 0] % 2)
    c, s = np.cos(theta), np.sin(theta)
    R = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    write_json(tmp_path / "a.json", {"schema_version": SCHEMA_VERSION, "omega": block_matrix(R).reshape(-1, 16).tolist()})
    code, rep = run(["lambda", "--mesh", str(mesh_file), "--omega-prime", str(tmp_path / "a.json"),
                     "--omega", fx("omega_can_torus.json")])
    assert code == 2 and rep["error"]["type"] == "EdgeAliasing"
    code, rep = run(["realize", "--mesh", str(mesh_file), "--vector", "4,0", "--out", str(tmp_path / "r.json")])
    assert code == 2


def test_tolerance_flags(tmp_path):
    data = json.loads((FIXTURES / "omega_can_torus.json").read_text())
    data["omega"][0][1] = 1e-8
    data["omega"][0][4] = -1e-8
    p = tmp_path / "o.json"
    p.write_text(json.dumps(data))
    args = ["lambda", "--mesh", fx("torus.json"), "--omega-prime", str(p), "--omega", fx("omega_can_torus.json")]
    assert run(args)[0] == 1
    assert run(args + ["--tol-lagrangian", "1e-6"])[0] == 0


def test_suspension_homology():
    code, rep = run(["suspension-homology", "--mesh", fx("torus.json"), "--time-steps", "3"])
    assert code == 0 and rep["result"]["ranks"] == [1, 2, 1]


def test_classify_fixtures():
    code, rep = run(["classify", "--mesh", fx("sphere.json"), "--map", fx("constant_map_sphere.json")])
    assert code == 0 and rep["result"]["c"] == [] and rep["result"]["d"] == 0
    code, rep = run(["classify", "--mesh", fx("sphere.json"), "--map", fx("hopf_map_sphere.json")])
    d = rep["result"]["d"]
    assert code == 0 and abs(d) == 1
    code, rep = run(["classify", "--mesh", fx("sphere.json"), "--map", fx("hopf_map_sphere_reversed.json")])
    assert rep["result"]["d"] == -d
    code, rep = run(["classify", "--mesh", fx("torus.json"), "--map", fx("handle2_map_torus.json")])
    assert code == 0 and sorted(abs(x) for x in rep["result"]["c"]) == [0, 2] and rep["result"]["n"] == 2
    code, rep = run(["classify", "--mesh", fx("sphere.json"), "--map", fx("hopf_map_sphere.json"), "--time-steps", "3"])
    assert code == 1


def test_n_invariant_fixtures():
    code, rep = run(["n-invariant", "--mesh", fx("torus.json"), "--path", fx("path_constant_torus.json")])
    assert code == 0 and rep["result"]["c"] == [0, 0] and rep["result"]["d"] == 0
    code, rep = run(["n-invariant", "--mesh", fx("torus.json"), "--path", fx("path_violating_torus.json")])
    assert code == 1 and rep["error"]["type"] == "BoundaryConditionViolated"


def test_main_prints_single_document(capsys):
    assert main(["validate", "--mesh", fx("tetrahedron.json")]) == 0
    out = capsys.readouterr().out
    assert out.count("\n") == 1 and json.loads(out)["command"] == "validate"


def test_console_entry_exit_code():
    proc = subprocess.run([sys.executable, "-m", "laginv.cli", "validate", "--mesh", fx("nonmanifold.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and json.loads(proc.stdout)["error"]["type"] == "NonManifold"


def test_shipped_fixtures_regenerate(tmp_path):
    build(tmp_path)
    for f in sorted(FIXTURES.glob("*.json")):
        assert (tmp_path / f.name).read_bytes() == f.read_bytes(), f.name
