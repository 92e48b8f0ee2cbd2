"""Command line interface: every command prints one JSON report on stdout."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__
from .classifier import IsotopyPath, SphereMapData, classify, n_invariant
from .errors import LagInvError, ValidationError, WrongGenus
from .forms import TOL_ANTISYM, TOL_LAGRANGIAN, canonical_field, form_field_from_json, realize_class
from .homology import default_basis, multiplicity, CohomologyClass
from .io import SCHEMA_VERSION, dumps, file_digest, load_mesh, read_json, write_json
from .lambda_invariant import lambda_invariant
from .mesh import genus
from .suspension import build_suspension, homology_profile


def _load_form(mesh, path):
    data = read_json(path)
    if not isinstance(data, dict) or "omega" not in data:
        raise ValidationError(f"{path} needs an 'omega' list")
    return form_field_from_json(mesh, data)


def _parse_vector(text):
    text = (text or "").strip().strip("()[]")
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise ValidationError(f"winding vector must be comma-separated integers, got {text!r}") from None


def cmd_validate(args):
    mesh = load_mesh(args.mesh)
    return {"mesh": file_digest(args.mesh)}, mesh.statistics().as_dict()


def cmd_lambda(args):
    mesh = load_mesh(args.mesh)
    primed = _load_form(mesh, args.omega_prime)
    base = _load_form(mesh, args.omega)
    report = lambda_invariant(mesh, primed, base, tolerances=(args.tol_antisym, args.tol_lagrangian))
    digests = {"mesh": file_digest(args.mesh), "omega_prime": file_digest(args.omega_prime),
               "omega": file_digest(args.omega)}
    return digests, report.as_dict()


def cmd_realize(args):
    mesh = load_mesh(args.mesh)
    vector = _parse_vector(args.vector)
    g = genus(mesh)
    if len(vector) != 2 * g:
        raise WrongGenus(f"need a vector of length {2 * g} for genus {g}, got {len(vector)}")
    if g == 0:
        field = canonical_field(mesh)
    else:
        field = realize_class(default_basis(mesh), vector)
    payload = {"schema_version": SCHEMA_VERSION, **field.to_json()}
    write_json(args.out, payload)
    lam = multiplicity(CohomologyClass(vector, "")) if vector else 0
    return ({"mesh": file_digest(args.mesh)},
            {"vector": list(vector), "lambda": lam, "out": str(args.out), "out_digest": file_digest(args.out)})


def cmd_suspension_homology(args):
    mesh = load_mesh(args.mesh)
    X = build_suspension(mesh, args.time_steps)
    profile = homology_profile(X)
    result = {"ranks": list(profile.ranks), **profile.as_dict(), "time_steps": args.time_steps,
              "vertices": len(X.vertices), "tetrahedra": len(X.tets)}
    return {"mesh": file_digest(args.mesh)}, result


def cmd_classify(args):
    mesh = load_mesh(args.mesh)
    F = SphereMapData.from_json(mesh, read_json(args.map))
    if args.time_steps is not None and args.time_steps != F.complex.T:
        raise ValidationError(f"map has {F.complex.T} time steps, not {args.time_steps}")
    result = classify(F).as_dict()
    result["time_steps"] = F.complex.T
    return {"mesh": file_digest(args.mesh), "map": file_digest(args.map)}, result


def cmd_n_invariant(args):
    mesh = load_mesh(args.mesh)
    path = IsotopyPath.from_json(mesh, read_json(args.path))
    result = n_invariant(path).as_dict()
    result["time_steps"] = path.T
    return {"mesh": file_digest(args.mesh), "path": file_digest(args.path)}, result


def build_parser():
    parser = argparse.ArgumentParser(prog="laginv", description="Invariants of Lagrangian surfaces")
    parser.add_argument("--version", action="version", version=f"laginv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--mesh", required=True, help="mesh JSON file")
        p.add_argument("--format", choices=["json"], default="json")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a mesh and print its statistics")
    p = add("lambda", cmd_lambda, "lambda invariant of a pair of forms")
    p.add_argument("--omega-prime", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--tol-antisym", type=float, default=TOL_ANTISYM)
    p.add_argument("--tol-lagrangian", type=float, default=TOL_LAGRANGIAN)
    p = add("realize", cmd_realize, "write a form realizing a winding vector")
    p.add_argument("--vector", default="", help="comma-separated integers, length 2g; use --vector=-1,2 for negatives")
    p.add_argument("--out", required=True)
    p = add("suspension-homology", cmd_suspension_homology, "homology of the identified double cone")
    p.add_argument("--time-steps", type=int, default=3)
    p = add("classify", cmd_classify, "classify a map from the double cone to S^2")
    p.add_argument("--map", required=True)
    p.add_argument("--time-steps", type=int, default=None)
    p = add("n-invariant", cmd_n_invariant, "n-invariant of a discretized isotopy")
    p.add_argument("--path", required=True)
    return parser


def run(argv=None):
    """Execute a command; returns ``(exit_code, report)``."""
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "tool_version": __version__}
    code = 0
    try:
        with np.errstate(all="ignore"):
            digests, result = args.func(args)
        report["input_digests"] = digests
        report["result"] = result
    except LagInvError as exc:
        code = exc.exit_code
        report["input_digests"] = {}
        report["result"] = None
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
    report["elapsed_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
    return code, report


def main(argv=None):
    code, report = run(argv)
    sys.stdout.write(dumps(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
