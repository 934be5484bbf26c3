"""``pearson-chaos`` command line.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Rationals print exactly unless ``--float`` is given.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import BoundInconsistency, PearsonError
from .fourmoments import TargetSpec, bound
from .generator import GeneratorHandle
from .montecarlo import (
    ExperimentDescriptor,
    build_chaos,
    euler_maruyama,
    kolmogorov_distance,
    rows_to_csv,
    run_convergence,
)
from .pearson import classify, max_moment_order, moments, params_from_dict, params_to_dict, sample
from .spectral import chaos_grade, is_chaotic, positive_eigenvalue
from .verify import SUITES, run_suite

BUNDLED = ("gaussian_chain", "gaussian_complete", "student_t_self")


class InputError(Exception):
    pass


def fmt(v: Any, as_float: bool = False) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        if as_float:
            return repr(float(v))
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(obj: Any, as_float: bool):
    if isinstance(obj, dict):
        return {k: _jsonable(v, as_float) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v, as_float) for v in obj]
    if isinstance(obj, Fraction):
        return float(obj) if as_float else fmt(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        return str(obj)
    return obj


def _load_json(text: str, what: str):
    """Inline JSON if it looks like an object, else a file path."""
    src = text.strip()
    if not src.startswith("{"):
        try:
            src = Path(text).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {what} file {text!r}: {exc.strerror}") from None
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {what}: {exc}") from None


def _params(args):
    if args.params is None:
        raise InputError("--params is required")
    return params_from_dict(_load_json(args.params, "--params"))


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj, args):
    _emit(json.dumps(_jsonable(obj, args.float), indent=2) + "\n", args.out)


def cmd_moments(args) -> int:
    p = _params(args)
    ms = moments(p, args.pmax)
    _emit(", ".join(fmt(v, args.float) for v in ms) + "\n", args.out)
    return 0


def cmd_grade(args) -> int:
    p = _params(args)
    g = GeneratorHandle(p)
    n = args.n
    if n < 1:
        raise InputError("--n must be at least 1")
    chaotic = is_chaotic(g, n)
    out: dict[str, Any] = {"n": n, "b2": p.b2, "chaotic": chaotic}
    out["eta_n"] = chaos_grade(g, n) if chaotic else "not chaotic"
    out["eta_tilde"] = 2 * (1 - p.b2)
    try:
        out["lambda_n"] = positive_eigenvalue(g, n)
    except PearsonError:
        out["lambda_n"] = None
    _emit_json(out, args)
    return 0


def cmd_bound(args) -> int:
    p = _params(args)
    target = TargetSpec(p)
    if args.chaos is None:
        spec = {"kind": "first_chaos", "base": params_to_dict(p)}
    else:
        spec = _load_json(args.chaos, "--chaos")
        if not isinstance(spec, dict) or "kind" not in spec:
            raise InputError("--chaos must be an object with a 'kind' field")
    G = build_chaos(spec, args.n, target.m)
    rep = bound(G, target)
    d = rep.to_dict(args.float)
    d["k"] = args.n
    _emit(json.dumps(d, indent=2) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, seed=args.seed, n=args.n)
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if failed else 0


def _descriptor(ref: str) -> ExperimentDescriptor:
    if ref in BUNDLED:
        text = resources.files("pearson_chaos").joinpath("data", f"{ref}.json").read_text()
        return ExperimentDescriptor.from_dict(json.loads(text))
    return ExperimentDescriptor.from_dict(_load_json(ref, "descriptor"))


def cmd_converge(args) -> int:
    desc = _descriptor(args.descriptor)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.n is not None:
        changes["mc_n"] = args.n
    if changes:
        desc = ExperimentDescriptor(**{**desc.__dict__, **changes})
    rows = run_convergence(desc, workers=args.workers)
    _emit(rows_to_csv(rows, as_float=args.float), args.out or desc.output)
    return 0


def cmd_simulate(args) -> int:
    p = _params(args)
    if args.method == "sde":
        x0 = float(p.m)
        batch = euler_maruyama(p, x0, args.dt, 0, args.seed, n_paths=args.n)
    else:
        batch = sample(p, args.seed, args.n)
    x = batch.values.ravel()
    if args.out:
        np.savetxt(args.out, x, fmt="%.17g")
    top = max_moment_order(p)
    pm = int(min(4, top if top != float("inf") else 4))
    summary = {
        "n": int(x.size),
        "seed": args.seed,
        "method": args.method,
        "family": classify(p).family,
        "empirical_moments": [float(np.mean(x**j)) for j in range(1, pm + 1)],
        "exact_moments": [float(v) if args.float else fmt(v) for v in moments(p, pm)[1:]],
        "kolmogorov": kolmogorov_distance(x, p),
    }
    sys.stdout.write(json.dumps(summary, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pearson-chaos", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="Pearson parameters: a JSON file path or inline JSON object")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--float", action="store_true", help="render rationals as decimals")
    common.add_argument("--seed", type=int, default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("moments", parents=[common], help="exact raw moments m_0..m_pmax")
    s.add_argument("--pmax", type=int, default=4)
    s.set_defaults(func=cmd_moments)

    s = sub.add_parser("grade", parents=[common], help="chaos grade of the degree-n eigenfunction")
    s.add_argument("--n", type=int, default=1)
    s.set_defaults(func=cmd_grade)

    s = sub.add_parser("bound", parents=[common], help="four-moment bound for a chaos element")
    s.add_argument("--chaos", help="chaos descriptor (JSON path or inline); default: the target's first chaos")
    s.add_argument("--n", type=int, default=1, help="k for homogeneous sums")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("verify", parents=[common], help="run a self-check suite")
    s.add_argument("suite", choices=[*SUITES, "all"])
    s.add_argument("--n", type=int, default=None, help="sweep size or grid size")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("converge", help="run a convergence experiment and write CSV")
    s.add_argument("descriptor", help=f"descriptor JSON path, inline JSON, or one of {', '.join(BUNDLED)}")
    s.add_argument("--out")
    s.add_argument("--float", action="store_true")
    s.add_argument("--seed", type=int, default=None, help="override the descriptor seed")
    s.add_argument("--n", type=int, default=None, help="override mc_n")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("simulate", parents=[common], help="draw samples and summarize them")
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--method", choices=("direct", "sde"), default="direct")
    s.add_argument("--dt", type=float, default=0.01)
    s.set_defaults(func=cmd_simulate)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BoundInconsistency as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InputError, PearsonError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
