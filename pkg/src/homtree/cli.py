"""Command-line harness.

Exit codes: 0 all checks pass, 1 a check failed (only with ``--check``),
2 usage or configuration error, 3 numerical failure (singular system,
calibration, pole).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from .exceptions import CalibrationError, NotEigenfunction, PoleError, SingularSystem
from .experiments import (ExperimentConfig, header_lines, run_bmn, run_eigen_characterize,
                          run_eigen_roundtrip, run_plancherel, run_restriction, run_spherical)
from .tree import TreeFunction

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _float(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "oo"):
        return math.inf
    if "/" in t:
        num, den = t.split("/")
        return float(num) / float(den)
    return float(t)


def _ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    if hasattr(v, "dtype"):
        return f"{float(v):.17g}"
    return str(v)


def render_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\r\n")
    if rows:
        w = csv.writer(buf)
        w.writerow(list(rows[0]))
        for row in rows:
            w.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n"


def _emit(text: str, out: str | None, stream=None) -> None:
    if out:
        Path(out).write_text(text, newline="")
    else:
        (stream or sys.stdout).write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=2, help="branching parameter (degree q+1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--check", action="store_true", help="exit 1 when a check fails")
    common.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                        help="override a tolerance, e.g. --tol inversion=1e-9")

    zopts = argparse.ArgumentParser(add_help=False)
    zopts.add_argument("--z-re", type=_float, default=0.0)
    zopts.add_argument("--z-im", type=_float, default=0.0)

    parser = argparse.ArgumentParser(prog="homtree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spherical", parents=[common, zopts], help="table of phi_z(n)")
    p.add_argument("--nmax", type=int, default=12)

    p = sub.add_parser("restriction", parents=[common], help="restriction-theorem sweep")
    p.add_argument("--p", type=_float, default=1.0)
    p.add_argument("--r", type=_float, default=2.0)
    p.add_argument("--alpha", type=_float, default=0.0, help="Re z (the spectral line position)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--support-radius", type=int)
    p.add_argument("--radii", type=_ints, help="comma-separated support radii")
    p.add_argument("--threads", type=int, default=1, help="worker threads (never changes output)")
    p.add_argument("--summary", help="JSON summary file (default: <out>.json or stderr)")

    p = sub.add_parser("eigen", parents=[common, zopts], help="eigenfunction <-> martingale")
    p.add_argument("--mode", choices=["roundtrip", "characterize"], default="roundtrip")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--input", help="TreeFunction JSON (characterize mode)")
    p.add_argument("--p", type=_float, default=2.0, help="boundary exponent is p'")

    p = sub.add_parser("bmn", parents=[common, zopts], help="B(n,m,z) partial sums")
    p.add_argument("--n", type=_ints, default=[0, 1, 5], dest="n_list")
    p.add_argument("--N", type=int, default=20000)

    for name in ("plancherel", "invert"):
        p = sub.add_parser(name, parents=[common], help="calibration, inversion and Parseval")
        p.add_argument("--grid", type=int, default=2048)
        p.add_argument("--support-radius", type=int, default=4)
        p.add_argument("--samples", type=int, default=50)
    return parser


def _config(args) -> ExperimentConfig:
    tols = {}
    for item in args.tol:
        key, _, val = item.partition("=")
        tols[key.strip()] = float(val)
    fields = {k: v for k, v in vars(args).items()
              if k in ExperimentConfig.__dataclass_fields__ and v is not None}
    return ExperimentConfig(tolerances=tols, **fields)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return _dispatch(args, cfg)
    except (SingularSystem, CalibrationError, PoleError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, NotEigenfunction, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _status(ok: bool, args) -> int:
    return EXIT_CHECK if (args.check and not ok) else EXIT_OK


def _dispatch(args, cfg: ExperimentConfig) -> int:
    cmd = args.command
    if cmd == "spherical":
        z = complex(cfg.z_re, cfg.z_im)
        rows = run_spherical(cfg.q, z, args.nmax)
        _emit(render_csv(rows, header_lines(cfg, cmd)), args.out)
        return EXIT_OK

    if cmd == "restriction":
        rows, summary = run_restriction(cfg, threads=args.threads)
        _emit(render_csv(rows, header_lines(cfg, cmd)), args.out)
        target = args.summary or (str(Path(args.out).with_suffix(".json")) if args.out else None)
        _emit(_json(summary), target, stream=sys.stderr)
        return _status(summary["pass"], args)

    if cmd == "eigen":
        if args.mode == "roundtrip":
            report = run_eigen_roundtrip(cfg)
        else:
            if not args.input:
                raise ValueError("characterize mode needs --input")
            u = TreeFunction.from_json(Path(args.input).read_text())
            if u.q != cfg.q:
                cfg.q = u.q
            u = TreeFunction(u.q, u.levels, compact=False)
            report = run_eigen_characterize(cfg, u)
        _emit(_json(report), args.out)
        if report.get("singular"):
            return EXIT_NUMERIC
        return _status(report.get("pass", True), args)

    if cmd == "bmn":
        rows = run_bmn(cfg.q, cfg.z_re, cfg.n_list, cfg.N)
        _emit(render_csv(rows, header_lines(cfg, cmd)), args.out)
        ok = all(r["rel_gap"] < cfg.tol("bmn_closed") for r in rows)
        ok = ok and all(abs(r["cesaro"] / r["target"] - 1) < cfg.tol("bmn_cesaro") for r in rows)
        return _status(ok, args)

    report = run_plancherel(cfg)
    _emit(_json(report), args.out)
    return _status(report["pass"], args)


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
