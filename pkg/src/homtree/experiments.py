"""Reproducible experiments behind the command-line interface.

Each ``run_*`` function returns plain data (rows and a summary dict); the CLI
only formats it.  Random inputs are drawn up front from one seeded generator
and evaluated in fixed-size chunks, so thread count never changes a result.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .boundary import CylinderFunction, lp_norm
from .exceptions import SingularSystem
from .lorentz import lorentz_norm, lp
from .poisson import (b_prime_sumsq, b_prime_sumsq_closed, cesaro_limit, check_eigen,
                      epsilon_n, kernel_exponent, kernel_values, level_errors,
                      martingale_from_eigenfunction, poisson_transform)
from .spectral import (SpectralParam, calibrate_plancherel, conjugate_exponent, delta,
                       plancherel_constant, spherical, tau)
from .transforms import SpectralSample, invert, parseval, spherical_probe
from .tree import TreeFunction

CHUNK = 32

DEFAULT_TOLERANCES = {
    "endpoint": 1e-12,       # p = 1: ratio <= 1 + tol
    "stability": 2.0,        # max ratio at largest radius <= factor * at smallest
    "inversion": 1e-8,
    "parseval": 1e-8,
    "weights": 1e-10,
    "roundtrip": 1e-9,
    "bmn_closed": 1e-9,
    "bmn_cesaro": 0.02,
}


@dataclass
class ExperimentConfig:
    q: int = 2
    seed: int = 0
    support_radius: int | None = None
    radii: list[int] | None = None
    depth: int = 4
    grid: int = 2048
    samples: int = 200
    p: float = 1.0
    r: float = 2.0
    alpha: float = 0.0
    z_re: float = 0.0
    z_im: float = 0.0
    n_list: list[int] = field(default_factory=lambda: [0, 1, 5])
    N: int = 20000
    nmax: int = 12
    tolerances: dict = field(default_factory=dict)

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def echo(self) -> dict:
        d = asdict(self)
        d["tolerances"] = {**DEFAULT_TOLERANCES, **self.tolerances}
        return d


def header_lines(cfg: ExperimentConfig, command: str) -> list[str]:
    return [
        f"homtree {__version__} {command}",
        "config " + json.dumps(cfg.echo(), sort_keys=True),
        f"seed={cfg.seed} q={cfg.q} tau={tau(cfg.q):.17g}",
    ]


# -- spherical table -------------------------------------------------------


def run_spherical(q: int, z: complex, nmax: int) -> list[dict]:
    kind = SpectralParam(z, q).degenerate
    rows = []
    for n in range(nmax + 1):
        v = spherical(z, n, q)
        rows.append({"n": n, "re": v.real, "im": v.imag,
                     "scaled_abs": abs(v) * q ** (n / 2), "degenerate": kind or ""})
    return rows


# -- restriction -------------------------------------------------------------


def restriction_setup(cfg: ExperimentConfig) -> dict:
    """Spectral parameter, exponent and tree-side norm for a restriction run."""
    p, r = cfg.p, cfg.r
    if p < 1 or p > 2:
        raise ValueError(f"p must lie in [1, 2], got {p}")
    if p == 2:
        if r != 2:
            raise ValueError("the p = 2 mode measures the L^2 boundary norm (r = 2)")
        return {"mode": "B", "z": complex(cfg.alpha, 0.0), "r": 2.0, "norm": "L^{2,1}",
                "norm_fn": lambda f: lorentz_norm(f, 2, 1)}
    pp = conjugate_exponent(p)
    if not p <= r <= pp:
        raise ValueError(f"r={r} outside [p, p'] = [{p}, {pp}]")
    z = complex(cfg.alpha, delta(conjugate_exponent(r)))
    if p == 1:
        return {"mode": "A-endpoint", "z": z, "r": r, "norm": "L^1", "norm_fn": lambda f: lp(f, 1)}
    if r in (p, pp):
        return {"mode": "A-lorentz", "z": z, "r": r, "norm": f"L^{{{p:g},1}}",
                "norm_fn": lambda f: lorentz_norm(f, p, 1)}
    return {"mode": "A", "z": z, "r": r, "norm": f"L^{p:g}", "norm_fn": lambda f: lp(f, p)}


def _boundary_norms(K: np.ndarray, F: np.ndarray, nu: float, r: float) -> np.ndarray:
    """``||K f||_{L^r(Omega)}`` for each column ``f`` of ``F``."""
    a = np.abs(K @ F)
    if math.isinf(r):
        return a.max(axis=0)
    return ((a ** r).sum(axis=0) * nu) ** (1 / r)


def run_restriction(cfg: ExperimentConfig, threads: int = 1) -> tuple[list[dict], dict]:
    setup = restriction_setup(cfg)
    z, r, norm_fn = setup["z"], setup["r"], setup["norm_fn"]
    q = cfg.q
    if cfg.radii:
        radii = list(cfg.radii)
    elif cfg.support_radius is not None:
        radii = [cfg.support_radius]
    else:
        radii = [3, 5, 7, 9] if setup["mode"] == "B" else [3, 5]
    rng = np.random.default_rng(cfg.seed)
    w = kernel_exponent(z)
    rows = []
    per_radius = {}
    for R in radii:
        funcs = [TreeFunction.random(q, R, rng) for _ in range(cfg.samples)]
        labels = [str(i) for i in range(cfg.samples)]
        if setup["mode"] != "A-endpoint":
            funcs.append(spherical_probe(q, z, R))
            labels.append("probe")
        K = np.hstack([kernel_values(q, w, m, R).T for m in range(R + 1)])
        nu = float(CylinderFunction.constant(q, depth=R).measure)
        chunks = [funcs[i:i + CHUNK] for i in range(0, len(funcs), CHUNK)]

        def work(chunk):
            F = np.stack([f.flat(R) for f in chunk], axis=1)
            lhs = _boundary_norms(K, F, nu, r)
            norms = np.array([norm_fn(f) for f in chunk])
            return lhs, norms

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(work, chunks))
        else:
            results = [work(c) for c in chunks]
        lhs = np.concatenate([a for a, _ in results])
        norms = np.concatenate([b for _, b in results])
        ratios = lhs / norms
        for lab, n_, l_, ra in zip(labels, norms, lhs, ratios):
            rows.append({"radius": R, "sample_id": lab, "norm": n_, "lhs": l_, "ratio": ra})
        per_radius[R] = float(ratios.max())
    max_ratio = max(per_radius.values())
    summary = {
        "mode": setup["mode"], "z": [z.real, z.imag], "r": r, "norm": setup["norm"],
        "max_ratio": max_ratio, "max_ratio_by_radius": {str(k): v for k, v in per_radius.items()},
    }
    if setup["mode"] == "A-endpoint":
        ok = max_ratio <= 1 + cfg.tol("endpoint")
        summary["check"] = f"max ratio <= 1 + {cfg.tol('endpoint'):g}"
    else:
        first, last = per_radius[radii[0]], per_radius[radii[-1]]
        growth = last / first
        summary["growth"] = growth
        ok = growth <= cfg.tol("stability")
        summary["divergent"] = not ok
        summary["check"] = (f"heuristic: max ratio at radius {radii[-1]} <= "
                            f"{cfg.tol('stability'):g} x max ratio at radius {radii[0]}")
    summary["pass"] = bool(ok)
    return rows, summary


# -- eigenfunctions ----------------------------------------------------------


def run_eigen_roundtrip(cfg: ExperimentConfig) -> dict:
    z = complex(cfg.z_re, cfg.z_im)
    rng = np.random.default_rng(cfg.seed)
    F = CylinderFunction.random(cfg.q, cfg.depth, rng)
    u = poisson_transform(z, F, cfg.depth)
    report = {"mode": "roundtrip", "z": [z.real, z.imag], "depth": cfg.depth,
              "eigen_residual": check_eigen(u, z)}
    try:
        mart = martingale_from_eigenfunction(u, z)
    except SingularSystem as exc:
        report.update(singular=True, level=exc.level, message=str(exc))
        report["pass"] = False
        return report
    errs = level_errors(mart, F)
    report.update(singular=False, level_errors=errs, max_level_error=max(errs))
    report["pass"] = max(errs) < cfg.tol("roundtrip")
    return report


def run_eigen_characterize(cfg: ExperimentConfig, u: TreeFunction) -> dict:
    z = complex(cfg.z_re, cfg.z_im)
    pp = conjugate_exponent(cfg.p) if cfg.p > 1 else math.inf
    report = {"mode": "characterize", "z": [z.real, z.imag], "radius": u.radius,
              "eigen_residual": check_eigen(u, z), "pole_point": SpectralParam(z, u.q).pole_point}
    try:
        mart = martingale_from_eigenfunction(u, z)
    except SingularSystem as exc:
        report.update(singular=True, level=exc.level, message=str(exc))
        return report
    eps_res = []
    for n, Fn in enumerate(mart):
        diff_ = poisson_transform(z, Fn, u.radius).flat() - epsilon_n(u, n).flat()
        eps_res.append(float(np.abs(diff_).max()))
    norms = [lp_norm(Fn, pp) for Fn in mart]
    report.update(singular=False, epsilon_residuals=eps_res, boundary_exponent=pp,
                  level_norms=norms, sup_norm=max(norms),
                  compatibility_error=mart.compatibility_error())
    return report


# -- B coefficients ----------------------------------------------------------


def run_bmn(q: int, s: float, n_list, N: int) -> list[dict]:
    target = cesaro_limit(s, q)
    rows = []
    for n in n_list:
        direct = b_prime_sumsq(n, N, s, q)
        closed = b_prime_sumsq_closed(n, N, s, q)
        rows.append({"n": n, "direct_sum": direct, "closed_sum": closed,
                     "cesaro": direct / N if N > 0 else math.nan, "target": target,
                     "rel_gap": abs(direct - closed) / max(abs(direct), 1e-300)})
    return rows


# -- Plancherel --------------------------------------------------------------


def run_plancherel(cfg: ExperimentConfig) -> dict:
    q = cfg.q
    R = 4 if cfg.support_radius is None else cfg.support_radius
    rng = np.random.default_rng(cfg.seed)
    cg = calibrate_plancherel(q)
    sample = SpectralSample(q, cfg.grid)
    inv_err = 0.0
    par_res = 0.0
    for _ in range(max(1, cfg.samples)):
        f1 = TreeFunction.random(q, R, rng)
        f2 = TreeFunction.random(q, R, rng)
        inv_err = max(inv_err, invert(f1, cfg.grid)[1])
        lhs, rhs, res = parseval(f1, f2, cfg.grid)
        par_res = max(par_res, res / (lp(f1, 2) * lp(f2, 2)))
    d = TreeFunction.delta(q, ())
    delta_res = parseval(d, d, cfg.grid)[2]
    report = {
        "C_G": cg, "C_G_closed_form": plancherel_constant(q), "weight_sum": sample.total,
        "max_inversion_error": inv_err, "max_parseval_relative_residual": par_res,
        "parseval_delta_residual": delta_res, "grid": cfg.grid, "support_radius": R,
    }
    report["pass"] = bool(inv_err < cfg.tol("inversion") and par_res < cfg.tol("parseval")
                          and abs(sample.total - 1) < cfg.tol("weights"))
    return report
