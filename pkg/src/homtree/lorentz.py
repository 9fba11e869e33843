"""Lorentz functionals for step functions.

For a function taking value ``a_k`` (sorted decreasingly) on a set of
measure ``m_k``, the rearrangement is a step function with jumps at the
cumulative measures ``T_k``, and the defining integral collapses to

    ||f||_{p,r}**r = sum_k a_k**r (T_k**(r/p) - T_{k-1}**(r/p))
    ||f||_{p,inf}  = max_k a_k T_k**(1/p)

On the tree every vertex has measure 1, so ``T_k = k``.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .boundary import CylinderFunction, lp_norm
from .tree import TreeFunction


def _abs_values(f) -> np.ndarray:
    if isinstance(f, TreeFunction):
        return np.abs(f.flat())
    if isinstance(f, CylinderFunction):
        return np.abs(f.values)
    return np.abs(np.asarray(f)).reshape(-1)


def rearrangement(f) -> np.ndarray:
    """Nonincreasing rearrangement of ``|f|`` under counting measure."""
    return np.sort(_abs_values(f))[::-1]


def boundary_rearrangement(F: CylinderFunction) -> tuple[np.ndarray, np.ndarray]:
    """``(values, measures)`` of ``|F|`` sorted decreasingly."""
    a = rearrangement(F)
    return a, np.full(a.size, float(F.measure))


def _check_indices(p: float, r: float) -> None:
    if not p >= 1 or math.isinf(p):
        raise ValueError(f"first Lorentz index must lie in [1, inf), got {p}")
    if not r >= 1:
        raise ValueError(f"second Lorentz index must lie in [1, inf], got {r}")


def step_lorentz_norm(values: np.ndarray, measures: np.ndarray, p: float, r: float) -> float:
    """Lorentz ``(p, r)`` functional of a step rearrangement (values decreasing)."""
    _check_indices(p, r)
    a = np.asarray(values, dtype=float)
    m = np.asarray(measures, dtype=float)
    if a.size == 0:
        return 0.0
    # merge runs of equal values into one step; a constant step then costs a
    # single power instead of a telescoping sum that accumulates roundoff
    starts = np.flatnonzero(np.concatenate(([True], a[1:] != a[:-1])))
    a = a[starts]
    T = np.cumsum(np.add.reduceat(m, starts))
    if math.isinf(r):
        return float((a * T ** (1 / p)).max())
    scale = a.max()
    if scale == 0:
        return 0.0
    T0 = np.concatenate(([0.0], T[:-1]))
    # factor out the largest value so that a**r neither underflows nor overflows
    return float(scale * ((a / scale) ** r * (T ** (r / p) - T0 ** (r / p))).sum() ** (1 / r))


def lorentz_norm(f, p: float, r: float) -> float:
    """``||f||_{p,r}`` under counting measure (tree side)."""
    a = rearrangement(f)
    return step_lorentz_norm(a, np.ones(a.size), p, r)


def weak_norm(f, p: float) -> float:
    return lorentz_norm(f, p, math.inf)


def lp(f, p: float) -> float:
    a = _abs_values(f)
    if math.isinf(p):
        return float(a.max())
    scale = a.max() if a.size else 0.0
    if scale == 0:
        return 0.0
    return float(scale * ((a / scale) ** p).sum() ** (1 / p))


def boundary_lorentz_norm(F: CylinderFunction, p: float, r: float) -> float:
    a, m = boundary_rearrangement(F)
    return step_lorentz_norm(a, m, p, r)


def boundary_lp_norm(F: CylinderFunction, p: float) -> float:
    return lp_norm(F, p)


def weak_norm_growth(u: TreeFunction, p: float, radii: Iterable[int]) -> list[dict]:
    """Ball-restricted statistics of ``u`` for each radius ``N``.

    ``weak`` is ``||u||_{p,inf}`` on ``B(o, N)``, ``strong`` is the ``l^p``
    norm there, and ``mean_power`` is ``(1/N) sum_{B(o,N)} |u|**p``.
    """
    rows = []
    for N in radii:
        vals = u.flat(N)
        a = np.abs(vals)
        rows.append({
            "N": N,
            "weak": weak_norm(a, p),
            "strong": lp(a, p),
            "mean_power": float((a ** p).sum() / N) if N > 0 else math.nan,
        })
    return rows


def lemmaweak_bound(u: TreeFunction, p: float, N: int, q: int | None = None) -> tuple[float, float]:
    """``(lhs, rhs)`` of ``(1/N) sum |u|**p <= 2 log q (1 + log2 N) ||u||_{p,inf}**p`` on ``B(o, N)``."""
    q = u.q if q is None else q
    row = weak_norm_growth(u, p, [N])[0]
    rhs = 2 * math.log(q) * (1 + math.log2(N)) * row["weak"] ** p
    return row["mean_power"], rhs
