"""Poisson kernel and transform, the Laplacian, and the sector operators.

Every boundary integral here is an exact finite sum.  For a vertex ``x`` at
level ``m`` the kernel ``p(x, .)`` is constant on depth-``m`` cylinders, and
its integral over a cylinder of any depth has a closed form (see
:func:`kernel_integrals`), so nothing needs refining to a common depth.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .boundary import (CylinderFunction, Martingale, cond_expect, cylinder_measure, diff, integrate,
                       refine, shell_measure)
from .exceptions import NotEigenfunction, SingularSystem
from .spectral import SpectralParam, c_func, gamma, qpow
from .tree import Tree, TreeFunction

#: Smallest pivot ratio accepted before a level system counts as singular.
PIVOT_TOL = 1e-12


def kernel_exponent(z: complex) -> complex:
    """The power ``w = 1/2 + iz`` of the Poisson kernel used by ``P_z``."""
    return 0.5 + 1j * complex(z)


# -- kernel -------------------------------------------------------------


def kernel_values(q: int, w: complex, m: int, depth: int) -> np.ndarray:
    """``p(x, .)**w`` on depth-``depth`` cylinders for every ``x`` at level ``m``.

    Shape ``(sphere_size(m), sphere_size(depth))``; needs ``depth >= m``.
    """
    if depth < m:
        raise ValueError("kernel of a level-m vertex is only measurable at depth >= m")
    t = Tree(q)
    heights = 2 * t.lcp_matrix(m, depth) - m
    return _powers(q, w, heights, m)


def _powers(q, w, heights, m):
    table = np.array([qpow(q, w * h) for h in range(-m, m + 1)], dtype=complex)
    return table[heights + m]


def kernel_integrals(q: int, w: complex, m: int, d: int) -> np.ndarray:
    """``A[x, c] = integral over E(c) of p(x, .)**w`` for ``|x| = m``, ``|c| = d``.

    If ``c`` is not a prefix of ``x`` the kernel is constant on ``E(c)``;
    otherwise ``E(c)`` splits into the shells ``E_j(x) minus E_{j+1}(x)``,
    ``d <= j <= m``.
    """
    t = Tree(q)
    lcp = t.lcp_matrix(m, d)
    nu_d = float(cylinder_measure(q, d))
    A = _powers(q, w, 2 * lcp - m, m) * nu_d
    if d <= m:
        inside = sum(qpow(q, w * (2 * j - m)) * float(shell_measure(q, j, m)) for j in range(d, m + 1))
        A[lcp == d] = inside
    return A


def poisson_kernel_pow(z: complex, x: Sequence[int], depth: int, q: int,
                       route: str = "height") -> CylinderFunction:
    """``p(x, .)**(1/2 + iz)`` as a depth-``depth`` cylinder function.

    ``route="height"`` evaluates ``q**(w h)`` with the height
    ``h = 2|c(x, w)| - |x|``; ``route="shells"`` assembles the same function
    from the indicator functions of the shells ``E_j(x) minus E_{j+1}(x)``.
    """
    t = Tree(q)
    x = t.validate(x)
    m = len(x)
    if depth < m:
        raise ValueError(f"depth {depth} is smaller than |x| = {m}")
    w = kernel_exponent(z)
    if route == "height":
        row = kernel_values(q, w, m, depth)[t.index(x)]
        return CylinderFunction(q, depth, row)
    if route != "shells":
        raise ValueError(f"unknown route {route!r}")
    vals = np.zeros(t.sphere_size(depth), dtype=complex)
    for j in range(m + 1):
        ind = CylinderFunction.indicator(q, x[:j], depth).values
        if j < m:
            ind = ind - CylinderFunction.indicator(q, x[:j + 1], depth).values
        vals = vals + qpow(q, w * (2 * j - m)) * ind
    return CylinderFunction(q, depth, vals)


# -- Poisson transform ---------------------------------------------------


def poisson_transform(z: complex, F: CylinderFunction, N: int) -> TreeFunction:
    """``P_z F`` on the ball ``B(o, N)``."""
    w = kernel_exponent(z)
    levels = [kernel_integrals(F.q, w, m, F.depth) @ F.values for m in range(N + 1)]
    return TreeFunction(F.q, levels, compact=False)


def poisson_transform_at(z: complex, F: CylinderFunction, x: Sequence[int]) -> complex:
    t = Tree(F.q)
    x = t.validate(x)
    row = kernel_integrals(F.q, kernel_exponent(z), len(x), F.depth)[t.index(x)]
    return complex(row @ F.values)


def poisson_transform_direct(z: complex, F: CylinderFunction, x: Sequence[int]) -> complex:
    """Same value as :func:`poisson_transform_at`, by refining to a common depth."""
    x = Tree(F.q).validate(x)
    depth = max(len(x), F.depth)
    return integrate(poisson_kernel_pow(z, x, depth, F.q) * refine(F, depth))


# -- Laplacian -----------------------------------------------------------


def laplacian(u: TreeFunction) -> TreeFunction:
    """Mean over the ``q + 1`` neighbours, on ``B(o, N - 1)``."""
    N = u.radius
    if N < 1:
        raise ValueError("the Laplacian needs u on a ball of radius >= 1")
    q = u.q
    t = u.tree
    out = []
    for m in range(N):
        val = u.levels[m + 1].reshape(-1, q + 1 if m == 0 else q).sum(axis=1)
        if m > 0:
            val = val + u.levels[m - 1][t.prefix_index(m, m - 1, np.arange(t.sphere_size(m)))]
        out.append(val / (q + 1))
    return TreeFunction(q, out, compact=False)


def check_eigen(u: TreeFunction, z: complex) -> float:
    """``max |L u - gamma(z) u|`` over ``B(o, N - 1)``."""
    Lu = laplacian(u)
    g = gamma(z, u.q)
    return float(max(np.abs(Lu.levels[m] - g * u.levels[m]).max() for m in range(Lu.radius + 1)))


# -- sector operators ----------------------------------------------------


def epsilon_n(u: TreeFunction, n: int) -> TreeFunction:
    """Average of ``u`` over the sector of vertices sharing the length-``n`` prefix."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    t = u.tree
    out = []
    for m, vals in enumerate(u.levels):
        if m <= n:
            out.append(vals)
        else:
            b = t.block(n, m)
            out.append(np.repeat(vals.reshape(-1, b).mean(axis=1), b))
    return TreeFunction(u.q, out, compact=u.compact)


def epsilon_star(u: TreeFunction) -> TreeFunction:
    """``max_n |epsilon_n u|``; exact because ``epsilon_n u(x) = u(x)`` once ``n >= |x|``."""
    t = u.tree
    out = []
    for m, vals in enumerate(u.levels):
        best = np.abs(vals)
        for n in range(m):
            b = t.block(n, m)
            best = np.maximum(best, np.repeat(np.abs(vals.reshape(-1, b).mean(axis=1)), b))
        out.append(best)
    return TreeFunction(u.q, out, compact=u.compact)


def _distances_from(t: Tree, x, radius: int) -> list[np.ndarray]:
    """Distances from ``x`` to every vertex of ``B(o, radius)``, level by level."""
    k = len(x)
    px = [t.index(x[:j]) for j in range(k + 1)]
    out = []
    for m in range(radius + 1):
        idx = np.arange(t.sphere_size(m))
        lcp = np.zeros(idx.size, dtype=np.int64)
        for j in range(1, min(k, m) + 1):
            lcp += t.prefix_index(m, j, idx) == px[j]
        out.append(k + m - 2 * lcp)
    return out


def ball_maximal_M(u: TreeFunction, x: Sequence[int], rmax: int) -> float:
    """``max_{1 <= r <= rmax} #B(x, r)**-1/2 * sum over B(x, r) of |u|``.

    The supremum over all radii is truncated at ``rmax``.  For a compactly
    supported ``u`` every ball is admissible; otherwise ``B(x, rmax)`` has to
    fit inside the domain of ``u``.
    """
    t = u.tree
    x = t.validate(x)
    if rmax < 1:
        raise ValueError("rmax must be >= 1")
    if not u.compact and len(x) + rmax > u.radius:
        raise ValueError(f"B({x}, {rmax}) leaves the domain B(o, {u.radius})")
    dist = np.concatenate(_distances_from(t, x, u.radius))
    a = np.abs(u.flat())
    sums = np.bincount(np.minimum(dist, rmax + 1), weights=a, minlength=rmax + 2)[:rmax + 1]
    cum = np.cumsum(sums)
    sizes = np.array([t.ball_size(r) for r in range(rmax + 1)], dtype=float)
    return float((cum[1:] / np.sqrt(sizes[1:])).max())


def epsilon_domination_gap(u: TreeFunction, C: float = 2.0, radius: int | None = None) -> float:
    """``max_x [eps* u(x) - C (M u(x) + |u(x)|)]`` over ``B(o, radius)``.

    ``M`` is truncated at ``2|x|``, which covers every sector of ``x``.
    Nonpositive means the pointwise domination holds.
    """
    radius = u.radius if radius is None else radius
    t = u.tree
    es = epsilon_star(u)
    gap = -math.inf
    for m in range(radius + 1):
        for i in range(t.sphere_size(m)):
            x = t.word(m, i)
            Mu = ball_maximal_M(u, x, max(1, 2 * m))
            gap = max(gap, es.levels[m][i].real - C * (Mu + abs(u.levels[m][i])))
    return gap


# -- B coefficients --------------------------------------------------------


@dataclass(frozen=True)
class BCoeff:
    n: int
    m: int
    z: complex
    value: complex
    q: int

    @property
    def prime_value(self) -> complex:
        return self.q ** (self.m / 2) * self.value


def _b_prime(n: int, m, s: float, q: int):
    """``q**(m/2) B(n, m, s)``; vectorised over ``m``."""
    c = c_func(s, q)
    m = np.asarray(m)
    e = lambda k: np.exp(1j * s * math.log(q) * k)  # noqa: E731  q**(i s k)
    if n == 0:
        val = e(-m) + c * (e(m) - e(-m))
    else:
        k = m - n + 1
        val = c * e(n - 1) * (e(k) - e(-k))
    return np.where(m < n, 0, val)


def b_coeff(n: int, m: int, s: float, q: int) -> BCoeff:
    """Scalar by which ``P_s`` maps the ``n``-th martingale difference to level ``m``."""
    if isinstance(s, complex) and s.imag != 0:
        raise ValueError("B coefficients are defined for real s")
    s = float(np.real(s))
    val = complex(_b_prime(n, m, s, q)) * q ** (-m / 2)
    return BCoeff(n, m, s, val, q)


def b_prime_sumsq(n: int, N: int, s: float, q: int) -> float:
    """``sum_{m=n}^{N} |B'(n, m, s)|**2`` by direct summation."""
    if n > N:
        return 0.0
    return float((np.abs(_b_prime(n, np.arange(n, N + 1), s, q)) ** 2).sum())


def b_prime_sumsq_closed(n: int, N: int, s: float, q: int) -> float:
    """Closed form of :func:`b_prime_sumsq` (geometric sums in ``q**(2is)``)."""
    if n > N:
        return 0.0
    c = c_func(s, q)
    a = cmath.exp(2j * s * math.log(q))

    def geo(ratio, K):
        # sum_{k=1}^{K} ratio**k
        return ratio * (1 - ratio ** K) / (1 - ratio)

    cc = abs(c) ** 2
    if n == 0:
        G = geo(a, N)
        val = (N + 1) + cc * (2 * N - G - G.conjugate()) + c * (G - N) + c.conjugate() * (G.conjugate() - N)
    else:
        K = N - n + 1
        G = geo(a, K)
        val = cc * (2 * K - G - G.conjugate())
    return float(val.real)


def cesaro_limit(s: float, q: int) -> float:
    """Limit ``2 |c(s)|**2`` of ``(1/N) sum |B'|**2``."""
    return 2 * abs(c_func(s, q)) ** 2


def poisson_of_diff_check(F: CylinderFunction, n: int, m: int, z: float) -> float:
    """Residual of ``P_z(Delta_n F)(x) = B(n, m, z) Delta_n F(x_n)`` over level ``m``.

    For ``m < n`` the right-hand side is 0.
    """
    q = F.q
    t = Tree(q)
    dF = diff(F, n)
    u = kernel_integrals(q, kernel_exponent(z), m, n) @ dF.values
    if m < n:
        return float(np.abs(u).max())
    B = b_coeff(n, m, z, q).value
    idx = np.arange(t.sphere_size(m))
    rhs = B * dF.values[t.prefix_index(m, n, idx)]
    return float(np.abs(u - rhs).max())


# -- eigenfunctions to martingales -----------------------------------------


def _solve_pivoted(A: np.ndarray, b: np.ndarray, level: int) -> np.ndarray:
    Q, R, perm = scipy.linalg.qr(A, mode="economic", pivoting=True)
    d = np.abs(np.diag(R))
    if d.min() < PIVOT_TOL * d.max():
        raise SingularSystem(
            f"level {level} system is singular (pivot ratio {d.min() / d.max():.3e})", level=level)
    k = A.shape[1]
    y = scipy.linalg.solve_triangular(R[:k, :k], (Q.conj().T @ b)[:k])
    out = np.empty_like(y)
    out[perm] = y
    return out


def martingale_from_eigenfunction(u: TreeFunction, z: complex, tol: float = 1e-10,
                                  check: bool = True, method: str = "stacked") -> Martingale:
    """Recover the martingale ``(F_n)`` with ``P_z F_n = epsilon_n u`` on ``B(o, N)``.

    ``method="stacked"`` solves, for each ``n``, the overdetermined system
    ``P_z F_n = epsilon_n u`` on every level ``0..N`` in the least-squares
    sense.  ``method="level"`` keeps only the square level-``n`` block
    ``A_n F_n = u|S(o, n)``; that block is singular whenever some
    ``B(k, n, z)`` vanishes (e.g. ``z = tau/8`` at level 4), while the
    stacked system is not, because two consecutive ``B(k, m, z)`` never
    vanish together off ``(tau/2) Z``.
    """
    if method not in ("stacked", "level"):
        raise ValueError(f"unknown method {method!r}")
    q = u.q
    if check:
        res = check_eigen(u, z)
        scale = max(1.0, float(np.abs(u.flat()).max()))
        if res > tol * scale:
            raise NotEigenfunction(f"eigen residual {res:.3e} exceeds {tol:g} (scaled by {scale:.3g})")
    sp = SpectralParam(z, q)
    w = kernel_exponent(z)
    N = u.radius
    entries = []
    for n in range(N + 1):
        if method == "level":
            A, b = kernel_integrals(q, w, n, n), u.levels[n]
        else:
            A = np.vstack([kernel_integrals(q, w, m, n) for m in range(N + 1)])
            b = epsilon_n(u, n).flat()
        try:
            Fn = _solve_pivoted(A, b, n)
        except SingularSystem:
            if sp.pole_point:
                raise SingularSystem(f"z={z} is a pole point; level {n} system has rank "
                                     f"{np.linalg.matrix_rank(A)}", level=n) from None
            raise
        entries.append(CylinderFunction(q, n, Fn))
    return Martingale(entries)


def martingale_residual(mart: Martingale, u: TreeFunction, z: complex) -> float:
    """``max_n max_{B(o, N)} |P_z F_n - epsilon_n u|``."""
    err = 0.0
    for n, Fn in enumerate(mart):
        lhs = poisson_transform(z, Fn, u.radius)
        rhs = epsilon_n(u, n)
        err = max(err, float(np.abs(lhs.flat() - rhs.flat()).max()))
    return err


def level_errors(mart: Martingale, F: CylinderFunction) -> list[float]:
    """``max |F_n - E_n F|`` per level."""
    return [float(np.abs(Fn.values - cond_expect(F, n).values).max()) for n, Fn in enumerate(mart)]
