"""Helgason-Fourier and spherical transforms, inversion and Plancherel checks.

The boundary integrals are exact; the only quadrature is the periodic
trapezoid rule over the spectral torus, on midpoint-shifted nodes so the
zeros of the Plancherel density at ``0`` and ``-tau/2`` are never sampled.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import CylinderFunction, cylinder_measure, integrate, lp_norm, refine
from .poisson import kernel_exponent, kernel_values, poisson_kernel_pow
from .spectral import c_abs_sq_inv, calibrate_plancherel, midpoint_grid, spherical, tau
from .tree import Tree, TreeFunction


def hf_transform(f: TreeFunction, z: complex, depth: int | None = None) -> CylinderFunction:
    """``f~(z, .) = sum_x f(x) p(x, .)**(1/2 + iz)`` at depth ``support radius`` (or more)."""
    R = f.support_radius()
    depth = R if depth is None else depth
    if depth < R:
        raise ValueError("depth must cover the support of f")
    w = kernel_exponent(z)
    vals = np.zeros(Tree(f.q).sphere_size(depth), dtype=complex)
    for m in range(R + 1):
        vals += f.levels[m] @ kernel_values(f.q, w, m, depth)
    return CylinderFunction(f.q, depth, vals)


def spherical_transform(f: TreeFunction, z: complex) -> complex:
    if not f.is_radial():
        raise ValueError("spherical transform needs a radial function")
    t = f.tree
    return complex(sum(f.levels[n][0] * t.sphere_size(n) * spherical(z, n, f.q)
                       for n in range(f.radius + 1)))


@dataclass
class SpectralSample:
    """Uniform midpoint grid on the torus with Plancherel weights ``dmu(s_j)``."""

    q: int
    M: int
    s: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("grid needs at least two nodes")
        cg = calibrate_plancherel(self.q)
        self.s = midpoint_grid(self.q, self.M)
        self.weights = cg * c_abs_sq_inv(self.s, self.q) * tau(self.q) / self.M

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def to_csv(self, values: Sequence[CylinderFunction] | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["s", "weight"]
        if values is not None:
            depth = values[0].depth
            for k in range(values[0].values.size):
                header += [f"re_{k}", f"im_{k}"]
        w.writerow(header)
        for j in range(self.M):
            row = [f"{self.s[j]:.17g}", f"{self.weights[j]:.17g}"]
            if values is not None:
                v = refine(values[j], depth).values
                for a in v:
                    row += [f"{a.real:.17g}", f"{a.imag:.17g}"]
            w.writerow(row)
        return buf.getvalue()


class _SpectralKernel:
    """Kernel ``p(x, c)**(1/2 + is)`` for ``x`` in ``B(o, R)``, ``c`` at depth ``R``.

    The entry for ``(c, x)`` is ``q**(h/2) exp(i s log q h)`` with an integer
    height ``|h| <= R``, so ``f~(s, c)`` is a trigonometric polynomial in
    ``s log q`` whose coefficients are computed once; evaluating it on the
    whole grid is one matrix product.
    """

    def __init__(self, q: int, R: int):
        t = Tree(q)
        self.q, self.R = q, R
        self.heights = np.hstack([(2 * t.lcp_matrix(m, R) - m).T for m in range(R + 1)])
        self.amp = np.power(float(q), self.heights / 2)
        self.nu = float(cylinder_measure(q, R))
        self.logq = math.log(q)
        self.orders = np.arange(-R, R + 1)

    def coefficients(self, fv: np.ndarray) -> np.ndarray:
        """``G[c, a]`` with ``f~(s, c) = sum_a G[c, a] exp(i s log q a)``."""
        G = np.zeros((self.heights.shape[0], self.orders.size), dtype=complex)
        for k, a in enumerate(self.orders):
            G[:, k] = np.where(self.heights == a, self.amp, 0.0) @ fv
        return G

    def phases(self, s: np.ndarray) -> np.ndarray:
        return np.exp(1j * self.logq * np.outer(s, self.orders))

    def transform(self, fv: np.ndarray, s: np.ndarray) -> np.ndarray:
        """``f~(s_j, c)`` for every grid point and cylinder, shape ``(M, C)``."""
        return self.phases(s) @ self.coefficients(fv).T

    def pullback(self, ft: np.ndarray, s: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """``sum_j w_j int f~(s_j, .) p**(1/2 - is_j)(y, .) dnu`` for every ``y``."""
        E = self.phases(s)
        phi = (ft * weights[:, None]).T @ np.conj(E)
        C = self.heights.shape[0]
        picked = phi[np.arange(C)[:, None], self.heights + self.R]
        return self.nu * (self.amp * picked).sum(axis=0)


def _levels(t: Tree, flat: np.ndarray, R: int) -> list[np.ndarray]:
    out, pos = [], 0
    for m in range(R + 1):
        n = t.sphere_size(m)
        out.append(flat[pos:pos + n])
        pos += n
    return out


def transform_on_grid(f: TreeFunction, sample: "SpectralSample") -> list[CylinderFunction]:
    """``f~(s_j, .)`` at every node of ``sample``."""
    R = f.support_radius()
    K = _SpectralKernel(f.q, R)
    ft = K.transform(f.flat(R), sample.s)
    return [CylinderFunction(f.q, R, row) for row in ft]


def invert(f: TreeFunction, M: int = 2048, R: int | None = None):
    """Reconstruct ``f`` on ``B(o, R)`` from its Helgason-Fourier transform.

    The boundary integral is exact at each node; the torus integral is the
    trapezoid sum with Plancherel weights.  Returns
    ``(reconstruction, max_abs_error)``.
    """
    R = f.support_radius() if R is None else R
    sample = SpectralSample(f.q, M)
    K = _SpectralKernel(f.q, R)
    fv = f.flat(R)
    rec = K.pullback(K.transform(fv, sample.s), sample.s, sample.weights)
    out = TreeFunction(f.q, _levels(f.tree, rec, R))
    return out, float(np.abs(rec - fv).max())


def invert_radial(f: TreeFunction, M: int = 2048) -> TreeFunction:
    """Radial inversion ``f(x) = int f^(s) phi_{-s}(x) dmu(s)``."""
    sample = SpectralSample(f.q, M)
    R = f.radius
    prof = np.zeros(R + 1, dtype=complex)
    for s, mu in zip(sample.s, sample.weights):
        fh = spherical_transform(f, s)
        prof += mu * fh * np.array([spherical(-s, n, f.q) for n in range(R + 1)])
    return TreeFunction.radial(f.q, prof)


def parseval(f1: TreeFunction, f2: TreeFunction, M: int = 2048):
    """``(sum f1 conj(f2), int int f1~ conj(f2~) dmu dnu, |difference|)``."""
    if f1.q != f2.q:
        raise ValueError("functions on different trees")
    R = max(f1.support_radius(), f2.support_radius())
    a, b = f1.flat(R), f2.flat(R)
    lhs = complex(np.vdot(b, a))
    sample = SpectralSample(f1.q, M)
    K = _SpectralKernel(f1.q, R)
    t1, t2 = K.transform(a, sample.s), K.transform(b, sample.s)
    rhs = complex(K.nu * (sample.weights @ (t1 * np.conj(t2)).sum(axis=1)))
    return lhs, rhs, abs(lhs - rhs)


def symmetry_residual(f: TreeFunction, x: Sequence[int], s: float,
                      g_plus: CylinderFunction | None = None,
                      g_minus: CylinderFunction | None = None) -> float:
    """``|int p**(1/2 - is)(x,.) g(s,.) dnu - int p**(1/2 + is)(x,.) g(-s,.) dnu|``.

    ``g`` defaults to ``f~``; either side may be replaced for negative controls.
    """
    g_plus = hf_transform(f, s) if g_plus is None else g_plus
    g_minus = hf_transform(f, -s) if g_minus is None else g_minus
    x = Tree(f.q).validate(x)
    depth = max(len(x), g_plus.depth, g_minus.depth)
    lhs = integrate(poisson_kernel_pow(-s, x, depth, f.q) * refine(g_plus, depth))
    rhs = integrate(poisson_kernel_pow(s, x, depth, f.q) * refine(g_minus, depth))
    return abs(lhs - rhs)


def restriction_lhs(f: TreeFunction, z: complex, r: float) -> float:
    """``||f~(z, .)||_{L^r(Omega)}``; ``r = inf`` is the max over cylinders."""
    return lp_norm(hf_transform(f, z), r)


def boundary_gram(f: TreeFunction, z: complex) -> complex:
    """``||f~(z,.)||_2**2`` via the Gram form of the kernel.

    ``sum_{x,y} f(x) conj(f(y)) int p**w(x,.) conj(p**w(y,.)) dnu``,
    computed pairwise without forming ``f~``.
    """
    R = f.support_radius()
    t = f.tree
    verts = [(m, i) for m in range(R + 1) for i in range(t.sphere_size(m))]
    fv = f.flat(R)
    G = 0j
    kernels = [poisson_kernel_pow(z, t.word(m, i), R, f.q) for m, i in verts]
    for a, Ka in enumerate(kernels):
        if fv[a] == 0:
            continue
        for b, Kb in enumerate(kernels):
            if fv[b] == 0:
                continue
            G += fv[a] * np.conj(fv[b]) * integrate(Ka * Kb.conj())
    return G


def spherical_probe(q: int, z: complex, R: int) -> TreeFunction:
    """``conj(phi_z)`` cut off to ``B(o, R)``: the radial function that tests ``phi_z`` hardest."""
    prof = [np.conj(spherical(z, n, q)) for n in range(R + 1)]
    return TreeFunction.radial(q, prof)
