"""Spectral side: eigenvalues, the c-function, spherical functions, Plancherel density.

Complex powers ``q**w`` are evaluated as ``exp(w * log q)``; with a real
``log q`` there is no branch ambiguity.  The spectral torus is
``[-tau/2, tau/2)`` with ``tau = 2 pi / log q``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import CalibrationError, PoleError

#: Distance to the lattice ``(tau/2) Z`` below which z counts as degenerate.
DEGENERACY_TOL = 1e-12


def tau(q: int) -> float:
    return 2 * math.pi / math.log(q)


def qpow(q: float, w):
    """``q**w`` for complex ``w`` (scalar or array)."""
    return np.exp(np.asarray(w) * math.log(q)) if isinstance(w, np.ndarray) else cmath.exp(w * math.log(q))


def reduce(z: complex, q: int) -> complex:
    """Shift ``Re z`` into ``[-tau/2, tau/2)``."""
    t = tau(q)
    re = (z.real + t / 2) % t - t / 2
    return complex(re, z.imag)


@dataclass(frozen=True)
class SpectralParam:
    z: complex
    q: int

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))

    @property
    def tau(self) -> float:
        return tau(self.q)

    @property
    def reduced(self) -> complex:
        return reduce(self.z, self.q)

    def _lattice_offset(self, step: float, shift: complex = 0.0) -> float:
        """Distance from ``z`` to ``shift + step * Z``."""
        k = round((self.z.real - complex(shift).real) / step)
        return abs(self.z - (shift + k * step))

    @property
    def degenerate(self) -> str | None:
        """``"zero"`` on ``tau Z``, ``"half"`` on ``tau/2 + tau Z``, else ``None``."""
        t = self.tau
        if self._lattice_offset(t) < DEGENERACY_TOL:
            return "zero"
        if self._lattice_offset(t, t / 2) < DEGENERACY_TOL:
            return "half"
        return None

    @property
    def pole_point(self) -> bool:
        """True at ``z = (k tau + i) / 2`` where the Poisson map fails to be injective."""
        return self._lattice_offset(self.tau / 2, 0.5j) < DEGENERACY_TOL


@dataclass(frozen=True)
class StripParams:
    """``delta_p = 1/p - 1/2`` and the strip ``|Im z| <= |delta_p|``."""

    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("p must lie in [1, inf]")

    @property
    def delta(self) -> float:
        return (0.0 if math.isinf(self.p) else 1.0 / self.p) - 0.5

    @property
    def conjugate(self) -> float:
        return conjugate_exponent(self.p)

    def contains(self, z: complex, interior: bool = False) -> bool:
        y, d = abs(complex(z).imag), abs(self.delta)
        return y < d if interior else y <= d + 1e-15


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def delta(p: float) -> float:
    return StripParams(p).delta


def gamma(z: complex, q: int) -> complex:
    """Eigenvalue of the Laplacian on the Poisson kernel ``p**(1/2 + iz)``."""
    return (qpow(q, 0.5 + 1j * z) + qpow(q, 0.5 - 1j * z)) / (q + 1)


def c_func(z: complex, q: int) -> complex:
    z = complex(z)
    if SpectralParam(z, q).degenerate:
        raise PoleError(f"c-function has a pole at z={z} (q={q})")
    num = qpow(q, 0.5 + 1j * z) - qpow(q, -0.5 - 1j * z)
    den = qpow(q, 1j * z) - qpow(q, -1j * z)
    return math.sqrt(q) / (q + 1) * num / den


def c_abs_sq_inv(s: np.ndarray, q: int) -> np.ndarray:
    """``|c(s)|**-2`` for real ``s``, continuously extended by 0 on ``(tau/2) Z``."""
    s = np.asarray(s, dtype=float)
    w = np.exp(1j * s * math.log(q))
    num = math.sqrt(q) / (q + 1) * (math.sqrt(q) * w - 1 / (math.sqrt(q) * w))
    den = w - 1 / w
    out = np.zeros_like(s)
    ok = np.abs(den) > 1e-300
    out[ok] = np.abs(den[ok]) ** 2 / np.abs(num[ok]) ** 2
    return out


def spherical(z: complex, n: int, q: int) -> complex:
    """Spherical function ``phi_z`` at any vertex of length ``n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0 + 0j
    kind = SpectralParam(z, q).degenerate
    if kind is not None:
        val = ((q - 1) / (q + 1) * n + 1) * q ** (-n / 2)
        return complex(val * (-1) ** n if kind == "half" else val)
    # c(z) q**((iz - 1/2) n) + c(-z) q**((-iz - 1/2) n), regrouped as
    # q**(-n/2) (q U_n(x) - U_{n-2}(x)) / (q + 1) with x = cos(z log q) and
    # U_k the Chebyshev polynomials of the second kind.  The polynomial form
    # has no removable singularity, so it stays accurate close to the
    # degenerate points where the two c-function terms cancel.
    x = cmath.cos(complex(z) * math.log(q))
    U = [1.0 + 0j, 2 * x]
    for _ in range(2, n + 1):
        U.append(2 * x * U[-1] - U[-2])
    u, u_nm2 = U[n], (U[n - 2] if n >= 2 else 0j)
    return (q * u - u_nm2) / (q + 1) * q ** (-n / 2)


def spherical_profile(z: complex, nmax: int, q: int) -> np.ndarray:
    return np.array([spherical(z, n, q) for n in range(nmax + 1)])


def plancherel_constant(q: int) -> float:
    """Closed form of the Plancherel normalisation on ``[-tau/2, tau/2)``.

    ``int |c(s)|**-2 ds`` over one period equals ``4 pi (q+1) / (q log q)``.
    """
    return q * math.log(q) / (4 * math.pi * (q + 1))


def midpoint_grid(q: int, M: int) -> np.ndarray:
    """``M`` uniform nodes on the torus, shifted half a step off ``-tau/2``."""
    t = tau(q)
    return -t / 2 + (np.arange(M) + 0.5) * t / M


@lru_cache(maxsize=None)
def calibrate_plancherel(q: int, tol: float = 1e-12, start: int = 16,
                         max_grid: int = 1 << 16) -> float:
    """Plancherel constant making the spectral measure a probability measure.

    Periodic trapezoid rule with grid doubling until two successive values
    agree to ``tol`` (relative).
    """
    t = tau(q)
    prev = None
    M = start
    while M <= max_grid:
        integral = c_abs_sq_inv(midpoint_grid(q, M), q).sum() * t / M
        cg = 1.0 / integral
        if prev is not None and abs(cg - prev) <= tol * abs(cg):
            return cg
        prev = cg
        M *= 2
    raise CalibrationError(f"Plancherel calibration did not settle by M={max_grid}")


def plancherel_density(s, q: int):
    cg = calibrate_plancherel(q)
    return cg * c_abs_sq_inv(np.asarray(s, dtype=float), q)
