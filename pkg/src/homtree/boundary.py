"""Boundary of the tree as a measure space of cylinder sets.

A :class:`CylinderFunction` of depth ``n`` is a simple function constant on
each cylinder ``E(x)``, ``|x| = n``; values are stored in lexicographic order
of the base vertices.  All cylinders of one depth carry the same measure, so
conditional expectations are plain block means and integrals are a single
rational weight times a sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .tree import Tree

#: Largest number of cylinders any operation will materialise
#: (``sphere_size(22)`` for ``q = 2``).  Raise it deliberately if needed.
MAX_CYLINDERS = 3 * 2 ** 21


def check_depth(q: int, depth: int) -> None:
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if Tree(q).sphere_size(depth) > MAX_CYLINDERS:
        raise ValueError(f"depth {depth} exceeds the cylinder cap ({MAX_CYLINDERS}) for q={q}")


def cylinder_measure(q: int, n: int) -> Fraction:
    """``nu(E(x))`` for ``|x| = n``; exact.

    The root cylinder is the whole boundary and has measure 1.
    """
    if n < 0:
        raise ValueError("depth must be nonnegative")
    if n == 0:
        return Fraction(1)
    return Fraction(q, (q + 1) * q ** n)


def shell_measure(q: int, j: int, m: int) -> Fraction:
    """``nu(E_j(x) minus E_{j+1}(x))`` for ``|x| = m``, ``0 <= j <= m``."""
    if not 0 <= j <= m:
        raise ValueError("need 0 <= j <= m")
    upper = cylinder_measure(q, j + 1) if j < m else Fraction(0)
    return cylinder_measure(q, j) - upper


@dataclass(frozen=True, eq=False)
class CylinderFunction:
    q: int
    depth: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_depth(self.q, self.depth)
        vals = np.array(self.values, dtype=complex).reshape(-1)
        expected = Tree(self.q).sphere_size(self.depth)
        if vals.size != expected:
            raise ValueError(f"depth {self.depth} needs {expected} values, got {vals.size}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, q: int, value: complex = 1.0, depth: int = 0) -> "CylinderFunction":
        return cls(q, depth, np.full(Tree(q).sphere_size(depth), value, dtype=complex))

    @classmethod
    def indicator(cls, q: int, x: Sequence[int], depth: int | None = None) -> "CylinderFunction":
        """Characteristic function of ``E(x)`` (``x = ()`` gives the constant 1)."""
        t = Tree(q)
        x = t.validate(x)
        depth = len(x) if depth is None else depth
        if depth < len(x):
            raise ValueError("depth must be at least |x|")
        vals = np.zeros(t.sphere_size(depth), dtype=complex)
        if not x:
            vals[:] = 1
        else:
            b = t.block(len(x), depth)
            start = t.index(x) * b
            vals[start:start + b] = 1
        return cls(q, depth, vals)

    @classmethod
    def random(cls, q: int, depth: int, rng: np.random.Generator,
               real: bool = False) -> "CylinderFunction":
        n = Tree(q).sphere_size(depth)
        v = rng.standard_normal(n)
        if not real:
            v = v + 1j * rng.standard_normal(n)
        return cls(q, depth, v)

    @property
    def measure(self) -> Fraction:
        return cylinder_measure(self.q, self.depth)

    def __call__(self, x: Sequence[int]) -> complex:
        """Value on the cylinder through ``x`` (``|x| >= depth``)."""
        t = Tree(self.q)
        x = t.validate(x)
        if len(x) < self.depth:
            raise ValueError("vertex is shallower than the function's depth")
        return complex(self.values[t.index(x[:self.depth])])

    def _binary(self, other, op):
        if isinstance(other, CylinderFunction):
            if other.q != self.q:
                raise ValueError("functions on different boundaries")
            d = max(self.depth, other.depth)
            return CylinderFunction(self.q, d, op(refine(self, d).values, refine(other, d).values))
        return CylinderFunction(self.q, self.depth, op(self.values, other))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return CylinderFunction(self.q, self.depth, -self.values)

    def conj(self) -> "CylinderFunction":
        return CylinderFunction(self.q, self.depth, np.conj(self.values))

    def abs(self) -> "CylinderFunction":
        return CylinderFunction(self.q, self.depth, np.abs(self.values))

    def allclose(self, other: "CylinderFunction", atol: float = 0.0) -> bool:
        d = max(self.depth, other.depth)
        return bool(np.all(np.abs(refine(self, d).values - refine(other, d).values) <= atol))

    def to_json(self) -> str:
        return json.dumps({"q": self.q, "depth": self.depth,
                           "values": [[v.real, v.imag] for v in self.values.tolist()]})

    @classmethod
    def from_json(cls, text: str) -> "CylinderFunction":
        data = json.loads(text)
        vals = [complex(re, im) for re, im in data["values"]]
        return cls(int(data["q"]), int(data["depth"]), np.array(vals, dtype=complex))


def integrate(F: CylinderFunction) -> complex:
    return complex(F.values.sum() * float(F.measure))


def refine(F: CylinderFunction, m: int) -> CylinderFunction:
    """Same function written at depth ``m >= depth``."""
    if m < F.depth:
        raise ValueError(f"cannot refine depth {F.depth} to shallower depth {m}")
    if m == F.depth:
        return F
    check_depth(F.q, m)
    b = Tree(F.q).block(F.depth, m)
    return CylinderFunction(F.q, m, np.repeat(F.values, b))


def cond_expect(F: CylinderFunction, m: int) -> CylinderFunction:
    """Conditional expectation onto the sigma-algebra of depth-``m`` cylinders."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m >= F.depth:
        return refine(F, m)
    b = Tree(F.q).block(m, F.depth)
    return CylinderFunction(F.q, m, F.values.reshape(-1, b).mean(axis=1))


def diff(F: CylinderFunction, n: int) -> CylinderFunction:
    """Martingale difference ``E_n F - E_{n-1} F`` (``E_{-1} = 0``), at depth ``n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    En = cond_expect(F, n)
    if n == 0:
        return En
    return En - refine(cond_expect(F, n - 1), n)


def inner(F: CylinderFunction, G: CylinderFunction) -> complex:
    """``integral of F * conj(G)``."""
    return integrate(F * G.conj())


def lp_norm(F: CylinderFunction, p: float) -> float:
    a = np.abs(F.values)
    if np.isinf(p):
        return float(a.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float((a ** p).sum() * float(F.measure)) ** (1.0 / p)


def maximal(F: CylinderFunction) -> CylinderFunction:
    """``sup_n |E_n F|``, exact at depth ``F.depth`` since ``E_n F = F`` beyond it."""
    out = np.zeros(F.values.size)
    for n in range(F.depth + 1):
        out = np.maximum(out, np.abs(refine(cond_expect(F, n), F.depth).values))
    return CylinderFunction(F.q, F.depth, out)


class Martingale:
    """Depth-compatible sequence ``F_0, ..., F_N`` with ``E_m F_n = F_min(m, n)``."""

    def __init__(self, entries: Sequence[CylinderFunction]):
        entries = list(entries)
        for n, F in enumerate(entries):
            if F.depth != n:
                raise ValueError(f"entry {n} has depth {F.depth}")
        if len({F.q for F in entries}) > 1:
            raise ValueError("entries live on different boundaries")
        self.entries = entries

    @classmethod
    def from_function(cls, F: CylinderFunction, N: int | None = None) -> "Martingale":
        N = F.depth if N is None else N
        return cls([cond_expect(F, n) for n in range(N + 1)])

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n):
        return self.entries[n]

    def __iter__(self):
        return iter(self.entries)

    def compatibility_error(self) -> float:
        err = 0.0
        for n, Fn in enumerate(self.entries):
            for m in range(n):
                err = max(err, float(np.abs(cond_expect(Fn, m).values - self.entries[m].values).max()))
        return err

    def sup_norm(self, p: float) -> float:
        return max(lp_norm(F, p) for F in self.entries)
