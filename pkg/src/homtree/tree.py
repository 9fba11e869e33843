"""Combinatorial geometry of the homogeneous tree of degree ``q + 1``.

Vertices are words over edge labels, rooted at the empty word ``()``.  The
first label ranges over ``0..q`` and every later label over ``0..q-1``, so
each word is a reduced path from the root and ``|x| == len(x)``.

All enumerations are lexicographic.  With that order the index of a word on
its sphere has the closed form ``a0 * q**(n-1) + (base-q value of the rest)``,
which is what the vectorised code in the other modules relies on: prefixes
are integer divisions and sectors are contiguous blocks.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

Vertex = tuple[int, ...]

ROOT: Vertex = ()


@dataclass(frozen=True)
class Tree:
    """Homogeneous tree with branching parameter ``q`` (degree ``q + 1``)."""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"branching parameter q must be an integer >= 2, got {self.q!r}")

    @property
    def degree(self) -> int:
        return self.q + 1

    # -- validation -------------------------------------------------------

    def validate(self, x: Sequence[int]) -> Vertex:
        x = tuple(int(a) for a in x)
        for i, a in enumerate(x):
            top = self.q if i == 0 else self.q - 1
            if not 0 <= a <= top:
                raise ValueError(f"label {a} at position {i} out of range 0..{top} in word {x}")
        return x

    # -- metric -----------------------------------------------------------

    def confluence(self, x: Sequence[int], y: Sequence[int]) -> Vertex:
        """Longest common prefix of ``x`` and ``y``."""
        x, y = self.validate(x), self.validate(y)
        n = 0
        for a, b in zip(x, y):
            if a != b:
                break
            n += 1
        return x[:n]

    def distance(self, x: Sequence[int], y: Sequence[int]) -> int:
        x, y = self.validate(x), self.validate(y)
        return len(x) + len(y) - 2 * len(self.confluence(x, y))

    def parent(self, x: Sequence[int]) -> Vertex:
        x = self.validate(x)
        if not x:
            raise ValueError("the root has no parent")
        return x[:-1]

    def children(self, x: Sequence[int]) -> list[Vertex]:
        x = self.validate(x)
        k = self.q + 1 if not x else self.q
        return [x + (a,) for a in range(k)]

    def neighbors(self, x: Sequence[int]) -> list[Vertex]:
        x = self.validate(x)
        out = self.children(x)
        if x:
            out.insert(0, x[:-1])
        return out

    # -- counting and enumeration ----------------------------------------

    def sphere_size(self, n: int) -> int:
        if n < 0:
            raise ValueError("radius must be nonnegative")
        return 1 if n == 0 else (self.q + 1) * self.q ** (n - 1)

    def ball_size(self, n: int) -> int:
        return sum(self.sphere_size(k) for k in range(n + 1))

    def ball_size_around(self, r: int) -> int:
        """``#B(x, r)`` for any vertex ``x`` (the tree is vertex-transitive)."""
        return self.ball_size(r)

    def iter_sphere(self, n: int) -> Iterator[Vertex]:
        if n < 0:
            raise ValueError("radius must be nonnegative")
        if n == 0:
            yield ROOT
            return
        for head in range(self.q + 1):
            for tail in itertools.product(range(self.q), repeat=n - 1):
                yield (head,) + tail

    def sphere(self, n: int) -> list[Vertex]:
        return list(self.iter_sphere(n))

    def ball(self, n: int) -> list[Vertex]:
        return [x for k in range(n + 1) for x in self.iter_sphere(k)]

    def sector(self, n: int, x: Sequence[int]) -> list[Vertex]:
        """Vertices at level ``|x|`` sharing the length-``n`` prefix of ``x``.

        Returns ``[x]`` when ``|x| <= n``.
        """
        if n < 0:
            raise ValueError("n must be nonnegative")
        x = self.validate(x)
        m = len(x)
        if m <= n:
            return [x]
        if n == 0:
            return self.sphere(m)
        prefix = x[:n]
        return [prefix + tail for tail in itertools.product(range(self.q), repeat=m - n)]

    # -- indexing ---------------------------------------------------------

    def index(self, x: Sequence[int]) -> int:
        """Position of ``x`` in the lexicographic enumeration of its sphere."""
        x = self.validate(x)
        if not x:
            return 0
        idx = x[0]
        for a in x[1:]:
            idx = idx * self.q + a
        return idx

    def word(self, n: int, idx: int) -> Vertex:
        if not 0 <= idx < self.sphere_size(n):
            raise IndexError(f"index {idx} out of range for sphere of radius {n}")
        if n == 0:
            return ROOT
        tail = []
        for _ in range(n - 1):
            idx, a = divmod(idx, self.q)
            tail.append(a)
        return (idx,) + tuple(reversed(tail))

    def prefix_index(self, n: int, j: int, idx):
        """Index (at level ``j``) of the length-``j`` prefix of sphere element ``idx``.

        Works elementwise on integer arrays.
        """
        if j > n:
            raise ValueError("prefix longer than the word")
        if j == 0:
            return idx * 0
        return idx // self.q ** (n - j)

    def block(self, n: int, m: int) -> int:
        """Number of level-``m`` descendants of one level-``n`` vertex (``n <= m``)."""
        if n > m:
            raise ValueError("n must not exceed m")
        if n == 0:
            return self.sphere_size(m)
        return self.q ** (m - n)

    def lcp_matrix(self, m: int, d: int) -> np.ndarray:
        """Common-prefix lengths between every level-``m`` and level-``d`` vertex."""
        im = np.arange(self.sphere_size(m))
        id_ = np.arange(self.sphere_size(d))
        out = np.zeros((im.size, id_.size), dtype=np.int64)
        for j in range(1, min(m, d) + 1):
            out += self.prefix_index(m, j, im)[:, None] == self.prefix_index(d, j, id_)[None, :]
        return out


def format_vertex(x: Sequence[int]) -> str:
    """Comma-free digit string; ``""`` is the root."""
    if any(a > 9 for a in x):
        raise ValueError("digit-string serialisation needs labels below 10 (q <= 9)")
    return "".join(str(a) for a in x)


def parse_vertex(s: str) -> Vertex:
    s = s.strip()
    if s and not s.isdigit():
        raise ValueError(f"not a digit string: {s!r}")
    return tuple(int(c) for c in s)


class TreeFunction:
    """Complex function on the ball ``B(o, radius)`` stored level by level.

    ``levels[m]`` holds the values on the sphere of radius ``m`` in
    lexicographic order.  With ``compact=True`` the function is taken to
    vanish outside the ball (a finitely supported function); otherwise it is
    simply unknown there.
    """

    def __init__(self, q: int, levels: Iterable, compact: bool = True):
        self.tree = Tree(q)
        self.levels = []
        for m, vals in enumerate(levels):
            arr = np.array(vals, dtype=complex).reshape(-1)
            if arr.size != self.tree.sphere_size(m):
                raise ValueError(
                    f"level {m} has {arr.size} values, expected {self.tree.sphere_size(m)}")
            arr.flags.writeable = False
            self.levels.append(arr)
        if not self.levels:
            raise ValueError("a TreeFunction needs at least the root level")
        self.compact = compact

    @property
    def q(self) -> int:
        return self.tree.q

    @property
    def radius(self) -> int:
        return len(self.levels) - 1

    def __repr__(self):
        return f"TreeFunction(q={self.q}, radius={self.radius}, compact={self.compact})"

    def __call__(self, x: Sequence[int]) -> complex:
        x = self.tree.validate(x)
        if len(x) > self.radius:
            if self.compact:
                return 0j
            raise KeyError(f"vertex {x} outside the domain B(o,{self.radius})")
        return complex(self.levels[len(x)][self.tree.index(x)])

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, q: int, radius: int, compact: bool = True) -> "TreeFunction":
        t = Tree(q)
        return cls(q, [np.zeros(t.sphere_size(m)) for m in range(radius + 1)], compact)

    @classmethod
    def delta(cls, q: int, x: Sequence[int], radius: int | None = None) -> "TreeFunction":
        t = Tree(q)
        x = t.validate(x)
        radius = len(x) if radius is None else radius
        levels = [np.zeros(t.sphere_size(m), dtype=complex) for m in range(radius + 1)]
        levels[len(x)][t.index(x)] = 1.0
        return cls(q, levels)

    @classmethod
    def radial(cls, q: int, profile: Sequence[complex], compact: bool = True) -> "TreeFunction":
        t = Tree(q)
        return cls(q, [np.full(t.sphere_size(m), v, dtype=complex)
                       for m, v in enumerate(profile)], compact)

    @classmethod
    def from_dict(cls, q: int, values: Mapping[Sequence[int], complex],
                  radius: int | None = None) -> "TreeFunction":
        t = Tree(q)
        keys = [t.validate(k) for k in values]
        if radius is None:
            radius = max((len(k) for k in keys), default=0)
        levels = [np.zeros(t.sphere_size(m), dtype=complex) for m in range(radius + 1)]
        for k, v in zip(keys, values.values()):
            if len(k) > radius:
                raise ValueError(f"vertex {k} outside B(o,{radius})")
            levels[len(k)][t.index(k)] = v
        return cls(q, levels)

    @classmethod
    def random(cls, q: int, radius: int, rng: np.random.Generator,
               real: bool = False) -> "TreeFunction":
        """Independent standard (complex) Gaussian values on ``B(o, radius)``."""
        t = Tree(q)
        levels = []
        for m in range(radius + 1):
            n = t.sphere_size(m)
            v = rng.standard_normal(n)
            if not real:
                v = v + 1j * rng.standard_normal(n)
            levels.append(v)
        return cls(q, levels)

    # -- views ------------------------------------------------------------

    def flat(self, radius: int | None = None) -> np.ndarray:
        radius = self.radius if radius is None else radius
        if radius > self.radius:
            if not self.compact:
                raise ValueError(f"radius {radius} exceeds the domain B(o,{self.radius})")
            pad = [np.zeros(self.tree.sphere_size(m), dtype=complex)
                   for m in range(self.radius + 1, radius + 1)]
            return np.concatenate(self.levels + pad)
        return np.concatenate(self.levels[:radius + 1])

    def restrict(self, radius: int) -> "TreeFunction":
        if radius > self.radius:
            raise ValueError("cannot restrict to a larger ball")
        return TreeFunction(self.q, self.levels[:radius + 1], compact=True)

    def is_radial(self, tol: float = 0.0) -> bool:
        return all(np.all(np.abs(v - v[0]) <= tol) for v in self.levels)

    def support_radius(self) -> int:
        for m in range(self.radius, -1, -1):
            if np.any(self.levels[m] != 0):
                return m
        return 0

    def items(self) -> Iterator[tuple[Vertex, complex]]:
        for m, vals in enumerate(self.levels):
            for i, v in enumerate(vals):
                yield self.tree.word(m, i), complex(v)

    def map(self, fn) -> "TreeFunction":
        return TreeFunction(self.q, [fn(v) for v in self.levels], self.compact)

    def __add__(self, other):
        return _combine(self, other, np.add)

    def __sub__(self, other):
        return _combine(self, other, np.subtract)

    def __mul__(self, scalar):
        return self.map(lambda v: v * scalar)

    __rmul__ = __mul__

    def conj(self) -> "TreeFunction":
        return self.map(np.conj)

    # -- json -------------------------------------------------------------

    def to_json(self) -> str:
        entries = [{"v": format_vertex(x), "re": v.real, "im": v.imag} for x, v in self.items()]
        return json.dumps({"q": self.q, "entries": entries})

    @classmethod
    def from_json(cls, text: str) -> "TreeFunction":
        data = json.loads(text)
        values = {parse_vertex(e["v"]): complex(e.get("re", 0.0), e.get("im", 0.0))
                  for e in data["entries"]}
        return cls.from_dict(int(data["q"]), values)


def _combine(a: TreeFunction, b: TreeFunction, op) -> TreeFunction:
    if a.q != b.q:
        raise ValueError("tree functions live on different trees")
    r = max(a.radius, b.radius)
    fa, fb = a.flat(r), b.flat(r)
    t = a.tree
    out, pos = [], 0
    vals = op(fa, fb)
    for m in range(r + 1):
        n = t.sphere_size(m)
        out.append(vals[pos:pos + n])
        pos += n
    return TreeFunction(a.q, out, compact=a.compact and b.compact)
