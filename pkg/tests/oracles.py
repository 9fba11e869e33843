"""Reference implementations that share no code with the package.

Each oracle is deliberately naive: explicit graphs, breadth-first search,
three-term recurrences and brute-force sums over enumerated cylinders.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np


def build_ball(q: int, radius: int):
    """Adjacency lists of B(o, radius) built by growing children from the root."""
    words = [()]
    adj = {(): []}
    frontier = [()]
    for n in range(1, radius + 1):
        new = []
        for x in frontier:
            labels = range(q + 1) if n == 1 else range(q)
            for a in labels:
                y = x + (a,)
                adj[y] = [x]
                adj[x].append(y)
                new.append(y)
        words.extend(new)
        frontier = new
    return words, adj


def bfs_distances(adj, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def spherical_recurrence(z: complex, nmax: int, q: int) -> np.ndarray:
    """phi(0) = 1, phi(1) = gamma, gamma phi(n) = (q phi(n+1) + phi(n-1)) / (q+1)."""
    w = 0.5 + 1j * z
    g = (q ** w + q ** (1 - w)) / (q + 1)
    phi = np.zeros(nmax + 1, dtype=complex)
    phi[0] = 1
    if nmax >= 1:
        phi[1] = g
    for n in range(1, nmax):
        phi[n + 1] = ((q + 1) * g * phi[n] - phi[n - 1]) / q
    return phi


def cylinders(q: int, d: int):
    if d == 0:
        return [()]
    return [(a,) + rest for a in range(q + 1) for rest in itertools.product(range(q), repeat=d - 1)]


def nu(q: int, d: int) -> float:
    return 1.0 if d == 0 else q / ((q + 1) * q ** d)


def lcp(x, c) -> int:
    k = 0
    for a, b in zip(x, c):
        if a != b:
            break
        k += 1
    return k


def poisson_brute(z: complex, values: dict, q: int, d: int, x) -> complex:
    """P_z F(x) by summing over depth-D cylinders, D = max(d, |x|)."""
    D = max(d, len(x))
    w = 0.5 + 1j * z
    total = 0j
    for c in cylinders(q, D):
        h = 2 * lcp(x, c) - len(x)
        total += q ** (w * h) * values[c[:d]] * nu(q, D)
    return total


def c_function_reference(z: complex, q: int) -> complex:
    """c(z) = q^{1/2} / (q+1) * (q^{1/2+iz} - q^{-1/2-iz}) / (q^{iz} - q^{-iz})."""
    a = q ** (1j * z)
    return math.sqrt(q) / (q + 1) * (math.sqrt(q) * a - 1 / (math.sqrt(q) * a)) / (a - 1 / a)


def harmonic(n: int) -> float:
    return sum(1 / k for k in range(1, n + 1))
