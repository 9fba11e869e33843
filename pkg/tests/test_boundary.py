from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homtree import CylinderFunction, Martingale
from homtree.boundary import (MAX_CYLINDERS, check_depth, cond_expect, cylinder_measure, diff, inner,
                              integrate, lp_norm, maximal, refine, shell_measure)

from oracles import cylinders, nu


@pytest.mark.parametrize("q,n,expected", [(2, 0, Fraction(1)), (2, 1, Fraction(1, 3)), (2, 3, Fraction(1, 12)),
                                          (3, 2, Fraction(1, 12)), (5, 1, Fraction(1, 6))])
def test_cylinder_measure_is_exact(q, n, expected):
    assert cylinder_measure(q, n) == expected


@pytest.mark.parametrize("q,depth", [(2, 4), (3, 3), (4, 2)])
def test_measures_sum_to_one(q, depth):
    assert cylinder_measure(q, depth) * len(cylinders(q, depth)) == 1
    assert sum(shell_measure(q, j, depth) for j in range(depth + 1)) == 1


def test_shell_measure_examples():
    # E_0 minus E_1 for |x| = 2 on q = 2: everything outside E(x_1)
    assert shell_measure(2, 0, 2) == Fraction(2, 3)
    assert shell_measure(2, 2, 2) == cylinder_measure(2, 2)


def test_depth_cap():
    check_depth(2, 22)
    with pytest.raises(ValueError):
        check_depth(2, 23)
    assert CylinderFunction.constant(2, depth=21).values.size <= MAX_CYLINDERS


def test_indicator_integrates_to_measure():
    F = CylinderFunction.indicator(3, (1, 2), depth=4)
    assert integrate(F) == pytest.approx(float(cylinder_measure(3, 2)), abs=1e-15)
    assert F((1, 2, 0, 1)) == 1 and F((1, 1, 0, 1)) == 0


def _random(q, depth, seed):
    return CylinderFunction.random(q, depth, np.random.default_rng(seed))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_telescoping(q, depth, seed):
    F = _random(q, depth, seed)
    total = sum(refine(diff(F, j), depth).values for j in range(depth + 1))
    assert np.abs(total - F.values).max() < 1e-12
    for n in range(depth + 1):
        partial = sum(refine(diff(F, j), n).values for j in range(n + 1))
        assert np.abs(partial - cond_expect(F, n).values).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_difference_orthogonality(q, depth, seed):
    F = _random(q, depth, seed)
    G = _random(q, depth, seed + 1)
    for m in range(depth + 1):
        for n in range(depth + 1):
            val = inner(refine(diff(F, m), depth), refine(diff(G, n), depth))
            if m != n:
                assert abs(val) < 1e-12
    for n in range(depth + 1):
        d = diff(F, n)
        assert abs(inner(d, d) - lp_norm(d, 2) ** 2) < 1e-12


def test_conditional_expectation_is_block_mean():
    q, depth = 2, 3
    F = _random(q, depth, 3)
    E1 = cond_expect(F, 1)
    for c in cylinders(q, 1):
        kids = [w for w in cylinders(q, depth) if w[:1] == c]
        assert E1(c) == pytest.approx(np.mean([F(w) for w in kids]), abs=1e-15)
    assert integrate(cond_expect(F, 0)) == pytest.approx(integrate(F), abs=1e-15)


def test_lp_norms_brute_force():
    q, depth = 3, 3
    F = _random(q, depth, 4)
    brute = sum(abs(F(c)) ** 3 * nu(q, depth) for c in cylinders(q, depth)) ** (1 / 3)
    assert lp_norm(F, 3) == pytest.approx(brute, rel=1e-14)
    assert lp_norm(F, np.inf) == pytest.approx(max(abs(F(c)) for c in cylinders(q, depth)))


def test_maximal_function_dominates():
    F = _random(2, 4, 5)
    M = maximal(F)
    for n in range(5):
        assert np.all(M.values + 1e-15 >= np.abs(refine(cond_expect(F, n), 4).values))


def test_martingale_compatibility():
    F = _random(2, 4, 6)
    mart = Martingale.from_function(F)
    assert len(mart) == 5
    assert mart.compatibility_error() < 1e-15
    assert mart.sup_norm(2) == pytest.approx(lp_norm(F, 2))
    with pytest.raises(ValueError):
        Martingale([F])


def test_json_round_trip():
    F = _random(3, 2, 8)
    G = CylinderFunction.from_json(F.to_json())
    assert F.allclose(G)


def test_arithmetic_refines_to_common_depth():
    a = CylinderFunction.indicator(2, (0,), depth=1)
    b = CylinderFunction.indicator(2, (0, 1), depth=2)
    s = a + b
    assert s.depth == 2
    assert s((0, 1)) == 2 and s((0, 0)) == 1 and s((1, 0)) == 0
