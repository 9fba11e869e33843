import numpy as np
import pytest

from homtree import CylinderFunction, Tree, TreeFunction
from homtree.boundary import integrate, lp_norm
from homtree.poisson import poisson_transform
from homtree.spectral import spherical, tau
from homtree.transforms import (SpectralSample, boundary_gram, hf_transform, invert, invert_radial, parseval,
                                restriction_lhs, spherical_probe, spherical_transform, symmetry_residual,
                                transform_on_grid)

from oracles import cylinders, lcp, nu


def _f(q, R, seed):
    return TreeFunction.random(q, R, np.random.default_rng(seed))


def test_hf_transform_brute_force():
    q, R = 2, 3
    f = _f(q, R, 1)
    z = 0.7 - 0.2j
    ft = hf_transform(f, z)
    for c in cylinders(q, R):
        ref = sum(v * q ** ((0.5 + 1j * z) * (2 * lcp(x, c) - len(x))) for x, v in f.items())
        assert abs(ft(c) - ref) < 1e-12


def test_duality_pairing():
    q = 3
    f = _f(q, 3, 2)
    F = CylinderFunction.random(q, 3, np.random.default_rng(3))
    z = 0.4 + 0.1j
    lhs = integrate(hf_transform(f, z) * F)
    u = poisson_transform(z, F, 3)
    rhs = np.sum(f.flat(3) * u.flat())
    assert abs(lhs - rhs) < 1e-12


def test_spherical_transform_of_delta():
    d = TreeFunction.delta(2, ())
    assert spherical_transform(d, 0.3) == pytest.approx(1.0)
    f = TreeFunction.radial(2, [1.0, 0.5, 0.25])
    expected = 1 + 3 * 0.5 * spherical(0.3, 1, 2) + 6 * 0.25 * spherical(0.3, 2, 2)
    assert spherical_transform(f, 0.3) == pytest.approx(expected)
    with pytest.raises(ValueError):
        spherical_transform(_f(2, 2, 0), 0.3)


def test_spherical_transform_agrees_with_hf_transform():
    f = TreeFunction.radial(3, [0.2, -1.0, 0.5])
    for z in (0.1, 0.9 - 0.1j):
        ft = hf_transform(f, z)
        assert np.abs(ft.values - spherical_transform(f, z)).max() < 1e-12


@pytest.mark.parametrize("q", [2, 3])
def test_inversion_round_trip(q):
    f = _f(q, 4, 4)
    rec, err = invert(f, 2048)
    assert err < 1e-8
    assert np.abs(rec.flat(4) - f.flat(4)).max() == pytest.approx(err)


def test_inversion_converges_spectrally_before_roundoff():
    f = _f(2, 4, 5)
    errs = [invert(f, M)[1] for M in (16, 32, 64)]
    assert errs[0] / errs[1] > 100
    assert errs[1] / errs[2] > 1000


def test_radial_inversion():
    f = TreeFunction.radial(2, [1.0, -0.5, 0.25, 0.1])
    rec = invert_radial(f, 512)
    assert np.abs(rec.flat() - f.flat()).max() < 1e-10


def test_parseval():
    for q in (2, 3):
        f1, f2 = _f(q, 4, 6), _f(q, 3, 7)
        lhs, rhs, res = parseval(f1, f2, 2048)
        assert res < 1e-8 * np.linalg.norm(f1.flat()) * np.linalg.norm(f2.flat())
        assert lhs == pytest.approx(np.vdot(f2.flat(4), f1.flat(4)))


def test_delta_parseval_is_plancherel_normalisation():
    d = TreeFunction.delta(2, ())
    lhs, rhs, res = parseval(d, d, 1024)
    assert lhs == 1 and res < 1e-12


def test_spectral_sample_weights_and_csv():
    sample = SpectralSample(2, 256)
    assert sample.total == pytest.approx(1.0, abs=1e-10)
    text = sample.to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "s,weight" and len(lines) == 257
    f = _f(2, 1, 0)
    vals = transform_on_grid(f, sample)
    with_values = sample.to_csv(vals).splitlines()
    assert with_values[0].count("re_") == Tree(2).sphere_size(1)
    with pytest.raises(ValueError):
        SpectralSample(2, 1)


def test_symmetry_identity_and_negative_control():
    f = _f(2, 3, 8)
    for s in (0.3, 1.7):
        assert symmetry_residual(f, (1, 0), s) < 1e-12
    wrong = hf_transform(f, 0.9)
    assert symmetry_residual(f, (1, 0), 0.3, g_minus=wrong) > 1e-3


def test_boundary_gram_matches_l2_norm():
    f = _f(2, 2, 9)
    for z in (0.2, 0.5 - 0.25j):
        assert boundary_gram(f, z) == pytest.approx(lp_norm(hf_transform(f, z), 2) ** 2, rel=1e-12)
        assert restriction_lhs(f, z, 2) == pytest.approx(lp_norm(hf_transform(f, z), 2))


def test_spherical_probe():
    g = spherical_probe(2, tau(2) / 8, 3)
    assert g.is_radial()
    assert g((1, 0)) == pytest.approx(np.conj(spherical(tau(2) / 8, 2, 2)))
