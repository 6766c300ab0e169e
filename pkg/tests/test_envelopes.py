import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lipsmooth.corpus import corpus
from lipsmooth.envelopes import (
    EnvelopeParams,
    check_resolution,
    inf_conv_quadratic_1d,
    inf_conv_quadratic_1d_brute,
    lasry_lions,
    moreau_inf,
    moreau_inf_brute,
    moreau_sup,
    moreau_sup_brute,
    select_lambda,
)
from lipsmooth.errors import ParameterError, ResolutionError
from lipsmooth.grid import (
    Box,
    estimate_lipschitz,
    pair_lipschitz,
    sample,
    second_difference_bound,
    sup_distance,
)

from conftest import grid1d, grid2d


def huber(x, lam):
    a = np.abs(x)
    return np.where(a <= lam, x * x / (2 * lam), a - lam / 2)


class TestKernel:
    def test_constant(self):
        assert np.array_equal(inf_conv_quadratic_1d(np.full(17, 2.5), 0.1, 0.3), np.full(17, 2.5))

    def test_one_hot(self):
        M = 1e6
        v = np.full(21, M)
        v[7] = 0.0
        k = np.arange(21)
        assert np.array_equal(inf_conv_quadratic_1d(v, 1.0, 0.5), np.minimum(M, (k - 7.0) ** 2))

    @settings(max_examples=200)
    @given(arrays(float, st.integers(1, 300), elements=st.floats(-1e3, 1e3)),
           st.floats(1e-3, 1.0), st.floats(1e-4, 10.0))
    def test_matches_brute_force(self, v, h, lam):
        fast = inf_conv_quadratic_1d(v, h, lam)
        assert np.max(np.abs(fast - inf_conv_quadratic_1d_brute(v, h, lam))) <= 1e-12 * max(1, np.max(np.abs(v)))

    def test_ties_and_plateaus(self):
        v = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 5.0, 5.0, 0.0])
        assert np.array_equal(inf_conv_quadratic_1d(v, 0.5, 0.2), inf_conv_quadratic_1d_brute(v, 0.5, 0.2))

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
    def test_rejects_bad_scale(self, bad):
        with pytest.raises(ParameterError):
            inf_conv_quadratic_1d(np.zeros(4), 0.1, bad)
        with pytest.raises(ParameterError):
            moreau_inf(grid1d(np.abs), bad)
        with pytest.raises(ParameterError):
            moreau_sup(grid1d(np.abs), bad)


class TestEnvelopes:
    def test_constant(self):
        f = grid2d(lambda x, y: 0 * x + 1.5, n=9)
        for g in (moreau_inf(f, 0.3), moreau_sup(f, 0.3), lasry_lions(f, EnvelopeParams(0.3, 0.15))):
            assert np.array_equal(g.values, f.values)

    def test_huber(self):
        f = grid1d(np.abs, n=401)
        g = moreau_inf(f, 0.5)
        x = f.axes()[0]
        assert g.values[-1] == pytest.approx(0.75, abs=1e-15)
        assert g.values[200] == 0
        assert np.max(np.abs(g.values - huber(x, 0.5))) <= 1e-15

    def test_sup_of_abs(self):
        f = grid1d(np.abs, n=401)
        g = moreau_sup(f, 0.25)
        x = f.axes()[0]
        inner = np.abs(x) <= 1 - 0.25
        assert np.max(np.abs(g.values - (np.abs(x) + 0.125))[inner]) <= 1e-15
        assert sup_distance(g, moreau_sup_brute(f, 0.25)) <= 1e-12

    def test_duality(self):
        f = grid1d(np.sin, n=101)
        assert np.array_equal(moreau_sup(f, 0.2).values, (-moreau_inf(-f, 0.2)).values)

    def test_lasry_lions_abs_at_zero(self):
        f = grid1d(np.abs, n=801)
        assert lasry_lions(f, EnvelopeParams(0.5, 0.25)).values[400] == pytest.approx(0, abs=1e-15)

    def test_lasry_lions_brute(self):
        rng = np.random.default_rng(5)
        f = grid1d(rng.normal(size=300), n=300)
        p = EnvelopeParams(0.02, 0.01)
        brute = moreau_sup_brute(moreau_inf_brute(f, p.lam), p.mu)
        assert sup_distance(lasry_lions(f, p), brute) <= 1e-12

    def test_2d_brute(self):
        rng = np.random.default_rng(6)
        f = grid2d(lambda x, y: rng.normal(size=x.shape), n=40)
        assert sup_distance(moreau_inf(f, 0.05), moreau_inf_brute(f, 0.05)) <= 1e-12

    def test_3d_brute(self):
        rng = np.random.default_rng(7)
        f = sample(corpus(3)[1], Box.cube(-1, 1, 3), (9, 9, 9))
        f = f.with_values(f.values + 0.1 * rng.normal(size=f.shape))
        assert sup_distance(moreau_sup(f, 0.3), moreau_sup_brute(f, 0.3)) <= 1e-12

    @pytest.mark.parametrize("d, n", [(1, 513), (2, 65)])
    def test_corpus_properties(self, d, n):
        box = Box.cube(-1, 1, d)
        for oracle in corpus(d):
            f = sample(oracle, box, (n,) * d)
            L = estimate_lipschitz(f)
            lo, hi = moreau_inf(f, 0.1), moreau_inf(f, 0.3)
            up = moreau_sup(f, 0.1)
            assert np.all(lo.values <= f.values) and np.all(f.values <= up.values)
            assert np.all(hi.values <= lo.values)
            for g in (lo, hi, up, lasry_lions(f, EnvelopeParams(0.1, 0.05))):
                assert pair_lipschitz(g) <= pair_lipschitz(f) + 1e-9, oracle.name
                if d == 1:
                    assert estimate_lipschitz(g) <= L + 1e-9, oracle.name

    def test_gradient_estimator_on_2d_envelope(self):
        # a min over shifted copies mixes pieces across oblique ridges, so the
        # central-gradient norm can exceed the (preserved) true constant
        f = sample(corpus(2)[0], Box.cube(-1, 1, 2), (65, 65))
        g = moreau_inf(f, 0.1)
        assert pair_lipschitz(g) <= 1 + 1e-12
        assert 1 < estimate_lipschitz(g) <= np.sqrt(2)


class TestSelectLambda:
    def test_examples(self):
        p = select_lambda(0.05, 1)
        assert p.lam == pytest.approx(0.05 * 2 / 3, rel=1e-15) and p.mu == pytest.approx(p.lam / 2)
        assert select_lambda(0.05, 2).lam == pytest.approx(0.05 / 6, rel=1e-15)
        assert select_lambda(0.1, 4).lam == pytest.approx(select_lambda(0.1, 2).lam / 4, rel=1e-15)

    def test_curvature_bound(self):
        assert EnvelopeParams(0.5, 0.25).curvature_bound == 4.0
        assert select_lambda(0.05, 1).curvature_bound == pytest.approx(2 / select_lambda(0.05, 1).lam)

    @pytest.mark.parametrize("eps, L", [(0, 1), (0.1, 0), (-1, 1)])
    def test_rejects(self, eps, L):
        with pytest.raises(ParameterError):
            select_lambda(eps, L)

    def test_params_invariant(self):
        for lam, mu in ((0.1, 0.1), (0.1, 0.0), (0.1, 0.2)):
            with pytest.raises(ParameterError):
                EnvelopeParams(lam, mu)

    @pytest.mark.parametrize("d, n, half", [(1, 1025, 1.0), (1, 241, 0.4), (2, 253, 0.42)])
    def test_approximation_and_curvature(self, d, n, half):
        eps = 0.05
        p = select_lambda(eps, 1)
        K = p.curvature_bound
        box = Box.cube(-half, half, d)
        for oracle in corpus(d)[:6]:
            f = sample(oracle, box, (n,) * d)
            check_resolution(f, p.lam)
            g = lasry_lions(f, p)
            assert sup_distance(f, g) <= eps / 2, oracle.name
            inner = g.window(p.lam * estimate_lipschitz(f))
            h = max(f.spacing)
            assert second_difference_bound(inner) <= K + 10 * K * h / p.lam, oracle.name

    @pytest.mark.xfail(strict=True, reason="node-restricted envelopes in d >= 2 reach about 2K "
                                          "as h -> 0, which the O(h/lam) tolerance does not cover")
    def test_curvature_2d_fine_grid(self):
        p = select_lambda(0.05, 1)
        K = p.curvature_bound
        f = sample(corpus(2)[1], Box.cube(-0.4, 0.4, 2), (513, 513))
        g = lasry_lions(f, p)
        h = f.spacing[0]
        assert second_difference_bound(g.window(p.lam)) <= K + 10 * K * h / p.lam


def test_resolution_guard():
    f = grid1d(np.abs, n=101)
    with pytest.raises(ResolutionError) as info:
        check_resolution(f, 0.05)
    assert info.value.required_shape == (401,)
    check_resolution(grid1d(np.abs, n=401), 0.05)
