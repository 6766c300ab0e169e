import numpy as np
import pytest

from lipsmooth.corpus import corpus
from lipsmooth.errors import DomainError, ParameterError, ResolutionError
from lipsmooth.grid import Box, estimate_lipschitz, pair_lipschitz, sample, sup_distance
from lipsmooth.mollifiers import build_theta_bar, select_kappa
from lipsmooth.pipeline import (
    compose_slices,
    inner_epsilon,
    sign_split_epsilon,
    sign_split_smooth,
    slice,
    slice_count,
    slice_set,
    smooth,
    smooth_bounded,
    smooth_nonneg,
    tail_bound,
)
from lipsmooth.verify import verify_theorem1

from conftest import grid1d, grid2d


class TestSlice:
    def test_constant_examples(self):
        f = grid1d(np.full(5, 2.5), n=5)
        assert [slice(f, n).values[0] for n in (1, 2, 3, 4)] == [1.0, 1.0, 0.5, 0.0]

    def test_unit_range(self):
        f = grid1d(lambda x: np.abs(x), n=101)
        assert np.array_equal(slice(f, 1).values, f.values)
        assert not slice(f, 2).values.any()

    def test_abs_example(self):
        f = grid1d(np.abs, n=31, lo=0.0, hi=3.0)
        assert slice(f, 2).values[17] == pytest.approx(0.7, abs=1e-15)

    def test_errors(self):
        with pytest.raises(DomainError):
            slice(grid1d(lambda x: x), 1)
        with pytest.raises(ParameterError):
            slice(grid1d(np.abs), 0)

    @pytest.mark.parametrize("d, n", [(1, 513), (2, 65)])
    def test_reconstruction_and_slopes(self, d, n):
        box = Box.cube(-2, 2, d)
        for oracle in corpus(d):
            f = sample(oracle, box, (n,) * d)
            f = f.with_values(np.abs(f.values))
            s = slice_set(f, 0.05)
            assert s.N == slice_count(f)
            assert np.max(np.abs(sum(p.values for p in s.slices) - f.values)) <= 1e-12
            for p in s.slices:
                assert 0 <= p.values.min() and p.values.max() <= 1
                assert pair_lipschitz(p) <= pair_lipschitz(f) + 1e-9


class TestSmoothBounded:
    def test_constant(self):
        r = smooth_bounded(grid1d(np.full(401, 0.3)), 0.05, 1.0)
        assert sup_distance(r.g, grid1d(np.full(401, 0.3))) <= 1e-10
        assert estimate_lipschitz(r.g) <= 1e-9

    @pytest.mark.parametrize("fn", [lambda x: np.minimum(np.abs(x), 1.0),
                                    lambda x: np.maximum.reduce([0.3 * x, -x, 0.5 * x - 0.1]) * 0.9 + 0.05])
    def test_certified(self, fn):
        f = grid1d(fn, n=1001)
        r = smooth_bounded(f, 0.05, 1.0)
        assert sup_distance(f, r.g) <= 0.05
        assert estimate_lipschitz(r.g) <= estimate_lipschitz(f) + 0.05
        assert all(rec["passed"] for rec in r.provenance["stages"])

    def test_errors(self):
        with pytest.raises(DomainError):
            smooth_bounded(grid1d(lambda x: 2 * x), 0.05, 1.0)
        with pytest.raises(ResolutionError):
            smooth_bounded(grid1d(np.abs, n=21), 0.05, 1.0)


class TestComposeSlices:
    EPS = 0.05

    def thetas(self, N):
        tb = build_theta_bar(self.EPS)
        return [select_kappa(tb, n) for n in range(1, N + 1)]

    def test_zero_slices(self):
        th = self.thetas(4)
        g = compose_slices([grid1d(np.zeros(9), n=9)] * 4, th, self.EPS)
        assert np.all(np.abs(g.values) <= self.EPS / 4)

    def test_saturated(self):
        th = self.thetas(5)
        ones, zeros = grid1d(np.ones(9), n=9), grid1d(np.zeros(9), n=9)
        g = compose_slices([ones] * 3 + [zeros] * 2, th, self.EPS)
        assert np.all(np.abs(g.values - 3) <= self.EPS / 2)

    def test_single_slice(self):
        f = grid1d(lambda x: (x + 1) / 2, n=2001)
        g = compose_slices([f], self.thetas(1), self.EPS)
        assert sup_distance(f, g) <= 5 * self.EPS + self.EPS / 8

    def test_mismatch(self):
        with pytest.raises(ParameterError):
            compose_slices([grid1d(np.zeros(9), n=9)], self.thetas(2), self.EPS)

    def test_tail_bound(self):
        assert tail_bound(0.05, 3) == 0.05 / 32


@pytest.fixture(scope="module")
def dist_run():
    # distance to a point on a box of length 4: four slices are active
    eps = 0.05
    f = grid1d(lambda x: np.abs(x + 1.7), n=4001, lo=-2.0, hi=2.0)
    return f, eps, smooth_nonneg(f, eps)


class TestSmoothNonneg:
    def test_zero(self):
        eps = 0.05
        r = smooth_nonneg(grid1d(np.zeros(401)), eps)
        assert np.max(np.abs(r.g.values)) <= eps / 4
        assert estimate_lipschitz(r.g) <= eps

    def test_dist_ledger(self, dist_run):
        f, eps, r = dist_run
        assert r.provenance["N"] == 4
        w = r.params.trim
        assert sup_distance(f.window(w), r.g.window(w)) <= 8 * eps
        assert estimate_lipschitz(r.g.window(w)) <= (1 + 3 * eps) / (1 - 10 * eps)
        assert all(rec["passed"] for rec in r.provenance["stages"])

    def test_pointwise_ledger(self, dist_run):
        f, eps, r = dist_run
        n_x = np.floor(f.values).astype(int) + 1
        for n, (f_n, g_n, th) in enumerate(zip(r.stages["slices"], r.stages["smoothed"],
                                               r.stages["thetas"]), start=1):
            err = np.abs(th(g_n.values) - f_n.values)
            assert np.all(err[n_x != n] <= eps / 2 ** (n + 2)), n
            assert np.all(err[n_x == n] <= 7 * eps), n

    def test_derivative_ledger(self, dist_run):
        f, eps, r = dist_run
        n_x = np.floor(f.values).astype(int) + 1
        total = np.zeros(f.shape)
        h = f.spacing[0]
        for n, (g_n, th) in enumerate(zip(r.stages["smoothed"], r.stages["thetas"]), start=1):
            grad = np.abs(np.gradient(g_n.values, h))
            total += np.where(n_x != n, th.derivative(g_n.values) * grad, 0.0)
        assert np.max(total) <= eps * (1 + eps) + 1e-6

    def test_preconditions(self):
        with pytest.raises(DomainError):
            smooth_nonneg(grid1d(lambda x: x), 0.05)
        with pytest.raises(DomainError):
            smooth_nonneg(grid1d(lambda x: 2 * np.abs(x)), 0.05)
        with pytest.raises(ParameterError):
            smooth_nonneg(grid1d(np.abs), 0.07)

    def test_2d_cone(self):
        eps = 0.05
        f = grid2d(lambda x, y: np.hypot(x, y), n=401)
        with pytest.raises(ResolutionError):
            smooth_nonneg(f, eps)


class TestSignSplit:
    def test_budget(self):
        for eps in (0.01, 0.05, 1 / 16):
            s = sign_split_epsilon(eps)
            assert 8 * s <= eps and (1 + 3 * s) / (1 - 10 * s) <= 1 + eps

    def test_nonneg_input(self):
        eps = 0.05
        f = grid1d(lambda x: np.abs(x), n=8193, lo=-0.5, hi=0.5)
        r = sign_split_smooth(f, eps)
        alpha, g_minus = r.stages["alpha"], r.stages["negative"].g
        assert np.all(g_minus.values <= eps)
        assert np.all(alpha.derivative(g_minus.values) <= eps)

    def test_identity_on_long_box(self):
        eps = 0.05
        f = grid1d(lambda x: x, n=40001, lo=-2.0, hi=2.0)
        r = sign_split_smooth(f, eps)
        w = r.params.trim
        assert sup_distance(f.window(w), r.g.window(w)) <= 8 * eps
        assert estimate_lipschitz(r.g.window(w)) <= (1 + eps) ** 2
        assert all(rec["passed"] for rec in r.provenance["stages"])

    def test_zero(self):
        eps = 0.05
        r = sign_split_smooth(grid1d(np.zeros(401)), eps)
        assert np.max(np.abs(r.g.values)) <= eps
        assert estimate_lipschitz(r.g) <= 2 * eps * (1 + eps)


class TestSmooth:
    def test_constant(self):
        f = grid1d(np.full(64, 7.0), n=64)
        r = smooth(f, 0.05)
        assert r.g is f and r.provenance["path"] == "constant"

    def test_twice_abs(self):
        f = grid1d(lambda x: 2 * np.abs(x), n=1025)
        r = smooth(f, 0.1)
        rep = verify_theorem1(f, r, 0.1)
        assert rep.sup_error_measured <= 0.1 and rep.lip_output_measured <= 2.1
        assert rep.passed and rep.passed_strict

    def test_scaling_consistency(self):
        eps = 0.05
        f = grid1d(np.abs, n=1025)
        direct = smooth(2 * f, eps).g
        via_half = smooth(f, eps / 2).g * 2
        for g in (direct, via_half):
            assert estimate_lipschitz(g) <= 2 + eps
            assert sup_distance(g, 2 * f) <= eps

    def test_resolution(self):
        f = grid1d(np.abs, n=101)
        with pytest.raises(ResolutionError) as info:
            smooth(f, 0.05, max_nodes=1000)
        assert info.value.required_shape[0] > 1000
        with pytest.raises(ResolutionError):
            smooth(f, 0.05, strict=True)

    def test_parameter_rejection(self):
        f = grid1d(np.abs, n=101)
        assert inner_epsilon(0.1289, 1) < 1 / 16 < inner_epsilon(0.13, 1)
        with pytest.raises(ParameterError):
            smooth(f, 0.5)
        with pytest.raises(ParameterError):
            smooth(f, -0.1)

    def test_params_recorded(self):
        f = grid1d(np.abs, n=513)
        r = smooth(f, 0.05)
        p = r.params
        assert p.mu == pytest.approx(p.lam / 2) and p.trim == pytest.approx(p.lam * p.L)
        assert list(p.kappas) == sorted(p.kappas) and p.alpha_kappa > 0
        assert r.provenance["refine"][0] > 1
        # same input, same parameters
        assert smooth(f, 0.05).params == p
