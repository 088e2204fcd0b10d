import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unidesign import DiscrepancyCache, cd2, cd2_gradient, zero_gradient_solve
from conftest import UD18X7_CD2, UD27X13_CD2
from oracles import (
    cd2_reference,
    central_difference_gradient,
    gradient_relative_error,
    off_kink_design,
)


def random_design(n, s, seed):
    return np.random.default_rng(seed).random((n, s))


class TestCd2:
    def test_center_point(self):
        assert cd2([[0.5]]) == pytest.approx(1 / 12, abs=1e-15)

    def test_two_point_hand_value(self):
        # f1(0.25) = f1(0.75) = 1.09375; kernel entries 1.25, 1.0, 1.0, 1.25
        assert cd2([[0.25], [0.75]]) == pytest.approx(1 / 48, abs=1e-15)

    def test_published_18x7(self, ud18x7):
        assert cd2(ud18x7) == pytest.approx(UD18X7_CD2, abs=5e-4)

    def test_published_27x13(self, ud27x13):
        assert cd2(ud27x13) == pytest.approx(UD27X13_CD2, abs=1e-3)

    @pytest.mark.parametrize("shape", [(1, 1), (5, 2), (9, 4), (12, 6)])
    def test_matches_naive_reference(self, shape):
        x = random_design(*shape, seed=shape[0] * 31 + shape[1])
        assert cd2(x) == pytest.approx(cd2_reference(x), abs=1e-12)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            cd2([[1.2]])
        with pytest.raises(ValueError):
            cd2([[-0.1, 0.4]])

    def test_rejects_non_matrix(self):
        with pytest.raises(ValueError):
            cd2([0.1, 0.2])

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), n=st.integers(1, 9), s=st.integers(1, 5))
    def test_symmetry_properties(self, seed, n, s):
        x = random_design(n, s, seed)
        value = cd2(x)
        assert value >= -1e-12
        rng = np.random.default_rng(seed + 1)
        rows = rng.permutation(n)
        cols = rng.permutation(s)
        assert cd2(x[rows]) == pytest.approx(value, abs=1e-12)
        assert cd2(x[:, cols]) == pytest.approx(value, abs=1e-12)
        assert cd2(1.0 - x) == pytest.approx(value, abs=1e-12)


class TestGradient:
    def test_center_point_is_stationary(self):
        assert cd2_gradient([[0.5]]) == pytest.approx(np.zeros((1, 1)))

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_finite_differences(self, seed):
        x = off_kink_design(10, 4, seed)
        grad = cd2_gradient(x)
        fd = central_difference_gradient(x)
        assert gradient_relative_error(grad, fd) < 1e-5

    def test_reflection_antisymmetry(self):
        x = off_kink_design(8, 3, seed=7)
        assert cd2(1.0 - x) == pytest.approx(cd2(x), abs=1e-14)
        assert cd2_gradient(1.0 - x) == pytest.approx(-cd2_gradient(x), abs=1e-12)

    def test_deterministic_at_kinks(self):
        # sgn(0) = 0 must give finite, repeatable values on ties and at 0.5
        x = np.array([[0.5, 0.25], [0.25, 0.25]])
        g1 = cd2_gradient(x)
        g2 = cd2_gradient(x)
        assert np.all(np.isfinite(g1))
        assert np.array_equal(g1, g2)


class TestCache:
    def test_center_point_contents(self):
        cache = DiscrepancyCache([[0.5]])
        assert cache.row_products == pytest.approx([1.0])
        assert cache.kernel.ravel() == pytest.approx([1.0])
        assert cache.cd2 == pytest.approx(1 / 12, abs=1e-15)

    def test_build_matches_cd2(self):
        x = random_design(9, 4, seed=3)
        cache = DiscrepancyCache(x)
        assert cache.cd2 == pytest.approx(cd2(x), abs=1e-12)
        assert cache.kernel == pytest.approx(cache.kernel.T)

    def test_noop_update_keeps_value(self):
        x = random_design(6, 3, seed=4)
        cache = DiscrepancyCache(x)
        before = cache.cd2
        cache.update(2, 1, x[2, 1])
        assert cache.cd2 == pytest.approx(before, abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_update_involution(self, seed):
        rng = np.random.default_rng(seed)
        cache = DiscrepancyCache(rng.random((7, 3)))
        before = cache.cd2
        i, j = int(rng.integers(7)), int(rng.integers(3))
        original = cache.value_at(i, j)
        cache.update(i, j, float(rng.random()))
        cache.update(i, j, original)
        assert cache.cd2 == pytest.approx(before, abs=1e-12)

    def test_thousand_updates_stay_consistent(self):
        rng = np.random.default_rng(11)
        cache = DiscrepancyCache(rng.random((9, 4)))
        for _ in range(1000):
            i, j = int(rng.integers(9)), int(rng.integers(4))
            cache.update(i, j, float(rng.random()))
        assert cache.cd2 == pytest.approx(cd2(cache.design), abs=1e-12)

    def test_single_update_matches_modified_matrix(self, ud18x7):
        cache = DiscrepancyCache(ud18x7)
        cache.update(0, 0, 0.5)
        modified = ud18x7.copy()
        modified[0, 0] = 0.5
        assert cache.cd2 == pytest.approx(cd2(modified), abs=1e-12)

    def test_preview_update_matches_commit(self):
        rng = np.random.default_rng(5)
        cache = DiscrepancyCache(rng.random((8, 5)))
        previewed = cache.preview_update(3, 2, 0.125)
        committed = cache.update(3, 2, 0.125)
        assert previewed == pytest.approx(committed, abs=1e-12)

    def test_preview_swap_matches_commit(self):
        rng = np.random.default_rng(6)
        cache = DiscrepancyCache(rng.random((9, 5)))
        previewed = cache.preview_column_swap(2, 7, 3)
        committed = cache.apply_column_swap(2, 7, 3)
        assert previewed == pytest.approx(committed, abs=1e-12)

    def test_update_validation(self):
        cache = DiscrepancyCache([[0.5, 0.5]])
        with pytest.raises(IndexError):
            cache.update(1, 0, 0.5)
        with pytest.raises(IndexError):
            cache.update(0, 2, 0.5)
        with pytest.raises(ValueError):
            cache.update(0, 0, 1.5)

    def test_design_property_is_a_copy(self):
        cache = DiscrepancyCache([[0.25, 0.75]])
        cache.design[0, 0] = 0.9
        assert cache.value_at(0, 0) == 0.25


class TestZeroGradientSolve:
    def test_center_fixed_point(self):
        assert zero_gradient_solve([[0.5]], 0, 0) == 0.5

    def test_stationarity_when_sign_pattern_stable(self):
        # if the solved value keeps the sign pattern of the start point, the
        # gradient there must vanish
        x = off_kink_design(8, 3, seed=9)
        for i, j in [(0, 0), (3, 1), (7, 2)]:
            solved = zero_gradient_solve(x, i, j, t_max=1)
            d_old = x[i, j] - 0.5
            d_new = solved - 0.5
            same_center_side = np.sign(d_old) == np.sign(d_new)
            others = np.delete(x[:, j], i)
            same_order = np.array_equal(
                np.sign(x[i, j] - others), np.sign(solved - others)
            )
            if same_center_side and same_order and 0.0 < solved < 1.0:
                moved = x.copy()
                moved[i, j] = solved
                assert abs(cd2_gradient(moved)[i, j]) < 1e-10

    def test_clamps_to_endpoint(self):
        # one coordinate just above 1/2 with every column mate far above it
        # and strongly correlated rows pushes the raw solution below zero
        x = np.full((3, 7), 0.95)
        x[0, 0] = 0.55
        x[2, 0] = 0.98
        assert zero_gradient_solve(x, 0, 0) == 0.0

    def test_cache_variant_agrees(self):
        x = random_design(9, 4, seed=12)
        cache = DiscrepancyCache(x)
        for i, j in [(0, 0), (4, 2), (8, 3)]:
            assert cache.zero_gradient_value(i, j, 2) == pytest.approx(
                zero_gradient_solve(x, i, j, 2), abs=1e-13
            )

    def test_validation(self):
        with pytest.raises(IndexError):
            zero_gradient_solve([[0.5]], 1, 0)
        with pytest.raises(ValueError):
            zero_gradient_solve([[0.5]], 0, 0, t_max=0)


def test_coordinate_gradient_matches_full_matrix():
    x = random_design(10, 5, seed=13)
    cache = DiscrepancyCache(x)
    full = cd2_gradient(x)
    per_coord = np.array(
        [[cache.coordinate_gradient(i, j) for j in range(5)] for i in range(10)]
    )
    assert per_coord == pytest.approx(full, abs=1e-12)
