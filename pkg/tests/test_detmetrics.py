import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tandemeval import detmetrics
from tandemeval.errors import EmptyClassError


def brute_force_eer(pos, neg, step=0.25):
    """Dense threshold scan with direct counting; independent of det_curve.

    |p_fa - p_miss| is compared via exact cross-multiplied counts so that
    rational ties resolve to the smallest threshold, like the contract says.
    """
    pos = list(pos)
    neg = list(neg)
    lo = min(pos + neg) - 1.0
    hi = max(pos + neg) + 1.0
    best = None
    t = lo
    while t <= hi + 1e-12:
        k_miss = sum(1 for s in pos if s < t)
        m_fa = sum(1 for s in neg if s >= t)
        diff = abs(m_fa * len(pos) - k_miss * len(neg))
        if best is None or diff < best[0]:
            best = (diff, (k_miss / len(pos) + m_fa / len(neg)) / 2.0, t)
        t += step
    return best[1]


class TestErrorRates:
    def test_separated(self):
        assert detmetrics.error_rates([1, 2], [-1, 0], 0.5) == (0.0, 0.0)

    def test_reject_all(self):
        assert detmetrics.error_rates([1, 2], [-1, 0], 3.0) == (1.0, 0.0)

    def test_interleaved_hand_count(self):
        # pos < 1: {0}; neg >= 1: {1}
        assert detmetrics.error_rates([0, 2], [-1, 1], 1.0) == (0.5, 0.5)

    def test_tie_accepted(self):
        # score == threshold is accepted under the >= convention
        p_miss, p_fa = detmetrics.error_rates([1.0], [1.0], 1.0)
        assert (p_miss, p_fa) == (0.0, 1.0)

    def test_empty_class(self):
        with pytest.raises(EmptyClassError):
            detmetrics.error_rates([], [1.0], 0.0)
        with pytest.raises(EmptyClassError):
            detmetrics.error_rates([1.0], [], 0.0)


class TestDetCurve:
    def test_one_midpoint(self):
        curve = detmetrics.det_curve([1.0], [0.0])
        pts = [(p.p_fa, p.p_miss) for p in curve.points()]
        assert pts == [(1.0, 0.0), (0.0, 0.0), (0.0, 1.0)]

    def test_no_midpoint_on_full_tie(self):
        curve = detmetrics.det_curve([0.0], [0.0])
        pts = [(p.p_fa, p.p_miss) for p in curve.points()]
        assert pts == [(1.0, 0.0), (0.0, 1.0)]

    def test_endpoints_present(self):
        curve = detmetrics.det_curve([0.5, 1.5], [-0.5, 0.75])
        assert (curve.p_fa[0], curve.p_miss[0]) == (1.0, 0.0)
        assert (curve.p_fa[-1], curve.p_miss[-1]) == (0.0, 1.0)

    def test_monotone_along_sweep(self):
        rng = np.random.default_rng(7)
        pos = rng.normal(1.0, 1.0, 100)
        neg = rng.normal(0.0, 1.0, 100)
        curve = detmetrics.det_curve(pos, neg)
        assert np.all(np.diff(curve.p_miss) >= 0)
        assert np.all(np.diff(curve.p_fa) <= 0)

    def test_every_point_reproduced_by_error_rates(self):
        rng = np.random.default_rng(11)
        pos = rng.normal(1.0, 1.0, 100)
        neg = rng.normal(0.0, 1.0, 100)
        curve = detmetrics.det_curve(pos, neg)
        for point in curve.points():
            p_miss, p_fa = detmetrics.error_rates(pos, neg, point.threshold)
            assert p_miss == point.p_miss
            assert p_fa == point.p_fa

    def test_csv_header(self):
        text = detmetrics.det_curve_csv(detmetrics.det_curve([1.0], [0.0]))
        assert text.startswith("threshold,p_miss,p_fa\n")
        assert text.splitlines()[1].startswith("-inf,")


class TestEer:
    def test_perfectly_separated(self):
        result = detmetrics.eer([1, 2, 3], [-3, -2, -1])
        assert result.eer == 0.0

    def test_identical_distributions(self):
        assert detmetrics.eer([0, 1], [0, 1]).eer == 0.5

    def test_interleaved(self):
        result = detmetrics.eer([0, 2], [-1, 1])
        assert result.eer == 0.5
        assert 0.0 < result.threshold < 1.0

    def test_matches_brute_force_on_integer_grids(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            pos = rng.integers(-5, 6, size=rng.integers(1, 13)).tolist()
            neg = rng.integers(-5, 6, size=rng.integers(1, 13)).tolist()
            fast = detmetrics.eer(pos, neg).eer
            assert abs(fast - brute_force_eer(pos, neg)) <= 1e-12

    # scores on a 1/8 grid keep midpoints strictly between distinct scores
    _grid = st.integers(-400, 400).map(lambda k: k / 8.0)

    @given(
        st.lists(_grid, min_size=1, max_size=30),
        st.lists(_grid, min_size=1, max_size=30),
        st.floats(min_value=0.1, max_value=10),
        st.floats(min_value=-5, max_value=5),
    )
    @settings(max_examples=100, deadline=None)
    def test_affine_invariance(self, pos, neg, a, b):
        base = detmetrics.eer(pos, neg)
        scaled = detmetrics.eer([a * s + b for s in pos], [a * s + b for s in neg])
        assert scaled.eer == pytest.approx(base.eer, abs=1e-12)

    @staticmethod
    def _tie_optimal_eers(pos, neg):
        """All (p_fa+p_miss)/2 values sharing the minimal |p_fa - p_miss|."""
        curve = detmetrics.det_curve(pos, neg)
        diffs = np.abs(
            np.round(curve.p_fa * len(neg)).astype(int) * len(pos)
            - np.round(curve.p_miss * len(pos)).astype(int) * len(neg)
        )
        best = diffs.min()
        return {
            round(float(v), 12)
            for v in (curve.p_fa[diffs == best] + curve.p_miss[diffs == best]) / 2.0
        }

    @given(
        st.lists(_grid, min_size=1, max_size=30),
        st.lists(_grid, min_size=1, max_size=30),
    )
    @settings(max_examples=100, deadline=None)
    def test_label_swap(self, pos, neg):
        # Negating scores and swapping classes mirrors the operating-point
        # set, so the tie-optimal EER candidates coincide; the reported value
        # matches whenever the optimum is unique (the smallest-threshold tie
        # break maps to the largest threshold under the mirror).
        base = self._tie_optimal_eers(pos, neg)
        swapped = self._tie_optimal_eers([-s for s in neg], [-s for s in pos])
        assert base == swapped
        swapped_eer = detmetrics.eer([-s for s in neg], [-s for s in pos]).eer
        assert round(swapped_eer, 12) in base
        if len(base) == 1:
            assert round(detmetrics.eer(pos, neg).eer, 12) == next(iter(base))

    def test_threshold_transforms_affinely(self):
        pos, neg = [0.0, 2.0, 3.0], [-1.0, 1.0, 1.5]
        base = detmetrics.eer(pos, neg)
        moved = detmetrics.eer([2 * s + 1 for s in pos], [2 * s + 1 for s in neg])
        assert moved.threshold == pytest.approx(2 * base.threshold + 1)
