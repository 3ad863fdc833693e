import math

import numpy as np
import pytest

from alpipe.errors import StatisticsError
from alpipe.evaluation import (
    BudgetCurve,
    ResultTable,
    aubc,
    heatmap,
    lose_heatmap,
    reg_inc_beta,
    student_t_cdf,
    student_t_two_sided_p,
    welch_t_test,
    win_matrix,
)

mpmath = pytest.importorskip("mpmath")


class TestAubc:
    def test_constant_curve(self):
        curve = BudgetCurve(((10, 0.7), (20, 0.7), (30, 0.7)))
        assert aubc(curve) == pytest.approx(0.7)

    def test_linear_ramp(self):
        curve = BudgetCurve(((0, 0.0), (100, 1.0)))
        assert aubc(curve) == pytest.approx(0.5)

    def test_single_point(self):
        assert aubc(BudgetCurve(((30, 0.9),))) == pytest.approx(0.9)

    def test_uneven_spacing_riemann_oracle(self):
        # oracle: fine piecewise-linear Riemann sum over the same curve
        rng = np.random.default_rng(0)
        for _ in range(10):
            xs = np.unique(rng.integers(0, 500, size=8))
            if len(xs) < 2:
                continue
            ys = rng.uniform(0.3, 1.0, size=len(xs))
            curve = BudgetCurve(tuple(zip(xs.tolist(), ys.tolist())))
            grid = np.linspace(xs[0], xs[-1], 100001)
            vals = np.interp(grid, xs, ys)
            riemann = float(np.mean((vals[:-1] + vals[1:]) / 2.0))
            assert aubc(curve) == pytest.approx(riemann, abs=1e-6)

    def test_nonincreasing_sizes_rejected(self):
        with pytest.raises(ValueError):
            BudgetCurve(((10, 0.5), (10, 0.6)))


class TestIncompleteBeta:
    def test_against_mpmath(self):
        mpmath.mp.dps = 30
        rng = np.random.default_rng(1)
        for _ in range(60):
            a = float(rng.uniform(0.3, 40.0))
            b = float(rng.uniform(0.3, 40.0))
            x = float(rng.uniform(0.0, 1.0))
            want = float(mpmath.betainc(a, b, 0, x, regularized=True))
            assert reg_inc_beta(a, b, x) == pytest.approx(want, abs=1e-10)

    def test_edges(self):
        assert reg_inc_beta(2.0, 3.0, 0.0) == 0.0
        assert reg_inc_beta(2.0, 3.0, 1.0) == 1.0


class TestStudentT:
    def _oracle_cdf(self, t, dof):
        mpmath.mp.dps = 30
        # integrate the t density directly
        def pdf(u):
            return (
                mpmath.gamma((dof + 1) / 2)
                / (mpmath.sqrt(dof * mpmath.pi) * mpmath.gamma(dof / 2))
                * (1 + u * u / dof) ** (-(dof + 1) / 2)
            )
        return float(mpmath.quad(pdf, [-mpmath.inf, t]))

    def test_cdf_against_quadrature(self):
        for t, dof in [(0.0, 5.0), (1.3, 2.7), (-2.1, 9.0), (4.0, 1.5), (0.3, 30.0)]:
            assert student_t_cdf(t, dof) == pytest.approx(
                self._oracle_cdf(t, dof), abs=1e-10
            )

    def test_two_sided_symmetry(self):
        for t, dof in [(1.7, 4.0), (0.2, 12.0)]:
            p = student_t_two_sided_p(t, dof)
            assert p == pytest.approx(2 * (1 - student_t_cdf(abs(t), dof)), abs=1e-12)
            assert student_t_two_sided_p(-t, dof) == pytest.approx(p, abs=1e-15)


class TestWelch:
    def test_against_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = np.random.default_rng(2)
        for _ in range(40):
            a = rng.normal(0.0, 1.0, size=int(rng.integers(2, 20)))
            b = rng.normal(0.3, 2.0, size=int(rng.integers(2, 20)))
            got = welch_t_test(a, b)
            want = scipy_stats.ttest_ind(a, b, equal_var=False)
            assert got.t == pytest.approx(want.statistic, abs=1e-10)
            assert got.p == pytest.approx(want.pvalue, abs=1e-10)

    def test_antisymmetry(self):
        a = [1.0, 2.0, 3.0]
        b = [2.0, 4.0, 9.0]
        ab = welch_t_test(a, b)
        ba = welch_t_test(b, a)
        assert ab.t == pytest.approx(-ba.t)
        assert ab.p == pytest.approx(ba.p)

    def test_degenerate_equal(self):
        res = welch_t_test([1.0, 1.0], [1.0, 1.0])
        assert (res.t, res.p) == (0.0, 1.0)

    def test_degenerate_unequal(self):
        res = welch_t_test([2.0, 2.0], [1.0, 1.0])
        assert res.t == math.inf and res.p == 0.0
        res = welch_t_test([0.0, 0.0], [1.0, 1.0])
        assert res.t == -math.inf and res.p == 0.0

    def test_too_few_samples(self):
        with pytest.raises(StatisticsError):
            welch_t_test([1.0], [1.0, 2.0])


def _table(spread=0.01):
    """Two learners x two strategies x two datasets with a clear winner."""
    table = ResultTable()
    rng = np.random.default_rng(3)
    base = {("l1", "s1"): 0.9, ("l1", "s2"): 0.5, ("l2", "s1"): 0.6, ("l2", "s2"): 0.4}
    for d in ("d1", "d2"):
        for (lrn, strat), mean in base.items():
            for _ in range(10):
                table.add(lrn, strat, d, mean + rng.normal(0.0, spread))
    return table


class TestHeatmaps:
    def test_winner_counts(self):
        H, learners, strategies, skipped = heatmap(_table(), with_significance=False)
        assert learners == ["l1", "l2"]
        assert strategies == ["s1", "s2"]
        assert skipped == []
        assert H.tolist() == [[2, 0], [0, 0]]
        assert H.sum() == 2  # one winner per dataset

    def test_significance_adds_statistical_ties(self):
        # enormous spread: nothing is distinguishable, everyone ties the winner
        H, _, _, _ = heatmap(_table(spread=50.0), with_significance=True)
        assert np.all(H == 2)

    def test_lose_heatmap_mirror(self):
        H, _, _, _ = lose_heatmap(_table(), with_significance=False)
        assert H.tolist() == [[0, 0], [0, 2]]

    def test_incomplete_dataset_skipped(self):
        table = _table()
        for _ in range(5):
            table.add("l1", "s1", "d3", 0.9)  # d3 missing other ALPs
        H, _, _, skipped = heatmap(table, with_significance=False)
        assert skipped == ["d3"]
        assert H.sum() == 2

    def test_exact_tie_breaks_lexicographically(self):
        table = ResultTable()
        for pair in (("l1", "s1"), ("l1", "s2")):
            for v in (0.5, 0.6):
                table.add(pair[0], pair[1], "d", v)
        H, _, _, _ = heatmap(table, with_significance=False)
        assert H.tolist() == [[1, 0]]


class TestWinMatrix:
    def test_clear_dominance(self):
        W, strategies, skipped = win_matrix(_table(), "l1")
        i, j = strategies.index("s1"), strategies.index("s2")
        assert W[i, j] == 1.0
        assert W[j, i] == 0.0
        assert np.all(np.diag(W) == 0.0)

    def test_no_significance_no_wins(self):
        W, _, _ = win_matrix(_table(spread=50.0), "l1")
        assert np.all(W == 0.0)

    def test_mutual_exclusion(self):
        # i beats j and j beats i cannot both hold on a dataset
        W, strategies, _ = win_matrix(_table(), "l2")
        assert np.all(W * W.T == 0.0)

    def test_empty_results(self):
        W, strategies, skipped = win_matrix(ResultTable(), "l1")
        assert W.shape == (0, 0)
