"""Budget curves, AUBC, Welch's t-test, heatmaps, and win matrices."""

import math
from dataclasses import dataclass

import numpy as np

from alpipe.errors import StatisticsError

ALPHA = 0.05


@dataclass(frozen=True)
class BudgetCurve:
    """Ordered (labeled-pool size, metric value) pairs, one per iteration."""

    points: tuple

    def __post_init__(self):
        sizes = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("pool sizes must be strictly increasing")


@dataclass(frozen=True)
class ComparisonResult:
    t: float
    dof: float
    p: float


def aubc(curve: BudgetCurve) -> float:
    """Trapezoidal area under the curve normalized by the pool-size span,
    so a constant curve maps to its constant."""
    pts = curve.points
    if len(pts) == 1:
        return float(pts[0][1])
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    area = float(np.trapezoid(y, x))
    return area / float(x[-1] - x[0])


# ----------------------------------------------------- Student-t machinery

_CF_TOL = 1e-12
_CF_MAX_ITER = 500


def _betacf(a, b, x):
    """Continued fraction for the regularized incomplete beta (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            break
    return h


def reg_inc_beta(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, dof: float) -> float:
    if t == 0.0:
        return 0.5
    x = dof / (dof + t * t)
    tail = 0.5 * reg_inc_beta(dof / 2.0, 0.5, x)
    return 1.0 - tail if t > 0 else tail


def student_t_two_sided_p(t: float, dof: float) -> float:
    if math.isinf(t):
        return 0.0
    x = dof / (dof + t * t)
    return reg_inc_beta(dof / 2.0, 0.5, x)


def welch_t_test(a, b) -> ComparisonResult:
    """Unequal-variance two-sample t-test (Welch-Satterthwaite dof).

    Degenerate conventions: both variances zero and equal means gives
    (t=0, p=1); both zero and unequal means gives (t=+-inf, p=0).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise StatisticsError("welch_t_test needs at least 2 samples per side")
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    na, nb = a.size, b.size
    sa, sb = va / na, vb / nb
    if sa + sb == 0.0:
        if ma == mb:
            return ComparisonResult(t=0.0, dof=float(na + nb - 2), p=1.0)
        t = math.inf if ma > mb else -math.inf
        return ComparisonResult(t=t, dof=float(na + nb - 2), p=0.0)
    t = (ma - mb) / math.sqrt(sa + sb)
    dof = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    return ComparisonResult(t=t, dof=dof, p=student_t_two_sided_p(t, dof))


# ----------------------------------------------------------- result tables

class ResultTable:
    """AUBC (or other metric) samples keyed by (learner, strategy, dataset)."""

    def __init__(self):
        self._cells = {}

    def add(self, learner, strategy, dataset, value):
        self._cells.setdefault((learner, strategy, dataset), []).append(float(value))

    def samples(self, learner, strategy, dataset):
        return self._cells.get((learner, strategy, dataset))

    @property
    def learners(self):
        return sorted({k[0] for k in self._cells})

    @property
    def strategies(self):
        return sorted({k[1] for k in self._cells})

    @property
    def datasets(self):
        return sorted({k[2] for k in self._cells})


def _complete_datasets(results, pairs):
    complete, skipped = [], []
    for d in results.datasets:
        if all(results.samples(lrn, strat, d) for lrn, strat in pairs):
            complete.append(d)
        else:
            skipped.append(d)
    return complete, skipped


def _extreme_alp(results, pairs, dataset, lowest):
    means = {
        pair: float(np.mean(results.samples(pair[0], pair[1], dataset)))
        for pair in pairs
    }
    # ties break lexicographically on (learner, strategy)
    best = None
    for pair in sorted(pairs):
        if best is None:
            best = pair
        elif lowest and means[pair] < means[best]:
            best = pair
        elif not lowest and means[pair] > means[best]:
            best = pair
    return best


def _heatmap(results: ResultTable, with_significance: bool, lowest: bool):
    learners = results.learners
    strategies = results.strategies
    pairs = [(l, s) for l in learners for s in strategies]
    complete, skipped = _complete_datasets(results, pairs)
    H = np.zeros((len(learners), len(strategies)), dtype=np.int64)
    for d in complete:
        ref = _extreme_alp(results, pairs, d, lowest)
        ref_samples = results.samples(ref[0], ref[1], d)
        for i, lrn in enumerate(learners):
            for j, strat in enumerate(strategies):
                if (lrn, strat) == ref:
                    H[i, j] += 1
                    continue
                if not with_significance:
                    continue
                res = welch_t_test(results.samples(lrn, strat, d), ref_samples)
                if res.p >= ALPHA:
                    H[i, j] += 1
    return H, learners, strategies, skipped


def heatmap(results: ResultTable, with_significance: bool = True):
    """Counts of datasets where each ALP ties the per-dataset winner.

    With significance, every ALP whose Welch test against the winner has
    p >= 0.05 is counted (winner included); without, only the winner.
    """
    return _heatmap(results, with_significance, lowest=False)


def lose_heatmap(results: ResultTable, with_significance: bool = True):
    """As heatmap, with the per-dataset loser as the reference ALP."""
    return _heatmap(results, with_significance, lowest=True)


def win_matrix(results: ResultTable, learner: str):
    """W[i, j]: fraction of datasets where strategy i significantly beats j."""
    strategies = results.strategies
    pairs = [(learner, s) for s in strategies]
    complete, skipped = _complete_datasets(results, pairs)
    M = len(strategies)
    W = np.zeros((M, M), dtype=np.float64)
    if not complete:
        return W, strategies, skipped
    for d in complete:
        samples = {s: results.samples(learner, s, d) for s in strategies}
        means = {s: float(np.mean(samples[s])) for s in strategies}
        for i, si in enumerate(strategies):
            for j, sj in enumerate(strategies):
                if i == j or means[si] <= means[sj]:
                    continue
                if welch_t_test(samples[si], samples[sj]).p < ALPHA:
                    W[i, j] += 1.0
    W /= len(complete)
    return W, strategies, skipped
