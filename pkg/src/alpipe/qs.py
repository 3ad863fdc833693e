"""The fifteen query strategies: score functions, combinators, selectors.

All tie-breaks resolve to the ascending position index so every selector
is brute-force checkable. Every selector returns exactly
min(R, |unlabeled|) distinct positions into the unlabeled list.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from alpipe.errors import ConfigurationError, ContextError
from alpipe.kernels import pairwise_sq_dists, update_min_sq_dists

log = logging.getLogger(__name__)

SCORE_EPS = 1e-12


@dataclass
class QueryContext:
    """Everything a strategy may see for one query round."""

    labeled_X: np.ndarray
    labeled_y: np.ndarray
    unlabeled_X: np.ndarray
    batch_size: int
    rng: object
    probs: np.ndarray = None
    embeddings_labeled: np.ndarray = None
    embeddings_unlabeled: np.ndarray = None
    committee: list = None
    constants: dict = field(default_factory=dict)

    @property
    def n_unlabeled(self):
        return self.unlabeled_X.shape[0]

    def clipped_batch(self):
        return min(self.batch_size, self.n_unlabeled)


# ---------------------------------------------------------------- scores

def margin_score(p):
    """Difference between the two largest entries; selection wants the minimum."""
    p = np.sort(np.asarray(p, dtype=np.float64))
    return float(p[-1] - p[-2])


def entropy_score(p):
    p = np.asarray(p, dtype=np.float64)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def least_confident_score(p):
    return float(1.0 - np.max(p))


def maxent_score(member_rows):
    rows = np.asarray(member_rows, dtype=np.float64)
    return entropy_score(rows.mean(axis=0))


def bald_score(member_rows):
    rows = np.asarray(member_rows, dtype=np.float64)
    mean_member_entropy = float(np.mean([entropy_score(r) for r in rows]))
    return maxent_score(rows) - mean_member_entropy


def qbc_score(member_rows):
    """Vote entropy: each member votes its argmax class (ties to lowest index)."""
    rows = np.asarray(member_rows, dtype=np.float64)
    votes = np.argmax(rows, axis=1)
    fractions = np.bincount(votes) / rows.shape[0]
    return entropy_score(fractions)


def margin_scores(P):
    part = np.sort(P, axis=1)
    return part[:, -1] - part[:, -2]


def entropy_scores(P):
    P = np.asarray(P, dtype=np.float64)
    logs = np.where(P > 0.0, np.log(np.where(P > 0.0, P, 1.0)), 0.0)
    return -np.sum(P * logs, axis=1)


def _committee_rows(ctx):
    if not ctx.committee or len(ctx.committee) < 1:
        raise ContextError("strategy requires committee predictions")
    return np.stack(ctx.committee, axis=0)  # (M, n, C)


# ----------------------------------------------------------- combinators

def top_k_select(scores, R, direction="max"):
    """The R best positions; ties break to the ascending position index."""
    scores = np.asarray(scores, dtype=np.float64)
    R = min(R, scores.shape[0])
    key = -scores if direction == "max" else scores
    order = np.argsort(key, kind="stable")
    return [int(i) for i in order[:R]]


def gumbel_power_select(scores, R, beta, rng):
    """Top-R of beta*log(score) + Gumbel noise.

    Realizes sampling R positions without replacement with probability
    proportional to score**beta (the Gumbel-max trick).
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.shape[0]
    R = min(R, n)
    if np.all(scores == 0.0):
        log.info("all power-strategy scores are zero; uniform fallback")
        return [int(i) for i in rng.choice(n, size=R, replace=False)]
    perturbed = beta * np.log(np.maximum(scores, SCORE_EPS)) + rng.gumbel(n)
    return top_k_select(perturbed, R, "max")


# ------------------------------------------------------------- clustering

def kmeans_cluster(X, k, rng, weights=None, max_iter=100, tol=1e-4):
    """Lloyd's algorithm with (weighted) k-means++ seeding.

    Weights scale both the seeding probabilities and the centroid updates.
    Returns (centers, assignment).
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    k = min(k, n)
    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=np.float64)
    wsum = w.sum()
    probs = w / wsum if wsum > 0 else np.full(n, 1.0 / n)

    centers = np.empty((k, X.shape[1]))
    first = int(rng.choice(n, size=1, p=probs)[0])
    centers[0] = X[first]
    min_d = np.full(n, np.inf)
    for j in range(1, k):
        update_min_sq_dists(min_d, X, centers[j - 1])
        mass = w * min_d
        total = mass.sum()
        if total <= 0.0:
            # all remaining points coincide with a center: spread over rows
            centers[j] = X[int(rng.integers(0, n))]
            continue
        centers[j] = X[int(rng.choice(n, size=1, p=mass / total)[0])]

    assignment = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = pairwise_sq_dists(X, centers)
        assignment = np.argmin(d2, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            mask = assignment == j
            mass = w[mask].sum()
            if mass > 0.0:
                new_centers[j] = (w[mask, None] * X[mask]).sum(axis=0) / mass
            else:
                # reseed empty cluster at the worst-covered point
                far = int(np.argmax(np.min(d2, axis=1)))
                new_centers[j] = X[far]
        shift = float(np.sqrt(np.max(np.sum((new_centers - centers) ** 2, axis=1))))
        centers = new_centers
        if shift < tol:
            break
    d2 = pairwise_sq_dists(X, centers)
    assignment = np.argmin(d2, axis=1)
    return centers, assignment


def _nearest_unselected_per_center(X, centers, R):
    """One distinct nearest instance per centroid, ties to lower position."""
    d2 = pairwise_sq_dists(X, centers)
    chosen = []
    taken = np.zeros(X.shape[0], dtype=bool)
    for j in range(centers.shape[0]):
        if len(chosen) == R:
            break
        col = d2[:, j].copy()
        col[taken] = np.inf
        pick = int(np.argmin(col))
        taken[pick] = True
        chosen.append(pick)
    return chosen


# -------------------------------------------------------------- selectors

def random_select(ctx: QueryContext):
    R = ctx.clipped_batch()
    return [int(i) for i in ctx.rng.choice(ctx.n_unlabeled, size=R, replace=False)]


def kmeans_select(ctx: QueryContext):
    R = ctx.clipped_batch()
    X = ctx.embeddings_unlabeled
    centers, _ = kmeans_cluster(X, R, ctx.rng)
    return _nearest_unselected_per_center(X, centers, R)


def coreset_select(ctx: QueryContext):
    """Greedy k-center: repeatedly take the point farthest from the
    labeled set plus everything selected so far."""
    R = ctx.clipped_batch()
    U = np.asarray(ctx.embeddings_unlabeled, dtype=np.float64)
    L = np.asarray(ctx.embeddings_labeled, dtype=np.float64)
    min_d = np.min(pairwise_sq_dists(U, L), axis=1)
    chosen = []
    for _ in range(R):
        masked = min_d.copy()
        if chosen:
            masked[chosen] = -np.inf
        pick = int(np.argmax(masked))
        chosen.append(pick)
        update_min_sq_dists(min_d, U, U[pick])
    return chosen


def typical_clustering_select(ctx: QueryContext):
    """Prefer clusters holding no labeled instance; within a cluster take
    the instance with the highest typicality (inverse mean distance to its
    nearest in-cluster neighbors, lone points counting as +inf)."""
    R = ctx.clipped_batch()
    L = np.asarray(ctx.embeddings_labeled, dtype=np.float64)
    U = np.asarray(ctx.embeddings_unlabeled, dtype=np.float64)
    n_lab, n_unl = L.shape[0], U.shape[0]
    X = np.vstack([L, U]) if n_lab else U
    k = min(n_lab + R, n_lab + n_unl)
    _, assignment = kmeans_cluster(X, k, ctx.rng)

    lab_assign = assignment[:n_lab]
    unl_assign = assignment[n_lab:]
    cluster_ids = np.unique(assignment)
    labeled_count = {int(c): int(np.sum(lab_assign == c)) for c in cluster_ids}
    size = {int(c): int(np.sum(assignment == c)) for c in cluster_ids}

    uncovered = sorted(
        (c for c in cluster_ids if labeled_count[int(c)] == 0),
        key=lambda c: (-size[int(c)], int(c)),
    )
    covered = sorted(
        (c for c in cluster_ids if labeled_count[int(c)] > 0),
        key=lambda c: (labeled_count[int(c)], -size[int(c)], int(c)),
    )
    ordered_clusters = list(uncovered) + list(covered)

    def typicality(pos, members_x):
        if members_x.shape[0] <= 1:
            return np.inf
        d = np.sqrt(pairwise_sq_dists(members_x[pos : pos + 1], members_x)[0])
        d = np.delete(d, pos)
        m = min(20, members_x.shape[0] - 1)
        nearest = np.sort(d)[:m]
        mean_d = float(np.mean(nearest))
        return np.inf if mean_d == 0.0 else 1.0 / mean_d

    # per cluster: unlabeled member positions ranked by descending typicality
    ranked = {}
    for c in ordered_clusters:
        members = np.nonzero(assignment == c)[0]
        members_x = X[members]
        unl_positions = [int(m) - n_lab for m in members if m >= n_lab]
        scored = []
        for p in unl_positions:
            local = int(np.nonzero(members == p + n_lab)[0][0])
            scored.append((-typicality(local, members_x), p))
        scored.sort()
        ranked[int(c)] = [p for _, p in scored]

    chosen = []
    round_idx = 0
    while len(chosen) < R:
        advanced = False
        for c in ordered_clusters:
            if len(chosen) == R:
                break
            lst = ranked[int(c)]
            if round_idx < len(lst):
                chosen.append(lst[round_idx])
                advanced = True
        if not advanced:
            break
        round_idx += 1
    return chosen[:R]


def cluster_margin_select(ctx: QueryContext):
    """Cluster the pool, shortlist the lowest-margin candidates, then
    round-robin over clusters by ascending candidate count."""
    if ctx.probs is None:
        raise ContextError("cluster_margin requires probabilities")
    R = ctx.clipped_batch()
    U = ctx.embeddings_unlabeled
    n = ctx.n_unlabeled
    _, assignment = kmeans_cluster(U, min(R, n), ctx.rng)
    margins = margin_scores(ctx.probs)
    n_cand = min(10 * R, n)
    candidates = top_k_select(margins, n_cand, "min")

    per_cluster = {}
    for pos in candidates:  # already in ascending-margin order
        per_cluster.setdefault(int(assignment[pos]), []).append(pos)
    order = sorted(per_cluster, key=lambda c: (len(per_cluster[c]), c))

    chosen = []
    round_idx = 0
    while len(chosen) < R:
        advanced = False
        for c in order:
            if len(chosen) == R:
                break
            lst = per_cluster[c]
            if round_idx < len(lst):
                chosen.append(lst[round_idx])
                advanced = True
        if not advanced:
            break
        round_idx += 1
    return chosen[:R]


def clue_select(ctx: QueryContext):
    """Entropy-weighted k-means; query the instances nearest each centroid."""
    if ctx.probs is None:
        raise ContextError("clue requires probabilities")
    R = ctx.clipped_batch()
    X = ctx.embeddings_unlabeled
    weights = entropy_scores(ctx.probs) + SCORE_EPS
    centers, _ = kmeans_cluster(X, R, ctx.rng, weights=weights)
    return _nearest_unselected_per_center(X, centers, R)


def falcun_select(ctx: QueryContext):
    """Relevance sampling mixing margin uncertainty with a probability-space
    diversity term that shrinks as similar instances get picked."""
    if ctx.probs is None:
        raise ContextError("falcun requires probabilities")
    R = ctx.clipped_batch()
    gamma = float(ctx.constants.get("gamma", 1.0))
    P = np.asarray(ctx.probs, dtype=np.float64)
    n = P.shape[0]
    u = 1.0 - margin_scores(P)
    d = np.ones(n)
    selected = np.zeros(n, dtype=bool)
    chosen = []
    for _ in range(R):
        relevance = np.where(selected, 0.0, (u + d) ** gamma)
        total = relevance.sum()
        if total <= 0.0 or not np.isfinite(total):
            log.info("all FALCUN relevances zero; uniform fallback")
            remaining = np.nonzero(~selected)[0]
            pick = int(remaining[int(ctx.rng.integers(0, len(remaining)))])
        else:
            pick = int(ctx.rng.choice(n, size=1, p=relevance / total)[0])
        selected[pick] = True
        chosen.append(pick)
        l1 = np.sum(np.abs(P - P[pick]), axis=1) / 2.0
        d = np.minimum(d, l1)
    return chosen


# --------------------------------------------------------------- dispatch

COMMITTEE_STRATEGIES = ("max_entropy", "bald", "qbc", "power_bald")

STRATEGIES = (
    "margin",
    "entropy",
    "least_confident",
    "max_entropy",
    "bald",
    "qbc",
    "power_margin",
    "power_bald",
    "kmeans",
    "coreset",
    "typical_clustering",
    "cluster_margin",
    "clue",
    "falcun",
    "random",
)


def _require_probs(ctx):
    if ctx.probs is None:
        raise ContextError("strategy requires probabilities")
    return np.asarray(ctx.probs, dtype=np.float64)


def dispatch(strategy: str, ctx: QueryContext):
    """Route a strategy name to its selector; returns R distinct positions."""
    R = ctx.clipped_batch()
    if strategy == "margin":
        return top_k_select(margin_scores(_require_probs(ctx)), R, "min")
    if strategy == "entropy":
        return top_k_select(entropy_scores(_require_probs(ctx)), R, "max")
    if strategy == "least_confident":
        P = _require_probs(ctx)
        return top_k_select(1.0 - P.max(axis=1), R, "max")
    if strategy == "max_entropy":
        rows = _committee_rows(ctx)
        return top_k_select(entropy_scores(rows.mean(axis=0)), R, "max")
    if strategy == "bald":
        rows = _committee_rows(ctx)
        mean_ent = np.mean([entropy_scores(m) for m in rows], axis=0)
        return top_k_select(entropy_scores(rows.mean(axis=0)) - mean_ent, R, "max")
    if strategy == "qbc":
        rows = _committee_rows(ctx)
        scores = [qbc_score(rows[:, i, :]) for i in range(rows.shape[1])]
        return top_k_select(scores, R, "max")
    if strategy == "power_margin":
        beta = float(ctx.constants.get("beta", 1.0))
        scores = 1.0 - margin_scores(_require_probs(ctx))
        return gumbel_power_select(scores, R, beta, ctx.rng)
    if strategy == "power_bald":
        rows = _committee_rows(ctx)
        beta = float(ctx.constants.get("beta", 1.0))
        mean_ent = np.mean([entropy_scores(m) for m in rows], axis=0)
        scores = np.maximum(entropy_scores(rows.mean(axis=0)) - mean_ent, 0.0)
        return gumbel_power_select(scores, R, beta, ctx.rng)
    if strategy == "kmeans":
        return kmeans_select(ctx)
    if strategy == "coreset":
        return coreset_select(ctx)
    if strategy == "typical_clustering":
        return typical_clustering_select(ctx)
    if strategy == "cluster_margin":
        return cluster_margin_select(ctx)
    if strategy == "clue":
        return clue_select(ctx)
    if strategy == "falcun":
        return falcun_select(ctx)
    if strategy == "random":
        return random_select(ctx)
    raise ConfigurationError(f"unknown query strategy {strategy!r}")
