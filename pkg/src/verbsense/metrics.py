"""Ranking and correlation metrics with explicit tie handling, plus paired
permutation significance tests.

All ranks are 1-based. Cosine ties are resolved by exact float equality and
the tied item is placed at the mean rank of its tie group, rounded up.
"""

import numpy as np

__all__ = [
    "cosine",
    "rank_of_correct",
    "mrr",
    "accuracy",
    "avg_cosine",
    "average_ranks",
    "pearson_r",
    "spearman_rho",
    "paired_significance",
    "rho_contrast_significance",
]

# exact enumeration of sign flips is used up to this many pairs
EXACT_PERMUTATION_LIMIT = 16


def cosine(u, v) -> float:
    """Cosine similarity; 0.0 when either vector is zero."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


def rank_of_correct(target, candidates, correct_key) -> int:
    """Rank of the correct candidate when all candidates are sorted by
    descending cosine similarity to ``target``.

    ``candidates`` is a sequence of (key, vector) pairs and must contain
    ``correct_key``. A group of t candidates tied with the correct one spans
    ranks g+1 .. g+t (g candidates strictly better); the reported rank is the
    mean of that range rounded up, i.e. g + t//2 + 1.
    """
    sims = []
    correct_sim = None
    for key, vec in candidates:
        s = cosine(target, vec)
        sims.append(s)
        if correct_sim is None and key == correct_key:
            correct_sim = s
    if correct_sim is None:
        raise ValueError(f"correct candidate {correct_key!r} not in pool")
    greater = sum(1 for s in sims if s > correct_sim)
    tied = sum(1 for s in sims if s == correct_sim)
    return greater + tied // 2 + 1


def mrr(ranks) -> float:
    """Mean reciprocal rank of a list of 1-based ranks."""
    ranks = list(ranks)
    if not ranks:
        raise ValueError("mrr of an empty rank list")
    if any(int(r) != r or r < 1 for r in ranks):
        raise ValueError("ranks must be integers >= 1")
    return float(sum(1.0 / r for r in ranks) / len(ranks))


def accuracy(ranks) -> float:
    """Fraction of ranks equal to 1. Never exceeds mrr on the same list."""
    ranks = list(ranks)
    if not ranks:
        raise ValueError("accuracy of an empty rank list")
    if any(int(r) != r or r < 1 for r in ranks):
        raise ValueError("ranks must be integers >= 1")
    return float(sum(1 for r in ranks if r == 1) / len(ranks))


def avg_cosine(pairs):
    """Mean cosine over (vector, vector) pairs.

    Returns (mean, per_pair) so callers can run paired significance tests on
    the raw values.
    """
    per_pair = [cosine(u, v) for u, v in pairs]
    if not per_pair:
        raise ValueError("avg_cosine of an empty pair list")
    return float(np.mean(per_pair)), per_pair


def average_ranks(xs) -> np.ndarray:
    """1-based ranks of ``xs`` in ascending order; ties get the mean of the
    rank range they occupy."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1:
        raise ValueError("average_ranks expects a 1-d array")
    n = xs.size
    order = np.argsort(xs, kind="stable")
    sx = xs[order]
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = sx[1:] != sx[:-1]
    gid = np.cumsum(boundary) - 1
    counts = np.bincount(gid)
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    mean_rank = (starts + ends) / 2.0
    ranks = np.empty(n, dtype=float)
    ranks[order] = mean_rank[gid]
    return ranks


def pearson_r(xs, ys) -> float:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("pearson_r expects two equal-length 1-d arrays")
    if xs.size < 2:
        raise ValueError("pearson_r needs at least 2 points")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise ValueError("correlation undefined for a constant list")
    xc = xs - xs.mean()
    yc = ys - ys.mean()
    return float(np.dot(xc, yc) / (np.linalg.norm(xc) * np.linalg.norm(yc)))


def spearman_rho(xs, ys) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("spearman_rho expects two equal-length 1-d arrays")
    if xs.size < 2:
        raise ValueError("spearman_rho needs at least 2 points")
    if np.all(xs == xs[0]) or np.all(ys == ys[0]):
        raise ValueError("correlation undefined for a constant list")
    return pearson_r(average_ranks(xs), average_ranks(ys))


def _sign_matrix(n: int) -> np.ndarray:
    """All 2**n sign assignments as a (2**n, n) array of +/-1."""
    grid = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
    return grid * 2 - 1


def paired_significance(a, b, resamples: int = 100_000, seed: int = 0) -> float:
    """Two-sided paired permutation test on the mean difference of two
    aligned score lists.

    Exact sign-flip enumeration when there are at most
    EXACT_PERMUTATION_LIMIT pairs, otherwise ``resamples`` seeded Monte Carlo
    draws with the add-one estimate (1 + hits) / (1 + resamples).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired_significance expects two aligned 1-d lists")
    if a.size == 0:
        raise ValueError("paired_significance of empty lists")
    d = a - b
    n = d.size
    observed = abs(d.mean())
    # The identity assignment must always count as a hit, but the batched
    # sign products accumulate in a different order than mean(); compare
    # against a slightly deflated threshold so an ulp of drift cannot drop it.
    threshold = observed - 100 * np.finfo(d.dtype).eps * observed
    if n <= EXACT_PERMUTATION_LIMIT:
        signs = _sign_matrix(n)
        means = np.abs(signs @ d) / n
        return float(np.count_nonzero(means >= threshold) / means.size)
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = resamples
    chunk = max(1, min(resamples, 4_000_000 // max(n, 1)))
    while remaining > 0:
        m = min(chunk, remaining)
        signs = rng.integers(0, 2, size=(m, n)) * 2 - 1
        means = np.abs(signs @ d) / n
        hits += int(np.count_nonzero(means >= threshold))
        remaining -= m
    return float((1 + hits) / (1 + resamples))


def _rho_against(ranked_gold: np.ndarray, values: np.ndarray) -> float:
    """Spearman rho against pre-ranked gold scores; 0.0 when the value list
    is constant (only reachable inside permutation resamples)."""
    if np.all(values == values[0]):
        return 0.0
    r = average_ranks(values)
    rc = r - r.mean()
    gc = ranked_gold
    denom = np.linalg.norm(rc) * np.linalg.norm(gc)
    if denom == 0.0:
        return 0.0
    return float(np.dot(rc, gc) / denom)


def rho_contrast_significance(gold, scores_a, scores_b,
                              resamples: int = 10_000, seed: int = 0) -> float:
    """Two-sided paired permutation test on the difference of Spearman
    correlations of two score lists against shared gold scores.

    Under the null the two models are exchangeable, so each pair's (a, b)
    values are swapped with probability 1/2 and the rho difference is
    recomputed. Exact enumeration when there are at most
    EXACT_PERMUTATION_LIMIT pairs.
    """
    gold = np.asarray(gold, dtype=float)
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if not (gold.shape == a.shape == b.shape) or gold.ndim != 1:
        raise ValueError("rho_contrast_significance expects three aligned lists")
    if gold.size < 2:
        raise ValueError("rho_contrast_significance needs at least 2 pairs")
    if np.all(gold == gold[0]):
        raise ValueError("correlation undefined for constant gold scores")
    n = gold.size
    rg = average_ranks(gold)
    rg = rg - rg.mean()
    observed = abs(_rho_against(rg, b) - _rho_against(rg, a))

    def delta(mask: np.ndarray) -> float:
        a_star = np.where(mask, b, a)
        b_star = np.where(mask, a, b)
        return abs(_rho_against(rg, b_star) - _rho_against(rg, a_star))

    if n <= EXACT_PERMUTATION_LIMIT:
        hits = 0
        total = 2**n
        for bits in range(total):
            mask = (bits >> np.arange(n)) & 1
            if delta(mask.astype(bool)) >= observed:
                hits += 1
        return float(hits / total)
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(resamples):
        mask = rng.integers(0, 2, size=n).astype(bool)
        if delta(mask) >= observed:
            hits += 1
    return float((1 + hits) / (1 + resamples))
