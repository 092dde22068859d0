"""Unsupervised verb sense induction.

Every verb occurrence gets a context vector, the mean of the space vectors
of all other tokens in its sentence. Context vectors are clustered by
agglomerative merging with Ward linkage computed through the Lance-Williams
recurrence over a configurable base distance (Pearson distance 1 - r by
default). The partition maximizing the Calinski-Harabasz variance ratio
over k in [k_min, min(k_max, n - 1)] is kept, objects follow their
occurrences into clusters, and undersized senses are merged into the
dominant one.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import SemanticSpace, Token
from .metrics import cosine

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterConfig:
    distance: str = "pearson"
    linkage: str = "ward"
    k_min: int = 2
    k_max: int = 10
    min_exemplars: int = 3

    def __post_init__(self):
        if self.distance not in ("pearson", "cosine", "euclidean"):
            raise ValueError("distance must be pearson, cosine, or euclidean")
        if self.linkage != "ward":
            raise ValueError("only ward linkage is supported")
        if self.k_min < 2:
            raise ValueError("k_min must be >= 2")
        if self.k_max < self.k_min:
            raise ValueError("k_max must be >= k_min")
        if self.min_exemplars < 1:
            raise ValueError("min_exemplars must be >= 1")


@dataclass(frozen=True)
class VerbOccurrence:
    """A verb token in context: the sentence, the verb's position in it, and
    the object lemma the occurrence was extracted with."""

    sentence: tuple
    verb_position: int
    obj: str


def context_vector(sentence, target_position: int,
                   space: SemanticSpace) -> tuple[np.ndarray | None, int]:
    """Mean of the space vectors of every token except the target position.

    Tokens without a vector are skipped. Returns (vector, contributing)
    where vector is None when no token contributed.
    """
    if not 0 <= target_position < len(sentence):
        raise ValueError(f"target position {target_position} outside sentence")
    total = np.zeros(space.dim)
    contributing = 0
    for i, tok in enumerate(sentence):
        if i == target_position:
            continue
        if tok in space:
            total += space.vector(tok)
            contributing += 1
    if contributing == 0:
        return None, 0
    return total / contributing, contributing


# --- agglomerative clustering --------------------------------------------

def _pearson_distance(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    nx = np.linalg.norm(xc)
    ny = np.linalg.norm(yc)
    if nx == 0.0 or ny == 0.0:
        # degenerate constant vectors: distance 0 only for exact equality
        return 0.0 if np.array_equal(x, y) else 1.0
    return float(1.0 - np.dot(xc, yc) / (nx * ny))


def _cosine_distance(x: np.ndarray, y: np.ndarray) -> float:
    nx = np.linalg.norm(x)
    ny = np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        return 0.0 if np.array_equal(x, y) else 1.0
    return float(1.0 - np.dot(x, y) / (nx * ny))


def base_distance_matrix(vectors: np.ndarray, distance: str) -> np.ndarray:
    """Pairwise base distances. 'euclidean' means squared Euclidean, the
    classical Ward geometry. Computed blockwise; rows that are degenerate
    for the metric (constant under pearson, zero under cosine) follow the
    same convention as the pairwise helpers."""
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if distance == "euclidean":
        sq = np.sum(vectors**2, axis=1)
        D = sq[:, None] + sq[None, :] - 2.0 * (vectors @ vectors.T)
        np.fill_diagonal(D, 0.0)
        np.maximum(D, 0.0, out=D)
        return D
    if distance == "pearson":
        X = vectors - vectors.mean(axis=1, keepdims=True)
    else:
        X = vectors
    norms = np.linalg.norm(X, axis=1)
    ok = norms > 0.0
    D = np.ones((n, n))
    if ok.any():
        unit = X[ok] / norms[ok, None]
        block = 1.0 - unit @ unit.T
        np.maximum(block, 0.0, out=block)
        D[np.ix_(ok, ok)] = block
    for i in np.flatnonzero(~ok):
        for j in range(n):
            same = np.array_equal(vectors[i], vectors[j])
            D[i, j] = D[j, i] = 0.0 if same else 1.0
    np.fill_diagonal(D, 0.0)
    return D


@dataclass(frozen=True)
class Dendrogram:
    """Merge list over cluster ids: leaves are 0..n-1, merge t creates id
    n + t. Costs are non-decreasing for Ward linkage."""

    n_leaves: int
    merges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if len(self.merges) != max(0, self.n_leaves - 1):
            raise ValueError("a full dendrogram has n - 1 merges")

    def cut(self, k: int) -> list[list[int]]:
        """Leaf index sets of the k clusters left after applying the first
        n - k merges, ordered by smallest member."""
        if not 1 <= k <= self.n_leaves:
            raise ValueError(f"k={k} outside [1, {self.n_leaves}]")
        members = {i: [i] for i in range(self.n_leaves)}
        for t, (a, b, _) in enumerate(self.merges[: self.n_leaves - k]):
            members[self.n_leaves + t] = members.pop(a) + members.pop(b)
        clusters = [sorted(v) for v in members.values()]
        return sorted(clusters, key=lambda c: c[0])


def hac_cluster(vectors: np.ndarray, cfg: ClusterConfig) -> Dendrogram:
    """Agglomerative clustering via the Lance-Williams recurrence with Ward
    coefficients over the configured base distance.

    At every step the pair with minimal current distance merges; exact ties
    go to the smallest (id_a, id_b) pair. Merging i and j into u gives, for
    any other cluster c,

        d(u, c) = ((n_i + n_c) d(i, c) + (n_j + n_c) d(j, c)
                   - n_c d(i, j)) / (n_i + n_j + n_c)
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] < 2:
        raise ValueError("hac_cluster needs at least 2 vectors")
    n = vectors.shape[0]
    total = 2 * n - 1
    D = np.full((total, total), np.inf)
    D[:n, :n] = base_distance_matrix(vectors, cfg.distance)
    np.fill_diagonal(D, np.inf)
    sizes = np.zeros(total, dtype=int)
    sizes[:n] = 1
    active = list(range(n))
    merges = []
    for t in range(n - 1):
        # active stays ascending, so the first flat minimum over the upper
        # triangle is the tie-break winner with the smallest (a, b) pair
        idx = np.array(active)
        iu = np.triu_indices(len(idx), k=1)
        flat = D[np.ix_(idx, idx)][iu]
        pos = int(np.argmin(flat))
        cost = float(flat[pos])
        a = int(idx[iu[0][pos]])
        b = int(idx[iu[1][pos]])
        u = n + t
        merges.append((a, b, cost))
        na, nb = sizes[a], sizes[b]
        for c in active:
            if c == a or c == b:
                continue
            nc = sizes[c]
            d_new = ((na + nc) * D[a, c] + (nb + nc) * D[b, c]
                     - nc * cost) / (na + nb + nc)
            D[u, c] = D[c, u] = d_new
        sizes[u] = na + nb
        active = [c for c in active if c != a and c != b] + [u]
    return Dendrogram(n_leaves=n, merges=tuple(merges))


def variance_ratio(vectors: np.ndarray, labels) -> float:
    """Calinski-Harabasz index (B / (k - 1)) / (W / (n - k)) in Euclidean
    geometry. W = 0 (all clusters collapse to points) returns +inf."""
    vectors = np.asarray(vectors, dtype=float)
    labels = np.asarray(labels)
    n = vectors.shape[0]
    uniq = np.unique(labels)
    k = uniq.size
    if not 2 <= k <= n - 1:
        raise ValueError(f"variance_ratio needs 2 <= k <= n - 1, got k={k}, n={n}")
    mean = vectors.mean(axis=0)
    between = 0.0
    within = 0.0
    for c in uniq:
        members = vectors[labels == c]
        centroid = members.mean(axis=0)
        between += members.shape[0] * float(np.sum((centroid - mean) ** 2))
        within += float(np.sum((members - centroid) ** 2))
    if within == 0.0:
        return float("inf")
    return (between / (k - 1)) / (within / (n - k))


@dataclass(frozen=True)
class PartitionChoice:
    labels: np.ndarray
    k: int
    scores: dict


def _labels_from_clusters(clusters: list[list[int]], n: int) -> np.ndarray:
    labels = np.empty(n, dtype=int)
    for cid, members in enumerate(clusters):
        labels[members] = cid
    return labels


def select_partition(dendrogram: Dendrogram, vectors: np.ndarray,
                     cfg: ClusterConfig) -> PartitionChoice:
    """Cut the dendrogram at every k in [k_min, min(k_max, n - 1)] and keep
    the cut with the highest variance ratio; equal scores go to the smaller
    k. With n <= 2 there is no valid k, so everything lands in one cluster
    without any score being computed."""
    vectors = np.asarray(vectors, dtype=float)
    n = dendrogram.n_leaves
    if vectors.shape[0] != n:
        raise ValueError("vectors do not match the dendrogram")
    k_hi = min(cfg.k_max, n - 1)
    if n <= 2 or k_hi < cfg.k_min:
        return PartitionChoice(labels=np.zeros(n, dtype=int), k=1, scores={})
    scores = {}
    best_k = None
    best_labels = None
    for k in range(cfg.k_min, k_hi + 1):
        labels = _labels_from_clusters(dendrogram.cut(k), n)
        score = variance_ratio(vectors, labels)
        scores[k] = score
        if best_k is None or score > scores[best_k]:
            best_k = k
            best_labels = labels
    return PartitionChoice(labels=best_labels, k=best_k, scores=scores)


# --- sense inventories ----------------------------------------------------

@dataclass
class Sense:
    sense_id: int
    centroid: np.ndarray
    objects: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.objects)


@dataclass
class SenseInventory:
    verb: str
    senses: list[Sense]
    dominant: int
    config_hash: str | None = None

    def sense(self, sense_id: int) -> Sense:
        for s in self.senses:
            if s.sense_id == sense_id:
                return s
        raise KeyError(f"sense {sense_id} not in inventory for {self.verb}")

    def validate(self, min_exemplars: int = 3):
        if not self.senses:
            raise ValueError("inventory has no senses")
        ids = [s.sense_id for s in self.senses]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate sense ids")
        if self.dominant not in ids:
            raise ValueError("dominant sense missing")
        if len(self.senses) > 1:
            for s in self.senses:
                if s.size < min_exemplars:
                    raise ValueError(
                        f"sense {s.sense_id} has {s.size} exemplars in a "
                        "multi-sense inventory")


def assign_object(object_vector: np.ndarray, inventory: SenseInventory) -> int:
    """Sense whose centroid has the highest cosine similarity to the object
    vector; ties go to the lowest sense id. A zero object vector cannot be
    compared and falls back to the dominant sense with a warning."""
    object_vector = np.asarray(object_vector, dtype=float)
    if not object_vector.any():
        logger.warning("zero object vector for %s, assigning dominant sense",
                       inventory.verb)
        return inventory.dominant
    best_id = None
    best_sim = -np.inf
    for s in sorted(inventory.senses, key=lambda s: s.sense_id):
        sim = cosine(object_vector, s.centroid)
        if sim > best_sim:
            best_sim = sim
            best_id = s.sense_id
    return best_id


def build_sense_inventory(verb: str, occurrences, space: SemanticSpace,
                          cfg: ClusterConfig) -> SenseInventory:
    """Cluster a verb's occurrence contexts and distribute its objects over
    the resulting senses.

    Occurrences whose context vector has no contributing token are dropped
    with a warning. Each object goes to the cluster holding the majority of
    its occurrences; ties go to the largest tied cluster and then to the
    lowest cluster id. Senses with fewer than cfg.min_exemplars objects are
    merged into the dominant sense (largest object count, lowest id on
    ties), and centroids are recomputed after merging.
    """
    occurrences = list(occurrences)
    if not occurrences:
        raise ValueError(f"no occurrences for verb {verb!r}")
    vectors = []
    kept = []
    dropped = 0
    for occ in occurrences:
        vec, contributing = context_vector(occ.sentence, occ.verb_position, space)
        if vec is None:
            dropped += 1
            continue
        vectors.append(vec)
        kept.append(occ)
    if dropped:
        logger.warning("%s: dropped %d occurrence(s) with empty context",
                       verb, dropped)
    if not kept:
        raise ValueError(f"every occurrence of {verb!r} had an empty context")
    vectors = np.vstack(vectors)
    n = len(kept)

    if n < 2:
        labels = np.zeros(n, dtype=int)
    else:
        dendrogram = hac_cluster(vectors, cfg)
        labels = select_partition(dendrogram, vectors, cfg).labels

    # object -> majority cluster; ties to the largest tied cluster, then id
    cluster_ids = sorted(set(labels.tolist()))
    cluster_sizes = {c: int(np.sum(labels == c)) for c in cluster_ids}
    per_object: dict[str, dict[int, int]] = {}
    for occ, label in zip(kept, labels):
        per_object.setdefault(occ.obj, {}).setdefault(int(label), 0)
        per_object[occ.obj][int(label)] += 1
    members: dict[int, list[str]] = {c: [] for c in cluster_ids}
    for obj in sorted(per_object):
        votes = per_object[obj]
        top = max(votes.values())
        tied = [c for c, v in votes.items() if v == top]
        chosen = min(tied, key=lambda c: (-cluster_sizes[c], c))
        members[chosen].append(obj)

    # merge undersized senses into the dominant one
    dominant = min(cluster_ids,
                   key=lambda c: (-len(members[c]), c))
    survivors = [c for c in cluster_ids
                 if c == dominant or len(members[c]) >= cfg.min_exemplars]
    for c in cluster_ids:
        if c not in survivors:
            members[dominant].extend(members[c])
            members[c] = []
    members[dominant].sort()

    # recompute centroids over the context vectors backing each object
    senses = []
    id_map = {c: i for i, c in enumerate(survivors)}
    for c in survivors:
        objs = tuple(members[c])
        obj_set = set(objs)
        rows = [vec for occ, vec in zip(kept, vectors) if occ.obj in obj_set]
        if rows:
            centroid = np.mean(rows, axis=0)
        else:
            centroid = vectors[labels == c].mean(axis=0)
        senses.append(Sense(sense_id=id_map[c], centroid=centroid, objects=objs))
    inventory = SenseInventory(verb=verb, senses=senses,
                               dominant=id_map[dominant])
    inventory.validate(cfg.min_exemplars)
    return inventory


# --- serialization ------------------------------------------------------

def write_inventory_json(inventory: SenseInventory, path,
                         config_hash: str | None = None):
    payload = {
        "verb": inventory.verb,
        "senses": [
            {
                "id": s.sense_id,
                "size": s.size,
                "centroid": [float(v) for v in s.centroid],
                "objects": list(s.objects),
            }
            for s in inventory.senses
        ],
        "dominant": inventory.dominant,
        "config_hash": config_hash if config_hash is not None
                       else inventory.config_hash,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_inventory_json(path) -> SenseInventory:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    senses = [Sense(sense_id=int(s["id"]),
                    centroid=np.array(s["centroid"], dtype=float),
                    objects=tuple(s["objects"]))
              for s in payload["senses"]]
    inventory = SenseInventory(verb=payload["verb"], senses=senses,
                               dominant=int(payload["dominant"]),
                               config_hash=payload.get("config_hash"))
    # structural checks only; the exemplar floor belongs to the builder
    inventory.validate(min_exemplars=1)
    return inventory
