"""Synthetic corpus generator with planted verb senses.

The generator plants a ground-truth structure and then writes an ordinary
corpus realizing it, so the full pipeline can be exercised end to end:

* every object noun gets a planted descriptor profile, a mixture of its
  sense's prototype and an individual component, realized through identity
  sentences that surround the noun with shared descriptor adjectives;
* every verb sense owns a context vocabulary (overlapping across the senses
  of a verb according to the disjointness level) and a sense-specific
  generating map; a phrase sentence surrounds the verb with context words
  drawn from the map applied to the object's profile plus Gaussian noise;
* phrase sentences keep the object token away from the context words, so
  object vectors are built only from identity sentences while holistic
  phrase vectors see the sense-specific context.

Ground-truth sense labels, a sense-annotated dataset, and a phrase-pair
similarity dataset with planted gold scores are emitted alongside.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .corpus import Token
from .evaluation import (
    PhrasePair,
    SenseAnnotatedVerb,
    write_phrase_sim_dataset,
    write_sense_dataset,
)
from .holistic import RelationOccurrence

# benchmark noise levels on the generator's scale; MID is the reference
# point used by the planted-sense benchmarks
NOISE_LEVELS = {"none": 0.0, "mid": 0.5, "high": 1.0}


@dataclass(frozen=True)
class SyntheticSpec:
    n_verbs: int = 5
    senses_per_verb: int = 2
    objects_per_sense: int = 16
    context_words_per_sense: int = 12
    descriptor_vocab: int = 24
    descriptors_per_object: int = 6
    object_individuality: float = 1.0
    identity_sentences_per_object: int = 8
    identity_sentence_words: int = 8
    phrase_occurrences: int = 12
    phrase_context_words: int = 8
    map_row_support: int = 3
    disjointness: float = 1.0
    noise: float = NOISE_LEVELS["mid"]
    shared_sense_map: bool = False
    similarity_pairs: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.n_verbs < 1 or self.senses_per_verb < 1:
            raise ValueError("need at least one verb and one sense")
        if self.objects_per_sense < 4:
            raise ValueError("objects_per_sense must be >= 4")
        if not 0.0 <= self.disjointness <= 1.0:
            raise ValueError("disjointness must be in [0, 1]")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if self.object_individuality < 0:
            raise ValueError("object_individuality must be >= 0")
        if not 1 <= self.identity_sentence_words <= 10:
            raise ValueError("identity_sentence_words must be in [1, 10]")
        if not 1 <= self.phrase_context_words <= 10:
            raise ValueError("phrase_context_words must be in [1, 10]")
        if self.descriptors_per_object > self.descriptor_vocab:
            raise ValueError("descriptors_per_object exceeds descriptor_vocab")
        if self.map_row_support > self.descriptor_vocab:
            raise ValueError("map_row_support exceeds descriptor_vocab")


@dataclass
class SyntheticData:
    spec: SyntheticSpec
    corpus: list
    relations: list
    sense_dataset: list
    sim_pairs: list
    truth: dict


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer counts summing to ``total`` proportional to ``weights``;
    leftover units go to the largest fractional parts, lower index first."""
    w = np.maximum(np.asarray(weights, dtype=float), 0.0)
    s = w.sum()
    if s <= 0:
        w = np.ones_like(w)
        s = w.sum()
    quota = w * (total / s)
    base = np.floor(quota).astype(int)
    short = total - int(base.sum())
    if short > 0:
        frac = quota - base
        order = np.argsort(-frac, kind="stable")
        base[order[:short]] += 1
    return base


def _flat_tokens(tokens, counts) -> list:
    out = []
    for tok, n in zip(tokens, counts):
        out.extend([tok] * int(n))
    return out


PAD = Token("pad", "O")


def generate_synthetic(spec: SyntheticSpec) -> SyntheticData:
    """Build the corpus, relation records, datasets, and truth labels for a
    planted-sense benchmark. Deterministic given spec.seed."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    n_ctx = spec.context_words_per_sense
    descriptors = [Token(f"attr{k:02d}", "J")
                   for k in range(spec.descriptor_vocab)]

    verbs = [f"verb{v:02d}" for v in range(spec.n_verbs)]
    ctx_vocab: dict[tuple[int, int], list[Token]] = {}
    maps: dict[tuple[int, int], np.ndarray] = {}
    prototypes: dict[tuple[int, int], np.ndarray] = {}
    objects: dict[tuple[int, int], list[str]] = {}
    profiles: dict[str, np.ndarray] = {}

    n_private = round(spec.disjointness * n_ctx)
    n_shared = n_ctx - n_private
    for v in range(spec.n_verbs):
        shared = [Token(f"ctx_v{v:02d}sh{j:02d}", "J") for j in range(n_shared)]
        shared_map = None
        for s in range(spec.senses_per_verb):
            private = [Token(f"ctx_v{v:02d}s{s}p{j:02d}", "J")
                       for j in range(n_private)]
            ctx_vocab[(v, s)] = shared + private
            # sense-specific generating map, rows sparse over descriptors
            M = np.zeros((n_ctx, spec.descriptor_vocab))
            if spec.shared_sense_map and shared_map is not None:
                M = shared_map.copy()
            else:
                for r in range(n_ctx):
                    support = rng.choice(spec.descriptor_vocab,
                                         size=spec.map_row_support,
                                         replace=False)
                    M[r, support] = rng.exponential(1.0, spec.map_row_support)
                if spec.shared_sense_map:
                    shared_map = M
            maps[(v, s)] = M
            prototypes[(v, s)] = rng.exponential(1.0, spec.descriptor_vocab)
            objects[(v, s)] = [f"obj_v{v:02d}s{s}n{j:02d}"
                               for j in range(spec.objects_per_sense)]
            for obj in objects[(v, s)]:
                indiv = np.zeros(spec.descriptor_vocab)
                support = rng.choice(spec.descriptor_vocab,
                                     size=spec.descriptors_per_object,
                                     replace=False)
                indiv[support] = rng.exponential(1.0, spec.descriptors_per_object)
                proto = prototypes[(v, s)]
                u = (proto / proto.sum()
                     + spec.object_individuality * indiv / indiv.sum())
                profiles[obj] = u / u.sum()

    corpus: list[list[Token]] = []
    relations: list[RelationOccurrence] = []

    # identity sentences: the object surrounded by its descriptor profile
    per = spec.identity_sentence_words
    n_id = spec.identity_sentences_per_object
    for v in range(spec.n_verbs):
        for s in range(spec.senses_per_verb):
            for obj in objects[(v, s)]:
                counts = _largest_remainder(profiles[obj], per * n_id)
                flat = _flat_tokens(descriptors, counts)
                for i in range(n_id):
                    chunk = flat[i::n_id]
                    mid = len(chunk) // 2
                    corpus.append(chunk[:mid] + [Token(obj, "N")] + chunk[mid:])

    # phrase sentences: context words hug the verb; pads keep the object
    # token outside every context word's window
    w_ctx = spec.phrase_context_words
    left = w_ctx // 2
    pads = [PAD] * 6
    for v in range(spec.n_verbs):
        for s in range(spec.senses_per_verb):
            M = maps[(v, s)]
            vocab = ctx_vocab[(v, s)]
            for obj in objects[(v, s)]:
                profile = M @ profiles[obj]
                profile = profile / profile.sum()
                for _ in range(spec.phrase_occurrences):
                    q = profile
                    if spec.noise > 0:
                        eps = rng.normal(0.0, 1.0, n_ctx)
                        q = np.maximum(profile + spec.noise * eps / n_ctx, 0.0)
                        if q.sum() <= 0:
                            q = profile
                    counts = _largest_remainder(q, w_ctx)
                    flat = _flat_tokens(vocab, counts)
                    sentence = (flat[:left] + [Token(verbs[v], "V")]
                                + flat[left:] + pads + [Token(obj, "N")])
                    relations.append(RelationOccurrence(
                        verb=verbs[v], obj=obj, sentence_index=len(corpus),
                        verb_position=left,
                        object_position=len(sentence) - 1))
                    corpus.append(sentence)

    sense_dataset = []
    if spec.senses_per_verb == 2:
        sense_dataset = [
            SenseAnnotatedVerb(verb=verbs[v],
                               sense1=tuple(objects[(v, 0)]),
                               sense2=tuple(objects[(v, 1)]))
            for v in range(spec.n_verbs)
        ]

    sim_pairs = _similarity_pairs(spec, rng, verbs, objects, ctx_vocab,
                                  maps, profiles)

    truth = {
        "verbs": {
            verbs[v]: {
                "senses": {
                    str(s): {
                        "objects": list(objects[(v, s)]),
                        "context_vocab": [f"{t.lemma}|{t.pos}"
                                          for t in ctx_vocab[(v, s)]],
                    }
                    for s in range(spec.senses_per_verb)
                }
            }
            for v in range(spec.n_verbs)
        },
        "spec": asdict(spec),
    }
    return SyntheticData(spec=spec, corpus=corpus, relations=relations,
                         sense_dataset=sense_dataset, sim_pairs=sim_pairs,
                         truth=truth)


def _ideal_phrase_vector(vs_key, obj, ctx_vocab, maps, profiles,
                         ctx_index) -> np.ndarray:
    g = np.zeros(len(ctx_index))
    local = maps[vs_key] @ profiles[obj]
    for tok, value in zip(ctx_vocab[vs_key], local):
        g[ctx_index[tok]] += value
    return g


def _similarity_pairs(spec, rng, verbs, objects, ctx_vocab, maps, profiles):
    """Sample phrase pairs in three equally sized strata (same verb and
    sense, same verb across senses, different verbs) so the gold scores span
    high, low, and near-zero similarity. Scores are cosines of the noiseless
    planted context profiles over the global context vocabulary."""
    all_ctx = []
    seen = set()
    for key in sorted(ctx_vocab):
        for tok in ctx_vocab[key]:
            if tok not in seen:
                seen.add(tok)
                all_ctx.append(tok)
    ctx_index = {tok: i for i, tok in enumerate(all_ctx)}

    phrases = []
    for v in range(spec.n_verbs):
        for s in range(spec.senses_per_verb):
            for obj in objects[(v, s)]:
                phrases.append(((v, s), obj))
    same_sense = []
    cross_sense = []
    cross_verb = []
    for i in range(len(phrases)):
        for j in range(i + 1, len(phrases)):
            (va, sa), _ = phrases[i]
            (vb, sb), _ = phrases[j]
            if va != vb:
                cross_verb.append((i, j))
            elif sa != sb:
                cross_sense.append((i, j))
            else:
                same_sense.append((i, j))

    quotas = _largest_remainder(np.ones(3), spec.similarity_pairs)
    chosen: list[tuple[int, int]] = []
    for stratum, quota in zip((same_sense, cross_sense, cross_verb), quotas):
        quota = min(int(quota), len(stratum))
        if quota:
            picks = rng.choice(len(stratum), size=quota, replace=False)
            chosen.extend(stratum[int(p)] for p in sorted(picks))

    pairs = []
    for i, j in chosen:
        (vs_a, obj_a), (vs_b, obj_b) = phrases[i], phrases[j]
        ga = _ideal_phrase_vector(vs_a, obj_a, ctx_vocab, maps, profiles,
                                  ctx_index)
        gb = _ideal_phrase_vector(vs_b, obj_b, ctx_vocab, maps, profiles,
                                  ctx_index)
        denom = np.linalg.norm(ga) * np.linalg.norm(gb)
        score = float(ga @ gb / denom) if denom > 0 else 0.0
        pairs.append(PhrasePair(phrase_a=(verbs[vs_a[0]], obj_a),
                                phrase_b=(verbs[vs_b[0]], obj_b),
                                score=score))
    return pairs


# --- file emission --------------------------------------------------------

def write_corpus(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for sentence in corpus:
            fh.write(" ".join(f"{t.lemma}|{t.pos}" for t in sentence) + "\n")


def write_relations(relations, path):
    with open(path, "w", encoding="utf-8") as fh:
        for occ in relations:
            fh.write(f"{occ.verb}\t{occ.obj}\t{occ.sentence_index}\t"
                     f"{occ.verb_position}\t{occ.object_position}\n")


def write_truth(truth: dict, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")


def desk_config_text(spec: SyntheticSpec, svd_dim: int = 24,
                     holistic_svd_dim: int = 64, lam: float = 0.001,
                     seed: int | None = None) -> str:
    """A ready-to-run pipeline configuration matched to the generated corpus
    scale; paths are relative to the config file's directory.

    The word-space dimensionality is deliberately smaller than the union of
    a two-sense verb's training objects, so a single ambiguous matrix is an
    overdetermined fit forced to compromise between the senses, while each
    per-sense matrix still has enough dimensions to fit its sense cleanly.
    """
    seed = spec.seed if seed is None else seed
    return "\n".join([
        "# generated alongside a synthetic corpus",
        f"seed = {seed}",
        "paths.corpus = corpus.txt",
        "paths.stop_list = stop.txt",
        "paths.relations = relations.tsv",
        "paths.artifacts = artifacts",
        "paths.supervised_dataset = supervised.tsv",
        "paths.similarity_dataset = similarity.tsv",
        "space.window = 5",
        "space.basis_size = 100000",
        "space.top_exclusions = 0",
        "space.min_occurrences = 1",
        f"space.svd_dim = {svd_dim}",
        "space.clip_negative_lmi = false",
        f"holistic.min_phrase_count = {spec.phrase_occurrences}",
        f"holistic.svd_dim = {holistic_svd_dim}",
        f"regression.lambda = {format(lam, '.17g')}",
        "regression.learning_rate = 0.5",
        "regression.max_iters = 4000",
        "regression.tol = 1e-9",
        "regression.init = zero",
        "regression.mode = full_batch",
        "cluster.distance = pearson",
        "cluster.k_max = 10",
        "cluster.min_exemplars = 3",
        "",
    ])


def write_synthetic(data: SyntheticData, out_dir, svd_dim: int = 24):
    """Emit corpus.txt, stop.txt, relations.tsv, supervised.tsv,
    similarity.tsv, truth.json, and pipeline.cfg under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_corpus(data.corpus, out / "corpus.txt")
    (out / "stop.txt").write_text("", encoding="utf-8")
    write_relations(data.relations, out / "relations.tsv")
    if data.sense_dataset:
        write_sense_dataset(data.sense_dataset, out / "supervised.tsv")
    else:
        (out / "supervised.tsv").write_text("", encoding="utf-8")
    write_phrase_sim_dataset(data.sim_pairs, out / "similarity.tsv")
    write_truth(data.truth, out / "truth.json")
    (out / "pipeline.cfg").write_text(desk_config_text(data.spec, svd_dim),
                                      encoding="utf-8")
    return out / "pipeline.cfg"
