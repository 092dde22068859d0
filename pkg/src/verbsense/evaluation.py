"""Evaluation protocols.

Two tasks. The supervised task trains, per cross-validation fold, one
ambiguous matrix on the union of a verb's two annotated sense sets and one
matrix per sense, then ranks each held-out phrase's holistic vector against
the composites of every dataset phrase. The similarity task scores phrase
pairs under each composition model and correlates the cosines with gold
scores by Spearman rho.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .compose import CompositionModel, HolisticMissError, compose, pair_similarity
from .corpus import CorpusFormatError, SemanticSpace, Token
from .holistic import HolisticPhraseSpace
from .metrics import (
    accuracy,
    cosine,
    mrr,
    paired_significance,
    rank_of_correct,
    rho_contrast_significance,
    spearman_rho,
)
from .regression import RegressionConfig, TrainingSet, closed_form, train_gd

SUPERVISED_MODELS = ("ambiguous_matrix", "disambiguated_matrix")


# --- datasets -------------------------------------------------------------

@dataclass(frozen=True)
class SenseAnnotatedVerb:
    """A verb with objects annotated as sense 1 or sense 2. The two object
    lists are disjoint."""

    verb: str
    sense1: tuple[str, ...]
    sense2: tuple[str, ...]

    def __post_init__(self):
        overlap = set(self.sense1) & set(self.sense2)
        if overlap:
            raise ValueError(
                f"{self.verb}: objects in both senses: {sorted(overlap)}")
        if not self.sense1 or not self.sense2:
            raise ValueError(f"{self.verb}: both senses need objects")

    def objects(self) -> tuple[str, ...]:
        return self.sense1 + self.sense2

    def sense_of(self, obj: str) -> int:
        if obj in self.sense1:
            return 1
        if obj in self.sense2:
            return 2
        raise KeyError(f"{obj!r} not annotated for {self.verb!r}")


def read_sense_dataset(path) -> list[SenseAnnotatedVerb]:
    """TSV rows verb<TAB>sense_id<TAB>object with sense_id 1 or 2."""
    by_verb: dict[str, tuple[list, list]] = {}
    order = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or parts[1] not in ("1", "2"):
                raise CorpusFormatError(
                    "expected verb<TAB>1|2<TAB>object", line_no)
            verb, sense, obj = parts
            if verb not in by_verb:
                by_verb[verb] = ([], [])
                order.append(verb)
            by_verb[verb][int(sense) - 1].append(obj)
    return [SenseAnnotatedVerb(verb=v, sense1=tuple(by_verb[v][0]),
                               sense2=tuple(by_verb[v][1])) for v in order]


def write_sense_dataset(entries, path):
    with open(path, "w", encoding="utf-8") as fh:
        for entry in entries:
            for obj in entry.sense1:
                fh.write(f"{entry.verb}\t1\t{obj}\n")
            for obj in entry.sense2:
                fh.write(f"{entry.verb}\t2\t{obj}\n")


@dataclass(frozen=True)
class PhrasePair:
    phrase_a: tuple[str, str]
    phrase_b: tuple[str, str]
    score: float


def read_phrase_sim_dataset(path) -> list[PhrasePair]:
    """TSV rows verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise CorpusFormatError(
                    "expected verb1<TAB>obj1<TAB>verb2<TAB>obj2<TAB>score",
                    line_no)
            try:
                score = float(parts[4])
            except ValueError:
                raise CorpusFormatError(f"bad score {parts[4]!r}", line_no) from None
            pairs.append(PhrasePair(phrase_a=(parts[0], parts[1]),
                                    phrase_b=(parts[2], parts[3]),
                                    score=score))
    return pairs


def write_phrase_sim_dataset(pairs, path):
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(f"{p.phrase_a[0]}\t{p.phrase_a[1]}\t{p.phrase_b[0]}\t"
                     f"{p.phrase_b[1]}\t{format(p.score, '.17g')}\n")


# --- cross-validation ------------------------------------------------------

@dataclass(frozen=True)
class Fold:
    train1: tuple[str, ...]
    test1: tuple[str, ...]
    train2: tuple[str, ...]
    test2: tuple[str, ...]


def _stable_int(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def _verb_rng(seed: int, verb: str, stream: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, _stable_int(verb), stream]))


def crossval_folds(entry: SenseAnnotatedVerb, folds: int = 4,
                   seed: int = 0) -> list[Fold]:
    """Shuffle each sense's object list with a seed derived from (seed,
    verb, sense) and split it into ``folds`` consecutive parts; fold i tests
    part i of both senses and trains on the rest. Every object appears in
    exactly one test part."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    parts = []
    for stream, objects in ((1, entry.sense1), (2, entry.sense2)):
        if len(objects) < folds:
            raise ValueError(
                f"{entry.verb} sense {stream} has {len(objects)} objects, "
                f"needs at least {folds}")
        order = list(objects)
        _verb_rng(seed, entry.verb, stream).shuffle(order)
        parts.append([tuple(p) for p in np.array_split(order, folds)])
    out = []
    for i in range(folds):
        test1, test2 = parts[0][i], parts[1][i]
        train1 = tuple(o for j, p in enumerate(parts[0]) if j != i for o in p)
        train2 = tuple(o for j, p in enumerate(parts[1]) if j != i for o in p)
        out.append(Fold(train1=train1, test1=test1,
                        train2=train2, test2=test2))
    return out


# --- reports ---------------------------------------------------------------

@dataclass
class EvalReport:
    task: str
    models: tuple[str, ...]
    overall: dict
    per_verb: dict | None = None
    per_fold: dict | None = None
    p_values: dict = field(default_factory=dict)
    per_pair: dict | None = None
    skipped: dict | None = None
    config_hash: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "task": self.task,
            "models": list(self.models),
            "overall": self.overall,
            "per_verb": self.per_verb,
            "per_fold": self.per_fold,
            "p_values": self.p_values,
            "per_pair": self.per_pair,
            "skipped": self.skipped,
            "config_hash": self.config_hash,
        }

    def write_json(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def write_supervised_tsv(report: EvalReport, path):
    """Flat mirror of the supervised results: verb x model rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("verb\tmodel\taccuracy\tmrr\tavg_cosine\n")
        blocks = dict(report.per_verb or {})
        blocks["ALL"] = report.overall
        for verb in list(report.per_verb or {}) + ["ALL"]:
            for model in report.models:
                m = blocks[verb][model]
                fh.write(f"{verb}\t{model}\t{m['accuracy']:.6f}\t"
                         f"{m['mrr']:.6f}\t{m['avg_cosine']:.6f}\n")


def write_similarity_tsv(report: EvalReport, path):
    """Flat mirror of the similarity results: one model per row."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("model\tspearman_rho\tpairs\tskipped\n")
        for model in report.models:
            m = report.overall[model]
            skipped = (report.skipped or {}).get(model, 0)
            fh.write(f"{model}\t{m['spearman_rho']:.6f}\t"
                     f"{m['pairs']}\t{skipped}\n")


def _metric_block(ranks, cosines) -> dict:
    block = {
        "accuracy": accuracy(ranks),
        "mrr": mrr(ranks),
        "avg_cosine": float(np.mean(cosines)),
    }
    if not 0.0 <= block["accuracy"] <= block["mrr"] <= 1.0:
        raise AssertionError(f"metric sanity violated: {block}")
    if not -1.0 - 1e-12 <= block["avg_cosine"] <= 1.0 + 1e-12:
        raise AssertionError(f"avg_cosine out of range: {block}")
    return block


# --- supervised task -------------------------------------------------------

def _train(ts: TrainingSet, reg_cfg: RegressionConfig, trainer: str,
           verb: str, sense_id=None):
    if trainer == "gd":
        return train_gd(ts, reg_cfg, verb=verb, sense_id=sense_id)
    if trainer == "closed_form":
        return closed_form(ts, reg_cfg.lam, verb=verb, sense_id=sense_id)
    raise ValueError(f"unknown trainer {trainer!r}")


def build_training_set(objects, word_space: SemanticSpace,
                       holistic_space: HolisticPhraseSpace,
                       verb: str) -> TrainingSet:
    """Stack object vectors and holistic phrase vectors for a verb. Objects
    are sorted so a given object set always produces identical rows."""
    objs = tuple(sorted(objects))
    X = np.vstack([word_space.vector(Token(o, "N")) for o in objs])
    Y = np.vstack([holistic_space.vector((verb, o)) for o in objs])
    return TrainingSet(X=X, Y=Y, objects=objs)


def _check_coverage(dataset, word_space, holistic_space):
    missing_words = []
    missing_phrases = []
    for entry in dataset:
        for obj in entry.objects():
            if Token(obj, "N") not in word_space:
                missing_words.append(obj)
            if (entry.verb, obj) not in holistic_space:
                missing_phrases.append((entry.verb, obj))
    if missing_words or missing_phrases:
        raise ValueError(
            "dataset not covered by the spaces; missing word vectors: "
            f"{sorted(set(missing_words))}, missing holistic vectors: "
            f"{sorted(set(missing_phrases))}")


def run_supervised_task(dataset, word_space: SemanticSpace,
                        holistic_space: HolisticPhraseSpace,
                        reg_cfg: RegressionConfig, seed: int = 0,
                        folds: int = 4, trainer: str = "gd",
                        config_hash: str | None = None) -> EvalReport:
    """Cross-validated holistic-approximation ranking.

    Per fold and verb, an ambiguous matrix is trained on the union of both
    training sense sets and one matrix per sense on each set alone. Every
    held-out phrase's holistic vector is then ranked against the composite
    vectors of all dataset phrases under the same model, and the cosine to
    its own composite is recorded. The significance entry is a paired
    permutation test between the two models' per-phrase cosines.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("empty dataset")
    _check_coverage(dataset, word_space, holistic_space)
    fold_plan = {e.verb: crossval_folds(e, folds=folds, seed=seed)
                 for e in dataset}

    ranks: dict[str, dict[str, list]] = {m: {} for m in SUPERVISED_MODELS}
    cosines: dict[str, dict[tuple, float]] = {m: {} for m in SUPERVISED_MODELS}
    fold_ranks = {m: [[] for _ in range(folds)] for m in SUPERVISED_MODELS}
    fold_cos = {m: [[] for _ in range(folds)] for m in SUPERVISED_MODELS}

    for f in range(folds):
        # fold matrices for every verb
        amb: dict[str, object] = {}
        per_sense: dict[tuple, object] = {}
        for entry in dataset:
            fold = fold_plan[entry.verb][f]
            union = fold.train1 + fold.train2
            amb[entry.verb] = _train(
                build_training_set(union, word_space, holistic_space, entry.verb),
                reg_cfg, trainer, entry.verb)
            per_sense[(entry.verb, 1)] = _train(
                build_training_set(fold.train1, word_space, holistic_space,
                                   entry.verb),
                reg_cfg, trainer, entry.verb, sense_id=1)
            per_sense[(entry.verb, 2)] = _train(
                build_training_set(fold.train2, word_space, holistic_space,
                                   entry.verb),
                reg_cfg, trainer, entry.verb, sense_id=2)

        # candidate pool: composites of every dataset phrase under the model
        pools = {m: [] for m in SUPERVISED_MODELS}
        for entry in dataset:
            for obj in entry.objects():
                x = word_space.vector(Token(obj, "N"))
                key = (entry.verb, obj)
                pools["ambiguous_matrix"].append(
                    (key, amb[entry.verb].W @ x))
                pools["disambiguated_matrix"].append(
                    (key, per_sense[(entry.verb, entry.sense_of(obj))].W @ x))
        pool_index = {m: dict(pools[m]) for m in SUPERVISED_MODELS}

        for entry in dataset:
            fold = fold_plan[entry.verb][f]
            for obj in fold.test1 + fold.test2:
                key = (entry.verb, obj)
                target = holistic_space.vector(key)
                for m in SUPERVISED_MODELS:
                    r = rank_of_correct(target, pools[m], key)
                    c = cosine(target, pool_index[m][key])
                    ranks[m].setdefault(entry.verb, []).append(r)
                    cosines[m][key] = c
                    fold_ranks[m][f].append(r)
                    fold_cos[m][f].append(c)

    per_verb = {}
    for entry in dataset:
        per_verb[entry.verb] = {}
        for m in SUPERVISED_MODELS:
            verb_keys = [(entry.verb, o) for o in entry.objects()]
            per_verb[entry.verb][m] = _metric_block(
                ranks[m][entry.verb], [cosines[m][k] for k in verb_keys])
    all_keys = sorted(cosines[SUPERVISED_MODELS[0]])
    overall = {}
    for m in SUPERVISED_MODELS:
        all_ranks = [r for v in ranks[m].values() for r in v]
        overall[m] = _metric_block(all_ranks,
                                   [cosines[m][k] for k in all_keys])
    per_fold = {}
    for f in range(folds):
        per_fold[f"fold{f}"] = {
            m: _metric_block(fold_ranks[m][f], fold_cos[m][f])
            for m in SUPERVISED_MODELS
        }

    p_values = {
        "ambiguous_vs_disambiguated_avg_cosine": paired_significance(
            [cosines["ambiguous_matrix"][k] for k in all_keys],
            [cosines["disambiguated_matrix"][k] for k in all_keys],
            seed=seed),
    }
    for entry in dataset:
        verb_keys = [(entry.verb, o) for o in entry.objects()]
        p_values[f"{entry.verb}_avg_cosine"] = paired_significance(
            [cosines["ambiguous_matrix"][k] for k in verb_keys],
            [cosines["disambiguated_matrix"][k] for k in verb_keys],
            seed=seed)

    per_pair = {
        m: {f"{v} {o}": cosines[m][(v, o)] for v, o in all_keys}
        for m in SUPERVISED_MODELS
    }
    return EvalReport(task="supervised", models=SUPERVISED_MODELS,
                      overall=overall, per_verb=per_verb, per_fold=per_fold,
                      p_values=p_values, per_pair=per_pair,
                      config_hash=config_hash)


# --- similarity task -------------------------------------------------------

def run_similarity_task(dataset, models: dict[str, CompositionModel],
                        seed: int = 0,
                        config_hash: str | None = None) -> EvalReport:
    """Spearman correlation between model cosines and gold scores.

    Pairs whose phrases miss the holistic space are excluded for that model
    only. Any other missing resource is an error. Needs at least 2 scorable
    pairs per model.
    """
    dataset = list(dataset)
    if not dataset:
        raise ValueError("empty dataset")
    values: dict[str, dict[int, float]] = {}
    skipped: dict[str, int] = {}
    for name, model in models.items():
        scores: dict[int, float] = {}
        misses = 0
        for i, pair in enumerate(dataset):
            try:
                sim = pair_similarity(model, pair.phrase_a, pair.phrase_b)
            except HolisticMissError:
                misses += 1
                continue
            scores[i] = sim.value
        if len(scores) < 2:
            raise ValueError(
                f"model {name!r} has {len(scores)} scorable pairs, needs 2")
        values[name] = scores
        skipped[name] = misses

    overall = {}
    for name, scores in values.items():
        idx = sorted(scores)
        overall[name] = {
            "spearman_rho": spearman_rho([scores[i] for i in idx],
                                         [dataset[i].score for i in idx]),
            "pairs": len(idx),
        }

    p_values = {}
    if ("ambiguous_matrix" in values and "disambiguated_matrix" in values):
        shared = sorted(set(values["ambiguous_matrix"])
                        & set(values["disambiguated_matrix"]))
        a = [values["ambiguous_matrix"][i] for i in shared]
        b = [values["disambiguated_matrix"][i] for i in shared]
        gold = [dataset[i].score for i in shared]
        p_values["ambiguous_vs_disambiguated_cosine"] = paired_significance(
            a, b, seed=seed)
        p_values["ambiguous_vs_disambiguated_rho"] = rho_contrast_significance(
            gold, a, b, seed=seed)

    per_pair = {name: {str(i): v for i, v in sorted(scores.items())}
                for name, scores in values.items()}
    return EvalReport(task="similarity", models=tuple(values),
                      overall=overall, p_values=p_values, per_pair=per_pair,
                      skipped=skipped, config_hash=config_hash)
