"""Pipeline orchestration and the on-disk artifact layout.

The command line and the experiment scripts both go through this module, so
every stage has two faces: an in-memory function working on parsed objects,
and load/store helpers that read and write the artifact files with the
configuration hash stamped in for provenance checks.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError, PipelineConfig, config_hash
from .corpus import (
    SemanticSpace,
    SpaceConfig,
    Token,
    Vocabulary,
    count_cooccurrences,
    build_vocabulary,
    format_word_key,
    normalize_rows,
    parse_word_key,
    read_corpus,
    read_space_tsv,
    read_stoplist,
    reduce_svd,
    weight_lmi,
    write_space_tsv,
)
from .evaluation import build_training_set
from .holistic import (
    HolisticPhraseSpace,
    build_holistic_vectors,
    collect_phrases,
    format_phrase_key,
    parse_phrase_key,
    read_relations,
    validate_relations,
)
from .regression import (
    RegressionConfig,
    VerbMatrix,
    closed_form,
    read_matrix_tsv,
    train_gd,
    write_matrix_tsv,
)
from .senses import (
    ClusterConfig,
    SenseInventory,
    VerbOccurrence,
    build_sense_inventory,
    read_inventory_json,
    write_inventory_json,
)

logger = logging.getLogger(__name__)


class MissingArtifactError(FileNotFoundError):
    """A stage needs an artifact that an earlier stage has not produced."""


class HashMismatchError(ConfigError):
    """An artifact on disk was produced under a different configuration."""


def par_map(fn, items, jobs: int = 1) -> list:
    """Order-preserving map; jobs > 1 fans out over a thread pool (the heavy
    numpy kernels release the GIL), jobs <= 1 stays strictly sequential."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# --- artifact layout -------------------------------------------------------

@dataclass(frozen=True)
class ArtifactLayout:
    root: Path

    def __post_init__(self):
        object.__setattr__(self, "root", Path(self.root))

    @property
    def space_tsv(self) -> Path:
        return self.root / "space.tsv"

    @property
    def vocab_json(self) -> Path:
        return self.root / "vocab.json"

    @property
    def space_manifest(self) -> Path:
        return self.root / "space.manifest.json"

    @property
    def holistic_tsv(self) -> Path:
        return self.root / "holistic.tsv"

    @property
    def holistic_manifest(self) -> Path:
        return self.root / "holistic.manifest.json"

    @property
    def senses_dir(self) -> Path:
        return self.root / "senses"

    def sense_json(self, verb: str) -> Path:
        return self.senses_dir / f"{verb}.json"

    @property
    def matrices_dir(self) -> Path:
        return self.root / "matrices"

    def matrix_tsv(self, verb: str, sense_id: int | None) -> Path:
        tag = "ambiguous" if sense_id is None else f"sense{sense_id}"
        return self.matrices_dir / f"{verb}.{tag}.tsv"

    @property
    def reports_dir(self) -> Path:
        return self.root / "reports"


def require(path: Path, hint: str) -> Path:
    if not Path(path).exists():
        raise MissingArtifactError(f"{path} is missing; run {hint!r} first")
    return Path(path)


def check_hash(expected: str, found: str | None, what: str, force: bool = False):
    """Refuse to mix artifacts produced under different configurations."""
    if found is None or found == expected:
        return
    message = (f"{what} was built under configuration {found}, current "
               f"configuration is {expected}; rebuild it or pass --force")
    if force:
        logger.warning("%s (continuing under --force)", message)
        return
    raise HashMismatchError(message)


# --- stage: word space -----------------------------------------------------

def build_word_space(corpus, cfg: SpaceConfig,
                     stop: frozenset = frozenset()):
    """Vocabulary selection, windowed counts, LMI weighting, row
    normalization, and SVD reduction in one pass. The reduction order is
    clamped to the matrix shape so small corpora stay buildable."""
    vocab = build_vocabulary(corpus, cfg, stop)
    counts = count_cooccurrences(corpus, vocab, cfg)
    space = normalize_rows(weight_lmi(counts, cfg))
    k = min(cfg.svd_dim, len(vocab.targets), len(vocab.basis))
    return reduce_svd(space, k), vocab


def write_vocab_json(vocab: Vocabulary, path, cfg_hash: str | None = None):
    payload = {
        "targets": [format_word_key(t) for t in vocab.targets],
        "basis": [format_word_key(t) for t in vocab.basis],
        "stop": sorted(vocab.stop),
        "frequencies": {format_word_key(t): n
                        for t, n in vocab.frequencies.items()},
        "config_hash": cfg_hash,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_vocab_json(path) -> tuple[Vocabulary, str | None]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    vocab = Vocabulary(
        targets=tuple(parse_word_key(t) for t in payload["targets"]),
        basis=tuple(parse_word_key(t) for t in payload["basis"]),
        stop=frozenset(payload["stop"]),
        frequencies={parse_word_key(t): n
                     for t, n in payload["frequencies"].items()},
    )
    return vocab, payload.get("config_hash")


# --- stage: sense induction ------------------------------------------------

def collect_verb_occurrences(corpus, relations) -> dict[str, list[VerbOccurrence]]:
    """Group relation records into per-verb occurrence lists carrying the
    full sentence, ready for context clustering."""
    validate_relations(relations, corpus)
    grouped: dict[str, list[VerbOccurrence]] = {}
    for occ in relations:
        grouped.setdefault(occ.verb, []).append(VerbOccurrence(
            sentence=tuple(corpus[occ.sentence_index]),
            verb_position=occ.verb_position,
            obj=occ.obj,
        ))
    return grouped


def induce_inventories(occurrences_by_verb, space: SemanticSpace,
                       cfg: ClusterConfig, jobs: int = 1,
                       cfg_hash: str | None = None) -> dict[str, SenseInventory]:
    verbs = sorted(occurrences_by_verb)

    def one(verb: str) -> SenseInventory:
        inv = build_sense_inventory(verb, occurrences_by_verb[verb], space, cfg)
        inv.config_hash = cfg_hash
        return inv

    return {inv.verb: inv for inv in par_map(one, verbs, jobs)}


# --- stage: matrix training ------------------------------------------------

def _dispatch_train(ts, reg_cfg: RegressionConfig, trainer: str, verb: str,
                    sense_id: int | None) -> VerbMatrix:
    if trainer == "gd":
        return train_gd(ts, reg_cfg, verb=verb, sense_id=sense_id)
    if trainer == "closed_form":
        return closed_form(ts, reg_cfg.lam, verb=verb, sense_id=sense_id)
    raise ValueError(f"unknown trainer {trainer!r}")


def ambiguous_plan(inventories) -> list[tuple[str, None, tuple[str, ...]]]:
    """One training job per verb over the union of all its sense objects."""
    plan = []
    for verb in sorted(inventories):
        objects = sorted({o for s in inventories[verb].senses
                          for o in s.objects})
        plan.append((verb, None, tuple(objects)))
    return plan


def sense_plan(inventories) -> list[tuple[str, int, tuple[str, ...]]]:
    """One training job per induced sense."""
    plan = []
    for verb in sorted(inventories):
        for s in sorted(inventories[verb].senses, key=lambda s: s.sense_id):
            plan.append((verb, s.sense_id, tuple(s.objects)))
    return plan


def train_matrices(plan, word_space: SemanticSpace,
                   holistic: HolisticPhraseSpace, reg_cfg: RegressionConfig,
                   trainer: str = "gd", jobs: int = 1,
                   cfg_hash: str | None = None) -> dict:
    """Run the training plan; keys of the result are (verb, sense_id) with
    sense_id None for ambiguous matrices."""

    def one(item):
        verb, sense_id, objects = item
        if not objects:
            raise ValueError(f"no training objects for {verb!r}/{sense_id!r}")
        ts = build_training_set(objects, word_space, holistic, verb)
        vm = _dispatch_train(ts, reg_cfg, trainer, verb, sense_id)
        vm.config_hash = cfg_hash
        return vm

    trained = par_map(one, list(plan), jobs)
    return {(vm.verb, vm.sense_id): vm for vm in trained}


# --- whole-pipeline snapshot ------------------------------------------------

@dataclass
class PipelineState:
    """Every product of a full in-memory run."""

    cfg: PipelineConfig
    cfg_hash: str
    corpus: list
    vocab: Vocabulary
    word_space: SemanticSpace
    holistic: HolisticPhraseSpace | None = None
    inventories: dict | None = None
    matrices: dict | None = None


def run_pipeline(cfg: PipelineConfig, corpus=None, relations=None,
                 stop: frozenset | None = None, jobs: int = 1,
                 trainer: str = "gd", with_senses: bool = True,
                 with_matrices: bool = True) -> PipelineState:
    """Run every stage in memory. Corpus, relations, and stop words can be
    passed directly (e.g. fresh from the synthetic generator) or are read
    from the configured paths; configured paths are only touched for the
    pieces not passed in."""
    cfg_hash = config_hash(cfg)
    if corpus is None:
        corpus = read_corpus(cfg.resolve(cfg.paths.corpus))
        if stop is None and cfg.paths.stop_list:
            stop = read_stoplist(cfg.resolve(cfg.paths.stop_list))
    stop = frozenset() if stop is None else stop
    word_space, vocab = build_word_space(corpus, cfg.space, stop)
    state = PipelineState(cfg=cfg, cfg_hash=cfg_hash, corpus=corpus,
                          vocab=vocab, word_space=word_space)

    if relations is None and cfg.paths.relations:
        relations = read_relations(cfg.resolve(cfg.paths.relations))
    if relations is None:
        return state

    inventory = collect_phrases(relations, cfg.holistic.min_phrase_count)
    state.holistic = build_holistic_vectors(
        corpus, inventory, vocab, cfg.space, svd_dim=cfg.holistic_svd_dim)

    if with_senses:
        occurrences = collect_verb_occurrences(corpus, relations)
        state.inventories = induce_inventories(
            occurrences, word_space, cfg.cluster, jobs=jobs, cfg_hash=cfg_hash)

    if with_matrices and state.inventories is not None:
        plan = ambiguous_plan(state.inventories) + sense_plan(state.inventories)
        trainable = []
        for verb, sense_id, objects in plan:
            covered = tuple(o for o in objects
                            if Token(o, "N") in word_space
                            and (verb, o) in state.holistic)
            if len(covered) < len(objects):
                logger.warning("%s/%s: %d of %d objects lack vectors, skipped",
                               verb, sense_id, len(objects) - len(covered),
                               len(objects))
            if covered:
                trainable.append((verb, sense_id, covered))
        state.matrices = train_matrices(
            trainable, word_space, state.holistic, cfg.regression,
            trainer=trainer, jobs=jobs, cfg_hash=cfg_hash)
    return state


# --- artifact store --------------------------------------------------------

def save_word_space(layout: ArtifactLayout, space: SemanticSpace,
                    vocab: Vocabulary, cfg_hash: str,
                    extra_manifest: dict | None = None):
    layout.root.mkdir(parents=True, exist_ok=True)
    write_space_tsv(space, layout.space_tsv, format_word_key,
                    config_hash=cfg_hash)
    write_vocab_json(vocab, layout.vocab_json, cfg_hash)
    manifest = {
        "config_hash": cfg_hash,
        "rows": len(space.keys),
        "dim": space.dim,
        "targets": len(vocab.targets),
        "basis": len(vocab.basis),
    }
    manifest.update(extra_manifest or {})
    with open(layout.space_manifest, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_word_space(layout: ArtifactLayout) -> tuple[SemanticSpace, str | None]:
    require(layout.space_tsv, "build-space")
    space, headers = read_space_tsv(layout.space_tsv, parse_word_key)
    return space, headers.get("config")


def load_vocab(layout: ArtifactLayout) -> tuple[Vocabulary, str | None]:
    require(layout.vocab_json, "build-space")
    return read_vocab_json(layout.vocab_json)


def save_holistic(layout: ArtifactLayout, space: HolisticPhraseSpace,
                  cfg_hash: str):
    layout.root.mkdir(parents=True, exist_ok=True)
    write_space_tsv(space, layout.holistic_tsv, format_phrase_key,
                    config_hash=cfg_hash)
    manifest = {
        "config_hash": cfg_hash,
        "phrases": len(space.keys),
        "dim": space.dim,
        "zero_context": [format_phrase_key(k)
                         for k in space.zero_context_keys],
        "frequencies": {format_phrase_key(k): n
                        for k, n in sorted(space.frequencies.items())},
    }
    with open(layout.holistic_manifest, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_holistic(layout: ArtifactLayout) -> tuple[HolisticPhraseSpace, str | None]:
    require(layout.holistic_tsv, "build-holistic")
    space, headers = read_space_tsv(layout.holistic_tsv, parse_phrase_key)
    frequencies = {}
    if layout.holistic_manifest.exists():
        with open(layout.holistic_manifest, encoding="utf-8") as fh:
            manifest = json.load(fh)
        frequencies = {parse_phrase_key(k): n
                       for k, n in manifest.get("frequencies", {}).items()}
    holistic = HolisticPhraseSpace(
        keys=space.keys, matrix=space.matrix, weighted=space.weighted,
        normalized=space.normalized, reduced=space.reduced,
        singular_values=space.singular_values, frequencies=frequencies)
    return holistic, headers.get("config")


def save_inventories(layout: ArtifactLayout, inventories: dict):
    layout.senses_dir.mkdir(parents=True, exist_ok=True)
    for verb in sorted(inventories):
        write_inventory_json(inventories[verb], layout.sense_json(verb))


def load_inventories(layout: ArtifactLayout) -> dict[str, SenseInventory]:
    require(layout.senses_dir, "induce-senses")
    inventories = {}
    for path in sorted(layout.senses_dir.glob("*.json")):
        inv = read_inventory_json(path)
        inventories[inv.verb] = inv
    if not inventories:
        raise MissingArtifactError(
            f"{layout.senses_dir} holds no inventories; run 'induce-senses'")
    return inventories


def save_matrices(layout: ArtifactLayout, matrices: dict):
    layout.matrices_dir.mkdir(parents=True, exist_ok=True)
    for (verb, sense_id), vm in sorted(
            matrices.items(), key=lambda kv: (kv[0][0], kv[0][1] is not None,
                                              kv[0][1] or 0)):
        write_matrix_tsv(vm, layout.matrix_tsv(verb, sense_id),
                         config_hash=vm.config_hash)


def load_matrices(layout: ArtifactLayout) -> dict:
    require(layout.matrices_dir, "train")
    matrices = {}
    for path in sorted(layout.matrices_dir.glob("*.tsv")):
        vm = read_matrix_tsv(path)
        matrices[(vm.verb, vm.sense_id)] = vm
    if not matrices:
        raise MissingArtifactError(
            f"{layout.matrices_dir} holds no matrices; run 'train'")
    return matrices


def split_matrix_table(matrices: dict):
    """Split a (verb, sense_id) table into the two shapes the composition
    models expect: verb -> ambiguous matrix, (verb, sense) -> sense matrix."""
    ambiguous = {verb: vm for (verb, sid), vm in matrices.items()
                 if sid is None}
    senses = {(verb, sid): vm for (verb, sid), vm in matrices.items()
              if sid is not None}
    return ambiguous, senses
