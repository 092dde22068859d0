"""Command line driving the pipeline stage by stage.

Each subcommand reads a configuration file, loads whatever artifacts it
needs, refuses artifacts whose embedded configuration hash disagrees with
the current configuration (unless --force), and writes its own artifacts
with the current hash stamped in.

Exit codes: 0 success, 2 configuration or input-format problem, 3 missing
artifact, 1 unexpected failure.
"""

import argparse
import dataclasses
import logging
import sys
import traceback

import numpy as np

from .benchmark import build_models, holistic_gold_pairs
from .compose import MODEL_KINDS, CompositionModel, compose
from .config import ConfigError, config_hash, load_config
from .corpus import (
    CorpusFormatError,
    EmptyCorpusError,
    Token,
    evaluate_wordsim,
    read_corpus,
    read_stoplist,
    read_wordsim_pairs,
)
from .evaluation import (
    read_phrase_sim_dataset,
    read_sense_dataset,
    run_similarity_task,
    run_supervised_task,
    write_similarity_tsv,
    write_supervised_tsv,
)
from .holistic import build_holistic_vectors, collect_phrases, read_relations
from .metrics import cosine
from .pipeline import (
    ArtifactLayout,
    MissingArtifactError,
    build_word_space,
    check_hash,
    collect_verb_occurrences,
    induce_inventories,
    load_holistic,
    load_inventories,
    load_matrices,
    load_vocab,
    load_word_space,
    save_holistic,
    save_inventories,
    save_matrices,
    save_word_space,
    split_matrix_table,
    train_matrices,
    ambiguous_plan,
    sense_plan,
)
from .synthetic import NOISE_LEVELS, SyntheticSpec, generate_synthetic, write_synthetic

logger = logging.getLogger(__name__)


def _load_context(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    root = args.artifacts or cfg.resolve(cfg.paths.artifacts)
    return cfg, config_hash(cfg), ArtifactLayout(root)


def _read_corpus_and_stop(cfg):
    corpus = read_corpus(cfg.resolve(cfg.paths.corpus))
    stop = (read_stoplist(cfg.resolve(cfg.paths.stop_list))
            if cfg.paths.stop_list else frozenset())
    return corpus, stop


def _require_path(cfg, name: str) -> str:
    value = getattr(cfg.paths, name)
    if not value:
        raise ConfigError(f"paths.{name} is not configured")
    return value


# --- subcommands -----------------------------------------------------------

def cmd_synth(args) -> int:
    overrides = {k: v for k, v in {
        "n_verbs": args.verbs,
        "senses_per_verb": args.senses,
        "objects_per_sense": args.objects_per_sense,
        "disjointness": args.disjointness,
        "noise": args.noise,
        "shared_sense_map": args.shared_sense_map or None,
        "seed": args.seed,
    }.items() if v is not None}
    spec = dataclasses.replace(SyntheticSpec(), **overrides)
    data = generate_synthetic(spec)
    cfg_path = write_synthetic(data, args.out, svd_dim=args.svd_dim)
    print(f"wrote synthetic corpus under {args.out}")
    print(f"pipeline config: {cfg_path}")
    return 0


def cmd_build_space(args) -> int:
    cfg, h, layout = _load_context(args)
    corpus, stop = _read_corpus_and_stop(cfg)
    space, vocab = build_word_space(corpus, cfg.space, stop)
    extra = {}
    if cfg.paths.wordsim_dataset:
        pairs = read_wordsim_pairs(cfg.resolve(cfg.paths.wordsim_dataset))
        result = evaluate_wordsim(space, pairs)
        extra["wordsim"] = {
            "spearman": result.spearman, "pearson": result.pearson,
            "pairs": result.used, "skipped": result.skipped,
        }
        print(f"word similarity: spearman={result.spearman:.4f} "
              f"over {result.used} pairs ({result.skipped} skipped)")
    save_word_space(layout, space, vocab, h, extra)
    print(f"space: {len(space.keys)} rows x {space.dim} dims -> "
          f"{layout.space_tsv}")
    return 0


def cmd_build_holistic(args) -> int:
    cfg, h, layout = _load_context(args)
    vocab, found = load_vocab(layout)
    check_hash(h, found, "vocabulary", args.force)
    corpus, _ = _read_corpus_and_stop(cfg)
    relations = read_relations(cfg.resolve(_require_path(cfg, "relations")))
    inventory = collect_phrases(relations, cfg.holistic.min_phrase_count)
    space = build_holistic_vectors(corpus, inventory, vocab, cfg.space,
                                   svd_dim=cfg.holistic_svd_dim)
    save_holistic(layout, space, h)
    print(f"holistic: {len(space.keys)} phrases x {space.dim} dims -> "
          f"{layout.holistic_tsv}")
    return 0


def cmd_induce_senses(args) -> int:
    cfg, h, layout = _load_context(args)
    space, found = load_word_space(layout)
    check_hash(h, found, "word space", args.force)
    corpus, _ = _read_corpus_and_stop(cfg)
    relations = read_relations(cfg.resolve(_require_path(cfg, "relations")))
    occurrences = collect_verb_occurrences(corpus, relations)
    inventories = induce_inventories(occurrences, space, cfg.cluster,
                                     jobs=args.jobs, cfg_hash=h)
    save_inventories(layout, inventories)
    for verb in sorted(inventories):
        inv = inventories[verb]
        sizes = ", ".join(f"{s.sense_id}:{s.size}" for s in inv.senses)
        print(f"{verb}: {len(inv.senses)} sense(s) [{sizes}]")
    print(f"inventories -> {layout.senses_dir}")
    return 0


def cmd_train(args) -> int:
    cfg, h, layout = _load_context(args)
    space, found = load_word_space(layout)
    check_hash(h, found, "word space", args.force)
    holistic, found = load_holistic(layout)
    check_hash(h, found, "holistic space", args.force)
    inventories = load_inventories(layout)
    for inv in inventories.values():
        check_hash(h, inv.config_hash, f"sense inventory {inv.verb}",
                   args.force)
    plan = []
    for verb, sense_id, objects in (ambiguous_plan(inventories)
                                    + sense_plan(inventories)):
        covered = tuple(o for o in objects if Token(o, "N") in space
                        and (verb, o) in holistic)
        if len(covered) < len(objects):
            logger.warning("%s/%s: skipping %d object(s) without vectors",
                           verb, sense_id, len(objects) - len(covered))
        if covered:
            plan.append((verb, sense_id, covered))
    matrices = train_matrices(plan, space, holistic, cfg.regression,
                              trainer=args.trainer, jobs=args.jobs,
                              cfg_hash=h)
    save_matrices(layout, matrices)
    n_amb = sum(1 for _, sid in matrices if sid is None)
    print(f"trained {n_amb} ambiguous and {len(matrices) - n_amb} "
          f"per-sense matrices -> {layout.matrices_dir}")
    return 0


def _assemble_model(kind: str, cfg, h, layout, force: bool) -> CompositionModel:
    word_space = holistic = None
    matrices: dict = {}
    sense_matrices: dict = {}
    inventories: dict = {}
    if kind != "holistic_lookup":
        word_space, found = load_word_space(layout)
        check_hash(h, found, "word space", force)
    if kind in ("holistic_lookup", "ambiguous_matrix", "disambiguated_matrix"):
        holistic, found = load_holistic(layout)
        check_hash(h, found, "holistic space", force)
    if kind in ("ambiguous_matrix", "disambiguated_matrix"):
        table = load_matrices(layout)
        for vm in table.values():
            check_hash(h, vm.config_hash, f"matrix {vm.verb}/{vm.sense_id}",
                       force)
        matrices, sense_matrices = split_matrix_table(table)
    if kind == "disambiguated_matrix":
        inventories = load_inventories(layout)
    return CompositionModel(kind=kind, word_space=word_space,
                            matrices=matrices, sense_matrices=sense_matrices,
                            inventories=inventories, holistic=holistic)


def cmd_compose(args) -> int:
    cfg, h, layout = _load_context(args)
    model = _assemble_model(args.model, cfg, h, layout, args.force)
    vec = compose(model, args.verb, args.object)
    print(f"{args.model}({args.verb}, {args.object}): dim={vec.shape[0]} "
          f"norm={np.linalg.norm(vec):.6f}")
    if args.model in ("ambiguous_matrix", "disambiguated_matrix",
                      "holistic_lookup"):
        neighbors = model.holistic or load_holistic(layout)[0]
        scored = [(cosine(vec, neighbors.vector(k)), k)
                  for k in neighbors.keys]
        label = "holistic phrase"
    else:
        scored = [(cosine(vec, model.word_space.vector(k)), k)
                  for k in model.word_space.keys]
        label = "word"
    scored.sort(key=lambda sk: (-sk[0], sk[1]))
    print(f"nearest {label} vectors:")
    for sim, key in scored[:args.top]:
        name = f"{key[0]} {key[1]}" if isinstance(key, tuple) else str(key)
        print(f"  {sim:+.4f}  {name}")
    return 0


def cmd_evaluate(args) -> int:
    cfg, h, layout = _load_context(args)
    layout.reports_dir.mkdir(parents=True, exist_ok=True)
    if args.task == "supervised":
        dataset = read_sense_dataset(
            cfg.resolve(_require_path(cfg, "supervised_dataset")))
        space, found = load_word_space(layout)
        check_hash(h, found, "word space", args.force)
        holistic, found = load_holistic(layout)
        check_hash(h, found, "holistic space", args.force)
        report = run_supervised_task(dataset, space, holistic,
                                     cfg.regression, seed=cfg.seed,
                                     folds=args.folds, trainer=args.trainer,
                                     config_hash=h)
        report.write_json(layout.reports_dir / "supervised.json")
        write_supervised_tsv(report, layout.reports_dir / "supervised.tsv")
        for m in report.models:
            block = report.overall[m]
            print(f"{m}: accuracy={block['accuracy']:.4f} "
                  f"mrr={block['mrr']:.4f} "
                  f"avg_cosine={block['avg_cosine']:.4f}")
        key = "ambiguous_vs_disambiguated_avg_cosine"
        print(f"paired permutation p ({key}) = {report.p_values[key]:.6g}")
    else:
        dataset = read_phrase_sim_dataset(
            cfg.resolve(_require_path(cfg, "similarity_dataset")))
        space, found = load_word_space(layout)
        check_hash(h, found, "word space", args.force)
        holistic, found = load_holistic(layout)
        check_hash(h, found, "holistic space", args.force)
        inventories = load_inventories(layout)
        table = load_matrices(layout)
        for vm in table.values():
            check_hash(h, vm.config_hash, f"matrix {vm.verb}/{vm.sense_id}",
                       args.force)
        matrices, sense_matrices = split_matrix_table(table)
        models = {
            "holistic_lookup": CompositionModel(kind="holistic_lookup",
                                                holistic=holistic),
            "disambiguated_matrix": CompositionModel(
                kind="disambiguated_matrix", word_space=space,
                sense_matrices=sense_matrices, inventories=inventories),
            "ambiguous_matrix": CompositionModel(kind="ambiguous_matrix",
                                                 word_space=space,
                                                 matrices=matrices),
            "additive": CompositionModel(kind="additive", word_space=space),
            "multiplicative": CompositionModel(kind="multiplicative",
                                               word_space=space),
            "verbs_only": CompositionModel(kind="verbs_only",
                                           word_space=space),
        }
        if args.gold == "holistic":
            dataset = holistic_gold_pairs(dataset, holistic)
            if len(dataset) < 2:
                raise ConfigError("fewer than 2 pairs have holistic vectors")
        report = run_similarity_task(dataset, models, seed=cfg.seed,
                                     config_hash=h)
        report.write_json(layout.reports_dir / "similarity.json")
        write_similarity_tsv(report, layout.reports_dir / "similarity.tsv")
        for m in report.models:
            block = report.overall[m]
            print(f"{m}: spearman_rho={block['spearman_rho']:+.4f} "
                  f"pairs={block['pairs']}")
        for name, p in sorted(report.p_values.items()):
            print(f"p ({name}) = {p:.6g}")
    print(f"reports -> {layout.reports_dir}")
    return 0


# --- argument parsing ------------------------------------------------------

def _noise_level(text: str) -> float:
    if text in NOISE_LEVELS:
        return NOISE_LEVELS[text]
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"noise must be one of {sorted(NOISE_LEVELS)} or a number")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verbsense",
        description="co-occurrence spaces, verb matrices, sense induction, "
                    "and composition benchmarks")
    parser.add_argument("--verbose", action="store_true",
                        help="debug-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="pipeline config file")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers (1 = sequential)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the configured seed")
        p.add_argument("--artifacts", default=None,
                       help="override the configured artifact directory")
        p.add_argument("--force", action="store_true",
                       help="use artifacts despite configuration mismatches")

    p = sub.add_parser("synth", help="generate a planted-sense corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--verbs", type=int, default=None)
    p.add_argument("--senses", type=int, default=None)
    p.add_argument("--objects-per-sense", type=int, default=None)
    p.add_argument("--disjointness", type=float, default=None)
    p.add_argument("--noise", type=_noise_level, default=None)
    p.add_argument("--shared-sense-map", action="store_true")
    p.add_argument("--svd-dim", type=int, default=24)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("build-space", help="build the word vector space")
    common(p)
    p.set_defaults(func=cmd_build_space)

    p = sub.add_parser("build-holistic", help="build holistic phrase vectors")
    common(p)
    p.set_defaults(func=cmd_build_holistic)

    p = sub.add_parser("induce-senses", help="cluster verb contexts into senses")
    common(p)
    p.set_defaults(func=cmd_induce_senses)

    p = sub.add_parser("train", help="train verb matrices by ridge regression")
    common(p)
    p.add_argument("--trainer", choices=("gd", "closed_form"), default="gd")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compose", help="compose one phrase and show neighbors")
    common(p)
    p.add_argument("--model", choices=MODEL_KINDS, required=True)
    p.add_argument("--verb", required=True)
    p.add_argument("--object", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("evaluate", help="run an evaluation task")
    common(p)
    p.add_argument("--task", choices=("supervised", "similarity"),
                   required=True)
    p.add_argument("--trainer", choices=("gd", "closed_form"), default="gd")
    p.add_argument("--folds", type=int, default=4)
    p.add_argument("--gold", choices=("dataset", "holistic"),
                   default="dataset",
                   help="similarity gold: file scores or holistic cosines")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CorpusFormatError, EmptyCorpusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
