"""Multi-seed benchmarks on the planted-sense generator.

Two experiments, both repeated over independent generator seeds:

* supervised: gold sense labels, cross-validated matrix training, ranking
  of held-out holistic vectors (accuracy, MRR, average cosine);
* similarity: unsupervised sense induction end to end, then Spearman
  correlation of six composition models against gold pair scores defined as
  the cosines of the holistic phrase vectors themselves.

Per-pair scores are pooled across seeds so paired permutation tests run on
one large sample instead of twenty tiny ones. The default trainer is the
closed-form ridge solver; it minimizes the same objective as gradient
descent (their equivalence is covered by the regression tests) and keeps
twenty-seed runs fast.
"""

from dataclasses import dataclass, replace

import numpy as np

from .compose import CompositionModel
from .config import PipelineConfig, parse_config_text
from .evaluation import EvalReport, PhrasePair, run_similarity_task, run_supervised_task
from .metrics import cosine, paired_significance
from .pipeline import PipelineState, run_pipeline, split_matrix_table
from .synthetic import SyntheticSpec, desk_config_text, generate_synthetic

SIMILARITY_MODELS = ("holistic_lookup", "disambiguated_matrix",
                     "ambiguous_matrix", "additive", "multiplicative",
                     "verbs_only")
CONTRAST_MODELS = ("holistic_lookup", "disambiguated_matrix",
                   "ambiguous_matrix")


def desk_config(spec: SyntheticSpec, **overrides) -> PipelineConfig:
    """The same configuration the generator writes next to a synthetic
    corpus, parsed through the ordinary config path."""
    return parse_config_text(desk_config_text(spec, **overrides))


@dataclass
class SupervisedBenchmark:
    seeds: tuple
    reports: list
    mean_overall: dict
    pooled_p_avg_cosine: float


@dataclass
class SimilarityBenchmark:
    seeds: tuple
    reports: list
    mean_rho: dict
    pooled_p: dict


def run_supervised_benchmark(spec: SyntheticSpec, seeds,
                             trainer: str = "closed_form", jobs: int = 1,
                             folds: int = 4,
                             **config_overrides) -> SupervisedBenchmark:
    seeds = tuple(seeds)
    reports: list[EvalReport] = []
    pooled = {m: [] for m in ("ambiguous_matrix", "disambiguated_matrix")}
    for seed in seeds:
        sp = replace(spec, seed=seed)
        data = generate_synthetic(sp)
        cfg = desk_config(sp, **config_overrides)
        state = run_pipeline(cfg, corpus=data.corpus,
                             relations=data.relations, jobs=jobs,
                             with_senses=False, with_matrices=False)
        report = run_supervised_task(
            data.sense_dataset, state.word_space, state.holistic,
            cfg.regression, seed=seed, folds=folds, trainer=trainer,
            config_hash=state.cfg_hash)
        reports.append(report)
        for m in pooled:
            pooled[m].extend(report.per_pair[m][k]
                             for k in sorted(report.per_pair[m]))
    mean_overall = {
        m: {metric: float(np.mean([r.overall[m][metric] for r in reports]))
            for metric in ("accuracy", "mrr", "avg_cosine")}
        for m in pooled
    }
    p = paired_significance(pooled["ambiguous_matrix"],
                            pooled["disambiguated_matrix"], seed=0)
    return SupervisedBenchmark(seeds=seeds, reports=reports,
                               mean_overall=mean_overall,
                               pooled_p_avg_cosine=p)


def holistic_gold_pairs(sim_pairs, holistic) -> list[PhrasePair]:
    """Re-score phrase pairs with the cosine of their holistic vectors; the
    holistic-lookup model then correlates with this gold perfectly, making
    it the reference ceiling the compositional models chase."""
    pairs = []
    for pair in sim_pairs:
        if pair.phrase_a in holistic and pair.phrase_b in holistic:
            score = cosine(holistic.vector(pair.phrase_a),
                           holistic.vector(pair.phrase_b))
            pairs.append(PhrasePair(phrase_a=pair.phrase_a,
                                    phrase_b=pair.phrase_b, score=score))
    return pairs


def build_models(state: PipelineState) -> dict[str, CompositionModel]:
    """All six composition models over one pipeline run's products."""
    if state.holistic is None or state.matrices is None:
        raise ValueError("pipeline state lacks holistic vectors or matrices")
    ambiguous, senses = split_matrix_table(state.matrices)
    ws = state.word_space
    return {
        "holistic_lookup": CompositionModel(kind="holistic_lookup",
                                            holistic=state.holistic),
        "disambiguated_matrix": CompositionModel(
            kind="disambiguated_matrix", word_space=ws,
            sense_matrices=senses, inventories=state.inventories),
        "ambiguous_matrix": CompositionModel(kind="ambiguous_matrix",
                                             word_space=ws,
                                             matrices=ambiguous),
        "additive": CompositionModel(kind="additive", word_space=ws),
        "multiplicative": CompositionModel(kind="multiplicative",
                                           word_space=ws),
        "verbs_only": CompositionModel(kind="verbs_only", word_space=ws),
    }


def run_similarity_benchmark(spec: SyntheticSpec, seeds,
                             trainer: str = "closed_form", jobs: int = 1,
                             **config_overrides) -> SimilarityBenchmark:
    seeds = tuple(seeds)
    reports: list[EvalReport] = []
    pooled = {m: [] for m in CONTRAST_MODELS}
    for seed in seeds:
        sp = replace(spec, seed=seed)
        data = generate_synthetic(sp)
        cfg = desk_config(sp, **config_overrides)
        state = run_pipeline(cfg, corpus=data.corpus,
                             relations=data.relations, jobs=jobs,
                             trainer=trainer)
        gold = holistic_gold_pairs(data.sim_pairs, state.holistic)
        report = run_similarity_task(gold, build_models(state), seed=seed,
                                     config_hash=state.cfg_hash)
        reports.append(report)
        shared = sorted(
            set.intersection(*(set(report.per_pair[m])
                               for m in CONTRAST_MODELS)),
            key=int)
        for m in CONTRAST_MODELS:
            pooled[m].extend(report.per_pair[m][k] for k in shared)
    mean_rho = {
        m: float(np.mean([r.overall[m]["spearman_rho"] for r in reports]))
        for m in SIMILARITY_MODELS
    }
    pooled_p = {
        "disambiguated_vs_ambiguous_cosine": paired_significance(
            pooled["disambiguated_matrix"], pooled["ambiguous_matrix"],
            seed=0),
        "disambiguated_vs_holistic_cosine": paired_significance(
            pooled["disambiguated_matrix"], pooled["holistic_lookup"],
            seed=0),
    }
    return SimilarityBenchmark(seeds=seeds, reports=reports,
                               mean_rho=mean_rho, pooled_p=pooled_p)
