"""Unit checks of the multi-seed benchmark harness.

The statistical claims themselves live in the acceptance suite; here we pin
the harness mechanics: config plumbing, gold re-scoring, model assembly,
cross-seed pooling, and result shapes.
"""

import dataclasses

import numpy as np
import pytest

from verbsense.benchmark import (
    CONTRAST_MODELS,
    SIMILARITY_MODELS,
    build_models,
    desk_config,
    holistic_gold_pairs,
    run_similarity_benchmark,
    run_supervised_benchmark,
)
from verbsense.config import PipelineConfig, config_hash
from verbsense.evaluation import PhrasePair
from verbsense.holistic import HolisticPhraseSpace
from verbsense.metrics import paired_significance
from verbsense.synthetic import SyntheticSpec

SPEC = SyntheticSpec(n_verbs=2, objects_per_sense=6,
                     identity_sentences_per_object=6, phrase_occurrences=8,
                     similarity_pairs=24, seed=0)


def test_desk_config_matches_generator(small_spec):
    cfg = desk_config(small_spec)
    assert isinstance(cfg, PipelineConfig)
    assert cfg.seed == small_spec.seed
    assert cfg.holistic.min_phrase_count == small_spec.phrase_occurrences
    assert cfg.space.svd_dim == 24
    assert cfg.holistic_svd_dim == 64


def test_desk_config_overrides(small_spec):
    cfg = desk_config(small_spec, svd_dim=10, lam=0.5, seed=7)
    assert cfg.space.svd_dim == 10
    assert cfg.regression.lam == 0.5
    assert cfg.seed == 7
    assert config_hash(cfg) != config_hash(desk_config(small_spec))


def test_holistic_gold_pairs_rescores_and_drops():
    space = HolisticPhraseSpace(
        keys=(("eat", "apple"), ("eat", "cake"), ("eat", "soup")),
        matrix=np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]))
    pairs = [
        PhrasePair(("eat", "apple"), ("eat", "cake"), score=0.9),
        PhrasePair(("eat", "apple"), ("eat", "soup"), score=0.1),
        PhrasePair(("eat", "apple"), ("eat", "rock"), score=0.5),
    ]
    gold = holistic_gold_pairs(pairs, space)
    assert [(p.phrase_a, p.phrase_b) for p in gold] == [
        (("eat", "apple"), ("eat", "cake")),
        (("eat", "apple"), ("eat", "soup")),
    ]
    # input scores are discarded in favor of holistic cosines
    assert gold[0].score == pytest.approx(0.0)
    assert gold[1].score == pytest.approx(1.0 / np.sqrt(2.0))


def test_build_models_covers_all_kinds(small_state):
    models = build_models(small_state)
    assert set(models) == set(SIMILARITY_MODELS)
    assert set(CONTRAST_MODELS) <= set(models)
    for name, model in models.items():
        assert model.kind == name
    assert models["additive"].word_space is small_state.word_space
    assert models["holistic_lookup"].holistic is small_state.holistic


def test_build_models_splits_matrix_table(small_state):
    models = build_models(small_state)
    ambiguous = models["ambiguous_matrix"].matrices
    senses = models["disambiguated_matrix"].sense_matrices
    assert set(ambiguous) == {v for v, sid in small_state.matrices
                              if sid is None}
    assert set(senses) == {(v, sid) for v, sid in small_state.matrices
                           if sid is not None}
    assert models["disambiguated_matrix"].inventories is small_state.inventories


def test_build_models_requires_products(small_state):
    with pytest.raises(ValueError):
        build_models(dataclasses.replace(small_state, holistic=None))
    with pytest.raises(ValueError):
        build_models(dataclasses.replace(small_state, matrices=None))


@pytest.fixture(scope="module")
def supervised_bench():
    return run_supervised_benchmark(SPEC, seeds=(3, 4),
                                    trainer="closed_form", folds=3)


def test_supervised_benchmark_structure(supervised_bench):
    bench = supervised_bench
    assert bench.seeds == (3, 4)
    assert len(bench.reports) == 2
    assert set(bench.mean_overall) == {"ambiguous_matrix",
                                       "disambiguated_matrix"}
    for block in bench.mean_overall.values():
        assert set(block) == {"accuracy", "mrr", "avg_cosine"}
    assert 0.0 < bench.pooled_p_avg_cosine <= 1.0


def test_supervised_benchmark_means_are_report_means(supervised_bench):
    bench = supervised_bench
    for m, block in bench.mean_overall.items():
        for metric, value in block.items():
            expected = np.mean([r.overall[m][metric] for r in bench.reports])
            assert value == expected


def test_supervised_benchmark_pools_per_pair_scores(supervised_bench):
    bench = supervised_bench
    pooled = {m: [] for m in ("ambiguous_matrix", "disambiguated_matrix")}
    for report in bench.reports:
        for m in pooled:
            pooled[m].extend(report.per_pair[m][k]
                             for k in sorted(report.per_pair[m]))
    expected = paired_significance(pooled["ambiguous_matrix"],
                                   pooled["disambiguated_matrix"], seed=0)
    assert bench.pooled_p_avg_cosine == expected


def test_supervised_benchmark_forwards_overrides():
    bench = run_supervised_benchmark(SPEC, seeds=(3,), trainer="closed_form",
                                     folds=3, svd_dim=8)
    sp = dataclasses.replace(SPEC, seed=3)
    assert bench.reports[0].config_hash == config_hash(desk_config(sp,
                                                                   svd_dim=8))


@pytest.fixture(scope="module")
def similarity_bench():
    return run_similarity_benchmark(SPEC, seeds=(3, 4),
                                    trainer="closed_form")


def test_similarity_benchmark_structure(similarity_bench):
    bench = similarity_bench
    assert bench.seeds == (3, 4)
    assert set(bench.mean_rho) == set(SIMILARITY_MODELS)
    assert set(bench.pooled_p) == {"disambiguated_vs_ambiguous_cosine",
                                   "disambiguated_vs_holistic_cosine"}
    for p in bench.pooled_p.values():
        assert 0.0 < p <= 1.0
    # gold is defined as holistic cosines, so the lookup model is the ceiling
    assert bench.mean_rho["holistic_lookup"] == pytest.approx(1.0)


def test_similarity_benchmark_means_are_report_means(similarity_bench):
    bench = similarity_bench
    for m in SIMILARITY_MODELS:
        expected = np.mean([r.overall[m]["spearman_rho"]
                            for r in bench.reports])
        assert bench.mean_rho[m] == expected


def test_similarity_benchmark_pools_shared_pairs(similarity_bench):
    bench = similarity_bench
    pooled = {m: [] for m in CONTRAST_MODELS}
    for report in bench.reports:
        shared = sorted(set.intersection(*(set(report.per_pair[m])
                                           for m in CONTRAST_MODELS)),
                        key=int)
        for m in CONTRAST_MODELS:
            pooled[m].extend(report.per_pair[m][k] for k in shared)
    expected = paired_significance(pooled["disambiguated_matrix"],
                                   pooled["ambiguous_matrix"], seed=0)
    assert bench.pooled_p["disambiguated_vs_ambiguous_cosine"] == expected
