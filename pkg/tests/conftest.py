import pytest

from verbsense.benchmark import desk_config
from verbsense.pipeline import run_pipeline
from verbsense.synthetic import SyntheticSpec, generate_synthetic

# small but fully structured: 2 verbs x 2 senses x 6 objects, enough for
# induction, training, and both evaluation tasks without slowing the suite
SMALL_SPEC = SyntheticSpec(n_verbs=2, objects_per_sense=6,
                           identity_sentences_per_object=6,
                           phrase_occurrences=8, similarity_pairs=24,
                           seed=11)


@pytest.fixture(scope="session")
def small_spec():
    return SMALL_SPEC


@pytest.fixture(scope="session")
def small_data():
    return generate_synthetic(SMALL_SPEC)


@pytest.fixture(scope="session")
def small_state(small_data):
    cfg = desk_config(SMALL_SPEC)
    return run_pipeline(cfg, corpus=small_data.corpus,
                        relations=small_data.relations,
                        trainer="closed_form")
