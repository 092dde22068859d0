"""Composition models: all six kinds, resource errors, similarity guard."""

import numpy as np
import pytest

from verbsense.compose import (
    MODEL_KINDS,
    CompositionModel,
    HolisticMissError,
    MissingResourceError,
    PairSimilarity,
    compose,
    pair_similarity,
)
from verbsense.corpus import SemanticSpace, Token
from verbsense.holistic import HolisticPhraseSpace
from verbsense.regression import VerbMatrix
from verbsense.senses import Sense, SenseInventory

WORDS = SemanticSpace(
    keys=(Token("run", "V"), Token("dog", "N"), Token("race", "N")),
    matrix=np.array([[1.0, 2.0], [3.0, 4.0], [0.0, 1.0]]))

HOLISTIC = HolisticPhraseSpace(
    keys=(("run", "dog"), ("run", "race")),
    matrix=np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))

AMBIG = {"run": VerbMatrix(verb="run", W=np.array([[1.0, 0.0], [0.0, 1.0],
                                                   [1.0, 1.0]]))}

INVENTORY = {"run": SenseInventory(verb="run", dominant=0, senses=[
    Sense(sense_id=0, centroid=np.array([1.0, 1.0]), objects=("dog",)),
    Sense(sense_id=1, centroid=np.array([0.0, 1.0]), objects=("race",)),
])}

SENSE_MATS = {("run", 0): VerbMatrix(verb="run", sense_id=0,
                                     W=np.array([[2.0, 0.0], [0.0, 2.0],
                                                 [0.0, 0.0]])),
              ("run", 1): VerbMatrix(verb="run", sense_id=1,
                                     W=np.array([[0.0, 3.0], [3.0, 0.0],
                                                 [1.0, 1.0]]))}


def model(kind, **overrides):
    kwargs = dict(word_space=WORDS, matrices=AMBIG,
                  sense_matrices=SENSE_MATS, inventories=INVENTORY,
                  holistic=HOLISTIC)
    kwargs.update(overrides)
    return CompositionModel(kind=kind, **kwargs)


# --- the six kinds ----------------------------------------------------------------

def test_additive():
    assert np.allclose(compose(model("additive"), "run", "dog"), [4.0, 6.0])


def test_multiplicative():
    assert np.allclose(compose(model("multiplicative"), "run", "dog"),
                       [3.0, 8.0])


def test_verbs_only_ignores_object():
    m = model("verbs_only")
    assert np.allclose(compose(m, "run", "dog"), [1.0, 2.0])
    assert np.allclose(compose(m, "run", "race"), [1.0, 2.0])


def test_holistic_lookup():
    assert np.allclose(compose(model("holistic_lookup"), "run", "dog"),
                       [1.0, 0.0, 0.0])


def test_ambiguous_matrix():
    # W @ [3, 4] for the frozen matrix
    assert np.allclose(compose(model("ambiguous_matrix"), "run", "dog"),
                       [3.0, 4.0, 7.0])


def test_disambiguated_matrix_routes_by_sense():
    m = model("disambiguated_matrix")
    # dog [3,4]: cosine 0.99 to centroid [1,1], 0.8 to [0,1] -> sense 0
    assert np.allclose(compose(m, "run", "dog"), [6.0, 8.0, 0.0])
    # race [0,1] matches centroid [0,1] exactly -> sense 1
    assert np.allclose(compose(m, "run", "race"), [3.0, 0.0, 1.0])


def test_model_kinds_constant():
    assert len(MODEL_KINDS) == 6
    for kind in MODEL_KINDS:
        model(kind)  # all constructible with full resources


# --- error paths ------------------------------------------------------------------

def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        CompositionModel(kind="oracle")


def test_missing_required_resources():
    with pytest.raises(ValueError):
        CompositionModel(kind="additive")
    with pytest.raises(ValueError):
        CompositionModel(kind="holistic_lookup")


def test_missing_word_vectors():
    m = model("additive")
    with pytest.raises(MissingResourceError):
        compose(m, "walk", "dog")
    with pytest.raises(MissingResourceError):
        compose(m, "run", "unicorn")


def test_missing_matrix_and_inventory():
    with pytest.raises(MissingResourceError):
        compose(model("ambiguous_matrix", matrices={}), "run", "dog")
    with pytest.raises(MissingResourceError):
        compose(model("disambiguated_matrix", inventories={}), "run", "dog")
    with pytest.raises(MissingResourceError):
        compose(model("disambiguated_matrix", sense_matrices={}), "run",
                "dog")


def test_holistic_miss_is_distinct():
    with pytest.raises(HolisticMissError):
        compose(model("holistic_lookup"), "run", "unicorn")
    assert issubclass(HolisticMissError, MissingResourceError)
    assert issubclass(MissingResourceError, KeyError)


# --- pair similarity --------------------------------------------------------------

def test_pair_similarity_value():
    m = model("holistic_lookup")
    out = pair_similarity(m, ("run", "dog"), ("run", "race"))
    assert out == PairSimilarity(0.0, False)
    same = pair_similarity(m, ("run", "dog"), ("run", "dog"))
    assert same.value == pytest.approx(1.0)


def test_pair_similarity_zero_composite():
    zero_words = SemanticSpace(
        keys=(Token("run", "V"), Token("dog", "N")),
        matrix=np.array([[0.0, 0.0], [1.0, 1.0]]))
    out = pair_similarity(model("verbs_only", word_space=zero_words),
                          ("run", "dog"), ("run", "dog"))
    assert out == PairSimilarity(0.0, True)


def test_pair_similarity_dimension_guard():
    # per-verb matrices may live in phrase spaces of different widths;
    # comparing across them must fail loudly
    mats = dict(AMBIG)
    mats["walk"] = VerbMatrix(verb="walk", W=np.array([[1.0, 0.0]]))
    words = SemanticSpace(
        keys=(Token("run", "V"), Token("walk", "V"), Token("dog", "N")),
        matrix=np.array([[1.0, 2.0], [2.0, 1.0], [3.0, 4.0]]))
    m = model("ambiguous_matrix", word_space=words, matrices=mats)
    with pytest.raises(ValueError):
        pair_similarity(m, ("run", "dog"), ("walk", "dog"))
