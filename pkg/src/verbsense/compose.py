"""Phrase composition models.

Six ways to build a vector for a verb-object phrase: multiply the object
vector by an ambiguous or sense-disambiguated verb matrix, add or
pointwise-multiply the two word vectors, fall back to the verb vector
alone, or look the phrase up in the holistic space. Matrix models live in
the phrase space, word-level models in the word space; similarities are
only ever taken between composites of the same model, which a dimension
check enforces.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .corpus import SemanticSpace, Token
from .holistic import HolisticPhraseSpace
from .regression import VerbMatrix, apply_verb
from .senses import SenseInventory, assign_object

MODEL_KINDS = (
    "ambiguous_matrix",
    "disambiguated_matrix",
    "additive",
    "multiplicative",
    "verbs_only",
    "holistic_lookup",
)


class MissingResourceError(KeyError):
    """A verb, object, matrix, or inventory the model needs is absent."""


class HolisticMissError(MissingResourceError):
    """The phrase has no holistic vector; similarity tasks treat this as a
    skippable pair rather than a failure."""


class PairSimilarity(NamedTuple):
    value: float
    zero_composite: bool


@dataclass
class CompositionModel:
    """A model kind bound to the resources it needs.

    word_space: always required except for holistic_lookup.
    matrices: verb -> VerbMatrix for ambiguous_matrix.
    sense_matrices: (verb, sense_id) -> VerbMatrix for disambiguated_matrix.
    inventories: verb -> SenseInventory for disambiguated_matrix.
    holistic: phrase space for holistic_lookup.
    """

    kind: str
    word_space: SemanticSpace | None = None
    matrices: dict = field(default_factory=dict)
    sense_matrices: dict = field(default_factory=dict)
    inventories: dict = field(default_factory=dict)
    holistic: HolisticPhraseSpace | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown composition model {self.kind!r}")
        needs_words = self.kind in ("additive", "multiplicative", "verbs_only",
                                    "ambiguous_matrix", "disambiguated_matrix")
        if needs_words and self.word_space is None:
            raise ValueError(f"{self.kind} needs a word space")
        if self.kind == "holistic_lookup" and self.holistic is None:
            raise ValueError("holistic_lookup needs a holistic space")


def _word_vector(space: SemanticSpace, lemma: str, pos: str,
                 role: str) -> np.ndarray:
    tok = Token(lemma, pos)
    if tok not in space:
        raise MissingResourceError(f"no vector for {role} {lemma!r} ({pos})")
    return space.vector(tok)


def compose(model: CompositionModel, verb: str, obj: str) -> np.ndarray:
    """Composite vector for the phrase (verb, obj) under the model."""
    kind = model.kind
    if kind == "holistic_lookup":
        key = (verb, obj)
        if key not in model.holistic:
            raise HolisticMissError(f"no holistic vector for {verb!r} {obj!r}")
        return model.holistic.vector(key)
    if kind == "verbs_only":
        return _word_vector(model.word_space, verb, "V", "verb")
    if kind in ("additive", "multiplicative"):
        v = _word_vector(model.word_space, verb, "V", "verb")
        o = _word_vector(model.word_space, obj, "N", "object")
        return v + o if kind == "additive" else v * o
    o = _word_vector(model.word_space, obj, "N", "object")
    if kind == "ambiguous_matrix":
        if verb not in model.matrices:
            raise MissingResourceError(f"no ambiguous matrix for {verb!r}")
        return apply_verb(model.matrices[verb], o)
    # disambiguated_matrix: route the object through its most likely sense
    if verb not in model.inventories:
        raise MissingResourceError(f"no sense inventory for {verb!r}")
    sense_id = assign_object(o, model.inventories[verb])
    key = (verb, sense_id)
    if key not in model.sense_matrices:
        raise MissingResourceError(
            f"no matrix for {verb!r} sense {sense_id}")
    return apply_verb(model.sense_matrices[key], o)


def pair_similarity(model: CompositionModel, phrase_a: tuple[str, str],
                    phrase_b: tuple[str, str]) -> PairSimilarity:
    """Cosine between the composites of two phrases under one model.

    Returns value 0.0 with zero_composite=True when either composite is the
    zero vector. Both composites must share a dimension; mixing vectors from
    different spaces is a bug this check turns into an error.
    """
    a = compose(model, *phrase_a)
    b = compose(model, *phrase_b)
    if a.shape != b.shape:
        raise ValueError(
            f"composite dimensions differ: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return PairSimilarity(0.0, True)
    return PairSimilarity(float(np.dot(a, b) / (na * nb)), False)
