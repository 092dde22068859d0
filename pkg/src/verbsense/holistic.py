"""Holistic verb-phrase vectors.

Verb-object occurrences are located in the corpus through a relation file;
each phrase that occurs often enough gets a context vector counted over the
union of windows around its verb and object positions. The counts then go
through the same LMI weighting, normalization, and SVD reduction as word
vectors, but the phrase matrix gets its own SVD basis.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import (
    CorpusFormatError,
    SemanticSpace,
    SpaceConfig,
    Token,
    Vocabulary,
    lmi_weight_dense,
    normalize_matrix,
    svd_project,
)


@dataclass(frozen=True)
class RelationOccurrence:
    """One verb-object occurrence: positions are 0-based token offsets into
    the referenced sentence."""

    verb: str
    obj: str
    sentence_index: int
    verb_position: int
    object_position: int


def read_relations(path) -> list[RelationOccurrence]:
    """TSV rows verb<TAB>object<TAB>sentence_index<TAB>verb_pos<TAB>object_pos."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise CorpusFormatError("expected 5 tab-separated fields", line_no)
            verb, obj, s_idx, v_pos, o_pos = parts
            try:
                rows.append(RelationOccurrence(verb, obj, int(s_idx),
                                               int(v_pos), int(o_pos)))
            except ValueError:
                raise CorpusFormatError(
                    f"non-integer position fields in {line!r}", line_no) from None
    return rows


def validate_relations(relations, corpus):
    """Check every occurrence against the corpus: the sentence index must
    exist, positions must be inside the sentence, and the tokens there must
    be the stated verb (POS V) and object (POS N)."""
    for occ in relations:
        if not 0 <= occ.sentence_index < len(corpus):
            raise CorpusFormatError(
                f"dangling sentence_index {occ.sentence_index} for "
                f"{occ.verb} {occ.obj}")
        sentence = corpus[occ.sentence_index]
        for pos, lemma, tag, role in ((occ.verb_position, occ.verb, "V", "verb"),
                                      (occ.object_position, occ.obj, "N", "object")):
            if not 0 <= pos < len(sentence):
                raise CorpusFormatError(
                    f"{role} position {pos} outside sentence "
                    f"{occ.sentence_index}")
            if sentence[pos] != Token(lemma, tag):
                raise CorpusFormatError(
                    f"sentence {occ.sentence_index} position {pos} holds "
                    f"{sentence[pos].lemma}|{sentence[pos].pos}, expected "
                    f"{lemma}|{tag}")


@dataclass
class PhraseInventory:
    """Occurrence lists for every (verb, object) pair above the frequency
    threshold, in first-appearance order."""

    occurrences: dict[tuple[str, str], tuple[RelationOccurrence, ...]]
    min_phrase_count: int

    @property
    def keys(self) -> tuple[tuple[str, str], ...]:
        return tuple(self.occurrences)

    def frequency(self, key) -> int:
        return len(self.occurrences[key])


def collect_phrases(relations, min_phrase_count: int = 100) -> PhraseInventory:
    if min_phrase_count < 1:
        raise ValueError("min_phrase_count must be >= 1")
    grouped: dict[tuple[str, str], list[RelationOccurrence]] = {}
    for occ in relations:
        grouped.setdefault((occ.verb, occ.obj), []).append(occ)
    kept = {key: tuple(occs) for key, occs in grouped.items()
            if len(occs) >= min_phrase_count}
    return PhraseInventory(occurrences=kept, min_phrase_count=min_phrase_count)


@dataclass
class HolisticPhraseSpace(SemanticSpace):
    """Phrase vectors keyed by (verb, object), plus phrase frequencies and
    the keys whose raw context was entirely empty."""

    frequencies: dict = None
    zero_context_keys: tuple = ()

    def __post_init__(self):
        super().__post_init__()
        if self.frequencies is None:
            self.frequencies = {}


def phrase_context_counts(corpus, occurrences, vocab: Vocabulary,
                          window: int) -> np.ndarray:
    """Count basis tokens within the window of the verb or the object,
    counted once even when both windows cover them. The verb and object
    positions themselves never contribute."""
    bindex = vocab.basis_index
    row = np.zeros(len(vocab.basis))
    for occ in occurrences:
        sentence = corpus[occ.sentence_index]
        n = len(sentence)
        vp, op = occ.verb_position, occ.object_position
        lo = max(0, min(vp, op) - window)
        hi = min(n, max(vp, op) + window + 1)
        for j in range(lo, hi):
            if j == vp or j == op:
                continue
            if abs(j - vp) > window and abs(j - op) > window:
                continue
            bj = bindex.get(sentence[j])
            if bj is not None:
                row[bj] += 1
    return row


def build_holistic_vectors(corpus, inventory: PhraseInventory,
                           vocab: Vocabulary, cfg: SpaceConfig,
                           svd_dim: int | None = None) -> HolisticPhraseSpace:
    """Raw phrase-context counts pushed through the shared LMI, normalize,
    and SVD code path. The phrase matrix is reduced in its own SVD basis, so
    its dimensionality is independent of the word space's.

    svd_dim defaults to cfg.svd_dim clamped to the matrix shape.
    """
    validate_relations(
        [occ for occs in inventory.occurrences.values() for occ in occs], corpus)
    keys = inventory.keys
    if not keys:
        raise ValueError("phrase inventory is empty")
    counts = np.zeros((len(keys), len(vocab.basis)))
    for i, key in enumerate(keys):
        counts[i] = phrase_context_counts(corpus, inventory.occurrences[key],
                                          vocab, cfg.window)
    zero_keys = tuple(keys[i] for i in range(len(keys))
                      if not counts[i].any())
    weighted = lmi_weight_dense(counts, cfg.pmi_log_base, cfg.clip_negative_lmi)
    normalized = normalize_matrix(weighted)
    k = svd_dim if svd_dim is not None else cfg.svd_dim
    k = min(k, normalized.shape[0], normalized.shape[1])
    projected, s = svd_project(normalized, k)
    return HolisticPhraseSpace(
        keys=keys, matrix=projected, weighted=True, normalized=True,
        reduced=True, singular_values=s,
        frequencies={key: inventory.frequency(key) for key in keys},
        zero_context_keys=zero_keys)


def format_phrase_key(key: tuple[str, str]) -> str:
    return f"{key[0]} {key[1]}"


def parse_phrase_key(text: str) -> tuple[str, str]:
    verb, sep, obj = text.partition(" ")
    if not sep or not verb or not obj:
        raise CorpusFormatError(f"bad phrase key {text!r}")
    return (verb, obj)
