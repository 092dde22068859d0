"""Holistic phrase vectors: relation parsing, context windows, SVD clamp."""

import numpy as np
import pytest

import oracles
from verbsense.corpus import CorpusFormatError, SpaceConfig, Token, build_vocabulary
from verbsense.holistic import (
    RelationOccurrence,
    build_holistic_vectors,
    collect_phrases,
    format_phrase_key,
    parse_phrase_key,
    phrase_context_counts,
    read_relations,
    validate_relations,
)


def make_corpus_with_relations(rng, n_sentences=12, fillers=6):
    """Sentences of filler nouns with one verb-object occurrence planted at
    random distinct positions."""
    vocab_pool = [Token(f"w{i}", "N") for i in range(fillers)]
    corpus, relations = [], []
    for s in range(n_sentences):
        length = int(rng.integers(4, 10))
        sent = [vocab_pool[int(k)] for k in rng.integers(fillers, size=length)]
        vp, op = rng.choice(length, size=2, replace=False)
        verb = f"v{int(rng.integers(2))}"
        obj = f"o{int(rng.integers(3))}"
        sent[vp] = Token(verb, "V")
        sent[op] = Token(obj, "N")
        corpus.append(sent)
        relations.append(RelationOccurrence(verb, obj, s, int(vp), int(op)))
    return corpus, relations


# --- relation file parsing --------------------------------------------------------

def test_read_relations_roundtrip(tmp_path):
    path = tmp_path / "rel.tsv"
    path.write_text("# comment\nrun\tdog\t0\t1\t3\n\neat\tcake\t2\t0\t4\n",
                    encoding="utf-8")
    rows = read_relations(path)
    assert rows == [RelationOccurrence("run", "dog", 0, 1, 3),
                    RelationOccurrence("eat", "cake", 2, 0, 4)]


def test_read_relations_field_count(tmp_path):
    path = tmp_path / "rel.tsv"
    path.write_text("run\tdog\t0\t1\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError, match="line 1"):
        read_relations(path)


def test_read_relations_non_integer(tmp_path):
    path = tmp_path / "rel.tsv"
    path.write_text("run\tdog\tzero\t1\t3\n", encoding="utf-8")
    with pytest.raises(CorpusFormatError):
        read_relations(path)


# --- validation -------------------------------------------------------------------

CORPUS = [[Token("the", "O"), Token("run", "V"), Token("big", "J"),
           Token("dog", "N")]]


def test_validate_relations_accepts_good():
    validate_relations([RelationOccurrence("run", "dog", 0, 1, 3)], CORPUS)


@pytest.mark.parametrize("occ,fragment", [
    (RelationOccurrence("run", "dog", 5, 1, 3), "dangling"),
    (RelationOccurrence("run", "dog", 0, 9, 3), "outside"),
    (RelationOccurrence("run", "dog", 0, 1, 9), "outside"),
    (RelationOccurrence("walk", "dog", 0, 1, 3), "expected walk|V"),
    (RelationOccurrence("run", "dog", 0, 2, 3), "expected run|V"),
    (RelationOccurrence("run", "big", 0, 1, 2), "expected big|N"),
])
def test_validate_relations_rejects(occ, fragment):
    with pytest.raises(CorpusFormatError, match=fragment.replace("|", r"\|")):
        validate_relations([occ], CORPUS)


# --- phrase collection ------------------------------------------------------------

def test_collect_phrases_order_and_threshold():
    occs = [RelationOccurrence("a", "x", 0, 0, 1),
            RelationOccurrence("b", "y", 1, 0, 1),
            RelationOccurrence("a", "x", 2, 0, 1),
            RelationOccurrence("c", "z", 3, 0, 1)]
    inv = collect_phrases(occs, min_phrase_count=2)
    assert inv.keys == (("a", "x"),)
    assert inv.frequency(("a", "x")) == 2
    inv_all = collect_phrases(occs, min_phrase_count=1)
    assert inv_all.keys == (("a", "x"), ("b", "y"), ("c", "z"))
    with pytest.raises(ValueError):
        collect_phrases(occs, min_phrase_count=0)


# --- context window counting -----------------------------------------------------

def test_phrase_context_counts_union_once():
    # c sits inside both windows and is counted once; v and o are excluded
    corpus = [[Token("x", "N"), Token("v", "V"), Token("c", "N"),
               Token("o", "N"), Token("y", "N")]]
    cfg = SpaceConfig(window=2, basis_size=50, top_exclusions=0,
                      min_occurrences=1, svd_dim=1)
    vocab = build_vocabulary(corpus, cfg)
    occ = RelationOccurrence("v", "o", 0, 1, 3)
    row = phrase_context_counts(corpus, [occ], vocab, window=2)
    counts = {vocab.basis[i]: row[i] for i in range(len(vocab.basis))
              if row[i]}
    assert counts == {Token("x", "N"): 1.0, Token("c", "N"): 1.0,
                      Token("y", "N"): 1.0}


def test_phrase_context_counts_other_copies_count():
    # the verb's own position is skipped, other tokens of the same lemma count
    corpus = [[Token("v", "V"), Token("o", "N"), Token("v", "V")]]
    cfg = SpaceConfig(window=2, basis_size=50, top_exclusions=0,
                      min_occurrences=1, svd_dim=1)
    vocab = build_vocabulary(corpus, cfg)
    row = phrase_context_counts(
        corpus, [RelationOccurrence("v", "o", 0, 0, 1)], vocab, window=2)
    assert row[vocab.basis_index[Token("v", "V")]] == 1.0


def test_phrase_context_counts_matches_reference():
    rng = np.random.default_rng(61)
    for _ in range(15):
        corpus, relations = make_corpus_with_relations(rng)
        cfg = SpaceConfig(window=int(rng.integers(1, 4)), basis_size=50,
                          top_exclusions=0, min_occurrences=1, svd_dim=1)
        vocab = build_vocabulary(corpus, cfg)
        inv = collect_phrases(relations, min_phrase_count=1)
        for key in inv.keys:
            ours = phrase_context_counts(corpus, inv.occurrences[key],
                                         vocab, cfg.window)
            ref = oracles.phrase_window_counts(corpus, inv.occurrences[key],
                                               vocab.basis, cfg.window)
            assert np.array_equal(ours, ref)


# --- space construction -----------------------------------------------------------

def test_build_holistic_vectors_shapes_and_clamp():
    rng = np.random.default_rng(67)
    corpus, relations = make_corpus_with_relations(rng, n_sentences=10)
    cfg = SpaceConfig(window=2, basis_size=50, top_exclusions=0,
                      min_occurrences=1, svd_dim=40)
    vocab = build_vocabulary(corpus, cfg)
    inv = collect_phrases(relations, min_phrase_count=1)
    space = build_holistic_vectors(corpus, inv, vocab, cfg)
    n = len(inv.keys)
    assert space.matrix.shape == (n, min(40, n, len(vocab.basis)))
    assert space.reduced and space.weighted and space.normalized
    assert space.keys == inv.keys
    assert space.frequencies == {k: inv.frequency(k) for k in inv.keys}
    explicit = build_holistic_vectors(corpus, inv, vocab, cfg, svd_dim=2)
    assert explicit.matrix.shape == (n, 2)


def test_build_holistic_vectors_zero_context_keys():
    corpus = [[Token("v", "V"), Token("o", "N")],
              [Token("x", "N"), Token("w", "V"), Token("u", "N"),
               Token("y", "N")]]
    relations = [RelationOccurrence("v", "o", 0, 0, 1),
                 RelationOccurrence("w", "u", 1, 1, 2)]
    cfg = SpaceConfig(window=1, basis_size=50, top_exclusions=0,
                      min_occurrences=1, svd_dim=1)
    vocab = build_vocabulary(corpus, cfg)
    inv = collect_phrases(relations, min_phrase_count=1)
    space = build_holistic_vectors(corpus, inv, vocab, cfg)
    assert space.zero_context_keys == (("v", "o"),)
    assert not space.matrix[0].any()


def test_build_holistic_vectors_rejects_bad_input():
    corpus = [[Token("v", "V"), Token("o", "N"), Token("x", "N")]]
    cfg = SpaceConfig(window=1, basis_size=50, top_exclusions=0,
                      min_occurrences=1, svd_dim=1)
    vocab = build_vocabulary(corpus, cfg)
    with pytest.raises(ValueError):
        build_holistic_vectors(
            corpus, collect_phrases([], min_phrase_count=1), vocab, cfg)
    bad = collect_phrases([RelationOccurrence("v", "o", 0, 0, 2)],
                          min_phrase_count=1)
    with pytest.raises(CorpusFormatError):
        build_holistic_vectors(corpus, bad, vocab, cfg)


# --- key formatting ---------------------------------------------------------------

def test_phrase_key_roundtrip():
    assert parse_phrase_key(format_phrase_key(("run", "dog"))) == ("run", "dog")
    for bad in ("", "run", " dog", "run "):
        with pytest.raises(CorpusFormatError):
            parse_phrase_key(bad)
