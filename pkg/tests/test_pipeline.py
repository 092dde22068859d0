"""Pipeline orchestration: stage wiring, artifact store, provenance checks."""

import logging

import numpy as np
import pytest

from verbsense.config import parse_config_text
from verbsense.corpus import CorpusFormatError, Token
from verbsense.holistic import RelationOccurrence
from verbsense.pipeline import (
    ArtifactLayout,
    HashMismatchError,
    MissingArtifactError,
    ambiguous_plan,
    build_word_space,
    check_hash,
    collect_verb_occurrences,
    load_holistic,
    load_inventories,
    load_matrices,
    load_vocab,
    load_word_space,
    par_map,
    require,
    run_pipeline,
    save_holistic,
    save_inventories,
    save_matrices,
    save_word_space,
    sense_plan,
    split_matrix_table,
)
from verbsense.regression import VerbMatrix
from verbsense.senses import Sense, SenseInventory


# --- par_map ---------------------------------------------------------------------

def test_par_map_preserves_order():
    items = list(range(50))
    fn = lambda x: x * x
    sequential = par_map(fn, items, jobs=1)
    threaded = par_map(fn, items, jobs=4)
    assert sequential == threaded == [x * x for x in items]
    assert par_map(fn, [], jobs=4) == []
    assert par_map(fn, [3], jobs=4) == [9]


# --- layout and provenance ---------------------------------------------------------

def test_artifact_layout_paths(tmp_path):
    layout = ArtifactLayout(root=tmp_path)
    assert layout.space_tsv == tmp_path / "space.tsv"
    assert layout.vocab_json == tmp_path / "vocab.json"
    assert layout.holistic_tsv == tmp_path / "holistic.tsv"
    assert layout.sense_json("run") == tmp_path / "senses" / "run.json"
    assert layout.matrix_tsv("run", None) == (tmp_path / "matrices"
                                              / "run.ambiguous.tsv")
    assert layout.matrix_tsv("run", 2) == (tmp_path / "matrices"
                                           / "run.sense2.tsv")
    assert layout.reports_dir == tmp_path / "reports"


def test_require(tmp_path):
    existing = tmp_path / "x.txt"
    existing.write_text("", encoding="utf-8")
    assert require(existing, "build") == existing
    with pytest.raises(MissingArtifactError, match="build-space"):
        require(tmp_path / "missing.txt", "build-space")


def test_check_hash(caplog):
    check_hash("aa", "aa", "space")
    check_hash("aa", None, "space")   # legacy artifact without a stamp
    with pytest.raises(HashMismatchError):
        check_hash("aa", "bb", "space")
    with caplog.at_level(logging.WARNING):
        check_hash("aa", "bb", "space", force=True)
    assert "--force" in caplog.text


# --- in-memory stages --------------------------------------------------------------

HAND_CORPUS = (
    [[Token("v", "V"), Token("o1", "N"), Token("a", "N"), Token("b", "N")]] * 3
    + [[Token("v", "V"), Token("o2", "N"), Token("a", "N")]]
)
HAND_RELATIONS = ([RelationOccurrence("v", "o1", i, 0, 1) for i in range(3)]
                  + [RelationOccurrence("v", "o2", 3, 0, 1)])
HAND_CFG = parse_config_text("""
space.window = 5
space.basis_size = 50
space.top_exclusions = 0
space.min_occurrences = 1
space.svd_dim = 2
holistic.min_phrase_count = 2
regression.lambda = 0.01
cluster.min_exemplars = 3
""")


def test_build_word_space_clamps_reduction():
    cfg = parse_config_text("""
space.window = 5
space.basis_size = 50
space.top_exclusions = 0
space.min_occurrences = 1
space.svd_dim = 40
""")
    space, vocab = build_word_space(HAND_CORPUS, cfg.space)
    assert space.dim == min(40, len(vocab.targets), len(vocab.basis))
    assert space.reduced


def test_collect_verb_occurrences_groups():
    grouped = collect_verb_occurrences(HAND_CORPUS, HAND_RELATIONS)
    assert set(grouped) == {"v"}
    assert len(grouped["v"]) == 4
    first = grouped["v"][0]
    assert first.sentence == tuple(HAND_CORPUS[0])
    assert first.verb_position == 0 and first.obj == "o1"
    bad = [RelationOccurrence("v", "o1", 0, 0, 9)]
    with pytest.raises(CorpusFormatError):
        collect_verb_occurrences(HAND_CORPUS, bad)


def test_training_plans_sorted():
    inventories = {
        "walk": SenseInventory(verb="walk", dominant=0, senses=[
            Sense(sense_id=1, centroid=np.ones(2), objects=("x", "y", "z")),
            Sense(sense_id=0, centroid=np.ones(2), objects=("a", "b", "c")),
        ]),
        "eat": SenseInventory(verb="eat", dominant=0, senses=[
            Sense(sense_id=0, centroid=np.ones(2), objects=("m", "n", "o")),
        ]),
    }
    assert ambiguous_plan(inventories) == [
        ("eat", None, ("m", "n", "o")),
        ("walk", None, ("a", "b", "c", "x", "y", "z")),
    ]
    assert sense_plan(inventories) == [
        ("eat", 0, ("m", "n", "o")),
        ("walk", 0, ("a", "b", "c")),
        ("walk", 1, ("x", "y", "z")),
    ]


def test_split_matrix_table():
    amb = VerbMatrix(verb="run", W=np.ones((1, 1)))
    s0 = VerbMatrix(verb="run", W=np.ones((1, 1)), sense_id=0)
    ambiguous, senses = split_matrix_table({("run", None): amb,
                                            ("run", 0): s0})
    assert ambiguous == {"run": amb}
    assert senses == {("run", 0): s0}


# --- run_pipeline -----------------------------------------------------------------

def test_run_pipeline_word_space_only():
    state = run_pipeline(HAND_CFG, corpus=HAND_CORPUS, relations=None)
    assert state.word_space is not None and state.vocab is not None
    assert state.holistic is None
    assert state.inventories is None and state.matrices is None
    assert state.cfg_hash


def test_run_pipeline_without_senses():
    state = run_pipeline(HAND_CFG, corpus=HAND_CORPUS,
                         relations=HAND_RELATIONS, with_senses=False)
    assert state.holistic is not None
    assert state.inventories is None and state.matrices is None


def test_run_pipeline_filters_uncovered_objects(caplog):
    # (v, o2) appears once, below min_phrase_count=2, so it has no holistic
    # vector; the training plan must drop it with a warning and keep o1
    with caplog.at_level(logging.WARNING):
        state = run_pipeline(HAND_CFG, corpus=HAND_CORPUS,
                             relations=HAND_RELATIONS, trainer="closed_form")
    assert "lack vectors" in caplog.text
    assert state.holistic.keys == (("v", "o1"),)
    assert set(state.inventories["v"].senses[0].objects) == {"o1", "o2"}
    assert set(state.matrices) == {("v", None), ("v", 0)}


def test_run_pipeline_full_state(small_state, small_data):
    assert small_state.holistic is not None
    assert set(small_state.inventories) == {occ.verb
                                            for occ in small_data.relations}
    for (verb, sense_id), vm in small_state.matrices.items():
        assert vm.verb == verb and vm.sense_id == sense_id
        assert vm.W.shape == (small_state.holistic.dim,
                              small_state.word_space.dim)
        assert vm.config_hash == small_state.cfg_hash


def test_run_pipeline_deterministic():
    a = run_pipeline(HAND_CFG, corpus=HAND_CORPUS, relations=HAND_RELATIONS,
                     trainer="gd")
    b = run_pipeline(HAND_CFG, corpus=HAND_CORPUS, relations=HAND_RELATIONS,
                     trainer="gd")
    assert set(a.matrices) == set(b.matrices)
    for key in a.matrices:
        assert np.array_equal(a.matrices[key].W, b.matrices[key].W)
    assert np.array_equal(a.word_space.matrix, b.word_space.matrix)


# --- artifact store ----------------------------------------------------------------

def test_word_space_store_roundtrip(tmp_path, small_state):
    layout = ArtifactLayout(root=tmp_path)
    save_word_space(layout, small_state.word_space, small_state.vocab,
                    small_state.cfg_hash)
    space, found_hash = load_word_space(layout)
    assert found_hash == small_state.cfg_hash
    assert space.keys == small_state.word_space.keys
    assert np.array_equal(space.matrix, small_state.word_space.matrix)
    vocab, vocab_hash = load_vocab(layout)
    assert vocab_hash == small_state.cfg_hash
    assert vocab.targets == small_state.vocab.targets
    assert vocab.basis == small_state.vocab.basis
    assert vocab.frequencies == small_state.vocab.frequencies
    assert layout.space_manifest.exists()


def test_holistic_store_roundtrip(tmp_path, small_state):
    layout = ArtifactLayout(root=tmp_path)
    save_holistic(layout, small_state.holistic, small_state.cfg_hash)
    space, found_hash = load_holistic(layout)
    assert found_hash == small_state.cfg_hash
    assert space.keys == small_state.holistic.keys
    assert np.array_equal(space.matrix, small_state.holistic.matrix)
    assert space.frequencies == small_state.holistic.frequencies


def test_inventories_store_roundtrip(tmp_path, small_state):
    layout = ArtifactLayout(root=tmp_path)
    save_inventories(layout, small_state.inventories)
    loaded = load_inventories(layout)
    assert set(loaded) == set(small_state.inventories)
    for verb, inv in small_state.inventories.items():
        back = loaded[verb]
        assert back.dominant == inv.dominant
        assert [s.objects for s in back.senses] == [s.objects
                                                    for s in inv.senses]


def test_matrices_store_roundtrip(tmp_path, small_state):
    layout = ArtifactLayout(root=tmp_path)
    save_matrices(layout, small_state.matrices)
    loaded = load_matrices(layout)
    assert set(loaded) == set(small_state.matrices)
    for key, vm in small_state.matrices.items():
        assert np.array_equal(loaded[key].W, vm.W)
        assert loaded[key].config_hash == vm.config_hash


def test_loaders_require_artifacts(tmp_path):
    layout = ArtifactLayout(root=tmp_path / "empty")
    for loader in (load_word_space, load_vocab, load_holistic,
                   load_inventories, load_matrices):
        with pytest.raises(MissingArtifactError):
            loader(layout)
