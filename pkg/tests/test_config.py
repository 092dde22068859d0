"""Configuration parsing, validation, and hashing."""

import math

import pytest

from verbsense.config import (
    ConfigError,
    PipelineConfig,
    config_hash,
    load_config,
    parse_config_text,
)

FULL = """\
# pipeline settings
seed = 7
paths.corpus = data/corpus.txt
paths.relations = data/relations.tsv
space.window = 3
space.basis_size = 500
space.top_exclusions = 10
space.min_occurrences = 2
space.svd_dim = 40
space.pmi_log_base = e
space.clip_negative_lmi = yes
holistic.min_phrase_count = 5
holistic.svd_dim = 24
regression.lambda = 0.001   # alias for the ridge penalty
regression.learning_rate = 0.5
regression.max_iters = 4000
regression.tol = 1e-9
regression.mode = full_batch
cluster.distance = pearson
cluster.k_min = 2
cluster.k_max = 8
cluster.min_exemplars = 3
"""


def test_parse_full_config():
    cfg = parse_config_text(FULL, base_dir="/tmp/x")
    assert cfg.seed == 7
    assert cfg.paths.corpus == "data/corpus.txt"
    assert cfg.space.window == 3
    assert cfg.space.pmi_log_base == math.e
    assert cfg.space.clip_negative_lmi is True
    assert cfg.regression.lam == 0.001
    assert cfg.cluster.k_max == 8
    assert cfg.holistic.svd_dim == 24


def test_parse_defaults_from_empty():
    cfg = parse_config_text("")
    assert cfg == PipelineConfig(base_dir=cfg.base_dir)
    assert cfg.seed == 0
    assert cfg.space.svd_dim == 300
    assert cfg.regression.lam == 1.0


def test_holistic_svd_dim_inherits():
    cfg = parse_config_text("space.svd_dim = 50\n")
    assert cfg.holistic_svd_dim == 50
    cfg = parse_config_text("space.svd_dim = 50\nholistic.svd_dim = 20\n")
    assert cfg.holistic_svd_dim == 20


def test_resolve_paths():
    cfg = parse_config_text("paths.corpus = sub/c.txt\n", base_dir="/data")
    assert str(cfg.resolve(cfg.paths.corpus)) == "/data/sub/c.txt"
    assert str(cfg.resolve("/abs/c.txt")) == "/abs/c.txt"


@pytest.mark.parametrize("text,fragment", [
    ("space.window 5\n", "key = value"),
    ("space.window =\n", "empty key or value"),
    ("= 5\n", "empty key or value"),
    ("window = 5\n", "unknown key"),
    ("rocket.fuel = 5\n", "unknown section"),
    ("space.windows = 5\n", "unknown key"),
    ("seed = 1\nspace.window = 2\nspace.window = 3\n", "duplicate"),
    ("seed = x\n", "expected an integer"),
    ("space.pmi_log_base = pi\n", "expected a number"),
    ("space.clip_negative_lmi = maybe\n", "expected a boolean"),
    ("space.window = 0\n", "section 'space'"),
    ("regression.lambda = -1\n", "section 'regression'"),
    ("cluster.k_min = 1\n", "section 'cluster'"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config_text(text)


def test_bool_spellings():
    for spelling, expected in (("true", True), ("1", True), ("yes", True),
                               ("false", False), ("0", False), ("no", False)):
        cfg = parse_config_text(f"space.clip_negative_lmi = {spelling}\n")
        assert cfg.space.clip_negative_lmi is expected


def test_load_config(tmp_path):
    path = tmp_path / "pipeline.cfg"
    path.write_text(FULL, encoding="utf-8")
    cfg = load_config(path)
    assert cfg.seed == 7
    assert cfg.base_dir == tmp_path
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.cfg")


# --- hashing ---------------------------------------------------------------------

def test_config_hash_stable_format():
    h = config_hash(parse_config_text(FULL))
    assert len(h) == 16 and all(c in "0123456789abcdef" for c in h)
    assert h == config_hash(parse_config_text(FULL))


def test_config_hash_ignores_paths_and_base_dir():
    base = config_hash(parse_config_text("seed = 3\n", base_dir="/a"))
    moved = config_hash(parse_config_text(
        "seed = 3\npaths.corpus = elsewhere.txt\n", base_dir="/b"))
    assert base == moved


def test_config_hash_sensitive_to_settings():
    base = config_hash(parse_config_text("seed = 3\n"))
    assert base != config_hash(parse_config_text("seed = 4\n"))
    assert base != config_hash(parse_config_text(
        "seed = 3\nspace.window = 4\n"))
    assert base != config_hash(parse_config_text(
        "seed = 3\nregression.lambda = 0.5\n"))
