"""Co-occurrence semantic spaces.

A corpus is a stream of sentences, each a list of lemma|POS tokens. Target
words are mapped to vectors of windowed co-occurrence counts over a basis of
frequent content words; counts are weighted by local mutual information
(PMI times raw count), rows are L2-normalized, and the matrix is reduced by
truncated SVD.
"""

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .metrics import cosine, pearson_r, spearman_rho

POS_TAGS = frozenset("NVJRO")
CONTENT_POS = frozenset("NVJR")


class Token(NamedTuple):
    lemma: str
    pos: str


class CorpusFormatError(ValueError):
    """A corpus, stop list, or dataset file violates its format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCorpusError(ValueError):
    pass


def parse_token(text: str, line: int | None = None) -> Token:
    lemma, sep, pos = text.rpartition("|")
    if not sep or not lemma or pos not in POS_TAGS:
        raise CorpusFormatError(f"unreadable token {text!r}", line)
    return Token(lemma, pos)


def read_corpus(path) -> list[list[Token]]:
    """Load a one-sentence-per-line corpus of space-separated lemma|POS
    tokens. Blank lines are skipped."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            sentences.append([parse_token(t, line_no) for t in line.split(" ")])
    return sentences


def read_stoplist(path) -> frozenset[str]:
    """One excluded lemma per line; blank lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(line.strip() for line in fh if line.strip())


@dataclass(frozen=True)
class SpaceConfig:
    window: int = 5
    basis_size: int = 2000
    top_exclusions: int = 50
    min_occurrences: int = 100
    svd_dim: int = 300
    pmi_log_base: float = math.e
    clip_negative_lmi: bool = False

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.basis_size < 1:
            raise ValueError("basis_size must be >= 1")
        if self.top_exclusions < 0:
            raise ValueError("top_exclusions must be >= 0")
        if self.min_occurrences < 1:
            raise ValueError("min_occurrences must be >= 1")
        if self.svd_dim < 1:
            raise ValueError("svd_dim must be >= 1")
        if self.svd_dim > self.basis_size:
            raise ValueError("svd_dim must not exceed basis_size")
        if self.pmi_log_base <= 1.0:
            raise ValueError("pmi_log_base must be > 1")


@dataclass(frozen=True)
class Vocabulary:
    """Target rows and basis columns of a co-occurrence matrix.

    Both lists are ordered by descending corpus frequency with lexicographic
    (lemma, pos) tie-breaks, so vocabulary construction is deterministic.
    """

    targets: tuple[Token, ...]
    basis: tuple[Token, ...]
    stop: frozenset[str]
    frequencies: dict[Token, int]
    target_index: dict[Token, int] = field(init=False, repr=False)
    basis_index: dict[Token, int] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "target_index",
                           {t: i for i, t in enumerate(self.targets)})
        object.__setattr__(self, "basis_index",
                           {t: i for i, t in enumerate(self.basis)})


def _freq_order(tokens_with_freq):
    return sorted(tokens_with_freq, key=lambda kv: (-kv[1], kv[0]))


def build_vocabulary(corpus, cfg: SpaceConfig, stop: frozenset[str] = frozenset()) -> Vocabulary:
    """Select target and basis words from corpus frequencies.

    Targets are all words occurring at least cfg.min_occurrences times. The
    basis is the cfg.basis_size most frequent content words after removing
    stop-list lemmas and then the cfg.top_exclusions most frequent of what
    remains; if fewer words are eligible the basis is simply all of them.
    """
    freq: dict[Token, int] = {}
    for sentence in corpus:
        for tok in sentence:
            freq[tok] = freq.get(tok, 0) + 1
    if not freq:
        raise EmptyCorpusError("corpus has no tokens, vocabulary would be empty")

    targets = tuple(t for t, _ in _freq_order(freq.items())
                    if freq[t] >= cfg.min_occurrences)
    content = [(t, n) for t, n in freq.items()
               if t.pos in CONTENT_POS and t.lemma not in stop]
    ranked = [t for t, _ in _freq_order(content)]
    basis = tuple(ranked[cfg.top_exclusions:cfg.top_exclusions + cfg.basis_size])
    if not targets:
        raise EmptyCorpusError(
            f"no word reaches min_occurrences={cfg.min_occurrences}")
    if not basis:
        raise EmptyCorpusError("no content words eligible for the basis")
    return Vocabulary(targets=targets, basis=basis, stop=stop, frequencies=freq)


@dataclass
class CooccurrenceMatrix:
    """Sparse counts keyed by (target_row, basis_column)."""

    vocab: Vocabulary
    counts: dict[tuple[int, int], int]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((len(self.vocab.targets), len(self.vocab.basis)))
        for (i, j), n in self.counts.items():
            dense[i, j] = n
        return dense


def count_cooccurrences(corpus, vocab: Vocabulary, cfg: SpaceConfig) -> CooccurrenceMatrix:
    """Windowed co-occurrence counts.

    A target at position i co-occurs with every basis token at position j
    with 1 <= |i - j| <= cfg.window in the same sentence; windows never
    cross sentence boundaries. A token does not co-occur with itself at its
    own position, but other occurrences of the same word do count.
    """
    tindex = vocab.target_index
    bindex = vocab.basis_index
    w = cfg.window
    counts: dict[tuple[int, int], int] = {}
    for sentence in corpus:
        positions = [(tindex.get(tok), bindex.get(tok)) for tok in sentence]
        n = len(sentence)
        for i, (ti, _) in enumerate(positions):
            if ti is None:
                continue
            lo = max(0, i - w)
            hi = min(n, i + w + 1)
            for j in range(lo, hi):
                if j == i:
                    continue
                bj = positions[j][1]
                if bj is None:
                    continue
                key = (ti, bj)
                counts[key] = counts.get(key, 0) + 1
    return CooccurrenceMatrix(vocab=vocab, counts=counts)


def merge_counts(a: CooccurrenceMatrix, b: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Combine partial counts from corpus shards. Order-independent."""
    if a.vocab is not b.vocab and (a.vocab.targets != b.vocab.targets
                                   or a.vocab.basis != b.vocab.basis):
        raise ValueError("cannot merge counts over different vocabularies")
    merged = dict(a.counts)
    for key, n in b.counts.items():
        merged[key] = merged.get(key, 0) + n
    return CooccurrenceMatrix(vocab=a.vocab, counts=merged)


@dataclass
class SemanticSpace:
    """Vectors for an ordered key list, plus processing provenance flags."""

    keys: tuple
    matrix: np.ndarray
    weighted: bool = False
    normalized: bool = False
    reduced: bool = False
    singular_values: np.ndarray | None = None
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.keys):
            raise ValueError("matrix rows must match the key list")
        self.index = {k: i for i, k in enumerate(self.keys)}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, key) -> bool:
        return key in self.index

    def vector(self, key) -> np.ndarray:
        try:
            return self.matrix[self.index[key]]
        except KeyError:
            raise KeyError(f"{key!r} not in space") from None

    def validate(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("space contains non-finite entries")
        if self.normalized and not self.reduced:
            norms = np.linalg.norm(self.matrix, axis=1)
            nonzero = norms > 0
            if not np.allclose(norms[nonzero], 1.0, atol=1e-9):
                raise ValueError("normalized space has rows with norm != 1")


def lmi_weight_dense(counts: np.ndarray, log_base: float = math.e,
                     clip_negative: bool = False) -> np.ndarray:
    """Local mutual information: count * log(p(t,c) / (p(t) p(c))) with
    probabilities taken from matrix marginals over the grand total. Cells
    with zero count stay zero."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise ValueError("grand total of counts is zero, LMI undefined")
    row = counts.sum(axis=1, keepdims=True)
    col = counts.sum(axis=0, keepdims=True)
    out = np.zeros_like(counts)
    nz = counts > 0
    rows_b = np.broadcast_to(row, counts.shape)
    cols_b = np.broadcast_to(col, counts.shape)
    # log(n * N / (row_total * col_total)) restricted to nonzero cells
    ratio = counts[nz] * total / (rows_b[nz] * cols_b[nz])
    out[nz] = counts[nz] * np.log(ratio) / math.log(log_base)
    if clip_negative:
        np.maximum(out, 0.0, out=out)
    return out


def weight_lmi(cm: CooccurrenceMatrix, cfg: SpaceConfig) -> SemanticSpace:
    dense = cm.to_dense()
    weighted = lmi_weight_dense(dense, cfg.pmi_log_base, cfg.clip_negative_lmi)
    return SemanticSpace(keys=tuple(cm.vocab.targets), matrix=weighted,
                         weighted=True)


def normalize_matrix(matrix: np.ndarray) -> np.ndarray:
    """Scale every nonzero row to unit L2 norm; zero rows pass through."""
    matrix = np.asarray(matrix, dtype=float)
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return matrix / safe


def normalize_rows(space: SemanticSpace) -> SemanticSpace:
    return SemanticSpace(keys=space.keys, matrix=normalize_matrix(space.matrix),
                         weighted=space.weighted, normalized=True,
                         reduced=space.reduced,
                         singular_values=space.singular_values)


def svd_project(matrix: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Project rows onto the top k left singular directions scaled by their
    singular values (rows of U_k @ diag(S_k)).

    Signs are fixed by forcing the largest-magnitude entry of each right
    singular vector positive, so the projection is deterministic. Singular
    values below the usual rank tolerance are zeroed, which makes components
    beyond the numerical rank exactly zero.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("svd_project expects a 2-d matrix")
    rows, cols = matrix.shape
    if k < 1 or k > min(rows, cols):
        raise ValueError(f"k={k} outside [1, {min(rows, cols)}]")
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    for j in range(s.size):
        pivot = np.argmax(np.abs(vt[j]))
        if vt[j, pivot] < 0:
            vt[j] = -vt[j]
            u[:, j] = -u[:, j]
    if s.size and s[0] > 0:
        tol = s[0] * max(rows, cols) * np.finfo(float).eps
        s = np.where(s < tol, 0.0, s)
    return u[:, :k] * s[:k], s[:k]


def reduce_svd(space: SemanticSpace, k: int) -> SemanticSpace:
    projected, s = svd_project(space.matrix, k)
    return SemanticSpace(keys=space.keys, matrix=projected,
                         weighted=space.weighted, normalized=space.normalized,
                         reduced=True, singular_values=s)


# --- serialization ------------------------------------------------------

def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def format_word_key(tok: Token) -> str:
    return f"{tok.lemma}|{tok.pos}"


def parse_word_key(text: str) -> Token:
    return parse_token(text)


def write_space_tsv(space: SemanticSpace, path, key_formatter=format_word_key,
                    config_hash: str | None = None):
    """TSV with a '#dim <d>' header then one key<TAB>floats row per vector.
    Extra '#name value' header lines carry provenance and are skipped by
    readers that do not know them."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#dim {space.dim}\n")
        if config_hash is not None:
            fh.write(f"#config {config_hash}\n")
        flags = []
        if space.weighted:
            flags.append("weighted")
        if space.normalized:
            flags.append("normalized")
        if space.reduced:
            flags.append("reduced")
        if flags:
            fh.write(f"#flags {','.join(flags)}\n")
        for key, row in zip(space.keys, space.matrix):
            vals = "\t".join(_format_float(v) for v in row)
            fh.write(f"{key_formatter(key)}\t{vals}\n")


def read_space_tsv(path, key_parser=parse_word_key) -> tuple[SemanticSpace, dict]:
    """Load a space written by write_space_tsv. Returns the space and the
    raw header fields."""
    path = Path(path)
    headers: dict[str, str] = {}
    keys = []
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if rows or keys:
                    raise CorpusFormatError("header after data rows", line_no)
                name, _, value = line[1:].partition(" ")
                headers[name] = value
                continue
            parts = line.split("\t")
            if "dim" not in headers:
                raise CorpusFormatError("missing #dim header", line_no)
            dim = int(headers["dim"])
            if len(parts) != dim + 1:
                raise CorpusFormatError(
                    f"expected {dim} values, found {len(parts) - 1}", line_no)
            keys.append(key_parser(parts[0]))
            rows.append([float(v) for v in parts[1:]])
    if "dim" not in headers:
        raise CorpusFormatError("missing #dim header")
    dim = int(headers["dim"])
    matrix = np.array(rows, dtype=float) if rows else np.zeros((0, dim))
    if matrix.size and matrix.shape[1] != dim:
        raise CorpusFormatError("row width does not match #dim")
    flags = set(headers.get("flags", "").split(",")) if headers.get("flags") else set()
    return SemanticSpace(keys=tuple(keys), matrix=matrix,
                         weighted="weighted" in flags,
                         normalized="normalized" in flags,
                         reduced="reduced" in flags), headers


# --- word similarity scoring --------------------------------------------

@dataclass(frozen=True)
class WordSimResult:
    spearman: float
    pearson: float
    used: int
    skipped: int


def read_wordsim_pairs(path) -> list[tuple[str, str, float]]:
    """TSV rows word1<TAB>word2<TAB>score. Words may carry an explicit
    |POS suffix."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusFormatError("expected word1<TAB>word2<TAB>score", line_no)
            try:
                score = float(parts[2])
            except ValueError:
                raise CorpusFormatError(f"bad score {parts[2]!r}", line_no) from None
            pairs.append((parts[0], parts[1], score))
    return pairs


def _lookup_word(space: SemanticSpace, word: str) -> np.ndarray | None:
    if "|" in word:
        tok = parse_token(word)
        return space.vector(tok) if tok in space else None
    noun = Token(word, "N")
    if noun in space:
        return space.vector(noun)
    for key in space.keys:
        if isinstance(key, Token) and key.lemma == word:
            return space.vector(key)
    return None


def evaluate_wordsim(space: SemanticSpace, pairs) -> WordSimResult:
    """Spearman and Pearson correlation between human scores and vector
    cosines. Pairs with a word missing from the space are skipped; fewer
    than 2 scorable pairs is an error.

    Bare words resolve to their N-tagged entry, falling back to the most
    frequent entry with the same lemma.
    """
    sims = []
    gold = []
    skipped = 0
    for w1, w2, score in pairs:
        v1 = _lookup_word(space, w1)
        v2 = _lookup_word(space, w2)
        if v1 is None or v2 is None:
            skipped += 1
            continue
        sims.append(cosine(v1, v2))
        gold.append(score)
    if len(sims) < 2:
        raise ValueError(f"only {len(sims)} scorable pairs, need at least 2")
    return WordSimResult(spearman=spearman_rho(sims, gold),
                         pearson=pearson_r(sims, gold),
                         used=len(sims), skipped=skipped)
