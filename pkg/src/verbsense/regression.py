"""Verb matrices by multivariate ridge regression.

A verb is a linear map from object-noun vectors to holistic phrase vectors.
With X (m x d_n) stacking object vectors and Y (m x d_p) stacking the
corresponding phrase vectors, the objective is

    J(W) = (1 / 2m) * (||W X^T - Y^T||_F^2 + lambda * ||W||_F^2)

minimized either by full-batch (or per-example stochastic) gradient descent
or in closed form W = Y^T X (X^T X + lambda I)^-1.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import CorpusFormatError


class DivergenceError(RuntimeError):
    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(
            f"training diverged at iteration {iteration}: loss is not finite "
            "(reduce the learning rate)")


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class RegressionConfig:
    lam: float = 1.0
    learning_rate: float = 0.1
    max_iters: int = 5000
    tol: float = 1e-7
    init: str = "zero"
    init_scale: float = 0.01
    mode: str = "full_batch"
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.init not in ("zero", "gaussian"):
            raise ValueError("init must be 'zero' or 'gaussian'")
        if self.mode not in ("full_batch", "stochastic"):
            raise ValueError("mode must be 'full_batch' or 'stochastic'")


@dataclass(frozen=True)
class TrainingSet:
    """Aligned object vectors X (m x d_n) and phrase vectors Y (m x d_p).
    Row order is part of the identity of the set; builders sort objects
    lexicographically so the same object set always yields the same rows."""

    X: np.ndarray
    Y: np.ndarray
    objects: tuple[str, ...] | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        Y = np.asarray(self.Y, dtype=float)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        if X.ndim != 2 or Y.ndim != 2:
            raise ValueError("X and Y must be 2-d")
        if X.shape[0] != Y.shape[0]:
            raise ValueError(
                f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        if X.shape[0] < 1:
            raise ValueError("training set needs at least one example")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("training set contains non-finite values")
        if self.objects is not None and len(self.objects) != X.shape[0]:
            raise ValueError("object labels must align with rows")

    @property
    def m(self) -> int:
        return self.X.shape[0]


@dataclass
class VerbMatrix:
    verb: str
    W: np.ndarray
    sense_id: int | None = None
    final_loss: float | None = None
    initial_loss: float | None = None
    iterations: int | None = None
    config_hash: str | None = None

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=float)
        if self.W.ndim != 2:
            raise ValueError("W must be 2-d")


def loss(W: np.ndarray, ts: TrainingSet, lam: float) -> float:
    W = np.asarray(W, dtype=float)
    resid = W @ ts.X.T - ts.Y.T
    return float((np.sum(resid * resid) + lam * np.sum(W * W)) / (2 * ts.m))


def gradient(W: np.ndarray, ts: TrainingSet, lam: float) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    resid = W @ ts.X.T - ts.Y.T
    return (resid @ ts.X + lam * W) / ts.m


def _initial_matrix(shape, cfg: RegressionConfig) -> np.ndarray:
    if cfg.init == "zero":
        return np.zeros(shape)
    rng = np.random.default_rng(cfg.seed)
    return rng.normal(0.0, cfg.init_scale, size=shape)


def train_gd(ts: TrainingSet, cfg: RegressionConfig, verb: str = "",
             sense_id: int | None = None) -> VerbMatrix:
    """Gradient descent on the ridge objective.

    Full-batch mode updates W with the exact gradient once per iteration.
    Stochastic mode shuffles the example order each epoch with the seeded
    generator and applies one per-example update per visit; max_iters then
    counts epochs. Training stops when the relative loss change drops below
    cfg.tol or the iteration budget runs out, and raises DivergenceError the
    moment the loss stops being finite.
    """
    d_p = ts.Y.shape[1]
    d_n = ts.X.shape[1]
    W = _initial_matrix((d_p, d_n), cfg)
    rng = np.random.default_rng(cfg.seed)
    prev = loss(W, ts, cfg.lam)
    initial = prev
    iterations = 0
    for it in range(1, cfg.max_iters + 1):
        if cfg.mode == "full_batch":
            W = W - cfg.learning_rate * gradient(W, ts, cfg.lam)
        else:
            for i in rng.permutation(ts.m):
                x = ts.X[i]
                y = ts.Y[i]
                resid = W @ x - y
                W = W - cfg.learning_rate * (np.outer(resid, x)
                                             + (cfg.lam / ts.m) * W)
        current = loss(W, ts, cfg.lam)
        iterations = it
        if not np.isfinite(current):
            raise DivergenceError(it)
        if prev > 0 and abs(prev - current) / prev < cfg.tol:
            prev = current
            break
        prev = current
    return VerbMatrix(verb=verb, W=W, sense_id=sense_id, final_loss=prev,
                      initial_loss=initial, iterations=iterations)


def closed_form(ts: TrainingSet, lam: float, verb: str = "",
                sense_id: int | None = None) -> VerbMatrix:
    """Ridge solution W = Y^T X (X^T X + lambda I)^-1.

    With lam = 0 the normal matrix must be invertible; a singular system
    raises SingularSystemError advising a positive lambda.
    """
    d_n = ts.X.shape[1]
    gram = ts.X.T @ ts.X + lam * np.eye(d_n)
    if lam == 0.0 and np.linalg.matrix_rank(gram) < d_n:
        raise SingularSystemError(
            "X^T X is singular with lambda = 0; use lambda > 0")
    try:
        Wt = np.linalg.solve(gram, ts.X.T @ ts.Y)
    except np.linalg.LinAlgError as err:
        raise SingularSystemError(
            "normal equations are singular; use lambda > 0") from err
    W = Wt.T
    return VerbMatrix(verb=verb, W=W, sense_id=sense_id,
                      final_loss=loss(W, ts, lam), iterations=0)


def apply_verb(vm: VerbMatrix, noun_vector: np.ndarray) -> np.ndarray:
    noun_vector = np.asarray(noun_vector, dtype=float)
    if noun_vector.shape != (vm.W.shape[1],):
        raise ValueError(
            f"noun vector has shape {noun_vector.shape}, verb matrix expects "
            f"({vm.W.shape[1]},)")
    return vm.W @ noun_vector


# --- serialization ------------------------------------------------------

def write_matrix_tsv(vm: VerbMatrix, path, config_hash: str | None = None):
    """Header '#verb <lemma> #sense <id|-> #rows <d_p> #cols <d_n>' then one
    tab-separated row of 17-significant-digit floats per matrix row."""
    path = Path(path)
    sense = "-" if vm.sense_id is None else str(vm.sense_id)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#verb {vm.verb} #sense {sense} "
                 f"#rows {vm.W.shape[0]} #cols {vm.W.shape[1]}\n")
        if config_hash is not None:
            fh.write(f"#config {config_hash}\n")
        for row in vm.W:
            fh.write("\t".join(format(v, ".17g") for v in row) + "\n")


def read_matrix_tsv(path) -> VerbMatrix:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        fields = header.split(" ")
        if (len(fields) != 8 or fields[0] != "#verb" or fields[2] != "#sense"
                or fields[4] != "#rows" or fields[6] != "#cols"):
            raise CorpusFormatError(f"bad matrix header {header!r}", 1)
        verb = fields[1]
        sense_id = None if fields[3] == "-" else int(fields[3])
        n_rows, n_cols = int(fields[5]), int(fields[7])
        config_hash = None
        rows = []
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#config "):
                config_hash = line.split(" ", 1)[1]
                continue
            values = [float(v) for v in line.split("\t")]
            if len(values) != n_cols:
                raise CorpusFormatError(
                    f"expected {n_cols} values, found {len(values)}", line_no)
            rows.append(values)
    if len(rows) != n_rows:
        raise CorpusFormatError(f"expected {n_rows} rows, found {len(rows)}")
    return VerbMatrix(verb=verb, W=np.array(rows), sense_id=sense_id,
                      config_hash=config_hash)
