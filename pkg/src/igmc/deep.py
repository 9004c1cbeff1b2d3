"""IGMC for classifiers: per-class posterior uncertainty at a query input.

A chain copies the training data and, ``depth`` times, retrains a small
softmax network from scratch, predicts class probabilities at the query
point, samples a pseudo-label from them and appends (query, label) to its
data. A chain's result is the class-frequency vector of its sampled
labels; the spread of those vectors across chains is the uncertainty.

Labels are 1-based throughout the public API.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from igmc import _kernels
from igmc.engine import IgmcConfig
from igmc.errors import (
    DimensionMismatch,
    InsufficientSamples,
    InvalidInput,
    NonFiniteLoss,
)
from igmc.rng import stream_seed

__all__ = [
    "LabeledDataset",
    "ClassifierParams",
    "TrainConfig",
    "ClassPosterior",
    "UncertaintyReport",
    "make_blobs",
    "blob_centers",
    "read_dataset_csv",
    "write_dataset_csv",
    "init_params",
    "loss_and_grad",
    "train_classifier",
    "predict_proba",
    "sample_label",
    "run_deep_igmc",
    "summarize_uncertainty",
]


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        x = np.ascontiguousarray(self.features, dtype=float)
        y = np.ascontiguousarray(self.labels, dtype=np.int64)
        if x.ndim != 2 or x.shape[0] == 0 or y.shape != (x.shape[0],):
            raise InvalidInput("need a non-empty (n, d) feature matrix and n labels")
        if self.num_classes < 2:
            raise InvalidInput("need at least two classes")
        if y.min() < 1 or y.max() > self.num_classes:
            raise InvalidInput(f"labels must lie in 1..{self.num_classes}")
        if not np.all(np.isfinite(x)):
            raise InvalidInput("features must be finite")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.labels.size

    def with_example(self, x: Sequence[float], label: int) -> LabeledDataset:
        x = np.asarray(x, dtype=float).reshape(1, -1)
        if x.shape[1] != self.feature_dim:
            raise DimensionMismatch(f"expected {self.feature_dim} features, got {x.shape[1]}")
        return LabeledDataset(
            np.vstack([self.features, x]), np.append(self.labels, label), self.num_classes
        )


@dataclass(frozen=True)
class ClassifierParams:
    """d -> width (ReLU) -> K logits -> softmax."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def feature_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def num_classes(self) -> int:
        return self.w2.shape[1]

    def arrays(self) -> tuple[np.ndarray, ...]:
        return (self.w1, self.b1, self.w2, self.b2)

    def copy(self) -> ClassifierParams:
        return ClassifierParams(*(a.copy() for a in self.arrays()))


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 0.002
    momentum: float = 0.9
    schedule: str = "cosine"
    batch_size: int = 4
    hidden_width: int = 16
    init_seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidInput("epochs must be >= 1")
        if not self.learning_rate > 0:
            raise InvalidInput("learning_rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidInput("momentum must lie in [0, 1)")
        if self.schedule not in ("constant", "cosine"):
            raise InvalidInput(f"unknown schedule {self.schedule!r}")
        if self.batch_size < 1 or self.hidden_width < 1:
            raise InvalidInput("batch_size and hidden_width must be >= 1")


@dataclass(frozen=True)
class ClassPosterior:
    """Per-chain label counts at the query point.

    ``counts[n, k]`` is how many of chain n's ``depth`` sampled labels were
    class k+1; each row sums to ``depth`` exactly.
    """

    counts: np.ndarray
    depth: int
    train: TrainConfig
    igmc: IgmcConfig

    @property
    def mu(self) -> np.ndarray:
        return self.counts / self.depth

    @property
    def num_classes(self) -> int:
        return self.counts.shape[1]


@dataclass(frozen=True)
class UncertaintyReport:
    mean: np.ndarray
    uncertainty: np.ndarray

    def cells(self, digits: int = 2) -> list[str]:
        """Table-style ``"percent [4 sigma^2]"`` strings, one per class."""
        return [f"{100 * m:.1f} [{u:.{digits}f}]" for m, u in zip(self.mean, self.uncertainty)]


def blob_centers(num_classes: int, separation: float, dim: int = 2) -> np.ndarray:
    """Centers on a circle with adjacent centers ``separation`` apart.

    Two classes sit at (-separation/2, 0) and (+separation/2, 0).
    """
    if dim < 2:
        raise InvalidInput("blobs need at least two dimensions")
    radius = separation / (2.0 * math.sin(math.pi / num_classes))
    angles = math.pi + 2.0 * math.pi * np.arange(num_classes) / num_classes
    centers = np.zeros((num_classes, dim))
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    # cos/sin of multiples of pi leave ~1e-16 residue; keep the symmetric case exact
    centers[np.abs(centers) < 1e-12] = 0.0
    return centers


def make_blobs(
    num_classes: int = 2,
    per_class: int = 20,
    separation: float = 6.0,
    seed: int = 0,
    dim: int = 2,
    scale: float = 1.0,
) -> LabeledDataset:
    """Isotropic Gaussian blobs, class k+1 around ``blob_centers(...)[k]``."""
    rng = np.random.default_rng(seed)
    centers = blob_centers(num_classes, separation, dim)
    xs = [c + scale * rng.standard_normal((per_class, dim)) for c in centers]
    ys = [np.full(per_class, k + 1) for k in range(num_classes)]
    return LabeledDataset(np.vstack(xs), np.concatenate(ys), num_classes)


def read_dataset_csv(path: str | Path, num_classes: int | None = None) -> LabeledDataset:
    """Read ``f1,...,fd,label`` rows (header required, labels 1-based)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1].strip() != "label":
            raise InvalidInput(f"{path}: last header column must be 'label'")
        rows = [r for r in reader if r]
    x = np.array([[float(v) for v in r[:-1]] for r in rows])
    y = np.array([int(r[-1]) for r in rows])
    return LabeledDataset(x, y, num_classes or int(y.max()))


def write_dataset_csv(data: LabeledDataset, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{i + 1}" for i in range(data.feature_dim)] + ["label"])
        for x, y in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])


def init_params(feature_dim: int, width: int, num_classes: int, rng: np.random.Generator) -> ClassifierParams:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias."""
    a = 1.0 / math.sqrt(feature_dim)
    c = 1.0 / math.sqrt(width)
    return ClassifierParams(
        rng.uniform(-a, a, (feature_dim, width)),
        rng.uniform(-a, a, width),
        rng.uniform(-c, c, (width, num_classes)),
        rng.uniform(-c, c, num_classes),
    )


def loss_and_grad(params: ClassifierParams, x: np.ndarray, labels: np.ndarray) -> tuple[float, ClassifierParams]:
    """Mean cross-entropy and its analytic gradient (labels 1-based)."""
    grads = ClassifierParams(*(np.zeros_like(a) for a in params.arrays()))
    x = np.ascontiguousarray(x, dtype=float)
    y0 = np.ascontiguousarray(labels, dtype=np.int64) - 1
    loss = _kernels.loss_grad(*params.arrays(), x, y0, *grads.arrays())
    return float(loss), grads


def train_classifier(
    data: LabeledDataset, cfg: TrainConfig, init: ClassifierParams | None = None
) -> ClassifierParams:
    """Train for exactly ``cfg.epochs`` epochs; deterministic in (data, cfg, init).

    ``cfg.init_seed`` drives both the initialization and the per-epoch
    shuffles. Passing ``init`` warm-starts from those parameters instead of
    a fresh draw.
    """
    rng = np.random.default_rng(cfg.init_seed)
    fresh = init_params(data.feature_dim, cfg.hidden_width, data.num_classes, rng)
    params = fresh if init is None else init.copy()
    if params.feature_dim != data.feature_dim or params.num_classes != data.num_classes:
        raise DimensionMismatch("initial parameters do not match the dataset shape")
    n = len(data)
    perms = np.stack([rng.permutation(n) for _ in range(cfg.epochs)])
    loss = _kernels.sgd_train(
        *params.arrays(),
        data.features,
        data.labels - 1,
        perms,
        cfg.batch_size,
        cfg.learning_rate,
        cfg.momentum,
        cfg.schedule == "cosine",
    )
    if not math.isfinite(loss) or not all(np.all(np.isfinite(a)) for a in params.arrays()):
        raise NonFiniteLoss(f"training diverged (final loss {loss}); lower the learning rate")
    for a in params.arrays():
        a.setflags(write=False)
    return params


def predict_proba(params: ClassifierParams, x: Sequence[float]) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (params.feature_dim,):
        raise DimensionMismatch(f"expected a vector of {params.feature_dim} features, got shape {x.shape}")
    h = np.maximum(x @ params.w1 + params.b1, 0.0)
    z = h @ params.w2 + params.b2
    z = np.exp(z - z.max())
    return z / z.sum()


def sample_label(p: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over classes in order 1..K; returns a 1-based label."""
    u = rng.random()
    acc = 0.0
    for k, pk in enumerate(p):
        acc += pk
        if u < acc:
            return k + 1
    # u landed in the rounding gap above the last partial sum
    return int(np.flatnonzero(np.asarray(p) > 0)[-1]) + 1


Learner = Callable[[LabeledDataset, TrainConfig], Callable[[np.ndarray], np.ndarray]]


def _mlp_learner(data: LabeledDataset, cfg: TrainConfig):
    params = train_classifier(data, cfg)
    return lambda x: predict_proba(params, x)


def _run_chain(data, x, cfg, depth, chain_seed, learner, warm_start):
    rng = np.random.Generator(np.random.PCG64(chain_seed))
    counts = np.zeros(data.num_classes, dtype=np.int64)
    params = None
    for h in range(depth):
        # init/shuffle seeds come from their own hash so rng only draws labels
        step_cfg = replace(cfg, init_seed=stream_seed(chain_seed, h))
        if learner is None:
            params = train_classifier(data, step_cfg, init=params if warm_start else None)
            p = predict_proba(params, x)
        else:
            p = learner(data, step_cfg)(x)
        y = sample_label(p, rng)
        counts[y - 1] += 1
        data = data.with_example(x, y)
    return counts


def run_deep_igmc(
    data: LabeledDataset,
    x: Sequence[float],
    cfg: TrainConfig,
    igmc: IgmcConfig,
    threads: int = 1,
    warm_start: bool = False,
    learner: Learner | None = None,
) -> ClassPosterior:
    """Run ``igmc.sample_size`` chains of ``igmc.depth`` retrain-sample-append steps.

    ``warm_start`` continues training from the previous step's parameters
    instead of re-initializing; faster, but not the reference procedure.
    ``learner`` swaps the network for any ``(data, cfg) -> predict`` factory.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (data.feature_dim,):
        raise DimensionMismatch(f"query must have {data.feature_dim} features")
    if warm_start and learner is not None:
        raise InvalidInput("warm_start only applies to the built-in network")

    def one(n: int) -> np.ndarray:
        seed = stream_seed(igmc.master_seed, n)
        return _run_chain(data, x, cfg, igmc.depth, seed, learner, warm_start)

    indices = range(igmc.sample_size)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, indices))
    else:
        rows = [one(n) for n in indices]
    counts = np.vstack(rows)
    counts.setflags(write=False)
    return ClassPosterior(counts, igmc.depth, cfg, igmc)


def summarize_uncertainty(p: ClassPosterior) -> UncertaintyReport:
    """Per-class mean frequency and 4 x (population variance) across chains."""
    if p.counts.shape[0] < 2:
        raise InsufficientSamples("need at least two chains to estimate a variance")
    mu = p.mu
    return UncertaintyReport(mu.mean(axis=0), 4.0 * mu.var(axis=0))
