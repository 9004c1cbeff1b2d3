"""Experiment runners behind the CLI.

Each runner takes plain parameters and returns ``{filename: bytes}``;
nothing here touches the filesystem, which keeps determinism checks and
manifest replays a matter of comparing dictionaries.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from igmc import deep
from igmc.ecdf import dkw_band, ks_distance, l1_distance_step_ref
from igmc.engine import IgmcConfig, posterior_cdf, run_igmc
from igmc.errors import InvalidCounts, InvalidInput
from igmc.generative import BERNOULLI, EXPONENTIAL, SampleSet, Support
from igmc.io import csv_bytes, json_bytes
from igmc.reference import BetaRef, GammaRef, quantile, igmc_l1_bound

log = logging.getLogger(__name__)

GRID_POINTS = 512
DEFAULT_SWEEP = ((10, 10), (100, 100), (1000, 1000))

Artifacts = dict[str, bytes]


def bernoulli_sample_set(m: int, a: int) -> SampleSet:
    if m < 1 or not 0 <= a <= m:
        raise InvalidCounts(f"need 0 <= a <= m and m >= 1 (got m={m}, a={a})")
    return SampleSet([1.0] * a + [0.0] * (m - a), Support.BINARY)


def exponential_sample_set(m: int, mean: float) -> SampleSet:
    """m copies of ``mean``: the exponential fit only sees the sample mean."""
    if m < 1:
        raise InvalidInput("m must be >= 1")
    if not (mean > 0 and math.isfinite(mean)):
        raise InvalidInput("mean must be positive and finite")
    return SampleSet([mean] * m, Support.NONNEG_REALS)


def _curve_files(post, ref, grid_hi: float, meta: str) -> Artifacts:
    f_hat = posterior_cdf(post)
    rows = [
        (t, c, None if ref is None else ref(t))
        for t, c in zip(f_hat.breakpoints.tolist(), f_hat.cumulative.tolist())
    ]
    files = {"curve.csv": csv_bytes(("t", "f_hat", "f_ref"), rows, comments=[meta])}
    if ref is not None:
        grid = np.linspace(0.0, grid_hi, GRID_POINTS).tolist()
        files["reference.csv"] = csv_bytes(("t", "f_ref"), [(t, ref(t)) for t in grid], comments=[meta])
    return files


def bernoulli(m: int, a: int, n: int, h: int, seed: int, threads: int = 1) -> Artifacts:
    s = bernoulli_sample_set(m, a)
    post = run_igmc(s, BERNOULLI, IgmcConfig(n, h, seed), threads=threads)
    bound = igmc_l1_bound(m, h, n)
    meta = f"approach=bernoulli m={m} a={a} n={n} h={h} seed={seed}"
    summary = {
        "approach": "bernoulli",
        "m": m,
        "a": a,
        "n": n,
        "h": h,
        "seed": seed,
        "posterior_mean": float(np.mean(post.mus)),
        "igmc_l1_bound": bound.as_dict(),
        "warnings": [],
    }
    if 0 < a < m:
        ref = BetaRef(a, m - a)
        f_hat = posterior_cdf(post)
        summary["reference"] = {"family": "beta", "alpha": a, "beta": m - a}
        summary["l1_to_reference"] = l1_distance_step_ref(f_hat, ref, (0.0, 1.0))
        summary["ks_to_reference"] = ks_distance(f_hat, ref)
    else:
        ref = None
        msg = f"Beta({a}, {m - a}) is undefined; reference distances suppressed"
        log.warning(msg)
        summary["warnings"].append(msg)
        summary["reference"] = None
        summary["l1_to_reference"] = None
        summary["ks_to_reference"] = None
    files = _curve_files(post, ref, 1.0, meta)
    files["summary.json"] = json_bytes(summary)
    return files


def exponential(m: int, mean: float, n: int, h: int, seed: int, threads: int = 1) -> Artifacts:
    s = exponential_sample_set(m, mean)
    post = run_igmc(s, EXPONENTIAL, IgmcConfig(n, h, seed), threads=threads)
    f_hat = posterior_cdf(post)
    # shape M, rate M*mean: posterior of the exponential rate under an
    # improper 1/lambda prior
    ref = GammaRef(m, m * mean)
    q = quantile(ref, 0.9999)
    ks = ks_distance(f_hat, ref)
    threshold = 3.0 * dkw_band(n, 0.05)
    summary = {
        "approach": "exponential",
        "m": m,
        "mean": mean,
        "n": n,
        "h": h,
        "seed": seed,
        "initial_set": "constant",
        "posterior_mean": float(np.mean(post.mus)),
        "reference": {"family": "gamma", "shape": m, "rate": m * mean},
        "posterior_predictive": {"family": "lomax", "shape": m, "scale": m * mean},
        "ks_to_reference": ks,
        "mismatch_threshold": threshold,
        "mismatch": ks > threshold,
        "l1_to_reference": l1_distance_step_ref(f_hat, ref, (0.0, q)),
        "l1_domain": [0.0, q],
    }
    grid_hi = max(q, float(np.max(post.mus)))
    meta = f"approach=exponential m={m} mean={mean!r} n={n} h={h} seed={seed}"
    files = _curve_files(post, ref, grid_hi, meta)
    files["summary.json"] = json_bytes(summary)
    return files


def converge(
    m: int,
    a: int,
    sweep: Sequence[tuple[int, int]],
    seeds: int,
    seed: int = 0,
    threads: int = 1,
) -> Artifacts:
    """L1 distance to Beta(a, m-a) over a sweep of (n, h) cells and seeds.

    The summary's ``slope`` is the least-squares slope of log(mean L1)
    against log(n) over the cells sharing the largest h; it is null when
    fewer than two such cells have distinct n.
    """
    if not sweep:
        raise InvalidInput("sweep must contain at least one (n, h) cell")
    if seeds < 3:
        raise InvalidInput("use at least three seeds per cell")
    if not 0 < a < m:
        raise InvalidCounts("convergence needs 0 < a < m so that Beta(a, m - a) exists")
    s = bernoulli_sample_set(m, a)
    ref = BetaRef(a, m - a)
    runs = []
    cells = []
    for n, h in sweep:
        l1s = []
        for k in range(seeds):
            post = run_igmc(s, BERNOULLI, IgmcConfig(n, h, seed + k), threads=threads)
            f_hat = posterior_cdf(post)
            l1 = l1_distance_step_ref(f_hat, ref, (0.0, 1.0))
            runs.append((n, h, seed + k, l1, ks_distance(f_hat, ref)))
            l1s.append(l1)
        bound = igmc_l1_bound(m, h, n).value
        mean_l1 = float(np.mean(l1s))
        cells.append((n, h, seeds, mean_l1, bound, mean_l1 <= bound))
    h_max = max(h for _, h in sweep)
    fixed = [(n, l1) for n, h, _, l1, _, _ in cells if h == h_max]
    slope = None
    if len({n for n, _ in fixed}) >= 2:
        xs = np.log([n for n, _ in fixed])
        ys = np.log([l1 for _, l1 in fixed])
        slope = float(np.polyfit(xs, ys, 1)[0])
    summary = {
        "m": m,
        "a": a,
        "sweep": [list(c) for c in sweep],
        "seeds": seeds,
        "seed": seed,
        "slope_h_fixed": h_max,
        "slope": slope,
        "all_within_bound": all(c[5] for c in cells),
    }
    return {
        "runs.csv": csv_bytes(("n", "h", "seed", "l1", "ks"), runs),
        "cells.csv": csv_bytes(("n", "h", "seeds", "mean_l1", "bound", "within_bound"), cells),
        "summary.json": json_bytes(summary),
    }


def load_fixture(spec: str) -> deep.LabeledDataset:
    """``blobs[:k=2,per_class=20,sep=6,seed=0]`` or a path to a CSV fixture."""
    if spec == "blobs" or spec.startswith("blobs:"):
        opts = {"k": 2, "per_class": 20, "sep": 6.0, "seed": 0}
        body = spec.partition(":")[2]
        for item in filter(None, body.split(",")):
            key, _, val = item.partition("=")
            if key not in opts:
                raise InvalidInput(f"unknown blob option {key!r}")
            opts[key] = float(val) if key == "sep" else int(val)
        return deep.make_blobs(opts["k"], opts["per_class"], opts["sep"], opts["seed"])
    return deep.read_dataset_csv(spec)


def classify(
    fixture: str,
    x: Sequence[float],
    n: int,
    h: int,
    seed: int,
    threads: int = 1,
    train: deep.TrainConfig | None = None,
    warm_start: bool = False,
) -> Artifacts:
    data = load_fixture(fixture)
    cfg = train or deep.TrainConfig()
    post = deep.run_deep_igmc(data, x, cfg, IgmcConfig(n, h, seed), threads=threads, warm_start=warm_start)
    report = deep.summarize_uncertainty(post)
    cells = report.cells()
    rows = [
        (k + 1, 100.0 * report.mean[k], report.uncertainty[k], cells[k])
        for k in range(post.num_classes)
    ]
    mu = post.mu
    mu_rows = [(i, *mu[i].tolist()) for i in range(mu.shape[0])]
    summary = {
        "fixture": fixture,
        "x": [float(v) for v in x],
        "n": n,
        "h": h,
        "seed": seed,
        "train": {
            "epochs": cfg.epochs,
            "learning_rate": cfg.learning_rate,
            "momentum": cfg.momentum,
            "schedule": cfg.schedule,
            "batch_size": cfg.batch_size,
            "hidden_width": cfg.hidden_width,
            "warm_start": warm_start,
        },
        "top_class": int(np.argmax(report.mean)) + 1,
        "mean_probability": report.mean.tolist(),
        "uncertainty": report.uncertainty.tolist(),
    }
    return {
        "uncertainty.csv": csv_bytes(("class", "mean_percent", "u", "cell"), rows),
        "mu.csv": csv_bytes(("chain", *[f"class{k + 1}" for k in range(post.num_classes)]), mu_rows),
        "summary.json": json_bytes(summary),
    }
