"""Command-line front end: ``igmc bernoulli|exponential|converge|classify|replay``.

Every command writes its data files plus ``manifest.json`` into ``--out``.
The manifest records the resolved parameters and SHA-256 digests of the
data files; ``igmc replay`` reruns it and verifies the digests.

Exit codes: 0 ok, 2 invalid arguments, 3 numerical failure, 4 determinism
check failed.
"""

from __future__ import annotations

import json
import logging
import sys
import time
from pathlib import Path

import click

from igmc import __version__, experiments
from igmc.deep import TrainConfig
from igmc.errors import InvalidInput, NumericalError
from igmc.io import json_bytes, sha256

EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_NONDETERMINISTIC = 4


class NondeterministicOutput(Exception):
    pass


def _classify(fixture, x, n, h, seed, epochs, learning_rate, momentum, schedule,
              batch_size, hidden_width, warm_start, threads=1):
    train = TrainConfig(
        epochs=epochs,
        learning_rate=learning_rate,
        momentum=momentum,
        schedule=schedule,
        batch_size=batch_size,
        hidden_width=hidden_width,
    )
    return experiments.classify(fixture, x, n, h, seed, threads=threads, train=train, warm_start=warm_start)


RUNNERS = {
    "bernoulli": experiments.bernoulli,
    "exponential": experiments.exponential,
    "converge": experiments.converge,
    "classify": _classify,
}


def execute(command: str, params: dict, out: Path, threads: int = 1, check: bool = False) -> dict:
    """Run ``command``, write its files and manifest to ``out``; return the manifest."""
    runner = RUNNERS[command]
    start = time.perf_counter()
    files = runner(**params, threads=threads)
    if check:
        again = runner(**params, threads=1 if threads > 1 else 2)
        if again != files:
            bad = sorted(k for k in files if files.get(k) != again.get(k))
            raise NondeterministicOutput(f"determinism check failed for {', '.join(bad)}")
    duration = time.perf_counter() - start
    out.mkdir(parents=True, exist_ok=True)
    for name, data in files.items():
        (out / name).write_bytes(data)
    manifest = {
        "command": command,
        "params": params,
        "master_seed": params["seed"],
        "version": __version__,
        "threads": threads,
        "duration_s": duration,
        "digests": {name: sha256(data) for name, data in sorted(files.items())},
    }
    (out / "manifest.json").write_bytes(json_bytes(manifest))
    return manifest


def _run(ctx_command: str, params: dict, out: str, threads: int, check: bool) -> None:
    try:
        manifest = execute(ctx_command, params, Path(out), threads=threads, check=check)
    except InvalidInput as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    except NondeterministicOutput as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NONDETERMINISTIC)
    summary = json.loads((Path(out) / "summary.json").read_text(encoding="utf-8"))
    click.echo(f"{ctx_command}: wrote {len(manifest['digests'])} files to {out} "
               f"in {manifest['duration_s']:.2f}s")
    for key in ("l1_to_reference", "ks_to_reference", "mismatch", "slope", "all_within_bound", "top_class"):
        if key in summary:
            click.echo(f"  {key} = {summary[key]}")


def _floats(_ctx, _param, value):
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected comma-separated numbers")


def _sweep(_ctx, _param, value):
    if value is None:
        return None
    try:
        cells = [tuple(int(p) for p in item.split(":")) for item in value.split(",")]
    except ValueError:
        raise click.BadParameter("expected n1:h1,n2:h2,...")
    if any(len(c) != 2 or min(c) < 1 for c in cells):
        raise click.BadParameter("each cell must be n:h with positive integers")
    return cells


def common(default_n=1000, default_h=1000):
    def wrap(f):
        for opt in reversed([
            click.option("--n", "n", type=click.IntRange(min=1), default=default_n, show_default=True,
                         help="Number of chains (sample size)."),
            click.option("--h", "h", type=click.IntRange(min=1), default=default_h, show_default=True,
                         help="Generated values per chain (sampling depth)."),
            click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True),
            click.option("--out", type=click.Path(file_okay=False), required=True,
                         help="Output directory."),
            click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True,
                         help="Parallel chains; output does not depend on it."),
            click.option("--check-determinism", is_flag=True,
                         help="Run twice with different thread counts and compare bytes."),
        ]):
            f = opt(f)
        return f
    return wrap


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True)
def main(verbose):
    """Incremental generative Monte Carlo experiments."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@common()
@click.option("--m", type=click.IntRange(min=1), default=9, show_default=True, help="Observations.")
@click.option("--a", type=click.IntRange(min=0), default=4, show_default=True, help="Successes among them.")
def bernoulli(n, h, seed, out, threads, check_determinism, m, a):
    """Bernoulli observations, Bern(a/M) refits, compared with Beta(a, M-a)."""
    if a > m:
        raise click.BadParameter("--a cannot exceed --m", param_hint="--a")
    _run("bernoulli", {"m": m, "a": a, "n": n, "h": h, "seed": seed}, out, threads, check_determinism)


@main.command()
@common()
@click.option("--m", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--mean", type=click.FloatRange(min=0, min_open=True), default=2.0, show_default=True)
def exponential(n, h, seed, out, threads, check_determinism, m, mean):
    """Exponential refits from M observations with sample mean MEAN."""
    _run("exponential", {"m": m, "mean": mean, "n": n, "h": h, "seed": seed}, out, threads, check_determinism)


@main.command()
@common()
@click.option("--m", type=click.IntRange(min=1), default=9, show_default=True)
@click.option("--a", type=click.IntRange(min=0), default=4, show_default=True)
@click.option("--sweep", callback=_sweep, default=None,
              help="Cells n1:h1,n2:h2,... (default 10:10,100:100,1000:1000).")
@click.option("--seeds", type=click.IntRange(min=3), default=3, show_default=True,
              help="Seeds per cell, starting at --seed.")
def converge(n, h, seed, out, threads, check_determinism, m, a, sweep, seeds):
    """L1 distance to Beta(a, M-a) across (n, h) cells, with the log-log slope in n."""
    if sweep is None:
        src = click.get_current_context().get_parameter_source
        explicit = src("n").name != "DEFAULT" or src("h").name != "DEFAULT"
        sweep = [(n, h)] if explicit else [list(c) for c in experiments.DEFAULT_SWEEP]
    params = {"m": m, "a": a, "sweep": [list(c) for c in sweep], "seeds": seeds, "seed": seed}
    _run("converge", params, out, threads, check_determinism)


@main.command()
@common(default_n=20, default_h=20)
@click.option("--fixture", default="blobs", show_default=True,
              help="CSV path (f1,...,fd,label) or blobs[:k=2,per_class=20,sep=6,seed=0].")
@click.option("--x", "x", callback=_floats, required=True, help="Query point, e.g. -3,0.")
@click.option("--epochs", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--lr", "learning_rate", type=float, default=0.002, show_default=True)
@click.option("--momentum", type=float, default=0.9, show_default=True)
@click.option("--schedule", type=click.Choice(["cosine", "constant"]), default="cosine", show_default=True)
@click.option("--batch-size", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--width", "hidden_width", type=click.IntRange(min=1), default=16, show_default=True)
@click.option("--warm-start", is_flag=True,
              help="Continue from the previous step's weights instead of re-initializing.")
def classify(n, h, seed, out, threads, check_determinism, fixture, x, epochs, learning_rate,
             momentum, schedule, batch_size, hidden_width, warm_start):
    """Per-class posterior mean and 4*variance uncertainty at a query point."""
    params = {
        "fixture": fixture, "x": x, "n": n, "h": h, "seed": seed, "epochs": epochs,
        "learning_rate": learning_rate, "momentum": momentum, "schedule": schedule,
        "batch_size": batch_size, "hidden_width": hidden_width, "warm_start": warm_start,
    }
    _run("classify", params, out, threads, check_determinism)


@main.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True)
def replay(manifest, out, threads):
    """Rerun a manifest and verify the data files match its digests."""
    recorded = json.loads(Path(manifest).read_text(encoding="utf-8"))
    try:
        fresh = execute(recorded["command"], recorded["params"], Path(out), threads=threads)
    except (InvalidInput, NumericalError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL if isinstance(exc, NumericalError) else EXIT_INVALID)
    if fresh["digests"] != recorded["digests"]:
        click.echo("replay digests differ from the manifest", err=True)
        sys.exit(EXIT_NONDETERMINISTIC)
    click.echo(f"replay ok: {len(fresh['digests'])} files match")


if __name__ == "__main__":
    main()
