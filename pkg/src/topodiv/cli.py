"""Command line tying generators, divergence, training, and plots together.

Commands read CSV clouds and JSON configs and write their artifacts
deterministically: rerunning a command overwrites byte-identical files, with
the one exception of the run manifests, whose creation timestamp moves. Every
artifact-writing command drops such a manifest (config hash, seed, versions)
next to its output so a result can be traced back to what produced it.

Exit codes: 0 on success, 1 on any domain error (bad data, broken contracts,
singular gradients), 2 on usage errors (unknown flags, missing files).
"""

from __future__ import annotations

import hashlib
import json
import platform
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import click
import numpy as np

from . import __version__
from .datasets import DatasetSpec, generate, load_csv, save_csv
from .errors import TopodivError, ValidationError
from .geometry import pairwise_distances
from .metrics import evaluate, topoae_loss
from .model import TrainConfig, forward, load_checkpoint, save_checkpoint, train
from .optimize import OptimizerConfig, format_trace_csv, minimize_rtd
from .persistence import _fmt_value, build_filtration, compute_barcode, format_barcode_csv, parse_barcode_csv
from .grad import rtd_subgradient
from .plot import barcode_svg, scatter_svg
from .rcross import VARIANTS, rtd

BARCODE_HEADER = "dim,birth,death"


def _load_json(path) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _build(cls, mapping: dict, where: str):
    if not isinstance(mapping, dict):
        raise ValidationError(f"{where}: expected an object, got {type(mapping).__name__}")
    try:
        return cls(**mapping)
    except TypeError as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _write_manifest(path, command: str, config, seed) -> None:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    doc = {
        "command": command,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": seed,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "topodiv": __version__,
        },
        "created": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=1, sort_keys=True)
        handle.write("\n")


class _DomainErrors:
    """Map domain errors to exit code 1 with a plain message."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, TopodivError):
            raise click.ClickException(str(exc))
        return False


@click.group()
@click.version_option(__version__)
def main():
    """Topology-aware comparison and embedding of point clouds."""


@main.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_csv", type=click.Path(dir_okay=False, writable=True))
@click.option("--dim", type=int, default=None, help="Report only this homology dimension (default: 0 and 1).")
@click.option("--max-value", type=float, default=None, help="Trim the filtration at this threshold.")
def barcode(input_csv, out_csv, dim, max_value):
    """Persistence barcode of a point cloud, written as dim,birth,death CSV."""
    with _DomainErrors():
        cloud = load_csv(input_csv)
        dims = (dim,) if dim is not None else (0, 1)
        if any(d < 0 for d in dims):
            raise ValidationError(f"dimension must be nonnegative, got {dim}")
        filtration = build_filtration(
            pairwise_distances(cloud),
            max_dim=max(dims) + 1,
            max_value=np.inf if max_value is None else max_value,
        )
        bars = compute_barcode(filtration, dims=dims)
        Path(out_csv).write_text(format_barcode_csv(bars))


@main.command(name="rtd")
@click.argument("a_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("b_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--variant", type=click.Choice(VARIANTS), default="min", show_default=True)
@click.option("--topoae", is_flag=True, help="Print the spanning-tree baseline loss instead.")
@click.option("--grad", "grad_out", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Also write the divergence subgradient of the FIRST cloud to this CSV.")
def rtd_command(a_csv, b_csv, variant, topoae, grad_out):
    """Divergence between two point clouds, printed to stdout."""
    with _DomainErrors():
        a = load_csv(a_csv)
        b = load_csv(b_csv)
        if topoae:
            click.echo(str(topoae_loss(a, b)))
            return
        if grad_out is not None:
            value, field = rtd_subgradient(a, b, variant=variant)
            np.savetxt(grad_out, field.d_x, delimiter=",", fmt="%.17g")
        else:
            value = rtd(a, b, variant=variant)
        click.echo(str(value))


@main.command(name="train")
@click.argument("config_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Override the config's output directory.")
@click.option("--seed", type=int, default=None, help="Override the training seed.")
@click.option("--epochs", type=int, default=None, help="Override the epoch count.")
def train_command(config_json, out_dir, seed, epochs):
    """Train the autoencoder described by a JSON config.

    The config holds a "dataset" spec, a "train" section, and an "out_dir";
    flags override their counterparts. Writes checkpoint.json, history.csv,
    and manifest.json into the output directory.
    """
    with _DomainErrors():
        cfg = _load_json(config_json)
        train_section = dict(cfg.get("train", {}))
        if seed is not None:
            train_section["seed"] = seed
        if epochs is not None:
            train_section["epochs_total"] = epochs
        target_dir = out_dir if out_dir is not None else cfg.get("out_dir")
        if target_dir is None:
            raise ValidationError("no output directory: set \"out_dir\" in the config or pass --out-dir")
        spec = _build(DatasetSpec, cfg.get("dataset", {}), "dataset")
        tc = _build(TrainConfig, train_section, "train")

        data = generate(spec)
        params, history = train(data, tc)

        target = Path(target_dir)
        target.mkdir(parents=True, exist_ok=True)
        save_checkpoint(params, tc, target / "checkpoint.json")
        lines = ["epoch,reconstruction,divergence,skipped"]
        lines += [
            f"{s.epoch},{_fmt_value(s.reconstruction)},{_fmt_value(s.divergence)},{s.skipped_batches}"
            for s in history
        ]
        (target / "history.csv").write_text("\n".join(lines) + "\n")
        effective = {"dataset": asdict(spec), "train": asdict(tc), "out_dir": str(target_dir)}
        _write_manifest(target / "manifest.json", "train", effective, tc.seed)


@main.command()
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_csv", type=click.Path(dir_okay=False, writable=True))
def reduce(checkpoint, input_csv, out_csv):
    """Push a cloud through a checkpoint's encoder half."""
    with _DomainErrors():
        params, cfg = load_checkpoint(checkpoint)
        cloud = load_csv(input_csv)
        latent, _ = forward(params, cloud)
        save_csv(latent, out_csv)
        _write_manifest(
            str(out_csv) + ".manifest.json", "reduce",
            {"checkpoint": str(checkpoint), "train": asdict(cfg)}, None,
        )


@main.command(name="eval")
@click.argument("x_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("z_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("report_json", type=click.Path(dir_okay=False, writable=True))
@click.option("--triplets", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--h1", is_flag=True, help="Also compare degree-1 diagrams.")
def eval_command(x_csv, z_csv, report_json, triplets, seed, h1):
    """Evaluate how well Z preserves the structure of X."""
    with _DomainErrors():
        x = load_csv(x_csv)
        z = load_csv(z_csv)
        report = evaluate(x, z, num_triplets=triplets, seed=seed, include_h1=h1)
        Path(report_json).write_text(report.to_json())
        _write_manifest(
            str(report_json) + ".manifest.json", "eval",
            {"x": str(x_csv), "z": str(z_csv), "triplets": triplets, "seed": seed, "h1": h1},
            seed,
        )


@main.command()
@click.argument("spec_json", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_csv", type=click.Path(dir_okay=False, writable=True))
@click.option("--name", type=str, default=None, help="Override the dataset name.")
@click.option("--size", type=int, default=None, help="Override the point count.")
@click.option("--seed", type=int, default=None, help="Override the sampling seed.")
def gen(spec_json, out_csv, name, size, seed):
    """Generate a synthetic dataset described by a spec JSON."""
    with _DomainErrors():
        fields = _load_json(spec_json)
        if name is not None:
            fields["name"] = name
        if size is not None:
            fields["size"] = size
        if seed is not None:
            fields["seed"] = seed
        spec = _build(DatasetSpec, fields, "dataset spec")
        save_csv(generate(spec), out_csv)
        _write_manifest(str(out_csv) + ".manifest.json", "gen", asdict(spec), spec.seed)


@main.command()
@click.argument("config_json", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Override the config's output directory.")
@click.option("--steps", type=int, default=None, help="Override the step count.")
def morph(config_json, out_dir, steps):
    """Descend the divergence from a source cloud toward a target cloud.

    The config holds "source" and "target" dataset specs, an "optimizer"
    section, and an "out_dir". Writes final.csv, trace.csv, and manifest.json.
    """
    with _DomainErrors():
        cfg = _load_json(config_json)
        target_dir = out_dir if out_dir is not None else cfg.get("out_dir")
        if target_dir is None:
            raise ValidationError("no output directory: set \"out_dir\" in the config or pass --out-dir")
        source_spec = _build(DatasetSpec, cfg.get("source", {}), "source")
        target_spec = _build(DatasetSpec, cfg.get("target", {}), "target")
        opt_section = dict(cfg.get("optimizer", {}))
        if steps is not None:
            opt_section["steps"] = steps
        if "schedule" in opt_section:
            opt_section["schedule"] = tuple(
                (int(s), float(r)) for s, r in opt_section["schedule"]
            )
        opt = _build(OptimizerConfig, opt_section, "optimizer")

        source = generate(source_spec)
        target = generate(target_spec)
        final, trace = minimize_rtd(source, target, opt)

        out = Path(target_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_csv(final, out / "final.csv")
        (out / "trace.csv").write_text(format_trace_csv(trace))
        effective = {
            "source": asdict(source_spec),
            "target": asdict(target_spec),
            "optimizer": {**opt_section, "schedule": list(map(list, opt.schedule))},
            "out_dir": str(target_dir),
        }
        _write_manifest(out / "manifest.json", "morph", effective, source_spec.seed)


@main.command()
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_svg", type=click.Path(dir_okay=False, writable=True))
@click.option("--kind", type=click.Choice(["auto", "scatter", "barcode"]), default="auto",
              show_default=True, help="What the input is; auto sniffs the barcode header.")
def plot(input_csv, out_svg, kind):
    """Render a cloud CSV as a scatter or a barcode CSV as an interval diagram."""
    with _DomainErrors():
        text = Path(input_csv).read_text()
        if kind == "auto":
            first = text.splitlines()[0].strip() if text.strip() else ""
            kind = "barcode" if first == BARCODE_HEADER else "scatter"
        if kind == "barcode":
            svg = barcode_svg(parse_barcode_csv(text))
        else:
            svg = scatter_svg(load_csv(input_csv))
        Path(out_svg).write_text(svg)
