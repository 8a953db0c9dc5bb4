"""Command-line front end.

Subcommands: count, ball, transform, geodesics, trace-check, average,
fit, run.  All file outputs are CSV/JSON with headers.  Exit codes:
0 success, 2 validation error (bad inputs), 3 numeric failure.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import sys
from fractions import Fraction

import click
import numpy as np

from .errors import NumericError, ValidationError
from .geometry import Point
from . import modular_group
from .experiments import AveragingWeight, ExperimentConfig, error_exponent_fit, local_average_count, run_experiment
from .geodesics import classes_up_to_norm, write_geodesic_csv
from .kernels import (SharpCutoff, SmoothedCutoff, difference_cutoff,
                      g_transform, h_transform, m_transform, q_transform)
from .specfun import SpectralParameter
from .spectral import modular_spectral_data, main_term
from .traceformula import AutomorphicWeight, QuadratureSpec, verify_identity


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ValidationError as exc:
            click.echo(f"validation error: {exc}", err=True)
            sys.exit(2)
        except NumericError as exc:
            click.echo(f"numeric failure: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _parse_coord(text):
    """Exact Fraction when the text is rational ('1/3', '2'), else float."""
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def _point(x_text, y_text) -> Point:
    return Point(_parse_coord(x_text), _parse_coord(y_text))


@click.group()
@click.option("--threads", type=int, default=1, show_default=True, help="Worker budget for grid runs.")
@click.option("--out-dir", type=click.Path(), default=".", show_default=True, help="Output directory.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON experiment config (mirrors ExperimentConfig).")
@click.pass_context
def main(ctx, threads, out_dir, config_path):
    """Hyperbolic circle problem toolkit for PSL(2,Z)."""
    ctx.ensure_object(dict)
    ctx.obj.update(threads=threads, out_dir=out_dir, config_path=config_path)


@main.command()
@click.option("--zx", default="0", show_default=True)
@click.option("--zy", default="1", show_default=True)
@click.option("--wx", default=None, help="Defaults to zx.")
@click.option("--wy", default=None, help="Defaults to zy.")
@click.option("--x-threshold", "--X", "x_threshold", required=True, help="Ball threshold X (4u+2 <= X).")
@_exit_codes
def count(zx, zy, wx, wy, x_threshold):
    """Streaming orbit count N(z,w,X)."""
    z = _point(zx, zy)
    w = _point(wx if wx is not None else zx, wy if wy is not None else zy)
    click.echo(modular_group.count(z, w, _parse_coord(x_threshold)))


@main.command()
@click.option("--zx", default="0", show_default=True)
@click.option("--zy", default="1", show_default=True)
@click.option("--wx", default=None)
@click.option("--wy", default=None)
@click.option("--x-threshold", "--X", "x_threshold", required=True)
@click.option("--out", type=click.Path(), required=True, help="CSV destination.")
@_exit_codes
def ball(zx, zy, wx, wy, x_threshold, out):
    """Enumerate the orbit ball and dump it as CSV."""
    z = _point(zx, zy)
    w = _point(wx if wx is not None else zx, wy if wy is not None else zy)
    orbit = modular_group.enumerate_ball_arithmetic(z, w, _parse_coord(x_threshold))
    modular_group.write_ball_csv(orbit, out)
    click.echo(f"{len(orbit)} elements -> {out}")


def _parse_spectral(t_text) -> SpectralParameter:
    return SpectralParameter(complex(t_text.replace(" ", "")))


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range must be lo:hi:n, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1 or hi < lo:
        raise ValidationError(f"bad range {text!r}")
    return np.linspace(lo, hi, n)


@main.command()
@click.option("--kind", type=click.Choice(["q", "g", "h", "M"]), required=True)
@click.option("--x", "x_param", type=float, required=True, help="Cutoff radius x.")
@click.option("--d", "d_param", type=float, default=None, help="Smoothing scale (default x^(3/4)).")
@click.option("--t", "t_param", default="0", show_default=True, help="Spectral parameter (complex ok).")
@click.option("--m", "m_kind", type=click.Choice(["sharp", "smooth", "diff"]), default="smooth",
              show_default=True, help="Which kernel to transform.")
@click.option("--range", "grid_range", required=True, help="Evaluation grid lo:hi:n.")
@click.option("--out", type=click.Path(), required=True)
@_exit_codes
def transform(kind, x_param, d_param, t_param, m_kind, grid_range, out):
    """Tabulate q/g/h/M transforms of the chosen kernel on a grid."""
    d = d_param if d_param is not None else x_param ** 0.75
    sharp = SharpCutoff(x_param)
    if m_kind == "sharp":
        tf = sharp.as_test_function()
    else:
        smooth = SmoothedCutoff(x_param, d)
        tf = smooth.as_test_function() if m_kind == "smooth" else difference_cutoff(sharp, smooth)
    grid = _parse_range(grid_range)
    t = _parse_spectral(t_param)

    def evaluate(v):
        if kind == "q":
            return q_transform(tf, v)
        if kind == "g":
            return g_transform(tf, v)
        if kind == "h":
            return h_transform(tf, v).real
        return m_transform(tf, t, v)

    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["input_grid", "value"])
        for v in grid:
            writer.writerow([repr(float(v)), repr(evaluate(float(v)))])
    click.echo(f"{len(grid)} rows -> {out}")


@main.command()
@click.option("--max-norm", type=float, required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--cache-dir", type=click.Path(), default=None, help="Per-trace disk cache.")
@_exit_codes
def geodesics(max_norm, out, cache_dir):
    """Geodesic length-spectrum table up to the given norm."""
    records = classes_up_to_norm(max_norm, cache_dir=cache_dir)
    write_geodesic_csv(records, out)
    click.echo(f"{len(records)} record groups -> {out}")


@main.command("trace-check")
@click.option("--x", "x_param", type=float, default=20.0, show_default=True)
@click.option("--d", "d_param", type=float, default=5.0, show_default=True)
@click.option("--quad-n", type=int, default=24, show_default=True, help="Panels per axis (finest level).")
@click.option("--max-norm", type=float, default=None, help="Override spectrum coverage.")
@click.option("--out", type=click.Path(), default=None, help="Also write the JSON report here.")
@_exit_codes
def trace_check(x_param, d_param, quad_n, max_norm, out):
    """Verify the geometric trace-formula identity for m = k - k*."""
    m = difference_cutoff(SharpCutoff(x_param), SmoothedCutoff(x_param, d_param))
    weight = AutomorphicWeight.constant()
    spectrum = classes_up_to_norm(max_norm) if max_norm is not None else None
    specs = (QuadratureSpec(max(quad_n // 2, 4), max(quad_n // 2, 4), 8),
             QuadratureSpec(quad_n, quad_n, 8))
    report = verify_identity(m, weight, spectrum=spectrum, quad_specs=specs)
    payload = report.to_json()
    click.echo(payload)
    if out:
        with open(out, "w") as fh:
            fh.write(payload)


@main.command()
@click.option("--x-threshold", "--X", "x_threshold", type=float, required=True)
@click.option("--center-x", type=float, default=0.0, show_default=True)
@click.option("--center-y", type=float, default=1.3, show_default=True)
@click.option("--radius", type=float, default=0.2, show_default=True)
@click.option("--nodes", type=int, default=12, show_default=True)
@_exit_codes
def average(x_threshold, center_x, center_y, radius, nodes):
    """Locally averaged count N_f(X) against the radial bump weight."""
    f = AveragingWeight(Point(center_x, center_y), radius)
    n_f = local_average_count(f, x_threshold, nodes)
    main_val = main_term(x_threshold, modular_spectral_data()).real * f.mass()
    click.echo(json.dumps({
        "X": x_threshold,
        "N_f": n_f,
        "main_term": main_val,
        "error": n_f - main_val,
        "weight_mass": f.mass(),
    }, indent=2))


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True), required=True,
              help="CSV with X and error columns (e.g. a run's results.csv).")
@_exit_codes
def fit(in_path):
    """Error-exponent regression on a results CSV."""
    xs, errs = [], []
    with open(in_path, newline="") as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["X"]))
            errs.append(float(row["error"]))
    result = error_exponent_fit(xs, errs)
    click.echo(json.dumps({"slope": result.slope, "intercept": result.intercept,
                           "r2": result.r2, "points_used": result.points_used}, indent=2))


@main.command()
@click.pass_context
@_exit_codes
def run(ctx):
    """Full experiment over the configured X grid; writes CSV + JSON."""
    cfg_path = ctx.obj.get("config_path")
    cfg = ExperimentConfig.from_json(cfg_path) if cfg_path else ExperimentConfig()
    cfg.out_dir = ctx.obj.get("out_dir", cfg.out_dir)
    if ctx.obj.get("threads"):
        cfg.threads = ctx.obj["threads"]
    csv_path, json_path = run_experiment(cfg)
    click.echo(f"results -> {csv_path}\nsummary -> {json_path}")


if __name__ == "__main__":
    main()
