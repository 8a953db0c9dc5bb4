"""Experiment harness: locally averaged counts, the sharp/smooth
decomposition, and error-exponent regression, with file-based results.

The averaging weight is a radial bump f(z) = A psi0(rho(z, z0)/R)
supported on a hyperbolic disc that must sit strictly inside the
standard fundamental domain.  Radial choice makes the mass
semi-analytic (one 1D quadrature) and the interiority check a closed
form.  Quadrature over the disc is polar: Gauss-Legendre radially,
trapezoid in angle (spectrally accurate for the smooth periodic
integrand).
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from . import _fastcount
from .errors import ValidationError
from .geometry import Point
from .kernels import SharpCutoff, SmoothedCutoff, psi0
from .spectral import MODULAR_COVOLUME

__all__ = [
    "AveragingWeight",
    "ExperimentConfig",
    "FitResult",
    "local_average_count",
    "decomposition_check",
    "error_exponent_fit",
    "run_experiment",
]


@dataclass(frozen=True)
class AveragingWeight:
    """Radial bump weight on a hyperbolic disc strictly inside the domain."""

    center: Point
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValidationError("averaging radius must be positive")
        x0, y0 = float(self.center.x), float(self.center.y)
        # hyperbolic disc = euclidean disc centered at x0 + i y0 cosh(R)
        # with radius y0 sinh(R)
        e_center_y = y0 * math.cosh(self.radius)
        e_rad = y0 * math.sinh(self.radius)
        margin_x = 0.5 - (abs(x0) + e_rad)
        low_point = math.hypot(x0, e_center_y) - e_rad
        if margin_x <= 0 or low_point <= 1.0:
            raise ValidationError(
                f"support of the averaging weight (center {x0}+{y0}i, radius {self.radius}) "
                "is not strictly inside the standard fundamental domain"
            )

    def __call__(self, z: Point) -> float:
        from .geometry import distance

        rho = distance(z, self.center)
        return self.amplitude * float(psi0(rho / self.radius))

    def mass(self) -> float:
        """integral of f over H: 2 pi A int_0^R psi0(rho/R) sinh(rho) drho."""
        nodes, weights = np.polynomial.legendre.leggauss(48)
        mid = 0.5 * self.radius
        rho = mid + mid * nodes
        vals = psi0(rho / self.radius) * np.sinh(rho)
        return 2.0 * math.pi * self.amplitude * mid * float(np.dot(weights, vals))

    def quadrature_nodes(self, n_radial: int):
        """(points, weights) for int f(z) (.) dmu over the support disc.

        Polar about the center: the Cayley map C(z) = (z - z0)/(z - conj z0)
        sends the disc to |w| <= tanh(R/2); nodes are Gauss-Legendre in
        rho times a uniform angle grid, weights carry f and the
        hyperbolic area element sinh(rho) drho dphi.
        """
        if n_radial < 2:
            raise ValidationError("need at least 2 radial nodes")
        n_angular = 2 * n_radial
        r_nodes, r_weights = np.polynomial.legendre.leggauss(n_radial)
        mid = 0.5 * self.radius
        rho = mid + mid * r_nodes
        phis = 2.0 * math.pi * np.arange(n_angular) / n_angular
        z0 = complex(float(self.center.x), float(self.center.y))
        pts = []
        wts = []
        for rr, rw in zip(rho, r_weights):
            radial_factor = self.amplitude * float(psi0(rr / self.radius)) * math.sinh(rr)
            disc_r = math.tanh(0.5 * rr)
            for phi in phis:
                w = disc_r * complex(math.cos(phi), math.sin(phi))
                z = (z0.conjugate() * w - z0) / (w - 1.0)
                pts.append(Point(z.real, z.imag))
                wts.append(mid * rw * (2.0 * math.pi / n_angular) * radial_factor)
        return pts, np.array(wts)


def local_average_count(f: AveragingWeight, x_thresh: float, nodes: int = 12) -> float:
    """N_f(X) = int f(z) N(z,z,X) dmu by polar quadrature over the disc."""
    if not x_thresh > 2:
        raise ValidationError(f"threshold X must exceed 2, got {x_thresh}")
    pts, wts = f.quadrature_nodes(nodes)
    total = 0.0
    for p, w in zip(pts, wts):
        total += w * _fastcount.count_ball(float(p.x), float(p.y), float(p.x), float(p.y),
                                           float(x_thresh), 1e-9)
    return total


def decomposition_check(f: AveragingWeight, x_thresh: float, d: float, nodes: int = 12):
    """f-averaged orbit sums of k, k*, and k - k* on one shared ball sweep.

    Each node runs a single banded scan: elements below the smoothing
    band are pure counts (k = 1, k* = 1/I, k - k* = 1 - 1/I), only the
    band is materialized.  The three sums are assembled independently,
    so sharp = smooth + remainder is a float-roundoff identity, not a
    definition.
    """
    x = (x_thresh - 2.0) / 4.0
    sc = SmoothedCutoff(x, d)
    x_sharp = 4.0 * x + 2.0
    x_lo = 4.0 * sc.band_low + 2.0
    x_hi = 4.0 * sc.band_high + 2.0
    k_edge = (x_sharp * (1.0 + 1e-9) - 2.0) / 4.0
    pts, wts = f.quadrature_nodes(nodes)
    sharp = smooth = remainder = 0.0
    inv_i = 1.0 / sc.i_dx
    for p, w in zip(pts, wts):
        n_sharp, n_lo, u_band = _fastcount.banded_scan(
            float(p.x), float(p.y), float(p.x), float(p.y),
            x_sharp, x_lo, x_hi, 1e-9)
        ks_band = sc.k_star(u_band)
        k_band = (u_band <= k_edge).astype(float)
        sharp += w * float(n_sharp)
        smooth += w * (n_lo * inv_i + float(np.sum(ks_band)))
        remainder += w * (n_lo * (1.0 - inv_i) + float(np.sum(k_band - ks_band)))
    return sharp, smooth, remainder


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r2: float
    points_used: int


def error_exponent_fit(x_grid, errors) -> FitResult:
    """Least squares of log|error| against log X.

    Zero errors (perfect cancellation) are excluded with a warning;
    at least 4 usable points are required.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if x_grid.shape != errors.shape:
        raise ValidationError("grid and error arrays must have matching shapes")
    keep = errors != 0.0
    if not np.all(keep):
        warnings.warn(f"excluding {int((~keep).sum())} zero error value(s) from the fit")
    xs, es = x_grid[keep], np.abs(errors[keep])
    if xs.size < 4:
        raise ValidationError(f"need >= 4 nonzero points for the fit, have {xs.size}")
    lx, le = np.log(xs), np.log(es)
    slope, intercept = np.polyfit(lx, le, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((le - pred) ** 2))
    ss_tot = float(np.sum((le - le.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return FitResult(float(slope), float(intercept), r2, int(xs.size))


@dataclass
class ExperimentConfig:
    """Run configuration; mirrors the JSON config file."""

    x_grid: list = field(default_factory=lambda: [10.0 ** e for e in (3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0)])
    d_exponent: float = 0.75
    center: tuple = (0.0, 1.3)
    radius: float = 0.2
    nodes: int = 12
    out_dir: str = "."
    threads: int = 1

    def __post_init__(self):
        grid = [float(v) for v in self.x_grid]
        if grid != sorted(grid):
            raise ValidationError("X grid must be sorted ascending")
        if any(v <= 2 for v in grid):
            raise ValidationError("all X grid values must exceed 2")
        self.x_grid = grid

    def weight(self) -> AveragingWeight:
        return AveragingWeight(Point(float(self.center[0]), float(self.center[1])), self.radius)

    @staticmethod
    def from_json(path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = {f for f in ExperimentConfig.__dataclass_fields__}
        extra = set(raw) - known
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        if "center" in raw:
            raw["center"] = tuple(raw["center"])
        return ExperimentConfig(**raw)

    def echo(self) -> dict:
        d = asdict(self)
        d["center"] = list(d["center"])
        return d


def _one_grid_point(cfg: ExperimentConfig, x_thresh: float):
    f = cfg.weight()
    started = time.perf_counter()
    x = (x_thresh - 2.0) / 4.0
    d = x ** cfg.d_exponent
    sharp, smooth, remainder = decomposition_check(f, x_thresh, d, cfg.nodes)
    n_f = local_average_count(f, x_thresh, cfg.nodes)
    main = 3.0 * x_thresh * f.mass()
    return {
        "X": x_thresh,
        "N_f": n_f,
        "main_term": main,
        "error": n_f - main,
        "smooth_part": smooth,
        "remainder": remainder,
        "sharp_part": sharp,
        "seconds": time.perf_counter() - started,
    }


def run_experiment(cfg: ExperimentConfig):
    """Run the X grid, write results.csv and summary.json, return paths.

    Any stage failure aborts with the stage named.  Grid points can run
    in parallel processes when cfg.threads > 1; rows are written in grid
    order regardless.
    """
    import csv
    import os

    if not cfg.x_grid:
        raise ValidationError("empty grid")
    cfg.weight()  # validate support before any heavy work

    rows = []
    if cfg.threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            futures = [pool.submit(_one_grid_point, cfg, x) for x in cfg.x_grid]
            for x, fut in zip(cfg.x_grid, futures):
                try:
                    rows.append(fut.result())
                except Exception as exc:
                    raise type(exc)(f"grid point X={x} failed: {exc}") from exc
    else:
        for x in cfg.x_grid:
            try:
                rows.append(_one_grid_point(cfg, x))
            except Exception as exc:
                raise type(exc)(f"grid point X={x} failed: {exc}") from exc

    os.makedirs(cfg.out_dir, exist_ok=True)
    csv_path = os.path.join(cfg.out_dir, "results.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["X", "N_f", "main_term", "error", "smooth_part", "remainder"])
        for row in rows:
            writer.writerow([repr(float(row[key])) for key in
                             ("X", "N_f", "main_term", "error", "smooth_part", "remainder")])

    summary = {"config": cfg.echo(), "runtimes": {str(r["X"]): r["seconds"] for r in rows}}
    errors = [r["error"] for r in rows]
    try:
        fit = error_exponent_fit(cfg.x_grid, errors)
        summary["fit"] = {"slope": fit.slope, "intercept": fit.intercept,
                          "r2": fit.r2, "points_used": fit.points_used}
    except ValidationError as exc:
        summary["fit"] = f"fit skipped: {exc}"
    json_path = os.path.join(cfg.out_dir, "summary.json")
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2)
    return csv_path, json_path
