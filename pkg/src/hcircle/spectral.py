"""Spectral main term of the counting function and the smoothed
spectral comparison.

For PSL(2,Z) the residual spectrum is just the constant eigenfunction
(s = 1, weight |u_0|^2 = 3/pi), so the main term of N(z,w,X) is 3X.
The data-file format accepts external residual eigendata for other
groups; nothing here computes Maass forms or Eisenstein series - for
the smoothed comparison the continuous spectrum shows up only as the
unmodeled deficit between the direct orbit sum and the residual-term
prediction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _fastcount
from .errors import ValidationError
from .geometry import Point
from .kernels import SmoothedCutoff, h_transform
from .specfun import complex_gamma

__all__ = [
    "SpectralDatum",
    "modular_constant_datum",
    "modular_spectral_data",
    "validate_spectral_data",
    "main_term",
    "load_spectral_csv",
    "save_spectral_csv",
    "covolume_quadrature",
    "SmoothedLeadingReport",
    "smoothed_count_leading",
]

#: hyperbolic area of the standard PSL(2,Z) fundamental domain
MODULAR_COVOLUME = math.pi / 3.0


@dataclass(frozen=True)
class SpectralDatum:
    """One residual-spectrum entry: s in (1/2, 1] real or s = 1/2 + it."""

    s: complex
    weight: complex
    label: str = ""

    def __post_init__(self):
        s = complex(self.s)
        if abs(s.imag) < 1e-14:
            if not 0.5 < s.real <= 1.0:
                raise ValidationError(f"residual spectral point s = {s} outside (1/2, 1]")
        elif abs(s.real - 0.5) > 1e-12:
            raise ValidationError(f"tempered spectral point s = {s} must have Re s = 1/2")


def modular_constant_datum() -> SpectralDatum:
    return SpectralDatum(1.0, 1.0 / MODULAR_COVOLUME, "constant")


def modular_spectral_data() -> list:
    """PSL(2,Z) bundled data: no exceptional eigenvalues, constant only."""
    return [modular_constant_datum()]


def validate_spectral_data(data) -> None:
    ones = [d for d in data if abs(complex(d.s) - 1.0) < 1e-12]
    if len(ones) != 1:
        raise ValidationError(f"spectral data must contain exactly one s = 1 datum, found {len(ones)}")


def main_term(x_thresh: float, data) -> complex:
    """sqrt(pi) sum Gamma(s - 1/2)/Gamma(s + 1) weight X^s over residual data."""
    if not data:
        raise ValidationError("main_term needs a nonempty residual data list")
    total = 0.0 + 0.0j
    for datum in data:
        s = complex(datum.s)
        total += (complex_gamma(s - 0.5) / complex_gamma(s + 1.0)
                  * complex(datum.weight) * complex(x_thresh) ** s)
    return math.sqrt(math.pi) * total


def save_spectral_csv(data, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s_real", "s_imag", "weight_real", "weight_imag", "label"])
        for d in data:
            s, w = complex(d.s), complex(d.weight)
            writer.writerow([repr(s.real), repr(s.imag), repr(w.real), repr(w.imag), d.label])


def load_spectral_csv(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(SpectralDatum(
                complex(float(row["s_real"]), float(row["s_imag"])),
                complex(float(row["weight_real"]), float(row["weight_imag"])),
                row.get("label", ""),
            ))
    return out


def covolume_quadrature(panels: int = 24, order: int = 10, y_cap: float = 12.0) -> float:
    """Numeric check of vol(F) = pi/3: 2D quadrature below y_cap plus the
    exact 1/y_cap tail of the cusp strip.  The y-direction uses
    geometrically graded panels so the 1/y^2 weight is resolved."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    edges = np.linspace(-0.5, 0.5, panels + 1)
    for x_lo, x_hi in zip(edges[:-1], edges[1:]):
        xm, xr = 0.5 * (x_hi + x_lo), 0.5 * (x_hi - x_lo)
        for xn, xw in zip(xm + xr * nodes, weights):
            y_lo = math.sqrt(1.0 - xn * xn)
            y_edges = y_lo * (y_cap / y_lo) ** np.linspace(0.0, 1.0, 9)
            inner = 0.0
            for y_a, y_b in zip(y_edges[:-1], y_edges[1:]):
                ym, yr = 0.5 * (y_b + y_a), 0.5 * (y_b - y_a)
                inner += float(np.sum(weights / (ym + yr * nodes) ** 2)) * yr
            total += xw * xr * inner
    return total + 1.0 / y_cap


@dataclass(frozen=True)
class SmoothedLeadingReport:
    direct_sum: float
    prediction: float
    difference: float


def smoothed_count_leading(z: Point, x: float, d: float) -> SmoothedLeadingReport:
    """Direct smoothed orbit sum vs the residual-spectrum prediction.

    direct = sum_gamma k*(u(z, gamma z)); prediction = h_{k*}(t_0) |u_0|^2
    with t_0 the s = 1 spectral point.  The difference is dominated by
    the (unmodeled) continuous-spectrum contribution.
    """
    sc = SmoothedCutoff(x, d)
    x_lo = 4.0 * sc.band_low + 2.0
    x_hi = 4.0 * sc.band_high + 2.0
    _ns, n_lo, u_band = _fastcount.banded_scan(float(z.x), float(z.y), float(z.x), float(z.y),
                                               x_lo, x_lo, x_hi, 1e-9)
    direct = n_lo / sc.i_dx + float(np.sum(sc.k_star(u_band)))
    # s = 1 corresponds to t = -i/2, where e^{ira} = e^{a/2}
    h_val = h_transform(sc.as_test_function(), -0.5j).real
    prediction = h_val / MODULAR_COVOLUME
    return SmoothedLeadingReport(direct, prediction, direct - prediction)
