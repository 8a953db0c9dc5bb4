"""Geometric side of the generalized trace formula for one automorphic
weight u and one test kernel m with vanishing u^{-1/2}-moment:

    int_F M(z,z) u(z) dmu = Sigma_id + Sigma_hyp + Sigma_ell + Sigma_par,

where M(z,w) = sum_gamma m(u(z, gamma w)) and the right side splits the
group by conjugacy type.  Sigma_id = m(0) int_F u dmu is the identity
class; it vanishes for every weight orthogonal to constants and is kept
as its own report field.  Sigma_hyp sums period integrals against
M_{m,lambda}(T(gamma)) over hyperbolic classes (a finite sum), Sigma_ell
runs over the two torsion points of PSL(2,Z), and Sigma_par carries the
cusp contribution through the zeta factors (s != 1) or the logarithmic
weight (s = 1).

The left side is evaluated by brute force: tensor Gauss-Legendre panels
over the truncated standard fundamental domain, each node triggering an
independent orbit-ball enumeration, plus a closed-form cusp tail above
the truncation height (valid for the constant weight, where only the
translation subgroup survives at large height).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _fastcount
from .errors import CoverageError, MomentConditionError, ValidationError
from .geodesics import classes_up_to_norm, norm_of_trace
from .kernels import TestFunction, m_transform, q_transform, _quad
from .specfun import SpectralParameter, g_lambda, riemann_zeta
from .spectral import MODULAR_COVOLUME

__all__ = [
    "AutomorphicWeight",
    "QuadratureSpec",
    "TraceFormulaReport",
    "sigma_hyp",
    "sigma_ell",
    "sigma_par",
    "sigma_identity",
    "geometric_lhs",
    "verify_identity",
    "needed_spectrum_norm",
]

#: elliptic points of PSL(2,Z) with their stabilizer orders
_ELLIPTIC_I = complex(0.0, 1.0)
_ELLIPTIC_RHO = complex(0.5, 0.5 * math.sqrt(3.0))

_U0 = math.sqrt(1.0 / MODULAR_COVOLUME)


@dataclass(frozen=True)
class AutomorphicWeight:
    """Eigenfunction data consumed by the geometric-side evaluators.

    The constant weight u_0 = 1/sqrt(vol F) is built in; external data
    (periods, torsion values, cusp coefficients) can be supplied for
    user-provided eigenfunctions, whose integrability is the caller's
    responsibility.  Cusp expansion coefficients follow
    u(z) = B_u y^s + B~_u y^{1-s} + (oscillatory), summed over cusps;
    ``mean_mass`` is int_F u dmu, which pairs with the identity class.
    """

    kind: str
    eigen_s: complex
    cusp_b: complex
    cusp_b_tilde: complex
    mean_mass: complex
    torsion_value_i: complex
    torsion_value_rho: complex
    period_by_trace: dict = field(default_factory=dict)

    @staticmethod
    def constant() -> "AutomorphicWeight":
        return AutomorphicWeight(
            kind="constant",
            eigen_s=1.0,
            cusp_b=0.0,
            cusp_b_tilde=_U0,
            mean_mass=_U0 * MODULAR_COVOLUME,
            torsion_value_i=_U0,
            torsion_value_rho=_U0,
        )

    @staticmethod
    def external(eigen_s, cusp_b, cusp_b_tilde, torsion_value_i, torsion_value_rho,
                 period_by_trace, mean_mass=0.0) -> "AutomorphicWeight":
        return AutomorphicWeight("external", complex(eigen_s), complex(cusp_b),
                                 complex(cusp_b_tilde), complex(mean_mass),
                                 complex(torsion_value_i), complex(torsion_value_rho),
                                 dict(period_by_trace))

    @property
    def spectral_parameter(self) -> SpectralParameter:
        return SpectralParameter.from_s(self.eigen_s)

    def value(self, z) -> complex:
        if self.kind == "constant":
            return _U0
        raise ValidationError("external weights carry no pointwise evaluator; "
                              "geometric_lhs supports the constant kind only")

    def period_integral(self, record) -> complex:
        """int_{C_gamma} u dS for a class in the given record group."""
        if self.kind == "constant":
            return _U0 * record.primitive_length
        try:
            return self.period_by_trace[record.trace]
        except KeyError:
            raise CoverageError(f"external weight has no period for trace {record.trace}")


def needed_spectrum_norm(m: TestFunction) -> float:
    """Largest class norm with T(gamma) <= support bound of m."""
    rhs = 4.0 * m.support_bound + 2.0
    return 0.5 * (rhs + math.sqrt(rhs * rhs - 4.0))


def sigma_hyp(m: TestFunction, u: AutomorphicWeight, spectrum, complete_to_norm=None) -> complex:
    """Hyperbolic class sum: periods times M_{m,lambda}(T(gamma)).

    ``spectrum`` must enumerate every class with T(gamma) inside the
    support of m; a table that stops short is a hard error.
    """
    needed = needed_spectrum_norm(m)
    if complete_to_norm is None:
        complete_to_norm = max((r.norm for r in spectrum), default=0.0)
    # below the minimal class norm there is nothing to cover
    if needed > complete_to_norm * (1.0 + 1e-12) and needed >= norm_of_trace(3):
        raise CoverageError(
            f"spectrum covers norms up to {complete_to_norm:.6g} but the kernel "
            f"support requires {needed:.6g}"
        )
    t = u.spectral_parameter
    total = 0.0 + 0.0j
    for rec in spectrum:
        big_t = (rec.norm + 1.0 / rec.norm - 2.0) / 4.0
        if big_t >= m.support_bound:
            continue
        weight = u.period_integral(rec) * rec.class_count
        total += weight * m_transform(m, t, big_t)
    return total


def sigma_ell(m: TestFunction, u: AutomorphicWeight) -> complex:
    """Elliptic contribution from the order-2 and order-3 torsion points."""
    t = u.spectral_parameter
    total = 0.0 + 0.0j
    for value, order in ((u.torsion_value_i, 2), (u.torsion_value_rho, 3)):
        inner_sum = 0.0
        for ell in range(1, order):
            a = math.sin(math.pi * ell / order) ** 2
            rmax = math.asinh(math.sqrt(m.support_bound / a))
            breaks = [math.asinh(math.sqrt(b / a)) for b in m.breakpoints if b > 0]

            def integrand(r):
                return float(m(a * math.sinh(r) ** 2)) * g_lambda(r, t) * math.sinh(r)

            inner_sum += _quad(integrand, 0.0, rmax, points=breaks, epsabs=1e-11)
        total += (2.0 * math.pi / order) * complex(value) * inner_sum
    return total


def sigma_par(m: TestFunction, u: AutomorphicWeight) -> complex:
    """Cusp contribution.

    s = 1:  B~_u int m(v) v^{-1/2} log v dv;
    s != 1: B_u 2^{1-s} zeta(1-s) int m v^{-(1+s)/2} dv
            + B~_u 2^s zeta(s) int m v^{-(2-s)/2} dv.
    All v-integrals are computed through v = sigma^2, which removes the
    endpoint singularity for Re s < 1.
    """
    s = complex(u.eigen_s)
    top = math.sqrt(m.support_bound)
    breaks = [math.sqrt(b) for b in m.breakpoints if b > 0]
    if abs(s - 1.0) < 1e-12:
        def integrand(sig):
            return float(m(sig * sig)) * (4.0 * math.log(sig) if sig > 0 else 0.0)

        val = _quad(integrand, 0.0, top, points=breaks, epsabs=1e-11)
        return complex(u.cusp_b_tilde) * val

    def weighted(exponent):
        # int m(v) v^exponent dv = 2 int m(sig^2) sig^(2 exponent + 1) dsig
        def integrand(sig):
            return float(m(sig * sig)) * (sig ** complex(2.0 * exponent + 1.0))

        re = _quad(lambda sg: integrand(sg).real, 0.0, top, points=breaks, epsabs=1e-11)
        im = _quad(lambda sg: integrand(sg).imag, 0.0, top, points=breaks, epsabs=1e-11)
        return 2.0 * complex(re, im)

    term_b = complex(u.cusp_b) * 2.0 ** (1.0 - s) * riemann_zeta(1.0 - s) * weighted(-(1.0 + s) / 2.0)
    term_bt = complex(u.cusp_b_tilde) * 2.0 ** s * riemann_zeta(s) * weighted(-(2.0 - s) / 2.0)
    return term_b + term_bt


def sigma_identity(m: TestFunction, u: AutomorphicWeight) -> complex:
    """Identity-class term m(0) int_F u dmu (zero for cuspidal weights)."""
    return float(m(0.0)) * complex(u.mean_mass)


@dataclass(frozen=True)
class QuadratureSpec:
    """Mesh for the fundamental-domain quadrature.

    nx uniform x-panels, ny geometrically graded y-panels (refined
    toward the boundary arc through the corner points), Gauss-Legendre
    order per panel.  y_cap = None picks the smallest height at which
    only translations reach the kernel support, plus margin.
    """

    nx: int = 16
    ny: int = 16
    order: int = 8
    y_cap: float = None


@dataclass(frozen=True)
class TraceFormulaReport:
    sigma_hyp: complex
    sigma_ell: complex
    sigma_par: complex
    sigma_id: complex
    geometric_lhs: complex
    residual: float
    diagnostics: dict

    @property
    def rhs_total(self) -> complex:
        return self.sigma_hyp + self.sigma_ell + self.sigma_par + self.sigma_id

    def to_json(self) -> str:
        def enc(z):
            z = complex(z)
            return {"re": z.real, "im": z.imag}

        payload = {
            "sigma_hyp": enc(self.sigma_hyp),
            "sigma_ell": enc(self.sigma_ell),
            "sigma_par": enc(self.sigma_par),
            "sigma_id": enc(self.sigma_id),
            "rhs_total": enc(self.rhs_total),
            "geometric_lhs": enc(self.geometric_lhs),
            "residual": self.residual,
            "diagnostics": self.diagnostics,
        }
        return json.dumps(payload, indent=2)


def _auto_y_cap(support: float) -> float:
    # above y* = sqrt(V) + sqrt(V+1), rows with c != 0 fall outside the
    # kernel support and only the translation family survives
    y_star = math.sqrt(support) + math.sqrt(support + 1.0)
    return max(10.0, y_star + 0.5)


def _cusp_tail(m: TestFunction, y_cap: float) -> float:
    """int_{y > y_cap} sum_l m(l^2 / 4y^2) dmu over the cusp strip.

    Above y_cap only the translation family reaches the support.  The
    l = 0 term integrates to m(0)/y_cap.  The l != 0 sum is only
    conditionally convergent when interchanged with the integral; the
    honest limit (cut at height Y2, sum the finitely many terms, let
    Y2 -> infinity) leaves a constant behind:

        int_{y>Y} sum_{l != 0} m(l^2/4y^2) dmu
            = sum_{l>=1} (4/l) H(l/(2Y)) - 4 int_0^inf H(s)/s ds,

    with H(s) = int_0^s m(w^2) dw, and the last integral equals
    -int m(v) v^{-1/2} log v dv by parts.  This is exactly where the
    logarithmic cusp weight of the parabolic term comes from.
    """
    breaks = [math.sqrt(b) for b in m.breakpoints if b > 0]
    total = float(m(0.0)) / y_cap
    l_top = int(math.ceil(2.0 * y_cap * math.sqrt(m.support_bound))) + 1
    for ell in range(1, l_top + 1):
        upper = ell / (2.0 * y_cap)
        val = _quad(lambda w: float(m(w * w)), 0.0, upper, points=breaks, epsabs=1e-12)
        total += 4.0 / ell * val
    log_moment = _quad(lambda s: float(m(s * s)) * (4.0 * math.log(s) if s > 0 else 0.0),
                       0.0, math.sqrt(m.support_bound), points=breaks, epsabs=1e-12)
    return total + log_moment


def geometric_lhs(m: TestFunction, u: AutomorphicWeight, spec: QuadratureSpec,
                  enforce_moment: bool = True):
    """Brute-force int_F M(z,z) u(z) dmu with cusp-tail correction.

    Requires the vanishing-moment condition (checked to 1e-9 scale),
    without which the integrand grows up the cusp and the tail formula
    is only a truncation.  ``enforce_moment=False`` skips the gate for
    small-support limit experiments where the cusp never sees the
    kernel below the truncation height.  Returns (value, diagnostics).
    """
    moment = q_transform(m, 0.0)
    tol = 1e-9 * max(1.0, math.sqrt(m.support_bound))
    moment_ok = abs(moment) <= tol
    if enforce_moment and not moment_ok:
        raise MomentConditionError(
            f"u^(-1/2)-moment of m is {moment:.3e}, beyond the {tol:.1e} gate"
        )
    if u.kind != "constant":
        raise ValidationError("geometric_lhs evaluates the constant weight only")

    y_cap = spec.y_cap if spec.y_cap is not None else _auto_y_cap(m.support_bound)
    x_enum = 4.0 * m.support_bound + 2.0
    nodes, weights = np.polynomial.legendre.leggauss(spec.order)
    u0 = _U0

    total = 0.0
    node_count = 0
    x_edges = np.linspace(-0.5, 0.5, spec.nx + 1)
    for x_lo, x_hi in zip(x_edges[:-1], x_edges[1:]):
        xm, xr = 0.5 * (x_hi + x_lo), 0.5 * (x_hi - x_lo)
        for xn, xw in zip(xm + xr * nodes, weights):
            y_lo = math.sqrt(max(1.0 - xn * xn, 0.0))
            # geometric grading toward the boundary arc
            y_edges = y_lo * (y_cap / y_lo) ** np.linspace(0.0, 1.0, spec.ny + 1)
            for y_a, y_b in zip(y_edges[:-1], y_edges[1:]):
                ym, yr = 0.5 * (y_b + y_a), 0.5 * (y_b - y_a)
                for yn, yw in zip(ym + yr * nodes, weights):
                    uvals = _fastcount.ball_u_values(xn, yn, xn, yn, x_enum, 1e-9)
                    m_diag = float(np.sum(m(uvals)))
                    total += xw * xr * yw * yr * m_diag * u0 / (yn * yn)
                    node_count += 1
    if moment_ok:
        tail = u0 * _cusp_tail(m, y_cap)
    else:
        # without the vanishing moment the translation tail diverges;
        # keep only the identity-class strip (truncated reading)
        tail = u0 * float(m(0.0)) / y_cap
    diagnostics = {
        "nodes": node_count,
        "y_cap": y_cap,
        "tail": tail,
        "interior": total,
    }
    return total + tail, diagnostics


def verify_identity(m: TestFunction, u: AutomorphicWeight, spectrum=None,
                    quad_specs=(QuadratureSpec(12, 12, 8), QuadratureSpec(24, 24, 8))):
    """Evaluate both sides and report the residual (never raises on size).

    The left side is recomputed on each quadrature spec in order; the
    finest one is compared, the coarser ones go into the diagnostics so
    a caller can see the refinement trend.
    """
    needed = needed_spectrum_norm(m) * (1.0 + 1e-9)
    complete_to = None
    if spectrum is None:
        spectrum = classes_up_to_norm(needed)
        complete_to = needed
    s_hyp = sigma_hyp(m, u, spectrum, complete_to_norm=complete_to)
    s_ell = sigma_ell(m, u)
    s_par = sigma_par(m, u)
    s_id = sigma_identity(m, u)
    rhs = s_hyp + s_ell + s_par + s_id

    lhs_levels = []
    diag_last = {}
    for spec in quad_specs:
        val, diag = geometric_lhs(m, u, spec)
        lhs_levels.append(val)
        diag_last = diag
    lhs = lhs_levels[-1]
    residual = abs(lhs - rhs) / (1.0 + abs(lhs))
    diagnostics = dict(diag_last)
    diagnostics["lhs_levels"] = [float(v) for v in lhs_levels]
    diagnostics["level_residuals"] = [float(abs(v - rhs) / (1.0 + abs(v))) for v in lhs_levels]
    return TraceFormulaReport(s_hyp, s_ell, s_par, s_id, lhs, residual, diagnostics)
