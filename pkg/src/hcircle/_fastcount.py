"""JIT kernels for floating-point orbit-ball scans over PSL(2,Z).

The scan iterates coprime bottom rows (c,d) inside the rectangle forced
by Im(gz) = Im z/|cz+d|^2, then solves the membership constraint
|A + tB|^2 <= (X-2) Im z Im w in closed form for the one-parameter
family (a,b) = (a0,b0) + t(c,d).  Boundary comparisons carry the
documented relative tolerance on the 4u+2 value.

These kernels are the throughput path used by quadrature loops; the
exact integer path lives in :mod:`hcircle.modular_group`.
"""

import math

import numpy as np
from numba import njit

__all__ = ["count_ball", "ball_u_values", "ball_matrices", "banded_scan"]


@njit(cache=True)
def _ext_gcd(a, b):
    """(g, p, q) with p*a + q*b = g = gcd(a,b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@njit(cache=True)
def _gcd(a, b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _t_window(a0, b0, c, d, zx, zy, wx, wy, bound):
    """Integer t-range [tlo, thi] of |A + tB|^2 <= bound (thi < tlo if empty)."""
    bre = c * zx + d
    bim = c * zy
    are = a0 * zx + b0 - (wx * bre - wy * bim)
    aim = a0 * zy - (wx * bim + wy * bre)
    qq = bre * bre + bim * bim
    beta = are * bre + aim * bim
    c0 = are * are + aim * aim - bound
    disc = beta * beta - qq * c0
    if disc < 0.0:
        return 1, 0
    s = math.sqrt(disc)
    thi = int(math.floor((-beta + s) / qq))
    tlo = int(math.ceil((-beta - s) / qq))
    return tlo, thi


@njit(cache=True)
def count_ball(zx, zy, wx, wy, x_thresh, rel_tol):
    """Number of gamma in PSL(2,Z) with 4u(gamma z, w) + 2 <= X (tolerant)."""
    xe = x_thresh * (1.0 + rel_tol)
    if xe < 2.0:
        return 0
    eta_plus = 0.5 * (xe + math.sqrt(xe * xe - 4.0))
    qmax = (zy / wy) * eta_plus * (1.0 + 1e-12) + 1e-9
    bound = (xe - 2.0) * zy * wy
    total = 0

    # c = 0 contributes the translation family through (c,d) = (0,1)
    tlo, thi = _t_window(1, 0, 0, 1, zx, zy, wx, wy, bound)
    if thi >= tlo:
        total += thi - tlo + 1

    cmax = int(math.sqrt(qmax) / zy) + 2
    for c in range(1, cmax + 1):
        rad2 = qmax - (c * zy) * (c * zy)
        if rad2 < 0.0:
            break
        rad = math.sqrt(rad2) + 1.0
        dlo = int(math.ceil(-c * zx - rad))
        dhi = int(math.floor(-c * zx + rad))
        for d in range(dlo, dhi + 1):
            if _gcd(c, d) != 1:
                continue
            g, p, q = _ext_gcd(d, c)
            a0 = p
            b0 = -q
            tlo, thi = _t_window(a0, b0, c, d, zx, zy, wx, wy, bound)
            if thi >= tlo:
                total += thi - tlo + 1
    return total


@njit(cache=True)
def ball_u_values(zx, zy, wx, wy, x_thresh, rel_tol):
    """u(gamma z, w) for every ball element, unordered."""
    xe = x_thresh * (1.0 + rel_tol)
    out = np.empty(256, dtype=np.float64)
    n = 0
    if xe < 2.0:
        return out[:0]
    eta_plus = 0.5 * (xe + math.sqrt(xe * xe - 4.0))
    qmax = (zy / wy) * eta_plus * (1.0 + 1e-12) + 1e-9
    bound = (xe - 2.0) * zy * wy
    inv4yv = 0.25 / (zy * wy)
    cmax = int(math.sqrt(qmax) / zy) + 2

    for c in range(0, cmax + 1):
        if c == 0:
            d_first, d_last = 1, 1
        else:
            rad2 = qmax - (c * zy) * (c * zy)
            if rad2 < 0.0:
                break
            rad = math.sqrt(rad2) + 1.0
            d_first = int(math.ceil(-c * zx - rad))
            d_last = int(math.floor(-c * zx + rad))
        for d in range(d_first, d_last + 1):
            if _gcd(c, d) != 1:
                continue
            g, p, q = _ext_gcd(d, c)
            a0 = p
            b0 = -q
            bre = c * zx + d
            bim = c * zy
            are = a0 * zx + b0 - (wx * bre - wy * bim)
            aim = a0 * zy - (wx * bim + wy * bre)
            qq = bre * bre + bim * bim
            beta = are * bre + aim * bim
            c0 = are * are + aim * aim - bound
            disc = beta * beta - qq * c0
            if disc < 0.0:
                continue
            s = math.sqrt(disc)
            thi = int(math.floor((-beta + s) / qq))
            tlo = int(math.ceil((-beta - s) / qq))
            for t in range(tlo, thi + 1):
                fre = are + t * bre
                fim = aim + t * bim
                if n == out.shape[0]:
                    grown = np.empty(2 * n, dtype=np.float64)
                    grown[:n] = out
                    out = grown
                out[n] = (fre * fre + fim * fim) * inv4yv
                n += 1
    return out[:n]


@njit(cache=True)
def banded_scan(zx, zy, wx, wy, x_sharp, x_lo, x_hi, rel_tol):
    """One scan, three thresholds x_lo <= x_sharp <= x_hi (4u+2 values).

    Returns (n_sharp, n_lo, u_band): counts below the sharp and low
    thresholds, plus the u-values of the elements strictly between the
    low and high thresholds.  This is what the sharp/smoothed kernel
    decompositions need: everything below the transition band behaves
    like a plain count, only the band needs pointwise values.
    """
    xe_hi = x_hi * (1.0 + rel_tol)
    n_est = int(3.5 * max(x_hi - x_lo, 8.0)) + 1024
    band = np.empty(n_est, dtype=np.float64)
    n_sharp = 0
    n_lo = 0
    nb = 0
    if xe_hi < 2.0:
        return 0, 0, band[:0]
    eta_plus = 0.5 * (xe_hi + math.sqrt(xe_hi * xe_hi - 4.0))
    qmax = (zy / wy) * eta_plus * (1.0 + 1e-12) + 1e-9
    bound_hi = (xe_hi - 2.0) * zy * wy
    bound_lo = (x_lo * (1.0 + rel_tol) - 2.0) * zy * wy
    bound_sharp = (x_sharp * (1.0 + rel_tol) - 2.0) * zy * wy
    inv4yv = 0.25 / (zy * wy)
    cmax = int(math.sqrt(qmax) / zy) + 2

    for c in range(0, cmax + 1):
        if c == 0:
            d_first, d_last = 1, 1
        else:
            rad2 = qmax - (c * zy) * (c * zy)
            if rad2 < 0.0:
                break
            rad = math.sqrt(rad2) + 1.0
            d_first = int(math.ceil(-c * zx - rad))
            d_last = int(math.floor(-c * zx + rad))
        for d in range(d_first, d_last + 1):
            if _gcd(c, d) != 1:
                continue
            g, p, q = _ext_gcd(d, c)
            a0 = p
            b0 = -q
            bre = c * zx + d
            bim = c * zy
            are = a0 * zx + b0 - (wx * bre - wy * bim)
            aim = a0 * zy - (wx * bim + wy * bre)
            qq = bre * bre + bim * bim
            beta = are * bre + aim * bim
            amod = are * are + aim * aim
            disc_hi = beta * beta - qq * (amod - bound_hi)
            if disc_hi < 0.0:
                continue
            s_hi = math.sqrt(disc_hi)
            thi_hi = int(math.floor((-beta + s_hi) / qq))
            tlo_hi = int(math.ceil((-beta - s_hi) / qq))
            if thi_hi < tlo_hi:
                continue
            disc_s = beta * beta - qq * (amod - bound_sharp)
            if disc_s >= 0.0:
                s_s = math.sqrt(disc_s)
                hi_ = int(math.floor((-beta + s_s) / qq))
                lo_ = int(math.ceil((-beta - s_s) / qq))
                if hi_ >= lo_:
                    n_sharp += hi_ - lo_ + 1
            disc_lo = beta * beta - qq * (amod - bound_lo)
            tlo_band_end = thi_hi  # [tlo_hi .. tlo_band_end] left band piece
            thi_band_start = thi_hi + 1
            if disc_lo >= 0.0:
                s_lo = math.sqrt(disc_lo)
                hi_ = int(math.floor((-beta + s_lo) / qq))
                lo_ = int(math.ceil((-beta - s_lo) / qq))
                if hi_ >= lo_:
                    n_lo += hi_ - lo_ + 1
                    tlo_band_end = lo_ - 1
                    thi_band_start = hi_ + 1
            # band pieces: [tlo_hi, tlo_band_end] and [thi_band_start, thi_hi]
            for t in range(tlo_hi, tlo_band_end + 1):
                fre = are + t * bre
                fim = aim + t * bim
                if nb == band.shape[0]:
                    grown = np.empty(2 * nb, dtype=np.float64)
                    grown[:nb] = band
                    band = grown
                band[nb] = (fre * fre + fim * fim) * inv4yv
                nb += 1
            for t in range(thi_band_start, thi_hi + 1):
                fre = are + t * bre
                fim = aim + t * bim
                if nb == band.shape[0]:
                    grown = np.empty(2 * nb, dtype=np.float64)
                    grown[:nb] = band
                    band = grown
                band[nb] = (fre * fre + fim * fim) * inv4yv
                nb += 1
    return n_sharp, n_lo, band[:nb]


@njit(cache=True)
def ball_matrices(zx, zy, wx, wy, x_thresh, rel_tol):
    """(entries, u) arrays for every ball element; entries rows are (a,b,c,d)."""
    xe = x_thresh * (1.0 + rel_tol)
    mats = np.empty((256, 4), dtype=np.int64)
    uvals = np.empty(256, dtype=np.float64)
    n = 0
    if xe < 2.0:
        return mats[:0], uvals[:0]
    eta_plus = 0.5 * (xe + math.sqrt(xe * xe - 4.0))
    qmax = (zy / wy) * eta_plus * (1.0 + 1e-12) + 1e-9
    bound = (xe - 2.0) * zy * wy
    inv4yv = 0.25 / (zy * wy)
    cmax = int(math.sqrt(qmax) / zy) + 2

    for c in range(0, cmax + 1):
        if c == 0:
            d_first, d_last = 1, 1
        else:
            rad2 = qmax - (c * zy) * (c * zy)
            if rad2 < 0.0:
                break
            rad = math.sqrt(rad2) + 1.0
            d_first = int(math.ceil(-c * zx - rad))
            d_last = int(math.floor(-c * zx + rad))
        for d in range(d_first, d_last + 1):
            if _gcd(c, d) != 1:
                continue
            g, p, q = _ext_gcd(d, c)
            a0 = p
            b0 = -q
            bre = c * zx + d
            bim = c * zy
            are = a0 * zx + b0 - (wx * bre - wy * bim)
            aim = a0 * zy - (wx * bim + wy * bre)
            qq = bre * bre + bim * bim
            beta = are * bre + aim * bim
            c0 = are * are + aim * aim - bound
            disc = beta * beta - qq * c0
            if disc < 0.0:
                continue
            s = math.sqrt(disc)
            thi = int(math.floor((-beta + s) / qq))
            tlo = int(math.ceil((-beta - s) / qq))
            for t in range(tlo, thi + 1):
                if n == mats.shape[0]:
                    grown_m = np.empty((2 * n, 4), dtype=np.int64)
                    grown_m[:n] = mats
                    mats = grown_m
                    grown_u = np.empty(2 * n, dtype=np.float64)
                    grown_u[:n] = uvals
                    uvals = grown_u
                mats[n, 0] = a0 + t * c
                mats[n, 1] = b0 + t * d
                mats[n, 2] = c
                mats[n, 3] = d
                fre = are + t * bre
                fim = aim + t * bim
                uvals[n] = (fre * fre + fim * fim) * inv4yv
                n += 1
    return mats[:n], uvals[:n]
