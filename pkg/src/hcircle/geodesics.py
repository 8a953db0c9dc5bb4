"""Hyperbolic length spectrum of PSL(2,Z) via indefinite form reduction.

Conjugacy classes of hyperbolic elements with trace t >= 3 are in
bijection with SL(2,Z)-classes of integer binary quadratic forms of
discriminant t^2 - 4 (imprimitive forms included), and the number of
classes equals the number of Gauss reduction cycles.  The norm of a
trace-t class is N = ((t + sqrt(t^2-4))/2)^2, its geodesic length is
log N = 2 arccosh(t/2).

Powers are bookkept exactly through the trace recursion
t_k = t_{k-1} t_1 - t_{k-2}: an imprimitive class is the k-th power of
a unique primitive class, so the primitive class count at trace t is
the cycle count minus the primitive counts of all power sources.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache

from .errors import ValidationError

__all__ = [
    "QuadraticForm",
    "ConjugacyClassRecord",
    "reduced_forms",
    "reduction_cycles",
    "class_count_by_trace",
    "primitive_class_count",
    "power_trace",
    "norm_of_trace",
    "length_of_trace",
    "classes_up_to_norm",
    "psi_geodesic",
    "write_geodesic_csv",
    "read_geodesic_csv",
]


@dataclass(frozen=True)
class QuadraticForm:
    """Integer indefinite form a X^2 + b XY + c Y^2 of positive nonsquare
    discriminant b^2 - 4ac."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        d = self.discriminant
        if d <= 0:
            raise ValidationError(f"form {self} has nonpositive discriminant {d}")
        r = math.isqrt(d)
        if r * r == d:
            raise ValidationError(f"form {self} has square discriminant {d}")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def reduced(self) -> bool:
        # |sqrt(D) - 2|a|| < b < sqrt(D), decided in integers
        d = self.discriminant
        if self.b <= 0:
            return False
        s2 = 2 * abs(self.a)
        if (s2 + self.b) ** 2 <= d:
            return False
        return s2 < self.b or (s2 - self.b) ** 2 < d


@dataclass(frozen=True)
class ConjugacyClassRecord:
    """One (trace, power-structure) group of PSL(2,Z) conjugacy classes.

    ``class_count`` classes share this trace and this primitive length;
    imprimitive groups (primitive=False) are k-th powers, with
    primitive_length = length / k for the generating trace.
    """

    trace: int
    discriminant: int
    class_count: int
    norm: float
    length: float
    primitive: bool
    primitive_length: float


def _reduced_ok(abs_a: int, b: int, disc: int) -> bool:
    s2 = 2 * abs_a
    if (s2 + b) ** 2 <= disc:
        return False
    return s2 < b or (s2 - b) ** 2 < disc


def reduced_forms(disc: int) -> list:
    """All reduced forms of the given discriminant, imprimitive included."""
    if disc <= 0 or disc % 4 not in (0, 1):
        raise ValidationError(f"{disc} is not a positive discriminant")
    s = math.isqrt(disc)
    if s * s == disc:
        raise ValidationError(f"square discriminant {disc} not supported")
    forms = []
    b0 = 1 if disc % 2 else 2
    for b in range(b0, s + 1, 2):
        m = (disc - b * b) // 4
        e = 1
        while e * e <= m:
            if m % e == 0:
                for abs_a in {e, m // e}:
                    if _reduced_ok(abs_a, b, disc):
                        forms.append(QuadraticForm(abs_a, b, -(m // abs_a)))
                        forms.append(QuadraticForm(-abs_a, b, m // abs_a))
            e += 1
    return forms


def _rho(form: QuadraticForm, disc: int, s: int) -> QuadraticForm:
    # reduction neighbor: (a,b,c) -> (c, b', (b'^2 - D)/(4c)) with
    # b' = -b mod 2|c| placed in the window (sqrt(D) - 2|c|, sqrt(D))
    two_c = 2 * abs(form.c)
    b_next = s - (s + form.b) % two_c
    c_next = (b_next * b_next - disc) // (4 * form.c)
    return QuadraticForm(form.c, b_next, c_next)


def reduction_cycles(disc: int) -> list:
    """Partition of the reduced forms into rho-cycles."""
    forms = reduced_forms(disc)
    index = {(f.a, f.b, f.c): f for f in forms}
    s = math.isqrt(disc)
    seen = set()
    cycles = []
    for start in sorted(index):
        if start in seen:
            continue
        cycle = []
        key = start
        while key not in seen:
            seen.add(key)
            cycle.append(index[key])
            nxt = _rho(index[key], disc, s)
            key = (nxt.a, nxt.b, nxt.c)
            if key not in index:
                raise ValidationError(f"reduction step left the reduced set at {key} (disc {disc})")
        cycles.append(cycle)
    return cycles


@lru_cache(maxsize=None)
def class_count_by_trace(trace: int) -> int:
    """Number of PSL(2,Z) conjugacy classes of hyperbolic trace t >= 3."""
    if trace < 3:
        raise ValidationError(f"hyperbolic trace must be >= 3, got {trace}")
    return len(reduction_cycles(trace * trace - 4))


def power_trace(base_trace: int, k: int) -> int:
    """Trace of the k-th power of a trace-t element (Chebyshev recursion)."""
    if k < 1:
        raise ValidationError("power must be >= 1")
    prev, cur = 2, base_trace  # traces of gamma^0, gamma^1
    for _ in range(k - 1):
        prev, cur = cur, base_trace * cur - prev
    return cur


def _power_sources(trace: int):
    """(s, k >= 2) pairs whose k-th power trace equals this trace."""
    out = []
    s = 3
    while s * s - 2 <= trace:
        k = 2
        val = power_trace(s, 2)
        while val <= trace:
            if val == trace:
                out.append((s, k))
            k += 1
            val = power_trace(s, k)
        s += 1
    return out


@lru_cache(maxsize=None)
def primitive_class_count(trace: int) -> int:
    """Classes of trace t that are not proper powers."""
    total = class_count_by_trace(trace)
    for s, _k in _power_sources(trace):
        total -= primitive_class_count(s)
    if total < 0:
        raise ValidationError(f"power bookkeeping went negative at trace {trace}")
    return total


def norm_of_trace(trace: int) -> float:
    half = 0.5 * (trace + math.sqrt(trace * trace - 4.0))
    return half * half


def length_of_trace(trace: int) -> float:
    return 2.0 * math.acosh(0.5 * trace)


def _records_for_trace(trace: int) -> list:
    disc = trace * trace - 4
    norm = norm_of_trace(trace)
    length = length_of_trace(trace)
    records = []
    prim = primitive_class_count(trace)
    if prim > 0:
        records.append(ConjugacyClassRecord(trace, disc, prim, norm, length, True, length))
    for s, k in _power_sources(trace):
        count = primitive_class_count(s)
        if count > 0:
            records.append(
                ConjugacyClassRecord(trace, disc, count, norm, length, False, length_of_trace(s))
            )
    return records


def _cache_path(cache_dir, trace: int) -> str:
    return os.path.join(cache_dir, f"trace_{trace:06d}.csv")


def _load_cached(cache_dir, trace: int):
    path = _cache_path(cache_dir, trace)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        return _records_from_rows(csv.DictReader(fh))


def _store_cached(cache_dir, trace: int, records) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            _write_rows(fh, records)
        os.replace(tmp, _cache_path(cache_dir, trace))
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def classes_up_to_norm(xmax: float, cache_dir=None) -> list:
    """All conjugacy-class records with norm <= xmax, sorted by norm.

    Per-trace results are cached on disk (one CSV per trace, written
    atomically) when a cache directory is given.
    """
    if not xmax > 1:
        raise ValidationError(f"classes_up_to_norm needs xmax > 1, got {xmax}")
    records = []
    trace = 3
    while trace * trace - 2 <= xmax + 1.0 / xmax + 2:  # N + 1/N = t^2 - 2
        if norm_of_trace(trace) > xmax:
            break
        cached = _load_cached(cache_dir, trace) if cache_dir else None
        if cached is None:
            cached = _records_for_trace(trace)
            if cache_dir:
                _store_cached(cache_dir, trace, cached)
        records.extend(cached)
        trace += 1
    records.sort(key=lambda r: (r.norm, not r.primitive, r.primitive_length))
    return records


def psi_geodesic(xmax: float, cache_dir=None) -> float:
    """Chebyshev function of the length spectrum:
    sum of (primitive length) x (class count) over classes with N <= xmax."""
    if not xmax > 1:
        raise ValidationError(f"psi_geodesic needs xmax > 1, got {xmax}")
    total = 0.0
    if xmax < norm_of_trace(3):
        return total
    for rec in classes_up_to_norm(xmax, cache_dir=cache_dir):
        total += rec.class_count * rec.primitive_length
    return total


_CSV_FIELDS = ["trace", "discriminant", "class_count", "norm", "length", "primitive", "primitive_length"]


def _write_rows(fh, records) -> None:
    writer = csv.writer(fh)
    writer.writerow(_CSV_FIELDS)
    for r in records:
        writer.writerow([r.trace, r.discriminant, r.class_count, repr(r.norm),
                         repr(r.length), int(r.primitive), repr(r.primitive_length)])


def _records_from_rows(reader) -> list:
    out = []
    for row in reader:
        out.append(ConjugacyClassRecord(
            trace=int(row["trace"]),
            discriminant=int(row["discriminant"]),
            class_count=int(row["class_count"]),
            norm=float(row["norm"]),
            length=float(row["length"]),
            primitive=bool(int(row["primitive"])),
            primitive_length=float(row["primitive_length"]),
        ))
    return out


def write_geodesic_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        _write_rows(fh, records)


def read_geodesic_csv(path) -> list:
    with open(path, newline="") as fh:
        return _records_from_rows(csv.DictReader(fh))
