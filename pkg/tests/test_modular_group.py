import csv
import math
import random
from fractions import Fraction

import pytest

from hcircle.errors import BudgetExceededError, CoverageError, ValidationError
from hcircle.geometry import GroupElement, Point, apply, point_pair_invariant
from hcircle.modular_group import (
    S_GEN,
    T_GEN,
    GroupPresentation,
    count,
    enumerate_ball_arithmetic,
    enumerate_ball_generic,
    four_u_plus_two,
    reduce_to_fundamental_domain,
    write_ball_csv,
)

from oracles import brute_ball, quadruple_counts_at_i

I_EXACT = Point.of(0, 1)


def test_quadruple_identity_at_i():
    # 4u(gamma i, i) + 2 equals the entry-norm, verified in exact arithmetic
    rng = random.Random(7)
    for _ in range(40):
        c = rng.randint(-6, 6)
        d = rng.randint(-6, 6)
        if math.gcd(c, d) != 1:
            continue
        # particular solution of ad - bc = 1
        g, p, q = _ext(d, c)
        gamma = GroupElement(p, -q, c, d)
        a, b, cc, dd = gamma.entries
        val = four_u_plus_two(gamma, I_EXACT, I_EXACT)
        assert val == a * a + b * b + cc * cc + dd * dd


def _ext(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def test_ball_at_x_two_is_torsion():
    ball = enumerate_ball_arithmetic(I_EXACT, I_EXACT, 2)
    assert [g.entries for g in ball.elements] == [(0, -1, 1, 0), (1, 0, 0, 1)]
    assert count(I_EXACT, I_EXACT, 2) == 2
    assert count(I_EXACT, I_EXACT, Fraction(19, 10)) == 0
    assert count(I_EXACT, I_EXACT, Fraction(3, 2)) == 0


def test_ball_x100_matches_brute_force():
    ball = enumerate_ball_arithmetic(I_EXACT, I_EXACT, 100)
    expected = brute_ball(I_EXACT, I_EXACT, 100)
    assert set(g.entries for g in ball.elements) == expected
    assert count(I_EXACT, I_EXACT, 100) == len(expected)


def test_exactness_against_brute_force_random():
    rng = random.Random(2024)
    for case in range(50):
        z = Point.of(Fraction(rng.randint(-8, 8), rng.randint(1, 5)),
                     Fraction(rng.randint(2, 9), rng.randint(1, 4)))
        w = z if case % 3 else Point.of(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                                        Fraction(rng.randint(1, 6), rng.randint(1, 2)))
        x_thresh = Fraction(rng.randint(5, 300))
        ball = enumerate_ball_arithmetic(z, w, x_thresh)
        expected = brute_ball(z, w, x_thresh)
        assert set(g.entries for g in ball.elements) == expected, (z, w, x_thresh)
        assert count(z, w, x_thresh) == len(expected)


def test_monotonicity():
    z = Point.of(Fraction(1, 3), Fraction(5, 4))
    small = set(g.entries for g in enumerate_ball_arithmetic(z, z, 50).elements)
    large = set(g.entries for g in enumerate_ball_arithmetic(z, z, 90).elements)
    assert small <= large


def test_conjugation_covariance():
    z = Point.of(Fraction(1, 4), Fraction(3, 2))
    w = Point.of(0, 1)
    g = GroupElement(2, 1, 1, 1) @ T_GEN
    for x_thresh in (10, 57, 200):
        assert count(z, w, x_thresh) == count(apply(g, z), apply(g, w), x_thresh)


def test_growth_sanity():
    for z in (Point.of(0, 2), Point.of(Fraction(1, 5), Fraction(13, 10))):
        n = count(z, z, 10_000)
        assert 2.0 <= n / 10_000 <= 4.0


def test_float_and_exact_paths_agree():
    for x_thresh in (2, 3, 10, 99, 500):
        exact = count(I_EXACT, I_EXACT, x_thresh)
        floating = count(Point(0.0, 1.0), Point(0.0, 1.0), float(x_thresh))
        assert exact == floating
    z = Point.of(Fraction(1, 4), Fraction(3, 2))
    zf = Point(0.25, 1.5)
    ball_e = enumerate_ball_arithmetic(z, z, 300)
    ball_f = enumerate_ball_arithmetic(zf, zf, 300.0)
    assert [g.entries for g in ball_f.elements] == [tuple(int(e) for e in g.entries)
                                                    for g in ball_e.elements]


def test_ball_ordering_deterministic():
    ball = enumerate_ball_arithmetic(I_EXACT, I_EXACT, 60)
    entries = [g.entries for g in ball.elements]
    assert entries == sorted(entries)


def test_ball_csv_dump(tmp_path):
    ball = enumerate_ball_arithmetic(I_EXACT, I_EXACT, 20)
    path = tmp_path / "ball.csv"
    write_ball_csv(ball, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["a", "b", "c", "d", "u_value", "four_u_plus_two"]
    assert len(rows) == len(ball) + 1
    for row in rows[1:]:
        assert float(row[5]) <= 20.0 * (1 + 1e-9)


# ---------------------------------------------------------------- reduction

def test_reduce_identity_cases():
    fd = reduce_to_fundamental_domain(Point(0.0, 1.0))
    assert fd.reducer.entries == (1, 0, 0, 1)
    fd5 = reduce_to_fundamental_domain(Point(5.0, 1.0))
    assert fd5.reducer.entries == (1, -5, 0, 1)
    assert abs(fd5.z.x) < 1e-12 and abs(fd5.z.y - 1.0) < 1e-12


def test_reduce_deep_point():
    z = Point(0.1, 0.1)
    fd = reduce_to_fundamental_domain(z)
    assert abs(fd.z.x) <= 0.5 + 1e-12
    assert fd.z.x ** 2 + fd.z.y ** 2 >= 1 - 1e-12
    img = apply(fd.reducer, z)
    assert abs(img.x - fd.z.x) < 1e-9 and abs(img.y - fd.z.y) < 1e-9


def test_reduce_random_floats():
    rng = random.Random(5)
    for _ in range(100):
        z = Point(rng.uniform(-20, 20), rng.uniform(1e-3, 30))
        fd = reduce_to_fundamental_domain(z)
        assert abs(fd.z.x) <= 0.5 + 1e-12
        assert fd.z.x ** 2 + fd.z.y ** 2 >= 1 - 1e-12
        img = apply(fd.reducer, z)
        assert abs(img.x - fd.z.x) < 1e-8 * (1 + abs(fd.z.x))
        assert abs(img.y - fd.z.y) < 1e-8 * fd.z.y


# ---------------------------------------------------------------- generic BFS

def _float_gens(*mats):
    return tuple(GroupElement.floating(*(float(e) for e in m.entries)) for m in mats)


def test_generic_trivial_presentation():
    ball = enumerate_ball_generic(GroupPresentation(), Point(0.0, 1.0), 5.0)
    assert len(ball) == 1
    assert ball.elements[0].entries == (1.0, 0.0, 0.0, 1.0)


def test_generic_matches_arithmetic():
    gens = _float_gens(T_GEN, T_GEN.inverse(), S_GEN, S_GEN.inverse())
    pres = GroupPresentation(generators=gens, slack=3.0)
    z0 = Point(0.0, 2.0)
    radius = 2.0
    generic = enumerate_ball_generic(pres, z0, radius)
    arithmetic = enumerate_ball_arithmetic(z0, z0, 2.0 * math.cosh(radius))
    gen_set = {tuple(round(float(e), 6) for e in g.entries) for g in generic.elements}
    ari_set = {tuple(round(float(e), 6) for e in g.entries) for g in arithmetic.elements}
    assert gen_set == ari_set
    assert generic.pruned_count > 0  # search actually hit the slack wall


def test_generic_single_hyperbolic_generator():
    g = GroupElement.floating(2.0, 0.0, 0.0, 0.5)
    pres = GroupPresentation(generators=(g, g.inverse()), slack=3.0)
    ball = enumerate_ball_generic(pres, Point(0.0, 1.0), 3.0)
    # rho(g^k i, i) = |k| 2 log 2, so |k| <= 2
    assert len(ball) == 5


def test_generic_requires_inverse_closed():
    g = GroupElement.floating(2.0, 0.0, 0.0, 0.5)
    with pytest.raises(ValidationError):
        GroupPresentation(generators=(g,))


def test_generic_budget():
    gens = _float_gens(T_GEN, T_GEN.inverse(), S_GEN, S_GEN.inverse())
    pres = GroupPresentation(generators=gens, slack=3.0)
    with pytest.raises(BudgetExceededError):
        enumerate_ball_generic(pres, Point(0.0, 2.0), 6.0, max_elements=20)
