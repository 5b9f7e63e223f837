from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from incidence_lab.constructions import (
    FamilyParams,
    LatticeLine,
    PointGrid,
    elekes_lines,
    erdos_lines,
    erdos_slopes,
    family_lines_simplified,
    family_params,
)
from incidence_lab.engine import line_points_scan

points = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


@given(points, points)
def test_line_through_contains_both_points(p, q):
    if p == q:
        return
    line = LatticeLine.through(p, q)
    assert line.contains(*p) and line.contains(*q)
    assert gcd(line.A, line.B) == 1
    assert line.B > 0 or (line.B == 0 and line.A > 0)
    assert LatticeLine.through(q, p) == line


def test_canonical_rejects_degenerate_and_empty_lines():
    with pytest.raises(ValueError):
        LatticeLine.canonical(0, 0, 1)
    with pytest.raises(ValueError):
        LatticeLine.canonical(2, 4, 1)
    assert LatticeLine.canonical(-2, -4, -6) == LatticeLine(1, 2, 3)


def test_point_grid_cap():
    grid = PointGrid(3, 2)
    assert list(grid.points()) == [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]
    with pytest.raises(ValueError):
        list(PointGrid(2000, 1000).points())


def test_erdos_slopes_and_d_range():
    assert erdos_slopes(4096) == sorted(Fraction(a, b) for a, b in
                                        [(1, 2), (1, 3), (2, 3), (1, 4), (3, 4)])
    lines = erdos_lines(4096)
    assert (lines.params["d_lo"], lines.params["d_hi"]) == (32, 48)
    assert lines.params["d_hi"] - lines.params["d_lo"] + 1 == 17
    assert {ln.slope for ln in lines.lines} == set(erdos_slopes(4096))


def test_erdos_empty_range():
    lines = erdos_lines(63)
    assert len(lines) == 0 and lines.warning


@pytest.mark.parametrize("n", [64, 729, 4096, 15625])
def test_erdos_dedup_against_raw_box(n):
    lines = erdos_lines(n)
    p = lines.params
    raw = sum(b for b in range(2, p["b_max"] + 1) for a in range(1, b) if gcd(a, b) == 1)
    raw *= p["d_hi"] - p["d_lo"] + 1
    assert len(lines) <= raw
    # distinct (slope, c, d) give distinct lines: c <= b moves the intercept by less than d does
    assert len(lines) == raw


def test_elekes_examples():
    lines = elekes_lines(64)
    assert len(lines) == 64
    assert LatticeLine(-2, 1, 3) in lines.lines
    assert lines.warning is None
    assert len(elekes_lines(8)) == 8


@given(st.integers(1, 3000))
def test_elekes_cardinality(n):
    a = round(n ** (1 / 3))
    while a**3 > n:
        a -= 1
    while (a + 1) ** 3 <= n:
        a += 1
    b = round(n ** (2 / 3))
    while b**3 > n * n:
        b -= 1
    while (b + 1) ** 3 <= n * n:
        b += 1
    assert len(elekes_lines(n)) == a * b


def test_family_endpoints():
    lines = family_lines_simplified(4096, Fraction(1, 2))
    assert lines.params["a_count"] == 1  # only a = 0
    assert all(0 < ln.slope < 1 for ln in lines.lines)
    assert {ln.slope for ln in lines.lines} == set(erdos_slopes(4096))
    # d is half-open here, closed for Erdos
    assert lines.params["d_end"] == 48

    elekes_end = family_lines_simplified(4096, Fraction(1, 3))
    assert len(elekes_end) == 0
    assert "b/c" in elekes_end.warning


def test_family_mixed_alpha_has_integer_and_fractional_parts():
    n = 2**24
    lines = family_lines_simplified(n, Fraction(2, 5))
    p = lines.params
    assert p["a_count"] >= 2 and p["c_max"] >= 2
    slopes = {ln.slope for ln in lines.lines}
    assert any(s > 1 for s in slopes) and all(s.denominator > 1 for s in slopes)


def test_family_rejects_alpha_out_of_range():
    with pytest.raises(ValueError):
        family_lines_simplified(4096, Fraction(3, 5))


def test_generated_lines_membership_is_exact():
    for lines in (erdos_lines(4096), elekes_lines(216), family_lines_simplified(4096, Fraction(1, 2))):
        grid = lines.grid
        for ln in lines.lines[:60]:
            on = [(x, y) for x, y in grid.points() if ln.A * x + ln.B * y == ln.C]
            assert len(on) == line_points_scan(ln, grid.W, grid.H)


def test_generation_is_deterministic():
    assert erdos_lines(4096).lines == erdos_lines(4096).lines
    assert family_lines_simplified(5000, Fraction(1, 2)).lines == family_lines_simplified(5000, Fraction(1, 2)).lines


def test_family_params_examples():
    p = family_params(100, 100, 10)
    assert p.n == 10**4 and p.alpha == pytest.approx(0.5) and p.epsilon == pytest.approx(0.1)
    p = family_params(100, 10**4, 10)
    assert p.alpha == pytest.approx(1 / 3) and p.epsilon == pytest.approx(0.1)
    # W * n^(-1/5) = 10^5 / 10^2, so the ceiling is 1000 and eps = 1/100
    W = H = 10**5
    T = -(-W // 10**2)
    p = family_params(W, H, T)
    assert p.T == 1000 and p.epsilon == pytest.approx(0.01)


@pytest.mark.parametrize("args", [(5, 4, 2), (4, 4, 1), (4, 4, 5), (0, 4, 2)])
def test_family_params_bounds(args):
    with pytest.raises(ValueError):
        family_params(*args)


def test_family_params_type_allows_exploration():
    # the raw type permits T > W; only family_params enforces the family bounds
    assert FamilyParams(3, 3, 7).T == 7
