from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_lab.constructions import FamilyParams, LatticeLine, PointGrid, elekes_lines
from incidence_lab.engine import (
    QUADRANTS,
    ReducedSlope,
    brute_force_report,
    classify,
    count_family,
    enumerate_slopes,
    explicit_set_incidences,
    line_points_in_box,
    line_points_scan,
    run_counts,
    anchor_formula_report,
    slope_family_stats,
    staircase_check,
)


def runs_by_enumeration(W, H, r, s, k):
    n = 0
    for x in range(1, W + 1):
        for y in range(1, H + 1):
            if all(1 <= x + i * r <= W and 1 <= y - i * s <= H for i in range(k)):
                n += 1
    return n


@pytest.mark.parametrize("args,expected", [((3, 3, 1, 1, 1), 9), ((3, 3, 1, 1, 2), 4), ((5, 3, 2, 1, 3), 1)])
def test_run_counts_examples(args, expected):
    assert run_counts(*args) == expected == runs_by_enumeration(*args)


@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 5), st.integers(1, 5), st.integers(1, 6))
def test_run_counts_match_enumeration(W, H, r, s, k):
    assert run_counts(W, H, r, s, k) == runs_by_enumeration(W, H, r, s, k)


@pytest.mark.parametrize("slope,T,expected", [("-1/1", 2, (3, 7)), ("-1/1", 4, (0, 0)), ("-2/1", 2, (2, 4))])
def test_slope_family_stats_examples(slope, T, expected):
    prof = slope_family_stats(3, 3, ReducedSlope.parse(slope), T)
    assert (prof.qualifying_lines, prof.incidences) == expected


def test_slope_parse_and_str():
    sl = ReducedSlope.parse("-3/2")
    assert (sl.r, sl.s, sl.sign) == (2, 3, -1)
    assert str(sl) == "-3/2" and str(sl.mirrored()) == "3/2"
    assert ReducedSlope.parse("4") == ReducedSlope(1, 4, 1)
    with pytest.raises(ValueError):
        ReducedSlope(2, 4)


@settings(max_examples=200)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_profile_invariants(W, H, r, s, T):
    from math import gcd
    if gcd(r, s) != 1:
        return
    slope = ReducedSlope(r, s)
    prof = slope_family_stats(W, H, slope, T)
    assert prof.qualifying_lines == prof.ap_T - prof.ap_T1 >= 0
    assert prof.incidences == prof.ap_T + (T - 1) * prof.qualifying_lines
    e = prof.e
    assert sum(e[T - 1:]) == prof.qualifying_lines
    assert sum(k * c for k, c in enumerate(e, 1) if k >= T) == prof.incidences
    # telescoping over the finite support
    tail = sum(run_counts(W, H, r, s, k) - run_counts(W, H, r, s, k + 1) for k in range(T, len(e) + 2))
    assert tail == prof.ap_T
    mirrored = slope_family_stats(W, H, slope.mirrored(), T)
    assert (mirrored.qualifying_lines, mirrored.incidences) == (prof.qualifying_lines, prof.incidences)
    nxt = slope_family_stats(W, H, slope, T + 1)
    assert nxt.qualifying_lines <= prof.qualifying_lines and nxt.incidences <= prof.incidences


def test_enumerate_slopes_examples():
    assert [str(s) for s in enumerate_slopes(FamilyParams(3, 3, 2))] == ["-2/1", "2/1", "-1/2", "1/2"]
    assert list(enumerate_slopes(FamilyParams(3, 3, 3))) == []
    got = {str(s) for s in enumerate_slopes(FamilyParams(3, 9, 2))}
    assert "-3/1" not in got and "3/1" not in got
    assert {"-1/1", "1/1", "-2/1", "4/1", "-8/1", "1/2", "-3/2"} <= got


def test_enumerate_slopes_without_exclusion_keeps_diagonal():
    got = [str(s) for s in enumerate_slopes(FamilyParams(3, 3, 2, exclude_diagonal=False))]
    assert got == ["-1/1", "1/1", "-2/1", "2/1", "-1/2", "1/2"]


def test_classify():
    assert classify(ReducedSlope(2, 1, 1), 3, 3) == "L1"
    assert classify(ReducedSlope(1, 2, 1), 3, 3) == "L2"
    assert classify(ReducedSlope(2, 1, -1), 3, 3) == "L3"
    assert classify(ReducedSlope(1, 2, -1), 3, 3) == "L4"
    with pytest.raises(ValueError):
        classify(ReducedSlope(1, 1), 3, 3)


def test_count_family_3x3():
    rep = count_family(FamilyParams(3, 3, 2))
    assert (rep.lines, rep.incidences) == (8, 16)
    for name in QUADRANTS:
        assert (rep.quadrants[name].lines, rep.quadrants[name].incidences) == (2, 4)
    assert rep.ratio == pytest.approx(16 / (9 ** (2 / 3) * 8 ** (2 / 3)))
    assert rep.ratio == pytest.approx(0.924, abs=5e-4)
    assert rep.method == "closed_form"


def test_count_family_threshold_above_width_is_empty():
    rep = count_family(FamilyParams(5, 8, 6))
    assert (rep.lines, rep.incidences, rep.ratio) == (0, 0, 0.0)


def test_brute_force_examples():
    p = FamilyParams(3, 3, 2)
    assert brute_force_report(p).diff(count_family(p)) == []
    assert brute_force_report(p).method == "brute_force"
    p = FamilyParams(4, 4, 2)
    assert brute_force_report(p).counts() == count_family(p).counts()
    for T in (2, 3, 5):
        assert brute_force_report(FamilyParams(1, 1, T)).lines == 0


def test_brute_force_refuses_large_grids():
    with pytest.raises(ValueError):
        brute_force_report(FamilyParams(60, 60, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 18), st.integers(1, 18), st.integers(2, 5), st.booleans())
def test_oracle_equivalence_small(W, H, T, exclude):
    p = FamilyParams(W, H, T, exclude)
    assert count_family(p).counts() == brute_force_report(p).counts()


@pytest.mark.parametrize("W,H", [(7, 7), (6, 11), (12, 30), (20, 20)])
def test_quadrant_symmetries(W, H):
    for T in (2, 3, 4):
        q = count_family(FamilyParams(W, H, T)).quadrants
        assert q["L1"] == q["L3"] and q["L2"] == q["L4"]
        if W == H:
            assert q["L1"] == q["L2"]


def test_threads_give_identical_reports():
    p = FamilyParams(300, 3000, 7)
    base = count_family(p).to_dict()
    for threads in (2, 4, 8):
        assert count_family(p, threads=threads).to_dict() == base


def test_diagonal_bucket_when_exclusion_disabled(caplog):
    p = FamilyParams(6, 6, 2, exclude_diagonal=False)
    rep = count_family(p)
    assert rep.diagonal.lines > 0
    assert rep.counts() == brute_force_report(p).counts()
    assert count_family(FamilyParams(6, 6, 2)).diagonal.lines == 0


def test_large_counts_stay_exact():
    # the per-run totals exceed int64 headroom and must switch to Python ints
    p = FamilyParams(10**5, 10**5, 1000)
    rep = count_family(p)
    assert isinstance(rep.incidences, int)
    assert rep.quadrants["L1"] == rep.quadrants["L2"]


@pytest.mark.parametrize("line,W,H,expected", [
    (LatticeLine(-1, 1, 0), 4, 4, 4),
    (LatticeLine(1, 1, 100), 4, 4, 0),
    (LatticeLine(1, 0, 2), 4, 4, 4),
    (LatticeLine(0, 1, 3), 5, 4, 5),
])
def test_line_points_examples(line, W, H, expected):
    assert line_points_in_box(line, W, H) == expected == line_points_scan(line, W, H)


@settings(max_examples=300)
@given(st.integers(-12, 12), st.integers(-12, 12), st.integers(-200, 200),
       st.integers(1, 100), st.integers(1, 100))
def test_line_points_closed_form_matches_scan(A, B, C, W, H):
    from math import gcd
    if (A, B) == (0, 0) or C % gcd(A, B):
        return
    line = LatticeLine.canonical(A, B, C)
    assert line_points_in_box(line, W, H) == line_points_scan(line, W, H)


def test_elekes_incidences():
    res = explicit_set_incidences(elekes_lines(64), PointGrid(4, 16))
    assert (res.lines, res.incidences) == (64, 156)
    assert res.ratio == pytest.approx(156 / 256)
    scan = sum(line_points_scan(ln, 4, 16) for ln in elekes_lines(64).lines)
    assert scan == 156


@pytest.mark.parametrize("W,H,slope", [(3, 3, "-1/1"), (9, 9, "-1/2"), (3, 9, "-4/1"), (17, 5, "-3/2"), (4, 30, "7/1")])
def test_staircase_examples(W, H, slope):
    assert staircase_check(W, H, ReducedSlope.parse(slope)).passed


def test_staircase_explicit_values():
    assert slope_family_stats(3, 3, ReducedSlope(1, 1), 1).e == (2, 2, 1)
    assert max(i for i, c in enumerate(slope_family_stats(9, 9, ReducedSlope(2, 1), 1).e, 1) if c) == 5
    assert max(i for i, c in enumerate(slope_family_stats(3, 9, ReducedSlope(1, 4), 1).e, 1) if c) == 3


def test_formula_report_examples():
    # -1/1 is the excluded diagonal of a square grid, so switch the exclusion off
    rows = {r["slope"]: r for r in anchor_formula_report(FamilyParams(100, 100, 10, False))}
    assert rows["-1/1"]["quadrant"] == "diagonal"
    assert rows["-1/1"]["bottom_lines_formula"] == pytest.approx(91)
    assert rows["-1/1"]["bottom_lines"] == 91
    assert rows["-1/3"]["bottom_lines_formula"] == pytest.approx(73)
    for row in rows.values():
        assert row["bottom_lines"] >= 0
        assert row["bottom_lines_abs_dev"] == pytest.approx(row["bottom_lines"] - row["bottom_lines_formula"])
    assert all(r["slope"].startswith("-") for r in rows.values())


def test_formula_report_anchor_counts_match_scan():
    W, H, T = 20, 20, 3
    for row in anchor_formula_report(FamilyParams(W, H, T)):
        slope = ReducedSlope.parse(row["slope"])
        A, B = slope.s, slope.r
        lines = Counter()
        for x in range(1, W + 1):
            for y in range(1, H + 1):
                lines[A * x + B * y] += 1
        bottom = {A * x + B for x in range(1, W + 1)}
        assert row["bottom_lines"] == sum(1 for c in bottom if lines[c] >= T)
        assert row["bottom_incidences"] == sum(lines[c] for c in bottom if lines[c] >= T)
        assert row["family_incidences"] == sum(m for m in lines.values() if m >= T)
