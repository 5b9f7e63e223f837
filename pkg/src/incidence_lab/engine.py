"""Exact incidence counting for the grid family.

For a reduced direction with run r and rise s, the number of k-point runs
(arithmetic progressions with step (r, -s)) inside a W x H grid is

    A'_k = max(0, W - (k-1) r) * max(0, H - (k-1) s).

A line of that slope holding m grid points contains m - k + 1 such runs, so
the number of lines with at least k points is A'_k - A'_{k+1} and their
incidences are A'_T + (T-1)(A'_T - A'_{T+1}). Counting is O(1) per slope.

``brute_force_report`` is the quadratic oracle: it walks point pairs and
never touches the formula above.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator

import numpy as np

from .arith import ext_gcd
from .constructions import ExplicitLineSet, FamilyParams, LatticeLine, PointGrid

log = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 2500
PROFILE_CAP = 10**6
QUADRANTS = ("L1", "L2", "L3", "L4")


@dataclass(frozen=True, order=True)
class ReducedSlope:
    """The slope sign * s / r with gcd(r, s) = 1 (r is the run, s the rise)."""

    r: int
    s: int
    sign: int = -1

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValueError(f"run and rise must be positive, got r={self.r}, s={self.s}")
        if gcd(self.r, self.s) != 1:
            raise ValueError(f"slope {self.s}/{self.r} is not reduced")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be -1 or +1, got {self.sign}")

    @classmethod
    def parse(cls, text: str) -> "ReducedSlope":
        """Parse ``-s/r`` or ``s/r`` (a bare integer means r = 1)."""
        text = text.strip()
        sign = -1 if text.startswith("-") else 1
        frac = Fraction(text.lstrip("+-"))
        return cls(frac.denominator, frac.numerator, sign)

    @property
    def value(self) -> Fraction:
        return Fraction(self.sign * self.s, self.r)

    def mirrored(self) -> "ReducedSlope":
        return ReducedSlope(self.r, self.s, -self.sign)

    def __str__(self):
        return f"{'-' if self.sign < 0 else ''}{self.s}/{self.r}"


def run_counts(W: int, H: int, r: int, s: int, k: int) -> int:
    """Number of k-point progressions with step (r, -s) inside the W x H grid."""
    return max(0, W - (k - 1) * r) * max(0, H - (k - 1) * s)


def classify(slope: ReducedSlope, W: int, H: int) -> str:
    """Quadrant of a slope relative to the grid diagonal slope H/W."""
    lhs, rhs = slope.s * W, slope.r * H
    if lhs == rhs:
        raise ValueError(f"slope {slope} equals +-H/W for a {W}x{H} grid and has no quadrant")
    steep = lhs > rhs
    if slope.sign > 0:
        return "L2" if steep else "L1"
    return "L4" if steep else "L3"


@dataclass(frozen=True)
class SlopeFamilyProfile:
    slope: ReducedSlope
    T: int
    ap_T: int
    ap_T1: int
    qualifying_lines: int
    incidences: int
    e: tuple[int, ...] | None = None  # e[k-1] = lines with exactly k points


def line_size_profile(W: int, H: int, r: int, s: int) -> tuple[int, ...]:
    """Exact-size histogram from second differences of the run counts."""
    kmax = min((W - 1) // r, (H - 1) // s) + 1
    a = [run_counts(W, H, r, s, k) for k in range(1, kmax + 3)]
    return tuple(a[k] - 2 * a[k + 1] + a[k + 2] for k in range(kmax))


def slope_family_stats(W: int, H: int, slope: ReducedSlope, T: int,
                       with_profile: bool | None = None) -> SlopeFamilyProfile:
    if T < 1:
        raise ValueError(f"threshold must be >= 1, got {T}")
    ap_T = run_counts(W, H, slope.r, slope.s, T)
    ap_T1 = run_counts(W, H, slope.r, slope.s, T + 1)
    lines = ap_T - ap_T1
    incidences = ap_T + (T - 1) * lines
    if with_profile is None:
        with_profile = W * H <= PROFILE_CAP
    e = line_size_profile(W, H, slope.r, slope.s) if with_profile else None
    return SlopeFamilyProfile(slope, T, ap_T, ap_T1, lines, incidences, e)


def enumerate_slopes(params: FamilyParams) -> Iterator[ReducedSlope]:
    """Reduced slopes admitting at least T collinear grid points, in (r, s, sign) order."""
    W, H, T = params.W, params.H, params.T
    r_max = (W - 1) // (T - 1)
    s_max = (H - 1) // (T - 1)
    for r in range(1, r_max + 1):
        for s in range(1, s_max + 1):
            if gcd(r, s) != 1:
                continue
            if params.exclude_diagonal and s * W == r * H:
                continue
            yield ReducedSlope(r, s, -1)
            yield ReducedSlope(r, s, 1)


@dataclass(frozen=True)
class QuadrantCount:
    lines: int = 0
    incidences: int = 0

    def __add__(self, other: "QuadrantCount") -> "QuadrantCount":
        return QuadrantCount(self.lines + other.lines, self.incidences + other.incidences)


@dataclass(frozen=True)
class IncidenceReport:
    params: FamilyParams
    quadrants: dict
    diagonal: QuadrantCount
    method: str

    @property
    def lines(self) -> int:
        return sum(q.lines for q in self.quadrants.values()) + self.diagonal.lines

    @property
    def incidences(self) -> int:
        return sum(q.incidences for q in self.quadrants.values()) + self.diagonal.incidences

    @property
    def ratio(self) -> float:
        return incidence_ratio(self.incidences, self.params.n, self.lines)

    def counts(self) -> dict:
        out = {}
        for name in QUADRANTS:
            out[f"{name}.lines"] = self.quadrants[name].lines
            out[f"{name}.incidences"] = self.quadrants[name].incidences
        out["diagonal.lines"] = self.diagonal.lines
        out["diagonal.incidences"] = self.diagonal.incidences
        out["lines"] = self.lines
        out["incidences"] = self.incidences
        return out

    def diff(self, other: "IncidenceReport") -> list[str]:
        """Names of count fields that disagree (the method tag is not compared)."""
        a, b = self.counts(), other.counts()
        return [k for k in a if a[k] != b[k]]

    def to_dict(self) -> dict:
        p = self.params
        return {
            "W": p.W,
            "H": p.H,
            "T": p.T,
            "n": p.n,
            "alpha": p.alpha,
            "epsilon": p.epsilon,
            "exclude_diagonal": p.exclude_diagonal,
            "method": self.method,
            "lines": self.lines,
            "incidences": self.incidences,
            "ratio": self.ratio,
            "quadrants": {
                name: {"lines": q.lines, "incidences": q.incidences}
                for name, q in ((k, self.quadrants[k]) for k in QUADRANTS)
            },
            "diagonal": {"lines": self.diagonal.lines, "incidences": self.diagonal.incidences},
        }


def incidence_ratio(incidences: int, points: int, lines: int) -> float:
    """I / (|P|^(2/3) |L|^(2/3)); 0 for an empty line set."""
    if lines == 0:
        return 0.0
    return incidences / (points * lines) ** (2.0 / 3.0)


def _empty_quadrants() -> dict:
    return {name: QuadrantCount() for name in QUADRANTS}


def _sum_run(values: np.ndarray) -> int:
    return int(values.sum()) if values.dtype != object else sum(values.tolist())


def _count_run(params: FamilyParams, r: int) -> tuple[QuadrantCount, QuadrantCount, QuadrantCount]:
    """(shallow, steep, diagonal) totals for one sign over all rises s with run r."""
    W, H, T = params.W, params.H, params.T
    s_max = (H - 1) // (T - 1)
    s = np.arange(1, s_max + 1, dtype=np.int64)
    s = s[np.gcd(s, r) == 1]
    # per-run sums are bounded by s_max * T * W * H; beyond int64 switch to Python ints
    if s_max * T * W * H >= 2**62:
        s = s.astype(object)
    x_T = W - (T - 1) * r
    x_T1 = max(0, W - T * r)
    y_T = np.maximum(0, H - (T - 1) * s)
    y_T1 = np.maximum(0, H - T * s)
    ap_T = x_T * y_T
    ap_T1 = x_T1 * y_T1
    lines = ap_T - ap_T1
    inc = ap_T + (T - 1) * lines
    sW, rH = s * W, r * H
    out = []
    for mask in (sW < rH, sW > rH, sW == rH):
        out.append(QuadrantCount(_sum_run(lines[mask]), _sum_run(inc[mask])))
    return tuple(out)


def count_family(params: FamilyParams, threads: int = 1) -> IncidenceReport:
    """Closed-form report; runs are split across threads and reduced in r order."""
    W, T = params.W, params.T
    r_values = range(1, (W - 1) // (T - 1) + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda r: _count_run(params, r), r_values))
    else:
        parts = [_count_run(params, r) for r in r_values]
    shallow = steep = diag = QuadrantCount()
    for a, b, c in parts:
        shallow, steep, diag = shallow + a, steep + b, diag + c
    if params.exclude_diagonal:
        diag = QuadrantCount()
    elif diag.lines:
        log.warning("diagonal slopes +-%d/%d counted outside the quadrants", params.H, params.W)
    # each sign contributes the same totals
    quads = {"L1": shallow, "L2": steep, "L3": shallow, "L4": steep}
    return IncidenceReport(params, quads, diag + diag, "closed_form")


@lru_cache(maxsize=16)
def _line_census(W: int, H: int) -> dict:
    """(A, B) -> Counter(points on line -> number of lines), lines through >= 2 grid points.

    Each line is tallied once, from its first grid point in (x, y) order; its
    size is 1 plus the number of later points found on it.
    """
    pts = [(x, y) for x in range(1, W + 1) for y in range(1, H + 1)]
    census: dict = {}
    for i, (x1, y1) in enumerate(pts):
        before = set()
        after: Counter = Counter()
        for j, (x2, y2) in enumerate(pts):
            if j == i:
                continue
            dx, dy = x2 - x1, y2 - y1
            g = gcd(dx, dy)
            A, B = dy // g, -dx // g
            if B < 0 or (B == 0 and A < 0):
                A, B = -A, -B
            key = (A, B, A * x1 + B * y1)
            if j < i:
                before.add(key)
            else:
                after[key] += 1
        for key, later in after.items():
            if key in before:
                continue
            census.setdefault(key[:2], Counter())[later + 1] += 1
    return census


def brute_force_report(params: FamilyParams, cap: int = BRUTE_FORCE_CAP) -> IncidenceReport:
    """Quadratic oracle over point pairs. Refuses grids above ``cap`` points."""
    W, H, T = params.W, params.H, params.T
    if W * H > cap:
        raise ValueError(f"brute force refused: {W * H} points exceeds cap {cap}")
    quads = _empty_quadrants()
    diag = QuadrantCount()
    for (A, B), sizes in sorted(_line_census(W, H).items()):
        if A == 0 or B == 0:
            continue  # axis parallel
        slope = ReducedSlope(B, abs(A), -1 if A > 0 else 1)
        found = QuadrantCount(
            sum(c for m, c in sizes.items() if m >= T),
            sum(m * c for m, c in sizes.items() if m >= T),
        )
        if slope.s * W == slope.r * H:
            if not params.exclude_diagonal:
                diag = diag + found
            continue
        name = classify(slope, W, H)
        quads[name] = quads[name] + found
    return IncidenceReport(params, quads, diag, "brute_force")


def line_points_in_box(line: LatticeLine, W: int, H: int) -> int:
    """Lattice points of A x + B y = C in [1, W] x [1, H], in O(1)."""
    A, B, C = line.A, line.B, line.C
    if B == 0:  # x = C (A = 1 after reduction)
        return H if 1 <= C <= W else 0
    if A == 0:  # y = C
        return W if 1 <= C <= H else 0
    _, u, v = ext_gcd(A, B)  # A*u + B*v = 1
    x0, y0 = C * u, C * v
    # x = x0 + B t, y = y0 - A t
    lo = -((x0 - 1) // B)  # ceil((1 - x0) / B)
    hi = (W - x0) // B
    if A > 0:
        lo = max(lo, _ceil_div(y0 - H, A))
        hi = min(hi, (y0 - 1) // A)
    else:
        a = -A
        lo = max(lo, _ceil_div(1 - y0, a))
        hi = min(hi, (H - y0) // a)
    return max(0, hi - lo + 1)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def line_points_scan(line: LatticeLine, W: int, H: int) -> int:
    return sum(1 for x in range(1, W + 1) for y in range(1, H + 1) if line.contains(x, y))


@dataclass(frozen=True)
class ExplicitIncidences:
    lines: int
    incidences: int
    ratio: float


def explicit_set_incidences(lines: ExplicitLineSet, grid: PointGrid) -> ExplicitIncidences:
    total = sum(line_points_in_box(ln, grid.W, grid.H) for ln in lines.lines)
    return ExplicitIncidences(len(lines.lines), total, incidence_ratio(total, grid.size, len(lines.lines)))


@dataclass(frozen=True)
class StaircaseResult:
    passed: bool
    counterexample: str | None = None


def _brute_line_sizes(W: int, H: int, slope: ReducedSlope) -> Counter:
    # every grid point lies on exactly one line of the slope; key by C
    A, B = (slope.s, slope.r) if slope.sign < 0 else (-slope.s, slope.r)
    per_line = Counter(A * x + B * y for x in range(1, W + 1) for y in range(1, H + 1))
    return Counter(per_line.values())


def staircase_check(W: int, H: int, slope: ReducedSlope, T: int = 2) -> StaircaseResult:
    """Check the per-slope line-size structure against a direct scan.

    (i) e_k equals the second difference of the run counts for every k >= 1;
    (ii) e_k = 2rs wherever a (k+1)-run still fits on both axes;
    (iii) the longest line holds ceil(W/r) points when sW < rH, ceil(H/s) when sW > rH;
    plus the threshold-T line and incidence counts of ``slope_family_stats``.
    """
    if W * H > PROFILE_CAP:
        raise ValueError("grid too large for a full line-size profile")
    r, s = slope.r, slope.s
    brute = _brute_line_sizes(W, H, slope)
    kmax = max(brute)
    for k in range(1, kmax + 3):
        formula = (run_counts(W, H, r, s, k) - 2 * run_counts(W, H, r, s, k + 1)
                   + run_counts(W, H, r, s, k + 2))
        if brute.get(k, 0) != formula:
            return StaircaseResult(False, f"e_{k}: scan {brute.get(k, 0)} != second difference {formula}")
        if W - (k + 1) * r >= 0 and H - (k + 1) * s >= 0 and brute.get(k, 0) != 2 * r * s:
            return StaircaseResult(False, f"e_{k} = {brute.get(k, 0)} off the plateau 2rs = {2 * r * s}")
    if s * W < r * H:
        expected = -(-W // r)
    elif s * W > r * H:
        expected = -(-H // s)
    else:
        expected = min(-(-W // r), -(-H // s))
    if kmax != expected:
        return StaircaseResult(False, f"maximal line has {kmax} points, expected {expected}")
    prof = slope_family_stats(W, H, slope, T, with_profile=False)
    lines = sum(c for m, c in brute.items() if m >= T)
    inc = sum(m * c for m, c in brute.items() if m >= T)
    if (lines, inc) != (prof.qualifying_lines, prof.incidences):
        return StaircaseResult(False, f"T={T}: scan ({lines}, {inc}) != closed form "
                                      f"({prof.qualifying_lines}, {prof.incidences})")
    return StaircaseResult(True)


def _anchor_counts(W: int, H: int, r: int, s: int, T: int) -> dict:
    """Exact anchor-set tallies for slope -s/r: lines through the bottom row and
    through the right column above its bottom s points."""
    bottom_lines = bottom_inc = right_lines = 0
    for x in range(1, W + 1):
        m = min((x - 1) // r, (H - 1) // s) + 1
        if m >= T:
            bottom_lines += 1
            bottom_inc += m
    for y in range(s + 1, H + 1):
        m = min((W - 1) // r, (H - y) // s) + 1
        if m >= T:
            right_lines += 1
    return {"bottom_lines": bottom_lines, "bottom_incidences": bottom_inc, "right_lines": right_lines}


def anchor_formula_report(params: FamilyParams) -> list[dict]:
    """Exact per-slope counts next to the shallow-regime approximations, negative slopes only.

    Formulas are evaluated with n^alpha = W, n^(1-alpha) = H, eps = T/W. This is
    a report: the approximations carry unquantified slack and are not asserted.
    Deviation columns are exact - formula, and that over |formula|.
    """
    W, H, T = params.W, params.H, params.T
    eps = Fraction(T, W)
    n = W * H
    rows = []
    for slope in enumerate_slopes(params):
        if slope.sign > 0:
            continue
        r, s = slope.r, slope.s
        quadrant = "diagonal" if s * W == r * H else classify(slope, W, H)
        exact = _anchor_counts(W, H, r, s, T)
        exact["family_incidences"] = slope_family_stats(W, H, slope, T, with_profile=False).incidences
        formulas = {
            "bottom_lines": W * (1 - eps * r) + r,
            "bottom_incidences": Fraction(W * W, 2 * r) - r * eps * eps * W * W / 2,
            "right_lines": H - s * eps * W,
            "family_incidences": n - r * s * eps * eps * W * W,
        }
        row = {"slope": str(slope), "quadrant": quadrant}
        # formulas are exact rationals here; floats only at the output boundary
        for key, approx in formulas.items():
            dev = exact[key] - approx
            row[key] = exact[key]
            row[f"{key}_formula"] = float(approx)
            row[f"{key}_abs_dev"] = float(dev)
            row[f"{key}_rel_dev"] = float(dev / abs(approx)) if approx else math.nan
        rows.append(row)
    return rows
