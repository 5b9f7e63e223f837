"""Point grids and the explicit line sets of the Erdos, Elekes and mixed-family constructions.

Lines are canonical integer triples (A, B, C) meaning A*x + B*y = C. Range
endpoints that involve real powers of n are resolved with exact integer
comparisons: upper endpoints are floored, lower endpoints ceiled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterator

from .arith import iroot

POINT_CAP = 10**6


@dataclass(frozen=True, order=True)
class LatticeLine:
    A: int
    B: int
    C: int

    def __post_init__(self):
        if self.A == 0 and self.B == 0:
            raise ValueError("degenerate line: A = B = 0")
        if gcd(self.A, self.B) != 1:
            raise ValueError(f"line {self} is not reduced")
        if not (self.B > 0 or (self.B == 0 and self.A > 0)):
            raise ValueError(f"line {self} is not in canonical sign")

    @classmethod
    def canonical(cls, A: int, B: int, C: int) -> "LatticeLine":
        """Reduce by gcd(A, B) and fix the sign. Raises if no lattice point can lie on it."""
        if A == 0 and B == 0:
            raise ValueError("degenerate line: A = B = 0")
        g = gcd(A, B)
        if C % g:
            raise ValueError(f"{A}x + {B}y = {C} contains no lattice point")
        A, B, C = A // g, B // g, C // g
        if B < 0 or (B == 0 and A < 0):
            A, B, C = -A, -B, -C
        return cls(A, B, C)

    @classmethod
    def through(cls, p: tuple[int, int], q: tuple[int, int]) -> "LatticeLine":
        (x1, y1), (x2, y2) = p, q
        if p == q:
            raise ValueError("need two distinct points")
        dx, dy = x2 - x1, y2 - y1
        return cls.canonical(dy, -dx, dy * x1 - dx * y1)

    def contains(self, x: int, y: int) -> bool:
        return self.A * x + self.B * y == self.C

    @property
    def slope(self) -> Fraction | None:
        return None if self.B == 0 else Fraction(-self.A, self.B)


@dataclass(frozen=True)
class PointGrid:
    """The implicit lattice section {1..W} x {1..H}."""

    W: int
    H: int

    def __post_init__(self):
        if self.W < 1 or self.H < 1:
            raise ValueError(f"grid needs W, H >= 1, got {self.W}x{self.H}")

    @property
    def size(self) -> int:
        return self.W * self.H

    def __contains__(self, pt: tuple[int, int]) -> bool:
        x, y = pt
        return 1 <= x <= self.W and 1 <= y <= self.H

    def points(self, cap: int = POINT_CAP) -> Iterator[tuple[int, int]]:
        if self.size > cap:
            raise ValueError(f"refusing to materialize {self.size} points (cap {cap})")
        for x in range(1, self.W + 1):
            for y in range(1, self.H + 1):
                yield x, y


@dataclass(frozen=True)
class ExplicitLineSet:
    kind: str
    params: dict
    lines: tuple[LatticeLine, ...]
    warning: str | None = None
    grid: PointGrid | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.lines)


def _dedupe(lines) -> tuple[LatticeLine, ...]:
    return tuple(sorted(set(lines)))


def erdos_ranges(n: int) -> tuple[int, int, int]:
    """(max denominator, d_lo, d_hi) with d in [ceil(sqrt(n)/2), floor(3 sqrt(n)/4)]."""
    bmax = iroot(n, 6)
    d_lo = _first_at_least(n, 2, 2)
    d_hi = math.isqrt(9 * n) // 4
    return bmax, d_lo, d_hi


def _first_at_least(X: int, q: int, scale: int) -> int:
    """Smallest integer d >= 0 with (scale*d)^q >= X, i.e. ceil(X^(1/q) / scale)."""
    z = iroot(X, q)
    if z**q == X:
        return -(-z // scale)
    return z // scale + 1


def erdos_lines(n: int) -> ExplicitLineSet:
    """Lines y = (a/b)(x - c) + d, 1 <= a < b <= n^(1/6) coprime, 1 <= c <= b."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    bmax, d_lo, d_hi = erdos_ranges(n)
    side = math.isqrt(n)
    params = {"n": n, "b_max": bmax, "d_lo": d_lo, "d_hi": d_hi}
    if bmax < 2:
        return ExplicitLineSet("erdos", params, (), "slope range is empty", PointGrid(side, side))
    lines = []
    for b in range(2, bmax + 1):
        for a in range(1, b):
            if gcd(a, b) != 1:
                continue
            for c in range(1, b + 1):
                for d in range(d_lo, d_hi + 1):
                    # b*y = a*(x - c) + b*d
                    lines.append(LatticeLine(-a, b, b * d - a * c))
    return ExplicitLineSet("erdos", params, _dedupe(lines), None, PointGrid(side, side))


def erdos_slopes(n: int) -> list[Fraction]:
    bmax = iroot(n, 6)
    return sorted({Fraction(a, b) for b in range(2, bmax + 1) for a in range(1, b)})


def elekes_lines(n: int) -> ExplicitLineSet:
    """Lines y = a*x + b with 1 <= a <= n^(1/3), 1 <= b <= n^(2/3)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    amax = iroot(n, 3)
    bmax = iroot(n * n, 3)
    warning = None if amax**3 == n else f"n={n} is not a perfect cube; ranges floored"
    lines = [LatticeLine(-a, 1, b) for a in range(1, amax + 1) for b in range(1, bmax + 1)]
    params = {"n": n, "a_max": amax, "b_max": bmax}
    return ExplicitLineSet("elekes", params, _dedupe(lines), warning, PointGrid(amax, bmax))


def family_ranges(n: int, alpha: Fraction) -> dict:
    """Integer ranges of the mixed family, with alpha = p/q.

    a: 0 <= a < n^(1-2 alpha)/4; c: c <= n^(alpha-1/3); d: n^(1-alpha)/2 <= d < 3 n^(1-alpha)/4.
    """
    p, q = alpha.numerator, alpha.denominator
    # number of a >= 0 with (4a)^q < n^(q-2p)
    a_count = _first_at_least(n ** (q - 2 * p), q, 4)
    # c^(3q) <= n^(3p - q)
    c_max = iroot(n ** (3 * p - q), 3 * q)
    x = n ** (q - p)  # (n^(1-alpha))^q
    d_lo = _first_at_least(x, q, 2)
    # d < 3 n^(1-alpha) / 4  <=>  (4d)^q < 3^q x
    d_end = _first_at_least(3**q * x, q, 4)
    return {"a_count": a_count, "c_max": c_max, "d_lo": d_lo, "d_end": d_end}


def family_lines_simplified(n: int, alpha: Fraction) -> ExplicitLineSet:
    """Lines y = (a + b/c)(x - i) + d over the simplified mixed-family ranges."""
    alpha = Fraction(alpha)
    if not Fraction(1, 3) <= alpha <= Fraction(1, 2):
        raise ValueError(f"alpha must lie in [1/3, 1/2], got {alpha}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    rng = family_ranges(n, alpha)
    params = {"n": n, "alpha": str(alpha), **rng}
    W = iroot(n ** alpha.numerator, alpha.denominator)
    grid = PointGrid(max(W, 1), max(n // max(W, 1), 1))
    empty = []
    if rng["a_count"] == 0:
        empty.append("a")
    if rng["c_max"] < 2:
        empty.append("b/c")
    if rng["d_end"] <= rng["d_lo"]:
        empty.append("d")
    if empty:
        return ExplicitLineSet("family_simplified", params, (),
                               f"empty range(s): {', '.join(empty)}", grid)
    lines = []
    for a in range(rng["a_count"]):
        for c in range(2, rng["c_max"] + 1):
            for b in range(1, c):
                if gcd(b, c) != 1:
                    continue
                num = a * c + b  # slope num/c
                for i in range(c):
                    for d in range(rng["d_lo"], rng["d_end"]):
                        # c*y = num*(x - i) + c*d
                        lines.append(LatticeLine(-num, c, c * d - num * i))
    return ExplicitLineSet("family_simplified", params, _dedupe(lines), None, grid)


@dataclass(frozen=True)
class FamilyParams:
    """Grid W x H, incidence threshold T, and whether slopes +-H/W are excluded."""

    W: int
    H: int
    T: int
    exclude_diagonal: bool = True

    def __post_init__(self):
        if self.W < 1 or self.H < 1:
            raise ValueError(f"need W, H >= 1, got {self.W}x{self.H}")
        if self.T < 2:
            raise ValueError(f"threshold must be >= 2, got {self.T}")

    @property
    def n(self) -> int:
        return self.W * self.H

    @property
    def alpha(self) -> float:
        if self.n == 1:
            return float("nan")
        return math.log(self.W) / math.log(self.n)

    @property
    def epsilon(self) -> float:
        return self.T / self.W

    @property
    def grid(self) -> PointGrid:
        return PointGrid(self.W, self.H)


def family_params(W: int, H: int, T: int, exclude_diagonal: bool = True) -> FamilyParams:
    """Validated parameters for the main family: 1 <= W <= H and 2 <= T <= W."""
    if not 1 <= W <= H:
        raise ValueError(f"need 1 <= W <= H, got W={W}, H={H}")
    if not 2 <= T <= W:
        raise ValueError(f"need 2 <= T <= W, got T={T}, W={W}")
    return FamilyParams(W, H, T, exclude_diagonal)
