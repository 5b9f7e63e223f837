"""Asymptotic predictions for the grid family and convergence sweeps toward the constant."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .arith import round_power, round_root
from .constructions import FamilyParams
from .engine import count_family

log = logging.getLogger(__name__)

C_MAIN = 3 * (3 / (4 * math.pi**2)) ** (1 / 3)
C_MAIN_ALT = 3 ** (4 / 3) / (math.pi ** (2 / 3) * 2 ** (2 / 3))
C_PACH_TOTH = (3 / (4 * math.pi**2)) ** (1 / 3)
C_UPPER = 2.44

DEFAULT_EPS_EXPONENT = Fraction(1, 5)
_ALPHA_SLACK = 1e-12


@dataclass(frozen=True)
class AsymptoticPrediction:
    n: float
    alpha: float
    epsilon: float
    predicted_lines: float
    predicted_incidences: float
    c_main: float = C_MAIN
    c_pach_toth: float = C_PACH_TOTH
    c_upper: float = C_UPPER


def predict(n: float, alpha: float, epsilon: float) -> AsymptoticPrediction:
    """|L| ~ 6 n^(2-3a) / (pi^2 eps^3) and I ~ 9 n^(2-2a) / (pi^2 eps^2)."""
    if n <= 1:
        raise ValueError(f"n must exceed 1, got {n}")
    if not (1 / 3 - _ALPHA_SLACK <= alpha <= 1 / 2 + _ALPHA_SLACK):
        raise ValueError(f"alpha must lie in [1/3, 1/2], got {alpha}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    pi2 = math.pi**2
    lines = 6 * n ** (2 - 3 * alpha) / (pi2 * epsilon**3)
    inc = 9 * n ** (2 - 2 * alpha) / (pi2 * epsilon**2)
    return AsymptoticPrediction(n, alpha, epsilon, lines, inc)


def relative_error(exact: float, predicted: float) -> float:
    if predicted == 0:
        raise ValueError("comparison against a zero prediction is undefined")
    return abs(exact - predicted) / abs(predicted)


@dataclass(frozen=True)
class SweepRow:
    W: int
    H: int
    T: int
    n: int
    alpha: float
    epsilon: float
    lines: int
    incidences: int
    ratio: float
    predicted_lines: float
    predicted_incidences: float
    rel_err_lines: float
    rel_err_incidences: float
    rel_err_ratio: float
    wall_time: float = 0.0

    # wall_time is excluded: data output must be byte-identical across runs
    COLUMNS = ("W", "H", "T", "n", "alpha", "epsilon", "lines", "incidences", "ratio",
               "predicted_lines", "predicted_incidences",
               "rel_err_lines", "rel_err_incidences", "rel_err_ratio")

    def values(self) -> list:
        return [getattr(self, c) for c in self.COLUMNS]


@dataclass(frozen=True)
class Comparison:
    rel_err_lines: float
    rel_err_incidences: float
    rel_err_ratio: float


def compare(row: SweepRow) -> Comparison:
    return Comparison(
        relative_error(row.lines, row.predicted_lines),
        relative_error(row.incidences, row.predicted_incidences),
        relative_error(row.ratio, C_MAIN),
    )


def grid_for(n: int, alpha: Fraction, eps_exponent: Fraction = DEFAULT_EPS_EXPONENT) -> FamilyParams:
    """W = round(n^alpha), H = round(n^(1-alpha)), T = max(2, round(n^(-e) * W)).

    All three roundings are exact integer computations (half rounds up).
    """
    alpha = Fraction(alpha)
    eps_exponent = Fraction(eps_exponent)
    if eps_exponent <= 0:
        raise ValueError("the epsilon exponent must be positive so that eps < 1")
    W = round_power(n, alpha)
    H = round_power(n, 1 - alpha)
    # (eps * W)^q = W^q / n^p for eps = n^(-p/q)
    p, q = eps_exponent.numerator, eps_exponent.denominator
    T = max(2, round_root(Fraction(W**q, n**p), q))
    return FamilyParams(W, H, T)


def row_for(params: FamilyParams, threads: int = 1) -> SweepRow:
    start = time.perf_counter()
    report = count_family(params, threads=threads)
    elapsed = time.perf_counter() - start
    n = params.n
    pred = predict(n, params.alpha, params.epsilon)
    lines, inc, ratio = report.lines, report.incidences, report.ratio
    return SweepRow(
        params.W, params.H, params.T, n, params.alpha, params.epsilon,
        lines, inc, ratio, pred.predicted_lines, pred.predicted_incidences,
        relative_error(lines, pred.predicted_lines),
        relative_error(inc, pred.predicted_incidences),
        relative_error(ratio, C_MAIN),
        elapsed,
    )


def sweep(alpha: Fraction, n_list: Iterable[int],
          eps_exponent: Fraction = DEFAULT_EPS_EXPONENT, threads: int = 1) -> list[SweepRow]:
    """One row per n, ascending; predictions use the effective n = W*H."""
    rows = []
    for n in sorted(set(n_list)):
        params = grid_for(n, alpha, eps_exponent)
        try:
            row = row_for(params, threads)
        except Exception as exc:
            raise RuntimeError(f"sweep failed at n={n}: {exc}") from exc
        log.info("n=%d W=%d H=%d T=%d ratio=%.6f in %.3fs",
                 n, row.W, row.H, row.T, row.ratio, row.wall_time)
        rows.append(row)
    return rows


def geometric_ladder(start: int, factor: float, count: int) -> list[int]:
    return [int(round(start * factor**i)) for i in range(count)]
