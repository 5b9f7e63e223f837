"""Small exact integer helpers shared by the other modules."""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd

# 50 significant digits; main terms are evaluated in a 60-digit decimal context.
PI = Decimal("3.1415926535897932384626433832795028841971693993751")
DECIMAL_PREC = 60


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b), g >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer."""
    if x < 0:
        raise ValueError("iroot of a negative number")
    if x < 2 or k == 1:
        return x
    # Newton iteration from an overestimate
    y = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        z = ((k - 1) * y + x // y ** (k - 1)) // k
        if z >= y:
            break
        y = z
    while y ** k > x:
        y -= 1
    while (y + 1) ** k <= x:
        y += 1
    return y


def floor_root(value: Fraction, k: int) -> int:
    """floor(value ** (1/k)) for a non-negative rational value."""
    return iroot(value.numerator // value.denominator, k)


def round_root(value: Fraction, k: int) -> int:
    """round-half-up(value ** (1/k)), computed without floating point."""
    y = floor_root(value * 2**k, k)  # floor(2 * value^(1/k))
    return (y + 1) // 2


def round_power(n: int, exponent: Fraction) -> int:
    """round-half-up(n ** exponent) for n >= 1 and a rational exponent."""
    p, q = exponent.numerator, exponent.denominator
    base = Fraction(n) ** p
    return round_root(base, q)


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization; fine for the small n used in checks."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def totient(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def distinct_primes(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def to_decimal(x: Fraction | int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = DECIMAL_PREC
        if isinstance(x, int):
            return Decimal(x)
        return Decimal(x.numerator) / Decimal(x.denominator)


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
