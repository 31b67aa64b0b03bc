"""Working-precision control and exact integer floors of real expressions.

All floating computations in the library run at a configurable binary
precision (default 256 bits, matching the headroom needed by quantities like
floor(e**25.25) evaluated exactly).  The construction of the explicit vector
additionally needs *exact* integer floors of expressions such as t**theta,
e**(p/q) and (qbar/q)*(2*t**(theta/2)/gap - 1).  Those are resolved here by
one of two routes:

* a pure integer route when the expression is provably rational
  (floor(t**(p/q)) == floor((t**p)**(1/q)), an integer k-th root), or
* interval arithmetic at escalating precision until both interval endpoints
  share the same floor.  For irrational values (e**x with rational x != 0,
  t**(p/q) with t**p not a perfect q-th power) the escalation terminates.

Every helper that can produce astronomically large integers takes a digit
budget and raises ExponentOverflow beyond it, so the computational frontier
of the paper-mode construction is explicit rather than an out-of-memory
crash.
"""

from __future__ import annotations

import contextlib
import sys
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp, iv

from .errors import ExponentOverflow

# exact integers are serialized as decimal strings up to the digit budget;
# lift CPython's int<->str DoS guard accordingly
if sys.get_int_max_str_digits() < 2_100_000:
    sys.set_int_max_str_digits(2_100_000)


def decimal_digits(n: int) -> int:
    """Number of decimal digits of |n|."""
    if n == 0:
        return 1
    return len(str(abs(n)))

DEFAULT_PRECISION = 256
MIN_PRECISION = 64

#: Default cap on the decimal-digit count of any exactly computed integer.
DEFAULT_DIGIT_BUDGET = 10**6

_LN2 = 0.6931471805599453
_LN10 = 2.302585092994046

mp.prec = DEFAULT_PRECISION


def set_working_precision(bits: int) -> None:
    if bits < MIN_PRECISION:
        raise ValueError(f"working precision must be >= {MIN_PRECISION} bits, got {bits}")
    mp.prec = bits


def working_precision_bits() -> int:
    return mp.prec


@contextlib.contextmanager
def working_precision(bits: int):
    """Temporarily run mpmath at `bits` of binary precision."""
    if bits < MIN_PRECISION:
        raise ValueError(f"working precision must be >= {MIN_PRECISION} bits, got {bits}")
    old = mp.prec
    mp.prec = bits
    try:
        yield
    finally:
        mp.prec = old


def as_fraction(value) -> Fraction:
    """Exact rational from int/Fraction/str/float/mpf.

    Floats go through their shortest decimal repr, so as_fraction(0.4)
    is 2/5 rather than the 53-bit binary neighbor.  mpf values convert
    exactly (they are binary rationals).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, mpmath.mpf):
        return Fraction(*mpmath.libmp.to_rational(value._mpf_))
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact rational")


def to_mpf(value) -> mpmath.mpf:
    """Convert to mpf at the current working precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


try:
    import gmpy2 as _gmpy2
except ImportError:  # pure-int fallbacks below keep everything working
    _gmpy2 = None


def int_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1 (exact integer arithmetic)."""
    if n < 0 or k < 1:
        raise ValueError("int_nth_root requires n >= 0, k >= 1")
    if n in (0, 1) or k == 1:
        return n
    if _gmpy2 is not None:
        return int(_gmpy2.iroot(_gmpy2.mpz(n), k)[0])
    # initial guess from the bit length, then monotone Newton descent
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def big_gcd(a: int, b: int) -> int:
    """gcd tuned for very large operands."""
    if _gmpy2 is not None:
        return int(_gmpy2.gcd(_gmpy2.mpz(a), _gmpy2.mpz(b)))
    import math
    return math.gcd(a, b)


def floor_int_pow(t: int, exponent: Fraction) -> int:
    """Exact floor(t ** exponent) for integer t >= 1 and exponent >= 0.

    Pure integer arithmetic: floor(t**(p/q)) is the integer q-th root of
    t**p, so results are independent of any floating precision.
    """
    if t < 1:
        raise ValueError("base must be a positive integer")
    exponent = Fraction(exponent)
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    p, q = exponent.numerator, exponent.denominator
    if p == 0:
        return 1
    return int_nth_root(t ** p, q)


def _budget_bits(digit_budget: int) -> int:
    return int(digit_budget * _LN10 / _LN2) + 8


def floor_exp(x: Fraction, digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Exact floor(e ** x) for rational x >= 0, within the digit budget.

    e**x is irrational for rational x != 0, so the interval escalation
    always resolves the floor.
    """
    x = Fraction(x)
    if x < 0:
        raise ValueError("exponent must be nonnegative")
    if x == 0:
        return 1
    # integer-only budget guard: x may be astronomically large
    if x.numerator > int(digit_budget * _LN10 * x.denominator) + 1:
        raise ExponentOverflow(
            f"floor(e**x) would exceed the digit budget {digit_budget}; "
            f"exponent has ~{x.numerator.bit_length() - x.denominator.bit_length()} bits",
            exponent=x,
        )
    num, den = x.numerator, x.denominator

    def expr():
        return iv.exp(iv.mpf(num) / den)

    return resolve_floor(expr, start_bits=max(mp.prec, int(float(x) / _LN2) + 64))


def floor_rational_pow(base: int, exponent: Fraction,
                       digit_budget: int = DEFAULT_DIGIT_BUDGET) -> int:
    """Exact floor(base ** exponent) for integer base >= 1, rational exponent >= 0."""
    exponent = Fraction(exponent)
    if base < 1:
        raise ValueError("base must be a positive integer")
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    if base == 1 or exponent == 0:
        return 1
    # integer-only budget guard before any large power is formed
    if exponent.numerator * base.bit_length() > 4 * digit_budget * exponent.denominator:
        raise ExponentOverflow(
            f"floor(base**x) far exceeds the digit budget {digit_budget}",
            exponent=exponent,
        )
    result = floor_int_pow(base, exponent)
    result_digits = (result.bit_length() * 30103) // 100000 + 1
    if result_digits > digit_budget:
        raise ExponentOverflow(
            f"floor(base**x) has ~{result_digits} digits (budget {digit_budget})",
            exponent=exponent,
        )
    return result


def resolve_floor(interval_expr: Callable[[], "iv.mpf"],
                  exact: Callable[[], int] | None = None,
                  start_bits: int | None = None,
                  max_bits: int = 1 << 23) -> int:
    """Floor of a real expression via interval arithmetic with escalation.

    `interval_expr` is re-evaluated under increasing interval precision until
    both endpoints agree on the floor.  If the cap is reached (which for our
    expressions can only happen when the value is exactly an integer),
    `exact` is consulted; without one, a RuntimeError is raised.
    """
    bits = start_bits if start_bits is not None else mp.prec
    bits = max(bits, MIN_PRECISION)
    old = iv.prec
    try:
        while bits <= max_bits:
            iv.prec = bits
            value = interval_expr()
            lo = mpmath.floor(value.a)
            hi = mpmath.floor(value.b)
            if lo == hi:
                return int(lo)
            bits *= 2
    finally:
        iv.prec = old
    if exact is not None:
        return exact()
    raise RuntimeError(
        "could not resolve an exact floor by interval escalation; "
        "the value may be exactly an integer"
    )
