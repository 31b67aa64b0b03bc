"""Small-divisor arithmetic over lattice balls.

Provides the nearest-integer distance ||x|| = min_k |x - k|, continued
fractions with convergents and remainder products, the 1-D Bryuno-type
partial sums, and the brute-force minimal divisor

    Omega_alpha(N) = min over 0 < |l|_sup <= N of ||alpha . l||

with minimizer tracking.  Scans accept either exact rational vectors
(fractions.Fraction entries, evaluated in pure integer arithmetic) or real
vectors evaluated as mpf at the working precision.

Since ||x|| is even, minimizers always come in +/- pairs; scans therefore
enumerate only the representatives whose first nonzero entry is positive and
report the lexicographically smallest minimizing representative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mp

from .errors import RationalTruncation, ResonanceDetected
from .precision import to_mpf

LatticeVector = tuple  # d-tuple of ints


def sup_norm(l: Sequence[int]) -> int:
    return max(abs(c) for c in l)


def l1_norm(l: Sequence[int]) -> int:
    return sum(abs(c) for c in l)


def l2_norm(l: Sequence[int]) -> float:
    return math.sqrt(sum(c * c for c in l))


def nearest_int_distance(x):
    """||x||: distance from x to the nearest integer, in [0, 1/2].

    Exact for Fraction/int input; mpf at working precision otherwise.
    """
    if isinstance(x, (Fraction, int)):
        frac = x - math.floor(x)
        return min(frac, 1 - frac)
    x = to_mpf(x)
    frac = x - mpmath.floor(x)
    return min(frac, 1 - frac)


@dataclass(frozen=True)
class ContinuedFraction:
    """Continued-fraction data of a real number x = a0 + 1/(a1 + 1/(...)).

    quotients[k-1] is a_k for k = 1..depth; numerators/denominators hold the
    convergents p_k/q_k on the same indexing (q_0 = 1, q_{-1} = 0 are implied
    by the recursion q_{k+1} = a_{k+1} q_k + q_{k-1}).  remainders[k] is the
    k-th iterated fractional part alpha_k (alpha_0 = {x}), and products[k] is
    beta_k = alpha_k * ... * alpha_0, with beta_{-1} = 1 implied.
    """

    integer_part: int
    quotients: tuple
    numerators: tuple
    denominators: tuple
    remainders: tuple
    products: tuple
    depth: int
    precision_bits: int

    def convergent(self, k: int) -> Fraction:
        """p_k/q_k as an exact rational, k = 1..depth."""
        return Fraction(self.numerators[k - 1], self.denominators[k - 1])


def continued_fraction(x, depth: int) -> ContinuedFraction:
    """Expand x to `depth` partial quotients.

    Raises RationalTruncation if a remainder vanishes (x rational at working
    precision) or a quotient exhausts the available precision before depth.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    exact = isinstance(x, (Fraction, int))
    if not exact:
        x = to_mpf(x)
    a0 = math.floor(x) if exact else int(mpmath.floor(x))
    rem = x - a0
    quotient_cap = 1 << max(8, mp.prec // 2)

    quotients, numerators, denominators = [], [], []
    remainders = [rem]
    products = [rem]
    p_prev, p_cur = 1, a0
    q_prev, q_cur = 0, 1
    for k in range(1, depth + 1):
        if rem == 0:
            raise RationalTruncation(
                f"remainder vanished at index {k - 1} (input rational at working precision)"
            )
        inv = 1 / rem
        a = math.floor(inv) if exact else int(mpmath.floor(inv))
        if not exact and a > quotient_cap:
            raise RationalTruncation(
                f"quotient a_{k} = {a} exhausts the working precision ({mp.prec} bits)"
            )
        rem = inv - a
        quotients.append(a)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        numerators.append(p_cur)
        denominators.append(q_cur)
        remainders.append(rem)
        products.append(products[-1] * rem)
    return ContinuedFraction(
        integer_part=a0,
        quotients=tuple(quotients),
        numerators=tuple(numerators),
        denominators=tuple(denominators),
        remainders=tuple(remainders),
        products=tuple(products),
        depth=depth,
        precision_bits=mp.prec,
    )


def bryuno_1d(x, depth: int):
    """1-D Bryuno-type partial sums of x up to `depth`.

    Returns (b_partial, q_partial) where

        b_partial = sum_{n=0..depth} beta_{n-1} * log(1/alpha_n),
        q_partial = sum_{k=0..depth-1} (1/q_k) * log(q_{k+1}),  q_0 = 1.

    Both are nonnegative and nondecreasing in depth; they are finite together
    in the limit.  Propagates RationalTruncation from the expansion.
    """
    cf = continued_fraction(x, depth + 1)
    b_partial = mp.mpf(0)
    for n in range(depth + 1):
        alpha_n = cf.remainders[n]
        beta_prev = 1 if n == 0 else cf.products[n - 1]
        b_partial += to_mpf(beta_prev) * mpmath.log(1 / to_mpf(alpha_n))
    q_full = (1,) + cf.denominators
    q_partial = mp.mpf(0)
    for k in range(depth):
        q_partial += mpmath.log(q_full[k + 1]) / q_full[k]
    return b_partial, q_partial


@dataclass(frozen=True)
class SmallDivisorRecord:
    """Minimal small divisor over the sup-norm ball of radius N.

    value = ||alpha . argmin|| is minimal among 0 < |l| <= N; argmin is the
    lexicographically smallest minimizer with positive leading entry.
    """

    N: int
    value: object  # Fraction (exact scan) or mpf
    argmin: tuple
    precision_bits: int

    def value_mpf(self):
        return to_mpf(self.value)


def _canonical_vectors(d: int, N: int, lower: int = 1):
    """Nonzero l with lower <= |l|_sup <= N, first nonzero entry > 0, lex order."""
    for l in itertools.product(range(-N, N + 1), repeat=d):
        m = max(abs(c) for c in l)
        if m < lower or m > N:
            continue
        leading = next((c for c in l if c != 0), 0)
        if leading > 0:
            yield l


def _resonance_eps():
    return mpmath.ldexp(1, -(mp.prec - 16))


def omega_min(alpha: Sequence, N: int, lower: int = 1,
              seed: SmallDivisorRecord | None = None) -> SmallDivisorRecord:
    """Exhaustive minimal divisor over 0 < |l|_sup <= N (or an annulus).

    `lower` restricts the scan to lower <= |l|_sup <= N, and `seed` supplies
    a record already covering |l| < lower, which enables incremental dyadic
    scans.  Exact rational alpha is scanned in integer arithmetic; otherwise
    mpf at working precision, raising ResonanceDetected when a divisor
    underflows the precision.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    d = len(alpha)
    exact = all(isinstance(a, (Fraction, int)) for a in alpha)
    best_val = None
    best_arg = None
    if exact:
        fracs = [Fraction(a) for a in alpha]
        den = math.lcm(*(f.denominator for f in fracs))
        nums = [f.numerator * (den // f.denominator) for f in fracs]
        for l in _canonical_vectors(d, N, lower):
            r = sum(c * n for c, n in zip(l, nums)) % den
            dist = min(r, den - r)
            if dist == 0:
                raise ResonanceDetected(
                    f"alpha . {l} is an exact integer", lattice_vector=l)
            if best_val is None or dist < best_val:
                best_val, best_arg = dist, l
        value = Fraction(best_val, den)
    else:
        alphas = [to_mpf(a) for a in alpha]
        eps = _resonance_eps()
        for l in _canonical_vectors(d, N, lower):
            s = mpmath.fsum(c * a for c, a in zip(l, alphas))
            dist = nearest_int_distance(s)
            if dist < eps:
                raise ResonanceDetected(
                    f"||alpha . {l}|| = {mpmath.nstr(dist, 8)} underflows "
                    f"{mp.prec}-bit working precision", lattice_vector=l)
            if best_val is None or dist < best_val:
                best_val, best_arg = dist, l
        value = best_val
    if seed is not None:
        both_exact = isinstance(seed.value, Fraction) and isinstance(value, Fraction)
        sv, nv = (seed.value, value) if both_exact else (to_mpf(seed.value), to_mpf(value))
        if sv < nv:
            value, best_arg = seed.value, seed.argmin
        elif sv == nv:
            best_arg = min(best_arg, seed.argmin)
    return SmallDivisorRecord(N=N, value=value, argmin=best_arg,
                              precision_bits=mp.prec)


def omega_min_1d(alpha, N: int) -> SmallDivisorRecord:
    """Convergent-based fast path for d = 1.

    By best-approximation theory the minimum of ||l*alpha|| over 0 < l <= N
    is attained at the largest convergent denominator q_k <= N.  Must agree
    with the exhaustive scan; tested, not assumed.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    x = alpha[0] if isinstance(alpha, (list, tuple)) else alpha
    denominators = ()
    depth = 1
    while True:
        try:
            cf = continued_fraction(x, depth)
        except RationalTruncation:
            break
        denominators = cf.denominators
        if denominators[-1] > N:
            break
        depth += 1
    best_q = 1  # q_0 = 1 is always a convergent denominator
    for q in denominators:
        if q <= N:
            best_q = q
    if isinstance(x, (Fraction, int)):
        dist = nearest_int_distance(Fraction(x) * best_q)
        if dist == 0:
            raise ResonanceDetected(f"{best_q} * alpha is an exact integer",
                                    lattice_vector=(best_q,))
    else:
        dist = nearest_int_distance(to_mpf(x) * best_q)
        if dist < _resonance_eps():
            raise ResonanceDetected(
                f"||{best_q} * alpha|| underflows working precision",
                lattice_vector=(best_q,))
    return SmallDivisorRecord(N=N, value=dist, argmin=(best_q,),
                              precision_bits=mp.prec)


def synthetic_liouville(depth: int = 4) -> Fraction:
    """Exact stand-in for a number with explosively growing quotients.

    Builds the continued fraction [0; a_1, a_2, ...] with a_{k+1} = 2**q_k
    and returns the depth-th convergent as an exact rational.  The next
    convergent denominator is ~2**q_depth, so for every scan radius N
    reachable in practice, ||l * alpha|| of the true limit and of this
    rational agree to within N / (q_depth * 2**q_depth): the returned value
    is a faithful scan surrogate far beyond any computable budget.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    p_prev, p_cur = 1, 0
    q_prev, q_cur = 0, 1
    for _ in range(depth):
        a = 2 ** q_cur
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return Fraction(p_cur, q_cur)


def bryuno_partial_sum(alpha: Sequence, K: int, records: list | None = None):
    """Partial Bryuno sum sum_{k=1..K} 2^-k log(1/Omega_alpha(2^k)).

    Dyadic scales share work: the ball of radius 2^k is scanned as the
    previous record plus the annulus 2^(k-1) < |l| <= 2^k.  If `records` is
    a list, the per-scale SmallDivisorRecord values are appended to it.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    total = mp.mpf(0)
    record = None
    for k in range(1, K + 1):
        lower = (1 << (k - 1)) + 1 if k > 1 else 1
        record = omega_min(alpha, 1 << k, lower=lower, seed=record)
        total += mpmath.log(1 / record.value_mpf()) / (1 << k)
        if records is not None:
            records.append(record)
    return total
