"""Exact combinatorics and terminating hypergeometric identities.

Everything here works over :class:`fractions.Fraction`; floats only appear in
:func:`hyp2f1_numeric` and the non-terminating branch of :func:`check_euler`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

from .errors import DomainError, IntegralityError, NoConvergence, ParameterPole, Unmatched, Undefined
from .gaussian import as_fraction

__all__ = [
    "HyperSpec",
    "GammaRatioSpec",
    "binomial",
    "pochhammer",
    "hyp2f1_exact",
    "hyp2f1_numeric",
    "anr",
    "anr_closed",
    "anrs",
    "anrs_gamma",
    "gamma_ratio_exact",
    "difference_power",
    "check_euler",
    "check_pfaff",
    "check_zeng_lemma",
    "check_bailey",
    "binomial_half_sum",
]


@dataclass(frozen=True)
class HyperSpec:
    """Parameters of 2F1(a, b; c; z)."""

    a: object
    b: object
    c: object
    z: object


@dataclass(frozen=True)
class GammaRatioSpec:
    """prod Gamma(numerator) / prod Gamma(denominator)."""

    numerator: tuple = field(default_factory=tuple)
    denominator: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "numerator", tuple(as_fraction(x) for x in self.numerator))
        object.__setattr__(self, "denominator", tuple(as_fraction(x) for x in self.denominator))


def binomial(n: int, k: int) -> int:
    """C(n, k), taken to be 0 when k < 0, k > n or n < 0."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def pochhammer(t, p: int):
    """Rising factorial (t)_p = t (t+1) ... (t+p-1), with (t)_0 = 1.

    Exact for ints, Fractions and rational strings; falls back to plain
    arithmetic for floats and complex numbers.
    """
    if p < 0:
        raise DomainError("pochhammer order must be non-negative")
    if isinstance(t, (float, complex)):
        out = 1.0
        for j in range(p):
            out *= t + j
        return out
    t = as_fraction(t)
    out = Fraction(1)
    for j in range(p):
        out *= t + j
    return out


def _nonpositive_integer(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def _terminating_order(a: Fraction, b: Fraction) -> int | None:
    orders = [-int(x) for x in (a, b) if _nonpositive_integer(x)]
    return min(orders) if orders else None


def hyp2f1_exact(spec: HyperSpec) -> Fraction:
    """Exact value of a terminating 2F1 series.

    Either upper parameter must be a non-positive integer -n; the result is
    the finite sum over p = 0..n. Raises :class:`ParameterPole` when a (c)_p
    factor vanishes before the series stops.
    """
    a, b, c, z = (as_fraction(x) for x in (spec.a, spec.b, spec.c, spec.z))
    n = _terminating_order(a, b)
    if n is None:
        raise DomainError("hyp2f1_exact needs a or b to be a non-positive integer")
    total = Fraction(1)
    term = Fraction(1)
    for p in range(n):
        if c + p == 0:
            raise ParameterPole(f"(c)_p vanishes at p={p + 1} for c={c}")
        term = term * (a + p) * (b + p) / ((p + 1) * (c + p)) * z
        total += term
    return total


def _cplx(x) -> complex:
    if isinstance(x, complex):
        return x
    if isinstance(x, (str, Fraction, int)):
        return complex(float(as_fraction(x)))
    return complex(x)


@dataclass(frozen=True)
class NumericValue:
    value: complex
    bound: float
    terms: int


def hyp2f1_numeric(spec: HyperSpec, tol: float = 1e-15, max_terms: int = 2_000_000) -> NumericValue:
    """Partial sums of the 2F1 series with a geometric tail majorant.

    The stopping rule bounds the tail after term P by |t_P| * r / (1 - r),
    with r a monotone upper bound of sup_{p >= P} |(a+p)(b+p) z / ((1+p)(c+p))|.
    On |z| = 1 (only allowed when Re(c-a-b) > 0) the tail is bounded through
    the algebraic decay |t_p| ~ p^{-(1+delta)}.
    """
    a, b, c, z = (_cplx(x) for x in (spec.a, spec.b, spec.c, spec.z))
    for x in (spec.a, spec.b):
        if not isinstance(x, (complex, float)) and _nonpositive_integer(as_fraction(x)):
            n = -int(as_fraction(x))
            return NumericValue(_finite_sum(a, b, c, z, n), 0.0, n + 1)
    if c.imag == 0 and c.real <= 0 and c.real == int(c.real):
        raise ParameterPole(f"c={c} is a non-positive integer")
    az = abs(z)
    delta = (c - a - b).real
    if az > 1 or (az == 1 and delta <= 0):
        raise NoConvergence(f"2F1 series diverges at |z|={az} with Re(c-a-b)={delta}")
    total = 0j
    term = 1 + 0j
    p = 0
    while p < max_terms:
        total += term
        ratio_now = (a + p) * (b + p) / ((1 + p) * (c + p)) * z
        term = term * ratio_now
        p += 1
        if term == 0:
            return NumericValue(total, 0.0, p)
        if p > abs(c) + 1:
            r = az * (1 + abs(a - 1) / (p + 1)) * (1 + abs(b - c) / (p - abs(c)))
            if az < 1 and r < 1:
                bound = abs(term) / (1 - r)
            elif az == 1:
                bound = abs(term) * (p + abs(a) + abs(b) + abs(c)) / delta * 2
            else:
                continue
            if bound < tol * max(1.0, abs(total)):
                return NumericValue(total + term, bound, p + 1)
    raise NoConvergence(f"2F1 series did not reach tol={tol} in {max_terms} terms")


def _finite_sum(a, b, c, z, n: int) -> complex:
    total = 1 + 0j
    term = 1 + 0j
    for p in range(n):
        if c + p == 0:
            raise ParameterPole(f"(c)_p vanishes at p={p + 1}")
        term = term * (a + p) * (b + p) / ((p + 1) * (c + p)) * z
        total += term
    return total


def _as_integer(value: Fraction, what: str) -> int:
    if value.denominator != 1:
        raise IntegralityError(f"{what} reduced to non-integer {value}")
    return value.numerator


def anr(n: int, r: int) -> int:
    """The double binomial sum A_{n,r}, evaluated exactly.

    Powers (-2)^{p-l} with p < l are carried as exact dyadic rationals; the
    final reduced denominator must be 1.
    """
    if n < 0 or r < 0 or r > 2 * n + 1:
        raise DomainError(f"anr needs 0 <= r <= 2n+1, got n={n}, r={r}")
    total = Fraction(0)
    for p in range(n + 1):
        cp = binomial(2 * n + 1 - r, p)
        if cp == 0:
            continue
        for ell in range(n + 1):
            cr = binomial(r, n - ell)
            if cr == 0:
                continue
            total += Fraction(-2) ** (p - ell) * cr * cp * binomial(n - p + ell, ell)
    sign = -1 if (r + 1) % 2 else 1
    return _as_integer(sign * total, f"A_{{{n},{r}}}")


def anr_closed(n: int, r: int) -> int:
    if n < 0 or r < 0 or r > 2 * n + 1:
        raise DomainError(f"anr_closed needs 0 <= r <= 2n+1, got n={n}, r={r}")
    return -(2**n) if r <= n else 2**n


def anrs(n: int, r: int, s: int) -> int | Fraction:
    """A_{n,r,s}: the three-index generalisation appearing in the even-order relations.

    For small s the sum can be a proper dyadic rational (A_{2,0,0} = 3/2); only
    2^n A_{n,r,s} is always an integer, and that is what gets asserted. The
    value is returned as an int whenever it is one.
    """
    if n < 0 or not 0 <= r <= s <= 2 * n + 1:
        raise DomainError(f"anrs needs 0 <= r <= s <= 2n+1, got n={n}, r={r}, s={s}")
    total = Fraction(0)
    for p in range(n + 1):
        cp = binomial(s - r, p)
        if cp == 0:
            continue
        for ell in range(n + 1):
            cr = binomial(r, n - ell)
            if cr == 0:
                continue
            sign = -1 if (p + ell) % 2 else 1
            total += sign * Fraction(2) ** (p - ell) * binomial(n - p + ell, ell) * cr * cp
    if r % 2:
        total = -total
    _as_integer(total * 2**n, f"2^{n} A_{{{n},{r},{s}}}")
    return total.numerator if total.denominator == 1 else total


def anrs_gamma(n: int, r: int, s: int) -> Fraction:
    """Closed form of A_{n,r,s} for 0 <= r <= n < s <= 2n through a Gamma ratio.

    Vanishes exactly for odd s, where the denominator Gamma sits on a pole.
    """
    if not (0 <= r <= n < s <= 2 * n):
        raise DomainError(f"anrs_gamma needs 0 <= r <= n < s <= 2n, got n={n}, r={r}, s={s}")
    ratio = gamma_ratio_exact(
        GammaRatioSpec(
            numerator=(Fraction(s - n + 1, 2), Fraction(s - n + 2, 2)),
            denominator=(Fraction(s - 2 * n + 1, 2), Fraction(s + 2, 2)),
        )
    )
    return binomial(s, n) * ratio


def _is_pole(x: Fraction) -> bool:
    return x.denominator == 1 and x <= 0


def _pair_ratio(x: Fraction, y: Fraction) -> Fraction:
    """Gamma(x)/Gamma(y) for integer x - y, read as a limit when both are poles."""
    if _is_pole(x) and not _is_pole(y):
        raise Undefined(f"Gamma({x}) has a pole not cancelled by Gamma({y})")
    k = x - y
    k = int(k)
    if k >= 0:
        return pochhammer(y, k)
    return 1 / pochhammer(x, -k)


def _lone_gamma(x: Fraction, in_numerator: bool) -> Fraction:
    if x.denominator != 1:
        raise Unmatched(f"Gamma({x}) has no partner with an integer difference")
    if x <= 0:
        if in_numerator:
            raise Undefined(f"Gamma({x}) is a pole")
        return Fraction(0)
    value = Fraction(math.factorial(int(x) - 1))
    return value if in_numerator else 1 / value


def gamma_ratio_exact(spec: GammaRatioSpec) -> Fraction:
    """Exact value of a Gamma ratio whose arguments pair up with integer differences.

    Each numerator argument is matched to a denominator argument differing by
    an integer and the pair is telescoped with Gamma(x+1) = x Gamma(x), so the
    transcendental parts (sqrt(pi) for half-integers) cancel symbolically.
    Unpaired positive-integer arguments are plain factorials; an unpaired
    denominator pole gives 0.
    """
    num = list(spec.numerator)
    den = list(spec.denominator)
    if len(num) < len(den):
        short, long_, num_short = num, den, True
    else:
        short, long_, num_short = den, num, False

    best: list | None = None
    for perm in permutations(range(len(long_)), len(short)):
        if all((short[i] - long_[j]).denominator == 1 for i, j in enumerate(perm)):
            best = list(perm)
            break
    if best is None:
        raise Unmatched(f"no integer-difference pairing for {spec.numerator} / {spec.denominator}")

    value = Fraction(1)
    zero = False
    undefined: Undefined | None = None
    for i, j in enumerate(best):
        x, y = (short[i], long_[j]) if num_short else (long_[j], short[i])
        try:
            factor = _pair_ratio(x, y)
        except Undefined as exc:
            undefined = exc
            continue
        if factor == 0:
            zero = True
        value *= factor
    used = set(best)
    for j, x in enumerate(long_):
        if j in used:
            continue
        try:
            factor = _lone_gamma(x, in_numerator=not num_short)
        except Undefined as exc:
            undefined = exc
            continue
        if factor == 0:
            zero = True
        value *= factor
    if undefined is not None:
        raise undefined
    return Fraction(0) if zero else value


def difference_power(values: Sequence, m: int):
    """m-th forward difference from tabulated f(x), f(x+1), ..., f(x+m)."""
    if len(values) < m + 1:
        raise DomainError(f"need {m + 1} consecutive values, got {len(values)}")
    total = 0
    for k in range(m + 1):
        sign = -1 if (m - k) % 2 else 1
        total = total + sign * binomial(m, k) * values[k]
    return total


def _terminates(a: Fraction, b: Fraction) -> bool:
    return _terminating_order(a, b) is not None


def check_euler(a, b, c, z, tol: float = 1e-12):
    """|2F1(a,b;c;z) - (1-z)^{c-a-b} 2F1(c-a,c-b;c;z)|.

    Exact (a Fraction, expected 0) when both series terminate and c-a-b is an
    integer; otherwise a float residual from :func:`hyp2f1_numeric`.
    """
    a, b, c, z = (as_fraction(x) for x in (a, b, c, z))
    if abs(z) > Fraction(1, 2):
        raise DomainError("check_euler is restricted to |z| <= 1/2")
    e = c - a - b
    if _terminates(a, b) and _terminates(c - a, c - b) and e.denominator == 1:
        lhs = hyp2f1_exact(HyperSpec(a, b, c, z))
        rhs = (1 - z) ** int(e) * hyp2f1_exact(HyperSpec(c - a, c - b, c, z))
        return abs(lhs - rhs)
    inner_tol = tol * 1e-3
    lhs = hyp2f1_numeric(HyperSpec(a, b, c, z), inner_tol).value
    rhs_f = hyp2f1_numeric(HyperSpec(c - a, c - b, c, z), inner_tol).value
    rhs = cmath.exp(float(e) * cmath.log(1 - float(z))) * rhs_f
    return abs(lhs - rhs)


def check_pfaff(a, b, c) -> Fraction:
    """Exact residual 2F1(a,b;c;1/2) - 2^a 2F1(a,c-b;c;-1) for a = -n."""
    a, b, c = (as_fraction(x) for x in (a, b, c))
    if not _nonpositive_integer(a):
        raise DomainError("check_pfaff needs a to be a non-positive integer")
    if not b - a > -1:
        raise DomainError("check_pfaff needs b - a > -1")
    lhs = hyp2f1_exact(HyperSpec(a, b, c, Fraction(1, 2)))
    rhs = Fraction(2) ** int(a) * hyp2f1_exact(HyperSpec(a, c - b, c, Fraction(-1)))
    return lhs - rhs


def check_zeng_lemma(a, b, c, m: int, z) -> Fraction:
    """Exact residual of the finite-difference identity

    sum_k C(m,k) (z-1)^{-k} 2F1(a, b-k; c; z)
        = (c-a)_m / (c)_m * (z/(z-1))^m * 2F1(a, b; c+m; z)

    for terminating a = -n.
    """
    a, b, c, z = (as_fraction(x) for x in (a, b, c, z))
    if not _nonpositive_integer(a):
        raise DomainError("check_zeng_lemma needs a to be a non-positive integer")
    if z == 1:
        raise DomainError("z = 1 is excluded")
    lhs = Fraction(0)
    for k in range(m + 1):
        lhs += binomial(m, k) * (z - 1) ** (-k) * hyp2f1_exact(HyperSpec(a, b - k, c, z))
    cm = pochhammer(c, m)
    if cm == 0:
        raise ParameterPole(f"(c)_m vanishes for c={c}, m={m}")
    rhs = pochhammer(c - a, m) / cm * (z / (z - 1)) ** m * hyp2f1_exact(HyperSpec(a, b, c + m, z))
    return lhs - rhs


def check_bailey(a, b, tol: float = 1e-12):
    """Residual of 2F1(a, 1-a; b; 1/2) = G(b/2) G((1+b)/2) / (G((a+b)/2) G((1-a+b)/2)).

    Exact when a is a non-positive integer and the Gamma ratio telescopes;
    otherwise both sides are evaluated in floating point.
    """
    a, b = (as_fraction(x) for x in (a, b))
    ratio_spec = GammaRatioSpec(numerator=(b / 2, (1 + b) / 2), denominator=((a + b) / 2, (1 - a + b) / 2))
    if _nonpositive_integer(a):
        lhs = hyp2f1_exact(HyperSpec(a, 1 - a, b, Fraction(1, 2)))
        try:
            rhs = gamma_ratio_exact(ratio_spec)
        except Unmatched:
            pass
        else:
            return lhs - rhs
    lhs_n = hyp2f1_numeric(HyperSpec(a, 1 - a, b, Fraction(1, 2)), tol * 1e-3).value
    rhs_n = _gamma_ratio_float(ratio_spec)
    return abs(lhs_n - rhs_n)


def _gamma_ratio_float(spec: GammaRatioSpec) -> float:
    from scipy.special import rgamma

    out = 1.0
    for x in spec.numerator:
        out /= float(rgamma(float(x)))
    for x in spec.denominator:
        out *= float(rgamma(float(x)))
    return out


def binomial_half_sum(n: int) -> int:
    """sum_{i=0}^{n} C(2n+1, i); equals 4**n."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return sum(binomial(2 * n + 1, i) for i in range(n + 1))
