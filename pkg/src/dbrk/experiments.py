"""Boundary-point experiments: the summability condition, coefficient identities,
the lambda relations, radial norm convergence, the odd-s probe and the
Taylor remainder along the radius.

Everything here returns plain dataclasses of rows so the CLI can tabulate
them. Exact Q(i) arithmetic is used whenever b is Blaschke-only with zero
phases and x0 is rational; otherwise mpmath at a precision large enough for
the cancellation involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import SingularPoint
from .fields import EXACT, ExactField, exact_number, mp_field, resolve_field
from .functions import DerivativeJet, PointMassSingularFactor, UnitBallFunction, _neville
from .gaussian import GaussianRational, as_fraction
from .kernels import KernelSpec, kernel_b_z_derivative, lambda_coeff, norm_sq_boundary, norm_sq_interior
from .quadrature import QuadratureConfig, integrate_interval

__all__ = [
    "DEFAULT_SCHEDULE",
    "default_schedule",
    "ConditionReport",
    "ahern_clark_report",
    "IdentityRow",
    "coefficient_identities",
    "LambdaRow",
    "LambdaSuite",
    "lambda_suite",
    "TraceRow",
    "ConvergenceTrace",
    "norm_convergence_trace",
    "odd_s_probe",
    "RemainderRow",
    "taylor_remainder_check",
    "radial_limit",
    "boundary_jet",
]

INF = float("inf")


def default_schedule(k_max: int = 12) -> list[Fraction]:
    """t = 2^{-k}, k = 1..k_max, kept as exact rationals."""
    return [Fraction(1, 2**k) for k in range(1, k_max + 1)]


DEFAULT_SCHEDULE = tuple(default_schedule())


def _is_exact_setting(b: UnitBallFunction, x0) -> bool:
    if not b.exact_ok:
        return False
    if isinstance(x0, float):
        return True  # binary floats are rationals
    try:
        as_fraction(x0)
    except (TypeError, ValueError):
        return False
    return True


def _real_fraction(x0) -> Fraction:
    if isinstance(x0, float):
        return Fraction(x0)
    return as_fraction(x0)


def boundary_jet(b: UnitBallFunction, x0, order: int, precision=None) -> DerivativeJet:
    """Jet of b at a real x0, exact when the data allows it and ``precision`` is "exact" or None."""
    if precision in (None, "exact") and _is_exact_setting(b, x0):
        return b.derivative_jet(GaussianRational(_real_fraction(x0)), order, EXACT)
    if precision == "exact":
        raise TypeError("exact jets need Blaschke-only data with zero phases and rational x0")
    F = resolve_field(precision)
    return b.derivative_jet(F.coerce(_real_fraction(x0)), order, F)


def _is_zero(v) -> bool:
    if isinstance(v, GaussianRational):
        return v.re == 0 and v.im == 0
    return v == 0


def _mag(v) -> float:
    if isinstance(v, GaussianRational):
        return math.sqrt(float(v.abs2()))
    return abs(complex(v))


# ---------------------------------------------------------------- condition


@dataclass(frozen=True)
class ConditionReport:
    x0: float
    n: int
    blaschke_term: float
    singular_term: float
    log_term: float
    log_error: float = 0.0
    blaschke_exact: Fraction | None = None
    tail_bound: float | None = None
    total: float = field(init=False)
    finite: bool = field(init=False)

    def __post_init__(self):
        terms = (self.blaschke_term, self.singular_term, self.log_term)
        object.__setattr__(self, "total", sum(terms))
        object.__setattr__(self, "finite", all(math.isfinite(x) for x in terms))


def ahern_clark_report(
    b: UnitBallFunction, x0, n: int, tail_bound: float | None = None, cfg: QuadratureConfig | None = None
) -> ConditionReport:
    """The three sums controlling boundary derivatives of order up to n at x0.

    ``tail_bound`` is an optional user-supplied bound for zeros dropped when
    truncating an infinite Blaschke product; it is recorded, not computed.
    """
    x = _real_fraction(x0)
    power = 2 * n + 2
    exact = Fraction(0)
    for f in b.blaschke_factors:
        d2 = (x - f.zero_re) ** 2 + f.zero_im**2
        exact += f.zero_im / d2 ** (n + 1)
    singular = 0.0
    for f in b.point_masses:
        if f.location == x:
            singular = INF
            break
        singular += float(f.mass / abs(x - f.location) ** power)
    log_term = 0.0
    log_err = 0.0
    xf = float(x)
    cfg = cfg or QuadratureConfig(abs_tol=1e-14, rel_tol=1e-10)
    for d in b.dips:
        lo, hi = d.support
        if lo < xf < hi:
            log_term = INF
            break
        res = integrate_interval(lambda t, d=d: np.abs(d.log_modulus(t)) / np.abs(t - xf) ** power, lo, hi, cfg)
        log_term += res.value.real
        log_err += res.error_estimate
    return ConditionReport(xf, n, float(exact), singular, log_term, log_err, exact, tail_bound)


# ---------------------------------------------------------------- identities


@dataclass(frozen=True)
class IdentityRow:
    ell: int
    value: object  # 1 - |a0|^2 for ell = 0, sum_q a_{ell-q} conj(a_q) otherwise
    residual: float
    extended: bool  # True for the even ell in (n, 2n]


def coefficient_identities(b: UnitBallFunction, x0, n: int, jet: DerivativeJet | None = None) -> list[IdentityRow]:
    """Residuals of |a0| = 1 and of the convolution identities at x0.

    Checked for 1 <= ell <= n and for even ell in (n, 2n].
    """
    if jet is None:
        jet = boundary_jet(b, x0, 2 * n + 1)
    jet.require(2 * n)
    a = jet.taylor_coeffs()
    a0 = a[0]
    v0 = 1 - a0 * a0.conjugate()
    rows = [IdentityRow(0, v0, _mag(v0), False)]
    ells = list(range(1, n + 1)) + [ell for ell in range(n + 1, 2 * n + 1) if ell % 2 == 0]
    for ell in ells:
        acc = 0
        for q in range(ell + 1):
            acc = acc + a[ell - q] * a[q].conjugate()
        rows.append(IdentityRow(ell, acc, _mag(acc), ell > n))
    return rows


# ---------------------------------------------------------------- lambda relations


@dataclass(frozen=True)
class LambdaRow:
    s: int
    value: object
    expected: object
    residual: float


@dataclass(frozen=True)
class LambdaSuite:
    n: int
    rows: tuple
    exact: bool

    @property
    def max_residual(self) -> float:
        return max(r.residual for r in self.rows)

    def passed(self, tol: float = 1e-10) -> bool:
        if self.exact:
            return all(r.residual == 0 for r in self.rows)
        return self.max_residual < tol


def lambda_suite(b: UnitBallFunction, x0, n: int, jet: DerivativeJet | None = None) -> LambdaSuite:
    """lambda_{s,n} for s = 0..2n+1 against their predicted values.

    s = 0 should give (-1)^n C(2n, n), 1 <= s <= 2n should vanish, and
    s = 2n+1 should equal (-1)^{n+1} 2^{2n+1} R / n! where
    R = 2 pi ||k_{x0,n}||^2 / n! is the pi-free boundary norm.
    """
    if jet is None:
        jet = boundary_jet(b, x0, 2 * n + 1)
    jet.require(2 * n + 1)
    a = jet.taylor_coeffs()
    exact = isinstance(jet.field, ExactField)
    R = norm_sq_boundary(b, x0, n, jet, pi_free=True)
    rows = []
    for s in range(2 * n + 2):
        lam = lambda_coeff(a, s, n)
        if s == 0:
            expected = (-1) ** n * math.comb(2 * n, n)
        elif s <= 2 * n:
            expected = 0
        else:
            expected = (-1) ** (n + 1) * 2 ** (2 * n + 1) * R / math.factorial(n)
        if exact:
            expected = exact_number(as_fraction(expected)) if not isinstance(expected, float) else expected
        rows.append(LambdaRow(s, lam, expected, _mag(lam - expected)))
    return LambdaSuite(n, tuple(rows), exact)


# ---------------------------------------------------------------- norm convergence


@dataclass(frozen=True)
class TraceRow:
    t: Fraction
    norm_sq: float  # ||k_{x0+it,n}||^2
    diff_norm_sq: float  # ||k_{x0+it,n} - k_{x0,n}||^2
    norm_gap: float  # ||k_{x0+it,n}||^2 - ||k_{x0,n}||^2
    exact_norm: Fraction | None = None  # the same three quantities times 2 pi / n!
    exact_diff: Fraction | None = None
    bits: int | None = None


@dataclass(frozen=True)
class ConvergenceTrace:
    x0: float
    n: int
    limit: float  # ||k_{x0,n}||^2
    rows: tuple
    exact: bool
    exact_limit: Fraction | None = None

    @property
    def ts(self) -> list:
        return [r.t for r in self.rows]

    @property
    def diff_column(self) -> list[float]:
        return [r.diff_norm_sq for r in self.rows]

    def decreasing_tail(self, steps: int = 6) -> bool:
        """True when the difference norm strictly decreases over the last ``steps`` steps."""
        col = self.diff_column[-(steps + 1):]
        return all(b < a for a, b in zip(col, col[1:]))


def _cross_pi_free(b, x0c, n, jet0, omega, jet_w):
    """Re of 2 pi/n! <k_{x0,n}, k_{omega,n}>_b, with the pairing given by (k_{x0,n})^{(n)}(omega)."""
    core = kernel_b_z_derivative(b, KernelSpec.boundary(x0c, n), jet0, omega, n, jet_z=jet_w, scaled=False)
    # the unscaled value is i * core
    return -core.imag if not isinstance(core, GaussianRational) else -core.im


def norm_convergence_trace(
    b: UnitBallFunction,
    x0,
    n: int,
    t_schedule: Sequence | None = None,
    exact: bool | None = None,
    extra_bits: int = 64,
) -> ConvergenceTrace:
    """||k_{x0+it,n}||^2 and ||k_{x0+it,n} - k_{x0,n}||^2 along the radius.

    The difference norm is ||k_w||^2 - 2 Re <k_{x0}, k_w> + ||k_{x0}||^2 with
    the inner product evaluated through the reproducing property. With
    ``exact`` (the default when the data allows) every quantity is an exact
    rational multiple of n!/(2 pi); otherwise each t is run in mpmath with
    (2n+1) log2(1/t) + extra_bits bits.
    """
    ts = [_real_fraction(t) if not isinstance(t, Fraction) else t for t in (t_schedule or DEFAULT_SCHEDULE)]
    if any(t <= 0 for t in ts) or any(b2 >= a1 for a1, b2 in zip(ts, ts[1:])):
        raise ValueError("t_schedule must be positive and strictly decreasing")
    can_exact = _is_exact_setting(b, x0)
    if exact is None:
        exact = can_exact
    if exact and not can_exact:
        raise TypeError("exact trace needs Blaschke-only data with zero phases and rational x0")
    x = _real_fraction(x0)
    scale = math.factorial(n) / (2 * math.pi)
    rows = []
    if exact:
        x0c = GaussianRational(x)
        jet0 = b.derivative_jet(x0c, 2 * n + 1, EXACT)
        R0 = norm_sq_boundary(b, x0c, n, jet0, pi_free=True)
        for t in ts:
            w = GaussianRational(x, t)
            jw = b.derivative_jet(w, n, EXACT)
            Rw = norm_sq_interior(b, w, n, jw, pi_free=True)
            cross = _cross_pi_free(b, x0c, n, jet0, w, jw)
            D = Rw - 2 * cross + R0
            rows.append(TraceRow(t, float(Rw) * scale, float(D) * scale, float(Rw - R0) * scale, Rw, D))
        return ConvergenceTrace(float(x), n, float(R0) * scale, tuple(rows), True, R0)

    R0f = None
    for t in ts:
        bits = int(math.ceil((2 * n + 1) * math.log2(1 / float(t)))) + extra_bits
        F = mp_field(max(bits, 64))
        x0c = F.coerce(x)
        jet0 = b.derivative_jet(x0c, 2 * n + 1, F)
        R0 = norm_sq_boundary(b, x0c, n, jet0, pi_free=True)
        w = F.coerce(GaussianRational(x, t))
        jw = b.derivative_jet(w, n, F)
        Rw = norm_sq_interior(b, w, n, jw, pi_free=True)
        cross = _cross_pi_free(b, x0c, n, jet0, w, jw)
        D = Rw - 2 * cross + R0
        R0f = float(R0)
        rows.append(TraceRow(t, float(Rw) * scale, float(D) * scale, float(Rw - R0) * scale, bits=F.bits))
    return ConvergenceTrace(float(x), n, R0f * scale, tuple(rows), False)


# ---------------------------------------------------------------- probes


def odd_s_probe(b: UnitBallFunction, x0, n: int, jet: DerivativeJet | None = None) -> list[tuple[int, object]]:
    """sum_{r<=s} a_r conj(a_{s-r}) for odd s with n < s <= 2n. Reported, never asserted."""
    if jet is None:
        jet = boundary_jet(b, x0, 2 * n)
    jet.require(2 * n)
    a = jet.taylor_coeffs()
    out = []
    for s in range(n + 1, 2 * n + 1):
        if s % 2 == 0:
            continue
        acc = 0
        for r in range(s + 1):
            acc = acc + a[r] * a[s - r].conjugate()
        out.append((s, acc))
    return out


@dataclass(frozen=True)
class RemainderRow:
    t: float
    epsilon: complex
    ratio: float  # |epsilon(t)| / t


def taylor_remainder_check(
    b: UnitBallFunction, x0, n: int, t_schedule: Sequence | None = None, precision="mp"
) -> list[RemainderRow]:
    """epsilon(x0 + it) = (b(x0+it) - sum_{p<=n} a_p (it)^p) / (it)^n along the schedule."""
    ts = [float(t) for t in (t_schedule or DEFAULT_SCHEDULE)]
    F = resolve_field(precision)
    if isinstance(F, ExactField):
        F = resolve_field("mp")
    x = _real_fraction(x0)
    jet = b.derivative_jet(F.coerce(x), n, F)
    a = jet.taylor_coeffs()
    rows = []
    for t in ts:
        h = F.coerce(GaussianRational(0, _real_fraction(t)))
        w = F.coerce(GaussianRational(x, _real_fraction(t)))
        poly = 0
        for p in reversed(range(n + 1)):
            poly = poly * h + a[p]
        eps = complex((b.eval(w, F) - poly) / h**n)
        rows.append(RemainderRow(t, eps, abs(eps) / t))
    return rows


def radial_limit(fn: Callable[[float], complex], t_schedule: Sequence | None = None, degree: int = 5):
    """Limit of fn(t) as t -> 0+ by polynomial extrapolation over the last degree+1 points.

    Returns (value, change from the previous window).
    """
    ts = [float(t) for t in (t_schedule or [2.0**-k for k in range(2, 10)])]
    ys = [complex(fn(t)) for t in ts]
    width = min(degree + 1, len(ts))
    last = _neville(ts[-width:], ys[-width:])
    if len(ts) > width:
        prev = _neville(ts[-width - 1 : -1], ys[-width - 1 : -1])
        return last, abs(last - prev)
    return last, INF
