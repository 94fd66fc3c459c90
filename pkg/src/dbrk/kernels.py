"""Reproducing kernels for derivatives in H(b) and the quantities built from them.

All kernels share the prefactor ``i n! / (2 pi)``. Each function computes the
bracketed "core" in whatever field the jets live in (float, mpmath or exact
Q(i)) and only multiplies by the prefactor at the end, so exact inputs keep
an exact core available through ``scaled=False`` / ``pi_free=True``.

Notation: ``a_p = b^{(p)}(base) / p!`` are the Taylor coefficients of b at the
kernel's base point, and ``c`` is ``conj(omega)`` for an interior base or
``x0`` for a boundary base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CancellationError, LargeImaginary, NegativeNorm, SingularPoint
from .fields import FLOAT, ExactField, FloatField, MpField, exact_number
from .functions import DerivativeJet, UnitBallFunction
from .gaussian import GaussianRational, as_fraction

__all__ = [
    "KernelSpec",
    "kernel_b",
    "kernel_rho",
    "kernel_b_z_derivative",
    "phi_jet",
    "h_function",
    "h_expansion",
    "norm_sq_boundary",
    "norm_sq_interior",
    "lambda_coeff",
    "BoundaryKernelEvaluator",
]


@dataclass(frozen=True)
class KernelSpec:
    """Base point and derivative order of k_{base,n}.

    ``base`` is an interior point (Im > 0) or a real boundary point.
    """

    base: object
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("kernel order must be non-negative")
        if _imag(self.base) < 0:
            raise ValueError("kernel base must lie in the closed upper half plane")

    @classmethod
    def interior(cls, omega, n: int) -> "KernelSpec":
        if _imag(omega) <= 0:
            raise ValueError("interior base needs Im omega > 0")
        return cls(omega, n)

    @classmethod
    def boundary(cls, x0, n: int) -> "KernelSpec":
        return cls(x0, n)

    @property
    def is_boundary(self) -> bool:
        return _imag(self.base) == 0


def _imag(z):
    if isinstance(z, (GaussianRational, complex)) or hasattr(z, "imag"):
        return z.imag
    if isinstance(z, (list, tuple)):
        return as_fraction(str(z[1]))
    return 0


def _conj(x):
    return x.conjugate()


def _times_i(v):
    if isinstance(v, GaussianRational):
        return GaussianRational(-v.im, v.re)
    return v * 1j


def _center(spec: KernelSpec, F):
    base = F.coerce(spec.base)
    return base if spec.is_boundary else _conj(base)


def _scale(core, n: int, F):
    """Multiply a core value by i n! / (2 pi)."""
    if isinstance(F, ExactField):
        core = complex(core)
        return 1j * math.factorial(n) / (2 * math.pi) * core
    if isinstance(F, MpField):
        return F.i * math.factorial(n) / (2 * F.pi) * core
    return 1j * math.factorial(n) / (2 * np.pi) * core


def _conj_taylor(jet: DerivativeJet, n: int) -> list:
    jet.require(n)
    return [_conj(jet.taylor(p)) for p in range(n + 1)]


def _poly(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _is_at(z, x0) -> bool:
    if isinstance(z, np.ndarray):
        return False
    return z == x0


def phi_jet(b: UnitBallFunction, x0, n: int, jet: DerivativeJet) -> list:
    """Derivatives of phi(z) = 1 - b(z) sum_{p<=n} conj(a_p) (z - x0)^p at x0.

    phi^{(l)}(x0) = delta_{l0} - l! sum_{p<=min(l,n)} conj(a_p) a_{l-p}, for l up to the jet order.
    """
    a = jet.taylor_coeffs()
    abar = [_conj(a[p]) for p in range(min(n, jet.order) + 1)]
    out = []
    for ell in range(jet.order + 1):
        acc = 0
        for p in range(min(ell, n) + 1):
            acc = acc + abar[p] * a[ell - p]
        val = -math.factorial(ell) * acc
        out.append(1 + val if ell == 0 else val)
    return out


def kernel_b(b: UnitBallFunction, spec: KernelSpec, jet: DerivativeJet, z, bz=None, scaled: bool = True):
    """k^b_{base,n}(z) for Im z >= 0.

    At z = x0 for a boundary base the removable singularity is filled in with
    (i n!/2pi) phi^{(n+1)}(x0)/(n+1)!, which needs a jet of order n+1.
    """
    n = spec.n
    F = jet.field
    c = _center(spec, F)
    if spec.is_boundary and _is_at(F.coerce(z) if not isinstance(z, np.ndarray) else z, c):
        if jet.order < n + 1:
            raise SingularPoint("kernel at its own boundary base needs a jet of order n+1")
        core = phi_jet(b, c, n, jet)[n + 1] / math.factorial(n + 1)
        return _scale(core, n, F) if scaled else core
    if not isinstance(z, np.ndarray):
        z = F.coerce(z)
    if bz is None:
        bz = b.eval(z, F)
    abar = _conj_taylor(jet, n)
    d = z - c
    core = (1 - bz * _poly(abar, d)) / d ** (n + 1)
    return _scale(core, n, F) if scaled else core


def kernel_rho(b: UnitBallFunction, spec: KernelSpec, jet: DerivativeJet, t, scaled: bool = True):
    """k^rho_{base,n}(t) = (i n!/2pi) sum_p conj(a_p) (t - c)^p / (t - c)^{n+1}."""
    n = spec.n
    F = jet.field
    c = _center(spec, F)
    if not isinstance(t, np.ndarray):
        t = F.coerce(t)
        if spec.is_boundary and t == c:
            raise SingularPoint("k^rho is singular at its boundary base")
    elif spec.is_boundary and np.any(t == complex(c)):
        raise SingularPoint("k^rho is singular at its boundary base")
    abar = _conj_taylor(jet, n)
    d = t - c
    core = _poly(abar, d) / d ** (n + 1)
    return _scale(core, n, F) if scaled else core


def _falling(e: int, ell: int) -> int:
    out = 1
    for k in range(ell):
        out *= e - k
    return out


def kernel_b_z_derivative(
    b: UnitBallFunction,
    spec: KernelSpec,
    jet: DerivativeJet,
    z,
    q: int,
    jet_z: DerivativeJet | None = None,
    scaled: bool = True,
):
    """q-th z-derivative of k^b_{base,n} at z.

    Writing k = (i n!/2pi) [ (z-c)^{-n-1} - sum_p conj(a_p) (z-c)^{p-n-1} b(z) ],
    both pieces are differentiated in closed form (Leibniz on the second).
    At the boundary base itself the value is (i n!/2pi) q!/(q+n+1)! phi^{(q+n+1)}(x0).
    """
    n = spec.n
    F = jet.field
    c = _center(spec, F)
    z = F.coerce(z)
    if spec.is_boundary and z == c:
        if jet.order < q + n + 1:
            raise SingularPoint(f"need a jet of order {q + n + 1} at the boundary base")
        phi = phi_jet(b, c, n, jet)
        core = Fraction(math.factorial(q), math.factorial(q + n + 1)) * phi[q + n + 1]
        if isinstance(core, Fraction):
            core = F.coerce(core)
        return _scale(core, n, F) if scaled else core
    if jet_z is None:
        jet_z = b.derivative_jet(z, q, F)
    jet_z.require(q)
    abar = _conj_taylor(jet, n)
    d = z - c
    inv = 1 / d
    first = (-1) ** q * _rising(n + 1, q) * inv ** (n + 1 + q)
    second = 0
    for p in range(n + 1):
        e = p - n - 1
        inner = 0
        for ell in range(q + 1):
            inner = inner + math.comb(q, ell) * _falling(e, ell) * inv ** (n + 1 - p + ell) * jet_z.values[q - ell]
        second = second + abar[p] * inner
    core = first - second
    return _scale(core, n, F) if scaled else core


def _rising(x: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= x + j
    return out


def h_function(b: UnitBallFunction, x0, n: int, jet: DerivativeJet, z, bz=None):
    """h_{x0,n}(z) = (b(z) - sum_{p<=n} a_p (z-x0)^p) / (z-x0)^{n+1}."""
    F = jet.field
    x0 = F.coerce(x0)
    if not isinstance(z, np.ndarray):
        z = F.coerce(z)
        if z == x0:
            raise SingularPoint("h is singular at x0")
    if bz is None:
        bz = b.eval(z, F)
    jet.require(n)
    a = [jet.taylor(p) for p in range(n + 1)]
    d = z - x0
    return (bz - _poly(a, d)) / d ** (n + 1)


def h_expansion(b: UnitBallFunction, x0, n: int, jet: DerivativeJet, z, bz=None):
    """2 i pi sum_p b^{(n-p)}(x0)/((n-p)! p!) k^b_{x0,p}(z), computed without pi.

    Since 2 i pi * (i p!/2pi) / p! = -1 this is -sum_p a_{n-p} core_p(z).
    """
    F = jet.field
    x0c = F.coerce(x0)
    if not isinstance(z, np.ndarray):
        z = F.coerce(z)
    if bz is None:
        bz = b.eval(z, F)
    total = 0
    for p in range(n + 1):
        core = kernel_b(b, KernelSpec(x0, p), jet, z, bz=bz, scaled=False)
        total = total - jet.taylor(n - p) * core
    return total


def _check_real(value, scale, tol, what):
    im = value.imag
    re = value.real
    if abs(im) > tol * max(scale, 1e-300):
        raise LargeImaginary(f"{what}: imaginary part {float(im):.3g} vs scale {float(scale):.3g}")
    if re < -tol * max(scale, 1e-300):
        raise NegativeNorm(f"{what}: negative value {float(re):.3g}")
    return re


def norm_sq_boundary(
    b: UnitBallFunction, x0, n: int, jet: DerivativeJet, tol: float = 1e-8, pi_free: bool = False
):
    """||k^b_{x0,n}||_b^2 = n!^2/(2 i pi) sum_{p<=n} conj(a_p) a_{2n+1-p}.

    With ``pi_free=True`` returns 2 pi ||k||^2 / n! instead, which is an exact
    rational for exact jets.
    """
    jet.require(2 * n + 1)
    a = jet.taylor_coeffs()
    S = 0
    scale = 0.0
    for p in range(n + 1):
        term = _conj(a[p]) * a[2 * n + 1 - p]
        S = S + term
        scale += abs(complex(term))
    R = -1 * _times_i(S) * math.factorial(n)  # 2 pi ||k||^2 / n!
    scale *= math.factorial(n)
    if isinstance(R, GaussianRational):
        if R.im != 0 and not isinstance(jet.field, ExactField):
            raise LargeImaginary("exact norm not real")
        if R.im != 0:
            raise LargeImaginary(f"exact boundary norm has imaginary part {R.im}")
        if R.re < 0:
            raise NegativeNorm(f"exact boundary norm {R.re} < 0")
        return R.re if pi_free else float(R.re) * math.factorial(n) / (2 * math.pi)
    re = _check_real(R, scale, tol, "norm_sq_boundary")
    if pi_free:
        return re
    F = jet.field
    return re * math.factorial(n) / (2 * F.pi)


def norm_sq_interior(
    b: UnitBallFunction,
    omega,
    n: int,
    jet: DerivativeJet,
    tol: float = 1e-8,
    pi_free: bool = False,
    margin_bits: int = 10,
):
    """||k^b_{omega,n}||_b^2 through the closed-form n-th derivative on the diagonal.

    The numerator cancels to O(t^{2n+1}) as omega = x0 + i t approaches the
    boundary; the number of bits lost is measured and
    :class:`CancellationError` is raised when it eats the working precision.
    """
    F = jet.field
    jet.require(n)
    w = F.coerce(omega)
    delta = w - _conj(w)
    a = jet.taylor_coeffs()
    lead = (-1) ** n * Fraction(math.factorial(2 * n), math.factorial(n))
    if not isinstance(F, ExactField):
        lead = F.real(lead)
    num = lead
    biggest = abs(float(lead))
    for p in range(n + 1):
        ap = _conj(a[p])
        for ell in range(n + 1):
            coeff = math.comb(n, ell) * (-1) ** ell * Fraction(math.factorial(n - p + ell), math.factorial(n - p))
            coeff = coeff.numerator if coeff.denominator == 1 else coeff
            term = coeff * delta ** (n + p - ell) * ap * jet.values[n - ell]
            num = num - term
            biggest = max(biggest, abs(complex(term)))
    core = num / delta ** (2 * n + 1)
    R = _times_i(core)  # 2 pi ||k||^2 / n!
    if isinstance(R, GaussianRational):
        if R.im != 0:
            raise LargeImaginary(f"exact interior norm has imaginary part {R.im}")
        if R.re < 0:
            raise NegativeNorm(f"exact interior norm {R.re} < 0")
        return R.re if pi_free else float(R.re) * math.factorial(n) / (2 * math.pi)
    mag = abs(complex(num))
    lost = math.log2(biggest / mag) if mag > 0 else float("inf")
    if lost > F.bits - margin_bits:
        raise CancellationError(f"lost {lost:.1f} of {F.bits} bits in norm_sq_interior")
    scale = abs(complex(R)) + biggest / abs(complex(delta)) ** (2 * n + 1) * 2.0 ** (-F.bits + margin_bits)
    re = _check_real(R, scale, tol, "norm_sq_interior")
    if pi_free:
        return re
    return re * math.factorial(n) / (2 * F.pi)


def lambda_coeff(a, s: int, n: int):
    """lambda_{s,n} built from Taylor coefficients a_0..a_s at x0."""
    if not 0 <= s <= 2 * n + 1:
        raise ValueError("lambda_{s,n} needs 0 <= s <= 2n+1")
    if len(a) <= s:
        raise ValueError(f"need Taylor coefficients up to index {s}")
    inner_r = []
    for r in range(s + 1):
        sign = -1 if (s - r) % 2 else 1
        inner_r.append(sign * a[r] * _conj(a[s - r]))
    total = 0
    for p in range(n + 1):
        for ell in range(n + 1):
            w = (-1) ** (p + ell) * 2 ** (n + p - ell) * math.comb(n - p + ell, ell)
            acc = 0
            for r in range(s + 1):
                cr = math.comb(r, n - ell) if 0 <= n - ell <= r else 0
                cp = math.comb(s - r, p) if p <= s - r else 0
                if cr and cp:
                    acc = acc + cr * cp * inner_r[r]
            if acc != 0:
                total = total + w * acc
    for _ in range(s % 4):
        total = _times_i(total)
    return total


class BoundaryKernelEvaluator:
    """Vectorised float evaluation of k^b_{x0,n} on the real line.

    Near x0 the closed form divides a cancelling numerator by (t-x0)^{n+1};
    inside a small window it is replaced by the Taylor series of the kernel at
    x0 built from phi-derivatives, which needs a jet of order above 2n+1.
    """

    def __init__(self, b: UnitBallFunction, x0: float, n: int, jet: DerivativeJet):
        self.b = b
        self.x0 = float(x0)
        self.n = n
        self.spec = KernelSpec(self.x0, n)
        self.jet = DerivativeJet(jet.base, tuple(complex(v) for v in jet.values), FLOAT)
        phi = phi_jet(b, self.x0, n, self.jet)
        pref = 1j * math.factorial(n) / (2 * math.pi)
        self.taylor = [pref * phi[p + n + 1] / math.factorial(p + n + 1) for p in range(self.jet.order - n)]
        self.abar = [complex(_conj(self.jet.taylor(p))) for p in range(n + 1)]
        self.delta = self._choose_window()

    def _choose_window(self) -> float:
        coeffs = self.taylor
        K = len(coeffs) - 1
        if K < 1:
            return 0.0
        mags = [abs(c) for c in coeffs]
        roots = [m ** (-1.0 / k) for k, m in enumerate(mags) if k >= max(1, K // 2) and m > 0]
        R = min(roots) if roots else 1.0
        scale_direct = sum(abs(a) for a in self.abar) + 1.0
        pref = math.factorial(self.n) / (2 * math.pi)
        best, best_err = 0.0, float("inf")
        for delta in np.logspace(-6, 0, 121):
            if delta >= 0.5 * R:
                break
            q = delta / R
            tail = max(mags[K], mags[K - 1] / R) * delta**K * q / (1 - q)
            direct = 4e-16 * scale_direct * pref / delta ** (self.n + 1)
            err = max(tail, direct)
            if err < best_err:
                best, best_err = float(delta), err
        return best

    def __call__(self, t: np.ndarray, bt: np.ndarray | None = None) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        d = t - self.x0
        near = np.abs(d) < self.delta
        out = np.empty(t.shape, dtype=complex)
        if np.any(near):
            out[near] = _poly(self.taylor, d[near].astype(complex))
        far = ~near
        if np.any(far):
            if bt is None:
                bf = self.b.eval(t[far].astype(complex))
            else:
                bf = bt[far]
            df = d[far].astype(complex)
            core = (1 - bf * _poly(self.abar, df)) / df ** (self.n + 1)
            out[far] = 1j * math.factorial(self.n) / (2 * math.pi) * core
        return out
