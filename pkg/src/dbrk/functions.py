"""Functions in the unit ball of H^infinity of the upper half plane.

A :class:`UnitBallFunction` is a finite product of explicit factors:
Blaschke factors, point-mass singular inner factors, ``exp(i a z)``, smooth
outer "dips" and a unimodular constant. Every factor knows its value and its
derivative jet, so jets of the product follow from the Leibniz rule.

Exponential factors are differentiated through the recurrence

    E^{(j)} = sum_{k=0}^{j-1} C(j-1, k) L^{(k+1)} E^{(j-1-k)},   E = exp(L),

with the derivatives of the exponent L in closed form, except for the outer
factor where they are Cauchy-type integrals of log m over the dip supports.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate as _spi

from .errors import NotConverging, QuadratureFailure, SingularPoint
from .fields import EXACT, FLOAT, ExactField, FloatField, MpField, exact_number, resolve_field
from .gaussian import GaussianRational, as_fraction

__all__ = [
    "BlaschkeFactor",
    "PointMassSingularFactor",
    "SingularAtInfinityFactor",
    "OuterDipFactor",
    "Dip",
    "PhaseFactor",
    "UnitBallFunction",
    "DerivativeJet",
    "jet_product",
    "jet_exp",
    "eval_b",
    "derivative_jet",
    "taylor_coeffs",
    "rho",
    "radial_jet_extrapolate",
    "from_description",
]


def _num(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x)
    return as_fraction(x)


def _falling_sign_factorial(j: int) -> int:
    return (-1) ** j * math.factorial(j)


# ---------------------------------------------------------------- jets


@dataclass(frozen=True)
class DerivativeJet:
    """Values b(w), b'(w), ..., b^{(J)}(w) at one base point."""

    base: object
    values: tuple
    field: object = FLOAT

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def taylor(self, p: int):
        """a_p = b^{(p)}(w) / p!."""
        v = self.values[p]
        f = math.factorial(p)
        if isinstance(v, GaussianRational):
            return v / f
        return v / f

    def taylor_coeffs(self) -> list:
        return [self.taylor(p) for p in range(len(self.values))]

    def truncate(self, order: int) -> "DerivativeJet":
        if order > self.order:
            raise ValueError(f"jet has order {self.order}, cannot extend to {order}")
        return DerivativeJet(self.base, self.values[: order + 1], self.field)

    def to_complex(self) -> list[complex]:
        return [complex(v) for v in self.values]

    def require(self, order: int) -> "DerivativeJet":
        if self.order < order:
            raise ValueError(f"need a jet of order >= {order}, got {self.order}")
        return self

    def __mul__(self, other: "DerivativeJet") -> "DerivativeJet":
        return DerivativeJet(self.base, tuple(jet_product(self.values, other.values)), self.field)


def jet_product(f: Sequence, g: Sequence) -> list:
    """Leibniz rule: (fg)^{(j)} = sum_k C(j,k) f^{(k)} g^{(j-k)}."""
    n = min(len(f), len(g))
    out = []
    for j in range(n):
        acc = 0
        for k in range(j + 1):
            acc = acc + math.comb(j, k) * f[k] * g[j - k]
        out.append(acc)
    return out


def jet_exp(value, log_derivs: Sequence) -> list:
    """Jet of E = exp(L) from E(w) and L'(w), L''(w), ...

    ``log_derivs[k]`` is L^{(k+1)}(w).
    """
    out = [value]
    for j in range(1, len(log_derivs) + 1):
        acc = 0
        for k in range(j):
            acc = acc + math.comb(j - 1, k) * log_derivs[k] * out[j - 1 - k]
        out.append(acc)
    return out


# ---------------------------------------------------------------- factors


@dataclass(frozen=True)
class BlaschkeFactor:
    """exp(i alpha) (z - z_k) / (z - conj(z_k)) with Im z_k > 0."""

    zero_re: Fraction
    zero_im: Fraction
    phase: Fraction = Fraction(0)

    kind = "blaschke"

    def __init__(self, zero, phase=0):
        z = exact_number(zero)
        if z.im <= 0:
            raise ValueError(f"Blaschke zero must lie in the upper half plane, got {z}")
        object.__setattr__(self, "zero_re", z.re)
        object.__setattr__(self, "zero_im", z.im)
        object.__setattr__(self, "phase", _num(phase))

    @property
    def zero(self) -> complex:
        return complex(float(self.zero_re), float(self.zero_im))

    @property
    def exact_ok(self) -> bool:
        return self.phase == 0

    def _unit(self, F):
        if self.phase == 0:
            return 1
        if isinstance(F, ExactField):
            raise TypeError("non-zero Blaschke phase is not exact")
        a = F.real(self.phase)
        return F.exp(F.i * a)

    def value(self, z, F=FLOAT):
        zk = F.coerce(GaussianRational(self.zero_re, self.zero_im))
        return self._unit(F) * (z - zk) / (z - zk.conjugate())

    def jet(self, w, J: int, F=FLOAT) -> list:
        zk = F.coerce(GaussianRational(self.zero_re, self.zero_im))
        zb = zk.conjugate()
        u = self._unit(F)
        d = w - zb
        if d == 0:
            raise SingularPoint("evaluation at the conjugate of a Blaschke zero")
        out = [u * (w - zk) / d]
        c = u * (zb - zk)  # -2 i Im z_k times the phase
        inv = 1 / d
        power = inv
        for j in range(1, J + 1):
            power = power * inv
            out.append(c * _falling_sign_factorial(j) * power)
        return out

    def modulus_on_line(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def record(self) -> dict:
        return {
            "kind": "blaschke",
            "zero": [str(self.zero_re), str(self.zero_im)],
            "phase": str(self.phase),
        }


@dataclass(frozen=True)
class PointMassSingularFactor:
    """exp(-(1/(i pi)) sigma (t0 z + 1) / ((t0 - z)(t0^2 + 1))), the inner factor of sigma * delta_{t0}."""

    location: Fraction
    mass: Fraction

    kind = "point_mass"
    exact_ok = False

    def __init__(self, location, mass):
        object.__setattr__(self, "location", _num(location))
        object.__setattr__(self, "mass", _num(mass))
        if self.mass <= 0:
            raise ValueError("point mass must be positive")

    def _log(self, z, F):
        t0 = F.real(self.location)
        s = F.real(self.mass)
        d = t0 - z
        if np.any(d == 0):
            raise SingularPoint(f"point-mass factor is singular at t0={self.location}")
        return F.i * s / F.pi * (1 / d - t0 / (t0 * t0 + 1))

    def value(self, z, F=FLOAT):
        return F.exp(self._log(z, F))

    def jet(self, w, J: int, F=FLOAT) -> list:
        t0 = F.real(self.location)
        s = F.real(self.mass)
        d = t0 - w
        if d == 0:
            raise SingularPoint(f"point-mass factor is singular at t0={self.location}")
        scale = F.i * s / F.pi
        inv = 1 / d
        derivs = []
        power = inv
        for j in range(1, J + 1):
            power = power * inv
            derivs.append(scale * math.factorial(j) * power)
        return jet_exp(F.exp(self._log(w, F)), derivs)

    def modulus_on_line(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t == float(self.location)):
            raise SingularPoint(f"point-mass factor is singular at t0={self.location}")
        return np.ones_like(t)

    def record(self) -> dict:
        return {"kind": "point_mass", "location": str(self.location), "mass": str(self.mass)}


@dataclass(frozen=True)
class SingularAtInfinityFactor:
    """exp(i a z) with a >= 0."""

    a: Fraction

    kind = "exp_infinity"

    def __init__(self, a):
        object.__setattr__(self, "a", _num(a))
        if self.a < 0:
            raise ValueError("exp(i a z) needs a >= 0")

    @property
    def exact_ok(self) -> bool:
        return self.a == 0

    def value(self, z, F=FLOAT):
        if self.a == 0:
            return F.coerce(1) if not isinstance(z, np.ndarray) else np.ones_like(z, dtype=complex)
        return F.exp(F.i * F.real(self.a) * z)

    def jet(self, w, J: int, F=FLOAT) -> list:
        if self.a == 0:
            return [F.coerce(1)] + [F.coerce(0)] * J
        ia = F.i * F.real(self.a)
        derivs = [ia] + [F.coerce(0)] * (J - 1)
        return jet_exp(F.exp(ia * w), derivs[:J])

    def modulus_on_line(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def record(self) -> dict:
        return {"kind": "exp_infinity", "a": str(self.a)}


@dataclass(frozen=True)
class PhaseFactor:
    """Unimodular constant exp(i alpha)."""

    alpha: Fraction

    kind = "phase"

    def __init__(self, alpha):
        object.__setattr__(self, "alpha", _num(alpha))

    @property
    def exact_ok(self) -> bool:
        return self.alpha == 0

    def value(self, z, F=FLOAT):
        c = 1 if self.alpha == 0 else F.exp(F.i * F.real(self.alpha))
        if isinstance(z, np.ndarray):
            return np.full(z.shape, complex(c))
        return F.coerce(1) * c

    def jet(self, w, J: int, F=FLOAT) -> list:
        return [self.value(w, F)] + [F.coerce(0)] * J

    def modulus_on_line(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def record(self) -> dict:
        return {"kind": "phase", "alpha": str(self.alpha)}


# Outer dips -----------------------------------------------------------


def _gl_panels(panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


_GL_NODES, _GL_WEIGHTS = _gl_panels(128, 16)


def _bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


@dataclass(frozen=True)
class Dip:
    """One smooth dip of the boundary modulus: 1 - depth * bump((t - center) / width)."""

    center: Fraction
    width: Fraction
    depth: Fraction

    def __init__(self, center, width, depth):
        object.__setattr__(self, "center", _num(center))
        object.__setattr__(self, "width", _num(width))
        object.__setattr__(self, "depth", _num(depth))
        if self.width <= 0:
            raise ValueError("dip width must be positive")
        if not 0 < self.depth < 1:
            raise ValueError("dip depth must lie in (0, 1)")

    @property
    def support(self) -> tuple[float, float]:
        c, w = float(self.center), float(self.width)
        return (c - w, c + w)

    def log_modulus_unit(self, u):
        """G(u) = log(1 - depth * bump(u)) on the reference interval."""
        return np.log1p(-float(self.depth) * _bump(u))

    def log_modulus_unit_deriv(self, u):
        u = np.asarray(u, dtype=float)
        s = float(self.depth)
        b = _bump(u)
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        ui = u[inside]
        db = b[inside] * (-2.0 * ui / (1.0 - ui * ui) ** 2)
        out[inside] = -s * db / (1.0 - s * b[inside])
        return out

    def log_modulus(self, t):
        c, w = float(self.center), float(self.width)
        return self.log_modulus_unit((np.asarray(t, dtype=float) - c) / w)


class OuterDipFactor:
    """Outer function whose boundary modulus is a product of smooth dips.

    With g = log m the exponent is

        L(z) = (1/(i pi)) int (1/(t - z) - t/(t^2 + 1)) g(t) dt,

    and L^{(j)}(z) = (1/(i pi)) int j! g(t) / (t - z)^{j+1} dt for j >= 1.
    Each dip contributes separately since g is a sum over dips.
    """

    kind = "outer_dip"
    exact_ok = False

    def __init__(self, dips: Iterable[Dip], quad_tol: float = 1e-13):
        self.dips = tuple(dips)
        if not self.dips:
            raise ValueError("an outer dip factor needs at least one dip")
        self.quad_tol = quad_tol
        self._const = [self._real_constant(d) for d in self.dips]

    def __eq__(self, other):
        return isinstance(other, OuterDipFactor) and self.dips == other.dips

    def __hash__(self):
        return hash(self.dips)

    def __repr__(self):
        return f"OuterDipFactor({list(self.dips)!r})"

    @property
    def supports(self) -> list[tuple[float, float]]:
        return [d.support for d in self.dips]

    def log_modulus(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for d in self.dips:
            out = out + d.log_modulus(t)
        return out

    def modulus_on_line(self, t):
        return np.exp(self.log_modulus(t))

    @staticmethod
    def _real_constant(d: Dip) -> float:
        # int g(t) t/(t^2+1) dt over the dip support
        c, w = float(d.center), float(d.width)
        t = c + w * _GL_NODES
        return float(w * np.sum(_GL_WEIGHTS * d.log_modulus_unit(_GL_NODES) * t / (t * t + 1)))

    # unit-interval integrals J_j(zeta) = int_{-1}^{1} G(u) / (u - zeta)^{j+1} du

    def _unit_integral_scalar(self, d: Dip, zeta: complex, j: int) -> complex:
        dist = _distance_to_unit_interval(zeta)
        if dist > 0.25:
            G = d.log_modulus_unit(_GL_NODES)
            return complex(np.sum(_GL_WEIGHTS * G / (_GL_NODES - zeta) ** (j + 1)))
        if zeta.imag == 0 and -1 < zeta.real < 1:
            if j > 0:
                raise SingularPoint("boundary derivatives of an outer factor inside a dip support")
            return self._unit_pv(d, np.array([zeta.real]))[0]
        inside = -1 < zeta.real < 1
        pts = [zeta.real] if inside else None

        def part(fn):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", _spi.IntegrationWarning)
                val, err = _spi.quad(fn, -1.0, 1.0, points=pts, limit=400, epsabs=1e-15, epsrel=self.quad_tol)
            return val, err

        if j == 0 and inside:
            # subtract the tangent line of G at Re zeta so the integrand stays
            # smooth as Im zeta -> 0; its integral is added back in closed form
            x = zeta.real
            Gx = float(d.log_modulus_unit(np.array([x]))[0])
            dGx = float(d.log_modulus_unit_deriv(np.array([x]))[0])
            Lg = np.log(1 - zeta) - np.log(-1 - zeta)
            log_term = Gx * Lg + dGx * (2 + 1j * zeta.imag * Lg)

            def integrand(u):
                return (float(d.log_modulus_unit(np.array([u]))[0]) - Gx - dGx * (u - x)) / (u - zeta)

        else:
            log_term = 0j

            def integrand(u):
                return complex(d.log_modulus_unit(np.array([u]))[0]) / (u - zeta) ** (j + 1)

        re, e1 = part(lambda u: integrand(u).real)
        im, e2 = part(lambda u: integrand(u).imag)
        value = complex(re, im) + log_term
        err = math.hypot(e1, e2)
        if err > max(1e-10, 1e-8 * abs(value)):
            raise QuadratureFailure(f"outer-factor integral error {err:.3g} at zeta={zeta}", value, err)
        return value

    def _unit_pv(self, d: Dip, tau: np.ndarray) -> np.ndarray:
        """Boundary limit from above of int G(u)/(u - tau) du for real tau, vectorised."""
        tau = np.asarray(tau, dtype=float)
        G = d.log_modulus_unit(_GL_NODES)
        out = np.empty(tau.shape, dtype=complex)
        inside = np.abs(tau) < 1
        if np.any(~inside):
            to = tau[~inside]
            out[~inside] = (_GL_WEIGHTS[None, :] * G[None, :] / (_GL_NODES[None, :] - to[:, None])).sum(axis=1)
        if np.any(inside):
            ti = tau[inside]
            Gt = d.log_modulus_unit(ti)
            dG = d.log_modulus_unit_deriv(ti)
            diff = _GL_NODES[None, :] - ti[:, None]
            safe = np.where(diff == 0, 1.0, diff)
            quot = np.where(diff == 0, dG[:, None], (G[None, :] - Gt[:, None]) / safe)
            pv = (_GL_WEIGHTS[None, :] * quot).sum(axis=1) + Gt * np.log((1 - ti) / (1 + ti))
            # Plemelj jump for the limit from the upper half plane
            out[inside] = pv + 1j * np.pi * Gt
        return out

    def _log_float(self, z) -> complex:
        total = 0j
        for d, K in zip(self.dips, self._const):
            c, w = float(d.center), float(d.width)
            zeta = (complex(z) - c) / w
            total += self._unit_integral_scalar(d, zeta, 0) - K
        return total / (1j * np.pi)

    def log_on_line(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        total = np.zeros(t.shape, dtype=complex)
        for d, K in zip(self.dips, self._const):
            c, w = float(d.center), float(d.width)
            for lo in range(0, t.size, 256):
                chunk = t[lo : lo + 256]
                total[lo : lo + 256] += self._unit_pv(d, (chunk - c) / w) - K
        return total / (1j * np.pi)

    def _mp_unit_integral(self, F: MpField, d: Dip, zeta, j: int):
        ctx = F.ctx
        s = F.real(d.depth)

        def G(u):
            if abs(u) >= 1:
                return ctx.mpf(0)
            return ctx.log(1 - s * ctx.exp(-1 / (1 - u * u)))

        pts = [-1, 1]
        if -1 < ctx.re(zeta) < 1:
            pts = [-1, ctx.re(zeta), 1]
        return ctx.quad(lambda u: G(u) / (u - zeta) ** (j + 1), pts)

    def _mp_constant(self, F: MpField, d: Dip):
        ctx = F.ctx
        s = F.real(d.depth)
        c, w = F.real(d.center), F.real(d.width)

        def fn(u):
            if abs(u) >= 1:
                return ctx.mpf(0)
            t = c + w * u
            return ctx.log(1 - s * ctx.exp(-1 / (1 - u * u))) * t / (t * t + 1)

        return w * ctx.quad(fn, [-1, 0, 1])

    def _log_derivs(self, w, J: int, F):
        """L(w) and L^{(j)}(w), j = 1..J."""
        if isinstance(F, ExactField):
            raise TypeError("outer factors have no exact jets")
        values = [0] * (J + 1)
        for d, K in zip(self.dips, self._const):
            if isinstance(F, MpField):
                c, wd = F.real(d.center), F.real(d.width)
                zeta = (w - c) / wd
                if F.ctx.im(zeta) == 0 and -1 < F.ctx.re(zeta) < 1:
                    raise SingularPoint("mp outer jets inside a dip support")
                Kmp = self._mp_constant(F, d)
                values[0] = values[0] + self._mp_unit_integral(F, d, zeta, 0) - Kmp
                for j in range(1, J + 1):
                    values[j] = values[j] + math.factorial(j) * self._mp_unit_integral(F, d, zeta, j) / wd**j
            else:
                c, wd = float(d.center), float(d.width)
                zeta = (complex(w) - c) / wd
                values[0] = values[0] + self._unit_integral_scalar(d, zeta, 0) - K
                for j in range(1, J + 1):
                    values[j] = values[j] + math.factorial(j) * self._unit_integral_scalar(d, zeta, j) / wd**j
        scale = 1 / (F.i * F.pi)
        return [v * scale for v in values]

    def value(self, z, F=FLOAT):
        if isinstance(z, np.ndarray):
            out = np.empty(z.shape, dtype=complex)
            flat = z.ravel()
            res = out.ravel()
            for k, zz in enumerate(flat):
                res[k] = self.value(complex(zz), F)
            return res.reshape(z.shape)
        if isinstance(F, FloatField):
            z = complex(z)
            if z.imag == 0:
                return complex(np.exp(self.log_on_line(np.array([z.real]))[0]))
            return complex(np.exp(self._log_float(z)))
        return F.exp(self._log_derivs(z, 0, F)[0])

    def jet(self, w, J: int, F=FLOAT) -> list:
        L = self._log_derivs(w, J, F)
        return jet_exp(F.exp(L[0]), L[1:])

    def record(self) -> dict:
        return {
            "kind": "outer_dip",
            "dips": [
                {"center": str(d.center), "width": str(d.width), "depth": str(d.depth)} for d in self.dips
            ],
        }


def _distance_to_unit_interval(zeta: complex) -> float:
    x = min(max(zeta.real, -1.0), 1.0)
    return abs(zeta - x)


# ---------------------------------------------------------------- product


class UnitBallFunction:
    """A finite product of factors, with b = 1 for an empty list."""

    def __init__(self, factors: Iterable = (), check: bool = True):
        self.factors = tuple(factors)
        if check:
            self._spot_check()

    def __repr__(self):
        return f"UnitBallFunction({list(self.factors)!r})"

    def __eq__(self, other):
        return isinstance(other, UnitBallFunction) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __mul__(self, other: "UnitBallFunction") -> "UnitBallFunction":
        return UnitBallFunction(self.factors + other.factors, check=False)

    @property
    def exact_ok(self) -> bool:
        return all(f.exact_ok for f in self.factors)

    @property
    def is_inner(self) -> bool:
        return not any(isinstance(f, OuterDipFactor) for f in self.factors)

    @property
    def blaschke_factors(self) -> list[BlaschkeFactor]:
        return [f for f in self.factors if isinstance(f, BlaschkeFactor)]

    @property
    def point_masses(self) -> list[PointMassSingularFactor]:
        return [f for f in self.factors if isinstance(f, PointMassSingularFactor)]

    @property
    def dips(self) -> list[Dip]:
        return [d for f in self.factors if isinstance(f, OuterDipFactor) for d in f.dips]

    def rho_support(self) -> list[tuple[float, float]]:
        """Intervals outside which rho vanishes (empty for inner b)."""
        spans = sorted(d.support for d in self.dips)
        merged: list[list[float]] = []
        for lo, hi in spans:
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return [(lo, hi) for lo, hi in merged]

    def _spot_check(self):
        xs = np.linspace(-4, 4, 9)
        ys = np.array([0.25, 1.0, 4.0])
        grid = (xs[:, None] + 1j * ys[None, :]).ravel()
        mod = np.ones(grid.shape)
        for f in self.factors:
            if isinstance(f, OuterDipFactor):
                # Poisson integral of log m is non-positive
                continue
            mod = mod * np.abs(f.value(grid, FLOAT))
        if np.any(mod > 1 + 1e-12):
            raise ValueError("function leaves the unit ball on the check grid")

    def eval(self, z, precision=None):
        F = resolve_field(precision)
        if isinstance(z, np.ndarray):
            z = z.astype(complex)
            if np.any(z.imag < 0):
                raise ValueError("evaluation points must satisfy Im z >= 0")
            on_line = z.imag == 0
            out = np.ones(z.shape, dtype=complex)
            for f in self.factors:
                if isinstance(f, OuterDipFactor):
                    vals = np.empty(z.shape, dtype=complex)
                    if np.any(on_line):
                        vals[on_line] = np.exp(f.log_on_line(z[on_line].real))
                    if np.any(~on_line):
                        vals[~on_line] = f.value(z[~on_line], F)
                    out = out * vals
                else:
                    out = out * f.value(z, F)
            return out
        z = F.coerce(z)
        if _imag(z) < 0:
            raise ValueError("evaluation points must satisfy Im z >= 0")
        out = F.coerce(1)
        for f in self.factors:
            out = out * f.value(z, F)
        return out

    __call__ = eval

    def modulus_on_line(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        for f in self.factors:
            out = out * f.modulus_on_line(t)
        return out

    def derivative_jet(self, w, J: int, precision=None) -> DerivativeJet:
        F = resolve_field(precision)
        if isinstance(F, ExactField) and not self.exact_ok:
            raise TypeError("exact jets need Blaschke-only data with zero phases")
        w = F.coerce(w)
        if _imag(w) < 0:
            raise ValueError("jets are taken at points with Im w >= 0")
        values = [F.coerce(1)] + [F.coerce(0)] * J
        for f in self.factors:
            values = jet_product(values, f.jet(w, J, F))
        return DerivativeJet(w, tuple(values), F)

    def records(self) -> list[dict]:
        return [f.record() for f in self.factors]


def _imag(z):
    if isinstance(z, GaussianRational):
        return z.im
    return z.imag


# ---------------------------------------------------------------- module API


def eval_b(b: UnitBallFunction, z, precision=None):
    return b.eval(z, precision)


def derivative_jet(b: UnitBallFunction, w, J: int, precision=None) -> DerivativeJet:
    return b.derivative_jet(w, J, precision)


def taylor_coeffs(b: UnitBallFunction, x0, J: int, precision=None) -> list:
    return b.derivative_jet(x0, J, precision).taylor_coeffs()


def rho(b: UnitBallFunction, t):
    """rho(t) = 1 - |b(t)|^2 on the real line."""
    m = b.modulus_on_line(t)
    out = 1.0 - m * m
    if np.ndim(out) == 0:
        return float(out)
    return out


def _neville(ts: Sequence[float], ys: Sequence[complex]) -> complex:
    """Value at t = 0 of the interpolating polynomial through (ts, ys)."""
    p = list(ys)
    n = len(ts)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (ts[i + k] * p[i] - ts[i] * p[i + 1]) / (ts[i + k] - ts[i])
    return p[0]


@dataclass(frozen=True)
class Extrapolation:
    jet: DerivativeJet
    error_estimate: float
    history: tuple = field(default=())


def radial_jet_extrapolate(
    b: UnitBallFunction,
    x0,
    J: int,
    t_schedule: Sequence[float] | None = None,
    degree: int = 6,
    precision=None,
) -> Extrapolation:
    """Radial limit of the jet at x0 + i t as t -> 0+.

    Jets along the schedule are extrapolated to t = 0 with polynomial
    (Richardson-Neville) extrapolation over a sliding window of
    ``degree + 1`` points; the error estimate is the change between the last
    two windows.
    """
    if t_schedule is None:
        t_schedule = [2.0**-k for k in range(1, 13)]
    ts = [float(t) for t in t_schedule]
    if any(b2 >= a for a, b2 in zip(ts, ts[1:])):
        raise ValueError("t_schedule must be strictly decreasing")
    F = resolve_field(precision)
    if isinstance(F, ExactField):
        F = FLOAT
    x0f = float(as_fraction(x0)) if isinstance(x0, (str, Fraction)) else float(x0)
    jets = [b.derivative_jet(complex(x0f, t), J, F).to_complex() for t in ts]
    width = min(degree + 1, len(ts))
    estimates = []
    for end in range(width, len(ts) + 1):
        window = slice(end - width, end)
        estimates.append([_neville(ts[window], [jt[j] for jt in jets[window]]) for j in range(J + 1)])
    last = estimates[-1]
    if len(estimates) >= 2:
        prev = estimates[-2]
        err = max(abs(a - c) for a, c in zip(last, prev))
    else:
        err = float("inf")
    diffs = [max(abs(a - c) for a, c in zip(e1, e0)) for e0, e1 in zip(estimates, estimates[1:])]
    scale = max(1.0, max(abs(v) for v in last))
    if len(diffs) >= 3 and diffs[-1] > diffs[-2] > diffs[-3] and err > 1e-6 * scale:
        raise NotConverging(f"radial extrapolation diverging at x0={x0f}: changes {diffs[-3:]}")
    return Extrapolation(DerivativeJet(complex(x0f, 0.0), tuple(last), FLOAT), err, tuple(diffs))


# ---------------------------------------------------------------- description format


def _parse_complex(value) -> GaussianRational:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return GaussianRational(as_fraction(str(value[0])), as_fraction(str(value[1])))
    raise ValueError(f"complex numbers are [re, im] pairs, got {value!r}")


def from_description(records: Sequence[dict]) -> UnitBallFunction:
    """Build b from factor records.

    Each record has ``kind`` in {blaschke, point_mass, exp_infinity,
    outer_dip, phase}; numbers are decimal or ``"p/q"`` strings and complex
    numbers are ``[re, im]`` pairs.
    """
    factors = []
    for rec in records:
        kind = rec.get("kind")
        if kind == "blaschke":
            factors.append(BlaschkeFactor(_parse_complex(rec["zero"]), as_fraction(str(rec.get("phase", "0")))))
        elif kind == "point_mass":
            factors.append(PointMassSingularFactor(as_fraction(str(rec["location"])), as_fraction(str(rec["mass"]))))
        elif kind == "exp_infinity":
            factors.append(SingularAtInfinityFactor(as_fraction(str(rec["a"]))))
        elif kind == "outer_dip":
            dips = [
                Dip(as_fraction(str(d["center"])), as_fraction(str(d["width"])), as_fraction(str(d["depth"])))
                for d in rec["dips"]
            ]
            factors.append(OuterDipFactor(dips))
        elif kind == "phase":
            factors.append(PhaseFactor(as_fraction(str(rec["alpha"]))))
        else:
            raise ValueError(f"unknown factor kind {kind!r}")
    return UnitBallFunction(factors)
