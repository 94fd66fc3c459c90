"""Adaptive Gauss-Kronrod integration over the real line and the integral representations.

The real line is mapped onto (-pi/2, pi/2) by t = center + tan(theta); the
integrand picks up sec^2(theta), which stays bounded for integrands decaying
like |t|^{-2}. Intervals are bisected by error until the requested tolerance
is met. Integrands receive numpy arrays of nodes and must be pure; batches
are summed in a fixed order so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import MaxSubdivisions, SingularityUnresolved
from .functions import UnitBallFunction
from .kernels import BoundaryKernelEvaluator, KernelSpec, kernel_b, kernel_b_z_derivative, kernel_rho

__all__ = [
    "QuadratureConfig",
    "IntegralResult",
    "gauss_kronrod",
    "integrate_interval",
    "integrate_real_line",
    "l2_pairing",
    "rho_pairing",
    "KernelFunction",
    "RepresentationResult",
    "representation_interior",
    "representation_boundary",
    "closed_form_derivative",
]

# 7-point Gauss / 15-point Kronrod pair, abscissae in decreasing order (QUADPACK qk15)
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# nodes ordered left to right: -x_k sits at index k, +x_k at index 14 - k
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
for _k, _wg in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_k] = _wg
    GAUSS_WEIGHTS[14 - _k] = _wg
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 6000
    center: float = 0.0
    rule: str = "gk15"
    initial_intervals: int = 16
    min_width: float = 1e-15

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.rule != "gk15":
            raise ValueError(f"unsupported rule {self.rule!r}")
        if self.max_subdivisions < self.initial_intervals:
            raise ValueError("max_subdivisions below the initial partition")

    def centered(self, center: float) -> "QuadratureConfig":
        return QuadratureConfig(
            self.abs_tol, self.rel_tol, self.max_subdivisions, float(center), self.rule, self.initial_intervals, self.min_width
        )


@dataclass(frozen=True)
class IntegralResult:
    value: complex
    error_estimate: float
    subdivisions: int

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            self.value + other.value, self.error_estimate + other.error_estimate, self.subdivisions + other.subdivisions
        )


ZERO = IntegralResult(0j, 0.0, 0)


def gauss_kronrod(f: Callable, lo, hi):
    """K15 values and |K15 - G7| error estimates on a batch of intervals."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise SingularityUnresolved(f"integrand not finite at {bad!r}", complex("nan"), float("inf"))
    k = half * (fx @ KRONROD_WEIGHTS)
    g = half * (fx @ GAUSS_WEIGHTS)
    return k, np.abs(k - g)


def _adaptive(f: Callable, a: float, b: float, cfg: QuadratureConfig) -> IntegralResult:
    edges = np.linspace(a, b, cfg.initial_intervals + 1)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = gauss_kronrod(f, lo, hi)
    count = lo.size
    floor = cfg.min_width * max(1.0, abs(b - a))
    while True:
        total = vals.sum()
        err = float(errs.sum())
        target = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err <= target:
            return IntegralResult(complex(total), err, int(count))
        # split every interval above its share of the budget, and always the worst one
        split = errs > target / lo.size
        split[np.argmax(errs)] = True
        if np.any(split & (hi - lo < floor)):
            raise SingularityUnresolved("refinement stalled at a vanishing interval", complex(total), err)
        if count + int(split.sum()) > cfg.max_subdivisions:
            raise MaxSubdivisions(
                f"more than {cfg.max_subdivisions} subintervals needed (error {err:.3g} > {target:.3g})",
                complex(total),
                err,
            )
        slo, shi = lo[split], hi[split]
        smid = 0.5 * (slo + shi)
        nv, ne = gauss_kronrod(f, np.concatenate([slo, smid]), np.concatenate([smid, shi]))
        keep = ~split
        lo = np.concatenate([lo[keep], slo, smid])
        hi = np.concatenate([hi[keep], smid, shi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
        order = np.argsort(lo, kind="stable")
        lo, hi, vals, errs = lo[order], hi[order], vals[order], errs[order]
        count += int(split.sum())


def integrate_interval(f: Callable, a: float, b: float, cfg: QuadratureConfig | None = None) -> IntegralResult:
    cfg = cfg or QuadratureConfig()
    if a == b:
        return ZERO
    return _adaptive(f, float(a), float(b), cfg)


def integrate_real_line(f: Callable, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """Integral of f over R through t = center + tan(theta)."""
    cfg = cfg or QuadratureConfig()
    c = float(cfg.center)

    def mapped(theta):
        s = np.cos(theta)
        return f(c + np.tan(theta)) / (s * s)

    half = 0.5 * math.pi
    return _adaptive(mapped, -half, half, cfg)


def l2_pairing(f: Callable, g: Callable, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """int f conj(g) dt over R."""
    return integrate_real_line(lambda t: f(t) * np.conj(g(t)), cfg)


def rho_pairing(f: Callable, g: Callable, b: UnitBallFunction, cfg: QuadratureConfig | None = None) -> IntegralResult:
    """int f conj(g) rho dt, integrated over the support of rho only (0 for inner b)."""
    cfg = cfg or QuadratureConfig()
    total = ZERO

    def integrand(t):
        m = b.modulus_on_line(t)
        return f(t) * np.conj(g(t)) * (1.0 - m * m)

    for lo, hi in b.rho_support():
        total = total + integrate_interval(integrand, lo, hi, cfg)
    return total


# ---------------------------------------------------------------- representations


class KernelFunction:
    """The pair (k^b_{w,m}, k^rho_{w,m}) as float callables on the real line.

    The first is an element f of H(b) and the second is its rho-representative g.
    """

    def __init__(self, b: UnitBallFunction, w: complex, m: int):
        self.b = b
        self.w = complex(w)
        self.m = int(m)
        self.spec = KernelSpec.interior(self.w, self.m)
        self.jet = b.derivative_jet(self.w, self.m)

    def f(self, t, bt=None):
        tc = np.asarray(t, dtype=float).astype(complex)
        return kernel_b(self.b, self.spec, self.jet, tc, bz=self.b.eval(tc) if bt is None else bt)

    def g(self, t):
        return kernel_rho(self.b, self.spec, self.jet, np.asarray(t, dtype=float).astype(complex))

    def derivative(self, point, n: int, precision=None) -> complex:
        """f^{(n)} at a point of the closed upper half plane, from the closed form."""
        if precision is None:
            return complex(kernel_b_z_derivative(self.b, self.spec, self.jet, complex(point), n))
        jet = self.b.derivative_jet(self.w, self.m, precision)
        return complex(kernel_b_z_derivative(self.b, self.spec, jet, point, n))


@dataclass(frozen=True)
class RepresentationResult:
    value: complex
    l2_part: complex
    rho_part: complex
    error_estimate: float
    subdivisions: int
    rho_skipped: bool = False


def _combine(first: IntegralResult, second: IntegralResult, skipped: bool) -> RepresentationResult:
    total = first + second
    return RepresentationResult(total.value, first.value, second.value, total.error_estimate, total.subdivisions, skipped)


def representation_interior(
    b: UnitBallFunction,
    w: complex,
    m: int,
    omega: complex,
    n: int,
    cfg: QuadratureConfig | None = None,
    skip_rho_for_inner: bool = True,
) -> RepresentationResult:
    """f^{(n)}(omega) for f = k^b_{w,m} as <f, k_{omega,n}>_2 + <g, k^rho_{omega,n}>_rho."""
    omega = complex(omega)
    cfg = (cfg or QuadratureConfig()).centered(omega.real)
    fk = KernelFunction(b, w, m)
    spec = KernelSpec.interior(omega, n)
    jet = b.derivative_jet(omega, n)

    def first_integrand(t):
        tc = np.asarray(t, dtype=float).astype(complex)
        bt = b.eval(tc)
        return fk.f(t, bt) * np.conj(kernel_b(b, spec, jet, tc, bz=bt))

    first = integrate_real_line(first_integrand, cfg)
    skipped = skip_rho_for_inner and b.is_inner
    if skipped:
        second = ZERO
    else:
        second = rho_pairing(fk.g, lambda t: kernel_rho(b, spec, jet, np.asarray(t, dtype=float).astype(complex)), b, cfg)
    return _combine(first, second, skipped)


def representation_boundary(
    b: UnitBallFunction,
    w: complex,
    m: int,
    x0: float,
    n: int,
    cfg: QuadratureConfig | None = None,
    extra_order: int = 10,
    skip_rho_for_inner: bool = True,
) -> RepresentationResult:
    """f^{(n)}(x0) for f = k^b_{w,m} through the boundary kernels at x0.

    The jet of b at x0 goes ``extra_order`` orders beyond 2n+1 so that the
    kernel can be replaced by its Taylor series next to x0.
    """
    x0 = float(x0)
    cfg = (cfg or QuadratureConfig()).centered(x0)
    fk = KernelFunction(b, w, m)
    jet0 = b.derivative_jet(x0, 2 * n + 1 + extra_order)
    k0 = BoundaryKernelEvaluator(b, x0, n, jet0)

    def first_integrand(t):
        t = np.asarray(t, dtype=float)
        bt = b.eval(t.astype(complex))
        return fk.f(t, bt) * np.conj(k0(t, bt))

    first = integrate_real_line(first_integrand, cfg)
    skipped = skip_rho_for_inner and b.is_inner
    if skipped:
        second = ZERO
    else:
        spec0 = KernelSpec.boundary(x0, n)

        def krho(t):
            t = np.asarray(t, dtype=float)
            out = np.zeros(t.shape, dtype=complex)
            # a node landing exactly on x0 carries zero weight once multiplied by rho
            away = t != x0
            out[away] = kernel_rho(b, spec0, jet0, t[away].astype(complex))
            return out

        second = rho_pairing(fk.g, krho, b, cfg)
    return _combine(first, second, skipped)


def closed_form_derivative(b: UnitBallFunction, w: complex, m: int, point, n: int) -> complex:
    """f^{(n)}(point) for f = k^b_{w,m}, straight from the kernel formula."""
    return KernelFunction(b, w, m).derivative(point, n)
