from __future__ import annotations

import math

import numpy as np
import pytest

from dbrk.errors import MaxSubdivisions
from dbrk.functions import BlaschkeFactor, Dip, OuterDipFactor, UnitBallFunction
from dbrk.kernels import BoundaryKernelEvaluator
from dbrk.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    KernelFunction,
    QuadratureConfig,
    integrate_interval,
    integrate_real_line,
    l2_pairing,
    representation_boundary,
    representation_interior,
    rho_pairing,
)

PI = math.pi
B_I = UnitBallFunction([BlaschkeFactor(1j)])
B_INNER = UnitBallFunction([BlaschkeFactor(1j), BlaschkeFactor(1 + 2j), BlaschkeFactor(-0.5 + 0.5j)])
B_DIP = UnitBallFunction([BlaschkeFactor(1j), OuterDipFactor([Dip(3, 1, "1/2")])])


def test_rule_constants():
    assert NODES.shape == (15,) and np.all(np.diff(NODES) > 0)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.count_nonzero(GAUSS_WEIGHTS) == 7
    # degree of exactness: 13 for G7 nodes, 22 for K15 (checked up to 21 in doubles)
    for d in range(22):
        exact = (1 - (-1) ** (d + 1)) / (d + 1)
        assert KRONROD_WEIGHTS @ NODES**d == pytest.approx(exact, abs=1e-14)
        if d <= 13:
            assert GAUSS_WEIGHTS @ NODES**d == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize(
    "f,exact",
    [
        (lambda t: 1 / (t * t + 1), PI),
        (lambda t: 1 / (t * t + 1) ** 2, PI / 2),
        (lambda t: np.abs(1j / (2 * PI) / (t + 1j)) ** 2 * 4, 1 / PI),  # |k_0|^2 for the zero-i Blaschke factor
    ],
)
def test_closed_form_integrals_with_honest_errors(f, exact):
    res = integrate_real_line(f, QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12))
    err = abs(res.value - exact)
    assert err < 1e-12
    assert err <= 10 * res.error_estimate + 1e-15
    assert res.error_estimate >= 0


def test_error_estimates_track_tolerance():
    f = lambda t: 1 / ((t * t + 1) * (t * t + 4))  # noqa: E731
    exact = PI / 6
    for tol in (1e-4, 1e-7, 1e-10):
        res = integrate_real_line(f, QuadratureConfig(abs_tol=tol, rel_tol=tol))
        assert abs(res.value - exact) <= 10 * res.error_estimate + 1e-15


def test_kernel_norm_by_quadrature():
    ev = BoundaryKernelEvaluator(B_I, 0.0, 0, B_I.derivative_jet(0.0, 12))
    assert l2_pairing(ev, ev).value.real == pytest.approx(1 / PI, rel=1e-12)


def test_cauchy_pairing():
    ki = lambda t: 1j / (2 * PI) / (t + 1j)  # noqa: E731
    k2 = lambda t: 1j / (2 * PI) / (t + 2j)  # noqa: E731
    assert l2_pairing(ki, k2).value == pytest.approx(1 / (6 * PI), rel=1e-12)
    assert l2_pairing(lambda t: 0 * t, k2).value == 0


def test_max_subdivisions_reports_best_estimate():
    f = lambda t: np.sin(200 * t) ** 2 / (t * t + 1)  # noqa: E731
    with pytest.raises(MaxSubdivisions) as info:
        integrate_real_line(f, QuadratureConfig(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=40))
    assert info.value.value is not None and math.isfinite(info.value.error_estimate)


def test_interval_integration():
    assert integrate_interval(np.exp, 0, 1).value == pytest.approx(math.e - 1, abs=1e-14)
    assert integrate_interval(np.exp, 2, 2).value == 0


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(rule="simpson")


def test_rho_pairing():
    ki = lambda t: 1j / (2 * PI) / (t + 1j)  # noqa: E731
    assert rho_pairing(ki, ki, B_INNER).value == 0
    val = rho_pairing(ki, ki, B_DIP).value
    assert val.imag == pytest.approx(0, abs=1e-18)
    assert 0 < val.real < l2_pairing(ki, ki).value.real


@pytest.mark.parametrize("m,n", [(0, 0), (1, 1), (2, 3)])
def test_representation_interior_inner(m, n):
    fk = KernelFunction(B_INNER, 1j, m)
    res = representation_interior(B_INNER, 1j, m, 2j, n)
    ref = fk.derivative(2j, n)
    assert res.rho_skipped and res.rho_part == 0
    assert abs(res.value - ref) < 1e-10 * abs(ref)


def test_representation_skip_switch_does_not_change_inner_results():
    a = representation_interior(B_INNER, 1j, 1, 0.5 + 1j, 1, skip_rho_for_inner=True)
    b = representation_interior(B_INNER, 1j, 1, 0.5 + 1j, 1, skip_rho_for_inner=False)
    assert a.value == b.value and not b.rho_skipped


def test_representation_empty_b_is_zero():
    empty = UnitBallFunction([])
    assert representation_interior(empty, 1j, 0, 2j, 0).value == 0


def test_representation_with_dip():
    fk = KernelFunction(B_DIP, 1j, 1)
    for n in (0, 1):
        res = representation_interior(B_DIP, 1j, 1, 0.3 + 1j, n)
        ref = fk.derivative(0.3 + 1j, n)
        assert abs(res.value - ref) < 1e-6 * abs(ref)
        assert abs(res.rho_part) > 1e-6 * abs(ref)  # the rho term matters here
        bres = representation_boundary(B_DIP, 1j, 1, 0.0, n)
        bref = fk.derivative(0.0, n)
        assert abs(bres.value - bref) < 1e-6 * abs(bref)
        assert abs(bres.rho_part) > 1e-6 * abs(bref)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_representation_boundary_inner(n):
    fk = KernelFunction(B_INNER, 0.5 + 1j, 1)
    res = representation_boundary(B_INNER, 0.5 + 1j, 1, 0.0, n)
    assert abs(res.value - fk.derivative(0.0, n)) < 1e-9 * abs(fk.derivative(0.0, n))


def test_tighter_tolerance_shrinks_error():
    fk = KernelFunction(B_DIP, 1j, 0)
    ref = fk.derivative(0.2 + 0.5j, 1)
    errs = []
    for tol in (1e-3, 1e-6, 1e-10):
        res = representation_interior(B_DIP, 1j, 0, 0.2 + 0.5j, 1, QuadratureConfig(abs_tol=tol, rel_tol=tol))
        errs.append(abs(res.value - ref))
    assert errs[2] <= errs[0] and errs[2] < 1e-9 * abs(ref)
