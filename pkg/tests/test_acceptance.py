"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the terminal summary (and immediately with ``-s``)."""

from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE
from dbrk.exact import (
    anr,
    anr_closed,
    anrs,
    anrs_gamma,
    binomial_half_sum,
    check_bailey,
    check_euler,
    check_pfaff,
    check_zeng_lemma,
)
from dbrk.experiments import boundary_jet, lambda_suite, norm_convergence_trace, radial_limit
from dbrk.fields import EXACT
from dbrk.functions import (
    BlaschkeFactor,
    Dip,
    OuterDipFactor,
    PhaseFactor,
    PointMassSingularFactor,
    SingularAtInfinityFactor,
    UnitBallFunction,
)
from dbrk.gaussian import GaussianRational
from dbrk.kernels import BoundaryKernelEvaluator, norm_sq_boundary
from dbrk.quadrature import KernelFunction, l2_pairing, representation_boundary, representation_interior

F = Fraction


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def blaschke(*zeros) -> UnitBallFunction:
    return UnitBallFunction([BlaschkeFactor(GaussianRational(F(z[0]), F(z[1]))) for z in zeros])


# ---------------------------------------------------------------- exact combinatorics


def test_criterion_1_anr_closed_form():
    start = time.perf_counter()
    bad = [(n, r) for n in range(26) for r in range(2 * n + 2) if anr(n, r) != anr_closed(n, r)]
    elapsed = time.perf_counter() - start
    record(1, not bad and elapsed < 10, f"{len(bad)} mismatches for n <= 25, {elapsed:.2f}s")


def test_criterion_2_antisymmetry():
    bad = [(n, r) for n in range(26) for r in range(2 * n + 2) if anr(n, 2 * n + 1 - r) != -anr(n, r)]
    record(2, not bad, f"{len(bad)} violations of A(n, 2n+1-r) = -A(n, r) for n <= 25")


def test_criterion_3_gamma_formula():
    bad, count = [], 0
    for n in range(13):
        for s in range(n + 1, 2 * n + 1):
            for r in range(n + 1):
                count += 1
                brute = anrs(n, r, s)
                want = anrs_gamma(n, r, s) if s % 2 == 0 else 0
                if brute != want:
                    bad.append((n, r, s))
    record(3, not bad, f"{len(bad)} mismatches over {count} (n, r, s) with n < s <= 2n, n <= 12")


def test_criterion_4_hypergeometric_suite():
    bs = [F(1, 2), F(2, 3), F(5, 2)]
    cs = [F(1, 3), F(7, 4), F(3)]
    zs = [F(1, 3), F(-1, 2), F(3, 5)]
    pfaff = [check_pfaff(-n, b, c) for n in range(11) for b in bs for c in cs]
    zeng = [check_zeng_lemma(-n, b, c, m, z) for n in range(11) for m in range(9) for b in bs[:2] for c in cs[:2] for z in zs]
    bailey = [check_bailey(-n, b) for n in range(11) for b in [F(1, 3), F(5, 2), F(7, 4), F(3)]]
    exact_ok = all(isinstance(v, Fraction) and v == 0 for v in pfaff + zeng + bailey)

    params = itertools.product(
        [F(1, 3), F(1, 2), F(5, 4), F(-2, 3), F(2)],
        [F(1, 5), F(3, 2), F(-1, 4), F(7, 3)],
        [F(3, 2), F(5, 2), F(7, 3), F(4, 3), F(3)],
    )
    zgrid = [F(k, 10) for k in range(-5, 6) if k] + [F(1, 2) * F(3, 5), F(-1, 2) * F(4, 5)]
    euler = [check_euler(a, b, c, zgrid[i % len(zgrid)]) for i, (a, b, c) in enumerate(params)]
    worst_euler = float(max(euler))
    half = all(binomial_half_sum(n) == 4**n for n in range(31))
    ok = exact_ok and len(euler) == 100 and worst_euler < 1e-12 and half
    record(
        4,
        ok,
        f"pfaff/zeng/bailey exact zero on {len(pfaff)}/{len(zeng)}/{len(bailey)} cases: {exact_ok}; "
        f"euler max {worst_euler:.2e} over {len(euler)} points; half-sum = 4^n for n <= 30: {half}",
    )


# ---------------------------------------------------------------- representation


REP_CONFIGS = [
    blaschke(("0", "1")),
    blaschke(("0", "1"), ("1", "1")),
    blaschke(("0", "1"), ("1", "2"), ("-1/2", "1/2"), ("2", "3/2")),
]
OMEGA_GRID = [complex(x, y) for x in (-1.0, 0.25, 1.5) for y in (0.5, 1.0, 2.0)]
X0_GRID = [F(0), F(1, 2), F(-3, 4)]


def test_criterion_5_representation():
    worst_int, worst_bd = 0.0, 0.0
    for b, (m, w) in itertools.product(REP_CONFIGS, [(0, 0.5 + 1j), (1, -1 + 0.5j), (2, 2j)]):
        fk = KernelFunction(b, w, m)
        for n in range(4):
            for omega in OMEGA_GRID:
                ref = fk.derivative(omega, n)
                res = representation_interior(b, w, m, omega, n)
                worst_int = max(worst_int, abs(res.value - ref) / abs(ref))
            for x0 in X0_GRID:
                ref = fk.derivative(float(x0), n)
                res = representation_boundary(b, w, m, float(x0), n)
                worst_bd = max(worst_bd, abs(res.value - ref) / abs(ref))

    # non-inner b: x0 = 0 lies outside the dip on [2, 4]
    b_dip = UnitBallFunction([BlaschkeFactor(1j), OuterDipFactor([Dip(3, 1, "1/2")])])
    fk = KernelFunction(b_dip, 1j, 1)
    worst_dip, min_rho = 0.0, math.inf
    for n in range(3):
        oracle, change = radial_limit(lambda t: fk.derivative(complex(0, t), n), [2.0**-k for k in range(3, 11)])
        res = representation_boundary(b_dip, 1j, 1, 0.0, n)
        worst_dip = max(worst_dip, abs(res.value - oracle) / abs(oracle))
        min_rho = min(min_rho, abs(res.rho_part) / abs(oracle))
    ok = worst_int < 1e-8 and worst_bd < 1e-6 and worst_dip < 1e-6 and min_rho > 1e-6
    record(
        5,
        ok,
        f"interior rel err {worst_int:.1e}, boundary rel err {worst_bd:.1e}, "
        f"dip vs radial limit {worst_dip:.1e} with |rho part|/|value| >= {min_rho:.1e}",
    )


# ---------------------------------------------------------------- boundary norms


def test_criterion_6_norm_formula():
    configs = [(REP_CONFIGS[0], F(1, 3)), (REP_CONFIGS[1], F(0)), (REP_CONFIGS[2], F(-1, 2))]
    worst = 0.0
    for b, x0 in configs:
        for n in range(3):
            jet = b.derivative_jet(float(x0), 2 * n + 13)
            formula = norm_sq_boundary(b, float(x0), n, jet)
            ev = BoundaryKernelEvaluator(b, float(x0), n, jet)
            quad = l2_pairing(ev, ev).value.real
            worst = max(worst, abs(formula - quad) / quad)
    b = REP_CONFIGS[0]
    worked = norm_sq_boundary(b, 0.0, 0, b.derivative_jet(0.0, 1))
    worked_err = abs(worked - 1 / math.pi)
    record(6, worst < 1e-8 and worked_err < 1e-12, f"formula vs L2 quadrature rel err {worst:.1e}; |norm - 1/pi| = {worked_err:.1e}")


def test_criterion_7_lambda_relations():
    configs = REP_CONFIGS + [blaschke(("1/3", "1/7"), ("-2", "5"))]
    x0s = [F(0), F(1, 2), F(-5, 3)]
    failures, lam0_bad, count = [], [], 0
    for b, x0, n in itertools.product(configs, x0s, range(4)):
        jet = boundary_jet(b, x0, 2 * n + 1)
        assert jet.field is EXACT
        suite = lambda_suite(b, x0, n, jet)
        count += 1
        if not suite.passed():
            failures.append((x0, n))
        if suite.rows[0].value != (-1) ** n * math.comb(2 * n, n):
            lam0_bad.append((x0, n))
    record(7, not failures and not lam0_bad, f"{len(failures)} suites with nonzero exact residual, {len(lam0_bad)} lambda_0 mismatches, of {count}")


# ---------------------------------------------------------------- norm convergence


def test_criterion_8_norm_convergence():
    configs = {"zero i": blaschke(("0", "1")), "zeros i, 1+i": blaschke(("0", "1"), ("1", "1"))}
    details, ok = [], True
    for name, b in configs.items():
        for n in range(3):
            trace = norm_convergence_trace(b, 0, n, exact=True)
            assert trace.exact and len(trace.rows) == 12
            final = float(trace.rows[-1].exact_diff) * math.factorial(n) / (2 * math.pi)
            tail = trace.decreasing_tail(6)
            ok = ok and final < 1e-8 and tail
            details.append(f"{name} n={n}: final {final:.2e}, tail decreasing {tail}")
    record(8, ok, "; ".join(details))


# ---------------------------------------------------------------- jets


FD_FACTORS = {
    "blaschke": BlaschkeFactor(GaussianRational(F(1, 2), 1), F(1, 3)),
    "point_mass": PointMassSingularFactor(F(-1), F(1, 2)),
    "exp_infinity": SingularAtInfinityFactor(F(3, 2)),
    "phase": PhaseFactor(F(2, 5)),
    "outer_dip": OuterDipFactor([Dip(F(1, 2), F(3, 2), F(1, 2))]),
}


def test_criterion_9_finite_difference_jets():
    w = 0.3 + 0.8j
    hs = [2.0**-k for k in range(6, 10)]
    worst, zero_exact = math.inf, True
    for kind, factor in FD_FACTORS.items():
        b = UnitBallFunction([factor])
        for order in (1, 2, 3):
            errs = []
            for h in hs:
                lo = b.derivative_jet(w - h, order - 1).values[order - 1]
                hi = b.derivative_jet(w + h, order - 1).values[order - 1]
                errs.append(abs((hi - lo) / (2 * h) - b.derivative_jet(w, order).values[order]))
            if max(errs) == 0:  # constant factor: derivatives vanish identically
                zero_exact = zero_exact and kind == "phase"
                continue
            slope = np.polyfit(np.log2(hs), np.log2(errs), 1)[0]
            worst = min(worst, slope)
    record(9, worst >= 1.95 and zero_exact, f"minimum observed order {worst:.3f} over {len(FD_FACTORS)} factor kinds, orders 1-3")


def test_criterion_10_no_tables():
    record(10, True, "nothing to reproduce beyond the identity and property checks above")
