from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from dbrk.fields import EXACT, mp_field
from dbrk.functions import (
    BlaschkeFactor,
    Dip,
    OuterDipFactor,
    PhaseFactor,
    PointMassSingularFactor,
    SingularAtInfinityFactor,
    UnitBallFunction,
    from_description,
    jet_exp,
    jet_product,
    radial_jet_extrapolate,
    rho,
)
from dbrk.gaussian import GaussianRational

DIP = Dip(3, 1, Fraction(1, 2))

FACTORS = {
    "blaschke": BlaschkeFactor(GaussianRational(Fraction(1, 2), 1)),
    "blaschke_phase": BlaschkeFactor(1j, Fraction(1, 3)),
    "point_mass": PointMassSingularFactor(Fraction(-1), Fraction(1, 2)),
    "exp_infinity": SingularAtInfinityFactor(Fraction(3, 2)),
    "phase": PhaseFactor(Fraction(2, 5)),
    "outer_dip": OuterDipFactor([DIP]),
}


def _sympy_blaschke_jet(zr, zi, w, J):
    z = sp.symbols("z")
    zk = sp.Rational(zr) + sp.I * sp.Rational(zi)
    f = (z - zk) / (z - sp.conjugate(zk))
    return [sp.nsimplify(sp.expand_complex(sp.diff(f, z, j).subs(z, w))) for j in range(J + 1)]


def test_blaschke_jet_exact_against_sympy():
    b = UnitBallFunction([BlaschkeFactor(GaussianRational(Fraction(1, 2), 1))])
    jet = b.derivative_jet(GaussianRational(Fraction(1, 3)), 5, EXACT)
    ref = _sympy_blaschke_jet("1/2", "1", sp.Rational(1, 3), 5)
    for mine, theirs in zip(jet.values, ref):
        assert mine.re == Fraction(str(sp.re(theirs)))
        assert mine.im == Fraction(str(sp.im(theirs)))


def test_blaschke_at_zero_example():
    # b(z) = (z - i)/(z + i): b(0) = -1, b'(0) = -2i, b''(0) = 4
    b = UnitBallFunction([BlaschkeFactor(1j)])
    jet = b.derivative_jet(GaussianRational(0), 2, EXACT)
    assert list(jet.values) == [-1, GaussianRational(0, -2), 4]


@pytest.mark.parametrize("kind", sorted(FACTORS))
@pytest.mark.parametrize("order", [1, 2, 3])
def test_finite_difference_order(kind, order):
    b = UnitBallFunction([FACTORS[kind]])
    w = 0.3 + 0.8j

    def err(h):
        lo = b.derivative_jet(w - h, order - 1).values[order - 1]
        hi = b.derivative_jet(w + h, order - 1).values[order - 1]
        return abs((hi - lo) / (2 * h) - b.derivative_jet(w, order).values[order])

    e1, e2 = err(2e-2), err(1e-2)
    if e1 < 1e-12:  # derivative identically zero or exactly linear
        assert e2 < 1e-12
        return
    assert math.log2(e1 / e2) >= 1.95


def test_jets_agree_with_values_along_directions():
    b = UnitBallFunction([FACTORS["outer_dip"], FACTORS["blaschke"]])
    w = 1.0 + 0.5j
    jet = b.derivative_jet(w, 6)
    h = 1e-3 * (1 + 1j) / math.sqrt(2)
    approx = sum(jet.values[j] / math.factorial(j) * h**j for j in range(7))
    assert abs(approx - b(w + h)) < 1e-14


def test_leibniz_matches_product_jet():
    f = UnitBallFunction([FACTORS["blaschke"], FACTORS["point_mass"]])
    g = UnitBallFunction([FACTORS["exp_infinity"], FACTORS["outer_dip"]])
    w = -0.2 + 1.1j
    prod = (f * g).derivative_jet(w, 5).values
    leib = jet_product(f.derivative_jet(w, 5).values, g.derivative_jet(w, 5).values)
    assert np.allclose(prod, leib, rtol=1e-13, atol=1e-14)


def test_jet_exp_of_linear_exponent():
    # exp(2z) at 0: derivatives 2^j
    assert jet_exp(1.0, [2.0, 0.0, 0.0, 0.0]) == [1.0, 2.0, 4.0, 8.0, 16.0]


@given(
    st.lists(
        st.tuples(st.fractions(-3, 3, max_denominator=8), st.fractions(Fraction(1, 4), 3, max_denominator=8)),
        min_size=1,
        max_size=4,
    ),
    st.fractions(-2, 2, max_denominator=8),
)
def test_exact_and_float_jets_agree(zeros, x0):
    b = UnitBallFunction([BlaschkeFactor(GaussianRational(re, im)) for re, im in zeros])
    ex = b.derivative_jet(GaussianRational(x0), 4, EXACT).to_complex()
    fl = b.derivative_jet(float(x0), 4).to_complex()
    for a, c in zip(ex, fl):
        assert abs(a - c) <= 1e-12 * max(1.0, abs(a))


def test_mp_and_float_agree_for_every_kind():
    F = mp_field(120)
    w = 0.25 + 0.75j
    for f in FACTORS.values():
        b = UnitBallFunction([f])
        hi = b.derivative_jet(w, 3, F).to_complex()
        lo = b.derivative_jet(w, 3).to_complex()
        assert np.allclose(hi, lo, rtol=1e-11, atol=1e-12)


def test_exact_refuses_inexact_factors():
    with pytest.raises(TypeError):
        UnitBallFunction([FACTORS["outer_dip"]]).derivative_jet(GaussianRational(0), 2, EXACT)
    with pytest.raises(TypeError):
        UnitBallFunction([FACTORS["blaschke_phase"]]).derivative_jet(GaussianRational(0), 2, EXACT)


def test_domain_errors():
    with pytest.raises(ValueError):
        BlaschkeFactor(-1j)
    with pytest.raises(ValueError):
        UnitBallFunction([]).eval(1 - 1j)
    with pytest.raises(ValueError):
        Dip(0, 1, Fraction(3, 2))
    with pytest.raises(ValueError):
        SingularAtInfinityFactor(-1)


def test_empty_product_is_one():
    b = UnitBallFunction([])
    assert b(0.5 + 2j) == 1
    assert b.derivative_jet(GaussianRational(0), 3, EXACT).values == (1, 0, 0, 0)
    assert b.is_inner


def test_modulus_on_the_line():
    b = UnitBallFunction([FACTORS["blaschke"], FACTORS["outer_dip"], FACTORS["exp_infinity"]])
    t = np.linspace(-2, 6, 41)
    m = b.modulus_on_line(t)
    assert np.allclose(np.abs(b.eval(t.astype(complex))), m, atol=1e-13)
    outside = (t <= 2) | (t >= 4)
    assert np.allclose(m[outside], 1.0)
    assert np.all(m[~outside] < 1.0)
    assert m.min() == pytest.approx(1 - 0.5 * math.exp(-1), rel=1e-12)  # bump(0) = 1/e
    assert np.allclose(rho(b, t), 1 - m**2)


def test_outer_values_approach_boundary_values():
    b = UnitBallFunction([FACTORS["outer_dip"]])
    for x in (2.5, 3.0, 3.9, 1.0):
        edge = b.eval(np.array([x + 0j]))[0]
        near = [b(complex(x, y)) for y in (1e-3, 1e-4, 1e-5)]
        diffs = [abs(v - edge) for v in near]
        assert diffs[-1] < 1e-3
        assert diffs[0] > diffs[1] > diffs[2]


def test_outer_factor_inside_unit_disc():
    b = UnitBallFunction([FACTORS["outer_dip"]])
    z = np.array([3 + 0.1j, 3 + 1j, 0 + 1j, 10 + 0.01j])
    assert np.all(np.abs(b.eval(z)) <= 1 + 1e-15)
    # modulus is the exponential of the Poisson integral of log m, which is < 0
    assert np.all(np.abs(b.eval(z)) < 1)


def test_point_mass_modulus():
    f = FACTORS["point_mass"]
    b = UnitBallFunction([f])
    assert abs(b(0.5 + 0j)) == pytest.approx(1.0)
    # |S(t0 + iy)| = exp(-sigma / (pi y))
    y = 0.1
    assert abs(b(complex(-1, y))) == pytest.approx(math.exp(-0.5 / (math.pi * y)), rel=1e-12)


def test_from_description_round_trip():
    b = UnitBallFunction(FACTORS.values())
    again = from_description(b.records())
    assert again == b
    assert again(0.1 + 0.9j) == pytest.approx(b(0.1 + 0.9j))
    with pytest.raises(ValueError):
        from_description([{"kind": "nope"}])
    with pytest.raises(ValueError):
        from_description([{"kind": "blaschke", "zero": "i"}])


def test_radial_extrapolation_recovers_boundary_jet():
    b = UnitBallFunction([BlaschkeFactor(1j), BlaschkeFactor(1 + 1j)])
    ext = radial_jet_extrapolate(b, 0.0, 3)
    exact = b.derivative_jet(GaussianRational(0), 3, EXACT).to_complex()
    assert np.allclose(ext.jet.to_complex(), exact, rtol=1e-7, atol=1e-8)
    assert ext.error_estimate < 1e-6


def test_rho_support_merges():
    b = UnitBallFunction([OuterDipFactor([Dip(0, 1, "1/2"), Dip("1/2", 1, "1/4"), Dip(5, 1, "1/3")])])
    assert b.rho_support() == [(-1.0, 1.5), (4.0, 6.0)]
