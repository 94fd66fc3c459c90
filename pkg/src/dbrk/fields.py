"""Number systems a computation can run in.

Three are supported: double precision complex (``FloatField``), mpmath
complex at a chosen bit width (``MpField``) and exact Gaussian rationals
(``ExactField``). Code written against a field only uses ``+ - * /``,
``.conjugate()`` and the helpers below, so the same formulas serve all three.
"""

from __future__ import annotations

import cmath
import os
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .gaussian import GaussianRational, as_fraction

DEFAULT_PRECISION_BITS = 256


def default_precision_bits() -> int:
    raw = os.environ.get("DBRK_PRECISION_BITS")
    if raw is None:
        return DEFAULT_PRECISION_BITS
    bits = int(raw)
    if bits < 53:
        raise ValueError("DBRK_PRECISION_BITS must be at least 53")
    return bits


def exact_number(z) -> GaussianRational:
    """Convert ints, Fractions, rational strings, [re, im] pairs and complex exactly."""
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, complex):
        return GaussianRational(Fraction(z.real), Fraction(z.imag))
    if isinstance(z, float):
        return GaussianRational(Fraction(z))
    if isinstance(z, (tuple, list)):
        re, im = z
        return GaussianRational(as_fraction(re), as_fraction(im))
    if hasattr(z, "real") and hasattr(z, "imag") and not isinstance(z, (int, Fraction)):
        return GaussianRational(Fraction(float(z.real)), Fraction(float(z.imag)))
    return GaussianRational(as_fraction(z))


class FloatField:
    name = "float"
    exact = False
    bits = 53

    def __init__(self):
        self.i = 1j

    def coerce(self, z):
        if isinstance(z, np.ndarray):
            return z.astype(complex)
        if isinstance(z, GaussianRational):
            return complex(z)
        if isinstance(z, (tuple, list)):
            return complex(float(as_fraction(z[0])), float(as_fraction(z[1])))
        if isinstance(z, (Fraction, str)):
            return complex(float(as_fraction(z)))
        return complex(z)

    def real(self, x) -> float:
        return float(as_fraction(x)) if isinstance(x, (Fraction, str)) else float(x)

    def exp(self, z):
        if isinstance(z, np.ndarray):
            return np.exp(z)
        return cmath.exp(z)

    @property
    def pi(self) -> float:
        return np.pi

    def to_complex(self, x) -> complex:
        return complex(x)

    def __repr__(self):
        return "FloatField()"


class MpField:
    name = "mp"
    exact = False

    def __init__(self, bits: int | None = None):
        self.bits = int(bits or default_precision_bits())
        self.ctx = mpmath.MPContext()
        self.ctx.prec = self.bits
        self.i = self.ctx.mpc(0, 1)

    def _mpf(self, x):
        if isinstance(x, (Fraction, str)):
            x = as_fraction(x)
            return self.ctx.mpf(x.numerator) / x.denominator
        if isinstance(x, int):
            return self.ctx.mpf(x)
        return self.ctx.mpf(x)

    def real(self, x):
        return self._mpf(x)

    def coerce(self, z):
        if isinstance(z, GaussianRational):
            return self.ctx.mpc(self._mpf(z.re), self._mpf(z.im))
        if isinstance(z, (tuple, list)):
            return self.ctx.mpc(self._mpf(z[0]), self._mpf(z[1]))
        if isinstance(z, (Fraction, str, int)):
            return self.ctx.mpc(self._mpf(z))
        return self.ctx.mpc(z)

    def exp(self, z):
        return self.ctx.exp(z)

    @property
    def pi(self):
        return self.ctx.pi

    def to_complex(self, x) -> complex:
        return complex(x)

    def __repr__(self):
        return f"MpField(bits={self.bits})"


class ExactField:
    name = "exact"
    exact = True
    bits = None

    def __init__(self):
        self.i = GaussianRational(0, 1)

    def coerce(self, z) -> GaussianRational:
        return exact_number(z)

    def real(self, x) -> Fraction:
        return as_fraction(x)

    def exp(self, z):
        raise TypeError("exponentials are not available in exact Q(i) arithmetic")

    @property
    def pi(self):
        raise TypeError("pi is not a Gaussian rational")

    def to_complex(self, x) -> complex:
        return complex(x)

    def __repr__(self):
        return "ExactField()"


FLOAT = FloatField()
EXACT = ExactField()


@lru_cache(maxsize=16)
def mp_field(bits: int) -> MpField:
    return MpField(bits)


def resolve_field(precision=None):
    """Map a precision setting to a field.

    ``None`` or ``"float"`` gives doubles, ``"exact"`` gives Q(i), an integer
    gives mpmath at that many bits and ``"mp"`` uses DBRK_PRECISION_BITS.
    """
    if precision is None or precision == "float":
        return FLOAT
    if precision == "exact":
        return EXACT
    if precision == "mp":
        return mp_field(default_precision_bits())
    if isinstance(precision, (FloatField, MpField, ExactField)):
        return precision
    if isinstance(precision, int):
        return FLOAT if precision <= 53 else mp_field(precision)
    raise ValueError(f"unknown precision setting {precision!r}")
