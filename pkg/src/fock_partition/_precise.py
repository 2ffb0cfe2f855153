"""Exact and extended-precision helpers shared by the series evaluators.

Finite sums that cancel heavily (binomial transforms, Laguerre sums) are
accumulated exactly with :class:`fractions.Fraction`; long infinite series are
accumulated with :mod:`decimal` at :data:`DECIMAL_DIGITS` significant digits.
"""

import decimal
import math
from fractions import Fraction
from numbers import Rational

DECIMAL_DIGITS = 100
# digits reserved on top of double precision when judging cancellation
_GUARD_DIGITS = 20

_CTX = decimal.Context(prec=DECIMAL_DIGITS, Emin=-999999, Emax=999999)


def exact(x):
    """Exact rational value of an int, float or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(x)


# bits kept when a large rational is rounded before conversion
_MANTISSA_BITS = 400


def to_decimal(q):
    q = exact(q)
    num, den = q.numerator, q.denominator
    if max(abs(num).bit_length(), den.bit_length()) <= _MANTISSA_BITS:
        return _CTX.divide(decimal.Decimal(num), decimal.Decimal(den))
    # Converting huge integers to Decimal is quadratic; round to a 400-bit
    # mantissa times a power of two instead (relative error ~1e-120).
    shift = _MANTISSA_BITS - (abs(num).bit_length() - den.bit_length())
    mantissa = (num << shift) // den if shift >= 0 else num // (den << -shift)
    return _CTX.multiply(decimal.Decimal(mantissa), _CTX.power(decimal.Decimal(2), -shift))


def dec_mul(a, b):
    return _CTX.multiply(a, b)


def dec_add(a, b):
    return _CTX.add(a, b)


def dec_int(n):
    return _CTX.create_decimal(n)


def cancellation_ok(largest, total):
    """False when summing terms of size ``largest`` to ``total`` lost too many digits."""
    if largest == 0:
        return True
    if total == 0:
        return False
    ratio = abs(largest) / abs(total)
    return ratio < decimal.Decimal(10) ** (DECIMAL_DIGITS - _GUARD_DIGITS - 16)
