"""Special functions and scalar series identities.

Polynomial evaluations (Laguerre ``L_n`` and the two-variable Hermite
``H_{m,n}``) are carried out in exact rational arithmetic and rounded once, so
the heavy cancellation of the alternating sums at large arguments never
reaches the returned double.  Probability weights live in log space.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.special import betainc
from scipy.stats import binom, nbinom

from ._precise import exact
from .errors import DomainError

MAX_ORDER = 64
SERIES_RTOL = 1e-17


class PolyIndex(NamedTuple):
    m: int
    n: int


def poly_index(idx, bound=MAX_ORDER):
    m, n = idx
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise DomainError(f"polynomial indices must be nonnegative integers, got {idx!r}")
    if m > bound or n > bound:
        raise DomainError(f"polynomial order exceeds bound {bound}: {idx!r}")
    return PolyIndex(int(m), int(n))


def _check_order(n, bound=MAX_ORDER):
    if int(n) != n or n < 0 or n > bound:
        raise DomainError(f"order must be an integer in [0, {bound}], got {n!r}")
    return int(n)


def _check_probability(p, name):
    if not (0.0 < p < 1.0):
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {p!r}")


@dataclass(frozen=True)
class LogWeight:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    log_magnitude: float
    sign: int

    @property
    def value(self):
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    @classmethod
    def from_value(cls, x):
        if x == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)




# --- exact polynomial kernels -------------------------------------------------


def _laguerre_exact(n, x):
    x = exact(x)
    total = Fraction(0)
    power = Fraction(1)
    for l in range(n + 1):
        total += math.comb(n, l) * power / math.factorial(l) * (-1) ** l
        power *= x
    return total


def laguerre_sequence_exact(nmax, x):
    """Exact ``[L_0(x), ..., L_nmax(x)]`` from the three-term recurrence."""
    x = exact(x)
    seq = [Fraction(1)]
    if nmax >= 1:
        seq.append(1 - x)
    for k in range(1, nmax):
        seq.append(((2 * k + 1 - x) * seq[k] - k * seq[k - 1]) / (k + 1))
    return seq[: nmax + 1]


def _cexact(z):
    z = complex(z) if isinstance(z, complex) else z
    if isinstance(z, complex):
        return exact(z.real), exact(z.imag)
    return exact(z), Fraction(0)


def _cmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _cpowers(z, k):
    out = [(Fraction(1), Fraction(0))]
    for _ in range(k):
        out.append(_cmul(out[-1], z))
    return out


def _hermite2_real(m, n, x, y):
    x, y = exact(x), exact(y)
    total = Fraction(0)
    for l in range(min(m, n) + 1):
        coeff = Fraction(
            math.factorial(m) * math.factorial(n),
            math.factorial(l) * math.factorial(m - l) * math.factorial(n - l),
        )
        total += (-1) ** l * coeff * x ** (m - l) * y ** (n - l)
    return total


def _hermite2_exact(m, n, x, y):
    """Exact ``H_{m,n}(x, y)`` as a (real, imag) pair of Fractions."""
    if not isinstance(x, complex) and not isinstance(y, complex):
        return _hermite2_real(m, n, x, y), Fraction(0)
    xs = _cpowers(_cexact(x), m)
    ys = _cpowers(_cexact(y), n)
    re = im = Fraction(0)
    for l in range(min(m, n) + 1):
        coeff = Fraction(
            math.factorial(m) * math.factorial(n),
            math.factorial(l) * math.factorial(m - l) * math.factorial(n - l),
        ) * (-1) ** l
        pr, pi = _cmul(xs[m - l], ys[n - l])
        re += coeff * pr
        im += coeff * pi
    return re, im


def hermite2_diagonal_exact(m, n, x, y, count):
    """Exact real ``[H_{m+l, n+l}(x, y) for l < count]``.

    Walks the diagonal with ``H_{k,j+1} = y H_{k,j} - k H_{k-1,j}`` followed by
    ``H_{k+1,j+1} = x H_{k,j+1} - (j+1) H_{k,j}``.
    """
    x, y = exact(x), exact(y)
    prev = _hermite2_real(m - 1, n, x, y) if m > 0 else Fraction(0)
    cur = _hermite2_real(m, n, x, y)
    out = []
    k, j = m, n
    for _ in range(count):
        out.append(cur)
        right = y * cur - k * prev
        up = x * right - (j + 1) * cur
        prev, cur = right, up
        k, j = k + 1, j + 1
    return out


# --- public polynomial evaluators -----------------------------------------------


def laguerre(n, x):
    """Laguerre polynomial ``L_n(x)`` from its finite power series."""
    n = _check_order(n)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    return float(_laguerre_exact(n, x))


def hermite2(idx, x, y):
    """Two-variable Hermite polynomial ``H_{m,n}(x, y)``.

    Returns a float for real arguments and a complex otherwise.
    """
    m, n = poly_index(idx)
    re, im = _hermite2_exact(m, n, x, y)
    if isinstance(x, complex) or isinstance(y, complex):
        return complex(float(re), float(im))
    return float(re)


def _scaled_residual(approx, closed):
    return abs(approx - closed) / max(1.0, abs(closed))


def _partial_sum(terms, cap, rtol=SERIES_RTOL):
    """Sum an iterator of exact terms.

    Stops after ``cap`` terms, or earlier once three consecutive terms are each
    below ``rtol`` times the running sum.
    """
    total = Fraction(0)
    small = 0
    used = 0
    for used, term in enumerate(terms, start=1):
        total += term
        if total != 0 and abs(term) < rtol * abs(total):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
        if used >= cap:
            break
    return total, used


# --- generating-function identities ---------------------------------------------


def laguerre_genfun_closed(z, x):
    return math.exp(z * x / (z - 1.0)) / (1.0 - z)


def laguerre_genfun_residual(z, x, terms):
    """Residual of the Laguerre generating function after ``terms`` terms."""
    if not abs(z) < 1:
        raise DomainError(f"generating function diverges for |z| >= 1, got z={z!r}")
    if terms < 1:
        raise DomainError("terms must be >= 1")
    zq = exact(z)
    seq = laguerre_sequence_exact(terms - 1, x)

    def gen():
        zpow = Fraction(1)
        for lag in seq:
            yield lag * zpow
            zpow *= zq

    total, _ = _partial_sum(gen(), terms)
    return _scaled_residual(float(total), laguerre_genfun_closed(z, x))


def hermite_laguerre_link_residual(n, x, y):
    """``|L_n(xy) - (-1)^n/n! H_{n,n}(x, y)|`` relative to ``max(1, |L_n|)``."""
    n = _check_order(n)
    xy = exact(x) * exact(y)
    lag = _laguerre_exact(n, xy)
    herm, _ = _hermite2_exact(n, n, x, y)
    linked = herm * (-1) ** n / math.factorial(n)
    return float(abs(lag - linked)) / max(1.0, abs(float(lag)))


def shifted_hermite_closed(idx, lam, x, y):
    m, n = poly_index(idx)
    root = math.sqrt(1.0 + lam)
    prefactor = (1.0 + lam) ** (-(n + m) / 2.0 - 1.0) * math.exp(lam * x * y / (1.0 + lam))
    return prefactor * hermite2((m, n), x / root, y / root)


def shifted_hermite_genfun_residual(idx, lam, x, y, terms):
    """Residual of the generating function of ``H_{l+m, l+n}`` summed over ``l``."""
    m, n = poly_index(idx)
    if lam <= -1:
        raise DomainError(f"lam must exceed -1, got {lam!r}")
    if not abs(lam) < 1:
        raise DomainError(f"series is only summed for |lam| < 1, got {lam!r}")
    lq = exact(lam)

    diagonal = hermite2_diagonal_exact(m, n, x, y, terms)

    def gen():
        coeff = Fraction(1)
        for l, herm in enumerate(diagonal):
            yield coeff * herm
            coeff = coeff * lq / (l + 1)

    total, _ = _partial_sum(gen(), terms)
    return _scaled_residual(float(total), shifted_hermite_closed((m, n), lam, x, y))


def gen_negbin_laguerre_closed(n, lam, z):
    return (1.0 + lam) ** (-n - 1) * math.exp(lam * z / (1.0 + lam)) * laguerre(n, z / (1.0 + lam))


def gen_negbin_laguerre_partial(n, lam, z, terms):
    """Partial sum of ``sum_l (n+l)!/(l! n!) (-lam)^l L_{n+l}(z)``."""
    n = _check_order(n)
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"lam must lie in [0, 1), got {lam!r}")
    if terms < 1:
        raise DomainError("terms must be >= 1")
    seq = laguerre_sequence_exact(n + terms - 1, z)
    step = -exact(lam)

    def gen():
        coeff = Fraction(1)
        for l in range(terms):
            yield coeff * seq[n + l]
            coeff = coeff * step * (n + l + 1) / (l + 1)

    total, _ = _partial_sum(gen(), terms)
    return float(total)


def gen_negbin_laguerre_residual(n, lam, z, terms):
    """Residual of the negative binomial theorem generalised to Laguerre weights."""
    partial = gen_negbin_laguerre_partial(n, lam, z, terms)
    return _scaled_residual(partial, gen_negbin_laguerre_closed(n, lam, z))


# --- probability weights -----------------------------------------------------------


def binom_weight(n, l, sigma):
    """Log-space binomial weight ``C(n,l) sigma^l (1-sigma)^(n-l)``."""
    _check_probability(sigma, "sigma")
    if not (0 <= l <= n):
        raise DomainError(f"need 0 <= l <= n, got l={l}, n={n}")
    return LogWeight(float(binom.logpmf(l, n, sigma)), 1)


def negbin_weight(s, m, gamma):
    """Log-space negative binomial weight ``C(m+s,m) gamma^(s+1) (1-gamma)^m``."""
    _check_probability(gamma, "gamma")
    if s < 0 or m < 0:
        raise DomainError(f"need s, m >= 0, got s={s}, m={m}")
    return LogWeight(float(nbinom.logpmf(m, s + 1, gamma)), 1)


def binom_pmf(n, sigma):
    """All binomial weights ``l = 0..n`` as an array."""
    _check_probability(sigma, "sigma")
    return binom.pmf(np.arange(n + 1), n, sigma)


def negbin_pmf(s, gamma, dim):
    """Negative binomial weights for ``m = 0..dim-1``."""
    _check_probability(gamma, "gamma")
    return nbinom.pmf(np.arange(dim), s + 1, gamma)


def negbin_tail(s, gamma, dim):
    """Mass of the negative binomial distribution at levels ``m >= dim``."""
    _check_probability(gamma, "gamma")
    if dim <= 0:
        return 1.0
    return float(betainc(dim, s + 1, 1.0 - gamma))


def cauchy_rearrange_check(a, b, tol=1e-12):
    """Compare the diagonal (Cauchy) and rectangular orderings of a double sum.

    The diagonal ordering runs ``n`` over the full support ``len(a)+len(b)-1``,
    where both orderings enumerate the same set of index pairs.
    """
    a = [float(v) for v in a] or [0.0]
    b = [float(v) for v in b] or [0.0]
    diagonal = []
    for n in range(len(a) + len(b) - 1):
        for l in range(n + 1):
            if n - l < len(a) and l < len(b):
                diagonal.append(a[n - l] * b[l])
    rectangular = [x * y for x in a for y in b]
    lhs = math.fsum(diagonal)
    rhs = math.fsum(rectangular)
    return abs(lhs - rhs) <= tol * max(1.0, abs(rhs))
