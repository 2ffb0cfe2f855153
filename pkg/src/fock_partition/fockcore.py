"""Truncated Fock-space linear algebra and ordered operator functions.

An :class:`OrderedSeries` stands for ``p(x) * exp(rate * x)`` where ``x`` is
``a^dag a`` under normal ordering or ``a a^dag`` under anti-normal ordering.
Its Taylor coefficients ``c_l`` are generated exactly.  Diagonal matrix elements
in the number basis are

* normal:       ``<m| :f: |m>  = sum_{l<=m} c_l m!/(m-l)!``
* anti-normal:  ``<m| (f) |m>  = sum_l c_l (m+l)!/m!``

The normal sum is finite and evaluated exactly; the anti-normal sum is an
infinite series accumulated in extended precision with a ratio-test guard.
"""

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _precise
from ._precise import exact
from .errors import ConvergenceError, DomainError, QuadratureError
from .specfun import hermite2, poly_index

MIN_CUTOFF = 2
MAX_CUTOFF = 4096
ANTINORMAL_RTOL = 1e-16
MAX_SERIES_TERMS = 20000


def check_cutoff(dim):
    if int(dim) != dim or not (MIN_CUTOFF <= dim <= MAX_CUTOFF):
        raise DomainError(f"cutoff must be an integer in [{MIN_CUTOFF}, {MAX_CUTOFF}], got {dim!r}")
    return int(dim)


def check_density_matrix(rho, state=False, tol=1e-12):
    """Validate a square complex matrix; with ``state`` also trace and positivity."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {rho.shape}")
    check_cutoff(rho.shape[0])
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
        raise DomainError("matrix is not Hermitian")
    if state:
        if abs(np.trace(rho).imag) > tol:
            raise DomainError("trace is not real")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise DomainError("matrix is not positive semidefinite")
    return rho


# --- ladder operators ------------------------------------------------------------


def ladder_power_matrix(s, dim):
    """Matrix of ``a**s`` on levels ``0..dim-1``; the creation power is its transpose."""
    dim = check_cutoff(dim)
    if int(s) != s or s < 0 or s >= dim:
        raise DomainError(f"power must satisfy 0 <= s < dim, got s={s!r}, dim={dim}")
    s = int(s)
    out = np.zeros((dim, dim))
    for n in range(s, dim):
        perm = math.perm(n, s)
        if perm < 1e300:
            out[n - s, n] = math.sqrt(perm)
        else:
            out[n - s, n] = math.exp(0.5 * (math.lgamma(n + 1) - math.lgamma(n - s + 1)))
    return out


def annihilation(dim):
    return ladder_power_matrix(1, dim)


def creation(dim):
    return ladder_power_matrix(1, dim).T


# --- ordered series ------------------------------------------------------------------


class Ordering(enum.Enum):
    NORMAL = "normal"
    ANTINORMAL = "antinormal"


@dataclass(frozen=True)
class OrderedSeries:
    """``poly(x) * exp(rate * x)`` inside a normal or anti-normal ordering symbol."""

    ordering: Ordering
    poly: tuple
    rate: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(exact(c) for c in self.poly))
        object.__setattr__(self, "rate", exact(self.rate))

    @classmethod
    def exp(cls, lam, ordering=Ordering.NORMAL):
        """Ordered exponential ``exp(lam * x)``, i.e. ``c_l = lam**l / l!``."""
        return cls(ordering, (1,), lam)

    @classmethod
    def from_coeffs(cls, coeffs, ordering=Ordering.NORMAL):
        return cls(ordering, tuple(coeffs))

    @property
    def finite(self):
        return self.rate == 0

    def coeffs(self, count):
        """First ``count`` Taylor coefficients as exact Fractions."""
        return list(_taylor_coeffs(self.poly, self.rate, count))

    def coeff(self, l):
        return _taylor_coeffs(self.poly, self.rate, l + 1)[l]


@lru_cache(maxsize=256)
def _taylor_coeffs(poly, rate, count):
    if rate == 0:
        return tuple(poly[:count]) + (Fraction(0),) * max(0, count - len(poly))
    expo = [Fraction(1)]
    for k in range(1, count):
        expo.append(expo[-1] * rate / k)
    out = []
    for l in range(count):
        out.append(sum((poly[j] * expo[l - j] for j in range(min(l, len(poly) - 1) + 1)), Fraction(0)))
    return tuple(out)


@lru_cache(maxsize=256)
def _decimal_coeffs(poly, rate, count):
    return tuple(_precise.to_decimal(c) for c in _taylor_coeffs(poly, rate, count))


def _require(series, ordering):
    if series.ordering is not ordering:
        raise DomainError(f"expected a {ordering.value} series, got {series.ordering.value}")


def normal_diag_exact(series, m):
    _require(series, Ordering.NORMAL)
    coeffs = series.coeffs(m + 1)
    return sum((c * math.perm(m, l) for l, c in enumerate(coeffs) if c), Fraction(0))


def normal_diag_eval(series, m):
    """``<m| :f(a^dag a): |m>`` for a normally ordered series."""
    if int(m) != m or m < 0:
        raise DomainError(f"level must be a nonnegative integer, got {m!r}")
    return float(normal_diag_exact(series, int(m)))


def normal_diag_values(series, levels):
    """Normal diagonal elements for ``m = 0..levels-1``."""
    _require(series, Ordering.NORMAL)
    coeffs = series.coeffs(levels)
    out = np.empty(levels)
    for m in range(levels):
        out[m] = float(sum((coeffs[l] * math.perm(m, l) for l in range(m + 1) if coeffs[l]), Fraction(0)))
    return out


def _coherent_moment(series, m):
    """Anti-normal diagonal through the coherent-state integral of the symbol.

    ``(1/m!) * int_0^inf poly(r) exp(rate*r) r**m exp(-r) dr``, which converges for
    every ``rate < 1`` and coincides with the termwise series when that converges.
    """
    if series.rate >= 1:
        raise ConvergenceError(f"anti-normal exponential rate {float(series.rate)} >= 1: integral diverges")
    decay = 1 - series.rate
    total = Fraction(0)
    for j, c in enumerate(series.poly):
        if c:
            total += c * math.perm(m + j, j) / decay ** (m + j + 1)
    return total


def antinormal_diag_eval(series, m, continuation=False):
    """``<m| f(a a^dag) |m>`` for an anti-normally ordered series.

    Sums ``c_l (m+l)!/m!`` term by term until three consecutive terms fall below
    ``ANTINORMAL_RTOL`` of the running sum.  A Richardson estimate of the limiting
    term ratio guards against divergence; with ``continuation=True`` a divergent
    exponential series is instead evaluated through its coherent-state integral.
    """
    _require(series, Ordering.ANTINORMAL)
    if int(m) != m or m < 0:
        raise DomainError(f"level must be a nonnegative integer, got {m!r}")
    m = int(m)
    if series.finite:
        coeffs = series.coeffs(len(series.poly))
        return float(sum((c * math.perm(m + l, l) for l, c in enumerate(coeffs)), Fraction(0)))
    try:
        return _antinormal_termwise(series, m)
    except ConvergenceError:
        if not continuation:
            raise
        return float(_coherent_moment(series, m))


def _antinormal_termwise(series, m):
    chunk = 64
    coeffs = _decimal_coeffs(series.poly, series.rate, chunk)
    total = _precise.dec_int(0)
    perm = _precise.dec_int(1)
    largest = _precise.dec_int(0)
    prev_term = None
    prev_ratio = None
    small = 0
    rtol = _precise.to_decimal(Fraction(ANTINORMAL_RTOL))
    for l in range(MAX_SERIES_TERMS):
        if l >= len(coeffs):
            chunk *= 2
            coeffs = _decimal_coeffs(series.poly, series.rate, chunk)
        if l > 0:
            perm = _precise.dec_mul(perm, _precise.dec_int(m + l))
        term = _precise.dec_mul(coeffs[l], perm)
        total = _precise.dec_add(total, term)
        largest = max(largest, abs(term))
        ratio = None
        if prev_term:
            ratio = abs(term) / abs(prev_term)
            if prev_ratio is not None and l >= 32:
                limit = l * ratio - (l - 1) * prev_ratio
                if limit >= 1:
                    raise ConvergenceError(
                        f"anti-normal series diverges at level {m}: term ratio tends to {float(limit):.6g}"
                    )
        prev_term, prev_ratio = term, ratio
        if total and abs(term) < rtol * abs(total) and (ratio is None or ratio < 1):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise ConvergenceError(f"anti-normal series did not settle within {MAX_SERIES_TERMS} terms")
    if not _precise.cancellation_ok(largest, total):
        raise ConvergenceError(f"anti-normal series at level {m} lost all significant digits")
    return float(total)


def antinormal_diag_values(series, levels, continuation=False):
    return np.array([antinormal_diag_eval(series, m, continuation) for m in range(levels)])


def ordered_exp_conversion_residual(lam, levels):
    """Compare the anti-normal exponential with its normally ordered conversion.

    Checks ``<m| exp(lam a a^dag) |m>`` (anti-normal) against
    ``(1-lam)^-1 <m| :exp(lam/(1-lam) a^dag a): |m>`` for ``m < levels`` and
    returns the worst difference scaled by ``max(1, |value|)``.
    """
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lam must lie in (0, 1), got {lam!r}")
    lq = exact(lam)
    anti = OrderedSeries.exp(lq, Ordering.ANTINORMAL)
    norm = OrderedSeries.exp(-lq / (lq - 1), Ordering.NORMAL)
    worst = 0.0
    for m in range(levels):
        lhs = antinormal_diag_eval(anti, m)
        rhs = float(normal_diag_exact(norm, m) / (1 - lq))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


# --- operator identities at matrix level ------------------------------------------------


def _relative_frobenius(lhs, rhs):
    return float(np.linalg.norm(lhs - rhs) / max(1.0, np.linalg.norm(lhs)))


def normal_monomial(p, q, dim):
    """``a^dag**p a**q`` on the truncated space (exact on every retained level)."""
    return ladder_power_matrix(p, dim).T @ ladder_power_matrix(q, dim)


def operator_identity_matrix_residual(idx, dim):
    """Check ``a^n a^dag^m`` against its normally ordered Hermite expansion.

    The comparison is restricted to the top-left ``dim - m - n`` block, where the
    truncated product carries no cutoff artifacts, and reported as the Frobenius
    norm of the difference relative to ``max(1, ||lhs||)``.
    """
    m, n = poly_index(idx)
    dim = check_cutoff(dim)
    if 2 * (m + n) >= dim:
        raise DomainError(f"cutoff {dim} too small for indices {(m, n)}: need dim > 2*(m+n)")
    lhs = ladder_power_matrix(n, dim) @ ladder_power_matrix(m, dim).T
    rhs = np.zeros((dim, dim), dtype=complex)
    for l in range(min(m, n) + 1):
        coeff = math.factorial(m) * math.factorial(n) * (-1) ** l
        coeff /= math.factorial(l) * math.factorial(m - l) * math.factorial(n - l)
        phase = (-1j) ** (m + n) * 1j ** (m + n - 2 * l)
        rhs += coeff * phase * normal_monomial(m - l, n - l, dim)
    block = dim - m - n
    return _relative_frobenius(lhs[:block, :block], rhs[:block, :block])


def shifted_antinormal_lhs(idx, lam, dim, rtol=ANTINORMAL_RTOL):
    """``sum_l lam^l/l! a^(l+n) a^dag^(l+m)`` and the block on which it is settled.

    Column ``j`` of term ``l`` is exact while ``j + l + m < dim``.  Each column
    keeps accumulating until three consecutive terms fall below ``rtol`` times
    ``max(1, |partial|)``; the block is the leading run of settled columns.
    """
    m, n = poly_index(idx)
    top = max(m, n)
    levels = np.arange(dim)
    total = np.zeros((dim, dim))
    streak = np.zeros(dim, dtype=int)
    done = np.zeros(dim, dtype=bool)
    coeff = 1.0
    for l in range(dim - top):
        live = (levels + l + m < dim) & ~done
        if not live.any():
            break
        term = coeff * (ladder_power_matrix(l + n, dim) @ ladder_power_matrix(l + m, dim).T)
        total[:, live] += term[:, live]
        size = np.max(np.abs(term[:, live]), axis=0)
        scale = np.maximum(1.0, np.max(np.abs(total[:, live]), axis=0))
        streak[live] = np.where(size < rtol * scale, streak[live] + 1, 0)
        done |= streak >= 3
        coeff *= lam / (l + 1)
    block = min(int(np.argmin(done)) if not done.all() else dim, dim - m - n)
    if block < 1:
        raise ConvergenceError(f"series in a^n (exp lam a a^dag) a^dag^m not settled on any level below cutoff {dim}")
    return total, block


def shifted_antinormal_rhs(idx, lam, dim):
    """Closed normally ordered form of ``a^n (exp lam a a^dag) a^dag^m``."""
    m, n = poly_index(idx)
    shrink = 1.0 / math.sqrt(1.0 - lam)
    rate = lam / (1.0 - lam)
    prefactor = (-1j) ** (m + n) * (1.0 - lam) ** (-(n + m) / 2.0 - 1.0)
    out = np.zeros((dim, dim), dtype=complex)
    for j in range(min(m, n) + 1):
        herm = math.factorial(m) * math.factorial(n) * (-1) ** j
        herm /= math.factorial(j) * math.factorial(m - j) * math.factorial(n - j)
        herm *= (1j * shrink) ** (m - j) * (1j * shrink) ** (n - j)
        p, q = m - j, n - j
        coeff = 1.0
        for k in range(dim - max(p, q)):
            out += prefactor * herm * coeff * normal_monomial(p + k, q + k, dim)
            coeff *= rate / (k + 1)
    return out


def shifted_antinormal_matrix_residual(idx, lam, dim):
    """Residual between the anti-normal series and its closed normal form."""
    m, n = poly_index(idx, bound=4)
    dim = check_cutoff(dim)
    if not abs(lam) < 1:
        raise DomainError(f"need |lam| < 1, got {lam!r}")
    lhs, block = shifted_antinormal_lhs((m, n), lam, dim)
    rhs = shifted_antinormal_rhs((m, n), lam, dim)
    return _relative_frobenius(lhs[:block, :block], rhs[:block, :block])


# --- complex Gaussian quadrature ------------------------------------------------------------

_QUAD_START = 32
_QUAD_STEP = 16
_QUAD_MAX_ROUNDS = 40


@lru_cache(maxsize=64)
def _legendre(count):
    nodes, weights = np.polynomial.legendre.leggauss(count)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _disc_grid(radius, n_radial, n_angular):
    """Polar nodes on the disc of given radius with weights for ``d^2 beta / pi``."""
    x, w = _legendre(n_radial)
    r = 0.5 * radius * (x + 1.0)
    wr = 0.5 * radius * w * r
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    beta = r[:, None] * np.exp(1j * theta)[None, :]
    weights = wr[:, None] * np.full(n_angular, 2.0 / n_angular)[None, :]
    return beta, weights


def _converged_integral(integrand, radius, tol=1e-8):
    """Integrate over the disc, adding 16 radial and angular nodes until stable."""
    n_r = n_t = _QUAD_START
    beta, w = _disc_grid(radius, n_r, n_t)
    prev = np.sum(integrand(beta) * w, axis=(-2, -1))
    history = []
    for _ in range(_QUAD_MAX_ROUNDS):
        n_r += _QUAD_STEP
        n_t += _QUAD_STEP
        beta, w = _disc_grid(radius, n_r, n_t)
        value = np.sum(integrand(beta) * w, axis=(-2, -1))
        change = float(np.max(np.abs(value - prev)))
        history.append(change)
        if change < tol:
            return value
        prev = value
    raise QuadratureError(
        "disc quadrature did not converge",
        {"radius": radius, "radial_nodes": n_r, "angular_nodes": n_t, "changes": history},
    )


def gaussian_integral_closed(idx, alpha):
    m, n = poly_index(idx)
    alpha = complex(alpha)
    herm = hermite2((m, n), 1j * alpha.conjugate(), 1j * alpha)
    return (-1j) ** (m + n) * herm * math.exp(abs(alpha) ** 2)


def gaussian_integral_check(idx, alpha):
    """Quadrature of ``int d^2b/pi b^n b*^m exp(-|b|^2 + b a* + b* a)`` against its Hermite form."""
    m, n = poly_index(idx, bound=3)
    alpha = complex(alpha)
    if abs(alpha) > 1.5:
        raise DomainError(f"|alpha| must not exceed 1.5, got {abs(alpha)}")

    def integrand(beta):
        b = beta.conjugate()
        return beta**n * b**m * np.exp(-np.abs(beta) ** 2 + beta * alpha.conjugate() + b * alpha)

    value = _converged_integral(integrand, abs(alpha) + 8.0)
    return abs(complex(value) - gaussian_integral_closed((m, n), alpha))


def coherent_completeness_residual(levels):
    """``max_{j,k} | int d^2a/pi <j|a><a|k> - delta_jk |`` over ``j, k < levels``."""
    if int(levels) != levels or not (1 <= levels <= 12):
        raise DomainError(f"levels must be an integer in [1, 12], got {levels!r}")
    levels = int(levels)
    norms = np.array([math.sqrt(math.factorial(j)) for j in range(levels)])

    def integrand(alpha):
        gauss = np.exp(-np.abs(alpha) ** 2)
        powers = alpha[None, ...] ** np.arange(levels).reshape(-1, 1, 1)
        bra = powers / norms.reshape(-1, 1, 1)
        return gauss * bra[:, None] * bra.conj()[None, :]

    gram = _converged_integral(integrand, 8.0 + math.sqrt(levels))
    return float(np.max(np.abs(gram - np.eye(levels))))
