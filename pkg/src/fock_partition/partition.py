"""Resolutions of the identity by binomial and negative binomial mixtures.

Every partial sum here is diagonal in the number basis, so a truncation is
judged level by level: the residual at level ``l`` is ``|1 - partial(l)|`` and
the report's ``max_residual`` is the operator-norm distance from the identity
on the retained levels.
"""

import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from ._format import dumps_csv, dumps_json
from ._precise import exact
from .errors import DomainError
from .fockcore import OrderedSeries, Ordering, antinormal_diag_eval
from .specfun import _check_probability, binom_pmf, negbin_pmf
from .states import DiagonalState, nbs_normal_ordered_values, photon_subtract_log

DEFAULT_LEVELS = 20
DEFAULT_TERMS = 200


def default_tol():
    return float(os.environ.get("FOCK_PARTITION_TOL", "1e-10"))


@dataclass(frozen=True)
class PartitionReport:
    family: str
    param: float
    terms_used: int
    partial_sums: np.ndarray
    per_level_residuals: np.ndarray
    tol: float = field(default_factory=default_tol)

    @property
    def max_residual(self):
        return float(np.max(self.per_level_residuals))

    @property
    def converged(self):
        return self.max_residual < self.tol

    def rows(self):
        return [(l, float(p), float(r)) for l, (p, r) in enumerate(zip(self.partial_sums, self.per_level_residuals))]

    def to_dict(self):
        return {
            "family": self.family,
            "param": self.param,
            "terms_used": self.terms_used,
            "levels": len(self.partial_sums),
            "partial_sums": [float(p) for p in self.partial_sums],
            "per_level_residuals": [float(r) for r in self.per_level_residuals],
            "max_residual": self.max_residual,
            "converged": self.converged,
            "tol": self.tol,
        }

    def to_json(self):
        return dumps_json(self.to_dict())

    def to_csv(self):
        return dumps_csv(["level", "partial_sum", "residual"], self.rows())


def _check_sizes(terms, levels):
    if int(terms) != terms or terms < 1:
        raise DomainError(f"terms must be a positive integer, got {terms!r}")
    if int(levels) != levels or levels < 1:
        raise DomainError(f"levels must be a positive integer, got {levels!r}")
    return int(terms), int(levels)


# --- binomial states -------------------------------------------------------------------


def bs_partial_sums(sigma, terms, levels):
    """``sigma * sum_{n<terms} <l|rho_n(sigma)|l>`` for every level, as a terms x levels table.

    Row ``k`` holds the partial sum after ``k + 1`` terms.
    """
    _check_probability(sigma, "sigma")
    table = np.zeros((terms, levels))
    running = np.zeros(levels)
    for n in range(terms):
        weights = binom_pmf(n, sigma)[:levels]
        running[: len(weights)] += sigma * weights
        table[n] = running
    return table


def bs_tail(sigma, terms, level):
    """Closed form of ``1 - partial(level)``: the upper tail of a negative binomial law."""
    remaining = terms - level
    if remaining <= 0:
        return 1.0
    return float(betainc(remaining, level + 1, 1.0 - sigma))


def bs_partition(sigma, terms=DEFAULT_TERMS, levels=DEFAULT_LEVELS, tol=None):
    terms, levels = _check_sizes(terms, levels)
    _check_probability(sigma, "sigma")
    if terms < levels:
        raise DomainError(
            f"binomial states with n < {terms} cannot reach level {levels - 1}: need terms >= levels"
        )
    partial = bs_partial_sums(sigma, terms, levels)[-1]
    return PartitionReport("binomial", sigma, terms, partial, np.abs(1.0 - partial),
                           default_tol() if tol is None else tol)


# --- negative binomial states: three routes -----------------------------------------------


def nbs_partial_sums(gamma, terms, levels):
    """Cumulative ``sum_{s<=k} <m|rho_s(gamma)|m>`` from the probability weights; terms x levels."""
    _check_probability(gamma, "gamma")
    table = np.zeros((terms, levels))
    running = np.zeros(levels)
    for s in range(terms):
        running += negbin_pmf(s, gamma, levels)
        table[s] = running
    return table


def _thermal_antinormal_diag(gamma, levels):
    """Thermal diagonal from its anti-normal form ``gamma/(1-gamma) (exp(gamma/(gamma-1) a a^dag))``.

    For ``gamma >= 1/2`` the termwise series diverges and the coherent-state
    integral of the symbol is used instead.
    """
    g = exact(gamma)
    series = OrderedSeries.exp(g / (g - 1), Ordering.ANTINORMAL)
    scale = float(g / (1 - g))
    return np.array([scale * antinormal_diag_eval(series, k, continuation=True) for k in range(levels)])


def nbs_antinormal_sums(gamma, terms, levels):
    """``sum_{s<terms} <m|rho_s|m>`` by photon subtraction from the anti-normal thermal form."""
    _check_probability(gamma, "gamma")
    terms, levels = _check_sizes(terms, levels)
    n_c = (1.0 - gamma) / gamma
    # keep at least two levels after the deepest subtraction
    dim = max(levels, 2) + terms - 1
    thermal = DiagonalState(_thermal_antinormal_diag(gamma, dim))
    total = np.zeros(levels)
    for s in range(terms):
        subtracted, log_norm = photon_subtract_log(thermal, s)
        # unnormalised a^s rho_c a^dag^s divided by s! n_c^s
        total += subtracted.probs[:levels] * math.exp(log_norm - math.lgamma(s + 1) - s * math.log(n_c))
    return total


def nbs_normal_route_sums(gamma, terms, levels):
    """``sum_{s<terms} <m|rho_s|m>`` from the Laguerre-weighted normally ordered form."""
    _check_probability(gamma, "gamma")
    terms, levels = _check_sizes(terms, levels)
    total = np.zeros(levels)
    for s in range(terms):
        total += nbs_normal_ordered_values(s, gamma, levels)
    return total


def _nbs_report(gamma, terms, sums, tol):
    partial = (1.0 - gamma) / gamma * sums
    return PartitionReport("negbinomial", gamma, terms, partial, np.abs(1.0 - partial),
                           default_tol() if tol is None else tol)


def nbs_partition(gamma, terms=DEFAULT_TERMS, levels=DEFAULT_LEVELS, tol=None):
    terms, levels = _check_sizes(terms, levels)
    return _nbs_report(gamma, terms, nbs_partial_sums(gamma, terms, levels)[-1], tol)


def nbs_partition_normal_route(gamma, terms=DEFAULT_TERMS, levels=DEFAULT_LEVELS, tol=None):
    terms, levels = _check_sizes(terms, levels)
    return _nbs_report(gamma, terms, nbs_normal_route_sums(gamma, terms, levels), tol)


def nbs_antinormal_resummation(gamma, terms=DEFAULT_TERMS, levels=DEFAULT_LEVELS):
    """``max_m |sum_{s<terms} <m|rho_s|m> - gamma/(1-gamma)|`` via the anti-normal route."""
    sums = nbs_antinormal_sums(gamma, terms, levels)
    return float(np.max(np.abs(sums - gamma / (1.0 - gamma))))


def nbs_route_disagreement(gamma, terms, levels):
    """Largest pairwise gap between the three routes' partial sums of the NBS partition."""
    routes = [
        nbs_partial_sums(gamma, terms, levels)[-1],
        nbs_antinormal_sums(gamma, terms, levels),
        nbs_normal_route_sums(gamma, terms, levels),
    ]
    scale = (1.0 - gamma) / gamma
    return max(
        float(np.max(np.abs(scale * (routes[i] - routes[j]))))
        for i in range(3) for j in range(i + 1, 3)
    )


def convergence_table(family, param, terms, levels):
    """Rows ``(terms_used, level, partial_sum, residual)`` for every truncation ``1..terms``."""
    terms, levels = _check_sizes(terms, levels)
    if family == "bs":
        if terms < levels:
            raise DomainError("need terms >= levels for binomial states")
        table = bs_partial_sums(param, terms, levels)
    elif family == "nbs":
        table = (1.0 - param) / param * nbs_partial_sums(param, terms, levels)
    else:
        raise DomainError(f"unknown family {family!r}; expected 'bs' or 'nbs'")
    residual = np.abs(1.0 - table)
    return [(k + 1, l, float(table[k, l]), float(residual[k, l]))
            for k in range(terms) for l in range(levels)]


def number_completeness(levels):
    """``max |sum_{m<levels} |m><m| - 1|`` on the retained block."""
    if int(levels) != levels or levels < 1:
        raise DomainError(f"levels must be a positive integer, got {levels!r}")
    levels = int(levels)
    total = np.zeros((levels, levels))
    for m in range(levels):
        ket = np.zeros(levels)
        ket[m] = 1.0
        total += np.outer(ket, ket)
    return float(np.max(np.abs(total - np.eye(levels))))
