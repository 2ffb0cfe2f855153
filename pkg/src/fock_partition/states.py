"""Fock-diagonal mixed states: number, binomial, negative binomial and thermal."""

import enum
import json
import math
from dataclasses import dataclass, field
import numpy as np
from scipy.special import gammaln

from ._precise import exact
from .errors import CutoffError, DegenerateStateError, DomainError
from .fockcore import OrderedSeries, Ordering, check_cutoff, normal_diag_exact, normal_diag_values
from .specfun import _check_probability, binom_pmf, negbin_pmf, negbin_tail

EPS_TAIL = 1e-12
AUTO_START = 32

# Sign of the exponent in the normally ordered negative binomial state,
# rho_s = gamma^(s+1) :exp(SIGN * gamma * N) L_s(-(1-gamma) N):.  The s = 0
# case must reduce to the thermal state gamma :exp(-gamma N):, which fixes -1.
NBS_EXPONENT_SIGN = -1


class StateLabel(enum.Enum):
    NUMBER = "number"
    BINOMIAL = "binomial"
    NEGBINOMIAL = "negbinomial"
    THERMAL = "thermal"
    CUSTOM = "custom"


@dataclass(frozen=True)
class DiagonalState:
    """Photon-number distribution on levels ``0..cutoff-1``.

    ``tail_mass`` is the probability that lies at or above the cutoff.
    """

    probs: np.ndarray
    tail_mass: float = 0.0
    label: StateLabel = StateLabel.CUSTOM
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 1:
            raise DomainError("probs must be one-dimensional")
        check_cutoff(len(probs))
        if np.any(probs < 0):
            raise DomainError("probabilities must be nonnegative")
        if self.tail_mass < 0:
            raise DomainError("tail mass must be nonnegative")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @property
    def cutoff(self):
        return len(self.probs)

    @property
    def trace(self):
        return math.fsum(self.probs)

    def to_dict(self):
        return {
            "label": self.label.value,
            "params": dict(self.params),
            "cutoff": self.cutoff,
            "probs": [float(p) for p in self.probs],
            "tail_mass": self.tail_mass,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        probs = data["probs"]
        if len(probs) != data.get("cutoff", len(probs)):
            raise DomainError("cutoff does not match the length of probs")
        return cls(np.asarray(probs, dtype=float), data.get("tail_mass", 0.0),
                   StateLabel(data.get("label", "custom")), dict(data.get("params", {})))

    def density_matrix(self):
        return np.diag(self.probs).astype(complex)


def _auto_cutoff(tail_of, eps_tail, start=AUTO_START):
    dim = start
    while tail_of(dim) >= eps_tail:
        dim *= 2
        if dim > 4096:
            raise CutoffError(f"no cutoff up to 4096 reaches tail mass {eps_tail:g}")
    return dim


def _suggest_cutoff(tail_of, eps_tail):
    try:
        return _auto_cutoff(tail_of, eps_tail)
    except CutoffError:
        return None


def number_state(m, cutoff=None):
    if int(m) != m or m < 0:
        raise DomainError(f"level must be a nonnegative integer, got {m!r}")
    m = int(m)
    dim = max(m + 1, 2) if cutoff is None else check_cutoff(cutoff)
    if m >= dim:
        raise DomainError(f"level {m} does not fit below cutoff {dim}")
    probs = np.zeros(dim)
    probs[m] = 1.0
    return DiagonalState(probs, 0.0, StateLabel.NUMBER, {"m": m})


def vacuum(cutoff=2):
    return number_state(0, cutoff)


def binomial_state(n, sigma, cutoff=None):
    """Binomial mixture ``sum_l C(n,l) sigma^l (1-sigma)^(n-l) |l><l|``."""
    _check_probability(sigma, "sigma")
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    dim = max(n + 1, 2) if cutoff is None else check_cutoff(cutoff)
    if n >= dim:
        raise DomainError(f"binomial support {n} does not fit below cutoff {dim}")
    probs = np.zeros(dim)
    probs[: n + 1] = binom_pmf(n, sigma)
    return DiagonalState(probs, 0.0, StateLabel.BINOMIAL, {"n": n, "sigma": sigma})


def negbinomial_state(s, gamma, cutoff=None, eps_tail=EPS_TAIL, extend=True):
    """Negative binomial mixture ``sum_m C(m+s,m) gamma^(s+1) (1-gamma)^m |m><m|``.

    With ``cutoff=None`` the cutoff doubles from 32 until the analytic tail is
    below ``eps_tail``.  An explicit cutoff that leaves too much tail is doubled
    likewise when ``extend`` is set, and rejected otherwise.
    """
    _check_probability(gamma, "gamma")
    if int(s) != s or s < 0:
        raise DomainError(f"s must be a nonnegative integer, got {s!r}")
    s = int(s)

    def tail_of(dim):
        return negbin_tail(s, gamma, dim)

    if cutoff is None:
        dim = _auto_cutoff(tail_of, eps_tail)
    else:
        dim = check_cutoff(cutoff)
        if tail_of(dim) >= eps_tail:
            if not extend:
                suggested = _suggest_cutoff(tail_of, eps_tail)
                raise CutoffError(
                    f"cutoff {dim} leaves tail mass {tail_of(dim):.3g} >= {eps_tail:g}; try {suggested}",
                    suggested,
                )
            dim = _auto_cutoff(tail_of, eps_tail, start=dim)
    return DiagonalState(negbin_pmf(s, gamma, dim), tail_of(dim), StateLabel.NEGBINOMIAL,
                         {"s": s, "gamma": gamma})


def thermal_state(gamma, cutoff=None, eps_tail=EPS_TAIL):
    """Chaotic light ``gamma (1-gamma)^m``; an explicit cutoff is kept as given."""
    _check_probability(gamma, "gamma")

    def tail_of(dim):
        return (1.0 - gamma) ** dim

    dim = _auto_cutoff(tail_of, eps_tail) if cutoff is None else check_cutoff(cutoff)
    m = np.arange(dim)
    probs = gamma * np.exp(m * math.log1p(-gamma))
    return DiagonalState(probs, tail_of(dim), StateLabel.THERMAL, {"gamma": gamma})


def mean_photon(state):
    """Mean photon number over the retained levels and a bound on the tail's share.

    The bound is exact for thermal and negative binomial labels; for other states
    with nonzero tail mass nothing is known about the tail and it is infinite.
    """
    levels = np.arange(state.cutoff)
    mean = math.fsum(levels * state.probs)
    if state.tail_mass == 0:
        return mean, 0.0
    if state.label in (StateLabel.THERMAL, StateLabel.NEGBINOMIAL):
        gamma = state.params["gamma"]
        s = state.params.get("s", 0)
        # m C(m+s,m) g^(s+1) (1-g)^m = (s+1)(1-g)/g * [NB(s+1) weight at m-1]
        tail = (s + 1) * (1.0 - gamma) / gamma * negbin_tail(s + 1, gamma, state.cutoff - 1)
        return mean, tail
    return mean, math.inf


def photon_subtract_log(state, s):
    """Like :func:`photon_subtract` but returns the natural log of the norm."""
    if int(s) != s or s < 0 or s >= state.cutoff:
        raise DomainError(f"need 0 <= s < cutoff, got s={s!r}")
    s = int(s)
    k = np.arange(state.cutoff - s)
    kept = state.probs[s:]
    if not np.any(kept > 0):
        raise DegenerateStateError(f"subtracting {s} photon(s) annihilates the state")
    with np.errstate(divide="ignore"):
        logw = np.log(kept) + gammaln(k + s + 1) - gammaln(k + 1)
    top = np.max(logw)
    weights = np.exp(logw - top)
    total = math.fsum(weights)
    params = {"source": state.label.value, "s": s, **{f"source_{k}": v for k, v in state.params.items()}}
    return DiagonalState(weights / total, 0.0, StateLabel.CUSTOM, params), top + math.log(total)


def photon_subtract(state, s):
    """Apply ``a^s . a^dag^s`` to a diagonal state.

    Returns the normalised state on levels ``0..cutoff-s-1`` and the norm
    ``sum_m probs[m+s] (m+s)!/m!`` over the retained levels.
    """
    subtracted, log_norm = photon_subtract_log(state, s)
    return subtracted, math.exp(log_norm)


def nbs_normal_series(s, gamma, degree=None, sign=None):
    """Normally ordered symbol ``exp(sign*gamma*x) L_s(-(1-gamma) x)``.

    The scalar prefactor ``gamma^(s+1)`` is left out (see :func:`nbs_prefactor`)
    so the exact coefficients stay small.  ``degree`` keeps only the powers of
    ``x`` up to that order, which is all a level ``m <= degree`` can see.
    """
    _check_probability(gamma, "gamma")
    sign = NBS_EXPONENT_SIGN if sign is None else sign
    g = exact(gamma)
    top = s if degree is None else min(s, degree)
    # L_s(-(1-g) x) has x^j coefficient C(s,j) (1-g)^j / j!
    poly = [math.comb(s, j) * (1 - g) ** j / math.factorial(j) for j in range(top + 1)]
    return OrderedSeries(Ordering.NORMAL, tuple(poly), sign * g)


def nbs_prefactor(s, gamma):
    return math.exp((s + 1) * math.log(gamma))


def _check_count(s):
    if int(s) != s or s < 0:
        raise DomainError(f"s must be a nonnegative integer, got {s!r}")
    return int(s)


def nbs_normal_ordered_diag(s, gamma, m):
    """``<m| rho_s(gamma) |m>`` from the Laguerre-weighted normally ordered form."""
    s = _check_count(s)
    series = nbs_normal_series(s, gamma, degree=m)
    return nbs_prefactor(s, gamma) * float(normal_diag_exact(series, m))


def nbs_normal_ordered_values(s, gamma, levels):
    s = _check_count(s)
    series = nbs_normal_series(s, gamma, degree=levels - 1)
    return nbs_prefactor(s, gamma) * normal_diag_values(series, levels)
