"""Named residual checks and the versioned parameter grids that drive ``verify``.

A grid entry names a check, a tolerance ``scale`` and a ``grid`` of parameter
lists; every point of the cartesian product is one row of the report, passing
iff its residual is at most ``scale * tol``.
"""

import itertools
import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import channels, fockcore, partition, specfun, states
from ._precise import exact
from .errors import ConvergenceError, DomainError

SUITES = ("specfun", "ordering", "partition", "channel")


def _bool_residual(ok):
    return 0.0 if ok else 1.0


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


# --- specfun ---------------------------------------------------------------------------


def laguerre_three_way(n, x):
    """Pairwise agreement of the power series, the Hermite link and the recurrence."""
    series = specfun.laguerre(n, x)
    link = specfun.hermite2((n, n), x, 1.0) * (-1) ** n / math.factorial(n)
    recur = float(specfun.laguerre_sequence_exact(n, x)[n])
    return max(_rel(series, link), _rel(series, recur), _rel(link, recur))


def hermite_symmetry(m, n, x, y):
    return _rel(specfun.hermite2((m, n), x, y), specfun.hermite2((n, m), y, x))


def negbin_laguerre_at_zero(n, lam, terms):
    partial = specfun.gen_negbin_laguerre_partial(n, lam, 0.0, terms)
    return abs(partial - (1.0 + lam) ** (-n - 1))


def binomial_normalization(n, sigma):
    return abs(math.fsum(specfun.binom_pmf(n, sigma)) - 1.0)


def negbin_normalization(s, gamma, dim):
    return abs(math.fsum(specfun.negbin_pmf(s, gamma, dim)) + specfun.negbin_tail(s, gamma, dim) - 1.0)


def cauchy_rearrangement(a_ratio, b_ratio, length):
    a = a_ratio ** np.arange(length)
    b = b_ratio ** np.arange(length)
    return _bool_residual(specfun.cauchy_rearrange_check(a, b))


# --- ordering --------------------------------------------------------------------------


def normal_exp_diagonal(lam, levels):
    series = fockcore.OrderedSeries.exp(exact(lam), fockcore.Ordering.NORMAL)
    values = fockcore.normal_diag_values(series, levels)
    return max(_rel(v, (1.0 + lam) ** m) for m, v in enumerate(values))


def antinormal_exp_diagonal(lam, levels):
    series = fockcore.OrderedSeries.exp(exact(lam), fockcore.Ordering.ANTINORMAL)
    values = fockcore.antinormal_diag_values(series, levels)
    return max(_rel(v, (1.0 - lam) ** (-(m + 1))) for m, v in enumerate(values))


def vacuum_projector(levels):
    series = fockcore.OrderedSeries.exp(-1, fockcore.Ordering.NORMAL)
    exact_values = [fockcore.normal_diag_exact(series, m) for m in range(levels)]
    return _bool_residual(all(v == (1 if m == 0 else 0) for m, v in enumerate(exact_values)))


def ladder_commutator(dim):
    a, ad = fockcore.annihilation(dim), fockcore.creation(dim)
    block = dim - 2
    comm = (a @ ad - ad @ a)[:block, :block]
    return float(np.max(np.abs(comm - np.eye(block))))


def nbs_normal_ordered(s, gamma, levels):
    values = states.nbs_normal_ordered_values(s, gamma, levels)
    return float(np.max(np.abs(values - specfun.negbin_pmf(s, gamma, levels))))


def gaussian_integral(m, n, alpha_re, alpha_im):
    return fockcore.gaussian_integral_check((m, n), complex(alpha_re, alpha_im))


# --- partition -------------------------------------------------------------------------


def bs_partition_max(sigma, terms, levels):
    return partition.bs_partition(sigma, terms, levels).max_residual


def bs_closed_tail(sigma, terms, levels):
    report = partition.bs_partition(sigma, terms, levels)
    return max(abs(r - partition.bs_tail(sigma, terms, l)) for l, r in enumerate(report.per_level_residuals))


def bs_geometric_tail(sigma, terms):
    residual = partition.bs_partition(sigma, terms, 1).per_level_residuals[0]
    return abs(residual - (1.0 - sigma) ** terms)


def nbs_partition_max(gamma, terms, levels):
    return partition.nbs_partition(gamma, terms, levels).max_residual


def nbs_normal_route_max(gamma, terms, levels):
    return partition.nbs_partition_normal_route(gamma, terms, levels).max_residual


def photon_subtraction(s, gamma, cutoff):
    thermal = states.thermal_state(gamma, cutoff)
    subtracted, norm = states.photon_subtract(thermal, s)
    # both sides renormalised on the cutoff - s levels that survive
    target = specfun.negbin_pmf(s, gamma, cutoff - s)
    entry = float(np.max(np.abs(subtracted.probs - target / math.fsum(target))))
    # the retained levels carry a fraction 1 - tail of the infinite-space norm
    expected = math.factorial(s) * ((1.0 - gamma) / gamma) ** s * (1.0 - specfun.negbin_tail(s, gamma, cutoff - s))
    return max(entry, abs(norm - expected) / expected)


# --- channel ---------------------------------------------------------------------------


def number_to_binomial(m, survival):
    out = channels.damp_diagonal(states.number_state(m, m + 2), channels.ChannelSpec.from_survival(survival))
    return float(np.max(np.abs(out.probs - states.binomial_state(m, survival, m + 2).probs)))


def _channel_inputs(dim):
    yield states.thermal_state(0.4, dim).density_matrix()
    yield states.binomial_state(dim // 2, 0.6, dim).density_matrix()
    yield from channels.random_density_matrices(dim)


def trace_preservation(kt, dim):
    ch = channels.ChannelSpec(kt)
    worst = 0.0
    for rho in _channel_inputs(dim):
        worst = max(worst, abs(np.trace(channels.damp_matrix(rho, ch)) - np.trace(rho)))
    state = states.negbinomial_state(2, 0.5, dim, extend=False, eps_tail=1.0)
    worst = max(worst, abs(channels.damp_diagonal(state, ch).trace - state.trace))
    return float(worst)


def semigroup(kt1, kt2, dim):
    first, second = channels.ChannelSpec(kt1), channels.ChannelSpec(kt2)
    both = first.then(second)
    worst = 0.0
    for rho in _channel_inputs(dim):
        twice = channels.damp_matrix(channels.damp_matrix(rho, first), second)
        worst = max(worst, float(np.max(np.abs(twice - channels.damp_matrix(rho, both)))))
    return worst


def diagonal_matrix_consistency(kt, dim):
    ch = channels.ChannelSpec(kt)
    state = states.thermal_state(0.3, dim)
    fast = channels.damp_diagonal(state, ch).probs
    full = np.diag(channels.damp_matrix(state.density_matrix(), ch)).real
    return float(np.max(np.abs(fast - full)))


def channel_fixed_point(kt, dim, dt):
    return channels.channel_fixed_point_check(channels.ChannelSpec(kt), dim, dt)


def generator_order(dim, dt):
    """``|r(dt)/r(dt/2) - 2|``: the one-step error must be first order in ``dt``."""
    return abs(channels.generator_residual(dt, dim) / channels.generator_residual(dt / 2, dim) - 2.0)


def large_kt_vacuum(kt, dim):
    ch = channels.ChannelSpec(kt)
    worst = 0.0
    for rho in _channel_inputs(dim):
        out = channels.damp_matrix(rho, ch)
        vac = np.zeros_like(out)
        vac[0, 0] = np.trace(rho)
        worst = max(worst, float(np.max(np.abs(out - vac))))
    return worst


CHECKS = {
    # specfun
    "laguerre_three_way": laguerre_three_way,
    "laguerre_genfun": specfun.laguerre_genfun_residual,
    "hermite_laguerre_link": specfun.hermite_laguerre_link_residual,
    "hermite_symmetry": hermite_symmetry,
    "shifted_hermite_genfun": lambda m, n, lam, x, y, terms: specfun.shifted_hermite_genfun_residual(
        (m, n), lam, x, y, terms),
    "negbin_laguerre_theorem": specfun.gen_negbin_laguerre_residual,
    "negbin_laguerre_at_zero": negbin_laguerre_at_zero,
    "binomial_normalization": binomial_normalization,
    "negbin_normalization": negbin_normalization,
    "cauchy_rearrangement": cauchy_rearrangement,
    # ordering
    "normal_exp_diagonal": normal_exp_diagonal,
    "antinormal_exp_diagonal": antinormal_exp_diagonal,
    "vacuum_projector": vacuum_projector,
    "ladder_commutator": ladder_commutator,
    "ordered_exp_conversion": fockcore.ordered_exp_conversion_residual,
    "operator_identity": lambda m, n, dim: fockcore.operator_identity_matrix_residual((m, n), dim),
    "shifted_antinormal": lambda m, n, lam, dim: fockcore.shifted_antinormal_matrix_residual((m, n), lam, dim),
    "gaussian_integral": gaussian_integral,
    "coherent_completeness": fockcore.coherent_completeness_residual,
    "nbs_normal_ordered": nbs_normal_ordered,
    # partition
    "bs_partition": bs_partition_max,
    "bs_closed_tail": bs_closed_tail,
    "bs_geometric_tail": bs_geometric_tail,
    "nbs_partition": nbs_partition_max,
    "nbs_normal_route": nbs_normal_route_max,
    "nbs_antinormal_resummation": partition.nbs_antinormal_resummation,
    "nbs_route_agreement": partition.nbs_route_disagreement,
    "photon_subtraction": photon_subtraction,
    "number_completeness": partition.number_completeness,
    # channel
    "number_to_binomial": number_to_binomial,
    "trace_preservation": trace_preservation,
    "semigroup": semigroup,
    "diagonal_matrix_consistency": diagonal_matrix_consistency,
    "channel_fixed_point": channel_fixed_point,
    "generator_order": generator_order,
    "large_kt_vacuum": large_kt_vacuum,
}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    identity: str
    params: dict
    residual: float
    tol: float
    error: str = ""

    @property
    def passed(self):
        return math.isfinite(self.residual) and self.residual <= self.tol

    def row(self):
        params = " ".join(f"{k}={v}" for k, v in self.params.items())
        return (self.suite, self.identity, params, self.residual, self.tol, "PASS" if self.passed else "FAIL")


def load_grids(path=None):
    if path is None:
        text = resources.files("fock_partition").joinpath("data/verify_grids.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    grids = json.loads(text)
    for suite, entries in grids["suites"].items():
        if suite not in SUITES:
            raise DomainError(f"unknown suite {suite!r} in grid file")
        for entry in entries:
            if entry["check"] not in CHECKS:
                raise DomainError(f"unknown check {entry['check']!r} in suite {suite!r}")
    return grids


def _points(grid):
    keys = list(grid)
    for values in itertools.product(*(grid[k] for k in keys)):
        yield dict(zip(keys, values))


def run_suite(suite, tol, grids=None):
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)} or 'all'")
    grids = load_grids() if grids is None else grids
    results = []
    for entry in grids["suites"].get(suite, []):
        check = CHECKS[entry["check"]]
        limit = tol * entry.get("scale", 1.0)
        for params in _points(entry["grid"]):
            try:
                residual, error = float(check(**params)), ""
            except (ArithmeticError, ConvergenceError, DomainError) as exc:
                residual, error = math.inf, f"{type(exc).__name__}: {exc}"
            results.append(CheckResult(suite, entry["check"], params, residual, limit, error))
    return results


def run(suite, tol, grids=None):
    grids = load_grids() if grids is None else grids
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        results.extend(run_suite(name, tol, grids))
    return results
