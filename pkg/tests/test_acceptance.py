"""Acceptance criteria, one test each.

Every criterion prints a single ``PASS``/``FAIL`` line: in the pytest terminal
summary (see conftest.py) or directly when run as ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import math

import numpy as np
import pytest

from fock_partition import channels, cli, fockcore, partition, specfun, states
from fock_partition.channels import ChannelSpec

GRID = [0.2, 0.5, 0.8]
RESULTS = {}


def worst(values):
    return max(values, default=0.0)


def criterion_1():
    """Binomial-state partition of unity."""
    tail = worst(partition.bs_partition(sigma, 200, 20).max_residual for sigma in GRID)
    geometric = abs(partition.bs_partition(0.5, 10, 1).per_level_residuals[0] - 2.0**-10)
    ok = tail < 1e-10 and geometric <= 1e-15
    return ok, f"max residual after 200 terms {tail:.3e} (< 1e-10); 10-term geometric tail error {geometric:.1e}"


def criterion_2():
    """Negative-binomial partition and agreement of the three routes."""
    tail = worst(partition.nbs_partition(gamma, 200, 20).max_residual for gamma in GRID)
    routes = worst(partition.nbs_route_disagreement(gamma, 200, 20) for gamma in GRID)
    ok = tail < 1e-10 and routes <= 1e-10
    return ok, f"max residual after 200 terms {tail:.3e} (< 1e-10); route disagreement {routes:.1e}"


def criterion_3():
    """Loss channel maps number states to binomial states."""
    entry = trace = 0.0
    for survival in (0.3, 0.5, 0.7, 0.9):
        ch = ChannelSpec.from_survival(survival)
        for m in range(13):
            out = channels.damp_diagonal(states.number_state(m, m + 2), ch)
            entry = max(entry, float(np.max(np.abs(out.probs - states.binomial_state(m, survival, m + 2).probs))))
            trace = max(trace, abs(out.trace - 1.0))
    semigroup = 0.0
    for kt1, kt2 in ((0.05, 0.1), (0.35, 1.2), (1.0, 0.5)):
        both = ChannelSpec(kt1 + kt2)
        for rho in channels.random_density_matrices(16):
            twice = channels.damp_matrix(channels.damp_matrix(rho, ChannelSpec(kt1)), ChannelSpec(kt2))
            semigroup = max(semigroup, float(np.max(np.abs(twice - channels.damp_matrix(rho, both)))))
    ok = entry <= 1e-12 and trace <= 1e-12 and semigroup <= 1e-10
    return ok, f"entrywise {entry:.1e}, trace {trace:.1e}, semigroup {semigroup:.1e}"


def criterion_4():
    """Photon subtraction from thermal light."""
    # thermal(gamma) is the infinite state; the cutoff has to keep the tail of
    # the subtracted NB(s) below 1e-12 as well, which 256 does for s <= 5
    entry = norm_err = 0.0
    for gamma in GRID:
        thermal = states.thermal_state(gamma, 256)
        for s in range(6):
            out, norm = states.photon_subtract(thermal, s)
            target = states.negbinomial_state(s, gamma)
            width = max(out.cutoff, target.cutoff)
            diff = np.pad(out.probs, (0, width - out.cutoff)) - np.pad(target.probs, (0, width - target.cutoff))
            entry = max(entry, float(np.max(np.abs(diff))))
            expected = math.factorial(s) * ((1.0 - gamma) / gamma) ** s
            norm_err = max(norm_err, abs(norm - expected) / expected)
    ok = entry <= 1e-12 and norm_err <= 1e-10
    return ok, f"entrywise {entry:.1e}, normalisation (relative) {norm_err:.1e}"


def criterion_5():
    """Generating-function identities for Laguerre and two-variable Hermite polynomials."""
    axis = [-5.0, -2.5, 0.0, 1.0, 2.5, 5.0]
    link = worst(specfun.hermite_laguerre_link_residual(n, x, y) for n in range(21) for x in axis for y in axis)
    shifted = worst(
        specfun.shifted_hermite_genfun_residual((m, n), lam, x, y, 400)
        for m in range(5) for n in range(5)
        for lam in (-0.5, -0.25, 0.25, 0.5)
        for x, y in ((1.0, 2.0), (-2.0, 1.5), (0.5, -1.0))
    )
    theorem = worst(
        specfun.gen_negbin_laguerre_residual(n, lam, z, 400)
        for n in range(11) for lam in (0.1, 0.3, 0.5) for z in (0.0, 1.0, 2.5, 5.0)
    )
    degenerate = worst(
        abs(specfun.gen_negbin_laguerre_partial(n, lam, 0.0, 400) - (1.0 + lam) ** (-n - 1))
        for n in range(11) for lam in (0.1, 0.3, 0.5)
    )
    ok = link <= 1e-10 and shifted <= 1e-10 and theorem <= 1e-10 and degenerate <= 1e-12
    return ok, (f"link {link:.1e}, shifted Hermite {shifted:.1e}, "
                f"Laguerre-NB theorem {theorem:.1e}, z = 0 case {degenerate:.1e}")


def criterion_6():
    """Normal and anti-normal ordered exponentials."""
    normal = anti = 0.0
    for lam in (-1.0, -0.5, 0.3, 1.0):
        series = fockcore.OrderedSeries.exp(lam, fockcore.Ordering.NORMAL)
        for m in range(40):
            expected = (1.0 + lam) ** m
            normal = max(normal, abs(fockcore.normal_diag_eval(series, m) - expected) / max(1.0, abs(expected)))
    for lam in (0.1, 0.5, 0.9):
        series = fockcore.OrderedSeries.exp(lam, fockcore.Ordering.ANTINORMAL)
        for m in range(40):
            expected = (1.0 - lam) ** (-(m + 1))
            anti = max(anti, abs(fockcore.antinormal_diag_eval(series, m) - expected) / expected)
    conversion = worst(fockcore.ordered_exp_conversion_residual(lam, 10) for lam in (0.1, 0.5, 0.9))
    vac = fockcore.OrderedSeries.exp(-1, fockcore.Ordering.NORMAL)
    projector = all(fockcore.normal_diag_exact(vac, m) == (1 if m == 0 else 0) for m in range(40))
    ok = normal <= 1e-12 and anti <= 1e-12 and conversion <= 1e-10 and projector
    return ok, (f"normal {normal:.1e}, anti-normal {anti:.1e} (relative), conversion {conversion:.1e}, "
                f"vacuum projector {'exact' if projector else 'WRONG'}")


def criterion_7():
    """Shifted anti-normal identity on the truncation-safe block at D = 64."""
    residual = worst(
        fockcore.shifted_antinormal_matrix_residual((m, n), lam, 64)
        for m in range(5) for n in range(5) for lam in (-0.4, -0.2, 0.2, 0.4)
    )
    return residual <= 1e-10, f"max matrix residual {residual:.1e} over m, n <= 4, lam in +-0.2, +-0.4"


def criterion_8():
    """Coherent-state quadrature."""
    alphas = [0.0] + [r * complex(math.cos(t), math.sin(t)) for r in (0.75, 1.5) for t in (0.0, 1.0, 2.5, 4.0)]
    gauss = worst(fockcore.gaussian_integral_check((m, n), a) for m in range(4) for n in range(4) for a in alphas)
    completeness = fockcore.coherent_completeness_residual(10)
    ok = gauss <= 1e-6 and completeness <= 1e-6
    return ok, f"Gaussian integral {gauss:.1e}, completeness {completeness:.1e}"


def _verify_all():
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        status = cli.main(["verify", "all"])
    passes = [line for line in buf.getvalue().splitlines() if line.endswith(": PASS")]
    return status, len(passes)


def criterion_9():
    """``verify all`` passes, and flipping one sign makes it fail."""
    status, passes = _verify_all()
    saved = states.NBS_EXPONENT_SIGN
    states.NBS_EXPONENT_SIGN = -saved
    try:
        corrupted, _ = _verify_all()
    finally:
        states.NBS_EXPONENT_SIGN = saved
    ok = status == 0 and passes == 4 and corrupted == 1
    return ok, f"clean exit {status} with {passes}/4 suites PASS; corrupted exit {corrupted}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def report_line(number, ok, detail):
    return f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("number", range(1, 10))
def test_criterion(number):
    ok, detail = CRITERIA[number - 1]()
    RESULTS[number] = report_line(number, ok, detail)
    print(RESULTS[number])
    assert ok, RESULTS[number]


if __name__ == "__main__":
    for i, check in enumerate(CRITERIA, 1):
        print(report_line(i, *check()), flush=True)
