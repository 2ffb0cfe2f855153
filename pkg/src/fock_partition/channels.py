"""Amplitude damping: the closed-form solution of the photon-loss master equation."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binom

from .errors import DomainError
from .fockcore import annihilation, check_cutoff, check_density_matrix, creation
from .states import DiagonalState, StateLabel

GENERATOR_SEED = 20180517


@dataclass(frozen=True)
class ChannelSpec:
    """Damping exposure ``kt`` (the product of damping constant and time).

    ``survival = exp(-2 kt)`` is the per-photon survival probability and
    ``T = 1 - survival`` the loss probability.
    """

    kt: float
    survival: float = field(default=None)

    def __post_init__(self):
        if not (self.kt >= 0 and math.isfinite(self.kt)):
            raise DomainError(f"kt must be finite and nonnegative, got {self.kt!r}")
        if self.survival is None:
            object.__setattr__(self, "survival", math.exp(-2.0 * self.kt))
        elif not (0.0 < self.survival <= 1.0):
            raise DomainError(f"survival must lie in (0, 1], got {self.survival!r}")

    @classmethod
    def from_survival(cls, survival):
        if not (0.0 < survival <= 1.0):
            raise DomainError(f"survival must lie in (0, 1], got {survival!r}")
        return cls(-0.5 * math.log(survival), survival)

    @property
    def T(self):
        return 1.0 - self.survival

    def then(self, other):
        """The channel equivalent to applying ``self`` and then ``other``."""
        return ChannelSpec(self.kt + other.kt, self.survival * other.survival)


def _log_kraus_weights(n, dim, ch):
    """``log( C(j+n, n) survival^j T^n )`` for ``j = 0..dim-n-1``."""
    j = np.arange(dim - n)
    # a binomial law over j + n photons of which j survive
    return binom.logpmf(j, j + n, ch.survival)


def damp_diagonal(state, ch):
    """Damp a diagonal state: ``out[l] = sum_{m>=l} p[m] C(m,l) survival^l T^(m-l)``."""
    if ch.T == 0:
        return DiagonalState(state.probs, state.tail_mass, state.label, dict(state.params))
    dim = state.cutoff
    out = np.zeros(dim)
    for n in range(dim):
        # n photons lost: level j + n feeds level j
        out[: dim - n] += state.probs[n:] * np.exp(_log_kraus_weights(n, dim, ch))
    params = {"kt": ch.kt, "survival": ch.survival, "source": state.label.value,
              **{f"source_{k}": v for k, v in state.params.items()}}
    return DiagonalState(out, state.tail_mass, StateLabel.CUSTOM, params)


def damp_matrix(rho, ch):
    """Operator-sum solution applied to a general density matrix.

    Term ``n`` maps ``rho[j+n, k+n]`` to entry ``(j, k)`` with amplitude
    ``sqrt(C(j+n,n) s^j T^n) * sqrt(C(k+n,n) s^k T^n)``, ``s`` the survival.
    """
    rho = check_density_matrix(rho)
    if ch.T == 0:
        return rho.copy()
    dim = rho.shape[0]
    out = np.zeros_like(rho)
    for n in range(dim):
        amp = np.exp(0.5 * _log_kraus_weights(n, dim, ch))
        out[: dim - n, : dim - n] += np.outer(amp, amp) * rho[n:, n:]
    return out


def lindblad_generator(rho):
    """``2 a rho a^dag - a^dag a rho - rho a^dag a`` with unit damping constant."""
    dim = rho.shape[0]
    a, ad = annihilation(dim), creation(dim)
    num = ad @ a
    return 2 * a @ rho @ ad - num @ rho - rho @ num


def random_density_matrices(dim, count=3, seed=GENERATOR_SEED):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        out.append(rho / np.trace(rho).real)
    return out


def generator_residual(dt, cutoff):
    """Worst entry of ``(damp(rho, dt) - rho)/dt - L(rho)`` over the fixed test set."""
    dim = check_cutoff(cutoff)
    step = ChannelSpec(dt)
    worst = 0.0
    for rho in random_density_matrices(dim):
        diff = (damp_matrix(rho, step) - rho) / dt - lindblad_generator(rho)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def vacuum_residual(ch, cutoff):
    dim = check_cutoff(cutoff)
    vac = np.zeros((dim, dim), dtype=complex)
    vac[0, 0] = 1.0
    return float(np.max(np.abs(damp_matrix(vac, ch) - vac)))


def channel_fixed_point_check(ch, cutoff, dt=1e-4):
    """Max of the vacuum-invariance residual and the one-step generator residual."""
    if ch.kt <= 0:
        raise DomainError("the fixed-point check needs kt > 0")
    return max(vacuum_residual(ch, cutoff), generator_residual(dt, cutoff))
