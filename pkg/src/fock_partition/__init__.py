"""Partitions of unity by binomial and negative binomial states of light.

Photon-number distributions on a truncated Fock space, their normally and
anti-normally ordered operator forms, the photon-loss channel that turns number
states into binomial states, and executable residual checks for the identities
that tie them together.
"""

from .channels import ChannelSpec, damp_diagonal, damp_matrix
from .errors import ConvergenceError, CutoffError, DegenerateStateError, DomainError, QuadratureError
from .fockcore import OrderedSeries, Ordering, antinormal_diag_eval, normal_diag_eval
from .partition import PartitionReport, bs_partition, nbs_partition
from .specfun import LogWeight, PolyIndex, hermite2, laguerre
from .states import (
    DiagonalState,
    StateLabel,
    binomial_state,
    mean_photon,
    negbinomial_state,
    number_state,
    photon_subtract,
    thermal_state,
)

__version__ = "0.1.0"
