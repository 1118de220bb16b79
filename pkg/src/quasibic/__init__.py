"""Single-photon transport through a topological (SSH) atom array coupled to a
one-dimensional waveguide."""

__version__ = "0.1.0"

from .model import SystemParams, build_couplings, build_effective_hamiltonian
from .scattering import (
    Direction,
    SingularityError,
    field_profile,
    scatter_channels,
    scatter_exact,
    scatter_markovian,
)
from .spectral import ExceptionalPointError, ModeSet, edge_decay_rate, eigendecompose, spectrum

__all__ = [
    "Direction",
    "ExceptionalPointError",
    "ModeSet",
    "SingularityError",
    "SystemParams",
    "build_couplings",
    "build_effective_hamiltonian",
    "edge_decay_rate",
    "eigendecompose",
    "field_profile",
    "scatter_channels",
    "scatter_exact",
    "scatter_markovian",
    "spectrum",
]
