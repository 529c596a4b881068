"""Entanglement, Bell violations, nonlocal content and communication-game gains
of GHZ states under independent depolarizing and phase-damping noise."""

from .errors import ConsistencyError, ResourceLimitError, UnsupportedProtocolError
from .state import (
    GhzDiagonalState,
    GhzMixture,
    NoiseKind,
    apply_channel,
    decohered_ghz,
    make_ghz,
    recombine,
    split_ghz_component,
)

__all__ = [
    "ConsistencyError",
    "GhzDiagonalState",
    "GhzMixture",
    "NoiseKind",
    "ResourceLimitError",
    "UnsupportedProtocolError",
    "apply_channel",
    "decohered_ghz",
    "make_ghz",
    "recombine",
    "split_ghz_component",
]

__version__ = "0.1.0"
