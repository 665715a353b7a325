"""Exact and finite-volume solvers for a gravity-driven thin-film /
anti-surfactant hyperbolic system, including delta-shock measure
solutions, wave-interaction front tracking and vanishing-parameter
limit studies."""

from .core import (
    CharacteristicFields,
    Eigenstructure,
    Invariants,
    Params,
    State,
    characteristic_fields,
    eigenstructure,
    eigenvalues,
    flux,
    jacobian,
    riemann_invariants,
    state_from_invariants,
)
from .riemann import (
    CompositeJR,
    Contact,
    DeltaShock,
    Rarefaction,
    RiemannData,
    SampledValue,
    Shock,
    WaveFan,
    classify,
    sample,
    solve,
)

__all__ = [
    "Params",
    "State",
    "Eigenstructure",
    "Invariants",
    "CharacteristicFields",
    "flux",
    "jacobian",
    "eigenvalues",
    "eigenstructure",
    "riemann_invariants",
    "state_from_invariants",
    "characteristic_fields",
    "RiemannData",
    "WaveFan",
    "SampledValue",
    "Contact",
    "Shock",
    "Rarefaction",
    "DeltaShock",
    "CompositeJR",
    "classify",
    "solve",
    "sample",
]

__version__ = "0.1.0"
