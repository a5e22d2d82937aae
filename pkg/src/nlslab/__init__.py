"""Noiseless loss suppression on multimode photonic states."""
from nlslab.channels import (
    ChannelParams,
    amplifier_filter,
    attenuator_filter,
    loss_kraus,
    nls_multimode,
    noise_decomposition,
)
from nlslab.errors import (
    DegenerateInputError,
    DomainError,
    PhysicalityError,
    PreconditionError,
    UnphysicalRegimeError,
)
from nlslab.fock import DensityOperator, FockCutoff, MultiModeState, fidelity_pure, partial_trace
from nlslab.necessity import SuperpositionSpec, Verdict, equal_channel_criterion, requires_attenuation
from nlslab.protocol import ProtocolResult, check_balancing, run, sweep_gain
from nlslab.states import StateFamily, build, parse_state_spec

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "DegenerateInputError",
    "DensityOperator",
    "DomainError",
    "FockCutoff",
    "MultiModeState",
    "PhysicalityError",
    "PreconditionError",
    "ProtocolResult",
    "StateFamily",
    "SuperpositionSpec",
    "UnphysicalRegimeError",
    "Verdict",
    "amplifier_filter",
    "attenuator_filter",
    "build",
    "check_balancing",
    "equal_channel_criterion",
    "fidelity_pure",
    "loss_kraus",
    "nls_multimode",
    "noise_decomposition",
    "parse_state_spec",
    "partial_trace",
    "requires_attenuation",
    "run",
    "sweep_gain",
]
