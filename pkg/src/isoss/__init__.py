"""Isotropic self-similar Markov processes: simulation, time changes and Monte Carlo checks."""
from .factory import (
    GeneratorSpec,
    StableSpec,
    build_self_similar,
    build_self_similar_batch,
    simulate_invariant,
    simulate_invariant_batch,
    simulate_isotropic_stable,
    simulate_isotropic_stable_batch,
    simulate_radial_levy,
)
from .lamperti import TimeChange, compute_A, compute_T_from_xbar, forward_transform, inverse_transform
from .laws import JumpLaw
from .paths import CadlagPath, JumpRecord, classify_jump, polar_decompose
from .spherical import AngularSpec, simulate_angular
from .stats import TestReport

__all__ = [
    "AngularSpec", "CadlagPath", "GeneratorSpec", "JumpLaw", "JumpRecord", "StableSpec", "TestReport", "TimeChange",
    "build_self_similar", "build_self_similar_batch", "classify_jump", "compute_A", "compute_T_from_xbar",
    "forward_transform", "inverse_transform", "polar_decompose", "simulate_angular", "simulate_invariant",
    "simulate_invariant_batch", "simulate_isotropic_stable", "simulate_isotropic_stable_batch",
    "simulate_radial_levy",
]
