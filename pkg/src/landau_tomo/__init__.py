"""Symplectic tomograms and transition probabilities of Landau levels in
constant and time-varying homogeneous magnetic fields."""

__version__ = "0.1.0"

from .envelope import (AsymptoticData, ConstantProfile, EnvelopeState,
                       FieldProfile, SmoothRampProfile, StepProfile,
                       TabulatedProfile, extract_asymptotics, omega_at,
                       profile_from_config, reflection_coefficient,
                       solve_envelope)
from .special import HermiteMVSpec, hermite_mv, jacobi_poly, log_factorial
from .states import (Coherent, ConstantField, Fock, TomogramPoint,
                     VaryingField, coherent_wavefunction, fock_wavefunction,
                     tomogram, tomogram_coherent, tomogram_fock)
from .transitions import (ProbabilityEstimate, TransitionSpec,
                          probability_jacobi, probability_overlap,
                          probability_tomographic, reflection_from_tomograms,
                          transition_table)

__all__ = [
    "AsymptoticData", "Coherent", "ConstantField", "ConstantProfile",
    "EnvelopeState", "FieldProfile", "Fock", "HermiteMVSpec",
    "ProbabilityEstimate", "SmoothRampProfile", "StepProfile",
    "TabulatedProfile", "TomogramPoint", "TransitionSpec", "VaryingField",
    "coherent_wavefunction", "extract_asymptotics", "fock_wavefunction",
    "hermite_mv", "jacobi_poly", "log_factorial", "omega_at",
    "probability_jacobi", "probability_overlap", "probability_tomographic",
    "profile_from_config", "reflection_coefficient",
    "reflection_from_tomograms", "solve_envelope", "tomogram",
    "tomogram_coherent", "tomogram_fock",
]
