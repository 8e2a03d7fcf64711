"""Trajectory-coherent and coherent states of the Caldirola-Kanai damped oscillator."""
from .dynamics import (
    BundlePoint,
    GaussianSeed,
    JacobiPair,
    PhaseSpacePoint,
    TrajectoryBundle,
    closed_form_point,
    closed_form_variations,
    general_trajectory,
    integrate_bundle,
    paper_trajectory,
    unwind_phase,
)
from .model import OscillatorParams, hamiltonian, hessian_along, lagrangian, mechanical_energy
from .observables import (
    NoMinimizingMu,
    UncertaintySetup,
    minimization_times,
    moments_cs,
    moments_tcs,
    solve_mu_for_time,
    uncertainties_cs,
    uncertainties_tcs,
)
from .states import PolyGaussian, coherent, evaluate, fock, vacuum

__version__ = "0.1.0"
