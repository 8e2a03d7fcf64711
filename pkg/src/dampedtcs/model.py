"""Caldirola-Kanai damped oscillator: Hamiltonian, Lagrangian, mechanical energy.

    H(x, p, t) = exp(-gamma t) p^2 / 2m + 1/2 exp(gamma t) m omega0^2 x^2
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNDERDAMPED = "underdamped"
CRITICAL = "critical"
OVERDAMPED = "overdamped"

# relative threshold on |omega^2| below which the critical limit formulas are used
CRITICAL_RTOL = 1e-10


@dataclass(frozen=True)
class OscillatorParams:
    m: float = 1.0
    omega0: float = 1.0
    gamma: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "omega0", "gamma", "hbar"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.m <= 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.omega0 < 0:
            raise ValueError(f"omega0 must be non-negative, got {self.omega0}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")

    @property
    def omega_sq(self) -> float:
        """Signed discriminant gamma^2/4 - omega0^2 (positive when overdamped)."""
        return 0.25 * self.gamma**2 - self.omega0**2

    @property
    def omega_hat(self) -> float:
        """Real frequency of the regime, sqrt(|omega^2|); zero at critical damping."""
        if self.regime == CRITICAL:
            return 0.0
        return math.sqrt(abs(self.omega_sq))

    @property
    def regime(self) -> str:
        scale = max(0.25 * self.gamma**2, self.omega0**2, 1.0)
        w2 = self.omega_sq
        if abs(w2) < CRITICAL_RTOL * scale:
            return CRITICAL
        return OVERDAMPED if w2 > 0 else UNDERDAMPED


@dataclass(frozen=True)
class HessianAlongTrajectory:
    t: float
    h_xx: float
    h_xp: float
    h_pp: float


def hamiltonian(params: OscillatorParams, x, p, t):
    g = params.gamma
    return (np.exp(-g * t) * p**2 / (2 * params.m)
            + 0.5 * np.exp(g * t) * params.m * params.omega0**2 * x**2)


def lagrangian(params: OscillatorParams, x, v, t):
    m = params.m
    return np.exp(params.gamma * t) * (0.5 * m * v**2 - 0.5 * m * params.omega0**2 * x**2)


def mechanical_energy(params: OscillatorParams, x, p, t):
    """Energy measured in physical (not canonical) momentum: the dissipated quantity."""
    return (np.exp(-2 * params.gamma * t) * p**2 / (2 * params.m)
            + 0.5 * params.m * params.omega0**2 * x**2)


def hessian_along(params: OscillatorParams, t: float) -> HessianAlongTrajectory:
    # the model is quadratic, so the second derivatives do not depend on (x, p)
    g = params.gamma
    return HessianAlongTrajectory(
        t=t,
        h_xx=math.exp(g * t) * params.m * params.omega0**2,
        h_xp=0.0,
        h_pp=math.exp(-g * t) / params.m,
    )
