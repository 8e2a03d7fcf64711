"""Numerical oracles: Gauss-Hermite quadrature, Schrodinger residuals, Gram matrices.

Nothing here reuses the closed-form moment or uncertainty formulas; states are
sampled point-wise through ``states.evaluate`` and integrated on a grid matched
to the instantaneous Gaussian envelope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermgauss

from . import observables as obs
from .dynamics import GaussianSeed, closed_form_point
from .model import OscillatorParams
from .states import (
    GaussianCore,
    PolyGaussian,
    coherent,
    evaluate,
    fock,
    momentum_operator_apply,
    position_operator_apply,
    with_perturbed_w,
)

DEFAULT_NODES = 120
RESIDUAL_STEP = 1e-5


@lru_cache(maxsize=16)
def _hermgauss(n: int):
    u, w = hermgauss(n)
    # weights for integrating a plain function: w_i e^{u_i^2}
    return u, w * np.exp(u**2)


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int
    center: float
    scale: float

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("need at least two quadrature nodes")
        if not self.scale > 0:
            raise ValueError(f"quadrature scale must be positive, got {self.scale}")

    @classmethod
    def for_core(cls, core: GaussianCore, max_degree: int = 0, node_count: int | None = None) -> "QuadratureSpec":
        need = 2 * max_degree + 20
        n = max(DEFAULT_NODES, need) if node_count is None else node_count
        if n < need:
            raise ValueError(f"{n} nodes insufficient for polynomial degree {max_degree} (need {need})")
        return cls(node_count=n, center=core.x, scale=core.width)

    def grid(self):
        """Abscissae x_i and weights W_i with sum W_i f(x_i) ~ integral f dx."""
        u, w = _hermgauss(self.node_count)
        h = math.sqrt(2.0) * self.scale
        return self.center + h * u, h * w

    def adequate_for(self, degree: int) -> bool:
        return self.node_count >= 2 * degree + 20


@dataclass(frozen=True)
class ResidualReport:
    t: float
    residual: float
    step: float
    node_count: int
    stencil: str


def _spec_for(states, spec: QuadratureSpec | None) -> QuadratureSpec:
    deg = max(s.degree for s in states)
    if spec is None:
        return QuadratureSpec.for_core(states[0].core, deg)
    if not spec.adequate_for(deg):
        raise ValueError(f"{spec.node_count} nodes insufficient for degree {deg}")
    return spec


def inner_product(s1: PolyGaussian, s2: PolyGaussian, spec: QuadratureSpec | None = None) -> complex:
    if s1.t != s2.t:
        raise ValueError(f"inner product of states at different times {s1.t} and {s2.t}")
    spec = _spec_for((s1, s2), spec)
    x, W = spec.grid()
    return complex(np.sum(W * np.conj(evaluate(s1, x)) * evaluate(s2, x)))


def norm(state: PolyGaussian, spec: QuadratureSpec | None = None) -> float:
    return math.sqrt(inner_product(state, state, spec).real)


def apply_hamiltonian(params: OscillatorParams, state: PolyGaussian) -> PolyGaussian:
    """H psi with analytic x-derivatives (p^2 via two momentum applications)."""
    t = state.t
    pp = momentum_operator_apply(momentum_operator_apply(state))
    xx = position_operator_apply(position_operator_apply(state))
    return (pp * (math.exp(-params.gamma * t) / (2 * params.m))
            + xx * (0.5 * math.exp(params.gamma * t) * params.m * params.omega0**2))


def default_step(params: OscillatorParams) -> float:
    return RESIDUAL_STEP * (max(1.0, 1.0 / params.omega0) if params.omega0 > 0 else 1.0)


def schrodinger_residual(family: Callable[[float], PolyGaussian], params: OscillatorParams, t: float,
                         spec: QuadratureSpec | None = None, step: float | None = None) -> ResidualReport:
    """Relative L2 norm of i hbar dPsi/dt - H Psi at time t.

    dPsi/dt is a 5-point finite difference of the family at fixed x; a
    forward stencil is used when t < 2*step.
    """
    h = default_step(params) if step is None else step
    psi = family(t)
    spec = _spec_for((psi,), spec)
    x, W = spec.grid()
    if t >= 2 * h:
        f = [evaluate(family(t + k * h), x) for k in (-2, -1, 1, 2)]
        dpsi = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
        stencil = "central"
    else:
        f = [evaluate(family(t + k * h), x) for k in range(5)]
        dpsi = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h)
        stencil = "forward"
    r = 1j * params.hbar * dpsi - evaluate(apply_hamiltonian(params, psi), x)
    psi_x = evaluate(psi, x)
    res = math.sqrt(np.sum(W * np.abs(r) ** 2) / np.sum(W * np.abs(psi_x) ** 2))
    return ResidualReport(t=t, residual=res, step=h, node_count=spec.node_count, stencil=stencil)


def fock_family(params: OscillatorParams, seed: GaussianSeed, n: int, w_factor: float = 1.0):
    """t -> |n> built from closed-form trajectory data; ``w_factor`` != 1 injects a fault."""
    def family(t):
        pt = closed_form_point(params, seed, t)
        if w_factor != 1.0:
            pt = with_perturbed_w(pt, w_factor)
        return fock(params, seed, pt, n)
    return family


def gram_matrix(params: OscillatorParams, seed: GaussianSeed, t: float, n_max: int):
    """Matrix <n|m> for n, m <= n_max and its max deviation from the identity."""
    if not 0 <= n_max <= 8:
        raise ValueError("n_max must lie in 0..8")
    pt = closed_form_point(params, seed, t)
    tower = [fock(params, seed, pt, n) for n in range(n_max + 1)]
    spec = QuadratureSpec.for_core(tower[0].core, n_max)
    G = np.array([[inner_product(a, b, spec) for b in tower] for a in tower])
    return G, float(np.max(np.abs(G - np.eye(n_max + 1))))


def quadrature_moments(params: OscillatorParams, state: PolyGaussian) -> obs.MomentReport:
    spec = QuadratureSpec.for_core(state.core, state.degree + 2)
    xs = position_operator_apply(state)
    ps = momentum_operator_apply(state)
    x2 = inner_product(xs, xs, spec).real
    p2 = inner_product(ps, ps, spec).real
    t = state.t
    energy = math.exp(-2 * params.gamma * t) * p2 / (2 * params.m) + 0.5 * params.m * params.omega0**2 * x2
    return obs.MomentReport(
        t=t,
        x_mean=inner_product(state, xs, spec).real,
        p_mean=inner_product(state, ps, spec).real,
        x2=x2,
        p2=p2,
        energy=energy,
        kind="quadrature",
    )


def moment_errors(closed: obs.MomentReport, quad: obs.MomentReport) -> dict:
    """Relative errors per moment; first moments are scaled by the RMS value."""
    def rel(a, b, ref):
        return abs(a - b) / max(abs(a), ref, 1e-300)

    return {
        "x_mean": rel(closed.x_mean, quad.x_mean, math.sqrt(closed.x2)),
        "p_mean": rel(closed.p_mean, quad.p_mean, math.sqrt(closed.p2)),
        "x2": rel(closed.x2, quad.x2, 0.0),
        "p2": rel(closed.p2, quad.p2, 0.0),
        "energy": rel(closed.energy, quad.energy, 0.0),
    }


def crosscheck_moments(params: OscillatorParams, seed: GaussianSeed, t: float,
                       n: int | None = None, alpha: complex | None = None) -> dict:
    if (n is None) == (alpha is None):
        raise ValueError("give exactly one of n or alpha")
    pt = closed_form_point(params, seed, t)
    if n is not None:
        state = fock(params, seed, pt, n)
        closed = obs.moments_tcs(params, seed, pt, n)
    else:
        state = coherent(params, seed, pt, alpha)
        closed = obs.moments_cs(params, seed, pt, alpha)
    quad = quadrature_moments(params, state)
    errs = moment_errors(closed, quad)
    return {"t": t, "closed": closed, "quadrature": quad, "errors": errs,
            "max_error": max(errs.values())}
