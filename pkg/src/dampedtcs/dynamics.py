"""Classical trajectory and system in variations for the damped oscillator.

Two routes are provided and are meant to be checked against each other:

* closed forms (hyperbolic for overdamped, trigonometric for underdamped,
  polynomial limits at critical damping);
* an adaptive RK45 integration of Hamilton's equations, the variational
  system and the action integral (``integrate_bundle``).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .model import CRITICAL, OVERDAMPED, UNDERDAMPED, OscillatorParams, hamiltonian

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14


@dataclass(frozen=True)
class GaussianSeed:
    """Initial Gaussian: width parameter ``b`` (Im b > 0) centred at (x0, p0)."""

    b: complex
    x0: float = 1.0
    p0: float = 0.0

    def __post_init__(self):
        b = complex(self.b)
        object.__setattr__(self, "b", b)
        if not (cmath.isfinite(b) and math.isfinite(self.x0) and math.isfinite(self.p0)):
            raise ValueError("seed must be finite")
        if not b.imag > 0:
            raise ValueError(f"Im b must be strictly positive, got b={b}")

    @classmethod
    def reference_preset(cls, params: OscillatorParams, b: complex) -> "GaussianSeed":
        """Seed on the reference trajectory x(0) = 1, p(0) = -m gamma / 2."""
        return cls(b=b, x0=1.0, p0=-0.5 * params.m * params.gamma)


@dataclass(frozen=True)
class PhaseSpacePoint:
    t: float
    x: float
    p: float


@dataclass(frozen=True)
class JacobiPair:
    """Complex solution (w, z) of the variational system with w(0)=b, z(0)=1.

    ``delta`` is the constant (b + gamma m/2)/(m omega) of the closed form,
    with omega = i*omega_hat when underdamped; at critical damping it holds the
    finite limit (b + gamma m/2)/m instead.
    """

    t: float
    w: complex
    z: complex
    delta: complex


@dataclass(frozen=True)
class BundlePoint:
    """Everything the wavefunction needs at one instant."""

    t: float
    x: float
    p: float
    w: complex
    z: complex
    S0: complex
    argz: float


@dataclass(frozen=True)
class TrajectoryBundle:
    params: OscillatorParams
    seed: GaussianSeed
    samples: tuple = field(default_factory=tuple)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.samples])

    def __len__(self):
        return len(self.samples)

    def __getitem__(self, i) -> BundlePoint:
        return self.samples[i]


def _basis(params: OscillatorParams, t):
    """Fundamental pair (C, S) of u'' = omega^2 u with C(0)=1, C'(0)=0, S(0)=0, S'(0)=1.

    Returns (C, S, w2) where w2 is the signed omega^2 used in C' = w2 * S.
    """
    regime = params.regime
    if regime == CRITICAL:
        t = np.asarray(t, dtype=float)
        return np.ones_like(t), t, 0.0
    wh = params.omega_hat
    if regime == OVERDAMPED:
        return np.cosh(wh * t), np.sinh(wh * t) / wh, wh**2
    return np.cos(wh * t), np.sin(wh * t) / wh, -wh**2


def general_trajectory(params: OscillatorParams, x0: float, p0: float, t) -> PhaseSpacePoint:
    """Solve x'' + gamma x' + omega0^2 x = 0 from (x0, p0); p = m e^{gamma t} x'."""
    g, m = params.gamma, params.m
    C, S, w2 = _basis(params, t)
    v = p0 / m + 0.5 * g * x0
    env = np.exp(-0.5 * g * t)
    u = x0 * C + v * S
    du = x0 * w2 * S + v * C
    x = env * u
    xdot = env * (du - 0.5 * g * u)
    p = m * np.exp(g * t) * xdot
    return PhaseSpacePoint(t=t, x=x, p=p)


def paper_trajectory(params: OscillatorParams, t) -> PhaseSpacePoint:
    """Reference trajectory with x(0) = 1, p(0) = -m gamma/2, written regime by regime."""
    g, m = params.gamma, params.m
    regime = params.regime
    if regime == OVERDAMPED:
        w = params.omega_hat
        ch, sh = np.cosh(w * t), np.sinh(w * t)
        x = ch * np.exp(-0.5 * g * t)
        p = m * (w * sh - 0.5 * g * ch) * np.exp(0.5 * g * t)
    elif regime == UNDERDAMPED:
        # omega -> i*omega_hat: cosh -> cos, omega*sinh -> -omega_hat*sin
        w = params.omega_hat
        c, s = np.cos(w * t), np.sin(w * t)
        x = c * np.exp(-0.5 * g * t)
        p = m * (-w * s - 0.5 * g * c) * np.exp(0.5 * g * t)
    else:
        x = np.exp(-0.5 * g * t) * np.ones_like(np.asarray(t, dtype=float))
        p = -0.5 * g * m * np.exp(0.5 * g * t)
    return PhaseSpacePoint(t=t, x=x, p=p)


def _check_b(b: complex) -> complex:
    b = complex(b)
    if not b.imag > 0:
        raise ValueError(f"Im b must be strictly positive, got b={b}")
    return b


def closed_form_variations(params: OscillatorParams, b: complex, t) -> JacobiPair:
    b = _check_b(b)
    g, m = params.gamma, params.m
    env_z = np.exp(-0.5 * g * t)
    env_w = m * np.exp(0.5 * g * t)
    regime = params.regime
    if regime == OVERDAMPED:
        w_ = params.omega_hat
        delta = (b + 0.5 * g * m) / (m * w_)
        ch, sh = np.cosh(w_ * t), np.sinh(w_ * t)
        z = env_z * (ch + delta * sh)
        w = env_w * ((delta * w_ - 0.5 * g) * ch + (w_ - 0.5 * g * delta) * sh)
    elif regime == UNDERDAMPED:
        wh = params.omega_hat
        delta = (b + 0.5 * g * m) / (1j * m * wh)
        d = 1j * delta  # delta * sinh(i wh t) = d * sin(wh t)
        c, s = np.cos(wh * t), np.sin(wh * t)
        z = env_z * (c + d * s)
        w = env_w * ((delta * 1j * wh - 0.5 * g) * c - (wh + 0.5 * g * d) * s)
    else:
        delta = (b + 0.5 * g * m) / m
        z = env_z * (1 + delta * t)
        w = env_w * (delta - 0.5 * g * (1 + delta * t))
    return JacobiPair(t=t, w=w, z=z, delta=delta)


def continuous_arg_z(params: OscillatorParams, b: complex, t):
    """Continuous branch of arg z(t) with arg z(0) = 0, from the closed form.

    arg z increases strictly in t. Underdamped it gains exactly pi per half
    period; otherwise it stays inside (-pi, pi) so the principal value is
    already continuous.
    """
    b = _check_b(b)
    g, m = params.gamma, params.m
    t = np.asarray(t, dtype=float)
    if params.regime == UNDERDAMPED:
        wh = params.omega_hat
        d = (b + 0.5 * g * m) / (m * wh)
        u = wh * t
        k = np.floor(u / math.pi)
        r = u - k * math.pi
        return k * math.pi + np.angle(np.cos(r) + d * np.sin(r))
    C, S, _ = _basis(params, t)
    return np.angle(C + (b + 0.5 * g * m) / m * S)


def closed_form_action(params: OscillatorParams, x0: float, p0: float, t):
    """Action integral of the Lagrangian along the trajectory.

    Uses d/dt(x p) = 2 L on solutions of the equation of motion, so the
    integral is (x(t) p(t) - x0 p0) / 2.
    """
    pt = general_trajectory(params, x0, p0, t)
    return 0.5 * (pt.x * pt.p - x0 * p0)


def closed_form_point(params: OscillatorParams, seed: GaussianSeed, t: float) -> BundlePoint:
    pt = general_trajectory(params, seed.x0, seed.p0, t)
    jp = closed_form_variations(params, seed.b, t)
    return BundlePoint(
        t=float(t),
        x=float(pt.x),
        p=float(pt.p),
        w=complex(jp.w),
        z=complex(jp.z),
        S0=complex(0.5 * (pt.x * pt.p - seed.x0 * seed.p0)),
        argz=float(continuous_arg_z(params, seed.b, t)),
    )


def unwind_phase(z_samples) -> np.ndarray:
    """Continuous argument of an ordered complex sequence, starting from arg z[0].

    Raises ValueError when a sample is zero or when neighbours differ by
    pi/2 or more in phase: the sequence is then too coarse to follow the branch.
    """
    z = np.asarray(z_samples, dtype=complex)
    if z.size == 0:
        return np.zeros(0)
    if np.any(z == 0):
        raise ValueError("z vanishes on the sample grid (caustic)")
    steps = np.angle(z[1:] / z[:-1])
    if np.any(np.abs(steps) >= 0.5 * math.pi):
        i = int(np.argmax(np.abs(steps)))
        raise ValueError(
            f"phase jump {steps[i]:.3f} rad between samples {i} and {i + 1}; refine the grid")
    return np.concatenate([[np.angle(z[0])], np.angle(z[0]) + np.cumsum(steps)])


def _rhs(params: OscillatorParams):
    m, g, w0sq = params.m, params.gamma, params.omega0**2

    def f(t, y):
        x, p, wr, wi, zr, zi, _ = y
        eg = math.exp(g * t)
        h_pp = 1.0 / (m * eg)
        h_xx = eg * m * w0sq
        xdot = h_pp * p
        return [
            xdot,
            -h_xx * x,
            -h_xx * zr,
            -h_xx * zi,
            h_pp * wr,
            h_pp * wi,
            xdot * p - hamiltonian(params, x, p, t),
        ]

    return f


def integrate_bundle(params: OscillatorParams, seed: GaussianSeed, t_grid,
                     rtol: float = ODE_RTOL, atol: float = ODE_ATOL) -> TrajectoryBundle:
    """Integrate trajectory, variations and action with RK45, sampled on ``t_grid``."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    b = seed.b
    y0 = [seed.x0, seed.p0, b.real, b.imag, 1.0, 0.0, 0.0]
    if t_grid.size == 1:
        ys = np.array(y0, dtype=float)[:, None]
    else:
        sol = solve_ivp(_rhs(params), (0.0, t_grid[-1]), y0, method="RK45",
                        t_eval=t_grid, rtol=rtol, atol=atol)
        if sol.status != 0:
            raise RuntimeError(f"ODE integration failed: {sol.message}")
        ys = sol.y
    w = ys[2] + 1j * ys[3]
    z = ys[4] + 1j * ys[5]
    argz = unwind_phase(z)
    samples = tuple(
        BundlePoint(t=float(t_grid[i]), x=float(ys[0, i]), p=float(ys[1, i]),
                    w=complex(w[i]), z=complex(z[i]), S0=complex(ys[6, i]),
                    argz=float(argz[i]))
        for i in range(t_grid.size)
    )
    return TrajectoryBundle(params=params, seed=seed, samples=samples)
