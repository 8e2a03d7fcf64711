"""Closed-form averages, uncertainties and minimisation of the uncertainty product.

The uncertainty section works with Re b = 0 and Im b = mu m omega, where omega
is the real frequency of the regime (sqrt|gamma^2/4 - omega0^2|) and
theta = gamma / (2 omega).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import BundlePoint, GaussianSeed, closed_form_variations
from .model import CRITICAL, OVERDAMPED, UNDERDAMPED, OscillatorParams

log = logging.getLogger(__name__)

MINIMAL_RTOL = 1e-10
EXPANDED_RTOL = 1e-9


class NoMinimizingMu(ValueError):
    """No mu > 0 puts the uncertainty minimum at the requested time."""


@dataclass(frozen=True)
class UncertaintySetup:
    mu: float
    theta: float
    regime: str
    omega: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.regime not in (UNDERDAMPED, OVERDAMPED):
            raise ValueError("uncertainty formulas need a non-critical regime")

    @classmethod
    def from_params(cls, params: OscillatorParams, mu: float) -> "UncertaintySetup":
        if params.regime == CRITICAL:
            raise ValueError("critical damping has no real frequency; mu/theta parametrisation undefined")
        w = params.omega_hat
        return cls(mu=mu, theta=params.gamma / (2 * w), regime=params.regime, omega=w)

    def b(self, params: OscillatorParams) -> complex:
        return complex(0.0, self.mu * params.m * self.omega)

    def seed(self, params: OscillatorParams) -> GaussianSeed:
        return GaussianSeed.reference_preset(params, self.b(params))

    def check(self, params: OscillatorParams):
        if params.regime != self.regime:
            raise ValueError(f"setup is {self.regime} but parameters are {params.regime}")
        w = params.omega_hat
        if not math.isclose(self.omega, w, rel_tol=1e-12) or not math.isclose(
                self.theta, params.gamma / (2 * w), rel_tol=1e-12, abs_tol=1e-300):
            raise ValueError("setup omega/theta inconsistent with the oscillator parameters")


@dataclass(frozen=True)
class MomentReport:
    t: float
    x_mean: float
    p_mean: float
    x2: float
    p2: float
    energy: float
    kind: str


@dataclass(frozen=True)
class UncertaintyReport:
    t: float
    dx2: float
    dp2: float
    product: float
    floor: float
    g: float
    minimal: bool
    expanded_dx2: float
    expanded_dp2: float
    expanded_mismatch: float


def _energy(params: OscillatorParams, t, p2, x2):
    return (math.exp(-2 * params.gamma * t) * p2 / (2 * params.m)
            + 0.5 * params.m * params.omega0**2 * x2)


def moments_tcs(params: OscillatorParams, seed: GaussianSeed, point: BundlePoint, n: int) -> MomentReport:
    hbar, imb = params.hbar, seed.b.imag
    z2, w2 = abs(point.z) ** 2, abs(point.w) ** 2
    k = hbar / imb * (n + 0.5)
    x, p = point.x, point.p
    energy = _energy(params, point.t, p**2, x**2) + k * _energy(params, point.t, w2, z2)
    return MomentReport(t=point.t, x_mean=x, p_mean=p, x2=x**2 + k * z2, p2=p**2 + k * w2,
                        energy=energy, kind=f"tcs n={n}")


def moments_cs(params: OscillatorParams, seed: GaussianSeed, point: BundlePoint, alpha: complex) -> MomentReport:
    hbar, imb = params.hbar, seed.b.imag
    alpha = complex(alpha)
    s = math.sqrt(hbar / (2 * imb))
    z, w = complex(point.z), complex(point.w)
    xm = point.x - 1j * s * (alpha.conjugate() * z - alpha * z.conjugate())
    pm = point.p - 1j * s * (alpha.conjugate() * w - alpha * w.conjugate())
    xm, pm = xm.real, pm.real  # the brackets are purely imaginary
    k = hbar / (2 * imb)
    energy = _energy(params, point.t, pm**2, xm**2) + k * _energy(params, point.t, abs(w) ** 2, abs(z) ** 2)
    return MomentReport(t=point.t, x_mean=xm, p_mean=pm, x2=xm**2 + k * abs(z) ** 2,
                        p2=pm**2 + k * abs(w) ** 2, energy=energy, kind=f"cs alpha={alpha}")


def g_underdamped(theta, mu, omega, t):
    s = np.sin(omega * t)
    brace = (theta / mu) * (theta**2 + mu**2 + 1) * s**2 + (theta**2 - mu**2 + 1) / (2 * mu) * np.sin(2 * omega * t)
    return brace**2


def g_overdamped(theta, mu, omega, t):
    sh = np.sinh(omega * t)
    brace = (theta / mu) * (theta**2 + mu**2 - 1) * sh**2 + (theta**2 - mu**2 - 1) / (2 * mu) * np.sinh(2 * omega * t)
    return brace**2


def g_for(setup: UncertaintySetup, t):
    f = g_underdamped if setup.regime == UNDERDAMPED else g_overdamped
    return f(setup.theta, setup.mu, setup.omega, t)


def expanded_uncertainties(params: OscillatorParams, setup: UncertaintySetup, t, weight):
    """Long-hand (dx)^2, (dp)^2 in terms of theta, mu; ``weight`` is hbar(n+1/2) or hbar/2."""
    th, mu, w, m, g = setup.theta, setup.mu, setup.omega, params.m, params.gamma
    if setup.regime == UNDERDAMPED:
        s2, s2w = np.sin(w * t) ** 2, np.sin(2 * w * t)
        bx = 1 + s2 * (th**2 + mu**2 - 1) + th * s2w
        bp = 1 + s2 * (2 * th**2 + th**4 + 1 + mu**2 * th**2 - mu**2) / mu**2 - th * s2w
    else:
        s2, s2w = np.sinh(w * t) ** 2, np.sinh(2 * w * t)
        bx = 1 + s2 * (th**2 + mu**2 + 1) + th * s2w
        bp = 1 + s2 * (1 - 2 * th**2 + th**4 + mu**2 * th**2 + mu**2) / mu**2 - th * s2w
    dx2 = weight * np.exp(-g * t) / (mu * m * w) * bx
    dp2 = weight * np.exp(g * t) * mu * m * w * bp
    return dx2, dp2


def _uncertainties(params: OscillatorParams, setup: UncertaintySetup, t: float, weight: float) -> UncertaintyReport:
    setup.check(params)
    b = setup.b(params)
    jp = closed_form_variations(params, b, t)
    z2, w2 = abs(jp.z) ** 2, abs(jp.w) ** 2
    dx2 = weight * z2 / b.imag
    dp2 = weight * w2 / b.imag
    product = weight**2 * abs(jp.w * jp.z) ** 2 / b.imag**2
    floor = weight**2
    g = float(g_for(setup, t))
    ex_dx2, ex_dp2 = expanded_uncertainties(params, setup, t, weight)
    mismatch = max(abs(ex_dx2 - dx2) / dx2, abs(ex_dp2 - dp2) / dp2)
    if mismatch > EXPANDED_RTOL:
        log.warning("expanded uncertainty formulas deviate from |z|^2, |w|^2 forms by %.3e at t=%g",
                    mismatch, t)
    return UncertaintyReport(t=t, dx2=dx2, dp2=dp2, product=product, floor=floor, g=g,
                             minimal=abs(product - floor) <= MINIMAL_RTOL * floor,
                             expanded_dx2=float(ex_dx2), expanded_dp2=float(ex_dp2),
                             expanded_mismatch=float(mismatch))


def uncertainties_tcs(params: OscillatorParams, setup: UncertaintySetup, n: int, t: float) -> UncertaintyReport:
    return _uncertainties(params, setup, t, params.hbar * (n + 0.5))


def uncertainties_cs(params: OscillatorParams, setup: UncertaintySetup, t: float) -> UncertaintyReport:
    return _uncertainties(params, setup, t, 0.5 * params.hbar)


def minimization_times(params: OscillatorParams, setup: UncertaintySetup, k_max: int) -> list[float]:
    """Zeros of g(t), t >= 0, sorted.

    Underdamped: t1k = pi k / omega and t2k = (arctan R + pi k)/omega, k = 0..k_max,
    with the principal arctan and negative times dropped. When theta = 0 and
    mu = 1, g vanishes identically and only the t1k are listed.
    Overdamped: 0 and, if the arctanh argument is in (-1, 1) and gives t > 0, t02.
    """
    setup.check(params)
    th, mu, w = setup.theta, setup.mu, setup.omega
    if setup.regime == UNDERDAMPED:
        times = [math.pi * k / w for k in range(k_max + 1)]
        num = mu**2 - th**2 - 1
        den = th * (mu**2 + th**2 + 1)
        if den == 0:
            if num == 0:
                return times
            phase = math.copysign(0.5 * math.pi, num)
        else:
            phase = math.atan(num / den)
        times += [t for t in ((phase + math.pi * k) / w for k in range(k_max + 1)) if t >= 0]
        return sorted(set(times))
    times = [0.0]
    arg = (mu**2 - th**2 + 1) / (th * (mu**2 + th**2 - 1))
    if abs(arg) < 1:
        t02 = math.atanh(arg) / w
        if t02 > 0:
            times.append(t02)
    return times


def solve_mu_for_time(params: OscillatorParams, t: float) -> float:
    """mu > 0 for which g(t; mu) = 0.

    Zeroing the brace of g gives an equation linear in mu^2:
    underdamped mu^2 = (1 + theta^2)(1 + theta tan wt)/(1 - theta tan wt),
    overdamped  mu^2 = (theta^2 - 1)(1 + theta tanh wt)/(1 - theta tanh wt).
    At t1k (and t = 0) every mu works; the formula then returns the value that
    also places t on the second branch.
    """
    if params.regime == CRITICAL:
        raise ValueError("no mu parametrisation at critical damping")
    w = params.omega_hat
    th = params.gamma / (2 * w)
    if params.regime == UNDERDAMPED:
        c, s = math.cos(w * t), math.sin(w * t)
        if not abs(th * s) < abs(c):
            raise NoMinimizingMu(f"|theta tan(omega t)| = {abs(th * s / c) if c else math.inf:.6g} >= 1 at t={t}")
        mu2 = (1 + th**2) * (c + th * s) / (c - th * s)
    else:
        tt = math.tanh(w * t)
        if not abs(th * tt) < 1:
            raise NoMinimizingMu(f"|theta tanh(omega t)| = {abs(th * tt):.6g} >= 1 at t={t}")
        mu2 = (th**2 - 1) * (1 + th * tt) / (1 - th * tt)
    return math.sqrt(mu2)
