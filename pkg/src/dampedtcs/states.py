"""Polynomial-times-Gaussian states: vacuum, ladder operators, Fock tower, coherent states.

Every state is stored as P(xi) * exp(ln N + ln Phi + i S / hbar) with
xi = x - x(t) and S = S0 + p(t) xi + Q xi^2 / 2, Q = w/z. Ladder operators,
x and p act on the polynomial P only; the Gaussian core is shared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .dynamics import BundlePoint, GaussianSeed
from .model import OscillatorParams

MAX_FOCK = 64


@dataclass(frozen=True)
class GaussianCore:
    t: float
    x: float
    p: float
    quad: complex
    S0: complex
    phi_log: complex
    norm_log: float
    hbar: float

    @classmethod
    def from_point(cls, params: OscillatorParams, seed: GaussianSeed,
                   point: BundlePoint) -> "GaussianCore":
        hbar = params.hbar
        z = complex(point.z)
        return cls(
            t=point.t,
            x=point.x,
            p=point.p,
            quad=complex(point.w) / z,
            S0=complex(point.S0),
            # z^{-1/2} on the branch fixed by the unwound argument of z
            phi_log=-0.5 * complex(math.log(abs(z)), point.argz),
            # unit-norm normalisation: N = (Im b / (pi hbar))^{1/4}
            norm_log=0.25 * math.log(seed.b.imag / (math.pi * hbar)),
            hbar=hbar,
        )

    @property
    def width(self) -> float:
        """Standard deviation of |psi|^2 for the bare Gaussian, sqrt(hbar / (2 Im Q))."""
        return math.sqrt(self.hbar / (2.0 * self.quad.imag))


@dataclass(frozen=True, eq=False)
class PolyGaussian:
    core: GaussianCore
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        object.__setattr__(self, "coeffs", c)

    @property
    def t(self) -> float:
        return self.core.t

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    def _same_core(self, other: "PolyGaussian"):
        if other.core != self.core:
            raise ValueError("states live on different Gaussian cores")

    def __add__(self, other: "PolyGaussian") -> "PolyGaussian":
        self._same_core(other)
        return PolyGaussian(self.core, npoly.polyadd(self.coeffs, other.coeffs))

    def __sub__(self, other: "PolyGaussian") -> "PolyGaussian":
        self._same_core(other)
        return PolyGaussian(self.core, npoly.polysub(self.coeffs, other.coeffs))

    def __mul__(self, k: complex) -> "PolyGaussian":
        return PolyGaussian(self.core, self.coeffs * k)

    __rmul__ = __mul__

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class LadderContext:
    t: float
    w: complex
    z: complex
    im_b: float
    hbar: float

    def __post_init__(self):
        if not (self.im_b > 0 and self.hbar > 0):
            raise ValueError("ladder normalisation requires Im b > 0 and hbar > 0")

    @classmethod
    def from_point(cls, params: OscillatorParams, seed: GaussianSeed,
                   point: BundlePoint) -> "LadderContext":
        return cls(t=point.t, w=complex(point.w), z=complex(point.z),
                   im_b=seed.b.imag, hbar=params.hbar)

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(2.0 * self.hbar * self.im_b)


def _der(c: np.ndarray) -> np.ndarray:
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return npoly.polyder(c)


def _check_ctx(state: PolyGaussian, ctx: LadderContext):
    if ctx.t != state.core.t:
        raise ValueError(f"ladder context at t={ctx.t} applied to state at t={state.core.t}")


def vacuum(params: OscillatorParams, seed: GaussianSeed, point: BundlePoint) -> PolyGaussian:
    return PolyGaussian(GaussianCore.from_point(params, seed, point), np.ones(1, dtype=complex))


def apply_raise(state: PolyGaussian, ctx: LadderContext) -> PolyGaussian:
    """Creation operator: P -> c [-i hbar z* P' + (2i Im b / z) xi P].

    The xi*P coefficient is z* Q - w* = 2i Im(w z*)/z; the conserved value Im b
    is used instead of the difference, which cancels badly once |w z| >> Im b.
    """
    _check_ctx(state, ctx)
    P = state.coeffs
    kappa = 2j * ctx.im_b / ctx.z
    new = npoly.polyadd(-1j * ctx.hbar * ctx.z.conjugate() * _der(P), kappa * npoly.polymulx(P))
    return PolyGaussian(state.core, ctx.c * new)


def apply_lower(state: PolyGaussian, ctx: LadderContext) -> PolyGaussian:
    """Annihilation operator: P -> c (-i hbar z P').

    The xi*P term carries z Q - w, which is zero because Q = w/z by construction.
    """
    _check_ctx(state, ctx)
    return PolyGaussian(state.core, ctx.c * (-1j * ctx.hbar * ctx.z) * _der(state.coeffs))


def fock(params: OscillatorParams, seed: GaussianSeed, point: BundlePoint, n: int,
         max_n: int = MAX_FOCK) -> PolyGaussian:
    if n < 0 or int(n) != n:
        raise ValueError(f"Fock level must be a non-negative integer, got {n}")
    if n > max_n:
        raise ValueError(f"Fock level {n} exceeds the configured maximum {max_n}")
    ctx = LadderContext.from_point(params, seed, point)
    state = vacuum(params, seed, point)
    for k in range(int(n)):
        state = apply_raise(state, ctx) * (1.0 / math.sqrt(k + 1))
    return state


def min_truncation(alpha: complex) -> int:
    a2 = abs(alpha) ** 2
    return math.ceil(a2 + 10.0 * math.sqrt(a2 + 1.0))


def default_truncation(alpha: complex, eps: float = 1e-13) -> int:
    """Smallest K >= min_truncation whose last kept amplitude times |alpha| is below eps.

    a|alpha>_K - alpha|alpha>_K = -alpha c_K |K>, so this bounds the eigenvalue residual.
    """
    a = abs(alpha)
    K = min_truncation(alpha)
    if a == 0:
        return K
    while math.log(a) - 0.5 * a * a + K * math.log(a) - 0.5 * math.lgamma(K + 1) > math.log(eps):
        K += 1
    return K


def coherent_tail(alpha: complex, truncation: int) -> float:
    """Probability weight exp(-|a|^2) sum_{n > K} |a|^{2n}/n! dropped by truncation."""
    a2 = abs(alpha) ** 2
    if a2 == 0:
        return 0.0
    n = truncation + 1
    term = math.exp(-a2 + n * math.log(a2) - math.lgamma(n + 1))
    tail = 0.0
    while term > 0 and term > 1e-18 * tail:
        tail += term
        n += 1
        term *= a2 / n
    return tail


def coherent(params: OscillatorParams, seed: GaussianSeed, point: BundlePoint, alpha: complex,
             truncation: int | None = None) -> PolyGaussian:
    """Truncated Fock series exp(-|a|^2/2) sum_n a^n / sqrt(n!) |n>."""
    alpha = complex(alpha)
    need = min_truncation(alpha)
    if truncation is None:
        truncation = default_truncation(alpha)
    if truncation < need:
        raise ValueError(f"truncation {truncation} below the tail rule minimum {need} for alpha={alpha}")
    ctx = LadderContext.from_point(params, seed, point)
    term = vacuum(params, seed, point)
    total = term.coeffs.copy()
    if alpha != 0:
        for n in range(truncation):
            # a^{n+1}/(n+1)! (a+)^{n+1}|0>
            term = apply_raise(term, ctx) * (alpha / (n + 1))
            total = npoly.polyadd(total, term.coeffs)
    return PolyGaussian(term.core, math.exp(-0.5 * abs(alpha) ** 2) * total)


def log_prefactor(core: GaussianCore, xi):
    S = core.S0 + core.p * xi + 0.5 * core.quad * xi**2
    return core.norm_log + core.phi_log + 1j * S / core.hbar


def evaluate(state: PolyGaussian, x):
    xi = np.asarray(x, dtype=float) - state.core.x
    return npoly.polyval(xi, state.coeffs) * np.exp(log_prefactor(state.core, xi))


def position_operator_apply(state: PolyGaussian) -> PolyGaussian:
    P = state.coeffs
    return PolyGaussian(state.core, npoly.polyadd(state.core.x * P, npoly.polymulx(P)))


def momentum_operator_apply(state: PolyGaussian) -> PolyGaussian:
    """-i hbar d/dx acting on P e^{iS/hbar}: (-i hbar P' + (p + Q xi) P)."""
    core = state.core
    P = state.coeffs
    new = npoly.polyadd(-1j * core.hbar * _der(P), core.p * P)
    new = npoly.polyadd(new, core.quad * npoly.polymulx(P))
    return PolyGaussian(core, new)


def _ladder_combination(state: PolyGaussian, ctx: LadderContext, u: complex, centre: float):
    # centre - i (2 Im b / hbar)^{-1/2} (u a+ - u* a)
    k = math.sqrt(ctx.hbar / (2.0 * ctx.im_b))
    up = apply_raise(state, ctx) * u
    down = apply_lower(state, ctx) * u.conjugate()
    return state * centre + (up - down) * (-1j * k)


def position_via_ladder(state: PolyGaussian, ctx: LadderContext) -> PolyGaussian:
    return _ladder_combination(state, ctx, ctx.z, state.core.x)


def momentum_via_ladder(state: PolyGaussian, ctx: LadderContext) -> PolyGaussian:
    return _ladder_combination(state, ctx, ctx.w, state.core.p)


def with_perturbed_w(point: BundlePoint, factor: float) -> BundlePoint:
    """Copy of ``point`` with w scaled: a deliberate fault for sensitivity checks."""
    return replace(point, w=point.w * factor)
