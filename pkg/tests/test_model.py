import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dampedtcs.dynamics import GaussianSeed, general_trajectory
from dampedtcs.model import (
    CRITICAL,
    OVERDAMPED,
    UNDERDAMPED,
    OscillatorParams,
    hamiltonian,
    hessian_along,
    lagrangian,
    mechanical_energy,
)

pos = st.floats(0.1, 5.0)
nonneg = st.floats(0.0, 3.0)
coord = st.floats(-3.0, 3.0)
time_ = st.floats(-2.0, 2.0)


def test_hamiltonian_trivial_values():
    p = OscillatorParams(m=1, omega0=1, gamma=0)
    assert hamiltonian(p, 0.0, 0.0, 3.3) == 0.0
    assert hamiltonian(p, 1.0, 1.0, 0.0) == 1.0


def test_hamiltonian_generic_value():
    # frozen from exp(-0.65)*1.21/4 + 0.5*exp(0.65)*2*9*0.49
    p = OscillatorParams(m=2, omega0=3, gamma=0.5)
    assert hamiltonian(p, 0.7, -1.1, 1.3) == pytest.approx(8.605453903421488, rel=1e-14)


def test_lagrangian_trivial_values():
    p = OscillatorParams(m=1, omega0=1, gamma=0)
    assert lagrangian(p, 0.0, 0.0, 0.0) == 0.0
    assert lagrangian(p, 0.0, 1.0, 0.0) == 0.5


@settings(max_examples=60, deadline=None)
@given(m=pos, w0=nonneg, g=nonneg, x=coord, v=coord, t=time_)
def test_legendre_transform_reproduces_hamiltonian(m, w0, g, x, v, t):
    par = OscillatorParams(m=m, omega0=w0, gamma=g)
    p = math.exp(g * t) * m * v  # dL/dv
    h = p * v - lagrangian(par, x, v, t)
    assert h == pytest.approx(hamiltonian(par, x, p, t), rel=1e-12, abs=1e-12)


def test_mechanical_energy_matches_hamiltonian_without_damping_or_at_t0():
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, p, t = rng.normal(size=3)
        free = OscillatorParams(m=1.4, omega0=0.8, gamma=0.0)
        assert mechanical_energy(free, x, p, t) == pytest.approx(hamiltonian(free, x, p, t), rel=1e-14)
        damped = OscillatorParams(m=1.4, omega0=0.8, gamma=0.6)
        assert mechanical_energy(damped, x, p, 0.0) == pytest.approx(hamiltonian(damped, x, p, 0.0), rel=1e-14)
    assert mechanical_energy(damped, 0.0, 0.0, 1.0) == 0.0
    assert mechanical_energy(damped, 0.3, 0.4, 1.0) != pytest.approx(hamiltonian(damped, 0.3, 0.4, 1.0))


def test_energy_dissipation_rate_by_finite_differences():
    par = OscillatorParams(m=1.2, omega0=1.1, gamma=0.5)
    t = np.linspace(0.0, 8.0, 4001)
    pt = general_trajectory(par, 0.7, -0.4, t)
    E = mechanical_energy(par, pt.x, pt.p, t)
    dE = np.gradient(E, t, edge_order=2)
    expected = -par.gamma * np.exp(-2 * par.gamma * t) * pt.p**2 / par.m
    assert np.max(np.abs(dE - expected)[5:-5]) < 1e-5
    assert np.all(np.diff(E) <= 1e-15)


def test_hessian_trivial():
    h = hessian_along(OscillatorParams(m=1, omega0=1, gamma=0), 0.0)
    assert (h.h_xx, h.h_xp, h.h_pp) == (1.0, 0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(m=pos, w0=st.floats(0.1, 3.0), g=nonneg, t=time_, x=coord, p=coord)
def test_hessian_matches_second_differences(m, w0, g, t, x, p):
    par = OscillatorParams(m=m, omega0=w0, gamma=g)
    h = hessian_along(par, t)
    d = 1e-3
    H = lambda a, b: hamiltonian(par, a, b, t)  # noqa: E731
    hxx = (H(x + d, p) - 2 * H(x, p) + H(x - d, p)) / d**2
    hpp = (H(x, p + d) - 2 * H(x, p) + H(x, p - d)) / d**2
    hxp = (H(x + d, p + d) - H(x + d, p - d) - H(x - d, p + d) + H(x - d, p - d)) / (4 * d**2)
    scale = max(h.h_xx, h.h_pp)
    assert abs(hxx - h.h_xx) <= 1e-6 * scale
    assert abs(hpp - h.h_pp) <= 1e-6 * scale
    assert abs(hxp) <= 1e-6 * scale
    assert h.h_pp > 0
    assert h.h_xx * h.h_pp == pytest.approx(w0**2, rel=1e-12)


def test_regime_classification():
    assert OscillatorParams(omega0=1.0, gamma=0.5).regime == UNDERDAMPED
    assert OscillatorParams(omega0=0.2, gamma=1.0).regime == OVERDAMPED
    assert OscillatorParams(omega0=0.5, gamma=1.0).regime == CRITICAL
    assert OscillatorParams(omega0=0.5, gamma=1.0).omega_hat == 0.0
    assert OscillatorParams(omega0=1.0, gamma=1.2).omega_sq == pytest.approx(0.36 - 1.0)


@pytest.mark.parametrize("kw", [dict(m=0), dict(m=-1), dict(hbar=0), dict(omega0=-1), dict(gamma=-0.1),
                                dict(m=float("nan"))])
def test_params_reject_invalid(kw):
    with pytest.raises(ValueError):
        OscillatorParams(**kw)


def test_seed_rejects_non_positive_imaginary_part():
    with pytest.raises(ValueError):
        GaussianSeed(b=1.0)
    with pytest.raises(ValueError):
        GaussianSeed(b=1 - 0.5j)
