import math

import numpy as np
import pytest

from dampedtcs.dynamics import (
    GaussianSeed,
    closed_form_point,
    closed_form_variations,
    continuous_arg_z,
    general_trajectory,
    integrate_bundle,
    paper_trajectory,
    unwind_phase,
)
from dampedtcs.model import OscillatorParams, mechanical_energy

from conftest import CRIT, OVER, UNDER, random_params, random_seed

T10 = np.linspace(0.0, 10.0, 401)


def test_paper_trajectory_at_zero():
    for par in (UNDER, OVER, CRIT):
        pt = paper_trajectory(par, 0.0)
        assert pt.x == pytest.approx(1.0)
        assert pt.p == pytest.approx(-0.5 * par.m * par.gamma)


def test_paper_trajectory_undamped_quarter_period():
    pt = paper_trajectory(OscillatorParams(m=1, omega0=1, gamma=0), math.pi / 2)
    assert pt.x == pytest.approx(0.0, abs=1e-15)
    assert pt.p == pytest.approx(-1.0)


def test_paper_trajectory_matches_ode():
    par = OscillatorParams(m=1, omega0=2, gamma=1)
    seed = GaussianSeed.reference_preset(par, 1j)
    bundle = integrate_bundle(par, seed, [0.0, 0.35, 0.7])
    pt = paper_trajectory(par, 0.7)
    assert abs(pt.x - bundle[2].x) < 1e-9
    assert abs(pt.p - bundle[2].p) < 1e-9


@pytest.mark.parametrize("par", [UNDER, OVER, CRIT])
def test_general_trajectory_reduces_to_reference_preset(par):
    a = general_trajectory(par, 1.0, -0.5 * par.m * par.gamma, T10)
    b = paper_trajectory(par, T10)
    np.testing.assert_allclose(a.x, b.x, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(a.p, b.p, rtol=1e-12, atol=1e-13)


def test_general_trajectory_rest_solution():
    pt = general_trajectory(OVER, 0.0, 0.0, T10)
    assert np.all(pt.x == 0) and np.all(pt.p == 0)


@pytest.mark.parametrize("regime", ["underdamped", "overdamped", "critical"])
def test_general_trajectory_matches_ode_random(regime, rng):
    for _ in range(3):
        par, seed = random_params(rng, regime), random_seed(rng)
        t = np.sort(np.concatenate([T10, rng.uniform(0, 10, 6)]))
        bundle = integrate_bundle(par, seed, t)
        pt = general_trajectory(par, seed.x0, seed.p0, t)
        np.testing.assert_allclose(bundle.column("x"), pt.x, atol=1e-9, rtol=0)
        np.testing.assert_allclose(bundle.column("p"), pt.p, atol=1e-9, rtol=0)


def test_classical_ode_residual_by_finite_differences():
    t = np.linspace(0.0, 6.0, 6001)
    for par in (UNDER, OVER, CRIT):
        x = general_trajectory(par, 0.8, 0.3, t).x
        h = t[1] - t[0]
        xd = (x[2:] - x[:-2]) / (2 * h)
        xdd = (x[2:] - 2 * x[1:-1] + x[:-2]) / h**2
        res = xdd + par.gamma * xd + par.omega0**2 * x[1:-1]
        assert np.max(np.abs(res)) < 1e-6


def test_variations_initial_values():
    for par in (UNDER, OVER, CRIT):
        b = 0.4 + 1.3j
        jp = closed_form_variations(par, b, 0.0)
        assert jp.z == pytest.approx(1.0)
        assert jp.w == pytest.approx(b)


def test_variations_undamped_unit_circle():
    par = OscillatorParams(m=1, omega0=1, gamma=0)
    t = np.linspace(0, 10, 57)
    jp = closed_form_variations(par, 1j, t)
    np.testing.assert_allclose(jp.z, np.exp(1j * t), atol=1e-14)
    np.testing.assert_allclose(jp.w, 1j * np.exp(1j * t), atol=1e-14)
    bundle = integrate_bundle(par, GaussianSeed(1j, 1.0, 0.0), t)
    np.testing.assert_allclose(bundle.column("z"), np.exp(1j * t), atol=1e-10)


@pytest.mark.parametrize("regime", ["underdamped", "overdamped", "critical"])
def test_symplectic_invariant(regime, rng):
    for _ in range(5):
        par, seed = random_params(rng, regime), random_seed(rng)
        jp = closed_form_variations(par, seed.b, T10)
        im = (jp.w * np.conj(jp.z)).imag
        assert np.max(np.abs(im - seed.b.imag)) <= 1e-10 * seed.b.imag
        assert np.min(np.abs(jp.z)) > 0


def test_variations_reject_bad_b():
    with pytest.raises(ValueError):
        closed_form_variations(UNDER, 1.0 + 0j, 1.0)
    with pytest.raises(ValueError):
        closed_form_variations(UNDER, -1j, 1.0)


def test_no_imaginary_leakage_underdamped():
    pt = paper_trajectory(UNDER, T10)
    assert np.isrealobj(pt.x) and np.isrealobj(pt.p)


def test_regime_continuity_across_critical():
    g = 1.0
    t = 2.3
    b = 0.2 + 0.9j
    crit = OscillatorParams(m=1, omega0=g / 2, gamma=g)
    ref = closed_form_variations(crit, b, t)
    for w2 in (1e-12, -1e-12):
        near = OscillatorParams(m=1, omega0=math.sqrt(g**2 / 4 - w2), gamma=g)
        jp = closed_form_variations(near, b, t)
        assert abs(jp.z - ref.z) < 1e-6 and abs(jp.w - ref.w) < 1e-6
    # just outside the critical window the regime formulas take over and stay continuous
    for w2 in (1e-6, -1e-6):
        near = OscillatorParams(m=1, omega0=math.sqrt(g**2 / 4 - w2), gamma=g)
        assert near.regime != "critical"
        jp = closed_form_variations(near, b, t)
        assert abs(jp.z - ref.z) < 1e-5 and abs(jp.w - ref.w) < 1e-5


def test_bundle_unit_modulus_without_damping():
    par = OscillatorParams(m=1.5, omega0=0.7, gamma=0)
    seed = GaussianSeed(b=1j * par.m * par.omega0)
    bundle = integrate_bundle(par, seed, T10)
    np.testing.assert_allclose(np.abs(bundle.column("z")), 1.0, atol=1e-10)


@pytest.mark.parametrize("par", [UNDER, OVER, CRIT])
def test_bundle_matches_closed_forms(par):
    seed = GaussianSeed(b=0.3 + 0.8j, x0=0.4, p0=-0.9)
    bundle = integrate_bundle(par, seed, T10)
    for s in bundle.samples:
        c = closed_form_point(par, seed, s.t)
        assert max(abs(s.x - c.x), abs(s.p - c.p), abs(s.w - c.w), abs(s.z - c.z)) < 1e-8
        assert abs(s.S0 - c.S0) < 1e-8
        assert abs(s.argz - c.argz) < 1e-8


def test_bundle_action_is_real_and_starts_at_zero():
    bundle = integrate_bundle(UNDER, GaussianSeed(1j, 1.0, 0.2), T10)
    S0 = bundle.column("S0")
    assert S0[0] == 0
    assert np.max(np.abs(S0.imag)) <= 1e-10


def test_bundle_energy_monotone():
    seed = GaussianSeed(1j, 1.0, 0.5)
    for par in (UNDER, OVER, CRIT):
        b = integrate_bundle(par, seed, T10)
        E = mechanical_energy(par, b.column("x"), b.column("p"), b.t)
        assert np.all(np.diff(E) <= 1e-12 * E[0])


def test_bundle_grid_errors():
    seed = GaussianSeed(1j)
    with pytest.raises(ValueError):
        integrate_bundle(UNDER, seed, [0.1, 0.2])
    with pytest.raises(ValueError):
        integrate_bundle(UNDER, seed, [0.0, 0.5, 0.4])
    with pytest.raises(ValueError):
        integrate_bundle(UNDER, seed, [0.0, 0.5, 0.5])


def test_unwind_phase_constant():
    np.testing.assert_array_equal(unwind_phase([1, 1, 1]), [0, 0, 0])


def test_unwind_phase_winding():
    t = np.linspace(0, 4 * np.pi, 200)
    arg = unwind_phase(np.exp(1j * t))
    assert arg[-1] == pytest.approx(4 * np.pi)
    np.testing.assert_allclose(arg, t, atol=1e-12)


def test_unwind_phase_rejects_coarse_or_zero():
    with pytest.raises(ValueError):
        unwind_phase(np.exp(1j * np.array([0, 2.0])))
    with pytest.raises(ValueError):
        unwind_phase([1, 0, 1])


def test_arg_z_monotone_for_damped_oscillator():
    par = UNDER
    seed = GaussianSeed(b=1j * par.m * par.omega_hat)
    t = np.linspace(0, 20, 2001)
    bundle = integrate_bundle(par, seed, t)
    assert np.all(np.diff(bundle.column("argz")) > 0)
    np.testing.assert_allclose(continuous_arg_z(par, seed.b, t), bundle.column("argz"), atol=1e-9)
    # one pi per half period
    half = math.pi / par.omega_hat
    assert continuous_arg_z(par, seed.b, 3 * half) == pytest.approx(3 * math.pi)
