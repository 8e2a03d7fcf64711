"""Named verification checks, grouped into suites for the ``verify`` command."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import observables as obs
from .dynamics import GaussianSeed, closed_form_point, closed_form_variations, integrate_bundle
from .model import CRITICAL, OscillatorParams, mechanical_energy
from .states import LadderContext, PolyGaussian, apply_lower, apply_raise, coherent, fock
from .verify import (
    crosscheck_moments,
    fock_family,
    gram_matrix,
    inner_product,
    norm,
    schrodinger_residual,
)

SUITES = ("all", "dynamics", "states", "observables")


@dataclass(frozen=True)
class Check:
    name: str
    max_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.max_error) and self.max_error < self.tol)

    def to_dict(self) -> dict:
        return {"name": self.name, "max_error": float(self.max_error), "tol": self.tol, "pass": self.passed}


@dataclass
class VerifyReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "checks": [c.to_dict() for c in self.checks], "pass": self.passed}


def dynamics_checks(params: OscillatorParams, seed: GaussianSeed, t_max: float, samples: int) -> list[Check]:
    tg = np.linspace(0.0, t_max, max(samples, 2))
    bundle = integrate_bundle(params, seed, tg)
    pts = [closed_form_point(params, seed, t) for t in tg]
    imb = seed.b.imag
    symp = max(abs((p.w * p.z.conjugate()).imag - imb) / imb for p in pts)
    dev = max(max(abs(a.x - c.x), abs(a.p - c.p), abs(a.w - c.w), abs(a.z - c.z))
              for a, c in zip(bundle.samples, pts))
    s0 = max(abs(a.S0 - c.S0) for a, c in zip(bundle.samples, pts))
    argz = max(abs(a.argz - c.argz) for a, c in zip(bundle.samples, pts))
    E = mechanical_energy(params, np.array([p.x for p in pts]), np.array([p.p for p in pts]), tg)
    if params.gamma > 0:
        energy = max(0.0, float(np.max(np.diff(E)))) / max(E[0], 1e-300)
    else:
        energy = float(np.max(np.abs(E - E[0]))) / max(E[0], 1e-300)
    return [
        Check("symplectic_invariant", symp, 1e-10),
        Check("closed_form_vs_ode", dev, 1e-8),
        Check("action_closed_form_vs_ode", s0, 1e-8),
        Check("argz_closed_form_vs_unwound", argz, 1e-8),
        Check("energy_dissipation", energy, 1e-10),
    ]


def _commutator_error(state: PolyGaussian, ctx: LadderContext) -> float:
    lr = apply_lower(apply_raise(state, ctx), ctx)
    rl = apply_raise(apply_lower(state, ctx), ctx)
    diff = (lr - rl - state).coeffs
    return float(np.max(np.abs(diff)) / np.max(np.abs(state.coeffs)))


def states_checks(params: OscillatorParams, seed: GaussianSeed, t_max: float,
                  perturb_w: float = 0.0) -> list[Check]:
    times = np.linspace(0.1 * t_max, t_max, 5)
    factor = 1.0 + perturb_w
    residual = max(schrodinger_residual(fock_family(params, seed, n, factor), params, t).residual
                   for n in (0, 1, 3, 5) for t in times)
    gram = max(gram_matrix(params, seed, t, 6)[1] for t in (0.0, 0.5 * t_max, t_max))
    comm, norm_err, eig, cs_norm = 0.0, 0.0, 0.0, 0.0
    rng = np.random.default_rng(7)
    for t in times:
        pt = closed_form_point(params, seed, t)
        ctx = LadderContext.from_point(params, seed, pt)
        for n in range(7):
            s = fock(params, seed, pt, n)
            norm_err = max(norm_err, abs(norm(s) - 1.0))
        poly = PolyGaussian(s.core, rng.normal(size=9) + 1j * rng.normal(size=9))
        comm = max(comm, _commutator_error(poly, ctx))
        for alpha in (1 + 0.5j, 2j, -1.5 + 1.0j):
            cs = coherent(params, seed, pt, alpha)
            eig = max(eig, norm(apply_lower(cs, ctx) - cs * alpha))
            cs_norm = max(cs_norm, abs(inner_product(cs, cs).real - 1.0))
    return [
        Check("schrodinger_residual", residual, 1e-6),
        Check("gram_matrix_identity", gram, 1e-8),
        Check("bose_commutator", comm, 1e-12),
        Check("norm_conservation", norm_err, 1e-8),
        Check("coherent_eigenvalue", eig, 1e-8),
        Check("coherent_norm", cs_norm, 1e-8),
    ]


def observables_checks(params: OscillatorParams, seed: GaussianSeed, t_max: float, mu: float) -> list[Check]:
    times = (0.0, 0.13 * t_max, 0.4 * t_max)
    tcs = max(crosscheck_moments(params, seed, t, n=n)["max_error"] for n in range(5) for t in times)
    cs = max(crosscheck_moments(params, seed, t, alpha=a)["max_error"]
             for a in (0.7, 1 + 1j, -2j) for t in times)
    checks = [Check("moments_tcs_vs_quadrature", tcs, 1e-7),
              Check("moments_cs_vs_quadrature", cs, 1e-7)]
    if params.regime == CRITICAL:
        return checks
    setup = obs.UncertaintySetup.from_params(params, mu)
    ts = np.linspace(0.0, t_max, 101)
    prod, expanded, floor_viol, ratio = 0.0, 0.0, 0.0, 0.0
    for t in ts:
        for n in (0, 2):
            r = obs.uncertainties_tcs(params, setup, n, t)
            prod = max(prod, abs(r.product - r.floor * (1 + r.g)) / r.product)
            expanded = max(expanded, r.expanded_mismatch)
            floor_viol = max(floor_viol, (r.floor - r.product) / r.floor)
        c = obs.uncertainties_cs(params, setup, t)
        r2 = obs.uncertainties_tcs(params, setup, 2, t)
        ratio = max(ratio, abs(r2.product / c.product - 25.0) / 25.0)
    mins = obs.minimization_times(params, setup, 4)
    floor_cs = 0.25 * params.hbar**2
    gmin = max(float(obs.g_for(setup, t)) for t in mins)
    pmin = max(abs(obs.uncertainties_cs(params, setup, t).product - floor_cs) / floor_cs for t in mins)
    w = setup.omega
    th = setup.theta
    if setup.regime == "underdamped":
        # admissible window around 0 for |theta tan(wt)| < 1
        lim = math.atan(1 / th) / w if th > 0 else 0.5 * math.pi / w
    else:
        lim = math.atanh(min(1 / th, 1 - 1e-16)) / w
    mu_err = 0.0
    for t in np.linspace(0.0, 0.99 * lim, 25):
        m_ = obs.solve_mu_for_time(params, t)
        mu_err = max(mu_err, float(obs.g_for(obs.UncertaintySetup.from_params(params, m_), t)))
    checks += [
        Check("product_equals_floor_times_1_plus_g", prod, 1e-10),
        Check("expanded_vs_compact_uncertainties", expanded, 1e-9),
        Check("heisenberg_floor", max(floor_viol, 0.0), 1e-12),
        Check("tcs_cs_product_ratio", ratio, 1e-12),
        Check("minimization_times_g", gmin, 1e-12),
        Check("minimization_times_product", pmin, 1e-10),
        Check("mu_solver", mu_err, 1e-12),
    ]
    return checks


def run_suite(params: OscillatorParams, seed: GaussianSeed, suite: str = "all", t_max: float = 10.0,
              samples: int = 201, mu: float = 1.0, perturb_w: float = 0.0) -> VerifyReport:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    report = VerifyReport(suite=suite)
    if suite in ("all", "dynamics"):
        report.checks += dynamics_checks(params, seed, t_max, samples)
    if suite in ("all", "states"):
        report.checks += states_checks(params, seed, t_max, perturb_w)
    if suite in ("all", "observables"):
        report.checks += observables_checks(params, seed, t_max, mu)
    return report
