"""Command-line front end.

    dampedtcs trajectory  --gamma 0.3 --t-max 10 --samples 201 --oracle
    dampedtcs uncertainty --gamma 0.3 --mu 1.5 --out unc.csv
    dampedtcs verify --suite all

Exit codes: 0 success, 1 verification failure, 2 usage/config error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import observables as obs
from .dynamics import (
    GaussianSeed,
    closed_form_point,
    integrate_bundle,
)
from .model import CRITICAL, OscillatorParams, mechanical_energy
from .states import coherent, evaluate, fock
from .suite import SUITES, run_suite

TRAJECTORY_COLUMNS = ["t", "x", "p", "E", "w_re", "w_im", "z_re", "z_im", "argz", "S0"]
UNCERTAINTY_COLUMNS = ["t", "dx2_tcs", "dp2_tcs", "dx2_cs", "dp2_cs", "product_tcs", "product_cs", "g", "minimal"]
SCENARIOS = ("trajectory", "states", "uncertainty", "minima", "solve-mu", "verify")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    scenario: str = "trajectory"
    m: float = 1.0
    omega0: float = 1.0
    gamma: float = 0.0
    hbar: float = 1.0
    mu: float | None = None
    b_re: float | None = None
    b_im: float | None = None
    x0: float | None = None
    p0: float | None = None
    t_max: float = 10.0
    samples: int = 201
    out: str | None = None
    format: str = "csv"
    oracle: bool = False
    n: int = 0
    alpha_re: float | None = None
    alpha_im: float | None = None
    t: float = 0.0
    k_max: int = 3
    suite: str = "all"
    perturb: tuple | None = None

    @property
    def params(self) -> OscillatorParams:
        try:
            return OscillatorParams(m=self.m, omega0=self.omega0, gamma=self.gamma, hbar=self.hbar)
        except ValueError as e:
            raise ConfigError(str(e)) from None

    def validate(self):
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.mu is not None and (self.b_re is not None or self.b_im is not None):
            raise ConfigError("--mu and --b-re/--b-im are mutually exclusive")
        if self.mu is not None and not self.mu > 0:
            raise ConfigError("mu must be positive")
        if self.b_re is not None and self.b_im is None:
            raise ConfigError("--b-re needs --b-im")
        if self.b_im is not None and not self.b_im > 0:
            raise ConfigError("b_im must be positive")
        self.params

    def resolved_mu(self) -> float:
        """mu for the uncertainty scenarios (Re b must vanish)."""
        p = self.params
        if p.regime == CRITICAL:
            raise ConfigError("mu/theta parametrisation is undefined at critical damping")
        if self.b_im is not None:
            if self.b_re not in (None, 0.0):
                raise ConfigError("uncertainty formulas require Re b = 0")
            return self.b_im / (p.m * p.omega_hat)
        return 1.0 if self.mu is None else self.mu

    def seed(self) -> GaussianSeed:
        p = self.params
        if self.b_im is not None:
            b = complex(self.b_re or 0.0, self.b_im)
        else:
            if p.regime == CRITICAL:
                raise ConfigError("critical damping: give the width with --b-im (mu needs a non-zero frequency)")
            b = complex(0.0, (1.0 if self.mu is None else self.mu) * p.m * p.omega_hat)
        x0 = 1.0 if self.x0 is None else self.x0
        p0 = -0.5 * p.m * p.gamma if self.p0 is None else self.p0
        return GaussianSeed(b=b, x0=x0, p0=p0)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    if "bool" in kind:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind.startswith("int"):
        return int(raw)
    if "float" in kind:
        return float(raw)
    if key == "perturb":
        name, val = raw.split()
        return (name, float(val))
    return raw.strip()


def load_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES or key == "scenario":
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return out


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(f"{float(v):.17g}")


def _meta(cfg: RunConfig) -> dict:
    meta = {"scenario": cfg.scenario, "m": cfg.m, "omega0": cfg.omega0, "gamma": cfg.gamma, "hbar": cfg.hbar}
    try:
        b = cfg.seed().b
        meta.update(b_re=b.real, b_im=b.imag)
    except ConfigError:
        pass
    meta["regime"] = cfg.params.regime
    return meta


def render(columns, rows, meta: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"meta": {k: (_json_value(v) if not isinstance(v, str) else v) for k, v in meta.items()},
               "columns": list(columns),
               "rows": [[_json_value(v) for v in row] for row in rows]}
        return json.dumps(doc, indent=2) + "\n"
    lines = [f"# {k}={v if isinstance(v, str) else _fmt(v)}" for k, v in meta.items()]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as e:
        raise ConfigError(f"cannot write {out}: {e}") from None


def run_trajectory(cfg: RunConfig):
    p, seed = cfg.params, cfg.seed()
    tg = np.linspace(0.0, cfg.t_max, cfg.samples)
    pts = [closed_form_point(p, seed, t) for t in tg]
    columns = list(TRAJECTORY_COLUMNS)
    rows = [[q.t, q.x, q.p, mechanical_energy(p, q.x, q.p, q.t), q.w.real, q.w.imag,
             q.z.real, q.z.imag, q.argz, q.S0.real] for q in pts]
    if cfg.oracle:
        bundle = integrate_bundle(p, seed, tg)
        columns.append("oracle_dev")
        for row, a, c in zip(rows, bundle.samples, pts):
            row.append(max(abs(a.x - c.x), abs(a.p - c.p), abs(a.w - c.w), abs(a.z - c.z)))
    return columns, rows


def run_states(cfg: RunConfig):
    p, seed = cfg.params, cfg.seed()
    pt = closed_form_point(p, seed, cfg.t)
    if cfg.alpha_re is not None or cfg.alpha_im is not None:
        state = coherent(p, seed, pt, complex(cfg.alpha_re or 0.0, cfg.alpha_im or 0.0))
    else:
        if cfg.n < 0:
            raise ConfigError("n must be non-negative")
        state = fock(p, seed, pt, cfg.n)
    half = (6.0 + math.sqrt(2 * state.degree + 1)) * state.core.width
    xs = np.linspace(pt.x - half, pt.x + half, cfg.samples)
    psi = evaluate(state, xs)
    rows = [[x, v.real, v.imag, abs(v) ** 2] for x, v in zip(xs, psi)]
    return ["x", "re", "im", "abs2"], rows


def _uncertainty_grid(cfg: RunConfig, setup: obs.UncertaintySetup, p: OscillatorParams):
    tg = set(np.linspace(0.0, cfg.t_max, cfg.samples).tolist())
    # the minima are inserted so that they appear as rows
    k_max = int(cfg.t_max * setup.omega / math.pi) + 1
    tg.update(t for t in obs.minimization_times(p, setup, k_max) if t <= cfg.t_max)
    return sorted(tg)


def run_uncertainty(cfg: RunConfig):
    p = cfg.params
    setup = obs.UncertaintySetup.from_params(p, cfg.resolved_mu())
    rows = []
    for t in _uncertainty_grid(cfg, setup, p):
        tcs = obs.uncertainties_tcs(p, setup, cfg.n, t)
        cs = obs.uncertainties_cs(p, setup, t)
        rows.append([t, tcs.dx2, tcs.dp2, cs.dx2, cs.dp2, tcs.product, cs.product, cs.g, cs.minimal])
    return list(UNCERTAINTY_COLUMNS), rows


def run_minima(cfg: RunConfig):
    p = cfg.params
    setup = obs.UncertaintySetup.from_params(p, cfg.resolved_mu())
    rows = []
    for t in obs.minimization_times(p, setup, cfg.k_max):
        cs = obs.uncertainties_cs(p, setup, t)
        rows.append([t, cs.g, obs.uncertainties_tcs(p, setup, cfg.n, t).product, cs.product, cs.minimal])
    return ["t", "g", "product_tcs", "product_cs", "minimal"], rows


def run_solve_mu(cfg: RunConfig):
    p = cfg.params
    try:
        mu = obs.solve_mu_for_time(p, cfg.t)
    except obs.NoMinimizingMu as e:
        raise ConfigError(f"no minimizing mu exists at t={cfg.t}: {e}") from None
    except ValueError as e:
        raise ConfigError(str(e)) from None
    g = float(obs.g_for(obs.UncertaintySetup.from_params(p, mu), cfg.t))
    return ["t", "mu", "g"], [[cfg.t, mu, g]]


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {', '.join(SUITES)}")
    perturb_w = 0.0
    if cfg.perturb is not None:
        name, eps = cfg.perturb
        if name != "w":
            raise ConfigError(f"only 'w' can be perturbed, got {name!r}")
        perturb_w = eps
    p = cfg.params
    mu = cfg.resolved_mu() if p.regime != CRITICAL else 1.0
    report = run_suite(p, cfg.seed(), cfg.suite, t_max=cfg.t_max, samples=cfg.samples,
                       mu=mu, perturb_w=perturb_w)
    return json.dumps(report.to_dict(), indent=2) + "\n", 0 if report.passed else 1


RUNNERS = {
    "trajectory": run_trajectory,
    "states": run_states,
    "uncertainty": run_uncertainty,
    "minima": run_minima,
    "solve-mu": run_solve_mu,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and seed")
    S = argparse.SUPPRESS
    for flag in ("--m", "--omega0", "--gamma", "--hbar", "--mu", "--b-re", "--b-im", "--x0", "--p0", "--t-max"):
        g.add_argument(flag, type=float, default=S)
    g.add_argument("--samples", type=int, default=S)
    g.add_argument("--out", default=S, help="output file (default: stdout)")
    g.add_argument("--format", choices=("csv", "json"), default=S)
    g.add_argument("--oracle", action="store_true", default=S,
                   help="add an ODE-oracle deviation column (trajectory)")
    g.add_argument("--config", default=None, help="key=value file; flags override it")

    parser = argparse.ArgumentParser(prog="dampedtcs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="scenario", required=True)
    sub.add_parser("trajectory", parents=[common], help="classical trajectory and (w, z)")
    st = sub.add_parser("states", parents=[common], help="wavefunction of |n> or |alpha> on an x grid")
    st.add_argument("--n", type=int, default=S)
    st.add_argument("--alpha-re", type=float, default=S)
    st.add_argument("--alpha-im", type=float, default=S)
    st.add_argument("--t", type=float, default=S)
    un = sub.add_parser("uncertainty", parents=[common], help="uncertainties and products over time")
    un.add_argument("--n", type=int, default=S)
    mi = sub.add_parser("minima", parents=[common], help="times where the uncertainty product is minimal")
    mi.add_argument("--k-max", type=int, default=S)
    mi.add_argument("--n", type=int, default=S)
    sm = sub.add_parser("solve-mu", parents=[common], help="initial width mu minimising at a given time")
    sm.add_argument("--t", type=float, required=True)
    ve = sub.add_parser("verify", parents=[common], help="run the verification suite, JSON report")
    ve.add_argument("--suite", choices=SUITES, default=S)
    ve.add_argument("--perturb", nargs=2, metavar=("NAME", "EPS"), default=S,
                    help="inject a fault, e.g. --perturb w 1e-2")
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if ns.config:
        values.update(load_config_file(ns.config))
    for key, val in vars(ns).items():
        if key == "config":
            continue
        if key == "perturb":
            try:
                val = (val[0], float(val[1]))
            except ValueError:
                raise ConfigError(f"bad --perturb value {val[1]!r}") from None
        values[key] = val
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        if cfg.scenario == "verify":
            text, code = run_verify(cfg)
            emit(text, cfg.out)
            return code
        columns, rows = RUNNERS[cfg.scenario](cfg)
        emit(render(columns, rows, _meta(cfg), cfg.format), cfg.out)
        return 0
    except ConfigError as e:
        print(f"dampedtcs: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
