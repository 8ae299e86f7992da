"""
Command-line driver.

    python -m darkstate simulate --config run.cfg --out run.csv
    python -m darkstate compare
    python -m darkstate figure1 --out fig1.csv
    python -m darkstate steady

Config files are flat ``key = value`` lines (``#`` starts a comment) with
keys epsilon, eta, kappa, gamma, f, delta, omega0, fock_cutoff, frame,
t_max, dt_out, dt_int, tol, outputs.  Command-line flags override file
values; anything not given falls back to the reference parameter set
eta = 0.5, kappa = 0.1, gamma = 0.01 (units of epsilon), f = 1.

Exit codes: 0 success, 2 configuration error, 3 integration failure,
4 tolerance failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import analytic, entangle, lindblad, model
from .errors import IntegrationError, NoSupportError, UnsupportedRegimeError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_TOLERANCE = 4

COLUMNS = (
    "t",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "re_rho24",
    "im_rho24",
    "n_expect",
    "c_conditional",
    "c_wootters",
)

_PARAM_KEYS = {f.name for f in fields(model.SystemParams)}
_RUN_KEYS = {"t_max", "dt_out", "dt_int", "tol", "outputs"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: model.SystemParams = field(default_factory=model.SystemParams.figure1)
    t_max: float = 100.0
    dt_out: float = 0.05
    dt_int: float = 1e-3
    tol: float = 1e-6
    outputs: tuple = COLUMNS

    def __post_init__(self):
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if not 0 < self.dt_int <= self.dt_out:
            raise ConfigError("need 0 < dt_int <= dt_out")
        unknown = [c for c in self.outputs if c not in COLUMNS]
        if unknown:
            raise ConfigError(f"unknown output columns: {', '.join(unknown)}")

    def times(self) -> np.ndarray:
        n = max(1, round(self.t_max / self.dt_out))
        return np.linspace(0.0, self.t_max, n + 1)


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARAM_KEYS | _RUN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _convert(key, value):
    if key in ("frame",):
        return value
    if key == "outputs":
        return tuple(c.strip() for c in value.split(",") if c.strip())
    if key == "fock_cutoff":
        return int(value)
    return float(value)


def build_config(values: dict) -> RunConfig:
    """RunConfig from string (or already typed) values layered over the defaults."""
    try:
        typed = {k: _convert(k, v) if isinstance(v, str) else v for k, v in values.items()}
        pkw = {k: v for k, v in typed.items() if k in _PARAM_KEYS}
        rkw = {k: v for k, v in typed.items() if k in _RUN_KEYS}
        params = model.SystemParams.figure1(**pkw)
        return RunConfig(params=params, **rkw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    for key in ("t_max", "dt_out", "dt_int", "frame", "tol"):
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    return build_config(values)


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _liouvillian(p: model.SystemParams):
    return lindblad.assemble_liouvillian(model.build_hac(p), model.build_dissipators(p))


def _transformed_liouvillian(p: model.SystemParams):
    return lindblad.assemble_liouvillian(
        model.transformed_hamiltonian(p), model.build_transformed_dissipators(p)
    )


def _warn_lab_step(cfg: RunConfig):
    p = cfg.params
    if p.frame == "lab" and p.omega0 * cfg.dt_int > 0.1:
        print(
            f"warning: omega0 * dt_int = {p.omega0 * cfg.dt_int:.3g} > 0.1; "
            "lab-frame integration needs a step well below 1/omega0",
            file=sys.stderr,
        )


def state_row(t: float, rho, u, number_op) -> dict:
    """Observables written by ``simulate`` for one state."""
    rt = analytic.to_transformed(rho, u)
    row = {
        "t": t,
        "rho11": rt[0, 0].real,
        "rho22": rt[1, 1].real,
        "rho33": rt[2, 2].real,
        "rho44": rt[3, 3].real,
        "re_rho24": rt[1, 3].real,
        "im_rho24": rt[1, 3].imag,
        "n_expect": float(np.trace(number_op.data @ rho.data).real),
    }
    try:
        row["c_conditional"] = entangle.conditional_concurrence(rt)
        row["c_wootters"] = entangle.wootters_concurrence(entangle.conditional_state(rho)[0])
    except NoSupportError:
        row["c_conditional"] = row["c_wootters"] = math.nan
    return row


def simulate(cfg: RunConfig):
    """Integrate the master equation; returns (trajectory, table rows as dicts)."""
    p = cfg.params
    layout = p.layout
    traj = lindblad.evolve_rk(_liouvillian(p), model.initial_state(layout), cfg.times(), h_max=cfg.dt_int)
    u = model.collective_unitary(layout)
    number_op = model.excitation_number(layout)
    rows = [state_row(t, s, u, number_op) for t, s in zip(traj.times, traj.states)]
    return traj, rows


def cmd_simulate(cfg: RunConfig, out=None) -> int:
    _warn_lab_step(cfg)
    try:
        traj, rows = simulate(cfg)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    cols = list(cfg.outputs)
    write_csv(out, cols, ([r[c] for c in cols] for r in rows))
    last = rows[-1]
    print(
        f"simulated {len(rows)} samples to t = {cfg.t_max:g}; "
        f"final C_conditional = {last['c_conditional']:.6f}, "
        f"max trace drift = {traj.max_trace_drift:.2e}",
        file=sys.stderr,
    )
    return EXIT_OK


def compare(cfg: RunConfig) -> dict:
    """Maximum entrywise deviations between the three propagation routes."""
    p = cfg.params
    sol = analytic.solve_constants(p)
    layout = p.layout
    times = cfg.times()
    rho0 = model.initial_state(layout)
    u = model.collective_unitary(layout)
    L = _liouvillian(p)
    Lt = _transformed_liouvillian(p)

    rk = lindblad.evolve_rk(L, rho0, times, h_max=cfg.dt_int)
    rk_t = lindblad.evolve_rk(Lt, u.dag() @ rho0 @ u, times, h_max=cfg.dt_int)
    exact = lindblad.evolve_expm_grid(L, rho0, times)
    rt_exact = sol.rho_tilde(times)

    num_vs_ana = max(
        np.abs(analytic.to_transformed(s, u) - r).max() for s, r in zip(rk.states, rt_exact)
    )
    rk_vs_expm = max(np.abs(a.data - b.data).max() for a, b in zip(rk.states, exact.states))
    orig_vs_tr = max(
        np.abs(model.excitation_block(u.dag() @ a @ u) - model.excitation_block(b)).max()
        for a, b in zip(rk.states, rk_t.states)
    )
    return {
        "numeric_vs_analytic": float(num_vs_ana),
        "rk_vs_expm": float(rk_vs_expm),
        "original_vs_transformed": float(orig_vs_tr),
    }


def cmd_compare(cfg: RunConfig) -> int:
    p = cfg.params
    if p.delta != 0 or p.f != 1:
        print("compare needs delta = 0 and f = 1", file=sys.stderr)
        return EXIT_CONFIG
    _warn_lab_step(cfg)
    try:
        devs = compare(cfg)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except UnsupportedRegimeError as exc:
        print(f"closed form unavailable: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failing = []
    for name, dev in devs.items():
        ok = dev <= cfg.tol
        print(f"{name:<26s} {dev:.3e}  {'ok' if ok else 'FAIL'}")
        if not ok:
            failing.append(name)
    if failing:
        print(f"tolerance {cfg.tol:g} exceeded by: {', '.join(failing)}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def figure1_table(t_max=100.0, dt_out=0.05, params=None):
    """(t, C(t)) of the conditional concurrence from the closed form."""
    p = params or model.SystemParams.figure1()
    sol = analytic.solve_constants(p)
    n = max(1, round(t_max / dt_out))
    times = np.linspace(0.0, t_max, n + 1)
    conc = [entangle.conditional_concurrence(r) for r in sol.rho_tilde(times)]
    return times, np.array(conc)


def cmd_figure1(out=None, t_max=None, dt_out=None) -> int:
    times, conc = figure1_table(t_max or 100.0, dt_out or 0.05)
    write_csv(out, ["t", "c_conditional"], zip(times, conc))
    return EXIT_OK


def steady_report(cfg: RunConfig) -> dict:
    p = cfg.params
    layout = p.layout
    L = _liouvillian(p)
    ss = lindblad.steady_states(L)
    t_long = max(cfg.t_max, 200.0 / p.epsilon)
    late = lindblad.evolve_expm(L, model.initial_state(layout), t_long)
    dissipative = p.kappa > 0 or p.gamma > 0
    return {
        "dimension": ss.dimension,
        "states": ss.states,
        "t_long": t_long,
        "fidelity": entangle.fidelity(late, analytic.asymptotic_state(layout)),
        "gap": lindblad.spectral_gap(L) if dissipative else None,
        "dissipative": dissipative,
    }


def cmd_steady(cfg: RunConfig) -> int:
    rep = steady_report(cfg)
    print(f"stationary manifold dimension  {rep['dimension']}")
    print(f"fidelity to asymptotic state   {rep['fidelity']:.12f}  (t = {rep['t_long']:g})")
    if not rep["dissipative"]:
        print("spectral gap                   n/a (no dissipation)")
    elif rep["gap"] is None:
        print("spectral gap                   n/a (no decaying mode)")
    else:
        print(f"spectral gap                   {rep['gap']:.12e}")
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--t-max", dest="t_max", type=float)
    common.add_argument("--dt-out", dest="dt_out", type=float)
    common.add_argument("--dt-int", dest="dt_int", type=float)
    common.add_argument("--frame", choices=model.FRAMES)
    common.add_argument("--tol", type=float)

    parser = argparse.ArgumentParser(
        prog="darkstate",
        description="Two dipole-coupled atoms in a lossy cavity: simulation and checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate the master equation, write CSV")
    sub.add_parser("compare", parents=[common], help="analytic vs RK4 vs expm deviations")
    sub.add_parser("figure1", parents=[common], help="conditional concurrence C(t) for the reference parameters")
    sub.add_parser("steady", parents=[common], help="stationary manifold and spectral gap")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "figure1":
        return cmd_figure1(args.out, args.t_max, args.dt_out)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "simulate":
        return cmd_simulate(cfg, args.out)
    if args.command == "compare":
        return cmd_compare(cfg)
    return cmd_steady(cfg)


if __name__ == "__main__":
    sys.exit(main())
