"""Command-line front end.

Exit status: 0 success, 1 tolerance failure, 2 usage or configuration error
(including an inadequate Fock-space truncation).

Settings resolve as: command-line flag, then ``--config`` file, then the
built-in defaults. A config file holds flat ``key = value`` lines; ``#``
starts a comment and unknown keys are rejected. The effective settings are
echoed at the top of every output.
"""

from __future__ import annotations

import argparse
import math
import re
import sys

import numpy as np

from . import __version__
from .cavity import TruncationError, run_quantized_cycle
from .engine import (
    EngineParams,
    audit_effective_readout,
    classical_yield,
    cycle_ensemble,
    mean_power,
    mpe_yield,
    normalized_power_map,
)
from .output import render_csv, render_json
from .qubit import X_AXIS, Outcome
from .trajectories import (
    agreement_mask,
    analytic_mean_power,
    physical_config,
    run_ensemble,
    simulate_trajectory,
)


class UsageError(ValueError):
    pass


class ToleranceFailure(Exception):
    def __init__(self, message, text):
        super().__init__(message)
        self.text = text


_ANGLE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?$")


def parse_angle(text) -> float:
    """Float, or a multiple of pi such as ``pi/2``, ``3*pi/4``, ``-pi``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower()
    m = _ANGLE.match(s)
    if m:
        coef = m.group(1)
        if coef in ("", "+"):
            c = 1.0
        elif coef == "-":
            c = -1.0
        else:
            c = float(coef)
        d = float(m.group(2)) if m.group(2) else 1.0
        return c * math.pi / d
    try:
        return float(s)
    except ValueError:
        raise UsageError(f"cannot parse angle {text!r}") from None


def parse_angle_list(text):
    if isinstance(text, (list, tuple)):
        return [parse_angle(t) for t in text]
    items = [t for t in str(text).split(",") if t.strip()]
    return [parse_angle(t) for t in items]


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"cannot parse boolean {text!r}")


def parse_int(text) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise UsageError(f"cannot parse integer {text!r}") from None


def parse_float(text) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise UsageError(f"cannot parse number {text!r}") from None


def _choice(*options):
    def parse(text):
        s = str(text).strip()
        if s not in options:
            raise UsageError(f"{s!r} not one of {', '.join(options)}")
        return s

    return parse


# key -> (parser, default, help)
COMMON = {
    "seed": (parse_int, 0, "64-bit RNG seed"),
    "out": (str, None, "output path (default: stdout)"),
    "format": (_choice("csv", "json"), "csv", "output format"),
}

OPTIONS = {
    "yield-sweep": {
        "kappa": (parse_float, 0.5, "erasure cost 2 kB T_D log2 / hbar omega0"),
        "theta_min": (parse_angle, 0.01, "smallest Rabi angle"),
        "theta_max": (parse_angle, math.pi - 0.01, "largest Rabi angle"),
        "n_theta": (parse_int, 100, "number of grid points"),
        "thetas": (parse_angle_list, None, "explicit comma-separated grid"),
    },
    "power-map": {
        "axis_step_deg": (parse_float, 5.0, "grid step over theta_n and phi_n in degrees"),
        "thetas": (parse_angle_list, [math.pi / 2, math.pi / 4, 0.0], "Rabi angles; 0 is the Zeno limit"),
    },
    "trajectories": {
        "omega_mhz": (parse_float, 0.2, "Rabi frequency in MHz"),
        "tau_w_ns": (parse_float, 70.0, "drive duration in ns"),
        "tau_mes_ns": (parse_float, 70.0, "readout duration in ns"),
        "n_cycles": (parse_int, 2000, "cycles per realization"),
        "n_realizations": (parse_int, 10_000, "realizations in the ensemble"),
        "feedback": (parse_bool, False, "restore |+x> after every readout"),
        "convention": (_choice("angular", "cyclic"), "angular", "how to read omega_mhz"),
        "sample_realization": (parse_int, 0, "realization index of the sample series"),
        "sample_out": (str, None, "path for the single-realization CSV"),
    },
    "cavity-check": {
        "n_bar": (parse_float, 400.0, "mean photon number"),
        "theta": (parse_angle, 0.04, "effective Rabi angle omega0 sqrt(nbar) t"),
        "omega0": (parse_float, 1.0, "vacuum Rabi frequency"),
        "n_max": (parse_int, None, "Fock truncation (default nbar + 8 sqrt(nbar) + 20)"),
        "tolerance": (parse_float, 0.1, "relative tolerance on the analytic predictions"),
        "min_n_bar": (parse_float, 100.0, "below this the check is informational only"),
    },
    "audit": {
        "theta_min": (parse_angle, 0.0, "smallest Rabi angle"),
        "theta_max": (parse_angle, 3.0, "largest Rabi angle (< pi)"),
        "n_theta": (parse_int, 25, "number of grid points"),
        "thetas": (parse_angle_list, None, "explicit comma-separated grid"),
        "n_realizations": (parse_int, 2000, "run_cycle repetitions per angle"),
    },
}

NOT_ECHOED = ("out", "sample_out")


def _allowed(command):
    return {**COMMON, **OPTIONS[command]}


def read_config_file(path, command) -> dict:
    allowed = _allowed(command)
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        if key == "subcommand":
            if value.strip() != command:
                raise UsageError(f"{path}:{lineno}: config is for {value.strip()!r}")
            continue
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def resolve(command, flags: dict, config_path=None) -> dict:
    allowed = _allowed(command)
    raw = read_config_file(config_path, command) if config_path else {}
    raw.update({k: v for k, v in flags.items() if v is not None})
    settings = {}
    for key, (parser, default, _) in allowed.items():
        settings[key] = parser(raw[key]) if key in raw else default
    return settings


def _theta_grid(cfg, lo_open, hi):
    if cfg.get("thetas") is not None:
        grid = list(cfg["thetas"])
    else:
        n = cfg["n_theta"]
        if n < 1:
            raise UsageError("theta grid is empty")
        grid = list(np.linspace(cfg["theta_min"], cfg["theta_max"], n)) if n > 1 else [cfg["theta_min"]]
    if not grid:
        raise UsageError("theta grid is empty")
    for t in grid:
        ok = (0.0 < t if lo_open else 0.0 <= t) and t < hi
        if not ok:
            raise UsageError(f"theta={t} outside the allowed range")
    return [float(t) for t in grid]


def _meta(command, cfg):
    meta = {"command": command, "version": __version__}
    for key in sorted(cfg):
        if key in NOT_ECHOED:
            continue
        value = cfg[key]
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, list):
            value = ",".join(repr(float(v)) for v in value)
        meta[key] = value if not isinstance(value, float) else repr(value)
    return meta


def _emit_table(command, cfg, columns, rows, extra_meta=None, extra_json=None):
    meta = _meta(command, cfg)
    meta.update(extra_meta or {})
    if cfg["format"] == "json":
        obj = {"meta": meta, "columns": list(columns), "rows": [list(r) for r in rows]}
        obj.update(extra_json or {})
        return render_json(obj)
    return render_csv(columns, rows, meta)


# ---------------------------------------------------------------------------
# Subcommands; each returns the output text or raises ToleranceFailure
# ---------------------------------------------------------------------------


def cmd_yield_sweep(cfg) -> str:
    if cfg["kappa"] < 0:
        raise UsageError("kappa must be >= 0")
    grid = _theta_grid(cfg, lo_open=True, hi=math.pi)
    eta_cl = classical_yield(cfg["kappa"])
    rows = [
        (t, mpe_yield(t, cfg["kappa"]), eta_cl, mean_power(X_AXIS, t, 1.0))
        for t in grid
    ]
    return _emit_table("yield-sweep", cfg, ("theta", "eta_mpe", "eta_classical", "normalized_power"), rows)


def cmd_power_map(cfg) -> str:
    step = cfg["axis_step_deg"]
    if not 0 < step <= 180:
        raise UsageError("axis_step_deg must lie in (0, 180]")
    thetas = cfg["thetas"]
    if not thetas or any(t < 0 for t in thetas):
        raise UsageError("power map needs non-negative Rabi angles")
    n_polar = int(round(180.0 / step))
    n_azim = int(round(360.0 / step))
    theta_n = np.radians(np.arange(n_polar + 1) * (180.0 / n_polar))
    phi_n = np.radians(np.arange(n_azim) * (360.0 / n_azim))
    tn, pn = np.meshgrid(theta_n, phi_n, indexing="ij")
    rows = []
    for t in thetas:
        values = normalized_power_map(tn, pn, t)
        rows.extend(zip(tn.ravel(), pn.ravel(), np.full(tn.size, t), values.ravel()))
    return _emit_table("power-map", cfg, ("theta_n", "phi_n", "theta", "normalized_power"), rows)


def cmd_trajectories(cfg):
    try:
        config = physical_config(
            omega_mhz=cfg["omega_mhz"],
            tau_w_ns=cfg["tau_w_ns"],
            tau_mes_ns=cfg["tau_mes_ns"],
            n_cycles=cfg["n_cycles"],
            n_realizations=cfg["n_realizations"],
            seed=cfg["seed"],
            feedback_enabled=cfg["feedback"],
            convention=cfg["convention"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 0 <= cfg["sample_realization"]:
        raise UsageError("sample_realization must be >= 0")
    stats = run_ensemble(config)
    k = np.arange(config.n_cycles)
    exact = analytic_mean_power(config, k)
    small_angle = analytic_mean_power(config, k, variant="small_angle")
    agreement = float(np.mean(agreement_mask(config, stats)))
    rows = list(zip(k.tolist(), config.times(), stats.mean_power, stats.std_error, exact, small_angle))
    sample = simulate_trajectory(config, cfg["sample_realization"])
    sample_cols = ("cycle_index", "time", "sign", "outcome", "power", "cumulative_work")
    sample_rows = list(
        zip(
            k.tolist(),
            config.times(),
            sample.signs.tolist(),
            sample.outcomes.tolist(),
            sample.power_series,
            sample.cumulative_work,
        )
    )
    extra = {"theta": repr(config.params.theta), "agreement_fraction": repr(agreement)}
    sample_json = {"sample": {"columns": list(sample_cols), "rows": [list(r) for r in sample_rows]}}
    text = _emit_table(
        "trajectories",
        cfg,
        ("cycle_index", "time", "mean_power", "std_error", "analytic_exact", "analytic_paper"),
        rows,
        extra_meta=extra,
        extra_json=sample_json if cfg["format"] == "json" else None,
    )
    sample_text = None
    if cfg["format"] == "csv" and (cfg["sample_out"] or cfg["out"]):
        sample_text = render_csv(sample_cols, sample_rows, _meta("trajectories", cfg))
    if config.n_realizations >= 100 and agreement < 0.99:
        raise ToleranceFailure(f"only {agreement:.3%} of cycles within 4 standard errors", (text, sample_text))
    return text, sample_text


def cmd_cavity_check(cfg):
    n_bar, theta, omega0 = cfg["n_bar"], cfg["theta"], cfg["omega0"]
    if n_bar < 0 or theta < 0 or omega0 <= 0:
        raise UsageError("n_bar and theta must be >= 0, omega0 > 0")
    if n_bar == 0 and theta > 0:
        raise UsageError("a vacuum field cannot produce a non-zero Rabi angle")
    if theta > 0.2:
        raise UsageError("analytic comparison only meaningful for theta <= 0.2")
    alpha = math.sqrt(n_bar)
    t = theta / (omega0 * alpha) if theta > 0 else 0.0
    report = run_quantized_cycle(alpha, omega0, t, cfg["n_max"])
    tol = cfg["tolerance"]
    semiclassical = n_bar >= cfg["min_n_bar"]
    agreement = (
        report.prob_minus_rel_error <= tol
        and report.gain_rel_error <= tol
        and report.norm_error <= 1e-10
        and report.excitation_error <= 1e-10
    )
    out = report.as_dict()
    out["regime"] = "semiclassical" if semiclassical else "informational"
    out["semiclassical_limit_violated"] = not semiclassical
    out["tolerance_passed"] = bool(agreement)
    meta = _meta("cavity-check", cfg)
    if cfg["format"] == "json":
        text = render_json({"meta": meta, "report": out})
    else:
        text = render_csv(list(out), [list(out.values())], meta)
    if semiclassical and not agreement:
        raise ToleranceFailure("quantized-field results disagree with the analytic limits", text)
    return text


def cmd_audit(cfg) -> str:
    grid = _theta_grid(cfg, lo_open=False, hi=math.pi)
    n_r = cfg["n_realizations"]
    if n_r < 1:
        raise UsageError("n_realizations must be >= 1")
    columns = (
        "theta", "prob_plus", "prob_minus", "pulse1_work",
        "projection_plus", "projection_minus", "pulse2_plus", "pulse2_minus",
        "total_plus", "total_minus", "expected_total",
        "ensemble_e_meas", "ensemble_std_error", "closure",
    )
    rows, failures = [], []
    for i, t in enumerate(grid):
        up = audit_effective_readout(t, Outcome.PLUS)
        dn = audit_effective_readout(t, Outcome.MINUS)
        expected = up.probability * up.total + dn.probability * dn.total
        stats = cycle_ensemble(EngineParams(theta=t), n_r, cfg["seed"], stream=i)
        e_mean, e_se = stats["e_meas"]
        closure = up.total - 0.5 * math.sin(t)
        if abs(closure) > 1e-12 or abs(e_mean - expected) > 4.0 * e_se + 1e-12:
            failures.append(t)
        rows.append((
            t, up.probability, dn.probability, up.pulse1_work,
            up.projection_energy, dn.projection_energy, up.pulse2_work, dn.pulse2_work,
            up.total, dn.total, expected, e_mean, e_se, closure,
        ))
    text = _emit_table("audit", cfg, columns, rows)
    if failures:
        raise ToleranceFailure(f"audit closure failed at theta={failures}", text)
    return text


COMMANDS = {
    "yield-sweep": cmd_yield_sweep,
    "power-map": cmd_power_map,
    "trajectories": cmd_trajectories,
    "cavity-check": cmd_cavity_check,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpengine", description="Simulations of a qubit engine fuelled by quantum measurement."
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="flat key = value file")
        for key, (_, default, help_) in _allowed(name).items():
            flag = "--" + key.replace("_", "-")
            if default is not None:
                help_ = f"{help_} (default: {default})"
            if parse_bool is _allowed(name)[key][0]:
                p.add_argument(flag, dest=key, nargs="?", const="true", default=None, help=help_)
            else:
                p.add_argument(flag, dest=key, default=None, help=help_)
    return parser


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _sample_path(cfg):
    if cfg["sample_out"]:
        return cfg["sample_out"]
    out = cfg["out"]
    stem = out[:-4] if out.endswith(".csv") else out
    return stem + ".sample.csv"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    flags = {k: getattr(args, k) for k in _allowed(command)}
    status = 0
    try:
        cfg = resolve(command, flags, args.config)
        try:
            result = COMMANDS[command](cfg)
        except ToleranceFailure as fail:
            print(f"tolerance failure: {fail}", file=sys.stderr)
            result, status = fail.text, 1
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    sample = None
    if isinstance(result, tuple):
        result, sample = result
    _write(cfg["out"], result)
    if sample is not None:
        _write(_sample_path(cfg), sample)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
