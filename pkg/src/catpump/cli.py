"""Configuration-driven front end emitting deterministic CSV.

Each subcommand reads one section of an INI file, resolves defaults,
fans the independent grid points out over a worker pool, and writes rows
in a fixed order with fixed formatting, so identical configs produce
byte-identical files. The first line of every file is a comment carrying
the fully resolved configuration; ``--convergence`` reruns the grid at
enlarged truncations and appends the largest deviation as a trailing
comment.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from configparser import ConfigParser, Error as IniError
from pathlib import Path

import numpy as np

from . import analysis, dynamics, fock, tunable_loss
from .errors import CatpumpError, ConfigError

CONFIG_VERSION = "catpump-config-v1"
DEFAULT_SIGNAL_DIM = 40
DEFAULT_PUMP_DIM = 20
CONVERGENCE_DIMS = (60, 30)
DEFAULT_GNL_HZ = 1e5

KINDS = ("phi-sweep", "trajectory", "loss-sweep", "wigner", "effective-loss")

COLUMNS = {
    "phi-sweep": (
        "phi_inv",
        "f_max",
        "alpha_opt_mag",
        "alpha_opt_phase",
        "n_cycles",
        "signal_dim",
        "pump_dim",
    ),
    "trajectory": ("g_nl_t", "f_max", "alpha_opt_mag", "parity", "purity"),
    "loss-sweep": (
        "phi_inv",
        "gamma_s_signal",
        "gamma_s_pump",
        "f_max",
        "alpha_opt_mag",
        "f_at_alpha2",
    ),
    "wigner": ("g_nl_t", "x", "p", "W"),
    "effective-loss": (
        "g_loss_hz",
        "gamma_re_hz",
        "delta_hz",
        "kappa_eff_hz",
        "delta_shift_hz",
        "kappa_eff_over_gnl",
    ),
}

# columns whose values may move when the truncation grows; the rest are
# grid coordinates or bookkeeping
_CONVERGENCE_COLUMNS = {
    "phi-sweep": ("f_max", "alpha_opt_mag", "alpha_opt_phase"),
    "trajectory": ("f_max", "alpha_opt_mag", "parity", "purity"),
    "loss-sweep": ("f_max", "alpha_opt_mag", "f_at_alpha2"),
    "wigner": ("W",),
    "effective-loss": ("kappa_eff_hz", "delta_shift_hz", "kappa_eff_over_gnl"),
}


# ---------------------------------------------------------------------------
# config parsing


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex):
        if value.imag == 0.0:
            return "%.9g" % value.real
        return "%.9g%+.9gj" % (value.real, value.imag)
    x = float(value)
    if x == 0.0:
        x = 0.0  # fold -0.0
    return "%.9g" % x


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: not a number: {raw!r}") from exc


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: not an integer: {raw!r}") from exc


def _parse_complex(raw: str, key: str) -> complex:
    try:
        return complex(raw.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"{key}: not a complex number: {raw!r}") from exc


def _parse_grid(raw: str, key: str) -> list[float]:
    """Comma list ``a,b,c`` or inclusive range ``start:stop:step``."""
    text = raw.strip()
    if not text:
        raise ConfigError(f"{key}: grid is empty")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range needs start:stop:step, got {raw!r}")
        start, stop, step = (_parse_float(p, key) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"{key}: bad range {raw!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    values = [_parse_float(p, key) for p in text.split(",") if p.strip()]
    if not values:
        raise ConfigError(f"{key}: grid is empty")
    return values


def _read_section(path: str, kind: str) -> dict[str, str]:
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = ConfigParser()
    try:
        parser.read_string(file.read_text())
    except IniError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not parser.has_section(kind):
        raise ConfigError(f"missing section [{kind}] in {path}")
    return dict(parser.items(kind))


def _reject_unknown(raw: dict[str, str], allowed: set[str], kind: str) -> None:
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"[{kind}] unknown keys: {', '.join(unknown)}")


def _require(raw: dict[str, str], key: str, kind: str) -> str:
    if key not in raw:
        raise ConfigError(f"[{kind}] missing required key: {key}")
    return raw[key]


def _check_pump_capacity(phi_invs: list[float], pump_dim: int) -> None:
    worst = 2.0 / min(phi_invs)
    need = math.ceil(4.0 * worst * worst)
    if need > pump_dim:
        raise ConfigError(
            f"pump_dim {pump_dim} cannot hold the pump amplitude at "
            f"phi_inv={min(phi_invs):.9g} (needs >= {need})"
        )


def _dims(raw: dict[str, str]) -> tuple[int, int]:
    da = _parse_int(raw.get("signal_dim", str(DEFAULT_SIGNAL_DIM)), "signal_dim")
    db = _parse_int(raw.get("pump_dim", str(DEFAULT_PUMP_DIM)), "pump_dim")
    if da < 2 or db < 2:
        raise ConfigError(f"signal_dim {da} and pump_dim {db} must be >= 2")
    return da, db


# ---------------------------------------------------------------------------
# grid-point workers (top level so a process pool can import them)


def _best_cat_over_cycles(cfg, da, db, want_fixed=False):
    best_f = -1.0
    best_alpha = 0j
    best_fixed = 0.0
    for _, rho in dynamics.synchronous_states(cfg, signal_dim=da, pump_dim=db):
        fit = analysis.optimal_cat(rho)
        if fit.f_max > best_f:
            best_f = fit.f_max
            best_alpha = fit.alpha_opt
        if want_fixed:
            best_fixed = max(best_fixed, analysis.fidelity(rho, 2j))
    return best_f, best_alpha, best_fixed


def _phi_sweep_point(args):
    phi_inv, da, db, n_cycles = args
    phase = 1.0 / phi_inv
    cfg = dynamics.CycleConfig(
        phase=phase,
        pump_amplitude=-2j * phase,
        n_cycles=n_cycles if n_cycles > 0 else None,
    )
    f_max, alpha, _ = _best_cat_over_cycles(cfg, da, db)
    return (phi_inv, f_max, abs(alpha), float(np.angle(alpha)), cfg.n_cycles, da, db)


def _loss_sweep_point(args):
    phi_inv, gs, gp, da, db, n_cycles = args
    phase = 1.0 / phi_inv
    cfg = dynamics.CycleConfig(
        phase=phase,
        pump_amplitude=-2j * phase,
        signal_loss=gs,
        pump_loss=gp,
        n_cycles=n_cycles if n_cycles > 0 else None,
    )
    f_max, alpha, f_fixed = _best_cat_over_cycles(cfg, da, db, want_fixed=True)
    return (phi_inv, gs, gp, f_max, abs(alpha), f_fixed)


def _effective_loss_point(args):
    g, gamma, delta, gnl = args
    kappa_eff, shift = tunable_loss.effective_loss_shift(
        tunable_loss.LossChannelParams(g_loss=g, gamma_re=gamma, delta=delta)
    )
    return (g, gamma, delta, kappa_eff, shift, kappa_eff / gnl)


def _map_points(fn, points, workers: int):
    if workers <= 1 or len(points) <= 1:
        return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


# ---------------------------------------------------------------------------
# subcommands


def _run_phi_sweep(raw: dict[str, str], workers: int, dims=None):
    _reject_unknown(
        raw, {"phi_inv", "signal_dim", "pump_dim", "n_cycles"}, "phi-sweep"
    )
    grid = sorted(_parse_grid(_require(raw, "phi_inv", "phi-sweep"), "phi_inv"))
    if min(grid) <= 0:
        raise ConfigError(f"phi_inv values must be > 0, got {min(grid):.9g}")
    da, db = _dims(raw) if dims is None else dims
    n_cycles = _parse_int(raw.get("n_cycles", "0"), "n_cycles")
    _check_pump_capacity(grid, db)
    resolved = {
        "phi_inv": grid,
        "signal_dim": da,
        "pump_dim": db,
        "n_cycles": n_cycles if n_cycles > 0 else "auto",
    }
    rows = _map_points(_phi_sweep_point, [(p, da, db, n_cycles) for p in grid], workers)
    return resolved, rows


def _run_loss_sweep(raw: dict[str, str], workers: int, dims=None):
    _reject_unknown(
        raw,
        {
            "phi_inv",
            "gamma_s_signal",
            "gamma_s_pump",
            "signal_dim",
            "pump_dim",
            "n_cycles",
        },
        "loss-sweep",
    )
    phi = sorted(_parse_grid(_require(raw, "phi_inv", "loss-sweep"), "phi_inv"))
    gs_grid = sorted(
        _parse_grid(_require(raw, "gamma_s_signal", "loss-sweep"), "gamma_s_signal")
    )
    gp_grid = sorted(
        _parse_grid(_require(raw, "gamma_s_pump", "loss-sweep"), "gamma_s_pump")
    )
    if min(phi) <= 0:
        raise ConfigError(f"phi_inv values must be > 0, got {min(phi):.9g}")
    if min(gs_grid) < 0 or min(gp_grid) < 0:
        raise ConfigError("loss rates must be >= 0")
    da, db = _dims(raw) if dims is None else dims
    n_cycles = _parse_int(raw.get("n_cycles", "0"), "n_cycles")
    _check_pump_capacity(phi, db)
    resolved = {
        "phi_inv": phi,
        "gamma_s_signal": gs_grid,
        "gamma_s_pump": gp_grid,
        "signal_dim": da,
        "pump_dim": db,
        "n_cycles": n_cycles if n_cycles > 0 else "auto",
    }
    points = [
        (p, gs, gp, da, db, n_cycles) for p in phi for gs in gs_grid for gp in gp_grid
    ]
    rows = _map_points(_loss_sweep_point, points, workers)
    return resolved, rows


def _run_trajectory(raw: dict[str, str], workers: int, dims=None):
    mode = _require(raw, "mode", "trajectory")
    if mode == "synchronous":
        _reject_unknown(
            raw,
            {
                "mode",
                "phi_inv",
                "signal_dim",
                "pump_dim",
                "n_cycles",
                "signal_loss",
                "pump_loss",
                "cycle_ratio",
            },
            "trajectory",
        )
        phi_inv = _parse_float(_require(raw, "phi_inv", "trajectory"), "phi_inv")
        if phi_inv <= 0:
            raise ConfigError(f"phi_inv must be > 0, got {phi_inv:.9g}")
        da, db = _dims(raw) if dims is None else dims
        n_cycles = _parse_int(raw.get("n_cycles", "0"), "n_cycles")
        gs = _parse_float(raw.get("signal_loss", "0"), "signal_loss")
        gp = _parse_float(raw.get("pump_loss", "0"), "pump_loss")
        ratio = _parse_float(raw.get("cycle_ratio", "1"), "cycle_ratio")
        _check_pump_capacity([phi_inv], db)
        cfg = dynamics.CycleConfig(
            phase=1.0 / phi_inv,
            pump_amplitude=-2j / phi_inv,
            cycle_ratio=ratio,
            signal_loss=gs,
            pump_loss=gp,
            n_cycles=n_cycles if n_cycles > 0 else None,
        )
        resolved = {
            "mode": mode,
            "phi_inv": phi_inv,
            "signal_dim": da,
            "pump_dim": db,
            "n_cycles": cfg.n_cycles,
            "signal_loss": gs,
            "pump_loss": gp,
            "cycle_ratio": ratio,
        }
        records = dynamics.run_synchronous(cfg, signal_dim=da, pump_dim=db)
    elif mode == "adiabatic":
        _reject_unknown(
            raw,
            {
                "mode",
                "two_photon_pump",
                "two_photon_loss",
                "omega_p",
                "g_nl",
                "gamma_p",
                "t_final",
                "n_samples",
                "signal_dim",
            },
            "trajectory",
        )
        direct = {"two_photon_pump", "two_photon_loss"} & set(raw)
        pumped = {"omega_p", "g_nl", "gamma_p"} & set(raw)
        if direct and pumped:
            raise ConfigError(
                "give either two_photon_pump/two_photon_loss or omega_p/g_nl/gamma_p, not both"
            )
        if direct:
            params = dynamics.AdiabaticParams(
                two_photon_pump=_parse_complex(
                    _require(raw, "two_photon_pump", "trajectory"), "two_photon_pump"
                ),
                two_photon_loss=_parse_float(
                    _require(raw, "two_photon_loss", "trajectory"), "two_photon_loss"
                ),
            )
        elif pumped:
            params = dynamics.adiabatic_params_from_pump(
                _parse_float(_require(raw, "omega_p", "trajectory"), "omega_p"),
                _parse_float(_require(raw, "g_nl", "trajectory"), "g_nl"),
                _parse_float(_require(raw, "gamma_p", "trajectory"), "gamma_p"),
            )
        else:
            raise ConfigError(
                "adiabatic mode needs two_photon_pump/two_photon_loss or omega_p/g_nl/gamma_p"
            )
        t_final = _parse_float(raw.get("t_final", "30"), "t_final")
        n_samples = _parse_int(raw.get("n_samples", "61"), "n_samples")
        if t_final <= 0 or n_samples < 2:
            raise ConfigError("t_final must be > 0 and n_samples >= 2")
        da = _parse_int(raw.get("signal_dim", str(DEFAULT_SIGNAL_DIM)), "signal_dim")
        if dims is not None:
            da = dims[0]
        resolved = {
            "mode": mode,
            "two_photon_pump": params.two_photon_pump,
            "two_photon_loss": params.two_photon_loss,
            "t_final": t_final,
            "n_samples": n_samples,
            "signal_dim": da,
        }
        sample_times = np.linspace(0.0, t_final, n_samples)
        rho0 = fock.coherent_state(0j, da).density()
        _, samples = dynamics.evolve_adiabatic(
            rho0, params, t_final, sample_times=sample_times
        )
        records = [analysis.trajectory_record(rho, t) for t, rho in samples]
    else:
        raise ConfigError(f"mode must be synchronous or adiabatic, got {mode!r}")
    rows = [
        (r.time, r.f_max, abs(r.alpha_opt), r.parity, r.purity) for r in records
    ]
    return resolved, rows


def _run_wigner(raw: dict[str, str], workers: int, dims=None):
    _reject_unknown(
        raw,
        {"phi_inv", "snapshots", "extent", "n_points", "signal_dim", "pump_dim"},
        "wigner",
    )
    phi_inv = _parse_float(raw.get("phi_inv", "2"), "phi_inv")
    if phi_inv <= 0:
        raise ConfigError(f"phi_inv must be > 0, got {phi_inv:.9g}")
    snapshots = sorted(_parse_grid(raw.get("snapshots", "0.5,4"), "snapshots"))
    n_points = _parse_int(raw.get("n_points", "81"), "n_points")
    if n_points < 2:
        raise ConfigError(f"n_points must be >= 2, got {n_points}")
    da, db = _dims(raw) if dims is None else dims
    _check_pump_capacity([phi_inv], db)

    cfg = dynamics.CycleConfig(phase=1.0 / phi_inv, pump_amplitude=-2j / phi_inv)
    t_cycle = cfg.cycle_time
    horizon = cfg.n_cycles * t_cycle
    wanted: dict[int, float] = {}
    for t in snapshots:
        n = t / t_cycle
        n_int = round(n)
        if abs(n - n_int) > 1e-9:
            raise ConfigError(
                f"snapshot {t:.9g} does not land on a cycle boundary "
                f"(cycle time {t_cycle:.9g})"
            )
        if t > horizon + 1e-9:
            raise ConfigError(
                f"snapshot {t:.9g} lies beyond the simulated horizon {horizon:.9g}"
            )
        wanted[int(n_int)] = t

    states = {}
    for n, rho in dynamics.synchronous_states(cfg, signal_dim=da, pump_dim=db):
        if n in wanted:
            states[n] = rho
        if n >= max(wanted):
            break

    if "extent" in raw:
        extent = _parse_float(raw["extent"], "extent")
        if extent <= 0:
            raise ConfigError(f"extent must be > 0, got {extent:.9g}")
    else:
        # cover the fitted cat plus tails, but keep the whole grid inside
        # the displacement range the truncation can represent
        reach = max(
            abs(analysis.optimal_cat(rho).alpha_opt) for rho in states.values()
        )
        extent = min(reach + 3.0, math.sqrt(da) / 2.0)

    resolved = {
        "phi_inv": phi_inv,
        "snapshots": snapshots,
        "extent": extent,
        "n_points": n_points,
        "signal_dim": da,
        "pump_dim": db,
    }
    rows = []
    for n in sorted(wanted):
        grid = analysis.wigner(states[n], extent=extent, n_points=n_points)
        t = wanted[n]
        for i, x in enumerate(grid.x_axis):
            for j, p in enumerate(grid.p_axis):
                rows.append((t, float(x), float(p), float(grid.values[i, j])))
    return resolved, rows


def _run_effective_loss(raw: dict[str, str], workers: int, dims=None):
    _reject_unknown(
        raw, {"g_loss_hz", "gamma_re_hz", "delta_hz", "g_nl_hz"}, "effective-loss"
    )
    g_grid = sorted(_parse_grid(_require(raw, "g_loss_hz", "effective-loss"), "g_loss_hz"))
    gamma_grid = sorted(
        _parse_grid(_require(raw, "gamma_re_hz", "effective-loss"), "gamma_re_hz")
    )
    delta_grid = sorted(
        _parse_grid(_require(raw, "delta_hz", "effective-loss"), "delta_hz")
    )
    gnl = _parse_float(raw.get("g_nl_hz", _fmt(DEFAULT_GNL_HZ)), "g_nl_hz")
    if min(g_grid) < 0:
        raise ConfigError("g_loss_hz values must be >= 0")
    if min(gamma_grid) <= 0:
        raise ConfigError("gamma_re_hz values must be > 0")
    if gnl <= 0:
        raise ConfigError(f"g_nl_hz must be > 0, got {gnl:.9g}")
    resolved = {
        "g_loss_hz": g_grid,
        "gamma_re_hz": gamma_grid,
        "delta_hz": delta_grid,
        "g_nl_hz": gnl,
    }
    points = [
        (g, gamma, delta, gnl)
        for g in g_grid
        for gamma in gamma_grid
        for delta in delta_grid
    ]
    rows = _map_points(_effective_loss_point, points, workers)
    return resolved, rows


_RUNNERS = {
    "phi-sweep": _run_phi_sweep,
    "trajectory": _run_trajectory,
    "loss-sweep": _run_loss_sweep,
    "wigner": _run_wigner,
    "effective-loss": _run_effective_loss,
}


# ---------------------------------------------------------------------------
# output


def _header_line(kind: str, resolved: dict) -> str:
    parts = [f"{CONFIG_VERSION}", f"experiment={kind}"]
    for key in sorted(resolved):
        value = resolved[key]
        if isinstance(value, (list, tuple)):
            parts.append(f"{key}={','.join(_fmt(v) for v in value)}")
        else:
            parts.append(f"{key}={_fmt(value)}")
    return "# " + " ".join(parts)


def _render(kind: str, resolved: dict, rows, trailer: str | None = None) -> str:
    lines = [_header_line(kind, resolved), ",".join(COLUMNS[kind])]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    if trailer is not None:
        lines.append(trailer)
    return "\n".join(lines) + "\n"


def _max_deviation(kind: str, rows, rerun_rows) -> float:
    compare = [COLUMNS[kind].index(c) for c in _CONVERGENCE_COLUMNS[kind]]
    worst = 0.0
    for row, other in zip(rows, rerun_rows):
        for idx in compare:
            worst = max(worst, abs(float(row[idx]) - float(other[idx])))
    return worst


def run(kind: str, config_path: str, out_path: str | None, workers: int,
        convergence: bool) -> str:
    """Execute one subcommand; returns the path written."""
    raw = _read_section(config_path, kind)
    runner = _RUNNERS[kind]
    resolved, rows = runner(raw, workers)
    trailer = None
    if convergence:
        _, rerun_rows = runner(raw, workers, dims=CONVERGENCE_DIMS)
        if len(rerun_rows) != len(rows):
            raise ConfigError("convergence rerun produced a different row count")
        deviation = _max_deviation(kind, rows, rerun_rows)
        trailer = (
            f"# convergence_check signal_dim={CONVERGENCE_DIMS[0]} "
            f"pump_dim={CONVERGENCE_DIMS[1]} max_abs_deviation={deviation:.9g}"
        )
    text = _render(kind, resolved, rows, trailer)
    out = Path(out_path) if out_path else Path(f"{kind}.csv")
    out.write_text(text)
    return str(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catpump",
        description="Cat-state pump cycles, loss sweeps, and channel tables as CSV.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the [{kind}] section of a config file")
        p.add_argument("--config", required=True, help="INI file with a [%s] section" % kind)
        p.add_argument("--out", default=None, help="output CSV path (default %s.csv)" % kind)
        p.add_argument("--workers", type=int, default=1, help="parallel grid workers")
        p.add_argument(
            "--convergence",
            action="store_true",
            help="rerun at signal_dim=%d, pump_dim=%d and append the max deviation"
            % CONVERGENCE_DIMS,
        )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = run(args.kind, args.config, args.out, args.workers, args.convergence)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CatpumpError as exc:
        detail = getattr(exc, "diagnostics", None)
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        if detail:
            print(f"diagnostics: {detail}", file=sys.stderr)
        return 3
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
