"""Command-line front end.

    platedamp <command> --config <path> --out <dir> [--threads N]

Commands:
    modes    write modes.csv (frequencies, per-patch coupling, capacitance)
    frf      write frf.csv for the configured topology and loads
    sweep    write sweep.csv and report.json for the configured topology
    compare  run separated and connected with their own sweep optima and
             write a combined report.json plus sweep/FRF data for both

All numbers are written with 17 significant digits and fixed newlines,
so repeated runs produce byte-identical files. Exit codes: 0 success,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import ScenarioConfig, parse_config
from .electromech import with_coupling
from .errors import AssemblyError, ConfigError, DomainError, SolverError
from .response import (FrfResult, ImpedanceLaw, ShuntTopology, frf,
                       frf_connected, frf_separated, retained_mode_count)
from .ritz import ModalModel, build_model
from .tuning import (ReductionReport, SweepResult, SweepSpec, mode_windows,
                     percent_reduction, sweep_resistance)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _build(config: ScenarioConfig) -> ModalModel:
    return with_coupling(build_model(config.plate, config.patches, config.basis))


def write_modes_csv(path: str, model: ModalModel) -> None:
    k = len(model.patches)
    header = ["mode", "freq_hz"]
    header += [f"theta_p{i + 1}" for i in range(k)]
    header += [f"cap_p{i + 1}_farad" for i in range(k)]
    rows = []
    for r in range(model.n_modes):
        row = [float(r + 1), model.frequencies_hz[r]]
        row += [model.coupling[r, i] for i in range(k)]
        row += [model.capacitances[i] for i in range(k)]
        rows.append(row)
    _write_csv(path, header, rows)


def write_frf_csv(path: str, result: FrfResult) -> None:
    k = result.voltages.shape[1]
    header = ["freq_hz", "disp_re", "disp_im", "vel_re", "vel_im", "|vel|"]
    for i in range(k):
        header += [f"v{i + 1}_re", f"v{i + 1}_im"]
    rows = []
    for j in range(result.frequencies_hz.size):
        row = [result.frequencies_hz[j],
               result.displacement[j].real, result.displacement[j].imag,
               result.velocity[j].real, result.velocity[j].imag,
               abs(result.velocity[j])]
        for i in range(k):
            row += [result.voltages[j, i].real, result.voltages[j, i].imag]
        rows.append(row)
    _write_csv(path, header, rows)


def write_sweep_csv(path: str, sweep_result: SweepResult) -> None:
    rows = zip(sweep_result.r_values, sweep_result.objective_values,
               sweep_result.peak_freqs_hz)
    _write_csv(path, ["resistance_ohm", "peak_velocity_ms_per_n", "peak_freq_hz"], rows)


def _report_entries(report: ReductionReport) -> list[dict]:
    out = []
    for e in report.entries:
        item = {
            "mode": e.mode,
            "window_hz": [e.window_hz[0], e.window_hz[1]],
            "oc_peak_ms_per_n": e.oc_peak,
            "oc_peak_hz": e.oc_peak_hz,
            "shunted_peak_ms_per_n": e.shunted_peak,
            "shunted_peak_hz": e.shunted_peak_hz,
            "reduction_pct": e.reduction_pct,
            "flagged": e.flagged,
        }
        if e.note:
            item["note"] = e.note
        out.append(item)
    return out


def _metadata(config: ScenarioConfig, model: ModalModel) -> dict:
    meta = {
        "basis": {"n_x": config.basis.n_x, "n_y": config.basis.n_y,
                  "quadrature_order": config.basis.quadrature_order},
        "mode_count": model.n_modes,
        "retained_modes": retained_mode_count(model, config.grid.frequencies()),
        "grid": {"start_hz": config.grid.start_hz, "stop_hz": config.grid.stop_hz,
                 "count": config.grid.count},
    }
    if config.sweep is not None:
        meta["sweep"] = {"r_min_ohms": config.sweep.r_min,
                         "r_max_ohms": config.sweep.r_max,
                         "points": config.sweep.points}
    return meta


def _oc_topology(mode: str, k: int) -> ShuntTopology:
    if mode == "connected":
        return ShuntTopology.connected(ImpedanceLaw.open())
    return ShuntTopology.separated([ImpedanceLaw.open()] * k)


def _uniform_topology(mode: str, k: int, ohms: float) -> ShuntTopology:
    if mode == "connected":
        return ShuntTopology.connected(ImpedanceLaw.resistor(ohms))
    return ShuntTopology.separated([ImpedanceLaw.resistor(ohms)] * k)


def _run_topology(config: ScenarioConfig, model: ModalModel, mode: str,
                  sweep: SweepSpec, threads: int):
    """Sweep one topology, then evaluate its OC baseline and optimum FRFs."""
    grid = config.grid.frequencies()
    k = len(model.patches)
    sweep_result = sweep_resistance(model, config.force, config.target, grid,
                                    sweep, topology_mode=mode, threads=threads)
    run = frf_connected if mode == "connected" else frf_separated
    frf_oc = run(model, _oc_topology(mode, k), config.force, config.target,
                 grid, threads=threads)
    frf_opt = run(model, _uniform_topology(mode, k, sweep_result.r_opt),
                  config.force, config.target, grid, threads=threads)
    windows = mode_windows(model, sweep.report_modes, grid)
    resist = [sweep_result.r_opt] * (1 if mode == "connected" else k)
    report = percent_reduction(frf_oc, frf_opt, windows, topology=mode,
                               resistances=resist)
    return sweep_result, frf_oc, frf_opt, report


def cmd_modes(config: ScenarioConfig, out_dir: str, threads: int) -> None:
    model = _build(config)
    write_modes_csv(os.path.join(out_dir, "modes.csv"), model)


def cmd_frf(config: ScenarioConfig, out_dir: str, threads: int) -> None:
    model = _build(config)
    result = frf(model, config.topology, config.force, config.target,
                 config.grid.frequencies(), threads=threads)
    write_frf_csv(os.path.join(out_dir, "frf.csv"), result)


def cmd_sweep(config: ScenarioConfig, out_dir: str, threads: int) -> None:
    model = _build(config)
    sweep = config.sweep if config.sweep is not None else SweepSpec()
    mode = config.topology.mode
    sweep_result, _, _, report = _run_topology(config, model, mode, sweep, threads)
    write_sweep_csv(os.path.join(out_dir, "sweep.csv"), sweep_result)
    _write_json(os.path.join(out_dir, "report.json"), {
        "command": "sweep",
        "topology": mode,
        "r_opt_ohms": sweep_result.r_opt,
        "objective_peak_velocity_ms_per_n": sweep_result.objective_opt,
        "objective_peak_hz": sweep_result.peak_hz_opt,
        "resistances_ohms": list(report.resistances_ohms),
        "reductions": _report_entries(report),
        "metadata": _metadata(config, model),
    })


def cmd_compare(config: ScenarioConfig, out_dir: str, threads: int) -> None:
    model = _build(config)
    sweep = config.sweep if config.sweep is not None else SweepSpec()
    sides = {}
    mode_rows: list[dict] = []
    for mode in ("separated", "connected"):
        sweep_result, frf_oc, frf_opt, report = _run_topology(
            config, model, mode, sweep, threads)
        write_sweep_csv(os.path.join(out_dir, f"sweep_{mode}.csv"), sweep_result)
        write_frf_csv(os.path.join(out_dir, f"frf_{mode}_oc.csv"), frf_oc)
        write_frf_csv(os.path.join(out_dir, f"frf_{mode}_opt.csv"), frf_opt)
        sides[mode] = {
            "r_opt_ohms": sweep_result.r_opt,
            "objective_peak_velocity_ms_per_n": sweep_result.objective_opt,
            "resistances_ohms": list(report.resistances_ohms),
        }
        for i, entry in enumerate(_report_entries(report)):
            if len(mode_rows) <= i:
                mode_rows.append({"mode": entry["mode"],
                                  "window_hz": entry["window_hz"]})
            row = dict(entry)
            row.pop("mode")
            row.pop("window_hz")
            mode_rows[i][mode] = row
    _write_json(os.path.join(out_dir, "report.json"), {
        "command": "compare",
        "separated": sides["separated"],
        "connected": sides["connected"],
        "modes": mode_rows,
        "metadata": _metadata(config, model),
    })


COMMANDS = {
    "modes": cmd_modes,
    "frf": cmd_frf,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="platedamp",
        description="Piezoelectric shunt damping of fully clamped plates.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for frequency grids and sweeps")
    args = parser.parse_args(argv)

    try:
        config = parse_config(args.config)
    except (ConfigError, DomainError) as exc:
        print(f"platedamp: config error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(args.out, exist_ok=True)
    try:
        COMMANDS[args.command](config, args.out, max(1, args.threads))
    except (ConfigError, DomainError) as exc:
        print(f"platedamp: config error: {exc}", file=sys.stderr)
        return 2
    except (AssemblyError, SolverError, np.linalg.LinAlgError) as exc:
        print(f"platedamp: numerical failure ({type(exc).__name__}): {exc}",
              file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
