"""
Command-line front end: ``endsim <command> [--config ...] [--set key=value ...]``.

Every command loads a :class:`RunConfig`, runs one pipeline, writes a CSV
file (plus an optional JSON sidecar) into ``--out`` and prints a one-line
summary. Exit status: 0 success, 1 configuration or I/O error, 2 numerical
error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .constants import CODATA2022, SNAPSHOT_HASH
from .grating import detection_probability, detection_probability_quadrature
from .interference import (
    carpet,
    fringe_pattern,
    fringe_period,
    propagated_widths,
    quantum_classical_distance,
    visibility,
)
from .macroscopicity import macroscopicity_mu
from .systematics import systematics_report, talbot_table

__all__ = ["Dataset", "emit", "run", "main", "COMMANDS"]

_FMT = "%.12g"


@dataclass
class Dataset:
    """Table to write: ``header`` names the columns, ``units`` their units."""

    name: str
    header: list[str]
    units: list[str]
    rows: list
    notes: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _cell(v) -> str:
    if isinstance(v, str):
        return v
    return _FMT % v


def _header_block(dataset: Dataset, command: str, config: RunConfig) -> list[str]:
    lines = [
        f"# endsim {__version__} {command}",
        f"# constants: {CODATA2022.revision} snapshot {SNAPSHOT_HASH}",
        "# config:",
    ]
    lines += [f"#   {line}" for line in config.echo()]
    lines.append("# columns: " + ", ".join(f"{h} [{u}]" for h, u in zip(dataset.header, dataset.units)))
    lines += [f"# {note}" for note in dataset.notes]
    return lines


def emit(dataset: Dataset, command: str, config: RunConfig, out_dir, fmt: str = "csv",
         timestamp: bool = False) -> list[Path]:
    """Write ``<out_dir>/<dataset.name>.csv`` and, for ``csv+json``, a JSON sidecar.

    Output is byte-identical for identical inputs; a creation timestamp is
    only ever written to the sidecar, and only when ``timestamp`` is set.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = _header_block(dataset, command, config)
    lines.append(",".join(dataset.header))
    lines += [",".join(_cell(v) for v in row) for row in dataset.rows]
    path = out / f"{dataset.name}.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    written = [path]
    if fmt == "csv+json":
        meta = {
            "command": command,
            "version": __version__,
            "constants": {"revision": CODATA2022.revision, "snapshot_hash": SNAPSHOT_HASH},
            "config": config.echo(),
            "columns": [{"name": h, "unit": u} for h, u in zip(dataset.header, dataset.units)],
            "notes": dataset.notes,
            "summary": dataset.summary,
            "data_file": path.name,
        }
        if timestamp:
            meta["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        side = out / f"{dataset.name}.json"
        with open(side, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        written.append(side)
    return written


# pipelines -------------------------------------------------------------


def _grid(cfg: RunConfig, params):
    w = propagated_widths(params)
    h = cfg.value("output.half_width") * w.sigma_x_tilde
    return np.linspace(-h, h, cfg.value("output.grid"))


def _unit_integral(X, density):
    dx = (X[1] - X[0]) * 1e12
    return density / (density.sum() * dx)


def _fringes(cfg: RunConfig) -> tuple[list[Dataset], str]:
    params = cfg.evolution()
    B = cfg.coefficients()
    p = fringe_pattern(B, params, _grid(cfg, params))
    X = p.relative_positions
    q = _unit_integral(X, p.quantum_density)
    c = _unit_integral(X, p.classical_density)
    period = fringe_period(X, p.quantum_density, p.sigma_x_tilde)
    summary = {
        "t_over_T_M": params.t / params.talbot_time,
        "period_D_pm": p.period * 1e12,
        "fitted_period_pm": period * 1e12,
        "sigma_x_tilde_pm": p.sigma_x_tilde * 1e12,
        "visibility_quantum": visibility(p),
        "visibility_classical": visibility(p, "classical"),
        "l1_distance": quantum_classical_distance(p),
    }
    ds = Dataset(
        "fringes",
        ["relative_position_pm", "quantum_density", "classical_density"],
        ["pm", "1/pm", "1/pm"],
        list(zip(X * 1e12, q, c)),
        ["coordinate: X - x D/d; densities normalised to unit integral per detected electron"],
        summary,
    )
    line = (f"fringes: t = {summary['t_over_T_M']:.4g} T_M, D = {summary['period_D_pm']:.2f} pm, "
            f"visibility q/c = {summary['visibility_quantum']:.3f}/{summary['visibility_classical']:.3f}, "
            f"L1 = {summary['l1_distance']:.4f}")
    return [ds], line


def _carpet_dataset(cfg: RunConfig, which: str) -> tuple[list[Dataset], str]:
    t_max = cfg.si("evolution.t_max")
    base = cfg.evolution()
    times = np.linspace(0.0, t_max, cfg.value("evolution.t_points"))
    X = _grid(cfg, base.at(t_max))
    cp = carpet(times, X, cfg.coefficients(), base)
    body = cp.quantum if which == "quantum" else cp.classical
    T_M = base.talbot_time
    header = ["X_pm/t_us"] + [_FMT % (t * 1e6) for t in times]
    rows = [[x * 1e12] + list(body[:, i]) for i, x in enumerate(X)]
    # distances on each time's own grid; the common grid undersamples the narrow early envelopes
    l1 = [quantum_classical_distance(fringe_pattern(cfg.coefficients(), base.at(t))) for t in times]
    i = int(np.argmax(l1))
    summary = {"t_max_over_T_M": t_max / T_M, "n_times": len(times), "n_positions": len(X),
               "max_l1_distance": l1[i], "argmax_t_over_T_M": times[i] / T_M}
    notes = [f"layout: first row t [us], first column X - x D/d [pm], body {which} density",
             "normalisation: each t column scaled to its maximum"]
    name = "carpet" if which == "quantum" else "classical"
    ds = Dataset(name, header, ["pm"] + ["1"] * len(times), rows, notes, summary)
    line = (f"{name}: {len(times)} times over [0, {t_max / T_M:.3g} T_M] x {len(X)} positions; "
            f"max quantum-classical L1 {l1[i]:.4f} at t = {times[i] / T_M:.3f} T_M")
    return [ds], line


def _misalign(cfg: RunConfig) -> tuple[list[Dataset], str]:
    mode = cfg.value("alignment.mode")
    mode = "small_pinhole" if mode == "perfect" else mode
    params = cfg.evolution()
    X = _grid(cfg, params)
    R = cfg.si("crystal.radius")
    y0 = cfg.si("alignment.y")
    aligned = fringe_pattern(cfg.coefficients("perfect"), params, X)
    mis = fringe_pattern(cfg.coefficients(mode, y0), params, X)
    rows = list(zip(X * 1e12, _unit_integral(X, aligned.quantum_density), _unit_integral(X, mis.quantum_density)))
    ys = [0.0, R / 4, R / 2, R]
    vis = [visibility(fringe_pattern(cfg.coefficients(mode, y), params, X)) for y in ys]
    summary = {"mode": mode, "y_nm": y0 * 1e9, "visibility_aligned": visibility(aligned),
               "visibility_misaligned": visibility(mis),
               "visibility_vs_y": {f"{y / R:g} R_M": v for y, v in zip(ys, vis)}}
    notes = [f"misalignment mode {mode}, detected electron at y = {y0 * 1e9:.6g} nm",
             "densities normalised to unit integral; visibility vs y at 0, R_M/4, R_M/2, R_M: "
             + " ".join(f"{v:.6g}" for v in vis)]
    ds = Dataset("misalign", ["relative_position_pm", "aligned_density", "misaligned_density"],
                 ["pm", "1/pm", "1/pm"], rows, notes, summary)
    line = (f"misalign: visibility aligned {summary['visibility_aligned']:.3f}, misaligned "
            f"{summary['visibility_misaligned']:.3f} at y = {y0 * 1e9:.3g} nm ({mode})")
    return [ds], line


def _macro(cfg: RunConfig) -> tuple[list[Dataset], str]:
    res = macroscopicity_mu(cfg.mass(), cfg.period(), cfg.si("macro.t"), cfg.crystal(),
                            bounds=(cfg.si("macro.sigma_q_min"), cfg.si("macro.sigma_q_max")),
                            n_scan=cfg.value("macro.n_scan"), rtol=cfg.value("macro.rtol"))
    summary = {"mu": res.mu, "argmax_sigma_q_per_m": res.argmax_sigma_q, "tau_max_s": res.tau_max,
               "boundary_maximum": res.boundary_maximum}
    notes = [f"mu = {res.mu!r}; argmax sigma_q = {res.argmax_sigma_q!r} 1/m; boundary maximum: {res.boundary_maximum}"]
    ds = Dataset("macro", ["sigma_q_per_m", "tau_max_s"], ["1/m", "s"],
                 list(zip(res.sigma_q_grid, res.tau_max_grid)), notes, summary)
    flag = " (maximum on a search bound)" if res.boundary_maximum else ""
    line = f"macro: mu = {res.mu:.3f} at sigma_q = {res.argmax_sigma_q:.4g} 1/m{flag}"
    return [ds], line


def _detect_prob(cfg: RunConfig) -> tuple[list[Dataset], str]:
    crystal, beam, f = cfg.crystal(), cfg.beam(), cfg.amplitudes()
    closed = detection_probability(crystal, beam, f)
    quad = detection_probability_quadrature(crystal, beam, f)
    summary = {"pr_det_closed_form": closed, "pr_det_quadrature": quad,
               "relative_difference": abs(closed - quad) / quad}
    notes = ["linearised scattering; values above 1 flag the linearisation as out of range"]
    notes += [f"f_{n} = {v * 1e24:.12g} pm^2" for n, v in f.items()]
    ds = Dataset("detect_prob", ["pr_det_closed_form", "pr_det_quadrature"], ["1", "1"],
                 [(closed, quad)], notes, summary)
    line = f"detect-prob: closed form {closed:.6g}, quadrature {quad:.6g}"
    return [ds], line


def _table(cfg: RunConfig) -> tuple[list[Dataset], str]:
    d = cfg.period() if cfg.value("table.d") == "auto" else cfg.si("table.d")
    masses = cfg.si("table.masses")
    rows = talbot_table(masses, d)
    amu = CODATA2022.amu
    data = [(r.mass / amu, r.talbot_time, r.free_fall) for r in rows]
    summary = {"d_pm": d * 1e12, "rows": [list(r) for r in data]}
    ds = Dataset("table", ["mass_amu", "talbot_time_s", "free_fall_m"], ["amu", "s", "m"], data,
                 [f"grating period d = {d * 1e12:.6g} pm; free fall over 2 T_M"], summary)
    line = "table: " + "; ".join(f"{m:.3g} amu -> {T:.2g} s, {z:.2g} m" for m, T, z in data)
    return [ds], line


def _systematics(cfg: RunConfig) -> tuple[list[Dataset], str]:
    rep = systematics_report(cfg.si("beam.energy"), cfg.mass(), cfg.period(),
                             impact_parameter=cfg.si("systematics.impact_parameter"),
                             cavity_radius=cfg.si("systematics.cavity_radius"),
                             masses=cfg.si("table.masses"))
    rows = [("deflection_angle", rep.deflection_angle, "rad"),
            ("mirror_shift", rep.mirror_shift, "m"),
            ("backscatter_velocity", rep.backscatter_velocity, "m/s")]
    summary = {name: v for name, v, _ in rows}
    ds = Dataset("systematics", ["quantity", "value", "unit"], ["-", "SI", "-"], rows,
                 ["mirror shift evaluated after 2 T_M"], summary)
    line = (f"systematics: deflection {rep.deflection_angle:.2g} rad, mirror shift "
            f"{rep.mirror_shift * 1e12:.2g} pm, backscatter {rep.backscatter_velocity * 1e3:.2g} mm/s")
    return [ds], line


COMMANDS = {
    "fringes": (_fringes, "quantum and classical fringe pattern at evolution.t"),
    "carpet": (lambda c: _carpet_dataset(c, "quantum"), "quantum Talbot carpet over [0, t_max]"),
    "classical": (lambda c: _carpet_dataset(c, "classical"), "classical shadow carpet over [0, t_max]"),
    "misalign": (_misalign, "aligned vs misaligned fringes and visibility vs y"),
    "macro": (_macro, "tau_max(sigma_q) curve and macroscopicity mu"),
    "detect-prob": (_detect_prob, "electron detection probability, closed form and quadrature"),
    "table": (_table, "Talbot times and free-fall distances"),
    "systematics": (_systematics, "charge deflection, mirror charge and backscatter estimates"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"endsim: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="endsim", description="Electron-enabled nanoparticle diffraction simulator")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default="case_study", help="preset name or config file path")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config entry, e.g. --set 'source.mass=1e9 amu'")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "csv+json"), help="output format")
        p.add_argument("--grid", type=int, help="number of position samples")
        p.add_argument("--t-max", type=float, help="carpet end time in units of T_M")
        p.add_argument("--timestamp", action="store_true", help="record creation time in the JSON sidecar")
    return ap


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.grid is not None:
        overrides.append(f"output.grid = {args.grid}")
    if args.t_max is not None:
        overrides.append(f"evolution.t_max = {args.t_max!r} T_M")
    if args.format is not None:
        overrides.append(f"output.format = {args.format}")
    try:
        cfg = load_config(args.config).with_overrides(overrides)
    except ConfigError as exc:
        print(f"endsim: config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"endsim: config error: --config: {exc}", file=sys.stderr)
        return 1

    pipeline = COMMANDS[args.command][0]
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            datasets, summary = pipeline(cfg)
    except ConfigError as exc:
        print(f"endsim: config error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError) as exc:
        print(f"endsim: numerical error in {args.command}: {exc}", file=sys.stderr)
        return 2

    try:
        for ds in datasets:
            emit(ds, args.command, cfg, args.out, cfg.value("output.format"), args.timestamp)
    except OSError as exc:
        print(f"endsim: cannot write output to {args.out!r}: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
