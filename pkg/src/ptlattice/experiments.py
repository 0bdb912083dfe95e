"""The five experiment runners behind the command-line front end.

Each runner takes a parsed ExperimentConfig and produces a ResultTable whose
metadata carries the resolved configuration, the package version, and any
accuracy warnings.  Sweep points are independent computations and run on a
process pool when jobs > 1; output rows keep grid order either way.
Analytic reference columns always come from the twomode module.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .dynamics import (
    DriveParams,
    evolve,
    plateau_averages,
    prepare_band_state,
    transition_probability,
)
from .errors import ConfigError
from .lattice import band_structure, pt_phase
from .results import ResultTable
from .svgplot import Series, render_line_chart
from .twomode import (
    TwoModeParams,
    evolve_two_mode,
    lz_probability,
    lz_survival,
    multicross_power,
)


def _base_metadata(cfg: ExperimentConfig) -> dict:
    return {"config": cfg.resolved(), "version": __version__, "warnings": []}


def run_bands(cfg: ExperimentConfig) -> ResultTable:
    """Band energies over a momentum grid: rows (q, band, energy_re, energy_im)."""
    if cfg.kind != "bands":
        raise ConfigError(f"run_bands got kind {cfg.kind!r}")
    grid = cfg.q_grid.values()
    structure = band_structure(cfg.lattice, grid, cfg.band_count)
    rows = []
    for iq, q in enumerate(structure.q_grid):
        for band in range(structure.band_count):
            energy = structure.energies[band, iq]
            rows.append((float(q), band + 1, float(energy.real), float(energy.imag)))
    metadata = _base_metadata(cfg)
    label, max_imag = pt_phase(cfg.lattice, grid)
    metadata["phase"] = label
    metadata["max_imag_energy"] = max_imag
    return ResultTable(["q", "band", "energy_re", "energy_im"], rows, metadata)


def _trace_table(cfg: ExperimentConfig) -> tuple[ResultTable, object]:
    state = prepare_band_state(cfg.lattice, cfg.drive.q_start, 1)
    trace = evolve(state, cfg.lattice, cfg.drive, cfg.integrator)
    metadata = _base_metadata(cfg)
    metadata["warnings"] = list(trace.metadata.get("warnings", []))
    metadata["integration"] = {
        k: v for k, v in trace.metadata.items() if k != "warnings"
    }
    rows = [
        (float(z), float(q), float(rho), float(p1), float(p2))
        for z, q, rho, p1, p2 in zip(
            trace.z, trace.q, trace.power, trace.band1_prob, trace.band2_prob
        )
    ]
    table = ResultTable(["z", "q", "power", "band1_prob", "band2_prob"], rows, metadata)
    return table, trace


def run_evolve(cfg: ExperimentConfig) -> ResultTable:
    """One driven run: rows (z, q, power, band1_prob, band2_prob)."""
    if cfg.kind != "evolve":
        raise ConfigError(f"run_evolve got kind {cfg.kind!r}")
    table, trace = _trace_table(cfg)
    table.metadata["final_power"] = float(trace.power[-1])
    two = TwoModeParams.from_lattice(cfg.lattice, cfg.drive.rate)
    if abs(two.skew) < two.coupling:
        crossings = plateau_averages(trace)
        n = max(crossings) if crossings else 0
        if n >= 1:
            table.metadata["predicted_terminal_power"] = multicross_power(
                two.coupling, two.skew, two.rate, n
            )
    return table


def run_multicross(cfg: ExperimentConfig) -> ResultTable:
    """Staircase run over >= 2 crossings: rows (z, q, power), plateau summary in metadata."""
    if cfg.kind != "multicross":
        raise ConfigError(f"run_multicross got kind {cfg.kind!r}")
    span_lo, span_hi = sorted((cfg.drive.q_start, cfg.drive.q_stop))
    odd = [m for m in range(int(np.floor(span_lo)), int(np.ceil(span_hi)) + 1)
           if m % 2 != 0 and span_lo < m < span_hi]
    if len(odd) < 2:
        raise ConfigError("multicross drive must cross at least two odd-integer momenta")
    wide, trace = _trace_table(cfg)
    table = ResultTable(["z", "q", "power"], [row[:3] for row in wide.rows], wide.metadata)
    two = TwoModeParams.from_lattice(cfg.lattice, cfg.drive.rate)
    plateaus = []
    for n, mean_power in plateau_averages(trace).items():
        entry = {"crossings": n, "mean_power": mean_power}
        if n >= 1 and abs(two.skew) < two.coupling:
            entry["predicted_power"] = multicross_power(two.coupling, two.skew, two.rate, n)
        plateaus.append(entry)
    table.metadata["plateaus"] = plateaus
    return table


def _sweep_point(job) -> float:
    lattice, drive, integrator = job
    return transition_probability(lattice, drive, integrator)


def run_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Transition probability over a rate grid: rows (rate, p_numeric, p_analytic, abs_error)."""
    if cfg.kind != "sweep":
        raise ConfigError(f"run_sweep got kind {cfg.kind!r}")
    rates = cfg.rate_grid.values()
    q_start, q_stop = cfg.sweep_span
    jobs = [
        (cfg.lattice, DriveParams(float(rate), q_start, q_stop), cfg.integrator)
        for rate in rates
    ]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            numeric = list(pool.map(_sweep_point, jobs))
    else:
        numeric = [_sweep_point(job) for job in jobs]
    rows = []
    for rate, p_num in zip(rates, numeric):
        two = TwoModeParams.from_lattice(cfg.lattice, float(rate))
        p_ref = lz_probability(two.coupling, two.skew, two.rate)
        rows.append((float(rate), float(p_num), float(p_ref), abs(float(p_num) - p_ref)))
    metadata = _base_metadata(cfg)
    metadata["max_abs_error"] = max(row[3] for row in rows)
    return ResultTable(["rate", "p_numeric", "p_analytic", "abs_error"], rows, metadata)


def run_twomode(cfg: ExperimentConfig) -> ResultTable:
    """Two-level sweep: rows (t, a1_sq, a2_sq, power) plus analytic asymptotes."""
    if cfg.kind != "twomode":
        raise ConfigError(f"run_twomode got kind {cfg.kind!r}")
    span = None if cfg.t_max is None else (-cfg.t_max, cfg.t_max)
    trace = evolve_two_mode(cfg.twomode, t_span=span)
    rows = [
        (float(t), float(abs(a1) ** 2), float(abs(a2) ** 2), float(abs(a1) ** 2 + abs(a2) ** 2))
        for t, a1, a2 in zip(trace.t, trace.a1, trace.a2)
    ]
    metadata = _base_metadata(cfg)
    metadata["warnings"] = list(trace.metadata.get("warnings", []))
    tail1, tail2 = trace.tail_intensities()
    metadata["tail_intensities"] = {"a1_sq": tail1, "a2_sq": tail2}
    two = cfg.twomode
    skew = two.skew if two.rate >= 0 else -two.skew
    if abs(skew) < two.coupling and two.rate != 0:
        metadata["analytic"] = {
            "transition": lz_probability(two.coupling, skew, two.rate),
            "survival": lz_survival(two.coupling, skew, two.rate),
        }
    return ResultTable(["t", "a1_sq", "a2_sq", "power"], rows, metadata)


RUNNERS = {
    "bands": run_bands,
    "evolve": run_evolve,
    "sweep": run_sweep,
    "multicross": run_multicross,
    "twomode": run_twomode,
}


def render_chart(cfg: ExperimentConfig, table: ResultTable, path) -> None:
    """Draw the SVG companion of a result table, axes matching the run kind."""
    kind = cfg.kind
    if kind == "bands":
        q = table.column("q")
        bands = table.column("band")
        energy = table.column("energy_re")
        series = [
            Series(f"band {b}", q[bands == b], energy[bands == b])
            for b in sorted(set(int(b) for b in bands))
        ]
        render_line_chart(path, series, title="Band structure", x_label="q", y_label="energy")
    elif kind in ("evolve", "multicross"):
        series = [Series("power", table.column("z"), table.column("power"))]
        plateaus = table.metadata.get("plateaus", [])
        z = table.column("z")
        for entry in plateaus:
            if "predicted_power" in entry:
                level = entry["predicted_power"]
                series.append(
                    Series(
                        f"plateau {entry['crossings']} theory",
                        np.array([z[0], z[-1]]),
                        np.array([level, level]),
                        dashed=True,
                    )
                )
        render_line_chart(path, series, title="Beam power", x_label="z", y_label="power")
    elif kind == "sweep":
        rate = table.column("rate")
        series = [
            Series("numeric", rate, table.column("p_numeric")),
            Series("two-mode theory", rate, table.column("p_analytic"), dashed=True),
        ]
        render_line_chart(
            path, series, title="Transition probability", x_label="rate",
            y_label="P", x_log=True,
        )
    else:
        t = table.column("t")
        series = [
            Series("|a1|^2", t, table.column("a1_sq")),
            Series("|a2|^2", t, table.column("a2_sq")),
            Series("power", t, table.column("power"), dashed=True),
        ]
        render_line_chart(path, series, title="Two-level sweep", x_label="t", y_label="intensity")
