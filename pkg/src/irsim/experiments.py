"""Experiment sweeps over scenario parameters, with CSV/JSON emission.

Every experiment produces one row per grid point per scheme with a fixed
column set: swept_value, scheme, lrs_power_or_energy, urs_power, feasible,
iterations, wall_time. Scan experiments report received power; CPI-based
sweeps report the legitimate radar's step-II energy so that short-term and
long-term reflection schedules are directly comparable. Identical config
and seed reproduce identical numbers (wall_time excepted).

Grid points of CPI-based sweeps can run on a process pool, sized by the
IRSIM_WORKERS environment variable (default 1); the cap sweep always runs
sequentially because each point warm-starts from the previous one.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .arrays import AnglePair, composite_vector, steering_1d, steering_radar, dft_codebook
from .config import ScenarioConfig
from .waveform import segment_pri
from .optimizer import minimize_unit_modulus_quadratic, closed_form_lrs_only, closed_form_urs_null, NoNullAvailable
from .power import link_power, irs_received_powers
from .protocol import (
    default_rcs,
    no_irs_baseline_power,
    random_phase_baseline,
    run_cpi,
)

__all__ = ["SweepSpec", "EXPERIMENT_IDS", "run_experiment", "emit", "default_grid", "all_infeasible"]

EXPERIMENT_IDS = (
    "beam_scan_lrs",
    "beam_scan_urs",
    "gamma_sweep",
    "lrs_distance",
    "urs_distance",
    "aoa_difference",
    "overlap_ratio",
    "angle_error",
)

COLUMNS = (
    "swept_value",
    "scheme",
    "lrs_power_or_energy",
    "urs_power",
    "feasible",
    "iterations",
    "wall_time",
)

OPTIMIZING_SCHEMES = ("short_term", "long_term", "proposed", "lrs_only")

_POOLED = ("lrs_distance", "urs_distance", "aoa_difference", "overlap_ratio", "angle_error")


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter: its name, value grid, and the experiment family."""

    parameter: str
    grid: tuple[float, ...]
    experiment: str

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(f"experiment must be one of {EXPERIMENT_IDS}, got {self.experiment!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValueError("grid must be nonempty")
        diffs = np.diff(grid)
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)


def default_grid(experiment: str, config: ScenarioConfig) -> tuple[str, tuple[float, ...]]:
    """(parameter name, default grid) for an experiment family."""
    if experiment == "beam_scan_lrs":
        return "beam_zeta", tuple(dft_codebook(config.lrs_spec)[0])
    if experiment == "beam_scan_urs":
        return "beam_zeta", tuple(dft_codebook(config.urs_spec)[0])
    if experiment == "gamma_sweep":
        return "gamma", tuple(np.logspace(-10, -7, 7))
    if experiment == "lrs_distance":
        return "lrs_distance", tuple(np.geomspace(20.0, 160.0, 7))
    if experiment == "urs_distance":
        return "urs_distance", tuple(np.geomspace(10.0, 80.0, 7))
    if experiment == "aoa_difference":
        return "aoa_difference", (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4)
    if experiment == "overlap_ratio":
        return "overlap_ratio", tuple(np.linspace(0.0, 1.0, 6))
    if experiment == "angle_error":
        return "angle_offset_deg", (0.0, 0.25, 0.5, 1.0, 1.5, 2.0)
    raise ValueError(f"unknown experiment {experiment!r}")


def _rng_for(config: ScenarioConfig, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([config.seed, index]))


def _row(value, scheme, lrs, urs, feasible, iterations, wall) -> dict:
    return {
        "swept_value": float(value),
        "scheme": scheme,
        "lrs_power_or_energy": float(lrs),
        "urs_power": float(urs),
        "feasible": bool(feasible),
        "iterations": int(iterations),
        "wall_time": float(wall),
    }


def _scan_beam(spec, zeta) -> np.ndarray:
    """Unit-norm beam steered at direction cosine ``zeta`` on the y axis."""
    w = steering_1d(spec.count_a, spec.spacing, spec.wavelength, zeta)
    return np.kron(w, np.ones(spec.count_b)) / np.sqrt(spec.size)


def _beam_match_gain(spec, angles, beam) -> float:
    """|b^H w|^2 of a beam against the true target direction (max = count)."""
    b = steering_radar(spec, angles, sense="transmit")
    return float(abs(np.vdot(b, beam)) ** 2)


def _run_beam_scan(config: ScenarioConfig, grid, radar: str) -> list[dict]:
    geom = config.geometry()
    rng = _rng_for(config, 0)
    rcs = default_rcs(config.irs_spec, config.echo_ratio)
    rows = []
    if radar == "lrs":
        # legitimate radar only: reflect coherently back at it
        u = composite_vector("U", geom.angles_l, geom.angles_u, geom.irs_spec)
        theta = closed_form_lrs_only(u)
        spec, angles = config.lrs_spec, geom.angles_l
        base = no_irs_baseline_power(geom, rcs, config.p_l, config.p_u)[0]
        rand = random_phase_baseline(geom, rng, config.random_phase_draws, config.p_l, config.p_u)
        q_ls_matched, _ = irs_received_powers(geom, config.p_l, config.p_u)
        for zeta in grid:
            t0 = time.perf_counter()
            beam = _scan_beam(spec, zeta)
            q_ls_beam, _ = irs_received_powers(geom, config.p_l, config.p_u, w_l=beam)
            prop = link_power("LL", theta, geom, config.p_l, config.p_u, w_l=beam)
            wall = time.perf_counter() - t0
            pattern = _beam_match_gain(spec, angles, beam) / spec.size  # in [0, 1]
            scale = (q_ls_beam / q_ls_matched) ** 2
            rows.append(_row(zeta, "proposed", prop, 0.0, True, 0, wall))
            rows.append(_row(zeta, "random_phase", rand.q_ll * scale, 0.0, True, 0, 0.0))
            rows.append(_row(zeta, "no_irs", base * pattern**2, 0.0, True, 0, 0.0))
        return rows
    # unauthorized radar only: null its echo
    t0 = time.perf_counter()
    try:
        theta = closed_form_urs_null(geom.irs_spec, geom.angles_u, (1, 1))
        iters = 0
    except NoNullAvailable:
        g = composite_vector("G", geom.angles_l, geom.angles_u, geom.irs_spec)
        theta, _ = minimize_unit_modulus_quadratic([g], config.pdd)
        iters = config.pdd.max_outer
    solve_wall = time.perf_counter() - t0
    spec, angles = config.urs_spec, geom.angles_u
    base = no_irs_baseline_power(geom, rcs, config.p_l, config.p_u)[1]
    rand = random_phase_baseline(geom, rng, config.random_phase_draws, config.p_l, config.p_u)
    _, q_us_matched = irs_received_powers(geom, config.p_l, config.p_u)
    for zeta in grid:
        t0 = time.perf_counter()
        beam = _scan_beam(spec, zeta)
        _, q_us_beam = irs_received_powers(geom, config.p_l, config.p_u, w_u=beam)
        prop = link_power("UU", theta, geom, config.p_l, config.p_u, w_u=beam)
        wall = time.perf_counter() - t0
        pattern = _beam_match_gain(spec, angles, beam) / spec.size
        scale = (q_us_beam / q_us_matched) ** 2
        rows.append(_row(zeta, "proposed", 0.0, prop, True, iters, wall + solve_wall))
        solve_wall = 0.0
        rows.append(_row(zeta, "random_phase", 0.0, rand.q_uu * scale, True, 0, 0.0))
        rows.append(_row(zeta, "no_irs", 0.0, base * pattern**2, True, 0, 0.0))
    return rows


def _cpi_energy_rows(config: ScenarioConfig, value: float, index: int, schemes=("short_term",)) -> list[dict]:
    """Rows for one grid point of a CPI-based sweep (baselines included)."""
    geom = config.geometry()
    plan = config.timing()
    rows = []
    segments_pris = config.pulses_per_cpi - config.step1_pris
    for k, variant in enumerate(schemes):
        rng = _rng_for(config, index * 8 + k)
        t0 = time.perf_counter()
        cpi = run_cpi(
            geom, plan, variant, config.gamma, config.p_l, config.p_u, config.p_u_min,
            err=config.error, rng=rng, params=config.pdd, step1_pris=config.step1_pris,
        )
        wall = time.perf_counter() - t0
        rows.append(_row(value, variant, cpi.lrs_energy, cpi.urs_peak_power,
                         cpi.feasible, cpi.iterations, wall))
    # baselines: reflector with random phases, and no reflector at all
    rng = _rng_for(config, index * 8 + 7)
    t0 = time.perf_counter()
    rand = random_phase_baseline(geom, rng, config.random_phase_draws, config.p_l, config.p_u)
    seg = segment_pri(plan)
    e_rand = segments_pris * (
        seg.t_case1 * rand.q_ll + seg.t_case2 * rand.q_ul + seg.t_overlap * rand.q_ol
    )
    u_rand = max(rand.q_lu, rand.q_uu, rand.q_ou)
    wall = time.perf_counter() - t0
    rows.append(_row(value, "random_phase", e_rand, u_rand, True, 0, wall))
    rcs = default_rcs(config.irs_spec, config.echo_ratio)
    p_l_base, p_u_base = no_irs_baseline_power(geom, rcs, config.p_l, config.p_u)
    e_base = segments_pris * plan.lrs.duration * p_l_base
    rows.append(_row(value, "no_irs", e_base, p_u_base, True, 0, 0.0))
    return rows


def _point_config(config: ScenarioConfig, experiment: str, value: float) -> ScenarioConfig:
    """Specialize the scenario for one grid point of a pooled sweep."""
    if experiment == "lrs_distance":
        return config.replace(lrs_distance=float(value))
    if experiment == "urs_distance":
        return config.replace(urs_distance=float(value))
    if experiment == "aoa_difference":
        # sweep around broadside of the reflector axis, where the direction
        # cosine responds linearly to azimuth
        base = np.pi / 2
        return config.replace(
            angles_l=AnglePair(np.pi / 2, base),
            angles_u=AnglePair(np.pi / 2, base + float(value)),
        )
    if experiment == "overlap_ratio":
        # equal pulse lengths; slide the second pulse to set the overlap
        t = 30e-6
        return config.replace(
            lrs_duration=t, urs_duration=t, lrs_start=0.0,
            urs_start=float((1.0 - value) * t),
        )
    if experiment == "angle_error":
        return config.replace(
            error=replace(config.error, angle_offset=float(np.deg2rad(value)))
        )
    raise ValueError(f"unknown pooled experiment {experiment!r}")


def _pooled_point(args) -> list[dict]:
    config, experiment, value, index = args
    point_cfg = _point_config(config, experiment, value)
    if experiment in ("overlap_ratio", "angle_error"):
        schemes = ("short_term", "long_term")
    else:
        schemes = ("short_term",)
    rows = _cpi_energy_rows(point_cfg, value, index, schemes)
    if experiment == "lrs_distance":
        # reference: same optimized reflection with the unauthorized radar absent
        geom = point_cfg.geometry()
        t0 = time.perf_counter()
        u = composite_vector("U", geom.angles_l, geom.angles_u, geom.irs_spec)
        theta = closed_form_lrs_only(u)
        q_ll = link_power("LL", theta, geom, point_cfg.p_l, point_cfg.p_u)
        e = (point_cfg.pulses_per_cpi - point_cfg.step1_pris) * point_cfg.lrs_duration * q_ll
        wall = time.perf_counter() - t0
        rows.insert(1, _row(value, "lrs_only", e, 0.0, True, 0, wall))
    return rows


def _run_gamma_sweep(config: ScenarioConfig, grid) -> list[dict]:
    geom = config.geometry()
    plan = config.timing()
    order = np.argsort(grid)  # ascending caps so warm starts stay feasible
    warm = {"short_term": None, "long_term": None}
    rows_by_point: dict[int, list[dict]] = {}
    for index in order:
        gamma = float(grid[index])
        point_rows = []
        for k, variant in enumerate(("short_term", "long_term")):
            rng = _rng_for(config, int(index) * 8 + k)
            t0 = time.perf_counter()
            cpi = run_cpi(
                geom, plan, variant, gamma, config.p_l, config.p_u, config.p_u_min,
                err=config.error, rng=rng, params=config.pdd,
                step1_pris=config.step1_pris, warm=warm[variant],
            )
            wall = time.perf_counter() - t0
            if cpi.feasible:
                warm[variant] = cpi.mode
            point_rows.append(_row(gamma, variant, cpi.lrs_energy, cpi.urs_peak_power,
                                   cpi.feasible, cpi.iterations, wall))
        rows_by_point[int(index)] = point_rows
    # cap-independent baselines, once
    rng = _rng_for(config, 7)
    rand = random_phase_baseline(geom, rng, config.random_phase_draws, config.p_l, config.p_u)
    seg = segment_pri(plan)
    n_pris = config.pulses_per_cpi - config.step1_pris
    e_rand = n_pris * (seg.t_case1 * rand.q_ll + seg.t_case2 * rand.q_ul + seg.t_overlap * rand.q_ol)
    u_rand = max(rand.q_lu, rand.q_uu, rand.q_ou)
    rcs = default_rcs(config.irs_spec, config.echo_ratio)
    p_l_base, p_u_base = no_irs_baseline_power(geom, rcs, config.p_l, config.p_u)
    e_base = n_pris * plan.lrs.duration * p_l_base
    rows = []
    for index, gamma in enumerate(grid):
        rows.extend(rows_by_point[index])
        rows.append(_row(gamma, "random_phase", e_rand, u_rand, True, 0, 0.0))
        rows.append(_row(gamma, "no_irs", e_base, p_u_base, True, 0, 0.0))
    return rows


def run_experiment(config: ScenarioConfig, sweep: SweepSpec) -> list[dict]:
    """Run one experiment family over its grid; returns the result rows."""
    grid = sweep.grid
    if sweep.experiment == "beam_scan_lrs":
        return _run_beam_scan(config, grid, "lrs")
    if sweep.experiment == "beam_scan_urs":
        return _run_beam_scan(config, grid, "urs")
    if sweep.experiment == "gamma_sweep":
        return _run_gamma_sweep(config, grid)
    args = [(config, sweep.experiment, value, index) for index, value in enumerate(grid)]
    workers = int(os.environ.get("IRSIM_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_pooled_point, args))
    else:
        chunks = [_pooled_point(a) for a in args]
    return [row for chunk in chunks for row in chunk]


def all_infeasible(rows: list[dict]) -> bool:
    """True when the sweep produced optimization rows and none were feasible."""
    opt = [r for r in rows if r["scheme"] in OPTIMIZING_SCHEMES]
    return bool(opt) and not any(r["feasible"] for r in opt)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def emit(results: list[dict], fmt: str, path: str) -> None:
    """Write result rows as CSV or JSON with 12-significant-digit floats.

    The CSV header matches the column contract exactly; JSON is an array of
    row objects. Empty results are an error and create no file.
    """
    if not results:
        raise ValueError("no results to emit")
    if fmt == "csv":
        lines = [",".join(COLUMNS)]
        for row in results:
            lines.append(
                ",".join(
                    [
                        _fmt(row["swept_value"]),
                        row["scheme"],
                        _fmt(row["lrs_power_or_energy"]),
                        _fmt(row["urs_power"]),
                        "true" if row["feasible"] else "false",
                        str(row["iterations"]),
                        _fmt(row["wall_time"]),
                    ]
                )
            )
        payload = "\n".join(lines) + "\n"
    elif fmt == "json":
        rounded = [
            {
                key: (float(_fmt(row[key])) if isinstance(row[key], float) else row[key])
                for key in COLUMNS
            }
            for row in results
        ]
        payload = json.dumps(rounded, indent=2) + "\n"
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        with open(path, "w") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
