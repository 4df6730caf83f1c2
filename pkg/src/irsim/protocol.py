"""Two-step CPI protocol: sense with reflectors off, then reflect optimally.

Step I of every coherent-processing interval keeps all reflector elements
absorbing while the mounted sensors estimate angles, timing and received
powers (estimation itself is abstracted: true values plus a configurable
error). Step II applies optimized reflections: either one vector per
timing case within each PRI (short-term) or a single fixed vector for the
whole step (long-term). Reflections are designed from the estimated
parameters but all reported powers are evaluated with the true ones.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .arrays import composite_vector
from .channel import ScenarioGeometry
from .power import PowerReport, ReflectionVector, irs_received_powers, link_power
from .optimizer import (
    Infeasible,
    PddParams,
    build_problem,
    pdd_solve_with_candidates,
)
from .waveform import TimingPlan, segment_pri

__all__ = [
    "ProtocolMode",
    "EstimationError",
    "CpiResult",
    "run_cpi",
    "no_irs_baseline_power",
    "default_rcs",
    "random_phase_baseline",
]

VARIANTS = ("short_term", "long_term")


@dataclass(frozen=True)
class ProtocolMode:
    """Which reflection schedule step II ran, with the vectors it applied.

    Short-term carries (theta_1, theta_2, theta_3) for the three timing
    cases; long-term carries the single fixed (theta_0,).
    """

    variant: str
    reflections: tuple[ReflectionVector, ...]

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        want = 3 if self.variant == "short_term" else 1
        if len(self.reflections) != want:
            raise ValueError(f"{self.variant} carries {want} reflection vectors")


@dataclass(frozen=True)
class EstimationError:
    """Step-I estimation error model.

    ``angle_offset`` is added deterministically to every estimated angle
    component; ``angle_sigma`` adds an independent Gaussian draw per
    component per CPI; ``power_rel_error`` scales both measured reflector
    powers by (1 + err).
    """

    angle_offset: float = 0.0
    angle_sigma: float = 0.0
    power_rel_error: float = 0.0

    def __post_init__(self):
        if self.angle_sigma < 0:
            raise ValueError("angle_sigma must be >= 0")
        if abs(self.power_rel_error) >= 1:
            raise ValueError("power_rel_error must lie in (-1, 1)")

    @property
    def is_zero(self) -> bool:
        return self.angle_offset == 0 and self.angle_sigma == 0 and self.power_rel_error == 0


@dataclass(frozen=True)
class CpiResult:
    """Outcome of one CPI simulation."""

    lrs_energy: float  # joules collected at the legitimate radar over step II
    urs_peak_power: float  # largest per-case power seen at the unauthorized radar
    powers: PowerReport  # per-case powers as physically realized
    mode: ProtocolMode
    feasible: bool
    iterations: int  # summed solver outer iterations
    step1_reflected_power: float = 0.0  # exactly 0: reflectors are off in step I


def _perturb_angles(geom: ScenarioGeometry, err: EstimationError, rng) -> ScenarioGeometry:
    if err.angle_offset == 0 and err.angle_sigma == 0:
        return geom
    def shift(angles):
        d = np.full(2, err.angle_offset)
        if err.angle_sigma > 0:
            d = d + rng.normal(0.0, err.angle_sigma, size=2)
        elev = float(np.clip(angles.elevation + d[0], 0.0, np.pi))
        return replace(angles, elevation=elev, azimuth=angles.azimuth + d[1])
    return replace(geom, angles_l=shift(geom.angles_l), angles_u=shift(geom.angles_u))


def run_cpi(
    geom: ScenarioGeometry,
    plan: TimingPlan,
    variant: str,
    gamma: float,
    p_l: float,
    p_u: float,
    p_u_min: float | None = None,
    err: EstimationError = EstimationError(),
    rng: np.random.Generator | None = None,
    params: PddParams | None = None,
    step1_pris: int = 1,
    warm: ProtocolMode | None = None,
) -> CpiResult:
    """Simulate one CPI of the two-step protocol.

    The reflection design sees the estimated (perturbed) angles and powers;
    energies and the unauthorized-side peak are then evaluated with the
    true scenario. The long-term vector is always solved and, in short-term
    mode, also offered as a feasible fallback candidate to every per-case
    problem (its cap constraint dominates each per-case cap), which makes
    the short-term energy dominate the long-term one by construction.

    ``warm`` carries the reflections of a related already-solved CPI (e.g.
    the previous point of a cap sweep); they are offered as additional
    candidates wherever they satisfy the current cap, which makes sweep
    results monotone in a growing cap.

    An infeasible cap level flags the result and shuts the reflector off
    for the whole CPI.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if not 1 <= step1_pris < plan.pulses_per_cpi:
        raise ValueError("step1_pris must leave at least one step-II PRI")
    if p_u_min is None:
        # placeholder scale when the unauthorized radar is silent: the cap
        # vectors are all-zero then and the scale never enters
        p_u_min = p_u if p_u > 0 else 1.0
    rng = rng or np.random.default_rng(0)
    params = params or PddParams()
    n = geom.irs_spec.size
    segments = segment_pri(plan)
    t1, t2, t3 = segments.t_case1, segments.t_case2, segments.t_overlap
    n_pris = plan.pulses_per_cpi - step1_pris

    # step I: measurements (perturbed), reflectors absorbing
    est_geom = _perturb_angles(geom, err, rng)
    q_ls_true, q_us_true = irs_received_powers(geom, p_l, p_u)
    q_ls_est = q_ls_true * (1.0 + err.power_rel_error)
    q_us_est = q_us_true * (1.0 + err.power_rel_error)
    comps_est = tuple(
        composite_vector(k, est_geom.angles_l, est_geom.angles_u, est_geom.irs_spec)
        for k in "UVRG"
    )
    durations = (plan.lrs.duration, plan.urs.duration)
    urs_present = q_us_est > 0
    warm_coeff = [t.coefficients for t in warm.reflections] if warm is not None else []

    feasible = True
    iterations = 0
    off = ReflectionVector.off(n)
    try:
        p4 = build_problem("P4", (q_ls_est, q_us_est), comps_est, durations, gamma, p_u_min)
        res4 = pdd_solve_with_candidates(p4, params, candidates=warm_coeff)
        iterations += res4.outer_iterations
        theta0 = res4.theta
        if variant == "long_term":
            reflections = (theta0,)
        else:
            def solve_case(case, warm_idx):
                cand = [theta0.coefficients]
                if warm is not None and warm.variant == "short_term":
                    cand.append(warm_coeff[warm_idx])
                prob = build_problem(case, (q_ls_est, q_us_est), comps_est, durations, gamma, p_u_min)
                res = pdd_solve_with_candidates(prob, params, candidates=cand)
                return res.theta, res.outer_iterations

            # design only the cases that actually occur; a zero-duration case
            # is vacuous and inherits the whole-window vector (at full overlap
            # the case-3 problem is the whole-window problem up to scale)
            th1, th2, th3 = theta0, theta0, theta0
            if t1 > 0:
                th1, it = solve_case("P1", 0)
                iterations += it
            if t2 > 0 and urs_present:
                th2, it = solve_case("P2", 1)
                iterations += it
            if t3 > 0 and urs_present and (t1 > 0 or t2 > 0):
                th3, it = solve_case("P3", 2)
                iterations += it
            if not urs_present:
                th2 = th3 = th1  # no unauthorized signal: cases 2/3 carry nothing
            reflections = (th1, th2, th3)
    except Infeasible:
        feasible = False
        reflections = (off, off, off) if variant == "short_term" else (off,)

    if variant == "short_term":
        th1, th2, th3 = reflections
    else:
        th1 = th2 = th3 = reflections[0]

    # step II evaluation at the true scenario
    def lp(link, th):
        return link_power(link, th, geom, p_l, p_u)

    q_ll = lp("LL", th1)
    q_lu = lp("LU", th1)
    q_ul = lp("UL", th2)
    q_uu = lp("UU", th2)
    q_ol = lp("LL", th3) + lp("UL", th3)
    q_ou = lp("LU", th3) + lp("UU", th3)
    report = PowerReport(
        q_ls=q_ls_true, q_us=q_us_true,
        q_ll=q_ll, q_lu=q_lu, q_ul=q_ul, q_uu=q_uu, q_ol=q_ol, q_ou=q_ou,
    )
    lrs_energy = n_pris * (t1 * q_ll + t2 * q_ul + t3 * q_ol)
    peaks = []
    if t1 > 0:
        peaks.append(q_lu)
    if t2 > 0:
        peaks.append(q_uu)
    if t3 > 0:
        peaks.append(q_ou)
    urs_peak = max(peaks) if peaks else 0.0
    step1_power = link_power("LL", off, geom, p_l, p_u)
    return CpiResult(
        lrs_energy=float(lrs_energy),
        urs_peak_power=float(urs_peak),
        powers=report,
        mode=ProtocolMode(variant, reflections),
        feasible=feasible,
        iterations=iterations,
        step1_reflected_power=float(step1_power),
    )


def default_rcs(irs_spec, echo_ratio: float = 1.2) -> float:
    """Radar cross section of the bare target, tied to the reflector footprint.

    The echo surface is ``echo_ratio`` times the reflector area S = N d^2 and
    the RCS of a flat plate of area A is 4 pi A^2 / lambda^2.
    """
    area = echo_ratio * irs_spec.size * irs_spec.spacing**2
    return float(4.0 * np.pi * area**2 / irs_spec.wavelength**2)


def no_irs_baseline_power(
    geom: ScenarioGeometry, rcs: float, p_l: float, p_u: float
) -> tuple[float, float]:
    """Monostatic radar-range-equation echo powers without the reflector.

    Array gain convention: G = element count at transmit and again at
    receive (G^2 total), i.e. both radars beamform coherently onto the
    target. Returns (power at legitimate radar, power at unauthorized
    radar) in watts.
    """
    if rcs < 0:
        raise ValueError("rcs must be >= 0")
    lam = geom.wavelength
    def rr(p, count, dist):
        return p * count**2 * lam**2 * rcs / ((4.0 * np.pi) ** 3 * dist**4)
    return (
        float(rr(p_l, geom.lrs_spec.size, geom.dist_li)),
        float(rr(p_u, geom.urs_spec.size, geom.dist_ui)),
    )


def random_phase_baseline(
    geom: ScenarioGeometry,
    rng: np.random.Generator,
    draws: int,
    p_l: float,
    p_u: float,
    w_l=None,
    w_u=None,
) -> PowerReport:
    """Average power report over i.i.d. uniform-phase reflections."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    n = geom.irs_spec.size
    q_ls, q_us = irs_received_powers(geom, p_l, p_u, w_l, w_u)
    comps = {k: composite_vector(k, geom.angles_l, geom.angles_u, geom.irs_spec) for k in "UVRG"}
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(draws, n))
    thetas = np.exp(1j * phases)
    mean_gain = {k: float(np.mean(np.abs(thetas @ np.conj(c)) ** 2)) for k, c in comps.items()}
    q_ll = q_ls**2 / p_l * mean_gain["U"]
    q_lu = q_ls * q_us / p_u * mean_gain["V"]
    q_ul = q_ls * q_us / p_l * mean_gain["R"]
    q_uu = q_us**2 / p_u * mean_gain["G"]
    return PowerReport(
        q_ls=q_ls, q_us=q_us,
        q_ll=q_ll, q_lu=q_lu, q_ul=q_ul, q_uu=q_uu,
        q_ol=q_ll + q_ul, q_ou=q_lu + q_uu,
    )
