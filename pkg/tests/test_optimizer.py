import numpy as np
import pytest
from scipy.optimize import minimize

from irsim import (
    AnglePair,
    ArraySpec,
    BudgetExceeded,
    Infeasible,
    NoNullAvailable,
    PddParams,
    PddState,
    ProblemData,
    brute_force_oracle,
    build_problem,
    canonicalize,
    closed_form_lrs_only,
    closed_form_urs_null,
    composite_vector,
    dual_and_penalty_update,
    inner_theta_update,
    inner_vartheta_update,
    minimize_unit_modulus_quadratic,
    pdd_solve,
    pdd_solve_with_candidates,
    problem_constraint,
    problem_objective,
)
from irsim.optimizer import _clip_disk, _p9_residual, _solve_p9, _top_sigma_sq

from conftest import random_angles

IRS22 = ArraySpec(2, 2, 0.02, 0.2)


def random_problem(rng, n=4, case="P3", gamma_frac=None):
    """Random constrained instance built from a physical scenario."""
    nx = 2 if n == 4 else n
    spec = ArraySpec(nx, n // nx, 0.02, 0.2)
    comps = tuple(
        composite_vector(k, random_angles(rng), random_angles(rng), spec) for k in "UVRG"
    )
    q_ls = float(10 ** rng.uniform(-8, -5))
    q_us = float(10 ** rng.uniform(-8, -5))
    loose = build_problem(case, (q_ls, q_us), comps, (25e-6, 30e-6), 1.0, 0.03)
    if gamma_frac is None:
        gamma_frac = float(rng.uniform(0.05, 0.8))
    cap_at_align = problem_constraint(loose, np.exp(1j * np.angle(loose.q1)))
    gamma = max(cap_at_align * gamma_frac, 1e-300)
    return build_problem(case, (q_ls, q_us), comps, (25e-6, 30e-6), gamma, 0.03)


# ---------------------------------------------------------------------------
# problem construction


def test_build_problem_p1_unit_mapping(rng):
    comps = tuple(composite_vector(k, random_angles(rng), random_angles(rng), IRS22) for k in "UVRG")
    u, v, r, g = comps
    prob = build_problem("P1", (1.0, 1.0), comps, None, gamma=1.0, p_u_min=1.0)
    np.testing.assert_allclose(prob.q1, u, atol=1e-15)
    np.testing.assert_allclose(prob.h1, v, atol=1e-15)
    assert np.all(prob.q2 == 0) and np.all(prob.h2 == 0)


def test_build_problem_p4_scales_p3(rng):
    comps = tuple(composite_vector(k, random_angles(rng), random_angles(rng), IRS22) for k in "UVRG")
    t = 25e-6
    p3 = build_problem("P3", (2.0, 3.0), comps, None, gamma=1.0, p_u_min=1.0)
    p4 = build_problem("P4", (2.0, 3.0), comps, (t, t), gamma=1.0, p_u_min=1.0)
    for _ in range(10):
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
        np.testing.assert_allclose(
            problem_objective(p4, theta), t * problem_objective(p3, theta), rtol=1e-12
        )
        np.testing.assert_allclose(
            problem_constraint(p4, theta), problem_constraint(p3, theta), rtol=1e-12
        )


def test_build_problem_rejects_degenerate(rng):
    comps = tuple(composite_vector(k, random_angles(rng), random_angles(rng), IRS22) for k in "UVRG")
    with pytest.raises(ValueError):
        build_problem("P2", (1.0, 0.0), comps, None, gamma=1.0, p_u_min=1.0)
    with pytest.raises(ValueError):
        build_problem("P1", (0.0, 1.0), comps, None, gamma=1.0, p_u_min=1.0)
    with pytest.raises(ValueError):
        build_problem("P1", (1.0, 1.0), comps, None, gamma=0.0, p_u_min=1.0)
    with pytest.raises(ValueError):
        build_problem("P5", (1.0, 1.0), comps, None, gamma=1.0, p_u_min=1.0)


def test_problem_data_invariants():
    z = np.zeros(3, dtype=complex)
    with pytest.raises(ValueError):
        ProblemData(q1=z, q2=z, h1=z, h2=z, gamma=1.0, p_u_min=1.0)
    with pytest.raises(ValueError):
        ProblemData(q1=np.ones(3), q2=z, h1=z, h2=z, gamma=-1.0, p_u_min=1.0)


# ---------------------------------------------------------------------------
# the surrogate projection (P9 analogue)


def p9_numeric_oracle(b, B, gamma):
    """Projection of b onto disks + cap via SLSQP on stacked real coordinates."""
    n = b.shape[0]

    def unpack(x):
        return x[:n] + 1j * x[n:]

    def fun(x):
        return float(np.sum(np.abs(unpack(x) - b) ** 2))

    cons = [
        {"type": "ineq", "fun": lambda x, k=k: 1.0 - abs(unpack(x)[k]) ** 2}
        for k in range(n)
    ]
    if B is not None:
        cons.append(
            {
                "type": "ineq",
                "fun": lambda x: gamma - float(np.sum(np.abs(B.conj().T @ unpack(x)) ** 2)),
            }
        )
    x0 = np.concatenate([np.real(b), np.imag(b)]) * 0.5
    res = minimize(fun, x0, constraints=cons, method="SLSQP",
                   options={"maxiter": 400, "ftol": 1e-14})
    return unpack(res.x), res.fun


def test_p9_unconstrained_is_clipped_minimum(rng):
    # hand-derived stationary point: clip the free minimum into the disks
    for _ in range(10):
        n = 5
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        theta, mu = _solve_p9(b, None, np.inf, 0.0, b, 0.0)
        assert mu == 0.0
        np.testing.assert_allclose(theta, _clip_disk(b), atol=1e-14)


def test_p9_matches_numeric_solver(rng):
    for trial in range(8):
        n = 5
        b = 2.0 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        B = (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) / np.sqrt(n)
        gamma = float(rng.uniform(0.05, 0.5))
        sig2 = _top_sigma_sq(B)
        theta, mu = _solve_p9(b, B, gamma, sig2, _clip_disk(b), 0.0)
        ref, ref_val = p9_numeric_oracle(b, B, gamma)
        val = float(np.sum(np.abs(theta - b) ** 2))
        # same optimum up to the solver's documented cap window (it accepts
        # points up to 1e-4 relative inside the cap), and strictly feasible
        assert val <= ref_val + 5e-5 * max(1.0, ref_val)
        assert np.sum(np.abs(B.conj().T @ theta) ** 2) <= gamma * (1 + 1e-9)
        assert np.max(np.abs(theta)) <= 1 + 1e-9


def test_p9_kkt_residual_small(rng):
    n = 6
    b = 2.0 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    B = (rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))) / np.sqrt(n)
    sig2 = _top_sigma_sq(B)
    theta, mu = _solve_p9(b, B, 0.2, sig2, _clip_disk(b), 0.0)
    assert _p9_residual(theta, b, B, mu, sig2) < 1e-7


# ---------------------------------------------------------------------------
# the solver blocks


def test_vartheta_update_is_phase_projection(rng):
    n = 6
    theta = rng.normal(size=n) + 1j * rng.normal(size=n)
    lam = rng.normal(size=n) + 1j * rng.normal(size=n)
    state = PddState(theta=theta, vartheta=np.ones(n, complex), lam=lam, rho=0.7)
    out = inner_vartheta_update(state)
    arg = theta + 0.7 * lam
    np.testing.assert_allclose(out, arg / np.abs(arg), atol=1e-12)


def test_vartheta_update_real_positive_gives_ones():
    state = PddState(
        theta=np.array([0.5 + 0j, 2.0 + 0j]),
        vartheta=np.ones(2, complex),
        lam=np.zeros(2, complex),
        rho=1.0,
    )
    np.testing.assert_array_equal(inner_vartheta_update(state), np.ones(2))


def test_vartheta_update_zero_argument_convention():
    state = PddState(
        theta=np.array([0.0 + 0j]),
        vartheta=np.ones(1, complex),
        lam=np.zeros(1, complex),
        rho=1.0,
    )
    np.testing.assert_array_equal(inner_vartheta_update(state), [1.0 + 0j])


def test_theta_update_unconstrained_closed_form(rng):
    # with a vanishing objective gradient the first surrogate step is the
    # clipped penalty center
    n = 4
    q1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    prob = ProblemData(q1=q1, q2=np.zeros(n), h1=np.zeros(n), h2=np.zeros(n),
                       gamma=1.0, p_u_min=1.0)
    # start orthogonal to q1 so the linearization term vanishes
    theta0 = np.zeros(n, dtype=complex)
    theta0[0], theta0[1] = np.conj(q1[1]), -np.conj(q1[0])
    theta0 = theta0 / np.linalg.norm(theta0)
    assert abs(np.vdot(q1, theta0)) < 1e-12
    vartheta = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    lam = 0.1 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    state = PddState(theta=theta0, vartheta=vartheta, lam=lam, rho=0.8)
    params = PddParams(max_sca=1)
    theta, objs = inner_theta_update(state, prob, params)
    np.testing.assert_allclose(theta, _clip_disk(vartheta - 0.8 * lam), atol=1e-12)


def test_theta_update_monotone_descent(rng):
    for _ in range(10):
        prob = random_problem(rng)
        n = prob.n
        theta0 = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        state = PddState(theta=theta0, vartheta=np.array(theta0),
                         lam=np.zeros(n, complex), rho=1.0)
        _, objs = inner_theta_update(state, prob)
        for a, b in zip(objs, objs[1:]):
            assert b <= a + 1e-9 * max(1.0, abs(a))


def test_theta_update_fixed_point(rng):
    # an unconstrained optimum with matching copies stays put
    n = 4
    q1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    prob = ProblemData(q1=q1, q2=np.zeros(n), h1=np.zeros(n), h2=np.zeros(n),
                       gamma=1.0, p_u_min=1.0)
    res = pdd_solve(prob)
    theta_star = res.theta.coefficients
    state = PddState(theta=np.array(theta_star), vartheta=np.array(theta_star),
                     lam=np.zeros(n, complex), rho=1e-6)
    theta, _ = inner_theta_update(state, prob)
    np.testing.assert_allclose(theta, theta_star, atol=1e-4)


def test_dual_update_identity_when_copies_match(rng):
    n = 3
    theta = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
    state = PddState(theta=theta, vartheta=np.array(theta),
                     lam=np.full(n, 0.5 + 0.5j), rho=1.0)
    out = dual_and_penalty_update(state, PddParams(c=0.5))
    np.testing.assert_allclose(out.lam, state.lam, atol=1e-15)
    assert out.rho == 0.5


def test_dual_update_scales_rho():
    state = PddState(theta=np.ones(2, complex), vartheta=np.ones(2, complex),
                     lam=np.zeros(2, complex), rho=1.0)
    out = dual_and_penalty_update(state, PddParams(c=0.5))
    assert out.rho == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# full solves


def test_pdd_unconstrained_alignment_n64():
    spec = ArraySpec(64, 1, 0.02, 0.2)
    u = composite_vector("U", AnglePair(np.pi / 2, 0.0), AnglePair(np.pi / 2, 0.5), spec)
    prob = ProblemData(q1=u, q2=np.zeros(64), h1=np.zeros(64), h2=np.zeros(64),
                       gamma=1.0, p_u_min=1.0)
    res = pdd_solve(prob)
    assert res.converged
    np.testing.assert_allclose(res.objective, 64.0**2, rtol=1e-4)


def test_pdd_n1_problem():
    prob = ProblemData(q1=np.array([2.0 + 1.0j]), q2=np.array([0.5j]),
                       h1=np.array([0.1 + 0.0j]), h2=np.zeros(1),
                       gamma=1.0, p_u_min=1.0)
    res = pdd_solve(prob)
    np.testing.assert_allclose(res.objective, abs(2 + 1j) ** 2 + 0.25, rtol=1e-9)
    with pytest.raises(Infeasible):
        pdd_solve(ProblemData(q1=np.array([1.0 + 0j]), q2=np.zeros(1),
                              h1=np.array([1.0 + 0j]), h2=np.zeros(1),
                              gamma=0.5, p_u_min=1.0))


def test_pdd_feasibility_and_convergence(rng):
    for _ in range(10):
        prob = random_problem(rng)
        res = pdd_solve(prob)
        coeff = res.theta.coefficients
        np.testing.assert_allclose(np.abs(coeff), 1.0, atol=1e-12)
        assert problem_constraint(prob, coeff) <= prob.gamma * (1 + 1e-6)
        if res.converged:
            assert res.trace[-1].gap < PddParams().outer_tol


def test_pdd_beats_grid_oracle(rng):
    for _ in range(10):
        prob = random_problem(rng)
        res = pdd_solve(prob)
        _, best = brute_force_oracle(prob, 16)
        assert res.objective >= 0.95 * best


def test_pdd_deterministic(rng):
    prob = random_problem(rng)
    r1 = pdd_solve(prob)
    r2 = pdd_solve(prob)
    assert r1.objective == r2.objective
    np.testing.assert_array_equal(r1.theta.phases, r2.theta.phases)


def test_pdd_trace_is_recorded(rng):
    prob = random_problem(rng)
    res = pdd_solve(prob)
    # the trace belongs to the winning start; iteration counts sum all starts
    assert 1 <= len(res.trace) <= res.outer_iterations
    for point in res.trace:
        assert point.objective >= 0 and point.constraint >= 0 and point.rho > 0


def test_pdd_with_candidates_keeps_best(rng):
    prob = random_problem(rng, gamma_frac=0.3)
    res = pdd_solve(prob)
    # feeding the solution back can only keep or improve the objective
    res2 = pdd_solve_with_candidates(prob, candidates=[res.theta.coefficients])
    assert res2.objective >= res.objective * (1 - 1e-12)


def test_minimize_quadratic_reaches_structured_null(rng):
    spec = ArraySpec(4, 4, 0.02, 0.2)
    g = composite_vector("G", random_angles(rng), random_angles(rng), spec)
    theta, val = minimize_unit_modulus_quadratic([g])
    assert val <= 1e-10 * spec.size**2
    np.testing.assert_allclose(np.abs(theta.coefficients), 1.0, atol=1e-12)


# ---------------------------------------------------------------------------
# closed forms


def test_closed_form_alignment_phases(rng):
    u = composite_vector("U", random_angles(rng), random_angles(rng), IRS22)
    theta = closed_form_lrs_only(u)
    np.testing.assert_allclose(theta.phases, np.angle(u), atol=1e-12)
    np.testing.assert_allclose(abs(np.vdot(u, theta.coefficients)) ** 2, 16.0, rtol=1e-12)


def test_closed_form_alignment_dominates(rng):
    u = composite_vector("U", random_angles(rng), random_angles(rng), IRS22)
    n = u.shape[0]
    for _ in range(50):
        other = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        assert abs(np.vdot(u, other)) ** 2 <= n**2 * (1 + 1e-12)


def test_urs_null_all_indices(rng):
    spec = ArraySpec(8, 8, 0.02, 0.2)
    for _ in range(5):
        au = random_angles(rng)
        g = composite_vector("G", au, au, spec)
        for ix in (1, 3, 7):
            for iy in (1, 4, 7):
                theta = closed_form_urs_null(spec, au, (ix, iy))
                assert abs(np.vdot(g, theta.coefficients)) ** 2 <= 1e-18 * 64.0**2


def test_urs_null_unavailable_on_ula():
    with pytest.raises(NoNullAvailable):
        closed_form_urs_null(ArraySpec(1, 8, 0.02, 0.2), AnglePair(0.5, 0.5), (1, 1))
    with pytest.raises(NoNullAvailable):
        closed_form_urs_null(ArraySpec(8, 1, 0.02, 0.2), AnglePair(0.5, 0.5), (1, 1))


def test_urs_null_index_range():
    spec = ArraySpec(4, 4, 0.02, 0.2)
    with pytest.raises(IndexError):
        closed_form_urs_null(spec, AnglePair(0.5, 0.5), (0, 1))
    with pytest.raises(IndexError):
        closed_form_urs_null(spec, AnglePair(0.5, 0.5), (1, 4))


# ---------------------------------------------------------------------------
# the brute-force oracle


def test_oracle_n1_enumerates_roots():
    prob = ProblemData(q1=np.array([1.0 + 1.0j]), q2=np.zeros(1),
                       h1=np.zeros(1), h2=np.zeros(1), gamma=1.0, p_u_min=1.0)
    theta, best = brute_force_oracle(prob, 4)
    roots = np.exp(2j * np.pi * np.arange(4) / 4)
    np.testing.assert_allclose(best, max(abs(np.conj(1 + 1j) * r) ** 2 for r in roots), rtol=1e-12)


def test_oracle_alignment_within_quantization(rng):
    u = composite_vector("U", random_angles(rng), random_angles(rng), IRS22)
    prob = ProblemData(q1=u, q2=np.zeros(4), h1=np.zeros(4), h2=np.zeros(4),
                       gamma=1.0, p_u_min=1.0)
    _, best = brute_force_oracle(prob, 16)
    assert best >= 0.96 * 16.0


def test_oracle_reports_infeasible(rng):
    h = np.array([1.0, 0.3 + 0.2j, -0.5j, 0.8])
    prob = ProblemData(q1=np.ones(4), q2=np.zeros(4), h1=h, h2=np.zeros(4),
                       gamma=1e-30, p_u_min=1.0)
    with pytest.raises(Infeasible):
        brute_force_oracle(prob, 3)


def test_oracle_budget():
    prob = ProblemData(q1=np.ones(16), q2=np.zeros(16), h1=np.zeros(16),
                       h2=np.zeros(16), gamma=1.0, p_u_min=1.0)
    with pytest.raises(BudgetExceeded):
        brute_force_oracle(prob, 16)


def test_canonicalize_zeroes_leading_phase(rng):
    from irsim import ReflectionVector

    rv = ReflectionVector.on(rng.uniform(0, 2 * np.pi, 5))
    canon = canonicalize(rv)
    assert canon.phases[0] == pytest.approx(0.0, abs=1e-12)
    # global phase does not change the objective
    u = np.exp(1j * rng.uniform(0, 2 * np.pi, 5))
    np.testing.assert_allclose(
        abs(np.vdot(u, canon.coefficients)), abs(np.vdot(u, rv.coefficients)), rtol=1e-12
    )
