import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surropt.core import (
    Bounds,
    ConfigError,
    Dataset,
    Problem,
    derive_seed,
    latin_hypercube,
    substream,
)
from surropt.optimizers import (
    AcquisitionConfig,
    DycorsState,
    MeritConfig,
    TrustRegionState,
    cobyla_merit,
    cobyla_step,
    cobyqa_step,
    cuatro_step,
    dycors_select_probability,
    dycors_step,
    dycors_update,
    lcb,
    lsqm_step,
    propose_bo,
    propose_cbo,
    run_optimizer,
    trust_region_update,
)
from surropt.problems import get_problem
from surropt.surrogates import fit_gp, fit_linear, fit_quadratic, fit_rbf, gp_posterior, rbf_predict

# ---------------------------------------------------------------- lcb


def test_lcb_examples():
    assert lcb(1.0, 0.5, 2.0) == 0.0
    assert lcb(3.7, 0.9, 0.0) == 3.7
    assert lcb(0.0, 1.0, 1.96) == -1.96


@given(
    mu=st.floats(-1e6, 1e6),
    sigma=st.floats(0, 1e6),
    gamma=st.floats(0, 1e3),
    d_mu=st.floats(0, 1e5),
    d_sigma=st.floats(0, 1e5),
)
@settings(max_examples=60, deadline=None)
def test_lcb_monotone(mu, sigma, gamma, d_mu, d_sigma):
    base = lcb(mu, sigma, gamma)
    assert lcb(mu - d_mu, sigma, gamma) <= base
    assert lcb(mu, sigma + d_sigma, gamma) <= base


# ---------------------------------------------------------------- propose_bo


def _quad_1d_data():
    x = np.linspace(-1.0, 1.0, 15).reshape(-1, 1)
    y = (x[:, 0] - 0.3) ** 2
    return Dataset(x, y)


def test_propose_bo_exploitation_matches_grid_oracle():
    data = _quad_1d_data()
    bounds = Bounds.cube(-1.0, 1.0, 1)
    seed = 4
    x_star = propose_bo(data, bounds, AcquisitionConfig(gamma=0.0), seed=seed)
    # oracle: dense-grid argmin of the same posterior mean
    model = fit_gp(data, seed=derive_seed(seed, "gp"))
    grid = np.linspace(-1.0, 1.0, 2001).reshape(-1, 1)
    mu, _ = gp_posterior(model, grid)
    oracle = grid[int(np.argmin(mu)), 0]
    assert abs(x_star[0] - oracle) <= 0.1


def test_propose_bo_max_uncertainty_runs_from_cluster():
    # clustered data at the left end; a huge gamma must pick a maximal-sigma
    # candidate, far from the cluster
    x = np.linspace(-0.9, -0.8, 6).reshape(-1, 1)
    data = Dataset(x, np.sin(x[:, 0]))
    bounds = Bounds.cube(-1.0, 1.0, 1)
    seed = 2
    x_star = propose_bo(data, bounds, AcquisitionConfig(gamma=1e6), seed=seed)
    model = fit_gp(data, seed=derive_seed(seed, "gp"))
    pool = latin_hypercube(bounds, 100, derive_seed(seed, "pool"))
    _, var_pool = gp_posterior(model, pool)
    _, var_star = gp_posterior(model, x_star)
    assert var_star >= np.max(var_pool) - 1e-12
    assert np.min(np.abs(x[:, 0] - x_star[0])) >= 1.0  # left the cluster behind


def test_propose_bo_deterministic():
    data = _quad_1d_data()
    bounds = Bounds.cube(-1.0, 1.0, 1)
    cfg = AcquisitionConfig(gamma=2.0)
    a = propose_bo(data, bounds, cfg, seed=9)
    b = propose_bo(data, bounds, cfg, seed=9)
    assert np.array_equal(a, b)


def test_propose_bo_improves_surrogate_mean_over_incumbent():
    data = _quad_1d_data()
    bounds = Bounds.cube(-1.0, 1.0, 1)
    seed = 7
    x_star = propose_bo(data, bounds, AcquisitionConfig(gamma=0.0), seed=seed)
    model = fit_gp(data, seed=derive_seed(seed, "gp"))
    mu_star, _ = gp_posterior(model, x_star)
    incumbent = data.X[int(np.argmin(data.y))]
    mu_inc, _ = gp_posterior(model, incumbent)
    assert mu_star <= mu_inc + 1e-12


def test_propose_bo_within_bounds():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    for seed in range(3):
        X = latin_hypercube(bounds, 8, seed=100 + seed)
        data = Dataset(X, np.sum(X**2, axis=1))
        x = propose_bo(data, bounds, AcquisitionConfig(), seed=seed)
        assert bounds.contains(x)


# ---------------------------------------------------------------- propose_cbo


def test_propose_cbo_inactive_constraints_match_bo():
    data = _quad_1d_data()
    g = np.full((data.n, 1), -5.0)  # feasible with wide margin everywhere
    cdata = Dataset(data.X, data.y, g)
    bounds = Bounds.cube(-1.0, 1.0, 1)
    cfg = AcquisitionConfig(gamma=2.0)
    a = propose_bo(data, bounds, cfg, seed=12)
    b = propose_cbo(cdata, bounds, cfg, MeritConfig(), seed=12)
    assert np.array_equal(a, b)


def test_propose_cbo_active_constraint_mean_nonpositive():
    x = np.linspace(-1.0, 1.0, 21).reshape(-1, 1)
    data = Dataset(x, -x[:, 0], x.copy())  # f = -x wants x=1; g = x <= 0
    bounds = Bounds.cube(-1.0, 1.0, 1)
    seed = 5
    x_star = propose_cbo(data, bounds, AcquisitionConfig(), MeritConfig(), seed=seed)
    g_model = fit_gp(Dataset(x, x[:, 0]), seed=derive_seed(seed, "gp-con", 0))
    mu_g, _ = gp_posterior(g_model, x_star)
    assert mu_g <= 1e-3
    assert x_star[0] >= -0.2  # constraint active, not hiding deep inside


def test_propose_cbo_all_infeasible_minimizes_violation():
    x = np.linspace(0.5, 1.5, 21).reshape(-1, 1)
    data = Dataset(x, np.cos(x[:, 0]), x.copy())  # g = x >= 0.5 > 0 everywhere
    bounds = Bounds(np.array([0.5]), np.array([1.5]))
    x_star = propose_cbo(data, bounds, AcquisitionConfig(), MeritConfig(), seed=3)
    assert x_star[0] <= 0.51  # violation ~ x is minimized at the left edge


def test_propose_cbo_requires_constraints():
    data = _quad_1d_data()
    with pytest.raises(ConfigError):
        propose_cbo(data, Bounds.cube(-1, 1, 1), AcquisitionConfig(), MeritConfig(), 0)


# ---------------------------------------------------------------- lsqm_step


def test_lsqm_interior_minimum():
    x = np.linspace(-1.5, 2.0, 8).reshape(-1, 1)
    data = Dataset(x, x[:, 0] ** 2)
    tr = TrustRegionState(center=np.array([0.5]), radius=2.0, max_radius=10.0)
    x_star = lsqm_step(data, Bounds.cube(-3.0, 3.0, 1), tr, seed=1)
    assert abs(x_star[0]) <= 1e-3


def test_lsqm_boundary_solution():
    # essentially linear surrogate, minimizer far outside the ball
    x = np.linspace(-2.0, 2.0, 9).reshape(-1, 1)
    data = Dataset(x, 2.0 * x[:, 0] + 1.0)
    center = np.array([0.0])
    tr = TrustRegionState(center=center, radius=0.5, max_radius=10.0)
    x_star = lsqm_step(data, Bounds.cube(-3.0, 3.0, 1), tr, seed=2)
    assert abs(np.linalg.norm(x_star - center) - 0.5) <= 1e-6
    assert x_star[0] < 0  # downhill side


def test_lsqm_matches_grid_oracle_on_ill_conditioned_quadratic():
    from surropt.problems import quadratic_ill

    bounds = Bounds.cube(-5.0, 5.0, 2)
    X = latin_hypercube(bounds, 10, seed=42)
    data = Dataset(X, np.array([quadratic_ill(x) for x in X]))
    center = np.zeros(2)
    tr = TrustRegionState(center=center, radius=100.0, max_radius=200.0)
    x_star = lsqm_step(data, bounds, tr, seed=6)

    model = fit_quadratic(data, psd=True)
    g = np.linspace(-5.0, 5.0, 1001)
    gx, gy = np.meshgrid(g, g)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    oracle = grid[int(np.argmin(model.predict(grid)))]
    assert np.linalg.norm(x_star - oracle) <= 1e-2


def test_lsqm_needs_enough_samples():
    data = Dataset(np.zeros((2, 2)), np.zeros(2))
    tr = TrustRegionState(center=np.zeros(2), radius=1.0)
    with pytest.raises(ConfigError):
        lsqm_step(data, Bounds.cube(-1, 1, 2), tr, seed=0)


def test_trust_region_steps_stay_in_ball():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 9, seed=8)
    y = np.sum((X - 0.7) ** 2, axis=1)
    g = (X[:, :1] - 0.2)
    tr = TrustRegionState(center=X[3].copy(), radius=0.6, max_radius=4.0)
    for seed in range(3):
        x1 = lsqm_step(Dataset(X, y), bounds, tr, seed=seed)
        assert np.linalg.norm(x1 - tr.center) <= 0.6 + 1e-9
        x2 = cuatro_step(Dataset(X, y, g), bounds, tr, seed=seed)
        assert np.linalg.norm(x2 - tr.center) <= 0.6 + 1e-9
        x3 = cobyqa_step(Dataset(X, y, g), bounds, tr, seed=seed)
        assert np.linalg.norm(x3 - tr.center) <= 0.6 + 1e-9
        x4 = cobyla_step(Dataset(X, y, g), bounds, tr, seed=seed)
        assert np.linalg.norm(x4 - tr.center) <= 0.3 + 1e-9  # half radius


# ---------------------------------------------------------------- cuatro_step


def test_cuatro_unconstrained_equals_lsqm():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 8, seed=5)
    y = np.sum(X**2, axis=1) + 0.3 * X[:, 0]
    tr = TrustRegionState(center=X[0].copy(), radius=0.8, max_radius=4.0)
    a = lsqm_step(Dataset(X, y), bounds, tr, seed=7)
    b = cuatro_step(Dataset(X, y), bounds, tr, seed=7)
    assert np.array_equal(a, b)


def test_cuatro_respects_active_constraint():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 20, seed=3)
    y = (X[:, 0] - 1.0) ** 2 + X[:, 1] ** 2  # unconstrained optimum (1, 0)
    g = X[:, :1].copy()  # x1 <= 0
    tr = TrustRegionState(center=np.zeros(2), radius=3.0, max_radius=8.0)
    x_star = cuatro_step(Dataset(X, y, g), bounds, tr, seed=4)
    assert x_star[0] <= 1e-3
    assert abs(x_star[1]) <= 0.2


def test_cuatro_small_radius_boundary():
    bounds = Bounds.cube(-3.0, 3.0, 1)
    x = np.linspace(-2.0, 2.0, 9).reshape(-1, 1)
    y = 2.0 * x[:, 0] + 1.0
    g = np.full((9, 1), -1.0)  # never active
    center = np.array([1.0])
    tr = TrustRegionState(center=center, radius=0.25, max_radius=6.0)
    x_star = cuatro_step(Dataset(x, y, g), bounds, tr, seed=1)
    assert abs(np.linalg.norm(x_star - center) - 0.25) <= 1e-6


# ---------------------------------------------------------------- cobyla_step


def _linear_dataset(f, g=None):
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    y = np.array([f(x) for x in X])
    G = np.array([[g(x)] for x in X]) if g else None
    return Dataset(X, y, G)


def test_cobyla_closed_form_step():
    data = _linear_dataset(lambda x: x[0])  # gradient (1, 0)
    tr = TrustRegionState(center=np.zeros(2), radius=1.0, max_radius=4.0)
    x_star = cobyla_step(data, Bounds.cube(-2.0, 2.0, 2), tr, seed=0)
    assert np.allclose(x_star, [-0.5, 0.0], atol=1e-6)


def test_cobyla_merit_arithmetic():
    assert cobyla_merit(1.0, [0.5, -0.2], 1.0) == pytest.approx(1.5)
    assert cobyla_merit(1.0, [-0.5, -0.2], 7.0) == pytest.approx(1.0)
    assert cobyla_merit(2.5, [], 3.0) == pytest.approx(2.5)


def test_cobyla_constrained_step():
    data = _linear_dataset(lambda x: x[0] + x[1], g=lambda x: -x[0] - 0.1)
    merit = MeritConfig(penalties=np.array([1e6]))
    tr = TrustRegionState(center=np.zeros(2), radius=1.0, max_radius=4.0)
    x_star = cobyla_step(data, Bounds.cube(-2.0, 2.0, 2), tr, merit, seed=2)
    assert x_star[0] >= -0.1 - 1e-3
    # merit no worse than the unconstrained steepest step at half radius
    f_model = fit_linear(Dataset(data.X, data.y))
    g_model = fit_linear(Dataset(data.X, data.G[:, 0]))

    def merit_at(p):
        return f_model.predict(p) + 1e6 * max(0.0, g_model.predict(p))

    cauchy = -0.5 * np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert merit_at(x_star) <= merit_at(cauchy) + 1e-9
    assert np.linalg.norm(x_star) <= 0.5 + 1e-9


# ---------------------------------------------------------------- cobyqa_step


def test_cobyqa_interior_minimum():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 12, seed=9)
    y = (X[:, 0] - 0.4) ** 2 + 2.0 * (X[:, 1] + 0.3) ** 2
    tr = TrustRegionState(center=np.zeros(2), radius=3.0, max_radius=8.0)
    x_star = cobyqa_step(Dataset(X, y), bounds, tr, seed=3)
    assert np.allclose(x_star, [0.4, -0.3], atol=1e-3)


def test_cobyqa_inactive_constraints_match_unconstrained():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 12, seed=11)
    y = np.sum((X - 0.2) ** 2, axis=1)
    g = np.full((12, 1), -1.0)
    tr = TrustRegionState(center=np.zeros(2), radius=1.0, max_radius=4.0)
    a = cobyqa_step(Dataset(X, y), bounds, tr, seed=6)
    b = cobyqa_step(Dataset(X, y, g), bounds, tr, seed=6)
    assert np.array_equal(a, b)


def test_cobyqa_merit_not_worse_than_center():
    prob = get_problem("quadratic-c")
    bounds = prob.bounds
    X = latin_hypercube(bounds, 10, seed=13)
    y = np.array([prob.objective(x) for x in X])
    G = np.array([prob.constraints(x) for x in X]).reshape(10, -1)
    center = X[int(np.argmin(y))].copy()
    tr = TrustRegionState(center=center, radius=1.5, max_radius=20.0)
    merit = MeritConfig(penalties=np.array([100.0]))
    data = Dataset(X, y, G)
    x_star = cobyqa_step(data, bounds, tr, merit, seed=4)

    f_model = fit_quadratic(data)
    g_model = fit_quadratic(Dataset(X, G[:, 0]))

    def phi(p):
        return f_model.predict(p) + 100.0 * max(0.0, g_model.predict(p))

    assert phi(x_star) <= phi(center) + 1e-9


# ---------------------------------------------------------------- trust_region_update


def _tr(radius=1.0, **kw):
    kw.setdefault("center", np.zeros(2))
    kw.setdefault("max_radius", 8.0)
    return TrustRegionState(radius=radius, **kw)


def test_tr_update_examples():
    out = trust_region_update(_tr(1.0), 1.0, 0.9, True)
    assert out.radius == pytest.approx(2.0)
    out = trust_region_update(_tr(1.0), 1.0, 0.1, False)
    assert out.radius == pytest.approx(0.5)
    out = trust_region_update(_tr(1.0), 1.0, 0.5, False)
    assert out.radius == pytest.approx(1.0)


def test_tr_update_cap_floor_and_center():
    out = trust_region_update(_tr(6.0), 1.0, 0.95, True)
    assert out.radius == pytest.approx(8.0)  # capped
    tiny = TrustRegionState(center=np.zeros(2), radius=1.5e-6, min_radius=1e-6)
    out = trust_region_update(tiny, 1.0, -1.0, False)
    assert out.radius == pytest.approx(1e-6)  # floored

    p = np.array([0.3, -0.1])
    moved = trust_region_update(_tr(), 1.0, 0.5, False, new_point=p)
    assert np.array_equal(moved.center, p)
    assert moved.success_count == 1 and moved.fail_count == 0
    stay = trust_region_update(_tr(), 1.0, -0.2, False, new_point=p)
    assert np.array_equal(stay.center, np.zeros(2))
    assert stay.fail_count == 1 and stay.success_count == 0
    infeas = trust_region_update(_tr(), 1.0, 0.5, False, new_point=p, feasible=False)
    assert np.array_equal(infeas.center, np.zeros(2))


def test_tr_update_nonpositive_predicted_is_failure():
    out = trust_region_update(_tr(1.0), 0.0, 0.5, False)
    assert out.radius == pytest.approx(0.5)


# ---------------------------------------------------------------- dycors


def _dycors_state(**kw):
    kw.setdefault("iteration", 0)
    kw.setdefault("max_iterations", 40)
    kw.setdefault("step_size", 0.2)
    kw.setdefault("initial_step_size", 0.2)
    return DycorsState(**kw)


def test_dycors_select_probability():
    assert dycors_select_probability(_dycors_state(), 2) == pytest.approx(1.0)
    assert dycors_select_probability(_dycors_state(), 40) == pytest.approx(0.5)
    probs = [
        dycors_select_probability(_dycors_state(iteration=i), 2) for i in range(40)
    ]
    assert all(a >= b for a, b in zip(probs, probs[1:]))
    assert probs[-1] <= 0.02  # essentially zero at the horizon


def test_dycors_score_arithmetic():
    # documented weighted score on two trials with opposing value/distance
    v_f = np.array([0.0, 1.0])
    v_d = np.array([1.0, 0.0])
    w = 0.95
    score = w * v_f + (1 - w) * (1.0 - v_d)
    assert score[0] == pytest.approx(0.0)
    assert score[1] == pytest.approx(1.0)
    assert int(np.argmin(score)) == 0


def test_dycors_step_matches_replicated_pipeline():
    bounds = Bounds.cube(-2.0, 2.0, 2)
    X = latin_hypercube(bounds, 8, seed=21)
    y = np.sum(X**2, axis=1)
    data = Dataset(X, y)
    state = _dycors_state(iteration=3, weight_cycle_index=3)
    incumbent = X[int(np.argmin(y))]
    seed = 17
    x_star = dycors_step(data, bounds, state, incumbent, seed=seed)

    # replicate the documented pipeline draw-for-draw
    d, n = 2, 200
    rng = substream(seed, "dycors")
    p = dycors_select_probability(state, d)
    mask = rng.uniform(size=(n, d)) < p
    forced = rng.integers(0, d, size=n)
    noise = rng.standard_normal((n, d))
    empty = ~mask.any(axis=1)
    mask[empty, forced[empty]] = True
    trials = np.clip(
        incumbent + mask * (noise * state.step_size * bounds.width),
        bounds.lower,
        bounds.upper,
    )
    assert mask.any(axis=1).all()  # every trial perturbs >= 1 coordinate

    def rescale(v):
        lo, hi = v.min(), v.max()
        return np.ones_like(v) if hi - lo < 1e-12 else (v - lo) / (hi - lo)

    v_f = rescale(rbf_predict(fit_rbf(data), trials))
    dist = np.sqrt(((trials[:, None, :] - X[None]) ** 2).sum(axis=2)).min(axis=1)
    score = 0.95 * v_f + 0.05 * (1.0 - rescale(dist))
    assert np.array_equal(x_star, trials[int(np.argmin(score))])


def test_dycors_step_size_rule():
    s = _dycors_state(step_size=0.05)
    for _ in range(3):
        s = dycors_update(s, success=True)
    assert s.step_size == pytest.approx(0.1)
    assert s.success_count == 0
    for _ in range(3):
        s = dycors_update(s, success=True)
    assert s.step_size == pytest.approx(0.2)  # capped at initial
    for _ in range(5):
        s = dycors_update(s, success=False)
    assert s.step_size == pytest.approx(0.1)
    floor = _dycors_state(step_size=2.5e-4)
    for _ in range(5):
        floor = dycors_update(floor, success=False)
    assert floor.step_size == pytest.approx(2e-4)  # 1e-3 of initial


def test_dycors_update_advances_cycle_and_iteration():
    s = _dycors_state(max_iterations=2)
    s = dycors_update(s, True)
    assert (s.iteration, s.weight_cycle_index) == (1, 1)
    s = dycors_update(s, False)
    s = dycors_update(s, False)
    assert s.iteration == 2  # clamped at max_iterations


def test_dycors_fallback_on_rbf_failure(caplog):
    # two points cannot support a full-rank linear tail in 2-D
    X = np.array([[0.0, 0.0], [1.0, 1.0]])
    data = Dataset(X, np.array([0.0, 1.0]))
    bounds = Bounds.cube(-2.0, 2.0, 2)
    with caplog.at_level(logging.WARNING, logger="surropt.optimizers"):
        x = dycors_step(data, bounds, _dycors_state(), np.zeros(2), seed=5)
    assert bounds.contains(x)
    assert any("RBF" in rec.message for rec in caplog.records)


# ---------------------------------------------------------------- run_optimizer


def test_run_optimizer_exact_budget():
    prob = get_problem("ackley-d2")
    traj = run_optimizer("lsqm", prob, budget=20, seed=0)
    assert len(traj) == 20
    assert all(ev.index == i + 1 for i, ev in enumerate(traj.evaluations))


def test_run_optimizer_budget_below_init_rejected():
    prob = get_problem("ackley-d2")
    with pytest.raises(ConfigError):
        run_optimizer("bo", prob, budget=4, seed=0)  # init needs max(5, 4)
    with pytest.raises(ConfigError):
        run_optimizer("lsqm", prob, budget=2, seed=0)  # init needs 3


def test_run_optimizer_deterministic():
    prob = get_problem("rosenbrock-c")
    t1 = run_optimizer("cuatro", prob, budget=25, seed=11)
    t2 = run_optimizer("cuatro", prob, budget=25, seed=11)
    assert np.array_equal(t1.xs, t2.xs)
    assert np.array_equal(t1.ys, t2.ys)
    assert np.array_equal(t1.gs, t2.gs)


def test_run_optimizer_unknown_algorithm():
    prob = get_problem("ackley-d2")
    with pytest.raises(ConfigError):
        run_optimizer("bfgs", prob, budget=20, seed=0)


def test_run_optimizer_cbo_needs_constraints():
    prob = get_problem("ackley-d2")
    with pytest.raises(ConfigError):
        run_optimizer("cbo", prob, budget=20, seed=0)


def test_run_optimizer_fallback_fills_budget(monkeypatch, caplog):
    import surropt.optimizers as opt

    def boom(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(opt, "_lsqm_impl", boom)
    prob = get_problem("ackley-d2")
    with caplog.at_level(logging.WARNING, logger="surropt.optimizers"):
        traj = run_optimizer("lsqm", prob, budget=12, seed=5)
    assert len(traj) == 12
    assert traj.meta["fallback_at"] == 4  # first point after the 3-point design
    assert "synthetic failure" in traj.meta["fallback_reason"]
    assert all(prob.bounds.contains(ev.x) for ev in traj.evaluations)


def test_run_optimizer_all_algorithms_complete():
    pairs = [
        ("bo", "ackley-d2"),
        ("lsqm", "levy-d2"),
        ("cuatro", "rosenbrock-c"),
        ("cobyla", "quadratic-c"),
        ("cobyqa", "matyas-c"),
        ("dycors", "rosenbrock-d2"),
        ("cbo", "rosenbrock-c"),
    ]
    for algo, name in pairs:
        prob = get_problem(name)
        traj = run_optimizer(algo, prob, budget=15, seed=1)
        assert len(traj) == 15, algo
        assert all(prob.bounds.contains(ev.x) for ev in traj.evaluations)


def test_config_validation():
    with pytest.raises(ConfigError):
        AcquisitionConfig(gamma=-0.5)
    with pytest.raises(ConfigError):
        MeritConfig(penalties=np.array([0.0]))
    with pytest.raises(ConfigError):
        MeritConfig(penalty_growth=1.0)
    with pytest.raises(ConfigError):
        DycorsState(iteration=5, max_iterations=3, step_size=0.2, initial_step_size=0.2)
    with pytest.raises(ConfigError):
        TrustRegionState(center=np.zeros(2), radius=0.5, min_radius=1.0)
