import math
import warnings

import numpy as np
import pytest

from yamabe import (
    AssumptionViolated,
    DiscreteManifold,
    MinimizeConfig,
    YamabeError,
    critical_exponent,
    einstein_hilbert_constant,
    estimate_mu,
    flat_torus,
    gradient_check,
    lambda_sweep,
    lp_norm,
    product,
    product_lower_bound,
    quotient_gradient,
    random_manifold,
    sandwich,
    scale_metric,
    sphere_latitude,
    sphere_yamabe,
    yamabe_quotient,
)

EINSTEIN_S3_S3 = 12 * (4 * math.pi**4) ** (1 / 3)
FAST = MinimizeConfig(max_iters=400, restarts=2)


def negative(M, s=-6.0):
    return DiscreteManifold(M.dim, M.masses, M.edges, M.weights, np.full(M.n_vertices, s), "negative")


@pytest.mark.parametrize(
    "kwargs",
    [dict(max_iters=0), dict(rel_tol=0.0), dict(restarts=0), dict(initial_step=-1.0)],
)
def test_config_validation(kwargs):
    with pytest.raises(YamabeError):
        MinimizeConfig(**kwargs)


def test_torus_exact():
    res = estimate_mu(flat_torus(3, 8))
    assert abs(res.value) <= 1e-8
    assert res.iterations == 0
    assert res.converged


def test_sphere_within_one_percent():
    res = estimate_mu(sphere_latitude(3, 2000))
    assert res.value == pytest.approx(einstein_hilbert_constant(6.0, 2 * math.pi**2, 3), rel=1e-2)
    assert res.value == pytest.approx(43.823, rel=1e-2)


def test_small_product_near_einstein():
    res = estimate_mu(product(sphere_latitude(3, 40), sphere_latitude(3, 40)), FAST)
    assert res.value == pytest.approx(EINSTEIN_S3_S3, rel=2e-2)


def test_quotient_gradient_matches_definition(rng):
    M = random_manifold(rng, 4, 6)
    u = rng.uniform(0.5, 1.5, 6)
    F, g = quotient_gradient(M, u)
    assert F == pytest.approx(yamabe_quotient(M, u), rel=1e-13)
    # homogeneity of degree 0: the gradient is orthogonal to u
    assert abs(np.dot(g, u)) <= 1e-10 * np.linalg.norm(g) * np.linalg.norm(u)
    with pytest.raises(YamabeError):
        quotient_gradient(M, np.zeros(6))


@pytest.mark.parametrize("seed", range(6))
def test_result_invariants(seed):
    rng = np.random.default_rng(seed)
    M = random_manifold(rng, int(rng.integers(3, 7)), 20, curvature=(-2.0, 8.0))
    res = estimate_mu(M, MinimizeConfig(max_iters=300, restarts=3, rng_seed=seed))
    h = res.history
    assert all(b <= a for a, b in zip(h, h[1:]))
    assert h[-1] == res.value
    assert np.all(res.minimizer >= 0)
    assert lp_norm(M, res.minimizer, critical_exponent(M.dim)) == pytest.approx(1.0, abs=1e-10)
    assert res.value == pytest.approx(yamabe_quotient(M, res.minimizer), rel=1e-10)
    assert len(res.start_values) == 3
    assert all(res.value <= s for s in res.start_values)


def test_deterministic():
    M = random_manifold(np.random.default_rng(3), 4, 30)
    cfg = MinimizeConfig(max_iters=200, restarts=3, rng_seed=11)
    a, b = estimate_mu(M, cfg), estimate_mu(M, cfg)
    assert a.value == b.value and a.history == b.history and a.restart == b.restart
    np.testing.assert_array_equal(a.minimizer, b.minimizer)


def test_threads_do_not_change_result(monkeypatch):
    M = random_manifold(np.random.default_rng(5), 3, 30)
    cfg = MinimizeConfig(max_iters=200, restarts=4, rng_seed=2)
    serial = estimate_mu(M, cfg)
    monkeypatch.setenv("YAMABE_THREADS", "4")
    threaded = estimate_mu(M, cfg)
    assert serial.value == threaded.value
    np.testing.assert_array_equal(serial.minimizer, threaded.minimizer)


@pytest.mark.parametrize("lam", [0.01, 0.5, 3.0, 250.0])
def test_scale_invariance_end_to_end(lam):
    M = random_manifold(np.random.default_rng(8), 3, 25, curvature=(0.0, 6.0))
    cfg = MinimizeConfig(max_iters=300, restarts=2)
    base = estimate_mu(M, cfg).value
    assert estimate_mu(scale_metric(M, lam), cfg).value == pytest.approx(base, rel=1e-10)


def test_non_convergence_reported():
    M = random_manifold(np.random.default_rng(4), 4, 40, curvature=(-3.0, 9.0))
    res = estimate_mu(M, MinimizeConfig(max_iters=1, restarts=1))
    assert res.iterations == 1
    assert not res.converged
    assert np.isfinite(res.value)


def test_single_vertex_no_edges():
    M = DiscreteManifold(3, [2.0], np.zeros((0, 2)), [], [5.0])
    res = estimate_mu(M)
    assert res.value == pytest.approx(5.0 * 2.0 ** (2 / 3), rel=1e-12)


def test_gradient_check_sphere_constant():
    M = sphere_latitude(3, 64)
    _, g = quotient_gradient(M, np.ones(64))
    assert np.max(np.abs(g)) <= 1e-8
    assert gradient_check(M, np.ones(64)) < 1e-5


def test_gradient_check_torus(rng):
    T = flat_torus(3, 4)
    for _ in range(5):
        assert gradient_check(T, rng.uniform(0.1, 1.0, 64)) < 1e-5


def test_gradient_check_random_manifolds(rng):
    for _ in range(20):
        M = random_manifold(rng, int(rng.integers(3, 9)), 10)
        assert gradient_check(M, rng.uniform(0.1, 2.0, 10)) < 1e-5


def test_gradient_check_rejects_near_zero():
    u = np.ones(64)
    u[5] = 1e-9
    with pytest.raises(YamabeError, match="close to zero"):
        gradient_check(flat_torus(3, 4), u)
    with pytest.raises(YamabeError):
        gradient_check(flat_torus(3, 4), np.ones(10))


def test_sandwich_s3_s3():
    s3 = sphere_latitude(3, 60)
    mu = sphere_yamabe(3)
    sw = sandwich(s3, s3, mu, mu, FAST, upper_reference=EINSTEIN_S3_S3)
    assert sw.lower == pytest.approx(1.25 * mu, rel=1e-12)
    assert sw.upper_sphere == sphere_yamabe(6)
    assert sw.lower <= sw.estimate <= sw.upper_sphere
    assert sw.verdict_lower and sw.verdict_upper
    assert sw.as_dict()["upper_reference"] == EINSTEIN_S3_S3


def test_sandwich_s3_s4():
    a, b = sphere_latitude(3, 40), sphere_latitude(4, 30)
    sw = sandwich(a, b, sphere_yamabe(3), sphere_yamabe(4), FAST)
    assert sw.lower == product_lower_bound(sphere_yamabe(3), sphere_yamabe(4), 3, 4)
    assert sw.upper_sphere == sphere_yamabe(7)
    assert sw.lower <= sw.estimate <= sw.upper_sphere
    assert sw.upper_reference is None


def test_sandwich_rejects():
    s3 = sphere_latitude(3, 16)
    with pytest.raises(AssumptionViolated):
        sandwich(negative(s3), flat_torus(3, 3), 0.0, 0.0, FAST)
    with pytest.raises(YamabeError):
        sandwich(sphere_latitude(2, 16), s3, 1.0, 1.0, FAST)


def test_sandwich_warns_below_lower():
    s3 = sphere_latitude(3, 16)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sw = sandwich(s3, s3, 1e3, 1e3, FAST)
    assert not sw.verdict_lower
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_lambda_sweep_single_point():
    s3 = sphere_latitude(3, 30)
    mu = sphere_yamabe(3)
    sweep = lambda_sweep(s3, s3, [1.0], mu, mu, FAST)
    single = sandwich(s3, s3, mu, mu, FAST)
    assert len(sweep.points) == 1
    assert sweep.points[0][1].estimate == single.estimate
    assert sweep.min_estimate == single.estimate and sweep.argmin_lambda == 1.0


def test_lambda_sweep_minimum_at_one():
    s3 = sphere_latitude(3, 30)
    mu = sphere_yamabe(3)
    sweep = lambda_sweep(s3, s3, [0.5, 1.0, 2.0], mu, mu, FAST)
    est = {lam: sw.estimate for lam, sw in sweep.points}
    assert est[1.0] < est[0.5] and est[1.0] < est[2.0]
    assert sweep.argmin_lambda == 1.0
    assert all(sw.lower == sweep.lower for _, sw in sweep.points)
    assert sweep.lower_ok


def test_lambda_sweep_callable_and_random(rng):
    for _ in range(3):
        v, w = rng.integers(3, 5, 2)
        mv = sphere_latitude(int(v), 16)
        sweep = lambda_sweep(
            mv, lambda lam: sphere_latitude(int(w), 12, lam), rng.uniform(0.2, 5.0, 3),
            sphere_yamabe(int(v)), sphere_yamabe(int(w)), FAST,
        )
        assert sweep.lower <= sweep.min_estimate
        assert isinstance(sweep.naive_within_slack, bool)


@pytest.mark.parametrize("grid", [[], [1.0, 0.0], [-1.0]])
def test_lambda_sweep_rejects(grid):
    s3 = sphere_latitude(3, 16)
    with pytest.raises(YamabeError):
        lambda_sweep(s3, s3, grid, 1.0, 1.0, FAST)


def test_refinement_cauchy():
    est = [estimate_mu(sphere_latitude(3, n)).value for n in (250, 500, 1000, 2000)]
    gaps = [abs(b - a) for a, b in zip(est, est[1:])]
    assert all(y < x for x, y in zip(gaps, gaps[1:]))
