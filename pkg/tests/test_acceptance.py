"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line (shown even
without ``-s``) and then asserts.  Thresholds are the stated ones; none are
relaxed.
"""

import math
import time

import numpy as np
import pytest

from yamabe import (
    big_sigma,
    check_iterated_holder,
    check_partial_gradient,
    check_young,
    epsilon_defect,
    estimate_mu,
    flat_torus,
    gradient_check,
    lambda_min,
    naive_infimum,
    product,
    product_lower_bound,
    random_manifold,
    scale_metric,
    sigma_sphere,
    sigma_sphere_asymptote,
    sphere_latitude,
    sphere_yamabe,
    yamabe_quotient,
)

from conftest import oracle_mu_sphere

# reference table of epsilon_{v,w}, v, w = 3..7 (rows v, columns w)
REFERENCE_EPSILON = [
    [0.625, 0.7072, 0.7515, 0.7817, 0.8042],
    [0.7072, 0.7777, 0.8007, 0.8367, 0.8537],
    [0.7515, 0.8007, 0.8427, 0.8631, 0.8772],
    [0.7817, 0.8367, 0.8631, 0.88, 0.8921],
    [0.8042, 0.8537, 0.8772, 0.8921, 0.9027],
]
REFERENCE_LAMBDA = {6: 54.779, 7: 74.504, 8: 92.242, 9: 109.426}


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("YAMABE_THREADS", "1")


def test_criterion_1_epsilon_table(report):
    t0 = time.perf_counter()
    misses = []
    for i, v in enumerate(range(3, 8)):
        for j, w in enumerate(range(3, 8)):
            eps = epsilon_defect(v, w)
            if abs(eps - REFERENCE_EPSILON[i][j]) > 2e-4:
                misses.append(f"({v},{w}) computed {eps:.5f} reference {REFERENCE_EPSILON[i][j]}")
    exact = abs(epsilon_defect(3, 3) - 0.625) <= 1e-12 * 0.625 and abs(epsilon_defect(6, 6) - 0.88) <= 1e-12 * 0.88
    elapsed = time.perf_counter() - t0
    ok = not misses and exact and elapsed < 1
    report(1, ok, f"{25 - len(misses)}/25 cells, exact cells {exact}, {elapsed:.3f}s; misses: {'; '.join(misses) or 'none'}")
    assert ok


def test_criterion_2_surgery_constants(report):
    t0 = time.perf_counter()
    got = {m: lambda_min(m) for m in REFERENCE_LAMBDA}
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[m] - REFERENCE_LAMBDA[m]) <= 1e-3 for m in got) and elapsed < 1
    report(2, ok, ", ".join(f"L{m}={got[m]:.6f}" for m in got) + f", {elapsed:.3f}s")
    assert ok


def test_criterion_3_sphere_constants(report):
    oracles = {m: float(oracle_mu_sphere(m)) for m in range(3, 11)}
    t0 = time.perf_counter()
    errors = {m: abs(sphere_yamabe.__wrapped__(m) / oracles[m] - 1) for m in oracles}
    elapsed = time.perf_counter() - t0
    assert oracles[3] == pytest.approx(6 * (2 * math.pi**2) ** (2 / 3), rel=1e-15)
    ok = max(errors.values()) <= 1e-6 and elapsed < 1
    report(3, ok, f"max relative error {max(errors.values()):.2e}, {elapsed:.3f}s")
    assert ok


def test_criterion_4_s3_s3_sandwich(report):
    t0 = time.perf_counter()
    mu3 = sphere_yamabe(3)
    lower = product_lower_bound(mu3, mu3, 3, 3)
    s3 = sphere_latitude(3, 200)
    estimate = estimate_mu(product(s3, s3)).value
    elapsed = time.perf_counter() - t0
    einstein = 12 * (4 * math.pi**4) ** (1 / 3)
    checks = [
        abs(lower - 1.25 * mu3) <= 1e-12 * lower,
        lower * 0.98 <= estimate <= sphere_yamabe(6) * 1.01,
        abs(estimate - einstein) <= 0.02 * einstein,
        elapsed < 60,
    ]
    ok = all(checks)
    report(4, ok, f"lower {lower:.6f} estimate {estimate:.6f} upper {sphere_yamabe(6):.6f} einstein {einstein:.6f}, {elapsed:.2f}s")
    assert ok


def test_criterion_5_sphere_refinement(report):
    oracle = float(oracle_mu_sphere(3))
    t0 = time.perf_counter()
    est = {n: estimate_mu(sphere_latitude(3, n)).value for n in (250, 500, 1000, 2000)}
    elapsed = time.perf_counter() - t0
    errors = [abs(est[n] - oracle) for n in sorted(est)]
    ok = (
        abs(est[2000] - 43.823) <= 0.01 * 43.823
        and all(b < a for a, b in zip(errors, errors[1:]))
        and elapsed < 30
    )
    report(5, ok, "errors " + ", ".join(f"{e:.2e}" for e in errors) + f", {elapsed:.2f}s")
    assert ok


def test_criterion_6_property_suites(report):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    holder_bad = gradient_bad = young_bad = 0
    for _ in range(1000):
        v, w = (int(x) for x in rng.integers(3, 9, 2))
        a = random_manifold(rng, v, int(rng.integers(1, 7)))
        b = random_manifold(rng, w, int(rng.integers(1, 7)))
        u = rng.normal(size=(a.n_vertices, b.n_vertices))
        u[rng.random(u.shape) < 0.2] = 0.0
        u.flat[0] = 1.0
        holder_bad += not check_iterated_holder(a, b, u).holds
        gradient_bad += not check_partial_gradient(a, b, np.abs(u)).holds
    for _ in range(10_000):
        c, d = rng.exponential(2.0, 2)
        v, w = (int(x) for x in rng.integers(3, 30, 2))
        young_bad += not check_young(c, d, v, w).holds
    worst = 0.0
    for k in range(100):
        if k % 2:
            M = random_manifold(rng, int(rng.integers(3, 9)), int(rng.integers(2, 15)))
        else:
            M = flat_torus(3, 3) if k % 4 == 0 else sphere_latitude(3, 32, rng.uniform(0.5, 2.0))
        worst = max(worst, gradient_check(M, rng.uniform(0.1, 2.0, M.n_vertices)))
    elapsed = time.perf_counter() - t0
    ok = holder_bad == gradient_bad == young_bad == 0 and worst < 1e-5 and elapsed < 60
    report(
        6, ok,
        f"holder {holder_bad}, partial gradient {gradient_bad}, young {young_bad} violations; "
        f"gradient_check max {worst:.2e}, {elapsed:.2f}s",
    )
    assert ok


def test_criterion_7_stable_limit(report):
    t0 = time.perf_counter()
    target = (math.pi * math.e / 2) ** 3
    errors = [abs((sigma_sphere(3 + i) / sigma_sphere(i)).exp() / target - 1) for i in (10, 50, 100, 500)]
    ratio_log = (sigma_sphere(1000) / sigma_sphere_asymptote(1000)).log
    elapsed = time.perf_counter() - t0
    ok = (
        errors[-1] < 0.01
        and all(b < a for a, b in zip(errors, errors[1:]))
        and abs(math.expm1(ratio_log)) < 0.01
        and elapsed < 1
    )
    report(7, ok, "errors " + ", ".join(f"{e:.2e}" for e in errors) + f", v=1000 ratio exp({ratio_log:.2e}), {elapsed:.3f}s")
    assert ok


def test_criterion_8_exact_invariances(report):
    rng = np.random.default_rng(8)
    worst_scale = 0.0
    for _ in range(100):
        M = random_manifold(rng, int(rng.integers(3, 9)), int(rng.integers(1, 12)))
        u = rng.normal(size=M.n_vertices)
        u[0] = 1.0
        lam = math.exp(rng.uniform(-7, 7))
        q = yamabe_quotient(M, u)
        worst_scale = max(worst_scale, abs(yamabe_quotient(scale_metric(M, lam), u) - q) / abs(q))
    worst_assoc = 0.0
    for _ in range(30):
        a, b, c = (random_manifold(rng, int(rng.integers(1, 3)), int(rng.integers(1, 5))) for _ in range(3))
        left, right = product(product(a, b), c), product(a, product(b, c))
        u = rng.uniform(0.1, 1.0, left.n_vertices)
        q = yamabe_quotient(left, u)
        worst_assoc = max(worst_assoc, abs(yamabe_quotient(right, u) - q) / abs(q))
    ok = worst_scale <= 1e-10 and worst_assoc <= 1e-12
    report(8, ok, f"scale max rel diff {worst_scale:.1e}, associativity max rel diff {worst_assoc:.1e}")
    assert ok


def test_criterion_9_consistency_identities(report):
    rng = np.random.default_rng(9)
    worst_eps = 0.0
    for _ in range(50):
        v, w = (int(x) for x in rng.integers(3, 20, 2))
        mu_v, mu_w = rng.uniform(0, 200, 2)
        bound = product_lower_bound(mu_v, mu_w, v, w)
        other = epsilon_defect(v, w) * naive_infimum(mu_v, mu_w, v, w)
        worst_eps = max(worst_eps, abs(bound - other) / abs(bound))
    worst_sigma = max(
        abs(sigma_sphere(v).exp() / big_sigma(sphere_yamabe(v), v) - 1) for v in range(3, 21)
    )
    ok = worst_eps <= 1e-12 and worst_sigma <= 1e-10
    report(9, ok, f"epsilon identity {worst_eps:.1e}, Sigma identity {worst_sigma:.1e}")
    assert ok
