"""Independent extended-precision oracles.

These evaluate the closed forms directly with mpmath at 50 digits and share
no code with the package.
"""

import mpmath as mp
import numpy as np
import pytest

mp.mp.dps = 50


def oracle_a(m):
    return mp.mpf(4 * (m - 1)) / (m - 2)


def oracle_omega(m):
    return 2 * mp.pi ** (mp.mpf(m + 1) / 2) / mp.gamma(mp.mpf(m + 1) / 2)


def oracle_mu_sphere(m):
    return m * (m - 1) * oracle_omega(m) ** (mp.mpf(2) / m)


def oracle_epsilon(v, w):
    m = v + w
    return oracle_a(m) / (oracle_a(v) ** (mp.mpf(v) / m) * oracle_a(w) ** (mp.mpf(w) / m))


def oracle_lambda(m, k):
    p, q = k + 1, m - k - 1
    return (
        m * oracle_a(m)
        / ((p * oracle_a(p)) ** (mp.mpf(p) / m) * (q * oracle_a(q)) ** (mp.mpf(q) / m))
        * oracle_mu_sphere(p) ** (mp.mpf(p) / m)
        * oracle_mu_sphere(q) ** (mp.mpf(q) / m)
    )


def oracle_log_sigma_sphere(v):
    return mp.log(4 * mp.pi) + v * mp.log(mp.pi * (v - 2) / 4) - 2 * mp.loggamma(mp.mpf(v + 1) / 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
