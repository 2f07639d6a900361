"""The Yamabe quotient, mixed norms, and executable inequality checks.

Every checker returns an :class:`InequalityReport`.  A report ``holds`` when
``rhs - lhs >= -max(1e-10 * |rhs|, 1e-12)``: double-precision sums over up
to a million terms are not expected to do better.

Fields on a product ``V x W`` may be passed flat (length ``n_V * n_W``, index
``i * n_W + j``) or as an ``(n_V, n_W)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrete import DiscreteManifold
from .errors import DimensionError, YamabeError
from .invariants import conformal_exponent, critical_exponent, product_lower_bound

__all__ = [
    "TOL_REL",
    "TOL_ABS",
    "InequalityReport",
    "yamabe_quotient",
    "lp_norm",
    "mixed_norm",
    "partial_l2",
    "v_direction_energy",
    "check_iterated_holder",
    "check_partial_gradient",
    "check_assumption",
    "check_young",
    "einstein_hilbert",
    "ProductBoundReplay",
    "replay_product_bound",
]

TOL_REL = 1e-10
TOL_ABS = 1e-12


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of checking ``lhs <= rhs``."""

    lhs: float
    rhs: float
    slack: float
    holds: bool

    @classmethod
    def compare(cls, lhs, rhs, tol_rel=TOL_REL):
        lhs, rhs = float(lhs), float(rhs)
        slack = rhs - lhs
        return cls(lhs, rhs, slack, bool(slack >= -max(tol_rel * abs(rhs), TOL_ABS)))


def _field(M: DiscreteManifold, u):
    u = np.asarray(u, dtype=float).ravel()
    if u.shape != (M.n_vertices,):
        raise YamabeError(f"field has {u.size} values, manifold has {M.n_vertices} vertices")
    return u


def _grid(mv: DiscreteManifold, mw: DiscreteManifold, u):
    u = np.asarray(u, dtype=float)
    if u.size != mv.n_vertices * mw.n_vertices:
        raise YamabeError(
            f"field has {u.size} values, product has {mv.n_vertices} x {mw.n_vertices}"
        )
    return u.reshape(mv.n_vertices, mw.n_vertices)


def _require_dim(M, name="manifold"):
    if M.dim < 3:
        raise DimensionError(f"{name} has dimension {M.dim}, need >= 3")


def yamabe_quotient(M: DiscreteManifold, u) -> float:
    """(a_m D(u) + sum s u^2 rho) / (sum |u|^p_m rho)^(2/p_m)."""
    _require_dim(M)
    u = _field(M, u)
    if not np.any(u):
        raise YamabeError("the Yamabe quotient is undefined for the zero field")
    a, p = conformal_exponent(M.dim), critical_exponent(M.dim)
    num = a * M.dirichlet_energy(u) + np.dot(M.scalar_curvature * M.masses, u * u)
    den = np.dot(M.masses, np.abs(u) ** p) ** (2.0 / p)
    return float(num / den)


def lp_norm(M: DiscreteManifold, u, p: float) -> float:
    if not p >= 1:
        raise YamabeError(f"exponent must be >= 1, got {p}")
    u = _field(M, u)
    return float(np.dot(M.masses, np.abs(u) ** p) ** (1.0 / p))


def _inner_power_sums(mw, grid, q):
    """sum_j |u(i, j)|^q rho_W(j) for every i."""
    return (np.abs(grid) ** q) @ mw.masses


def mixed_norm(mv: DiscreteManifold, mw: DiscreteManifold, u, p: float, q: float) -> float:
    """Inner L^q norm over W followed by the outer L^p norm over V."""
    if not (p >= 1 and q >= 1):
        raise YamabeError(f"exponents must be >= 1, got p={p}, q={q}")
    inner = _inner_power_sums(mw, _grid(mv, mw, u), q) ** (1.0 / q)
    return float(np.dot(mv.masses, inner**p) ** (1.0 / p))


def partial_l2(mw: DiscreteManifold, u, mv: DiscreteManifold | None = None) -> np.ndarray:
    """gamma(i) = (sum_j u(i, j)^2 rho_W(j))^(1/2), a field on V.

    Pass ``u`` as an ``(n_V, n_W)`` array, or flat together with ``mv``.
    """
    u = np.asarray(u, dtype=float)
    if mv is not None:
        u = _grid(mv, mw, u)
    if u.ndim != 2 or u.shape[1] != mw.n_vertices:
        raise YamabeError(f"expected an (n_V, {mw.n_vertices}) array, got shape {u.shape}")
    return np.sqrt(_inner_power_sums(mw, u, 2))


def v_direction_energy(mv: DiscreteManifold, mw: DiscreteManifold, u) -> float:
    """The V-edge part of the product Dirichlet form applied to ``u``."""
    grid = _grid(mv, mw, u)
    diff = grid[mv.edges[:, 0]] - grid[mv.edges[:, 1]]
    return float(mv.weights @ ((diff * diff) @ mw.masses))


def check_iterated_holder(mv: DiscreteManifold, mw: DiscreteManifold, u) -> InequalityReport:
    """||u||_{p_m}^2 against the two mixed-norm factors of the iterated Hoelder bound."""
    _require_dim(mv, "V")
    _require_dim(mw, "W")
    grid = _grid(mv, mw, u)
    if not np.any(grid):
        raise YamabeError("field vanishes identically")
    v, w = mv.dim, mw.dim
    m = v + w
    pm, pv, pw = critical_exponent(m), critical_exponent(v), critical_exponent(w)

    lhs = np.dot(np.outer(mv.masses, mw.masses).ravel(), np.abs(grid.ravel()) ** pm) ** (2.0 / pm)
    first = np.dot(mv.masses, _inner_power_sums(mw, grid, pw) ** (2.0 / pw))
    second = np.dot(mv.masses, _inner_power_sums(mw, grid, 2) ** (pv / 2.0))
    rhs = first ** (w / m) * second ** ((v - 2) / m)
    return InequalityReport.compare(lhs, rhs)


def check_partial_gradient(mv: DiscreteManifold, mw: DiscreteManifold, u) -> InequalityReport:
    """Dirichlet energy on V of the partial L^2 norm against the V-part of u's energy."""
    grid = _grid(mv, mw, u)
    gamma = partial_l2(mw, grid)
    return InequalityReport.compare(mv.dirichlet_energy(gamma), v_direction_energy(mv, mw, grid))


def check_assumption(mv: DiscreteManifold, mw: DiscreteManifold) -> InequalityReport:
    """Pointwise curvature hypothesis (s_V + s_W)/a_m >= s_V/a_v + s_W/a_w.

    This is a ``>=`` statement, so the report reads the other way round from
    the other checkers: ``lhs = (s_V + s_W)/a_m``, ``rhs = s_V/a_v + s_W/a_w``
    and ``slack = lhs - rhs``.  All pairs of distinct curvature values are
    evaluated and the pair with the smallest slack is reported.
    """
    _require_dim(mv, "V")
    _require_dim(mw, "W")
    av, aw = conformal_exponent(mv.dim), conformal_exponent(mw.dim)
    am = conformal_exponent(mv.dim + mw.dim)
    sv = np.unique(mv.scalar_curvature)[:, None]
    sw = np.unique(mw.scalar_curvature)[None, :]
    lhs = (sv + sw) / am
    rhs = sv / av + sw / aw
    slack = lhs - rhs
    k = np.unravel_index(np.argmin(slack), slack.shape)
    flipped = InequalityReport.compare(rhs[k], lhs[k])
    return InequalityReport(flipped.rhs, flipped.lhs, flipped.slack, flipped.holds)


def check_young(c: float, d: float, v: int, w: int) -> InequalityReport:
    """c d <= (v/m) c^(m/v) + (w/m) d^(m/w) with m = v + w."""
    if not (c >= 0 and d >= 0):
        raise YamabeError(f"Young's inequality needs c, d >= 0, got c={c}, d={d}")
    m = v + w
    return InequalityReport.compare(c * d, (v / m) * c ** (m / v) + (w / m) * d ** (m / w))


def einstein_hilbert(M: DiscreteManifold) -> float:
    """Total scalar curvature over vol^((m-2)/m)."""
    _require_dim(M)
    return float(np.dot(M.scalar_curvature, M.masses) / M.volume ** ((M.dim - 2) / M.dim))


@dataclass(frozen=True)
class ProductBoundReplay:
    """Intermediate values of the product lower-bound argument for one field.

    For a field normalized to ``||u||_{p_m} = 1`` the stages satisfy
    ``quotient >= split >= factorwise >= young >= bound`` whenever the
    curvature hypothesis holds.  ``mu_v`` and ``mu_w`` are the factor
    constants that the argument can use for this particular field: the
    quotient of ``gamma`` on V, and the smallest quotient of a W-slice.
    """

    quotient: float
    split: float
    factorwise: float
    young: float
    bound: float
    mu_v: float
    mu_w: float

    @property
    def stages(self):
        return [self.quotient, self.split, self.factorwise, self.young, self.bound]

    def reports(self):
        s = self.stages
        return [InequalityReport.compare(b, a) for a, b in zip(s, s[1:])]


def replay_product_bound(mv: DiscreteManifold, mw: DiscreteManifold, u) -> ProductBoundReplay:
    """Evaluate each step of the product bound argument on a concrete field."""
    _require_dim(mv, "V")
    _require_dim(mw, "W")
    grid = np.abs(_grid(mv, mw, u))
    if not np.any(grid):
        raise YamabeError("field vanishes identically")
    v, w = mv.dim, mw.dim
    m = v + w
    am, av, aw = conformal_exponent(m), conformal_exponent(v), conformal_exponent(w)
    pm, pv, pw = critical_exponent(m), critical_exponent(v), critical_exponent(w)

    rho = np.outer(mv.masses, mw.masses)
    grid = grid / np.sum(rho * grid**pm) ** (1.0 / pm)
    sq = grid * grid

    v_energy = v_direction_energy(mv, mw, grid)
    w_energy = float(sum(mv.masses[i] * mw.dirichlet_energy(grid[i]) for i in range(mv.n_vertices)))
    s_v = mv.scalar_curvature[:, None]
    s_w = mw.scalar_curvature[None, :]
    quotient = am * (v_energy + w_energy + np.sum((s_v + s_w) / am * sq * rho))
    split = am * (v_energy + np.sum(s_v / av * sq * rho) + w_energy + np.sum(s_w / aw * sq * rho))

    gamma = partial_l2(mw, grid)
    mu_v = yamabe_quotient(mv, gamma)
    rows = [i for i in range(mv.n_vertices) if np.any(grid[i])]
    mu_w = min(yamabe_quotient(mw, grid[i]) for i in rows)
    a_term = np.dot(mv.masses, gamma**pv)
    b_term = np.dot(mv.masses, _inner_power_sums(mw, grid, pw) ** (2.0 / pw))
    factorwise = am / av * mu_v * a_term ** ((v - 2) / v) + am / aw * mu_w * b_term

    r = product_lower_bound(max(mu_v, 0.0), max(mu_w, 0.0), v, w)
    young = r * a_term ** ((v - 2) / m) * b_term ** (w / m)
    return ProductBoundReplay(
        float(quotient), float(split), float(factorwise), float(young), float(r),
        float(mu_v), float(mu_w),
    )
