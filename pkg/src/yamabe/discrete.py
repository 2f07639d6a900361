"""Weighted-graph discretizations of compact Riemannian manifolds.

A :class:`DiscreteManifold` keeps exactly what the Yamabe quotient needs:
lumped vertex masses (the volume form), a Dirichlet form stored as weighted
edges (the gradient energy), and the scalar curvature at each vertex.
Riemannian products become Cartesian vertex products with a Kronecker-sum
Dirichlet form, so separable identities hold exactly at the discrete level.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import BudgetExceeded, SpecError, YamabeError
from .invariants import sphere_volume

__all__ = [
    "DEFAULT_VERTEX_BUDGET",
    "DiscreteManifold",
    "product",
    "sphere_latitude",
    "flat_torus",
    "scale_metric",
    "load_spec",
    "save_spec",
    "read_spec",
    "write_spec",
    "random_manifold",
]

DEFAULT_VERTEX_BUDGET = 10**6


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteManifold:
    """Vertices with masses, a Dirichlet form and a scalar curvature.

    The Dirichlet energy of a field ``u`` is
    ``sum(weights * (u[edges[:, 0]] - u[edges[:, 1]])**2)``.  ``shape`` records
    the factor vertex counts of a product so fields can be reshaped to
    ``(n_V, n_W)``; it is ``(n,)`` for anything that is not a product.
    """

    dim: int
    masses: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    scalar_curvature: np.ndarray
    label: str = ""
    shape: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "masses", _frozen(self.masses, float))
        edges = _frozen(self.edges, np.int64)
        if edges.size == 0:
            edges = _frozen(np.zeros((0, 2)), np.int64)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", _frozen(self.weights, float))
        object.__setattr__(self, "scalar_curvature", _frozen(self.scalar_curvature, float))
        if not self.shape:
            object.__setattr__(self, "shape", (len(self.masses),))
        self._validate()

    def _validate(self):
        n = len(self.masses)
        if int(self.dim) != self.dim or self.dim < 1:
            raise YamabeError(f"dim must be a positive integer, got {self.dim}")
        if self.masses.ndim != 1 or n == 0:
            raise YamabeError("masses must be a nonempty 1-d sequence")
        bad = np.flatnonzero(~(self.masses > 0))
        if bad.size:
            raise YamabeError(f"mass at vertex {bad[0]} is not positive: {self.masses[bad[0]]}")
        if self.scalar_curvature.shape != (n,):
            raise YamabeError("scalar_curvature must have one entry per vertex")
        if not np.all(np.isfinite(self.scalar_curvature)):
            raise YamabeError("scalar_curvature must be finite")
        if self.edges.ndim != 2 or self.edges.shape[1] != 2:
            raise YamabeError("edges must be an (E, 2) array")
        if self.weights.shape != (len(self.edges),):
            raise YamabeError("weights must have one entry per edge")
        bad = np.flatnonzero(~(self.weights > 0))
        if bad.size:
            raise YamabeError(f"weight of edge {bad[0]} is not positive: {self.weights[bad[0]]}")
        if len(self.edges):
            if self.edges.min() < 0 or self.edges.max() >= n:
                raise YamabeError("edge endpoint out of range")
            loops = np.flatnonzero(self.edges[:, 0] == self.edges[:, 1])
            if loops.size:
                raise YamabeError(f"edge {loops[0]} joins a vertex to itself")
        if int(np.prod(self.shape)) != n:
            raise YamabeError(f"shape {self.shape} does not match {n} vertices")

    @property
    def n_vertices(self) -> int:
        return len(self.masses)

    @property
    def volume(self) -> float:
        return float(np.sum(self.masses))

    @cached_property
    def laplacian(self) -> sp.csr_matrix:
        """Symmetric matrix L with u @ L @ u equal to the Dirichlet energy."""
        n = self.n_vertices
        a, b = self.edges[:, 0], self.edges[:, 1]
        w = self.weights
        rows = np.concatenate([a, b, a, b])
        cols = np.concatenate([a, b, b, a])
        vals = np.concatenate([w, w, -w, -w])
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def dirichlet_energy(self, u) -> float:
        u = np.asarray(u, dtype=float)
        d = u[self.edges[:, 0]] - u[self.edges[:, 1]]
        return float(np.dot(self.weights, d * d))

    def with_label(self, label: str) -> "DiscreteManifold":
        return DiscreteManifold(
            self.dim, self.masses, self.edges, self.weights, self.scalar_curvature, label, self.shape
        )

    def __repr__(self):
        return (
            f"DiscreteManifold(dim={self.dim}, vertices={self.n_vertices}, "
            f"edges={len(self.edges)}, label={self.label!r})"
        )


def product(mv: DiscreteManifold, mw: DiscreteManifold, budget: int = DEFAULT_VERTEX_BUDGET):
    """Riemannian product of two discretizations.

    Vertex ``(i, j)`` has index ``i * n_W + j``.  An edge of V with weight
    ``c`` becomes one edge per W-vertex ``j`` with weight ``c * mass_W[j]``,
    and symmetrically for W, so the Dirichlet form is the Kronecker sum
    ``L_V (x) M_W + M_V (x) L_W``.  V-direction edges come first.
    """
    nv, nw = mv.n_vertices, mw.n_vertices
    if nv * nw > budget:
        raise BudgetExceeded(f"product has {nv * nw} vertices, budget is {budget}")
    masses = np.outer(mv.masses, mw.masses).ravel()
    curv = (mv.scalar_curvature[:, None] + mw.scalar_curvature[None, :]).ravel()

    j = np.arange(nw)
    va = (mv.edges[:, 0:1] * nw + j).ravel()
    vb = (mv.edges[:, 1:2] * nw + j).ravel()
    vw = np.outer(mv.weights, mw.masses).ravel()

    i = np.arange(nv)[:, None]
    wa = (i * nw + mw.edges[:, 0]).ravel()
    wb = (i * nw + mw.edges[:, 1]).ravel()
    ww = np.outer(mv.masses, mw.weights).ravel()

    edges = np.stack([np.concatenate([va, wa]), np.concatenate([vb, wb])], axis=1)
    return DiscreteManifold(
        dim=mv.dim + mw.dim,
        masses=masses,
        edges=edges,
        weights=np.concatenate([vw, ww]),
        scalar_curvature=curv,
        label=f"({mv.label}) x ({mw.label})",
        shape=(nv, nw),
    )


def sphere_latitude(m: int, n_cells: int, scale: float = 1.0) -> DiscreteManifold:
    """Round S^m with metric ``scale * rho^m``, restricted to latitude-only fields.

    Cell ``i`` sits at polar angle ``(i + 1/2) pi / n_cells`` and carries the
    midpoint-rule volume of its latitude band.  Consecutive cells are joined
    by an edge whose weight is the band boundary area over the spacing.
    """
    if int(m) != m or m < 2:
        raise YamabeError(f"sphere dimension must be >= 2, got {m}")
    if int(n_cells) != n_cells or n_cells < 8:
        raise YamabeError(f"n_cells must be >= 8, got {n_cells}")
    if not scale > 0:
        raise YamabeError(f"scale must be positive, got {scale}")
    m, n = int(m), int(n_cells)
    dtheta = math.pi / n
    theta = (np.arange(n) + 0.5) * dtheta
    theta_face = np.arange(1, n) * dtheta
    band = sphere_volume(m - 1)
    masses = band * np.sin(theta) ** (m - 1) * dtheta * scale ** (m / 2)
    weights = band * np.sin(theta_face) ** (m - 1) * scale ** (m / 2 - 1) / dtheta
    edges = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
    return DiscreteManifold(
        dim=m,
        masses=masses,
        edges=edges,
        weights=weights,
        scalar_curvature=np.full(n, m * (m - 1) / scale),
        label=f"sphere {m} {n} {scale:g}",
    )


def flat_torus(m: int, n_per_axis: int, budget: int = DEFAULT_VERTEX_BUDGET) -> DiscreteManifold:
    """Flat unit-volume torus R^m / Z^m on a periodic grid with spacing 1/n."""
    if int(m) != m or m < 1:
        raise YamabeError(f"torus dimension must be >= 1, got {m}")
    if int(n_per_axis) != n_per_axis or n_per_axis < 2:
        raise YamabeError(f"n_per_axis must be >= 2, got {n_per_axis}")
    m, n = int(m), int(n_per_axis)
    if m * math.log(n) > math.log(budget) + 1e-12:
        raise BudgetExceeded(f"torus has {n}^{m} vertices, budget is {budget}")
    idx = np.arange(n**m).reshape((n,) * m)
    edges = np.concatenate(
        [np.stack([idx.ravel(), np.roll(idx, -1, axis=ax).ravel()], axis=1) for ax in range(m)]
    )
    h = 1.0 / n
    return DiscreteManifold(
        dim=m,
        masses=np.full(n**m, h**m),
        edges=edges,
        weights=np.full(len(edges), h ** (m - 2)),
        scalar_curvature=np.zeros(n**m),
        label=f"torus {m} {n}",
    )


def scale_metric(M: DiscreteManifold, lam: float) -> DiscreteManifold:
    """The same discretization for the metric ``lam * G``."""
    if not lam > 0:
        raise YamabeError(f"scale factor must be positive, got {lam}")
    m = M.dim
    return DiscreteManifold(
        dim=m,
        masses=M.masses * lam ** (m / 2),
        edges=M.edges,
        weights=M.weights * lam ** (m / 2 - 1),
        scalar_curvature=M.scalar_curvature / lam,
        label=M.label if lam == 1 else f"{lam:g} * ({M.label})",
        shape=M.shape,
    )


def _number(x, path):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpecError(f"expected a number, got {x!r}", path)
    if not math.isfinite(x):
        raise SpecError(f"expected a finite number, got {x!r}", path)
    return float(x)


def load_spec(document) -> DiscreteManifold:
    """Build a manifold from a JSON document (a ``dict`` or JSON text).

    Expected keys: ``dim``, ``label``, ``masses``, ``edges`` (list of
    ``[a, b, weight]``) and ``scalar_curvature``.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(document, dict):
        raise SpecError("top level must be an object")
    for key in ("dim", "masses", "edges", "scalar_curvature"):
        if key not in document:
            raise SpecError("missing field", key)

    dim = document["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SpecError(f"expected a positive integer, got {dim!r}", "dim")
    label = document.get("label", "")
    if not isinstance(label, str):
        raise SpecError("expected a string", "label")

    def number_list(key):
        seq = document[key]
        if not isinstance(seq, list):
            raise SpecError("expected a list", key)
        return [_number(x, f"{key}[{k}]") for k, x in enumerate(seq)]

    masses = number_list("masses")
    if not masses:
        raise SpecError("at least one vertex is required", "masses")
    for k, x in enumerate(masses):
        if not x > 0:
            raise SpecError(f"mass must be positive, got {x!r}", f"masses[{k}]")
    curv = number_list("scalar_curvature")
    if len(curv) != len(masses):
        raise SpecError(f"has {len(curv)} entries, expected {len(masses)}", "scalar_curvature")

    raw_edges = document["edges"]
    if not isinstance(raw_edges, list):
        raise SpecError("expected a list", "edges")
    pairs, weights = [], []
    n = len(masses)
    for k, e in enumerate(raw_edges):
        path = f"edges[{k}]"
        if not isinstance(e, list) or len(e) != 3:
            raise SpecError("expected [a, b, weight]", path)
        a, b = e[0], e[1]
        for slot, x in ((0, a), (1, b)):
            if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < n:
                raise SpecError(f"expected a vertex index in [0, {n}), got {x!r}", f"{path}[{slot}]")
        if a == b:
            raise SpecError("edge endpoints must differ", path)
        wt = _number(e[2], f"{path}[2]")
        if not wt > 0:
            raise SpecError(f"weight must be positive, got {wt!r}", f"{path}[2]")
        pairs.append((a, b))
        weights.append(wt)

    return DiscreteManifold(
        dim=dim,
        masses=masses,
        edges=np.array(pairs, dtype=np.int64).reshape(-1, 2),
        weights=weights,
        scalar_curvature=curv,
        label=label,
    )


def save_spec(M: DiscreteManifold) -> dict:
    """JSON-ready document for ``M``; floats round-trip exactly."""
    return {
        "dim": int(M.dim),
        "label": M.label,
        "masses": [float(x) for x in M.masses],
        "edges": [[int(a), int(b), float(w)] for (a, b), w in zip(M.edges, M.weights)],
        "scalar_curvature": [float(x) for x in M.scalar_curvature],
    }


def read_spec(path) -> DiscreteManifold:
    with open(path, encoding="utf-8") as fh:
        return load_spec(fh.read())


def write_spec(M: DiscreteManifold, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(save_spec(M), fh)
        fh.write("\n")


def random_manifold(rng: np.random.Generator, dim: int, n_vertices: int, curvature=(-1.0, 5.0)):
    """Connected random graph manifold for fuzzing: a path plus random chords."""
    n = int(n_vertices)
    edges = [(k, k + 1) for k in range(n - 1)]
    for _ in range(rng.integers(0, n + 1)):
        a, b = rng.choice(n, size=2, replace=False) if n > 1 else (0, 0)
        if a != b:
            edges.append((int(a), int(b)))
    return DiscreteManifold(
        dim=dim,
        masses=rng.uniform(0.1, 2.0, n),
        edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
        weights=rng.uniform(0.1, 2.0, len(edges)),
        scalar_curvature=rng.uniform(*curvature, n),
        label=f"random {dim} {n}",
    )
