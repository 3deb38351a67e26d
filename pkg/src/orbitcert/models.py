"""Concrete matrix models of the ambient spaces.

Three families are shipped:

* ``sl``   -- SL(n, R)/SO(n), points are unit-determinant SPD matrices, g.p = g p g^T.
* ``so1n`` -- SO(1, n)_0/SO(n), points are upper-sheet hyperboloid vectors, g.x = g x.
* ``hopf`` -- U(n+1) acting on S^{2n+1} inside C^{n+1} = R^{2n+2}; u(n+1) is
  realised by real 2(n+1) x 2(n+1) matrices commuting with a fixed complex
  structure J.

The Lie algebra side (basis, theta, Killing form) is exact; the point side is
double precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from . import exact, kernels
from .errors import ConfigurationError, DimensionError, DomainError, NumericError
from .exact import Q

MODEL_NAMES = ("sl", "so1n", "hopf")
MIN_N = {"sl": 2, "so1n": 2, "hopf": 1}

DEFAULT_TOLERANCES = {"group": 1e-9, "point": 1e-9}


@dataclass(frozen=True)
class Point:
    model: str
    coords: np.ndarray

    def column(self) -> np.ndarray:
        c = self.coords
        return c if c.ndim == 2 else c.reshape(-1, 1)


@dataclass(frozen=True, eq=False)
class MatrixModel:
    name: str
    n: int
    size: int
    basis: tuple
    labels: tuple
    killing_scale: Fraction
    origin: np.ndarray
    point_space: str
    kind: int
    metric_scale: float
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    complex_structure: Any = None

    @property
    def ambient_dim(self) -> int:
        return len(self.basis)

    @property
    def compact(self) -> bool:
        return self.name == "hopf"

    def theta(self, X):
        if self.compact:
            return X
        return -X.T

    @cached_property
    def _coord_echelon(self) -> exact.Echelon:
        return exact.Echelon(self.basis, track=True)

    def coords(self, X) -> list[Fraction]:
        """Exact coordinates of ``X`` in the model basis."""
        c = self._coord_echelon.coords(X)
        if c is None:
            raise DomainError(f"matrix is not in the Lie algebra of model {self.name}")
        return c

    def contains(self, X) -> bool:
        return self._coord_echelon.contains(X)

    @cached_property
    def cartan_parts(self) -> tuple[tuple, tuple]:
        """Exact bases of (k, p): the +1 and -1 eigenspaces of theta."""
        ks = [(X + self.theta(X)) / 2 for X in self.basis]
        ps = [(X - self.theta(X)) / 2 for X in self.basis]
        ki = exact.independent_subset(ks)
        pi = exact.independent_subset(ps)
        return tuple(ks[i] for i in ki), tuple(ps[i] for i in pi)

    @property
    def k_basis(self) -> tuple:
        return self.cartan_parts[0]

    @property
    def p_basis(self) -> tuple:
        return self.cartan_parts[1]

    @cached_property
    def float_basis(self) -> np.ndarray:
        return np.array([exact.to_float(X) for X in self.basis])

    def descriptor(self) -> dict:
        return {"name": self.name, "n": self.n, "tolerances": dict(self.tolerances)}


def model_from_descriptor(desc: dict) -> MatrixModel:
    return make_model(desc["name"], int(desc["n"]), desc.get("tolerances"))


def _sl_basis(n: int):
    basis, labels = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                basis.append(exact.unit(n, i, j))
                labels.append(f"E{i + 1}{j + 1}")
    for i in range(n - 1):
        H = exact.unit(n, i, i) - exact.unit(n, i + 1, i + 1)
        basis.append(H)
        labels.append(f"H{i + 1}")
    return basis, labels


def _so1n_basis(n: int):
    size = n + 1
    basis, labels = [], []
    for i in range(1, size):
        basis.append(exact.unit(size, 0, i) + exact.unit(size, i, 0))
        labels.append(f"B{i}")
    for i in range(1, size):
        for j in range(i + 1, size):
            basis.append(exact.unit(size, i, j) - exact.unit(size, j, i))
            labels.append(f"R{i}{j}")
    return basis, labels


def realify(A, B):
    """Real 2m x 2m matrix of the complex matrix A + iB."""
    return np.block([[A, -B], [B, A]])


def _hopf_basis(n: int):
    m = n + 1
    Z = exact.qzeros(m, m)
    basis, labels = [], []
    for i in range(m):
        for j in range(i + 1, m):
            basis.append(realify(exact.unit(m, i, j) - exact.unit(m, j, i), Z))
            labels.append(f"A{i + 1}{j + 1}")
    for i in range(m):
        for j in range(i + 1, m):
            basis.append(realify(Z, exact.unit(m, i, j) + exact.unit(m, j, i)))
            labels.append(f"iS{i + 1}{j + 1}")
    for i in range(m):
        basis.append(realify(Z, exact.unit(m, i, i)))
        labels.append(f"iE{i + 1}{i + 1}")
    J = realify(Z, exact.qeye(m))
    return basis, labels, J


def make_model(name: str, n: int, tolerances: dict | None = None) -> MatrixModel:
    """Build one of the shipped models.

    The Killing scale c satisfies B(X, Y) = c tr(XY): 2n for sl(n), n - 1 for
    so(1, n).  For u(n+1) the Killing form is degenerate on the centre, so the
    invariant form n+1 times the real trace is used; it agrees with the Killing
    form on su(n+1).
    """
    if name not in MODEL_NAMES:
        raise ConfigurationError("name", f"unsupported model {name!r}; choose from {MODEL_NAMES}")
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < MIN_N[name]:
        raise ConfigurationError("n", f"model {name} needs integer n >= {MIN_N[name]}, got {n!r}")
    n = int(n)
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ConfigurationError("tolerances", f"unknown keys {sorted(unknown)}")
        tol.update({k: float(v) for k, v in tolerances.items()})

    if name == "sl":
        basis, labels = _sl_basis(n)
        c = Fraction(2 * n)
        # the SPD metric is sqrt(c/4) times the Frobenius norm of log(p^-1 q)
        return MatrixModel(
            name, n, n, tuple(basis), tuple(labels), c, np.eye(n),
            "unit-determinant symmetric positive-definite matrices",
            kernels.KIND_SPD, math.sqrt(n / 2.0), tol,
        )
    if name == "so1n":
        basis, labels = _so1n_basis(n)
        c = Fraction(n - 1)
        origin = np.zeros(n + 1)
        origin[0] = 1.0
        # a unit-speed boost has <X, X> = 2c
        return MatrixModel(
            name, n, n + 1, tuple(basis), tuple(labels), c, origin,
            "upper-sheet hyperboloid vectors (Minkowski norm -1)",
            kernels.KIND_HYPERBOLOID, math.sqrt(2.0 * (n - 1)), tol,
        )
    basis, labels, J = _hopf_basis(n)
    origin = np.zeros(2 * (n + 1))
    origin[0] = 1.0
    return MatrixModel(
        name, n, 2 * (n + 1), tuple(basis), tuple(labels), Fraction(n + 1), origin,
        "unit vectors in C^{n+1} viewed as real vectors",
        kernels.KIND_SPHERE, 1.0, tol, J,
    )


# -- algebra ----------------------------------------------------------------

def bracket(X, Y):
    """Commutator XY - YX; exact when both inputs are exact."""
    if np.shape(X) != np.shape(Y) or np.ndim(X) != 2:
        raise DimensionError(f"bracket of shapes {np.shape(X)} and {np.shape(Y)}")
    if exact.is_exact(X) and exact.is_exact(Y):
        return exact.commutator(X, Y)
    X = exact.to_float(X)
    Y = exact.to_float(Y)
    return X @ Y - Y @ X


def _trace(M):
    return sum(M[i, i] for i in range(M.shape[0])) if exact.is_exact(M) else float(np.trace(M))


def killing(model: MatrixModel, X, Y):
    if exact.is_exact(X) and exact.is_exact(Y):
        return model.killing_scale * _trace(exact.matmul(X, Y))
    return float(model.killing_scale) * float(np.trace(exact.to_float(X) @ exact.to_float(Y)))


def inner(model: MatrixModel, X, Y):
    """<X, Y> = -B(X, theta Y)."""
    if np.shape(X) != (model.size, model.size) or np.shape(Y) != np.shape(X):
        raise DimensionError(f"inner product of shapes {np.shape(X)}, {np.shape(Y)}")
    return -killing(model, X, model.theta(Y))


def gram(model: MatrixModel, mats) -> list[list[Fraction]]:
    return [[inner(model, A, B) for B in mats] for A in mats]


def p_projection(model: MatrixModel, X):
    """Projection onto p along k, (X - theta X)/2."""
    return (X - model.theta(X)) / 2


def ad_matrix(model: MatrixModel, X) -> list[list[Fraction]]:
    """Exact matrix of ad(X) in the model basis (column j = coords of [X, b_j])."""
    cols = [model.coords(bracket(X, b)) for b in model.basis]
    d = len(cols)
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def killing_from_ad(model: MatrixModel, X, Y) -> Fraction:
    A = ad_matrix(model, X)
    B = ad_matrix(model, Y)
    d = len(A)
    return sum((A[i][k] * B[k][i] for i in range(d) for k in range(d)), Fraction(0))


# -- group and points --------------------------------------------------------

def _as_float(g) -> np.ndarray:
    return exact.to_float(g)


def group_residual(model: MatrixModel, g: np.ndarray) -> float:
    if model.name == "sl":
        return abs(np.linalg.det(g) - 1.0)
    if model.name == "so1n":
        Jm = np.diag([-1.0] + [1.0] * model.n)
        res = np.max(np.abs(g.T @ Jm @ g - Jm))
        return res if g[0, 0] > 0 else math.inf
    J = exact.to_float(model.complex_structure)
    return max(np.max(np.abs(g.T @ g - np.eye(model.size))), np.max(np.abs(g @ J - J @ g)))


def check_group(model: MatrixModel, g) -> np.ndarray:
    g = _as_float(g)
    if g.shape != (model.size, model.size):
        raise DimensionError(f"group element of shape {g.shape} for model of size {model.size}")
    res = group_residual(model, g)
    if not res <= model.tolerances["group"]:
        raise DomainError(f"element is outside the group of model {model.name} (residual {res:.3e})")
    return g


def point_residual(model: MatrixModel, c: np.ndarray) -> float:
    if model.name == "sl":
        if c.shape != (model.n, model.n):
            return math.inf
        sym = np.max(np.abs(c - c.T))
        w = np.linalg.eigvalsh(0.5 * (c + c.T))
        if w[0] <= 0:
            return math.inf
        return max(sym, abs(float(np.prod(w)) - 1.0))
    c = c.reshape(-1)
    if c.shape[0] != model.size:
        return math.inf
    if model.name == "so1n":
        if c[0] <= 0:
            return math.inf
        return abs(-c[0] ** 2 + float(np.dot(c[1:], c[1:])) + 1.0)
    return abs(float(np.linalg.norm(c)) - 1.0)


def make_point(model: MatrixModel, coords, check: bool = True) -> Point:
    c = np.array(coords, dtype=float)
    if model.kind != kernels.KIND_SPD:
        c = c.reshape(-1)
    if check:
        tol = model.tolerances["point"] if model.name != "hopf" else min(model.tolerances["point"], 1e-12)
        res = point_residual(model, c)
        if not res <= tol:
            raise DomainError(f"not a point of model {model.name} (residual {res:.3e})")
    return Point(model.name, c)


def origin(model: MatrixModel) -> Point:
    return Point(model.name, model.origin.copy())


def _wrap(model: MatrixModel, col: np.ndarray) -> Point:
    if model.kind == kernels.KIND_SPD:
        return Point(model.name, col)
    return Point(model.name, col.reshape(-1))


def _check_same(model: MatrixModel, *points: Point) -> None:
    for p in points:
        if p.model != model.name:
            raise DomainError(f"point of model {p.model} used with model {model.name}")


def act(model: MatrixModel, g, p: Point) -> Point:
    _check_same(model, p)
    g = check_group(model, g)
    return _wrap(model, kernels.act(model.kind, g, p.column()))


def matrix_exponential(X) -> np.ndarray:
    return kernels.expm(np.ascontiguousarray(_as_float(X)))


def exp_ray(model: MatrixModel, X, t: float, p: Point) -> Point:
    """exp(tX).p"""
    _check_same(model, p)
    g = matrix_exponential(float(t) * _as_float(X))
    return _wrap(model, kernels.act(model.kind, g, p.column()))


def distance(model: MatrixModel, p: Point, q: Point) -> float:
    _check_same(model, p, q)
    d = kernels.distance(model.kind, p.column(), q.column(), model.metric_scale)
    if not np.isfinite(d):
        raise NumericError("distance undefined: p^-1 q lost positive definiteness")
    return float(d)


def random_algebra_element(model: MatrixModel, rng: np.random.Generator, part: str = "p") -> np.ndarray:
    mats = {"p": model.p_basis, "k": model.k_basis, "g": model.basis}[part]
    F = np.array([exact.to_float(X) for X in mats])
    coef = rng.standard_normal(len(mats))
    X = np.tensordot(coef, F, axes=1)
    return X / max(np.linalg.norm(X), 1e-300)


def random_point(model: MatrixModel, rng: np.random.Generator, scale: float = 1.0) -> Point:
    """Random point at Frobenius-size ``scale`` from the origin (uniform on the sphere for hopf)."""
    if model.compact:
        v = rng.standard_normal(model.size)
        return Point(model.name, v / np.linalg.norm(v))
    X = random_algebra_element(model, rng, "p")
    return exp_ray(model, X, scale * rng.uniform(0.2, 1.0), origin(model))
