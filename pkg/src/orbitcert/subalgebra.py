"""Subalgebras built from root data, and exact ideal / containment decisions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from . import exact
from .errors import ArgumentError, NotClosedError, NotSubspaceError
from .exact import Q
from .models import MatrixModel, bracket, gram, inner, model_from_descriptor
from .rootspace import PositiveSystem, RootSpaceDecomposition, phi_indices, root_subsystem

RECIPES = ("g", "n", "s", "a", "s_V", "q_Phi", "m_Phi", "a_Phi", "n_Phi", "s_Phi", "custom")


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """An exact basis of a subspace of g together with how it was built.

    ``degrees`` grades the basis by root height (0 for elements of g_0, None
    when the subalgebra was not built from root data); it is what lets the
    congruence code recover exponential coordinates level by level.
    """

    basis: tuple
    recipe: str
    parent_model: MatrixModel
    params: dict = field(default_factory=dict)
    degrees: tuple | None = None

    def __post_init__(self):
        if self.recipe not in RECIPES:
            raise ArgumentError(f"unknown recipe {self.recipe!r}")
        if self._echelon.rank != len(self.basis):
            raise ArgumentError(f"basis of {self.recipe} is linearly dependent")
        if self.degrees is not None and len(self.degrees) != len(self.basis):
            raise ArgumentError("degrees and basis differ in length")

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def tag(self) -> str:
        if "phi" in self.params:
            return f"{self.recipe}({','.join(map(str, self.params['phi']))})"
        return self.recipe

    @cached_property
    def _echelon(self) -> exact.Echelon:
        return exact.Echelon(self.basis, track=True)

    @cached_property
    def float_basis(self) -> np.ndarray:
        if not self.basis:
            s = self.parent_model.size
            return np.zeros((0, s, s))
        return np.array([exact.to_float(X) for X in self.basis])

    def contains(self, X) -> bool:
        return self._echelon.contains(X)

    def reduce(self, X) -> dict:
        return self._echelon.reduce(X)

    def coords(self, X) -> list[Fraction] | None:
        return self._echelon.coords(X)

    def contains_span(self, other: "Subalgebra") -> bool:
        return all(self.contains(X) for X in other.basis)

    def same_span(self, other: "Subalgebra") -> bool:
        return self.dim == other.dim and self.contains_span(other)

    @cached_property
    def is_closed(self) -> bool:
        return self.closure_failure is None

    @cached_property
    def closure_failure(self) -> tuple[int, int] | None:
        for i, X in enumerate(self.basis):
            for j in range(i + 1, len(self.basis)):
                if not self.contains(bracket(X, self.basis[j])):
                    return (i, j)
        return None

    def structure_constants(self) -> list:
        """C[i][j][k]: coefficient of b_k in [b_i, b_j] (exact)."""
        d = self.dim
        C = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
        for i in range(d):
            for j in range(i + 1, d):
                c = self.coords(bracket(self.basis[i], self.basis[j]))
                if c is None:
                    raise NotClosedError(f"{self.tag} is not closed under the bracket")
                for k in range(d):
                    C[i][j][k] = c[k]
                    C[j][i][k] = -c[k]
        return C

    def to_dict(self) -> dict:
        return {
            "recipe": self.recipe,
            "params": _jsonable(self.params),
            "parent_model": self.parent_model.descriptor(),
            "degrees": None if self.degrees is None else list(self.degrees),
            "basis": [exact.matrix_to_strings(X) for X in self.basis],
        }

    @classmethod
    def from_dict(cls, d: dict, model: MatrixModel | None = None) -> "Subalgebra":
        model = model or model_from_descriptor(d["parent_model"])
        basis = tuple(exact.strings_to_matrix(X) for X in d["basis"])
        params = dict(d.get("params") or {})
        if "phi" in params:
            params["phi"] = tuple(params["phi"])
        degrees = d.get("degrees")
        return cls(basis, d["recipe"], model, params, None if degrees is None else tuple(degrees))


def _jsonable(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k == "V":
            out[k] = [[exact.fmt(x) for x in vec] for vec in v]
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


def custom(model: MatrixModel, mats: Sequence, **params) -> Subalgebra:
    return Subalgebra(tuple(exact.qarray(X) if not exact.is_exact(X) else X for X in mats), "custom", model, params)


def full_algebra(model: MatrixModel) -> Subalgebra:
    return Subalgebra(tuple(model.basis), "g", model)


def center_of_u(model: MatrixModel) -> Subalgebra:
    """The one-dimensional centre u(1) of u(n+1), spanned by the complex structure."""
    if not model.compact:
        raise ArgumentError("centre of u(n+1) only exists for the hopf model")
    return Subalgebra((model.complex_structure,), "custom", model, {"name": "u(1)"}, None)


def derived(sub: Subalgebra, other: Subalgebra | None = None) -> list:
    """Basis of span [sub, other] (other defaults to sub)."""
    other = other or sub
    ech = exact.Echelon()
    out = []
    for X in sub.basis:
        for Y in other.basis:
            Z = bracket(X, Y)
            if ech.add(Z):
                out.append(Z)
    return out


def _as_sub(model, mats, recipe="custom") -> Subalgebra:
    return Subalgebra(tuple(mats), recipe, model)


def is_nilpotent(sub: Subalgebra) -> bool:
    current = list(sub.basis)
    for _ in range(sub.dim + 1):
        if not current:
            return True
        current = derived(_as_sub(sub.parent_model, current), sub)
    return not current


def is_solvable(sub: Subalgebra) -> bool:
    current = list(sub.basis)
    for _ in range(sub.dim + 1):
        if not current:
            return True
        s = _as_sub(sub.parent_model, current)
        current = derived(s, s)
    return not current


def _require_proper(ps: PositiveSystem, Phi) -> tuple[int, ...]:
    idx = phi_indices(ps, Phi)
    if len(idx) == ps.rank:
        raise ArgumentError("Phi must be a proper subset of the simple roots")
    return idx


def _root_part(dec: RootSpaceDecomposition, ps: PositiveSystem, roots) -> tuple[list, list]:
    mats, degrees = [], []
    for lam in roots:
        for X in dec.root_spaces[lam]:
            mats.append(X)
            degrees.append(ps.height(lam))
    return mats, degrees


def build_iwasawa(dec: RootSpaceDecomposition, ps: PositiveSystem) -> tuple[Subalgebra, Subalgebra]:
    """(n, s) with n the sum of positive root spaces and s = a + n."""
    model = dec.model
    nm, nd = _root_part(dec, ps, ps.positive_roots)
    n = Subalgebra(tuple(nm), "n", model, {}, tuple(nd))
    s = Subalgebra(tuple(dec.a_basis) + tuple(nm), "s", model, {}, (0,) * dec.rank + tuple(nd))
    return n, s


def a_subalgebra(dec: RootSpaceDecomposition) -> Subalgebra:
    return Subalgebra(tuple(dec.a_basis), "a", dec.model, {}, (0,) * dec.rank)


def _a_coords(s: Subalgebra, a_basis, V) -> list[list[Fraction]]:
    r = len(a_basis)
    ech = exact.Echelon(a_basis, track=True)
    out = []
    for v in V:
        arr = np.asarray(v, dtype=object)
        if arr.ndim == 2:
            c = ech.coords(exact.qarray(arr))
            if c is None:
                raise ArgumentError("V is not contained in a")
            out.append(c)
        else:
            if arr.shape != (r,):
                raise ArgumentError(f"V vector of length {arr.shape} for rank {r}")
            out.append([Q(x) for x in arr])
    return out


def build_s_V(s: Subalgebra, a_basis, V: Sequence) -> Subalgebra:
    """s minus V: the <,>-orthogonal complement of V in a, plus n.

    V is a spanning set, either as matrices in a or as coordinate vectors on
    ``a_basis``.
    """
    model = s.parent_model
    a_basis = tuple(a_basis)
    if s.recipe != "s":
        raise ArgumentError("build_s_V expects the Iwasawa subalgebra s")
    vc = _a_coords(s, a_basis, V)
    G = gram(model, a_basis)
    r = len(a_basis)
    rows = [[sum((v[j] * G[j][k] for j in range(r)), Fraction(0)) for k in range(r)] for v in vc]
    comp = exact.nullspace(rows, r) if rows else [[Fraction(int(i == k)) for k in range(r)] for i in range(r)]
    a_part = [exact.combine(h, a_basis) for h in comp]
    n_idx = [i for i, d in enumerate(s.degrees) if d > 0]
    basis = tuple(a_part) + tuple(s.basis[i] for i in n_idx)
    degrees = (0,) * len(a_part) + tuple(s.degrees[i] for i in n_idx)
    independent = [vc[i] for i in exact.independent_subset(vc)] if vc else []
    return Subalgebra(basis, "s_V", model, {"V": tuple(tuple(v) for v in independent)}, degrees)


def build_parabolic(dec: RootSpaceDecomposition, ps: PositiveSystem, Phi) -> Subalgebra:
    """q_Phi = g_0 + sum of g_beta over Sigma_Phi and Sigma^+."""
    idx = _require_proper(ps, Phi)
    sub, _ = root_subsystem(ps, dec, idx)
    pos = set(ps.positive_roots)
    negatives = sorted((lam for lam in sub if lam not in pos), key=lambda lam: -ps.height(lam))
    pm, pd = _root_part(dec, ps, ps.positive_roots)
    qm, qd = _root_part(dec, ps, negatives)
    basis = tuple(dec.zero_space) + tuple(pm) + tuple(qm)
    degrees = (0,) * len(dec.zero_space) + tuple(pd) + tuple(qd)
    return Subalgebra(basis, "q_Phi", dec.model, {"phi": idx}, degrees)


def _a_phi(dec: RootSpaceDecomposition, ps: PositiveSystem, idx) -> list:
    rows = [list(ps.simple_roots[i - 1]) for i in idx]
    r = dec.rank
    kern = exact.nullspace(rows, r) if rows else [[Fraction(int(i == k)) for k in range(r)] for i in range(r)]
    return [exact.combine(h, dec.a_basis) for h in kern]


def langlands(dec: RootSpaceDecomposition, ps: PositiveSystem, Phi) -> tuple[Subalgebra, Subalgebra, Subalgebra]:
    """(m_Phi, a_Phi, n_Phi) with q_Phi = m_Phi + a_Phi + n_Phi.

    m_Phi carries the root spaces of all of Sigma_Phi (both signs); with only
    the positive half the three pieces would not add up to q_Phi.
    """
    idx = _require_proper(ps, Phi)
    model = dec.model
    sub, sub_pos = root_subsystem(ps, dec, idx)
    a_phi = _a_phi(dec, ps, idx)
    Z = dec.zero_space
    rows = [[inner(model, Zi, A) for Zi in Z] for A in a_phi]
    comp = exact.nullspace(rows, len(Z)) if rows else [[Fraction(int(i == k)) for k in range(len(Z))] for i in range(len(Z))]
    m0 = [exact.combine(c, Z) for c in comp]
    ordered = [lam for lam in sub_pos] + [lam for lam in sub if lam not in set(sub_pos)]
    mm, md = _root_part(dec, ps, ordered)
    m_phi = Subalgebra(tuple(m0) + tuple(mm), "m_Phi", model, {"phi": idx}, (0,) * len(m0) + tuple(md))
    a_sub = Subalgebra(tuple(a_phi), "a_Phi", model, {"phi": idx}, (0,) * len(a_phi))
    rest = [lam for lam in ps.positive_roots if lam not in set(sub_pos)]
    nm, nd = _root_part(dec, ps, rest)
    n_phi = Subalgebra(tuple(nm), "n_Phi", model, {"phi": idx}, tuple(nd))
    return m_phi, a_sub, n_phi


def build_s_Phi(dec: RootSpaceDecomposition, ps: PositiveSystem, Phi) -> Subalgebra:
    """Solvable part a_Phi + n_Phi of the parabolic subalgebra q_Phi."""
    _, a_phi, n_phi = langlands(dec, ps, Phi)
    return Subalgebra(
        a_phi.basis + n_phi.basis, "s_Phi", dec.model, {"phi": a_phi.params["phi"]},
        a_phi.degrees + n_phi.degrees,
    )


@dataclass(frozen=True, eq=False)
class IdealCheck:
    """Outcome of an exact bracket-membership scan.

    On failure ``witness`` holds the basis indices (i in ambient, j in sub) of
    the first pair whose bracket escapes, and ``residual`` the component of
    that bracket orthogonal to span(sub).
    """

    holds: bool
    sub: Subalgebra
    ambient: Subalgebra
    witness: tuple[int, int] | None = None
    witness_pair: tuple | None = None
    residual: Any = None

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        d = {"holds": self.holds, "sub": self.sub.tag, "ambient": self.ambient.tag, "witness": None}
        if not self.holds:
            d["witness"] = {
                "indices": list(self.witness),
                "pair": [exact.matrix_to_strings(X) for X in self.witness_pair],
                "residual": exact.matrix_to_strings(self.residual),
            }
        return d


def orthogonal_residual(sub: Subalgebra, X) -> np.ndarray:
    """Component of X orthogonal to span(sub) for <,>."""
    model = sub.parent_model
    if not sub.basis:
        return X
    G = gram(model, sub.basis)
    rhs = [inner(model, B, X) for B in sub.basis]
    coef = exact.solve_gram(G, rhs)
    return X - exact.combine(coef, sub.basis)


def _scan(sub: Subalgebra, ambient: Subalgebra) -> IdealCheck:
    for i, X in enumerate(ambient.basis):
        for j, Y in enumerate(sub.basis):
            Z = bracket(X, Y)
            if not sub.contains(Z):
                return IdealCheck(False, sub, ambient, (i, j), (X, Y), orthogonal_residual(sub, Z))
    return IdealCheck(True, sub, ambient)


def is_ideal(h: Subalgebra, g: Subalgebra) -> IdealCheck:
    """Decide [g, h] in h exactly."""
    if not g.contains_span(h):
        raise NotSubspaceError(f"{h.tag} is not a subspace of {g.tag}")
    for sub in (h, g):
        if not sub.is_closed:
            raise NotClosedError(f"{sub.tag} is not closed under the bracket")
    return _scan(h, g)


def check_parabolic_ideal(s_phi: Subalgebra, q_phi: Subalgebra) -> IdealCheck:
    """Decide [s_Phi, q_Phi] in s_Phi exactly."""
    if s_phi.params.get("phi") != q_phi.params.get("phi") or "phi" not in q_phi.params:
        raise ArgumentError(f"mismatched Phi tags {s_phi.tag} and {q_phi.tag}")
    return _scan(s_phi, q_phi)


def hopf_algebras(model: MatrixModel) -> tuple[Subalgebra, Subalgebra]:
    """(u(1), u(n+1)) for the Hopf model."""
    return center_of_u(model), full_algebra(model)
