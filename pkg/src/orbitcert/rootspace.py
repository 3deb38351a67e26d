"""Restricted root-space decomposition, positive systems and root subsystems."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import exact
from .errors import ArgumentError, InternalError, UnsupportedModelError
from .exact import Q
from .models import MatrixModel, bracket

Root = tuple  # tuple[Fraction, ...]: values lambda(H_k) on the a basis


def _coweight(n: int, k: int) -> np.ndarray:
    # diag with a unit jump between positions k and k+1, made traceless
    H = exact.qzeros(n, n)
    for j in range(n):
        H[j, j] = Fraction(-(n - k), n) if j < k else Fraction(k, n)
    return H


def maximal_abelian(model: MatrixModel) -> tuple:
    """Canonical maximal abelian subspace a of p.

    For sl(n) this is the traceless diagonal, spanned by the fundamental
    coweights so that the lower-triangular root vectors E_{k+1,k} are simple.
    For so(1, n) it is the boost in the (0, 1) plane.
    """
    if model.compact:
        raise UnsupportedModelError(
            "the compact Hopf model has no restricted root theory (p = 0); "
            "apply the ideal criterion to u(1) in u(n+1) directly"
        )
    if model.name == "sl":
        a = tuple(_coweight(model.n, k) for k in range(1, model.n))
    else:
        a = (exact.unit(model.size, 0, 1) + exact.unit(model.size, 1, 0),)
    if centralizer_in_p_dim(model, a) != len(a):
        raise InternalError("canonical a is not maximal abelian")
    return a


def centralizer_in_p_dim(model: MatrixModel, a_basis) -> int:
    """Exact dimension of {X in p : [H, X] = 0 for all H in a}."""
    P = model.p_basis
    width = model.size * model.size
    rows = []
    for H in a_basis:
        images = [exact.dense(exact.sparse(bracket(H, X)), width) for X in P]
        rows.extend([img[e] for img in images] for e in range(width))
    return len(exact.nullspace(rows, len(P)))


@dataclass(frozen=True, eq=False)
class RootSpaceDecomposition:
    model: MatrixModel
    a_basis: tuple
    roots: tuple
    root_spaces: dict
    zero_space: tuple

    @property
    def rank(self) -> int:
        return len(self.a_basis)

    def multiplicity(self, root: Root) -> int:
        return len(self.root_spaces[root])

    def space(self, root: Root) -> tuple:
        if all(x == 0 for x in root):
            return self.zero_space
        return self.root_spaces.get(tuple(root), ())

    def to_dict(self) -> dict:
        return {
            "model": self.model.descriptor(),
            "a_basis": [exact.matrix_to_strings(H) for H in self.a_basis],
            "roots": [
                {
                    "root": [exact.fmt(x) for x in lam],
                    "multiplicity": self.multiplicity(lam),
                    "basis": [exact.matrix_to_strings(X) for X in self.root_spaces[lam]],
                }
                for lam in self.roots
            ],
            "zero_space": [exact.matrix_to_strings(X) for X in self.zero_space],
        }


def _rational_eigenvalues(R: list[list[Fraction]]) -> list[Fraction]:
    F = np.array([[float(x) for x in row] for row in R])
    vals = np.linalg.eigvals(F) if F.size else np.array([])
    out = set()
    for v in vals:
        if abs(v.imag) > 1e-8:
            raise UnsupportedModelError(f"non-real eigenvalue {v} of ad(H)")
        out.add(Fraction(float(v.real)).limit_denominator(10**6))
    return sorted(out)


def decompose(model: MatrixModel, a_basis) -> RootSpaceDecomposition:
    """Simultaneous exact eigenspace decomposition of ad(H_1), ..., ad(H_r)."""
    a_basis = tuple(a_basis)
    for H in a_basis:
        if not exact.Echelon(model.p_basis).contains(H):
            raise ArgumentError("a_basis element is not in p")
        for H2 in a_basis:
            if any(bracket(H, H2).ravel()):
                raise ArgumentError("a_basis is not abelian")
    dim = model.ambient_dim
    # ad matrices: column j holds the coordinates of [H, b_j]
    ads = []
    for H in a_basis:
        cols = [model.coords(bracket(H, b)) for b in model.basis]
        ads.append(cols)

    def apply(cols, w):
        out = [Fraction(0)] * dim
        for j, wj in enumerate(w):
            if wj:
                for i, x in enumerate(cols[j]):
                    if x:
                        out[i] += wj * x
        return out

    identity = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    spaces: list[tuple[tuple, list]] = [((), identity)]
    for cols in ads:
        refined = []
        for lam, W in spaces:
            ech = exact.Echelon([{i: x for i, x in enumerate(w) if x} for w in W], track=True)
            images = [ech.coords({i: x for i, x in enumerate(apply(cols, w)) if x}) for w in W]
            if any(c is None for c in images):
                raise InternalError("joint eigenspace is not ad(a)-invariant")
            k = len(W)
            R = [[images[j][i] for j in range(k)] for i in range(k)]
            found = 0
            for ev in _rational_eigenvalues(R):
                shifted = [[R[i][j] - (ev if i == j else 0) for j in range(k)] for i in range(k)]
                K = exact.nullspace(shifted, k)
                if not K:
                    continue
                found += len(K)
                newW = [[sum((kv[j] * W[j][i] for j in range(k) if kv[j]), Fraction(0)) for i in range(dim)] for kv in K]
                refined.append((lam + (ev,), newW))
            if found != k:
                raise UnsupportedModelError("ad(a) has irrational or non-semisimple spectrum on this model")
        spaces = refined

    root_spaces: dict = {}
    zero: tuple = ()
    for lam, W in spaces:
        mats = tuple(exact.combine(w, model.basis) for w in W)
        if all(x == 0 for x in lam):
            zero = mats
        else:
            root_spaces[lam] = mats
    roots = tuple(sorted(root_spaces, reverse=True))
    return RootSpaceDecomposition(model, a_basis, roots, {r: root_spaces[r] for r in roots}, zero)


@dataclass(frozen=True, eq=False)
class PositiveSystem:
    positive_roots: tuple
    simple_roots: tuple
    regular_functional: tuple
    simple_coords: dict

    @property
    def rank(self) -> int:
        return len(self.simple_roots)

    def height(self, root: Root) -> int:
        if root in self.simple_coords:
            return sum(self.simple_coords[root])
        neg = tuple(-x for x in root)
        return -sum(self.simple_coords[neg])

    def is_positive(self, root: Root) -> bool:
        return tuple(root) in self.simple_coords

    def to_dict(self) -> dict:
        return {
            "regular_functional": [exact.fmt(x) for x in self.regular_functional],
            "simple_roots": [[exact.fmt(x) for x in a] for a in self.simple_roots],
            "positive_roots": [
                {"root": [exact.fmt(x) for x in b], "simple_coords": list(self.simple_coords[b])}
                for b in self.positive_roots
            ],
        }


def _pair(f, lam) -> Fraction:
    return sum((Q(a) * b for a, b in zip(f, lam)), Fraction(0))


def regular_functional(dec: RootSpaceDecomposition, max_tries: int = 64) -> tuple:
    r = dec.rank
    top = max((abs(x) for lam in dec.roots for x in lam), default=Fraction(0))
    N = 1 + math.ceil(top)
    for _ in range(max_tries):
        f = tuple(Fraction(N ** (r - 1 - k)) for k in range(r))
        if all(_pair(f, lam) != 0 for lam in dec.roots):
            return f
        N += 1
    raise InternalError("no regular functional found in the fallback sequence")


def positive_system(dec: RootSpaceDecomposition) -> PositiveSystem:
    f = regular_functional(dec)
    positive = [lam for lam in dec.roots if _pair(f, lam) > 0]
    pos_set = set(positive)
    sums = {tuple(a + b for a, b in zip(x, y)) for x in positive for y in positive}
    simple = sorted((lam for lam in positive if lam not in sums), reverse=True)
    if len(simple) != dec.rank:
        raise InternalError(f"found {len(simple)} simple roots for rank {dec.rank}")
    # coordinates over the simple roots: solve the r x r system exactly
    cols = [[simple[j][i] for j in range(len(simple))] for i in range(dec.rank)]
    coords = {}
    for lam in positive:
        c = exact.solve_gram(cols, list(lam))
        if any(x.denominator != 1 or x < 0 for x in c):
            raise InternalError(f"positive root {lam} is not a nonnegative integer combination of simple roots")
        coords[lam] = tuple(int(x) for x in c)
    ordered = tuple(sorted(positive, key=lambda lam: (sum(coords[lam]), tuple(-x for x in lam))))
    assert pos_set == set(ordered)
    return PositiveSystem(ordered, tuple(simple), f, coords)


def phi_indices(ps: PositiveSystem, Phi: Iterable) -> tuple[int, ...]:
    """Normalise Phi (1-based indices or simple-root tuples) to sorted indices."""
    out = set()
    for item in Phi:
        if isinstance(item, (int, np.integer)) and not isinstance(item, bool):
            if not 1 <= item <= ps.rank:
                raise ArgumentError(f"simple root index {item} outside 1..{ps.rank}")
            out.add(int(item))
        else:
            t = tuple(Q(x) for x in item)
            if t not in ps.simple_roots:
                raise ArgumentError(f"{t} is not a simple root")
            out.add(ps.simple_roots.index(t) + 1)
    return tuple(sorted(out))


def root_subsystem(ps: PositiveSystem, dec: RootSpaceDecomposition, Phi) -> tuple[tuple, tuple]:
    """(Sigma_Phi, Sigma_Phi^+): roots lying in the rational span of Phi."""
    idx = phi_indices(ps, Phi)
    span = exact.Echelon([list(ps.simple_roots[i - 1]) for i in idx])
    sub = tuple(lam for lam in dec.roots if span.contains(list(lam)))
    sub_pos = tuple(lam for lam in ps.positive_roots if lam in set(sub))
    return sub, sub_pos


def proper_subsets(ps: PositiveSystem) -> list[tuple[int, ...]]:
    """All Phi strictly contained in the simple roots, smallest first."""
    r = ps.rank
    subs = []
    for mask in range(2 ** r):
        s = tuple(i + 1 for i in range(r) if mask >> i & 1)
        if len(s) < r:
            subs.append(s)
    return sorted(subs, key=lambda s: (len(s), s))
