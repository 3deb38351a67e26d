"""Exact rational linear algebra on matrices with ``Fraction`` entries.

Matrices are numpy object arrays of :class:`fractions.Fraction`.  Spans are
handled through sparse row vectors (``dict[int, Fraction]``) kept in fully
reduced echelon form, which keeps membership tests cheap for the very sparse
bases that matrix Lie algebras come with.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

ZERO = Fraction(0)
ONE = Fraction(1)


def Q(x) -> Fraction:
    """Coerce ints, strings such as ``"3/4"`` and fractions to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def qarray(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, val in np.ndenumerate(arr):
        out[idx] = Q(val)
    return out


def qzeros(*shape: int) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def qeye(n: int) -> np.ndarray:
    out = qzeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def unit(n: int, i: int, j: int, value=1) -> np.ndarray:
    out = qzeros(n, n)
    out[i, j] = Q(value)
    return out


def is_exact(X) -> bool:
    return isinstance(X, np.ndarray) and X.dtype == object


def to_float(X) -> np.ndarray:
    if is_exact(X):
        return np.array(X.tolist(), dtype=float)
    return np.asarray(X, dtype=float)


def fmt(x: Fraction) -> str:
    x = Q(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def matrix_to_strings(X) -> list:
    return [[fmt(v) for v in row] for row in X.tolist()]


def strings_to_matrix(rows) -> np.ndarray:
    return qarray(rows)


def _rows(X) -> list:
    return [[(k, v) for k, v in enumerate(row) if v] for row in X.tolist()]


def matmul(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Exact product exploiting sparsity (Lie algebra bases are mostly zeros)."""
    rx, ry = _rows(X), _rows(Y)
    out = qzeros(X.shape[0], Y.shape[1])
    for i, row in enumerate(rx):
        acc: dict[int, Fraction] = {}
        for k, x in row:
            for j, y in ry[k]:
                acc[j] = acc.get(j, ZERO) + x * y
        for j, v in acc.items():
            out[i, j] = v
    return out


def commutator(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    rx, ry = _rows(X), _rows(Y)
    n = X.shape[0]
    out = qzeros(n, n)
    for sign, ra, rb in ((1, rx, ry), (-1, ry, rx)):
        for i, row in enumerate(ra):
            for k, x in row:
                for j, y in rb[k]:
                    out[i, j] += x * y if sign > 0 else -(x * y)
    return out


# -- sparse vectors ---------------------------------------------------------

def sparse(X) -> dict[int, Fraction]:
    """Flatten a matrix (or vector) into a sparse dict of its nonzero entries."""
    return {i: Q(v) for i, v in enumerate(np.asarray(X, dtype=object).ravel()) if v != 0}


def dense(v: dict[int, Fraction], width: int) -> list[Fraction]:
    out = [ZERO] * width
    for i, x in v.items():
        out[i] = x
    return out


def axpy(v: dict, c: Fraction, w: dict) -> None:
    """In place: v <- v - c * w."""
    for k, x in w.items():
        y = v.get(k, ZERO) - c * x
        if y:
            v[k] = y
        else:
            v.pop(k, None)


class Echelon:
    """Incrementally maintained reduced row echelon basis of a span.

    When ``track`` is set, each stored row also remembers which combination of
    the inserted vectors produced it, so :meth:`coords` can express a member of
    the span in terms of the original generators.
    """

    def __init__(self, vectors: Iterable = (), track: bool = False):
        self.track = track
        self.rows: dict[int, dict[int, Fraction]] = {}
        self.combos: dict[int, dict[int, Fraction]] = {}
        self.count = 0
        self.independent: list[bool] = []
        for v in vectors:
            self.add(v)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: dict, combo: dict | None):
        v = dict(v)
        for p, row in self.rows.items():
            c = v.get(p)
            if c:
                axpy(v, c, row)
                if combo is not None:
                    axpy(combo, c, self.combos[p])
        return v

    def reduce(self, v) -> dict[int, Fraction]:
        if not isinstance(v, dict):
            v = sparse(v)
        return self._reduce(v, None)

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def add(self, v) -> bool:
        if not isinstance(v, dict):
            v = sparse(v)
        idx = self.count
        self.count += 1
        combo = {idx: ONE} if self.track else None
        r = self._reduce(v, combo)
        if not r:
            self.independent.append(False)
            return False
        p = min(r)
        c = r[p]
        r = {k: x / c for k, x in r.items()}
        if combo is not None:
            combo = {k: x / c for k, x in combo.items()}
        for q, row in self.rows.items():
            d = row.get(p)
            if d:
                axpy(row, d, r)
                if self.track:
                    axpy(self.combos[q], d, combo)
        self.rows[p] = r
        if self.track:
            self.combos[p] = combo
        self.independent.append(True)
        return True

    def coords(self, v) -> list[Fraction] | None:
        """Coefficients of ``v`` over the inserted generators, or None if outside."""
        if not self.track:
            raise RuntimeError("Echelon built without tracking")
        if not isinstance(v, dict):
            v = sparse(v)
        acc: dict[int, Fraction] = {}
        rest = dict(v)
        for p, row in self.rows.items():
            c = rest.get(p)
            if c:
                axpy(rest, c, row)
                axpy(acc, -c, self.combos[p])
        if rest:
            return None
        return [acc.get(i, ZERO) for i in range(self.count)]


def rank(vectors: Iterable) -> int:
    return Echelon(vectors).rank


def independent_subset(vectors: Sequence) -> list[int]:
    ech = Echelon()
    return [i for i, v in enumerate(vectors) if ech.add(v)]


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Exact basis of ``{x : M x = 0}`` with ``M`` given as a list of rows."""
    m = [[Q(x) for x in row] for row in rows]
    for row in m:
        if len(row) != ncols:
            raise DimensionError(f"row of length {len(row)}, expected {ncols}")
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        x = [ZERO] * ncols
        x[fcol] = ONE
        for i, pc in enumerate(pivots):
            x[pc] = -m[i][fcol]
        basis.append(x)
    return basis


def solve_gram(gram: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve a nonsingular square rational system by Gauss-Jordan elimination."""
    n = len(gram)
    aug = [[Q(x) for x in row] + [Q(b)] for row, b in zip(gram, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        aug[c], aug[piv] = aug[piv], aug[c]
        lead = aug[c][c]
        aug[c] = [x / lead for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return [aug[i][n] for i in range(n)]


def combine(coeffs: Sequence, mats: Sequence[np.ndarray]) -> np.ndarray:
    out = qzeros(*mats[0].shape)
    for c, M in zip(coeffs, mats):
        c = Q(c)
        if c:
            out = out + c * M
    return out
