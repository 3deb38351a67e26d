"""Deterministic test grids and brute-force oracles shared by several test modules."""
from __future__ import annotations

import itertools
import random
from collections import Counter
from fractions import Fraction

import numpy as np

from orbitcert import exact


def v_grid(rank: int, n_random: int = 20, seed: int = 7) -> list[list[list[Fraction]]]:
    """All coordinate subspaces of a (including 0 and a) plus random rational ones."""
    grid: list[list[list[Fraction]]] = []
    for k in range(rank + 1):
        for idx in itertools.combinations(range(rank), k):
            grid.append([[Fraction(int(i == j)) for j in range(rank)] for i in idx])
    rnd = random.Random(seed)
    for _ in range(n_random):
        dim = rnd.randint(1, rank)
        grid.append([[Fraction(rnd.randint(-5, 5), rnd.randint(1, 4)) for _ in range(rank)] for _ in range(dim)])
    return grid


def numeric_roots(model, a_basis) -> Counter:
    """Brute force: diagonalise ad of a generic element of a numerically and
    read each eigenvector's weight on every basis element of a."""
    F = model.float_basis.reshape(model.ambient_dim, -1).T

    def ad(H):
        Hf = exact.to_float(H)
        return np.array([np.linalg.lstsq(F, (Hf @ B - B @ Hf).ravel(), rcond=None)[0] for B in model.float_basis]).T

    ads = [ad(H) for H in a_basis]
    generic = sum(np.sqrt(k + 2.0) * A for k, A in enumerate(ads))
    w, V = np.linalg.eig(generic)
    if np.max(np.abs(w.imag)) > 1e-9:
        raise AssertionError("ad(H) has non-real spectrum")
    out = Counter()
    for i in range(V.shape[1]):
        v = V[:, i].real
        v /= np.linalg.norm(v)
        lam = tuple(round(float(v @ A @ v), 8) for A in ads)
        out[lam] += 1
    return out


def exact_root_counts(dec) -> Counter:
    counts = Counter({tuple(round(float(x), 8) for x in lam): dec.multiplicity(lam) for lam in dec.roots})
    counts[tuple(0.0 for _ in dec.a_basis)] = len(dec.zero_space)
    return counts
