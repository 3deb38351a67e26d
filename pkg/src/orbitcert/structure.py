"""One-call setup of the root data and Iwasawa subalgebras of a model."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .models import MatrixModel, make_model
from .rootspace import PositiveSystem, RootSpaceDecomposition, decompose, maximal_abelian, positive_system
from .subalgebra import Subalgebra, build_iwasawa


@dataclass(frozen=True, eq=False)
class SolvableStructure:
    model: MatrixModel
    dec: RootSpaceDecomposition
    ps: PositiveSystem
    n: Subalgebra
    s: Subalgebra

    @property
    def rank(self) -> int:
        return self.dec.rank


def solvable_structure(model: MatrixModel) -> SolvableStructure:
    dec = decompose(model, maximal_abelian(model))
    ps = positive_system(dec)
    n, s = build_iwasawa(dec, ps)
    return SolvableStructure(model, dec, ps, n, s)


@lru_cache(maxsize=None)
def cached_structure(name: str, n: int) -> SolvableStructure:
    """Memoised structure for a default-tolerance model (objects are immutable)."""
    return solvable_structure(make_model(name, n))
