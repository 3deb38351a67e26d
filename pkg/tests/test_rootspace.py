from __future__ import annotations

from fractions import Fraction

import pytest

from _oracles import exact_root_counts, numeric_roots
from orbitcert import exact, rootspace as rs
from orbitcert.errors import ArgumentError, UnsupportedModelError
from orbitcert.models import bracket, make_model
from orbitcert.structure import cached_structure


def test_canonical_a_examples():
    assert len(rs.maximal_abelian(make_model("sl", 3))) == 2
    assert len(rs.maximal_abelian(make_model("so1n", 2))) == 1
    with pytest.raises(UnsupportedModelError):
        rs.maximal_abelian(make_model("hopf", 2))


def test_decomposition_matches_brute_force(structure):
    dec = structure.dec
    assert numeric_roots(structure.model, dec.a_basis) == exact_root_counts(dec)


def test_invariants_exact(structure):
    dec, m = structure.dec, structure.model
    assert len(dec.zero_space) + sum(dec.multiplicity(l) for l in dec.roots) == m.ambient_dim
    roots = set(dec.roots)
    assert {tuple(-x for x in l) for l in roots} == roots
    assert rs.centralizer_in_p_dim(m, dec.a_basis) == dec.rank
    for lam in dec.roots:
        neg = exact.Echelon(dec.space(tuple(-x for x in lam)))
        for X in dec.space(lam):
            for H, val in zip(dec.a_basis, lam):
                assert (bracket(H, X) == val * X).all()
            assert neg.contains(m.theta(X))


def test_bracket_grading(structure):
    dec = structure.dec
    spaces = [(tuple(Fraction(0) for _ in dec.a_basis), dec.zero_space)] + [(l, dec.space(l)) for l in dec.roots]
    for lam, A in spaces:
        for mu, B in spaces:
            target = tuple(a + b for a, b in zip(lam, mu))
            ech = exact.Echelon(dec.space(target))
            for X in A:
                for Y in B:
                    assert ech.contains(bracket(X, Y))


@pytest.mark.parametrize("n,count", [(2, 2), (3, 6), (4, 12), (5, 20)])
def test_sl_root_counts(n, count):
    dec = cached_structure("sl", n).dec
    assert len(dec.roots) == count
    assert all(dec.multiplicity(l) == 1 for l in dec.roots)
    assert len(dec.zero_space) == n - 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_so1n_multiplicity(n):
    st = cached_structure("so1n", n)
    assert len(st.dec.roots) == 2
    assert all(st.dec.multiplicity(l) == n - 1 for l in st.dec.roots)
    assert len(st.dec.zero_space) == 1 + (n - 1) * (n - 2) // 2
    assert len(st.ps.positive_roots) == 1 and st.ps.simple_roots == st.ps.positive_roots


def test_positive_system_invariants(structure):
    ps, dec = structure.ps, structure.dec
    pos = set(ps.positive_roots)
    neg = {tuple(-x for x in l) for l in pos}
    assert pos | neg == set(dec.roots) and not pos & neg
    assert ps.rank == dec.rank
    for beta in pos:
        c = ps.simple_coords[beta]
        assert all(isinstance(x, int) and x >= 0 for x in c)
        recon = tuple(sum(ci * a[k] for ci, a in zip(c, ps.simple_roots)) for k in range(dec.rank))
        assert recon == beta
    assert all(sum(f * x for f, x in zip(ps.regular_functional, l)) != 0 for l in dec.roots)


def test_sl3_positive_system():
    ps = cached_structure("sl", 3).ps
    a1, a2 = ps.simple_roots
    assert len(ps.positive_roots) == 3
    assert tuple(x + y for x, y in zip(a1, a2)) in set(ps.positive_roots) - set(ps.simple_roots)


def test_root_subsystems():
    st3 = cached_structure("sl", 3)
    assert rs.root_subsystem(st3.ps, st3.dec, []) == ((), ())
    a1 = st3.ps.simple_roots[0]
    sub, pos = rs.root_subsystem(st3.ps, st3.dec, [1])
    assert set(sub) == {a1, tuple(-x for x in a1)} and pos == (a1,)
    full, _ = rs.root_subsystem(st3.ps, st3.dec, [1, 2])
    assert set(full) == set(st3.dec.roots)
    st4 = cached_structure("sl", 4)
    _, pos = rs.root_subsystem(st4.ps, st4.dec, [1, 3])
    assert set(pos) == {st4.ps.simple_roots[0], st4.ps.simple_roots[2]}
    # a root tuple selects the same subsystem as its index
    assert rs.phi_indices(st4.ps, [st4.ps.simple_roots[1]]) == (2,)


def test_phi_errors():
    ps = cached_structure("sl", 3).ps
    with pytest.raises(ArgumentError):
        rs.phi_indices(ps, [3])
    with pytest.raises(ArgumentError):
        rs.phi_indices(ps, [(Fraction(5), Fraction(5))])


def test_proper_subset_count(structure):
    assert len(rs.proper_subsets(structure.ps)) == 2 ** structure.rank - 1


def test_decompose_deterministic_and_validates():
    m = make_model("sl", 3)
    d1 = rs.decompose(m, rs.maximal_abelian(m))
    d2 = rs.decompose(m, rs.maximal_abelian(m))
    assert d1.to_dict() == d2.to_dict()
    with pytest.raises(ArgumentError):
        rs.decompose(m, [exact.unit(3, 0, 1) - exact.unit(3, 1, 0)])
    P = m.p_basis
    nonabelian = [X for X in P if any(bracket(P[0], X).ravel())][:1]
    with pytest.raises(ArgumentError):
        rs.decompose(m, [P[0]] + nonabelian)


def test_sl_simple_roots_in_chain_order():
    # with the coweight basis the simple roots are the coordinate vectors e_k
    ps = cached_structure("sl", 4).ps
    assert [list(a) for a in ps.simple_roots] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
