from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from _oracles import v_grid
from orbitcert import exact, rootspace as rs
from orbitcert import subalgebra as sa
from orbitcert.errors import ArgumentError, NotClosedError, NotSubspaceError
from orbitcert.models import bracket, inner, make_model
from orbitcert.structure import cached_structure


def span_of(mats) -> exact.Echelon:
    return exact.Echelon(mats)


def test_iwasawa_dimensions(structure):
    dec, ps, n, s = structure.dec, structure.ps, structure.n, structure.s
    assert n.dim == sum(dec.multiplicity(l) for l in ps.positive_roots)
    assert s.dim == dec.rank + n.dim
    assert sa.is_nilpotent(n) and sa.is_solvable(s)
    assert n.is_closed and s.is_closed


def test_derived_algebra_of_s_is_n(structure):
    D = sa.derived(structure.s)
    assert len(D) == structure.n.dim
    assert all(structure.n.contains(X) for X in D)


def test_sl3_and_so1n_examples():
    st = cached_structure("sl", 3)
    assert (st.n.dim, st.s.dim) == (3, 5)
    for k in (2, 3, 4):
        n = cached_structure("so1n", k).n
        assert n.dim == k - 1
        assert all(not bracket(X, Y).any() for X in n.basis for Y in n.basis)


def test_full_sl2_is_not_solvable():
    assert not sa.is_solvable(sa.full_algebra(make_model("sl", 2)))


def test_every_s_phi_chain(structure):
    dec, ps, s = structure.dec, structure.ps, structure.s
    for phi in rs.proper_subsets(ps):
        q = sa.build_parabolic(dec, ps, phi)
        m_phi, a_phi, n_phi = sa.langlands(dec, ps, phi)
        s_phi = sa.build_s_Phi(dec, ps, phi)
        assert q.contains_span(s) and q.is_closed
        assert s.contains_span(s_phi) and sa.is_solvable(s_phi)
        assert a_phi.dim == dec.rank - len(phi)
        assert m_phi.dim + a_phi.dim + n_phi.dim == q.dim
        assert span_of(m_phi.basis + a_phi.basis + n_phi.basis).rank == q.dim
        assert sa.check_parabolic_ideal(s_phi, q).holds
        assert sa.is_ideal(s_phi, s).holds


def test_sl3_phi1_dimensions():
    st = cached_structure("sl", 3)
    q = sa.build_parabolic(st.dec, st.ps, [1])
    m_phi, a_phi, n_phi = sa.langlands(st.dec, st.ps, [1])
    assert q.dim == 6
    assert (m_phi.dim, a_phi.dim, n_phi.dim) == (3, 1, 2)
    assert sa.build_s_Phi(st.dec, st.ps, [1]).dim == 3


def test_phi_empty_boundary(structure):
    dec, ps = structure.dec, structure.ps
    m_phi, a_phi, n_phi = sa.langlands(dec, ps, [])
    assert a_phi.same_span(sa.a_subalgebra(dec)) and n_phi.same_span(structure.n)
    assert sa.build_s_Phi(dec, ps, []).same_span(structure.s)
    assert sa.build_parabolic(dec, ps, []).dim == len(dec.zero_space) + structure.n.dim


def test_phi_equal_to_lambda_rejected():
    st = cached_structure("sl", 3)
    for build in (sa.build_parabolic, sa.build_s_Phi, sa.langlands):
        with pytest.raises(ArgumentError):
            build(st.dec, st.ps, [1, 2])


def test_monotonicity():
    st = cached_structure("sl", 4)
    subsets = rs.proper_subsets(st.ps)
    built = {phi: sa.build_s_Phi(st.dec, st.ps, phi) for phi in subsets}
    for a in subsets:
        for b in subsets:
            if set(a) <= set(b):
                assert built[a].contains_span(built[b])


def test_s_v_grid_all_ideals(structure):
    s, dec = structure.s, structure.dec
    for V in v_grid(dec.rank):
        s_v = sa.build_s_V(s, dec.a_basis, V)
        assert s_v.dim == s.dim - exact.rank(V)
        assert sa.is_ideal(s_v, s).holds


def test_s_v_boundaries():
    st = cached_structure("sl", 3)
    a = st.dec.a_basis
    assert sa.build_s_V(st.s, a, []).same_span(st.s)
    assert sa.build_s_V(st.s, a, list(a)).same_span(st.n)
    assert sa.build_s_V(st.s, a, [[1, 1]]).dim == 4
    with pytest.raises(ArgumentError):
        sa.build_s_V(st.s, a, [st.n.basis[0]])
    with pytest.raises(ArgumentError):
        sa.build_s_V(st.s, a, [[1, 2, 3]])


def test_s_v_is_orthogonal_complement():
    st = cached_structure("sl", 4)
    V = [[Fraction(1), Fraction(-2), Fraction(1, 3)]]
    s_v = sa.build_s_V(st.s, st.dec.a_basis, V)
    v_mat = exact.combine(V[0], st.dec.a_basis)
    for X in s_v.basis:
        assert inner(st.model, X, v_mat) == 0


def test_ideal_positive_and_negative_controls(structure):
    s, n = structure.s, structure.n
    assert sa.is_ideal(n, s).holds
    a = sa.a_subalgebra(structure.dec)
    chk = sa.is_ideal(a, s)
    assert not chk.holds and chk.witness is not None
    X, Y = chk.witness_pair
    assert not a.contains(bracket(X, Y))
    assert chk.residual.any()
    assert json.dumps(chk.to_dict())


def test_sl2_a_witness_is_h_and_root_vector():
    st = cached_structure("sl", 2)
    chk = sa.is_ideal(sa.a_subalgebra(st.dec), st.s)
    X, Y = chk.witness_pair
    H = st.dec.a_basis[0]
    pair = {tuple(map(tuple, X.tolist())), tuple(map(tuple, Y.tolist()))}
    assert tuple(map(tuple, H.tolist())) in pair
    assert any(st.n.contains(Z) and Z.any() for Z in (X, Y))


def test_m_phi_negative_control():
    st = cached_structure("sl", 3)
    q = sa.build_parabolic(st.dec, st.ps, [1])
    m_phi, _, _ = sa.langlands(st.dec, st.ps, [1])
    chk = sa._scan(m_phi, q)
    assert not chk.holds and chk.witness_pair is not None


def test_relation_phi_mismatch():
    st = cached_structure("sl", 3)
    with pytest.raises(ArgumentError):
        sa.check_parabolic_ideal(sa.build_s_Phi(st.dec, st.ps, [1]), sa.build_parabolic(st.dec, st.ps, [2]))


def test_is_ideal_precondition_errors():
    st = cached_structure("sl", 3)
    full = sa.full_algebra(st.model)
    with pytest.raises(NotSubspaceError):
        sa.is_ideal(full, st.s)
    # a + one root vector and its negative: a subspace of g that is not closed
    X = st.n.basis[0]
    lonely = sa.custom(st.model, [X, st.model.theta(X)])
    with pytest.raises(NotClosedError):
        sa.is_ideal(lonely, full)


def test_hopf_centre_is_ideal():
    for n in (1, 2, 3):
        u1, u = sa.hopf_algebras(make_model("hopf", n))
        assert u1.dim == 1 and sa.is_ideal(u1, u).holds


def test_dependent_basis_rejected():
    m = make_model("sl", 2)
    with pytest.raises(ArgumentError):
        sa.custom(m, [m.basis[0], 2 * m.basis[0]])
    with pytest.raises(ArgumentError):
        sa.Subalgebra((m.basis[0],), "bogus", m)


def test_serialisation_roundtrip():
    st = cached_structure("sl", 4)
    for sub in (sa.build_s_Phi(st.dec, st.ps, [1, 3]), sa.build_s_V(st.s, st.dec.a_basis, [[1, "1/2", 0]])):
        text = json.dumps(sub.to_dict())
        back = sa.Subalgebra.from_dict(json.loads(text))
        assert back.same_span(sub) and back.tag == sub.tag and back.degrees == sub.degrees


def test_structure_constants_antisymmetric():
    st = cached_structure("sl", 3)
    C = st.s.structure_constants()
    d = st.s.dim
    for i in range(d):
        for j in range(d):
            assert C[i][j] == [-x for x in C[j][i]]
    recon = exact.combine(C[0][3], st.s.basis)
    assert (recon == bracket(st.s.basis[0], st.s.basis[3])).all()
    assert np.asarray(st.s.float_basis).shape == (5, 3, 3)
