"""Space construction, operator algebra, and state validation."""

import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ghzsim import (
    DensityMatrix,
    SparseOperator,
    StateVector,
    build_space,
    cavity_annihilation,
    commutator,
    embed_site_operator,
    expectation,
    ket_from_labels,
    named_states,
    projector,
    site_dyad,
    trace_out_cavity,
)

FULL = build_space(3, ("0", "1", "e", "r"), 1)
ZPUMP = build_space(3, ("0", "1", "e"), 1)
ATOMIC = build_space(3, ("0", "1", "r"))


class TestSpaceSpec:
    def test_dimensions(self):
        assert FULL.dim == 128
        assert build_space(1, ("0", "1")).dim == 2
        assert ATOMIC.dim == 27

    def test_rejects_empty_levels(self):
        with pytest.raises(ValueError):
            build_space(3, ())

    def test_rejects_bad_cutoff(self):
        with pytest.raises(ValueError):
            build_space(3, ("0", "1"), -1)

    def test_basis_ordering_atom_major_cavity_last(self):
        # |l1 l2 l3>|n> -> ((i1*L + i2)*L + i3)*(n_max+1) + n
        space = FULL
        assert space.basis_index(("0", "0", "0"), 0) == 0
        assert space.basis_index(("0", "0", "0"), 1) == 1
        assert space.basis_index(("0", "0", "1"), 0) == 2
        assert space.basis_index(("0", "1", "0"), 0) == 8
        assert space.basis_index(("1", "0", "0"), 0) == 32

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 1))
    def test_basis_index_bijection(self, i1, i2, i3, n):
        labels = tuple(FULL.atom_levels[i] for i in (i1, i2, i3))
        idx = FULL.basis_index(labels, n)
        assert idx == ((i1 * 4 + i2) * 4 + i3) * 2 + n

    def test_level_index_error(self):
        with pytest.raises(ValueError):
            ZPUMP.level_index("r")

    def test_photon_out_of_range(self):
        with pytest.raises(ValueError):
            FULL.basis_index(("0", "0", "0"), 2)


class TestEmbedding:
    def test_identity_embeds_to_identity(self):
        eye = embed_site_operator(FULL, 1, np.eye(4))
        assert (eye.matrix != sp.identity(128, format="csr")).nnz == 0

    def test_single_atom_embedding_is_the_operator(self):
        space = build_space(1, ("0", "1", "e"))
        op = np.arange(9.0).reshape(3, 3)
        assert np.array_equal(embed_site_operator(space, 0, op).toarray(), op)

    def test_defining_action(self):
        op = site_dyad(ZPUMP, 1, "0", "e")
        src = ket_from_labels(ZPUMP, ("0", "e", "0"))
        dst = ket_from_labels(ZPUMP, ("0", "0", "0"))
        assert np.allclose(op.matrix @ src.data, dst.data)

    def test_site_out_of_range(self):
        with pytest.raises(ValueError):
            embed_site_operator(FULL, 3, np.eye(4))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            embed_site_operator(FULL, 0, np.eye(3))

    def test_homomorphism_same_site(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        ea = embed_site_operator(ZPUMP, 2, a)
        eb = embed_site_operator(ZPUMP, 2, b)
        eab = embed_site_operator(ZPUMP, 2, a @ b)
        assert np.allclose((ea @ eb).toarray(), eab.toarray(), atol=1e-13)

    def test_disjoint_sites_commute(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        ea = embed_site_operator(ZPUMP, 0, a)
        eb = embed_site_operator(ZPUMP, 2, b)
        assert np.allclose(commutator(ea, eb).toarray(), 0.0, atol=1e-13)

    def test_embedding_respects_cavity_factor(self):
        op = site_dyad(FULL, 0, "e", "1")
        src = ket_from_labels(FULL, ("1", "0", "0"), photon=1)
        dst = ket_from_labels(FULL, ("e", "0", "0"), photon=1)
        assert np.allclose(op.matrix @ src.data, dst.data)


class TestCavityOperators:
    def test_annihilation_action(self):
        space = build_space(1, ("0", "1"), 2)
        a = cavity_annihilation(space).matrix
        ket0 = ket_from_labels(space, ("0",), photon=0).data
        ket1 = ket_from_labels(space, ("0",), photon=1).data
        ket2 = ket_from_labels(space, ("0",), photon=2).data
        assert np.allclose(a @ ket0, 0.0)
        assert np.allclose(a @ ket1, ket0)
        assert np.allclose(a @ ket2, np.sqrt(2.0) * ket1)

    def test_number_operator(self):
        a = cavity_annihilation(FULL)
        n_op = a.dagger() @ a
        ket1 = ket_from_labels(FULL, ("0", "0", "0"), photon=1)
        assert expectation(n_op, ket1) == pytest.approx(1.0)

    def test_commutator_below_truncation(self):
        space = build_space(1, ("0",), 3)
        a = cavity_annihilation(space)
        comm = commutator(a, a.dagger()).toarray()
        # truncation corrupts only the top Fock level
        assert np.allclose(comm[:3, :3], np.eye(3))
        assert comm[3, 3] == pytest.approx(-3.0)

    def test_requires_cavity(self):
        with pytest.raises(ValueError):
            cavity_annihilation(ATOMIC)


class TestOperatorAlgebra:
    def test_commutator_with_self_vanishes(self, rng):
        m = rng.normal(size=(27, 27))
        op = SparseOperator(ATOMIC, sp.csr_matrix(m))
        assert commutator(op, op).nnz == 0

    def test_double_dagger(self, rng):
        m = rng.normal(size=(27, 27)) + 1j * rng.normal(size=(27, 27))
        op = SparseOperator(ATOMIC, sp.csr_matrix(m))
        assert np.allclose(op.dagger().dagger().toarray(), op.toarray())

    def test_dyad_product(self):
        space = build_space(1, ("0", "1", "e"))
        lhs = site_dyad(space, 0, "0", "e") @ site_dyad(space, 0, "e", "1")
        rhs = site_dyad(space, 0, "0", "1")
        assert np.allclose(lhs.toarray(), rhs.toarray())

    def test_dyad_dagger(self):
        op = site_dyad(ZPUMP, 0, "e", "1")
        assert np.allclose(op.dagger().toarray(), site_dyad(ZPUMP, 0, "1", "e").toarray())

    def test_space_mismatch_rejected(self):
        a = SparseOperator.identity(ATOMIC)
        b = SparseOperator.identity(ZPUMP)
        with pytest.raises(ValueError):
            _ = a + b

    def test_hermitian_hint_checked(self):
        m = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(ValueError):
            SparseOperator(build_space(1, ("0", "1")), m, hermitian_hint=True)

    def test_from_entries_sums_duplicates(self):
        space = build_space(1, ("0", "1"))
        op = SparseOperator.from_entries(space, [0, 0], [1, 1], [1.0, 2.0])
        assert op.toarray()[0, 1] == pytest.approx(3.0)

    def test_entry_bounds_checked(self):
        space = build_space(1, ("0", "1"))
        with pytest.raises(ValueError):
            SparseOperator.from_entries(space, [2], [0], [1.0])


class TestStates:
    def test_state_norm_enforced(self):
        with pytest.raises(ValueError):
            StateVector(ATOMIC, np.ones(27))

    def test_unnormalized_flag(self):
        v = StateVector(ATOMIC, np.ones(27), normalized=False)
        assert v.data.shape == (27,)

    def test_density_trace_enforced(self):
        with pytest.raises(ValueError):
            DensityMatrix(ATOMIC, np.eye(27))

    def test_density_hermiticity_enforced(self):
        m = np.zeros((27, 27), dtype=complex)
        m[0, 0] = 1.0
        m[0, 1] = 1e-6
        with pytest.raises(ValueError):
            DensityMatrix(ATOMIC, m)

    def test_expectation_examples(self):
        ket = ket_from_labels(FULL, ("0", "0", "0"), photon=0)
        assert expectation(projector(ket), ket) == pytest.approx(1.0)
        rho = ket.to_density_matrix()
        assert expectation(SparseOperator.identity(FULL), rho) == pytest.approx(1.0)

    def test_parity_eigenstate(self):
        space = build_space(3, ("0", "1"))
        ghzm = named_states(space)["GHZ-"]
        x01 = np.array([[0.0, 1.0], [1.0, 0.0]])
        par = embed_site_operator(space, 0, x01)
        for i in (1, 2):
            par = par @ embed_site_operator(space, i, x01)
        assert expectation(par, ghzm) == pytest.approx(-1.0)

    def test_trace_out_cavity_matches_manual(self, rng):
        v = rng.normal(size=54) + 1j * rng.normal(size=54)
        v /= np.linalg.norm(v)
        rho = StateVector(ZPUMP, v).to_density_matrix()
        reduced = trace_out_cavity(rho)
        manual = rho.data.reshape(27, 2, 27, 2).trace(axis1=1, axis2=3)
        assert np.allclose(reduced.data, manual)
        assert reduced.space == ZPUMP.without_cavity()


@settings(max_examples=30)
@given(
    n_atoms=st.integers(1, 3),
    n_levels=st.integers(1, 4),
    cutoff=st.one_of(st.none(), st.integers(0, 3)),
)
def test_dimension_formula(n_atoms, n_levels, cutoff):
    levels = tuple(str(k) for k in range(n_levels))
    space = build_space(n_atoms, levels, cutoff)
    expected = n_levels**n_atoms * (1 if cutoff is None else cutoff + 1)
    assert space.dim == expected
