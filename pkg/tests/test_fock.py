import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrnet import (DensityMatrix, PureState, annihilation_op, creation_op,
                     enumerate_basis, hop_op, number_op, partial_trace,
                     partial_transpose)
from kerrnet.errors import BasisMismatchError, CapacityError
from kerrnet.fock import (embed_state, full_grid_basis, identity_op,
                          project_state, transfer_state)


class TestEnumeration:
    def test_exact_sector_count(self, basis36):
        # 6 distributions of 2 photons over 3 cavities, squared across species
        assert basis36.dim == 36

    def test_single_site_count(self):
        b = enumerate_basis(1, 1, 2)
        assert b.dim == 3
        assert b.states == ((0,), (1,), (2,))

    def test_loss_closed_count(self, basis100):
        # (1 + 3 + 6)^2 states with totals 0, 1, 2 per species
        assert basis100.dim == 100

    def test_lexicographic_order(self, basis100):
        assert list(basis100.states) == sorted(basis100.states)

    def test_bijection(self, basis36):
        for i, occ in enumerate(basis36.states):
            assert basis36.index[occ] == i

    def test_species_constraints_hold(self, basis100):
        for occ in basis100.states:
            assert sum(occ[:3]) <= 2 and sum(occ[3:]) <= 2
            assert max(occ) <= 2

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            enumerate_basis(8, 2, 3)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            enumerate_basis(0, 1, 2)
        with pytest.raises(ValueError):
            enumerate_basis(2, 2, 2, species_total=1, species_cap=1)

    @given(n_cav=st.integers(1, 3), n_max=st.integers(1, 3),
           data=st.data())
    @settings(max_examples=30, deadline=None)
    def test_index_round_trip(self, n_cav, n_max, data):
        basis = enumerate_basis(n_cav, 2, n_max)
        occ = tuple(data.draw(st.integers(0, n_max))
                    for _ in range(basis.n_site_modes))
        i = basis.index[occ]
        assert basis.states[i] == occ


class TestLadderOperators:
    def test_annihilation_matrix_element(self):
        b = enumerate_basis(1, 1, 2)
        a = annihilation_op(b, 0, 0)
        v = np.zeros(3)
        v[2] = 1.0
        out = a.apply(v)
        assert abs(out[1] - np.sqrt(2)) < 1e-14
        vac = a.apply(np.array([1.0, 0, 0]))
        assert np.linalg.norm(vac) == 0

    def test_number_from_composition(self):
        b = enumerate_basis(2, 2, 2, species_cap=2)
        num = creation_op(b, 1, 0) @ annihilation_op(b, 1, 0)
        assert np.allclose(num.to_dense(), number_op(b, 1, 0).to_dense())

    def test_ladder_consistency_below_cutoff(self):
        b = enumerate_basis(1, 1, 3)
        comp = creation_op(b, 0, 0) @ annihilation_op(b, 0, 0)
        n = number_op(b, 0, 0)
        for occ in range(3):  # below cutoff
            i = b.index[(occ,)]
            assert comp.to_dense()[i, i] == pytest.approx(n.to_dense()[i, i].real)

    def test_out_of_range_site(self, basis36):
        with pytest.raises(IndexError):
            annihilation_op(basis36, 5, 0)

    def test_composition_vanishes_on_exact_sector(self, basis36):
        # single-site ladder ops leave the fixed-total sector: composing them
        # gives zero, which is why hops are built directly
        comp = creation_op(basis36, 0, 0) @ annihilation_op(basis36, 0, 0)
        assert comp.matrix.nnz == 0

    def test_direct_hop_on_exact_sector(self, basis36):
        t = hop_op(basis36, 0, 0, 1)  # a_0^dag a_1
        src = basis36.index[(1, 1, 0, 1, 1, 0)]
        dst = basis36.index[(2, 0, 0, 1, 1, 0)]
        assert t.to_dense()[dst, src] == pytest.approx(np.sqrt(2))


class TestOperatorAlgebra:
    def test_adjoint_involution(self, basis36, rng):
        t = hop_op(basis36, 0, 0, 1) + 2j * hop_op(basis36, 1, 1, 2)
        assert np.allclose(t.adjoint().adjoint().to_dense(), t.to_dense())

    def test_apply_identity(self, basis36, mes36):
        out = identity_op(basis36).apply(mes36)
        assert np.allclose(out.amplitudes, mes36.amplitudes)

    def test_basis_mismatch(self, basis36, basis100):
        with pytest.raises(BasisMismatchError):
            identity_op(basis36) + identity_op(basis100)

    def test_entries_round_trip(self, basis36):
        op = hop_op(basis36, 0, 0, 1)
        rebuilt = np.zeros((36, 36), complex)
        for r, c, v in op.entries():
            rebuilt[r, c] = v
        assert np.allclose(rebuilt, op.to_dense())


class TestStates:
    def test_norm_enforced(self, basis36):
        with pytest.raises(ValueError):
            PureState(basis36, np.ones(36))
        PureState(basis36, np.ones(36), unnormalized=True)  # allowed

    def test_density_invariants_enforced(self, basis36):
        bad = np.eye(36, dtype=complex)
        with pytest.raises(ValueError):
            DensityMatrix(basis36, bad)  # trace far from one
        bad = np.zeros((36, 36), complex)
        bad[0, 0] = 1.0
        bad[0, 1] = 1e-3
        with pytest.raises(ValueError):
            DensityMatrix(basis36, bad)  # not Hermitian

    def test_embed_project_round_trip(self, basis36, mes36):
        grid = embed_state(mes36)
        assert grid.basis.dim == 729
        back = project_state(grid, basis36)
        assert np.allclose(back.amplitudes, mes36.amplitudes)

    def test_transfer_round_trip(self, basis36, basis100, mes36):
        over = transfer_state(mes36, basis100)
        back = transfer_state(over, basis36)
        assert np.allclose(back.amplitudes, mes36.amplitudes)

    def test_transfer_rejects_lost_weight(self, basis36, basis100):
        v = np.zeros(100)
        v[basis100.index[(0,) * 6]] = 1.0  # vacuum absent from the exact sector
        with pytest.raises(BasisMismatchError):
            transfer_state(PureState(basis100, v), basis36)


class TestPartialTrace:
    def test_product_state_factor(self, rng):
        b = enumerate_basis(2, 1, 2)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        w /= np.linalg.norm(w)
        psi = PureState(b, np.kron(v, w))
        red = partial_trace(psi, [1])
        assert np.allclose(red.matrix, np.outer(w, w.conj()), atol=1e-12)

    def test_mes_reduction_maximally_mixed(self, mes36):
        red = partial_trace(mes36, [0, 1, 2])  # keep species a
        ev = np.linalg.eigvalsh(red.matrix)
        nonzero = ev[ev > 1e-12]
        assert len(nonzero) == 6
        assert np.allclose(nonzero, 1 / 6, atol=1e-12)

    def test_trace_preserved(self, basis100, rng):
        v = rng.normal(size=100) + 1j * rng.normal(size=100)
        psi = PureState(basis100, v / np.linalg.norm(v))
        for keep in ([0], [1, 4], [0, 2, 3, 5]):
            red = partial_trace(psi, keep)
            assert abs(red.trace() - 1.0) < 1e-10

    def test_keep_everything_reexpresses_on_grid(self, mes36):
        red = partial_trace(mes36, range(6))
        grid = embed_state(mes36)
        assert np.allclose(red.matrix, np.outer(grid.amplitudes,
                                                grid.amplitudes.conj()))

    def test_empty_keep_rejected(self, mes36):
        with pytest.raises(ValueError):
            partial_trace(mes36, [])


class TestPartialTranspose:
    def test_product_state_stays_positive(self, rng):
        b = enumerate_basis(2, 1, 2)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        w = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        w /= np.linalg.norm(w)
        dm = PureState(b, np.kron(v, w)).to_density()
        pt = partial_transpose(dm, [0])
        assert np.linalg.eigvalsh(pt)[0] > -1e-12

    def test_double_application_is_identity(self, basis100, rng):
        v = rng.normal(size=100) + 1j * rng.normal(size=100)
        dm = PureState(basis100, v / np.linalg.norm(v)).to_density()
        from kerrnet.fock import embed_density
        grid = embed_density(dm)
        once = partial_transpose(dm, [0, 3])
        twice = partial_transpose(DensityMatrix(grid.basis, once), [0, 3])
        assert np.allclose(twice, grid.matrix)

    def test_hermiticity_and_trace_exact(self, mes36):
        pt = partial_transpose(mes36.to_density(), [3, 4, 5])
        assert np.array_equal(pt, pt.conj().T)
        assert abs(np.trace(pt).real - 1.0) < 1e-14

    def test_two_qutrit_bell_negative_eigenvalue(self):
        # (|00> + |11>)/sqrt(2): the transposed matrix has one eigenvalue -1/2
        b = enumerate_basis(2, 1, 2)
        v = np.zeros(9)
        v[b.index[(0, 0)]] = v[b.index[(1, 1)]] = 1 / np.sqrt(2)
        pt = partial_transpose(PureState(b, v).to_density(), [0])
        ev = np.linalg.eigvalsh(pt)
        assert np.sum(ev < -1e-12) == 1
        assert ev[0] == pytest.approx(-0.5, abs=1e-12)

    def test_improper_subset_rejected(self, mes36):
        dm = mes36.to_density()
        with pytest.raises(ValueError):
            partial_transpose(dm, [])
        with pytest.raises(ValueError):
            partial_transpose(dm, range(6))


def test_full_grid_basis_idempotent(basis36):
    g = full_grid_basis(basis36)
    assert g.is_full_grid()
    assert full_grid_basis(g) is g
