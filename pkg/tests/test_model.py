import numpy as np
import pytest

from kerrnet import (NetworkParams, NoiseSpec, build_h_hop, build_h_int,
                     build_hamiltonian, enumerate_basis, jump_operators,
                     mes_state, verify_mes_conditions)
from kerrnet.model import mes_occupations, mes_phase, phase_flip_op


class TestInteraction:
    def test_explicit_diagonal_value(self, basis100):
        # k(4 + 1 + 1) for the squares, -2k * 2 for the cross term -> 2k
        k = 0.7
        params = NetworkParams.balanced(k)
        h = build_h_int(params, basis100)
        i = basis100.index[(2, 0, 0, 1, 1, 0)]
        assert h.to_dense()[i, i].real == pytest.approx(2 * k, abs=1e-12)

    def test_paired_states_at_zero(self, basis36):
        params = NetworkParams.balanced(1.3)
        h = build_h_int(params, basis36).to_dense()
        for v in mes_occupations(3, 2, 2):
            i = basis36.index[v + v]
            assert abs(h[i, i]) < 1e-12

    def test_vacuum_zero(self, basis100):
        h = build_h_int(NetworkParams.balanced(1.0), basis100).to_dense()
        i = basis100.index[(0,) * 6]
        assert h[i, i] == 0

    def test_diagonal_matches_closed_form(self, basis100, rng):
        ka, kb, kint = rng.normal(size=3)
        params = NetworkParams(k_a=ka, k_b=kb, k_int=kint)
        h = np.real(np.diag(build_h_int(params, basis100).to_dense()))
        for i, occ in enumerate(basis100.states):
            expected = sum(ka * occ[c] ** 2 + kb * occ[3 + c] ** 2
                           + kint * occ[c] * occ[3 + c] for c in range(3))
            assert h[i] == pytest.approx(expected, abs=1e-12)


class TestHopping:
    def test_single_matrix_element(self, basis100):
        phi = 0.31
        params = NetworkParams(j=2.5, phi_a=phi, phi_b=0.0)
        h = build_h_hop(params, basis100).to_dense()
        row = basis100.index[(1, 1, 0, 0, 0, 0)]
        col = basis100.index[(2, 0, 0, 0, 0, 0)]
        assert h[row, col] == pytest.approx(np.sqrt(2) * 2.5 * np.exp(-1j * phi))

    def test_hermitian(self, basis36, ring_params):
        h = build_h_hop(ring_params, basis36, 0.7, 1.9)
        assert h.is_hermitian()

    def test_periodic_adds_closing_bond(self, basis36):
        h_open = build_h_hop(NetworkParams(), basis36).matrix
        h_ring = build_h_hop(NetworkParams(topology="periodic"), basis36).matrix
        assert (h_ring - h_open).count_nonzero() > 0

    def test_annihilates_mes_at_condition(self, basis36, mes36):
        for topology in ("open", "periodic"):
            params = NetworkParams(topology=topology)
            h = build_h_hop(params, basis36, np.pi / 2, np.pi / 2)
            assert np.linalg.norm(h.apply(mes36).amplitudes) < 1e-12

    def test_hamiltonian_additivity(self, basis36, ring_params):
        total = build_hamiltonian(ring_params, 0.4, 0.4, basis=basis36)
        parts = (build_h_int(ring_params, basis36)
                 + build_h_hop(ring_params, basis36, 0.4, 0.4))
        assert np.allclose(total.to_dense(), parts.to_dense())


class TestMesState:
    def test_six_equal_amplitudes(self, mes36):
        nz = mes36.amplitudes[np.abs(mes36.amplitudes) > 1e-14]
        assert len(nz) == 6
        assert np.allclose(nz, 1 / np.sqrt(6), atol=1e-12)

    def test_normalized(self, mes36):
        assert mes36.norm() == pytest.approx(1.0, abs=1e-12)

    def test_amplitude_moduli(self, basis36):
        for m in (1, 2, 4):
            psi = mes_state(basis36, m=m)
            nz = np.abs(psi.amplitudes[np.abs(psi.amplitudes) > 1e-14])
            assert np.allclose(nz, 1 / np.sqrt(6), atol=1e-12)

    def test_missing_pairs_rejected(self):
        basis = enumerate_basis(3, 2, 2, species_total=1)
        with pytest.raises(ValueError):
            mes_state(basis, total=2)

    def test_phase_condition_value(self):
        assert mes_phase(3, 3) == pytest.approx(np.pi / 2)
        assert 2 * mes_phase(2, 3) == pytest.approx((2 * 2 - 3) * np.pi / 3)


class TestMesConditions:
    def test_all_residuals_vanish(self):
        for topology in ("open", "periodic"):
            params = NetworkParams.balanced(0.8, topology=topology,
                                            phi_a=np.pi / 2, phi_b=np.pi / 2)
            res = verify_mes_conditions(params, m=3)
            assert res["hop_residual"] < 1e-12
            assert res["int_residual"] < 1e-12
            assert res["total_residual"] < 1e-12

    def test_wrong_phase_leaves_hop_energy(self):
        params = NetworkParams.balanced(1.0)  # phi_a = phi_b = 0
        assert verify_mes_conditions(params)["hop_residual"] > 0.1

    def test_unbalanced_kerr_leaves_interaction_energy(self):
        params = NetworkParams(k_a=1.0, k_b=1.0, k_int=-1.0,
                               phi_a=np.pi / 2, phi_b=np.pi / 2)
        assert verify_mes_conditions(params)["int_residual"] > 0.1


class TestJumpOperators:
    def test_counts(self, basis100):
        single = jump_operators(NoiseSpec("single_mode_loss", 0.1, 0.2), basis100)
        assert len(single) == 6
        coupled = jump_operators(NoiseSpec("coupled_two_mode_loss", gamma=0.3), basis100)
        assert len(coupled) == 3
        assert jump_operators(NoiseSpec("none"), basis100) == []

    def test_rates_attached(self, basis100):
        ops = jump_operators(NoiseSpec("single_mode_loss", 0.1, 0.2), basis100)
        assert [r for _, r in ops] == [0.1] * 3 + [0.2] * 3

    def test_phase_flip_local_action(self):
        basis = enumerate_basis(1, 1, 2)
        sigma = phase_flip_op(basis, 0, 0, np.pi).to_dense()
        assert np.allclose(np.diag(sigma), [1, -1, -1])

    def test_phase_flip_unitary(self, basis36):
        for op, _ in jump_operators(NoiseSpec("phase_flip_single", 1.0, 1.0), basis36):
            prod = (op.adjoint() @ op).to_dense()
            assert np.allclose(prod, np.eye(36), atol=1e-14)

    def test_coupled_phase_flip_fixes_mes(self, basis36, mes36):
        ops = jump_operators(NoiseSpec("phase_flip_coupled", gamma=1.0), basis36)
        assert len(ops) == 3
        for op, _ in ops:
            out = op.apply(mes36)
            assert np.linalg.norm(out.amplitudes - mes36.amplitudes) < 1e-12

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec("amplitude_damping")

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            NoiseSpec("single_mode_loss", gamma_a=-0.1)


class TestParams:
    def test_balanced_constructor(self):
        p = NetworkParams.balanced(0.25)
        assert (p.k_a, p.k_b, p.k_int) == (0.25, 0.25, -0.5)

    def test_validation(self):
        with pytest.raises(ValueError):
            NetworkParams(n_cavities=1)
        with pytest.raises(ValueError):
            NetworkParams(topology="ladder")

    def test_per_bond_strengths(self):
        p = NetworkParams(j=(1.0, 0.5), topology="open")
        assert p.bond_strengths() == [1.0, 0.5]
        with pytest.raises(ValueError):
            NetworkParams(j=(1.0,), topology="periodic").bond_strengths()

    def test_bases(self):
        p = NetworkParams()
        assert p.basis().dim == 36
        assert p.basis(loss_closed=True).dim == 100
