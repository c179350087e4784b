import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qftcalc.psmpo import (
    PartialSumMatrix,
    apply_partial_sum,
    block_encode_dimension,
    build_block_encoding,
    householder_qr,
    load_block_encoding,
    onesided_jacobi_svd,
    save_block_encoding,
    spectral_norm,
)
from qftcalc.state import RegisterLayout, Statevector

from conftest import random_state_vector


def hermitian_embedding(N):
    sigma = PartialSumMatrix(N).dense()
    return np.block([[np.zeros((N, N)), sigma.T], [sigma, np.zeros((N, N))]])


def qfti_state(n_k, k_amplitudes, ancilla_bit=1):
    layout = RegisterLayout((("a", 1), ("b", 1), ("c", 1), ("k", n_k)))
    amps = np.zeros(1 << (n_k + 3), dtype=complex)
    base = layout.index_for({"a": ancilla_bit, "b": 0, "c": 0, "k": 0})
    amps[base : base + (1 << n_k)] = k_amplitudes
    return Statevector(n_k + 3, amps, layout), layout


class TestPartialSumMatrix:
    def test_unit_lower_triangular_entries(self):
        dense = PartialSumMatrix(5).dense()
        for r in range(5):
            for c in range(5):
                assert dense[r, c] == (1.0 if r >= c else 0.0)

    def test_matvec_is_cumsum(self, rng):
        v = rng.normal(size=8)
        m = PartialSumMatrix(8)
        assert_allclose(m.matvec(v), m.dense() @ v, atol=1e-12)
        assert_allclose(m.rmatvec(v), m.dense().T @ v, atol=1e-12)


class TestSpectralNorm:
    def test_dimension_one(self):
        assert spectral_norm(1) == 1.0

    def test_dimension_two_closed_form(self):
        assert_allclose(spectral_norm(2), (1.0 + math.sqrt(5.0)) / 2.0, atol=1e-12)

    @pytest.mark.parametrize("N", [4, 16, 64])
    def test_against_dense_svd(self, N):
        dense = PartialSumMatrix(N).dense()
        expected = np.linalg.svd(dense, compute_uv=False)[0]
        assert abs(spectral_norm(N) - expected) <= 1e-9


class TestJacobiSvd:
    @pytest.mark.parametrize("N", [2, 7, 32])
    def test_against_numpy(self, N, rng):
        a = rng.normal(size=(N, N))
        u, s, vt = onesided_jacobi_svd(a)
        assert_allclose(u @ np.diag(s) @ vt, a, atol=1e-11)
        assert np.max(np.abs(u.T @ u - np.eye(N))) <= 1e-12
        assert np.max(np.abs(vt @ vt.T - np.eye(N))) <= 1e-12
        assert_allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-10)
        assert np.all(np.diff(s) <= 1e-12)  # descending


class TestHouseholderQr:
    @pytest.mark.parametrize("shape", [(4, 4), (12, 5), (32, 16)])
    def test_factorization(self, shape, rng):
        a = rng.normal(size=shape)
        q, r = householder_qr(a)
        assert_allclose(q @ r, a, atol=1e-12)
        assert np.max(np.abs(q.T @ q - np.eye(shape[0]))) <= 1e-12
        assert np.all(np.diag(r)[: shape[1]] >= 0.0)
        assert_allclose(np.tril(r[: shape[1], : shape[1]], -1), 0.0, atol=1e-12)

    def test_orthonormal_input_reproduced_in_q(self, rng):
        w = np.linalg.qr(rng.normal(size=(16, 6)))[0]
        w *= np.where(rng.random(6) < 0.5, -1.0, 1.0)  # scramble column signs
        q, _ = householder_qr(w)
        assert_allclose(q[:, :6], w, atol=1e-12)


class TestBlockEncoding:
    def test_dimension_one_conceptual_case(self):
        # Sigma = [1]; H = [[0,1],[1,0]] is already unitary, eta = 1.
        unitary, eta = block_encode_dimension(1)
        assert_allclose(eta, 1.0, atol=1e-12)
        assert_allclose(unitary[:2, :2], np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-10)
        assert np.max(np.abs(unitary.T @ unitary - np.eye(4))) <= 1e-10

    def test_n2_eta_golden_ratio(self):
        enc = build_block_encoding(1)  # N = 2
        assert_allclose(enc.eta, (1.0 + math.sqrt(5.0)) / 2.0, atol=1e-10)

    @pytest.mark.parametrize("n_k", [1, 2, 3, 4, 5, 6])
    def test_validity_and_block_fidelity(self, n_k):
        enc = build_block_encoding(n_k)
        N = enc.dimension
        dim = 4 * N
        assert np.max(np.abs(enc.unitary.T @ enc.unitary - np.eye(dim))) <= 1e-10
        assert np.max(np.abs(enc.unitary[: 2 * N, : 2 * N] - hermitian_embedding(N) / enc.eta)) <= 1e-10
        expected_eta = np.linalg.svd(PartialSumMatrix(N).dense(), compute_uv=False)[0]
        assert abs(enc.eta - expected_eta) <= 1e-10

    @pytest.mark.parametrize("n_k", [2, 4])
    def test_completion_block_row_isometry(self, n_k):
        # The completed top-right block B of U_H satisfies B B^T = I - H H^T / eta^2.
        enc = build_block_encoding(n_k)
        N = enc.dimension
        h_scaled = hermitian_embedding(N) / enc.eta
        b_block = enc.unitary[: 2 * N, 2 * N :]
        assert np.max(np.abs(b_block @ b_block.T - (np.eye(2 * N) - h_scaled @ h_scaled.T))) <= 1e-9

    def test_success_prefix(self):
        assert build_block_encoding(2).success_prefix == (1, 0, 1)

    def test_rejects_out_of_budget(self):
        with pytest.raises(ValueError):
            build_block_encoding(0)
        with pytest.raises(ValueError):
            build_block_encoding(9)

    def test_unitary_is_frozen(self):
        enc = build_block_encoding(2)
        with pytest.raises(ValueError):
            enc.unitary[0, 0] = 5.0


class TestApplyPartialSum:
    def test_first_basis_vector_gives_all_ones_column(self):
        n_k = 3
        N = 1 << n_k
        enc = build_block_encoding(n_k)
        amplitudes = np.zeros(N)
        amplitudes[0] = 1.0
        state, layout = qfti_state(n_k, amplitudes)
        apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))
        pa, pb, pc = enc.success_prefix
        got = np.array(
            [state.amplitudes[layout.index_for({"a": pa, "b": pb, "c": pc, "k": j})] for j in range(N)]
        )
        assert_allclose(got, np.ones(N) / enc.eta, atol=1e-10)

    def test_uniform_input_gives_ramp(self):
        n_k = 3
        N = 1 << n_k
        enc = build_block_encoding(n_k)
        state, layout = qfti_state(n_k, np.full(N, 1.0 / math.sqrt(N)))
        apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))
        pa, pb, pc = enc.success_prefix
        got = np.array(
            [state.amplitudes[layout.index_for({"a": pa, "b": pb, "c": pc, "k": j})] for j in range(N)]
        )
        expected = np.cumsum(np.full(N, 1.0 / math.sqrt(N))) / enc.eta
        assert_allclose(got, expected, atol=1e-10)

    @pytest.mark.parametrize("basis", [1, 3, 6])
    def test_basis_vectors_reproduce_matrix_columns(self, basis):
        n_k = 3
        N = 1 << n_k
        enc = build_block_encoding(n_k)
        amplitudes = np.zeros(N)
        amplitudes[basis] = 1.0
        state, layout = qfti_state(n_k, amplitudes)
        apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))
        pa, pb, pc = enc.success_prefix
        got = np.array(
            [state.amplitudes[layout.index_for({"a": pa, "b": pb, "c": pc, "k": j})] for j in range(N)]
        )
        assert_allclose(got, PartialSumMatrix(N).dense()[:, basis] / enc.eta, atol=1e-10)

    def test_zero_controlled_branch_stays_zero(self, rng):
        # All amplitude on a=0 while the gate is controlled on a=1.
        n_k = 2
        enc = build_block_encoding(n_k)
        state, layout = qfti_state(n_k, random_state_vector(n_k, rng), ancilla_bit=0)
        before = state.amplitudes.copy()
        apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))
        assert np.array_equal(state.amplitudes, before)
        pa, pb, pc = enc.success_prefix
        success = [
            state.amplitudes[layout.index_for({"a": pa, "b": pb, "c": pc, "k": j})]
            for j in range(1 << n_k)
        ]
        assert np.max(np.abs(success)) == 0.0

    def test_success_probability_conservation(self, rng):
        n_k = 4
        N = 1 << n_k
        enc = build_block_encoding(n_k)
        amplitudes = random_state_vector(n_k, rng).real
        amplitudes /= np.linalg.norm(amplitudes)
        state, layout = qfti_state(n_k, amplitudes)
        apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))
        pa, pb, pc = enc.success_prefix
        got = np.array(
            [state.amplitudes[layout.index_for({"a": pa, "b": pb, "c": pc, "k": j})] for j in range(N)]
        )
        expected = np.linalg.norm(np.cumsum(amplitudes)) ** 2 / enc.eta**2
        assert abs(np.sum(np.abs(got) ** 2) - expected) <= 1e-10

    def test_rejects_occupied_bc_registers(self, rng):
        n_k = 2
        enc = build_block_encoding(n_k)
        layout = RegisterLayout((("a", 1), ("b", 1), ("c", 1), ("k", n_k)))
        amps = np.zeros(1 << (n_k + 3), dtype=complex)
        amps[layout.index_for({"a": 1, "b": 1, "c": 0, "k": 0})] = 1.0
        state = Statevector(n_k + 3, amps, layout)
        with pytest.raises(ValueError, match="b/c"):
            apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))

    def test_rejects_width_mismatch(self, rng):
        enc = build_block_encoding(3)
        state, layout = qfti_state(2, random_state_vector(2, rng))
        with pytest.raises(ValueError, match="k register"):
            apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 1))

    def test_rejects_polarity_mismatch(self, rng):
        enc = build_block_encoding(2)
        state, layout = qfti_state(2, random_state_vector(2, rng))
        with pytest.raises(ValueError, match="polarity"):
            apply_partial_sum(state, enc, control=(layout.qubits("a")[0], 0))


class TestCache:
    def test_roundtrip(self, tmp_path):
        enc = build_block_encoding(2)
        path = tmp_path / "enc.bin"
        save_block_encoding(enc, path)
        loaded = load_block_encoding(path)
        assert loaded.n_k == enc.n_k
        assert loaded.eta == enc.eta
        assert loaded.success_prefix == enc.success_prefix
        assert np.array_equal(loaded.unitary, enc.unitary)

    def test_build_uses_disk_cache(self, tmp_path):
        import qftcalc.psmpo as psmpo_module

        enc = build_block_encoding(2)
        save_block_encoding(enc, tmp_path / "psmpo_n2.bin")
        psmpo_module._memo.pop(2, None)
        loaded = build_block_encoding(2, cache_dir=tmp_path)
        assert np.array_equal(loaded.unitary, enc.unitary)

    def test_rejects_corrupt_header(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTACACHE" + b"\x00" * 64)
        with pytest.raises(ValueError, match="cache"):
            load_block_encoding(path)

    def test_rejects_truncated_payload(self, tmp_path):
        enc = build_block_encoding(1)
        path = tmp_path / "enc.bin"
        save_block_encoding(enc, path)
        data = path.read_bytes()
        path.write_bytes(data[:-16])
        with pytest.raises(ValueError, match="truncated"):
            load_block_encoding(path)
