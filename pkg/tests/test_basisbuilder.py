import numpy as np
import pytest

from loccdist import basisbuilder, jnr, numerics, states
from loccdist.basisbuilder import (
    DistinguishingBasis,
    build_distinguishing_basis,
    compress,
    verify_basis,
)
from loccdist.errors import PreconditionViolated

from conftest import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    family_pipeline,
    random_family,
    random_orthonormal_states,
    random_traceless_hermitian,
)


class TestCompress:
    def test_full_space_preserves_spectrum(self):
        rng = np.random.default_rng(0)
        a = random_traceless_hermitian(4, rng)
        basis = random_orthonormal_states(4, 4, rng)
        small = compress([a], basis)[0]
        w0, _ = numerics.hermitian_eig(a)
        w1, _ = numerics.hermitian_eig(small)
        assert np.allclose(w0, w1, atol=1e-10)

    def test_single_vector_gives_scalar(self):
        v = np.array([1.0, 1.0j]) / np.sqrt(2)
        small = compress([SIGMA_Y], [v])[0]
        assert small.shape == (1, 1)
        assert small[0, 0] == pytest.approx(np.vdot(v, SIGMA_Y @ v))

    def test_balanced_vector_kills_sigma_z(self):
        v = np.array([1.0, 1.0]) / np.sqrt(2)
        small = compress([SIGMA_Z], [v])[0]
        assert abs(small[0, 0]) <= 1e-12

    def test_trace_telescopes(self):
        rng = np.random.default_rng(1)
        a = random_traceless_hermitian(5, rng)
        basis = random_orthonormal_states(5, 5, rng)
        used, rest = basis[:2], basis[2:]
        small = compress([a], rest)[0]
        removed = sum(np.vdot(g, a @ g).real for g in used)
        assert np.trace(small).real == pytest.approx(
            np.trace(a).real - removed, abs=1e-12
        )


class TestBuildBasis:
    def test_single_pauli_direction(self):
        ops = [SIGMA_Z / np.sqrt(2)]
        basis = build_distinguishing_basis(ops, 2, 0)
        assert basis.error_slots == 0
        assert np.max(basis.residuals) <= 1e-10
        # Both rows balance |0> and |1| up to phases.
        assert np.allclose(np.abs(basis.vectors), 1 / np.sqrt(2), atol=1e-10)

    def test_no_operators_returns_computational_basis(self):
        basis = build_distinguishing_basis([], 4, 0)
        assert np.array_equal(basis.vectors, np.eye(4))
        assert basis.error_slots == 0

    def test_three_ops_on_qubit_space_is_all_error_slots(self):
        ops = [SIGMA_Z / np.sqrt(2), SIGMA_X / np.sqrt(2), SIGMA_Y / np.sqrt(2)]
        basis = build_distinguishing_basis(ops, 2, 2)
        assert basis.error_slots == 2
        gram = basis.vectors.conj() @ basis.vectors.T
        assert np.max(np.abs(gram - np.eye(2))) <= 1e-12

    def test_regime_preconditions(self):
        with pytest.raises(PreconditionViolated):
            build_distinguishing_basis([SIGMA_Z], 2, 2)
        ops3 = [SIGMA_Z, SIGMA_X, SIGMA_Y]
        with pytest.raises(PreconditionViolated):
            build_distinguishing_basis(ops3, 2, 0)
        rng = np.random.default_rng(2)
        ops4 = [random_traceless_hermitian(4, rng) for _ in range(4)]
        with pytest.raises(PreconditionViolated):
            build_distinguishing_basis(ops4, 4, 2)

    @pytest.mark.parametrize("n,d", [(1, 4), (2, 5), (2, 2), (3, 4), (3, 6)])
    def test_slot_counts_per_regime(self, n, d):
        rng = np.random.default_rng(10 * n + d)
        ops = [random_traceless_hermitian(d, rng) for _ in range(n)]
        n_p = 0 if n <= 2 else 2
        basis = build_distinguishing_basis(ops, d, n_p,
                                           rng=np.random.default_rng(0))
        assert basis.error_slots == n_p
        assert basis.vectors.shape == (d, d)
        assert np.max(basis.residuals[n_p:]) <= 1e-9 if n_p < d else True
        gram = basis.vectors.conj() @ basis.vectors.T
        assert np.max(np.abs(gram - np.eye(d))) <= 1e-10

    def test_telescoping_traces_along_deflation(self):
        rng = np.random.default_rng(3)
        for trial in range(10):
            d = int(rng.integers(3, 7))
            n = int(rng.integers(1, 3))
            ops = [random_traceless_hermitian(d, rng) for _ in range(n)]
            basis = build_distinguishing_basis(ops, d, 0,
                                               rng=np.random.default_rng(0))
            # After removing the first k vectors the compressed traces
            # must still telescope to ~0.
            for k in range(1, d):
                rest = basis.vectors[k:]
                for small in compress(ops, rest):
                    assert abs(np.trace(small)) <= (k + 1) * 1e-10

    def test_final_dim1_vector_not_solved_but_valid(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            d = int(rng.integers(2, 6))
            ops = [random_traceless_hermitian(d, rng) for _ in range(2)]
            basis = build_distinguishing_basis(ops, d, 0,
                                               rng=np.random.default_rng(0))
            assert basis.residuals[-1] <= 1e-9

    def test_best_effort_runs_above_three_ops(self):
        # Four commuting diagonal traceless operators on C^8: common zeros
        # exist, so even the unguaranteed path should find them.
        rng = np.random.default_rng(5)
        diags = []
        for _ in range(4):
            v = rng.standard_normal(8)
            v -= v.mean()
            diags.append(np.diag(v).astype(complex))
        basis = build_distinguishing_basis(diags, 8, 2, rng=np.random.default_rng(0),
                                           best_effort=True)
        assert basis.error_slots == 2
        assert np.max(basis.residuals[2:]) <= 1e-9


class TestEndToEnd:
    def test_conditional_orthogonality_certificate(self):
        rng = np.random.default_rng(6)
        for _ in range(5):
            fam = random_family(3, 4, 2, rng)
            rep, kbasis = family_pipeline(fam)
            assert kbasis.dim_n <= 2
            basis = build_distinguishing_basis(
                kbasis.operators, fam.dim_b, 0, rng=np.random.default_rng(0)
            )
            for k in range(fam.dim_b):
                g = basis.vectors[k]
                xi = [x @ g for x in rep.matrices]
                assert abs(np.vdot(xi[0], xi[1])) <= 1e-8


class TestVerifyBasis:
    def test_built_basis_passes(self):
        rng = np.random.default_rng(7)
        ops = [random_traceless_hermitian(4, rng) for _ in range(2)]
        basis = build_distinguishing_basis(ops, 4, 0, rng=np.random.default_rng(0))
        report = verify_basis(ops, basis, tol=1e-9)
        assert report.passed
        assert report.max_zero_residual <= 1e-9

    def test_computational_basis_fails_against_sigma_z(self):
        fake = DistinguishingBasis(np.eye(2, dtype=complex), 0, np.zeros(2))
        report = verify_basis([SIGMA_Z], fake, tol=1e-9)
        assert not report.passed
        assert report.max_zero_residual == pytest.approx(1.0)

    def test_permuted_zero_slots_still_pass(self):
        rng = np.random.default_rng(8)
        ops = [random_traceless_hermitian(4, rng) for _ in range(2)]
        basis = build_distinguishing_basis(ops, 4, 0, rng=np.random.default_rng(0))
        permuted = DistinguishingBasis(
            basis.vectors[::-1].copy(), 0, basis.residuals[::-1].copy()
        )
        assert verify_basis(ops, permuted, tol=1e-9).passed
