import json

import numpy as np
import pytest

from loccdist import numerics, states
from loccdist.errors import DimensionMismatch, NotOrthonormal, ParseError

from conftest import SIGMA_X, random_family, random_orthonormal_states

SQ2 = np.sqrt(2.0)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=np.complex128) / SQ2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=np.complex128) / SQ2


def family_doc(vectors, dim_a=2, dim_b=2, labels=None):
    doc = {
        "dim_a": dim_a,
        "dim_b": dim_b,
        "states": [[[float(c.real), float(c.imag)] for c in v] for v in vectors],
    }
    if labels is not None:
        doc["labels"] = labels
    return json.dumps(doc)


class TestLoadFamily:
    def test_bell_pair_file(self):
        fam = states.load_family(family_doc([PHI_PLUS, PHI_MINUS]))
        assert (fam.dim_a, fam.dim_b, fam.size) == (2, 2, 2)
        assert fam.labels == ("psi_1", "psi_2")

    def test_duplicate_state_rejected(self):
        with pytest.raises(NotOrthonormal) as info:
            states.load_family(family_doc([PHI_PLUS, PHI_PLUS]))
        assert info.value.overlap == pytest.approx(1.0)

    def test_subnormalized_state_rejected(self):
        short = 0.9 * PHI_PLUS
        with pytest.raises(NotOrthonormal) as info:
            states.load_family(family_doc([short, PHI_MINUS]))
        assert info.value.overlap == pytest.approx(0.81)
        assert info.value.pair == (0, 0)

    def test_reorthonormalize_opt_in(self):
        skew = (PHI_PLUS + 0.001 * PHI_MINUS) / np.linalg.norm(
            PHI_PLUS + 0.001 * PHI_MINUS
        )
        doc = family_doc([skew, PHI_MINUS])
        with pytest.raises(NotOrthonormal):
            states.load_family(doc)
        fam = states.load_family(doc, reorthonormalize=True)
        assert fam.reorthonormalized
        gram = fam.states.conj() @ fam.states.T
        assert np.max(np.abs(gram - np.eye(2))) <= 1e-12

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            states.load_family(b"{not json")

    def test_wrong_amplitude_count(self):
        with pytest.raises(ParseError):
            states.load_family(family_doc([PHI_PLUS[:3], PHI_MINUS[:3]]))

    def test_bytes_and_file_objects(self, tmp_path):
        doc = family_doc([PHI_PLUS, PHI_MINUS], labels=["a", "b"])
        path = tmp_path / "fam.json"
        path.write_text(doc)
        with open(path, "rb") as handle:
            fam = states.load_family(handle)
        assert fam.labels == ("a", "b")


class TestOperatorCorrespondence:
    def test_phi_plus_is_scaled_identity(self):
        x = states.to_operator(PHI_PLUS, 2, 2)
        assert np.allclose(x, np.eye(2) / SQ2)

    def test_phi_minus_is_diagonal(self):
        x = states.to_operator(PHI_MINUS, 2, 2)
        assert np.allclose(x, np.diag([1 / SQ2, -1 / SQ2]))

    def test_sigma_x_gives_psi_plus(self):
        psi = states.from_operator(SIGMA_X / SQ2)
        assert np.allclose(psi, np.array([0, 1, 1, 0]) / SQ2)

    def test_zero_matrix(self):
        assert np.allclose(states.from_operator(np.zeros((2, 3))), 0.0)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        psi = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        x = states.to_operator(psi, 3, 2)
        assert np.array_equal(states.from_operator(x), psi)

    def test_trace_identity(self):
        rng = np.random.default_rng(1)
        psi = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        x = states.to_operator(psi, 3, 2)
        assert abs(np.trace(x.conj().T @ x).real - np.linalg.norm(psi) ** 2) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            states.to_operator(PHI_PLUS, 2, 3)

    def test_gram_matches_state_overlaps(self):
        rng = np.random.default_rng(2)
        fam = random_family(3, 4, 4, rng)
        rep = states.operator_rep(fam)
        for m in range(4):
            for l in range(4):
                lhs = np.trace(rep.matrices[m].conj().T @ rep.matrices[l])
                assert abs(lhs - (1.0 if m == l else 0.0)) <= 1e-8


class TestSchmidtProfile:
    def test_bell_profile(self):
        fam = states.make_family(2, 2, [PHI_PLUS, PHI_MINUS])
        profile = states.schmidt_profile(fam)
        assert np.allclose(profile.probabilities, 0.5)

    def test_product_state_profile(self):
        fam = states.make_family(
            2, 2,
            [np.array([1, 0, 0, 0], dtype=complex),
             np.array([0, 0, 0, 1], dtype=complex)],
        )
        profile = states.schmidt_profile(fam)
        assert np.allclose(profile.probabilities, [[1.0, 0.0], [1.0, 0.0]])

    def test_diagonal_operator_profile(self):
        x = np.diag([np.sqrt(0.7), np.sqrt(0.3)])
        other = states.from_operator(
            np.array([[0, np.sqrt(0.4)], [np.sqrt(0.6), 0]])
        )
        fam = states.make_family(2, 2, [states.from_operator(x), other])
        profile = states.schmidt_profile(fam)
        assert np.allclose(profile.probabilities[0], [0.7, 0.3])

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        fam = random_family(4, 3, 3, rng)
        profile = states.schmidt_profile(fam)
        assert np.allclose(profile.probabilities.sum(axis=1), 1.0, atol=1e-10)
        assert np.all(np.diff(profile.probabilities, axis=1) <= 1e-12)

    def test_invariant_under_b_side_unitary(self):
        rng = np.random.default_rng(4)
        fam = random_family(3, 3, 3, rng)
        q, _ = np.linalg.qr(
            rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        )
        rotated = np.array([
            states.from_operator(states.to_operator(psi, 3, 3) @ q)
            for psi in fam.states
        ])
        fam_rot = states.make_family(3, 3, rotated)
        p0 = states.schmidt_profile(fam).probabilities
        p1 = states.schmidt_profile(fam_rot).probabilities
        assert np.allclose(p0, p1, atol=1e-9)


class TestConjugation:
    def test_definition(self):
        v = np.array([1.0, 1.0j]) / SQ2
        assert np.allclose(states.conjugate_J(v), np.array([1.0, -1.0j]) / SQ2)

    def test_real_fixed_point_and_involution(self):
        v = np.array([0.6, 0.8])
        assert np.array_equal(states.conjugate_J(v), v)
        rng = np.random.default_rng(5)
        w = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        assert np.array_equal(states.conjugate_J(states.conjugate_J(w)), w)

    def test_preserves_orthonormal_sets(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            basis = random_orthonormal_states(4, 4, rng)
            conj = np.array([states.conjugate_J(g) for g in basis])
            gram = conj.conj() @ conj.T
            assert np.max(np.abs(gram - np.eye(4))) <= 1e-12


class TestFamilyInvariants:
    def test_conditional_masses_sum_to_one(self):
        rng = np.random.default_rng(7)
        fam = random_family(3, 4, 3, rng)
        rep = states.operator_rep(fam)
        basis = random_orthonormal_states(4, 4, rng)
        for x in rep.matrices:
            total = sum(np.linalg.norm(x @ g) ** 2 for g in basis)
            assert abs(total - 1.0) <= 1e-10

    def test_roundtrip_serialization(self):
        rng = np.random.default_rng(8)
        fam = random_family(2, 3, 3, rng)
        doc = json.dumps(states.family_to_json_dict(fam))
        again = states.load_family(doc)
        assert np.allclose(again.states, fam.states)
        assert again.labels == fam.labels
