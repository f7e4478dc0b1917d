import numpy as np
import pytest

from quadwitness import (
    DISSIPATIVE,
    NON_DISSIPATIVE,
    InputError,
    Pencil,
    SymmetricForm,
    ToleranceConfig,
    dissipativity_sweep_oracle,
    form_from_monomials,
    is_non_dissipative,
    traceless_normalize,
)
from quadwitness.gallery import isotropic_radical_pair

from helpers import random_symmetric, random_traceless


def lam_min(M):
    return float(np.linalg.eigvalsh(M)[0])


class TestSweepDecision:
    def test_psd_member_is_dissipative(self):
        p = Pencil(SymmetricForm(np.eye(2)), SymmetricForm(np.diag([1.0, -1.0])))
        dec = is_non_dissipative(p)
        assert dec.verdict == DISSIPATIVE
        F = np.cos(dec.witness_theta) * p.A.entries + np.sin(dec.witness_theta) * p.B.entries
        assert lam_min(F) >= -1e-9 * np.linalg.norm(F)

    def test_isotropic_radical_fixture_non_dissipative(self):
        for d in (2, 3):
            A, B, _ = isotropic_radical_pair(d)
            dec = is_non_dissipative(Pencil(A, B))
            assert dec.verdict == NON_DISSIPATIVE
            assert dec.margin < 0.0

    def test_traceless_pairs_non_dissipative_with_identity_center(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            A, B = random_traceless(rng, 5), random_traceless(rng, 5)
            dec = is_non_dissipative(Pencil(A, B))
            assert dec.verdict == NON_DISSIPATIVE
            assert dec.certificate_P is not None
            # for exactly traceless pairs the analytic center is the identity
            assert np.linalg.norm(dec.certificate_P - np.eye(5)) < 1e-8

    def test_hidden_psd_member_detected(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            G = rng.standard_normal((4, 4))
            P = G.T @ G + 0.1 * np.eye(4)  # strictly positive definite
            B = random_symmetric(rng, 4)
            # rotate the PD member away from the A axis: A = P - 0.7 B
            A = SymmetricForm(P - 0.7 * B.entries)
            dec = is_non_dissipative(Pencil(A, B))
            assert dec.verdict == DISSIPATIVE

    def test_certificate_properties_on_non_traceless_pair(self):
        A, B, _ = isotropic_radical_pair(3)
        dec = is_non_dissipative(Pencil(A, B))
        P = dec.certificate_P
        assert P is not None
        assert lam_min(P) > 0.0
        for M in (A.entries, B.entries):
            assert abs(np.tensordot(P, M)) <= 1e-10 * np.linalg.norm(P) * np.linalg.norm(M)

    def test_certificate_budget_flag(self):
        A, B, _ = isotropic_radical_pair(3)
        dec = is_non_dissipative(Pencil(A, B), ToleranceConfig(cert_max_iters=1))
        assert dec.verdict == NON_DISSIPATIVE
        assert dec.certificate_unavailable
        assert dec.certificate_P is None

    def test_oracle_agreement_random_pairs(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            A, B = random_symmetric(rng, 4), random_symmetric(rng, 4)
            try:
                p = Pencil(A, B)
            except InputError:
                continue
            dec = is_non_dissipative(p)
            assert dec.verdict == dissipativity_sweep_oracle(A, B)


class TestSweepOracle:
    def test_trivial_dissipative(self):
        assert dissipativity_sweep_oracle(np.diag([1.0, 1.0]), np.diag([1.0, -1.0])) == DISSIPATIVE

    def test_everywhere_indefinite(self):
        A = np.diag([1.0, -1.0])
        B = form_from_monomials(2, {(0, 1): 1.0}).entries
        assert dissipativity_sweep_oracle(A, B) == NON_DISSIPATIVE

    def test_isotropic_radical_fixture(self):
        A, B, _ = isotropic_radical_pair(2)
        assert dissipativity_sweep_oracle(A, B) == NON_DISSIPATIVE


class TestTracelessNormalize:
    def test_identity_certificate_is_identity_congruence(self):
        rng = np.random.default_rng(3)
        A, B = random_traceless(rng, 4), random_traceless(rng, 4)
        p = Pencil(A, B)
        T, A2, B2 = traceless_normalize(p, np.eye(4))
        assert np.array_equal(T, np.eye(4))
        assert np.array_equal(A2.entries, A.entries)
        assert np.array_equal(B2.entries, B.entries)

    def test_congruence_preserves_rank_and_kills_traces(self):
        A, B, _ = isotropic_radical_pair(3)
        p = Pencil(A, B)
        dec = is_non_dissipative(p)
        T, A2, B2 = traceless_normalize(p, dec.certificate_P)
        assert abs(np.trace(A2.entries)) <= 1e-9 * np.linalg.norm(A2.entries)
        assert abs(np.trace(B2.entries)) <= 1e-9 * np.linalg.norm(B2.entries)
        for M, M2 in ((A, A2), (B, B2)):
            assert np.linalg.matrix_rank(M.entries, tol=1e-10) == np.linalg.matrix_rank(M2.entries, tol=1e-10)
        # dissipativity class is congruence invariant
        assert is_non_dissipative(Pencil(A2, B2)).verdict == NON_DISSIPATIVE

    def test_rejects_non_pd_certificate(self):
        A, B, _ = isotropic_radical_pair(2)
        with pytest.raises(InputError):
            traceless_normalize(Pencil(A, B), np.diag([1.0, 1.0, 1.0, -1.0]))

    def test_rejects_certificate_missing_trace_condition(self):
        A, B, _ = isotropic_radical_pair(2)
        with pytest.raises(InputError):
            traceless_normalize(Pencil(A, B), np.eye(4))


class TestRoundTripSmall:
    """Smaller-count version of the traceless/PD round trip; the full 200+200
    run with oracle agreement lives in the acceptance suite."""

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            A, B = random_traceless(rng, 4), random_traceless(rng, 4)
            assert is_non_dissipative(Pencil(A, B)).verdict == NON_DISSIPATIVE
        for _ in range(25):
            G = rng.standard_normal((4, 4))
            A = SymmetricForm(G.T @ G + 1e-3 * random_symmetric(rng, 4).entries)
            B = random_symmetric(rng, 4)
            assert is_non_dissipative(Pencil(A, B)).verdict == DISSIPATIVE
