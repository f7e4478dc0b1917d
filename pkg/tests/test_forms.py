import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadwitness import (
    InputError,
    Pencil,
    PoissonStructure,
    SymmetricForm,
    ToleranceConfig,
    canonical_skew,
    evaluate,
    form_from_monomials,
    heisenberg_bracket_matrix,
    is_symplectic_subspace,
    joint_kernel,
    linear_independence,
    pencil_minmax_rank,
    poisson_bracket_forms,
)
from quadwitness.gallery import isotropic_radical_pair, two_plane_bracket_target, two_plane_pair

from helpers import parallelism_angle, random_symmetric


def sym_entries(n, mag=3.0):
    return st.lists(
        st.floats(-mag, mag, allow_nan=False, allow_infinity=False, width=64),
        min_size=n * n,
        max_size=n * n,
    ).map(lambda v: SymmetricForm(np.array(v).reshape(n, n)))


class TestSymmetricForm:
    def test_symmetrizes_on_ingest(self):
        F = SymmetricForm(np.array([[1.0, 2.0], [4.0, 3.0]]))
        assert np.array_equal(F.entries, F.entries.T)
        assert F.entries[0, 1] == 3.0

    def test_rejects_nonsquare_and_nonfinite(self):
        with pytest.raises(InputError):
            SymmetricForm(np.zeros((2, 3)))
        with pytest.raises(InputError):
            SymmetricForm(np.array([[np.inf, 0.0], [0.0, 1.0]]))

    def test_entries_read_only(self):
        F = SymmetricForm(np.eye(2))
        with pytest.raises(ValueError):
            F.entries[0, 0] = 5.0


class TestEvaluate:
    def test_hyperbolic_isotropic_vector(self):
        Q = SymmetricForm(np.diag([1.0, -1.0]))
        assert evaluate(Q, [1.0, 1.0]) == 0.0

    def test_identity_squared_norm(self):
        assert evaluate(SymmetricForm(np.eye(3)), [1.0, 2.0, 2.0]) == 9.0

    def test_cross_term_half_convention(self):
        Q = form_from_monomials(2, {(0, 1): 1.0})
        assert evaluate(Q, [3.0, 5.0]) == 15.0

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            evaluate(SymmetricForm(np.eye(3)), [1.0, 2.0])


class TestPoissonBracket:
    def test_self_bracket_vanishes(self):
        rng = np.random.default_rng(0)
        A = random_symmetric(rng, 4)
        C = poisson_bracket_forms(A, A, canonical_skew(2))
        assert np.linalg.norm(C.entries) == 0.0

    @settings(max_examples=25, deadline=None)
    @given(sym_entries(4), sym_entries(4))
    def test_antisymmetry(self, A, B):
        J = canonical_skew(2)
        CAB = poisson_bracket_forms(A, B, J).entries
        CBA = poisson_bracket_forms(B, A, J).entries
        assert np.allclose(CAB, -CBA, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(sym_entries(4), sym_entries(4), sym_entries(4), st.floats(-2, 2), st.floats(-2, 2))
    def test_bilinearity(self, A, A2, B, alpha, beta):
        J = canonical_skew(2)
        left = poisson_bracket_forms(SymmetricForm(alpha * A.entries + beta * A2.entries), B, J).entries
        right = alpha * poisson_bracket_forms(A, B, J).entries + beta * poisson_bracket_forms(A2, B, J).entries
        scale = max(1.0, np.linalg.norm(left), np.linalg.norm(right))
        assert np.linalg.norm(left - right) <= 1e-12 * scale

    def test_two_plane_bracket_is_exact_target(self):
        A, B = two_plane_pair()
        C = poisson_bracket_forms(A, B, canonical_skew(2))
        # proportional with nonzero constant to 2(x1 y2 - x2 y1); here exactly equal
        assert parallelism_angle(C.entries, two_plane_bracket_target()) < 1e-10
        assert np.array_equal(C.entries, two_plane_bracket_target())

    def test_pairs_with_gradient_contraction(self):
        from quadwitness import bracket_gradient_oracle

        rng = np.random.default_rng(7)
        for n in (2, 4, 6):
            for _ in range(34):
                A, B = random_symmetric(rng, n), random_symmetric(rng, n)
                G = rng.standard_normal((n, n))
                S = G - G.T
                z = rng.standard_normal(n)
                got = evaluate(poisson_bracket_forms(A, B, S), z)
                want = bracket_gradient_oracle(A, B, S, z)
                scale = np.linalg.norm(A) * np.linalg.norm(B) * np.linalg.norm(S) * np.linalg.norm(z) ** 2
                assert abs(got - want) <= 1e-10 * scale

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            poisson_bracket_forms(SymmetricForm(np.eye(2)), SymmetricForm(np.eye(4)), canonical_skew(2))


class TestHeisenbergBracket:
    def test_self_bracket_vanishes(self):
        rng = np.random.default_rng(1)
        A = random_symmetric(rng, 6)
        assert np.linalg.norm(heisenberg_bracket_matrix(A, A, 3).entries) == 0.0

    def test_two_plane_pair_normalization(self):
        A, B = two_plane_pair()
        C = heisenberg_bracket_matrix(A, B, 2)
        assert parallelism_angle(C.entries, two_plane_bracket_target()) < 1e-10
        assert np.allclose(4.0 * C.entries, two_plane_bracket_target())

    def test_parallel_to_gradient_pairing_bracket(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            A, B = random_symmetric(rng, 6), random_symmetric(rng, 6)
            Ch = heisenberg_bracket_matrix(A, B, 3).entries
            Cp = poisson_bracket_forms(A, B, canonical_skew(3)).entries
            assert parallelism_angle(Ch, Cp) < 1e-10

    def test_odd_dimension_rejected(self):
        with pytest.raises(InputError):
            heisenberg_bracket_matrix(SymmetricForm(np.eye(3)), SymmetricForm(np.eye(3)))


class TestLinearIndependence:
    def test_scalar_multiple_dependent(self):
        A = SymmetricForm(np.diag([1.0, 2.0]))
        assert not linear_independence([A, SymmetricForm(2.0 * A.entries)])

    def test_basis_of_sym2(self):
        mats = [
            form_from_monomials(2, {(0, 0): 1.0}),
            form_from_monomials(2, {(1, 1): 1.0}),
            form_from_monomials(2, {(0, 1): 1.0}),
        ]
        assert linear_independence(mats)

    def test_two_plane_triple_independent(self):
        A, B = two_plane_pair()
        C = poisson_bracket_forms(A, B, canonical_skew(2))
        assert linear_independence([A, B, C])

    def test_empty_family_rejected(self):
        with pytest.raises(InputError):
            linear_independence([])

    def test_invariant_under_rescaling(self):
        rng = np.random.default_rng(3)
        A, B = random_symmetric(rng, 5), random_symmetric(rng, 5)
        C = SymmetricForm(A.entries + B.entries + random_symmetric(rng, 5).entries)
        assert linear_independence([A, B, C])
        assert linear_independence([A, B, SymmetricForm(1e-8 * C.entries)])


class TestJointKernel:
    def test_invertible_pair_trivial(self):
        p = Pencil(SymmetricForm(np.diag([1.0, -1.0, 2.0])), SymmetricForm(np.diag([2.0, 1.0, -1.0])))
        assert joint_kernel(p).shape == (3, 0)

    def test_disjoint_kernels_trivial(self):
        p = Pencil(SymmetricForm(np.diag([1.0, -1.0, 0.0, 0.0])), SymmetricForm(np.diag([0.0, 0.0, 1.0, -1.0])))
        assert joint_kernel(p).shape == (4, 0)

    def test_isotropic_radical_fixture(self):
        for d in (2, 3):
            A, B, _ = isotropic_radical_pair(d)
            K = joint_kernel(Pencil(A, B))
            assert K.shape == (2 * d, 1)
            # the kernel is the last coordinate axis (the final momentum direction)
            e_last = np.zeros(2 * d)
            e_last[-1] = 1.0
            assert abs(abs(K[:, 0] @ e_last) - 1.0) < 1e-12


class TestSymplecticSubspace:
    def test_canonical_partner_plane(self):
        basis = np.zeros((4, 2))
        basis[0, 0] = 1.0
        basis[2, 1] = 1.0  # e1 and its symplectic partner
        assert is_symplectic_subspace(basis, PoissonStructure(canonical_skew(2)))

    def test_single_vector_false(self):
        basis = np.zeros((4, 1))
        basis[0, 0] = 1.0
        assert not is_symplectic_subspace(basis, PoissonStructure(canonical_skew(2)))

    def test_trivial_subspace_true(self):
        assert is_symplectic_subspace(np.zeros((4, 0)), canonical_skew(2))

    def test_isotropic_radical_fixture(self):
        A, B, _ = isotropic_radical_pair(3)
        K = joint_kernel(Pencil(A, B))
        assert not is_symplectic_subspace(K, PoissonStructure(canonical_skew(3)))

    def test_rank_deficient_basis_rejected(self):
        basis = np.ones((4, 2))
        with pytest.raises(InputError):
            is_symplectic_subspace(basis, canonical_skew(2))


class TestPoissonStructure:
    def test_rejects_singular(self):
        with pytest.raises(InputError):
            PoissonStructure(np.zeros((2, 2)))

    def test_rejects_odd_dimension(self):
        with pytest.raises(InputError):
            PoissonStructure(np.array([[0.0]]))

    def test_skew_projected_on_ingest(self):
        P = PoissonStructure(canonical_skew(1) + 1e-30 * np.eye(2))
        assert np.array_equal(P.S, -P.S.T)


class TestPencil:
    def test_rejects_dependent_members(self):
        A = SymmetricForm(np.diag([1.0, -1.0]))
        with pytest.raises(InputError):
            Pencil(A, SymmetricForm(-3.0 * A.entries))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(InputError):
            Pencil(SymmetricForm(np.eye(2)), SymmetricForm(np.eye(4)))


def brute_force_rank_extremes(A, B, grid=2000, tol=1e-10):
    thetas = np.linspace(0.0, np.pi, grid, endpoint=False)
    lo, hi = A.n + 1, 0
    for th in thetas:
        M = np.cos(th) * A.entries + np.sin(th) * B.entries
        s = np.linalg.svd(M, compute_uv=False)
        r = int(np.count_nonzero(s > tol * s[0]))
        lo, hi = min(lo, r), max(hi, r)
    return lo, hi


class TestPencilRanks:
    def test_diag_pencil(self):
        A = SymmetricForm(np.diag([1.0, -1.0, 0.0]))
        B = SymmetricForm(np.diag([0.0, 1.0, -1.0]))
        p = Pencil(A, B)
        summary = pencil_minmax_rank(p)
        assert (summary.minrank, summary.maxrank) == (2, 3)
        # grid enumeration over directions agrees
        assert brute_force_rank_extremes(A, B) == (2, 3)
        c, s = summary.argmin_direction
        M = p.member(c, s)
        sv = np.linalg.svd(M, compute_uv=False)
        assert int(np.count_nonzero(sv > 1e-10 * sv[0])) == 2

    def test_everywhere_rank_two(self):
        A = SymmetricForm(np.diag([1.0, -1.0]))
        B = form_from_monomials(2, {(0, 1): 1.0})
        summary = pencil_minmax_rank(Pencil(A, B))
        # det(sA + tB) = -s^2 - t^2/4 < 0 for all (s, t) != 0
        assert (summary.minrank, summary.maxrank) == (2, 2)

    def test_isotropic_radical_fixture_minrank(self):
        A, B, _ = isotropic_radical_pair(2)
        summary = pencil_minmax_rank(Pencil(A, B))
        assert summary.minrank == 2

    def test_two_plane_pair_full_rank_everywhere(self):
        A, B = two_plane_pair()
        summary = pencil_minmax_rank(Pencil(A, B))
        assert (summary.minrank, summary.maxrank) == (4, 4)

    def test_congruence_invariance(self):
        rng = np.random.default_rng(11)
        A = SymmetricForm(np.diag([1.0, -1.0, 0.0, 2.0]))
        B = SymmetricForm(np.diag([0.0, 1.0, -1.0, 1.0]))
        base = pencil_minmax_rank(Pencil(A, B))
        T = np.eye(4) + 0.3 * rng.standard_normal((4, 4))
        At = SymmetricForm(T.T @ A.entries @ T)
        Bt = SymmetricForm(T.T @ B.entries @ T)
        cong = pencil_minmax_rank(Pencil(At, Bt))
        assert (base.minrank, base.maxrank) == (cong.minrank, cong.maxrank)

    def test_bounds_hold_on_random_pencils(self):
        rng = np.random.default_rng(12)
        for n in (2, 3, 5):
            for _ in range(10):
                A, B = random_symmetric(rng, n), random_symmetric(rng, n)
                summary = pencil_minmax_rank(Pencil(A, B))
                assert 1 <= summary.minrank <= summary.maxrank <= n

    def test_config_threshold_respected(self):
        A = SymmetricForm(np.diag([1.0, 1e-13]))
        B = form_from_monomials(2, {(0, 1): 1.0})
        loose = pencil_minmax_rank(Pencil(A, B), ToleranceConfig(rank_rel_tol=1e-6))
        assert loose.minrank == 1
