"""Linear algebra on real quadratic forms, symmetric pencils and Poisson brackets.

A symmetric matrix A represents the quadratic form Q_A(z) = z^T A z; a cross
term c*z_i*z_j is stored as c/2 in the (i, j) and (j, i) slots so the identity
holds exactly.  A Poisson structure with skew matrix S pairs gradients,
{f, g} = (grad f)^T S (grad g).  For quadratics the bracket is again quadratic
with matrix 2(ASB - BSA), since

    (grad Q_A)^T S (grad Q_B) = 4 z^T A S B z = z^T [2(ASB - BSA)] z.

The operations here are the statement-level ingredients of the solvability
checker: bracket matrices, dissipativity-free pencil invariants (min/max rank
over the span, joint kernels), symplectic-subspace tests, and the trace
normalization induced by a positive definite certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import ToleranceConfig
from .errors import InputError

_SQRT2 = math.sqrt(2.0)


def _as_matrix(obj) -> np.ndarray:
    """Accept a form/structure wrapper or a plain array-like; return ndarray."""
    if isinstance(obj, (SymmetricForm, PoissonStructure)):
        return obj.entries if isinstance(obj, SymmetricForm) else obj.S
    M = np.asarray(obj, dtype=float)
    if M.ndim != 2:
        raise InputError(f"expected a matrix, got array of ndim {M.ndim}")
    return M


def numerical_rank(M: np.ndarray, rel_tol: float) -> int:
    """Rank by SVD: count singular values above rel_tol * sigma_max."""
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def canonical_skew(d: int) -> np.ndarray:
    """The block matrix [[0, I_d], [-I_d, 0]] on R^(2d)."""
    if d < 1:
        raise InputError("d must be a positive integer")
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return J


@dataclass(frozen=True, eq=False)
class SymmetricForm:
    """Real symmetric n x n matrix of a quadratic form Q(z) = z^T A z.

    The entries are symmetrized on ingest, so A_ij == A_ji holds exactly.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        M = np.asarray(self.entries, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError(f"a symmetric form needs a square matrix, got shape {M.shape}")
        if M.shape[0] < 1:
            raise InputError("dimension must be at least 1")
        if not np.all(np.isfinite(M)):
            raise InputError("matrix entries must be finite")
        M = 0.5 * (M + M.T)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)


def form_from_monomials(n: int, terms: dict[tuple[int, int], float]) -> SymmetricForm:
    """Build the form with Q(z) = sum over (i, j) of c * z_i * z_j.

    Cross terms get the half convention; indices are 0-based.
    """
    M = np.zeros((n, n))
    for (i, j), c in terms.items():
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"monomial index ({i}, {j}) out of range for n={n}")
        if i == j:
            M[i, i] += c
        else:
            M[i, j] += 0.5 * c
            M[j, i] += 0.5 * c
    return SymmetricForm(M)


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    """Invertible skew structure matrix S defining {f, g} = (grad f)^T S (grad g).

    Skew-symmetrized on ingest; nondegeneracy is checked against rank_rel_tol.
    The symplectic form induced on vectors has matrix (S^T)^{-1}.
    """

    S: np.ndarray
    rank_rel_tol: float = 1e-10

    def __post_init__(self) -> None:
        M = np.asarray(self.S, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InputError(f"structure matrix must be square, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise InputError("structure matrix entries must be finite")
        if M.shape[0] % 2 != 0:
            raise InputError("a nondegenerate skew matrix needs even dimension")
        M = 0.5 * (M - M.T)
        s = np.linalg.svd(M, compute_uv=False)
        if s[0] == 0.0 or s[-1] <= self.rank_rel_tol * s[0]:
            raise InputError("structure matrix is numerically singular")
        M.setflags(write=False)
        object.__setattr__(self, "S", M)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    def symplectic_matrix(self) -> np.ndarray:
        """Matrix W of the induced symplectic form, omega(v, w) = v^T W w."""
        return np.linalg.inv(self.S).T


@dataclass(frozen=True, eq=False)
class Pencil:
    """Ordered, linearly independent pair (A, B) of symmetric forms."""

    A: SymmetricForm
    B: SymmetricForm
    cfg: ToleranceConfig = field(default=ToleranceConfig(), repr=False)

    def __post_init__(self) -> None:
        if self.A.n != self.B.n:
            raise InputError(f"pencil members have mismatched dimensions {self.A.n} != {self.B.n}")
        if not linear_independence([self.A, self.B], self.cfg):
            raise InputError("pencil members are linearly dependent")

    @property
    def n(self) -> int:
        return self.A.n

    def member(self, s: float, t: float) -> np.ndarray:
        return s * self.A.entries + t * self.B.entries


def evaluate(Q: SymmetricForm, v) -> float:
    """Evaluate Q(v) = v^T Q v."""
    M = _as_matrix(Q)
    x = np.asarray(v, dtype=float).reshape(-1)
    if x.shape[0] != M.shape[0]:
        raise InputError(f"vector of length {x.shape[0]} does not match form of dimension {M.shape[0]}")
    return float(x @ M @ x)


def poisson_bracket_forms(A: SymmetricForm, B: SymmetricForm, P) -> SymmetricForm:
    """Matrix C of the bracket {Q_A, Q_B}: C = 2(ASB - BSA), so Q_C(v) = 4 v^T A S B v."""
    MA, MB = _as_matrix(A), _as_matrix(B)
    S = P.S if isinstance(P, PoissonStructure) else np.asarray(P, dtype=float)
    if not (MA.shape == MB.shape and MA.shape[0] == S.shape[0] == S.shape[1]):
        raise InputError("bracket operands have mismatched dimensions")
    ASB = MA @ S @ MB
    # (ASB)^T = -BSA for skew S, so ASB - BSA = ASB + (ASB)^T
    return SymmetricForm(2.0 * (ASB + ASB.T))


def heisenberg_bracket_matrix(A: SymmetricForm, B: SymmetricForm, d: int | None = None) -> SymmetricForm:
    """Bracket matrix C = (AJB - BJA)/2 with J = [[0, I_d], [-I_d, 0]].

    Equal to 1/4 of poisson_bracket_forms(A, B, J); spans the same line.
    """
    MA, MB = _as_matrix(A), _as_matrix(B)
    n = MA.shape[0]
    if MA.shape != MB.shape:
        raise InputError("bracket operands have mismatched dimensions")
    if n % 2 != 0:
        raise InputError("Heisenberg bracket requires even dimension")
    if d is None:
        d = n // 2
    elif 2 * d != n:
        raise InputError(f"forms of dimension {n} do not match d={d}")
    J = canonical_skew(d)
    AJB = MA @ J @ MB
    return SymmetricForm(0.5 * (AJB + AJB.T))


def _gram_rows(mats) -> np.ndarray:
    """Stack of upper-triangle vectorizations, off-diagonals scaled by sqrt(2).

    Rows are normalized to unit Frobenius norm so the independence test is
    invariant under nonzero rescaling of any member; an exactly zero matrix
    yields a zero row (always dependent).
    """
    rows = []
    for F in mats:
        M = _as_matrix(F)
        iu = np.triu_indices(M.shape[0])
        v = M[iu] * np.where(iu[0] == iu[1], 1.0, _SQRT2)
        nrm = np.linalg.norm(v)
        rows.append(v / nrm if nrm > 0 else v)
    return np.vstack(rows)


def linear_independence(mats, cfg: ToleranceConfig | None = None) -> bool:
    """Whether the symmetric matrices are linearly independent over R.

    Measured in the Frobenius geometry: the k-th singular value of the
    stacked (normalized) vectorizations must exceed rank_rel_tol times the
    largest.
    """
    if len(mats) == 0:
        raise InputError("independence of an empty family is undefined")
    cfg = cfg or ToleranceConfig()
    ok, _ = independence_ratio(mats, cfg)
    return ok


def independence_ratio(mats, cfg: ToleranceConfig | None = None) -> tuple[bool, float]:
    """Independence verdict plus the margin sigma_k / sigma_1 behind it."""
    if len(mats) == 0:
        raise InputError("independence of an empty family is undefined")
    cfg = cfg or ToleranceConfig()
    ns = {_as_matrix(F).shape[0] for F in mats}
    if len(ns) != 1:
        raise InputError("all matrices must share one dimension")
    stack = _gram_rows(mats)
    s = np.linalg.svd(stack, compute_uv=False)
    if s[0] == 0.0:
        return False, 0.0
    ratio = float(s[-1] / s[0])
    return ratio > cfg.rank_rel_tol, ratio


def joint_kernel(pencil: Pencil, cfg: ToleranceConfig | None = None) -> np.ndarray:
    """Orthonormal basis (n x k, possibly k = 0) of ker A intersect ker B.

    Computed as the kernel of the stacked 2n x n matrix [A; B] by SVD.
    """
    cfg = cfg or ToleranceConfig()
    stack = np.vstack([pencil.A.entries, pencil.B.entries])
    _, s, vt = np.linalg.svd(stack)
    if s[0] == 0.0:
        raise InputError("pencil is identically zero")
    r = int(np.count_nonzero(s > cfg.rank_rel_tol * s[0]))
    return np.ascontiguousarray(vt[r:].T)


def is_symplectic_subspace(basis: np.ndarray, structure, cfg: ToleranceConfig | None = None) -> bool:
    """Whether the column span of ``basis`` is symplectic for the given form.

    ``structure`` is either a PoissonStructure (its induced form (S^T)^{-1}
    is used) or the symplectic form matrix W itself.  True iff basis^T W basis
    is invertible; the trivial subspace (k = 0) counts as symplectic.
    """
    cfg = cfg or ToleranceConfig()
    V = np.asarray(basis, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if V.shape[1] == 0:
        return True
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= cfg.rank_rel_tol * sv[0]:
        raise InputError("basis matrix is rank deficient")
    W = structure.symplectic_matrix() if isinstance(structure, PoissonStructure) else np.asarray(structure, dtype=float)
    if W.shape[0] != V.shape[0]:
        raise InputError("basis and form dimensions do not match")
    M = V.T @ W @ V
    s = np.linalg.svd(M, compute_uv=False)
    return bool(s[0] > 0.0 and s[-1] > cfg.rank_rel_tol * s[0])


@dataclass(frozen=True)
class PencilRankSummary:
    """Extreme numerical ranks over the pencil, with the minimizing direction.

    ``heuristic`` is set when every member of the pencil is singular even
    after splitting off the joint kernel; the candidate directions are then
    not guaranteed to catch every rank drop and the minimum is sample-based.
    """

    minrank: int
    maxrank: int
    argmin_direction: tuple[float, float]
    heuristic: bool


def _real_generalized_angles(M: np.ndarray, N: np.ndarray) -> list[float]:
    """Angles theta with det(cos(theta) M' + sin(theta) N') = 0 from the QZ pair."""
    out: list[float] = []
    try:
        eig = scipy.linalg.eig(M, -N)[0]
    except Exception:
        return out
    for lam in eig:
        if not np.isfinite(lam):
            continue
        if abs(lam.imag) > 1e-8 * (1.0 + abs(lam.real)):
            continue
        out.append(math.atan(float(lam.real)))
    return out


def pencil_minmax_rank(
    pencil: Pencil,
    cfg: ToleranceConfig | None = None,
    seed: int = 0,
) -> PencilRankSummary:
    """Minimum and maximum numerical rank over nonzero members of the pencil.

    The maximum is the generic rank, read off random directions.  The minimum
    additionally probes every direction where the determinant of the (joint
    kernel reduced) pencil can vanish: real generalized eigenvalues of the
    pair, mapped to angles, plus the two axes.
    """
    cfg = cfg or ToleranceConfig()
    A = pencil.A.entries
    B = pencil.B.entries
    n = A.shape[0]

    K = joint_kernel(pencil, cfg)
    k = K.shape[1]
    if k:
        U = scipy.linalg.null_space(K.T)
        Ar, Br = U.T @ A @ U, U.T @ B @ U
    else:
        Ar, Br = A, B

    rng = np.random.default_rng(seed)
    thetas = list(rng.uniform(0.0, math.pi, size=cfg.rank_theta_samples))
    thetas += [0.0, 0.5 * math.pi]
    thetas += _real_generalized_angles(Ar, Br)
    # reversed pair: det(B + s A) = 0 along directions (s, 1)
    for s in _real_generalized_angles(Br, Ar):
        thetas.append(0.5 * math.pi - s)

    minrank, maxrank = n + 1, 0
    argmin = (1.0, 0.0)
    for th in thetas:
        c, s = math.cos(th), math.sin(th)
        r = numerical_rank(c * A + s * B, cfg.rank_rel_tol)
        if r > maxrank:
            maxrank = r
        if r < minrank:
            minrank = r
            argmin = (c, s)

    reduced_size = n - k
    heuristic = maxrank < reduced_size
    return PencilRankSummary(minrank=minrank, maxrank=maxrank, argmin_direction=argmin, heuristic=heuristic)


def traceless_normalize(
    pencil: Pencil,
    cert_P: np.ndarray,
    cfg: ToleranceConfig | None = None,
) -> tuple[np.ndarray, SymmetricForm, SymmetricForm]:
    """Congruence by T = P^(1/2) sending the pencil to a traceless pair.

    Requires P positive definite with tr(PA) and tr(PB) zero within
    tolerance; then tr(T^T A T) = tr(PA) = 0 and likewise for B.  Congruence
    preserves ranks, the dissipativity class, and zero sets up to the
    coordinate change.
    """
    cfg = cfg or ToleranceConfig()
    P = np.asarray(cert_P, dtype=float)
    if P.shape != (pencil.n, pencil.n):
        raise InputError("certificate has wrong shape")
    P = 0.5 * (P + P.T)
    w, V = np.linalg.eigh(P)
    if w[0] <= 0.0:
        raise InputError("certificate matrix is not positive definite")
    A, B = pencil.A.entries, pencil.B.entries
    scale_a = np.linalg.norm(P) * np.linalg.norm(A)
    scale_b = np.linalg.norm(P) * np.linalg.norm(B)
    if abs(np.tensordot(P, A)) > 1e-8 * scale_a or abs(np.tensordot(P, B)) > 1e-8 * scale_b:
        raise InputError("certificate does not annihilate both traces")
    T = (V * np.sqrt(w)) @ V.T
    return T, SymmetricForm(T @ A @ T), SymmetricForm(T @ B @ T)
