"""Nonsolvability verdicts for left-invariant operators on 2-step nilpotent groups.

A group presentation is the data (m, ell, J^(1..ell)): generators z in R^m,
center u in R^ell, and bracket relations encoded by skew matrices via the
group law (z, u) * (z', u') = (z + z', u + u' + (z^T J^(i) z' / 2)_i).  An
operator sum alpha_jk X_j X_k with constant complex symmetric coefficient
matrix A + iB is checked against three matrix conditions:

  (a) (A, B) is a non-dissipative pair;
  (b) some direction mu gives an invertible J^mu = sum mu_i J^(i), and
      {A, B, C} is linearly independent for the bracket form C computed
      with structure matrix J^mu;
  (c) the pencil ranks clear one of two regimes: minrank >= 3 with
      maxrank >= 17, or minrank == 2 with maxrank >= 9 and a joint kernel
      that is trivial or symplectic.

When all three hold the verdict is "not locally solvable" (for constant
coefficients left-invariance upgrades this to: nowhere on the group), and a
witness x with Q_A(x) = Q_B(x) = 0, Q_C(x) != 0 is searched for and attached
as best-effort evidence of the underlying bracket obstruction.  Witness
search failure never downgrades the verdict; any failed or unverifiable
condition yields "inconclusive" with the reasons spelled out -- never a
claim of solvability.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import CheckConfig, ToleranceConfig
from .dissipativity import DissipativityDecision, is_non_dissipative
from .errors import InputError
from .forms import (
    Pencil,
    PoissonStructure,
    SymmetricForm,
    canonical_skew,
    evaluate,
    heisenberg_bracket_matrix,
    independence_ratio,
    is_symplectic_subspace,
    joint_kernel,
    pencil_minmax_rank,
    poisson_bracket_forms,
)
from .witness import WitnessPoint, hoermander_witness

logger = logging.getLogger(__name__)

NOT_LOCALLY_SOLVABLE = "not_locally_solvable"
INCONCLUSIVE = "inconclusive"

BRANCH_I = "I"
BRANCH_II = "II"
BRANCH_FAIL = "fail"

# hard rank thresholds of the two admissible regimes
MINRANK_I, MAXRANK_I = 3, 17
MINRANK_II, MAXRANK_II = 2, 9


@dataclass(frozen=True, eq=False)
class TwoStepGroup:
    """Presentation of a 2-step nilpotent group by its bracket matrices."""

    m: int
    ell: int
    J_list: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.m < 2 or self.ell < 1:
            raise InputError("need at least 2 generators and a 1-dimensional center")
        if len(self.J_list) != self.ell:
            raise InputError(f"expected {self.ell} bracket matrices, got {len(self.J_list)}")
        mats = []
        for i, J in enumerate(self.J_list):
            M = np.asarray(J, dtype=float)
            if M.shape != (self.m, self.m):
                raise InputError(f"bracket matrix {i} has shape {M.shape}, expected ({self.m}, {self.m})")
            if np.linalg.norm(M + M.T) != 0.0:
                raise InputError(f"bracket matrix {i} is not exactly skew-symmetric")
            M = M.copy()
            M.setflags(write=False)
            mats.append(M)
        object.__setattr__(self, "J_list", tuple(mats))

    @classmethod
    def heisenberg(cls, d: int) -> "TwoStepGroup":
        """The Heisenberg group presentation: m = 2d, one central direction."""
        return cls(m=2 * d, ell=1, J_list=(canonical_skew(d),))


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Constant complex symmetric coefficient matrix, split as A + iB."""

    A: SymmetricForm
    B: SymmetricForm

    def __post_init__(self) -> None:
        if self.A.n != self.B.n:
            raise InputError("real and imaginary parts have mismatched dimensions")

    @property
    def dimension(self) -> int:
        return self.A.n

    @classmethod
    def from_complex(cls, calA) -> "OperatorSpec":
        M = np.asarray(calA, dtype=complex)
        return cls(A=SymmetricForm(M.real), B=SymmetricForm(M.imag))


@dataclass(frozen=True, eq=False)
class BracketConditions:
    """Condition (b) data: the direction used, its margin, and independence."""

    mu0: np.ndarray | None
    jmu_sigma_min: float
    independent: bool
    sigma_ratio: float


@dataclass(frozen=True, eq=False)
class RankConditions:
    """Condition (c) data: pencil ranks and the joint-kernel geometry."""

    branch: str
    minrank: int
    maxrank: int
    argmin_direction: tuple[float, float]
    joint_kernel_dim: int
    kernel_symplectic: bool
    rank_heuristic: bool


@dataclass(frozen=True, eq=False)
class ConditionReport:
    """All three condition outcomes; cond_a/cond_c may be absent when the
    pencil itself is degenerate and they cannot be evaluated."""

    cond_a: DissipativityDecision | None
    cond_b: BracketConditions
    cond_c: RankConditions | None

    @property
    def all_pass(self) -> bool:
        return (
            self.cond_a is not None
            and self.cond_a.non_dissipative
            and self.cond_b.independent
            and self.cond_c is not None
            and self.cond_c.branch != BRANCH_FAIL
        )


@dataclass(frozen=True, eq=False)
class EvidenceBundle:
    """Quadratic-order prediction for the symbol bracket along xi(t) = xi0 + (t v', 0).

    The bracket of the real and imaginary symbol parts behaves like
    t^scaling_power * qc_leading_coefficient for small t; the cubic remainder
    is deliberately not evaluated.  zeta0 is the generator block of the base
    covector, which vanishes at the group identity, so xi0 = (0, mu0).
    """

    v_prime: np.ndarray
    qc_leading_coefficient: float
    scaling_power: int
    mu0: np.ndarray | None
    zeta0: np.ndarray


@dataclass(frozen=True, eq=False)
class Verdict:
    """Checker outcome: the verdict kind, full condition report and evidence.

    kind == "not_locally_solvable" only when every condition passed; the
    optional witness re-enforces the bracket obstruction numerically but its
    absence changes nothing.  scope is "group" when left-invariance makes the
    verdict hold everywhere, "point" for a raw pencil + structure check.
    """

    kind: str
    report: ConditionReport
    reasons: list[str] = field(default_factory=list)
    mu0: np.ndarray | None = None
    bracket_form: SymmetricForm | None = None
    witness: WitnessPoint | None = None
    evidence: EvidenceBundle | None = None
    scope: str = "point"

    @property
    def not_locally_solvable(self) -> bool:
        return self.kind == NOT_LOCALLY_SOLVABLE


def j_mu(group: TwoStepGroup, mu) -> np.ndarray:
    """The structure matrix sum_i mu_i J^(i) of the direction mu."""
    v = np.asarray(mu, dtype=float).reshape(-1)
    if v.shape[0] != group.ell:
        raise InputError(f"mu has length {v.shape[0]}, expected {group.ell}")
    out = np.zeros((group.m, group.m))
    for c, J in zip(v, group.J_list):
        out += c * J
    return out


def _mu_candidates(ell: int, attempts: int, rng: np.random.Generator):
    """Standard basis directions first, then uniform directions on the sphere."""
    for i in range(min(ell, attempts)):
        e = np.zeros(ell)
        e[i] = 1.0
        yield e
    for _ in range(max(0, attempts - ell)):
        v = rng.standard_normal(ell)
        nrm = np.linalg.norm(v)
        yield v / nrm if nrm > 0 else v


def _sigma_min_rel(M: np.ndarray) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def find_nondegenerate_mu(
    group: TwoStepGroup,
    attempts: int = 32,
    seed: int = 0,
    cfg: ToleranceConfig | None = None,
) -> np.ndarray | None:
    """First sampled direction mu with an invertible J^mu, or None.

    None does not prove that no such direction exists -- det J^mu is a
    polynomial in mu, so repeated failure is strong but inconclusive
    evidence; callers record the sample count.
    """
    if attempts < 1:
        raise InputError("attempts must be at least 1")
    cfg = cfg or ToleranceConfig()
    rng = np.random.default_rng(seed)
    for mu in _mu_candidates(group.ell, attempts, rng):
        if _sigma_min_rel(j_mu(group, mu)) > cfg.rank_rel_tol:
            return mu
    return None


def _branch(minrank: int, maxrank: int, kernel_dim: int, kernel_symplectic: bool) -> str:
    if minrank >= MINRANK_I and maxrank >= MAXRANK_I:
        return BRANCH_I
    if minrank == MINRANK_II and maxrank >= MAXRANK_II and (kernel_dim == 0 or kernel_symplectic):
        return BRANCH_II
    return BRANCH_FAIL


def evaluate_conditions(
    A: SymmetricForm,
    B: SymmetricForm,
    C: SymmetricForm,
    structure: PoissonStructure,
    cfg: CheckConfig,
    mu0: np.ndarray | None = None,
) -> tuple[ConditionReport, list[str]]:
    """Fill the full condition report for a valid pencil; reasons name failures."""
    pencil = Pencil(A, B, cfg.tol)
    cond_a = is_non_dissipative(pencil, cfg.tol)
    independent, ratio = independence_ratio([A, B, C], cfg.tol)
    cond_b = BracketConditions(
        mu0=None if mu0 is None else np.asarray(mu0, dtype=float),
        jmu_sigma_min=float(np.linalg.svd(structure.S, compute_uv=False)[-1]),
        independent=independent,
        sigma_ratio=ratio,
    )
    ranks = pencil_minmax_rank(pencil, cfg.tol, seed=cfg.search.seed)
    kernel = joint_kernel(pencil, cfg.tol)
    kernel_symplectic = is_symplectic_subspace(kernel, structure, cfg.tol)
    cond_c = RankConditions(
        branch=_branch(ranks.minrank, ranks.maxrank, kernel.shape[1], kernel_symplectic),
        minrank=ranks.minrank,
        maxrank=ranks.maxrank,
        argmin_direction=ranks.argmin_direction,
        joint_kernel_dim=kernel.shape[1],
        kernel_symplectic=kernel_symplectic,
        rank_heuristic=ranks.heuristic,
    )

    reasons: list[str] = []
    if not cond_a.non_dissipative:
        reasons.append(
            "condition (a) fails: span{A, B} contains a positive semidefinite member "
            f"within tolerance (theta={cond_a.witness_theta:.6g}, lambda_min={cond_a.margin:.6g})"
        )
    if not independent:
        reasons.append(
            f"condition (b) fails: A, B and the bracket form C are linearly dependent (sigma ratio {ratio:.3g})"
        )
    if cond_c.branch == BRANCH_FAIL:
        msg = (
            f"condition (c) fails: minrank={ranks.minrank}, maxrank={ranks.maxrank} "
            f"meet neither regime (minrank>={MINRANK_I} with maxrank>={MAXRANK_I}, or "
            f"minrank=={MINRANK_II} with maxrank>={MAXRANK_II} and admissible joint kernel)"
        )
        if ranks.minrank == MINRANK_II and ranks.maxrank >= MAXRANK_II and kernel.shape[1] > 0 and not kernel_symplectic:
            msg += f"; the joint kernel (dimension {kernel.shape[1]}) is not a symplectic subspace"
        reasons.append(msg)
    return ConditionReport(cond_a=cond_a, cond_b=cond_b, cond_c=cond_c), reasons


def _dependent_pair_verdict(structure: PoissonStructure | None, mu0, scope: str) -> Verdict:
    smin = 0.0 if structure is None else float(np.linalg.svd(structure.S, compute_uv=False)[-1])
    report = ConditionReport(
        cond_a=None,
        cond_b=BracketConditions(
            mu0=None if mu0 is None else np.asarray(mu0, dtype=float),
            jmu_sigma_min=smin,
            independent=False,
            sigma_ratio=0.0,
        ),
        cond_c=None,
    )
    reasons = [
        "A and B are linearly dependent: the pencil is degenerate and conditions (a)-(c) cannot hold"
    ]
    return Verdict(kind=INCONCLUSIVE, report=report, reasons=reasons, mu0=report.cond_b.mu0, scope=scope)


def _check_with_bracket(
    op: OperatorSpec,
    C: SymmetricForm,
    structure: PoissonStructure,
    cfg: CheckConfig,
    mu0,
    scope: str,
) -> Verdict:
    A, B = op.A, op.B
    indep_ab, _ = independence_ratio([A, B], cfg.tol)
    if not indep_ab:
        return _dependent_pair_verdict(structure, mu0, scope)
    report, reasons = evaluate_conditions(A, B, C, structure, cfg, mu0)
    if reasons:
        return Verdict(
            kind=INCONCLUSIVE,
            report=report,
            reasons=reasons,
            mu0=report.cond_b.mu0,
            bracket_form=C,
            scope=scope,
        )
    outcome = hoermander_witness(A, B, C, cfg.search)
    evidence = None
    if outcome.witness is not None:
        evidence = witness_evidence(A, B, C, outcome.witness, mu0=report.cond_b.mu0)
    else:
        logger.info("conditions hold but the witness search came back empty; attaching no witness")
    return Verdict(
        kind=NOT_LOCALLY_SOLVABLE,
        report=report,
        reasons=[],
        mu0=report.cond_b.mu0,
        bracket_form=C,
        witness=outcome.witness,
        evidence=evidence,
        scope=scope,
    )


def check_operator(
    op: OperatorSpec,
    J,
    cfg: CheckConfig | None = None,
    mu0=None,
    scope: str = "point",
) -> Verdict:
    """Run the full condition pipeline for an explicit invertible skew J.

    C is the bracket form for the structure matrix J.  The verdict is
    not-locally-solvable iff conditions (a), (b) and (c) all hold; a witness
    is then searched for and attached as evidence when found.
    """
    cfg = cfg or CheckConfig()
    structure = J if isinstance(J, PoissonStructure) else PoissonStructure(J, cfg.tol.rank_rel_tol)
    if structure.n != op.dimension:
        raise InputError("structure matrix dimension does not match the operator")
    indep_ab, _ = independence_ratio([op.A, op.B], cfg.tol)
    if not indep_ab:
        return _dependent_pair_verdict(structure, mu0, scope)
    C = poisson_bracket_forms(op.A, op.B, structure)
    return _check_with_bracket(op, C, structure, cfg, mu0, scope)


def _only_condition_b_failed(v: Verdict) -> bool:
    r = v.report
    return (
        r.cond_a is not None
        and r.cond_a.non_dissipative
        and r.cond_c is not None
        and r.cond_c.branch != BRANCH_FAIL
        and not r.cond_b.independent
    )


def check_two_step(group: TwoStepGroup, op: OperatorSpec, cfg: CheckConfig | None = None) -> Verdict:
    """Verdict for a left-invariant operator on a presented 2-step group.

    Samples directions mu until J^mu is invertible and delegates to
    check_operator; since the conditions are mu-dependent only through the
    bracket form, further nondegenerate directions are tried when
    independence was the sole failure.  With constant coefficients a
    not-locally-solvable verdict holds everywhere on the group.
    """
    cfg = cfg or CheckConfig()
    if op.dimension != group.m:
        raise InputError(f"operator dimension {op.dimension} does not match group generator count {group.m}")
    rng = np.random.default_rng(cfg.search.seed)
    tried = 0
    first: Verdict | None = None
    for mu in _mu_candidates(group.ell, cfg.mu_attempts, rng):
        tried += 1
        Jmu = j_mu(group, mu)
        if _sigma_min_rel(Jmu) <= cfg.tol.rank_rel_tol:
            continue
        v = check_operator(op, Jmu, cfg, mu0=mu, scope="group")
        if v.not_locally_solvable:
            return v
        if first is None:
            first = v
        if not _only_condition_b_failed(v):
            return v
    if first is not None:
        return first
    report = ConditionReport(
        cond_a=None,
        cond_b=BracketConditions(mu0=None, jmu_sigma_min=0.0, independent=False, sigma_ratio=0.0),
        cond_c=None,
    )
    reasons = [
        f"condition (b) unverifiable: no direction with an invertible structure matrix among {tried} sampled mu"
    ]
    return Verdict(kind=INCONCLUSIVE, report=report, reasons=reasons, scope="group")


def check_heisenberg(d: int, op: OperatorSpec, cfg: CheckConfig | None = None) -> Verdict:
    """Verdict for a left-invariant operator on the Heisenberg group of degree d.

    Uses the canonical structure matrix and the bracket normalization
    C = (AJB - BJA)/2; all conditions are invariant under rescaling of C, so
    this agrees with the general 2-step pipeline in verdict kind.
    """
    cfg = cfg or CheckConfig()
    if d < 1:
        raise InputError("d must be a positive integer")
    if op.dimension != 2 * d:
        raise InputError(f"operator dimension {op.dimension} does not match 2d = {2 * d}")
    structure = PoissonStructure(canonical_skew(d), cfg.tol.rank_rel_tol)
    indep_ab, _ = independence_ratio([op.A, op.B], cfg.tol)
    if not indep_ab:
        return _dependent_pair_verdict(structure, np.array([1.0]), "group")
    C = heisenberg_bracket_matrix(op.A, op.B, d)
    return _check_with_bracket(op, C, structure, cfg, mu0=np.array([1.0]), scope="group")


def witness_evidence(A, B, C, witness: WitnessPoint, mu0=None) -> EvidenceBundle:
    """Package a witness as the quadratic-order bracket prediction.

    Along xi(t) = xi0 + (t v', 0) with v' the witness, the symbol bracket is
    t^2 * Q_C(v') + higher order; the leading coefficient is reported and the
    cubic remainder is not evaluated.  At the group identity the generator
    block zeta0 of xi0 vanishes, so xi0 = (0, mu0).
    """
    if witness is None:
        raise InputError("witness_evidence needs a valid witness")
    x = np.asarray(witness.x, dtype=float)
    qc = evaluate(C, x)
    return EvidenceBundle(
        v_prime=x,
        qc_leading_coefficient=qc,
        scaling_power=2,
        mu0=None if mu0 is None else np.asarray(mu0, dtype=float),
        zeta0=np.zeros(x.shape[0]),
    )
