"""Brute-force oracles and instance generators for validating the primary ops.

Each oracle is deliberately algorithm-independent from the implementation it
checks: the bracket oracle contracts gradients instead of forming a bracket
matrix, the dissipativity oracle uses a dense grid with no refinement, and
the witness oracle samples the sphere and refines by sign bisection with no
Gauss-Newton step anywhere.  Shared bugs are exactly what these exist to
catch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import CheckConfig, OracleConfig, ToleranceConfig
from .dissipativity import DISSIPATIVE, NON_DISSIPATIVE
from .errors import GenerationBudgetExceeded, InputError
from .forms import PoissonStructure, SymmetricForm, _as_matrix, canonical_skew, numerical_rank, poisson_bracket_forms

_GRID_PSD_TOL = 1e-12
_STAGE1_PAIR_CAP = 4000
_STAGE2_POINT_CAP = 2500
_STAGE2_PAIR_CAP = 4000


def bracket_gradient_oracle(A, B, S, z) -> float:
    """Bracket value at z via gradient contraction, never forming a matrix C.

    Returns (grad Q_A)^T S (grad Q_B) = 4 z^T A S B z.
    """
    MA, MB = _as_matrix(A), _as_matrix(B)
    Ms = S.S if isinstance(S, PoissonStructure) else np.asarray(S, dtype=float)
    x = np.asarray(z, dtype=float).reshape(-1)
    if not (MA.shape == MB.shape == Ms.shape and MA.shape[0] == x.shape[0]):
        raise InputError("oracle operands have mismatched dimensions")
    return float((2.0 * MA @ x) @ Ms @ (2.0 * MB @ x))


def dissipativity_sweep_oracle(A, B, cfg: OracleConfig | None = None) -> str:
    """Dense-grid dissipativity decision: no refinement, fixed 1e-12 threshold."""
    cfg = cfg or OracleConfig()
    MA, MB = _as_matrix(A), _as_matrix(B)
    thetas = np.linspace(0.0, 2.0 * math.pi, cfg.grid_points, endpoint=False)
    F = np.cos(thetas)[:, None, None] * MA + np.sin(thetas)[:, None, None] * MB
    mins = np.linalg.eigvalsh(F)[:, 0]
    norms = np.linalg.norm(F, axis=(1, 2))
    if np.any(mins >= -_GRID_PSD_TOL * norms):
        return DISSIPATIVE
    return NON_DISSIPATIVE


@dataclass(frozen=True, eq=False)
class GridWitness:
    """Best feasible sphere sample by |Q_C|, plus feasibility statistics.

    Residuals are relative to the Frobenius-normalized forms; abs_qc is at
    the original scale of C and abs_qc_rel at unit scale.  max_abs_qc_rel is
    the largest normalized |Q_C| over every feasible point encountered.
    """

    x: np.ndarray | None
    abs_qa: float | None
    abs_qb: float | None
    abs_qc: float | None
    abs_qc_rel: float | None
    n_feasible: int
    max_abs_qc: float
    max_abs_qc_rel: float


def _rows_unit(X: np.ndarray) -> np.ndarray:
    return X / np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1e-300)


def _qform(M: np.ndarray, X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,jk,ik->i", X, M, X)


def _arc_bisect_a_zero(P: np.ndarray, Q: np.ndarray, qa_p: np.ndarray, Ah: np.ndarray, iters: int = 60) -> np.ndarray:
    """Bisect Q_A sign changes along the chord-induced spherical path P -> Q."""
    lo, hi = P.copy(), Q.copy()
    s_lo = qa_p.copy()
    for _ in range(iters):
        mid = _rows_unit(0.5 * (lo + hi))
        qm = _qform(Ah, mid)
        take_lo = (qm * s_lo) > 0.0
        lo[take_lo] = mid[take_lo]
        s_lo[take_lo] = qm[take_lo]
        hi[~take_lo] = mid[~take_lo]
    return _rows_unit(0.5 * (lo + hi))


def _rezero_a(X: np.ndarray, Ah: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pull points back to {Q_A = 0} by sign bisection along the gradient arc.

    Returns (corrected points, ok mask); rows whose bracket search fails are
    flagged instead of corrected.
    """
    k, _ = X.shape
    qa = _qform(Ah, X)
    G = X @ Ah.T
    Gt = G - (np.sum(G * X, axis=1, keepdims=True)) * X  # tangential gradient
    gn = np.linalg.norm(Gt, axis=1)
    ok = gn > 1e-14
    done = np.abs(qa) <= 1e-15
    U = np.zeros_like(X)
    U[ok] = Gt[ok] / gn[ok, None]

    # expand a bracket: Q_A grows along +U, so step against the sign of Q_A
    s = np.where(qa > 0.0, -1.0, 1.0) * np.minimum(0.4, np.abs(qa) / np.maximum(2.0 * gn, 1e-300) * 4.0 + 1e-6)
    far = np.cos(s)[:, None] * X + np.sin(s)[:, None] * U
    far = _rows_unit(far)
    qf = _qform(Ah, far)
    need = (~done) & ok & (qf * qa > 0.0)
    for _ in range(22):
        if not np.any(need):
            break
        s[need] *= 2.0
        overshoot = np.abs(s) > 0.5 * math.pi
        need &= ~overshoot
        ok &= ~overshoot
        far[need] = _rows_unit(np.cos(s[need])[:, None] * X[need] + np.sin(s[need])[:, None] * U[need])
        qf[need] = _qform(Ah, far[need])
        need &= qf * qa > 0.0
    ok &= (qf * qa <= 0.0) | done

    lo = X.copy()
    hi = far
    s_lo = qa.copy()
    for _ in range(50):
        mid = _rows_unit(0.5 * (lo + hi))
        qm = _qform(Ah, mid)
        take_lo = (qm * s_lo) > 0.0
        lo[take_lo] = mid[take_lo]
        s_lo[take_lo] = qm[take_lo]
        hi[~take_lo] = mid[~take_lo]
    out = _rows_unit(0.5 * (lo + hi))
    out[done] = X[done]
    ok |= done
    return out, ok


def witness_grid_oracle(A, B, C, cfg: OracleConfig | None = None) -> GridWitness:
    """Exhaustive sphere sampling plus sign-bisection refinement (n <= 4 only).

    Reports the point maximizing |Q_C| among all samples and refined points
    whose relative residuals are at most feasibility_tol.
    """
    cfg = cfg or OracleConfig()
    MA, MB, MC = _as_matrix(A), _as_matrix(B), _as_matrix(C)
    n = MA.shape[0]
    if n > 4:
        raise InputError("grid oracle is capped at dimension 4")
    norms = [np.linalg.norm(M) for M in (MA, MB, MC)]
    if min(norms) == 0.0:
        raise InputError("oracle forms must be nonzero")
    Ah, Bh, Ch = MA / norms[0], MB / norms[1], MC / norms[2]

    rng = np.random.default_rng(cfg.seed)
    X = _rows_unit(rng.standard_normal((cfg.sphere_samples, n)))
    qa = _qform(Ah, X)
    qb = _qform(Bh, X)
    tol = cfg.feasibility_tol

    pools = [X[(np.abs(qa) <= tol) & (np.abs(qb) <= tol)]]

    # stage 1: zeros of Q_A from sign changes between consecutive samples
    flip = np.flatnonzero((qa[:-1] * qa[1:]) < 0.0)
    flip = flip[(np.sum(X[flip] * X[flip + 1], axis=1) > -0.5)][:_STAGE1_PAIR_CAP]
    if flip.size:
        W = _arc_bisect_a_zero(X[flip], X[flip + 1], qa[flip].copy(), Ah)
        W = W[np.abs(_qform(Ah, W)) <= 1e-9][:_STAGE2_POINT_CAP]
    else:
        W = np.empty((0, n))

    # stage 2: walk along {Q_A = 0} to a sign change of Q_B
    if W.shape[0] >= 2:
        qbw = _qform(Bh, W)
        Gram = W @ W.T
        ii, jj = np.nonzero(np.triu(Gram >= 0.8, k=1) & (np.sign(qbw)[:, None] != np.sign(qbw)[None, :]))
        ii, jj = ii[:_STAGE2_PAIR_CAP], jj[:_STAGE2_PAIR_CAP]
        if ii.size:
            lo, hi = W[ii].copy(), W[jj].copy()
            s_lo = qbw[ii].copy()
            alive = np.ones(ii.size, dtype=bool)
            for _ in range(40):
                mid, ok = _rezero_a(_rows_unit(0.5 * (lo + hi)), Ah)
                alive &= ok
                qm = _qform(Bh, mid)
                take_lo = (qm * s_lo) > 0.0
                take_lo &= alive
                lo[take_lo] = mid[take_lo]
                s_lo[take_lo] = qm[take_lo]
                take_hi = (~take_lo) & alive
                hi[take_hi] = mid[take_hi]
            R, ok = _rezero_a(_rows_unit(0.5 * (lo + hi)), Ah)
            R = R[alive & ok]
            ra = np.abs(_qform(Ah, R))
            rb = np.abs(_qform(Bh, R))
            pools.append(R[(ra <= tol) & (rb <= tol)])

    feasible = np.vstack([p for p in pools if p.size]) if any(p.size for p in pools) else np.empty((0, n))
    if feasible.shape[0] == 0:
        return GridWitness(
            x=None, abs_qa=None, abs_qb=None, abs_qc=None, abs_qc_rel=None,
            n_feasible=0, max_abs_qc=0.0, max_abs_qc_rel=0.0,
        )
    qc_rel = np.abs(_qform(Ch, feasible))
    best = int(np.argmax(qc_rel))
    x = feasible[best]
    return GridWitness(
        x=x,
        abs_qa=float(abs(_qform(Ah, x[None, :])[0])),
        abs_qb=float(abs(_qform(Bh, x[None, :])[0])),
        abs_qc=float(qc_rel[best] * norms[2]),
        abs_qc_rel=float(qc_rel[best]),
        n_feasible=int(feasible.shape[0]),
        max_abs_qc=float(qc_rel[best] * norms[2]),
        max_abs_qc_rel=float(qc_rel[best]),
    )


def restricted_rank_property(A, T, cfg: ToleranceConfig | None = None) -> bool:
    """Whether rank(T^T A T) >= rank(A) - 2m for the injective n x (n - m) map T.

    This must hold for every injective T; it is exercised as a randomized
    always-true property, and a failure indicates a rank-tolerance bug.
    """
    cfg = cfg or ToleranceConfig()
    MA = _as_matrix(A)
    Tm = np.asarray(T, dtype=float)
    if Tm.ndim != 2 or Tm.shape[0] != MA.shape[0] or Tm.shape[1] > Tm.shape[0]:
        raise InputError("T must be an n x (n - m) matrix with m >= 0")
    sv = np.linalg.svd(Tm, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] <= cfg.rank_rel_tol * sv[0]:
        raise InputError("T is rank deficient")
    m = MA.shape[0] - Tm.shape[1]
    restricted = numerical_rank(Tm.T @ MA @ Tm, cfg.rank_rel_tol)
    full = numerical_rank(MA, cfg.rank_rel_tol)
    return restricted >= full - 2 * m


@dataclass(frozen=True, eq=False)
class PassingInstance:
    """A traceless pair passing every checker condition, with its report."""

    A: SymmetricForm
    B: SymmetricForm
    report: object  # groups.ConditionReport; typed loosely to avoid an import cycle in docs
    rejections: int


def _traceless_gaussian(rng: np.random.Generator, m: int) -> SymmetricForm:
    G = rng.standard_normal((m, m))
    M = 0.5 * (G + G.T)
    M -= (np.trace(M) / m) * np.eye(m)
    return SymmetricForm(M)


def generate_passing_instance(
    m: int,
    seed: int = 0,
    cfg: CheckConfig | None = None,
    max_attempts: int = 60,
) -> PassingInstance:
    """Rejection-sample traceless pairs until all checker conditions hold.

    Tracelessness makes non-dissipativity automatic (the identity annihilates
    both traces), so rejections come from the rank and independence
    conditions and are rare for m >= 18.
    """
    from .groups import evaluate_conditions  # local import: groups depends on nothing here

    cfg = cfg or CheckConfig()
    if m < 2 or m % 2 != 0:
        raise InputError("m must be an even integer >= 2")
    structure = PoissonStructure(canonical_skew(m // 2), cfg.tol.rank_rel_tol)
    rng = np.random.default_rng(seed)
    for attempt in range(max_attempts):
        A = _traceless_gaussian(rng, m)
        B = _traceless_gaussian(rng, m)
        try:
            C = poisson_bracket_forms(A, B, structure)
            report, reasons = evaluate_conditions(A, B, C, structure, cfg)
        except InputError:
            continue
        if not reasons:
            return PassingInstance(A=A, B=B, report=report, rejections=attempt)
    raise GenerationBudgetExceeded(f"no admissible instance at m={m} within {max_attempts} attempts")
