"""Search for distinguished points on the intersection of two quadric cones.

Everything is homogeneous, so all work happens on the unit sphere; the input
forms are normalized to unit Frobenius norm at entry, which makes residual
thresholds scale-free and the iterate sequence invariant under positive
rescaling of the inputs.  Residuals recorded on a WitnessPoint are therefore
relative: residual_A = |Q_A(x)| / ||A||_F.  qc_value is reported on the
original scale of C.

Two searches are provided.  ``transversal_point`` looks for a common zero of
Q_A and Q_B where the normals Ax and Bx are independent (multi-start damped
Gauss-Newton projection, best transversality kept).  ``hoermander_witness``
looks for a common zero where a third form Q_C does not vanish: projection
followed by ascent of |Q_C| along the intersection manifold, stepping in the
tangent space {Ax, Bx, x}^perp and re-projecting.

A failed search is a result, not an exception (unless
budget_exhausted_is_error is set): absence of a witness is never proven by
the search, only reported as not found.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import SearchConfig
from .errors import InputError, SearchBudgetExceeded
from .forms import Pencil, _as_matrix

logger = logging.getLogger(__name__)

_ASCENT_MAX_ITERS = 80
_MAX_EIGEN_STARTS = 8


@dataclass(frozen=True, eq=False)
class WitnessPoint:
    """Unit vector on (or numerically on) the variety, with its margins.

    residual_A and residual_B are |Q(x)| for the unit-Frobenius-normalized
    forms; transversality is the smallest singular value of the normalized
    [Ax | Bx]; qc_value, when applicable, is Q_C(x) at the original scale.
    """

    x: np.ndarray
    residual_A: float
    residual_B: float
    transversality: float
    qc_value: float | None = None


@dataclass(frozen=True, eq=False)
class SearchOutcome:
    """Result of a multi-start search plus the diagnostics tests rely on.

    max_abs_qc is the largest |Q_C(x)| (normalized C) seen at any iterate
    meeting the residual tolerance; on negative-control instances it stays
    near zero and is the evidence that the variety annihilates Q_C.
    """

    witness: WitnessPoint | None
    starts_used: int
    converged: int
    max_abs_qc: float = 0.0

    @property
    def found(self) -> bool:
        return self.witness is not None


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise InputError("cannot normalize the zero vector")
    return v / nrm


def _normalized(M) -> np.ndarray:
    E = _as_matrix(M)
    nrm = np.linalg.norm(E)
    if nrm == 0.0:
        raise InputError("form is identically zero")
    return E / nrm


def _residuals(Ah: np.ndarray, Bh: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    return abs(float(x @ Ah @ x)), abs(float(x @ Bh @ x))


def _transversality(Ah: np.ndarray, Bh: np.ndarray, x: np.ndarray) -> float:
    return float(np.linalg.svd(np.column_stack([Ah @ x, Bh @ x]), compute_uv=False)[-1])


def _gauss_newton(x0: np.ndarray, Ah: np.ndarray, Bh: np.ndarray, cfg: SearchConfig) -> tuple[np.ndarray, bool]:
    """Damped Gauss-Newton on r(x) = (Q_A(x), Q_B(x)), renormalized each step.

    Iterates past residual_tol down to stagnation: where the variety has a
    degenerate (vanishing-gradient) branch, residual eps only pins the point
    to sqrt(eps) of it, so accepting at the tolerance threshold would leave
    sqrt(residual_tol)-sized phantom values of other forms along the branch.
    """
    x = _unit(x0)
    deep_tol = 1e-4 * cfg.residual_tol

    def ok(r: np.ndarray) -> bool:
        return bool(np.max(np.abs(r)) <= cfg.residual_tol)

    r = np.array([float(x @ Ah @ x), float(x @ Bh @ x)])
    for _ in range(cfg.max_newton_iters):
        if np.max(np.abs(r)) <= deep_tol:
            return x, True
        J = np.vstack([2.0 * (Ah @ x), 2.0 * (Bh @ x)])
        sv = np.linalg.svd(J, compute_uv=False)
        if sv[-1] <= 1e-13 * max(sv[0], 1e-30):
            return x, ok(r)  # gradients collapsed; restart from elsewhere
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        norm_r = np.linalg.norm(r)
        alpha = 1.0
        for _ in range(30):
            x_try = _unit(x + alpha * step)
            r_try = np.array([float(x_try @ Ah @ x_try), float(x_try @ Bh @ x_try)])
            if np.linalg.norm(r_try) < norm_r:
                x, r = x_try, r_try
                break
            alpha *= 0.5
        else:
            return x, ok(r)  # rounding floor reached
    return x, ok(r)


def _start_points(Ah: np.ndarray, cfg: SearchConfig) -> list[np.ndarray]:
    """Deterministic eigen-mix starts followed by seeded Gaussian directions.

    Mixing a positive and a negative eigendirection of A with weights
    sqrt(|lam_-|), sqrt(lam_+) gives an exact zero of Q_A, so the projection
    only has to bend toward {Q_B = 0}.
    """
    n = Ah.shape[0]
    starts: list[np.ndarray] = []
    w, V = np.linalg.eigh(Ah)
    pos = [i for i in range(n) if w[i] > 1e-12][::-1]  # strongest first
    neg = [i for i in range(n) if w[i] < -1e-12]
    for i in pos[:2]:
        for j in neg[:2]:
            a = math.sqrt(abs(w[j]))
            b = math.sqrt(w[i])
            starts.append(_unit(a * V[:, i] + b * V[:, j]))
            starts.append(_unit(a * V[:, i] - b * V[:, j]))
            if len(starts) >= _MAX_EIGEN_STARTS:
                break
        if len(starts) >= _MAX_EIGEN_STARTS:
            break
    rng = np.random.default_rng(cfg.seed)
    while len(starts) < cfg.max_starts:
        starts.append(_unit(rng.standard_normal(n)))
    return starts[: cfg.max_starts]


def project_to_variety(x0, A, B, cfg: SearchConfig | None = None) -> np.ndarray | None:
    """Project a point onto {Q_A = 0, Q_B = 0} on the unit sphere.

    Returns the unit vector with both relative residuals at most
    residual_tol, or None when the iteration does not converge.
    """
    cfg = cfg or SearchConfig()
    Ah, Bh = _normalized(A), _normalized(B)
    x = np.asarray(x0, dtype=float).reshape(-1)
    if x.shape[0] != Ah.shape[0]:
        raise InputError("start point dimension does not match the forms")
    x, ok = _gauss_newton(x, Ah, Bh, cfg)
    return x if ok else None


def transversal_point(pencil: Pencil, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Find a common zero of Q_A, Q_B where the normals Ax, Bx are independent.

    Multi-start projection; among converged starts the one with the best
    transversality is kept, and succeeds iff it clears transversality_floor.
    """
    cfg = cfg or SearchConfig()
    Ah, Bh = _normalized(pencil.A), _normalized(pencil.B)
    best_x: np.ndarray | None = None
    best_tv = -1.0
    converged = 0
    for x0 in _start_points(Ah, cfg):
        x, ok = _gauss_newton(x0, Ah, Bh, cfg)
        if not ok:
            continue
        converged += 1
        tv = _transversality(Ah, Bh, x)
        if tv > best_tv:
            best_tv, best_x = tv, x
    if best_x is not None and best_tv >= cfg.transversality_floor:
        ra, rb = _residuals(Ah, Bh, best_x)
        wit = WitnessPoint(x=best_x, residual_A=ra, residual_B=rb, transversality=best_tv)
        return SearchOutcome(witness=wit, starts_used=cfg.max_starts, converged=converged)
    if cfg.budget_exhausted_is_error:
        raise SearchBudgetExceeded(
            f"no transversal intersection point found in {cfg.max_starts} starts"
        )
    return SearchOutcome(witness=None, starts_used=cfg.max_starts, converged=converged)


def _tangential(g: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """Component of g orthogonal to the columns of frame."""
    Q, _ = np.linalg.qr(frame)
    return g - Q @ (Q.T @ g)


def _ascend_qc(
    x: np.ndarray,
    Ah: np.ndarray,
    Bh: np.ndarray,
    Ch: np.ndarray,
    cfg: SearchConfig,
) -> tuple[np.ndarray, float]:
    """Increase |Q_C| along the variety; returns final point and peak |Q_C| seen."""
    max_seen = 0.0

    def feasible_qc(p: np.ndarray) -> float | None:
        ra, rb = _residuals(Ah, Bh, p)
        if max(ra, rb) > cfg.residual_tol:
            return None
        return float(p @ Ch @ p)

    qc = feasible_qc(x)
    if qc is None:
        return x, max_seen
    max_seen = abs(qc)
    for _ in range(_ASCENT_MAX_ITERS):
        sign = 1.0 if qc >= 0.0 else -1.0
        g = sign * 2.0 * (Ch @ x)
        frame = np.column_stack([Ah @ x, Bh @ x, x])
        g_t = _tangential(g, frame)
        gn = np.linalg.norm(g_t)
        if gn <= 1e-12 * max(1.0, abs(qc)):
            break
        direction = g_t / gn
        eta = 0.3
        improved = False
        for _ in range(14):
            x_try, ok = _gauss_newton(_unit(x + eta * direction), Ah, Bh, cfg)
            if ok:
                qc_try = float(x_try @ Ch @ x_try)
                max_seen = max(max_seen, abs(qc_try))
                if abs(qc_try) > abs(qc) * (1.0 + 1e-12) + 1e-16:
                    x, qc = x_try, qc_try
                    improved = True
                    break
            eta *= 0.5
        if not improved:
            break
    return x, max_seen


def hoermander_witness(A, B, C, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Find a unit x with Q_A(x) = Q_B(x) = 0 and |Q_C(x)| bounded away from 0.

    Multi-start projection to the variety, then tangent ascent of |Q_C|.
    Success requires relative residuals at most residual_tol and
    |Q_C(x)| / ||C||_F at least qc_floor; the first start satisfying this is
    returned (iteration order is deterministic in the seed).

    A found value must additionally clear 10 * sqrt(residual): near a branch
    where the gradients vanish, residual slack eps only pins a point to
    sqrt(eps) of the variety, so |Q_C| of that order is indistinguishable
    from zero and is not accepted as a witness.
    """
    cfg = cfg or SearchConfig()
    Ah, Bh, Ch = _normalized(A), _normalized(B), _normalized(C)
    c_norm = float(np.linalg.norm(_as_matrix(C)))
    if Ah.shape != Bh.shape or Ah.shape != Ch.shape:
        raise InputError("forms have mismatched dimensions")
    converged = 0
    max_abs_qc = 0.0
    for used, x0 in enumerate(_start_points(Ah, cfg), start=1):
        x, ok = _gauss_newton(x0, Ah, Bh, cfg)
        if not ok:
            continue
        converged += 1
        x, peak = _ascend_qc(x, Ah, Bh, Ch, cfg)
        max_abs_qc = max(max_abs_qc, peak)
        qc = float(x @ Ch @ x)
        ra, rb = _residuals(Ah, Bh, x)
        degeneracy_guard = 10.0 * math.sqrt(max(ra, rb))
        if max(ra, rb) <= cfg.residual_tol and abs(qc) >= max(cfg.qc_floor, degeneracy_guard):
            wit = WitnessPoint(
                x=x,
                residual_A=ra,
                residual_B=rb,
                transversality=_transversality(Ah, Bh, x),
                qc_value=qc * c_norm,
            )
            return SearchOutcome(witness=wit, starts_used=used, converged=converged, max_abs_qc=max_abs_qc)
    logger.debug("witness search exhausted %d starts (%d converged)", cfg.max_starts, converged)
    if cfg.budget_exhausted_is_error:
        raise SearchBudgetExceeded(f"no bracket witness found in {cfg.max_starts} starts")
    return SearchOutcome(witness=None, starts_used=cfg.max_starts, converged=converged, max_abs_qc=max_abs_qc)
