"""Dissipativity decisions for symmetric pencils, with trace certificates.

A pair (A, B) is non-dissipative when 0 is the only positive semidefinite
matrix in span{A, B}.  The decision of record is a sweep: the pair is
dissipative iff some direction F(theta) = cos(theta) A + sin(theta) B has
lambda_min(F) >= -psd_tol * ||F||.  A non-dissipative verdict is backed, when
possible, by a positive definite P with tr(PA) = tr(PB) = 0 -- the separating
functional between the semidefinite cone and the span -- found as the
analytic center of {P > 0 : tr(PA) = tr(PB) = 0, tr P = n}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .config import ToleranceConfig
from .errors import InputError
from .forms import Pencil

logger = logging.getLogger(__name__)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

NON_DISSIPATIVE = "non_dissipative"
DISSIPATIVE = "dissipative"


@dataclass(frozen=True, eq=False)
class DissipativityDecision:
    """Outcome of the sweep, plus certificate or witness.

    margin is the raw lambda_min at the extremal direction; margin_rel the
    same value divided by ||F(theta)||_F (the quantity actually thresholded).
    For a dissipative verdict, witness_theta locates a member with
    lambda_min >= -psd_tol * ||F||.  For a non-dissipative verdict,
    certificate_P is a positive definite matrix annihilating both traces,
    unless the certificate search ran out of budget (certificate_unavailable;
    the verdict itself still stands on the sweep).
    """

    verdict: str
    margin: float
    margin_rel: float
    witness_theta: float | None = None
    witness_F: np.ndarray | None = None
    certificate_P: np.ndarray | None = None
    certificate_unavailable: bool = False
    trace_residuals: tuple[float, float] | None = None

    @property
    def non_dissipative(self) -> bool:
        return self.verdict == NON_DISSIPATIVE


def _lambda_min_rel(A: np.ndarray, B: np.ndarray, theta: float) -> tuple[float, float]:
    F = math.cos(theta) * A + math.sin(theta) * B
    lam = float(np.linalg.eigvalsh(F)[0])
    nrm = float(np.linalg.norm(F))
    return lam / nrm if nrm > 0.0 else 0.0, lam


def _golden_refine(A, B, lo: float, hi: float, width: float) -> tuple[float, float]:
    """Golden-section maximization of lambda_min(F(theta))/||F(theta)|| on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, _ = _lambda_min_rel(A, B, c)
    fd, _ = _lambda_min_rel(A, B, d)
    while b - a > width:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc, _ = _lambda_min_rel(A, B, c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd, _ = _lambda_min_rel(A, B, d)
    theta = 0.5 * (a + b)
    rel, _ = _lambda_min_rel(A, B, theta)
    return theta, rel


def _sweep(A: np.ndarray, B: np.ndarray, cfg: ToleranceConfig) -> tuple[float, float]:
    """Best (theta, lambda_min/||F||) over the circle: dense grid + refinement."""
    m = cfg.sweep_points
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    F = np.cos(thetas)[:, None, None] * A + np.sin(thetas)[:, None, None] * B
    mins = np.linalg.eigvalsh(F)[:, 0]
    norms = np.linalg.norm(F, axis=(1, 2))
    rel = np.where(norms > 0.0, mins / np.maximum(norms, 1e-300), 0.0)

    prev = np.roll(rel, 1)
    nxt = np.roll(rel, -1)
    local_max = np.flatnonzero((rel >= prev) & (rel >= nxt))
    # keep the strongest peaks; the global max is always among them
    order = np.argsort(rel[local_max])[::-1][:16]
    step = 2.0 * math.pi / m

    best_theta = float(thetas[int(np.argmax(rel))])
    best_rel = float(np.max(rel))
    for idx in local_max[order]:
        lo = thetas[idx] - step
        hi = thetas[idx] + step
        th, r = _golden_refine(A, B, lo, hi, cfg.sweep_refine_width)
        if r > best_rel:
            best_rel, best_theta = r, th
    return best_theta % (2.0 * math.pi), best_rel


def _traces(X: np.ndarray, Y: np.ndarray) -> float:
    return float(np.tensordot(X, Y))


def _analytic_center(A: np.ndarray, B: np.ndarray, cfg: ToleranceConfig) -> np.ndarray | None:
    """Maximize log det P over {tr(PA) = tr(PB) = 0, tr P = n} by projected Newton.

    Phase 1 runs the same Newton iteration on log det(P + tI), shrinking the
    shift t whenever the iterate is centered, until P itself is positive
    definite.  Returns None when the iteration budget is exhausted.
    """
    n = A.shape[0]
    I = np.eye(n)
    G = (A, B, I)

    # least-norm feasible start: correct I along the constraint normals
    gram = np.array([[_traces(Gi, Gj) for Gj in G] for Gi in G])
    rhs = np.array([-np.trace(A), -np.trace(B), 0.0])
    coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    P = I + coef[0] * A + coef[1] * B + coef[2] * I
    P = 0.5 * (P + P.T)

    lam_min = float(np.linalg.eigvalsh(P)[0])
    t = 0.0 if lam_min > 1e-8 else 1.5 * max(0.0, -lam_min) + 0.1

    budget = cfg.cert_max_iters
    while budget > 0:
        budget -= 1
        Y = P + t * I
        try:
            np.linalg.cholesky(Y)
        except np.linalg.LinAlgError:
            return None
        b = np.array([_traces(Y, Gj) for Gj in G])
        N = np.array([[_traces(Y @ Gk @ Y, Gj) for Gk in G] for Gj in G])
        lam, *_ = np.linalg.lstsq(N, b, rcond=None)
        Delta = Y - Y @ (lam[0] * A + lam[1] * B + lam[2] * I) @ Y
        Delta = 0.5 * (Delta + Delta.T)
        M = np.linalg.solve(Y, Delta)
        decrement = math.sqrt(max(float(np.tensordot(M, M.T)), 0.0))

        if decrement <= 1e-11:
            if t == 0.0:
                break
            mu = float(np.linalg.eigvalsh(P)[0])
            t = 0.0 if mu > 0.0 else 0.5 * (t - mu)
            continue

        step = 1.0 if decrement < 0.25 else 1.0 / (1.0 + decrement)
        for _ in range(40):
            trial = P + step * Delta
            try:
                np.linalg.cholesky(trial + t * I)
                P = 0.5 * (trial + trial.T)
                break
            except np.linalg.LinAlgError:
                step *= 0.5
        else:
            return None
    else:
        return None

    if float(np.linalg.eigvalsh(P)[0]) <= 0.0:
        return None
    return P


def is_non_dissipative(pencil: Pencil, cfg: ToleranceConfig | None = None) -> DissipativityDecision:
    """Decide whether (A, B) is a non-dissipative pair.

    Dissipative iff the sweep finds theta with
    lambda_min(F(theta)) >= -psd_tol * ||F(theta)||; otherwise the pair is
    non-dissipative and a trace certificate is searched for.  Certificate
    failure flags the decision but never flips the verdict.
    """
    cfg = cfg or ToleranceConfig()
    A, B = pencil.A.entries, pencil.B.entries
    theta, rel = _sweep(A, B, cfg)
    F = math.cos(theta) * A + math.sin(theta) * B
    margin = rel * float(np.linalg.norm(F))

    if rel >= -cfg.psd_tol:
        return DissipativityDecision(
            verdict=DISSIPATIVE,
            margin=margin,
            margin_rel=rel,
            witness_theta=theta,
            witness_F=F,
        )

    P = _analytic_center(A, B, cfg)
    if P is None:
        logger.warning("trace certificate search exhausted its budget; verdict stands on the sweep")
        return DissipativityDecision(
            verdict=NON_DISSIPATIVE,
            margin=margin,
            margin_rel=rel,
            witness_theta=theta,
            certificate_unavailable=True,
        )
    res_a = abs(_traces(P, A)) / max(np.linalg.norm(P) * np.linalg.norm(A), 1e-300)
    res_b = abs(_traces(P, B)) / max(np.linalg.norm(P) * np.linalg.norm(B), 1e-300)
    if max(res_a, res_b) > 1e-10:
        logger.warning("certificate trace residuals %.2e/%.2e above tolerance; flagged", res_a, res_b)
        return DissipativityDecision(
            verdict=NON_DISSIPATIVE,
            margin=margin,
            margin_rel=rel,
            witness_theta=theta,
            certificate_unavailable=True,
        )
    return DissipativityDecision(
        verdict=NON_DISSIPATIVE,
        margin=margin,
        margin_rel=rel,
        witness_theta=theta,
        certificate_P=P,
        trace_residuals=(res_a, res_b),
    )
