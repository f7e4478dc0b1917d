"""Tolerance and budget configuration, shared by every pipeline stage.

All tolerances are relative: rank thresholds against the largest singular
value, semidefiniteness thresholds against the Frobenius norm of the matrix
under test.  Every randomized routine takes its seed from here so that
(input, seed, config) determines the output exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds for rank, semidefiniteness and certificate checks.

    rank_rel_tol: singular values below rank_rel_tol * sigma_max count as zero.
    psd_tol: lambda_min >= -psd_tol * ||F||_F counts as positive semidefinite.
    sweep_points: uniform theta samples of the circle sweep.
    sweep_refine_width: golden-section refinement stops at this bracket width.
    cert_max_iters: Newton iteration budget for the trace certificate search.
    rank_theta_samples: random pencil directions probed for min/max rank.
    """

    rank_rel_tol: float = 1e-10
    psd_tol: float = 1e-9
    sweep_points: int = 720
    sweep_refine_width: float = 1e-12
    cert_max_iters: int = 120
    rank_theta_samples: int = 24

    def __post_init__(self) -> None:
        if self.rank_rel_tol <= 0 or self.psd_tol <= 0 or self.sweep_refine_width <= 0:
            raise InputError("tolerances must be positive")
        if self.sweep_points < 8 or self.rank_theta_samples < 1:
            raise InputError("sample counts too small")


@dataclass(frozen=True)
class SearchConfig:
    """Budgets and floors for the witness searches.

    Residuals are measured against forms normalized to unit Frobenius norm,
    so the thresholds are scale-free.
    """

    seed: int = 0
    max_starts: int = 64
    max_newton_iters: int = 100
    residual_tol: float = 1e-10
    transversality_floor: float = 1e-8
    qc_floor: float = 1e-8
    budget_exhausted_is_error: bool = False

    def __post_init__(self) -> None:
        if self.max_starts < 1 or self.max_newton_iters < 1:
            raise InputError("search budgets must be at least 1")
        if min(self.residual_tol, self.transversality_floor, self.qc_floor) <= 0:
            raise InputError("search tolerances must be positive")


@dataclass(frozen=True)
class OracleConfig:
    """Budgets for the brute-force oracles."""

    grid_points: int = 10_000
    sphere_samples: int = 1_000_000
    seed: int = 0
    feasibility_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.grid_points < 1 or self.sphere_samples < 1:
            raise InputError("oracle sample counts must be positive")
        if self.feasibility_tol <= 0:
            raise InputError("feasibility tolerance must be positive")


@dataclass(frozen=True)
class CheckConfig:
    """Bundle of tolerances and search budgets for the verdict pipeline."""

    tol: ToleranceConfig = ToleranceConfig()
    search: SearchConfig = SearchConfig()
    mu_attempts: int = 32

    def __post_init__(self) -> None:
        if self.mu_attempts < 1:
            raise InputError("mu_attempts must be at least 1")
