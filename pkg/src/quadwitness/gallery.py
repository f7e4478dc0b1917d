"""Named example pairs and triples with known, hand-checkable behavior.

These are the negative controls of the test suite and handy CLI demo inputs:
pairs whose quadric intersection is degenerate in some instructive way, or
whose bracket form vanishes identically on the intersection even though all
three forms are linearly independent.

Coordinates on R^(2d) are ordered (x_1..x_d, y_1..y_d) and the canonical
structure matrix is [[0, I_d], [-I_d, 0]].
"""

from __future__ import annotations

import numpy as np

from .forms import SymmetricForm, canonical_skew, form_from_monomials, poisson_bracket_forms


def origin_only_pair() -> tuple[SymmetricForm, SymmetricForm]:
    """Q_A = x^2 - y^2, Q_B = xy on R^2: the only common zero is the origin.

    A rank-2 pair where no transversal intersection point exists; the
    analogue of the transversality statement fails below rank 3.
    """
    A = form_from_monomials(2, {(0, 0): 1.0, (1, 1): -1.0})
    B = form_from_monomials(2, {(0, 1): 1.0})
    return A, B


def tilted_hyperbolic_pair(eps: float = 0.25) -> tuple[SymmetricForm, SymmetricForm]:
    """Q_A = x^2 - y^2 and Q_B = x^2 - 2*eps*xy - y^2: boundaries meet only at 0."""
    A = form_from_monomials(2, {(0, 0): 1.0, (1, 1): -1.0})
    B = form_from_monomials(2, {(0, 0): 1.0, (0, 1): -2.0 * eps, (1, 1): -1.0})
    return A, B


def two_plane_pair() -> tuple[SymmetricForm, SymmetricForm]:
    """Q_A = x1 y2 + x2 y1, Q_B = x1 y1 - x2 y2 on R^4.

    Every member of the pencil has full rank 4, yet the common zero set is
    the union of the two coordinate 2-planes {x = 0} and {y = 0}, and the
    bracket form vanishes on it.  The pair is non-dissipative and {A, B, C}
    is linearly independent, so this marks the low-rank frontier where the
    rank conditions of the checker are genuinely needed.
    """
    A = form_from_monomials(4, {(0, 3): 1.0, (1, 2): 1.0})
    B = form_from_monomials(4, {(0, 2): 1.0, (1, 3): -1.0})
    return A, B


def two_plane_bracket_target() -> np.ndarray:
    """Matrix of 2*(x1 y2 - x2 y1), the bracket line of two_plane_pair."""
    return form_from_monomials(4, {(0, 3): 2.0, (1, 2): -2.0}).entries


def isotropic_radical_pair(d: int) -> tuple[SymmetricForm, SymmetricForm, SymmetricForm]:
    """Pair on R^(2d) whose joint kernel is the isotropic line R*e_{y_d}.

    Q_A = x1^2 - (y1^2 + .. + y_{d-1}^2 + x2^2 + .. + x_{d-1}^2),
    Q_B = x1*x_d, and C is their bracket for the canonical structure
    (proportional to y1*x_d).  Non-dissipative, {A, B, C} independent, yet
    Q_C vanishes on the whole intersection {Q_A = 0, Q_B = 0}: the
    symplectic-kernel requirement cannot be dropped.
    """
    if d < 2:
        raise ValueError("needs d >= 2")
    n = 2 * d
    terms = {(0, 0): 1.0}
    for i in range(1, d):
        terms[(d + i - 1, d + i - 1)] = -1.0  # y_1 .. y_{d-1}
    for i in range(2, d):
        terms[(i - 1, i - 1)] = -1.0  # x_2 .. x_{d-1}
    A = form_from_monomials(n, terms)
    B = form_from_monomials(n, {(0, d - 1): 1.0})
    C = poisson_bracket_forms(A, B, canonical_skew(d))
    return A, B, C


def annihilated_nonbracket_triple(d: int, j: int = 1) -> tuple[SymmetricForm, SymmetricForm, SymmetricForm]:
    """Triple on R^(2d) with trivial joint kernel where Q_C dies on the variety.

    Q_A = x1^2 - (y1^2 + .. + y_d^2 + x2^2 + .. + x_{d-1}^2), Q_B = x1*x_d,
    and Q_C = y_j * x_d.  Here C is NOT the bracket of A and B, and despite
    full independence Q_C vanishes on {Q_A = 0, Q_B = 0}: the bracket
    hypothesis on C cannot be dropped either.
    """
    if d < 2:
        raise ValueError("needs d >= 2")
    if not (1 <= j <= d):
        raise ValueError("j must be in 1..d")
    n = 2 * d
    terms = {(0, 0): 1.0}
    for i in range(1, d + 1):
        terms[(d + i - 1, d + i - 1)] = -1.0  # y_1 .. y_d
    for i in range(2, d):
        terms[(i - 1, i - 1)] = -1.0  # x_2 .. x_{d-1}
    A = form_from_monomials(n, terms)
    B = form_from_monomials(n, {(0, d - 1): 1.0})
    C = form_from_monomials(n, {(d + j - 1, d - 1): 1.0})
    return A, B, C
