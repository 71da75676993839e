"""LP decoding over the small polytope, with dual certificates.

The channel convention is additive noise on the all-zero codeword: the
received vector x gives the cost vector (1 - 2x), and decoding minimizes
that cost over the small polytope.  The zero point is always feasible
with value 0, so the LP value is never positive; a strictly negative
value means some pseudo-codeword beats the transmitted word and decoding
fails.  Noise vectors are plain float arrays.

The dual program certifies the primal value.  Its variables are one phi
per bit, one theta per check, one lambda per Tanner-graph edge, all
free.  Feasibility couples them through both settings of each bit and
every even-weight local word of each check; by strong duality the
optimal Sum(phi) + Sum(theta) equals the primal LP value.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .codes import ParityCheckMatrix
from .lpsolve import LpProblem, solve
from .polytope import LinearConstraintSet, build_ps

__all__ = [
    "CORRECT_TOL",
    "DecodeOutcome",
    "DualCertificate",
    "lp_decode",
    "dual_decode",
    "in_correct_domain",
]

# looser than the solver's 1e-9 to absorb accumulated error; classifying
# a boundary point as correct is the safe direction for weight estimates
CORRECT_TOL = 1e-7


@dataclass
class DecodeOutcome:
    lp_value: float
    beta: np.ndarray
    correct: bool
    dual: "DualCertificate | None" = None


@dataclass
class DualCertificate:
    """Optimal dual variables; lam is ordered by (check, position).

    Edge k of check a sits at flat index edge_offset(a) + k where checks
    are laid out in index order, matching the order of check_neighbors.
    """

    phi: np.ndarray
    theta: np.ndarray
    lam: np.ndarray
    value: float

    def max_violation(self, h: ParityCheckMatrix, x: np.ndarray) -> float:
        """Worst feasibility violation of this certificate, 0 if feasible."""
        cost = 1.0 - 2.0 * np.asarray(x, dtype=float)
        worst = 0.0
        offsets = _edge_offsets(h)
        lam_by_bit = np.zeros(h.n_bits)
        for a, nb in enumerate(h.check_neighbors):
            for t, i in enumerate(nb):
                lam_by_bit[i] += self.lam[offsets[a] + t]
        worst = max(worst, float(np.max(self.phi + lam_by_bit)))
        worst = max(worst, float(np.max(self.phi - lam_by_bit - cost)))
        for a, nb in enumerate(h.check_neighbors):
            lam_a = self.lam[offsets[a] : offsets[a] + len(nb)]
            for mask in _even_masks(len(nb)):
                signs = np.array(
                    [-1.0 if (mask >> t) & 1 else 1.0 for t in range(len(nb))]
                )
                worst = max(worst, float(self.theta[a] - signs @ lam_a))
        return worst


@lru_cache(maxsize=None)
def _even_masks(degree: int) -> tuple[int, ...]:
    return tuple(m for m in range(1 << degree) if m.bit_count() % 2 == 0)


@lru_cache(maxsize=None)
def _edge_offsets(h: ParityCheckMatrix) -> tuple[int, ...]:
    offsets = []
    acc = 0
    for nb in h.check_neighbors:
        offsets.append(acc)
        acc += len(nb)
    return tuple(offsets)


@lru_cache(maxsize=None)
def _dual_template(h: ParityCheckMatrix):
    """x-independent part of the dual constraint system.

    Variable layout: phi = 0..N-1, theta = N..N+M-1, lambda = N+M..
    Rows: per-bit sigma=0 rows, per-bit sigma=1 rows (their RHS is the
    only place x enters), then per-check rows over even local words in
    ascending bitmask order.
    """
    n, m = h.n_bits, h.n_checks
    offsets = _edge_offsets(h)
    lam0 = n + m
    edges_of_bit: list[list[int]] = [[] for _ in range(n)]
    for a, nb in enumerate(h.check_neighbors):
        for t, i in enumerate(nb):
            edges_of_bit[i].append(lam0 + offsets[a] + t)

    indices: list[tuple[int, ...]] = []
    coeffs: list[tuple[float, ...]] = []
    rhs: list[float] = []
    for i in range(n):  # phi_i + sum lam <= 0
        indices.append(tuple([i] + edges_of_bit[i]))
        coeffs.append((1.0,) + (1.0,) * len(edges_of_bit[i]))
        rhs.append(0.0)
    for i in range(n):  # phi_i - sum lam <= 1 - 2 x_i
        indices.append(tuple([i] + edges_of_bit[i]))
        coeffs.append((1.0,) + (-1.0,) * len(edges_of_bit[i]))
        rhs.append(0.0)
    for a, nb in enumerate(h.check_neighbors):
        d = len(nb)
        lam_ids = tuple(lam0 + offsets[a] + t for t in range(d))
        for mask in _even_masks(d):
            # theta_a - sum_t (1 - 2 sigma_t) lam_t <= 0
            indices.append((n + a,) + lam_ids)
            coeffs.append(
                (1.0,) + tuple(1.0 if (mask >> t) & 1 else -1.0 for t in range(d))
            )
            rhs.append(0.0)
    n_vars = lam0 + h.n_edges
    return n_vars, tuple(indices), tuple(coeffs), tuple(rhs)


def _dual_constraints(h: ParityCheckMatrix, x: np.ndarray) -> LinearConstraintSet:
    n_vars, indices, coeffs, base_rhs = _dual_template(h)
    n = h.n_bits
    rhs = list(base_rhs)
    cost = 1.0 - 2.0 * x
    for i in range(n):
        rhs[n + i] = float(cost[i])
    return LinearConstraintSet(
        n_vars=n_vars,
        row_indices=indices,
        row_coeffs=coeffs,
        row_rels=("<=",) * len(indices),
        row_rhs=tuple(rhs),
        lower=(-np.inf,) * n_vars,
        upper=(np.inf,) * n_vars,
    )


def _check_length(h: ParityCheckMatrix, x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (h.n_bits,):
        raise ValueError(
            f"noise vector has shape {arr.shape}, code expects ({h.n_bits},)"
        )
    if not np.isfinite(arr).all():
        raise ValueError("noise vector entries must be finite")
    return arr


def lp_decode(
    h: ParityCheckMatrix, x: np.ndarray, with_dual: bool = False
) -> DecodeOutcome:
    """Minimize (1 - 2x) . beta over the small polytope.

    The returned beta is a vertex.  correct is True when the value is
    zero within CORRECT_TOL, i.e. the zero codeword survives; ties count
    as correct because failure requires a strictly negative value.
    """
    arr = _check_length(h, x)
    sol = solve(LpProblem(build_ps(h), 1.0 - 2.0 * arr, "min"))
    outcome = DecodeOutcome(
        lp_value=sol.objective_value,
        beta=sol.point,
        correct=sol.objective_value >= -CORRECT_TOL,
    )
    if with_dual:
        outcome.dual = dual_decode(h, arr)
    return outcome


def dual_decode(h: ParityCheckMatrix, x: np.ndarray) -> DualCertificate:
    """Maximize Sum(phi) + Sum(theta) over the dual feasible set."""
    arr = _check_length(h, x)
    cs = _dual_constraints(h, arr)
    objective = np.zeros(cs.n_vars)
    objective[: h.n_bits + h.n_checks] = 1.0
    sol = solve(LpProblem(cs, objective, "max"))
    n, m = h.n_bits, h.n_checks
    return DualCertificate(
        phi=sol.point[:n],
        theta=sol.point[n : n + m],
        lam=sol.point[n + m :],
        value=sol.objective_value,
    )


def in_correct_domain(h: ParityCheckMatrix, x: np.ndarray) -> bool:
    """True iff x decodes to the zero codeword (LP value 0 within tol)."""
    return lp_decode(h, x).correct
