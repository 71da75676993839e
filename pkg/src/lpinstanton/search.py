"""Low-weight pseudo-codeword and instanton search.

The effective weight of a nonzero belief vector is

    w(b) = (sum b)^2 / sum(b^2),

and the noise vector that makes the decoder indifferent between b and
the zero codeword (the instanton candidate) is

    x = b * sum(b) / (2 sum(b^2)),

whose squared length is w/4.  Minimizing w over the cone cross-section
is equivalent to maximizing sum(b^2), a concave-maximization problem
attained at a vertex; the iteration here replaces sum(b^2) with its
tangent b . b_k at the current point, which only improves (Cauchy and
Schwarz), solves the LP, and repeats until the vertex stops moving.

The older search iterates over the full small polytope instead: decode
the instanton of the current point and feed the optimal vertex back in.
Both produce nonincreasing weight traces; the cone version cannot leave
the set of vertices adjacent to the origin, which is where the lowest
weights live.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import ParityCheckMatrix
from .decoder import in_correct_domain
from .lpsolve import LpProblem, LpSolution, solve
from .polytope import LinearConstraintSet, build_cone, build_ps, contains

__all__ = [
    "CONVERGE_TOL",
    "SearchResult",
    "EpsilonScan",
    "pseudo_weight",
    "instanton_from",
    "sample_initial",
    "moa_step",
    "moa_search",
    "pcs_step",
    "pcs_search",
    "epsilon_scan",
    "bracketing_check",
]

CONVERGE_TOL = 1e-9
# membership guard for user-supplied starting points; solver-produced
# iterates are feasible to solver tolerance and pass with a wide margin
MEMBER_TOL = 1e-6
FEAS_SAMPLE_TOL = 1e-9


@dataclass
class SearchResult:
    endpoint: np.ndarray
    weight: float
    instanton: np.ndarray
    weight_trace: list[float]
    iterations: int
    algorithm: str
    converged: bool


@dataclass
class EpsilonScan:
    epsilons: tuple[float, ...]
    q_values: tuple[float, ...]
    epsilon_star: float | None


def _positive_nonzero(beta: np.ndarray) -> np.ndarray:
    b = np.asarray(beta, dtype=float)
    if np.any(b < -1e-9):
        raise ValueError("belief vector has negative components")
    if float(b.sum()) < 1e-12:
        raise ValueError("belief vector is zero")
    return b


def pseudo_weight(beta: np.ndarray) -> float:
    """Effective weight (sum b)^2 / sum(b^2); scale-invariant, in [1, N]."""
    b = _positive_nonzero(beta)
    s = float(b.sum())
    return s * s / float(b @ b)


def instanton_from(beta: np.ndarray) -> np.ndarray:
    """Noise vector b * sum(b) / (2 sum(b^2)) with ||x||^2 = w(b)/4.

    Nonnegative beta gives nonnegative noise, so no component clamping
    is ever needed; negative beliefs are rejected.
    """
    b = _positive_nonzero(beta)
    s = float(b.sum())
    return b * (s / (2.0 * float(b @ b)))


def sample_initial(
    h: ParityCheckMatrix,
    rng: np.random.Generator,
    deviation: float | None = None,
) -> np.ndarray:
    """Random start inside the cone cross-section near the uniform point.

    Adds deviation times a random unit direction (projected onto the
    sum-zero hyperplane, so the cross-section constraint is kept) to the
    uniform point 1/N.  Draws that land outside the cone are repaired by
    an LP minimizing the l1 distance back to the draw.  deviation 0
    returns the uniform point exactly; default deviation is 0.5/N.
    """
    n = h.n_bits
    if deviation is None:
        deviation = 0.5 / n
    if deviation < 0:
        raise ValueError(f"deviation must be nonnegative, got {deviation}")
    uniform = np.full(n, 1.0 / n)
    if deviation == 0.0:
        return uniform
    direction = rng.standard_normal(n)
    direction -= direction.mean()
    norm = float(np.linalg.norm(direction))
    if norm < 1e-12:
        return uniform
    draw = uniform + (deviation / norm) * direction
    cone = build_cone(h)
    if contains(cone, draw, tol=FEAS_SAMPLE_TOL):
        return draw
    return _repair_into_cone(cone, draw)


def _repair_into_cone(cone: LinearConstraintSet, draw: np.ndarray) -> np.ndarray:
    """Closest cone point to the draw in l1, via an auxiliary LP."""
    n = cone.n_vars
    rows: list[tuple[list[int], list[float], str, float]] = []
    for k in range(cone.n_rows):
        rows.append(
            (
                list(cone.row_indices[k]),
                list(cone.row_coeffs[k]),
                cone.row_rels[k],
                cone.row_rhs[k],
            )
        )
    for i in range(n):  # t_i >= |beta_i - draw_i| as two rows
        rows.append(([i, n + i], [1.0, -1.0], "<=", float(draw[i])))
        rows.append(([i, n + i], [-1.0, -1.0], "<=", float(-draw[i])))
    lifted = LinearConstraintSet.build(
        2 * n, rows, lower=[0.0] * (2 * n), upper=[np.inf] * (2 * n)
    )
    objective = np.concatenate([np.zeros(n), np.ones(n)])
    sol = solve(LpProblem(lifted, objective, "min"))
    return sol.point[:n]


def _cone_argmax(h: ParityCheckMatrix, direction: np.ndarray) -> LpSolution:
    return solve(LpProblem(build_cone(h), direction, "max"))


def _ps_argmin(h: ParityCheckMatrix, cost: np.ndarray) -> LpSolution:
    return solve(LpProblem(build_ps(h), cost, "min"))


def moa_step(h: ParityCheckMatrix, beta_k: np.ndarray) -> np.ndarray:
    """One majorization step: maximize b . beta_k over the cone polytope.

    The linearization is a lower bound on ||b||_2 at equality in beta_k,
    so the returned vertex never has larger effective weight.
    """
    b = np.asarray(beta_k, dtype=float)
    member = contains(build_cone(h), b, tol=MEMBER_TOL)
    if not member:
        raise ValueError(
            f"beta_k is outside the cone polytope "
            f"(violation {member.worst_violation:.3g})"
        )
    return _cone_argmax(h, b).point


def pcs_step(h: ParityCheckMatrix, beta_k: np.ndarray) -> np.ndarray:
    """One search step over the small polytope.

    Decodes the instanton of beta_k; the optimal vertex is the next
    iterate.  May return the zero vertex when the instanton decodes
    correctly, which ends a run.
    """
    b = _positive_nonzero(np.asarray(beta_k, dtype=float))
    member = contains(build_ps(h), b, tol=MEMBER_TOL)
    if not member:
        raise ValueError(
            f"beta_k is outside the small polytope "
            f"(violation {member.worst_violation:.3g})"
        )
    x = instanton_from(b)
    return _ps_argmin(h, 1.0 - 2.0 * x).point


def moa_search(
    h: ParityCheckMatrix, beta_0: np.ndarray, max_iter: int = 100
) -> SearchResult:
    """Iterate moa_step from beta_0 until the optimal vertex repeats.

    Convergence is detected by basis identity of consecutive solves
    (point coincidence within 1e-9 is accepted too).  The endpoint is a
    cone vertex; its instanton comes from the normalization formula.
    """
    b = np.asarray(beta_0, dtype=float)
    member = contains(build_cone(h), b, tol=MEMBER_TOL)
    if not member:
        raise ValueError(
            f"beta_0 is outside the cone polytope "
            f"(violation {member.worst_violation:.3g})"
        )
    trace = [pseudo_weight(b)]
    prev_point = b
    prev_basis: str | None = None
    iterations = 0
    converged = False
    for _ in range(max_iter):
        sol = _cone_argmax(h, prev_point)
        iterations += 1
        point = sol.point
        trace.append(pseudo_weight(point))
        if prev_basis is not None and (
            sol.basis_id == prev_basis
            or float(np.max(np.abs(point - prev_point))) <= CONVERGE_TOL
        ):
            prev_point = point
            converged = True
            break
        prev_point = point
        prev_basis = sol.basis_id
    endpoint = prev_point
    return SearchResult(
        endpoint=endpoint,
        weight=pseudo_weight(endpoint),
        instanton=instanton_from(endpoint),
        weight_trace=trace,
        iterations=iterations,
        algorithm="moa",
        converged=converged,
    )


def pcs_search(
    h: ParityCheckMatrix, beta_0: np.ndarray, max_iter: int = 100
) -> SearchResult:
    """Iterate pcs_step from beta_0 over the small polytope.

    A step that lands on the zero vertex means the current instanton
    decodes correctly.  If that happens after at least one proper step,
    the previous vertex is the endpoint and the run converged (the tie
    at the median is structural); if it happens immediately, the start
    was inside the attraction cone of correct decoding and the run is
    reported unconverged.  The endpoint is rescaled to sum 1 so weights
    and hashes are comparable with the cone search.
    """
    b = _positive_nonzero(np.asarray(beta_0, dtype=float))
    member = contains(build_ps(h), b, tol=MEMBER_TOL)
    if not member:
        raise ValueError(
            f"beta_0 is outside the small polytope "
            f"(violation {member.worst_violation:.3g})"
        )
    trace = [pseudo_weight(b)]
    prev_point = b
    prev_basis: str | None = None
    iterations = 0
    converged = False
    for _ in range(max_iter):
        x = instanton_from(prev_point)
        sol = _ps_argmin(h, 1.0 - 2.0 * x)
        iterations += 1
        point = sol.point
        if float(point.sum()) <= CONVERGE_TOL:
            converged = prev_basis is not None
            break
        trace.append(pseudo_weight(point))
        if prev_basis is not None and (
            sol.basis_id == prev_basis
            or float(np.max(np.abs(point - prev_point))) <= CONVERGE_TOL
        ):
            prev_point = point
            converged = True
            break
        prev_point = point
        prev_basis = sol.basis_id
    endpoint = prev_point / float(prev_point.sum())
    return SearchResult(
        endpoint=endpoint,
        weight=pseudo_weight(endpoint),
        instanton=instanton_from(endpoint),
        weight_trace=trace,
        iterations=iterations,
        algorithm="pcs",
        converged=converged,
    )


def epsilon_scan(
    h: ParityCheckMatrix,
    beta_0: np.ndarray,
    eps_grid: "list[float] | np.ndarray",
    max_iter: int = 100,
) -> EpsilonScan:
    """Profile Q(eps) = min over the small polytope of sum(b) - 2 eps ||b||_2.

    Q is 0 while the ball of radius eps fits inside the domain of
    correct decoding and jumps negative at eps* with 4 eps*^2 equal to
    the weight of the pseudo-codeword responsible.  Each grid point runs
    the same majorization trick as the cone search: linearize ||b||_2
    at the current point and solve the LP until the vertex repeats.
    Landing on the zero vertex pins Q at 0 for that eps.
    """
    grid = [float(e) for e in eps_grid]
    if not grid:
        raise ValueError("eps_grid is empty")
    if any(e <= 0 for e in grid):
        raise ValueError("eps_grid entries must be positive")
    if any(b >= a for b, a in zip(grid, grid[1:])):
        raise ValueError("eps_grid must be strictly ascending")
    b0 = _positive_nonzero(np.asarray(beta_0, dtype=float))
    member = contains(build_ps(h), b0, tol=MEMBER_TOL)
    if not member:
        raise ValueError(
            f"beta_0 is outside the small polytope "
            f"(violation {member.worst_violation:.3g})"
        )

    def objective_at(pt: np.ndarray, eps: float) -> float:
        return float(pt.sum()) - 2.0 * eps * float(np.linalg.norm(pt))

    q_values: list[float] = []
    for eps in grid:
        point = b0
        prev_basis = None
        q = objective_at(b0, eps)
        for _ in range(max_iter):
            norm = float(np.linalg.norm(point))
            cost = 1.0 - (2.0 * eps / norm) * point
            sol = _ps_argmin(h, cost)
            nxt = sol.point
            if float(nxt.sum()) <= CONVERGE_TOL:
                q = 0.0
                break
            q = objective_at(nxt, eps)
            if prev_basis is not None and sol.basis_id == prev_basis:
                break
            prev_basis = sol.basis_id
            point = nxt
        q_values.append(q)

    epsilon_star = None
    for eps, q in zip(grid, q_values):
        if q < -CONVERGE_TOL:
            epsilon_star = eps
            break
    return EpsilonScan(
        epsilons=tuple(grid),
        q_values=tuple(q_values),
        epsilon_star=epsilon_star,
    )


def bracketing_check(
    h: ParityCheckMatrix, result: SearchResult, delta: float = 1e-3
) -> bool:
    """Verify the instanton sits on the correct-decoding boundary.

    Shrinking the noise by delta must decode correctly, inflating it by
    delta must fail; both together certify the endpoint shares an edge
    of the small polytope with the zero codeword.
    """
    if delta <= 0:
        raise ValueError(f"delta must be strictly positive, got {delta}")
    if not result.converged:
        raise ValueError("bracketing requires a converged search result")
    x = result.instanton
    below = in_correct_domain(h, (1.0 - delta) * x)
    above = in_correct_domain(h, (1.0 + delta) * x)
    return below and not above
