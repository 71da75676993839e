"""The LP kernel every other module calls.

Problems are solved with the HiGHS dual simplex through scipy, which
returns a basic feasible solution deterministically, so repeated calls
on identical input give identical output.  On top of the raw solve this
module adds the guarantees the search iterations lean on: a duality
self-check on every optimal solve, a canonical fingerprint of the active
constraint set (used as the basis identity for convergence tests), and
optional snapping of vertex coordinates to small rationals with exact
feasibility re-verification.

A brute-force vertex enumerator doubles as the test oracle for small
codes; it shares nothing with the simplex path.
"""
from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .polytope import LinearConstraintSet

__all__ = [
    "LpNumericalError",
    "LpProblem",
    "LpSolution",
    "solve",
    "rational_snap",
    "is_vertex",
    "enumerate_vertices",
]

FEAS_TOL = 1e-9
DUALITY_TOL = 1e-8
TIGHT_TOL = 1e-7
SNAP_TOL = 1e-7
SNAP_MAX_DENOMINATOR = 64


class LpNumericalError(RuntimeError):
    """The solver stalled or lost numerical control; hard failure."""


@dataclass
class LpProblem:
    """A linear objective over a LinearConstraintSet.

    The objective may be given dense (array of length n_vars) or sparse
    (mapping from variable index to coefficient); it is stored dense.
    """

    constraints: LinearConstraintSet
    objective: np.ndarray
    sense: str = "min"

    def __post_init__(self) -> None:
        n = self.constraints.n_vars
        if isinstance(self.objective, dict):
            dense = np.zeros(n)
            for i, v in self.objective.items():
                if not 0 <= i < n:
                    raise ValueError(f"objective index {i} out of range")
                dense[i] = v
            self.objective = dense
        else:
            self.objective = np.asarray(self.objective, dtype=float)
            if self.objective.shape != (n,):
                raise ValueError(
                    f"objective has shape {self.objective.shape}, expected ({n},)"
                )
        if not np.isfinite(self.objective).all():
            raise ValueError("objective coefficients must be finite")
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    objective_value: float
    point: np.ndarray | None
    basis_id: str | None
    snapped: tuple[Fraction, ...] | None = None


def _dual_objective(res, b_ub, b_eq, lb, ub) -> float:
    """Dual value reconstructed from the solver's marginals (min sense)."""
    total = 0.0
    if b_ub.size:
        total += float(b_ub @ res.ineqlin.marginals)
    if b_eq.size:
        total += float(b_eq @ res.eqlin.marginals)
    lo_m = res.lower.marginals
    hi_m = res.upper.marginals
    # a marginal on an infinite bound is zero; mask to avoid 0 * inf
    total += float(np.sum(np.where(lo_m != 0.0, lb, 0.0) * lo_m))
    total += float(np.sum(np.where(hi_m != 0.0, ub, 0.0) * hi_m))
    return total


def _basis_fingerprint(cs: LinearConstraintSet, x: np.ndarray) -> str:
    """Canonical id of the active set at x.

    Two optimal points of the same constraint set get the same id iff
    their tight rows and tight bounds coincide; a full-rank tight set
    pins the point, so id equality is point equality for vertices.
    """
    c = cs.compiled()
    parts = [b"ub"]
    if c["A_ub"].shape[0]:
        resid = c["A_ub"] @ x - c["b_ub"]
        parts.append(np.flatnonzero(np.abs(resid) <= TIGHT_TOL).astype(np.int64).tobytes())
    parts.append(b"lo")
    parts.append(np.flatnonzero(np.abs(x - c["lb"]) <= TIGHT_TOL).astype(np.int64).tobytes())
    parts.append(b"hi")
    parts.append(np.flatnonzero(np.abs(x - c["ub"]) <= TIGHT_TOL).astype(np.int64).tobytes())
    return hashlib.sha256(b"".join(parts)).hexdigest()[:16]


def rational_snap(
    cs: LinearConstraintSet, point: np.ndarray
) -> tuple[Fraction, ...] | None:
    """Round coordinates to fractions with denominator <= 64, verified.

    Every coordinate must sit within 1e-7 of such a fraction and the
    snapped point must satisfy the constraint set exactly in rational
    arithmetic; otherwise None.  Vertex coordinates of the decoding
    polytopes are small rationals, so this normally succeeds.
    """
    fracs: list[Fraction] = []
    for v in np.asarray(point, dtype=float):
        f = Fraction(float(v)).limit_denominator(SNAP_MAX_DENOMINATOR)
        if abs(float(f) - v) > SNAP_TOL:
            return None
        fracs.append(f)
    for k in range(cs.n_rows):
        acc = Fraction(0)
        for i, co in zip(cs.row_indices[k], cs.row_coeffs[k]):
            acc += Fraction(co) * fracs[i]
        rhs = Fraction(cs.row_rhs[k])
        if cs.row_rels[k] == "==":
            if acc != rhs:
                return None
        elif acc > rhs:
            return None
    for i, f in enumerate(fracs):
        lo, hi = cs.lower[i], cs.upper[i]
        if math.isfinite(lo) and f < Fraction(lo):
            return None
        if math.isfinite(hi) and f > Fraction(hi):
            return None
    return tuple(fracs)


def solve(p: LpProblem, snap: bool = False) -> LpSolution:
    """Solve to an optimal basic feasible solution.

    Infeasible and unbounded problems come back as statuses.  Iteration
    limits and numerical breakdown raise LpNumericalError, as does a
    failed duality self-check (the reported optimum must match the dual
    value reconstructed from the solver's own marginals within 1e-8).
    """
    c = p.constraints.compiled()
    sign = 1.0 if p.sense == "min" else -1.0
    res = linprog(
        sign * p.objective,
        A_ub=c["A_ub"] if c["A_ub"].shape[0] else None,
        b_ub=c["b_ub"] if c["b_ub"].size else None,
        A_eq=c["A_eq"] if c["A_eq"].shape[0] else None,
        b_eq=c["b_eq"] if c["b_eq"].size else None,
        bounds=np.column_stack([c["lb"], c["ub"]]),
        method="highs-ds",
        options={
            "presolve": True,
            "primal_feasibility_tolerance": FEAS_TOL,
            "dual_feasibility_tolerance": FEAS_TOL,
        },
    )
    if res.status == 2:
        return LpSolution("infeasible", math.nan, None, None)
    if res.status == 3:
        return LpSolution("unbounded", math.nan, None, None)
    if res.status != 0:
        raise LpNumericalError(f"solver failed: {res.message}")

    x = np.asarray(res.x, dtype=float)
    dual = _dual_objective(res, c["b_ub"], c["b_eq"], c["lb"], c["ub"])
    gap = abs(res.fun - dual)
    if gap > DUALITY_TOL * (1.0 + abs(res.fun)):
        raise LpNumericalError(
            f"duality self-check failed: primal {res.fun!r} vs dual {dual!r}"
        )
    sol = LpSolution(
        status="optimal",
        objective_value=float(sign * res.fun),
        point=x,
        basis_id=_basis_fingerprint(p.constraints, x),
    )
    if snap:
        sol.snapped = rational_snap(p.constraints, x)
    return sol


def is_vertex(cs: LinearConstraintSet, point: np.ndarray, tol: float = TIGHT_TOL) -> bool:
    """True iff the tight rows and bounds at point have full rank."""
    x = np.asarray(point, dtype=float)
    c = cs.compiled()
    normals: list[np.ndarray] = []
    if c["A_ub"].shape[0]:
        resid = np.abs(c["A_ub"] @ x - c["b_ub"]) <= tol
        if resid.any():
            normals.append(c["A_ub"][resid].toarray())
    if c["A_eq"].shape[0]:
        normals.append(c["A_eq"].toarray())
    eye = np.eye(cs.n_vars)
    tight_lo = np.abs(x - c["lb"]) <= tol
    tight_hi = np.abs(x - c["ub"]) <= tol
    if tight_lo.any():
        normals.append(eye[tight_lo])
    if tight_hi.any():
        normals.append(eye[tight_hi])
    if not normals:
        return False
    stacked = np.vstack(normals)
    return int(np.linalg.matrix_rank(stacked, tol=1e-8)) == cs.n_vars


def enumerate_vertices(
    cs: LinearConstraintSet, dim_limit: int = 12, batch: int = 100_000
) -> list[np.ndarray]:
    """All vertices by brute force over active-set combinations.

    Equality rows participate in every candidate active set; the
    remaining hyperplanes are drawn from inequality rows and finite
    bounds.  Intended purely as a small-dimension oracle; combinatorial
    cost explodes beyond a dozen variables, hence the hard limit.
    """
    n = cs.n_vars
    if n > dim_limit:
        raise ValueError(f"n_vars {n} exceeds dim_limit {dim_limit}")
    c = cs.compiled()

    planes: list[tuple[np.ndarray, float]] = []
    for k in range(cs.n_rows):
        if cs.row_rels[k] == "<=":
            row = np.zeros(n)
            row[list(cs.row_indices[k])] = cs.row_coeffs[k]
            planes.append((row, cs.row_rhs[k]))
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        if math.isfinite(cs.lower[i]):
            planes.append((e.copy(), cs.lower[i]))
        if math.isfinite(cs.upper[i]):
            planes.append((e, cs.upper[i]))

    eq_rows = []
    eq_rhs = []
    for k in range(cs.n_rows):
        if cs.row_rels[k] == "==":
            row = np.zeros(n)
            row[list(cs.row_indices[k])] = cs.row_coeffs[k]
            eq_rows.append(row)
            eq_rhs.append(cs.row_rhs[k])
    n_eq = len(eq_rows)
    k_free = n - n_eq
    if k_free < 0:
        return []

    found: list[np.ndarray] = []

    def flush(mats: list[np.ndarray], rhss: list[np.ndarray]) -> None:
        if not mats:
            return
        M = np.stack(mats)
        R = np.stack(rhss)
        dets = np.abs(np.linalg.det(M))
        ok = dets > 1e-10
        if not ok.any():
            return
        X = np.linalg.solve(M[ok], R[ok][..., None])[..., 0]
        feas = np.ones(len(X), dtype=bool)
        if c["A_ub"].shape[0]:
            feas &= ((c["A_ub"] @ X.T).T <= c["b_ub"] + FEAS_TOL).all(axis=1)
        if c["A_eq"].shape[0]:
            feas &= (np.abs((c["A_eq"] @ X.T).T - c["b_eq"]) <= FEAS_TOL).all(axis=1)
        feas &= (X >= c["lb"] - FEAS_TOL).all(axis=1)
        feas &= (X <= c["ub"] + FEAS_TOL).all(axis=1)
        found.extend(X[feas])

    mats: list[np.ndarray] = []
    rhss: list[np.ndarray] = []
    for combo in itertools.combinations(range(len(planes)), k_free):
        rows = eq_rows + [planes[j][0] for j in combo]
        rhs = eq_rhs + [planes[j][1] for j in combo]
        mats.append(np.stack(rows))
        rhss.append(np.asarray(rhs))
        if len(mats) >= batch:
            flush(mats, rhss)
            mats, rhss = [], []
    flush(mats, rhss)

    if not found:
        return []
    # dedup on a rounded key (+ 0.0 maps -0.0 to +0.0 so duplicates cannot
    # differ by sign of zero) but return the unrounded solve results
    stacked = np.stack(found)
    _, first = np.unique(np.round(stacked, 9) + 0.0, axis=0, return_index=True)
    return [stacked[i] + 0.0 for i in sorted(first)]
