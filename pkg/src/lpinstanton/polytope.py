"""Constraint systems for the decoding polytopes.

Two polytopes drive everything downstream.  The small decoding polytope
relaxes the codeword indicator constraints check by check: for a check
touching bits I and any odd subset I' of I,

    sum_{i in I'} b_i - sum_{i in I \\ I'} b_i <= |I'| - 1,

together with the box 0 <= b <= 1.  The cone polytope keeps only the
single-bit faces b_i <= sum of the other beliefs of the check, drops the
upper bounds, and pins the cross-section sum(b) = 1.  Belief vectors are
plain float arrays of length n_bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np
from scipy import sparse

from .codes import ParityCheckMatrix

__all__ = [
    "PolytopeSizeError",
    "LinearConstraintSet",
    "Membership",
    "build_ps",
    "build_cone",
    "contains",
    "dump_lp_text",
]

MAX_CHECK_DEGREE = 24


class PolytopeSizeError(ValueError):
    """A check degree too large to expand into odd-subset rows."""


@dataclass(frozen=True)
class LinearConstraintSet:
    """Immutable sparse rows plus per-variable bounds.

    Relations are "<=" or "==".  Bounds may be +-inf.  Instances hash by
    content so they can key caches; the compiled matrix forms used by the
    solver are attached lazily and never enter equality or hashing.
    """

    n_vars: int
    row_indices: tuple[tuple[int, ...], ...]
    row_coeffs: tuple[tuple[float, ...], ...]
    row_rels: tuple[str, ...]
    row_rhs: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    _cache: dict = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_hash", hash((self.n_vars, self.row_indices, self.row_coeffs,
                                 self.row_rels, self.row_rhs, self.lower, self.upper))
        )

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    @classmethod
    def build(
        cls,
        n_vars: int,
        rows: Iterable[tuple[Sequence[int], Sequence[float], str, float]],
        lower: Sequence[float],
        upper: Sequence[float],
    ) -> "LinearConstraintSet":
        if n_vars < 1:
            raise ValueError(f"n_vars must be positive, got {n_vars}")
        idxs: list[tuple[int, ...]] = []
        coefs: list[tuple[float, ...]] = []
        rels: list[str] = []
        rhss: list[float] = []
        for k, (indices, coeffs, rel, rhs) in enumerate(rows):
            if len(indices) == 0:
                raise ValueError(f"row {k} is empty")
            if len(indices) != len(coeffs):
                raise ValueError(f"row {k}: index/coefficient length mismatch")
            if rel not in ("<=", "=="):
                raise ValueError(f"row {k}: relation must be <= or ==, got {rel!r}")
            if not np.isfinite(rhs):
                raise ValueError(f"row {k}: right-hand side must be finite")
            for i in indices:
                if not 0 <= i < n_vars:
                    raise ValueError(f"row {k}: variable index {i} out of range")
            idxs.append(tuple(int(i) for i in indices))
            coefs.append(tuple(float(c) for c in coeffs))
            rels.append(rel)
            rhss.append(float(rhs))
        lo = tuple(float(v) for v in lower)
        hi = tuple(float(v) for v in upper)
        if len(lo) != n_vars or len(hi) != n_vars:
            raise ValueError("bounds must have one entry per variable")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if a > b:
                raise ValueError(f"variable {i}: lower bound exceeds upper bound")
        return cls(
            n_vars=n_vars,
            row_indices=tuple(idxs),
            row_coeffs=tuple(coefs),
            row_rels=tuple(rels),
            row_rhs=tuple(rhss),
            lower=lo,
            upper=hi,
        )

    @property
    def n_rows(self) -> int:
        return len(self.row_indices)

    def compiled(self) -> dict[str, Any]:
        """Matrix forms for the solver: CSR blocks for <= and == rows.

        Cached on first use.  Keys: A_ub, b_ub, ub_rows, A_eq, b_eq,
        eq_rows, lb, ub (bound arrays).
        """
        if "A_ub" in self._cache:
            return self._cache
        ub_rows = [k for k, r in enumerate(self.row_rels) if r == "<="]
        eq_rows = [k for k, r in enumerate(self.row_rels) if r == "=="]

        def pack(which: list[int]) -> sparse.csr_matrix:
            data: list[float] = []
            indices: list[int] = []
            indptr = [0]
            for k in which:
                data.extend(self.row_coeffs[k])
                indices.extend(self.row_indices[k])
                indptr.append(len(data))
            return sparse.csr_matrix(
                (np.asarray(data), np.asarray(indices, dtype=np.int32),
                 np.asarray(indptr, dtype=np.int32)),
                shape=(len(which), self.n_vars),
            )

        self._cache.update(
            A_ub=pack(ub_rows),
            b_ub=np.asarray([self.row_rhs[k] for k in ub_rows]),
            ub_rows=np.asarray(ub_rows, dtype=np.int64),
            A_eq=pack(eq_rows),
            b_eq=np.asarray([self.row_rhs[k] for k in eq_rows]),
            eq_rows=np.asarray(eq_rows, dtype=np.int64),
            lb=np.asarray(self.lower),
            ub=np.asarray(self.upper),
        )
        return self._cache


@dataclass(frozen=True)
class Membership:
    contained: bool
    worst_violation: float

    def __bool__(self) -> bool:
        return self.contained


@lru_cache(maxsize=None)
def build_ps(h: ParityCheckMatrix) -> LinearConstraintSet:
    """Odd-subset constraint system of the small decoding polytope.

    Exactly sum_a 2^(d_a - 1) rows: checks in index order, odd subsets
    by ascending bitmask over the check's sorted neighbor list.  The box
    lives in the bounds, not in the rows.
    """
    rows: list[tuple[Sequence[int], Sequence[float], str, float]] = []
    for nb in h.check_neighbors:
        d = len(nb)
        if d > MAX_CHECK_DEGREE:
            raise PolytopeSizeError(
                f"check degree {d} exceeds limit {MAX_CHECK_DEGREE}: "
                f"2^{d - 1} rows per check is not tractable"
            )
        for mask in range(1, 1 << d):
            size = mask.bit_count()
            if size % 2 == 0:
                continue
            coeffs = [1.0 if (mask >> t) & 1 else -1.0 for t in range(d)]
            rows.append((nb, coeffs, "<=", float(size - 1)))
    return LinearConstraintSet.build(
        h.n_bits, rows, lower=[0.0] * h.n_bits, upper=[1.0] * h.n_bits
    )


@lru_cache(maxsize=None)
def build_cone(h: ParityCheckMatrix) -> LinearConstraintSet:
    """Single-bit faces plus the cross-section sum(b) = 1.

    One inequality b_i <= sum_{j ~ a, j != i} b_j per (check, bit)
    incidence, in check-then-bit order, then the equality row last.
    Lower bounds 0, no upper bounds.
    """
    rows: list[tuple[Sequence[int], Sequence[float], str, float]] = []
    for nb in h.check_neighbors:
        for i in nb:
            coeffs = [1.0 if j == i else -1.0 for j in nb]
            rows.append((nb, coeffs, "<=", 0.0))
    rows.append((range(h.n_bits), [1.0] * h.n_bits, "==", 1.0))
    return LinearConstraintSet.build(
        h.n_bits, rows, lower=[0.0] * h.n_bits, upper=[np.inf] * h.n_bits
    )


def contains(
    cs: LinearConstraintSet, point: np.ndarray, tol: float = 1e-9
) -> Membership:
    """Test membership within an absolute tolerance.

    Returns the worst violation magnitude over all rows and bounds, 0.0
    for interior points.
    """
    p = np.asarray(point, dtype=float)
    if p.shape != (cs.n_vars,):
        raise ValueError(
            f"point has shape {p.shape}, constraint set expects ({cs.n_vars},)"
        )
    c = cs.compiled()
    worst = 0.0
    if c["A_ub"].shape[0]:
        worst = max(worst, float(np.max(c["A_ub"] @ p - c["b_ub"])))
    if c["A_eq"].shape[0]:
        worst = max(worst, float(np.max(np.abs(c["A_eq"] @ p - c["b_eq"]))))
    lo, hi = c["lb"], c["ub"]
    finite_lo = np.isfinite(lo)
    finite_hi = np.isfinite(hi)
    if finite_lo.any():
        worst = max(worst, float(np.max(lo[finite_lo] - p[finite_lo])))
    if finite_hi.any():
        worst = max(worst, float(np.max(p[finite_hi] - hi[finite_hi])))
    worst = max(worst, 0.0)
    return Membership(contained=worst <= tol, worst_violation=worst)


def dump_lp_text(cs: LinearConstraintSet) -> str:
    """Human-readable LP-format dump of the rows and bounds.

    There is no objective row; the output is meant for feeding the
    feasible region to an external solver as a cross-check.
    """
    out = [f"\\ constraint set: {cs.n_vars} variables, {cs.n_rows} rows"]
    out.append("Subject To")
    for k in range(cs.n_rows):
        terms = " ".join(
            f"{'+' if c >= 0 else '-'}{abs(c):g} x{i}"
            for i, c in zip(cs.row_indices[k], cs.row_coeffs[k])
        )
        rel = "=" if cs.row_rels[k] == "==" else "<="
        out.append(f" r{k}: {terms} {rel} {cs.row_rhs[k]:g}")
    out.append("Bounds")
    for i, (lo, hi) in enumerate(zip(cs.lower, cs.upper)):
        if lo == -np.inf and hi == np.inf:
            out.append(f" x{i} free")
        elif hi == np.inf:
            out.append(f" {lo:g} <= x{i}")
        elif lo == -np.inf:
            out.append(f" x{i} <= {hi:g}")
        else:
            out.append(f" {lo:g} <= x{i} <= {hi:g}")
    out.append("End")
    return "\n".join(out) + "\n"
