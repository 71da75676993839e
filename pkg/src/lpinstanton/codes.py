"""Binary linear codes given by sparse parity checks.

A code lives here as the adjacency structure of its Tanner graph: for
every parity check the list of bit positions it touches.  That is the
only view the decoder and the search routines ever need, so dense 0/1
matrices appear only at the edges (conversion helpers, rank checks).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "CodeStructureError",
    "AlistFormatError",
    "ParityCheckMatrix",
    "CodeReport",
    "parse_alist",
    "write_alist",
    "tanner_circulant",
    "tanner_155_64",
    "tanner_alist_path",
    "gf2_rank",
    "validate_code",
]


class CodeStructureError(ValueError):
    """Raised when adjacency data does not describe a usable code."""


class AlistFormatError(ValueError):
    """Raised on malformed alist input; messages carry 1-based line numbers."""


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse parity-check matrix, immutable and hashable.

    ``check_neighbors[a]`` holds the sorted bit indices of check ``a``,
    ``bit_neighbors[i]`` the sorted check indices of bit ``i``.  Both are
    tuples so instances can key caches of derived polytopes.
    """

    n_bits: int
    n_checks: int
    check_neighbors: tuple[tuple[int, ...], ...]
    bit_neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        # instances key polytope caches, so hash once up front
        object.__setattr__(
            self, "_hash", hash((self.n_bits, self.check_neighbors))
        )

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    @classmethod
    def from_check_lists(
        cls, n_bits: int, check_lists: Iterable[Sequence[int]]
    ) -> "ParityCheckMatrix":
        """Build from per-check bit lists, validating the adjacency.

        Every check must touch at least two distinct bits (a lighter check
        pins its bit to zero and breaks the polytope constructions) and
        every bit must appear in at least one check.
        """
        if n_bits < 1:
            raise CodeStructureError(f"need at least one bit, got n_bits={n_bits}")
        checks: list[tuple[int, ...]] = []
        bit_lists: list[list[int]] = [[] for _ in range(n_bits)]
        for a, raw in enumerate(check_lists):
            nb = sorted(raw)
            if len(nb) < 2:
                raise CodeStructureError(
                    f"check {a} has degree {len(nb)}, need at least 2"
                )
            prev = -1
            for i in nb:
                if not 0 <= i < n_bits:
                    raise CodeStructureError(
                        f"check {a} references bit {i}, valid range is 0..{n_bits - 1}"
                    )
                if i == prev:
                    raise CodeStructureError(f"check {a} lists bit {i} twice")
                prev = i
                bit_lists[i].append(a)
            checks.append(tuple(nb))
        if not checks:
            raise CodeStructureError("need at least one check")
        for i, cl in enumerate(bit_lists):
            if not cl:
                raise CodeStructureError(f"bit {i} appears in no check")
        return cls(
            n_bits=n_bits,
            n_checks=len(checks),
            check_neighbors=tuple(checks),
            bit_neighbors=tuple(tuple(cl) for cl in bit_lists),
        )

    @classmethod
    def from_dense(cls, mat: np.ndarray) -> "ParityCheckMatrix":
        """Build from a dense 0/1 array of shape (n_checks, n_bits)."""
        arr = np.asarray(mat)
        if arr.ndim != 2:
            raise CodeStructureError(f"expected a 2d array, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise CodeStructureError("dense parity-check entries must be 0 or 1")
        lists = [np.flatnonzero(row).tolist() for row in arr]
        return cls.from_check_lists(arr.shape[1], lists)

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.check_neighbors)

    def check_degrees(self) -> tuple[int, ...]:
        return tuple(len(nb) for nb in self.check_neighbors)

    def bit_degrees(self) -> tuple[int, ...]:
        return tuple(len(nb) for nb in self.bit_neighbors)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_checks, self.n_bits), dtype=np.uint8)
        for a, nb in enumerate(self.check_neighbors):
            out[a, list(nb)] = 1
        return out


@dataclass(frozen=True)
class CodeReport:
    """Structural summary produced by :func:`validate_code`."""

    n_bits: int
    n_checks: int
    gf2_rank: int
    dimension: int
    bit_degree_range: tuple[int, int]
    check_degree_range: tuple[int, int]
    regular: tuple[int, int] | None
    girth: int | None


def _tokenize_alist(data: str | bytes) -> list[tuple[int, list[int]]]:
    if isinstance(data, bytes):
        data = data.decode("ascii")
    lines: list[tuple[int, list[int]]] = []
    for lineno, raw in enumerate(data.split("\n"), start=1):
        parts = raw.split()
        ints: list[int] = []
        for tok in parts:
            try:
                ints.append(int(tok))
            except ValueError:
                raise AlistFormatError(
                    f"line {lineno}: non-integer token {tok!r}"
                ) from None
        lines.append((lineno, ints))
    while lines and not lines[-1][1]:
        lines.pop()
    return lines


def parse_alist(data: str | bytes) -> ParityCheckMatrix:
    """Parse the alist text format for sparse binary matrices.

    The layout is the one used by the LDPC community for interchange::

        n_bits n_checks
        max_bit_degree max_check_degree
        per-bit degrees              (n_bits integers)
        per-check degrees            (n_checks integers)
        one line per bit:   its check indices, 1-based
        one line per check: its bit indices, 1-based

    Adjacency lines may be zero-padded up to the declared maximum degree
    or left unpadded; both forms are accepted.  Zeros are padding only,
    so they may not appear before a real index.  The two adjacency blocks
    must describe the same matrix, and indices coming out of the parser
    are 0-based.
    """
    lines = _tokenize_alist(data)
    if len(lines) < 4:
        raise AlistFormatError("truncated input: need at least 4 header lines")

    def expect(pos: int, count: int, what: str) -> list[int]:
        lineno, vals = lines[pos]
        if len(vals) != count:
            raise AlistFormatError(
                f"line {lineno}: expected {count} integers for {what}, got {len(vals)}"
            )
        return vals

    n_bits, n_checks = expect(0, 2, "matrix dimensions")
    if n_bits < 1 or n_checks < 1:
        raise AlistFormatError(f"line {lines[0][0]}: dimensions must be positive")
    max_bit_deg, max_check_deg = expect(1, 2, "maximum degrees")
    bit_degs = expect(2, n_bits, "per-bit degrees")
    check_degs = expect(3, n_checks, "per-check degrees")
    if bit_degs and max(bit_degs) != max_bit_deg:
        raise AlistFormatError(
            f"line {lines[2][0]}: largest per-bit degree {max(bit_degs)} "
            f"does not match declared maximum {max_bit_deg}"
        )
    if check_degs and max(check_degs) != max_check_deg:
        raise AlistFormatError(
            f"line {lines[3][0]}: largest per-check degree {max(check_degs)} "
            f"does not match declared maximum {max_check_deg}"
        )
    if len(lines) != 4 + n_bits + n_checks:
        raise AlistFormatError(
            f"expected {4 + n_bits + n_checks} content lines, got {len(lines)}"
        )

    def adjacency(pos: int, deg: int, limit: int, what: str) -> list[int]:
        lineno, vals = lines[pos]
        entries = [v for v in vals if v != 0]
        if len(entries) != deg:
            raise AlistFormatError(
                f"line {lineno}: {what} should have {deg} entries, got {len(entries)}"
            )
        if vals[:deg] != entries:
            raise AlistFormatError(
                f"line {lineno}: padding zeros must follow the real indices"
            )
        for v in entries:
            if not 1 <= v <= limit:
                raise AlistFormatError(
                    f"line {lineno}: index {v} out of range 1..{limit}"
                )
        return [v - 1 for v in entries]

    bit_adj = [
        adjacency(4 + i, bit_degs[i], n_checks, f"bit {i + 1}") for i in range(n_bits)
    ]
    check_adj = [
        adjacency(4 + n_bits + a, check_degs[a], n_bits, f"check {a + 1}")
        for a in range(n_checks)
    ]

    from_bits = {(a, i) for i, adj in enumerate(bit_adj) for a in adj}
    from_checks = {(a, i) for a, adj in enumerate(check_adj) for i in adj}
    if from_bits != from_checks:
        a, i = next(iter(from_bits ^ from_checks))
        raise AlistFormatError(
            f"adjacency blocks disagree about check {a + 1} / bit {i + 1}"
        )

    try:
        return ParityCheckMatrix.from_check_lists(n_bits, check_adj)
    except CodeStructureError as exc:
        raise AlistFormatError(str(exc)) from exc


def write_alist(h: ParityCheckMatrix) -> str:
    """Serialize to alist text, zero-padded, with a trailing newline."""
    bit_degs = h.bit_degrees()
    check_degs = h.check_degrees()
    max_bit = max(bit_degs)
    max_check = max(check_degs)

    def pad(entries: Sequence[int], width: int) -> str:
        row = [str(i + 1) for i in entries] + ["0"] * (width - len(entries))
        return " ".join(row)

    out = [
        f"{h.n_bits} {h.n_checks}",
        f"{max_bit} {max_check}",
        " ".join(str(d) for d in bit_degs),
        " ".join(str(d) for d in check_degs),
    ]
    out.extend(pad(nb, max_bit) for nb in h.bit_neighbors)
    out.extend(pad(nb, max_check) for nb in h.check_neighbors)
    return "\n".join(out) + "\n"


def tanner_circulant(
    block_rows: int,
    block_cols: int,
    circ_size: int,
    shifts: Sequence[Sequence[int]],
) -> ParityCheckMatrix:
    """Parity-check matrix built from a grid of shifted identity blocks.

    Block (i, j) is the circ_size x circ_size circulant that maps row r
    to column (r + shifts[i][j]) mod circ_size.  Check r of block row i
    therefore touches bit j * circ_size + (r + shifts[i][j]) mod circ_size
    for every block column j.
    """
    if block_rows < 1 or block_cols < 1 or circ_size < 1:
        raise CodeStructureError("block grid and circulant size must be positive")
    if len(shifts) != block_rows or any(len(row) != block_cols for row in shifts):
        raise CodeStructureError(
            f"shift table must be {block_rows} x {block_cols}"
        )
    for row in shifts:
        for s in row:
            if not 0 <= s < circ_size:
                raise CodeStructureError(
                    f"shift {s} outside 0..{circ_size - 1}"
                )
    n_bits = block_cols * circ_size
    lists = []
    for i in range(block_rows):
        for r in range(circ_size):
            lists.append(
                [j * circ_size + (r + shifts[i][j]) % circ_size for j in range(block_cols)]
            )
    return ParityCheckMatrix.from_check_lists(n_bits, lists)


def _data_dir() -> Path:
    return Path(str(resources.files("lpinstanton").joinpath("data")))


def tanner_155_64() -> ParityCheckMatrix:
    """The (3,5)-regular girth-8 quasi-cyclic code of length 155.

    Shift table entries are 5**i * 2**j mod 31, giving 93 checks of
    which 91 are independent, so the code has dimension 64.  Its minimum
    Hamming distance is 20.
    """
    with open(_data_dir() / "tanner_shifts.json") as fh:
        cfg = json.load(fh)
    return tanner_circulant(
        cfg["block_rows"], cfg["block_cols"], cfg["circ_size"], cfg["shifts"]
    )


def tanner_alist_path() -> Path:
    """Path of the alist file for the length-155 code shipped with the package."""
    return _data_dir() / "tanner_155_64_20.alist"


def gf2_rank(h: ParityCheckMatrix) -> int:
    """Rank over GF(2), via elimination on rows packed into Python ints."""
    pivots: dict[int, int] = {}
    rank = 0
    for nb in h.check_neighbors:
        v = 0
        for i in nb:
            v |= 1 << i
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                rank += 1
                break
    return rank


def _tanner_girth(h: ParityCheckMatrix) -> int | None:
    """Shortest cycle length of the Tanner graph, None if it is a forest.

    Breadth-first search from every vertex; the shortest cycle through
    the root is dist[u] + dist[v] + 1 for the first non-tree edge (u, v).
    Bipartiteness makes all cycles even, but nothing here relies on it.
    """
    n = h.n_bits + h.n_checks
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, nb in enumerate(h.check_neighbors):
        for i in nb:
            adj[h.n_bits + a].append(i)
            adj[i].append(h.n_bits + a)
    best: int | None = None
    dist = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int64)
    for root in range(n):
        dist.fill(-1)
        dist[root] = 0
        parent[root] = -1
        q = deque([root])
        while q:
            u = q.popleft()
            if best is not None and 2 * dist[u] >= best:
                break
            for v in adj[u]:
                if v == parent[u]:
                    continue
                if dist[v] >= 0:
                    c = int(dist[u] + dist[v] + 1)
                    if best is None or c < best:
                        best = c
                else:
                    dist[v] = dist[u] + 1
                    parent[v] = u
                    q.append(v)
    return best


def validate_code(h: ParityCheckMatrix, with_girth: bool = True) -> CodeReport:
    """Structural report: GF(2) rank, code dimension, degrees, girth."""
    rank = gf2_rank(h)
    bit_degs = h.bit_degrees()
    check_degs = h.check_degrees()
    regular = None
    if len(set(bit_degs)) == 1 and len(set(check_degs)) == 1:
        regular = (bit_degs[0], check_degs[0])
    return CodeReport(
        n_bits=h.n_bits,
        n_checks=h.n_checks,
        gf2_rank=rank,
        dimension=h.n_bits - rank,
        bit_degree_range=(min(bit_degs), max(bit_degs)),
        check_degree_range=(min(check_degs), max(check_degs)),
        regular=regular,
        girth=_tanner_girth(h) if with_girth else None,
    )
