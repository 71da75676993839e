"""Seeded multi-trial harness for pseudo-codeword weight spectra.

Each trial gets its own RNG stream derived from (master_seed, trial
index) through a 64-bit mixer, so the full record list is a pure
function of the inputs and identical under any degree of parallelism.
Solver failures inside a trial are recorded as unconverged rather than
aborting the batch.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codes import ParityCheckMatrix
from .lpsolve import LpNumericalError, rational_snap
from .polytope import build_cone
from .search import SearchResult, moa_search, pcs_search, sample_initial

__all__ = [
    "SpectrumRecord",
    "trial_seed",
    "endpoint_hash",
    "single_trial",
    "run_trials",
    "cumulative_spectrum",
    "distinct_pseudocodewords",
    "records_csv",
    "spectrum_csv",
]

_M64 = (1 << 64) - 1


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Per-trial stream seed: a counter-based split of the master seed."""
    return _splitmix64((master_seed & _M64) ^ _splitmix64(trial_index))


@dataclass
class SpectrumRecord:
    trial_index: int
    seed: int
    algorithm: str
    weight: float
    iterations: int
    converged: bool
    endpoint_hash: str


def endpoint_hash(h: ParityCheckMatrix, endpoint: np.ndarray) -> str:
    """Canonical hash of the rational-snapped endpoint.

    Falls back to a fixed-precision decimal rendering when the endpoint
    does not snap to denominator <= 64 fractions; either way the hash is
    a pure function of the coordinates.
    """
    snapped = rational_snap(build_cone(h), endpoint)
    if snapped is not None:
        text = ",".join(f"{f.numerator}/{f.denominator}" for f in snapped)
    else:
        # + 0.0 maps -0.0 to +0.0 before rendering
        text = "~" + ",".join(f"{v + 0.0:.12g}" for v in np.asarray(endpoint))
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:16]


def single_trial(
    h: ParityCheckMatrix,
    algorithm: str,
    master_seed: int,
    trial_index: int,
    deviation: float | None = None,
    max_iter: int = 100,
) -> tuple[SpectrumRecord, SearchResult | None]:
    """Run one seeded search; never raises for solver trouble."""
    if algorithm not in ("moa", "pcs"):
        raise ValueError(f"algorithm must be 'moa' or 'pcs', got {algorithm!r}")
    seed = trial_seed(master_seed, trial_index)
    rng = np.random.Generator(np.random.PCG64(seed))
    beta_0 = sample_initial(h, rng, deviation)
    try:
        if algorithm == "moa":
            result = moa_search(h, beta_0, max_iter)
        else:
            result = pcs_search(h, beta_0, max_iter)
    except LpNumericalError:
        record = SpectrumRecord(
            trial_index=trial_index,
            seed=seed,
            algorithm=algorithm,
            weight=math.nan,
            iterations=0,
            converged=False,
            endpoint_hash="",
        )
        return record, None
    record = SpectrumRecord(
        trial_index=trial_index,
        seed=seed,
        algorithm=algorithm,
        weight=result.weight,
        iterations=result.iterations,
        converged=result.converged,
        endpoint_hash=endpoint_hash(h, result.endpoint),
    )
    return record, result


def _trial_worker(args) -> SpectrumRecord:
    h, algorithm, master_seed, idx, deviation, max_iter = args
    record, _ = single_trial(h, algorithm, master_seed, idx, deviation, max_iter)
    return record


def run_trials(
    h: ParityCheckMatrix,
    algorithm: str,
    n_trials: int,
    master_seed: int,
    deviation: float | None = None,
    max_iter: int = 100,
    jobs: int = 1,
) -> list[SpectrumRecord]:
    """Seeded batch of searches, records sorted by trial index.

    jobs > 1 distributes trials over worker processes; the output does
    not depend on jobs because every trial derives its stream from
    (master_seed, trial_index) alone.
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be at least 1, got {n_trials}")
    if algorithm not in ("moa", "pcs"):
        raise ValueError(f"algorithm must be 'moa' or 'pcs', got {algorithm!r}")
    args = [
        (h, algorithm, master_seed, k, deviation, max_iter) for k in range(n_trials)
    ]
    if jobs <= 1:
        records = [_trial_worker(a) for a in args]
    else:
        chunk = max(1, n_trials // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_worker, args, chunksize=chunk))
    records.sort(key=lambda r: r.trial_index)
    return records


def cumulative_spectrum(
    records: Iterable[SpectrumRecord],
) -> list[tuple[float, float]]:
    """Fraction of converged endpoints with weight <= w, per distinct w."""
    weights = sorted(r.weight for r in records if r.converged)
    if not weights:
        raise ValueError("no converged records to build a spectrum from")
    total = len(weights)
    pairs: list[tuple[float, float]] = []
    count = 0
    for i, w in enumerate(weights):
        count += 1
        if i + 1 == total or weights[i + 1] != w:
            pairs.append((w, count / total))
    return pairs


def distinct_pseudocodewords(
    records: Iterable[SpectrumRecord],
) -> dict[str, tuple[float, int]]:
    """Deduplicate converged endpoints; hash -> (weight, multiplicity)."""
    out: dict[str, tuple[float, int]] = {}
    for r in records:
        if not r.converged:
            continue
        if r.endpoint_hash in out:
            w, k = out[r.endpoint_hash]
            out[r.endpoint_hash] = (w, k + 1)
        else:
            out[r.endpoint_hash] = (r.weight, 1)
    return out


def records_csv(records: Sequence[SpectrumRecord]) -> str:
    lines = ["trial,seed,algo,weight,iterations,converged,endpoint_hash"]
    for r in records:
        lines.append(
            f"{r.trial_index},{r.seed},{r.algorithm},{r.weight!r},"
            f"{r.iterations},{'true' if r.converged else 'false'},{r.endpoint_hash}"
        )
    return "\n".join(lines) + "\n"


def spectrum_csv(pairs: Sequence[tuple[float, float]]) -> str:
    lines = ["w,rho"]
    for w, rho in pairs:
        lines.append(f"{w!r},{rho!r}")
    return "\n".join(lines) + "\n"
