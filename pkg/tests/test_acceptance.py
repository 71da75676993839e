"""Acceptance suite: the quantitative and property claims, one test each.

The heavy Tanner batches (criteria 3 through 7 share two 1000-trial
runs, criterion 6 runs 3 x 10^4 trials) dominate the runtime; expect
roughly a quarter of an hour on one core.
"""

import dataclasses
import itertools
import math

import numpy as np
import pytest

from lpinstanton import (
    ParityCheckMatrix,
    bracketing_check,
    build_cone,
    cumulative_spectrum,
    dual_decode,
    enumerate_vertices,
    epsilon_scan,
    in_correct_domain,
    lp_decode,
    moa_search,
    pcs_search,
    pseudo_weight,
    run_trials,
    sample_initial,
    single_trial,
    tanner_155_64,
)

TANNER_MIN_WEIGHT = 16.4037


def triangle() -> ParityCheckMatrix:
    return ParityCheckMatrix.from_check_lists(3, [[0, 1, 2]])


def hamming() -> ParityCheckMatrix:
    return ParityCheckMatrix.from_check_lists(
        7, [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]]
    )


@pytest.fixture(scope="module")
def tanner():
    return tanner_155_64()


@pytest.fixture(scope="module")
def tanner_runs(tanner):
    """1000 seeded trials per algorithm, shared by criteria 3, 4, 5, 7."""
    out = {}
    for algo in ("moa", "pcs"):
        out[algo] = [single_trial(tanner, algo, 42, k) for k in range(1000)]
    return out


def test_criterion_1_strong_duality(tanner, criterion):
    rng = np.random.default_rng(20260819)
    worst = 0.0
    for _ in range(200):
        x = rng.uniform(0.0, 1.5, tanner.n_bits)
        gap = abs(lp_decode(tanner, x).lp_value - dual_decode(tanner, x).value)
        worst = max(worst, gap)
    criterion(
        1, worst <= 1e-6,
        f"primal/dual gap over 200 random decodes: worst {worst:.3g} (limit 1e-6)",
    )


def test_criterion_2_small_code_oracle_minimum(criterion):
    details = []
    ok = True
    for h, name in ((triangle(), "single-check"), (hamming(), "hamming")):
        oracle = min(pseudo_weight(v) for v in enumerate_vertices(build_cone(h)))
        found = []
        for algo, search in (("moa", moa_search), ("pcs", pcs_search)):
            best = math.inf
            for k in range(100):
                rng = np.random.default_rng(1000 + k)
                res = search(h, sample_initial(h, rng))
                if res.converged:
                    best = min(best, res.weight)
            found.append(best)
            ok = ok and abs(best - oracle) <= 1e-9
        if name == "single-check":
            ok = ok and oracle == 2.0
        details.append(f"{name}: oracle {oracle} moa {found[0]:.12g} pcs {found[1]:.12g}")
    criterion(2, ok, "; ".join(details))


def test_criterion_3_moa_traces_monotone(tanner_runs, criterion):
    bad = 0
    for _, res in tanner_runs["moa"]:
        trace = res.weight_trace
        if any(b > a + 1e-9 for a, b in zip(trace, trace[1:])):
            bad += 1
    criterion(3, bad == 0, f"nonincreasing weight traces: {1000 - bad}/1000")


def test_criterion_4_pcs_traces_monotone_below_n(tanner_runs, criterion):
    n = 155
    checked = 0
    bad = 0
    for _, res in tanner_runs["pcs"]:
        trace = res.weight_trace
        if all(w < n for w in trace):
            checked += 1
            if any(b > a + 1e-9 for a, b in zip(trace, trace[1:])):
                bad += 1
    criterion(
        4, bad == 0,
        f"traces below N=155 throughout: {checked}/1000, monotone {checked - bad}/{checked}",
    )


def test_criterion_5_bracketing_on_converged_endpoints(tanner, tanner_runs, criterion):
    checked = 0
    bad = 0
    for algo in ("moa", "pcs"):
        for _, res in tanner_runs[algo]:
            if res is not None and res.converged:
                checked += 1
                if not bracketing_check(tanner, res):
                    bad += 1
    criterion(
        5, checked > 0 and bad == 0,
        f"(1 -/+ 1e-3) decode bracket holds for {checked - bad}/{checked} converged endpoints",
    )


def test_criterion_6_tanner_minimum_weight(tanner, criterion):
    mins = {}
    for seed in (42, 20260819, 7):
        records = run_trials(tanner, "moa", 10_000, seed)
        mins[seed] = min(r.weight for r in records if r.converged)
    hit = [s for s, w in mins.items() if abs(w - TANNER_MIN_WEIGHT) <= 0.01]
    ok = all(w <= 16.5 for w in mins.values()) and hit and all(
        w < 20.0 for w in mins.values()
    )
    listing = ", ".join(f"seed {s}: {w:.6f}" for s, w in mins.items())
    criterion(6, bool(ok), f"10^4-trial minima {listing}; within 0.01 of "
                           f"{TANNER_MIN_WEIGHT}: {len(hit)}/3 seeds")


def _rho_at(pairs, w):
    rho = 0.0
    for wi, ri in pairs:
        if wi <= w:
            rho = ri
        else:
            break
    return rho


def test_criterion_7_spectrum_dominance(tanner_runs, criterion):
    # collapse solver jitter: identical rational weights may differ by ~1e-14
    spectra = {}
    for algo in ("moa", "pcs"):
        records = [
            dataclasses.replace(rec, weight=round(rec.weight, 9))
            for rec, _ in tanner_runs[algo]
        ]
        spectra[algo] = cumulative_spectrum(records)
    sample_points = sorted(
        {w for w, _ in spectra["moa"] if w <= 18.0}
        | {w for w, _ in spectra["pcs"] if w <= 18.0}
    )
    violations = [
        w for w in sample_points
        if _rho_at(spectra["moa"], w) < _rho_at(spectra["pcs"], w)
    ]
    curve = " ".join(
        f"w={w:.4f}:{_rho_at(spectra['moa'], w):.4f}/{_rho_at(spectra['pcs'], w):.4f}"
        for w in sample_points[:6]
    )
    criterion(
        7, not violations,
        f"rho_moa >= rho_pcs at {len(sample_points) - len(violations)}"
        f"/{len(sample_points)} sample weights <= 18; head (moa/pcs): {curve}",
        soft=True,
    )


def test_criterion_8_correct_domain_convexity(tanner, criterion):
    rng = np.random.default_rng(8)

    def draw_in_domain():
        while True:
            x = rng.normal(0.0, 0.42, tanner.n_bits)
            if in_correct_domain(tanner, x):
                return x

    bad = 0
    for _ in range(500):
        x1, x2 = draw_in_domain(), draw_in_domain()
        for t in (0.25, 0.5, 0.75):
            if not in_correct_domain(tanner, (1 - t) * x1 + t * x2):
                bad += 1
    criterion(
        8, bad == 0,
        f"500 in-domain pairs, 1500 convex combinations, violations: {bad}",
    )


def test_criterion_9_epsilon_scan_threshold(criterion):
    details = []
    ok = True
    for h, name in ((triangle(), "single-check"), (hamming(), "hamming")):
        verts = enumerate_vertices(build_cone(h))
        wmin = min(pseudo_weight(v) for v in verts)
        beta_0 = min(verts, key=pseudo_weight)  # seed at the min-weight direction
        grid = np.linspace(0.9 * math.sqrt(wmin) / 2, 1.15 * math.sqrt(wmin) / 2, 41)
        scan = epsilon_scan(h, beta_0, grid)
        resolution = max(4 * (b * b - a * a) for a, b in zip(grid, grid[1:]))
        est = 4 * scan.epsilon_star**2 if scan.epsilon_star is not None else math.nan
        ok = ok and scan.epsilon_star is not None and abs(est - wmin) <= resolution
        details.append(f"{name}: 4 eps*^2 = {est:.4f} vs w_min {wmin} "
                       f"(resolution {resolution:.4f})")
    criterion(9, ok, "; ".join(details))


def test_criterion_10_codeword_weights_exact(criterion):
    checked = 0
    ok = True
    for h in (triangle(), hamming()):
        dense = h.to_dense().astype(int)
        for bits in itertools.product((0, 1), repeat=h.n_bits):
            c = np.array(bits, dtype=float)
            if c.any() and not (dense @ np.array(bits) % 2).any():
                checked += 1
                ok = ok and pseudo_weight(c) == float(sum(bits))
    criterion(
        10, ok and checked == 3 + 15,
        f"pseudo-weight equals Hamming weight on all {checked} nonzero codewords",
    )
