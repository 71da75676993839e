"""LP decoding of binary linear codes and low-weight pseudo-codeword search."""

from .codes import (
    AlistFormatError,
    CodeReport,
    CodeStructureError,
    ParityCheckMatrix,
    gf2_rank,
    parse_alist,
    tanner_155_64,
    tanner_alist_path,
    tanner_circulant,
    validate_code,
    write_alist,
)
from .polytope import (
    LinearConstraintSet,
    Membership,
    PolytopeSizeError,
    build_cone,
    build_ps,
    contains,
    dump_lp_text,
)
from .lpsolve import (
    LpNumericalError,
    LpProblem,
    LpSolution,
    enumerate_vertices,
    is_vertex,
    rational_snap,
    solve,
)
from .decoder import (
    DecodeOutcome,
    DualCertificate,
    dual_decode,
    in_correct_domain,
    lp_decode,
)
from .search import (
    EpsilonScan,
    SearchResult,
    bracketing_check,
    epsilon_scan,
    instanton_from,
    moa_search,
    moa_step,
    pcs_search,
    pcs_step,
    pseudo_weight,
    sample_initial,
)
from .spectrum import (
    SpectrumRecord,
    cumulative_spectrum,
    distinct_pseudocodewords,
    endpoint_hash,
    records_csv,
    run_trials,
    single_trial,
    spectrum_csv,
    trial_seed,
)

__version__ = "0.1.0"

__all__ = [
    "AlistFormatError",
    "CodeReport",
    "CodeStructureError",
    "ParityCheckMatrix",
    "gf2_rank",
    "parse_alist",
    "tanner_155_64",
    "tanner_alist_path",
    "tanner_circulant",
    "validate_code",
    "write_alist",
    "LinearConstraintSet",
    "Membership",
    "PolytopeSizeError",
    "build_cone",
    "build_ps",
    "contains",
    "dump_lp_text",
    "LpNumericalError",
    "LpProblem",
    "LpSolution",
    "enumerate_vertices",
    "is_vertex",
    "rational_snap",
    "solve",
    "DecodeOutcome",
    "DualCertificate",
    "dual_decode",
    "in_correct_domain",
    "lp_decode",
    "EpsilonScan",
    "SearchResult",
    "bracketing_check",
    "epsilon_scan",
    "instanton_from",
    "moa_search",
    "moa_step",
    "pcs_search",
    "pcs_step",
    "pseudo_weight",
    "sample_initial",
    "SpectrumRecord",
    "cumulative_spectrum",
    "distinct_pseudocodewords",
    "endpoint_hash",
    "records_csv",
    "run_trials",
    "single_trial",
    "spectrum_csv",
    "trial_seed",
]
