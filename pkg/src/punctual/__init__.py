"""Punctual: step-budgeted streams, padding transformers, online
combinatorics, diagonalization adversaries, and presented structures,
all auditable against brute-force oracles at desk scale."""

from .core import (
    NOT_YET,
    Done,
    FinSet,
    FuelMeter,
    PunctualStream,
    StepOracle,
    UniversalTable,
    cardinality,
    card_witness,
    certify_punctual,
    code_tuple,
    decode_tuple,
    find_missing,
    is_code,
    join,
    polynomial_budget,
)
from .errors import (
    AuditFailure,
    DensityTimeout,
    HallViolation,
    HorizonExceeded,
    InstanceInconsistent,
    InvalidInstance,
    PreconditionFailed,
    PromiseViolation,
    PunctualityViolation,
    ZeroElement,
)
from .transform import (
    ColoringInstance,
    ContFunPresentation,
    HbToWkl,
    IntervalCover,
    PunctualTree,
    RankOneGroup,
    WklToHb,
    baer_decode,
    baer_decode_set,
    baer_encode,
    cauchy_punctualize,
    coh_punctualize,
    covers_closed,
    delta01_to_tree,
    delta01_unique_path,
    hb_to_wkl,
    heine_borel_punctualize,
    heine_borel_stream,
    ivt_punctualize,
    ivt_stream,
    pruned_path,
    ramsey_punctualize,
    string_at,
    string_index,
    tree_punctualize,
    wkl_to_hb,
)
from .diagonal import (
    BctSolution,
    BreakpointTable,
    DelaySchedule,
    OpenSetStream,
    SteepFunction,
    baire_adversary,
    baire_bounded_adversary,
    bct_solve,
    density_certificate,
    dominate_escape,
    modulus_check,
    uc_adversary,
)
from .online_comb import (
    BipartiteInstance,
    HonestGraph,
    OrientedGraphStream,
    PosetStream,
    connected_components,
    hall_extended,
    hall_finite,
    reorient,
    rival_sands,
    schmerl_color,
    szpilrajn_extend,
)
from .structures import (
    BackForth,
    VectorSpacePresentation,
    ba_build,
    ba_decode,
    ba_encode,
    basis_finite_field,
    dlo_backforth,
    dlo_build,
    dlo_decode,
    dlo_encode,
    rg_build,
    rg_decode,
    rg_encode,
    span_elements,
)

__version__ = "0.1.0"
