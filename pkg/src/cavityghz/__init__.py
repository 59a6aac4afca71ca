"""Truncated-Fock-space simulator of cavity-QED Bell/GHZ preparation protocols
and the single-run GHZ test against local hidden variables."""

__version__ = "0.1.0"

from .backend import backend_name
from .dynamics import (
    ROTATION_K,
    ROTATION_R,
    ROTATION_R5,
    ROTATION_Z,
    JcParams,
    Rotation2,
    apply_conditional_phase,
    apply_dispersive,
    apply_jc,
    dispersive_distance,
    dispersive_propagator_matrix,
    displace,
    jc_propagator_matrix,
    optimal_probe_time,
    probe_branches,
    rotate,
)
from .errors import (
    DegenerateCat,
    DimensionMismatch,
    InvalidPhotonNumber,
    NonUnitaryRotation,
    NumericalError,
    SimulationError,
    TailMassExceeded,
    UnknownAtom,
    ValidationError,
    WrongAtomCount,
    WrongLevelPair,
    ZeroProbabilityBranch,
)
from .ghztest import (
    ALLOWED_BRANCHES,
    GhzTestResult,
    Observable,
    build_cavity_sigma_x,
    build_mermin,
    build_pauli,
    exact_branch_probabilities,
    expectation,
    lhv_exhaustive_check,
    lhv_prediction,
    run_ghz_test,
)
from .hilbert import (
    FIELD,
    AtomRef,
    AtomState,
    CompositeState,
    DensityBlock,
    FieldState,
    append_atom,
    cat_state,
    compose,
    fidelity,
    flatten_index,
    inner,
    make_coherent,
    measure_atom,
    parse_sign,
    reduce,
    unflatten_index,
)
from .protocol import (
    EPR_VARIANTS,
    AddAtom,
    ConditionalPhase,
    Inject,
    Measure,
    MeasurementRecord,
    ProtocolRun,
    ResonantProbe,
    Rotate,
    bell_pair,
    enumerate_branches,
    ghz_triple,
    hybrid_ghz_target,
    prepare_epr,
    prepare_ghz,
    run_protocol,
    success_probability_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
