pub mod algebra;
pub mod error;
pub mod format;
pub mod localder;
pub mod maps;
pub mod scalar;
pub mod solver;

pub use algebra::{
    antisymmetry_check, bracket, jacobi_check, primed_basis, support_profile,
    verify_construction, AlgebraSpec, AntisymmetryReport, BasisSymbol, Construction,
    ConstructionReport, ConstructionViolation, Element, JacobiReport, JacobiViolation,
    SupportProfile,
};
pub use error::{AlgebraError, FormatError, MapError, PipelineError, SolveError};
pub use format::{
    parse_algebra, parse_element, parse_map_file, parse_scalar, parse_symbol, render_element,
    render_map_file, render_symbol,
};
pub use localder::{
    check_center, decompose, probe_anchor, probe_cross, probe_layer_sum, probe_scaled,
    probe_shift, probe_tower, scaled_sample_count, CenterCheckReport, CentralEntry,
    DecomposeConfig, DecompositionOutcome, DecompositionReport, ProbeAttempt, ProbeSpec,
    PureCentralOutcome, PureCentralRecord, StageRecord, ViolationRecord,
};
pub use maps::{DerivationDescriptor, WindowedLinearMap};
pub use scalar::{QSqrt2, Rational};
pub use solver::{
    derivation_space, witness_solve, DerivationSpace, LinearSystem, SolveOutcome, VarLabel,
    WitnessOutcome, WitnessRejection,
};
