//! Error types shared across the crate.

use thiserror::Error;

use crate::algebra::BasisSymbol;

/// Errors raised by basis and bracket level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("symbol {0} does not exist in this algebra")]
    InvalidSymbol(BasisSymbol),
    #[error("construction {construction} needs truncation order at least {needs}, algebra has {has}")]
    OrderTooSmall {
        construction: &'static str,
        needs: u32,
        has: u32,
    },
    #[error("support profile modulus must be nonzero")]
    ZeroModulus,
}

/// Errors raised by windowed linear maps.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("symbol {0} lies outside the domain window [-{1}, {1}]")]
    OutOfWindow(BasisSymbol, i64),
    #[error("maps are declared over different algebras")]
    SpecMismatch,
    #[error("window must be nonnegative, got {0}")]
    NegativeWindow(i64),
}

/// Errors raised by the solver layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("system shape is inconsistent: {0}")]
    Shape(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("derivation space needs |degree| <= window/2, got degree {degree} at window {window}")]
    DegreeOutsideWindow { degree: i64, window: i64 },
    #[error("support window must be nonnegative, got {0}")]
    NegativeSupportWindow(i64),
}

/// Errors raised by the decomposition pipeline and probe constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("probe {probe} needs degree {needs} inside the window [-{window}, {window}]")]
    WindowTooSmall {
        probe: &'static str,
        needs: i64,
        window: i64,
    },
    #[error("probe {probe} is not defined for m = {m}")]
    BadProbeIndex { probe: &'static str, m: i64 },
    #[error("probe {probe} needs at least one sample")]
    NoSamples { probe: &'static str },
    #[error("probe {probe} rejects zero samples")]
    ZeroSample { probe: &'static str },
    #[error("probe {probe} needs pairwise distinct samples")]
    DuplicateSample { probe: &'static str },
    #[error("cross probes need 2*layer < order, got layer {layer} at order {order}")]
    CrossLayerUnavailable { layer: u32, order: u32 },
    #[error("candidate window must be at least 3 for the pipeline, got {0}")]
    PipelineWindowTooSmall(i64),
    #[error("center checks need a centered algebra")]
    CenterlessCenterCheck,
}

/// Errors raised while reading the textual/JSON formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("cannot parse algebra name {0:?}")]
    BadAlgebra(String),
    #[error("cannot parse basis symbol {0:?}")]
    BadSymbol(String),
    #[error("basis symbol {symbol:?} does not exist in algebra {algebra}")]
    SymbolOutsideAlgebra { symbol: String, algebra: String },
    #[error("cannot parse scalar {0:?}")]
    BadScalar(String),
    #[error("cannot parse element literal {literal:?}: {reason}")]
    BadElement { literal: String, reason: String },
    #[error("map file is malformed: {0}")]
    BadMapFile(String),
    #[error(transparent)]
    Map(#[from] MapError),
}
