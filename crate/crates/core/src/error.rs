use thiserror::Error;

/// Everything that can go wrong while building or interrogating a system.
///
/// Points are carried as their `Debug` rendering so that the same error type
/// serves finite systems (indices) and stream systems (opaque states).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field `{field}` has {found} entries, expected {expected}")]
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("step[{point}] = {target} is not a point of a {size}-point system")]
    StepOutOfRange {
        point: usize,
        target: usize,
        size: usize,
    },
    #[error("`{field}` must be strictly positive, found {value} at point {point}")]
    NonPositive {
        field: &'static str,
        point: usize,
        value: String,
    },
    #[error("a finite system needs at least one point")]
    EmptySystem,
    #[error("point {0} is out of range")]
    InvalidPoint(usize),
    #[error("stream window must be at least 1")]
    ZeroWindow,
    #[error("requested depth {requested} exceeds the exploration window {window}")]
    WindowExceeded { requested: usize, window: usize },
    #[error("target set is not reached from {point} within {searched} steps{}", if *.truncated { " (window truncated)" } else { "" })]
    NotComplete {
        point: String,
        searched: usize,
        truncated: bool,
    },
    #[error("ratios are indexed from 1; R_0 is 0/0")]
    ZeroLengthRatio,
    #[error("frequency oracle could not decide pattern {pattern} at {point}")]
    OracleFailure { pattern: String, point: String },
    #[error("orbit of {point} closes up after {after} steps; the system is not aperiodic")]
    OrbitClosure { point: String, after: usize },
    #[error("marker set {index} carries no completeness certificate")]
    MissingCertificate { index: usize },
    #[error("the first marker set must be the whole space, but {point} is not in it")]
    NotWholeSpace { point: String },
    #[error("marker family has {found} sets, {needed} needed")]
    FamilyTooShort { needed: usize, found: usize },
    #[error("marker index {index} is out of range for a family of {len} sets")]
    MarkerIndex { index: usize, len: usize },
    #[error("set is not T-bounded")]
    NotBounded,
    #[error("measure is not T-w-invariant: mass mismatch at point {point}")]
    NotInvariant { point: usize },
    #[error("step is not injective: points {first} and {second} both map to {image}")]
    NotInjective {
        first: usize,
        second: usize,
        image: usize,
    },
    #[error("measure has a zero or negative atom at point {point}")]
    ZeroAtom { point: usize },
    #[error("measure has a negative atom at point {point}")]
    NegativeMass { point: usize },
    #[error("hypothesis h < limsup fails at point {point}: h = {h}, limsup = {limsup}")]
    HypothesisViolation {
        point: usize,
        h: String,
        limsup: String,
    },
    #[error("h is not T-invariant at point {point}: h(x) = {here}, h(Tx) = {next}")]
    NotInvariantObservable {
        point: usize,
        here: String,
        next: String,
    },
    #[error("h exceeds limsup at point {point}: h = {h}, limsup = {limsup}")]
    AboveLimsup {
        point: usize,
        h: String,
        limsup: String,
    },
    #[error("eventually periodic part is not conull: point {point} outside it has mass {mass}")]
    NotConull { point: usize, mass: String },
    #[error("ratios do not converge at supported point {point}: limit points {values}")]
    NotConvergent { point: usize, values: String },
    #[error("metric target index {index} is out of range ({count} targets)")]
    TargetIndex { index: usize, count: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("no cut from {point} at offset {start} before the hitting time {hit}")]
    NoCut {
        point: String,
        start: usize,
        hit: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
