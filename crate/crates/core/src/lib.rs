//! Exact constructions for central Cantor sets `C(a)` and their difference sets `C(a) − C(a)`.
//!
//! Every endpoint, length, margin and measure is an exact rational. The crate is organized
//! bottom-up:
//!
//! - [`params`]: the ratio sequence `a`, the lengths `d_n`, weights and rank indices `k_n`.
//! - [`geometry`]: the intervals `I_t`, `J_s`, their children, gaps and overlaps, and the
//!   finite-depth approximants.
//! - [`gapcalc`]: the gap taxonomy (extremal gaps, gap families, associated intervals).
//! - [`classify`]: verdicts for the structure of `C(a) − C(a)`, the Cantorval measure and the
//!   two-parameter region scan.
//! - [`achievement`]: the bridge to achievement sets of fast convergent multigeometric series.
//! - [`oracle`]: brute-force enumeration of `C_n(a) − C_n(a)` used as ground truth.
//! - [`verify`]: named property checks comparing the closed forms against the oracle.

pub mod achievement;
pub mod classify;
pub mod gapcalc;
pub mod geometry;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod verify;

pub use achievement::Multigeometric;
pub use classify::{Provenance, Verdict, VerdictKind};
pub use geometry::{BinaryCode, Interval, IntervalKind, IntervalUnion, TernaryCode};
pub use params::{ParamSequence, RankIndex};
pub use scalar::{parse_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("ratio entry {0} is not strictly between 0 and 1")]
    EntryOutOfRange(String),
    #[error("index {index} is beyond the {len}-term finite sequence")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operation needs an eventually periodic sequence (period is empty)")]
    NotEventuallyPeriodic,
    #[error("no index with a_n > 1/3 recurs: the finite-union theorem applies instead")]
    NoIndexAboveOneThird,
    #[error("no k0 exists: every term is at least 1/3")]
    NoK0,
    #[error("J_s has no gaps at depth {depth}: a_{next} <= 1/3", next = depth + 1)]
    NotAGap { depth: usize },
    #[error("J_s has no overlaps at depth {depth}: a_{next} > 1/3", next = depth + 1)]
    NotAnOverlap { depth: usize },
    #[error("code length {len} is not k_m - 1 for any rank m")]
    MisalignedCodeLength { len: usize },
    #[error("rank {rank} is too small for a code of length {len}")]
    RankTooSmall { rank: usize, len: usize },
    #[error("no associated interval: N(0,s) = {n} lies outside the band ({lo}..={hi})")]
    NoAssociate { n: usize, lo: usize, hi: usize },
    #[error("intervals are not associated: {0}")]
    NotAssociated(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("theorem hypotheses unsatisfied: {0}")]
    HypothesesUnsatisfied(String),
    #[error("measure formula not applicable: {0}")]
    FormulaNotApplicable(String),
    #[error("gap-mass series does not converge (per-cycle ratio {0} >= 1)")]
    DivergentRatio(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("invalid multigeometric sequence: {0}")]
    InvalidMultigeometric(String),
    #[error("series is not fast convergent")]
    NotFastConvergent,
    #[error("q = {0} outside (0, 1/6)")]
    QOutOfRange(String),
    #[error("depth {depth} exceeds the enumeration cap {cap}")]
    DepthCapExceeded { depth: usize, cap: usize },
    #[error("no Cantorval certificate for this sequence")]
    CertificateMissing,
    #[error("structural error: {0}")]
    Structural(String),
}

impl Error {
    /// Process exit status for scripted use: 2 parse, 3 precondition, 4 structural.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Structural(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
