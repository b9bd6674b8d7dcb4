use thiserror::Error;

/// Errors shared across the crate.
///
/// Valuation-sensitive routines report `PrecisionExhausted` instead of
/// guessing when a residue is indistinguishable from zero at the working
/// precision.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a unit: valuation is {0}")]
    NotAUnit(u32),
    #[error("no simple root: derivative vanishes mod {0}")]
    NoSimpleRoot(u64),
    #[error("bad ring spec: {0}")]
    BadSpec(String),
    #[error("ring has no conjugation automorphism")]
    NoConjugation,
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("form is not integral on the lattice: {0}")]
    ValuesNotIntegral(String),
    #[error("unsupported group family: {0}")]
    UnsupportedFamily(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("symmetry mismatch: {0}")]
    SymmetryMismatch(String),
    #[error("residue search space too large: {0}")]
    TooLarge(String),
    #[error("rigidity violation, this indicates a bug: {0}")]
    RigidityViolation(String),
    #[error("hypotheses unmet: {0}")]
    HypothesesUnmet(String),
    #[error("degenerate block: {0}")]
    DegenerateBlock(String),
    #[error("oracle refuted: {0}")]
    OracleRefuted(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
