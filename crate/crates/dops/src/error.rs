use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("missing coefficient {name} at index {index}")]
    MissingCoefficient { name: String, index: i64 },
    #[error("regularity violation: gamma^0_{index} = 0")]
    RegularityViolation { index: i64 },
    #[error("dilation factor lambda must be nonzero")]
    ZeroLambda,
    #[error("bad offsets: {0}")]
    BadOffsets(String),
    #[error("bad selector: {0}")]
    BadSelector(String),
    #[error("unsupported order d = {0}")]
    UnsupportedD(usize),
    #[error("P_{0}(0) = 0, LU factorization breaks down")]
    ZeroAtOrigin(usize),
    #[error("UL breakdown: zero pivot at row {0}")]
    Breakdown(usize),
    #[error("bidiagonal factorization failed: {0}")]
    FactorizationFailed(String),
    #[error("singular linear system: {0}")]
    SingularSystem(String),
    #[error("sequence is not d-symmetric: {0}")]
    NotDSymmetric(String),
    #[error("missing rho_{0}")]
    MissingRho(usize),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("series division by a series with zero leading term")]
    SeriesDivisionByZero,
    #[error("no quasi-orthogonality order up to {0}")]
    NotQuasi(usize),
    #[error("Uvarov denominator vanishes at m = {0}")]
    DenominatorVanishes(usize),
    #[error("QR iteration did not converge for n = {0}")]
    QRNoConvergence(usize),
    #[error("non-real roots: max |Im| = {0:e}")]
    NonRealRoots(f64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("sequence is not graded monic at index {0}")]
    NotGradedMonic(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn missing(name: &str, index: i64) -> Error {
    Error::MissingCoefficient { name: name.to_string(), index }
}
