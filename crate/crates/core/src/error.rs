use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is not Hermitian (max |H - H^dag| = {residual:.3e})")]
    NonHermitianInput { residual: f64 },

    #[error("negative spectrum: smallest eigenvalue {min_eigenvalue:.3e}")]
    NegativeSpectrum { min_eigenvalue: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("vectors are not orthonormal (max |G - I| = {residual:.3e})")]
    NonOrthonormal { residual: f64 },

    #[error("inconsistent stabilizer group: {0}")]
    InconsistentGroup(String),

    #[error("matrix is not unitary (max |U^dag U - I| = {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("certificate `{certificate}` failed: residual {residual:.3e} exceeds {tol:.1e}")]
    ToleranceViolation {
        certificate: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("syndrome subspaces of {first} and {second} overlap ({overlap:.3e})")]
    SubspacesOverlap {
        first: String,
        second: String,
        overlap: f64,
    },

    #[error("image of {label} is not an eigenspace of {operator} (residual {residual:.3e})")]
    NotEigenspace {
        label: String,
        operator: String,
        residual: f64,
    },

    #[error("{first} and {second} share the syndrome key {key}")]
    AmbiguousSyndrome {
        first: String,
        second: String,
        key: String,
    },

    #[error("logical dimension {0} is not supported here")]
    UnsupportedDimension(usize),

    #[error("ill-conditioned design matrix (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("fit did not converge: {0}")]
    NoConvergence(String),

    #[error("encoder does not match the code: {0}")]
    TruthTableMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
