use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("root order {root_order} cannot represent a cohomology class of order {required}")]
    RootOrderTooSmall { root_order: u64, required: u64 },

    #[error("phase ({re}, {im}) is {distance:.3e} from the nearest {root_order}-th root of unity")]
    SnapFailure {
        re: f64,
        im: f64,
        root_order: u64,
        distance: f64,
    },

    #[error("obstruction at {args:?} depends on the representative tuple (spread {spread:.3e})")]
    RepresentativeDependent { args: Vec<usize>, spread: f64 },

    #[error("inadmissible {table} lookup at {labels:?}")]
    InadmissibleTuple {
        table: &'static str,
        labels: Vec<usize>,
    },

    #[error("identity-grade restriction mismatch: {0}")]
    RestrictionMismatch(String),

    #[error("{what} is not a cocycle (worst residual {residual:.3e})")]
    NotACocycle { what: String, residual: f64 },

    #[error("grade violation: {0}")]
    GradeViolation(String),

    #[error("no gauge reconciles the tables: {0}")]
    MatchFailure(String),

    #[error("the relabeling 1-cochain is not a cocycle")]
    NotA1Cocycle,

    #[error("search budget of {0} candidates exhausted")]
    BudgetExceeded(usize),

    #[error("neither charge {a} nor {b} is abelian")]
    NotAbelian { a: usize, b: usize },

    #[error("monodromy lookup on non-abelian charges {a}, {b}")]
    NotAbelianMonodromy { a: usize, b: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integer overflow in exact linear algebra")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
