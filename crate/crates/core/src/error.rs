use crate::expr::ParseError;
use crate::jet::Group;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{group} variable index {index} out of range (dimension {dim})")]
    IndexOutOfRange { group: Group, index: usize, dim: usize },

    #[error("cannot seed a {0} variable when its cap is zero")]
    ZeroCap(Group),

    #[error("jet shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("multi-index {index} exceeds caps (x <= {x_cap}, y <= {y_cap})")]
    ExceedsCaps { index: String, x_cap: u8, y_cap: u8 },

    #[error("division by near-zero constant term {0:e}")]
    Singular(f64),

    /// A function was evaluated outside its real domain; typically a sample
    /// sitting on (or too close to) a singular direction of the metric.
    #[error("singular direction: {func} evaluated outside its real domain at {value:e}")]
    Domain { func: &'static str, value: f64 },

    #[error("singular direction: sample outside the admissible cone of {0}")]
    Inadmissible(String),

    #[error("degenerate metric: |det g| = {det:e} below threshold {threshold:e}")]
    DegenerateMetric { det: f64, threshold: f64 },

    #[error("singular metric: {0}")]
    SingularParameters(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("`{0}` has no closed-form spray")]
    NoClosedForm(String),

    #[error("`{0}` has no printed Berwald component for this quadratic form")]
    NoPrintedComponent(String),

    #[error("unknown metric id `{0}`")]
    UnknownMetric(String),

    #[error("spray is not of the special form G^1 quadratic, G^mu = P y^mu: {0}")]
    NotSpecialForm(String),

    #[error(
        "sampler starvation: accepted {accepted} of {requested} samples after {attempts} draws \
         (rejection rate {rejection_rate:.4})"
    )]
    SamplerStarvation {
        accepted: usize,
        requested: usize,
        attempts: usize,
        rejection_rate: f64,
    },

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
