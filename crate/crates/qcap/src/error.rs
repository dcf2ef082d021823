use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expression error at byte {pos}: {msg}")]
    ExprSyntax { pos: usize, msg: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("division by zero in expression")]
    DivisionByZero,

    #[error("geometry file: {0}")]
    Parse(String),

    #[error("invalid geometry: {}", .0.join("; "))]
    InvalidGeometry(Vec<String>),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("charge score vector has {got} entries, mesh has {expected}")]
    ScoreLength { expected: usize, got: usize },

    #[error("observation point coincides with a segment endpoint")]
    EndpointSingularity,

    #[error("collocation point of element {observer} coincides with an endpoint of element {emitter}")]
    EndpointCollision { observer: usize, emitter: usize },

    #[error("matrix is numerically singular at pivot {index}")]
    SingularMatrix { index: usize },

    #[error("solve residual {residual:.3e} exceeds the {limit:.1e} bound")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("conductor index {index} out of range for {n_cond} conductors")]
    ConductorIndex { index: usize, n_cond: usize },

    #[error("previous control value is zero; relative change undefined")]
    DegenerateControl,

    #[error("observation point is within {limit:.1e} m of the element; quadrature excluded")]
    QuadratureTooClose { limit: f64 },

    #[error("quadrature did not reach tolerance within {max_subdivisions} subdivisions")]
    QuadratureDepth { max_subdivisions: usize },
}
