use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error(
        "jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})"
    )]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frame is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),

    #[error("complex structure check failed (defect {0:e})")]
    BadStructure(f64),

    #[error("sampler exhausted after {draws} draws without finding a member of {label}")]
    SamplerExhausted { label: String, draws: usize },

    #[error("polynomial has a non-real root {re} + {im}i")]
    ComplexRoot { re: f64, im: f64 },

    #[error("polynomial is not homogeneous of degree {degree} (defect {defect:e})")]
    NotHomogeneous { degree: usize, defect: f64 },

    #[error("root reconstruction failed (defect {0:e})")]
    Reconstruction(f64),

    #[error("singular matrix in jet map")]
    Singular,

    #[error("expression error at byte {pos}: {msg}")]
    Expr { pos: usize, msg: String },

    #[error("degenerate geometry: {0}")]
    Geometry(String),

    #[error("bisection bracket failure at node {node}: {msg}")]
    Bracket { node: usize, msg: String },

    #[error("grid iteration diverged after {sweeps} sweeps at ω = 1")]
    Diverged { sweeps: usize },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("{0}")]
    Unbounded(String),
}
