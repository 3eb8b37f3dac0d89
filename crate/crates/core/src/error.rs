use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("index set would contain more than {cap} indices")]
    IndexSetTooLarge { cap: usize },

    #[error("tensor quadrature would need {requested} nodes (cap {cap})")]
    QuadratureTooLarge { requested: usize, cap: usize },

    #[error("numerical rank {rank} < {needed}; enlarge the grid or add sample points")]
    RankDeficient { rank: usize, needed: usize },

    #[error("weight n/K(x) is singular: the Christoffel function vanishes at the point")]
    SingularWeight,

    #[error(
        "redraw budget exhausted after {tries} tries \
         (last gram deviation {last_gram_deviation:.3e}, alpha_w {last_alpha:.3e}, beta_w {last_beta:.3e})"
    )]
    RedrawExhausted {
        tries: u32,
        last_gram_deviation: f64,
        last_alpha: f64,
        last_beta: f64,
    },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
