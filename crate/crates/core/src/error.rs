use thiserror::Error;

use crate::krein::SubspaceKind;

pub type Result<T> = std::result::Result<T, KreinError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KreinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid fundamental symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("subspace basis is rank deficient (numerical rank {rank} < {k})")]
    RankDeficient { rank: usize, k: usize },

    #[error("operation requires a nonzero subspace")]
    EmptySubspace,

    #[error("subspace is {0}, a definite subspace is required")]
    Classification(SubspaceKind),

    #[error("degenerate family: {0}")]
    DegenerateFamily(String),

    #[error("M+ and M- do not form a direct sum spanning the space: {0}")]
    Decomposition(String),

    #[error("frame operator is numerically singular (sigma_min/sigma_max = {ratio:e})")]
    SingularFrameOperator { ratio: f64 },

    #[error("tight reconstruction requested on a non-tight J-frame (A = {lower}, B = {upper})")]
    NotTight { lower: f64, upper: f64 },

    #[error("vector {index} is neutral ([f,f] = 0)")]
    NeutralVector { index: usize },

    #[error("family is not J-orthogonal (largest off-diagonal [f_n,f_m] = {defect:e})")]
    NotJOrthogonal { defect: f64 },

    #[error("matrix function argument {value} exceeds the overflow guard {limit}")]
    Overflow { value: f64, limit: f64 },

    #[error("invalid Q operator: {0}")]
    InvalidQ(String),

    #[error("{{cosh(Q/2) g_n}} is not complete: rank {rank} < {dim}")]
    IncompleteImage { rank: usize, dim: usize },

    #[error("vector {index} lies in neither H+ nor H-")]
    BlockAlignment { index: usize },

    #[error("family subspaces differ from those induced by Q (largest principal angle {angle:e})")]
    SubspaceMismatch { angle: f64 },

    #[error("quadrature grid: {0}")]
    Grid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl KreinError {
    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(KreinError::Dimension { expected, found })
        }
    }
}
