//! Frames in finite-dimensional Krein spaces.
//!
//! A Krein space here is `C^n` with a fundamental symmetry `J` and the indefinite
//! product `[f, g] = (Jf, g)`. The crate certifies J-frames, builds the frame
//! operators `S`, `S1`, `S~`, `C`, `J_M`, runs the reconstruction formulas and
//! transports frames through an operator `Q` anticommuting with `J`.

pub mod error;
pub mod exec;
pub mod format;
pub mod frame;
pub mod krein;
pub mod l2;
pub mod linalg;
pub mod probe;
pub mod q_frames;
pub mod random;
pub mod study;

pub use error::{KreinError, Result};
pub use exec::Execution;
pub use frame::{
    biorthogonal_gamma, certify, certify_in_span, compute_jm_and_c, dual_family, hilbert_frame_bounds,
    neutral_demo_family, reconstruct, split_family, Bounds, Definition, FrameCertificate, FrameFamily, Formula,
    OperatorBundle, Reconstructor, Sign,
};
pub use krein::{KVector, SignatureSpace, Subspace, SubspaceClass, SubspaceKind};
pub use q_frames::{
    energetic_norm_squared, inner_product_1, operator_angles, subspaces_from_q, transport_to_hilbert_frame,
    transport_to_jframe, AngleReport, QFunction, QOperator,
};
pub use study::{truncation_study, StudyRecipe, StudyRow, StudyTable};
