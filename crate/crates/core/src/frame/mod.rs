//! Frames under an indefinite metric.
//!
//! A [`FrameFamily`] is an ordered list of vectors `f_1..f_m` together with
//! its sign split: `N+ = { n : [f_n,f_n] >= 0 }`, `N- = { n : [f_n,f_n] < 0 }`
//! and the spans `M+`, `M-` of the two halves.

mod bundle;
mod certify;
mod reconstruct;

use std::sync::Arc;

pub use bundle::{compute_jm_and_c, OperatorBundle};
pub use certify::{certify, certify_in_span, fmt_f64, Bounds, Definition, FrameCertificate};
pub use reconstruct::{biorthogonal_gamma, dual_family, reconstruct, Formula, Reconstructor};

use crate::error::{KreinError, Result};
use crate::krein::{KVector, SignatureSpace, Subspace};
use crate::linalg::{self, c, CMatrix, CVector};

/// `|[f,f]| <= NEUTRAL_VECTOR_TOL |f|^2` marks a frame vector as neutral.
pub const NEUTRAL_VECTOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameFamily {
    space: Arc<SignatureSpace>,
    vectors: CMatrix,
    self_products: Vec<f64>,
    sigma: Vec<Sign>,
    n_plus: Vec<usize>,
    n_minus: Vec<usize>,
    neutral: Vec<usize>,
    m_plus: Subspace,
    m_minus: Subspace,
}

/// Splits `vectors` by the sign of `[f_n,f_n]`. Neutral vectors go to `N+`.
pub fn split_family(space: impl Into<Arc<SignatureSpace>>, vectors: &[KVector]) -> Result<FrameFamily> {
    let space = space.into();
    for v in vectors {
        KreinError::check_dim(space.dim(), v.dim())?;
    }
    if vectors.is_empty() {
        return Err(KreinError::DegenerateFamily("family is empty".into()));
    }
    let cols: Vec<CVector> = vectors.iter().map(|v| v.coords().clone()).collect();
    FrameFamily::from_matrix(space, CMatrix::from_columns(&cols))
}

impl FrameFamily {
    /// Builds the family from its synthesis matrix (one column per vector).
    pub fn from_matrix(space: impl Into<Arc<SignatureSpace>>, vectors: CMatrix) -> Result<Self> {
        let space = space.into();
        KreinError::check_dim(space.dim(), vectors.nrows())?;
        if vectors.ncols() == 0 {
            return Err(KreinError::DegenerateFamily("family is empty".into()));
        }
        let gram_diag: Vec<f64> = vectors
            .column_iter()
            .map(|col| col.dotc(&(space.j() * col)).re)
            .collect();
        let mut sigma = Vec::with_capacity(vectors.ncols());
        let mut n_plus = Vec::new();
        let mut n_minus = Vec::new();
        let mut neutral = Vec::new();
        for (n, (&ff, col)) in gram_diag.iter().zip(vectors.column_iter()).enumerate() {
            let scale = col.norm_squared();
            if ff.abs() <= NEUTRAL_VECTOR_TOL * scale {
                neutral.push(n);
            }
            if ff >= -NEUTRAL_VECTOR_TOL * scale {
                sigma.push(Sign::Plus);
                n_plus.push(n);
            } else {
                sigma.push(Sign::Minus);
                n_minus.push(n);
            }
        }
        let m_plus = Subspace::span(&linalg::select_columns(&vectors, &n_plus));
        let m_minus = Subspace::span(&linalg::select_columns(&vectors, &n_minus));
        if m_plus.is_zero() && m_minus.is_zero() {
            return Err(KreinError::DegenerateFamily("both M+ and M- are zero".into()));
        }
        Ok(FrameFamily {
            space,
            vectors,
            self_products: gram_diag,
            sigma,
            n_plus,
            n_minus,
            neutral,
            m_plus,
            m_minus,
        })
    }

    pub fn space(&self) -> &SignatureSpace {
        &self.space
    }

    pub fn shared_space(&self) -> Arc<SignatureSpace> {
        Arc::clone(&self.space)
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Synthesis matrix: column `n` is `f_n`.
    pub fn synthesis_matrix(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, n: usize) -> KVector {
        KVector::new(self.vectors.column(n).into_owned())
    }

    pub fn vectors(&self) -> Vec<KVector> {
        (0..self.len()).map(|n| self.vector(n)).collect()
    }

    /// `[f_n,f_n]` for every member.
    pub fn self_products(&self) -> &[f64] {
        &self.self_products
    }

    pub fn sigma(&self) -> &[Sign] {
        &self.sigma
    }

    pub fn n_plus(&self) -> &[usize] {
        &self.n_plus
    }

    pub fn n_minus(&self) -> &[usize] {
        &self.n_minus
    }

    /// Indices of numerically neutral members (all of them are in `N+`).
    pub fn neutral(&self) -> &[usize] {
        &self.neutral
    }

    pub fn m_plus(&self) -> &Subspace {
        &self.m_plus
    }

    pub fn m_minus(&self) -> &Subspace {
        &self.m_minus
    }

    pub(crate) fn side_vectors(&self, sign: Sign) -> CMatrix {
        match sign {
            Sign::Plus => linalg::select_columns(&self.vectors, &self.n_plus),
            Sign::Minus => linalg::select_columns(&self.vectors, &self.n_minus),
        }
    }

    /// Analysis: `f -> ([f,f_1], ..., [f,f_m])`.
    pub fn analysis(&self, f: &KVector) -> Result<CVector> {
        KreinError::check_dim(self.dim(), f.dim())?;
        Ok(self.vectors.adjoint() * (self.space.j() * f.coords()))
    }

    /// Synthesis: `c -> sum c_n f_n`.
    pub fn synthesis(&self, coeffs: &CVector) -> Result<KVector> {
        KreinError::check_dim(self.len(), coeffs.len())?;
        Ok(KVector::new(&self.vectors * coeffs))
    }

    /// `S f = sum [f,f_n] f_n`, i.e. `S = F F* J`.
    pub fn frame_operator(&self) -> CMatrix {
        &self.vectors * (self.vectors.adjoint() * self.space.j())
    }

    /// `S~ f = sum sigma_n [f,f_n] f_n`, evaluated directly from the signed sum.
    pub fn tilde_frame_operator(&self) -> CMatrix {
        let mut signed = self.vectors.clone();
        for (n, s) in self.sigma.iter().enumerate() {
            if *s == Sign::Minus {
                signed.column_mut(n).neg_mut();
            }
        }
        &signed * (self.vectors.adjoint() * self.space.j())
    }

    /// `S1 f = sum (f,f_n)_1 f_n`; requires the direct sum `M+ + M- = H`.
    pub fn frame_operator_first_metric(&self) -> Result<CMatrix> {
        Ok(OperatorBundle::new(self)?.s1)
    }

    /// Indefinite Gram matrix `[f_j, f_i]`.
    pub fn indefinite_gram(&self) -> CMatrix {
        self.space.indefinite_gram(&self.vectors)
    }

    /// Largest `|[f_n,f_m]|`, `n != m`, relative to `|f_n| |f_m|`.
    pub fn j_orthogonality_defect(&self) -> f64 {
        let g = self.indefinite_gram();
        let norms: Vec<f64> = self.vectors.column_iter().map(|col| col.norm()).collect();
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j {
                    let scale = norms[i] * norms[j];
                    if scale > 0.0 {
                        worst = worst.max(g[(i, j)].norm() / scale);
                    }
                }
            }
        }
        worst
    }

    /// The family with member `n` removed.
    pub fn without(&self, n: usize) -> Result<FrameFamily> {
        let keep: Vec<usize> = (0..self.len()).filter(|&k| k != n).collect();
        FrameFamily::from_matrix(self.shared_space(), linalg::select_columns(&self.vectors, &keep))
    }
}

/// `{f_n} u {J f_n}` for an orthonormal basis `{f_n}` of the hypermaximal
/// neutral `L = span{(e_k + e_{k+m}) / sqrt 2}` in `diag(I_m, -I_m)`.
///
/// An orthonormal basis of `H`, so a frame with `A = B = 1` in the plain metric,
/// but every member is neutral: `M+ = H` and `M- = {0}`.
pub fn neutral_demo_family(m: usize) -> Result<FrameFamily> {
    if m == 0 {
        return Err(KreinError::InvalidInput("neutral demo needs m >= 1".into()));
    }
    let space = SignatureSpace::diagonal(m, m);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut l = CMatrix::zeros(2 * m, m);
    for k in 0..m {
        l[(k, k)] = c(r);
        l[(m + k, k)] = c(r);
    }
    let jl = space.j() * &l;
    FrameFamily::from_matrix(space, linalg::hstack(&l, &jl))
}

/// Frame bounds of vectors in the plain Hilbert metric: extremal eigenvalues of `sum g g*`.
pub fn hilbert_frame_bounds(vectors: &[KVector]) -> Result<Bounds> {
    let first = vectors.first().ok_or_else(|| KreinError::InvalidInput("no vectors".into()))?;
    let dim = first.dim();
    let mut op = CMatrix::zeros(dim, dim);
    for v in vectors {
        KreinError::check_dim(dim, v.dim())?;
        op += v.coords() * v.coords().adjoint();
    }
    let ev = linalg::hermitian_eigenvalues(&op);
    Ok(Bounds { lower: ev[0], upper: ev[ev.len() - 1] })
}
