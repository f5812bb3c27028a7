//! Operators anticommuting with `J` and the frames they transport.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;


use crate::error::{KreinError, Result};
use crate::frame::{split_family, FrameFamily};
use crate::krein::{KVector, SignatureSpace, Subspace};
use crate::linalg::{self, c, CMatrix, C64, RANK_TOL};

/// Hermitian / anticommutation tolerance, relative to `||Q||`.
pub const Q_TOL: f64 = 1e-12;
/// Largest argument handed to `exp`/`cosh`/`sinh`.
pub const EXP_LIMIT: f64 = 700.0;
pub const BLOCK_ALIGNMENT_TOL: f64 = 1e-10;
pub const SUBSPACE_MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QFunction {
    ExpHalf,
    ExpMinusHalf,
    ExpFull,
    CoshHalf,
    SinhHalf,
    TanhHalf,
}

impl QFunction {
    pub const ALL: [QFunction; 6] = [
        QFunction::ExpHalf,
        QFunction::ExpMinusHalf,
        QFunction::ExpFull,
        QFunction::CoshHalf,
        QFunction::SinhHalf,
        QFunction::TanhHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QFunction::ExpHalf => "exp_half",
            QFunction::ExpMinusHalf => "exp_minus_half",
            QFunction::ExpFull => "exp_full",
            QFunction::CoshHalf => "cosh_half",
            QFunction::SinhHalf => "sinh_half",
            QFunction::TanhHalf => "tanh_half",
        }
    }

    /// Even and odd parts of the scalar function.
    fn parts(self) -> (fn(f64) -> f64, fn(f64) -> f64) {
        fn zero(_: f64) -> f64 {
            0.0
        }
        match self {
            QFunction::ExpHalf => (|x| (x / 2.0).cosh(), |x| (x / 2.0).sinh()),
            QFunction::ExpMinusHalf => (|x| (x / 2.0).cosh(), |x| -(x / 2.0).sinh()),
            QFunction::ExpFull => (f64::cosh, f64::sinh),
            QFunction::CoshHalf => (|x| (x / 2.0).cosh(), zero),
            QFunction::SinhHalf => (zero, |x| (x / 2.0).sinh()),
            QFunction::TanhHalf => (zero, |x| (x / 2.0).tanh()),
        }
    }

    /// Largest `|lambda|` accepted before the result would leave double range.
    fn limit(self) -> Option<f64> {
        match self {
            QFunction::TanhHalf => None,
            QFunction::ExpFull => Some(EXP_LIMIT),
            _ => Some(2.0 * EXP_LIMIT),
        }
    }
}

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QFunction {
    type Err = KreinError;

    fn from_str(s: &str) -> Result<Self> {
        QFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| KreinError::InvalidInput(format!("unknown matrix function '{s}'")))
    }
}

/// A Hermitian `Q` with `JQ + QJ = 0`.
///
/// In the adapted basis `U = [H+ | H-]` it reads `[[0, B*], [B, 0]]`; functions
/// of `Q` are evaluated from the thin SVD `B = W diag(s) V*`, so `Q` never goes
/// through a general eigensolver.
#[derive(Debug, Clone)]
pub struct QOperator {
    space: Arc<SignatureSpace>,
    matrix: CMatrix,
    block: CMatrix,
    w: CMatrix,
    v: CMatrix,
    sigma: Vec<f64>,
}

impl QOperator {
    /// `block` maps `H+` coordinates to `H-` coordinates (`q x p`).
    pub fn from_block(space: impl Into<Arc<SignatureSpace>>, block: CMatrix) -> Result<Self> {
        let space = space.into();
        let (p, q) = (space.p(), space.q());
        if block.nrows() != q || block.ncols() != p {
            return Err(KreinError::InvalidQ(format!(
                "block must be {q}x{p}, got {}x{}",
                block.nrows(),
                block.ncols()
            )));
        }
        let u = space.adapted_basis();
        let mut adapted = CMatrix::zeros(p + q, p + q);
        adapted.view_mut((p, 0), (q, p)).copy_from(&block);
        adapted.view_mut((0, p), (p, q)).copy_from(&block.adjoint());
        let matrix = &u * adapted * u.adjoint();
        Ok(Self::assemble(space, matrix, block))
    }

    pub fn from_matrix(space: impl Into<Arc<SignatureSpace>>, q: CMatrix) -> Result<Self> {
        let space = space.into();
        KreinError::check_dim(space.dim(), q.nrows())?;
        KreinError::check_dim(space.dim(), q.ncols())?;
        let scale = linalg::max_abs(&q);
        if linalg::max_abs(&(&q - q.adjoint())) > Q_TOL * scale {
            return Err(KreinError::InvalidQ("Q is not Hermitian".into()));
        }
        let j = space.j();
        let anti = linalg::max_abs(&(j * &q + &q * j));
        if anti > Q_TOL * scale {
            return Err(KreinError::InvalidQ(format!("||JQ + QJ|| = {anti:e}")));
        }
        let q = (&q + q.adjoint()) * c(0.5);
        let block = space.minus_basis().adjoint() * &q * space.plus_basis();
        Ok(Self::assemble(space, q, block))
    }

    pub fn zero(space: impl Into<Arc<SignatureSpace>>) -> Self {
        let space = space.into();
        let block = CMatrix::zeros(space.q(), space.p());
        Self::from_block(space, block).expect("zero block has the right shape")
    }

    /// `J = diag(I_m, -I_m)` and `B = diag(q_1..q_m)`: `m` decoupled 2x2 blocks.
    pub fn block_diagonal(qs: &[f64]) -> Self {
        let m = qs.len();
        Self::from_block(SignatureSpace::diagonal(m, m), linalg::real_diagonal(qs)).expect("square block")
    }

    fn assemble(space: Arc<SignatureSpace>, matrix: CMatrix, block: CMatrix) -> Self {
        // Zero singular values only touch the complements of W and V, which
        // `function_of` handles through projectors.
        let (w, sigma, v) = linalg::thin_svd(&block, 64.0 * f64::EPSILON);
        QOperator { space, matrix, block, w, v, sigma }
    }

    pub fn space(&self) -> &SignatureSpace {
        &self.space
    }

    pub fn shared_space(&self) -> Arc<SignatureSpace> {
        Arc::clone(&self.space)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    /// Singular values of `B`, descending. The spectrum of `Q` is `+-` these plus zeros.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s = self.sigma.clone();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn norm(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    /// `f(Q)` for `f = even + odd`, with no overflow guard.
    pub fn function_of(&self, even: impl Fn(f64) -> f64, odd: impl Fn(f64) -> f64) -> CMatrix {
        let (p, q) = (self.space.p(), self.space.q());
        let ev: Vec<C64> = self.sigma.iter().map(|&s| c(even(s))).collect();
        let od: Vec<C64> = self.sigma.iter().map(|&s| c(odd(s))).collect();
        let e0 = c(even(0.0));
        let scale = |m: &CMatrix, d: &[C64]| {
            let mut out = m.clone();
            for (k, mut col) in out.column_iter_mut().enumerate() {
                col *= d[k];
            }
            out
        };
        let (w, v) = (&self.w, &self.v);
        let tl = scale(v, &ev) * v.adjoint() + (linalg::identity(p) - v * v.adjoint()) * e0;
        let br = scale(w, &ev) * w.adjoint() + (linalg::identity(q) - w * w.adjoint()) * e0;
        let bl = scale(w, &od) * v.adjoint();
        let mut adapted = CMatrix::zeros(p + q, p + q);
        adapted.view_mut((0, 0), (p, p)).copy_from(&tl);
        adapted.view_mut((p, p), (q, q)).copy_from(&br);
        adapted.view_mut((p, 0), (q, p)).copy_from(&bl);
        adapted.view_mut((0, p), (p, q)).copy_from(&(scale(v, &od) * w.adjoint()));
        let u = self.space.adapted_basis();
        &u * adapted * u.adjoint()
    }

    pub fn matrix_function(&self, function: QFunction) -> Result<CMatrix> {
        if let Some(limit) = function.limit() {
            let top = self.norm();
            if top > limit {
                return Err(KreinError::Overflow { value: top, limit });
            }
        }
        let (even, odd) = function.parts();
        Ok(self.function_of(even, odd))
    }

    /// `C = J e^Q`, the operator of the first metric when `M+-` are J-orthogonal.
    pub fn c_operator(&self) -> Result<CMatrix> {
        Ok(self.space.j() * self.matrix_function(QFunction::ExpFull)?)
    }

    /// `tan` of the angles between `H+` and `M+` (length `p`) and between `H-`
    /// and `M-` (length `q`), ascending.
    pub fn angle_tangents(&self) -> (Vec<f64>, Vec<f64>) {
        let mut t: Vec<f64> = self.sigma.iter().map(|&s| (s / 2.0).tanh()).collect();
        t.sort_by(f64::total_cmp);
        let pad = |n: usize| {
            let mut out = vec![0.0; n - t.len()];
            out.extend_from_slice(&t);
            out
        };
        (pad(self.space.p()), pad(self.space.q()))
    }
}

/// `M+- = (I - tanh(Q/2)) H+-`.
pub fn subspaces_from_q(q: &QOperator) -> (Subspace, Subspace) {
    let space = q.space();
    let t = q.matrix_function(QFunction::TanhHalf).expect("tanh never overflows");
    let shift = linalg::identity(space.dim()) - t;
    let plus = Subspace::span(&(&shift * space.plus_basis()));
    let minus = Subspace::span(&(&shift * space.minus_basis()));
    (plus, minus)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport {
    pub theta_plus: Vec<f64>,
    pub theta_minus: Vec<f64>,
}

impl AngleReport {
    pub fn max(&self) -> f64 {
        self.theta_plus.iter().chain(&self.theta_minus).copied().fold(0.0, f64::max)
    }
}

/// Principal angles between `H+-` and `M+-`.
pub fn operator_angles(q: &QOperator) -> AngleReport {
    let (m_plus, m_minus) = subspaces_from_q(q);
    let space = q.space();
    AngleReport {
        theta_plus: linalg::principal_angles(space.plus_basis(), m_plus.basis()),
        theta_minus: linalg::principal_angles(space.minus_basis(), m_minus.basis()),
    }
}

/// `e^{-Q/2} g_n` with no alignment or completeness checks.
pub fn transport_vectors(q: &QOperator, g: &[KVector]) -> Result<Vec<KVector>> {
    let e = q.matrix_function(QFunction::ExpMinusHalf)?;
    g.iter()
        .map(|v| {
            KreinError::check_dim(q.space().dim(), v.dim())?;
            Ok(KVector::new(&e * v.coords()))
        })
        .collect()
}

/// `f_n = e^{-Q/2} g_n` for `g_n` taken from `H+` or `H-`.
pub fn transport_to_jframe(q: &QOperator, g: &[KVector]) -> Result<FrameFamily> {
    let space = q.space();
    let (pp, pm) = (space.h_plus().projector(), space.h_minus().projector());
    for (n, v) in g.iter().enumerate() {
        KreinError::check_dim(space.dim(), v.dim())?;
        let norm = v.norm();
        let off_plus = (&pm * v.coords()).norm();
        let off_minus = (&pp * v.coords()).norm();
        if off_plus.min(off_minus) > BLOCK_ALIGNMENT_TOL * norm {
            return Err(KreinError::BlockAlignment { index: n });
        }
    }
    let cosh = q.matrix_function(QFunction::CoshHalf)?;
    let mut image = CMatrix::zeros(space.dim(), g.len());
    for (n, v) in g.iter().enumerate() {
        image.set_column(n, &(&cosh * v.coords()));
    }
    let rank = linalg::numerical_rank(&image, RANK_TOL);
    if rank < space.dim() {
        return Err(KreinError::IncompleteImage { rank, dim: space.dim() });
    }
    split_family(q.shared_space(), &transport_vectors(q, g)?)
}

/// `e^{Q/2} f_n`, a conventional frame when `M+-` of the family are those of `Q`.
pub fn transport_to_hilbert_frame(family: &FrameFamily, q: &QOperator) -> Result<Vec<KVector>> {
    KreinError::check_dim(q.space().dim(), family.dim())?;
    let (m_plus, m_minus) = subspaces_from_q(q);
    let angle = family.m_plus().max_angle_to(&m_plus).max(family.m_minus().max_angle_to(&m_minus));
    if angle > SUBSPACE_MATCH_TOL {
        return Err(KreinError::SubspaceMismatch { angle });
    }
    let e = q.matrix_function(QFunction::ExpHalf)?;
    Ok(family
        .synthesis_matrix()
        .column_iter()
        .map(|col| KVector::new(&e * col))
        .collect())
}

/// `(f,g)_1 = (e^{Q/2} f, e^{Q/2} g)`.
pub fn inner_product_1(q: &QOperator, f: &KVector, g: &KVector) -> Result<C64> {
    KreinError::check_dim(q.space().dim(), f.dim())?;
    KreinError::check_dim(q.space().dim(), g.dim())?;
    let e = q.matrix_function(QFunction::ExpHalf)?;
    Ok((&e * g.coords()).dotc(&(&e * f.coords())))
}

/// `||f||^2 + ||e^{Q/2} f||^2`.
pub fn energetic_norm_squared(q: &QOperator, f: &KVector) -> Result<f64> {
    KreinError::check_dim(q.space().dim(), f.dim())?;
    let e = q.matrix_function(QFunction::ExpHalf)?;
    Ok(f.coords().norm_squared() + (&e * f.coords()).norm_squared())
}
