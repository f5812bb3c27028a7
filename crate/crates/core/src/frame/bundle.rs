use crate::error::{KreinError, Result};
use crate::frame::FrameFamily;
use crate::krein::SignatureSpace;
use crate::linalg::{self, c, CMatrix, RANK_TOL};

/// The operators attached to a family whose spans satisfy `M+ + M- = H` (direct).
///
/// `s1` is assembled from the definition `(f,g)_1 = [f_M+, g_M+] - [f_M-, g_M-]`
/// through the oblique projections, while `c` comes from `(J_M + J_M^+)/2`, so
/// the identity `S1 = S C` compares two independent routes.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub s: CMatrix,
    pub s1: CMatrix,
    pub s_tilde: CMatrix,
    pub c: CMatrix,
    pub j_m: CMatrix,
    /// Oblique projection onto `M+` along `M-`.
    pub p_plus: CMatrix,
    /// Oblique projection onto `M-` along `M+`.
    pub p_minus: CMatrix,
    /// Matrix of the first metric: `(f,g)_1 = g* G f`.
    pub first_metric: CMatrix,
}

impl OperatorBundle {
    pub fn new(family: &FrameFamily) -> Result<Self> {
        let space = family.space();
        let (p_plus, p_minus) = oblique_projections(family)?;
        let j_m = &p_plus - &p_minus;
        let c = lemma_c(space, &j_m);
        let j = space.j();
        let first_metric = p_plus.adjoint() * j * &p_plus - p_minus.adjoint() * j * &p_minus;
        let f = family.synthesis_matrix();
        let s1 = f * (f.adjoint() * &first_metric);
        Ok(OperatorBundle {
            s: family.frame_operator(),
            s1,
            s_tilde: family.tilde_frame_operator(),
            c,
            j_m,
            p_plus,
            p_minus,
            first_metric,
        })
    }

    /// `(f,g)_1` for coordinate vectors.
    pub fn first_inner(&self, f: &crate::linalg::CVector, g: &crate::linalg::CVector) -> crate::linalg::C64 {
        g.dotc(&(&self.first_metric * f))
    }
}

/// `J_M` (identity on `M+`, minus identity on `M-`) and `C = (J_M + J_M^+)/2`.
pub fn compute_jm_and_c(family: &FrameFamily) -> Result<(CMatrix, CMatrix)> {
    let (p_plus, p_minus) = oblique_projections(family)?;
    let j_m = &p_plus - &p_minus;
    let c = lemma_c(family.space(), &j_m);
    Ok((j_m, c))
}

fn lemma_c(space: &SignatureSpace, j_m: &CMatrix) -> CMatrix {
    let j = space.j();
    (j_m + j * j_m.adjoint() * j) * c(0.5)
}

fn oblique_projections(family: &FrameFamily) -> Result<(CMatrix, CMatrix)> {
    let dim = family.dim();
    let bp = family.m_plus().basis();
    let bm = family.m_minus().basis();
    let (kp, km) = (bp.ncols(), bm.ncols());
    if kp + km != dim {
        return Err(KreinError::Decomposition(format!("dim M+ + dim M- = {kp} + {km} != {dim}")));
    }
    let frame = linalg::hstack(bp, bm);
    let ratio = linalg::inverse_condition(&frame);
    if ratio < RANK_TOL {
        return Err(KreinError::Decomposition(format!("M+ and M- intersect (sigma ratio {ratio:e})")));
    }
    let inv = linalg::inverse(&frame).ok_or_else(|| KreinError::Decomposition("singular basis".into()))?;
    let p_plus = bp * inv.rows(0, kp);
    let p_minus = bm * inv.rows(kp, km);
    Ok((p_plus, p_minus))
}
