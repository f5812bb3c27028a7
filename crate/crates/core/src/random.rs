//! Seeded generators for test and study instances.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frame::FrameFamily;
use crate::krein::{KVector, SignatureSpace};
use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::q_frames::QOperator;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream `stream` of `seed`; used to split work across threads.
    pub fn stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn complex_gaussian(&mut self) -> C64 {
        C64::new(self.gaussian(), self.gaussian()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn real_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| c(self.gaussian()))
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    pub fn vector(&mut self, dim: usize) -> KVector {
        KVector::new(CVector::from_fn(dim, |_, _| self.complex_gaussian()))
    }

    /// Haar-distributed real orthogonal matrix (QR with sign fix).
    pub fn orthogonal(&mut self, n: usize) -> CMatrix {
        let g = self.real_matrix(n, n);
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        for k in 0..n {
            if r[(k, k)].re < 0.0 {
                q.column_mut(k).neg_mut();
            }
        }
        q
    }

    /// `J = U diag(I_p, -I_q) U^T` for a random real orthogonal `U`.
    pub fn signature_space(&mut self, p: usize, q: usize) -> SignatureSpace {
        let u = self.orthogonal(p + q);
        let mut signs = vec![1.0; p];
        signs.extend(std::iter::repeat_n(-1.0, q));
        let j = &u * linalg::real_diagonal(&signs) * u.transpose();
        let plus = u.columns(0, p).into_owned();
        let minus = u.columns(p, q).into_owned();
        SignatureSpace::from_parts(j, plus, minus).expect("orthogonal conjugate of a signature matrix")
    }

    /// Complex `rows x cols` matrix with spectral norm uniform in `(0, max_norm]`.
    pub fn contraction(&mut self, rows: usize, cols: usize, max_norm: f64) -> CMatrix {
        let k = self.complex_matrix(rows, cols);
        let n = linalg::spectral_norm(&k);
        if n == 0.0 {
            return k;
        }
        let target = max_norm * self.uniform(0.05, 1.0);
        k * c(target / n)
    }

    /// Bases of a random maximal positive / negative pair, as graphs of
    /// contractions `H+ -> H-` and `H- -> H+`. The pair is J-orthogonal only by accident.
    pub fn definite_pair(&mut self, space: &SignatureSpace, max_norm: f64) -> (CMatrix, CMatrix) {
        let (hp, hm) = (space.plus_basis(), space.minus_basis());
        let kp = self.contraction(space.q(), space.p(), max_norm);
        let km = self.contraction(space.p(), space.q(), max_norm);
        (hp + hm * kp, hm + hp * km)
    }

    /// A J-frame with `p + extra_plus` vectors in `M+` and `q + extra_minus` in `M-`.
    pub fn jframe(&mut self, space: Arc<SignatureSpace>, extra_plus: usize, extra_minus: usize) -> FrameFamily {
        let (bp, bm) = self.definite_pair(&space, 0.7);
        let cp = self.complex_matrix(space.p(), space.p() + extra_plus);
        let cm = self.complex_matrix(space.q(), space.q() + extra_minus);
        let vectors = linalg::hstack(&(bp * cp), &(bm * cm));
        FrameFamily::from_matrix(space, vectors).expect("nonempty family")
    }

    /// Union of two `[.,.]`-orthonormal bases per side, scaled by `scale`:
    /// an A-tight J-frame with `A = 2 scale^2`.
    pub fn tight_jframe(&mut self, space: Arc<SignatureSpace>, scale: f64) -> FrameFamily {
        let (bp, bm) = self.definite_pair(&space, 0.7);
        let mut cols = Vec::new();
        for (basis, sign) in [(bp, 1.0), (bm, -1.0)] {
            let on = j_orthonormalize(&space, &basis, sign);
            let k = on.ncols();
            for _ in 0..2 {
                let u = unitary(self, k);
                cols.push(&on * u * c(scale));
            }
        }
        let all = cols.iter().skip(1).fold(cols[0].clone(), |acc, m| linalg::hstack(&acc, m));
        FrameFamily::from_matrix(space, all).expect("nonempty family")
    }

    /// Random `Q` anticommuting with `J`, with `||Q|| = max_sigma * u`, `u` uniform in `[0.1, 1]`.
    pub fn q_operator(&mut self, space: Arc<SignatureSpace>, max_sigma: f64) -> QOperator {
        let b = self.complex_matrix(space.q(), space.p());
        let n = linalg::spectral_norm(&b);
        let b = if n > 0.0 { b * c(max_sigma * self.uniform(0.1, 1.0) / n) } else { b };
        QOperator::from_block(space, b).expect("block shape")
    }

    /// `p + extra_plus` vectors in `H+` and `q + extra_minus` in `H-`.
    pub fn aligned_vectors(&mut self, space: &SignatureSpace, extra_plus: usize, extra_minus: usize) -> Vec<KVector> {
        let mut out = Vec::new();
        for (basis, count) in [
            (space.plus_basis(), space.p() + extra_plus),
            (space.minus_basis(), space.q() + extra_minus),
        ] {
            if basis.ncols() == 0 {
                continue;
            }
            let coeffs = self.complex_matrix(basis.ncols(), count);
            let m = basis * coeffs;
            out.extend(m.column_iter().map(|col| KVector::new(col.into_owned())));
        }
        out
    }
}

fn unitary(s: &mut Sampler, n: usize) -> CMatrix {
    let g = s.complex_matrix(n, n);
    g.qr().q()
}

/// Columns spanning the same space with `sign * B* J B = I`.
fn j_orthonormalize(space: &SignatureSpace, basis: &CMatrix, sign: f64) -> CMatrix {
    let gram = space.indefinite_gram(basis) * c(sign);
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    let mut out = basis * &vecs;
    for (k, v) in vals.iter().enumerate() {
        out.column_mut(k).scale_mut(1.0 / v.sqrt());
    }
    out
}
