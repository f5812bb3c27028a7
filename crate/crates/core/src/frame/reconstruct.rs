use std::fmt;
use std::str::FromStr;

use crate::error::{KreinError, Result};
use crate::frame::certify::{certify, FrameCertificate, J_ORTHOGONAL_TOL};
use crate::frame::{FrameFamily, OperatorBundle, NEUTRAL_VECTOR_TOL};
use crate::krein::KVector;
use crate::linalg::{self, c, CMatrix, CVector, RANK_TOL};

/// Reconstruction formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `f = sum [f, S^-1 f_n] f_n`
    DualVectors,
    /// `f = sum [f, f_n] S^-1 f_n`
    DualCoefficients,
    /// `f = sum (f, S1^-1 f_n)_1 f_n`, the frame expansion in the first metric.
    FirstMetric,
    /// `f = (1/2A) sum [(J_M + sigma_n I) f, f_n] f_n` for A-tight J-frames.
    Tight,
    /// `f = sum sigma_n [f, S~^-1 f_n] f_n`
    SignedTilde,
}

impl Formula {
    pub const ALL: [Formula; 5] = [
        Formula::DualVectors,
        Formula::DualCoefficients,
        Formula::FirstMetric,
        Formula::Tight,
        Formula::SignedTilde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::DualVectors => "dual",
            Formula::DualCoefficients => "coeff",
            Formula::FirstMetric => "metric1",
            Formula::Tight => "tight",
            Formula::SignedTilde => "tilde",
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formula {
    type Err = KreinError;

    fn from_str(s: &str) -> Result<Self> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| KreinError::InvalidInput(format!("unknown formula '{s}'")))
    }
}

/// Precomputed duals and operators for repeated reconstructions.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    family: FrameFamily,
    certificate: FrameCertificate,
    duals: CMatrix,
    tilde_duals: Option<CMatrix>,
    bundle: Option<OperatorBundle>,
    first_metric_duals: Option<CMatrix>,
}

impl Reconstructor {
    pub fn new(family: &FrameFamily) -> Result<Self> {
        let s = family.frame_operator();
        let duals = invert_apply(&s, family.synthesis_matrix())?;
        let tilde_duals = invert_apply(&family.tilde_frame_operator(), family.synthesis_matrix()).ok();
        let bundle = OperatorBundle::new(family).ok();
        let first_metric_duals = bundle.as_ref().and_then(|b| invert_apply(&b.s1, family.synthesis_matrix()).ok());
        Ok(Reconstructor {
            family: family.clone(),
            certificate: certify(family),
            duals,
            tilde_duals,
            bundle,
            first_metric_duals,
        })
    }

    pub fn certificate(&self) -> &FrameCertificate {
        &self.certificate
    }

    /// Dual vectors `S^-1 f_n` as columns.
    pub fn duals(&self) -> &CMatrix {
        &self.duals
    }

    /// Whether `formula` can be evaluated for this family.
    pub fn supports(&self, formula: Formula) -> bool {
        match formula {
            Formula::DualVectors | Formula::DualCoefficients => true,
            Formula::FirstMetric => self.first_metric_duals.is_some(),
            Formula::Tight => self.bundle.is_some() && self.certificate.is_jframe_def13 && self.certificate.tight,
            Formula::SignedTilde => self.tilde_duals.is_some(),
        }
    }

    pub fn reconstruct(&self, f: &KVector, formula: Formula) -> Result<KVector> {
        let fam = &self.family;
        KreinError::check_dim(fam.dim(), f.dim())?;
        let j = fam.space().j();
        let synth = fam.synthesis_matrix();
        let jf = j * f.coords();
        let out: CVector = match formula {
            Formula::DualVectors => synth * (self.duals.adjoint() * &jf),
            Formula::DualCoefficients => &self.duals * (synth.adjoint() * &jf),
            Formula::FirstMetric => {
                let bundle = self.require_bundle()?;
                let duals = self
                    .first_metric_duals
                    .as_ref()
                    .ok_or(KreinError::SingularFrameOperator { ratio: 0.0 })?;
                synth * (duals.adjoint() * (&bundle.first_metric * f.coords()))
            }
            Formula::Tight => {
                let bundle = self.require_bundle()?;
                let cert = &self.certificate;
                let b = cert.reference_bounds();
                if !(cert.is_jframe_def13 && cert.tight) {
                    return Err(KreinError::NotTight { lower: b.lower, upper: b.upper });
                }
                let mut coeffs = synth.adjoint() * (j * (&bundle.j_m * f.coords()));
                let plain = synth.adjoint() * &jf;
                for (n, s) in fam.sigma().iter().enumerate() {
                    coeffs[n] += plain[n] * s.value();
                }
                synth * coeffs * c(0.5 / b.lower)
            }
            Formula::SignedTilde => {
                let duals = self
                    .tilde_duals
                    .as_ref()
                    .ok_or(KreinError::SingularFrameOperator { ratio: 0.0 })?;
                let mut coeffs = duals.adjoint() * &jf;
                for (n, s) in fam.sigma().iter().enumerate() {
                    coeffs[n] *= s.value();
                }
                synth * coeffs
            }
        };
        Ok(KVector::new(out))
    }

    fn require_bundle(&self) -> Result<&OperatorBundle> {
        self.bundle
            .as_ref()
            .ok_or_else(|| KreinError::Decomposition("first metric needs M+ + M- = H".into()))
    }
}

fn invert_apply(op: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let ratio = linalg::inverse_condition(op);
    if ratio < RANK_TOL {
        return Err(KreinError::SingularFrameOperator { ratio });
    }
    linalg::solve(op, rhs).ok_or(KreinError::SingularFrameOperator { ratio })
}

/// One-shot reconstruction; prefer [`Reconstructor`] for many vectors.
pub fn reconstruct(family: &FrameFamily, f: &KVector, formula: Formula) -> Result<KVector> {
    Reconstructor::new(family)?.reconstruct(f, formula)
}

/// Canonical duals `S^-1 f_n`.
pub fn dual_family(family: &FrameFamily) -> Result<Vec<KVector>> {
    let duals = invert_apply(&family.frame_operator(), family.synthesis_matrix())?;
    Ok(duals.column_iter().map(|col| KVector::new(col.into_owned())).collect())
}

/// `gamma_n = J f_n / [f_n,f_n]`, biorthogonal to a J-orthogonal family in `(.,.)`.
pub fn biorthogonal_gamma(family: &FrameFamily) -> Result<Vec<KVector>> {
    for (n, (&ff, col)) in family
        .self_products()
        .iter()
        .zip(family.synthesis_matrix().column_iter())
        .enumerate()
    {
        if ff.abs() <= NEUTRAL_VECTOR_TOL * col.norm_squared() {
            return Err(KreinError::NeutralVector { index: n });
        }
    }
    let defect = family.j_orthogonality_defect();
    if defect > J_ORTHOGONAL_TOL {
        return Err(KreinError::NotJOrthogonal { defect });
    }
    let j = family.space().j();
    Ok(family
        .synthesis_matrix()
        .column_iter()
        .zip(family.self_products())
        .map(|(col, &ff)| KVector::new(j * col * c(1.0 / ff)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krein::SignatureSpace;
    use crate::linalg::from_real;

    fn family(p: usize, q: usize, cols: usize, data: &[f64]) -> FrameFamily {
        FrameFamily::from_matrix(SignatureSpace::diagonal(p, q), from_real(p + q, cols, data)).unwrap()
    }

    fn close(a: &KVector, b: &KVector, tol: f64) -> bool {
        (a.coords() - b.coords()).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn euclidean_basis_reconstructs_exactly() {
        let e = family(2, 0, 2, &[1.0, 0.0, 0.0, 1.0]);
        let r = Reconstructor::new(&e).unwrap();
        let f = KVector::from_real(&[0.3, -1.7]);
        for formula in Formula::ALL {
            assert!(close(&r.reconstruct(&f, formula).unwrap(), &f, 1e-14), "{formula}");
        }
    }

    #[test]
    fn fundamental_basis_hand_expansion() {
        let fam = family(1, 1, 2, &[1.0, 0.0, 0.0, 1.0]);
        let duals = dual_family(&fam).unwrap();
        assert_eq!(duals[0], KVector::from_real(&[1.0, 0.0]));
        assert!(close(&duals[1], &KVector::from_real(&[0.0, -1.0]), 1e-15));
        let f = KVector::from_real(&[1.0, 2.0]);
        let out = reconstruct(&fam, &f, Formula::DualVectors).unwrap();
        assert!(close(&out, &f, 1e-15));
    }

    #[test]
    fn scaled_negative_member_dual() {
        // {e1, 2 e2}: dual of 2e2 is 2e2 / [2e2, 2e2] = -e2/2
        let fam = family(1, 1, 2, &[1.0, 0.0, 0.0, 2.0]);
        let duals = dual_family(&fam).unwrap();
        assert!(close(&duals[1], &KVector::from_real(&[0.0, -0.5]), 1e-15));
    }

    #[test]
    fn duals_are_biorthogonal_for_exact_frames() {
        let fam = family(1, 1, 2, &[2.0, 1.0, 0.5, 3.0]);
        let duals = dual_family(&fam).unwrap();
        let space = fam.space();
        for (k, d) in duals.iter().enumerate() {
            for n in 0..fam.len() {
                let v = space.indefinite_inner(d, &fam.vector(n)).unwrap();
                let expected = if k == n { 1.0 } else { 0.0 };
                assert!((v - c(expected)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let e = family(2, 0, 2, &[1.0, 0.0, 0.0, 1.0]);
        let g = biorthogonal_gamma(&e).unwrap();
        assert_eq!(g[0], e.vector(0));

        let fam = family(1, 1, 1, &[0.0, 1.0]);
        let g = biorthogonal_gamma(&fam).unwrap();
        assert!(close(&g[0], &KVector::from_real(&[0.0, 1.0]), 1e-15));

        let neutral = family(1, 1, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert_eq!(biorthogonal_gamma(&neutral).unwrap_err(), KreinError::NeutralVector { index: 0 });

        let skew = family(1, 1, 2, &[1.0, 0.0, 0.5, 1.0]);
        assert!(matches!(biorthogonal_gamma(&skew), Err(KreinError::NotJOrthogonal { .. })));
    }

    #[test]
    fn singular_operator_and_non_tight_errors() {
        let fam = family(2, 1, 1, &[1.0, 0.0, 0.0]);
        assert!(matches!(Reconstructor::new(&fam), Err(KreinError::SingularFrameOperator { .. })));

        let fam = family(1, 1, 2, &[1.0, 0.0, 0.0, 2.0]);
        let r = Reconstructor::new(&fam).unwrap();
        assert!(!r.supports(Formula::Tight));
        let err = r.reconstruct(&KVector::from_real(&[1.0, 1.0]), Formula::Tight).unwrap_err();
        assert!(matches!(err, KreinError::NotTight { .. }));
    }

    #[test]
    fn formula_names_round_trip() {
        for f in Formula::ALL {
            assert_eq!(f.name().parse::<Formula>().unwrap(), f);
        }
    }
}
