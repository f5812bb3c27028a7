use std::sync::Arc;

use krein_frames::linalg::{self, c, spectral_norm, CMatrix, CVector};
use krein_frames::random::Sampler;
use krein_frames::{
    biorthogonal_gamma, certify, transport_to_jframe, FrameFamily, Formula, KVector, OperatorBundle, Reconstructor,
    Sign,
};
use proptest::prelude::*;

fn family(seed: u64, p: usize, q: usize, ep: usize, em: usize, tight: bool) -> (Sampler, FrameFamily) {
    let mut s = Sampler::new(seed);
    let space = Arc::new(s.signature_space(p, q));
    let fam = if tight { s.tight_jframe(space, 1.3) } else { s.jframe(space, ep, em) };
    (s, fam)
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    spectral_norm(&(a - b)) / spectral_norm(b).max(f64::MIN_POSITIVE)
}

fn cond(m: &CMatrix) -> f64 {
    let s = linalg::singular_values(m);
    s[0] / s[s.len() - 1]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_identities(seed in any::<u64>(), p in 1usize..6, q in 1usize..6, ep in 0usize..4, em in 0usize..4, tight in any::<bool>()) {
        let (_, fam) = family(seed, p, q, ep, em, tight);
        let b = OperatorBundle::new(&fam).unwrap();
        let j = fam.space().j();

        let js = j * &b.s;
        prop_assert!(rel(&js.adjoint(), &js) <= 1e-10);
        prop_assert!(linalg::hermitian_eigenvalues(&js)[0] > 0.0);
        let jst = j * &b.s_tilde;
        prop_assert!(rel(&jst.adjoint(), &jst) <= 1e-10);

        prop_assert!(rel(&(&b.s * &b.c), &b.s1) <= 1e-10);
        let s_inv = linalg::inverse(&b.s).unwrap();
        let s1_inv = linalg::inverse(&b.s1).unwrap();
        prop_assert!(rel(&(&b.c * s1_inv), &s_inv) <= 1e-10 * cond(&b.s));

        prop_assert!(rel(&(&b.j_m * &b.s), &b.s_tilde) <= 1e-10);
        let jm_plus = fam.space().j_adjoint(&b.j_m).unwrap();
        prop_assert!(rel(&(&b.s * jm_plus), &b.s_tilde) <= 1e-10);
    }

    #[test]
    fn formulas_agree(seed in any::<u64>(), p in 1usize..6, q in 1usize..6, ep in 0usize..4, em in 0usize..4, tight in any::<bool>()) {
        let (mut s, fam) = family(seed, p, q, ep, em, tight);
        prop_assume!(cond(&fam.frame_operator()) <= 1e6);
        let rec = Reconstructor::new(&fam).unwrap();
        let formulas: Vec<Formula> = Formula::ALL.into_iter().filter(|&f| rec.supports(f)).collect();
        prop_assert_eq!(formulas.contains(&Formula::Tight), tight);
        for _ in 0..4 {
            let f = s.vector(fam.dim());
            let outs: Vec<KVector> = formulas.iter().map(|&fm| rec.reconstruct(&f, fm).unwrap()).collect();
            for a in &outs {
                for b in &outs {
                    prop_assert!((a.coords() - b.coords()).norm() <= 1e-8 * f.norm());
                }
            }
        }
    }

    #[test]
    fn def11_bounds_sandwich_the_quotient(seed in any::<u64>(), p in 1usize..5, q in 1usize..5, ep in 0usize..3, em in 0usize..3) {
        let (mut s, fam) = family(seed, p, q, ep, em, false);
        let cert = certify(&fam);
        let b = cert.def11;
        let jf = fam.space().j() * fam.synthesis_matrix();
        for _ in 0..1000 {
            let f = s.vector(fam.dim()).into_inner();
            let r = (jf.adjoint() * &f).norm_squared() / f.norm_squared();
            prop_assert!(r >= b.lower - 1e-10 * b.upper && r <= b.upper * (1.0 + 1e-10));
        }
    }

    #[test]
    fn def13_bounds_hold_on_both_sides(seed in any::<u64>(), p in 1usize..5, q in 1usize..5, ep in 0usize..3, em in 0usize..3) {
        let (mut s, fam) = family(seed, p, q, ep, em, false);
        let cert = certify(&fam);
        let b = cert.def13.expect("random J-frames certify");
        let space = fam.space();
        for (sign, sub, idx) in [(1.0, fam.m_plus(), fam.n_plus()), (-1.0, fam.m_minus(), fam.n_minus())] {
            let side = linalg::select_columns(fam.synthesis_matrix(), idx);
            for _ in 0..200 {
                let f = sub.basis() * s.vector(sub.dim()).coords();
                let ff = sign * (f.adjoint() * space.j() * &f)[(0, 0)].re;
                let sum = (side.adjoint() * space.j() * &f).norm_squared();
                prop_assert!(sum >= b.lower * ff * (1.0 - 1e-10) && sum <= b.upper * ff * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn signed_tilde_expansions(seed in any::<u64>(), p in 1usize..5, q in 1usize..5, ep in 0usize..3, em in 0usize..3) {
        let (mut s, fam) = family(seed, p, q, ep, em, false);
        let st_inv = linalg::inverse(&fam.tilde_frame_operator()).unwrap();
        let j = fam.space().j();
        let synth = fam.synthesis_matrix();
        let tilde_duals = &st_inv * synth;
        let f = s.vector(fam.dim()).into_inner();
        let mut first = CVector::zeros(fam.dim());
        let mut second = CVector::zeros(fam.dim());
        for (n, sg) in fam.sigma().iter().enumerate() {
            let sgn = c(if *sg == Sign::Plus { 1.0 } else { -1.0 });
            let fn_ = synth.column(n);
            let dn = tilde_duals.column(n);
            first += fn_ * (dn.dotc(&(j * &f)) * sgn);
            second += dn * (fn_.dotc(&(j * &f)) * sgn);
        }
        prop_assert!((&first - &f).norm() <= 1e-8 * f.norm() * cond(&fam.tilde_frame_operator()).max(1.0));
        prop_assert!((&second - &f).norm() <= 1e-8 * f.norm() * cond(&fam.tilde_frame_operator()).max(1.0));
    }

    #[test]
    fn exact_frames_lose_the_frame_property(seed in any::<u64>(), p in 1usize..5, q in 1usize..5) {
        let (_, fam) = family(seed, p, q, 0, 0, false);
        let cert = certify(&fam);
        prop_assert!(cert.exact && cert.is_frame_def11);
        for n in 0..fam.len() {
            let smaller = certify(&fam.without(n).unwrap());
            prop_assert!(!smaller.is_frame_def11);
            prop_assert!(smaller.def11.lower < 1e-10 * smaller.def11.upper);
        }
    }

    #[test]
    fn j_orthogonal_expansion(seed in any::<u64>(), p in 1usize..5, q in 1usize..5, sigma in 0.1f64..3.0) {
        let mut s = Sampler::new(seed);
        let space = Arc::new(s.signature_space(p, q));
        let adapted = space.adapted_basis();
        let g: Vec<KVector> = adapted
            .column_iter()
            .map(|col| KVector::new(col.into_owned() * c(s.uniform(0.5, 2.0))))
            .collect();
        let qop = s.q_operator(Arc::clone(&space), sigma);
        let fam = transport_to_jframe(&qop, &g).unwrap();
        prop_assert!(certify(&fam).j_orthogonal);
        let gamma = biorthogonal_gamma(&fam).unwrap();
        let f = s.vector(fam.dim()).into_inner();
        let mut sum = CVector::zeros(fam.dim());
        for (n, gn) in gamma.iter().enumerate() {
            sum += fam.synthesis_matrix().column(n) * gn.coords().dotc(&f);
        }
        prop_assert!((&sum - &f).norm() <= 1e-8 * f.norm());
    }
}
