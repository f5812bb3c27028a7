use krein_frames::linalg::{self, c, max_principal_angle, CMatrix};
use krein_frames::random::Sampler;
use krein_frames::{KVector, SignatureSpace, Subspace, SubspaceKind};
use proptest::prelude::*;

fn space(seed: u64, p: usize, q: usize) -> (Sampler, SignatureSpace) {
    let mut s = Sampler::new(seed);
    let sp = s.signature_space(p, q);
    (s, sp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sesquilinear_and_hermitian(seed in any::<u64>(), p in 0usize..5, q in 0usize..5) {
        prop_assume!(p + q > 0);
        let (mut s, sp) = space(seed, p, q);
        let n = p + q;
        let (f, g, h) = (s.vector(n), s.vector(n), s.vector(n));
        let (a, b) = (c(s.gaussian()) + linalg::C64::i() * s.gaussian(), c(s.gaussian()));
        let comb = KVector::new(f.coords() * a + g.coords() * b);
        let lhs = sp.indefinite_inner(&comb, &h).unwrap();
        let rhs = a * sp.indefinite_inner(&f, &h).unwrap() + b * sp.indefinite_inner(&g, &h).unwrap();
        let scale = (a.norm() * f.norm() + b.norm() * g.norm()) * h.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        let fg = sp.indefinite_inner(&f, &g).unwrap();
        let gf = sp.indefinite_inner(&g, &f).unwrap();
        prop_assert!((fg - gf.conj()).norm() <= 1e-12 * f.norm() * g.norm());
    }

    #[test]
    fn cauchy_schwarz_with_unit_j(seed in any::<u64>(), p in 0usize..6, q in 0usize..6) {
        prop_assume!(p + q > 0);
        let (mut s, sp) = space(seed, p, q);
        let f = s.vector(p + q);
        let ff = sp.indefinite_inner(&f, &f).unwrap();
        prop_assert!(ff.im.abs() <= 1e-12 * f.norm().powi(2));
        prop_assert!(ff.re.abs() <= f.norm().powi(2) * (1.0 + 1e-12));
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>(), p in 1usize..5, q in 1usize..5, k in 1usize..5) {
        let (mut s, sp) = space(seed, p, q);
        let k = k.min(p + q - 1);
        let l = Subspace::new(s.complex_matrix(p + q, k)).unwrap();
        let perp = sp.j_orthogonal_complement(&l).unwrap();
        prop_assert_eq!(perp.dim(), p + q - k);
        let back = sp.j_orthogonal_complement(&perp).unwrap();
        prop_assert!(max_principal_angle(back.basis(), l.basis()) <= 1e-8);
    }

    #[test]
    fn j_adjoint_is_an_involution(seed in any::<u64>(), p in 0usize..5, q in 0usize..5) {
        prop_assume!(p + q > 0);
        let (mut s, sp) = space(seed, p, q);
        let a = s.complex_matrix(p + q, p + q);
        let twice = sp.j_adjoint(&sp.j_adjoint(&a).unwrap()).unwrap();
        prop_assert!(linalg::relative_difference(&twice, &a) <= 1e-13);
    }
}

/// Range of `[f,f]/(f,f)` over random unit vectors of `L` plus the generators.
fn sampled_kind(sp: &SignatureSpace, l: &Subspace, generators: &CMatrix, s: &mut Sampler) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let random = (0..1000).map(|_| KVector::new(l.basis() * s.vector(l.dim()).coords()));
    let given = generators.column_iter().map(|col| KVector::new(col.into_owned()));
    for f in random.chain(given) {
        let v = sp.indefinite_inner(&f, &f).unwrap().re / f.norm().powi(2);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_matches_sampling(seed in any::<u64>(), p in 1usize..4, q in 1usize..4, pick in 0usize..3) {
        let (mut s, sp) = space(seed, p, q);
        let (bp, bm) = s.definite_pair(&sp, 0.9);
        let basis: CMatrix = match pick {
            0 => bp,
            1 => bm,
            _ => linalg::hstack(&bp.columns(0, 1).into_owned(), &bm.columns(0, 1).into_owned()),
        };
        let l = Subspace::new(basis.clone()).unwrap();
        let class = sp.classify_subspace(&l).unwrap();
        let (lo, hi) = sampled_kind(&sp, &l, &basis, &mut s);
        let expected = [SubspaceKind::Positive, SubspaceKind::Negative, SubspaceKind::Indefinite][pick];
        prop_assert_eq!(class.kind, expected);
        match class.kind {
            SubspaceKind::Positive => {
                prop_assert!(lo > 0.0);
                prop_assert!(class.margin <= lo + 1e-12);
            }
            SubspaceKind::Negative => {
                prop_assert!(hi < 0.0);
                prop_assert!(class.margin <= -hi + 1e-12);
            }
            SubspaceKind::Indefinite => prop_assert!(lo < 0.0 && hi > 0.0),
            SubspaceKind::Neutral => prop_assert!(lo.abs() < 1e-10 && hi.abs() < 1e-10),
        }
        prop_assert_eq!(class.is_definite(), class.margin > 0.0);
    }
}
