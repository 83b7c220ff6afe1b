mod common;

use achcr::ach::{
    bianchi_residual, christoffel, curvature, frame_brackets, frame_ricci, is_hermitian, koszul_connection,
    koszul_difference, ricci, table1_reference, ACHMetric,
};
use achcr::algebra;
use achcr::pseudohermitian::{identity_residuals, PseudohermitianData};
use achcr::scalar::{rational_string, Scalar};
use achcr::series::series_einsum;
use achcr::solver::indicial;
use achcr::sphere;
use achcr::tensor::InvariantTensor;
use achcr::Kinds;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9).prop_map(|(a, b, c, d)| Scalar::new(achcr::scalar::rat(a, b), achcr::scalar::rat(c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn rational_strings_round_trip(a in scalar()) {
        let s = rational_string(&a.re);
        prop_assert_eq!(Scalar::parse_rational(&s).unwrap(), a.re.clone());
        let (_, q) = s.split_once('/').unwrap();
        prop_assert!(!q.starts_with('-') && q != "0");
    }

    #[test]
    fn trace_determinant_factors(n in 1i64..=8, d in 0i64..=40) {
        prop_assert_eq!(indicial::trace_det(d, n), indicial::trace_det_closed(d, n));
        prop_assert!(!indicial::p_tf(d, n).is_zero());
    }

    #[test]
    fn sphere_coefficients_alternate(n in 1usize..=12) {
        let v = sphere::leading_recursion(n).unwrap();
        prop_assert_eq!(v.a, sphere::closed_form(n));
        for w in v.c.windows(2) {
            prop_assert!(&w[0] * &w[1] < achcr::scalar::rat(0, 1));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_algebras_satisfy_identities(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = common::random_algebra(&mut rng, n);
        prop_assert!(alg.validate().passed());
        let p = PseudohermitianData::new(&alg).unwrap();
        for r in identity_residuals(&p).unwrap() {
            prop_assert!(r.holds(), "{} fails", r.name);
        }
        let horizontal = alg.constants().restrict(&[Kinds::M, Kinds::M, Kinds::H]);
        prop_assert!(p.reconstructed_brackets().same_values(&horizontal));
    }

    #[test]
    fn christoffel_agrees_with_koszul_and_table(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alg = match which {
            0 => algebra::heisenberg(1).unwrap(),
            1 => algebra::su2(),
            _ => common::random_algebra(&mut rng, 1),
        };
        let p = PseudohermitianData::new(&alg).unwrap();
        let phi = common::random_phi(&mut rng, p.alphabet(), 5, 3);
        let m = ACHMetric::assemble(&p, &phi, 4).unwrap();
        let ch = christoffel(&p, &m).unwrap();
        prop_assert_eq!(&ch.mixed, &koszul_difference(&p, &m).unwrap());
        prop_assert_eq!(&ch.lower, &table1_reference(&p, &m).unwrap());
    }

    #[test]
    fn metric_inverse_and_curvature_symmetries(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = PseudohermitianData::new(&common::random_algebra(&mut rng, 1)).unwrap();
        let phi = common::random_phi(&mut rng, p.alphabet(), 4, 3);
        let m = ACHMetric::assemble(&p, &phi, 4).unwrap();
        let id = series_einsum("ij,jk->ik", &[&m.g, &m.ginv]);
        let a = p.alphabet();
        let delta = InvariantTensor::from_fn(a, &[Kinds::ALL, Kinds::ALL], |i| if i[0] == i[1] { Scalar::one() } else { Scalar::zero() });
        prop_assert_eq!(id.coeff(0).unwrap(), delta);
        for d in 1..4 {
            prop_assert!(id.coeff(d).unwrap().is_zero());
        }
        let c = curvature(&p, &m).unwrap();
        prop_assert_eq!(&c.ricci.permute(&[1, 0]), &c.ricci);
        prop_assert!(is_hermitian(&c.einstein));
        prop_assert!(bianchi_residual(&p, &m, &c).unwrap().is_empty());
        let br = frame_brackets(&p).unwrap();
        let lc = koszul_connection(&m, &br).unwrap();
        prop_assert_eq!(frame_ricci(&lc, &br).unwrap(), ricci(&p, &m).unwrap());
    }
}
