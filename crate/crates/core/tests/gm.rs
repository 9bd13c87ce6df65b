use std::sync::Arc;

use nabcoh::exactla::{AlgebraElement, CoefficientAlgebra, Rational};
use nabcoh::gmcheck::{
    h1_vanishing_check, is_cocycle, reduce_to_coboundary, GmError, LaurentPoly, Reduction,
};
use nabcoh::random::{seeded, small_rational};
use proptest::prelude::*;
use rand::Rng;

fn algebras() -> Vec<Arc<CoefficientAlgebra>> {
    vec![
        Arc::new(CoefficientAlgebra::rationals()),
        Arc::new(CoefficientAlgebra::dual_numbers()),
        Arc::new(CoefficientAlgebra::split()),
    ]
}

fn random_element<R: Rng>(rng: &mut R, alg: &Arc<CoefficientAlgebra>) -> AlgebraElement {
    let coords: Vec<Rational> = (0..alg.dim()).map(|_| small_rational(rng)).collect();
    AlgebraElement::new(alg, coords).unwrap()
}

proptest! {
    #[test]
    fn coboundaries_reduce_back(seed in any::<u64>(), d in -5i64..=5, which in 0usize..3) {
        let mut rng = seeded(seed);
        let alg = &algebras()[which];
        let a = random_element(&mut rng, alg);
        let f = LaurentPoly::coboundary(&a, d, 6).unwrap();
        prop_assert!(is_cocycle(&f, d).holds);
        match reduce_to_coboundary(&f, d).unwrap() {
            Reduction::Zero => prop_assert!(d == 0 && f.is_zero()),
            Reduction::Coboundary(b) => {
                prop_assert_eq!(&b, &a);
                prop_assert_eq!(LaurentPoly::coboundary(&b, d, 6).unwrap(), f);
            }
        }
    }

    #[test]
    fn other_polynomials_are_rejected(seed in any::<u64>(), d in -5i64..=5, which in 0usize..3) {
        let mut rng = seeded(seed);
        let alg = &algebras()[which];
        let mut f = LaurentPoly::zero(alg, 6);
        let n = loop {
            let n = rng.gen_range(-6i64..=6);
            if n != 0 && n != d {
                break n;
            }
        };
        f.add_term(n, &random_element(&mut rng, alg)).unwrap();
        let check = is_cocycle(&f, d);
        prop_assert!(!check.holds);
        prop_assert_eq!(reduce_to_coboundary(&f, d), Err(GmError::NotCocycle(check.mismatch.unwrap())));
    }
}

#[test]
fn vanishing_over_test_algebras() {
    for alg in algebras() {
        for d in -5..=5 {
            let r = h1_vanishing_check(d, 10, &alg).unwrap();
            assert!(r.verified, "{r:?}");
            assert_eq!(r.cocycle_dim, if d == 0 { 0 } else { alg.dim() });
        }
    }
}
