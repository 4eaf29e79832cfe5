use proptest::prelude::*;
use susy_kernel::grassmann::{
    d_to_gl11, normalize_psi, psi_matrix, swap_matrix, DNumber, GrassmannElement, Parity,
    SuperMatrix,
};
use susy_kernel::sample::{self, rng};

fn n_gen() -> impl Strategy<Value = (u64, u8)> {
    (any::<u64>(), 0u8..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative_and_distributive((seed, n) in n_gen()) {
        let mut r = rng(seed);
        let (a, b, c) = (sample::grassmann(&mut r, n, None), sample::grassmann(&mut r, n, None), sample::grassmann(&mut r, n, None));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn homogeneous_elements_supercommute((seed, n) in n_gen()) {
        let mut r = rng(seed);
        let (e, f) = (sample::even(&mut r, n), sample::even(&mut r, n));
        let (x, y) = (sample::odd(&mut r, n), sample::odd(&mut r, n));
        prop_assert_eq!(&e * &x, &x * &e);
        prop_assert_eq!(&e * &f, &f * &e);
        prop_assert_eq!(&x * &y, -&(&y * &x));
        prop_assert!((&x * &x).is_zero());
    }

    #[test]
    fn units_invert((seed, n) in n_gen()) {
        let mut r = rng(seed);
        let u = sample::even_unit(&mut r, n);
        let v = u.ginv().unwrap();
        prop_assert_eq!(&u * &v, GrassmannElement::one(n));
        prop_assert!(v.has_parity(Parity::Even));
        let nil = sample::grassmann(&mut r, n, None).nilpotent();
        prop_assert!(nil.ginv().is_err());
    }

    #[test]
    fn pairs_round_trip((seed, n) in n_gen()) {
        let x = sample::grassmann(&mut rng(seed), n, None);
        prop_assert_eq!(GrassmannElement::from_pairs(n, &x.to_pairs()).unwrap(), x.clone());
        prop_assert_eq!(GrassmannElement::parse(&x.to_string(), n).unwrap(), x);
    }

    #[test]
    fn d_group_law_and_gl11_embedding(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (x, y, z) = (sample::d_unit(&mut r, 3), sample::d_unit(&mut r, 3), sample::d_unit(&mut r, 3));
        prop_assert_eq!(x.dmul(&y).unwrap().dmul(&z).unwrap(), x.dmul(&y.dmul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.dmul(&x.dinv().unwrap()).unwrap(), DNumber::one(3));
        prop_assert_eq!(x.dinv().unwrap().dmul(&x).unwrap(), DNumber::one(3));
        let lhs = d_to_gl11(&x.dmul(&y).unwrap()).unwrap();
        let rhs = d_to_gl11(&x).unwrap().mul(&d_to_gl11(&y).unwrap()).unwrap();
        prop_assert!(lhs.same_entries(&rhs));
    }

    #[test]
    fn psi_normalizes_to_the_swap(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, alpha) = (sample::even_unit(&mut r, 3), sample::odd(&mut r, 3));
        let psi = psi_matrix(&a, &alpha).unwrap();
        prop_assert!(psi.mul(&psi).unwrap().is_identity());
        let p = normalize_psi(&psi).unwrap();
        let conj: SuperMatrix = p.mul(&psi).unwrap().mul(&p.inverse().unwrap()).unwrap();
        prop_assert!(conj.same_entries(&swap_matrix(3)));
    }
}
