use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use susy_kernel::sample::{self, rng};
use susy_kernel::superfn::{
    compose, pullback_form, ChartMorphism, ChartSpec, SuperFunction, SuperOneForm, SuperVectorField,
};
use susy_kernel::susy::{
    apply_mobius, canonical_coordinates, classify_c11_automorphism, elliptic_action_generators,
    is_susy, is_susy_automorphism, reduce_to_fundamental_domain, theta_sign_choices, Primitive,
    Tau,
};
use susy_kernel::symcore::{equivalent, to_ratfunc, Expr, RatFunc, Scalar};

fn rat(e: &Expr) -> RatFunc {
    to_ratfunc(e).unwrap()
}

/// D = f∂_ζ + gζ∂_z.
fn field(f: &Expr, g: &Expr) -> SuperVectorField {
    let c = ChartSpec::c11();
    SuperVectorField::new(
        &c,
        vec![SuperFunction::monomial(&c, 1, rat(g))],
        vec![SuperFunction::from_ratfunc(&c, rat(f))],
    )
    .unwrap()
}

fn morphism(f: &Expr, g: &Expr) -> ChartMorphism {
    let c = ChartSpec::c11();
    ChartMorphism::new(
        &c,
        &c,
        vec![SuperFunction::from_ratfunc(&c, rat(f))],
        vec![SuperFunction::monomial(&c, 1, rat(g))],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn d_squared_on_rational_units(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (sample::laurent_unit(&mut r, "z"), sample::laurent_unit(&mut r, "z"));
        let check = is_susy(&field(&f, &g)).unwrap();
        prop_assert!(check.is_susy);
        let c = ChartSpec::c11();
        // D(D(z)) = D(gζ) = fg and D(D(ζ)) = D(f) = gf′ζ.
        let expected = SuperVectorField::new(
            &c,
            vec![SuperFunction::from_ratfunc(&c, rat(&f).mul(&rat(&g)))],
            vec![SuperFunction::monomial(&c, 1, rat(&g).mul(&rat(&f.diff("z"))))],
        ).unwrap();
        prop_assert_eq!(&check.d_squared, &expected);
        let z = SuperFunction::coord(&c, "z").unwrap();
        let d = field(&f, &g);
        prop_assert_eq!(check.d_squared.apply(&z).unwrap(), d.apply(&d.apply(&z).unwrap()).unwrap());
    }

    #[test]
    fn d_squared_matches_the_displayed_formula_when_f_is_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = sample::unit(&mut r, "z");
        let check = is_susy(&field(&Expr::one(), &g)).unwrap();
        let c = ChartSpec::c11();
        let displayed = SuperVectorField::new(&c, vec![SuperFunction::from_ratfunc(&c, rat(&g))], vec![SuperFunction::zero(&c)]).unwrap();
        prop_assert_eq!(check.d_squared, displayed);
    }

    #[test]
    fn canonical_coordinates_straighten_d(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (sample::unit(&mut r, "z"), sample::unit(&mut r, "z"));
        let cc = canonical_coordinates(&field(&f, &g)).unwrap();
        prop_assert!(cc.exact(), "{:?}", cc.residuals);
        // h = 1/f and w′ = h/g independently of how w was found.
        prop_assert!(equivalent(&cc.h, &f.clone().recip()));
        match &cc.w {
            Primitive::Symbolic(w) => {
                prop_assert!(equivalent(&w.diff("z"), &(f.clone() * g.clone()).recip()));
                prop_assert!(cc.map.is_some());
            }
            Primitive::Quadrature { integrand } => prop_assert!(equivalent(integrand, &(f * g).recip())),
        }
    }

    #[test]
    fn omega_pulls_back_by_f_prime_and_g_squared(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = sample::polynomial(&mut r, "z", 3) + sample::unit(&mut r, "z");
        let g = sample::unit(&mut r, "z");
        let c = ChartSpec::c11();
        let pulled = pullback_form(&morphism(&f, &g), &SuperOneForm::parse("dz - zeta*dzeta", &c).unwrap()).unwrap();
        let expected = SuperOneForm::new(
            &c,
            vec![SuperFunction::from_ratfunc(&c, rat(&f.diff("z")))],
            vec![SuperFunction::monomial(&c, 1, rat(&g).mul(&rat(&g)).neg())],
        ).unwrap();
        prop_assert_eq!(pulled, expected);
    }

    #[test]
    fn polynomial_automorphisms_are_affine_with_matching_root(seed in any::<u64>()) {
        let mut r = rng(seed);
        let z = || Expr::var("z");
        // Coefficient lists, so the predicate is decided independently of the classifier.
        let (fc, gc): (Vec<Scalar>, Vec<Scalar>) = if r.random_bool(0.5) {
            let root = sample::nonzero_scalar(&mut r);
            let mut g = vec![root.clone()];
            if r.random_bool(0.2) {
                g.push(sample::nonzero_scalar(&mut r));
            }
            let mut f = vec![sample::scalar(&mut r), &root * &root];
            if r.random_bool(0.2) {
                f.push(sample::nonzero_scalar(&mut r));
            }
            (f, g)
        } else if r.random_bool(0.3) {
            // f′ = g² with g = c·z^k: the form law holds, but f is bijective only for k = 0.
            let (c, k) = (sample::nonzero_scalar(&mut r), r.random_range(0..=2usize));
            let mut f = vec![Scalar::zero(); 2 * k + 2];
            f[0] = sample::scalar(&mut r);
            f[2 * k + 1] = &(&c * &c) / &Scalar::int(2 * k as i64 + 1);
            let mut g = vec![Scalar::zero(); k + 1];
            g[k] = c;
            (f, g)
        } else {
            let deg_f = r.random_range(0..=5);
            let deg_g = r.random_range(0..=2);
            ((0..=deg_f).map(|_| sample::scalar(&mut r)).collect(), (0..=deg_g).map(|_| sample::scalar(&mut r)).collect())
        };
        let poly = |cs: &[Scalar]| cs.iter().enumerate().fold(Expr::zero(), |acc, (k, c)| acc + Expr::constant(c.clone()) * z().pow(k as i64));
        let trim = |cs: &[Scalar]| {
            let mut v = cs.to_vec();
            while v.last().is_some_and(Scalar::is_zero) {
                v.pop();
            }
            v
        };
        let (ft, gt) = (trim(&fc), trim(&gc));
        let expect = ft.len() == 2 && gt.len() == 1 && &gt[0] * &gt[0] == ft[1];
        let g = poly(&gc);
        prop_assume!(!rat(&g).is_zero());
        let m = morphism(&poly(&fc), &g);
        let class = classify_c11_automorphism(&m).unwrap();
        prop_assert_eq!(class.is_some(), expect, "f = {:?}, g = {:?}", fc, gc);
        if let Some(cl) = class {
            prop_assert_eq!(&cl.a, &ft[1]);
            prop_assert_eq!(&cl.b, &ft[0]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fundamental_domain_reduction(re in -6.0f64..6.0, im in 0.02f64..4.0) {
        let tau = Tau::new(Complex64::new(re, im)).unwrap();
        let (t, g) = reduce_to_fundamental_domain(&tau).unwrap();
        prop_assert_eq!(g.det(), 1);
        let v = t.value();
        prop_assert!(v.re.abs() <= 0.5 && v.norm() >= 1.0 - 1e-15);
        prop_assert!((apply_mobius(&g, tau.value()) - v).norm() <= 1e-12 * v.norm().max(1.0));
        let (t2, g2) = reduce_to_fundamental_domain(&t).unwrap();
        prop_assert_eq!(t2, t);
        prop_assert!(g2.is_trivial());
    }
}

#[test]
fn lattice_generators_are_commuting_automorphisms() {
    for tau in [Complex64::new(0.0, 1.0), Complex64::new(0.25, 2.0)] {
        let tau = Tau::new(tau).unwrap();
        for (sa, sb) in theta_sign_choices() {
            let (a, b) = elliptic_action_generators(&tau, sa, sb).unwrap();
            for m in [&a, &b] {
                assert_eq!(is_susy_automorphism(m).unwrap().t, Some(RatFunc::one()));
            }
            assert_eq!(compose(&a, &b).unwrap(), compose(&b, &a).unwrap());
        }
    }
}

#[test]
fn exponential_frame_has_a_local_primitive() {
    let cc = canonical_coordinates(&field(&Expr::one(), &Expr::var("z").exp())).unwrap();
    assert!(cc.exact());
    let Primitive::Symbolic(w) = &cc.w else {
        panic!("expected a closed form")
    };
    assert!(equivalent(w, &-(-Expr::var("z")).exp()));
    assert!(!cc.global);
}
