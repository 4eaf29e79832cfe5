use proptest::prelude::*;
use susy_kernel::grassmann::Parity;
use susy_kernel::sample::{self, rng, SampleRng};
use susy_kernel::superfn::{
    compose, exterior_d, pullback_fn, pullback_form, ChartMorphism, ChartSpec, SuperFunction,
    SuperVectorField,
};
use susy_kernel::symcore::to_ratfunc;

fn chart() -> ChartSpec {
    ChartSpec::new(["z"], ["zeta1", "zeta2"]).unwrap()
}

fn function(r: &mut SampleRng, c: &ChartSpec, p: Parity) -> SuperFunction {
    let mut acc = SuperFunction::zero(c);
    for mask in 0..(1u32 << c.n()) {
        if Parity::of_len(mask.count_ones()) == p {
            let coeff = to_ratfunc(&sample::polynomial(r, "z", 2)).unwrap();
            acc = acc.add(&SuperFunction::monomial(c, mask, coeff)).unwrap();
        }
    }
    acc
}

fn field(r: &mut SampleRng, c: &ChartSpec, p: Parity) -> SuperVectorField {
    let dz = vec![function(r, c, p)];
    let dzeta = (0..c.n()).map(|_| function(r, c, p.flip())).collect();
    SuperVectorField::new(c, dz, dzeta).unwrap()
}

fn parity(r: &mut SampleRng) -> Parity {
    if rand::Rng::random_bool(r, 0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// (−1)^{|a||b|}
fn sign(a: Parity, b: Parity) -> bool {
    a == Parity::Odd && b == Parity::Odd
}

fn signed(x: SuperVectorField, minus: bool) -> SuperVectorField {
    if minus {
        x.neg()
    } else {
        x
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn bracket_is_graded_antisymmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart();
        let (p, q) = (parity(&mut r), parity(&mut r));
        let (x, y) = (field(&mut r, &c, p), field(&mut r, &c, q));
        let lhs = x.bracket(&y).unwrap();
        let rhs = signed(y.bracket(&x).unwrap(), !sign(p, q));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart();
        let (p, q, s) = (parity(&mut r), parity(&mut r), parity(&mut r));
        let (x, y, z) = (field(&mut r, &c, p), field(&mut r, &c, q), field(&mut r, &c, s));
        let lhs = x.bracket(&y.bracket(&z).unwrap()).unwrap();
        let a = x.bracket(&y).unwrap().bracket(&z).unwrap();
        let b = signed(y.bracket(&x.bracket(&z).unwrap()).unwrap(), sign(p, q));
        prop_assert_eq!(lhs, a.add(&b).unwrap());
    }

    #[test]
    fn fields_are_graded_derivations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart();
        let (p, q) = (parity(&mut r), parity(&mut r));
        let x = field(&mut r, &c, p);
        let s = parity(&mut r);
        let (f, g) = (function(&mut r, &c, q), function(&mut r, &c, s));
        let lhs = x.apply(&f.mul(&g).unwrap()).unwrap();
        let first = x.apply(&f).unwrap().mul(&g).unwrap();
        let mut second = f.mul(&x.apply(&g).unwrap()).unwrap();
        if sign(p, q) {
            second = second.neg();
        }
        prop_assert_eq!(lhs, first.add(&second).unwrap());
    }

    #[test]
    fn bracket_acts_as_graded_commutator(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart();
        let (p, q) = (parity(&mut r), parity(&mut r));
        let (x, y) = (field(&mut r, &c, p), field(&mut r, &c, q));
        let s = parity(&mut r);
        let f = function(&mut r, &c, s);
        let xy = x.apply(&y.apply(&f).unwrap()).unwrap();
        let mut yx = y.apply(&x.apply(&f).unwrap()).unwrap();
        if sign(p, q) {
            yx = yx.neg();
        }
        prop_assert_eq!(x.bracket(&y).unwrap().apply(&f).unwrap(), xy.sub(&yx).unwrap());
    }

    #[test]
    fn pullback_is_contravariant_and_commutes_with_d(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = chart();
        let morphism = |r: &mut SampleRng| {
            let even = vec![function(r, &c, Parity::Even)];
            let odd = (0..2).map(|_| function(r, &c, Parity::Odd)).collect();
            ChartMorphism::new(&c, &c, even, odd).unwrap()
        };
        let (f, g) = (morphism(&mut r), morphism(&mut r));
        let s = parity(&mut r);
        let h = function(&mut r, &c, s);
        let fg = compose(&f, &g).unwrap();
        prop_assert_eq!(pullback_fn(&fg, &h).unwrap(), pullback_fn(&g, &pullback_fn(&f, &h).unwrap()).unwrap());
        prop_assert_eq!(
            pullback_form(&f, &exterior_d(&h).unwrap()).unwrap(),
            exterior_d(&pullback_fn(&f, &h).unwrap()).unwrap()
        );
        let id = ChartMorphism::identity(&c);
        prop_assert_eq!(compose(&f, &id).unwrap(), f.clone());
        prop_assert_eq!(compose(&id, &f).unwrap(), f);
    }
}
