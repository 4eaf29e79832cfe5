use proptest::prelude::*;
use rand::Rng;
use susy_kernel::atlas::{build_pi_line_atlas, build_projective_atlas};
use susy_kernel::fop::{
    affine_to_proj, apply_morphism_points, phi_invariance_check, pi_gluing_check, pi_standard_form,
    proj_standard_form, right_theta_stable, FopError, PiPointData,
};
use susy_kernel::grassmann::{GVec4, GrassmannElement};
use susy_kernel::sample::{self, rng, SampleRng};

fn pi_point(r: &mut SampleRng, n: u8) -> PiPointData {
    PiPointData::new(
        sample::even_unit(r, n),
        sample::odd(r, n),
        sample::even_unit(r, n),
        sample::odd(r, n),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn projective_round_trip_and_chart_change(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (n, m, k) = (r.random_range(0..=3u8), r.random_range(1..=2usize), r.random_range(0..=2usize));
        let i = r.random_range(0..=m);
        let even: Vec<GrassmannElement> = (0..m).map(|_| sample::even_unit(&mut r, n)).collect();
        let odd: Vec<GrassmannElement> = (0..k).map(|_| sample::odd(&mut r, n)).collect();
        let coords = (even, odd);
        let p = affine_to_proj(i, &coords).unwrap();
        prop_assert_eq!(&proj_standard_form(&p).unwrap(), &coords);
        let lambda = sample::even_unit(&mut r, n);
        prop_assert_eq!(&proj_standard_form(&p.rescale(&lambda).unwrap()).unwrap(), &coords);
        let j = r.random_range(0..=m);
        let atlas = build_projective_atlas(m, k).unwrap();
        let moved = apply_morphism_points(&atlas.transition(i, j).unwrap(), &coords.0, &coords.1).unwrap();
        let mut q = p.clone();
        q.i = j;
        prop_assert_eq!(proj_standard_form(&q).unwrap(), moved);
    }

    #[test]
    fn pi_round_trip_rescaling_and_gluing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(0..=3u8);
        let p = pi_point(&mut r, n);
        let (v0, nu0) = pi_standard_form(&p, 0).unwrap();
        let normal = PiPointData::new(GrassmannElement::one(n), GrassmannElement::zero(n), v0.clone(), nu0.clone()).unwrap();
        prop_assert_eq!(&pi_standard_form(&normal, 0).unwrap(), &(v0.clone(), nu0.clone()));
        prop_assert_eq!(&p.right_mul(&p.g0().unwrap()).unwrap(), &normal);
        let d = sample::d_unit(&mut r, n);
        for chart in 0..2 {
            prop_assert_eq!(
                pi_standard_form(&p.right_mul(&d).unwrap(), chart).unwrap(),
                pi_standard_form(&p, chart).unwrap()
            );
        }
        if v0.is_invertible() {
            prop_assert!(pi_gluing_check(&v0, &nu0).unwrap());
            let psi = build_pi_line_atlas().transition(0, 1).unwrap();
            let (e, o) = apply_morphism_points(&psi, &[v0], &[nu0]).unwrap();
            prop_assert_eq!(pi_standard_form(&p, 1).unwrap(), (e[0].clone(), o[0].clone()));
        }
    }
}

fn random_rows(r: &mut SampleRng, n: u8) -> [GVec4; 2] {
    [
        [
            sample::even(r, n),
            sample::even(r, n),
            sample::odd(r, n),
            sample::odd(r, n),
        ],
        [
            sample::odd(r, n),
            sample::odd(r, n),
            sample::even(r, n),
            sample::even(r, n),
        ],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn phi_invariance_agrees_with_theta_stability(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=3u8);
        let (rows, stable) = if r.random_bool(0.5) {
            let mut p = pi_point(&mut r, n);
            if r.random_bool(0.5) {
                p = p.right_mul(&sample::d_unit(&mut r, n)).unwrap();
            }
            (p.rows(), true)
        } else {
            (random_rows(&mut r, n), false)
        };
        match (phi_invariance_check(&rows), right_theta_stable(&rows)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a, b);
                if stable {
                    prop_assert!(a);
                }
            }
            (Err(FopError::RankDeficient), Err(FopError::RankDeficient)) => prop_assert!(!stable),
            other => prop_assert!(false, "checks disagree on errors: {:?}", other),
        }
    }
}
