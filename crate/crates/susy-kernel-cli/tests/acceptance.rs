//! Acceptance criteria 1-12, one line each. Randomized sweeps use fixed seeds.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;

use susy_kernel::atlas::build_pi_line_atlas;
use susy_kernel::elliptic::{verify_suite, EllipticContext};
use susy_kernel::grassmann::{d_to_gl11, normalize_psi, psi_matrix, swap_matrix, DNumber, Parity};
use susy_kernel::sample::{self, rng, SampleRng};
use susy_kernel::superfn::{
    compose, pullback_form, ChartMorphism, ChartSpec, SuperFunction, SuperOneForm, SuperVectorField,
};
use susy_kernel::susy::{
    apply_mobius, canonical_coordinates, classify_c11_automorphism, elliptic_action_generators,
    is_susy, is_susy_automorphism, reduce_to_fundamental_domain, theta_sign_choices, Primitive,
    Tau,
};
use susy_kernel::symcore::{equivalent, to_ratfunc, Expr, RatFunc, Scalar};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_susy-kernel"))
        .args(args)
        .arg("--json")
        .output()
        .expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn rat(e: &Expr) -> RatFunc {
    to_ratfunc(e).unwrap()
}

/// D = f∂_ζ + gζ∂_z.
fn susy_field(f: &Expr, g: &Expr) -> SuperVectorField {
    let c = ChartSpec::c11();
    SuperVectorField::new(
        &c,
        vec![SuperFunction::monomial(&c, 1, rat(g))],
        vec![SuperFunction::from_ratfunc(&c, rat(f))],
    )
    .unwrap()
}

/// (f(z), g(z)ζ).
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

fn parity(r: &mut SampleRng) -> Parity {
    if r.random_bool(0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn function(r: &mut SampleRng, c: &ChartSpec, p: Parity) -> SuperFunction {
    let mut acc = SuperFunction::zero(c);
    for mask in 0..(1u32 << c.n()) {
        if Parity::of_len(mask.count_ones()) == p {
            let coeff = rat(&sample::polynomial(r, "z", 2));
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

fn odd_pair(a: Parity, b: Parity) -> bool {
    a == Parity::Odd && b == Parity::Odd
}

/// Negated when both parities are odd.
fn graded(x: SuperVectorField, a: Parity, b: Parity) -> SuperVectorField {
    if odd_pair(a, b) {
        x.neg()
    } else {
        x
    }
}

fn c1_projective_cocycles() -> Verdict {
    let start = Instant::now();
    for (m, n) in [(1, 0), (1, 1), (2, 3), (3, 2)] {
        let (code, r) = cli(&["atlas", "verify", "--proj", &m.to_string(), &n.to_string()]);
        let c = &r["checks"][0];
        ensure(
            code == 0 && c["verdict"] == "pass" && c["detail"]["failing"].is_null(),
            || format!("P^{m}|{n}: exit {code}, {c}"),
        )?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:?}"))?;
    Ok(format!("4 atlases exact in {:.2}s", t.as_secs_f64()))
}

fn c2_pi_involution() -> Verdict {
    let a = build_pi_line_atlas();
    let psi = a.transition(0, 1).unwrap();
    ensure(
        compose(&psi, &psi).unwrap() == ChartMorphism::identity(a.chart(0)),
        || "psi∘psi ≠ id".into(),
    )?;
    let (code, r) = cli(&["atlas", "verify", "--pi"]);
    ensure(code == 0 && r["pass"] == true, || {
        format!("cli exit {code}")
    })?;
    Ok("psi∘psi = id exactly".into())
}

fn c3_brackets() -> Verdict {
    let c = ChartSpec::new(["z"], ["zeta1", "zeta2"]).unwrap();
    for seed in 0..50 {
        let mut r = rng(seed);
        let (p, q, s) = (parity(&mut r), parity(&mut r), parity(&mut r));
        let (x, y, w) = (
            field(&mut r, &c, p),
            field(&mut r, &c, q),
            field(&mut r, &c, s),
        );
        let anti = x.bracket(&y).unwrap() == graded(y.bracket(&x).unwrap().neg(), p, q);
        let jacobi = x.bracket(&y.bracket(&w).unwrap()).unwrap()
            == x.bracket(&y)
                .unwrap()
                .bracket(&w)
                .unwrap()
                .add(&graded(y.bracket(&x.bracket(&w).unwrap()).unwrap(), p, q))
                .unwrap();
        let (f, g) = (function(&mut r, &c, q), function(&mut r, &c, s));
        let second = f.mul(&x.apply(&g).unwrap()).unwrap();
        let second = if odd_pair(p, q) { second.neg() } else { second };
        let rhs = x.apply(&f).unwrap().mul(&g).unwrap().add(&second).unwrap();
        let derivation = x.apply(&f.mul(&g).unwrap()).unwrap() == rhs;
        ensure(anti && jacobi && derivation, || {
            format!("seed {seed}: anti {anti}, jacobi {jacobi}, derivation {derivation}")
        })?;
    }
    let c11 = ChartSpec::c11();
    for seed in 0..50 {
        let mut r = rng(1000 + seed);
        let (f, g) = (
            sample::laurent_unit(&mut r, "z"),
            sample::laurent_unit(&mut r, "z"),
        );
        let check = is_susy(&susy_field(&f, &g)).unwrap();
        let expected = SuperVectorField::new(
            &c11,
            vec![SuperFunction::from_ratfunc(&c11, rat(&f).mul(&rat(&g)))],
            vec![SuperFunction::monomial(
                &c11,
                1,
                rat(&g).mul(&rat(&f.diff("z"))),
            )],
        )
        .unwrap();
        ensure(check.is_susy && check.d_squared == expected, || {
            format!("D² seed {seed}: {}", check.d_squared)
        })?;
        let g = sample::unit(&mut r, "z");
        let literal = SuperVectorField::new(
            &c11,
            vec![SuperFunction::from_ratfunc(&c11, rat(&g))],
            vec![SuperFunction::zero(&c11)],
        )
        .unwrap();
        ensure(
            is_susy(&susy_field(&Expr::one(), &g)).unwrap().d_squared == literal,
            || format!("f = 1, seed {seed}"),
        )?;
    }
    Ok("150 bracket cases, 50 D² pairs, 50 f=1 cases".into())
}

fn c4_canonical_coordinates() -> Verdict {
    for seed in 0..50 {
        let mut r = rng(2000 + seed);
        let (f, g) = (sample::unit(&mut r, "z"), sample::unit(&mut r, "z"));
        let cc =
            canonical_coordinates(&susy_field(&f, &g)).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(cc.exact(), || {
            format!("seed {seed}: residuals {:?}", cc.residuals)
        })?;
        let want = (f.clone() * g.clone()).recip();
        let ok = match &cc.w {
            Primitive::Symbolic(w) => equivalent(&w.diff("z"), &want),
            Primitive::Quadrature { integrand } => equivalent(integrand, &want),
        };
        ensure(ok && equivalent(&cc.h, &f.recip()), || {
            format!("seed {seed}: w′ or h wrong")
        })?;
    }
    let cc = canonical_coordinates(&susy_field(&Expr::one(), &Expr::var("z").exp())).unwrap();
    let Primitive::Symbolic(w) = &cc.w else {
        return Err("no closed form for f=1, g=e^z".into());
    };
    ensure(
        equivalent(w, &-(-Expr::var("z")).exp()) && !cc.global && cc.exact(),
        || format!("w = {w}, global {}", cc.global),
    )?;
    Ok(format!(
        "50 random (f,g) straightened; f=1, g=e^z: w = {w}, non-global"
    ))
}

fn c5_pullback_law() -> Verdict {
    let c = ChartSpec::c11();
    let omega = SuperOneForm::parse("dz - zeta*dzeta", &c).unwrap();
    for seed in 0..50 {
        let mut r = rng(3000 + seed);
        let f = sample::polynomial(&mut r, "z", 3) + sample::unit(&mut r, "z");
        let g = sample::unit(&mut r, "z");
        let pulled = pullback_form(&morphism(&f, &g), &omega).unwrap();
        let expected = SuperOneForm::new(
            &c,
            vec![SuperFunction::from_ratfunc(&c, rat(&f.diff("z")))],
            vec![SuperFunction::monomial(&c, 1, rat(&g).mul(&rat(&g)).neg())],
        )
        .unwrap();
        ensure(pulled == expected, || format!("seed {seed}: {pulled}"))?;
    }
    Ok("50 random (f,g)".into())
}

fn c6_automorphisms() -> Verdict {
    let poly = |cs: &[Scalar]| {
        cs.iter().enumerate().fold(Expr::zero(), |acc, (k, c)| {
            acc + Expr::constant(c.clone()) * Expr::var("z").pow(k as i64)
        })
    };
    let trim = |cs: &[Scalar]| {
        let mut v = cs.to_vec();
        while v.last().is_some_and(Scalar::is_zero) {
            v.pop();
        }
        v
    };
    let (mut cases, mut positive) = (0, 0);
    for seed in 0..200 {
        let mut r = rng(4000 + seed);
        let (fc, gc): (Vec<Scalar>, Vec<Scalar>) = match r.random_range(0..3) {
            0 => {
                let root = sample::nonzero_scalar(&mut r);
                let f = vec![sample::scalar(&mut r), &root * &root];
                let g = if r.random_bool(0.8) {
                    vec![root]
                } else {
                    vec![root, sample::nonzero_scalar(&mut r)]
                };
                (f, g)
            }
            1 => {
                // f′ = g² with g = c·z^k; the form law holds but f is bijective only for k = 0.
                let (c, k) = (sample::nonzero_scalar(&mut r), r.random_range(0..=2usize));
                let mut f = vec![Scalar::zero(); 2 * k + 2];
                f[0] = sample::scalar(&mut r);
                f[2 * k + 1] = &(&c * &c) / &Scalar::int(2 * k as i64 + 1);
                let mut g = vec![Scalar::zero(); k + 1];
                g[k] = c;
                (f, g)
            }
            _ => {
                let (df, dg) = (r.random_range(0..=5), r.random_range(0..=2));
                (
                    (0..=df).map(|_| sample::scalar(&mut r)).collect(),
                    (0..=dg).map(|_| sample::scalar(&mut r)).collect(),
                )
            }
        };
        let g = poly(&gc);
        if rat(&g).is_zero() {
            continue;
        }
        let (ft, gt) = (trim(&fc), trim(&gc));
        let expect = ft.len() == 2 && gt.len() == 1 && &gt[0] * &gt[0] == ft[1];
        let class = classify_c11_automorphism(&morphism(&poly(&fc), &g)).unwrap();
        ensure(class.is_some() == expect, || {
            format!("seed {seed}: f = {fc:?}, g = {gc:?}")
        })?;
        cases += 1;
        positive += expect as usize;
    }
    for tau in [Scalar::i(), Scalar::gauss((1, 4), (2, 1))] {
        let tau = Tau::exact_value(tau).unwrap();
        for (sa, sb) in theta_sign_choices() {
            let (a, b) = elliptic_action_generators(&tau, sa, sb).unwrap();
            for m in [&a, &b] {
                ensure(
                    is_susy_automorphism(m).unwrap().t == Some(RatFunc::one()),
                    || format!("t ≠ 1 for {}", m.map_view()),
                )?;
            }
            ensure(compose(&a, &b).unwrap() == compose(&b, &a).unwrap(), || {
                "generators do not commute".into()
            })?;
        }
    }
    Ok(format!(
        "{cases} polynomial maps ({positive} automorphisms), 4 generator pairs at 2 lattices"
    ))
}

fn c7_genus_zero() -> Verdict {
    let (code, r) = cli(&["theta", "degree", "--proj", "1", "1"]);
    let d = &r["checks"][0]["detail"];
    let w = &r["checks"][1]["detail"];
    ensure(
        code == 0 && d["odd"] == -1 && w["plus"] == "i/u" && w["minus"] == "-i/u",
        || format!("P^1|1: exit {code}, {r}"),
    )?;
    let (code, r) = cli(&["theta", "degree", "--pi"]);
    let d = &r["checks"][0]["detail"];
    ensure(
        code == 1
            && d["odd"] == -2
            && d["square"] == -4
            && d["canonical"] == -2
            && r["checks"][1]["verdict"] == "fail",
        || format!("Pi-line: exit {code}, {r}"),
    )?;
    Ok("P^1|1: deg -1, witness ±i/u; Pi-line: deg -2, square -4 ≠ -2, no witness".into())
}

fn c8_functor_of_points() -> Verdict {
    let mut counts = Vec::new();
    for (cmd, n) in [("roundtrip", 200), ("pi-glue", 200), ("phi-check", 500)] {
        let (code, r) = cli(&["fop", cmd, "--samples", &n.to_string()]);
        ensure(code == 0 && r["pass"] == true, || {
            format!("fop {cmd}: exit {code}, {r}")
        })?;
        let checks = r["checks"].as_array().cloned().unwrap_or_default();
        ensure(
            checks
                .iter()
                .filter(|c| c["verdict"] == "pass")
                .all(|c| c["detail"]["cases"].as_u64().is_some()),
            || format!("fop {cmd}: malformed report"),
        )?;
        counts.push(format!("{cmd} {n}"));
    }
    Ok(counts.join(", "))
}

fn c9_psi_normalization() -> Verdict {
    for seed in 0..200 {
        let mut r = rng(5000 + seed);
        let (a, alpha) = (sample::even_unit(&mut r, 3), sample::odd(&mut r, 3));
        let psi = psi_matrix(&a, &alpha).unwrap();
        let p = normalize_psi(&psi).unwrap();
        let conj = p.mul(&psi).unwrap().mul(&p.inverse().unwrap()).unwrap();
        ensure(conj.same_entries(&swap_matrix(3)), || {
            format!("seed {seed}: a = {a}, α = {alpha}")
        })?;
    }
    Ok("200 cases over Λ_3".into())
}

fn c10_d_numbers() -> Verdict {
    for seed in 0..200 {
        let mut r = rng(6000 + seed);
        let (x, y, z) = (
            sample::d_unit(&mut r, 3),
            sample::d_unit(&mut r, 3),
            sample::d_unit(&mut r, 3),
        );
        let assoc = x.dmul(&y).unwrap().dmul(&z).unwrap() == x.dmul(&y.dmul(&z).unwrap()).unwrap();
        let xi = x.dinv().unwrap();
        let inv =
            x.dmul(&xi).unwrap() == DNumber::one(3) && xi.dmul(&x).unwrap() == DNumber::one(3);
        let lhs = d_to_gl11(&x.dmul(&y).unwrap()).unwrap();
        let hom = lhs.same_entries(&d_to_gl11(&x).unwrap().mul(&d_to_gl11(&y).unwrap()).unwrap());
        ensure(assoc && inv && hom, || {
            format!("seed {seed}: assoc {assoc}, inverse {inv}, hom {hom}")
        })?;
    }
    Ok("200 triples over Λ_3".into())
}

fn c11_elliptic() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for tau in [
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(0.25, 2.0),
    ] {
        let ctx = EllipticContext::new(tau).unwrap();
        let r = verify_suite(&ctx, 20, 0).map_err(|e| format!("tau = {tau}: {e}"))?;
        for c in &r.checks {
            ensure(c.pass && c.threshold <= 1e-8, || {
                format!("tau = {tau}: {} = {:e}", c.name, c.max_residual)
            })?;
            worst = worst.max(c.max_residual);
        }
        let ideal = r
            .checks
            .iter()
            .filter(|c| c.name.starts_with("affine_") || c.name.starts_with("homogeneous_"))
            .count();
        ensure(ideal >= 8, || format!("only {ideal} ideal checks"))?;
    }
    let g3 = EllipticContext::new(Complex64::new(0.0, 1.0))
        .unwrap()
        .g3()
        .norm();
    ensure(g3 < 1e-8, || format!("|g3(i)| = {g3:e}"))?;
    let (code, _) = cli(&["elliptic", "verify", "--tau", "2i"]);
    ensure(code == 0, || format!("cli exit {code}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(30), || format!("took {t:?}"))?;
    Ok(format!(
        "worst residual {worst:.1e}, |g3(i)| = {g3:.1e}, {:.2}s",
        t.as_secs_f64()
    ))
}

fn c12_fundamental_domain() -> Verdict {
    let mut r = rng(7000);
    for k in 0..200 {
        let tau = Tau::new(Complex64::new(
            r.random_range(-6.0..6.0),
            r.random_range(0.02..4.0),
        ))
        .unwrap();
        let (t, g) = reduce_to_fundamental_domain(&tau).unwrap();
        let v = t.value();
        ensure(
            g.det() == 1 && v.re.abs() <= 0.5 && v.norm() >= 1.0 - 1e-15,
            || format!("case {k}: {tau} -> {t}"),
        )?;
        let err = (apply_mobius(&g, tau.value()) - v).norm();
        ensure(err <= 1e-12 * v.norm().max(1.0), || {
            format!("case {k}: γ-action error {err:e}")
        })?;
        let (t2, g2) = reduce_to_fundamental_domain(&t).unwrap();
        ensure(t2 == t && g2.is_trivial(), || {
            format!("case {k}: not idempotent")
        })?;
    }
    Ok("200 random tau".into())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("projective cocycles", c1_projective_cocycles),
        ("Pi-line involution", c2_pi_involution),
        ("bracket identities and D²", c3_brackets),
        ("canonical coordinates", c4_canonical_coordinates),
        ("pullback of dz - ζdζ", c5_pullback_law),
        ("automorphism classification", c6_automorphisms),
        ("genus-0 theta dichotomy", c7_genus_zero),
        ("functor-of-points round trips", c8_functor_of_points),
        ("Ψ normalization", c9_psi_normalization),
        ("D^× algebra", c10_d_numbers),
        ("elliptic residuals", c11_elliptic),
        ("fundamental domain", c12_fundamental_domain),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let verdict = f();
        let line = match &verdict {
            Ok(s) => format!("criterion {:>2} PASS  {name}: {s}\n", k + 1),
            Err(s) => format!("criterion {:>2} FAIL  {name}: {s}\n", k + 1),
        };
        // Written past the test harness capture so the summary always shows.
        let _ = std::io::stderr().write_all(line.as_bytes());
        if verdict.is_err() {
            failed.push(k + 1);
        }
    }
    let _ = writeln!(
        std::io::stderr(),
        "acceptance: {} of 12 passed in {:.2}s",
        12 - failed.len(),
        start.elapsed().as_secs_f64()
    );
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
