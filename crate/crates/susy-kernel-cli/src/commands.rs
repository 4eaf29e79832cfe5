use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use susy_kernel::atlas::{
    build_pi_line_atlas, build_projective_atlas, build_supermanifold_from_theta, canonical_cocycle,
    cocycle_sqrt, cocycle_square, degree, find_theta_witness, odd_part_cocycle, verify_cocycle,
    Atlas, AtlasError, LineBundleCocycle,
};
use susy_kernel::elliptic::{verify_suite, EllipticContext, InvariantReport};
use susy_kernel::fop::{
    affine_to_proj, apply_morphism_points, phi_invariance_check, pi_gluing_check, pi_standard_form,
    proj_standard_form, right_theta_stable, FopError, PiPointData,
};
use susy_kernel::grassmann::{GVec4, GrassmannElement};
use susy_kernel::par::par_range;
use susy_kernel::sample::{self, rng, SampleRng};
use susy_kernel::superfn::{
    compose, ChartMorphism, ChartSpec, SuperFunction, SuperOneForm, SuperVectorField,
};
use susy_kernel::susy::{
    candidate, canonical_coordinates, classify_c11_automorphism, elliptic_action_generators,
    is_susy, is_susy_automorphism, reduce_to_fundamental_domain, theta_sign_choices, Primitive,
    SusyError, SusyStructure, Tau,
};
use susy_kernel::symcore::{normalize, parse, Scalar, SymError, VarRegistry};

use crate::report::Report;
use crate::{
    AtlasChoice, AtlasCmd, Cli, EllipticCmd, FopCmd, Group, Kind, Outcome, ParseArgs, SusyCmd,
    ThetaCmd,
};

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Group::Atlas(c) => atlas(c),
        Group::Susy(c) => susy(c),
        Group::Theta(c) => theta(c),
        Group::Fop(c) => fop(c, cli.seed),
        Group::Elliptic(c) => elliptic(c, cli.seed),
        Group::Parse(a) => parse_cmd(a),
    }
}

fn done(report: Report) -> Outcome {
    Outcome {
        report,
        input_error: false,
    }
}

fn bad_input(
    mut report: Report,
    name: &str,
    e: &(impl std::fmt::Debug + std::fmt::Display),
) -> Outcome {
    report.error(name, e);
    Outcome {
        report,
        input_error: true,
    }
}

/// `2i` and `1/4+2i` read as `2*i` and `1/4+2*i`.
fn parse_complex(text: &str) -> Result<Scalar, SymError> {
    let mut s = String::with_capacity(text.len() + 4);
    let mut prev = None;
    for ch in text.chars() {
        if ch == 'i' && matches!(prev, Some(p) if p == ')' || p == '.' || char::is_ascii_digit(&p))
        {
            s.push('*');
        }
        s.push(ch);
        if !ch.is_whitespace() {
            prev = Some(ch);
        }
    }
    Scalar::parse(&s)
}

fn parse_tau(text: &str) -> Result<Tau, SusyError> {
    Tau::exact_value(parse_complex(text)?)
}

// ---------------------------------------------------------------- atlas

fn choose(c: &AtlasChoice, default: Option<(usize, usize)>) -> Result<(Atlas, Value), AtlasError> {
    if c.pi {
        return Ok((build_pi_line_atlas(), json!("pi")));
    }
    let (m, n) = match (&c.proj, default) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some(d)) => d,
        (None, None) => {
            return Err(AtlasError::Invalid(
                "one of --proj M N or --pi is required".into(),
            ))
        }
    };
    Ok((build_projective_atlas(m, n)?, json!({ "proj": [m, n] })))
}

fn atlas(cmd: &AtlasCmd) -> Outcome {
    let (choice, name) = match cmd {
        AtlasCmd::Verify(c) => (c, "atlas verify"),
        AtlasCmd::Build(c) => (c, "atlas build"),
    };
    let report = Report::new(name);
    let (a, input) = match choose(choice, None) {
        Ok(x) => x,
        Err(e) => return bad_input(report, "atlas", &e),
    };
    let mut report = report.input("atlas", input);
    match cmd {
        AtlasCmd::Verify(_) => {
            report.run("cocycle", || {
                let r = verify_cocycle(&a);
                Ok::<_, AtlasError>((r.pass, json!({ "checks": r.checks, "failing": r.failing })))
            });
            if choice.pi {
                report.run("involution", || {
                    let (psi01, psi10) = (a.transition(0, 1), a.transition(1, 0));
                    let (Some(psi01), Some(psi10)) = (psi01, psi10) else {
                        return Err(AtlasError::Invalid("missing transition".into()));
                    };
                    let twice = compose(&psi01, &psi01)?;
                    let ok = psi01 == psi10 && twice == ChartMorphism::identity(a.chart(0));
                    Ok((ok, json!({ "psi": psi01.map_view() })))
                });
            }
        }
        AtlasCmd::Build(_) => {
            let doc = serde_json::to_value(a.to_doc()).unwrap_or(Value::Null);
            report.info("atlas", doc);
        }
    }
    done(report)
}

// ---------------------------------------------------------------- susy

fn susy(cmd: &SusyCmd) -> Outcome {
    let c11 = ChartSpec::c11();
    match cmd {
        SusyCmd::Check { field } => {
            let report = Report::new("susy check").input("field", field);
            let d = match SuperVectorField::parse(field, &c11) {
                Ok(d) => d,
                Err(e) => return bad_input(report, "field", &e),
            };
            let mut report = report;
            report.run("frame", || {
                let r = is_susy(&d)?;
                Ok::<_, SusyError>((
                    r.is_susy,
                    json!({
                        "f": r.f.to_expr().to_string(),
                        "g": r.g.to_expr().to_string(),
                        "d_squared": r.d_squared.to_string(),
                        "witness": r.witness,
                    }),
                ))
            });
            done(report)
        }
        SusyCmd::Canon { field } => {
            let report = Report::new("susy canon").input("field", field);
            let d = match SuperVectorField::parse(field, &c11) {
                Ok(d) => d,
                Err(e) => return bad_input(report, "field", &e),
            };
            let mut report = report;
            match canonical_coordinates(&d) {
                Ok(cc) => {
                    let w = match &cc.w {
                        Primitive::Symbolic(w) => json!({ "w": w.to_string() }),
                        Primitive::Quadrature { integrand } => {
                            json!({ "integrand": integrand.to_string() })
                        }
                    };
                    let exact = cc.exact();
                    let residuals: Vec<String> =
                        cc.residuals.iter().map(|r| r.to_string()).collect();
                    report.run("straightens", || {
                        Ok::<_, SusyError>((
                            exact,
                            json!({ "h": cc.h.to_string(), "w": w, "residuals": residuals }),
                        ))
                    });
                    report.info("global", json!({ "global": cc.global, "note": cc.note }));
                }
                Err(e) => report.error("straightens", &e),
            }
            done(report)
        }
        SusyCmd::Auto { f, g } => {
            let report = Report::new("susy auto").input("f", f).input("g", g);
            let m = match candidate(f, g, &[]) {
                Ok(m) => m,
                Err(e) => return bad_input(report, "map", &e),
            };
            let mut report = report;
            report.run("form_law", || {
                let r = is_susy_automorphism(&m)?;
                Ok::<_, SusyError>((
                    r.t.is_some(),
                    json!({
                        "t": r.t.map(|t| t.to_expr().to_string()),
                        "f_prime": r.f_prime.to_expr().to_string(),
                        "g_squared": r.g_squared.to_expr().to_string(),
                        "pullback": r.pulled_back.to_string(),
                    }),
                ))
            });
            report.run("global_automorphism", || {
                let c = classify_c11_automorphism(&m)?;
                let detail = c.as_ref().map_or(Value::Null, |c| {
                    json!({ "a": c.a.to_string(), "b": c.b.to_string(), "sign": c.sign.symbol().to_string() })
                });
                Ok::<_, SusyError>((c.is_some(), detail))
            });
            done(report)
        }
        SusyCmd::EllipticGens { tau } => {
            let report = Report::new("susy elliptic-gens").input("tau", tau);
            let t = match parse_tau(tau) {
                Ok(t) => t,
                Err(e) => return bad_input(report, "tau", &e),
            };
            let mut report = report;
            for (sa, sb) in theta_sign_choices() {
                let name = format!("generators_{}{}", sa.symbol(), sb.symbol());
                report.run(&name, || {
                    let (a, b) = elliptic_action_generators(&t, sa, sb)?;
                    let unit = |m: &ChartMorphism| -> Result<bool, SusyError> {
                        Ok(is_susy_automorphism(m)?.t.is_some_and(|t| t.as_constant().is_some_and(|k| k.is_one())))
                    };
                    let commute = compose(&a, &b)? == compose(&b, &a)?;
                    let (ta, tb) = (unit(&a)?, unit(&b)?);
                    Ok::<_, SusyError>((
                        ta && tb && commute,
                        json!({ "a": a.map_view(), "b": b.map_view(), "t_is_one": [ta, tb], "commute": commute }),
                    ))
                });
            }
            match reduce_to_fundamental_domain(&t) {
                Ok((r, g)) => report.info(
                    "fundamental_domain",
                    json!({ "reduced": r.to_string(), "gamma": g }),
                ),
                Err(e) => report.error("fundamental_domain", &e),
            }
            done(report)
        }
    }
}

// ---------------------------------------------------------------- theta

fn g01_text(l: &LineBundleCocycle) -> Result<String, AtlasError> {
    Ok(l.g01()?.to_expr().to_string())
}

fn theta(cmd: &ThetaCmd) -> Outcome {
    let (choice, name, default) = match cmd {
        ThetaCmd::Sqrt(c) => (c, "theta sqrt", (1, 0)),
        ThetaCmd::Degree(c) => (c, "theta degree", (1, 1)),
        ThetaCmd::Build(c) => (c, "theta build", (1, 1)),
    };
    let report = Report::new(name);
    let (a, input) = match choose(choice, Some(default)) {
        Ok(x) => x,
        Err(e) => return bad_input(report, "atlas", &e),
    };
    let mut report = report.input("atlas", input);
    match cmd {
        ThetaCmd::Sqrt(_) => {
            report.run("sqrt", || {
                let k = canonical_cocycle(&a.reduced()?)?;
                let Some((plus, minus)) = cocycle_sqrt(&k)? else {
                    return Ok((false, json!({ "canonical": g01_text(&k)? })));
                };
                let squares = cocycle_square(&plus).g == k.g && cocycle_square(&minus).g == k.g;
                Ok::<_, AtlasError>((
                    squares,
                    json!({ "canonical": g01_text(&k)?, "plus": g01_text(&plus)?, "minus": g01_text(&minus)? }),
                ))
            });
        }
        ThetaCmd::Degree(_) => {
            report.run("square_matches_canonical", || {
                let l = odd_part_cocycle(&a)?;
                let k = canonical_cocycle(&a.reduced()?)?;
                let (dl, dsq, dk) = (degree(&l)?, degree(&cocycle_square(&l))?, degree(&k)?);
                Ok::<_, AtlasError>((
                    dsq == dk,
                    json!({ "odd": dl, "square": dsq, "canonical": dk, "odd_cocycle": g01_text(&l)? }),
                ))
            });
            report.run("theta_witness", || {
                let w = find_theta_witness(&odd_part_cocycle(&a)?)?;
                Ok::<_, AtlasError>((w.is_some(), w.map_or(Value::Null, |w| w.summary_json())))
            });
        }
        ThetaCmd::Build(_) => {
            let witness = odd_part_cocycle(&a).and_then(|l| find_theta_witness(&l));
            match witness {
                Ok(Some(w)) => {
                    report.info("theta_witness", w.summary_json());
                    match build_supermanifold_from_theta(&w.theta) {
                        Ok(x) => {
                            report.run("cocycle", || {
                                let r = verify_cocycle(&x);
                                Ok::<_, AtlasError>((
                                    r.pass,
                                    json!({ "checks": r.checks, "failing": r.failing }),
                                ))
                            });
                            report.run("susy_structure", || {
                                let r = SusyStructure::standard(&x)?.verify()?;
                                Ok::<_, SusyError>((
                                    r.pass,
                                    json!({ "charts": r.charts, "overlaps": r.overlaps }),
                                ))
                            });
                        }
                        Err(e) => report.error("build", &e),
                    }
                }
                Ok(None) => report.run("theta_witness", || {
                    Ok::<_, AtlasError>((false, Value::Null))
                }),
                Err(e) => report.error("theta_witness", &e),
            }
        }
    }
    done(report)
}

// ---------------------------------------------------------------- fop

/// Independent stream per case, so results do not depend on scheduling.
fn case_rng(seed: u64, k: usize) -> SampleRng {
    rng(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ k as u64)
}

/// Aggregates per-case verdicts into one check.
fn tally(report: &mut Report, name: &str, results: &[Result<bool, FopError>]) {
    let failures: Vec<usize> = (0..results.len())
        .filter(|&k| matches!(results[k], Ok(false)))
        .collect();
    if let Some((k, Err(e))) = results.iter().enumerate().find(|(_, r)| r.is_err()) {
        report.error(
            name,
            &CaseError {
                case: k,
                inner: e.clone(),
            },
        );
        return;
    }
    let detail = json!({ "cases": results.len(), "failures": failures.len(), "first_failure": failures.first() });
    report.record(name, failures.is_empty(), detail);
}

#[derive(Debug)]
struct CaseError {
    case: usize,
    inner: FopError,
}

impl std::fmt::Display for CaseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "case {}: {}", self.case, self.inner)
    }
}

fn pi_point(r: &mut SampleRng, n: u8) -> Result<PiPointData, FopError> {
    PiPointData::new(
        sample::even_unit(r, n),
        sample::odd(r, n),
        sample::even_unit(r, n),
        sample::odd(r, n),
    )
}

/// Standard form, rescaling invariance and chart change of one projective point.
fn projective_case(seed: u64, k: usize) -> Result<[bool; 3], FopError> {
    let mut r = case_rng(seed, k);
    let (n, m, odd_dim) = (
        r.random_range(0..=3u8),
        r.random_range(1..=2usize),
        r.random_range(0..=2usize),
    );
    let i = r.random_range(0..=m);
    let even: Vec<GrassmannElement> = (0..m).map(|_| sample::even_unit(&mut r, n)).collect();
    let odd: Vec<GrassmannElement> = (0..odd_dim).map(|_| sample::odd(&mut r, n)).collect();
    let coords = (even, odd);
    let p = affine_to_proj(i, &coords)?;
    let round_trip = proj_standard_form(&p)? == coords;
    let lambda = sample::even_unit(&mut r, n);
    let rescaled = proj_standard_form(&p.rescale(&lambda)?)? == coords;
    let j = r.random_range(0..=m);
    let atlas =
        build_projective_atlas(m, odd_dim).map_err(|e| FopError::Unsupported(e.to_string()))?;
    let map = atlas.transition(i, j).ok_or(FopError::BadIndex(j))?;
    let moved = apply_morphism_points(&map, &coords.0, &coords.1)?;
    let mut q = p;
    q.i = j;
    Ok([round_trip, rescaled, proj_standard_form(&q)? == moved])
}

/// Π round trip, g₀-normalization, D-rescaling and gluing; gluing is `None`
/// when v₀ is not invertible.
fn pi_case(seed: u64, k: usize) -> Result<([bool; 3], Option<bool>), FopError> {
    let mut r = case_rng(seed, k);
    let n = r.random_range(0..=3u8);
    let p = pi_point(&mut r, n)?;
    let (v0, nu0) = pi_standard_form(&p, 0)?;
    let normal = PiPointData::new(
        GrassmannElement::one(n),
        GrassmannElement::zero(n),
        v0.clone(),
        nu0.clone(),
    )?;
    let round_trip = pi_standard_form(&normal, 0)? == (v0.clone(), nu0.clone());
    let normalized = p.right_mul(&p.g0()?)? == normal;
    let d = sample::d_unit(&mut r, n);
    let moved = p.right_mul(&d)?;
    let rescaled = pi_standard_form(&moved, 0)? == pi_standard_form(&p, 0)?
        && pi_standard_form(&moved, 1)? == pi_standard_form(&p, 1)?;
    let glue = if v0.is_invertible() {
        Some(pi_gluing_check(&v0, &nu0)?)
    } else {
        None
    };
    Ok(([round_trip, normalized, rescaled], glue))
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

/// (agree, built stable, rank deficient).
fn phi_case(seed: u64, k: usize) -> Result<(bool, bool, bool), FopError> {
    let mut r = case_rng(seed, k);
    let n = r.random_range(1..=3u8);
    let (rows, stable) = if r.random_bool(0.5) {
        let mut p = pi_point(&mut r, n)?;
        if r.random_bool(0.5) {
            p = p.right_mul(&sample::d_unit(&mut r, n))?;
        }
        (p.rows(), true)
    } else {
        (random_rows(&mut r, n), false)
    };
    Ok(
        match (phi_invariance_check(&rows), right_theta_stable(&rows)) {
            (Ok(a), Ok(b)) => (a == b && (a || !stable), stable, false),
            (Err(FopError::RankDeficient), Err(FopError::RankDeficient)) => (!stable, stable, true),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        },
    )
}

fn fop(cmd: &FopCmd, seed: u64) -> Outcome {
    let (name, samples) = match cmd {
        FopCmd::Roundtrip(s) => ("fop roundtrip", s.samples.unwrap_or(200)),
        FopCmd::PiGlue(s) => ("fop pi-glue", s.samples.unwrap_or(200)),
        FopCmd::PhiCheck(s) => ("fop phi-check", s.samples.unwrap_or(500)),
    };
    let mut report = Report::new(name)
        .input("seed", seed)
        .input("samples", samples);
    match cmd {
        FopCmd::Roundtrip(_) => {
            let rs = par_range(samples, |k| projective_case(seed, k));
            for (slot, check) in ["standard_form", "rescaling", "chart_change"]
                .iter()
                .enumerate()
            {
                let col: Vec<_> = rs.iter().map(|r| r.clone().map(|v| v[slot])).collect();
                tally(&mut report, check, &col);
            }
        }
        FopCmd::PiGlue(_) => {
            let rs = par_range(samples, |k| pi_case(seed, k));
            for (slot, check) in ["standard_form", "normalization", "rescaling"]
                .iter()
                .enumerate()
            {
                let col: Vec<_> = rs.iter().map(|r| r.clone().map(|(v, _)| v[slot])).collect();
                tally(&mut report, check, &col);
            }
            let glue: Vec<_> = rs
                .iter()
                .filter_map(|r| r.clone().map(|(_, g)| g).transpose())
                .collect();
            tally(&mut report, "gluing", &glue);
        }
        FopCmd::PhiCheck(_) => {
            let rs = par_range(samples, |k| phi_case(seed, k));
            let agree: Vec<_> = rs.iter().map(|r| r.clone().map(|(a, _, _)| a)).collect();
            tally(&mut report, "phi_matches_theta", &agree);
            let ok: Vec<_> = rs.iter().filter_map(|r| r.as_ref().ok()).collect();
            report.info(
                "cases",
                json!({
                    "stable_by_construction": ok.iter().filter(|c| c.1).count(),
                    "rank_deficient": ok.iter().filter(|c| c.2).count(),
                }),
            );
        }
    }
    done(report)
}

// ---------------------------------------------------------------- elliptic

fn elliptic(cmd: &EllipticCmd, seed: u64) -> Outcome {
    let (tau_text, name) = match cmd {
        EllipticCmd::Verify { tau, .. } => (&tau.tau, "elliptic verify"),
        EllipticCmd::Invariants(tau) => (&tau.tau, "elliptic invariants"),
    };
    let report = Report::new(name).input("tau", tau_text);
    let tau: Complex64 = match parse_complex(tau_text) {
        Ok(t) => t.to_c64(),
        Err(e) => return bad_input(report, "tau", &e),
    };
    let eps = match cmd {
        EllipticCmd::Verify { eps, .. } => *eps,
        EllipticCmd::Invariants(_) => 1e-8,
    };
    let ctx = match EllipticContext::with_eps(tau, eps) {
        Ok(c) => c,
        Err(e) => return bad_input(report, "tau", &e),
    };
    let mut report = report;
    match cmd {
        EllipticCmd::Verify { samples, .. } => {
            let n = samples.samples.unwrap_or(20);
            report = report
                .input("seed", seed)
                .input("samples", n)
                .input("eps", eps);
            match verify_suite(&ctx, n, seed) {
                Ok(r) => {
                    report.info(
                        "invariants",
                        serde_json::to_value(&r.invariants).unwrap_or(Value::Null),
                    );
                    for c in &r.checks {
                        let detail =
                            json!({ "max_residual": c.max_residual, "threshold": c.threshold });
                        report.record(&c.name, c.pass, detail);
                    }
                    report.info(
                        "alt_cubic",
                        serde_json::to_value(r.alt_cubic).unwrap_or(Value::Null),
                    );
                }
                Err(e) => report.error("suite", &e),
            }
        }
        EllipticCmd::Invariants(_) => {
            report.info(
                "invariants",
                serde_json::to_value(InvariantReport::of(&ctx)).unwrap_or(Value::Null),
            );
        }
    }
    done(report)
}

// ---------------------------------------------------------------- parse

fn parse_cmd(a: &ParseArgs) -> Outcome {
    let kind = format!("{:?}", a.kind).to_lowercase();
    let report = Report::new("parse")
        .input("kind", &kind)
        .input("text", &a.text);
    let c11 = ChartSpec::c11();
    let parsed: Result<String, Box<dyn DebugDisplay>> = match a.kind {
        Kind::Expr => parse(&a.text, &VarRegistry::new(a.vars.iter().cloned()))
            .and_then(|e| normalize(&e))
            .map(|e| e.to_string())
            .map_err(|e| Box::new(e) as _),
        Kind::Function => SuperFunction::parse(&a.text, &c11)
            .map(|f| f.to_string())
            .map_err(|e| Box::new(e) as _),
        Kind::Field => SuperVectorField::parse(&a.text, &c11)
            .map(|f| f.to_string())
            .map_err(|e| Box::new(e) as _),
        Kind::Form => SuperOneForm::parse(&a.text, &c11)
            .map(|f| f.to_string())
            .map_err(|e| Box::new(e) as _),
        Kind::Grassmann => GrassmannElement::parse(&a.text, a.n)
            .map(|g| g.to_string())
            .map_err(|e| Box::new(e) as _),
    };
    match parsed {
        Ok(s) => {
            let mut report = report;
            report.info("normal_form", Value::String(s));
            done(report)
        }
        Err(e) => bad_input(report, "parse", &e),
    }
}

trait DebugDisplay: std::fmt::Debug + std::fmt::Display {}
impl<T: std::fmt::Debug + std::fmt::Display> DebugDisplay for T {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2i").unwrap(), Scalar::gauss((0, 1), (2, 1)));
        assert_eq!(
            parse_complex("1/4+2i").unwrap(),
            Scalar::gauss((1, 4), (2, 1))
        );
        assert_eq!(parse_complex("i").unwrap(), Scalar::i());
        assert_eq!(
            parse_complex("0.5 - 1.5i").unwrap(),
            Scalar::gauss((1, 2), (-3, 2))
        );
        assert!(parse_complex("2j").is_err());
        assert!(parse_tau("-i").is_err());
    }

    #[test]
    fn case_streams_are_reproducible() {
        assert_eq!(
            projective_case(3, 7).unwrap(),
            projective_case(3, 7).unwrap()
        );
        assert!(pi_case(0, 0).is_ok());
    }
}
