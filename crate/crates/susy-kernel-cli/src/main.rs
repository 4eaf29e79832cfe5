mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "susy-kernel",
    version,
    about = "Verification kernel for SUSY curves and supergeometry"
)]
pub struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Group,
}

#[derive(Subcommand, Debug)]
pub enum Group {
    /// Supermanifold atlases.
    #[command(subcommand)]
    Atlas(AtlasCmd),
    /// SUSY-1 structures on C^{1|1}.
    #[command(subcommand)]
    Susy(SusyCmd),
    /// Theta characteristics on the genus-0 atlases.
    #[command(subcommand)]
    Theta(ThetaCmd),
    /// Functor-of-points round trips over Grassmann algebras.
    #[command(subcommand)]
    Fop(FopCmd),
    /// Weierstrass functions and the genus-1 embedding.
    #[command(subcommand)]
    Elliptic(EllipticCmd),
    /// Parse and echo an input in normal form.
    Parse(ParseArgs),
}

#[derive(Args, Debug, Clone)]
#[group(required = false, multiple = false)]
pub struct AtlasChoice {
    /// Projective superspace P^{m|n}.
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    proj: Option<Vec<usize>>,
    /// The Π-projective line.
    #[arg(long)]
    pi: bool,
}

#[derive(Subcommand, Debug)]
pub enum AtlasCmd {
    /// Check the cocycle conditions exactly.
    Verify(AtlasChoice),
    /// Print the atlas document.
    Build(AtlasChoice),
}

#[derive(Subcommand, Debug)]
pub enum SusyCmd {
    /// Test whether D, D² frame the tangent sheaf.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        field: String,
    },
    /// Canonical coordinates (w, η) with D = ∂_η + η∂_w.
    Canon {
        #[arg(long, allow_hyphen_values = true)]
        field: String,
    },
    /// Test (f(z), g(z)ζ) as a SUSY automorphism of C^{1|1}.
    Auto {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// The lattice generators (z+1, ±ζ), (z+τ, ±ζ).
    EllipticGens {
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ThetaCmd {
    /// Square roots of the canonical cocycle.
    Sqrt(AtlasChoice),
    /// Degrees of the odd cocycle, its square and the canonical cocycle.
    Degree(AtlasChoice),
    /// Build the 1|1 supermanifold from a theta characteristic and verify it.
    Build(AtlasChoice),
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Number of random cases.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum FopCmd {
    /// Projective standard forms, rescaling and chart changes.
    Roundtrip(SampleArgs),
    /// Π standard forms, D-rescaling and the chart gluing.
    PiGlue(SampleArgs),
    /// Φ-invariance against right θ-stability.
    PhiCheck(SampleArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TauArgs {
    /// Period ratio, e.g. `2i` or `1/4+2i`.
    #[arg(long, allow_hyphen_values = true)]
    tau: String,
}

#[derive(Subcommand, Debug)]
pub enum EllipticCmd {
    /// Invariant identities and ideal residuals at sample points.
    Verify {
        #[command(flatten)]
        tau: TauArgs,
        #[command(flatten)]
        samples: SampleArgs,
        /// Residual threshold.
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
    },
    /// g₂, g₃ and the half-period values.
    Invariants(TauArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Expr,
    Function,
    Field,
    Form,
    Grassmann,
}

#[derive(Args, Debug)]
pub struct ParseArgs {
    #[arg(long, value_enum, default_value_t = Kind::Expr)]
    kind: Kind,
    /// Even variables in scope for `expr`, comma separated.
    #[arg(long, default_value = "z", value_delimiter = ',')]
    vars: Vec<String>,
    /// Number of generators for `grassmann`.
    #[arg(long, default_value_t = 3)]
    n: u8,
    #[arg(allow_hyphen_values = true)]
    text: String,
}

/// What a command produced: the report, and whether an input failed to parse.
pub struct Outcome {
    pub report: Report,
    pub input_error: bool,
}

impl Outcome {
    fn code(&self) -> u8 {
        if self.input_error {
            2
        } else if self.report.pass {
            0
        } else {
            1
        }
    }
}

fn emit(out: &Outcome, json: bool) {
    let text = if json {
        out.report.to_json()
    } else {
        out.report.to_text()
    };
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    // Panics are reported as a structured internal error instead of aborting.
    std::panic::set_hook(Box::new(|_| {}));
    let json = cli.json;
    let start = std::time::Instant::now();
    let mut out = match std::panic::catch_unwind(|| commands::run(&cli)) {
        Ok(out) => out,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown".into());
            let mut report = Report::new("internal");
            report.error("panic", &report::Internal(msg));
            Outcome {
                report,
                input_error: false,
            }
        }
    };
    out.report.elapsed = start.elapsed();
    emit(&out, json);
    ExitCode::from(out.code())
}
