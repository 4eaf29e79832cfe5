use std::collections::BTreeMap;
use std::fmt::{Debug, Display};
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
    /// Reported for reference; does not affect the overall verdict.
    Info,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<String>,
    /// Wall time is kept out of JSON so reports are byte-stable.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A failure inside the tool itself rather than in a library call.
#[derive(Debug)]
pub struct Internal(pub String);

impl Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {}", self.0)
    }
}

const PAYLOAD_TYPES: [&str; 1] = ["Complex"];

/// Dotted chain of variant names from a Debug rendering, e.g. `Super.Sym.Syntax`.
pub fn error_code(e: &dyn Debug) -> String {
    let text = format!("{e:?}");
    let mut rest = text.as_str();
    let mut parts = Vec::new();
    loop {
        let id: String = rest
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        // Variant names only; payloads such as numbers or complex values end the chain.
        if !id.starts_with(|c: char| c.is_ascii_uppercase()) || PAYLOAD_TYPES.contains(&id.as_str())
        {
            break;
        }
        rest = &rest[id.len()..];
        parts.push(id);
        match rest.strip_prefix('(') {
            Some(r) => rest = r,
            None => break,
        }
    }
    if parts.is_empty() {
        "Unknown".into()
    } else {
        parts.join(".")
    }
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            schema: 1,
            command: command.to_string(),
            inputs: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            elapsed: Duration::ZERO,
        }
    }

    pub fn input(mut self, key: &str, v: impl Serialize) -> Self {
        self.inputs.insert(
            key.to_string(),
            serde_json::to_value(v).unwrap_or(Value::Null),
        );
        self
    }

    fn push(
        &mut self,
        name: &str,
        verdict: Verdict,
        detail: Value,
        code: Option<String>,
        elapsed: Duration,
    ) {
        if matches!(verdict, Verdict::Fail | Verdict::Error) {
            self.pass = false;
        }
        self.checks.push(Check {
            name: name.to_string(),
            verdict,
            detail,
            code,
            elapsed,
        });
    }

    /// Runs one check; an `Err` becomes an error entry carrying its code.
    pub fn run<E: Debug + Display>(
        &mut self,
        name: &str,
        f: impl FnOnce() -> Result<(bool, Value), E>,
    ) {
        let start = Instant::now();
        let r = f();
        let elapsed = start.elapsed();
        match r {
            Ok((ok, detail)) => {
                let v = if ok { Verdict::Pass } else { Verdict::Fail };
                self.push(name, v, detail, None, elapsed);
            }
            Err(e) => {
                let detail = Value::String(e.to_string());
                self.push(name, Verdict::Error, detail, Some(error_code(&e)), elapsed);
            }
        }
    }

    /// A verdict computed elsewhere, e.g. aggregated from a parallel sweep.
    pub fn record(&mut self, name: &str, pass: bool, detail: Value) {
        let v = if pass { Verdict::Pass } else { Verdict::Fail };
        self.push(name, v, detail, None, Duration::ZERO);
    }

    pub fn info(&mut self, name: &str, detail: Value) {
        self.push(name, Verdict::Info, detail, None, Duration::ZERO);
    }

    pub fn error(&mut self, name: &str, e: &(impl Debug + Display)) {
        self.push(
            name,
            Verdict::Error,
            Value::String(e.to_string()),
            Some(error_code(e)),
            Duration::ZERO,
        );
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut out = format!(
            "{}: {verdict} ({:.3}s)\n",
            self.command,
            self.elapsed.as_secs_f64()
        );
        for c in &self.checks {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Error => "ERROR",
                Verdict::Info => "info",
            };
            let code = c
                .code
                .as_deref()
                .map(|k| format!(" [{k}]"))
                .unwrap_or_default();
            let detail = match &c.detail {
                Value::Null => String::new(),
                Value::String(s) => format!("  {s}"),
                v => format!("  {v}"),
            };
            // Checks aggregated from a parallel sweep carry no time of their own.
            let time = if c.elapsed.is_zero() {
                String::new()
            } else {
                format!("{:.3}ms", c.elapsed.as_secs_f64() * 1e3)
            };
            out.push_str(&format!(
                "  {verdict:<5} {:<28} {time:>11}{code}{detail}\n",
                c.name
            ));
        }
        out
    }
}
