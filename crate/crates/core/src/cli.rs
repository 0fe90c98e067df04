//! Command-line front end: `gen`, `verify`, `table` and `props`.
//!
//! Exit codes: 0 success, 1 error (including usage errors), 2 rule generated with
//! warnings, 3 a check ran and failed.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::props::run_props;
use crate::rulegen::{
    generate, OmegaPolicy, Partition, QuadratureRule, RuleSubinterval, SubintervalKind,
    SubintervalPlan, Warning,
};
use crate::semiclassical::{Continuity, DiracVector};
use crate::verify::{reproduce_table, verify_exactness, verify_with_tolerance, SplineSpace};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

type Outcome = std::result::Result<i32, CliError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_WARNINGS: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubintervalRecord {
    pub index: usize,
    pub span: [f64; 2],
    pub kind: SubintervalKind,
    pub dirac_left: Option<Vec<f64>>,
    pub dirac_right: Option<Vec<f64>>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub weight_sum: f64,
    pub max_defect: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleDocument {
    pub schema_version: u32,
    pub continuity: u32,
    pub degree: u32,
    pub knots: Vec<f64>,
    pub middle_index: usize,
    pub omega_policy: String,
    pub omega: f64,
    pub subintervals: Vec<SubintervalRecord>,
    pub checks: Checks,
}

impl RuleDocument {
    /// Document for `rule`, with the maximal basis defect against its own spline space.
    pub fn from_rule(rule: &QuadratureRule) -> Result<Self> {
        let space = SplineSpace::new(&rule.partition, rule.continuity, rule.degree)?;
        let report = verify_exactness(rule, &space)?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            continuity: rule.continuity.index(),
            degree: rule.degree,
            knots: rule.partition.knots().to_vec(),
            middle_index: rule.middle,
            omega_policy: rule.omega_policy.to_string(),
            omega: rule.omega(),
            subintervals: rule
                .subintervals
                .iter()
                .map(|s| SubintervalRecord {
                    index: s.plan.index,
                    span: [s.plan.span.0, s.plan.span.1],
                    kind: s.plan.kind,
                    dirac_left: s.plan.dirac_left.as_ref().map(|d| d.entries().to_vec()),
                    dirac_right: s.plan.dirac_right.as_ref().map(|d| d.entries().to_vec()),
                    nodes: s.nodes.clone(),
                    weights: s.weights.clone(),
                })
                .collect(),
            checks: Checks {
                weight_sum: rule.weight_sum(),
                max_defect: report.max_defect,
                warnings: rule.warnings.clone(),
            },
        })
    }

    /// Rebuilds the rule so that it can be verified.
    pub fn to_rule(&self) -> Result<QuadratureRule> {
        let bad = |m: String| Error::MalformedDocument(m);
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(format!(
                "schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let c = Continuity::try_from(self.continuity)?;
        let partition = Partition::new(self.knots.clone()).map_err(|e| bad(e.to_string()))?;
        let s = partition.subintervals();
        if self.subintervals.len() != s {
            return Err(bad(format!(
                "{} subintervals for {} knots",
                self.subintervals.len(),
                self.knots.len()
            )));
        }
        if self.middle_index < 1 || self.middle_index > s {
            return Err(bad(format!(
                "middle_index {} out of range",
                self.middle_index
            )));
        }
        let omega_policy: OmegaPolicy = self.omega_policy.parse().map_err(bad)?;
        let dirac = |v: &Option<Vec<f64>>| -> Result<Option<DiracVector>> {
            v.as_ref()
                .map(|e| DiracVector::new(c, e.clone()))
                .transpose()
                .map_err(|e| bad(e.to_string()))
        };
        let mut subintervals = Vec::with_capacity(s);
        for (k, rec) in self.subintervals.iter().enumerate() {
            if rec.index != k + 1 {
                return Err(bad(format!(
                    "subinterval {} listed at position {}",
                    rec.index,
                    k + 1
                )));
            }
            if rec.nodes.len() != rec.weights.len() {
                return Err(bad(format!(
                    "subinterval {}: {} nodes but {} weights",
                    rec.index,
                    rec.nodes.len(),
                    rec.weights.len()
                )));
            }
            if rec.nodes.iter().chain(&rec.weights).any(|v| !v.is_finite()) {
                return Err(bad(format!("subinterval {}: non-finite value", rec.index)));
            }
            let span = partition.span(k + 1);
            if span != (rec.span[0], rec.span[1]) {
                return Err(bad(format!(
                    "subinterval {}: span differs from knots",
                    rec.index
                )));
            }
            subintervals.push(RuleSubinterval {
                plan: SubintervalPlan {
                    index: rec.index,
                    span,
                    kind: rec.kind,
                    node_count: rec.nodes.len(),
                    dirac_left: dirac(&rec.dirac_left)?,
                    dirac_right: dirac(&rec.dirac_right)?,
                    omega: (rec.kind == SubintervalKind::M).then_some(self.omega),
                },
                nodes: rec.nodes.clone(),
                weights: rec.weights.clone(),
            });
        }
        Ok(QuadratureRule {
            continuity: c,
            degree: self.degree,
            partition,
            middle: self.middle_index,
            omega_policy,
            subintervals,
            warnings: self.checks.warnings.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))
    }

    /// One row per node: `subinterval,kind,node,weight`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["subinterval", "kind", "node", "weight"])
            .expect("write to memory");
        for s in &self.subintervals {
            for (x, wt) in s.nodes.iter().zip(&s.weights) {
                w.write_record([
                    s.index.to_string(),
                    s.kind.to_string(),
                    format_f64(*x),
                    format_f64(*wt),
                ])
                .expect("write to memory");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 output")
    }
}

/// 17 significant digits, enough to round-trip every f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with every float written by [`format_f64`].
struct SigDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(format_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        SigDigits(serde_json::ser::PrettyFormatter::new()),
    );
    value.serialize(&mut ser).expect("serializable value");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 output")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "splinequad",
    version,
    about = "Gaussian quadrature rules for C0 and C1 splines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a rule for a partition.
    Gen(GenArgs),
    /// Check a rule document against the B-spline basis of its space.
    Verify(VerifyArgs),
    /// Reproduce one of the five worked tables.
    Table(TableArgs),
    /// Run the seeded property suites.
    Props(PropsArgs),
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    #[arg(long)]
    pub continuity: u32,
    #[arg(long)]
    pub degree: u32,
    /// Comma-separated, strictly increasing.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub knots: Vec<f64>,
    /// 1-based index of the subinterval with the extra node (default: ceil(s/2)).
    #[arg(long)]
    pub middle: Option<usize>,
    /// node-left, zero or value=<x> (default: node-left for continuity 0, zero for 1).
    #[arg(long)]
    pub omega_policy: Option<OmegaPolicy>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Rule document (JSON) written by `gen`.
    pub document: PathBuf,
    /// Relative tolerance on the maximal basis defect.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Expected continuity; must match the document.
    #[arg(long)]
    pub continuity: Option<u32>,
    /// Expected degree; must match the document.
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TableArgs {
    #[arg(value_parser = clap::value_parser!(u32).range(1..=5))]
    pub id: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct PropsArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn cmd_gen(args: &GenArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let c = Continuity::try_from(args.continuity)?;
    let partition = Partition::new(args.knots.clone())?;
    let rule = generate(&partition, c, args.degree, args.middle, args.omega_policy)?;
    let doc = RuleDocument::from_rule(&rule)?;
    let text = match args.format {
        Format::Json => doc.to_json(),
        Format::Csv => doc.to_csv(),
    };
    emit(&text, &args.out, stdout)?;
    for w in &rule.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    Ok(if rule.warnings.is_empty() {
        EXIT_OK
    } else {
        EXIT_WARNINGS
    })
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(&args.document)
        .map_err(|e| Error::MalformedDocument(format!("{}: {e}", args.document.display())))?;
    let doc = RuleDocument::from_json(&text)?;
    for (flag, given, stored) in [
        ("continuity", args.continuity, doc.continuity),
        ("degree", args.degree, doc.degree),
    ] {
        if let Some(v) = given {
            if v != stored {
                return Err(Error::SpaceMismatch(format!(
                    "--{flag} {v} but the document has {flag} {stored}"
                ))
                .into());
            }
        }
    }
    let rule = doc.to_rule()?;
    let space = SplineSpace::new(&rule.partition, rule.continuity, rule.degree)?;
    let report = verify_with_tolerance(&rule, &space, args.tol)?;
    emit(&to_json(&report), &args.out, stdout)?;
    if report.pass {
        Ok(EXIT_OK)
    } else {
        writeln!(
            stderr,
            "FAIL: max defect {:e} at basis index {} exceeds {:e}",
            report.max_defect, report.worst_index, report.tolerance
        )?;
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_table(args: &TableArgs, stdout: &mut dyn Write) -> Outcome {
    let report = reproduce_table(args.id)?;
    emit(&to_json(&report), &args.out, stdout)?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_props(args: &PropsArgs, stdout: &mut dyn Write) -> Outcome {
    let report = run_props(args.seed);
    emit(&to_json(&report), &args.out, stdout)?;
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Parses `args` (including the program name) and runs the command, returning the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
        Command::Table(a) => cmd_table(a, stdout),
        Command::Props(a) => cmd_props(a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
