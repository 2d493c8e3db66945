//! Command-line frontend: single-field reports, discriminant scans and
//! λ transitions.
//!
//! Field specs are JSON objects:
//!
//! ```text
//! {"kind":"quadratic","disc":-23}
//! {"kind":"abelian","modulus":41,"char_orders":[5],"char_images":[[1]]}
//! {"kind":"compositum","fields":[<spec>, <spec>, ...]}
//! ```
//!
//! For `abelian`, `char_images[j][i]` is the exponent `e` with
//! `χ_j(g_i) = exp(2πi·e/char_orders[j])`, where `g_i` runs over the CRT
//! generators of `(Z/modulus)^×`: the smallest primitive root for each odd
//! prime power, then `−1` (and `5` when `8 | modulus`) for the 2-part.
//!
//! Exit codes: 0 success, 1 usage error, 2 criterion not applicable or a
//! missing base invariant, 3 precision exhausted, 4 shape violation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::abfield::{AbelianField, FieldError};
use crate::arith;
use crate::kida::{self, KidaError, TransitionInput};
use crate::logclass::{self, LogError, PhiReport};
use crate::padic::{PadicContext, PadicError, DEFAULT_GUARD, DEFAULT_PRECISION};
use crate::quadclass::{self, QuadError, SplitType};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_APPLICABLE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_SHAPE: i32 = 4;

/// Tower levels listed as PREDICTION rows.
pub const PREDICTION_LEVELS: std::ops::RangeInclusive<u32> = 1..=4;

#[derive(Debug, Parser)]
#[command(name = "logclass", version, about = "Logarithmic class groups of imaginary abelian fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report for the imaginary character of an imaginary quadratic field.
    Quad {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        ell: u64,
        #[arg(long, env = "LOGCLASS_PRECISION", default_value_t = DEFAULT_PRECISION,
              value_parser = clap::value_parser!(u32).range(16..))]
        precision: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// TSV scan over fundamental discriminants in which ℓ splits.
    Table {
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        dmin: i64,
        #[arg(long, allow_hyphen_values = true)]
        dmax: i64,
        #[arg(long, env = "LOGCLASS_PRECISION", default_value_t = DEFAULT_PRECISION,
              value_parser = clap::value_parser!(u32).range(16..))]
        precision: u32,
    },
    /// λ and λ̃ along an ℓ-extension of abelian fields.
    Kida {
        #[arg(long)]
        base: String,
        #[arg(long)]
        ext: String,
        #[arg(long)]
        ell: u64,
        /// Base λ for one character, as `id=V` with `id` like `[1]`.
        #[arg(long = "assume-lambda")]
        assume_lambda: Vec<String>,
        /// Work over K(ζ_ℓ) and apply the ω term.
        #[arg(long)]
        omega: bool,
        #[arg(long, env = "LOGCLASS_PRECISION", default_value_t = DEFAULT_PRECISION,
              value_parser = clap::value_parser!(u32).range(16..))]
        precision: u32,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: impl Into<String>) -> Self {
        Self { code, stdout: String::new(), stderr: stderr.into() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    Quadratic { disc: i64 },
    Abelian { modulus: u64, char_orders: Vec<u64>, char_images: Vec<Vec<u64>> },
    Compositum { fields: Vec<FieldSpec> },
}

impl FieldSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("bad field spec: {e}"))
    }

    pub fn build(&self) -> Result<AbelianField, FieldError> {
        match self {
            FieldSpec::Quadratic { disc } => AbelianField::quadratic(*disc),
            FieldSpec::Abelian { modulus, char_orders, char_images } => {
                AbelianField::from_orders(*modulus, char_orders, char_images)
            }
            FieldSpec::Compositum { fields } => {
                let mut acc = AbelianField::rationals();
                for f in fields {
                    acc = acc.compositum(&f.build()?);
                }
                Ok(acc)
            }
        }
    }
}

pub fn parse_override(text: &str) -> Result<(String, u64), String> {
    let (id, v) = text.rsplit_once('=').ok_or_else(|| format!("expected id=V, got {text}"))?;
    let v = v.trim().parse::<u64>().map_err(|_| format!("λ must be a non-negative integer in {text}"))?;
    Ok((id.trim().to_string(), v))
}

fn context(ell: u64, precision: u32) -> Result<PadicContext, Outcome> {
    if ell < 3 || !arith::is_prime(ell) {
        return Err(Outcome::fail(EXIT_USAGE, format!("error: ℓ = {ell} must be an odd prime\n")));
    }
    PadicContext::new(ell, precision, DEFAULT_GUARD.min(precision / 4))
        .map_err(|e| Outcome::fail(EXIT_USAGE, format!("error: {e}\n")))
}

fn padic_exit(e: &PadicError) -> i32 {
    match e {
        PadicError::PrecisionExhausted { .. } => EXIT_PRECISION,
        _ => EXIT_USAGE,
    }
}

fn quad_exit(e: &QuadError) -> i32 {
    match e {
        QuadError::Padic(p) => padic_exit(p),
        QuadError::NotSplit(_) => EXIT_NOT_APPLICABLE,
        _ => EXIT_USAGE,
    }
}

fn log_exit(e: &LogError) -> i32 {
    match e {
        LogError::Quad(q) => quad_exit(q),
        LogError::Padic(p) => padic_exit(p),
        LogError::NotApplicable(_) | LogError::CriterionNotSatisfied => EXIT_NOT_APPLICABLE,
        LogError::NegativeResult { .. } => EXIT_USAGE,
    }
}

fn kida_exit(e: &KidaError) -> i32 {
    match e {
        KidaError::ShapeViolation(_) => EXIT_SHAPE,
        KidaError::MissingBaseInvariant(_) => EXIT_NOT_APPLICABLE,
        KidaError::Field(FieldError::NotASubfield | FieldError::ShapeViolation(_)) => EXIT_SHAPE,
        KidaError::Log(l) => log_exit(l),
        KidaError::Field(_) | KidaError::InternalInconsistency(_) => EXIT_USAGE,
    }
}

fn opt(v: Option<u32>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub const QUAD_TSV_HEADER: &str = "D\tell\tsplit\th_val\tw_val\twtilde_val\thtilde_val\tgold\tnu";

fn quad_tsv(r: &PhiReport) -> String {
    let mut out = String::new();
    writeln!(out, "{QUAD_TSV_HEADER}").unwrap();
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        r.disc,
        r.ell,
        r.split.as_str(),
        r.h_val,
        opt(r.w_val),
        opt(r.wtilde_val),
        r.htilde_val,
        r.gold.map_or("-", |g| if g { "true" } else { "false" }),
        opt(r.nu)
    )
    .unwrap();
    for n in PREDICTION_LEVELS {
        if let Ok(p) = logclass::tower_order_prediction(r, n) {
            writeln!(out, "PREDICTION\tlevel={}\torder_val={}", p.level, p.order_val).unwrap();
        }
    }
    out
}

pub fn cmd_quad(disc: i64, ell: u64, precision: u32, format: Format) -> Outcome {
    let ctx = match context(ell, precision) {
        Ok(c) => c,
        Err(o) => return o,
    };
    if disc >= 0 || !arith::is_fundamental(disc) {
        return Outcome::fail(EXIT_USAGE, format!("error: {disc} is not a negative fundamental discriminant\n"));
    }
    match logclass::quad_report(disc, ell, &ctx) {
        Ok(r) => {
            let stdout = match format {
                Format::Json => format!("{}\n", r.to_json()),
                Format::Tsv => quad_tsv(&r),
            };
            if r.split == SplitType::Split {
                Outcome::ok(stdout)
            } else {
                Outcome { code: EXIT_NOT_APPLICABLE, stdout, stderr: format!("note: {}\n", r.explanation) }
            }
        }
        Err(e) => Outcome::fail(log_exit(&e), format!("error: {e}\n")),
    }
}

pub const TABLE_HEADER: &str = "D\th_val\tw_val\twtilde_val\thtilde_val\tgold";

pub fn cmd_table(ell: u64, dmin: i64, dmax: i64, precision: u32) -> Outcome {
    let ctx = match context(ell, precision) {
        Ok(c) => c,
        Err(o) => return o,
    };
    if !(dmin < dmax && dmax < 0) {
        return Outcome::fail(EXIT_USAGE, format!("error: need dmin < dmax < 0, got {dmin}, {dmax}\n"));
    }
    let discs: Vec<i64> = (dmin..=dmax)
        .rev()
        .filter(|&d| arith::is_fundamental(d) && quadclass::split_type(d, ell) == SplitType::Split)
        .collect();
    let rows: Vec<Result<PhiReport, LogError>> =
        discs.par_iter().map(|&d| logclass::quad_report(d, ell, &ctx)).collect();
    let mut out = String::new();
    writeln!(out, "{TABLE_HEADER}").unwrap();
    let mut gold = 0usize;
    for row in rows {
        let r = match row {
            Ok(r) => r,
            Err(e) => return Outcome::fail(log_exit(&e), format!("error: {e}\n")),
        };
        let g = r.gold == Some(true);
        gold += usize::from(g);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.disc,
            r.h_val,
            opt(r.w_val),
            opt(r.wtilde_val),
            r.htilde_val,
            g
        )
        .unwrap();
    }
    writeln!(out, "# ell={ell} dmin={dmin} dmax={dmax} split={} gold={gold} not_gold={}", discs.len(), discs.len() - gold)
        .unwrap();
    Outcome::ok(out)
}

pub fn cmd_kida(base: &str, ext: &str, ell: u64, overrides: &[String], omega: bool, precision: u32) -> Outcome {
    let ctx = match context(ell, precision) {
        Ok(c) => c,
        Err(o) => return o,
    };
    let (base_spec, ext_spec) = match (FieldSpec::parse(base), FieldSpec::parse(ext)) {
        (Ok(b), Ok(e)) => (b, e),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(EXIT_USAGE, format!("error: {e}\n")),
    };
    let (k, l) = match (base_spec.build(), ext_spec.build()) {
        (Ok(k), Ok(l)) => (k, l),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(EXIT_USAGE, format!("error: {e}\n")),
    };
    let mut assumed = BTreeMap::new();
    for o in overrides {
        match parse_override(o) {
            Ok((id, v)) => {
                assumed.insert(id, v);
            }
            Err(e) => return Outcome::fail(EXIT_USAGE, format!("error: {e}\n")),
        }
    }
    let run = || -> Result<String, KidaError> {
        let mut invariants = match base_spec {
            FieldSpec::Quadratic { disc } if k.is_imaginary() && arith::gcd(k.degree(), ell) == 1 => {
                kida::quadratic_base_invariants(disc, ell, &ctx)?
            }
            _ => BTreeMap::new(),
        };
        invariants.extend(kida::assumed_invariants(&k, ell, &assumed)?);
        let input = TransitionInput { k: k.clone(), base: None, l: l.clone(), ell, invariants, omega };
        Ok(format!("{}\n", kida::lambda_transition(&input)?.to_json()))
    };
    match run() {
        Ok(s) => Outcome::ok(s),
        Err(e) => Outcome::fail(kida_exit(&e), format!("error: {e}\n")),
    }
}

pub fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Quad { disc, ell, precision, format } => cmd_quad(disc, ell, precision, format),
        Command::Table { ell, dmin, dmax, precision } => cmd_table(ell, dmin, dmax, precision),
        Command::Kida { base, ext, ell, assume_lambda, omega, precision } => {
            cmd_kida(&base, &ext, ell, &assume_lambda, omega, precision)
        }
    }
}

/// Parses arguments and runs; clap errors map to exit 1, help and version to 0.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome::fail(EXIT_USAGE, text)
            } else {
                Outcome::ok(text)
            }
        }
    }
}
