//! `tamehodge`: spectra at infinity, irregular Hodge numbers and Kontsevich
//! bundles of tame Laurent polynomials, plus the local V-filtration checks.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tamehodge_core::chart::{verify_chart, ChartBounds, ChartError, ChartSpec, VerificationReport};
use tamehodge_core::groebner::{Budget, GroebnerError, MonomialOrder};
use tamehodge_core::hodge::{catalog, compare_with_hodge_sequence, HodgeError, MirrorReport};
use tamehodge_core::rational::{parse_rational, Rational};
use tamehodge_core::report::{analyze, AnalyzeError, AnalyzeOptions};
use tamehodge_core::spectrum::{compute_spectrum, SpectrumError, SpectrumOptions, SpectrumTable};

const EXIT_PARSE: u8 = 2;
const EXIT_NOT_CONVENIENT: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;
const EXIT_RESOURCE: u8 = 5;

#[derive(Parser)]
#[command(name = "tamehodge", version, about = "Exact Hodge-theoretic invariants of tame Laurent polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one Laurent polynomial.
    Analyze(AnalyzeArgs),
    /// Check the V-filtration identities in a normal-crossing chart.
    VerifyLocal(VerifyArgs),
    /// Compare the mirrors of P1, P2 and P1xP1 with their Hodge numbers.
    Catalog(FormatArgs),
}

#[derive(Args, Clone, Copy)]
struct FormatArgs {
    /// Emit JSON (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit a plain-text table.
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Inline expression such as "x + y + x^-1*y^-1".
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    expression: Option<String>,
    /// Read the expression from a file.
    #[arg(long, short)]
    file: Option<PathBuf>,
    /// Comma-separated variable order; defaults to the alphabetical order of the identifiers.
    #[arg(long, value_delimiter = ',')]
    vars: Option<Vec<String>>,
    #[arg(long, default_value = "grevlex")]
    order: MonomialOrder,
    /// Maximum number of S-pairs per Gröbner computation.
    #[arg(long, default_value_t = Budget::default().max_pairs)]
    budget: usize,
    /// Skip the non-degeneracy gate; the report is stamped "unverified hypotheses".
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    format: FormatArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of x-variables in the chart.
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Pole orders, comma separated; defaults to 2 for every variable.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    e: Option<Vec<i64>>,
    /// Values of α in [0, 1), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1/4,1/2", value_parser = parse_alpha)]
    alpha: Vec<Rational>,
    #[arg(long, default_value_t = 2)]
    p_max: i64,
    /// min_exponent,max_v_degree,max_op_degree[,max_weight]
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: Option<ChartBounds>,
    #[command(flatten)]
    format: FormatArgs,
}

fn parse_alpha(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn parse_bounds(s: &str) -> Result<ChartBounds, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let nonneg = |x: i64| u32::try_from(x).map_err(|_| format!("{x} must be nonnegative"));
    match parts[..] {
        [min, v, op] | [min, v, op, _] => Ok(ChartBounds {
            min_exponent: min,
            max_v_degree: nonneg(v)?,
            max_op_degree: nonneg(op)?,
            max_weight: parts.get(3).copied().unwrap_or(ChartBounds::default().max_weight),
        }),
        _ => Err("expected min,vdeg,opdeg[,maxw]".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::VerifyLocal(args) => cmd_verify_local(args),
        Command::Catalog(format) => cmd_catalog(format),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let spectrum = |e: &SpectrumError| match e {
        SpectrumError::NotConvenient => EXIT_NOT_CONVENIENT,
        SpectrumError::Degenerate { .. } => EXIT_DEGENERATE,
        SpectrumError::Groebner(GroebnerError::ResourceLimit { .. }) => EXIT_RESOURCE,
        _ => 1,
    };
    if let Some(e) = err.downcast_ref::<AnalyzeError>() {
        return match e {
            AnalyzeError::Parse(_) | AnalyzeError::NoVariables => EXIT_PARSE,
            AnalyzeError::Spectrum(s) | AnalyzeError::Hodge(HodgeError::Pipeline(s)) => spectrum(s),
            _ => 1,
        };
    }
    if let Some(s) = err.downcast_ref::<SpectrumError>() {
        return spectrum(s);
    }
    if let Some(ChartError::TruncationOverflow(_)) = err.downcast_ref::<ChartError>() {
        return EXIT_RESOURCE;
    }
    1
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let text = match (&args.expression, &args.file) {
        (Some(e), _) => e.clone(),
        (None, Some(path)) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .trim()
            .to_string(),
        (None, None) => bail!("no expression given"),
    };
    let opts = AnalyzeOptions {
        order: args.order,
        budget: Budget {
            max_pairs: args.budget,
        },
        force: args.force,
    };
    let report = analyze(&text, args.vars.as_deref(), &opts)?;
    if args.format.text {
        emit(&report.to_text())?;
    } else {
        emit(&report.to_json())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_local(args: VerifyArgs) -> Result<ExitCode> {
    let e = args.e.unwrap_or_else(|| vec![2; args.ell]);
    if e.len() != args.ell {
        bail!("--e has {} entries but --ell is {}", e.len(), args.ell);
    }
    if args.ell > 2 {
        bail!("the filtration comparison supports at most 2 x-variables");
    }
    let spec = ChartSpec::new(e, args.bounds.unwrap_or_default())?;
    let report: VerificationReport = verify_chart(&spec, &args.alpha, args.p_max)?;
    if args.format.text {
        let mut out = format!(
            "chart e = {:?}, alphas = [{}], p_max = {}\n",
            spec.e(),
            args.alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "),
            args.p_max
        );
        for c in &report.checks {
            out.push_str(&format!(
                "{} {:<28} {:>6} cases",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.cases
            ));
            if let Some(bad) = &c.offending {
                out.push_str(&format!("  first failure: {bad}"));
            }
            out.push('\n');
        }
        emit(&out)?;
    } else {
        emit(&json(&report)?)?;
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

#[derive(Serialize)]
struct CatalogLine {
    name: String,
    mirror: String,
    spectrum: SpectrumTable,
    comparison: MirrorReport,
}

fn cmd_catalog(format: FormatArgs) -> Result<ExitCode> {
    let mut lines = Vec::new();
    for entry in catalog() {
        let f = entry.mirror_polynomial();
        let s = compute_spectrum(&f, &SpectrumOptions::default())
            .map_err(|e| anyhow!(e).context(format!("mirror of {}", entry.name)))?
            .spectrum;
        let comparison = compare_with_hodge_sequence(&s, entry.name, &entry.fan.hodge_numbers());
        lines.push(CatalogLine {
            name: entry.name.to_string(),
            mirror: entry.mirror.to_string(),
            spectrum: s,
            comparison,
        });
    }
    if format.text {
        let mut out = String::new();
        for l in &lines {
            let spectrum: Vec<String> = l
                .spectrum
                .entries()
                .iter()
                .flat_map(|e| std::iter::repeat_n(e.gamma.to_string(), e.delta as usize))
                .collect();
            let h: Vec<String> = l.comparison.expected.iter().map(u64::to_string).collect();
            out.push_str(&format!(
                "{:<6} <-> {:<22} {}  hodge [{}]  spectrum [{}]\n",
                l.name,
                l.mirror,
                if l.comparison.matched { "match" } else { "MISMATCH" },
                h.join(" "),
                spectrum.join(" ")
            ));
        }
        emit(&out)?;
    } else {
        emit(&json(&lines)?)?;
    }
    Ok(if lines.iter().all(|l| l.comparison.matched) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
