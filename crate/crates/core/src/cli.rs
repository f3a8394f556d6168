//! The `cobcert` command line.
//!
//! Results go to stdout and diagnostics to stderr. Exit codes: 0 when every
//! check passed, 1 when a certificate (or consistency trial) was falsified,
//! 2 on usage or parse errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::em_cobordism::Space;
use crate::steenrod::{enumerate_admissible, tuple_form, SqExpr};
use crate::sw_ring::{sq_expr_apply, SWPoly};
use crate::verifier::{
    check_range, consistency_adem_action, replay, Certificate, Verdict, DEFAULT_SEED,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cobcert",
    version,
    about = "Certify GF(2) independence of Sq^I(w_k) in H*(MO(k)) and tabulate related dimensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify degrees k..=max-degree
    Verify(VerifyArgs),
    /// Rewrite a composite of squares into the admissible basis
    Adem {
        /// e.g. "Sq^2 Sq^2"
        expression: String,
    },
    /// Apply squares to a polynomial in w1..wk
    Act {
        #[arg(long)]
        k: u32,
        /// e.g. "Sq^2 Sq^1"
        word: String,
        /// e.g. "w1 w2 + w3"
        poly: String,
    },
    /// Tabulate graded dimensions
    Dims(DimsArgs),
    /// List admissible words of a given degree
    Admissible {
        #[arg(long)]
        degree: u32,
        /// Largest excess to include (unbounded if absent)
        #[arg(long, allow_negative_numbers = true)]
        max_excess: Option<i64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Cross-check Adem reduction against the Wu/Cartan action on random inputs
    Consistency {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Re-check certificate files using only their stored matrices
    Replay {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub max_degree: u32,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write one JSON certificate per degree into this directory
    #[arg(long, value_name = "DIR")]
    pub emit_certificates: Option<PathBuf>,
    /// Omit matrices with more entries than this from emitted certificates
    #[arg(long, value_name = "N")]
    pub max_matrix_cells: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DimsArgs {
    #[arg(long, value_parser = parse_space)]
    pub space: Space,
    /// Required for every space except Nstar
    #[arg(long)]
    pub k: Option<u32>,
    /// Inclusive degree range A..B
    #[arg(long, value_parser = parse_range)]
    pub range: (u32, u32),
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

fn parse_space(s: &str) -> Result<Space, String> {
    s.parse()
}

/// Parses an inclusive range `A..B`.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u32 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start: {e}"))?;
    let b: u32 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// A failed command: the message goes to stderr with the given exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    match command {
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Adem { expression } => {
            let expr: SqExpr = expression.parse().map_err(|e| usage(format!("{e}")))?;
            writeln!(out, "{}", expr.reduce()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Act { k, word, poly } => {
            if k == 0 {
                return Err(usage("--k must be positive"));
            }
            let expr: SqExpr = word.parse().map_err(|e| usage(format!("{e}")))?;
            let p = SWPoly::parse(k as usize, &poly).map_err(|e| usage(format!("{e}")))?;
            writeln!(out, "{}", sq_expr_apply(&expr, &p)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Dims(args) => cmd_dims(&args, out),
        Command::Admissible {
            degree,
            max_excess,
            format,
        } => {
            let words = enumerate_admissible(degree, max_excess);
            match format {
                Format::Table => {
                    for w in &words {
                        writeln!(out, "{} e={}", tuple_form(w), w.excess()).map_err(io)?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "word,excess").map_err(io)?;
                    for w in &words {
                        writeln!(out, "\"{}\",{}", tuple_form(w), w.excess()).map_err(io)?;
                    }
                }
                Format::Json => {
                    let rows: Vec<_> = words
                        .iter()
                        .map(|w| json!({"word": w, "excess": w.excess()}))
                        .collect();
                    writeln!(out, "{}", json!({"degree": degree, "words": rows})).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Consistency {
            trials,
            seed,
            format,
        } => {
            let report = consistency_adem_action(trials, seed);
            match format {
                Format::Json => {
                    let text = serde_json::to_string(&report).expect("serializable");
                    writeln!(out, "{text}").map_err(io)?;
                }
                Format::Table | Format::Csv => {
                    writeln!(
                        out,
                        "seed {} trials {} passed {} failed {}",
                        report.seed,
                        report.trials,
                        report.passed,
                        report.failures.len()
                    )
                    .map_err(io)?;
                    for f in &report.failures {
                        writeln!(
                            out,
                            "trial {} seed {}: {} applied to {}: direct {} vs reduced {}",
                            f.trial, f.trial_seed, f.word, f.poly, f.direct, f.reduced
                        )
                        .map_err(io)?;
                    }
                }
            }
            Ok(if report.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_FALSIFIED
            })
        }
        Command::Replay { files } => cmd_replay(&files, out),
    }
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    if args.k == 0 {
        return Err(usage("--k must be positive"));
    }
    if args.max_degree < args.k {
        return Err(usage(format!(
            "--max-degree {} is below --k {}",
            args.max_degree, args.k
        )));
    }
    let report = check_range(args.k, args.max_degree).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    })?;

    if let Some(dir) = &args.emit_certificates {
        fs::create_dir_all(dir)
            .map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
        for cert in &report.certificates {
            let cert = match args.max_matrix_cells {
                Some(n) => cert.clone().compact(n),
                None => cert.clone(),
            };
            let path = dir.join(certificate_file_name(cert.k, cert.degree));
            let text = serde_json::to_string_pretty(&cert).expect("serializable");
            fs::write(&path, text + "\n")
                .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }

    match args.format {
        Format::Table => {
            writeln!(
                out,
                "{:>6} {:>6} {:>8} {:>6} {:>10} {:>8} {:>8}  verdict",
                "degree", "words", "columns", "rank", "primitive", "dim MO", "dim K"
            )
            .map_err(io)?;
            for s in &report.summary {
                writeln!(
                    out,
                    "{:>6} {:>6} {:>8} {:>6} {:>10} {:>8} {:>8}  {}",
                    s.degree,
                    s.count,
                    s.columns,
                    s.rank,
                    s.primitive_dim,
                    s.h_dim_mo,
                    s.h_dim_k,
                    s.verdict
                )
                .map_err(io)?;
            }
            writeln!(
                out,
                "k={} degrees {}..={}: {}",
                report.k, report.k, report.max_degree, report.verdict
            )
            .map_err(io)?;
        }
        Format::Csv => {
            writeln!(
                out,
                "degree,words,columns,rank,primitive,dim_mo,dim_k,verdict"
            )
            .map_err(io)?;
            for s in &report.summary {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    s.degree,
                    s.count,
                    s.columns,
                    s.rank,
                    s.primitive_dim,
                    s.h_dim_mo,
                    s.h_dim_k,
                    s.verdict
                )
                .map_err(io)?;
            }
        }
        Format::Json => {
            let v = json!({
                "k": report.k,
                "max_degree": report.max_degree,
                "verdict": report.verdict,
                "degrees": report.summary,
            });
            writeln!(out, "{v}").map_err(io)?;
        }
    }
    Ok(match report.verdict {
        Verdict::Verified => EXIT_OK,
        Verdict::Falsified => EXIT_FALSIFIED,
    })
}

pub fn certificate_file_name(k: u32, degree: u32) -> String {
    format!("cert_k{k}_d{degree:03}.json")
}

fn cmd_dims(args: &DimsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    let k = match (args.space.needs_k(), args.k) {
        (true, None) => return Err(usage(format!("--k is required for {}", args.space))),
        (true, Some(0)) => return Err(usage("--k must be positive")),
        (_, k) => k,
    };
    let (lo, hi) = args.range;
    let dims = args.space.dims(k.unwrap_or(0), lo, hi);
    match args.format {
        Format::Table => {
            writeln!(out, "{:>6} {:>12}", "degree", "dim").map_err(io)?;
            for (d, v) in (lo..=hi).zip(&dims) {
                writeln!(out, "{d:>6} {v:>12}").map_err(io)?;
            }
        }
        Format::Csv => {
            writeln!(out, "degree,dim").map_err(io)?;
            for (d, v) in (lo..=hi).zip(&dims) {
                writeln!(out, "{d},{v}").map_err(io)?;
            }
        }
        Format::Json => {
            let k = if args.space.needs_k() { k } else { None };
            let v = json!({"k": k, "space": args.space, "start": lo, "dims": dims});
            writeln!(out, "{v}").map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn load_certificate(path: &Path) -> Result<Certificate, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_replay(files: &[PathBuf], out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    let mut code = EXIT_OK;
    for path in files {
        let cert = load_certificate(path).map_err(usage)?;
        let result = replay(&cert).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let status = if result.is_consistent() {
            "reproduced"
        } else {
            "MISMATCH"
        };
        writeln!(
            out,
            "{}: k={} degree={} rank={} verdict={} {}",
            path.display(),
            cert.k,
            cert.degree,
            result.rank,
            result.verdict,
            status
        )
        .map_err(io)?;
        for d in &result.discrepancies {
            writeln!(out, "  {d}").map_err(io)?;
        }
        if !result.is_consistent() || result.verdict == Verdict::Falsified {
            code = EXIT_FALSIFIED;
        }
    }
    Ok(code)
}
