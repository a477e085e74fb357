//! Argument parsing and dispatch for the `pinchcert` binary.
//!
//! Exit codes: 0 success and pass, 2 success and fail, 1 usage or internal error.

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pinchcert::certifier::report::{render, render_markdown, Format};
use pinchcert::certifier::{certify, Certificate, CertifyError, KChoice, ParamSet, ThetaRule};
use pinchcert::constants::build_b_matrix;
use pinchcert::optimizer::{max_epsilon, SearchConfig, SearchError, DEFAULT_BISECT_STEPS};
use pinchcert::oracle::{lemma_ratio_sup, pd_cross_check, quadform_min_check, OracleError, OracleReport};
use pinchcert::{Rational, Strictness};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot read certificate: {0}")]
    Json(#[from] serde_json::Error),
}

fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

fn k_choice(s: &str) -> Result<KChoice, String> {
    s.parse::<KChoice>().map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
    Markdown,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Text => Format::Text,
            OutFormat::Json => Format::Json,
            OutFormat::Markdown => Format::Markdown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ThetaArg {
    Displayed,
    Skip,
}

impl From<ThetaArg> for ThetaRule {
    fn from(t: ThetaArg) -> Self {
        match t {
            ThetaArg::Displayed => ThetaRule::Displayed,
            ThetaArg::Skip => ThetaRule::Skip,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pinchcert", version, about = "Exact certificates for the pinched anisotropic Bernstein constant chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parameters of a certificate. Unset values default to the printed
/// parameter set for `n` (available for n = 4 and n = 5).
#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 4)]
    n: u32,
    /// Pinching gap ε (p/q or decimal, converted exactly).
    #[arg(long, value_parser = rational)]
    eps: Option<Rational>,
    #[arg(long, value_parser = rational)]
    a: Option<Rational>,
    #[arg(long, value_parser = rational)]
    alpha: Option<Rational>,
    /// Weight exponent: `auto` (k = 1/η) or a rational.
    #[arg(long, value_parser = k_choice)]
    k: Option<KChoice>,
    #[arg(long, value_parser = rational)]
    beta: Option<Rational>,
    /// Require strict positive definiteness of the S matrix.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value_t = ThetaArg::Displayed)]
    theta_rule: ThetaArg,
}

impl ParamArgs {
    fn resolve(&self) -> Result<ParamSet, CliError> {
        let base = ParamSet::published(self.n).ok();
        let pick = |v: &Option<Rational>, d: Option<Rational>, name: &str| {
            v.clone().or(d).ok_or_else(|| {
                CliError::Usage(format!("--{name} is required for n = {} (no printed default)", self.n))
            })
        };
        Ok(ParamSet {
            n: self.n,
            eps: pick(&self.eps, base.as_ref().map(|b| b.eps.clone()), "eps")?,
            a: pick(&self.a, base.as_ref().map(|b| b.a.clone()), "a")?,
            alpha: pick(&self.alpha, base.as_ref().map(|b| b.alpha.clone()), "alpha")?,
            k: self.k.clone().unwrap_or_default(),
            beta: pick(&self.beta, base.as_ref().map(|b| b.beta.clone()), "beta")?,
            strictness: if self.strict { Strictness::Strict } else { Strictness::AllowSemidefinite },
            theta_rule: self.theta_rule.into(),
        })
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify one parameter set.
    Certify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Bisection for the largest certifiable pinching gap.
    Search {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, value_parser = rational, default_value = "0")]
        eps_min: Rational,
        #[arg(long, value_parser = rational, default_value = "1/2")]
        eps_max: Rational,
        #[arg(long, default_value_t = 16)]
        grid: u32,
        #[arg(long, default_value_t = 6)]
        refine: u32,
        /// Halvings of the ε range.
        #[arg(long, default_value_t = DEFAULT_BISECT_STEPS)]
        bisect_steps: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = ThetaArg::Displayed)]
        theta_rule: ThetaArg,
        #[arg(long, value_parser = rational, default_value = "4")]
        a_cap: Rational,
        #[command(flatten)]
        output: Output,
    },
    /// Independent cross-checks.
    Oracle {
        #[command(subcommand)]
        check: OracleCommand,
    },
    /// Table of the chain constants next to printed values.
    Constants {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Re-render a JSON certificate.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OutFormat::Markdown)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Supremum of H²/|A|² for F-minimal data against δ².
    LemmaRatio {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, value_parser = rational)]
        eps: Option<Rational>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Completion-of-squares minimum for B and C = −C̄.
    Quadform {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, value_parser = rational)]
        a: Option<Rational>,
        #[arg(long, value_parser = rational)]
        alpha: Option<Rational>,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact definiteness against floating-point eigenvalues.
    PdCheck {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(doc: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, doc).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(doc.as_bytes())
                .and_then(|_| so.flush())
                .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn use_color(out: Option<&Path>) -> bool {
    out.is_none() && std::env::var_os("NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

/// Highlight the verdict line of a text document.
fn colorize(doc: String) -> String {
    doc.lines()
        .map(|l| {
            if let Some(rest) = l.strip_prefix("verdict: PASS") {
                format!("verdict: \x1b[32mPASS\x1b[0m{rest}")
            } else if let Some(rest) = l.strip_prefix("verdict: FAIL") {
                format!("verdict: \x1b[31mFAIL\x1b[0m{rest}")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

fn emit_certificate(c: &Certificate, output: &Output) -> Result<(), CliError> {
    let mut doc = render(c, output.format.into());
    if output.format == OutFormat::Text && use_color(output.out.as_deref()) {
        doc = colorize(doc);
    }
    emit(&doc, output.out.as_deref())
}

fn constants_doc(c: &Certificate, format: OutFormat) -> String {
    match format {
        OutFormat::Json => serde_json::to_string_pretty(&c.constants).expect("rows serialize") + "\n",
        OutFormat::Text | OutFormat::Markdown => {
            let md = format == OutFormat::Markdown;
            let mut s = String::new();
            if md {
                s.push_str("| symbol | exact | decimal | printed | flag |\n|---|---|---|---|---|\n");
            } else {
                s.push_str(&format!("{:<14} {:<22} {:<10} {:<9} {}\n", "symbol", "decimal", "printed", "flag", "exact"));
            }
            for row in &c.constants {
                let exact = row.exact.as_ref().map_or_else(|| "bracketed".to_string(), |v| v.to_string());
                let decimal = match (&row.exact, &row.bracket) {
                    (Some(v), _) => v.decimal_marked(12),
                    (None, Some(b)) => b.render(12).value,
                    _ => row.decimal.clone(),
                };
                let (printed, flag) = row.published.as_ref().map_or(("—".to_string(), "—"), |p| {
                    (p.printed.clone(), if p.matches { "match" } else { "MISMATCH" })
                });
                if md {
                    s.push_str(&format!("| {} | `{}` | {} | {} | {} |\n", row.symbol, exact, decimal, printed, flag));
                } else {
                    s.push_str(&format!("{:<14} {:<22} {:<10} {:<9} {}\n", row.symbol, decimal, printed, flag, exact));
                }
            }
            s
        }
    }
}

fn oracle_doc(r: &OracleReport) -> String {
    r.to_json() + "\n"
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Certify { params, output } => {
            let c = certify(&params.resolve()?)?;
            emit_certificate(&c, &output)?;
            Ok(exit_for(c.passed()))
        }
        Command::Search { n, eps_min, eps_max, grid, refine, bisect_steps, seed, strict, theta_rule, a_cap, output } => {
            let cfg = SearchConfig {
                n,
                eps_min,
                eps_max,
                grid,
                refine_rounds: refine,
                bisect_steps,
                strictness: if strict { Strictness::Strict } else { Strictness::AllowSemidefinite },
                seed,
                theta_rule: theta_rule.into(),
                a_cap,
            };
            let f = max_epsilon(&cfg)?;
            let doc = match output.format {
                OutFormat::Json => f.to_json() + "\n",
                OutFormat::Text | OutFormat::Markdown => f.summary(),
            };
            emit(&doc, output.out.as_deref())?;
            Ok(exit_for(f.max_eps.is_some()))
        }
        Command::Oracle { check } => {
            let (report, out) = match check {
                OracleCommand::LemmaRatio { n, eps, samples, seed, out } => {
                    let eps = match eps.or_else(|| ParamSet::published(n).ok().map(|p| p.eps)) {
                        Some(e) => e,
                        None => return Err(CliError::Usage(format!("--eps is required for n = {n}"))),
                    };
                    (lemma_ratio_sup(n, &eps, samples, seed)?, out)
                }
                OracleCommand::Quadform { n, a, alpha, samples, seed, out } => {
                    let base = ParamSet::published(n).ok();
                    let a = a.or_else(|| base.as_ref().map(|b| b.a.clone()));
                    let alpha = alpha.or_else(|| base.as_ref().map(|b| b.alpha.clone()));
                    let (Some(a), Some(alpha)) = (a, alpha) else {
                        return Err(CliError::Usage(format!("--a and --alpha are required for n = {n}")));
                    };
                    let (b, cbar) = build_b_matrix(n, &a, &alpha).map_err(|e| CliError::Usage(e.to_string()))?;
                    let c: Vec<Rational> = cbar.iter().map(|x| -x).collect();
                    (quadform_min_check(&b, &c, samples, seed)?, out)
                }
                OracleCommand::PdCheck { trials, seed, out } => (pd_cross_check(trials, seed)?, out),
            };
            emit(&oracle_doc(&report), out.as_deref())?;
            Ok(exit_for(report.pass))
        }
        Command::Constants { params, output } => {
            let c = certify(&params.resolve()?)?;
            emit(&constants_doc(&c, output.format), output.out.as_deref())?;
            Ok(EXIT_PASS)
        }
        Command::Report { input, format, out } => {
            let text = fs::read_to_string(&input)
                .map_err(|source| CliError::Io { path: input.display().to_string(), source })?;
            let c = Certificate::from_json(&text)?;
            pinchcert::certifier::revalidate(&c).map_err(|e| CliError::Usage(format!("certificate does not revalidate: {e}")))?;
            let doc = match format {
                OutFormat::Markdown => render_markdown(&c),
                f => render(&c, f.into()),
            };
            emit(&doc, out.as_deref())?;
            Ok(EXIT_PASS)
        }
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
