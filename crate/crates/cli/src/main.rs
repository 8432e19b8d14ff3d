//! Command-line front end: validation, decision, certification, certificate
//! verification, the equivalence and period sweeps, and the selfcheck suite.
//!
//! Exit codes: 0 success / decided, 1 verification failure or counterexample,
//! 2 inconclusive below the search bound, 3 invalid input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use k3cert::{
    decide_and_certify_filtered, equivalence_sweep, period_sweep, selfcheck, verify,
    IsomorphismCertificate, MukaiModel, PicardParams, Sign, SweepRange,
};
use k3cert::{compute_period_data, embed_vector, periods_isomorphic, Series};

const EXIT_OK: u8 = 0;
const EXIT_REJECTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INVALID: u8 = 3;

const BOUND_ENV: &str = "K3CERT_BOUND";
const DEFAULT_BOUND: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "k3cert",
    version,
    about = "Decide and certify moduli-of-sheaves self-isomorphism criteria for rank-2 Picard lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate lattice parameters and echo the normalized form.
    Validate(ParamsArgs),
    /// Search both series and signs for a solution below the bound.
    Decide(SearchArgs),
    /// Build, verify and emit an isomorphism certificate.
    Certify(CertifyArgs),
    /// Replay a certificate file and report diagnostics.
    Verify {
        /// Path to a certificate JSON file.
        #[arg(long)]
        cert: PathBuf,
    },
    /// Sweep parameter ranges, checking the refined-condition equivalence.
    SweepEquivalence(SweepArgs),
    /// Re-run the period computation for one tuple or a sweep.
    VerifyPeriods(PeriodArgs),
    /// Run the full fixed-seed property suites of every module.
    Selfcheck,
}

#[derive(Args, Clone)]
struct ParamsArgs {
    /// Coefficient a = r / gcd(r, s).
    #[arg(long)]
    a: Option<BigInt>,
    /// Coefficient b = s / gcd(r, s).
    #[arg(long)]
    b: Option<BigInt>,
    /// Coefficient c = gcd(r, s).
    #[arg(long)]
    c: Option<BigInt>,
    /// Rank r (alternative to a/b/c).
    #[arg(long, conflicts_with_all = ["a", "b", "c"])]
    r: Option<BigInt>,
    /// Euler component s (alternative to a/b/c).
    #[arg(long, conflicts_with_all = ["a", "b", "c"], requires = "r")]
    s: Option<BigInt>,
    /// Negated lattice determinant d.
    #[arg(long)]
    d: BigInt,
    /// Unit μ modulo 2abc².
    #[arg(long)]
    mu: BigInt,
}

impl ParamsArgs {
    fn resolve(&self) -> Result<PicardParams, String> {
        match (&self.a, &self.b, &self.c, &self.r, &self.s) {
            (Some(a), Some(b), Some(c), None, None) => {
                PicardParams::try_new(a.clone(), b.clone(), c.clone(), self.d.clone(), self.mu.clone())
                    .map_err(|e| e.to_string())
            }
            (None, None, None, Some(r), Some(s)) => PicardParams::from_rank_and_euler(
                r.clone(),
                s.clone(),
                self.d.clone(),
                self.mu.clone(),
            )
            .map_err(|e| e.to_string()),
            _ => Err("provide either --a --b --c or --r --s".into()),
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    params: ParamsArgs,
    /// Search bound for |p|, |q| (default 10⁶, or $K3CERT_BOUND).
    #[arg(long)]
    bound: Option<u64>,
    /// Restrict to one series (a | b).
    #[arg(long)]
    series: Option<Series>,
    /// Restrict to one sign (+ | -).
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<Sign>,
    /// Write a JSON record of the outcome to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    max_a: u64,
    #[arg(long, default_value_t = 3)]
    max_b: u64,
    #[arg(long, default_value_t = 3)]
    max_c: u64,
    #[arg(long, default_value_t = 50)]
    max_d: u64,
    #[arg(long, default_value_t = 500)]
    bound: u64,
    /// Write the JSON summary to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the per-solution listing.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct PeriodArgs {
    #[arg(long, required_unless_present = "sweep")]
    a: Option<u64>,
    #[arg(long, required_unless_present = "sweep")]
    b: Option<u64>,
    #[arg(long, required_unless_present = "sweep")]
    c: Option<u64>,
    #[arg(long, default_value_t = 1)]
    d1: u64,
    #[arg(long, default_value_t = 1)]
    d2: u64,
    /// Sweep all coprime-admissible tuples instead of a single one.
    #[arg(long)]
    sweep: bool,
    #[arg(long, default_value_t = 4)]
    max_abc: u64,
    #[arg(long, default_value_t = 4)]
    max_d: u64,
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn default_bound(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var(BOUND_ENV)
            .ok()
            .and_then(|v| v.parse::<u64>().ok())
    })
    .unwrap_or(DEFAULT_BOUND)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Decide(args) => cmd_decide(&args),
        Command::Certify(args) => cmd_certify(&args),
        Command::Verify { cert } => cmd_verify(&cert),
        Command::SweepEquivalence(args) => cmd_sweep(&args),
        Command::VerifyPeriods(args) => cmd_periods(&args),
        Command::Selfcheck => cmd_selfcheck(),
    }
}

fn cmd_validate(args: &ParamsArgs) -> anyhow::Result<u8> {
    match args.resolve() {
        Ok(params) => {
            let normalized = params.mu_normalized();
            println!("valid parameters");
            println!(
                "  a={} b={} c={} d={} mu={} (r={}, s={}, H²={})",
                params.a(),
                params.b(),
                params.c(),
                params.d(),
                params.mu(),
                params.r(),
                params.s(),
                params.modulus()
            );
            println!("  canonical mu representative: {}", normalized.mu());
            println!(
                "  H·N = Z: pairing against the fractional generator gives the unit {}",
                params.mu()
            );
            println!("{}", serde_json::to_string_pretty(&params)?);
            Ok(EXIT_OK)
        }
        Err(msg) => {
            eprintln!("invalid parameters: {msg}");
            Ok(EXIT_INVALID)
        }
    }
}

fn cmd_decide(args: &SearchArgs) -> anyhow::Result<u8> {
    let params = match args.params.resolve() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("invalid parameters: {msg}");
            return Ok(EXIT_INVALID);
        }
    };
    let bound = BigInt::from(default_bound(args.bound));
    let outcome = decide_and_certify_filtered(&params, &bound, args.series, args.sign)?;
    if let Some(path) = &args.out {
        let record = match &outcome {
            Some(cert) => serde_json::json!({
                "decided": true,
                "series": cert.series,
                "sign": cert.sign,
                "p": cert.p.to_string(),
                "q": cert.q.to_string(),
                "d2": cert.d2.to_string(),
                "bound": bound.to_string(),
            }),
            None => serde_json::json!({ "decided": false, "bound": bound.to_string() }),
        };
        let json = serde_json::to_string_pretty(&record)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    match outcome {
        Some(cert) => {
            println!(
                "decided: series {} with sign {}, solution (p, q) = ({}, {}), d2 = {}",
                cert.series, cert.sign, cert.p, cert.q, cert.d2
            );
            println!(
                "the moduli space for (r, H, s) = ({}, H, {}) is isomorphic to the surface",
                params.r(),
                params.s()
            );
            Ok(EXIT_OK)
        }
        None => {
            println!("inconclusive below bound {bound}: no series solution found");
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn cmd_certify(args: &CertifyArgs) -> anyhow::Result<u8> {
    let params = match args.search.params.resolve() {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("invalid parameters: {msg}");
            return Ok(EXIT_INVALID);
        }
    };
    let bound = BigInt::from(default_bound(args.search.bound));
    let cert = match decide_and_certify_filtered(&params, &bound, args.search.series, args.search.sign)? {
        Some(c) => c,
        None => {
            println!("inconclusive below bound {bound}: no series solution found");
            return Ok(EXIT_INCONCLUSIVE);
        }
    };
    println!(
        "certificate: series {} sign {} (p, q) = ({}, {}) d2 = {} D = {}",
        cert.series, cert.sign, cert.p, cert.q, cert.d2, cert.twist_divisor
    );
    for step in &cert.chain {
        println!("  {} -> {}", step.move_name, step.vector);
    }
    if cert.tyurin_assumption {
        println!("  note: terminal identification recorded as an assumption (negative square class)");
    }
    let json = serde_json::to_string_pretty(&cert)?;
    println!("{json}");
    if let Some(path) = &args.search.out {
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("certificate written to {}", path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_verify(path: &PathBuf) -> anyhow::Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("invalid input: not JSON: {e}");
            return Ok(EXIT_INVALID);
        }
    };
    let cert: IsomorphismCertificate = match serde_json::from_value(value) {
        Ok(c) => c,
        Err(e) => {
            println!("certificate rejected: {e}");
            return Ok(EXIT_REJECTED);
        }
    };
    let report = verify(&cert);
    println!("{report}");
    if report.is_valid() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_REJECTED)
    }
}

fn cmd_sweep(args: &SweepArgs) -> anyhow::Result<u8> {
    let range = SweepRange {
        max_a: args.max_a,
        max_b: args.max_b,
        max_c: args.max_c,
        max_d: args.max_d,
        bound: args.bound,
    };
    let report = equivalence_sweep(&range)?;
    if !args.quiet {
        for record in &report.records {
            println!("{}", record.line());
        }
    }
    println!(
        "sweep: {} parameter tuples, {} solutions, derived-reading counterexamples: {}, printed-modulus counterexamples: {}, lattice-reading counterexamples: {}",
        report.params_checked,
        report.solutions_checked,
        report.counterexamples.len(),
        report.printed_modulus_counterexamples.len(),
        report.lattice_counterexamples.len()
    );
    println!("verdict: {}", if report.verdict { "ok" } else { "counterexample found" });
    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&report)?;
        fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("summary written to {}", path.display());
    }
    Ok(if report.verdict { EXIT_OK } else { EXIT_REJECTED })
}

fn cmd_periods(args: &PeriodArgs) -> anyhow::Result<u8> {
    if args.sweep {
        let records = period_sweep(args.max_abc, args.max_d);
        let mut ok = true;
        for r in &records {
            let good = r.error.is_none()
                && r.quotient_is_u
                && r.isometry_found
                && r.composition_consistent;
            ok &= good;
            println!(
                "a={} b={} c={} d1={} d2={} quotient_is_u={} h_squared={} isometry_found={}{}",
                r.a,
                r.b,
                r.c,
                r.d1,
                r.d2,
                r.quotient_is_u,
                r.h_squared,
                r.isometry_found,
                r.error.as_deref().map(|e| format!(" error={e}")).unwrap_or_default()
            );
        }
        println!("{} tuples checked: {}", records.len(), if ok { "ok" } else { "FAILED" });
        if let Some(path) = &args.out {
            let json = serde_json::to_string_pretty(&records)?;
            fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        }
        return Ok(if ok { EXIT_OK } else { EXIT_REJECTED });
    }

    let (a, b, c) = (
        BigInt::from(args.a.expect("required by clap")),
        BigInt::from(args.b.expect("required by clap")),
        BigInt::from(args.c.expect("required by clap")),
    );
    let (d1, d2) = (BigInt::from(args.d1), BigInt::from(args.d2));
    let model = MukaiModel::new();
    let one = BigInt::from(1u8);
    let run = || -> Result<(String, bool), k3cert::PeriodError> {
        let v = embed_vector(&a, &b, &c, &one, &one)?;
        let v1 = embed_vector(&a, &b, &c, &d1, &d2)?;
        let pd = compute_period_data(&model, &v, &a, &b, &c)?;
        let pd1 = compute_period_data(&model, &v1, &a, &b, &c)?;
        let h_sq = pd1.h2_model.norm(&pd1.picard_gen)?;
        let iso = periods_isomorphic(&pd, &pd1)?;
        Ok((h_sq.to_string(), iso.is_some()))
    };
    match run() {
        Ok((h_sq, found)) => {
            println!(
                "quotients are hyperbolic planes; polarization generator squares to {h_sq} (expected {})",
                BigInt::from(2) * &a * &b
            );
            if found {
                println!("isometry matching both period data found");
                Ok(EXIT_OK)
            } else {
                println!("NO isometry found: period identification fails");
                Ok(EXIT_REJECTED)
            }
        }
        Err(k3cert::PeriodError::NonPositiveInput | k3cert::PeriodError::CoprimalityViolation) => {
            eprintln!("invalid input: parameters must be positive with gcd(d1, bc) = gcd(d2, ac) = gcd(d1, d2) = 1");
            Ok(EXIT_INVALID)
        }
        Err(e) => {
            println!("period computation failed: {e}");
            Ok(EXIT_REJECTED)
        }
    }
}

fn cmd_selfcheck() -> anyhow::Result<u8> {
    let outcomes = selfcheck::run_all();
    let mut all_ok = true;
    for o in &outcomes {
        all_ok &= o.passed;
        println!(
            "{} {} — {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.details
        );
    }
    println!(
        "selfcheck: {}/{} checks passed",
        outcomes.iter().filter(|o| o.passed).count(),
        outcomes.len()
    );
    Ok(if all_ok { EXIT_OK } else { EXIT_REJECTED })
}
