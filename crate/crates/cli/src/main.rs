//! Command-line front end: verification, exact-number search, extraction,
//! bounds, and the size-membership refuter, with stable text and JSON output.
//!
//! Exit codes: 0 success / true, 1 false / negative result, 2 usage error,
//! 3 budget or feasibility limit, 4 I/O or format error.

use clap::{Parser, Subcommand, ValueEnum};
use folkman::coloring::{verify_witness, GroundColoring, SumsetWitness};
use folkman::extract::{
    check_certificate, extract_witness, Certificate, ExtractCaps, ExtractFailure, Strategy,
};
use folkman::numbers::{
    compute_number_jobs, extremal_certificate_jobs, is_witness_free, upper_bound, SearchError,
    SearchProblem,
};
use folkman::ramsey::{exact_small_ramsey_upper, refute_levels};
use folkman::report::{
    BoundReport, BoundStep, CheckReport, ExtremalReport, FailureReport, FreeReport, NumberReport,
    RefuteReport, VerifyReport,
};
use folkman::set::FiniteSet;
use num_bigint::BigUint;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_FALSE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "folkman",
    version,
    about = "Exact search and verification for monochromatic subset-sum colorings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Direct,
    ProofTrace,
}

#[derive(Subcommand)]
enum Command {
    /// Check a witness file against a coloring file (exit 0 true, 1 false).
    Verify {
        coloring: PathBuf,
        witness: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether a coloring admits no witness of the given length.
    Free {
        coloring: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        distinct: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compute the exact minimal forcing length J(t, n).
    Number {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        distinct: bool,
        #[arg(long, default_value_t = 64)]
        cap: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the recursive upper bound for J(t, n) with exact small
    /// Ramsey values; reports infeasibility when a cell is unknown.
    Bound {
        #[arg(long)]
        t: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 64)]
        cap: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Extract a verified witness and emit its certificate as JSON.
    Extract {
        coloring: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "direct")]
        strategy: StrategyArg,
        /// Total-sum cap for the direct strategy, inner-number cap otherwise.
        #[arg(long)]
        cap: Option<u64>,
        /// Candidate cap for the layered-set search.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated override of the constrained layer sizes.
        #[arg(long)]
        layers: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Re-check a certificate file against a coloring file.
    CheckCert {
        coloring: PathBuf,
        certificate: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Levels at which the size-membership coloring refutes a set.
    Refute {
        /// Comma-separated elements, e.g. 1,2,3.
        #[arg(long)]
        set: String,
        #[arg(long)]
        json: bool,
    },
    /// Search for a witness-free coloring of {1..=cap}.
    Extremal {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        distinct: bool,
        /// Interval length to color.
        #[arg(long)]
        cap: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            coloring,
            witness,
            json,
        } => cmd_verify(&coloring, &witness, json),
        Command::Free {
            coloring,
            n,
            distinct,
            json,
        } => cmd_free(&coloring, n, distinct, json),
        Command::Number {
            t,
            n,
            distinct,
            cap,
            budget,
            jobs,
            json,
        } => cmd_number(t, n, distinct, cap, budget, jobs, json),
        Command::Bound {
            t,
            n,
            cap,
            budget,
            json,
        } => cmd_bound(t, n, cap, budget, json),
        Command::Extract {
            coloring,
            n,
            strategy,
            cap,
            budget,
            seed,
            layers,
            json,
        } => cmd_extract(&coloring, n, strategy, cap, budget, seed, layers.as_deref(), json),
        Command::CheckCert {
            coloring,
            certificate,
            json,
        } => cmd_check_cert(&coloring, &certificate, json),
        Command::Refute { set, json } => cmd_refute(&set, json),
        Command::Extremal {
            t,
            n,
            distinct,
            cap,
            budget,
            jobs,
            json,
        } => cmd_extremal(t, n, distinct, cap, budget, jobs, json),
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(code)
}

fn read_file(path: &Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_IO, format_args!("{}: {e}", path.display())))
}

fn load_coloring(path: &Path) -> Result<GroundColoring, ExitCode> {
    let text = read_file(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| format!("{e}"))
    } else {
        GroundColoring::from_text(&text).map_err(|e| format!("{e}"))
    };
    parsed.map_err(|e| fail(EXIT_IO, format_args!("{}: {e}", path.display())))
}

fn load_witness(path: &Path) -> Result<SumsetWitness, ExitCode> {
    let text = read_file(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| format!("{e}"))
    } else {
        SumsetWitness::from_text(&text).map_err(|e| format!("{e}"))
    };
    parsed.map_err(|e| fail(EXIT_IO, format_args!("{}: {e}", path.display())))
}

fn cmd_verify(coloring: &Path, witness: &Path, json: bool) -> ExitCode {
    let gc = match load_coloring(coloring) {
        Ok(gc) => gc,
        Err(code) => return code,
    };
    let w = match load_witness(witness) {
        Ok(w) => w,
        Err(code) => return code,
    };
    let verified = verify_witness(&gc, &w);
    if json {
        println!(
            "{}",
            serde_json::to_string(&VerifyReport { verified }).unwrap()
        );
    } else {
        println!("{verified}");
    }
    if verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

fn cmd_free(coloring: &Path, n: usize, distinct: bool, json: bool) -> ExitCode {
    if n == 0 {
        return fail(EXIT_USAGE, "--n must be at least 1");
    }
    let gc = match load_coloring(coloring) {
        Ok(gc) => gc,
        Err(code) => return code,
    };
    let witness_free = is_witness_free(&gc, n, distinct);
    if json {
        println!(
            "{}",
            serde_json::to_string(&FreeReport { witness_free }).unwrap()
        );
    } else {
        println!("{witness_free}");
    }
    if witness_free {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

fn search_error_exit(err: SearchError) -> ExitCode {
    match err {
        SearchError::BudgetExhausted { .. } => fail(EXIT_BUDGET, err),
        _ => fail(EXIT_USAGE, err),
    }
}

fn cmd_number(
    t: u32,
    n: usize,
    distinct: bool,
    cap: u64,
    budget: u64,
    jobs: usize,
    json: bool,
) -> ExitCode {
    let problem = SearchProblem {
        t,
        n,
        distinct,
        cap,
        budget,
    };
    let start = Instant::now();
    let outcome = match compute_number_jobs(&problem, jobs.max(1)) {
        Ok(outcome) => outcome,
        Err(err) => return search_error_exit(err),
    };
    let seconds = start.elapsed().as_secs_f64();
    let report = NumberReport {
        t,
        n,
        distinct,
        cap,
        value: outcome.value,
        nodes: outcome.nodes,
        seconds,
    };
    if json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        let label = if distinct {
            format!("J'({t},{n})")
        } else {
            format!("J({t},{n})")
        };
        match outcome.value {
            Some(v) => println!("{label} = {v}"),
            None => println!("{label} > {cap}"),
        }
        println!(
            "t={t} n={n} distinct={distinct} value={} nodes={} seconds={:.3}",
            outcome
                .value
                .map_or_else(|| format!(">{cap}"), |v| v.to_string()),
            outcome.nodes,
            seconds
        );
    }
    ExitCode::SUCCESS
}

fn cmd_bound(t: u64, n: u64, cap: u64, budget: u64, json: bool) -> ExitCode {
    if n < 2 {
        return fail(EXIT_USAGE, "--n must be at least 2");
    }
    let base = |t: u64| -> Option<BigUint> {
        let problem = SearchProblem {
            t: u32::try_from(t).ok()?,
            n: 2,
            distinct: false,
            cap,
            budget,
        };
        compute_number_jobs(&problem, 1)
            .ok()
            .and_then(|o| o.value)
            .map(BigUint::from)
    };
    let ramsey = |k: &BigUint, r: u64, t: u64| exact_small_ramsey_upper(k, r, t);
    let mut steps = Vec::new();
    for m in 2..=n {
        match upper_bound(t, m, &base, &ramsey) {
            Ok(value) => steps.push(BoundStep {
                n: m,
                value: value.to_string(),
            }),
            Err(err) => return fail(EXIT_BUDGET, err),
        }
    }
    let value = steps.last().unwrap().value.clone();
    let report = BoundReport { t, n, steps, value };
    if json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        for step in &report.steps {
            println!("J_bar({t},{}) = {}", step.n, step.value);
        }
    }
    ExitCode::SUCCESS
}

fn parse_layers(list: &str) -> Result<Vec<u64>, ExitCode> {
    list.split(',')
        .map(|tok| tok.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| fail(EXIT_USAGE, format_args!("bad layer list: {list}")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_extract(
    coloring: &Path,
    n: usize,
    strategy: StrategyArg,
    cap: Option<u64>,
    budget: u64,
    seed: u64,
    layers: Option<&str>,
    json: bool,
) -> ExitCode {
    if n == 0 || n > folkman::extract::MAX_WITNESS_LEN {
        return fail(
            EXIT_USAGE,
            format_args!("--n must be in 1..={}", folkman::extract::MAX_WITNESS_LEN),
        );
    }
    let gc = match load_coloring(coloring) {
        Ok(gc) => gc,
        Err(code) => return code,
    };
    let layer_override = match layers {
        Some(list) => match parse_layers(list) {
            Ok(ls) => Some(ls),
            Err(code) => return code,
        },
        None => None,
    };
    let caps = ExtractCaps {
        direct_total: cap,
        k_candidates: budget,
        inner_cap: cap.unwrap_or(64),
        inner_budget: 100_000_000,
        seed,
        layer_override,
    };
    let strategy = match strategy {
        StrategyArg::Direct => Strategy::Direct,
        StrategyArg::ProofTrace => Strategy::ProofTrace,
    };
    match extract_witness(&gc, n, strategy, &caps) {
        Ok(cert) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&cert).unwrap());
            } else {
                let entries: Vec<String> = cert
                    .witness
                    .entries()
                    .iter()
                    .map(|e| e.to_string())
                    .collect();
                println!(
                    "witness: ({}) class {}",
                    entries.join(", "),
                    cert.witness.class()
                );
                println!("{}", serde_json::to_string_pretty(&cert).unwrap());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            let stage = match &err {
                ExtractFailure::NoWitnessWithinCaps { .. } => "direct-search",
                ExtractFailure::LayeredKNotFound { .. } => "layered-set-search",
                ExtractFailure::InnerBoundExceedsCap { .. } | ExtractFailure::InnerBound(_) => {
                    "inner-bound"
                }
                ExtractFailure::InnerWitnessNotFound => "inner-witness",
                ExtractFailure::LayerScan(_) => "layer-scan",
                ExtractFailure::Blocks(_) => "block-layout",
            };
            let report = FailureReport {
                stage: stage.to_string(),
                message: err.to_string(),
            };
            if json {
                println!("{}", serde_json::to_string(&report).unwrap());
            } else {
                eprintln!("extraction failed at {stage}: {}", report.message);
            }
            let code = match err {
                ExtractFailure::NoWitnessWithinCaps { .. }
                | ExtractFailure::LayeredKNotFound { exhausted: true } => EXIT_FALSE,
                ExtractFailure::LayerScan(folkman::extract::ExtractError::BadLayer(_)) => {
                    EXIT_USAGE
                }
                _ => EXIT_BUDGET,
            };
            ExitCode::from(code)
        }
    }
}

fn cmd_check_cert(coloring: &Path, certificate: &Path, json: bool) -> ExitCode {
    let gc = match load_coloring(coloring) {
        Ok(gc) => gc,
        Err(code) => return code,
    };
    let text = match read_file(certificate) {
        Ok(text) => text,
        Err(code) => return code,
    };
    let cert: Certificate = match serde_json::from_str(&text) {
        Ok(cert) => cert,
        Err(e) => return fail(EXIT_IO, format_args!("{}: {e}", certificate.display())),
    };
    let result = check_certificate(&gc, &cert);
    let report = CheckReport {
        valid: result.is_ok(),
        violation: result.as_ref().err().map(|v| v.to_string()),
    };
    if json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        match &report.violation {
            None => println!("certificate ok"),
            Some(v) => println!("certificate invalid: {v}"),
        }
    }
    if report.valid {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}

fn cmd_refute(set: &str, json: bool) -> ExitCode {
    let elems = match set
        .split(',')
        .map(|tok| tok.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
    {
        Ok(elems) if !elems.is_empty() => elems,
        _ => return fail(EXIT_USAGE, format_args!("bad set: {set}")),
    };
    let k_set = match FiniteSet::from_unsorted(elems) {
        Ok(s) if !s.is_empty() => s,
        _ => return fail(EXIT_USAGE, format_args!("bad set: {set}")),
    };
    let levels = refute_levels(&k_set);
    if json {
        let report = RefuteReport {
            set: k_set.elems().to_vec(),
            levels: levels.clone(),
        };
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        let rendered: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
        println!("levels: {}", rendered.join(" "));
    }
    ExitCode::SUCCESS
}

fn cmd_extremal(
    t: u32,
    n: usize,
    distinct: bool,
    cap: u64,
    budget: u64,
    jobs: usize,
    json: bool,
) -> ExitCode {
    let result = match extremal_certificate_jobs(t, n, distinct, cap, budget, jobs.max(1)) {
        Ok(result) => result,
        Err(err) => return search_error_exit(err),
    };
    let report = ExtremalReport {
        t,
        n,
        distinct,
        n_max: cap,
        found: result.is_some(),
        coloring: result,
    };
    if json {
        println!("{}", serde_json::to_string(&report).unwrap());
    } else {
        match &report.coloring {
            Some(coloring) => print!("{}", coloring.to_text()),
            None => println!("none"),
        }
    }
    if report.found {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FALSE)
    }
}
