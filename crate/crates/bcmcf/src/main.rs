//! Command-line front end: solve instances, generate random ones,
//! verify solver output against the enumeration oracle or a saved
//! certificate, and benchmark.
//!
//! Machine output (JSON, CSV) goes to stdout; human-readable text goes
//! to stderr. Exit codes: 0 success, 1 failed verification, 2 invalid
//! input, 3 internal invariant failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use bcmcf::instance::{generate, parse_instance, GenParams};
use bcmcf::numerics::format_rat;
use bcmcf::oracle::fuzz_equivalence;
use bcmcf::pivot::PivotRule;
use bcmcf::solver::{certify, report_from_json, report_to_json, solve, SolveOptions};
use bcmcf::Error;

#[derive(Parser)]
#[command(
    name = "bcmcf",
    about = "Exact budget-constrained minimum cost flow solver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance file and print the report as JSON.
    Solve {
        input: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Entering-edge rule: dantzig or first.
        #[arg(long, default_value = "dantzig")]
        pivot: String,
        /// Print a one-line-per-pivot trace to stderr.
        #[arg(long)]
        trace: bool,
        /// Re-verify the certificate after solving.
        #[arg(long)]
        check: bool,
    },
    /// Generate a random instance (deterministic in the seed).
    Gen {
        #[arg(long)]
        nodes: usize,
        /// Edges per node.
        #[arg(long, default_value_t = 8)]
        density: usize,
        #[arg(long = "max-cost", default_value_t = 100)]
        max_cost: i64,
        #[arg(long = "max-cap", default_value_t = 100)]
        max_cap: u64,
        #[arg(long = "max-fee", default_value_t = 100)]
        max_fee: u64,
        /// Budget as a fraction of the unconstrained fee, e.g. 1/2 or 0.5.
        #[arg(long = "budget-frac", default_value = "1/2")]
        budget_frac: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fuzz against the enumeration oracle or re-certify a saved report.
    Verify {
        /// Number of random tiny instances to cross-check.
        #[arg(long)]
        fuzz: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Saved report JSON to re-certify (requires --instance).
        #[arg(long)]
        certify: Option<PathBuf>,
        /// Instance file the certificate belongs to.
        #[arg(long)]
        instance: Option<PathBuf>,
    },
    /// Solve generated instances and print timing/pivot statistics as CSV.
    Bench {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 8)]
        density: usize,
        /// Instances per configuration.
        #[arg(long, default_value_t = 10)]
        reps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn error_exit(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Corruption(_) | Error::Overflow(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn parse_pivot(s: &str) -> Result<PivotRule, Error> {
    match s {
        "dantzig" => Ok(PivotRule::Dantzig),
        "first" | "first-violating" => Ok(PivotRule::FirstViolating),
        other => Err(Error::Invalid(format!("unknown pivot rule {other:?}"))),
    }
}

/// Parses a budget fraction given as "num/den", a decimal like "0.5",
/// or an integer.
fn parse_fraction(s: &str) -> Result<(u64, u64), Error> {
    let bad = || Error::Invalid(format!("bad budget fraction {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        return Ok((n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let whole: u64 = if whole.is_empty() {
            0
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let num = whole
            .checked_mul(den)
            .and_then(|w| w.checked_add(frac.parse::<u64>().map_err(|_| bad()).ok()?))
            .ok_or_else(bad)?;
        return Ok((num, den));
    }
    let n: u64 = s.trim().parse().map_err(|_| bad())?;
    Ok((n, 1))
}

fn run_solve(
    input: PathBuf,
    out: Option<PathBuf>,
    pivot: String,
    trace: bool,
    check: bool,
) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&input)?;
    let inst = parse_instance(&text)?;
    let options = SolveOptions {
        rule: parse_pivot(&pivot)?,
        trace,
        paranoid: false,
    };
    let report = solve(&inst, &options)?;
    for line in &report.trace {
        eprintln!("{line}");
    }
    let json = report_to_json(&report).to_string();
    match out {
        Some(path) => std::fs::write(path, json + "\n")?,
        None => println!("{json}"),
    }
    if check {
        if certify(&report, &inst) {
            eprintln!("certificate verified");
        } else {
            eprintln!("certificate FAILED verification");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    nodes: usize,
    density: usize,
    max_cost: i64,
    max_cap: u64,
    max_fee: u64,
    budget_frac: String,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let (num, den) = parse_fraction(&budget_frac)?;
    let params = GenParams {
        nodes,
        density,
        cost_max: max_cost,
        cap_max: max_cap,
        fee_max: max_fee,
        budget_frac_num: num,
        budget_frac_den: den,
        seed,
    };
    let inst = generate(&params)?;
    let text = inst.serialize();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "generated n={} m={} budget={} (seed {seed})",
        inst.node_count,
        inst.edge_count(),
        inst.budget
    );
    Ok(ExitCode::SUCCESS)
}

fn run_verify(
    fuzz: Option<u64>,
    seed: u64,
    certify_path: Option<PathBuf>,
    instance: Option<PathBuf>,
) -> Result<ExitCode, Error> {
    let mut failed = false;
    if let Some(count) = fuzz {
        let options = SolveOptions {
            paranoid: true,
            ..Default::default()
        };
        let report = fuzz_equivalence(count, seed, &options)?;
        eprintln!(
            "fuzz: {} cases ({} via budget gate), {} mismatches",
            report.cases,
            report.gate_cases,
            report.mismatches.len()
        );
        for m in &report.mismatches {
            eprintln!("case {}: {}", m.seed, m.reason);
            eprint!("{}", m.instance_text);
        }
        failed |= !report.is_ok();
    }
    if let Some(path) = certify_path {
        let instance = instance
            .ok_or_else(|| Error::Invalid("--certify requires --instance <file>".into()))?;
        let report = report_from_json(&std::fs::read_to_string(path)?)?;
        let inst = parse_instance(&std::fs::read_to_string(instance)?)?;
        if certify(&report, &inst) {
            eprintln!("certificate verified");
        } else {
            eprintln!("certificate FAILED verification");
            failed = true;
        }
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_bench(nodes: usize, density: usize, reps: u64, seed: u64) -> Result<ExitCode, Error> {
    if reps == 0 {
        return Err(Error::Invalid("--reps must be positive".into()));
    }
    println!(
        "n,d,m,seed,wall_ms,pivots_total,pivots_degenerate,pivots_nondegenerate,\
         degenerate_share,objective"
    );
    let mut sum_ms = 0f64;
    let mut sum_total = 0u64;
    let mut sum_degenerate = 0u64;
    for rep in 0..reps {
        let params = GenParams {
            nodes,
            density,
            cost_max: 100,
            cap_max: 100,
            fee_max: 100,
            budget_frac_num: 1,
            budget_frac_den: 2,
            seed: seed + rep,
        };
        let inst = generate(&params)?;
        let start = Instant::now();
        let report = solve(&inst, &SolveOptions::default())?;
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        let share = if report.pivots.total == 0 {
            0.0
        } else {
            report.pivots.degenerate as f64 / report.pivots.total as f64
        };
        println!(
            "{nodes},{density},{},{},{ms:.3},{},{},{},{share:.4},{}",
            inst.edge_count(),
            seed + rep,
            report.pivots.total,
            report.pivots.degenerate,
            report.pivots.nondegenerate,
            format_rat(&report.objective)
        );
        sum_ms += ms;
        sum_total += report.pivots.total;
        sum_degenerate += report.pivots.degenerate;
    }
    let mean_share = if sum_total == 0 {
        0.0
    } else {
        sum_degenerate as f64 / sum_total as f64
    };
    println!(
        "mean,{density},{},{seed},{:.3},{:.1},{:.1},{:.1},{mean_share:.4},",
        nodes * density,
        sum_ms / reps as f64,
        sum_total as f64 / reps as f64,
        sum_degenerate as f64 / reps as f64,
        (sum_total - sum_degenerate) as f64 / reps as f64,
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Solve {
            input,
            out,
            pivot,
            trace,
            check,
        } => run_solve(input, out, pivot, trace, check),
        Cmd::Gen {
            nodes,
            density,
            max_cost,
            max_cap,
            max_fee,
            budget_frac,
            seed,
            out,
        } => run_gen(
            nodes,
            density,
            max_cost,
            max_cap,
            max_fee,
            budget_frac,
            seed,
            out,
        ),
        Cmd::Verify {
            fuzz,
            seed,
            certify,
            instance,
        } => run_verify(fuzz, seed, certify, instance),
        Cmd::Bench {
            nodes,
            density,
            reps,
            seed,
        } => run_bench(nodes, density, reps, seed),
    };
    match result {
        Ok(code) => code,
        Err(e) => error_exit(&e),
    }
}
