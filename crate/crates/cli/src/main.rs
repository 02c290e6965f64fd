//! `d2dsim`: analytic and Monte Carlo sweeps for overlay cellular/D2D
//! networks.
//!
//! Exit status is 0 on success, 1 when `validate` finds a failed check and 2
//! for usage, configuration and I/O errors.

mod grid;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use d2d_core::analytic::{
    association_probability, cellular_coverage, cellular_rate, d2d_coverage, d2d_rate, sum_throughput, AnalyticOptions,
    CoverageQuery,
};
use d2d_core::model::{db_to_linear, derive_densities, parse_scenario, Densities, Mode, Scenario};
use d2d_core::simulator::{estimate_association, estimate_coverage_curve, estimate_rate, Budget, SimOptions};
use d2d_core::validate::{run_validation, CheckGroup, Outcome, ValidationConfig};

use grid::Grid;
use output::{CurveRow, RateRow, ThroughputRow};

#[derive(Debug, Parser)]
#[command(name = "d2dsim", version, about = "Coverage, rate and throughput of cellular networks with HD/FD D2D links")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Scenario file (key = value lines). Defaults to the reference deployment.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte Carlo trials per point; 0 skips the simulation.
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Sweep grid as start:stop:step or a comma list.
    #[arg(long, global = true, value_name = "SPEC", allow_hyphen_values = true)]
    grid: Option<Grid>,
    /// Comma-separated modes out of cellular, hd, fd.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    mode: Option<Vec<Mode>>,
    /// Pairing neighbor order; overrides the scenario file.
    #[arg(long, global = true, value_name = "ORDER")]
    n: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Association probability, analytic and simulated.
    Assoc,
    /// Coverage probability against the SINR threshold in dB.
    Coverage,
    /// Average rate of each mode in nats.
    Rate,
    /// Sum throughput against the bias factor k.
    Throughput,
    /// Runs the oracle battery and writes validation.json.
    Validate {
        /// Run only these check groups.
        #[arg(long, value_delimiter = ',')]
        only: Vec<CheckGroup>,
        /// Tolerance applied to every Monte Carlo check.
        #[arg(long, value_name = "TOL")]
        mc_tolerance: Option<f64>,
    },
}

/// What a sweep runs over.
#[derive(Debug, Clone, PartialEq)]
struct SweepSpec {
    grid: Vec<f64>,
    modes: Vec<Mode>,
    trials: u64,
    seed: u64,
}

fn load_scenario(g: &Global) -> Result<Scenario<f64>> {
    let mut s = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            parse_scenario(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Scenario::table1(),
    };
    if let Some(n) = g.n {
        s.n = n;
        s.validate().context("--n")?;
    }
    Ok(s)
}

fn sweep(g: &Global, default_grid: &[f64], default_modes: &[Mode]) -> SweepSpec {
    SweepSpec {
        grid: g.grid.clone().map_or_else(|| default_grid.to_vec(), |x| x.0),
        modes: g.mode.clone().unwrap_or_else(|| default_modes.to_vec()),
        trials: g.trials,
        seed: g.seed,
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials != 0 && trials < 100 {
        bail!("--trials must be 0 or at least 100, got {trials}");
    }
    Ok(())
}

fn densities(s: &Scenario<f64>, opts: &AnalyticOptions<f64>) -> Result<Densities<f64>> {
    let p = association_probability(s, opts)?;
    Ok(derive_densities(s, p)?)
}

fn cmd_assoc(g: &Global) -> Result<ExitCode> {
    let s = load_scenario(g)?;
    check_trials(g.trials)?;
    let p = association_probability(&s, &AnalyticOptions::default())?;
    println!("analytic    {p:.6e}");
    if g.trials > 0 {
        let e = estimate_association(&s, g.trials, g.seed, &SimOptions::default())?;
        let se = (p * (1.0 - p) / e.trials as f64).sqrt();
        let z = if se > 0.0 { (e.mean - p) / se } else { 0.0 };
        println!("simulated   {:.6e}", e.mean);
        println!("stderr      {:.6e}", e.stderr);
        println!("z           {z:+.3}");
        println!("drops       {}", e.trials);
    }
    Ok(ExitCode::SUCCESS)
}

fn analytic_coverage(
    s: &Scenario<f64>,
    d: &Densities<f64>,
    beta: f64,
    mode: Mode,
    opts: &AnalyticOptions<f64>,
) -> Result<Option<f64>> {
    let q = CoverageQuery::new(beta, mode)?;
    Ok(match mode {
        Mode::Cellular if d.p_assoc == 0.0 => None,
        Mode::Cellular => Some(cellular_coverage(&q, s, d.p_assoc, opts)?),
        // without a finite-population model there is no analytic n > 1 curve
        _ if s.n > 1 && s.general.is_none() => None,
        Mode::Hd if d.lambda_hd_tx == 0.0 => None,
        Mode::Fd if d.lambda_fd == 0.0 => None,
        _ => Some(d2d_coverage(&q, s, d, opts)?),
    })
}

fn cmd_coverage(g: &Global) -> Result<ExitCode> {
    let s = load_scenario(g)?;
    let spec = sweep(g, &(0..16).map(|i| -10.0 + 2.0 * f64::from(i)).collect::<Vec<_>>(), &[Mode::Hd, Mode::Fd]);
    check_trials(spec.trials)?;
    output::ensure_dir(&g.out)?;
    let opts = AnalyticOptions::default();
    let d = densities(&s, &opts)?;
    let betas: Vec<f64> = spec.grid.iter().map(|&db| db_to_linear(db)).collect();
    let mut written = Vec::new();
    for &mode in &spec.modes {
        let mc = if spec.trials > 0 {
            Some(estimate_coverage_curve(&s, &betas, mode, Budget::Conditioned(spec.trials), spec.seed, &SimOptions::default())?)
        } else {
            None
        };
        let mut rows = Vec::with_capacity(betas.len());
        for (i, (&db, &beta)) in spec.grid.iter().zip(&betas).enumerate() {
            let e = mc.as_ref().map(|m| m[i]);
            rows.push(CurveRow {
                x: db,
                analytic: analytic_coverage(&s, &d, beta, mode, &opts)?,
                mc_mean: e.map(|e| e.mean),
                mc_stderr: e.map(|e| e.stderr),
                trials: e.map(|e| e.trials),
            });
        }
        let path = g.out.join(format!("coverage_{mode}.csv"));
        output::write_csv(&path, &rows)?;
        println!("{}", path.display());
        written.push((mode.to_string(), path));
    }
    let script = g.out.join("plot_coverage.py");
    output::write_text(&script, &output::coverage_plot_script(&written))?;
    println!("{}", script.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_rate(g: &Global) -> Result<ExitCode> {
    let s = load_scenario(g)?;
    let spec = sweep(g, &[], &Mode::ALL);
    check_trials(spec.trials)?;
    output::ensure_dir(&g.out)?;
    let opts = AnalyticOptions::default();
    let d = densities(&s, &opts)?;
    let mut rows = Vec::new();
    for &mode in &spec.modes {
        let analytic = match mode {
            Mode::Cellular if d.p_assoc > 0.0 => Some(cellular_rate(&s, d.p_assoc, &opts)?.rate_nats),
            Mode::Hd if d.lambda_hd_tx > 0.0 && (s.n == 1 || s.general.is_some()) => {
                Some(d2d_rate(mode, &s, &d, &opts)?.rate_nats)
            }
            Mode::Fd if d.lambda_fd > 0.0 && (s.n == 1 || s.general.is_some()) => {
                Some(d2d_rate(mode, &s, &d, &opts)?.rate_nats)
            }
            _ => None,
        };
        let e = if spec.trials > 0 {
            Some(estimate_rate(&s, mode, Budget::Conditioned(spec.trials), spec.seed, &SimOptions::default())?)
        } else {
            None
        };
        rows.push(RateRow {
            mode: mode.to_string(),
            analytic,
            mc_mean: e.map(|e| e.mean),
            mc_stderr: e.map(|e| e.stderr),
            trials: e.map(|e| e.trials),
        });
    }
    let path = g.out.join("rate.csv");
    output::write_csv(&path, &rows)?;
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_throughput(g: &Global) -> Result<ExitCode> {
    let s = load_scenario(g)?;
    let spec = sweep(g, &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0], &[]);
    output::ensure_dir(&g.out)?;
    let opts = AnalyticOptions::default();
    let mut rows = Vec::with_capacity(spec.grid.len());
    for &k in &spec.grid {
        let t = sum_throughput(&Scenario { k, ..s }, &opts).with_context(|| format!("k = {k}"))?;
        rows.push(ThroughputRow { x: k, cellular: t.cellular, d2d: t.d2d, total: t.total });
    }
    let path = g.out.join("throughput.csv");
    output::write_csv(&path, &rows)?;
    println!("{}", path.display());
    let script = g.out.join("plot_throughput.py");
    output::write_text(&script, &output::throughput_plot_script("throughput.csv"))?;
    println!("{}", script.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(g: &Global, only: &[CheckGroup], mc_tolerance: Option<f64>) -> Result<ExitCode> {
    let s = load_scenario(g)?;
    check_trials(g.trials)?;
    if g.trials == 0 {
        bail!("validate needs Monte Carlo trials");
    }
    if let Some(t) = mc_tolerance {
        if !(t >= 0.0) {
            bail!("--mc-tolerance must be nonnegative, got {t}");
        }
    }
    output::ensure_dir(&g.out)?;
    let cfg = ValidationConfig {
        seed: g.seed,
        trials: g.trials,
        association_drops: g.trials.saturating_mul(10),
        cellular_trials: (g.trials / 10).max(100),
        mc_tolerance,
        only: only.to_vec(),
        ..ValidationConfig::default()
    };
    let report = run_validation(&s, &cfg)?;
    for c in &report.checks {
        let tag = match c.outcome {
            Outcome::Pass => "pass",
            Outcome::Fail => "FAIL",
            Outcome::Discrepancy => "note",
            Outcome::Skipped => "skip",
        };
        println!("{tag:<4}  {:<18} {:<44} {:>11.4e} <= {:<9.2e} {}", c.group.as_str(), c.name, c.observed, c.tolerance, c.detail);
    }
    let path = g.out.join("validation.json");
    output::write_text(&path, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    println!("{}", path.display());
    if report.passed {
        Ok(ExitCode::SUCCESS)
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        eprintln!("validation failed: {}", names.join(", "));
        Ok(ExitCode::from(1))
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let g = &cli.global;
    match &cli.command {
        Command::Assoc => cmd_assoc(g),
        Command::Coverage => cmd_coverage(g),
        Command::Rate => cmd_rate(g),
        Command::Throughput => cmd_throughput(g),
        Command::Validate { only, mc_tolerance } => cmd_validate(g, only, *mc_tolerance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
