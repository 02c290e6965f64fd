use serde::Serialize;

use super::estimate::{estimate_coverage_curve, Budget};
use super::{SimError, SimOptions};
use crate::analytic::{association_probability, d2d_coverage, AnalyticOptions, CoverageQuery};
use crate::model::{derive_densities, Mode, Scenario};

/// Analytic against simulated D2D coverage at one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub mode: Mode,
    pub beta: f64,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub trials: u64,
    /// |analytic - mc_mean|
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub seed: u64,
    pub rows: Vec<GapRow>,
    pub max_gap: f64,
    pub resampled: u64,
    pub drops: u64,
}

/// Compares D2D coverage simulated with the true, dependent interferer
/// geometry against the analytic values, which treat D2D interferers as
/// independent PPPs. Modes with zero density are skipped.
pub fn validate_independence_assumption(
    s: &Scenario<f64>,
    betas: &[f64],
    budget: Budget,
    seed: u64,
    opts: &SimOptions,
    analytic: &AnalyticOptions<f64>,
) -> Result<AssumptionReport, SimError> {
    let p = association_probability(s, analytic)?;
    let d = derive_densities(s, p)?;
    let mut report = AssumptionReport { seed, rows: Vec::new(), max_gap: 0.0, resampled: 0, drops: 0 };
    for mode in [Mode::Hd, Mode::Fd] {
        let density = if mode == Mode::Hd { d.lambda_hd_tx } else { d.lambda_fd };
        if density == 0.0 {
            continue;
        }
        let mc = estimate_coverage_curve(s, betas, mode, budget, seed, opts)?;
        report.resampled += mc.first().map_or(0, |e| e.resampled);
        report.drops += mc.first().map_or(0, |e| e.drops);
        for (&beta, est) in betas.iter().zip(&mc) {
            let a = d2d_coverage(&CoverageQuery::new(beta, mode)?, s, &d, analytic)?;
            let gap = (a - est.mean).abs();
            report.max_gap = report.max_gap.max(gap);
            report.rows.push(GapRow {
                mode,
                beta,
                analytic: a,
                mc_mean: est.mean,
                mc_stderr: est.stderr,
                trials: est.trials,
                gap,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_network_has_tiny_gaps_and_is_reproducible() {
        // with almost no UEs the only limit is noise, which both sides model exactly
        let s = Scenario { lambda_u: 1e-5, ..Scenario::table1() };
        let opts = SimOptions { block_size: 64, ..SimOptions::default() };
        let betas = [0.1, 1.0, 10.0];
        let a = validate_independence_assumption(&s, &betas, Budget::Conditioned(400), 8, &opts, &AnalyticOptions::default())
            .unwrap();
        let b = validate_independence_assumption(&s, &betas, Budget::Conditioned(400), 8, &opts, &AnalyticOptions::default())
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 6);
        for row in &a.rows {
            let se = (row.analytic * (1.0 - row.analytic) / row.trials as f64).sqrt();
            assert!(row.gap <= 4.0 * se + 0.005, "{row:?}");
        }
    }
}
