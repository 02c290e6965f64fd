use rayon::prelude::*;
use serde::Serialize;

use super::drop::{bs_stage, cellular_outcome, d2d_link, d2d_outcome, sample_ues, Windows};
use super::rng::trial_rng;
use super::{SimError, SimOptions};
use crate::model::{Mode, Scenario};

/// A Monte Carlo mean with its standard error. `trials` counts the drops
/// that entered the mean; `drops` counts all drops made.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub drops: u64,
    pub resampled: u64,
}

/// How many drops to make.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Budget {
    /// Exactly this many drops; those of other modes are discarded.
    Drops(u64),
    /// Drops in trial order until this many are of the requested mode.
    Conditioned(u64),
}

impl Budget {
    fn nominal(self) -> u64 {
        match self {
            Budget::Drops(n) | Budget::Conditioned(n) => n,
        }
    }
}

/// SINRs of the drops that ended in one mode, in trial order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinrSample {
    pub mode: Mode,
    pub sinr: Vec<f64>,
    pub drops: u64,
    pub resampled: u64,
    pub seed: u64,
}

const MIN_TRIALS: u64 = 100;

struct Block {
    sinr: Vec<f64>,
    resampled: Vec<u32>,
}

fn run_block(s: &Scenario<f64>, mode: Mode, w: &Windows, seed: u64, start: u64, end: u64) -> Result<Block, SimError> {
    let mut block = Block { sinr: Vec::new(), resampled: Vec::new() };
    for trial in start..end {
        let mut rng = trial_rng(seed, trial);
        let stage = bs_stage(s, w, &mut rng)?;
        if stage.mode != mode {
            continue;
        }
        let out = match mode {
            Mode::Cellular => cellular_outcome(s, &stage, &mut rng),
            _ => d2d_outcome(s, mode, &stage.field, w, &mut rng)?,
        };
        block.sinr.push(out.sinr);
        block.resampled.push(out.resampled);
    }
    Ok(block)
}

/// Runs drops and keeps the SINR of those whose typical UE is in `mode`.
/// Drops of other modes stop after the association stage.
pub fn collect_sinr(
    s: &Scenario<f64>,
    mode: Mode,
    budget: Budget,
    seed: u64,
    opts: &SimOptions,
) -> Result<SinrSample, SimError> {
    s.validate()?;
    if budget.nominal() < MIN_TRIALS {
        return Err(SimError::TooFewTrials { min: MIN_TRIALS, got: budget.nominal() });
    }
    let w = Windows::for_scenario(s, opts);
    let bs = opts.block_size.max(1);
    let blocks_between = |from: u64, to: u64| -> Result<Vec<Block>, SimError> {
        let first = from / bs;
        let last = to.div_ceil(bs);
        (first..last)
            .into_par_iter()
            .map(|b| run_block(s, mode, &w, seed, (b * bs).max(from), ((b + 1) * bs).min(to)))
            .collect()
    };
    let mut sample = SinrSample { mode, sinr: Vec::new(), drops: 0, resampled: 0, seed };
    let mut resampled = Vec::new();
    match budget {
        Budget::Drops(n) => {
            for b in blocks_between(0, n)? {
                sample.sinr.extend(b.sinr);
                resampled.extend(b.resampled);
            }
            sample.drops = n;
        }
        Budget::Conditioned(n) => {
            let batch = bs * 4 * rayon::current_num_threads() as u64;
            let mut done = 0;
            'outer: while (sample.sinr.len() as u64) < n {
                if done >= opts.max_drops {
                    return Err(SimError::BudgetExhausted {
                        mode,
                        max: opts.max_drops,
                        got: sample.sinr.len() as u64,
                        wanted: n,
                    });
                }
                let to = (done + batch).min(opts.max_drops);
                // blocks are aligned, so trial indices can be recovered per block
                let first_block = done / bs;
                for (offset, b) in blocks_between(done, to)?.into_iter().enumerate() {
                    let start = (first_block + offset as u64) * bs;
                    if (sample.sinr.len() + b.sinr.len()) as u64 >= n {
                        // replay the block to find the exact trial of the n-th hit
                        let need = n as usize - sample.sinr.len();
                        let mut hits = 0usize;
                        let mut trial = start;
                        while hits < need {
                            let one = run_block(s, mode, &w, seed, trial, trial + 1)?;
                            hits += one.sinr.len();
                            trial += 1;
                        }
                        sample.sinr.extend_from_slice(&b.sinr[..need]);
                        resampled.extend_from_slice(&b.resampled[..need]);
                        sample.drops = trial;
                        break 'outer;
                    }
                    sample.sinr.extend(b.sinr);
                    resampled.extend(b.resampled);
                }
                done = to;
                sample.drops = done;
            }
        }
    }
    sample.resampled = resampled.iter().map(|&r| u64::from(r)).sum();
    Ok(sample)
}

fn mean_and_stderr(values: impl Iterator<Item = f64>) -> (f64, f64, u64) {
    // Welford, sequential in trial order
    let (mut n, mut mean, mut m2) = (0u64, 0.0, 0.0);
    for x in values {
        n += 1;
        let d = x - mean;
        mean += d / n as f64;
        m2 += d * (x - mean);
    }
    let stderr = if n > 1 { (m2 / (n - 1) as f64).sqrt() / (n as f64).sqrt() } else { 0.0 };
    (mean, stderr, n)
}

fn estimate_from(sample: &SinrSample, stat: impl Fn(f64) -> f64) -> Result<Estimate, SimError> {
    if sample.sinr.is_empty() {
        return Err(SimError::NoDropsOfMode { mode: sample.mode });
    }
    let (mean, stderr, trials) = mean_and_stderr(sample.sinr.iter().map(|&x| stat(x)));
    Ok(Estimate { mean, stderr, trials, seed: sample.seed, drops: sample.drops, resampled: sample.resampled })
}

/// Fraction of `mode` drops with SINR ≥ β.
pub fn estimate_coverage(
    s: &Scenario<f64>,
    beta: f64,
    mode: Mode,
    budget: Budget,
    seed: u64,
    opts: &SimOptions,
) -> Result<Estimate, SimError> {
    Ok(estimate_coverage_curve(s, &[beta], mode, budget, seed, opts)?.remove(0))
}

/// Coverage at every threshold of `betas`, all from one set of drops.
pub fn estimate_coverage_curve(
    s: &Scenario<f64>,
    betas: &[f64],
    mode: Mode,
    budget: Budget,
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<Estimate>, SimError> {
    for &b in betas {
        if !(b >= 0.0) {
            return Err(SimError::InvalidArgument { what: "beta", value: b });
        }
    }
    let sample = collect_sinr(s, mode, budget, seed, opts)?;
    betas.iter().map(|&b| estimate_from(&sample, |x| if x >= b { 1.0 } else { 0.0 })).collect()
}

/// Mean of ln(1 + SINR) over `mode` drops.
pub fn estimate_rate(s: &Scenario<f64>, mode: Mode, budget: Budget, seed: u64, opts: &SimOptions) -> Result<Estimate, SimError> {
    let sample = collect_sinr(s, mode, budget, seed, opts)?;
    estimate_from(&sample, f64::ln_1p)
}

/// Fraction of drops whose typical UE associates with a BS.
pub fn estimate_association(s: &Scenario<f64>, drops: u64, seed: u64, opts: &SimOptions) -> Result<Estimate, SimError> {
    s.validate()?;
    if drops < MIN_TRIALS {
        return Err(SimError::TooFewTrials { min: MIN_TRIALS, got: drops });
    }
    let w = Windows::for_scenario(s, opts);
    let bs = opts.block_size.max(1);
    let counts: Vec<u64> = (0..drops.div_ceil(bs))
        .into_par_iter()
        .map(|b| -> Result<u64, SimError> {
            let mut hits = 0;
            for trial in b * bs..((b + 1) * bs).min(drops) {
                if bs_stage(s, &w, &mut trial_rng(seed, trial))?.mode == Mode::Cellular {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<_, _>>()?;
    let hits: u64 = counts.iter().sum();
    let p = hits as f64 / drops as f64;
    let n = drops as f64;
    let stderr = (p * (1.0 - p) * n / (n - 1.0)).sqrt() / n.sqrt();
    Ok(Estimate { mean: p, stderr, trials: drops, seed, drops, resampled: 0 })
}

/// Paired check of the UE window: each drop is laid out on a window of
/// twice the usual radius, and coverage is evaluated once with every
/// interferer and once with only those inside the usual radius. Returns the
/// coverage difference at each β.
pub fn window_truncation_gaps(
    s: &Scenario<f64>,
    betas: &[f64],
    mode: Mode,
    drops: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<f64>, SimError> {
    if !mode.is_d2d() {
        return Err(SimError::NoDropsOfMode { mode });
    }
    let w = Windows::for_scenario(s, opts);
    let mut wide_hits = vec![0u64; betas.len()];
    let mut cut_hits = vec![0u64; betas.len()];
    let mut used = 0u64;
    for trial in 0..drops {
        let mut rng = trial_rng(seed, trial);
        let stage = bs_stage(s, &w, &mut rng)?;
        let ues = sample_ues(s, &stage.field, 2.0 * w.ue, &mut rng)?;
        let mut rng_cut = rng.clone();
        let (Some(wide), Some(cut)) =
            (d2d_link(s, mode, &ues, f64::INFINITY, &mut rng), d2d_link(s, mode, &ues, w.ue, &mut rng_cut))
        else {
            continue;
        };
        used += 1;
        for (i, &b) in betas.iter().enumerate() {
            wide_hits[i] += u64::from(wide.sinr >= b);
            cut_hits[i] += u64::from(cut.sinr >= b);
        }
    }
    if used == 0 {
        return Err(SimError::NoDropsOfMode { mode });
    }
    Ok(cut_hits.iter().zip(&wide_hits).map(|(&c, &w)| (c as f64 - w as f64) / used as f64).collect())
}
