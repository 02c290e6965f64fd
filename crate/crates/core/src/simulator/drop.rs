use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use super::ppp::{poisson_count, sample_ppp, uniform_in_disc, PointField};
use super::{SimError, SimOptions};
use crate::model::{Mode, Scenario};
use crate::special::ln_gamma;

/// Role of a UE in the D2D layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UeRole {
    Cellular,
    HdTransmitter,
    HdReceiver,
    Fd,
}

/// A UE of the surrounding population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ue {
    pub position: [f64; 2],
    pub role: UeRole,
}

/// Everything measured at the typical UE in one drop. The SINR is
/// `signal / (interference_bs + interference_hd + interference_fd + self_interference + noise)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DropOutcome {
    pub mode: Mode,
    /// Serving-BS distance for cellular UEs, pairing distance r_d for D2D.
    pub pairing_distance: f64,
    pub signal: f64,
    pub interference_bs: f64,
    pub interference_hd: f64,
    pub interference_fd: f64,
    pub self_interference: f64,
    pub noise: f64,
    pub sinr: f64,
    /// UE fields redrawn because too few partners were found.
    pub resampled: u32,
}

impl DropOutcome {
    pub fn sinr_from_components(&self) -> f64 {
        self.signal
            / (self.interference_bs + self.interference_hd + self.interference_fd + self.self_interference + self.noise)
    }
}

/// Window radii used for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Windows {
    pub bs: f64,
    pub ue: f64,
}

impl Windows {
    /// BS window: `bs_sigmas / √(πλ_b)`. UE window: the larger of
    /// `ue_sigmas / √(πλ_min)` over the active D2D densities and
    /// `ue_pairing_factor` expected pairing distances.
    pub fn for_scenario(s: &Scenario<f64>, opts: &SimOptions) -> Self {
        let pi = std::f64::consts::PI;
        let bs = opts.bs_sigmas / (pi * s.lambda_b).sqrt();
        let hd = 0.5 * s.lambda_u * s.p_hd();
        let fd = s.lambda_u * s.p_fd;
        let lambda_min = [hd, fd].into_iter().filter(|&l| l > 0.0).fold(f64::INFINITY, f64::min);
        let lambda_min = if lambda_min.is_finite() { lambda_min } else { s.lambda_u };
        let n = f64::from(s.n);
        let mean_pairing = (ln_gamma(n + 0.5).unwrap_or(0.0) - ln_gamma(n).unwrap_or(0.0)).exp() / (pi * lambda_min).sqrt();
        let ue = (opts.ue_sigmas / (pi * lambda_min).sqrt()).max(opts.ue_pairing_factor * mean_pairing);
        Self { bs, ue }
    }
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

fn norm2(p: [f64; 2]) -> f64 {
    p[0] * p[0] + p[1] * p[1]
}

fn path_gain(p_tx: f64, d2: f64, alpha: f64) -> f64 {
    p_tx * d2.powf(-0.5 * alpha)
}

// Nearest point of `field` to `at` as (index, squared distance).
fn nearest(field: &PointField, at: [f64; 2]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in field.points.iter().enumerate() {
        let d2 = (p[0] - at[0]).powi(2) + (p[1] - at[1]).powi(2);
        if best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best
}

// Biased association test kP_b h d^{-α} > γ with a fresh unit-mean fade.
fn associates<R: Rng + ?Sized>(s: &Scenario<f64>, d2: Option<f64>, rng: &mut R) -> bool {
    let h = exp1(rng);
    match d2 {
        Some(d2) => s.k * path_gain(s.p_b, d2, s.alpha) * h > s.gamma,
        None => false,
    }
}

/// First stage of a drop: the BS field and the typical UE's mode.
pub(crate) struct BsStage {
    pub field: PointField,
    pub serving: Option<(usize, f64)>,
    pub mode: Mode,
}

pub(crate) fn bs_stage<R: Rng + ?Sized>(s: &Scenario<f64>, w: &Windows, rng: &mut R) -> Result<BsStage, SimError> {
    let field = sample_ppp(s.lambda_b, w.bs, rng)?;
    let serving = nearest(&field, [0.0, 0.0]);
    let mode = if associates(s, serving.map(|(_, d2)| d2), rng) {
        Mode::Cellular
    } else if rng.random::<f64>() < s.p_fd {
        Mode::Fd
    } else {
        Mode::Hd
    };
    Ok(BsStage { field, serving, mode })
}

pub(crate) fn cellular_outcome<R: Rng + ?Sized>(s: &Scenario<f64>, stage: &BsStage, rng: &mut R) -> DropOutcome {
    let (serving, d2) = stage.serving.expect("cellular mode implies a serving BS");
    let signal = path_gain(s.p_b, d2, s.alpha) * exp1(rng);
    let mut interference = 0.0;
    for (i, p) in stage.field.points.iter().enumerate() {
        if i != serving {
            interference += path_gain(s.p_b, norm2(*p), s.alpha) * exp1(rng);
        }
    }
    let mut out = DropOutcome {
        mode: Mode::Cellular,
        pairing_distance: d2.sqrt(),
        signal,
        interference_bs: interference,
        interference_hd: 0.0,
        interference_fd: 0.0,
        self_interference: 0.0,
        noise: s.sigma2,
        sinr: 0.0,
        resampled: 0,
    };
    out.sinr = out.sinr_from_components();
    out
}

/// Draws the UE population of the window with every UE's role decided by
/// its own nearest-BS association, duplex draw and transmit coin.
pub fn sample_ues<R: Rng + ?Sized>(
    s: &Scenario<f64>,
    bs: &PointField,
    radius: f64,
    rng: &mut R,
) -> Result<Vec<Ue>, SimError> {
    let mean = s.lambda_u * std::f64::consts::PI * radius * radius;
    let count = poisson_count(mean, rng)?;
    let mut ues = Vec::with_capacity(count);
    for _ in 0..count {
        let position = uniform_in_disc(radius, rng);
        let role = if associates(s, nearest(bs, position).map(|(_, d2)| d2), rng) {
            UeRole::Cellular
        } else if rng.random::<f64>() < s.p_fd {
            UeRole::Fd
        } else if rng.random::<f64>() < 0.5 {
            UeRole::HdTransmitter
        } else {
            UeRole::HdReceiver
        };
        ues.push(Ue { position, role });
    }
    Ok(ues)
}

/// Link of a typical D2D receiver at the origin to the n-th nearest
/// same-class transmitter in `ues`, or `None` if there are fewer than n.
/// Interferers farther than `cutoff` are ignored.
pub fn d2d_link<R: Rng + ?Sized>(
    s: &Scenario<f64>,
    mode: Mode,
    ues: &[Ue],
    cutoff: f64,
    rng: &mut R,
) -> Option<DropOutcome> {
    let partner_role = match mode {
        Mode::Hd => UeRole::HdTransmitter,
        Mode::Fd => UeRole::Fd,
        Mode::Cellular => return None,
    };
    let mut same: Vec<(f64, usize)> =
        ues.iter().enumerate().filter(|(_, u)| u.role == partner_role).map(|(i, u)| (norm2(u.position), i)).collect();
    let n = s.n as usize;
    if same.len() < n {
        return None;
    }
    same.select_nth_unstable_by(n - 1, |a, b| a.0.total_cmp(&b.0));
    let (d2, partner) = same[n - 1];
    let signal = path_gain(s.p_d, d2, s.alpha) * exp1(rng);
    let cut2 = cutoff * cutoff;
    let (mut i_hd, mut i_fd) = (0.0, 0.0);
    for (i, u) in ues.iter().enumerate() {
        if i == partner {
            continue;
        }
        let target = match u.role {
            UeRole::HdTransmitter => &mut i_hd,
            UeRole::Fd => &mut i_fd,
            _ => continue,
        };
        let h = exp1(rng);
        let r2 = norm2(u.position);
        if r2 <= cut2 {
            *target += path_gain(s.p_d, r2, s.alpha) * h;
        }
    }
    let mut out = DropOutcome {
        mode,
        pairing_distance: d2.sqrt(),
        signal,
        interference_bs: 0.0,
        interference_hd: i_hd,
        interference_fd: i_fd,
        self_interference: if mode == Mode::Fd { s.p_d * s.delta } else { 0.0 },
        noise: s.sigma2,
        sinr: 0.0,
        resampled: 0,
    };
    out.sinr = out.sinr_from_components();
    Some(out)
}

/// Redraws the UE field until the typical receiver finds a partner.
pub(crate) fn d2d_outcome<R: Rng + ?Sized>(
    s: &Scenario<f64>,
    mode: Mode,
    bs: &PointField,
    w: &Windows,
    rng: &mut R,
) -> Result<DropOutcome, SimError> {
    let mut resampled = 0;
    loop {
        let ues = sample_ues(s, bs, w.ue, rng)?;
        if let Some(mut out) = d2d_link(s, mode, &ues, f64::INFINITY, rng) {
            out.resampled = resampled;
            return Ok(out);
        }
        resampled += 1;
        if resampled >= 1000 {
            return Err(SimError::NoPartner { mode, attempts: resampled });
        }
    }
}

/// One full drop: BS field, the typical UE's mode and the SINR of its link.
pub fn run_drop<R: Rng + ?Sized>(s: &Scenario<f64>, opts: &SimOptions, rng: &mut R) -> Result<DropOutcome, SimError> {
    s.validate()?;
    let w = Windows::for_scenario(s, opts);
    let stage = bs_stage(s, &w, rng)?;
    match stage.mode {
        Mode::Cellular => Ok(cellular_outcome(s, &stage, rng)),
        mode => d2d_outcome(s, mode, &stage.field, &w, rng),
    }
}
