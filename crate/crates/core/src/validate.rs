//! Oracle battery: closed forms against quadrature, analytic results against
//! the simulator, and the structural properties every output must satisfy.
//!
//! Each check records its tolerance and the observed figure of merit. A
//! closed form that misses its integral only because of the normalisation
//! of Φ is reported as a discrepancy rather than a failure, with both
//! readings in the detail text.

use std::error::Error;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analytic::{
    association_probability, association_probability_closed_alpha4, cellular_coverage, cellular_coverage_closed_alpha4,
    cellular_rate, d2d_coverage, d2d_rate, laplace_nearest, laplace_nearest_alpha4, laplace_nearest_direct,
    laplace_unconditioned, nearest_bs_pdf, nth_neighbor_pdf, serving_bs_distance_pdf, Alpha4Arctan, AnalyticOptions,
    ClosedFormPhi, CoverageQuery, FiniteInterference, GammaProduct,
};
use crate::model::{db_to_linear, derive_densities, GeneralLaplaceParams, Mode, ModelError, Scenario};
use crate::simulator::{
    collect_sinr, estimate_association, estimate_coverage, estimate_rate, validate_independence_assumption,
    window_truncation_gaps, Budget, SimOptions,
};
use crate::special::{
    erf, erfc, gamma_fn, interference_integral_l, quad_semi_infinite_scaled, reg_incomplete_beta,
    QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CheckGroup {
    #[serde(rename = "special-functions")]
    SpecialFunctions,
    #[serde(rename = "closed-forms")]
    ClosedForms,
    #[serde(rename = "laplace")]
    Laplace,
    #[serde(rename = "analytic-vs-mc")]
    AnalyticVsMc,
    #[serde(rename = "assumption-1")]
    Assumption1,
    #[serde(rename = "properties")]
    Properties,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 6] = [
        CheckGroup::SpecialFunctions,
        CheckGroup::ClosedForms,
        CheckGroup::Laplace,
        CheckGroup::AnalyticVsMc,
        CheckGroup::Assumption1,
        CheckGroup::Properties,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckGroup::SpecialFunctions => "special-functions",
            CheckGroup::ClosedForms => "closed-forms",
            CheckGroup::Laplace => "laplace",
            CheckGroup::AnalyticVsMc => "analytic-vs-mc",
            CheckGroup::Assumption1 => "assumption-1",
            CheckGroup::Properties => "properties",
        }
    }

    /// Groups whose tolerance is a Monte Carlo tolerance.
    pub fn is_monte_carlo(self) -> bool {
        matches!(self, CheckGroup::AnalyticVsMc | CheckGroup::Assumption1)
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownGroup(pub String);

impl fmt::Display for UnknownGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = CheckGroup::ALL.iter().map(|g| g.as_str()).collect();
        write!(f, "unknown check group `{}` (expected one of {})", self.0, names.join(", "))
    }
}

impl Error for UnknownGroup {}

impl FromStr for CheckGroup {
    type Err = UnknownGroup;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CheckGroup::ALL.into_iter().find(|g| g.as_str() == s.trim()).ok_or_else(|| UnknownGroup(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// Outside tolerance for a documented reason; does not fail the run.
    Discrepancy,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub group: CheckGroup,
    pub tolerance: f64,
    pub observed: f64,
    pub outcome: Outcome,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

/// What to run and with how many trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationConfig {
    pub seed: u64,
    /// Conditioned D2D drops per Monte Carlo check.
    pub trials: u64,
    /// Drops for the association cross-check.
    pub association_drops: u64,
    /// Conditioned cellular drops for the cellular checks.
    pub cellular_trials: u64,
    /// Replaces the tolerance of every Monte Carlo check.
    pub mc_tolerance: Option<f64>,
    /// Groups to run; empty runs all of them.
    pub only: Vec<CheckGroup>,
    pub sim: SimOptions,
    pub analytic: AnalyticOptions<f64>,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 10_000,
            association_drops: 100_000,
            cellular_trials: 1_000,
            mc_tolerance: None,
            only: Vec::new(),
            sim: SimOptions::default(),
            analytic: AnalyticOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub trials: u64,
    /// The α = 4 nearest-interferer form that matched quadrature, if the
    /// Laplace group ran and one did.
    pub arctan_variant: Option<Alpha4Arctan>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

type Probe = Result<(f64, String), Box<dyn Error>>;

struct Battery<'a> {
    cfg: &'a ValidationConfig,
    checks: Vec<Check>,
    arctan: Option<Alpha4Arctan>,
}

impl Battery<'_> {
    fn wants(&self, g: CheckGroup) -> bool {
        self.cfg.only.is_empty() || self.cfg.only.contains(&g)
    }

    fn tolerance(&self, g: CheckGroup, tol: f64) -> f64 {
        match self.cfg.mc_tolerance {
            Some(t) if g.is_monte_carlo() => t,
            _ => tol,
        }
    }

    fn push(&mut self, group: CheckGroup, name: &str, tolerance: f64, observed: f64, outcome: Outcome, detail: String) {
        self.checks.push(Check { name: name.to_owned(), group, tolerance, observed, outcome, detail });
    }

    fn at_most(&mut self, group: CheckGroup, name: &str, tol: f64, probe: Probe) {
        let tol = self.tolerance(group, tol);
        match probe {
            Ok((observed, detail)) => {
                let outcome = if observed <= tol { Outcome::Pass } else { Outcome::Fail };
                self.push(group, name, tol, observed, outcome, detail);
            }
            Err(e) => self.push(group, name, tol, f64::NAN, Outcome::Fail, format!("error: {e}")),
        }
    }

    fn closed_form(&mut self, name: &str, tol: f64, probe: Probe) {
        let group = CheckGroup::ClosedForms;
        match probe {
            Ok((observed, detail)) => {
                let outcome = if observed <= tol { Outcome::Pass } else { Outcome::Discrepancy };
                self.push(group, name, tol, observed, outcome, detail);
            }
            Err(e) => self.push(group, name, tol, f64::NAN, Outcome::Fail, format!("error: {e}")),
        }
    }

    fn skip(&mut self, group: CheckGroup, name: &str, reason: &str) {
        self.push(group, name, f64::NAN, f64::NAN, Outcome::Skipped, reason.to_owned());
    }
}

/// The D2D threshold grid: -10 dB to 20 dB in 2 dB steps.
pub fn beta_grid_db() -> Vec<f64> {
    (0..16).map(|i| -10.0 + 2.0 * f64::from(i)).collect()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Runs the battery on `s`. Only an invalid scenario is an error; a check
/// that cannot be evaluated is recorded as failed with the error text.
pub fn run_validation(s: &Scenario<f64>, cfg: &ValidationConfig) -> Result<ValidationReport, ModelError> {
    s.validate()?;
    let mut b = Battery { cfg, checks: Vec::new(), arctan: None };
    if b.wants(CheckGroup::SpecialFunctions) {
        special_functions(&mut b);
    }
    if b.wants(CheckGroup::ClosedForms) {
        closed_forms(&mut b, s);
    }
    if b.wants(CheckGroup::Laplace) {
        laplace(&mut b, s);
    }
    if b.wants(CheckGroup::Properties) {
        properties(&mut b, s);
    }
    if b.wants(CheckGroup::AnalyticVsMc) {
        analytic_vs_mc(&mut b, s);
    }
    if b.wants(CheckGroup::Assumption1) {
        assumption(&mut b, s);
    }
    let passed = b.checks.iter().all(Check::passed);
    Ok(ValidationReport { seed: cfg.seed, trials: cfg.trials, arctan_variant: b.arctan, checks: b.checks, passed })
}

fn special_functions(b: &mut Battery) {
    let g = CheckGroup::SpecialFunctions;
    b.at_most(g, "gamma-recurrence", 1e-12, (|| -> Probe {
        let mut worst = 0.0f64;
        for i in 1..=200 {
            let x = 0.05 * f64::from(i);
            let gx = gamma_fn(x)?;
            worst = worst.max(rel(gamma_fn(x + 1.0)?, x * gx));
        }
        Ok((worst, "max relative |Γ(x+1) - xΓ(x)| over x in [0.05, 10]".into()))
    })());
    b.at_most(g, "gamma-factorials", 1e-13, (|| -> Probe {
        let mut worst = rel(gamma_fn(0.5)?, std::f64::consts::PI.sqrt());
        let mut fact = 1.0;
        for n in 1..=20 {
            worst = worst.max(rel(gamma_fn(f64::from(n))?, fact));
            fact *= f64::from(n);
        }
        Ok((worst, "Γ(1/2) = √π and Γ(n) = (n-1)! for n ≤ 20".into()))
    })());
    b.at_most(g, "interference-l-alpha4-identity", 1e-9, (|| -> Probe {
        let mut worst = 0.0f64;
        for beta in log_grid(1e-3, 1e3, 61) {
            worst = worst.max((interference_integral_l(beta, 4.0)? - 0.5 * beta.sqrt().atan()).abs());
        }
        Ok((worst, "max |L(β, 4) - arctan(√β)/2| over β in [1e-3, 1e3]".into()))
    })());
    b.at_most(g, "erf-complement", 1e-15, (|| -> Probe {
        let worst = (-60..=60).map(|i| 0.1 * f64::from(i)).map(|x| (erf(x) + erfc(x) - 1.0).abs()).fold(0.0, f64::max);
        Ok((worst, "max |erf(x) + erfc(x) - 1| over x in [-6, 6]".into()))
    })());
    b.at_most(g, "incomplete-beta-symmetry", 1e-12, (|| -> Probe {
        let mut worst = 0.0f64;
        for &(a, bb) in &[(0.5, 0.5), (1.0, 3.0), (2.5, 7.0), (10.0, 0.7)] {
            for i in 1..20 {
                let x = f64::from(i) / 20.0;
                let sum = reg_incomplete_beta(x, a, bb)? + reg_incomplete_beta(1.0 - x, bb, a)?;
                worst = worst.max((sum - 1.0).abs());
            }
        }
        Ok((worst, "max |I_x(a,b) + I_{1-x}(b,a) - 1|".into()))
    })());
}

fn closed_forms(b: &mut Battery, s: &Scenario<f64>) {
    let s4 = Scenario { alpha: 4.0, ..*s };
    let opts = b.cfg.analytic;
    let tol = 1e-4;
    let p = match association_probability(&s4, &opts) {
        Ok(p) => p,
        Err(e) => {
            b.at_most(CheckGroup::ClosedForms, "association-closed-form", tol, Err(e.into()));
            return;
        }
    };
    let assoc = |phi| -> Probe {
        let closed = association_probability_closed_alpha4(&s4, phi)?;
        Ok(((closed - p).abs(), format!("closed {closed:.9e} vs integral {p:.9e}")))
    };
    let erf_gap = assoc(ClosedFormPhi::Erf).map(|r| r.0).unwrap_or(f64::NAN);
    b.closed_form(
        "association-closed-form-footnote-phi",
        tol,
        assoc(ClosedFormPhi::Footnote).map(|(gap, d)| (gap, format!("{d}; with erfc in place of 1 - Φ the gap is {erf_gap:.3e}"))),
    );
    b.at_most(CheckGroup::ClosedForms, "association-closed-form-erfc", tol, assoc(ClosedFormPhi::Erf));

    if p == 0.0 {
        b.skip(CheckGroup::ClosedForms, "cellular-coverage-closed-form", "association probability is zero");
        return;
    }
    let betas = [0.1, 1.0, 10.0];
    let cover = |phi| -> Probe {
        let mut worst = 0.0f64;
        let mut parts = Vec::new();
        for beta in betas {
            let q = CoverageQuery::new(beta, Mode::Cellular)?;
            let closed = cellular_coverage_closed_alpha4(&q, &s4, p, phi)?;
            let integral = cellular_coverage(&q, &s4, p, &opts)?;
            let gap = (closed - integral).abs();
            worst = worst.max(gap);
            parts.push(format!("β={beta}: {closed:.6} vs {integral:.6} (gap {gap:.2e})"));
        }
        Ok((worst, parts.join("; ")))
    };
    let erf_gap = cover(ClosedFormPhi::Erf).map(|r| r.0).unwrap_or(f64::NAN);
    b.closed_form(
        "cellular-coverage-closed-form-footnote-phi",
        tol,
        cover(ClosedFormPhi::Footnote).map(|(gap, d)| {
            (gap, format!("{d}; the footnote normalisation Φ(x) = erf(x)/(2√2) accounts for the gap, erfc gives {erf_gap:.3e}"))
        }),
    );
    b.at_most(CheckGroup::ClosedForms, "cellular-coverage-closed-form-erfc", tol, cover(ClosedFormPhi::Erf));
}

fn laplace(b: &mut Battery, s: &Scenario<f64>) {
    let g = CheckGroup::Laplace;
    let tight = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(0.0);
    // πλr_d² = 1 puts every exponent on the same scale
    let lambda = 1e-3;
    let r_d = 1.0 / (std::f64::consts::PI * lambda).sqrt();
    let betas = log_grid(0.01, 100.0, 41);
    let errors = || -> Result<[f64; 2], Box<dyn Error>> {
        let mut worst = [0.0f64; 2];
        for &beta in &betas {
            let s_arg = beta * r_d.powi(4) / s.p_d;
            let truth = laplace_nearest_direct(s_arg, lambda, r_d, 4.0, s.p_d, &tight)?;
            for (w, form) in worst.iter_mut().zip([Alpha4Arctan::Printed, Alpha4Arctan::Antiderivative]) {
                *w = w.max(rel(laplace_nearest_alpha4(beta, lambda, r_d, form)?, truth));
            }
        }
        Ok(worst)
    };
    let probe = errors().map(|[printed, anti]| {
        let (best, form) = if anti <= printed { (anti, Alpha4Arctan::Antiderivative) } else { (printed, Alpha4Arctan::Printed) };
        if best <= 1e-6 {
            b.arctan = Some(form);
        }
        let detail = format!(
            "max relative error over β in [0.01, 100]: √β·arctan(β) {printed:.3e}, √β·arctan(√β) {anti:.3e}; matching form {}",
            match form {
                Alpha4Arctan::Printed => "√β·arctan(β)",
                Alpha4Arctan::Antiderivative => "√β·arctan(√β)",
            }
        );
        (best, detail)
    });
    b.at_most(g, "nearest-alpha4-arctan-form", 1e-6, probe.map_err(Into::into));

    b.at_most(g, "nearest-closed-vs-quadrature", 1e-6, (|| -> Probe {
        let mut worst = 0.0f64;
        for r in [0.5f64, 2.0, 10.0] {
            for beta in log_grid(0.01, 100.0, 13) {
                let s_arg = beta * r.powf(s.alpha) / s.p_d;
                let closed = laplace_nearest(s_arg, lambda, r, s.alpha, s.p_d)?;
                let direct = laplace_nearest_direct(s_arg, lambda, r, s.alpha, s.p_d, &tight)?;
                worst = worst.max(rel(closed, direct));
            }
        }
        Ok((worst, format!("L-function form against direct quadrature at α = {}", s.alpha)))
    })());

    b.at_most(g, "unconditioned-vs-functional", 1e-6, (|| -> Probe {
        let mut worst = 0.0f64;
        let mut other = 0.0f64;
        for s_arg in log_grid(1e-3, 1e3, 13) {
            let sp = s_arg * s.p_d;
            let scale = sp.powf(1.0 / s.alpha);
            let i = quad_semi_infinite_scaled(|x: f64| sp * x / (x.powf(s.alpha) + sp), 0.0, scale, &tight)?;
            let truth = (-2.0 * std::f64::consts::PI * lambda * i.value).exp();
            worst = worst.max(rel(laplace_unconditioned(s_arg, lambda, s.alpha, s.p_d, GammaProduct::TwoOverAlpha)?, truth));
            other = other.max(rel(laplace_unconditioned(s_arg, lambda, s.alpha, s.p_d, GammaProduct::OneOverAlpha)?, truth));
        }
        Ok((worst, format!("Γ(1+2/α)Γ(1-2/α) product; the 1/α product is off by up to {other:.3e}")))
    })());

    b.at_most(g, "transforms-completely-monotone", 0.0, (|| -> Probe {
        let p = association_probability(s, &b.cfg.analytic)?;
        let d = derive_densities(s, p)?;
        let mut finite_s = *s;
        finite_s.n = finite_s.n.max(2);
        if finite_s.general.is_none() {
            finite_s.general = Some(GeneralLaplaceParams::new(200, 40.0, finite_s.n)?);
        }
        let mode = if d.lambda_fd > 0.0 { Mode::Fd } else { Mode::Hd };
        let finite = FiniteInterference::for_mode(&finite_s, &d, mode, &b.cfg.analytic)?;
        let r = 5.0;
        let args: Vec<f64> = std::iter::once(0.0).chain(log_grid(1e-2, 1e4, 40)).collect();
        let mut violations = 0u32;
        let curves: Vec<Vec<f64>> = vec![
            args.iter().map(|&x| laplace_nearest(x, lambda, r, s.alpha, s.p_d)).collect::<Result<_, _>>()?,
            args.iter()
                .map(|&x| laplace_unconditioned(x, lambda, s.alpha, s.p_d, b.cfg.analytic.gamma_product))
                .collect::<Result<_, _>>()?,
            args.iter().map(|&x| finite.eval(x, r)).collect::<Result<_, _>>()?,
        ];
        for c in &curves {
            violations += u32::from(c[0] != 1.0);
            violations += c.iter().filter(|&&v| !(v > 0.0 && v <= 1.0)).count() as u32;
            violations += c.windows(2).filter(|w| w[1] > w[0]).count() as u32;
        }
        // second differences on a uniform grid
        let uniform: Vec<f64> = (0..40).map(|i| 0.05 * f64::from(i)).collect();
        let conv: Vec<f64> =
            uniform.iter().map(|&x| laplace_nearest(x, lambda, r, s.alpha, s.p_d)).collect::<Result<_, _>>()?;
        violations += conv.windows(3).filter(|w| w[2] - 2.0 * w[1] + w[0] < -1e-14).count() as u32;
        Ok((
            f64::from(violations),
            "nearest, unconditioned and finite-population transforms: value 1 at s = 0, in (0,1], nonincreasing, convex".into(),
        ))
    })());
}

fn properties(b: &mut Battery, s: &Scenario<f64>) {
    let g = CheckGroup::Properties;
    let opts = b.cfg.analytic;
    let tight = QuadratureSpec::default().with_rel_tol(1e-12).with_abs_tol(1e-15);
    b.at_most(g, "pdf-normalisation", 1e-8, (|| -> Probe {
        let p = association_probability(s, &opts)?;
        let d = derive_densities(s, p)?;
        let lam = if d.lambda_hd_tx > 0.0 { d.lambda_hd_tx } else { d.lambda_fd.max(s.lambda_u) };
        let mut worst = 0.0f64;
        let scale = 1.0 / (std::f64::consts::PI * s.lambda_b).sqrt();
        let i = quad_semi_infinite_scaled(|r: f64| nearest_bs_pdf(r, s.lambda_b).unwrap_or(f64::NAN), 0.0, scale, &tight)?;
        worst = worst.max((i.value - 1.0).abs());
        for n in 1..=4 {
            let scale = (f64::from(n) / (std::f64::consts::PI * lam)).sqrt();
            let i = quad_semi_infinite_scaled(|r: f64| nth_neighbor_pdf(r, n, lam).unwrap_or(f64::NAN), 0.0, scale, &tight)?;
            worst = worst.max((i.value - 1.0).abs());
        }
        if p > 0.0 {
            let reach = (s.k * s.p_b / s.gamma.max(f64::MIN_POSITIVE)).powf(1.0 / s.alpha);
            let scale = scale.min(reach);
            let i = quad_semi_infinite_scaled(
                |x: f64| serving_bs_distance_pdf(x, s, p).unwrap_or(f64::NAN),
                0.0,
                scale,
                &tight,
            )?;
            worst = worst.max((i.value - 1.0).abs());
        }
        Ok((worst, "nearest-BS, n-th neighbor (n = 1..4) and serving-BS distance densities".into()))
    })());
    b.at_most(g, "nth-neighbor-n1-is-nearest", 1e-13, (|| -> Probe {
        let mut worst = 0.0f64;
        for i in 1..100 {
            let r = 20.0 * f64::from(i);
            worst = worst.max(rel(nth_neighbor_pdf(r, 1, s.lambda_b)?, nearest_bs_pdf(r, s.lambda_b)?));
        }
        Ok((worst, "n = 1 neighbor density against the nearest-point density".into()))
    })());
    b.at_most(g, "coverage-monotone-in-beta", 0.0, (|| -> Probe {
        let p = association_probability(s, &opts)?;
        let d = derive_densities(s, p)?;
        let mut violations = 0u32;
        let mut modes = Vec::new();
        for mode in Mode::ALL {
            let active = match mode {
                Mode::Cellular => p > 0.0,
                Mode::Hd => d.lambda_hd_tx > 0.0,
                Mode::Fd => d.lambda_fd > 0.0,
            };
            if !active {
                continue;
            }
            modes.push(mode.as_str());
            let mut last = f64::INFINITY;
            for db in beta_grid_db() {
                let q = CoverageQuery::new(db_to_linear(db), mode)?;
                let c = match mode {
                    Mode::Cellular => cellular_coverage(&q, s, p, &opts)?,
                    _ => d2d_coverage(&q, s, &d, &opts)?,
                };
                violations += u32::from(!(0.0..=1.0).contains(&c) || c > last);
                last = c;
            }
        }
        Ok((f64::from(violations), format!("modes {}: coverage in [0,1] and nonincreasing over -10..20 dB", modes.join(", "))))
    })());
    b.at_most(g, "association-monotone", 0.0, (|| -> Probe {
        let mut violations = 0u32;
        let eval = |t: Scenario<f64>| association_probability(&t, &opts);
        let mut last = -1.0;
        for k in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
            let v = eval(Scenario { k, ..*s })?;
            violations += u32::from(v < last);
            last = v;
        }
        last = -1.0;
        for lb in log_grid(1e-8, 1e-4, 9) {
            let v = eval(Scenario { lambda_b: lb, ..*s })?;
            violations += u32::from(v < last);
            last = v;
        }
        last = 2.0;
        for gamma in log_grid(1e-6, 1.0, 9) {
            let v = eval(Scenario { gamma, ..*s })?;
            violations += u32::from(v > last);
            last = v;
        }
        Ok((f64::from(violations), "nondecreasing in k and λ_b, nonincreasing in γ".into()))
    })());
    b.at_most(g, "fd-coverage-exceeds-hd", 0.0, (|| -> Probe {
        let p = association_probability(s, &opts)?;
        let d = derive_densities(s, p)?;
        if d.lambda_hd_tx == 0.0 || d.lambda_fd == 0.0 {
            return Ok((0.0, "only one duplex class is active".into()));
        }
        let mut below = 0u32;
        for db in beta_grid_db() {
            let beta = db_to_linear(db);
            let hd = d2d_coverage(&CoverageQuery::new(beta, Mode::Hd)?, s, &d, &opts)?;
            let fd = d2d_coverage(&CoverageQuery::new(beta, Mode::Fd)?, s, &d, &opts)?;
            below += u32::from(fd < hd);
        }
        Ok((f64::from(below), "grid points with analytic FD coverage below HD".into()))
    })());
    b.at_most(g, "simulator-determinism", 0.0, (|| -> Probe {
        let mode = if s.p_fd > 0.0 { Mode::Fd } else { Mode::Hd };
        let a = collect_sinr(s, mode, Budget::Drops(2_000), b.cfg.seed, &b.cfg.sim)?;
        let other = SimOptions { block_size: 37, ..b.cfg.sim };
        let c = collect_sinr(s, mode, Budget::Drops(2_000), b.cfg.seed, &other)?;
        let same = a.sinr.len() == c.sinr.len() && a.sinr.iter().zip(&c.sinr).all(|(x, y)| x.to_bits() == y.to_bits());
        Ok((f64::from(u8::from(!same)), format!("{} {mode} SINRs rerun with another block size", a.sinr.len())))
    })());
    b.at_most(g, "window-truncation", 0.005, (|| -> Probe {
        let mode = if s.p_fd > 0.0 { Mode::Fd } else { Mode::Hd };
        let betas: Vec<f64> = beta_grid_db().into_iter().map(db_to_linear).collect();
        let drops = (b.cfg.trials / 5).max(200);
        let gaps = window_truncation_gaps(s, &betas, mode, drops, b.cfg.seed, &b.cfg.sim)?;
        let worst = gaps.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        Ok((worst, format!("{mode} coverage change from doubling the UE window, {drops} paired drops")))
    })());
}

fn analytic_vs_mc(b: &mut Battery, s: &Scenario<f64>) {
    let g = CheckGroup::AnalyticVsMc;
    let cfg = b.cfg;
    let opts = cfg.analytic;
    let p = association_probability(s, &opts);
    b.at_most(g, "association-z-score", 3.0, (|| -> Probe {
        let p = p.clone()?;
        let e = estimate_association(s, cfg.association_drops, cfg.seed, &cfg.sim)?;
        let se = e.stderr.max((p * (1.0 - p) / e.trials as f64).sqrt());
        let z = if se > 0.0 { (e.mean - p) / se } else if e.mean == p { 0.0 } else { f64::INFINITY };
        Ok((z.abs(), format!("analytic {p:.6e}, simulated {:.6e} ± {:.2e} over {} drops", e.mean, e.stderr, e.trials)))
    })());
    let Ok(p) = p else { return };
    let d = match derive_densities(s, p) {
        Ok(d) => d,
        Err(e) => {
            b.at_most(g, "densities", 0.0, Err(e.into()));
            return;
        }
    };
    if p > 0.0 {
        b.at_most(g, "cellular-coverage-z-score", 3.0, (|| -> Probe {
            let q = CoverageQuery::new(1.0, Mode::Cellular)?;
            let a = cellular_coverage(&q, s, p, &opts)?;
            let e = estimate_coverage(s, 1.0, Mode::Cellular, Budget::Conditioned(cfg.cellular_trials), cfg.seed, &cfg.sim)?;
            let se = e.stderr.max((a * (1.0 - a) / e.trials as f64).sqrt()).max(1.0 / e.trials as f64);
            Ok(((e.mean - a).abs() / se, format!("β = 1: analytic {a:.5}, simulated {:.5} ± {:.2e}", e.mean, e.stderr)))
        })());
        b.at_most(g, "rate-cellular", 0.05, (|| -> Probe {
            let a = cellular_rate(s, p, &opts)?.rate_nats;
            let e = estimate_rate(s, Mode::Cellular, Budget::Conditioned(cfg.cellular_trials), cfg.seed, &cfg.sim)?;
            Ok((rel(e.mean, a), format!("analytic {a:.5} nats, simulated {:.5} ± {:.2e}", e.mean, e.stderr)))
        })());
    } else {
        b.skip(g, "rate-cellular", "association probability is zero");
    }
    for (mode, density, name) in [(Mode::Hd, d.lambda_hd_tx, "rate-hd"), (Mode::Fd, d.lambda_fd, "rate-fd")] {
        if density == 0.0 {
            b.skip(g, name, "mode has zero density");
            continue;
        }
        b.at_most(g, name, 0.05, (|| -> Probe {
            let a = d2d_rate(mode, s, &d, &opts)?.rate_nats;
            let e = estimate_rate(s, mode, Budget::Conditioned(cfg.trials), cfg.seed, &cfg.sim)?;
            Ok((rel(e.mean, a), format!("analytic {a:.5} nats, simulated {:.5} ± {:.2e}", e.mean, e.stderr)))
        })());
    }
}

fn assumption(b: &mut Battery, s: &Scenario<f64>) {
    let g = CheckGroup::Assumption1;
    let cfg = b.cfg;
    let betas: Vec<f64> = beta_grid_db().into_iter().map(db_to_linear).collect();
    let report =
        validate_independence_assumption(s, &betas, Budget::Conditioned(cfg.trials), cfg.seed, &cfg.sim, &cfg.analytic);
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            b.at_most(g, "d2d-coverage-gap", 0.03, Err(e.into()));
            return;
        }
    };
    for mode in [Mode::Hd, Mode::Fd] {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.mode == mode).collect();
        if rows.is_empty() {
            continue;
        }
        let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.gap));
        let at = rows.iter().find(|r| r.gap == worst).map_or(f64::NAN, |r| r.beta);
        b.at_most(
            g,
            &format!("d2d-coverage-gap-{mode}"),
            0.03,
            Ok((worst, format!("max |analytic - simulated| over 16 thresholds, worst at β = {at:.4}, {} drops each", rows[0].trials))),
        );
    }
    let frac = if report.drops > 0 { report.resampled as f64 / report.drops as f64 } else { 0.0 };
    b.at_most(g, "partner-resampling", 1e-3, Ok((frac, format!("{} resampled UE fields in {} drops", report.resampled, report.drops))));
    b.at_most(g, "fd-above-hd-simulated", 0.0, {
        let hd: Vec<_> = report.rows.iter().filter(|r| r.mode == Mode::Hd).collect();
        let fd: Vec<_> = report.rows.iter().filter(|r| r.mode == Mode::Fd).collect();
        if hd.is_empty() || fd.is_empty() {
            Ok((0.0, "only one duplex class is active".into()))
        } else {
            // a point fails only if FD sits below HD by more than both error bars
            let below = hd
                .iter()
                .zip(&fd)
                .filter(|(h, f)| f.mc_mean + 3.0 * f.mc_stderr.hypot(h.mc_stderr) < h.mc_mean)
                .count();
            Ok((below as f64, "thresholds where simulated FD coverage is significantly below HD".into()))
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_names_round_trip() {
        for g in CheckGroup::ALL {
            assert_eq!(g.as_str().parse::<CheckGroup>().unwrap(), g);
            assert_eq!(serde_json::to_value(g).unwrap(), serde_json::Value::String(g.as_str().into()));
        }
        assert!("bogus".parse::<CheckGroup>().is_err());
    }

    #[test]
    fn special_functions_pass() {
        let cfg = ValidationConfig { only: vec![CheckGroup::SpecialFunctions], ..Default::default() };
        let r = run_validation(&Scenario::table1(), &cfg).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert!(r.checks.iter().all(|c| c.group == CheckGroup::SpecialFunctions));
        assert_eq!(r.checks.len(), 5);
    }

    #[test]
    fn laplace_group_records_arctan_form() {
        let cfg = ValidationConfig { only: vec![CheckGroup::Laplace], ..Default::default() };
        let r = run_validation(&Scenario::table1(), &cfg).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.arctan_variant, Some(Alpha4Arctan::Antiderivative));
    }

    #[test]
    fn closed_forms_document_the_phi_gap() {
        let cfg = ValidationConfig { only: vec![CheckGroup::ClosedForms], ..Default::default() };
        let r = run_validation(&Scenario::table1(), &cfg).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        let erfc: Vec<_> = r.checks.iter().filter(|c| c.name.ends_with("erfc")).collect();
        assert_eq!(erfc.len(), 2);
        assert!(erfc.iter().all(|c| c.outcome == Outcome::Pass));
        let footnote = r.checks.iter().find(|c| c.name == "cellular-coverage-closed-form-footnote-phi").unwrap();
        assert_eq!(footnote.outcome, Outcome::Discrepancy);
        assert!(footnote.detail.contains("erfc"));
    }

    #[test]
    fn tight_mc_tolerance_fails_with_named_checks() {
        let s = Scenario { k: 0.0, ..Scenario::table1() };
        let cfg = ValidationConfig {
            only: vec![CheckGroup::AnalyticVsMc],
            trials: 300,
            mc_tolerance: Some(1e-9),
            ..Default::default()
        };
        let r = run_validation(&s, &cfg).unwrap();
        assert!(!r.passed);
        assert!(r.checks.iter().all(|c| c.tolerance == 1e-9 || c.outcome == Outcome::Skipped));
        let failed: Vec<_> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"rate-hd"), "{failed:?}");
    }

    #[test]
    fn invalid_scenario_is_an_error() {
        let s = Scenario { alpha: 2.0, ..Scenario::table1() };
        assert!(run_validation(&s, &ValidationConfig::default()).is_err());
    }
}
