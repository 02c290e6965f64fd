use super::association::{association_scale, tail};
use super::laplace::gamma_product;
use super::{clamp_unit, converged, AnalyticError, AnalyticOptions, ClosedFormPhi, CoverageQuery, FiniteInterference};
use crate::model::{Densities, Mode, Scenario};
use crate::real::Real;
use crate::special::{interference_integral_l, ln_gamma, quad_semi_infinite_scaled};

fn cellular_checks<T: Real>(q: &CoverageQuery<T>, s: &Scenario<T>, p_assoc: T) -> Result<(), AnalyticError> {
    q.validate()?;
    if q.mode != Mode::Cellular {
        return Err(AnalyticError::WrongMode { got: q.mode });
    }
    s.validate()?;
    if !(p_assoc > T::zero()) || s.k == T::zero() {
        return Err(AnalyticError::NoCellularUsers);
    }
    Ok(())
}

/// Coverage of a cellular UE served by its nearest BS, averaged over the
/// serving distance:
///
/// ```text
/// (2πλ_b/𝒫) ∫ r exp(-πλ_b r² - βσ²r^α/P_b - γr^α/(kP_b) - 2πλ_b β^{2/α} r² L(β, α)) dr
/// ```
pub fn cellular_coverage<T: Real>(
    q: &CoverageQuery<T>,
    s: &Scenario<T>,
    p_assoc: T,
    opts: &AnalyticOptions<T>,
) -> Result<T, AnalyticError> {
    cellular_checks(q, s, p_assoc)?;
    let beta = q.beta;
    let pl = T::PI() * s.lambda_b;
    let spread = T::one() + T::lit(2.0) * beta.powf(T::lit(2.0) / s.alpha) * interference_integral_l(beta, s.alpha)?;
    let decay = beta * s.sigma2 / s.p_b + s.gamma / (s.k * s.p_b);
    let front = (pl + pl) / p_assoc;
    let scale = association_scale(s) / spread.sqrt();
    let i = quad_semi_infinite_scaled(
        |r: T| front * r * (-pl * spread * r * r - decay * r.powf(s.alpha)).exp(),
        T::zero(),
        scale,
        &opts.quadrature,
    )?;
    Ok(clamp_unit(converged("cellular coverage", i)?.value))
}

/// The α = 4 closed form of [`cellular_coverage`]:
/// (πλ_b/𝒫) √(πkP_b/(4(kβσ²+γ))) e^{x²}(1 - Φ(x)) with
/// x = πλ_b (1 + √β arctan√β) √(kP_b/(4(kβσ²+γ))).
pub fn cellular_coverage_closed_alpha4<T: Real>(
    q: &CoverageQuery<T>,
    s: &Scenario<T>,
    p_assoc: T,
    phi: ClosedFormPhi,
) -> Result<T, AnalyticError> {
    cellular_checks(q, s, p_assoc)?;
    if s.alpha != T::lit(4.0) {
        return Err(AnalyticError::NeedsAlpha4 { what: "closed-form cellular coverage", alpha: s.alpha.to_f64_lossy() });
    }
    let denom = s.k * q.beta * s.sigma2 + s.gamma;
    if denom == T::zero() {
        return Err(AnalyticError::Singular { what: "closed-form cellular coverage with sigma2 = gamma = 0" });
    }
    let pl = T::PI() * s.lambda_b;
    let root = (s.k * s.p_b / (T::lit(4.0) * denom)).sqrt();
    let sb = q.beta.sqrt();
    let x = pl * (T::one() + sb * sb.atan()) * root;
    Ok(pl / p_assoc * T::PI().sqrt() * root * tail(x, phi))
}

// Pairing density, same-class and other-class interferer densities.
fn d2d_densities<T: Real>(mode: Mode, d: &Densities<T>) -> Result<(T, T), AnalyticError> {
    match mode {
        Mode::Hd => Ok((d.lambda_hd_tx, d.lambda_fd)),
        Mode::Fd => Ok((d.lambda_fd, d.lambda_hd_tx)),
        Mode::Cellular => Err(AnalyticError::WrongMode { got: mode }),
    }
}

/// Per-distance pieces of the D2D link: pairing-distance density, the
/// Laplace factors of both interferer classes and the noise and
/// self-interference decay, evaluated at SINR threshold θ.
pub(crate) struct D2dLink<'a, T> {
    s: &'a Scenario<T>,
    mode: Mode,
    lambda_same: T,
    lambda_other: T,
    finite: Option<FiniteInterference<T>>,
    g_other: T,
    ln_norm: T,
}

impl<'a, T: Real> D2dLink<'a, T> {
    pub(crate) fn new(mode: Mode, s: &'a Scenario<T>, d: &Densities<T>, opts: &AnalyticOptions<T>) -> Result<Self, AnalyticError> {
        s.validate()?;
        let (lambda_same, lambda_other) = d2d_densities(mode, d)?;
        if lambda_same == T::zero() {
            return Err(AnalyticError::NoPairs { mode });
        }
        let finite = if s.n > 1 {
            if s.general.is_none() {
                return Err(AnalyticError::MissingGeneralParams { n: s.n });
            }
            Some(FiniteInterference::for_mode(s, d, mode, opts)?)
        } else {
            None
        };
        let nn = T::lit(f64::from(s.n));
        let ln_norm = T::LN_2() - ln_gamma(nn)? + nn * (T::PI() * lambda_same).ln();
        Ok(Self {
            s,
            mode,
            lambda_same,
            lambda_other,
            finite,
            g_other: gamma_product(s.alpha, opts.gamma_product)?,
            ln_norm,
        })
    }

    /// Typical pairing distance.
    pub(crate) fn length(&self) -> T {
        (T::lit(f64::from(self.s.n)) / (T::PI() * self.lambda_same)).sqrt()
    }

    /// Noise plus self-interference per unit of θ r^α.
    pub(crate) fn noise(&self) -> T {
        let si = if self.mode == Mode::Fd { self.s.delta } else { T::zero() };
        self.s.sigma2 / self.s.p_d + si
    }

    /// Coefficient c with interference exponent ≈ c θ^{2/α} r² for large θ.
    pub(crate) fn interference_scale(&self) -> Result<T, AnalyticError> {
        let l_inf = crate::special::interference_integral_l_complete(self.s.alpha)?;
        Ok(T::PI() * (T::lit(2.0) * self.lambda_same * l_inf + self.lambda_other * self.g_other))
    }

    /// ln of the pairing-distance density at r.
    pub(crate) fn ln_pdf(&self, r: T) -> T {
        let nn = T::lit(f64::from(self.s.n));
        self.ln_norm + (nn + nn - T::one()) * r.ln() - T::PI() * self.lambda_same * r * r
    }

    /// ln P[SINR ≥ θ | r_d = r] under Rayleigh fading.
    pub(crate) fn ln_success(&self, theta: T, r: T) -> Result<T, AnalyticError> {
        let alpha = self.s.alpha;
        let two_a = T::lit(2.0) / alpha;
        let b_r2 = theta.powf(two_a) * r * r;
        let same = match &self.finite {
            None => -T::lit(2.0) * T::PI() * self.lambda_same * b_r2 * interference_integral_l(theta, alpha)?,
            Some(f) => {
                let v = f.eval(theta * r.powf(alpha) / self.s.p_d, r)?;
                if v > T::zero() {
                    v.ln()
                } else {
                    T::neg_infinity()
                }
            }
        };
        let other = -T::PI() * self.lambda_other * b_r2 * self.g_other;
        Ok(same + other - theta * r.powf(alpha) * self.noise())
    }
}

/// Coverage of a typical HD or FD receiver paired with its n-th nearest
/// same-class transmitter. The same-class interference uses the PPP
/// transform for n = 1 and the finite-population transform otherwise; the
/// other class always uses the unconditioned transform.
pub fn d2d_coverage<T: Real>(
    q: &CoverageQuery<T>,
    s: &Scenario<T>,
    d: &Densities<T>,
    opts: &AnalyticOptions<T>,
) -> Result<T, AnalyticError> {
    q.validate()?;
    let link = D2dLink::new(q.mode, s, d, opts)?;
    let mut failure = None;
    let i = quad_semi_infinite_scaled(
        |r: T| {
            if r == T::zero() {
                return T::zero();
            }
            match link.ln_success(q.beta, r) {
                Ok(v) => (link.ln_pdf(r) + v).exp(),
                Err(e) => {
                    failure.get_or_insert(e);
                    T::zero()
                }
            }
        },
        T::zero(),
        link.length(),
        &opts.quadrature,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(clamp_unit(converged("D2D coverage", i)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::association_probability;
    use crate::model::{db_to_linear, derive_densities, GeneralLaplaceParams};
    use crate::special::{quad_finite, QuadratureSpec};
    use std::f64::consts::PI;

    fn opts() -> AnalyticOptions<f64> {
        AnalyticOptions::default()
    }

    fn setup(s: &Scenario<f64>) -> (f64, Densities<f64>) {
        let p = association_probability(s, &opts()).unwrap();
        (p, derive_densities(s, p).unwrap())
    }

    fn beta_grid() -> Vec<f64> {
        (0..16).map(|i| db_to_linear(-10.0 + 2.0 * f64::from(i))).collect()
    }

    #[test]
    fn cellular_limits_and_monotone() {
        let s = Scenario::<f64>::table1();
        let (p, _) = setup(&s);
        let tiny = cellular_coverage(&CoverageQuery::new(1e-9, Mode::Cellular).unwrap(), &s, p, &opts()).unwrap();
        assert!((tiny - 1.0).abs() < 1e-4, "{tiny}");
        let mut prev = 1.0;
        for beta in beta_grid() {
            let c = cellular_coverage(&CoverageQuery::new(beta, Mode::Cellular).unwrap(), &s, p, &opts()).unwrap();
            assert!(c <= prev + 1e-12 && (0.0..=1.0).contains(&c));
            prev = c;
        }
        assert!(CoverageQuery::new(0.0_f64, Mode::Cellular).is_err());
        let q = CoverageQuery::new(1.0, Mode::Hd).unwrap();
        assert!(matches!(cellular_coverage(&q, &s, p, &opts()), Err(AnalyticError::WrongMode { .. })));
        let q = CoverageQuery::new(1.0, Mode::Cellular).unwrap();
        assert!(matches!(cellular_coverage(&q, &s, 0.0, &opts()), Err(AnalyticError::NoCellularUsers)));
    }

    // Oracle for cellular coverage: truncated finite quadrature of the same
    // integrand, with the interference term taken from the α = 4 identity.
    fn cellular_oracle(s: &Scenario<f64>, p: f64, beta: f64) -> f64 {
        let pl = PI * s.lambda_b;
        let interf = 2.0 * pl * beta.sqrt() * 0.5 * beta.sqrt().atan();
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        let top = 15.0 * (1.0 / pl.sqrt()).min((s.gamma / (s.k * s.p_b)).powf(-0.25));
        quad_finite(
            |r: f64| {
                2.0 * pl / p
                    * r
                    * (-pl * r * r - beta * s.sigma2 * r.powi(4) / s.p_b - s.gamma * r.powi(4) / (s.k * s.p_b) - interf * r * r).exp()
            },
            0.0,
            top,
            &spec,
        )
        .unwrap()
        .value
    }

    #[test]
    fn cellular_against_oracle_and_erf_closed_form() {
        let s = Scenario::<f64>::table1();
        let (p, _) = setup(&s);
        for &beta in &[0.1, 1.0, 10.0] {
            let q = CoverageQuery::new(beta, Mode::Cellular).unwrap();
            let c = cellular_coverage(&q, &s, p, &opts()).unwrap();
            assert!((c - cellular_oracle(&s, p, beta)).abs() < 1e-8, "beta={beta}");
            let closed = cellular_coverage_closed_alpha4(&q, &s, p, ClosedFormPhi::Erf).unwrap();
            assert!((c - closed).abs() < 1e-7, "beta={beta}: {c} vs {closed}");
        }
    }

    #[test]
    fn pure_d2d_first_neighbor_closed_value() {
        // with p_fd = 1, no noise and no self-interference,
        // C = 1 / (1 + √β arctan √β) for α = 4
        let mut s = Scenario::<f64>::table1();
        s.p_fd = 1.0;
        s.sigma2 = 0.0;
        s.delta = 0.0;
        let (_, d) = setup(&s);
        for &beta in &[0.1, 1.0, 10.0] {
            let c = d2d_coverage(&CoverageQuery::new(beta, Mode::Fd).unwrap(), &s, &d, &opts()).unwrap();
            let want = 1.0 / (1.0 + beta.sqrt() * beta.sqrt().atan());
            assert!((c - want).abs() < 1e-8, "beta={beta}: {c} vs {want}");
        }
    }

    #[test]
    fn self_interference_lowers_fd_coverage() {
        let base = Scenario::<f64>::table1();
        for beta in beta_grid() {
            let mut prev = 2.0;
            for &delta in &[0.0, 1e-6, 1e-5, 1e-3] {
                let s = Scenario { delta, ..base };
                let (_, d) = setup(&s);
                let c = d2d_coverage(&CoverageQuery::new(beta, Mode::Fd).unwrap(), &s, &d, &opts()).unwrap();
                assert!(c < prev, "beta={beta} delta={delta}");
                prev = c;
            }
        }
    }

    #[test]
    fn d2d_table1_properties() {
        let s = Scenario::<f64>::table1();
        let (_, d) = setup(&s);
        let mut prev = (1.0, 1.0);
        for beta in beta_grid() {
            let hd = d2d_coverage(&CoverageQuery::new(beta, Mode::Hd).unwrap(), &s, &d, &opts()).unwrap();
            let fd = d2d_coverage(&CoverageQuery::new(beta, Mode::Fd).unwrap(), &s, &d, &opts()).unwrap();
            assert!(fd > hd, "beta={beta}: fd {fd} hd {hd}");
            assert!(hd <= prev.0 && fd <= prev.1);
            prev = (hd, fd);
        }
        let tiny = d2d_coverage(&CoverageQuery::new(1e-9, Mode::Hd).unwrap(), &s, &d, &opts()).unwrap();
        assert!((tiny - 1.0).abs() < 1e-3);
    }

    #[test]
    fn d2d_errors() {
        let s = Scenario::<f64>::table1();
        let (_, d) = setup(&s);
        let q = CoverageQuery::new(1.0, Mode::Cellular).unwrap();
        assert!(matches!(d2d_coverage(&q, &s, &d, &opts()), Err(AnalyticError::WrongMode { .. })));
        let pure_hd = Scenario { p_fd: 0.0, ..s };
        let (_, d0) = setup(&pure_hd);
        let q = CoverageQuery::new(1.0, Mode::Fd).unwrap();
        assert!(matches!(d2d_coverage(&q, &pure_hd, &d0, &opts()), Err(AnalyticError::NoPairs { .. })));
        let second = Scenario { n: 2, ..s };
        assert!(matches!(d2d_coverage(&q, &second, &d, &opts()), Err(AnalyticError::MissingGeneralParams { .. })));
    }

    #[test]
    fn second_neighbor_general_path() {
        let s = Scenario { n: 2, general: Some(GeneralLaplaceParams { w_total: 200, m_bar: 40.0 }), ..Scenario::table1() };
        let (_, d) = setup(&s);
        let mut prev = 1.0;
        for beta in beta_grid() {
            let c = d2d_coverage(&CoverageQuery::new(beta, Mode::Hd).unwrap(), &s, &d, &opts()).unwrap();
            assert!((0.0..=1.0).contains(&c) && c <= prev + 1e-12);
            prev = c;
        }
    }
}
