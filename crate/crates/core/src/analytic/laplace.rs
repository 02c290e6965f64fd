use serde::Serialize;

use super::{association_probability, converged, AnalyticError, AnalyticOptions, BallExponent, GammaProduct, XiPopulation};
use crate::model::{derive_densities, Densities, GeneralLaplaceParams, Mode, Scenario};
use crate::real::Real;
use crate::special::{
    gamma_fn, interference_integral_l, interference_integral_l_complete, ln_binomial, ln_gamma, quad_semi_infinite_scaled,
    reg_incomplete_beta, QuadratureSpec,
};

fn check_common<T: Real>(s_arg: T, lambda: T, alpha: T) -> Result<(), AnalyticError> {
    if !(s_arg >= T::zero()) {
        return Err(AnalyticError::Domain { what: "Laplace variable", value: s_arg.to_f64_lossy() });
    }
    if !(lambda >= T::zero()) {
        return Err(AnalyticError::Domain { what: "interferer density", value: lambda.to_f64_lossy() });
    }
    if !(alpha > T::lit(2.0)) {
        return Err(AnalyticError::Domain { what: "alpha", value: alpha.to_f64_lossy() });
    }
    Ok(())
}

// ∫_r^∞ sP x / (x^α + sP) dx = (sP)^{2/α} L(sP/r^α, α); r = 0 gives the
// complete integral.
fn beyond<T: Real>(sp: T, r: T, alpha: T) -> Result<T, AnalyticError> {
    if sp == T::zero() {
        return Ok(T::zero());
    }
    let theta = if r == T::zero() { T::infinity() } else { sp / r.powf(alpha) };
    Ok(sp.powf(T::lit(2.0) / alpha) * interference_integral_l(theta, alpha)?)
}

/// Laplace transform of PPP interference from outside the pairing disc,
/// exp(-2πλ ∫_{r_d}^∞ sP x^{-α}/(1 + sP x^{-α}) x dx), in closed form via L.
pub fn laplace_nearest<T: Real>(s_arg: T, lambda: T, r_d: T, alpha: T, p_d: T) -> Result<T, AnalyticError> {
    check_common(s_arg, lambda, alpha)?;
    if !(r_d >= T::zero()) {
        return Err(AnalyticError::Domain { what: "pairing distance", value: r_d.to_f64_lossy() });
    }
    if s_arg == T::zero() || lambda == T::zero() {
        return Ok(T::one());
    }
    let two_pl = T::lit(2.0) * T::PI() * lambda;
    Ok((-two_pl * beyond(s_arg * p_d, r_d, alpha)?).exp())
}

/// [`laplace_nearest`] with the radial integral done by adaptive
/// quadrature instead of through L.
pub fn laplace_nearest_direct<T: Real>(
    s_arg: T,
    lambda: T,
    r_d: T,
    alpha: T,
    p_d: T,
    spec: &QuadratureSpec<T>,
) -> Result<T, AnalyticError> {
    check_common(s_arg, lambda, alpha)?;
    if !(r_d >= T::zero()) {
        return Err(AnalyticError::Domain { what: "pairing distance", value: r_d.to_f64_lossy() });
    }
    if s_arg == T::zero() || lambda == T::zero() {
        return Ok(T::one());
    }
    let sp = s_arg * p_d;
    let scale = r_d.max(sp.powf(alpha.recip()));
    let i = quad_semi_infinite_scaled(|x: T| sp * x / (x.powf(alpha) + sp), r_d, scale, spec)?;
    let i = converged("nearest-interferer Laplace transform", i)?;
    Ok((-T::lit(2.0) * T::PI() * lambda * i.value).exp())
}

/// Candidate α = 4 forms of [`laplace_nearest`] at s = β r_d⁴ / P_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alpha4Arctan {
    /// exp(-πλ r_d² √β arctan(β))
    Printed,
    /// exp(-πλ r_d² √β arctan(√β))
    Antiderivative,
}

pub fn laplace_nearest_alpha4<T: Real>(beta: T, lambda: T, r_d: T, form: Alpha4Arctan) -> Result<T, AnalyticError> {
    check_common(beta, lambda, T::lit(4.0))?;
    let root = beta.sqrt();
    let arg = match form {
        Alpha4Arctan::Printed => beta,
        Alpha4Arctan::Antiderivative => root,
    };
    Ok((-T::PI() * lambda * r_d * r_d * root * arg.atan()).exp())
}

/// Unconditioned PPP Laplace transform exp(-πλ(sP)^{2/α} Γ(1+δ)Γ(1-δ)),
/// with δ picked by `product`.
pub fn laplace_unconditioned<T: Real>(
    s_arg: T,
    lambda: T,
    alpha: T,
    p_d: T,
    product: GammaProduct,
) -> Result<T, AnalyticError> {
    check_common(s_arg, lambda, alpha)?;
    if s_arg == T::zero() || lambda == T::zero() {
        return Ok(T::one());
    }
    let g = gamma_product(alpha, product)?;
    Ok((-T::PI() * lambda * (s_arg * p_d).powf(T::lit(2.0) / alpha) * g).exp())
}

pub(crate) fn gamma_product<T: Real>(alpha: T, product: GammaProduct) -> Result<T, AnalyticError> {
    let delta = match product {
        GammaProduct::TwoOverAlpha => T::lit(2.0) / alpha,
        GammaProduct::OneOverAlpha => alpha.recip(),
    };
    Ok(gamma_fn(T::one() + delta)? * gamma_fn(T::one() - delta)?)
}

/// Interference from FD transceivers seen by an HD receiver.
pub fn laplace_fd_on_hd<T: Real>(s_arg: T, lambda_fd: T, alpha: T, p_d: T, product: GammaProduct) -> Result<T, AnalyticError> {
    laplace_unconditioned(s_arg, lambda_fd, alpha, p_d, product)
}

/// Interference from HD transmitters seen by an FD receiver.
pub fn laplace_hd_on_fd<T: Real>(s_arg: T, lambda_hd: T, alpha: T, p_d: T, product: GammaProduct) -> Result<T, AnalyticError> {
    laplace_unconditioned(s_arg, lambda_hd, alpha, p_d, product)
}

/// Same-class interference transform for a receiver paired with its n-th
/// nearest neighbor in a finite population.
///
/// The class holds `M = round(W P_class)` users inside a disc of radius
/// `R = √(m̄ / (πλ))`. The number of interferers is Poisson(m̄ - 1)
/// truncated to `0..M`; each lies inside the pairing disc with probability
/// `(n-1)/(M-1)`, conditioned on at most `n - 1` doing so. An interferer
/// inside the disc is uniform over it and one outside is uniform over the
/// annulus out to `R`, so the two factors are
///
/// ```text
/// A = (2/r_d²) ∫_0^{r_d} x / (1 + sP x^{-α}) dx
/// B = (2/(R² - r_d²)) ∫_{r_d}^R x / (1 + sP x^{-α}) dx      (1 if R <= r_d)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInterference<T> {
    alpha: T,
    p_d: T,
    radius: T,
    population: u32,
    // (inside power, outside power, weight)
    terms: Vec<(i32, i32, T)>,
}

impl<T: Real> FiniteInterference<T> {
    pub fn new(
        params: &GeneralLaplaceParams<T>,
        n: u32,
        class_probability: T,
        lambda_class: T,
        alpha: T,
        p_d: T,
        opts: &AnalyticOptions<T>,
    ) -> Result<Self, AnalyticError> {
        params.validate(n)?;
        if !(lambda_class > T::zero()) {
            return Err(AnalyticError::Domain { what: "class density", value: lambda_class.to_f64_lossy() });
        }
        let m = (T::lit(f64::from(params.w_total)) * class_probability).round().to_u32().unwrap_or(0);
        if m <= n {
            return Err(AnalyticError::PopulationTooSmall { population: m, n });
        }
        let xi_top = match opts.xi_population {
            XiPopulation::Class => m,
            XiPopulation::Total => params.w_total,
        };
        let q_mean = params.m_bar - T::one();
        let ln_q = q_mean.ln();
        let ln_poisson = |j: u32| -> Result<T, AnalyticError> {
            let jj = T::lit(f64::from(j));
            Ok(jj * ln_q - q_mean - ln_gamma(jj + T::one())?)
        };
        let mut xi = T::zero();
        for j in 0..xi_top {
            xi += ln_poisson(j)?.exp();
        }
        let ln_xi = xi.ln();

        let mm = T::lit(f64::from(m - 1));
        let p = T::lit(f64::from(n - 1)) / mm;
        let q = T::lit(f64::from(m - n)) / mm;
        let mut terms = Vec::new();
        for k in 0..m {
            let f = k.min(n - 1);
            let norm = if k == f {
                T::one()
            } else {
                reg_incomplete_beta(T::one() - p, T::lit(f64::from(k - f)), T::lit(f64::from(f + 1)))?
            };
            let lw = ln_poisson(k)? - ln_xi - norm.ln();
            for l in 0..=f {
                let mut lc = lw + ln_binomial::<T>(k, l) + T::lit(f64::from(k - l)) * q.ln();
                if l > 0 {
                    lc += T::lit(f64::from(l)) * p.ln();
                }
                let outside = match opts.exponent {
                    BallExponent::KMinusL => k as i32 - l as i32,
                    BallExponent::NMinusL => n as i32 - l as i32,
                };
                terms.push((l as i32, outside, lc.exp()));
            }
        }
        let radius = (params.m_bar / (T::PI() * lambda_class)).sqrt();
        Ok(Self { alpha, p_d, radius, population: m, terms })
    }

    /// Builds the transform for the same-class interferers of a receiver in
    /// `mode`, taking W and m̄ from the scenario.
    pub fn for_mode(s: &Scenario<T>, d: &Densities<T>, mode: Mode, opts: &AnalyticOptions<T>) -> Result<Self, AnalyticError> {
        let params = s.general.ok_or(AnalyticError::MissingGeneralParams { n: s.n })?;
        let (prob, lambda) = match mode {
            Mode::Hd => (s.p_hd(), d.lambda_hd_tx),
            Mode::Fd => (s.p_fd, d.lambda_fd),
            Mode::Cellular => return Err(AnalyticError::WrongMode { got: mode }),
        };
        if lambda == T::zero() {
            return Err(AnalyticError::NoPairs { mode });
        }
        Self::new(&params, s.n, prob, lambda, s.alpha, s.p_d, opts)
    }

    /// Class population M.
    pub fn population(&self) -> u32 {
        self.population
    }

    /// Radius of the disc holding the population.
    pub fn radius(&self) -> T {
        self.radius
    }

    /// Mean of 1/(1 + sP x^{-α}) over the pairing disc and over the annulus
    /// out to R.
    pub fn ball_factors(&self, s_arg: T, r_d: T) -> Result<(T, T), AnalyticError> {
        if !(s_arg >= T::zero()) {
            return Err(AnalyticError::Domain { what: "Laplace variable", value: s_arg.to_f64_lossy() });
        }
        if !(r_d >= T::zero()) {
            return Err(AnalyticError::Domain { what: "pairing distance", value: r_d.to_f64_lossy() });
        }
        if s_arg == T::zero() {
            return Ok((T::one(), T::one()));
        }
        let two = T::lit(2.0);
        let sp = s_arg * self.p_d;
        let at_rd = beyond(sp, r_d, self.alpha)?;
        let inside = if r_d == T::zero() {
            T::one()
        } else {
            let complete = sp.powf(two / self.alpha) * interference_integral_l_complete(self.alpha)?;
            T::one() - two * (complete - at_rd) / (r_d * r_d)
        };
        let outside = if self.radius <= r_d {
            T::one()
        } else {
            let at_r = beyond(sp, self.radius, self.alpha)?;
            T::one() - two * (at_rd - at_r) / (self.radius * self.radius - r_d * r_d)
        };
        Ok((super::clamp_unit(inside), super::clamp_unit(outside)))
    }

    pub fn eval(&self, s_arg: T, r_d: T) -> Result<T, AnalyticError> {
        let (a, b) = self.ball_factors(s_arg, r_d)?;
        let mut sum = T::zero();
        for &(l, e, w) in &self.terms {
            sum += w * a.powi(l) * b.powi(e);
        }
        Ok(super::clamp_unit(sum))
    }
}

/// One-shot evaluation of the finite-population transform for `duplex`.
pub fn laplace_general_nth<T: Real>(
    s_arg: T,
    params: &GeneralLaplaceParams<T>,
    duplex: Mode,
    r_d: T,
    s: &Scenario<T>,
    opts: &AnalyticOptions<T>,
) -> Result<T, AnalyticError> {
    let p = association_probability(s, opts)?;
    let d = derive_densities(s, p)?;
    let mut with = *s;
    with.general = Some(*params);
    FiniteInterference::for_mode(&with, &d, duplex, opts)?.eval(s_arg, r_d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{quad_finite, quad_semi_infinite};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn trivial_points() {
        assert_eq!(laplace_nearest(0.0, 0.1, 3.0, 4.0, 0.2).unwrap(), 1.0);
        assert_eq!(laplace_nearest(1.0, 0.0, 3.0, 4.0, 0.2).unwrap(), 1.0);
        assert_eq!(laplace_unconditioned(0.0, 0.1, 4.0, 0.2, GammaProduct::TwoOverAlpha).unwrap(), 1.0);
        assert_eq!(laplace_fd_on_hd(3.0, 0.0, 4.0, 0.2, GammaProduct::TwoOverAlpha).unwrap(), 1.0);
        assert!(laplace_nearest(1.0, 0.1, 3.0, 2.0, 0.2).is_err());
        assert!(laplace_unconditioned(1.0, 0.1, 1.5, 0.2, GammaProduct::OneOverAlpha).is_err());
    }

    #[test]
    fn closed_form_matches_direct_quadrature() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        for &alpha in &[2.5_f64, 3.0, 4.0, 5.0] {
            for &(s_arg, r_d) in &[(0.01, 1.0), (1.0, 2.0), (30.0, 0.7), (1e3, 5.0)] {
                let a = laplace_nearest(s_arg, 0.03, r_d, alpha, 0.2).unwrap();
                let b = laplace_nearest_direct(s_arg, 0.03, r_d, alpha, 0.2, &spec).unwrap();
                assert!(((a.ln() - b.ln()) / b.ln()).abs() < 1e-7, "alpha={alpha} s={s_arg}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn antiderivative_arctan_form_wins() {
        let (lambda, p_d, r_d) = (0.02_f64, 0.2_f64, 3.0_f64);
        let mut printed_gap: f64 = 0.0;
        for i in 0..=40 {
            let beta = 10f64.powf(-2.0 + 4.0 * f64::from(i) / 40.0);
            let s_arg = beta * r_d.powi(4) / p_d;
            let exact = laplace_nearest(s_arg, lambda, r_d, 4.0, p_d).unwrap();
            let anti = laplace_nearest_alpha4(beta, lambda, r_d, Alpha4Arctan::Antiderivative).unwrap();
            let printed = laplace_nearest_alpha4(beta, lambda, r_d, Alpha4Arctan::Printed).unwrap();
            assert!(((anti - exact) / exact).abs() < 1e-9, "beta={beta}");
            printed_gap = printed_gap.max(((printed - exact) / exact).abs());
        }
        assert!(printed_gap > 1e-3);
    }

    // Oracle: the PPP Laplace functional exp(-2πλ ∫_0^∞ x sP x^{-α}/(1+sP x^{-α}) dx)
    // integrated numerically.
    fn functional_oracle(s_arg: f64, lambda: f64, alpha: f64, p_d: f64) -> f64 {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        let sp = s_arg * p_d;
        let head = quad_finite(|x: f64| sp * x / (x.powf(alpha) + sp), 0.0, 1.0, &spec).unwrap().value;
        let tail = quad_semi_infinite(|x: f64| sp * x / (x.powf(alpha) + sp), 1.0, &spec).unwrap().value;
        (-2.0 * PI * lambda * (head + tail)).exp()
    }

    #[test]
    fn unconditioned_gamma_product() {
        for &alpha in &[3.0, 4.0, 4.5] {
            for &s_arg in &[0.5, 5.0, 60.0] {
                let want = functional_oracle(s_arg, 0.01, alpha, 0.2);
                let got = laplace_unconditioned(s_arg, 0.01, alpha, 0.2, GammaProduct::TwoOverAlpha).unwrap();
                assert!(((got - want) / want).abs() < 1e-6, "alpha={alpha} s={s_arg}: {got} vs {want}");
            }
        }
        // the 1/α product undercounts at α = 4: Γ(5/4)Γ(3/4) = π/(2√2) against π/2
        let g1 = gamma_product(4.0_f64, GammaProduct::OneOverAlpha).unwrap();
        let g2 = gamma_product(4.0_f64, GammaProduct::TwoOverAlpha).unwrap();
        assert!((g1 - PI / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        assert!((g2 - PI / 2.0).abs() < 1e-14);
        let want = functional_oracle(5.0, 0.01, 4.0, 0.2);
        let verbatim = laplace_unconditioned(5.0, 0.01, 4.0, 0.2, GammaProduct::OneOverAlpha).unwrap();
        assert!(((verbatim - want) / want).abs() > 1e-3);
    }

    fn finite(w: u32, m_bar: f64, n: u32, opts: &AnalyticOptions<f64>) -> FiniteInterference<f64> {
        FiniteInterference::new(&GeneralLaplaceParams { w_total: w, m_bar }, n, 1.0, 0.01, 4.0, 0.2, opts).unwrap()
    }

    #[test]
    fn finite_population_is_one_at_zero() {
        let opts = AnalyticOptions::default();
        for n in [1, 2, 3] {
            let f = finite(60, 12.0, n, &opts);
            assert!((f.eval(0.0, 4.0).unwrap() - 1.0).abs() < 1e-12, "n={n}");
        }
        let verbatim = AnalyticOptions { exponent: BallExponent::NMinusL, ..opts };
        assert!((finite(60, 12.0, 2, &verbatim).eval(0.0, 4.0).unwrap() - 1.0).abs() < 1e-12);
        let total = AnalyticOptions { xi_population: XiPopulation::Total, ..opts };
        let f = FiniteInterference::new(&GeneralLaplaceParams { w_total: 200, m_bar: 30.0 }, 2, 0.2, 0.01, 4.0, 0.2, &total)
            .unwrap();
        assert!(f.eval(0.0, 4.0).unwrap() < 1.0);
    }

    #[test]
    fn finite_population_approaches_ppp_for_first_neighbor() {
        let opts = AnalyticOptions::default();
        let f = finite(20_000, 4_000.0, 1, &opts);
        for &(s_arg, r_d) in &[(1.0, 2.0), (50.0, 4.0), (500.0, 6.0)] {
            let ppp = laplace_nearest(s_arg, 0.01, r_d, 4.0, 0.2).unwrap();
            let fin = f.eval(s_arg, r_d).unwrap();
            assert!(((fin - ppp) / ppp).abs() < 0.05, "s={s_arg}: {fin} vs {ppp}");
        }
    }

    #[test]
    fn ball_factors_against_quadrature() {
        let opts = AnalyticOptions::default();
        let f = finite(100, 20.0, 2, &opts);
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        let (s_arg, r_d) = (40.0_f64, 5.0_f64);
        let sp = s_arg * 0.2;
        let g = |x: f64| 2.0 * x / (1.0 + sp * x.powi(-4));
        let a = quad_finite(g, 0.0, r_d, &spec).unwrap().value / (r_d * r_d);
        let big_r = f.radius();
        let b = quad_finite(g, r_d, big_r, &spec).unwrap().value / (big_r * big_r - r_d * r_d);
        let (ga, gb) = f.ball_factors(s_arg, r_d).unwrap();
        assert!((ga - a).abs() < 1e-10 && (gb - b).abs() < 1e-10, "{ga} {a} {gb} {b}");
    }

    #[test]
    fn population_guard() {
        let opts = AnalyticOptions::default();
        let r = FiniteInterference::new(&GeneralLaplaceParams { w_total: 6, m_bar: 3.0 }, 3, 0.5, 0.01, 4.0, 0.2, &opts);
        assert!(matches!(r, Err(AnalyticError::PopulationTooSmall { population: 3, n: 3 })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn completely_monotone_in_s(lambda in 1e-3f64..0.1, r_d in 0.5f64..20.0, alpha in 2.3f64..5.0, h in 0.05f64..5.0) {
            let vals: Vec<f64> = (0..6).map(|i| laplace_nearest(f64::from(i) * h, lambda, r_d, alpha, 0.2).unwrap()).collect();
            for w in vals.windows(3) {
                prop_assert!(w[1] - w[0] <= 1e-15);
                prop_assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12);
            }
            for v in &vals {
                prop_assert!(*v > 0.0 && *v <= 1.0);
            }
            let u: Vec<f64> = (0..6)
                .map(|i| laplace_unconditioned(f64::from(i) * h, lambda, alpha, 0.2, GammaProduct::TwoOverAlpha).unwrap())
                .collect();
            for w in u.windows(3) {
                prop_assert!(w[1] - w[0] <= 1e-15);
                prop_assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-12);
            }
        }

        #[test]
        fn decreasing_in_density(lambda in 1e-3f64..0.1, s_arg in 0.01f64..100.0) {
            let a = laplace_nearest(s_arg, lambda, 2.0, 4.0, 0.2).unwrap();
            let b = laplace_nearest(s_arg, lambda * 1.1, 2.0, 4.0, 0.2).unwrap();
            prop_assert!(b <= a);
        }

        #[test]
        fn finite_population_in_unit_interval(s_arg in 0.0f64..1e3, r_d in 0.1f64..30.0, n in 1u32..4) {
            let f = finite(80, 15.0, n, &AnalyticOptions::default());
            let v = f.eval(s_arg, r_d).unwrap();
            prop_assert!(v > 0.0 && v <= 1.0 + 1e-12, "{}", v);
        }
    }
}
