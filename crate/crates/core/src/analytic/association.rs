use super::{clamp_unit, converged, AnalyticError, AnalyticOptions, ClosedFormPhi};
use crate::model::Scenario;
use crate::real::Real;
use crate::special::{erfcx, probability_integral, quad_semi_infinite_scaled};

// Natural length of the association integrand: the smaller of the
// nearest-BS scale and the distance at which the threshold term bites.
pub(crate) fn association_scale<T: Real>(s: &Scenario<T>) -> T {
    let geometric = (T::PI() * s.lambda_b).sqrt().recip();
    if s.gamma > T::zero() && s.k > T::zero() {
        geometric.min((s.k * s.p_b / s.gamma).powf(s.alpha.recip()))
    } else {
        geometric
    }
}

/// Probability that a UE associates with its nearest BS:
/// 2πλ_b ∫₀^∞ exp(-γ r^α/(kP_b) - πλ_b r²) r dr.
pub fn association_probability<T: Real>(s: &Scenario<T>, opts: &AnalyticOptions<T>) -> Result<T, AnalyticError> {
    s.validate()?;
    if s.k == T::zero() {
        return Ok(T::zero());
    }
    if s.gamma == T::zero() {
        return Ok(T::one());
    }
    let a = s.gamma / (s.k * s.p_b);
    let pl = T::PI() * s.lambda_b;
    let two_pl = pl + pl;
    let i = quad_semi_infinite_scaled(
        |r: T| two_pl * r * (-a * r.powf(s.alpha) - pl * r * r).exp(),
        T::zero(),
        association_scale(s),
        &opts.quadrature,
    )?;
    Ok(clamp_unit(converged("association probability", i)?.value))
}

/// The α = 4 closed form πλ_b √(πkP_b/(4γ)) e^{x²} (1 - Φ(x)) with
/// x = πλ_b √(kP_b/(4γ)).
pub fn association_probability_closed_alpha4<T: Real>(s: &Scenario<T>, phi: ClosedFormPhi) -> Result<T, AnalyticError> {
    s.validate()?;
    if s.alpha != T::lit(4.0) {
        return Err(AnalyticError::NeedsAlpha4 { what: "closed-form association", alpha: s.alpha.to_f64_lossy() });
    }
    if s.gamma == T::zero() {
        return Err(AnalyticError::Singular { what: "closed-form association with gamma = 0" });
    }
    if s.k == T::zero() {
        return Err(AnalyticError::Singular { what: "closed-form association with k = 0" });
    }
    let pl = T::PI() * s.lambda_b;
    let root = (s.k * s.p_b / (T::lit(4.0) * s.gamma)).sqrt();
    let x = pl * root;
    let front = pl * (T::PI() * s.k * s.p_b / (T::lit(4.0) * s.gamma)).sqrt();
    Ok(front * tail(x, phi))
}

// e^{x²} (1 - Φ(x)) or e^{x²} erfc(x).
pub(crate) fn tail<T: Real>(x: T, phi: ClosedFormPhi) -> T {
    match phi {
        ClosedFormPhi::Footnote => (x * x).exp() * (T::one() - probability_integral(x)),
        ClosedFormPhi::Erf => erfcx(x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{quad_finite, QuadratureSpec};

    fn opts() -> AnalyticOptions<f64> {
        AnalyticOptions::default()
    }

    // Independent oracle: the same integral with a plain truncated finite
    // quadrature, cut off where both exponentials have died.
    fn oracle(s: &Scenario<f64>) -> f64 {
        let a = s.gamma / (s.k * s.p_b);
        let pl = std::f64::consts::PI * s.lambda_b;
        let top = 12.0 * (1.0 / pl.sqrt()).min(a.powf(-0.25));
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        quad_finite(|r: f64| 2.0 * pl * r * (-a * r.powi(4) - pl * r * r).exp(), 0.0, top, &spec).unwrap().value
    }

    #[test]
    fn limits() {
        let mut s = Scenario::<f64>::table1();
        s.k = 0.0;
        assert_eq!(association_probability(&s, &opts()).unwrap(), 0.0);
        let mut s = Scenario::<f64>::table1();
        s.gamma = 0.0;
        assert_eq!(association_probability(&s, &opts()).unwrap(), 1.0);
    }

    #[test]
    fn table1_against_oracle() {
        for &k in &[0.25, 1.0, 4.0, 1e3] {
            let mut s = Scenario::<f64>::table1();
            s.k = k;
            let got = association_probability(&s, &opts()).unwrap();
            let want = oracle(&s);
            assert!(((got - want) / want).abs() < 1e-8, "k={k}: {got} vs {want}");
            assert!(got > 0.0 && got < 1.0);
        }
    }

    #[test]
    fn erf_closed_form_matches_integral() {
        for &k in &[0.25, 1.0, 4.0, 1e6] {
            let mut s = Scenario::<f64>::table1();
            s.k = k;
            let closed = association_probability_closed_alpha4(&s, ClosedFormPhi::Erf).unwrap();
            let general = association_probability(&s, &opts()).unwrap();
            assert!((closed - general).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn large_bias_tends_to_one() {
        let mut s = Scenario::<f64>::table1();
        s.k = 1e14;
        let closed = association_probability_closed_alpha4(&s, ClosedFormPhi::Erf).unwrap();
        assert!(closed > 0.99, "{closed}");
        assert!(association_probability(&s, &opts()).unwrap() > 0.99);
    }

    #[test]
    fn closed_form_rejections() {
        let mut s = Scenario::<f64>::table1();
        s.gamma = 0.0;
        assert!(matches!(
            association_probability_closed_alpha4(&s, ClosedFormPhi::Footnote),
            Err(AnalyticError::Singular { .. })
        ));
        let mut s = Scenario::<f64>::table1();
        s.alpha = 3.5;
        assert!(matches!(
            association_probability_closed_alpha4(&s, ClosedFormPhi::Erf),
            Err(AnalyticError::NeedsAlpha4 { .. })
        ));
    }

    #[test]
    fn monotone_in_arguments() {
        let base = Scenario::<f64>::table1();
        let p = |s: &Scenario<f64>| association_probability(s, &opts()).unwrap();
        let mut prev = 0.0;
        for &k in &[0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
            let v = p(&Scenario { k, ..base });
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for &lb in &[1e-8, 1e-7, 1e-6, 1e-5, 1e-4] {
            let v = p(&Scenario { lambda_b: lb, ..base });
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 1.0;
        for &g in &[1e-9, 1e-6, 1e-3, 1.0] {
            let v = p(&Scenario { gamma: g, ..base });
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn single_precision_agrees() {
        let s32 = Scenario::<f32>::table1();
        let s64 = Scenario::<f64>::table1();
        let a = association_probability(&s32, &AnalyticOptions::default()).unwrap();
        let b = association_probability(&s64, &opts()).unwrap();
        assert!((f64::from(a) - b).abs() / b < 1e-4);
    }
}
