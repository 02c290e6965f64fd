use super::{quad_finite, QuadratureSpec, SpecialError};
use crate::real::Real;

// Power series for ∫_0^c w^{p-1} / (1 + w^alpha) dw, valid for c < 1:
// sum_j (-1)^j c^{p + j alpha} / (p + j alpha).
fn alternating_series<T: Real>(c: T, p: T, alpha: T) -> T {
    if c == T::zero() {
        return T::zero();
    }
    let ratio = c.powf(alpha);
    let mut power = c.powf(p);
    let mut sum = T::zero();
    let mut sign = T::one();
    for j in 0..400 {
        let term = power / (p + T::count(j) * alpha);
        sum += sign * term;
        if term <= sum.abs() * T::epsilon() * T::lit(0.25) {
            break;
        }
        power *= ratio;
        sign = -sign;
    }
    sum
}

fn check_alpha<T: Real>(alpha: T) -> Result<(), SpecialError> {
    if !(alpha > T::lit(2.0)) || !alpha.is_finite() {
        return Err(SpecialError::Domain { function: "interference integral (alpha > 2)", arg: alpha.to_f64_lossy() });
    }
    Ok(())
}

/// ∫₀^∞ u/(1+u^α) du = (π/α) / sin(2π/α), the limit of
/// [`interference_integral_l`] as β → ∞.
pub fn interference_integral_l_complete<T: Real>(alpha: T) -> Result<T, SpecialError> {
    check_alpha(alpha)?;
    let pi = T::PI();
    Ok(pi / alpha / (T::lit(2.0) * pi / alpha).sin())
}

/// L(β, α) = ∫_{β^{-1/α}}^∞ u / (1 + u^α) du.
///
/// Substituting u = 1/w turns this into ∫_0^{β^{1/α}} w^{α-3} / (1 + w^α) dw.
/// The part of that range below 1/2 is summed as a power series, a part
/// beyond 2 is taken off the complete integral with the mirrored series, and
/// anything in between is integrated adaptively. β = +∞ is accepted.
pub fn interference_integral_l<T: Real>(beta: T, alpha: T) -> Result<T, SpecialError> {
    check_alpha(alpha)?;
    if !(beta >= T::zero()) {
        return Err(SpecialError::Domain { function: "interference_integral_l(beta)", arg: beta.to_f64_lossy() });
    }
    if beta == T::zero() {
        return Ok(T::zero());
    }
    let complete = interference_integral_l_complete(alpha)?;
    if beta.is_infinite() {
        return Ok(complete);
    }
    let c = beta.powf(alpha.recip());
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let p_low = alpha - two;
    if c <= half {
        return Ok(alternating_series(c, p_low, alpha));
    }
    if c >= two {
        // ∫_c^∞ w^{α-3}/(1+w^α) dw = ∫_0^{1/c} v/(1+v^α) dv
        return Ok(complete - alternating_series(c.recip(), two, alpha));
    }
    let spec = QuadratureSpec::default().with_rel_tol(T::lit(1e-14).max(T::epsilon() * T::lit(16.0)));
    let middle = quad_finite(|w: T| w.powf(alpha - T::lit(3.0)) / (T::one() + w.powf(alpha)), half, c, &spec)?;
    Ok(alternating_series(half, p_low, alpha) + middle.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad_semi_infinite;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn alpha4(beta: f64) -> f64 {
        // antiderivative ½ arctan(u²) evaluated from β^{-1/4} to ∞
        0.5 * (PI / 2.0 - (1.0 / beta.sqrt()).atan())
    }

    #[test]
    fn anchors() {
        assert!((interference_integral_l(1.0_f64, 4.0).unwrap() - PI / 8.0).abs() < 1e-15);
        let want = 0.5 * (PI / 2.0 - (1.0 / 2f64.sqrt()).atan());
        assert!((interference_integral_l(2.0_f64, 4.0).unwrap() - want).abs() < 1e-15);
        assert_eq!(interference_integral_l(0.0_f64, 4.0).unwrap(), 0.0);
        assert!(interference_integral_l(1e-12_f64, 4.0).unwrap() < 1e-5);
        assert!((interference_integral_l(f64::INFINITY, 4.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(interference_integral_l(1.0_f64, 2.0).is_err());
        assert!(interference_integral_l(-1.0_f64, 4.0).is_err());
    }

    #[test]
    fn alpha4_identity_on_log_grid() {
        for i in 0..=120 {
            let beta = 10f64.powf(-3.0 + 6.0 * f64::from(i) / 120.0);
            let got = interference_integral_l(beta, 4.0).unwrap();
            let arctan_form = 0.5 * beta.sqrt().atan();
            assert!(((got - alpha4(beta)) / alpha4(beta)).abs() < 1e-9, "beta={beta}");
            assert!(((got - arctan_form) / arctan_form).abs() < 1e-9, "beta={beta}");
        }
    }

    #[test]
    fn matches_substituted_quadrature() {
        // with t = w^{α-2} the finite form becomes
        // ∫_0^{c^{α-2}} dt / ((α-2)(1 + t^{α/(α-2)})), smooth for every α > 2
        let spec = QuadratureSpec::default().with_rel_tol(1e-13);
        for &alpha in &[2.2_f64, 2.5, 3.0, 3.7, 4.0, 5.5] {
            for &beta in &[1e-3_f64, 0.05, 0.5, 1.0, 3.0, 40.0, 1e4] {
                let top = beta.powf((alpha - 2.0) / alpha);
                let q = alpha / (alpha - 2.0);
                let oracle = quad_finite(|t: f64| 1.0 / ((alpha - 2.0) * (1.0 + t.powf(q))), 0.0, top, &spec).unwrap();
                let got = interference_integral_l(beta, alpha).unwrap();
                assert!(((got - oracle.value) / oracle.value).abs() < 1e-9, "alpha={alpha} beta={beta}: {got} vs {}", oracle.value);
            }
        }
    }

    #[test]
    fn matches_direct_semi_infinite_quadrature() {
        let spec = QuadratureSpec::default().with_rel_tol(1e-12);
        for &alpha in &[3.0_f64, 4.0, 5.5] {
            for &beta in &[1e-2_f64, 0.5, 3.0, 40.0] {
                let lower = beta.powf(-1.0 / alpha);
                let oracle = quad_semi_infinite(|u: f64| u / (1.0 + u.powf(alpha)), lower, &spec).unwrap();
                let got = interference_integral_l(beta, alpha).unwrap();
                assert!(((got - oracle.value) / oracle.value).abs() < 1e-8, "alpha={alpha} beta={beta}: {got} vs {}", oracle.value);
            }
        }
    }

    proptest! {
        #[test]
        fn increasing_in_beta(beta in 1e-4f64..1e4, alpha in 2.05f64..6.0) {
            let a = interference_integral_l(beta, alpha).unwrap();
            let b = interference_integral_l(beta * 1.01, alpha).unwrap();
            prop_assert!(a > 0.0 && b > a);
            prop_assert!(b <= interference_integral_l_complete(alpha).unwrap());
        }
    }
}
