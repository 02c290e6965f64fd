use super::{ln_gamma, SpecialError};
use crate::real::Real;

// Lentz evaluation of the incomplete-beta continued fraction.
fn beta_fraction<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let one = T::one();
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = T::count(m);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let delta = d * c;
        h *= delta;
        if (delta - one).abs() <= T::epsilon() {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn reg_incomplete_beta<T: Real>(x: T, a: T, b: T) -> Result<T, SpecialError> {
    if !(a > T::zero()) || !a.is_finite() {
        return Err(SpecialError::Domain { function: "reg_incomplete_beta(a)", arg: a.to_f64_lossy() });
    }
    if !(b > T::zero()) || !b.is_finite() {
        return Err(SpecialError::Domain { function: "reg_incomplete_beta(b)", arg: b.to_f64_lossy() });
    }
    if !(x >= T::zero() && x <= T::one()) {
        return Err(SpecialError::Domain { function: "reg_incomplete_beta(x)", arg: x.to_f64_lossy() });
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let one = T::one();
    let ln_front = ln_gamma(a + b)? - ln_gamma(a)? - ln_gamma(b)? + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    let value = if x < (a + one) / (a + b + T::lit(2.0)) {
        front * beta_fraction(a, b, x) / a
    } else {
        one - front * beta_fraction(b, a, one - x) / b
    };
    Ok(value.max(T::zero()).min(one))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::ln_binomial;
    use crate::special::{quad_finite, QuadratureSpec};
    use proptest::prelude::*;

    #[test]
    fn boundaries_and_uniform() {
        assert_eq!(reg_incomplete_beta(0.0_f64, 2.5, 3.0).unwrap(), 0.0);
        assert_eq!(reg_incomplete_beta(1.0_f64, 2.5, 3.0).unwrap(), 1.0);
        for &x in &[0.1, 0.37, 0.5, 0.9] {
            assert!((reg_incomplete_beta(x, 1.0_f64, 1.0).unwrap() - x).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_half_against_density_quadrature() {
        let got = reg_incomplete_beta(0.5_f64, 2.0, 2.0).unwrap();
        assert!((got - 0.5).abs() < 1e-15);
        // beta(2,2) density is 6 x (1 - x)
        let spec = QuadratureSpec::default().with_rel_tol(1e-13);
        for &x in &[0.2, 0.5, 0.8] {
            let oracle = quad_finite(|t: f64| 6.0 * t * (1.0 - t), 0.0, x, &spec).unwrap().value;
            assert!((reg_incomplete_beta(x, 2.0, 2.0).unwrap() - oracle).abs() < 1e-13);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(reg_incomplete_beta(1.5_f64, 1.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5_f64, 0.0, 1.0).is_err());
        assert!(reg_incomplete_beta(0.5_f64, 1.0, -2.0).is_err());
    }

    fn binomial_cdf(k: u32, f: u32, p: f64) -> f64 {
        (0..=f)
            .map(|l| {
                let lb: f64 = ln_binomial(k, l);
                (lb + f64::from(l) * p.ln() + f64::from(k - l) * (1.0 - p).ln()).exp()
            })
            .sum()
    }

    proptest! {
        // P[Bin(k, p) <= f] = I_{1-p}(k - f, f + 1)
        #[test]
        fn matches_binomial_cdf(k in 1u32..250, f_frac in 0.0f64..1.0, p in 0.001f64..0.999) {
            let f = ((f64::from(k - 1)) * f_frac).floor() as u32;
            let want = binomial_cdf(k, f, p);
            let got = reg_incomplete_beta(1.0 - p, f64::from(k - f), f64::from(f + 1)).unwrap();
            prop_assert!((got - want).abs() < 1e-11, "k={} f={} p={} got={} want={}", k, f, p, got, want);
        }

        #[test]
        fn monotone_in_x(a in 0.2f64..20.0, b in 0.2f64..20.0, x in 0.0f64..0.99) {
            let lo = reg_incomplete_beta(x, a, b).unwrap();
            let hi = reg_incomplete_beta(x + 0.01, a, b).unwrap();
            prop_assert!(hi >= lo - 1e-15);
            prop_assert!((0.0..=1.0).contains(&lo));
        }
    }
}
