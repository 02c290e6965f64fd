use super::SpecialError;
use crate::real::Real;

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum<T: Real>(z: T) -> T {
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::lit(c) / (z + T::count(i));
    }
    acc
}

fn check_pole<T: Real>(x: T, function: &'static str) -> Result<(), SpecialError> {
    if x.is_nan() || (x <= T::zero() && x == x.floor()) {
        return Err(SpecialError::Domain { function, arg: x.to_f64_lossy() });
    }
    Ok(())
}

/// The gamma function. Negative non-integers go through the reflection
/// formula; zero and negative integers are poles.
pub fn gamma_fn<T: Real>(x: T) -> Result<T, SpecialError> {
    check_pole(x, "gamma_fn")?;
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return Ok(pi / ((pi * x).sin() * gamma_fn(T::one() - x)?));
    }
    if x == x.floor() && x <= T::lit(21.0) {
        // exact factorial for small integers
        let mut acc = T::one();
        let mut i = T::lit(2.0);
        while i < x {
            acc *= i;
            i += T::one();
        }
        return Ok(acc);
    }
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G) + half;
    // split t^(z + 1/2) to delay overflow
    let p = t.powf(half * (z + half));
    Ok(T::lit((2.0 * std::f64::consts::PI).sqrt()) * p * (-t).exp() * p * lanczos_sum(z))
}

/// Natural logarithm of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> Result<T, SpecialError> {
    check_pole(x, "ln_gamma")?;
    let half = T::lit(0.5);
    if x < half {
        let pi = T::PI();
        return Ok((pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x)?);
    }
    let z = x - T::one();
    let t = z + T::lit(LANCZOS_G) + half;
    Ok(T::lit(0.5 * (2.0 * std::f64::consts::PI).ln()) + (z + half) * t.ln() - t + lanczos_sum(z).ln())
}

/// ln C(n, k) for integer arguments.
pub fn ln_binomial<T: Real>(n: u32, k: u32) -> T {
    debug_assert!(k <= n);
    let lg = |v: u32| ln_gamma(T::lit(f64::from(v) + 1.0)).expect("positive argument");
    lg(n) - lg(k) - lg(n - k)
}
