use crate::real::Real;

// Below this argument erf comes from its all-positive power series; above,
// erfc comes from the Laplace continued fraction.
const SWITCH: f64 = 2.5;

fn erf_series<T: Real>(x: T) -> T {
    // erf x = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (2n+1)!!
    let two_x2 = T::lit(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0usize;
    loop {
        n += 1;
        term = term * two_x2 / T::count(2 * n + 1);
        sum += term;
        if term <= sum * T::epsilon() * T::lit(0.5) || n > 500 {
            break;
        }
    }
    T::lit(2.0 / std::f64::consts::PI.sqrt()) * (-x * x).exp() * sum
}

// e^{x^2} erfc(x) for x >= SWITCH, by modified Lentz on
// erfc x = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
fn erfcx_fraction<T: Real>(x: T) -> T {
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for m in 1..2000 {
        let a = T::lit(0.5) * T::count(m);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = c * d;
        f *= delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    T::one() / (T::PI().sqrt() * f)
}

/// The error function.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return -erf(-x);
    }
    if x < T::lit(SWITCH) {
        erf_series(x)
    } else {
        T::one() - erfc(x)
    }
}

/// The complementary error function.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return T::lit(2.0) - erfc(-x);
    }
    if x < T::lit(SWITCH) {
        T::one() - erf_series(x)
    } else {
        let e = (-x * x).exp();
        if e == T::zero() {
            return e;
        }
        e * erfcx_fraction(x)
    }
}

/// Scaled complementary error function e^{x^2} erfc(x), finite for large x.
pub fn erfcx<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return T::lit(2.0) * (x * x).exp() - erfcx(-x);
    }
    if x < T::lit(SWITCH) {
        (x * x).exp() * (T::one() - erf_series(x))
    } else {
        erfcx_fraction(x)
    }
}

/// The probability integral Φ(x) = (1/√(2π)) ∫₀ˣ e^{-t²} dt, odd in x.
///
/// This normalisation is not that of the standard normal CDF nor of erf:
/// Φ(x) = erf(x) / (2√2), saturating at 1/(2√2) ≈ 0.353553.
pub fn probability_integral<T: Real>(x: T) -> T {
    erf(x) / T::lit(2.0 * std::f64::consts::SQRT_2)
}
