use super::AnalyticError;
use crate::model::Scenario;
use crate::real::Real;
use crate::special::ln_gamma;

fn check_distance<T: Real>(r: T) -> Result<(), AnalyticError> {
    if !(r >= T::zero()) {
        return Err(AnalyticError::Domain { what: "distance", value: r.to_f64_lossy() });
    }
    Ok(())
}

/// Rayleigh density 2πλ r e^{-πλr²} of the nearest-BS distance.
pub fn nearest_bs_pdf<T: Real>(r: T, lambda_b: T) -> Result<T, AnalyticError> {
    nth_neighbor_pdf(r, 1, lambda_b)
}

/// Density of the distance to the n-th nearest point of a PPP:
/// 2 (λπ)^n r^{2n-1} e^{-πλr²} / Γ(n).
pub fn nth_neighbor_pdf<T: Real>(r: T, n: u32, lambda: T) -> Result<T, AnalyticError> {
    check_distance(r)?;
    if n < 1 {
        return Err(AnalyticError::Domain { what: "neighbor order", value: f64::from(n) });
    }
    if !(lambda >= T::zero()) {
        return Err(AnalyticError::Domain { what: "density", value: lambda.to_f64_lossy() });
    }
    if r == T::zero() || lambda == T::zero() || r.is_infinite() {
        return Ok(T::zero());
    }
    let pl = T::PI() * lambda;
    let nn = T::lit(f64::from(n));
    if n == 1 {
        return Ok(T::lit(2.0) * pl * r * (-pl * r * r).exp());
    }
    let ln = T::LN_2() - ln_gamma(nn)? + nn * pl.ln() + (nn + nn - T::one()) * r.ln() - pl * r * r;
    Ok(ln.exp())
}

/// Density of the distance between a cellular UE and its serving BS,
/// (2πλ_b/𝒫) x exp(-γx^α/(kP_b) - πλ_b x²).
pub fn serving_bs_distance_pdf<T: Real>(x: T, s: &Scenario<T>, p_assoc: T) -> Result<T, AnalyticError> {
    check_distance(x)?;
    if !(p_assoc > T::zero()) {
        return Err(AnalyticError::NoCellularUsers);
    }
    if s.k == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    let pl = T::PI() * s.lambda_b;
    let thr = s.gamma * x.powf(s.alpha) / (s.k * s.p_b);
    Ok((pl + pl) / p_assoc * x * (-thr - pl * x * x).exp())
}
