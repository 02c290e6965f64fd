use serde::Serialize;

use super::{association_probability, cellular_rate, d2d_rate, AnalyticError, AnalyticOptions};
use crate::model::{derive_densities, Densities, Mode, Scenario};
use crate::real::Real;

/// Sum throughput T = λ_c R_c + λ_d R_d and its parts. Rates are in nats
/// and throughputs in nats per square metre. A rate is `None` when its mode
/// has zero density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Throughput<T> {
    pub densities: Densities<T>,
    pub rate_cellular: Option<T>,
    pub rate_hd: Option<T>,
    pub rate_fd: Option<T>,
    /// λ_c R_c.
    pub cellular: T,
    /// λ_d R_d with R_d = P_HD R_HD + P_FD R_FD.
    pub d2d: T,
    pub total: T,
}

pub fn sum_throughput<T: Real>(s: &Scenario<T>, opts: &AnalyticOptions<T>) -> Result<Throughput<T>, AnalyticError> {
    let p = association_probability(s, opts)?;
    let d = derive_densities(s, p)?;
    let rate_cellular = if d.lambda_c > T::zero() { Some(cellular_rate(s, p, opts)?.rate_nats) } else { None };
    let rate_hd = if d.lambda_hd_tx > T::zero() { Some(d2d_rate(Mode::Hd, s, &d, opts)?.rate_nats) } else { None };
    let rate_fd = if d.lambda_fd > T::zero() { Some(d2d_rate(Mode::Fd, s, &d, opts)?.rate_nats) } else { None };
    let fd_factor = if opts.fd_per_pair { T::lit(2.0) } else { T::one() };
    let r_d = s.p_hd() * rate_hd.unwrap_or(T::zero()) + s.p_fd * fd_factor * rate_fd.unwrap_or(T::zero());
    let cellular = d.lambda_c * rate_cellular.unwrap_or(T::zero());
    let d2d = d.lambda_d * r_d;
    Ok(Throughput { densities: d, rate_cellular, rate_hd, rate_fd, cellular, d2d, total: cellular + d2d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_d2d_has_no_cellular_term() {
        let s = Scenario { k: 0.0, p_fd: 0.0, ..Scenario::<f64>::table1() };
        let t = sum_throughput(&s, &AnalyticOptions::default()).unwrap();
        assert_eq!(t.cellular, 0.0);
        assert!(t.rate_cellular.is_none() && t.rate_fd.is_none());
        assert!((t.total - s.lambda_u * t.rate_hd.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn parts_add_up() {
        let s = Scenario::<f64>::table1();
        let opts = AnalyticOptions::default();
        let t = sum_throughput(&s, &opts).unwrap();
        let d = t.densities;
        let want = d.lambda_c * t.rate_cellular.unwrap()
            + d.lambda_d * (s.p_hd() * t.rate_hd.unwrap() + s.p_fd * t.rate_fd.unwrap());
        assert!((t.total - want).abs() <= 1e-15 * want);
        let doubled = sum_throughput(&s, &AnalyticOptions { fd_per_pair: true, ..opts }).unwrap();
        assert!((doubled.d2d - t.d2d - d.lambda_d * s.p_fd * t.rate_fd.unwrap()).abs() <= 1e-12 * t.d2d);
    }
}
