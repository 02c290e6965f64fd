use super::association::association_scale;
use super::coverage::D2dLink;
use super::{converged, AnalyticError, AnalyticOptions, RateResult};
use crate::model::{Densities, Mode, Scenario};
use crate::real::Real;
use crate::special::{interference_integral_l, interference_integral_l_complete, quad_semi_infinite_scaled, QuadratureSpec};

// Outer integral over distance of an inner integral over t = ln(1 + θ).
// The inner runs ten times tighter; its worst error bound is added to the
// outer one.
fn nested<T: Real, W, S, L>(
    quantity: &'static str,
    weight: W,
    outer_scale: T,
    inner_scale: L,
    success: S,
    spec: &QuadratureSpec<T>,
) -> Result<RateResult<T>, AnalyticError>
where
    W: Fn(T) -> T,
    S: Fn(T, T) -> Result<T, AnalyticError>,
    L: Fn(T) -> T,
{
    let inner_spec = spec.tightened(T::lit(10.0));
    let mut failure: Option<AnalyticError> = None;
    let mut inner_error = T::zero();
    let outer = quad_semi_infinite_scaled(
        |r: T| {
            let w = weight(r);
            if w == T::zero() || failure.is_some() {
                return T::zero();
            }
            let inner = quad_semi_infinite_scaled(
                |t: T| {
                    let theta = t.exp_m1();
                    if !theta.is_finite() {
                        return T::zero();
                    }
                    match success(theta, r) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            T::zero()
                        }
                    }
                },
                T::zero(),
                inner_scale(r),
                &inner_spec,
            );
            match inner {
                Ok(i) if i.converged => {
                    inner_error = inner_error.max(i.error);
                    w * i.value
                }
                Ok(i) => {
                    failure.get_or_insert(AnalyticError::NoConvergence {
                        quantity,
                        value: i.value.to_f64_lossy(),
                        error: i.error.to_f64_lossy(),
                    });
                    T::zero()
                }
                Err(e) => {
                    failure.get_or_insert(e.into());
                    T::zero()
                }
            }
        },
        T::zero(),
        outer_scale,
        spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = converged(quantity, outer)?;
    Ok(RateResult { rate_nats: outer.value.max(T::zero()), quadrature_error: outer.error + inner_error })
}

// Natural length of the t integrand: where the smaller of the noise-limited
// and interference-limited SINR thresholds sits.
fn t_scale<T: Real>(theta_noise: T, theta_interference: T) -> T {
    let theta = theta_noise.min(theta_interference);
    theta.ln_1p().max(T::lit(0.5))
}

/// Average rate in nats of a cellular UE,
/// ∫ f_X(r) ∫₀^∞ exp(-θ r^α σ²/P_b - 2πλ_b r² θ^{2/α} L(θ, α)) dt dr with θ = e^t - 1.
pub fn cellular_rate<T: Real>(s: &Scenario<T>, p_assoc: T, opts: &AnalyticOptions<T>) -> Result<RateResult<T>, AnalyticError> {
    s.validate()?;
    if !(p_assoc > T::zero()) || s.k == T::zero() {
        return Err(AnalyticError::NoCellularUsers);
    }
    let pl = T::PI() * s.lambda_b;
    let two_pl = pl + pl;
    let thr = s.gamma / (s.k * s.p_b);
    let l_inf = interference_integral_l_complete(s.alpha)?;
    let alpha = s.alpha;
    nested(
        "cellular rate",
        |r: T| two_pl / p_assoc * r * (-thr * r.powf(alpha) - pl * r * r).exp(),
        association_scale(s),
        |r: T| {
            let noise = s.p_b / (s.sigma2 * r.powf(alpha));
            let interference = (two_pl * r * r * l_inf).powf(-alpha / T::lit(2.0));
            t_scale(noise, interference)
        },
        |theta: T, r: T| {
            let ex = theta * r.powf(alpha) * s.sigma2 / s.p_b
                + two_pl * r * r * theta.powf(T::lit(2.0) / alpha) * interference_integral_l(theta, alpha)?;
            Ok((-ex).exp())
        },
        &opts.quadrature,
    )
}

/// Average rate in nats of a typical HD or FD receiver.
pub fn d2d_rate<T: Real>(mode: Mode, s: &Scenario<T>, d: &Densities<T>, opts: &AnalyticOptions<T>) -> Result<RateResult<T>, AnalyticError> {
    let link = D2dLink::new(mode, s, d, opts)?;
    let c = link.interference_scale()?;
    let noise = link.noise();
    let alpha = s.alpha;
    nested(
        "D2D rate",
        |r: T| if r == T::zero() { T::zero() } else { link.ln_pdf(r).exp() },
        link.length(),
        |r: T| {
            let theta_n = (noise * r.powf(alpha)).recip();
            let theta_i = (c * r * r).powf(-alpha / T::lit(2.0));
            t_scale(theta_n, theta_i)
        },
        |theta: T, r: T| Ok(link.ln_success(theta, r)?.exp()),
        &opts.quadrature,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{association_probability, cellular_coverage_closed_alpha4, ClosedFormPhi, CoverageQuery};
    use crate::model::derive_densities;
    use crate::special::{quad_finite, quad_semi_infinite};

    fn opts() -> AnalyticOptions<f64> {
        AnalyticOptions::default()
    }

    fn setup(s: &Scenario<f64>) -> (f64, Densities<f64>) {
        let p = association_probability(s, &opts()).unwrap();
        (p, derive_densities(s, p).unwrap())
    }

    #[test]
    fn cellular_rate_equals_integrated_closed_coverage() {
        // oracle with the order swapped: ∫ C(e^t - 1) dt using the erf closed form
        let s = Scenario::<f64>::table1();
        let (p, _) = setup(&s);
        let got = cellular_rate(&s, p, &opts()).unwrap();
        let spec = QuadratureSpec::default().with_rel_tol(1e-10);
        let coverage = |t: f64| {
            let beta = t.exp_m1();
            if beta <= 0.0 {
                return 1.0;
            }
            if !beta.is_finite() {
                return 0.0;
            }
            cellular_coverage_closed_alpha4(&CoverageQuery::new(beta, Mode::Cellular).unwrap(), &s, p, ClosedFormPhi::Erf)
                .unwrap()
        };
        let head = quad_finite(coverage, 0.0, 10.0, &spec).unwrap().value;
        let tail = quad_semi_infinite(coverage, 10.0, &spec).unwrap().value;
        let want = head + tail;
        assert!(((got.rate_nats - want) / want).abs() < 1e-6, "{} vs {want}", got.rate_nats);
        assert!(got.quadrature_error >= 0.0);
    }

    #[test]
    fn cellular_rate_limits() {
        let s = Scenario::<f64>::table1();
        let (p, _) = setup(&s);
        let base = cellular_rate(&s, p, &opts()).unwrap().rate_nats;
        let noisy = Scenario { sigma2: s.sigma2 * 1e6, ..s };
        let (pn, _) = setup(&noisy);
        assert!(cellular_rate(&noisy, pn, &opts()).unwrap().rate_nats < base);

        let faint = Scenario { p_b: 1e-12, gamma: 1e-20, ..s };
        let (pf, _) = setup(&faint);
        assert!(cellular_rate(&faint, pf, &opts()).unwrap().rate_nats < 1e-3);
        assert!(matches!(cellular_rate(&s, 0.0, &opts()), Err(AnalyticError::NoCellularUsers)));
    }

    #[test]
    fn pure_fd_rate_closed_integral() {
        let s = Scenario { p_fd: 1.0, sigma2: 0.0, delta: 0.0, ..Scenario::<f64>::table1() };
        let (_, d) = setup(&s);
        let got = d2d_rate(Mode::Fd, &s, &d, &opts()).unwrap().rate_nats;
        let spec = QuadratureSpec::default().with_rel_tol(1e-11);
        let want = quad_semi_infinite(
            |t: f64| {
                let b = t.exp_m1().sqrt();
                1.0 / (1.0 + b * b.atan())
            },
            0.0,
            &spec,
        )
        .unwrap()
        .value;
        assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
    }

    #[test]
    fn heavy_self_interference_hurts_fd() {
        let s = Scenario { delta: 1.0, ..Scenario::<f64>::table1() };
        let (_, d) = setup(&s);
        let hd = d2d_rate(Mode::Hd, &s, &d, &opts()).unwrap().rate_nats;
        let fd = d2d_rate(Mode::Fd, &s, &d, &opts()).unwrap().rate_nats;
        assert!(fd < hd, "fd {fd} hd {hd}");
    }

    #[test]
    fn empty_class_is_flagged() {
        let s = Scenario { p_fd: 0.0, ..Scenario::<f64>::table1() };
        let (_, d) = setup(&s);
        assert!(matches!(d2d_rate(Mode::Fd, &s, &d, &opts()), Err(AnalyticError::NoPairs { mode: Mode::Fd })));
    }
}
