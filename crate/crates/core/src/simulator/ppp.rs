use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use super::SimError;

/// Points of one PPP realisation on a disc centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointField {
    pub points: Vec<[f64; 2]>,
    pub window_radius: f64,
    pub intensity: f64,
}

impl PointField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws a Poisson(λπR²) count and scatters that many points uniformly on
/// the disc of radius `window_radius`.
pub fn sample_ppp<R: Rng + ?Sized>(intensity: f64, window_radius: f64, rng: &mut R) -> Result<PointField, SimError> {
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(SimError::InvalidArgument { what: "intensity", value: intensity });
    }
    if !(window_radius > 0.0) || !window_radius.is_finite() {
        return Err(SimError::InvalidArgument { what: "window_radius", value: window_radius });
    }
    let mean = intensity * std::f64::consts::PI * window_radius * window_radius;
    let count = poisson_count(mean, rng)?;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        points.push(uniform_in_disc(window_radius, rng));
    }
    Ok(PointField { points, window_radius, intensity })
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize, SimError> {
    if mean == 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|_| SimError::InvalidArgument { what: "Poisson mean", value: mean })?;
    Ok(dist.sample(rng) as usize)
}

pub(crate) fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    [r * phi.cos(), r * phi.sin()]
}
