use std::fmt;
use std::str::FromStr;

/// Ordered sweep abscissae, from `start:stop:step` or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridError(String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid grid: {}", self.0)
    }
}

impl std::error::Error for GridError {}

fn number(s: &str) -> Result<f64, GridError> {
    let v: f64 = s.trim().parse().map_err(|_| GridError(format!("`{s}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(GridError(format!("`{s}` is not finite")))
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(GridError(format!("`{spec}` should be start:stop:step")));
            };
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0) {
                return Err(GridError("step must be positive".into()));
            }
            let count = ((stop - start) / step + 1e-9).floor();
            if count < 0.0 {
                return Err(GridError(format!("stop {stop} is below start {start}")));
            }
            if count > 1e6 {
                return Err(GridError(format!("{count} points is too many")));
            }
            // multiply rather than accumulate so the points do not drift
            (0..=count as usize).map(|i| start + step * i as f64).collect()
        } else {
            spec.split(',').map(number).collect::<Result<Vec<_>, _>>()?
        };
        if values.is_empty() {
            return Err(GridError("no points".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GridError(format!("`{spec}` is not strictly increasing")));
        }
        Ok(Grid(values))
    }
}
