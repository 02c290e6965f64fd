//! Scenario parameters, unit conversion and derived process densities.
//!
//! A scenario file is flat UTF-8 text with one `key = value` pair per line.
//! `#` starts a comment. Power-like keys carry their unit in the key name and
//! may repeat it as a suffix on the value:
//!
//! ```text
//! # Table 1 style deployment
//! lambda_b   = 1e-6
//! lambda_u   = 0.1
//! p_b_dbm    = 40 dBm
//! p_d_dbm    = 23 dBm
//! gamma_dbm  = 0 dBm
//! sigma2_dbm = -96 dBm
//! k          = 1
//! alpha      = 4
//! delta_db   = -50 dB
//! p_fd       = 0.5
//! n          = 1
//! ```
//!
//! `gamma_dbm` and `sigma2_dbm` accept `-inf` for a zero-watt value. The
//! self-interference factor may be given either as `delta_db` or as a linear
//! `delta`, never both. `w_total` and `m_bar` are optional but must appear
//! together; they configure the finite-population interference model.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::real::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: key `{key}`: malformed number `{value}`")]
    Malformed { line: usize, key: String, value: String },
    #[error("line {line}: key `{key}`: expected unit `{expected}`, found `{found}`")]
    WrongUnit { line: usize, key: String, expected: &'static str, found: String },
    #[error("missing required key `{key}`")]
    MissingKey { key: &'static str },
    #[error("keys `delta` and `delta_db` are mutually exclusive")]
    ConflictingKeys,
    #[error("`{key}` = {value}: violates {rule}")]
    OutOfRange { key: &'static str, rule: &'static str, value: f64 },
    #[error("non-finite input to {what}")]
    NonFinite { what: &'static str },
}

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts<T: Real>(dbm: T) -> Result<T, ModelError> {
    if !dbm.is_finite() {
        return Err(ModelError::NonFinite { what: "dbm_to_watts" });
    }
    Ok(T::lit(10.0).powf((dbm - T::lit(30.0)) / T::lit(10.0)))
}

/// Converts watts to dBm. Zero watts maps to negative infinity.
pub fn watts_to_dbm<T: Real>(watts: T) -> T {
    T::lit(10.0) * watts.log10() + T::lit(30.0)
}

/// Converts a dB ratio to a linear factor.
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

pub fn linear_to_db<T: Real>(x: T) -> T {
    T::lit(10.0) * x.log10()
}

/// Operating mode of a typical UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cellular,
    Hd,
    Fd,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Cellular, Mode::Hd, Mode::Fd];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Cellular => "cellular",
            Mode::Hd => "hd",
            Mode::Fd => "fd",
        }
    }

    pub fn is_d2d(self) -> bool {
        !matches!(self, Mode::Cellular)
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cellular" | "c" => Ok(Mode::Cellular),
            "hd" => Ok(Mode::Hd),
            "fd" => Ok(Mode::Fd),
            other => Err(format!("unknown mode `{other}` (expected cellular, hd or fd)")),
        }
    }
}

/// Finite-population parameters for the n-th neighbor interference model:
/// `w_total` UEs in total, of which a Poisson number with mean `m_bar`
/// transmit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralLaplaceParams<T> {
    pub w_total: u32,
    pub m_bar: T,
}

impl<T: Real> GeneralLaplaceParams<T> {
    pub fn new(w_total: u32, m_bar: T, n: u32) -> Result<Self, ModelError> {
        let p = Self { w_total, m_bar };
        p.validate(n)?;
        Ok(p)
    }

    pub fn validate(&self, n: u32) -> Result<(), ModelError> {
        if self.w_total < n + 1 {
            return Err(ModelError::OutOfRange {
                key: "w_total",
                rule: "w_total >= n + 1",
                value: f64::from(self.w_total),
            });
        }
        if !(self.m_bar > T::one()) {
            return Err(ModelError::OutOfRange {
                key: "m_bar",
                rule: "m_bar > 1",
                value: self.m_bar.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// All physical and system parameters of one deployment. Powers are in
/// watts and densities in points per square metre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario<T> {
    /// BS density.
    pub lambda_b: T,
    /// UE density.
    pub lambda_u: T,
    /// BS transmit power.
    pub p_b: T,
    /// D2D transmit power.
    pub p_d: T,
    /// Association threshold on the biased received power.
    pub gamma: T,
    /// Bias factor; zero forces D2D mode.
    pub k: T,
    /// Path-loss exponent.
    pub alpha: T,
    /// Noise power.
    pub sigma2: T,
    /// Residual self-interference factor of a full-duplex transceiver.
    pub delta: T,
    /// Probability that a DUE is full-duplex capable.
    pub p_fd: T,
    /// Pairing neighbor order.
    pub n: u32,
    /// Optional finite-population model parameters.
    pub general: Option<GeneralLaplaceParams<T>>,
}

impl<T: Real> Scenario<T> {
    /// The simulation parameters of the reference deployment: lambda_b =
    /// 1e-6, lambda_u = 0.1, P_b = 40 dBm, P_d = 23 dBm, gamma = 0 dBm,
    /// sigma^2 = -96 dBm, alpha = 4, Delta = -50 dB. The bias, the FD
    /// probability and the neighbor order are not fixed there; this picks
    /// k = 1, p_fd = 0.5 and n = 1.
    pub fn table1() -> Self {
        let w = |dbm: f64| dbm_to_watts(T::lit(dbm)).expect("finite literal");
        Self {
            lambda_b: T::lit(1e-6),
            lambda_u: T::lit(0.1),
            p_b: w(40.0),
            p_d: w(23.0),
            gamma: w(0.0),
            k: T::one(),
            alpha: T::lit(4.0),
            sigma2: w(-96.0),
            delta: db_to_linear(T::lit(-50.0)),
            p_fd: T::lit(0.5),
            n: 1,
            general: None,
        }
    }

    pub fn p_hd(&self) -> T {
        T::one() - self.p_fd
    }

    /// Checks every invariant and names the first violated one.
    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, key: &'static str, rule: &'static str, v: T| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::OutOfRange { key, rule, value: v.to_f64_lossy() })
            }
        };
        let z = T::zero();
        let one = T::one();
        check(self.lambda_b > z && self.lambda_b.is_finite(), "lambda_b", "lambda_b > 0", self.lambda_b)?;
        check(self.lambda_u > z && self.lambda_u.is_finite(), "lambda_u", "lambda_u > 0", self.lambda_u)?;
        check(self.p_b > z && self.p_b.is_finite(), "p_b", "p_b > 0", self.p_b)?;
        check(self.p_d > z && self.p_d.is_finite(), "p_d", "p_d > 0", self.p_d)?;
        check(self.gamma >= z && self.gamma.is_finite(), "gamma", "gamma >= 0", self.gamma)?;
        check(self.k >= z && !self.k.is_nan(), "k", "k >= 0", self.k)?;
        check(self.alpha > T::lit(2.0) && self.alpha.is_finite(), "alpha", "alpha > 2", self.alpha)?;
        check(self.sigma2 >= z && self.sigma2.is_finite(), "sigma2", "sigma2 >= 0", self.sigma2)?;
        check(self.delta >= z && self.delta <= one, "delta", "0 <= delta <= 1", self.delta)?;
        check(self.p_fd >= z && self.p_fd <= one, "p_fd", "0 <= p_fd <= 1", self.p_fd)?;
        if self.n < 1 {
            return Err(ModelError::OutOfRange { key: "n", rule: "n >= 1", value: f64::from(self.n) });
        }
        if let Some(g) = &self.general {
            g.validate(self.n)?;
        }
        Ok(())
    }
}

/// Process intensities that follow from the association probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Densities<T> {
    pub p_assoc: T,
    /// CUE density.
    pub lambda_c: T,
    /// DUE density.
    pub lambda_d: T,
    /// Density of HD transmitters (half of the HD users).
    pub lambda_hd_tx: T,
    /// Density of FD transceivers.
    pub lambda_fd: T,
}

pub fn derive_densities<T: Real>(s: &Scenario<T>, p_assoc: T) -> Result<Densities<T>, ModelError> {
    if !(p_assoc >= T::zero() && p_assoc <= T::one()) {
        return Err(ModelError::OutOfRange {
            key: "p_assoc",
            rule: "0 <= p_assoc <= 1",
            value: p_assoc.to_f64_lossy(),
        });
    }
    let lambda_c = s.lambda_u * p_assoc;
    let lambda_d = s.lambda_u * (T::one() - p_assoc);
    Ok(Densities {
        p_assoc,
        lambda_c,
        lambda_d,
        lambda_hd_tx: T::lit(0.5) * lambda_d * (T::one() - s.p_fd),
        lambda_fd: lambda_d * s.p_fd,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Unit {
    None,
    Dbm,
    Db,
}

const KEYS: &[(&str, Unit)] = &[
    ("lambda_b", Unit::None),
    ("lambda_u", Unit::None),
    ("p_b_dbm", Unit::Dbm),
    ("p_d_dbm", Unit::Dbm),
    ("gamma_dbm", Unit::Dbm),
    ("sigma2_dbm", Unit::Dbm),
    ("k", Unit::None),
    ("alpha", Unit::None),
    ("delta_db", Unit::Db),
    ("delta", Unit::None),
    ("p_fd", Unit::None),
    ("n", Unit::None),
    ("w_total", Unit::None),
    ("m_bar", Unit::None),
];

struct Entry {
    line: usize,
    value: f64,
}

fn parse_value(line: usize, key: &str, unit: Unit, raw: &str) -> Result<f64, ModelError> {
    let mut parts = raw.split_whitespace();
    let number = parts.next().unwrap_or("");
    let suffix = parts.next();
    if parts.next().is_some() {
        return Err(ModelError::Malformed { line, key: key.to_string(), value: raw.to_string() });
    }
    let (expected, ok) = match (unit, suffix) {
        (_, None) => ("", true),
        (Unit::Dbm, Some(u)) => ("dBm", u.eq_ignore_ascii_case("dbm")),
        (Unit::Db, Some(u)) => ("dB", u.eq_ignore_ascii_case("db")),
        (Unit::None, Some(_)) => ("", false),
    };
    if !ok {
        return Err(ModelError::WrongUnit {
            line,
            key: key.to_string(),
            expected: if expected.is_empty() { "none" } else { expected },
            found: suffix.unwrap_or_default().to_string(),
        });
    }
    let value: f64 = number
        .parse()
        .map_err(|_| ModelError::Malformed { line, key: key.to_string(), value: raw.to_string() })?;
    if value.is_nan() || (value.is_infinite() && !(unit == Unit::Dbm && value < 0.0)) {
        return Err(ModelError::Malformed { line, key: key.to_string(), value: raw.to_string() });
    }
    Ok(value)
}

/// Parses and validates a scenario document.
pub fn parse_scenario<T: Real>(text: &str) -> Result<Scenario<T>, ModelError> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ModelError::Syntax { line, text: content.to_string() })?;
        let key = key.trim();
        let &(name, unit) = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| ModelError::UnknownKey { line, key: key.to_string() })?;
        let value = parse_value(line, name, unit, value.trim())?;
        if entries.insert(name, Entry { line, value }).is_some() {
            return Err(ModelError::DuplicateKey { line, key: name.to_string() });
        }
    }

    let get = |key: &'static str| -> Result<f64, ModelError> {
        entries.get(key).map(|e| e.value).ok_or(ModelError::MissingKey { key })
    };
    let power = |key: &'static str| -> Result<T, ModelError> {
        let dbm = get(key)?;
        if dbm == f64::NEG_INFINITY {
            Ok(T::zero())
        } else {
            dbm_to_watts(T::lit(dbm))
        }
    };
    let integer = |key: &'static str, v: f64| -> Result<u32, ModelError> {
        if v.fract() != 0.0 || v < 0.0 || v > f64::from(u32::MAX) {
            let line = entries.get(key).map(|e| e.line).unwrap_or(0);
            return Err(ModelError::Malformed { line, key: key.to_string(), value: v.to_string() });
        }
        Ok(v as u32)
    };

    let delta = match (entries.get("delta"), entries.get("delta_db")) {
        (Some(_), Some(_)) => return Err(ModelError::ConflictingKeys),
        (Some(e), None) => T::lit(e.value),
        (None, Some(e)) => {
            if e.value == f64::NEG_INFINITY {
                T::zero()
            } else {
                db_to_linear(T::lit(e.value))
            }
        }
        (None, None) => return Err(ModelError::MissingKey { key: "delta_db" }),
    };

    let general = match (entries.get("w_total"), entries.get("m_bar")) {
        (None, None) => None,
        (Some(w), Some(m)) => Some(GeneralLaplaceParams {
            w_total: integer("w_total", w.value)?,
            m_bar: T::lit(m.value),
        }),
        (Some(_), None) => return Err(ModelError::MissingKey { key: "m_bar" }),
        (None, Some(_)) => return Err(ModelError::MissingKey { key: "w_total" }),
    };

    let scenario = Scenario {
        lambda_b: T::lit(get("lambda_b")?),
        lambda_u: T::lit(get("lambda_u")?),
        p_b: power("p_b_dbm")?,
        p_d: power("p_d_dbm")?,
        gamma: power("gamma_dbm")?,
        k: T::lit(get("k")?),
        alpha: T::lit(get("alpha")?),
        sigma2: power("sigma2_dbm")?,
        delta,
        p_fd: T::lit(get("p_fd")?),
        n: integer("n", get("n")?)?,
        general,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Renders a scenario back into the file format.
pub fn format_scenario<T: Real>(s: &Scenario<T>) -> String {
    let dbm = |w: T| {
        if w == T::zero() {
            "-inf".to_string()
        } else {
            format!("{}", watts_to_dbm(w).to_f64_lossy())
        }
    };
    let mut out = String::new();
    out.push_str(&format!("lambda_b = {}\n", s.lambda_b.to_f64_lossy()));
    out.push_str(&format!("lambda_u = {}\n", s.lambda_u.to_f64_lossy()));
    out.push_str(&format!("p_b_dbm = {} dBm\n", dbm(s.p_b)));
    out.push_str(&format!("p_d_dbm = {} dBm\n", dbm(s.p_d)));
    out.push_str(&format!("gamma_dbm = {} dBm\n", dbm(s.gamma)));
    out.push_str(&format!("sigma2_dbm = {} dBm\n", dbm(s.sigma2)));
    out.push_str(&format!("k = {}\n", s.k.to_f64_lossy()));
    out.push_str(&format!("alpha = {}\n", s.alpha.to_f64_lossy()));
    out.push_str(&format!("delta = {}\n", s.delta.to_f64_lossy()));
    out.push_str(&format!("p_fd = {}\n", s.p_fd.to_f64_lossy()));
    out.push_str(&format!("n = {}\n", s.n));
    if let Some(g) = &s.general {
        out.push_str(&format!("w_total = {}\n", g.w_total));
        out.push_str(&format!("m_bar = {}\n", g.m_bar.to_f64_lossy()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const TABLE1: &str = "\
# reference deployment
lambda_b = 1e-6
lambda_u = 0.1
p_b_dbm = 40 dBm
p_d_dbm = 23 dBm
gamma_dbm = 0 dBm
sigma2_dbm = -96 dBm   # total noise over the band
k = 1
alpha = 4
delta_db = -50 dB
p_fd = 0.5
n = 1
";

    #[test]
    fn dbm_anchors() {
        assert_relative_eq!(dbm_to_watts(30.0_f64).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(0.0_f64).unwrap(), 0.001, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(23.0_f64).unwrap(), 10f64.powf(-0.7), max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(23.0_f64).unwrap(), 0.19953, max_relative = 2e-5);
        assert!(dbm_to_watts(f64::NAN).is_err());
        assert!(dbm_to_watts(f64::INFINITY).is_err());
    }

    #[test]
    fn parses_table1() {
        let s: Scenario<f64> = parse_scenario(TABLE1).unwrap();
        assert_relative_eq!(s.p_b, 10.0, max_relative = 1e-12);
        assert_relative_eq!(s.p_d, 0.199526, max_relative = 1e-5);
        assert_relative_eq!(s.gamma, 0.001, max_relative = 1e-12);
        assert_relative_eq!(s.sigma2, 2.51189e-13, max_relative = 1e-5);
        assert_relative_eq!(s.delta, 1e-5, max_relative = 1e-12);
        assert_eq!(s, Scenario::table1());
    }

    #[test]
    fn delta_db_matches_manual_conversion() {
        let s: Scenario<f64> = parse_scenario(TABLE1).unwrap();
        // 10^(-50/10) computed independently of db_to_linear
        assert_relative_eq!(s.delta, (-50.0_f64 / 10.0 * std::f64::consts::LN_10).exp(), max_relative = 1e-12);
    }

    #[test]
    fn rejects_alpha_two() {
        let doc = TABLE1.replace("alpha = 4", "alpha = 2");
        let err = parse_scenario::<f64>(&doc).unwrap_err();
        assert!(err.to_string().contains("alpha > 2"), "{err}");
    }

    #[test]
    fn rejection_paths_name_the_key() {
        let missing = TABLE1.replace("k = 1\n", "");
        assert_eq!(parse_scenario::<f64>(&missing).unwrap_err(), ModelError::MissingKey { key: "k" });

        let unknown = format!("{TABLE1}colour = 3\n");
        let err = parse_scenario::<f64>(&unknown).unwrap_err();
        assert_eq!(err, ModelError::UnknownKey { line: TABLE1.lines().count() + 1, key: "colour".into() });

        let malformed = TABLE1.replace("lambda_u = 0.1", "lambda_u = zero.1");
        assert!(matches!(parse_scenario::<f64>(&malformed), Err(ModelError::Malformed { line: 3, .. })));

        let unit = TABLE1.replace("p_d_dbm = 23 dBm", "p_d_dbm = 23 dB");
        assert!(matches!(parse_scenario::<f64>(&unit), Err(ModelError::WrongUnit { line: 5, .. })));

        let dup = format!("{TABLE1}k = 2\n");
        assert!(matches!(parse_scenario::<f64>(&dup), Err(ModelError::DuplicateKey { .. })));

        let both = format!("{TABLE1}delta = 0.1\n");
        assert_eq!(parse_scenario::<f64>(&both).unwrap_err(), ModelError::ConflictingKeys);

        let pfd = TABLE1.replace("p_fd = 0.5", "p_fd = 1.5");
        assert!(parse_scenario::<f64>(&pfd).unwrap_err().to_string().contains("p_fd"));

        let syntax = format!("{TABLE1}just words\n");
        assert!(matches!(parse_scenario::<f64>(&syntax), Err(ModelError::Syntax { line, .. }) if line == TABLE1.lines().count() + 1));

        let half = format!("{TABLE1}w_total = 200\n");
        assert_eq!(parse_scenario::<f64>(&half).unwrap_err(), ModelError::MissingKey { key: "m_bar" });

        let frac_n = TABLE1.replace("n = 1", "n = 1.5");
        assert!(matches!(parse_scenario::<f64>(&frac_n), Err(ModelError::Malformed { .. })));
    }

    #[test]
    fn zero_watt_thresholds_and_general_params() {
        let doc = TABLE1
            .replace("gamma_dbm = 0 dBm", "gamma_dbm = -inf")
            .replace("n = 1", "n = 2")
            + "w_total = 200\nm_bar = 80\n";
        let s: Scenario<f64> = parse_scenario(&doc).unwrap();
        assert_eq!(s.gamma, 0.0);
        assert_eq!(s.general, Some(GeneralLaplaceParams { w_total: 200, m_bar: 80.0 }));

        let bad = doc.replace("m_bar = 80", "m_bar = 1");
        assert!(parse_scenario::<f64>(&bad).unwrap_err().to_string().contains("m_bar > 1"));
    }

    #[test]
    fn format_round_trips() {
        let mut s = Scenario::<f64>::table1();
        s.general = Some(GeneralLaplaceParams { w_total: 50, m_bar: 10.0 });
        let back: Scenario<f64> = parse_scenario(&format_scenario(&s)).unwrap();
        assert_relative_eq!(back.p_d, s.p_d, max_relative = 1e-12);
        assert_relative_eq!(back.sigma2, s.sigma2, max_relative = 1e-12);
        assert_eq!(back.general, s.general);
    }

    #[test]
    fn density_limits() {
        let mut s = Scenario::<f64>::table1();
        let d = derive_densities(&s, 1.0).unwrap();
        assert_eq!((d.lambda_d, d.lambda_hd_tx, d.lambda_fd), (0.0, 0.0, 0.0));

        s.p_fd = 1.0;
        let d = derive_densities(&s, 0.0).unwrap();
        assert_eq!(d.lambda_fd, s.lambda_u);

        s.p_fd = 0.5;
        let d = derive_densities(&s, 0.4).unwrap();
        assert_relative_eq!(d.lambda_c, 0.04, max_relative = 1e-14);
        assert_relative_eq!(d.lambda_d, 0.06, max_relative = 1e-14);
        assert_relative_eq!(d.lambda_hd_tx, 0.015, max_relative = 1e-14);
        assert_relative_eq!(d.lambda_fd, 0.03, max_relative = 1e-14);

        assert!(derive_densities(&s, 1.2).is_err());
        assert!(derive_densities(&s, f64::NAN).is_err());
    }

    #[test]
    fn f32_scenario_validates() {
        let s = Scenario::<f32>::table1();
        s.validate().unwrap();
        assert!((s.p_b - 10.0).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(x in -120.0f64..60.0) {
            let back = watts_to_dbm(dbm_to_watts(x).unwrap());
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn densities_partition_users(p in 0.0f64..=1.0, p_fd in 0.0f64..=1.0) {
            let mut s = Scenario::<f64>::table1();
            s.p_fd = p_fd;
            let d = derive_densities(&s, p).unwrap();
            prop_assert!(((d.lambda_c + d.lambda_d) - s.lambda_u).abs() <= 1e-12 * s.lambda_u);
            prop_assert_eq!(d.lambda_hd_tx, 0.5 * d.lambda_d * (1.0 - p_fd));
            prop_assert_eq!(d.lambda_fd, d.lambda_d * p_fd);
            prop_assert!(d.lambda_c >= 0.0 && d.lambda_d >= 0.0 && d.lambda_hd_tx >= 0.0 && d.lambda_fd >= 0.0);
        }
    }
}
