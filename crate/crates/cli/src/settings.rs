//! Flags merged with an optional JSON configuration document and validated
//! before any computation runs.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use qpc_core::chain::DEFAULT_ATTENUATION_KM;
use qpc_core::CodeParams;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{CommonArgs, Format};
use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    codes: Option<Vec<String>>,
    eta: Option<Vec<Value>>,
    distance_km: Option<f64>,
    spacing_km: Option<Vec<f64>>,
    atten_km: Option<f64>,
    eta_missing: Option<f64>,
    eta_source: Option<f64>,
    seed: Option<u64>,
    trials: Option<u64>,
    format: Option<Format>,
    out: Option<PathBuf>,
}

/// A transmission value kept both as typed and as an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Eta {
    pub text: String,
    pub value: f64,
    pub exact: BigRational,
}

impl Eta {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        let exact = parse_exact(text).ok_or_else(|| CliError::Input(format!("`{text}` is not a number")))?;
        let value: f64 = if let Some((a, b)) = text.split_once('/') {
            a.trim().parse::<f64>().unwrap_or(f64::NAN) / b.trim().parse::<f64>().unwrap_or(f64::NAN)
        } else {
            text.parse().map_err(|_| CliError::Input(format!("`{text}` is not a number")))?
        };
        if !(0.0..=1.0).contains(&value) {
            return Err(CliError::Input(format!("eta must lie in [0, 1], got {text}")));
        }
        Ok(Self {
            text: text.to_string(),
            value,
            exact,
        })
    }
}

/// Exact value of a decimal (`0.99`, `1e-3`) or a fraction (`1/4`).
pub fn parse_exact(text: &str) -> Option<BigRational> {
    if let Some((a, b)) = text.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        if b == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(a, b));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.trim_start_matches(['+', '-']).is_empty() && frac_part.is_empty() {
        return None;
    }
    if !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    Some(BigRational::from_integer(digits) * ten.pow(scale))
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub codes: Vec<CodeParams>,
    pub etas: Vec<Eta>,
    pub distance_km: Option<f64>,
    pub spacings_km: Vec<f64>,
    pub atten_km: f64,
    pub eta_missing: f64,
    pub eta_source: f64,
    pub seed: u64,
    pub trials: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
}

fn check_unit(name: &str, value: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(CliError::Input(format!("{name} must lie in [0, 1], got {value}")))
    }
}

fn check_positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::Input(format!("{name} must be positive, got {value}")))
    }
}

impl Settings {
    /// Flags win over the configuration document.
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => read_config(path)?,
            None => ConfigFile::default(),
        };

        let codes = if !args.codes.is_empty() {
            args.codes.clone()
        } else {
            file.codes
                .unwrap_or_default()
                .iter()
                .map(|s| s.parse::<CodeParams>().map_err(CliError::Input))
                .collect::<Result<_, _>>()?
        };

        let eta_texts: Vec<String> = if !args.eta.is_empty() {
            args.eta.clone()
        } else {
            file.eta
                .unwrap_or_default()
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => s,
                    other => other.to_string(),
                })
                .collect()
        };
        let etas = eta_texts.iter().map(|t| Eta::parse(t)).collect::<Result<_, _>>()?;

        let distance_km = args.distance_km.or(file.distance_km).map(|d| check_positive("distance-km", d)).transpose()?;
        let spacings_km = if args.spacing_km.is_empty() {
            file.spacing_km.unwrap_or_default()
        } else {
            args.spacing_km.clone()
        };
        for &s in &spacings_km {
            check_positive("spacing-km", s)?;
        }

        Ok(Self {
            codes,
            etas,
            distance_km,
            spacings_km,
            atten_km: check_positive("atten-km", args.atten_km.or(file.atten_km).unwrap_or(DEFAULT_ATTENUATION_KM))?,
            eta_missing: check_unit("eta-missing", args.eta_missing.or(file.eta_missing).unwrap_or(1.0))?,
            eta_source: check_unit("eta-source", args.eta_source.or(file.eta_source).unwrap_or(1.0))?,
            seed: args.seed.or(file.seed).unwrap_or(0),
            trials: args.trials.or(file.trials),
            format: args.format.or(file.format).unwrap_or_default(),
            out: args.out.clone().or(file.out),
        })
    }

    pub fn require_distance(&self) -> Result<f64, CliError> {
        self.distance_km
            .ok_or_else(|| CliError::Input("--distance-km is required".into()))
    }

    pub fn chain_inputs(&self) -> Value {
        json!({
            "distance_km": self.distance_km,
            "atten_km": self.atten_km,
            "eta_missing": self.eta_missing,
            "eta_source": self.eta_source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(parse_exact("0.99"), Some(rat(99, 100)));
        assert_eq!(parse_exact("1"), Some(rat(1, 1)));
        assert_eq!(parse_exact(".5"), Some(rat(1, 2)));
        assert_eq!(parse_exact("1/4"), Some(rat(1, 4)));
        assert_eq!(parse_exact("25e-2"), Some(rat(1, 4)));
        assert_eq!(parse_exact("abc"), None);
        assert_eq!(parse_exact("1/0"), None);
        assert_eq!(parse_exact("."), None);
    }

    #[test]
    fn eta_out_of_range_is_rejected() {
        assert!(Eta::parse("1.5").is_err());
        assert!(Eta::parse("-0.1").is_err());
        assert_eq!(Eta::parse("0.75").unwrap().value, 0.75);
    }
}
