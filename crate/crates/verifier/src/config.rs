//! Suite configuration and the selector syntax shared by the CLI.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rheojet_core::{CubicTable, MRootStructure, TemporalMetric};

use crate::error::VerifyError;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricSelector {
    Chernov,
    F2,
    Custom(PathBuf),
}

impl MetricSelector {
    pub fn load(&self) -> Result<MRootStructure, VerifyError> {
        match self {
            MetricSelector::Chernov => Ok(MRootStructure::chernov()),
            MetricSelector::F2 => Ok(MRootStructure::quadratic_f2()),
            MetricSelector::Custom(path) => {
                let table = CubicTable::load(path).map_err(|e| VerifyError::Config(format!("{}: {e}", path.display())))?;
                Ok(MRootStructure::custom(table))
            }
        }
    }
}

impl FromStr for MetricSelector {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chernov" => Ok(MetricSelector::Chernov),
            "f2" => Ok(MetricSelector::F2),
            _ => match s.strip_prefix("custom:") {
                Some(path) if !path.is_empty() => Ok(MetricSelector::Custom(PathBuf::from(path))),
                _ => Err(VerifyError::Config(format!(
                    "unknown metric `{s}` (expected chernov, f2 or custom:PATH)"
                ))),
            },
        }
    }
}

impl fmt::Display for MetricSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricSelector::Chernov => write!(f, "chernov"),
            MetricSelector::F2 => write!(f, "f2"),
            MetricSelector::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

/// Temporal metric family with its parameters, e.g. `exp:1` or `poly:1,0.5`.
#[derive(Debug, Clone, PartialEq)]
pub struct HSelector(pub TemporalMetric);

fn parse_number(s: &str) -> Result<f64, VerifyError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| VerifyError::Config(format!("`{s}` is not a number")))
}

impl FromStr for HSelector {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, args) = s
            .split_once(':')
            .ok_or_else(|| VerifyError::Config(format!("temporal metric `{s}` needs FAMILY:PARAMS")))?;
        let h = match family {
            "const" => TemporalMetric::constant(parse_number(args)?),
            "exp" => TemporalMetric::exponential(parse_number(args)?),
            "poly" => {
                let coeffs = args.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
                TemporalMetric::polynomial(coeffs)
            }
            _ => {
                return Err(VerifyError::Config(format!(
                    "unknown temporal family `{family}` (expected const, exp or poly)"
                )))
            }
        };
        h.map(HSelector).map_err(|e| VerifyError::Config(e.to_string()))
    }
}

impl fmt::Display for HSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            TemporalMetric::Constant(c) => write!(f, "const:{c}"),
            TemporalMetric::Exponential(a) => write!(f, "exp:{a}"),
            TemporalMetric::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub metric: MetricSelector,
    pub h: HSelector,
    pub samples: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub k: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            metric: MetricSelector::Chernov,
            h: HSelector(TemporalMetric::Exponential(1.0)),
            samples: 100,
            seed: 42,
            tolerances: BTreeMap::new(),
            k: 1.0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.samples == 0 {
            return Err(VerifyError::Config("sample count must be at least 1".into()));
        }
        if self.k == 0.0 || !self.k.is_finite() {
            return Err(VerifyError::Config(format!("K must be finite and nonzero, got {}", self.k)));
        }
        for (name, tol) in &self.tolerances {
            if !(*tol > 0.0) || !tol.is_finite() {
                return Err(VerifyError::Config(format!("tolerance for `{name}` must be positive, got {tol}")));
            }
        }
        Ok(())
    }
}

/// Parses `NAME=VALUE`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), VerifyError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| VerifyError::Config(format!("tolerance `{s}` must be NAME=VALUE")))?;
    Ok((name.trim().to_string(), parse_number(value)?))
}
