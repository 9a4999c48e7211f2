//! Parsing of the JSON and shorthand arguments.

use std::fs;

use clap::ValueEnum;
use onebit_core::signal_sets::sample_signal;
use onebit_core::{Error, Quantizer, Result, SignalKind, SignalSet, SolverConfig, Vector};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Input of `onebit simulate`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub n: usize,
    pub m: usize,
    pub quantizer: Quantizer,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub signal: Option<SignalKind>,
    pub seed: u64,
    /// When present, the dataset is also solved over this set.
    #[serde(default)]
    pub set: Option<SignalSet>,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl SimulateSpec {
    pub fn signal_kind(&self) -> SignalKind {
        match (&self.signal, self.s) {
            (Some(kind), _) => kind.clone(),
            (None, Some(s)) => SignalKind::ExactSparse { s },
            (None, None) => SignalKind::ExactSparse { s: self.n },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if let Some(set) = &self.set {
            if set.dim() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: set.dim(),
                });
            }
        }
        self.solver.validate()?;
        sample_signal(&self.signal_kind(), self.n, self.seed).map(|_| ())
    }
}

fn json_arg(raw: &str) -> Result<String> {
    match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        }),
        None => Ok(raw.to_string()),
    }
}

pub fn parse_set(raw: &str) -> Result<SignalSet> {
    Ok(serde_json::from_str(&json_arg(raw)?)?)
}

pub fn parse_vector(raw: &str) -> Result<Vector> {
    let v: Vec<f64> = serde_json::from_str(&json_arg(raw)?)?;
    Ok(Vector::from(v))
}

/// `sign`, `bit_flip:P`, `additive_gaussian:SIGMA` or a JSON descriptor.
pub fn parse_quantizer(raw: &str) -> Result<Quantizer> {
    let raw = raw.trim();
    if raw.starts_with('{') || raw.starts_with('@') {
        return Ok(serde_json::from_str(&json_arg(raw)?)?);
    }
    let number = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::InvalidParameter(format!("not a number in quantizer {raw:?}")))
    };
    match raw.split_once(':') {
        None if raw == "sign" => Ok(Quantizer::Sign),
        Some(("bit_flip", p)) => Quantizer::bit_flip(number(p)?),
        Some(("additive_gaussian", s)) => Quantizer::additive_gaussian(number(s)?),
        _ => Err(Error::InvalidParameter(format!(
            "unknown quantizer {raw:?}; expected sign, bit_flip:P, additive_gaussian:SIGMA or JSON"
        ))),
    }
}
