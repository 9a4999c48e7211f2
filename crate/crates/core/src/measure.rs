//! Noisy 1-bit Gaussian measurements `y_i = f_i(⟨a_i, x0⟩)`.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::rng;
use crate::Vector;

/// `sign(v)` with the convention `sign(0) = +1`.
#[inline]
pub fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// A 1-bit output function `f: R → {−1, +1}`, possibly randomized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Quantizer {
    /// Perfect 1-bit measurements.
    Sign,
    /// `ε·sign(v)` with an independent `ε`, `P[ε = 1] = p > 1/2`.
    BitFlip { p: f64 },
    /// `sign(v + τ)` with an independent `τ ~ N(0, σ²)`.
    AdditiveGaussian { sigma: f64 },
}

impl Quantizer {
    pub fn bit_flip(p: f64) -> Result<Self> {
        let q = Quantizer::BitFlip { p };
        q.validate()?;
        Ok(q)
    }

    pub fn additive_gaussian(sigma: f64) -> Result<Self> {
        let q = Quantizer::AdditiveGaussian { sigma };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Quantizer::Sign => Ok(()),
            Quantizer::BitFlip { p } if p > 0.5 && p <= 1.0 => Ok(()),
            Quantizer::BitFlip { p } => Err(Error::invalid(format!(
                "bit-flip probability must lie in (1/2, 1], got {p}"
            ))),
            Quantizer::AdditiveGaussian { sigma } if sigma.is_finite() && sigma >= 0.0 => Ok(()),
            Quantizer::AdditiveGaussian { sigma } => Err(Error::invalid(format!(
                "noise level must be finite and non-negative, got {sigma}"
            ))),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
enum QuantizerRepr {
    Sign,
    BitFlip { p: f64 },
    AdditiveGaussian { sigma: f64 },
}

impl<'de> Deserialize<'de> for Quantizer {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let q = match QuantizerRepr::deserialize(de)? {
            QuantizerRepr::Sign => Quantizer::Sign,
            QuantizerRepr::BitFlip { p } => Quantizer::BitFlip { p },
            QuantizerRepr::AdditiveGaussian { sigma } => Quantizer::AdditiveGaussian { sigma },
        };
        q.validate().map_err(serde::de::Error::custom)?;
        Ok(q)
    }
}

/// Hook for user-supplied quantizers. Whether a custom quantizer satisfies
/// the correlation conditions is the caller's responsibility.
pub trait QuantizeFn: Sync {
    fn quantize(&self, v: f64, rng: &mut dyn RngCore) -> f64;
}

impl QuantizeFn for Quantizer {
    fn quantize(&self, v: f64, rng: &mut dyn RngCore) -> f64 {
        quantize(self, v, rng)
    }
}

/// Applies the quantizer to a linear measurement `v`, drawing fresh noise.
pub fn quantize<R: RngCore + ?Sized>(q: &Quantizer, v: f64, rng: &mut R) -> f64 {
    match *q {
        Quantizer::Sign => sign(v),
        Quantizer::BitFlip { p } => {
            let keep = rng.random::<f64>() < p;
            if keep {
                sign(v)
            } else {
                -sign(v)
            }
        }
        Quantizer::AdditiveGaussian { sigma } => {
            let tau: f64 = if sigma == 0.0 {
                0.0
            } else {
                Normal::new(0.0, sigma).expect("validated sigma").sample(rng)
            };
            sign(v + tau)
        }
    }
}

/// Measurement matrix, labels and (when simulated) the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Rows are the measurement vectors `a_i` (m×n).
    pub a: Array2<f64>,
    /// Labels in {−1, +1}.
    pub y: Array1<f64>,
    pub x0: Option<Vector>,
    pub seed: u64,
    pub quantizer: Option<Quantizer>,
}

impl Dataset {
    /// Wraps observed measurements without a known ground truth.
    pub fn from_measurements(a: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        let ds = Dataset {
            a,
            y,
            x0: None,
            seed: 0,
            quantizer: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.a.dim();
        if m == 0 || n == 0 {
            return Err(Error::invalid("dataset needs at least one sample and one feature"));
        }
        check_dim(m, self.y.len())?;
        if let Some(x0) = &self.x0 {
            check_dim(n, x0.len())?;
        }
        if self.y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::invalid("labels must be ±1"));
        }
        if self.a.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("measurement matrix has non-finite entries"));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        self.a.nrows()
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    /// Writes `A.csv` (row-major), `y.csv` and the `dataset.json` sidecar.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let a_path = dir.join("A.csv");
        let mut w = csv_writer(&a_path)?;
        for row in self.a.outer_iter() {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(|e| Error::parse(&a_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&a_path, e))?;

        let y_path = dir.join("y.csv");
        let mut w = csv_writer(&y_path)?;
        for &v in &self.y {
            w.write_record([if v > 0.0 { "1" } else { "-1" }])
                .map_err(|e| Error::parse(&y_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&y_path, e))?;

        let sidecar = Sidecar {
            x0: self.x0.as_ref().map(|x| x.to_vec()),
            seed: self.seed,
            quantizer: self.quantizer,
            m: self.samples(),
            n: self.dim(),
        };
        let json_path = dir.join("dataset.json");
        fs::write(&json_path, serde_json::to_string_pretty(&sidecar)?).map_err(|e| Error::io(&json_path, e))
    }

    /// Reads a dataset written by [`Dataset::save`].
    pub fn load(dir: &Path) -> Result<Self> {
        let json_path = dir.join("dataset.json");
        let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let sidecar: Sidecar = serde_json::from_str(&text)?;

        let a_path = dir.join("A.csv");
        let rows = read_numeric_csv(&a_path)?;
        let mut flat = Vec::with_capacity(sidecar.m * sidecar.n);
        for row in &rows {
            check_dim(sidecar.n, row.len())?;
            flat.extend_from_slice(row);
        }
        let a = Array2::from_shape_vec((rows.len(), sidecar.n), flat).map_err(|e| Error::parse(&a_path, e))?;

        let y_path = dir.join("y.csv");
        let y: Vec<f64> = read_numeric_csv(&y_path)?
            .into_iter()
            .map(|r| r.first().copied().ok_or_else(|| Error::parse(&y_path, "empty row")))
            .collect::<Result<_>>()?;

        let ds = Dataset {
            a,
            y: Array1::from(y),
            x0: sidecar.x0.map(Array1::from),
            seed: sidecar.seed,
            quantizer: sidecar.quantizer,
        };
        check_dim(sidecar.m, ds.samples())?;
        ds.validate()?;
        Ok(ds)
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    m: usize,
    n: usize,
    #[serde(default)]
    x0: Option<Vec<f64>>,
    seed: u64,
    #[serde(default)]
    quantizer: Option<Quantizer>,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

fn read_numeric_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(file);
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(|e| Error::parse(path, e))?;
            rec.iter()
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::parse(path, e)))
                .collect()
        })
        .collect()
}

/// Simulates `m` measurements of the unit-norm signal `x0`.
///
/// Measurement vectors come from one random stream and quantizer noise from
/// another, so quantizers that differ only in their noise see the same `A`.
pub fn generate_dataset(x0: &Vector, m: usize, q: &Quantizer, seed: u64) -> Result<Dataset> {
    q.validate()?;
    let mut ds = generate_dataset_with(x0, m, q, seed)?;
    ds.quantizer = Some(*q);
    Ok(ds)
}

/// [`generate_dataset`] with a user-supplied quantizer.
pub fn generate_dataset_with(x0: &Vector, m: usize, q: &dyn QuantizeFn, seed: u64) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::invalid("number of measurements must be at least 1"));
    }
    let n = x0.len();
    if n == 0 {
        return Err(Error::invalid("signal must have positive dimension"));
    }
    let norm = x0.dot(x0).sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("ground truth must have unit norm, got {norm}")));
    }
    let mut matrix_rng = rng::stream(seed, rng::streams::MATRIX);
    let a = Array2::from_shape_simple_fn((m, n), || StandardNormal.sample(&mut matrix_rng));
    let mut noise_rng = rng::stream(seed, rng::streams::NOISE);
    let y = a.dot(x0).mapv(|v| q.quantize(v, &mut noise_rng));
    Ok(Dataset {
        a,
        y,
        x0: Some(x0.clone()),
        seed,
        quantizer: None,
    })
}
