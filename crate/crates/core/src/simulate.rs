//! Trajectory generation.
//!
//! Two generators are provided. The exact one embeds the target covariance
//! in a circulant matrix and synthesises a stationary Gaussian path through
//! the FFT; the truncated one filters Gaussian noise through `a_0..a_K`.
//! All randomness flows from a single 64-bit seed through ChaCha8.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::models::{autocovariance, ma_coeffs, ModelSpec};

/// Relative threshold below which negative circulant eigenvalues abort.
pub const EMBEDDING_TOLERANCE: f64 = 1e-8;

/// Which generator produced a series.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Generator {
    #[default]
    ExactGaussian,
    TruncatedMa { k: usize, burnin: usize },
}

impl Generator {
    pub fn id(&self) -> &'static str {
        match self {
            Generator::ExactGaussian => "exact-gaussian",
            Generator::TruncatedMa { .. } => "truncated-ma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub generator: Generator,
    pub seed: u64,
}

impl GenConfig {
    pub fn exact(seed: u64) -> Self {
        Self { generator: Generator::ExactGaussian, seed }
    }

    pub fn truncated_ma(k: usize, burnin: usize, seed: u64) -> Self {
        Self { generator: Generator::TruncatedMa { k, burnin }, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub spec: ModelSpec,
    pub seed: u64,
    pub generator: String,
}

/// An observed or simulated trajectory `X_1..X_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<SeriesMeta>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("series must have at least one value".into()));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value at index {i}")));
        }
        Ok(Self { values, meta: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Returns a new series with every value mapped through `f`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&x| f(x)).collect())
    }

    /// Reads one value per line (optional header), or `time,value` rows which are
    /// sorted by time before the time column is dropped.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut rows: Vec<(f64, f64)> = Vec::new();
        let mut two_col = None;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            let fields = match parsed {
                Ok(v) => v,
                Err(_) if rows.is_empty() && two_col.is_none() => continue, // header
                Err(_) => {
                    return Err(Error::InvalidInput(format!("malformed CSV record on line {}", line + 1)));
                }
            };
            let width = fields.len();
            match (width, two_col) {
                (1, None | Some(false)) => {
                    two_col = Some(false);
                    rows.push((rows.len() as f64, fields[0]));
                }
                (2, None | Some(true)) => {
                    two_col = Some(true);
                    rows.push((fields[0], fields[1]));
                }
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: expected 1 or 2 columns consistently, got {width}",
                        line + 1
                    )));
                }
            }
        }
        if two_col == Some(true) {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Self::new(rows.into_iter().map(|r| r.1).collect())
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    /// Writes header `x` then one value per line, shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x")?;
        for v in &self.values {
            writeln!(w, "{v:?}")?;
        }
        Ok(())
    }
}

/// Seeded generator with a documented identity (ChaCha8, `seed_from_u64`).
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a base seed and a path of indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// `n` i.i.d. standard normal draws.
pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    normals(&mut rng, n)
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Precomputed circulant-embedding sampler for one `(spec, n)` pair.
#[derive(Debug, Clone)]
pub struct CirculantSampler {
    n: usize,
    mu: f64,
    /// `sqrt(λ_k / N)`
    scale: Vec<f64>,
    min_eigenvalue: f64,
}

impl CirculantSampler {
    pub fn new(spec: &ModelSpec, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("simulation length must be at least 2".into()));
        }
        let size = (4 * n).next_power_of_two();
        let m = size / 2;
        let r = autocovariance(spec, m)?;
        Self::from_acv(&r, n, size, spec.mu)
    }

    /// Embeds `r(0..=size/2)` in a ring of length `size`.
    pub fn from_acv(r: &[f64], n: usize, size: usize, mu: f64) -> Result<Self> {
        let m = size / 2;
        assert!(r.len() > m && m >= n);
        let mut ring = vec![Complex64::new(0.0, 0.0); size];
        ring[0].re = r[0];
        for j in 1..=m {
            ring[j].re = r[j];
            ring[size - j].re = r[j];
        }
        fft::forward(&mut ring);
        let max = ring.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
        let min = ring.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
        if min < -EMBEDDING_TOLERANCE * max {
            return Err(Error::Embedding { min_eigenvalue: min, max_eigenvalue: max });
        }
        let scale = ring.iter().map(|c| (c.re.max(0.0) / size as f64).sqrt()).collect();
        Ok(Self { n, mu, scale, min_eigenvalue: min })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let size = self.scale.len();
        let mut w: Vec<Complex64> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(s * re, s * im)
            })
            .collect();
        debug_assert_eq!(w.len(), size);
        fft::forward(&mut w);
        w[..self.n].iter().map(|c| c.re + self.mu).collect()
    }
}

/// Truncated moving-average sampler `X_t = μ + σ Σ_{i≤K} a_i ε_{t-i}`.
#[derive(Debug, Clone)]
pub struct TruncatedMaSampler {
    n: usize,
    burnin: usize,
    mu: f64,
    /// `σ a_0..=σ a_K`
    weights: Vec<f64>,
}

impl TruncatedMaSampler {
    pub fn new(spec: &ModelSpec, n: usize, k: usize, burnin: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("simulation length must be at least 2".into()));
        }
        if k < n {
            return Err(Error::InvalidInput(format!("truncated-ma requires K >= n (K={k}, n={n})")));
        }
        let sigma = spec.sigma2.sqrt();
        let weights = ma_coeffs(spec, k)?.into_iter().map(|a| a * sigma).collect();
        Ok(Self { n, burnin, mu: spec.mu, weights })
    }

    pub fn k(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let k = self.k();
        let eps = normals(rng, k + self.burnin + self.n);
        let conv = fft::convolve(&self.weights, &eps);
        conv[k + self.burnin..k + self.burnin + self.n].iter().map(|x| x + self.mu).collect()
    }
}

/// A prepared sampler for either generator; reuse it across replications.
#[derive(Debug, Clone)]
pub enum Sampler {
    Circulant(CirculantSampler),
    TruncatedMa(TruncatedMaSampler),
}

impl Sampler {
    pub fn new(spec: &ModelSpec, n: usize, generator: Generator) -> Result<Self> {
        spec.validate()?;
        Ok(match generator {
            Generator::ExactGaussian => Sampler::Circulant(CirculantSampler::new(spec, n)?),
            Generator::TruncatedMa { k, burnin } => Sampler::TruncatedMa(TruncatedMaSampler::new(spec, n, k, burnin)?),
        })
    }

    /// One path drawn from a fresh ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, seed: u64) -> Vec<f64> {
        let mut rng = rng_from_seed(seed);
        match self {
            Sampler::Circulant(s) => s.sample(&mut rng),
            Sampler::TruncatedMa(s) => s.sample(&mut rng),
        }
    }
}

/// Simulates `n` observations of `spec`.
pub fn simulate(spec: &ModelSpec, n: usize, cfg: &GenConfig) -> Result<Series> {
    let values = Sampler::new(spec, n, cfg.generator)?.sample(cfg.seed);
    let mut s = Series::new(values)?;
    s.meta = Some(SeriesMeta { spec: spec.clone(), seed: cfg.seed, generator: cfg.generator.id().to_string() });
    Ok(s)
}
