//! Seeded, batched Monte Carlo plumbing shared by the estimators.
//!
//! Samples are drawn in fixed-size batches. Batch `k` uses stream `k` of a
//! ChaCha8 generator keyed by the master seed, batches run in parallel, and
//! their results are folded in batch order. The output therefore depends only
//! on the seed and the sample count, never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::EnergyRange;

pub const BATCH_SIZE: usize = 4096;

pub fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Runs `work(rng, count)` over `ceil(n / BATCH_SIZE)` batches in parallel and
/// returns the per-batch results in batch order.
pub fn run_batches<T, F>(n: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_SIZE.min(n - b * BATCH_SIZE);
            work(&mut batch_rng(seed, b), count)
        })
        .collect()
}

/// Binomial proportion with its standard error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proportion {
    pub hits: u64,
    pub trials: u64,
}

impl Proportion {
    pub fn estimate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        self.hits as f64 / self.trials as f64
    }

    /// `sqrt(p (1 - p) / n)`.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        let p = self.estimate();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn add(&mut self, hit: bool) {
        self.trials += 1;
        self.hits += u64::from(hit);
    }

    pub fn merge(&mut self, other: &Proportion) {
        self.hits += other.hits;
        self.trials += other.trials;
    }
}

/// Uniform-bin histogram on `[lo, hi]`. Values within `EDGE_SLACK` outside
/// the interval are clamped into the end bins; anything further out is an
/// error, since energies are bounded by the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    sum: f64,
    sum_sq: f64,
}

const EDGE_SLACK: f64 = 1e-9;

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Error::InvalidParameter(format!(
                "histogram needs bins > 0 and lo < hi, got {bins} on [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            lo,
            hi,
            counts: vec![0; bins],
            sum: 0.0,
            sum_sq: 0.0,
        })
    }

    pub fn on(range: EnergyRange, bins: usize) -> Result<Self> {
        Self::new(range.lo, range.hi, bins)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = self.width();
        (0..=self.bins()).map(|k| self.lo + k as f64 * w).collect()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo - EDGE_SLACK && x <= self.hi + EDGE_SLACK) {
            return None;
        }
        let k = ((x - self.lo) / self.width()).floor();
        Some((k.max(0.0) as usize).min(self.bins() - 1))
    }

    pub fn add(&mut self, x: f64) -> Result<()> {
        let k = self.bin_of(x).ok_or_else(|| {
            Error::InvalidParameter(format!("value {x} outside histogram [{}, {}]", self.lo, self.hi))
        })?;
        self.counts[k] += 1;
        self.sum += x;
        self.sum_sq += x * x;
        Ok(())
    }

    pub fn merge(&mut self, other: &Histogram) {
        assert_eq!(self.counts.len(), other.counts.len(), "histogram shapes differ");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Fraction of samples per bin; sums to 1.
    pub fn fractions(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Probability density per bin; integrates to 1.
    pub fn density(&self) -> Vec<f64> {
        let w = self.width();
        self.fractions().into_iter().map(|f| f / w).collect()
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.total() as f64
    }

    /// Unbiased sample variance of the raw values.
    pub fn variance(&self) -> f64 {
        let n = self.total() as f64;
        (self.sum_sq - self.sum * self.sum / n) / (n - 1.0)
    }

    /// Histogram mass inside `range`, linearly interpolating partially
    /// covered bins.
    pub fn mass_in(&self, range: &EnergyRange) -> f64 {
        let w = self.width();
        let n = self.total() as f64;
        if n == 0.0 {
            return 0.0;
        }
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let a = self.lo + k as f64 * w;
                let b = a + w;
                let covered = (b.min(range.hi) - a.max(range.lo)).max(0.0);
                c as f64 * covered / w
            })
            .sum::<f64>()
            / n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n_samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub histogram: Option<Histogram>,
    pub seed: u64,
    pub elapsed_secs: f64,
}

impl MonteCarloReport {
    pub fn from_proportion(p: &Proportion, histogram: Option<Histogram>, seed: u64, elapsed_secs: f64) -> Self {
        Self {
            n_samples: p.trials,
            estimate: p.estimate(),
            std_error: p.std_error(),
            histogram,
            seed,
            elapsed_secs,
        }
    }
}
