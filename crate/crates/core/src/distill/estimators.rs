use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::distill::{combine, energy_in_range, is_distillable, Distillability, ScdVerdict};
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyRange, Model, ModelSpec};
use crate::montecarlo::{run_batches, Histogram, MonteCarloReport, Proportion};
use crate::range::{target_range, RangeOptions};
use crate::states::{random_mixed, QuantumState, StateSampler};

/// Default bin count for energy histograms.
pub const DEFAULT_BINS: usize = 200;
/// Bins with fewer samples are excluded from the independence deviation.
pub const INDEPENDENCE_MIN_COUNT: u64 = 10_000;

fn check_sampler(sampler: &StateSampler, model: &Model) -> Result<()> {
    sampler.validate()?;
    let dims = sampler.dims();
    if dims != model.spec.site_dims() {
        return Err(Error::DimensionMismatch {
            expected: model.spec.dim(),
            found: dims.iter().product(),
        });
    }
    Ok(())
}

fn energy_of(rho: &QuantumState, model: &Model) -> f64 {
    rho.expectation(&model.hamiltonian).expect("dims checked")
}

/// Fraction of rank-`rank` two-qubit states (induced measure) that are
/// distillable.
pub fn estimate_df(rank: usize, n: usize, seed: u64) -> Result<MonteCarloReport> {
    if !(1..=4).contains(&rank) {
        return Err(Error::InvalidParameter(format!("two-qubit rank {rank} outside 1..=4")));
    }
    let start = Instant::now();
    let batches = run_batches(n, seed, |rng, count| {
        let mut p = Proportion::default();
        for _ in 0..count {
            let rho = random_mixed(&[2, 2], rank, rng).expect("valid rank");
            p.add(is_distillable(&rho).is_distillable());
        }
        p
    });
    let mut total = Proportion::default();
    batches.iter().for_each(|b| total.merge(b));
    Ok(MonteCarloReport::from_proportion(
        &total,
        None,
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// Histogram of `tr(H ρ)` on `[E_1, E_2]`. The report's estimate is the
/// sample mean and its error the standard error of the mean.
pub fn energy_histogram(
    sampler: &StateSampler,
    model: &Model,
    bins: usize,
    n: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    check_sampler(sampler, model)?;
    if bins < 10 {
        return Err(Error::InvalidParameter(format!(
            "at least 10 bins required, got {bins}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("at least two samples required".into()));
    }
    let bounds = model.state_energy_bounds()?;
    let empty = Histogram::on(bounds, bins)?;
    let start = Instant::now();
    let batches = run_batches(n, seed, |rng, count| {
        let mut h = empty.clone();
        for _ in 0..count {
            let rho = sampler.sample(rng);
            h.add(energy_of(&rho, model)).map(|_| ())?;
        }
        Ok::<_, Error>(h)
    });
    let mut hist = empty;
    for b in batches {
        hist.merge(&b?);
    }
    Ok(MonteCarloReport {
        n_samples: hist.total(),
        estimate: hist.mean(),
        std_error: (hist.variance() / hist.total() as f64).sqrt(),
        histogram: Some(hist),
        seed,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Direct SCD fraction: distillable and inside `range`, sample by sample.
/// Also returns the energy histogram of the same samples.
pub fn estimate_p(
    sampler: &StateSampler,
    model: &Model,
    range: &EnergyRange,
    n: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    check_sampler(sampler, model)?;
    if !sampler.verdicts_decidable() {
        return Err(Error::Undecidable(format!(
            "distillability is not decidable for {} samples",
            sampler.name()
        )));
    }
    let bounds = model.state_energy_bounds()?;
    let empty = Histogram::on(bounds, DEFAULT_BINS)?;
    let start = Instant::now();
    let batches = run_batches(n, seed, |rng, count| {
        let mut h = empty.clone();
        let mut p = Proportion::default();
        for _ in 0..count {
            let rho = sampler.sample(rng);
            let e = energy_of(&rho, model);
            h.add(e)?;
            let wcec = energy_in_range(e, range);
            let verdict = if wcec {
                combine(is_distillable(&rho).verdict, true)
            } else {
                ScdVerdict::NotScd
            };
            if verdict == ScdVerdict::Unknown {
                return Err(Error::Undecidable(format!("undecided sample from {}", sampler.name())));
            }
            p.add(verdict == ScdVerdict::Scd);
        }
        Ok((p, h))
    });
    let mut total = Proportion::default();
    let mut hist = empty;
    for b in batches {
        let (p, h) = b?;
        total.merge(&p);
        hist.merge(&h);
    }
    Ok(MonteCarloReport::from_proportion(
        &total,
        Some(hist),
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// `η` times the histogram mass inside `range`.
pub fn p_via_independence(eta: f64, hist: &Histogram, range: &EnergyRange) -> f64 {
    eta * hist.mass_in(range)
}

/// Delta-method standard error of [`p_via_independence`], treating `η` and
/// the histogram as independent estimates.
pub fn p_via_independence_std_error(eta: f64, eta_std_error: f64, hist: &Histogram, range: &EnergyRange) -> f64 {
    let m = hist.mass_in(range);
    let n = hist.total() as f64;
    let mass_se = (m * (1.0 - m) / n).sqrt();
    ((m * eta_std_error).powi(2) + (eta * mass_se).powi(2)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceBin {
    pub lo: f64,
    pub hi: f64,
    pub samples: u64,
    pub distillable: u64,
    /// `None` for empty bins.
    pub fraction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub rank: usize,
    pub n_samples: u64,
    pub eta: f64,
    pub eta_std_error: f64,
    pub bins: Vec<IndependenceBin>,
    /// Largest `|P(dist|E) - η|` over bins holding at least `min_count` samples.
    pub max_deviation: f64,
    pub min_count: u64,
    pub seed: u64,
}

impl IndependenceReport {
    pub fn empty_bins(&self) -> usize {
        self.bins.iter().filter(|b| b.samples == 0).count()
    }

    pub fn well_populated(&self) -> impl Iterator<Item = &IndependenceBin> {
        self.bins.iter().filter(move |b| b.samples >= self.min_count)
    }
}

/// Per-energy-bin distillable fraction of rank-`rank` two-qubit states.
pub fn independence_check(rank: usize, model: &Model, n: usize, bins: usize, seed: u64) -> Result<IndependenceReport> {
    if !(1..=4).contains(&rank) {
        return Err(Error::InvalidParameter(format!("two-qubit rank {rank} outside 1..=4")));
    }
    if model.spec.site_dims() != [2, 2] {
        return Err(Error::UnsupportedModel(
            "independence check needs a two-qubit model".into(),
        ));
    }
    let bounds = model.state_energy_bounds()?;
    let empty = Histogram::on(bounds, bins)?;
    let batches = run_batches(n, seed, |rng, count| {
        let mut h = empty.clone();
        let mut dist = vec![0u64; bins];
        for _ in 0..count {
            let rho = random_mixed(&[2, 2], rank, rng).expect("valid rank");
            let e = energy_of(&rho, model);
            let k = h
                .bin_of(e)
                .ok_or_else(|| Error::InvalidParameter(format!("energy {e} outside spectrum")))?;
            h.add(e)?;
            if is_distillable(&rho).verdict == Distillability::Distillable {
                dist[k] += 1;
            }
        }
        Ok::<_, Error>((h, dist))
    });
    let mut hist = empty;
    let mut dist = vec![0u64; bins];
    for b in batches {
        let (h, d) = b?;
        hist.merge(&h);
        dist.iter_mut().zip(&d).for_each(|(a, b)| *a += b);
    }
    let total = Proportion {
        hits: dist.iter().sum(),
        trials: hist.total(),
    };
    let eta = total.estimate();
    let edges = hist.edges();
    let bins: Vec<IndependenceBin> = (0..bins)
        .map(|k| {
            let samples = hist.counts[k];
            IndependenceBin {
                lo: edges[k],
                hi: edges[k + 1],
                samples,
                distillable: dist[k],
                fraction: (samples > 0).then(|| dist[k] as f64 / samples as f64),
            }
        })
        .collect();
    let max_deviation = bins
        .iter()
        .filter(|b| b.samples >= INDEPENDENCE_MIN_COUNT)
        .filter_map(|b| b.fraction)
        .map(|f| (f - eta).abs())
        .fold(0.0, f64::max);
    Ok(IndependenceReport {
        rank,
        n_samples: total.trials,
        eta,
        eta_std_error: total.std_error(),
        bins,
        max_deviation,
        min_count: INDEPENDENCE_MIN_COUNT,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaP {
    pub gamma: f64,
    pub g: f64,
    pub p_transverse: f64,
    pub p_longitudinal: f64,
    pub delta: f64,
    /// Standard error of the paired difference.
    pub std_error: f64,
    pub n_samples: u64,
}

/// `p(transverse) - p(longitudinal)` on the same Haar pure two-qubit samples.
pub fn delta_p(gamma: f64, g: f64, n: usize, seed: u64, range_opts: &RangeOptions) -> Result<DeltaP> {
    if n == 0 {
        return Err(Error::InvalidParameter("at least one sample required".into()));
    }
    let transverse = Model::new(ModelSpec::transverse_xy(gamma, g))?;
    let longitudinal = Model::new(ModelSpec::longitudinal_xy(gamma, g))?;
    let target = crate::hamiltonian::TargetName::PsiMinus;
    let (rt, _) = target_range(&transverse, target, range_opts)?;
    let (rl, _) = target_range(&longitudinal, target, range_opts)?;
    let sampler = StateSampler::HaarPure { dims: vec![2, 2] };
    let batches = run_batches(n, seed, |rng, count| {
        let (mut a, mut b, mut diff_sq) = (0u64, 0u64, 0u64);
        for _ in 0..count {
            let rho = sampler.sample(rng);
            let dist = is_distillable(&rho).is_distillable();
            let in_t = dist && energy_in_range(energy_of(&rho, &transverse), &rt);
            let in_l = dist && energy_in_range(energy_of(&rho, &longitudinal), &rl);
            a += u64::from(in_t);
            b += u64::from(in_l);
            diff_sq += u64::from(in_t != in_l);
        }
        (a, b, diff_sq)
    });
    let (a, b, d2) = batches
        .into_iter()
        .fold((0, 0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let nf = n as f64;
    let (pt, pl) = (a as f64 / nf, b as f64 / nf);
    let delta = pt - pl;
    let var = (d2 as f64 / nf - delta * delta).max(0.0);
    Ok(DeltaP {
        gamma,
        g,
        p_transverse: pt,
        p_longitudinal: pl,
        delta,
        std_error: (var / nf).sqrt(),
        n_samples: n as u64,
    })
}
