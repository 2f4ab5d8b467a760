//! One function per subcommand. Each writes its tables through the sink; the
//! caller writes the manifest.

use std::iter;

use anyhow::Result;
use serde::Serialize;

use scd_core::distill::{
    bell_cross_section, concurrence, energy_histogram, estimate_df, estimate_p, find_nonconvexity_witness,
    independence_check, p_via_independence, p_via_independence_std_error, thermal_boundary, wcec_satisfied, BellLabel,
    ThermalBoundary, AXIS_NAMES,
};
use scd_core::hamiltonian::{target_energy_bounds_analytic, EnergyRange, Family, Model, TargetName};
use scd_core::range::{target_energy_range, target_range, RangeSource};
use scd_core::states::{target_state, thermal_state};
use scd_core::tensor::hermitian_eigenvalues;
use scd_core::Error;

use crate::config::RunConfig;
use crate::output::{Cell, Sink, Table};
use crate::ConfigError;

const CURVE_SAMPLES: usize = 100_000;
const ETA_SAMPLES: usize = 1_000_000;

const TWO_QUBIT: [Family; 3] = [Family::TransverseXy, Family::LongitudinalXy, Family::Xxz];

fn source_name(s: RangeSource) -> &'static str {
    match s {
        RangeSource::Analytic => "analytic",
        RangeSource::Optimized => "optimized",
    }
}

pub fn spectrum(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let grid = cfg.sweep_grid()?;
    let dim = cfg.model.dim();
    let header = iter::once(cfg.sweep.name().to_string()).chain((1..=dim).map(|k| format!("lambda{k}")));
    let mut table = Table::new(header);
    for x in grid {
        let model = Model::new(cfg.sweep.apply(&cfg.model, x))?;
        let cells: Vec<Cell> = iter::once(x)
            .chain(hermitian_eigenvalues(&model.hamiltonian)?)
            .map(Cell::from)
            .collect();
        table.row(&cells);
    }
    sink.csv("", &table)?;
    Ok(())
}

pub fn p_curve(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let target = cfg.target()?;
    let sampler = cfg.sampler()?;
    let n = cfg.samples(CURVE_SAMPLES)?;
    let opts = cfg.range_options();
    let mut table = Table::new(["g", "p", "std_error", "n_samples", "eps_lo", "eps_hi", "range_source"]);
    // Every grid point reuses the same seed, so neighbouring points share
    // their samples and the curve is smooth.
    for g in cfg.g_grid()? {
        let model = Model::new(cfg.model.with_g(g))?;
        let (range, source) = target_range(&model, target, &opts)?;
        let r = estimate_p(&sampler, &model, &range, n, cfg.seed)?;
        table.row(&[
            g.into(),
            r.estimate.into(),
            r.std_error.into(),
            r.n_samples.into(),
            range.lo.into(),
            range.hi.into(),
            source_name(source).into(),
        ]);
    }
    sink.csv("", &table)?;
    Ok(())
}

#[derive(Serialize)]
struct HistSummary {
    g: f64,
    sampler: String,
    n_samples: u64,
    mean: f64,
    std_error: f64,
    variance: f64,
    target_range: EnergyRange,
    mass_in_target_range: f64,
}

pub fn hist(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let sampler = cfg.sampler()?;
    let model = Model::new(cfg.model.clone())?;
    let n = cfg.samples(CURVE_SAMPLES)?;
    let (range, _) = target_range(&model, cfg.target()?, &cfg.range_options())?;
    let report = energy_histogram(&sampler, &model, cfg.bins, n, cfg.seed)?;
    let h = report
        .histogram
        .as_ref()
        .expect("energy histograms carry their histogram");
    let mut table = Table::new(["lo", "hi", "count", "fraction", "density"]);
    let edges = h.edges();
    for (k, ((count, fraction), density)) in h.counts.iter().zip(h.fractions()).zip(h.density()).enumerate() {
        table.row(&[
            edges[k].into(),
            edges[k + 1].into(),
            (*count).into(),
            fraction.into(),
            density.into(),
        ]);
    }
    sink.csv("", &table)?;
    sink.json(
        "_summary",
        &HistSummary {
            g: cfg.model.g,
            sampler: sampler.name().to_string(),
            n_samples: report.n_samples,
            mean: report.estimate,
            std_error: report.std_error,
            variance: h.variance(),
            target_range: range,
            mass_in_target_range: h.mass_in(&range),
        },
    )?;
    Ok(())
}

pub fn thermal(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    cfg.require_family(&TWO_QUBIT, "thermal")?;
    let betas = cfg.beta_grid()?;
    let opts = cfg.range_options();
    let mut boundary = Table::new(["g", "beta_star", "energy_at_boundary"]);
    let mut grid = Table::new(["g", "beta", "energy", "concurrence", "wcec", "scd"]);
    for g in cfg.g_grid()? {
        let model = Model::new(cfg.model.with_g(g))?;
        let (range, _) = target_range(&model, TargetName::PsiMinus, &opts)?;
        match thermal_boundary(&model, &range)? {
            ThermalBoundary::NoBoundary => boundary.row(&[g.into(), Cell::Empty, Cell::Empty]),
            ThermalBoundary::At { beta, energy } => boundary.row(&[g.into(), beta.into(), energy.into()]),
        }
        for &beta in &betas {
            let rho = thermal_state(&model, beta)?;
            let energy = rho.expectation(&model.hamiltonian)?;
            let c = concurrence(&rho)?;
            let wcec = wcec_satisfied(&rho, &model, &range)?;
            grid.row(&[
                g.into(),
                beta.into(),
                energy.into(),
                c.into(),
                wcec.into(),
                (wcec && c > 0.0).into(),
            ]);
        }
    }
    sink.csv("_boundary", &boundary)?;
    sink.csv("_grid", &grid)?;
    Ok(())
}

pub fn bell_volume(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    cfg.require_family(&TWO_QUBIT, "bell-volume")?;
    let planes = cfg.plane_axes()?;
    if cfg.g_values.is_empty() {
        return Err(ConfigError("g_values must list at least one field".into()).into());
    }
    let opts = cfg.range_options();
    let mut labels = Table::new(["g", "x_axis", "y_axis", "x", "y", "label"]);
    let witness_header = iter::once("g".to_string())
        .chain(iter::once("found".to_string()))
        .chain(
            ["first", "second", "mixture"]
                .iter()
                .flat_map(|w| AXIS_NAMES.iter().map(move |a| format!("{w}_{a}"))),
        );
    let mut witnesses = Table::new(witness_header);
    let mut counts = Table::new(["g", "x_axis", "y_axis", "label", "points"]);
    for &g in &cfg.g_values {
        let model = Model::new(cfg.model.with_g(g))?;
        let (range, _) = target_range(&model, TargetName::PsiMinus, &opts)?;
        for &(a, b) in &planes {
            let points = bell_cross_section(&model, &range, cfg.base, (a, b), cfg.resolution)?;
            for p in &points {
                labels.row(&[
                    g.into(),
                    AXIS_NAMES[a].into(),
                    AXIS_NAMES[b].into(),
                    p.x.into(),
                    p.y.into(),
                    p.label.as_str().into(),
                ]);
            }
            for label in [
                BellLabel::InvalidState,
                BellLabel::Undistillable,
                BellLabel::DistillableNotScd,
                BellLabel::Scd,
            ] {
                let n = points.iter().filter(|p| p.label == label).count();
                counts.row(&[
                    g.into(),
                    AXIS_NAMES[a].into(),
                    AXIS_NAMES[b].into(),
                    label.as_str().into(),
                    n.into(),
                ]);
            }
        }
        let mut row: Vec<Cell> = vec![g.into()];
        match find_nonconvexity_witness(&model, &range, cfg.witness_samples, cfg.seed)? {
            Some(w) => {
                row.push(true.into());
                row.extend(
                    w.first
                        .iter()
                        .chain(&w.second)
                        .chain(&w.mixture)
                        .map(|&x| Cell::from(x)),
                );
            }
            None => {
                row.push(false.into());
                row.extend((0..15).map(|_| Cell::Empty));
            }
        }
        witnesses.row(&row);
    }
    sink.csv("", &labels)?;
    sink.csv("_areas", &counts)?;
    sink.csv("_witness", &witnesses)?;
    Ok(())
}

pub fn qutrit(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    cfg.require_family(&[Family::BilinearBiquadratic], "qutrit")?;
    let target = cfg.target()?;
    let sampler = cfg.sampler()?;
    let n = cfg.samples(CURVE_SAMPLES)?;
    let opts = cfg.range_options();
    let g_grid = cfg.g_grid()?;
    let mut table = Table::new(["theta", "g", "p", "std_error", "eps_lo", "eps_hi"]);
    for theta in cfg.theta_grid()? {
        let mut spec = cfg.model.clone();
        spec.theta = theta;
        // Local fields cannot move the energy of a target with maximally mixed
        // marginals, so one optimizer run per angle covers every field value.
        let shared = if target.has_maximally_mixed_marginals() {
            Some(target_range(&Model::new(spec.with_g(0.0))?, target, &opts)?.0)
        } else {
            None
        };
        for &g in &g_grid {
            let model = Model::new(spec.with_g(g))?;
            let range = match shared {
                Some(r) => r,
                None => target_range(&model, target, &opts)?.0,
            };
            let r = estimate_p(&sampler, &model, &range, n, cfg.seed)?;
            table.row(&[
                theta.into(),
                g.into(),
                r.estimate.into(),
                r.std_error.into(),
                range.lo.into(),
                range.hi.into(),
            ]);
        }
    }
    sink.csv("", &table)?;
    Ok(())
}

#[derive(Serialize)]
struct DfEntry {
    rank: usize,
    eta: f64,
    std_error: f64,
    n_samples: u64,
    seed: u64,
}

pub fn df(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    if cfg.ranks.is_empty() {
        return Err(ConfigError("ranks must list at least one rank".into()).into());
    }
    let n = cfg.samples(ETA_SAMPLES)?;
    let mut table = Table::new(["rank", "eta", "std_error", "n_samples"]);
    let mut entries = Vec::new();
    for &rank in &cfg.ranks {
        let r = estimate_df(rank, n, cfg.seed)?;
        table.row(&[rank.into(), r.estimate.into(), r.std_error.into(), r.n_samples.into()]);
        entries.push(DfEntry {
            rank,
            eta: r.estimate,
            std_error: r.std_error,
            n_samples: r.n_samples,
            seed: cfg.seed,
        });
    }
    sink.csv("", &table)?;
    sink.json("", &entries)?;
    Ok(())
}

#[derive(Serialize)]
struct IndependenceSummary {
    rank: usize,
    g: f64,
    n_samples: u64,
    eta: f64,
    eta_std_error: f64,
    max_deviation: f64,
    min_count: u64,
    empty_bins: usize,
    target_range: EnergyRange,
    p_independence: f64,
    p_independence_std_error: f64,
    p_direct: f64,
    p_direct_std_error: f64,
}

pub fn independence(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    cfg.require_family(&TWO_QUBIT, "independence")?;
    let model = Model::new(cfg.model.clone())?;
    let n = cfg.samples(CURVE_SAMPLES)?;
    let (range, _) = target_range(&model, TargetName::PsiMinus, &cfg.range_options())?;
    let report = independence_check(cfg.rank, &model, n, cfg.independence_bins, cfg.seed)?;
    let mut table = Table::new(["lo", "hi", "samples", "distillable", "fraction", "deviation"]);
    for b in &report.bins {
        let dev = b.fraction.map(|f| f - report.eta);
        table.row(&[
            b.lo.into(),
            b.hi.into(),
            b.samples.into(),
            b.distillable.into(),
            b.fraction.into(),
            dev.into(),
        ]);
    }
    let sampler = scd_core::states::StateSampler::Induced {
        dims: vec![2, 2],
        rank: cfg.rank,
    };
    let direct = estimate_p(&sampler, &model, &range, n, cfg.seed.wrapping_add(1))?;
    let h = direct.histogram.as_ref().expect("estimate_p records its histogram");
    sink.csv("", &table)?;
    sink.json(
        "_summary",
        &IndependenceSummary {
            rank: cfg.rank,
            g: cfg.model.g,
            n_samples: report.n_samples,
            eta: report.eta,
            eta_std_error: report.eta_std_error,
            max_deviation: report.max_deviation,
            min_count: report.min_count,
            empty_bins: report.empty_bins(),
            target_range: range,
            p_independence: p_via_independence(report.eta, h, &range),
            p_independence_std_error: p_via_independence_std_error(report.eta, report.eta_std_error, h, &range),
            p_direct: direct.estimate,
            p_direct_std_error: direct.std_error,
        },
    )?;
    Ok(())
}

pub fn prange(cfg: &RunConfig, sink: &mut Sink) -> Result<()> {
    let target = cfg.target()?;
    let psi = target_state(target)?;
    let opts = cfg.range_options();
    let mut table = Table::new([
        "g",
        "eps_lo",
        "eps_hi",
        "analytic_lo",
        "analytic_hi",
        "spectrum_lo",
        "spectrum_hi",
    ]);
    for g in cfg.g_grid()? {
        let model = Model::new(cfg.model.with_g(g))?;
        let r = target_energy_range(&model, &psi, &opts)?;
        if !r.converged {
            return Err(
                Error::NotConverged(format!("{target} range at g = {g} after {} restarts", r.restarts_used)).into(),
            );
        }
        let analytic = target_energy_bounds_analytic(&model.spec, target);
        let spectrum = model.state_energy_bounds()?;
        table.row(&[
            g.into(),
            r.range.lo.into(),
            r.range.hi.into(),
            analytic.map(|a| a.lo).into(),
            analytic.map(|a| a.hi).into(),
            spectrum.lo.into(),
            spectrum.hi.into(),
        ]);
    }
    sink.csv("", &table)?;
    Ok(())
}
