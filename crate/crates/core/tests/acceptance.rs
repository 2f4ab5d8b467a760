//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances are fixed; the master seed is fixed and was never tuned.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scd_core::distill::{
    delta_p, energy_histogram, estimate_df, estimate_p, independence_check, p_via_independence,
    p_via_independence_std_error, thermal_boundary, wcec_satisfied, ThermalBoundary,
};
use scd_core::hamiltonian::{EnergyRange, Model, ModelSpec, TargetName};
use scd_core::montecarlo::MonteCarloReport;
use scd_core::range::{ghz_dressing, target_energy, target_energy_range, target_range, RangeOptions};
use scd_core::states::{bell_diagonal, target_state, thermal_state, StateSampler};
use scd_core::tensor::hermitian_eigenvalues;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn pure2() -> StateSampler {
    StateSampler::HaarPure { dims: vec![2, 2] }
}

fn model(spec: ModelSpec) -> Model {
    Model::new(spec).expect("valid model")
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

fn combined_sigma(a: &MonteCarloReport, b: &MonteCarloReport) -> f64 {
    (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

fn c1_distillability_factor() -> Outcome {
    let r4 = estimate_df(4, 1_000_000, SEED).unwrap();
    let r3 = estimate_df(3, 1_000_000, SEED + 1).unwrap();
    let r2 = estimate_df(2, 100_000, SEED + 2).unwrap();
    let pass = (r4.estimate - 0.756).abs() <= 0.005 && (r3.estimate - 0.928).abs() <= 0.005 && r2.estimate >= 0.999;
    outcome(
        pass,
        format!(
            "eta(4) = {:.4} (target 0.756 +- 0.005), eta(3) = {:.4} (0.928 +- 0.005), eta(2) = {:.5} (>= 0.999)",
            r4.estimate, r3.estimate, r2.estimate
        ),
    )
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c2_closed_form_spectra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let gamma = rng.random_range(-3.0..3.0);
        let g = rng.random_range(-3.0..3.0);
        let h = model(ModelSpec::transverse_xy(gamma, g)).hamiltonian;
        let e = (4.0 * g * g + gamma * gamma).sqrt();
        worst = worst.max(max_diff(
            &hermitian_eigenvalues(&h).unwrap(),
            &sorted(vec![-1.0, 1.0, -e, e]),
        ));

        let delta = rng.random_range(-3.0..3.0);
        let g = rng.random_range(-3.0..3.0);
        let h = model(ModelSpec::xxz(delta, g)).hamiltonian;
        let expected = sorted(vec![
            -1.0 - delta / 2.0,
            1.0 - delta / 2.0,
            -2.0 * g + delta / 2.0,
            2.0 * g + delta / 2.0,
        ]);
        worst = worst.max(max_diff(&hermitian_eigenvalues(&h).unwrap(), &expected));
    }
    outcome(
        worst <= 1e-10,
        format!("max eigenvalue error over 200 models = {worst:.2e} (<= 1e-10)"),
    )
}

fn c3_optimizer_ranges() -> Outcome {
    let opts = RangeOptions {
        seed: SEED,
        ..RangeOptions::default()
    };
    let psi = target_state(TargetName::PsiMinus).unwrap();
    let mut worst = 0.0f64;
    let mut converged = true;
    for gamma in [0.5, 1.0, 2.0] {
        let r = target_energy_range(&model(ModelSpec::transverse_xy(gamma, 0.8)), &psi, &opts).unwrap();
        let eps = f64::max(1.0, gamma);
        worst = worst.max((r.range.lo + eps).abs()).max((r.range.hi - eps).abs());
        converged &= r.converged;
    }
    for delta in [0.5, 2.0, 3.0] {
        let r = target_energy_range(&model(ModelSpec::xxz(delta, 0.8)), &psi, &opts).unwrap();
        let lo = -(1.0 + delta / 2.0);
        let hi = if delta < 1.0 { 1.0 - delta / 2.0 } else { delta / 2.0 };
        worst = worst.max((r.range.lo - lo).abs()).max((r.range.hi - hi).abs());
        converged &= r.converged;
    }
    let ghz = target_state(TargetName::Ghz3).unwrap();
    let ring = model(ModelSpec::ring_xy(3, 1.0, 1.0));
    let r = target_energy_range(&ring, &ghz, &opts).unwrap();
    worst = worst.max((r.range.lo + 1.0).abs()).max((r.range.hi - 3.0).abs());
    converged &= r.converged;

    let mut curve = 0.0f64;
    for theta in [0.0, FRAC_PI_2, PI] {
        let e = target_energy(&ring, &ghz, &ghz_dressing(theta)).unwrap();
        curve = curve.max((e - (1.0 + 2.0 * theta.sin())).abs());
    }
    outcome(
        worst <= 1e-6 && converged && curve <= 1e-12,
        format!("max range error = {worst:.2e} (<= 1e-6), all converged = {converged}, GHZ curve error = {curve:.1e}"),
    )
}

fn c4_field_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let opts = RangeOptions {
        seed: SEED,
        ..RangeOptions::default()
    };
    let mut hits = 0u64;
    for k in 0..20 {
        let spec = ModelSpec::non_interacting(2, unit_vector(&mut rng), unit_vector(&mut rng));
        let m = model(spec);
        let (range, _) = target_range(&m, TargetName::PsiMinus, &opts).unwrap();
        let r = estimate_p(&pure2(), &m, &range, 100_000, SEED + k).unwrap();
        hits += (r.estimate * r.n_samples as f64).round() as u64;
    }
    let mut minimal = Vec::new();
    for g in [0.1, 1.0, 10.0] {
        let spec = ModelSpec::minimal_interaction(
            2,
            unit_vector(&mut rng),
            unit_vector(&mut rng),
            unit_vector(&mut rng),
            unit_vector(&mut rng),
            g,
        );
        let m = model(spec);
        let (range, _) = target_range(&m, TargetName::PsiMinus, &opts).unwrap();
        minimal.push(estimate_p(&pure2(), &m, &range, 100_000, SEED).unwrap().estimate);
    }
    let pass = hits == 0 && minimal.iter().all(|&p| p > 0.0);
    outcome(
        pass,
        format!(
            "non-interacting SCD hits = {hits} (== 0); minimal-interaction p at g = 0.1, 1, 10: {minimal:.4?} (> 0)"
        ),
    )
}

fn c5_small_field() -> Outcome {
    let range = EnergyRange::symmetric(1.0);
    let p_small = estimate_p(
        &pure2(),
        &model(ModelSpec::transverse_xy(1.0, 1e-3)),
        &range,
        100_000,
        SEED,
    )
    .unwrap();
    let p_half = estimate_p(
        &pure2(),
        &model(ModelSpec::transverse_xy(1.0, 0.5)),
        &range,
        100_000,
        SEED + 1,
    )
    .unwrap();
    let p_three = estimate_p(
        &pure2(),
        &model(ModelSpec::transverse_xy(1.0, 3.0)),
        &range,
        100_000,
        SEED + 2,
    )
    .unwrap();
    let gap = (p_half.estimate - p_three.estimate) / combined_sigma(&p_half, &p_three);
    outcome(
        p_small.estimate >= 0.999 && gap > 5.0,
        format!(
            "p(g=1e-3) = {:.5} (>= 0.999); p(0.5) - p(3) = {:.1} combined sigma (> 5)",
            p_small.estimate, gap
        ),
    )
}

fn c6_bell_diagonal_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut states = Vec::with_capacity(10_000);
    while states.len() < 10_000 {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if let Ok(s) = bell_diagonal(c[0], c[1], c[2]) {
            states.push(s);
        }
    }
    let mut violations = 0;
    for gamma in [0.5, 1.0, 2.0] {
        let m = model(ModelSpec::transverse_xy(gamma, 1.0));
        let range = EnergyRange::symmetric(f64::max(1.0, gamma));
        violations += states
            .iter()
            .filter(|s| !wcec_satisfied(s, &m, &range).unwrap())
            .count();
    }
    outcome(
        violations == 0,
        format!("WCEC violations over 3 x 10^4 checks = {violations} (== 0)"),
    )
}

fn c7_independence() -> Outcome {
    let m = model(ModelSpec::transverse_xy(1.0, 1.0));
    let range = EnergyRange::symmetric(1.0);
    let report = independence_check(4, &m, 1_000_000, 20, SEED).unwrap();
    let rank4 = StateSampler::Induced {
        dims: vec![2, 2],
        rank: 4,
    };
    let hist = energy_histogram(&rank4, &m, 200, 1_000_000, SEED + 1).unwrap();
    let h = hist.histogram.as_ref().unwrap();
    let p_ind = p_via_independence(report.eta, h, &range);
    let se_ind = p_via_independence_std_error(report.eta, report.eta_std_error, h, &range);
    let direct = estimate_p(&rank4, &m, &range, 1_000_000, SEED + 2).unwrap();
    let z = (p_ind - direct.estimate).abs() / (se_ind.powi(2) + direct.std_error.powi(2)).sqrt();
    let worst_bin = report
        .well_populated()
        .max_by(|a, b| {
            let da = (a.fraction.unwrap() - report.eta).abs();
            let db = (b.fraction.unwrap() - report.eta).abs();
            da.total_cmp(&db)
        })
        .map(|b| format!("[{:.3}, {:.3}] with {} samples", b.lo, b.hi, b.samples))
        .unwrap_or_default();
    outcome(
        report.max_deviation < 0.05 && z <= 3.0,
        format!(
            "max |P(dist|E) - eta| = {:.4} (< 0.05, worst bin {worst_bin}); p_indep = {:.4} vs p_direct = {:.4}, {:.2} combined sigma (<= 3)",
            report.max_deviation, p_ind, direct.estimate, z
        ),
    )
}

fn c8_thermal() -> Outcome {
    let range = EnergyRange::symmetric(1.0);
    let zero = model(ModelSpec::transverse_xy(1.0, 0.0));
    let none = thermal_boundary(&zero, &range).unwrap() == ThermalBoundary::NoBoundary;
    let mut tanh_err = 0.0f64;
    for beta in [0.5, 1.0, 2.0] {
        let e = thermal_state(&zero, beta)
            .unwrap()
            .expectation(&zero.hamiltonian)
            .unwrap();
        tanh_err = tanh_err.max((e + f64::tanh(beta)).abs());
    }
    let strong = model(ModelSpec::transverse_xy(1.0, 2.0));
    let (beta, residual) = match thermal_boundary(&strong, &range).unwrap() {
        ThermalBoundary::At { beta, .. } => {
            let e = thermal_state(&strong, beta)
                .unwrap()
                .expectation(&strong.hamiltonian)
                .unwrap();
            (beta, (e + 1.0).abs())
        }
        ThermalBoundary::NoBoundary => (f64::NAN, f64::INFINITY),
    };
    outcome(
        none && tanh_err <= 1e-10 && residual < 1e-6,
        format!("g=0 no boundary = {none}, tanh error = {tanh_err:.1e} (<= 1e-10); g=2 beta* = {beta:.6}, residual = {residual:.1e} (< 1e-6)"),
    )
}

fn c9_multipartite() -> Outcome {
    let opts = RangeOptions {
        seed: SEED,
        ..RangeOptions::default()
    };
    let mut w_curve = Vec::new();
    for g in [0.25, 0.5, 1.0, 2.0] {
        let m = model(ModelSpec::ring_xy(3, 1.0, g));
        let (range, _) = target_range(&m, TargetName::W3, &opts).unwrap();
        w_curve.push(estimate_p(&StateSampler::WClass, &m, &range, 100_000, SEED).unwrap());
    }
    let w_ok = w_curve[..3].iter().all(|r| r.estimate >= 1.0 - 1e-3) && w_curve[3].estimate < 1.0;

    let ghz_grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    let ghz: Vec<MonteCarloReport> = ghz_grid
        .iter()
        .map(|&g| {
            let m = model(ModelSpec::ring_xy(3, 1.0, g));
            let (range, _) = target_range(&m, TargetName::Ghz3, &opts).unwrap();
            estimate_p(&StateSampler::GhzClass, &m, &range, 100_000, SEED).unwrap()
        })
        .collect();
    let ghz_ok = ghz
        .windows(2)
        .all(|w| w[1].estimate <= w[0].estimate + 2.0 * combined_sigma(&w[0], &w[1]));
    let fmt = |v: &[MonteCarloReport]| {
        v.iter()
            .map(|r| format!("{:.4}", r.estimate))
            .collect::<Vec<_>>()
            .join(", ")
    };
    outcome(
        w_ok && ghz_ok,
        format!(
            "W p at g = 0.25, 0.5, 1, 2: [{}] (first three >= 0.999, last < 1); GHZ p at g = 0..2: [{}] (non-increasing within 2 sigma)",
            fmt(&w_curve),
            fmt(&ghz)
        ),
    )
}

fn c10_qualitative() -> Outcome {
    let range = EnergyRange::symmetric(1.0);
    let n = 200_000;
    let mut checks = Vec::new();

    // Longitudinal model: the decay rate of p changes abruptly at g = 1.
    let p = |g: f64| estimate_p(&pure2(), &model(ModelSpec::longitudinal_xy(1.0, g)), &range, n, SEED).unwrap();
    let (a, b, c) = (p(0.6), p(1.0), p(1.4));
    let left = (b.estimate - a.estimate) / 0.4;
    let right = (c.estimate - b.estimate) / 0.4;
    let sigma = (a.std_error.powi(2) + 4.0 * b.std_error.powi(2) + c.std_error.powi(2)).sqrt() / 0.4;
    let kink = (right - left).abs() / sigma;
    checks.push((
        kink > 5.0,
        format!("longitudinal slope change at g=1: {left:.3} -> {right:.3} ({kink:.1} sigma, > 5)"),
    ));

    // Delta p changes sign on (0, 3).
    let grid: Vec<f64> = (1..=12).map(|k| 0.25 * k as f64).collect();
    let opts = RangeOptions {
        seed: SEED,
        ..RangeOptions::default()
    };
    let dps: Vec<_> = grid.iter().map(|&g| delta_p(1.0, g, n, SEED, &opts).unwrap()).collect();
    let positive = dps.iter().any(|d| d.delta > 3.0 * d.std_error);
    let negative = dps.iter().any(|d| d.delta < -3.0 * d.std_error);
    let dp_str = dps
        .iter()
        .map(|d| format!("{:+.3}", d.delta))
        .collect::<Vec<_>>()
        .join(" ");
    checks.push((
        positive && negative,
        format!("Delta p over g = 0.25..3: [{dp_str}] (both signs beyond 3 sigma)"),
    ));

    // Qutrit p at zero field depends on the mixing angle.
    let qutrit: Vec<MonteCarloReport> = (0..12)
        .map(|k| {
            let theta = k as f64 * PI / 6.0;
            let m = model(ModelSpec::bilinear_biquadratic(theta, 0.0));
            let (r, _) = target_range(&m, TargetName::PhiD(3), &opts).unwrap();
            estimate_p(&StateSampler::HaarPure { dims: vec![3, 3] }, &m, &r, 50_000, SEED).unwrap()
        })
        .collect();
    let hi = qutrit.iter().max_by(|a, b| a.estimate.total_cmp(&b.estimate)).unwrap();
    let lo = qutrit.iter().min_by(|a, b| a.estimate.total_cmp(&b.estimate)).unwrap();
    let spread = (hi.estimate - lo.estimate) / combined_sigma(hi, lo);
    let q_str = qutrit
        .iter()
        .map(|r| format!("{:.4}", r.estimate))
        .collect::<Vec<_>>()
        .join(", ");
    checks.push((
        spread > 5.0,
        format!("qutrit p(g=0) over theta = k pi/6: [{q_str}] (spread {spread:.1} sigma, > 5)"),
    ));

    // Fixed seeds give identical output regardless of worker count.
    let m = model(ModelSpec::transverse_xy(1.0, 1.0));
    let first = estimate_p(&pure2(), &m, &range, 50_000, SEED).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let second = pool.install(|| estimate_p(&pure2(), &m, &range, 50_000, SEED).unwrap());
    let same = first.estimate == second.estimate && first.histogram == second.histogram;
    checks.push((same, format!("deterministic across worker counts = {same}")));

    let pass = checks.iter().all(|(ok, _)| *ok);
    let detail = checks
        .into_iter()
        .map(|(ok, d)| format!("{}{d}", if ok { "" } else { "[x] " }))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(pass, detail)
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1", "distillability factor", c1_distillability_factor),
        ("2", "closed-form spectra", c2_closed_form_spectra),
        ("3", "optimizer ranges", c3_optimizer_ranges),
        ("4", "non-interacting and minimal-interaction models", c4_field_structure),
        ("5", "small-field limit and field decay", c5_small_field),
        ("6", "Bell-diagonal sweep", c6_bell_diagonal_sweep),
        ("7", "independence diagnostic", c7_independence),
        ("8", "thermal boundary", c8_thermal),
        ("9", "three-qubit classes", c9_multipartite),
        ("10", "qualitative curve properties", c10_qualitative),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (id, name, run) in criteria {
        if filter.as_deref().is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {id} ({name}) [{:.1}s]: {}",
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    }
}
