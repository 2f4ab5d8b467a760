//! Reachable target-state energies under local unitaries.
//!
//! The target `|Φ>` is dressed as `(U_1 ⊗ ... ⊗ U_N)|Φ>` and its energy
//! `<Φ~|H|Φ~>` is minimized and maximized over the local unitaries.

mod simplex;

pub use simplex::{nelder_mead, nelder_mead_polished, Minimum, SimplexOptions};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{target_energy_bounds_analytic, EnergyRange, Family, Model, ModelSpec, TargetName};
use crate::states::{target_state, QuantumState};
use crate::tensor::{apply_on_site, hermitian_eigenvalues, unitary_from_generator, ComplexMatrix, C64, ZERO};

/// Unitarity tolerance for realized site unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// One site's unitary.
#[derive(Clone, Debug, PartialEq)]
pub enum SiteUnitary {
    /// `[[cos θ e^{iφ1}, sin θ e^{iφ2}], [-sin θ e^{-iφ2}, cos θ e^{-iφ1}]]`
    /// with parameters `[θ, φ1, φ2]`.
    Qubit([f64; 3]),
    /// `exp(iG)` with `G` Hermitian, built from `d²` reals: the diagonal,
    /// then real and imaginary parts of each upper-triangular entry.
    Generator {
        dim: usize,
        params: Vec<f64>,
    },
    Explicit(ComplexMatrix),
}

impl SiteUnitary {
    pub fn identity(dim: usize) -> Self {
        if dim == 2 {
            SiteUnitary::Qubit([0.0; 3])
        } else {
            SiteUnitary::Generator {
                dim,
                params: vec![0.0; dim * dim],
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SiteUnitary::Qubit(_) => 2,
            SiteUnitary::Generator { dim, .. } => *dim,
            SiteUnitary::Explicit(m) => m.dim(),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            SiteUnitary::Qubit([theta, phi1, phi2]) => {
                let (c, s) = (theta.cos(), theta.sin());
                let e1 = C64::from_polar(1.0, *phi1);
                let e2 = C64::from_polar(1.0, *phi2);
                ComplexMatrix::from_vec(2, vec![e1 * c, e2 * s, -e2.conj() * s, e1.conj() * c]).expect("2x2")
            }
            SiteUnitary::Generator { dim, params } => {
                unitary_from_generator(&generator_matrix(*dim, params)).expect("generator is Hermitian by construction")
            }
            SiteUnitary::Explicit(m) => m.clone(),
        }
    }
}

fn generator_matrix(d: usize, params: &[f64]) -> ComplexMatrix {
    assert_eq!(params.len(), d * d, "generator needs d^2 parameters");
    let mut g = ComplexMatrix::zeros(d);
    for (i, &p) in params.iter().take(d).enumerate() {
        g.set(i, i, C64::new(p, 0.0));
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(params[k], params[k + 1]);
            g.set(i, j, z);
            g.set(j, i, z.conj());
            k += 2;
        }
    }
    g
}

/// Product of single-site unitaries `U_1 ⊗ ... ⊗ U_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitarySet {
    pub sites: Vec<SiteUnitary>,
}

impl LocalUnitarySet {
    pub fn identity(dims: &[usize]) -> Self {
        Self {
            sites: dims.iter().map(|&d| SiteUnitary::identity(d)).collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sites.iter().map(SiteUnitary::dim).collect()
    }

    pub fn matrices(&self) -> Vec<ComplexMatrix> {
        self.sites.iter().map(SiteUnitary::matrix).collect()
    }

    /// Largest `|U U† - I|` entry over the sites.
    pub fn unitarity_deviation(&self) -> f64 {
        self.matrices()
            .iter()
            .map(|u| (u * &u.adjoint()).max_abs_diff(&ComplexMatrix::identity(u.dim())))
            .fold(0.0, f64::max)
    }

    /// `(⊗ U_k) |ψ>`.
    pub fn apply(&self, psi: &[C64]) -> Result<Vec<C64>> {
        let dims = self.dims();
        let total: usize = dims.iter().product();
        if total != psi.len() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: psi.len(),
            });
        }
        let mut out = psi.to_vec();
        for (site, u) in self.matrices().iter().enumerate() {
            apply_on_site(&mut out, &dims, site, u);
        }
        Ok(out)
    }
}

/// Dressing that turns the GHZ state into a one-parameter family whose ring
/// energy sweeps `1 + 2 sin θ`: a real rotation by `θ/2` on site 1 and
/// `[[1, 1], [-1, 1]]/√2` on sites 2 and 3.
pub fn ghz_dressing(theta: f64) -> LocalUnitarySet {
    let h = SiteUnitary::Qubit([std::f64::consts::FRAC_PI_4, 0.0, 0.0]);
    LocalUnitarySet {
        sites: vec![SiteUnitary::Qubit([theta / 2.0, 0.0, 0.0]), h.clone(), h],
    }
}

/// `<Φ|(⊗U)† H (⊗U)|Φ>` for a pure target.
pub fn target_energy(model: &Model, target: &QuantumState, us: &LocalUnitarySet) -> Result<f64> {
    let psi = target
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("target state must be pure".into()))?;
    if us.dims() != target.dims() {
        return Err(Error::DimensionMismatch {
            expected: target.dims().len(),
            found: us.sites.len(),
        });
    }
    if model.hamiltonian.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: model.hamiltonian.dim(),
        });
    }
    Ok(model.hamiltonian.expectation(&us.apply(psi)?).re)
}

/// Which sites carry free unitaries during optimization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DressingMode {
    #[default]
    AllSites,
    /// Only site 1 varies. Sufficient for maximally entangled bipartite
    /// targets, where `(U_1 ⊗ U_2)|Φ> = (U_1 U_2ᵀ ⊗ I)|Φ>`.
    FirstSiteOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RangeOptions {
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// The best three restarts must agree to this for `converged`.
    pub agreement: f64,
    pub seed: u64,
    pub mode: DressingMode,
}

impl Default for RangeOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            tol: 1e-8,
            max_iter: 5000,
            agreement: 1e-6,
            seed: 0,
            mode: DressingMode::AllSites,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RangeResult {
    pub range: EnergyRange,
    pub argmin: LocalUnitarySet,
    pub argmax: LocalUnitarySet,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Layout of the flat parameter vector handed to the simplex.
struct Parametrization {
    dims: Vec<usize>,
    free: Vec<bool>,
}

impl Parametrization {
    fn new(dims: &[usize], mode: DressingMode) -> Self {
        let free = (0..dims.len())
            .map(|k| mode == DressingMode::AllSites || k == 0)
            .collect();
        Self {
            dims: dims.to_vec(),
            free,
        }
    }

    fn site_len(d: usize) -> usize {
        if d == 2 {
            3
        } else {
            d * d
        }
    }

    fn len(&self) -> usize {
        self.dims
            .iter()
            .zip(&self.free)
            .filter(|(_, &f)| f)
            .map(|(&d, _)| Self::site_len(d))
            .sum()
    }

    fn unpack(&self, x: &[f64]) -> LocalUnitarySet {
        let mut offset = 0;
        let sites = self
            .dims
            .iter()
            .zip(&self.free)
            .map(|(&d, &free)| {
                if !free {
                    return SiteUnitary::identity(d);
                }
                let n = Self::site_len(d);
                let p = &x[offset..offset + n];
                offset += n;
                if d == 2 {
                    SiteUnitary::Qubit([p[0], p[1], p[2]])
                } else {
                    SiteUnitary::Generator {
                        dim: d,
                        params: p.to_vec(),
                    }
                }
            })
            .collect();
        LocalUnitarySet { sites }
    }

    fn random_start<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.len())
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect()
    }
}

struct RestartOutcome {
    min: Minimum,
    max: Minimum,
}

fn agree(values: &mut [f64], tol: f64) -> bool {
    values.sort_by(f64::total_cmp);
    values.len() >= 3 && values[2] - values[0] <= tol
}

/// Minimum and maximum of [`target_energy`] over local unitaries, by
/// multi-start simplex descent. Restart `k` draws its start from stream `k`
/// of the master seed, so the result does not depend on thread scheduling.
pub fn target_energy_range(model: &Model, target: &QuantumState, opts: &RangeOptions) -> Result<RangeResult> {
    let psi = target
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("target state must be pure".into()))?;
    if model.hamiltonian.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: model.hamiltonian.dim(),
        });
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is required".into()));
    }
    let param = Parametrization::new(target.dims(), opts.mode);
    let h = &model.hamiltonian;
    let energy = |x: &[f64]| -> f64 {
        let us = param.unpack(x);
        h.expectation(&us.apply(psi).expect("dims checked")).re
    };
    let simplex = SimplexOptions {
        f_tol: opts.tol,
        x_tol: opts.tol.sqrt(),
        max_iter: opts.max_iter,
        initial_step: 0.5,
    };

    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let x0 = param.random_start(&mut rng);
            let min = nelder_mead_polished(energy, &x0, &simplex, 3);
            let mut max = nelder_mead_polished(|x| -energy(x), &x0, &simplex, 3);
            max.value = -max.value;
            RestartOutcome { min, max }
        })
        .collect();

    // First-found wins on ties.
    let mut best_min = &outcomes[0].min;
    let mut best_max = &outcomes[0].max;
    for o in &outcomes[1..] {
        if o.min.value < best_min.value {
            best_min = &o.min;
        }
        if o.max.value > best_max.value {
            best_max = &o.max;
        }
    }
    let mut mins: Vec<f64> = outcomes.iter().map(|o| o.min.value).collect();
    let mut maxs: Vec<f64> = outcomes.iter().map(|o| -o.max.value).collect();
    let converged = agree(&mut mins, opts.agreement) && agree(&mut maxs, opts.agreement);

    let range = EnergyRange {
        lo: best_min.value,
        hi: best_max.value,
    };
    let ev = hermitian_eigenvalues(h)?;
    let spectrum = EnergyRange {
        lo: ev[0],
        hi: ev[ev.len() - 1],
    };
    assert!(
        spectrum.contains_range(&range, 1e-9),
        "target range {range} escapes the spectrum {spectrum}"
    );
    Ok(RangeResult {
        range,
        argmin: param.unpack(&best_min.x),
        argmax: param.unpack(&best_max.x),
        restarts_used: opts.restarts,
        converged,
    })
}

/// The target used for a model family when none is given.
pub fn default_target(spec: &ModelSpec) -> TargetName {
    match spec.family {
        Family::TransverseXy | Family::LongitudinalXy | Family::Xxz => TargetName::PsiMinus,
        Family::BilinearBiquadratic => TargetName::PhiD(3),
        Family::RingXy => TargetName::Ghz3,
        Family::NonInteracting | Family::MinimalInteraction => {
            if spec.local_dim == 2 {
                TargetName::PsiMinus
            } else {
                TargetName::PhiD(spec.local_dim)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeSource {
    Analytic,
    Optimized,
}

/// `[ε_1, ε_2]` for the model and target: the closed form when one exists,
/// otherwise the optimizer, whose non-convergence is an error here.
pub fn target_range(model: &Model, target: TargetName, opts: &RangeOptions) -> Result<(EnergyRange, RangeSource)> {
    if target.site_dims() != model.spec.site_dims() {
        return Err(Error::DimensionMismatch {
            expected: model.spec.dim(),
            found: target.site_dims().iter().product(),
        });
    }
    if let Some(r) = target_energy_bounds_analytic(&model.spec, target) {
        return Ok((r, RangeSource::Analytic));
    }
    let result = target_energy_range(model, &target_state(target)?, opts)?;
    if !result.converged {
        return Err(Error::NotConverged(format!(
            "target range for {target} on {} did not converge after {} restarts",
            model.spec.family, result.restarts_used
        )));
    }
    Ok((result.range, RangeSource::Optimized))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WRangePoint {
    pub g: f64,
    pub range: EnergyRange,
    pub spectrum: EnergyRange,
    /// At least one edge lies strictly inside the spectrum.
    pub strict: bool,
}

/// W-state target range of the ring at each field value in `grid`.
pub fn w_class_target_range(spec: &ModelSpec, grid: &[f64], opts: &RangeOptions) -> Result<Vec<WRangePoint>> {
    if spec.family != Family::RingXy {
        return Err(Error::UnsupportedModel(format!(
            "W-state ranges need the ring model, got {}",
            spec.family
        )));
    }
    let target = target_state(TargetName::W3)?;
    grid.iter()
        .map(|&g| {
            let model = Model::new(spec.with_g(g))?;
            let result = target_energy_range(&model, &target, opts)?;
            if !result.converged {
                return Err(Error::NotConverged(format!("W-state range at g = {g}")));
            }
            let spectrum = model.state_energy_bounds()?;
            let strict = result.range.lo > spectrum.lo + 1e-9 || result.range.hi < spectrum.hi - 1e-9;
            Ok(WRangePoint {
                g,
                range: result.range,
                spectrum,
                strict,
            })
        })
        .collect()
}

/// Dense random scan of the target energy; returns every sampled value.
/// Used to spot-check that the reachable set has no gaps.
pub fn scan_target_energies<R: Rng + ?Sized>(
    model: &Model,
    target: &QuantumState,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let param = Parametrization::new(target.dims(), DressingMode::AllSites);
    let psi = target
        .amplitudes()
        .ok_or_else(|| Error::InvalidState("target state must be pure".into()))?;
    let mut x = vec![0.0; param.len()];
    let mut out = Vec::with_capacity(samples);
    let mut buf = vec![ZERO; psi.len()];
    for _ in 0..samples {
        for v in x.iter_mut() {
            *v = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        }
        buf.copy_from_slice(&param.unpack(&x).apply(psi)?);
        out.push(model.hamiltonian.expectation(&buf).re);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn quick() -> RangeOptions {
        RangeOptions {
            restarts: 8,
            ..RangeOptions::default()
        }
    }

    #[test]
    fn qubit_unitaries_are_unitary() {
        let us = LocalUnitarySet {
            sites: vec![
                SiteUnitary::Qubit([0.3, 1.1, -2.0]),
                SiteUnitary::Qubit([2.0, 0.0, 0.7]),
            ],
        };
        assert!(us.unitarity_deviation() < UNITARY_TOL);
        let g = LocalUnitarySet {
            sites: vec![SiteUnitary::Generator {
                dim: 3,
                params: (0..9).map(|k| 0.3 * k as f64 - 1.0).collect(),
            }],
        };
        assert!(g.unitarity_deviation() < UNITARY_TOL);
    }

    #[test]
    fn identity_dressing_of_singlet() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        for (gamma, g) in [(0.5, 0.0), (1.0, 2.0), (3.0, -1.0)] {
            let model = Model::new(ModelSpec::transverse_xy(gamma, g)).unwrap();
            let e = target_energy(&model, &target, &LocalUnitarySet::identity(&[2, 2])).unwrap();
            assert!((e + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_curve() {
        let target = target_state(TargetName::Ghz3).unwrap();
        let model = Model::new(ModelSpec::ring_xy(3, 1.0, 0.7)).unwrap();
        for theta in [0.0, 0.4, FRAC_PI_2, 2.0, PI, 4.5] {
            let e = target_energy(&model, &target, &ghz_dressing(theta)).unwrap();
            assert!((e - (1.0 + 2.0 * theta.sin())).abs() < 1e-12, "theta {theta}: {e}");
        }
    }

    #[test]
    fn qubit_angle_family() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        let gamma = 3.0;
        let model = Model::new(ModelSpec::transverse_xy(gamma, 0.4)).unwrap();
        for (t1, t2) in [(0.1, 0.9), (1.3, -0.2), (0.0, 0.0)] {
            let us = LocalUnitarySet {
                sites: vec![
                    SiteUnitary::Qubit([t1, FRAC_PI_2, 0.0]),
                    SiteUnitary::Qubit([t2, FRAC_PI_2, 0.0]),
                ],
            };
            let e = target_energy(&model, &target, &us).unwrap();
            let expected = 0.5 * (-1.0 - gamma + (-1.0 + gamma) * (2.0 * (t1 - t2)).cos());
            assert!((e - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_dressing_is_rejected() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        let model = Model::new(ModelSpec::transverse_xy(1.0, 0.0)).unwrap();
        assert!(target_energy(&model, &target, &LocalUnitarySet::identity(&[2, 2, 2])).is_err());
        let mixed = crate::states::werner_state(0.5).unwrap();
        assert!(target_energy(&model, &mixed, &LocalUnitarySet::identity(&[2, 2])).is_err());
    }

    #[test]
    fn optimizer_matches_transverse_closed_form() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        let model = Model::new(ModelSpec::transverse_xy(2.0, 0.3)).unwrap();
        let r = target_energy_range(&model, &target, &quick()).unwrap();
        assert!(r.converged);
        assert!(
            (r.range.lo + 2.0).abs() < 1e-6 && (r.range.hi - 2.0).abs() < 1e-6,
            "{:?}",
            r.range
        );
        assert!((target_energy(&model, &target, &r.argmin).unwrap() - r.range.lo).abs() < 1e-12);
    }

    #[test]
    fn one_sided_and_two_sided_agree() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        let model = Model::new(ModelSpec::xxz(0.5, 1.0)).unwrap();
        let a = target_energy_range(&model, &target, &quick()).unwrap();
        let b = target_energy_range(
            &model,
            &target,
            &RangeOptions {
                mode: DressingMode::FirstSiteOnly,
                ..quick()
            },
        )
        .unwrap();
        assert!((a.range.lo - b.range.lo).abs() < 1e-8);
        assert!((a.range.hi - b.range.hi).abs() < 1e-8);
    }

    #[test]
    fn resolver_prefers_closed_form() {
        let model = Model::new(ModelSpec::transverse_xy(0.5, 1.0)).unwrap();
        let (r, src) = target_range(&model, TargetName::PsiMinus, &quick()).unwrap();
        assert_eq!(src, RangeSource::Analytic);
        assert_eq!(r, EnergyRange::symmetric(1.0));
        assert!(target_range(&model, TargetName::Ghz3, &quick()).is_err());
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let target = target_state(TargetName::PsiMinus).unwrap();
        let model = Model::new(ModelSpec::xxz(2.0, 0.5)).unwrap();
        let a = target_energy_range(&model, &target, &quick()).unwrap();
        let b = target_energy_range(&model, &target, &quick()).unwrap();
        assert_eq!(a, b);
    }
}
