use serde::{Deserialize, Serialize};

use crate::distill::{energy_in_range, WCEC_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyRange, Family, Model, ModelSpec};
use crate::states::thermal_energy;
use crate::tensor::hermitian_eigenvalues;

/// Energy tolerance of the boundary search.
pub const BOUNDARY_TOL: f64 = 1e-6;
const MAX_BETA: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThermalBoundary {
    /// Every temperature satisfies the WCEC.
    NoBoundary,
    /// Thermal states with `β < beta` satisfy the WCEC; `energy` is the
    /// thermal energy at `beta`.
    At { beta: f64, energy: f64 },
}

impl ThermalBoundary {
    pub fn beta(&self) -> Option<f64> {
        match self {
            ThermalBoundary::NoBoundary => None,
            ThermalBoundary::At { beta, .. } => Some(*beta),
        }
    }
}

/// Full-interval WCEC membership of the Gibbs state at `beta`.
pub fn thermal_satisfies_wcec(model: &Model, range: &EnergyRange, beta: f64) -> Result<bool> {
    let ev = hermitian_eigenvalues(&model.hamiltonian)?;
    Ok(energy_in_range(thermal_energy(&ev, beta), range))
}

/// Inverse temperature at which the thermal energy, which decreases
/// monotonically in `β`, crosses the lower edge `ε_1`.
///
/// The infinite-temperature point must lie inside `range`; if the ground
/// energy does too, no crossing exists.
pub fn thermal_boundary(model: &Model, range: &EnergyRange) -> Result<ThermalBoundary> {
    let ev = hermitian_eigenvalues(&model.hamiltonian)?;
    let hot = thermal_energy(&ev, 0.0);
    if !energy_in_range(hot, range) {
        return Err(Error::InvalidParameter(format!(
            "infinite-temperature energy {hot} lies outside the target range {range}"
        )));
    }
    let target = range.lo;
    if ev[0] >= target - WCEC_TOL {
        return Ok(ThermalBoundary::NoBoundary);
    }
    let f = |beta: f64| thermal_energy(&ev, beta) - target;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_BETA {
            return Err(Error::NotConverged(format!(
                "no thermal crossing below beta = {MAX_BETA}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let beta = 0.5 * (lo + hi);
    let energy = thermal_energy(&ev, beta);
    if (energy - target).abs() > BOUNDARY_TOL {
        return Err(Error::NotConverged(format!(
            "thermal boundary residual {}",
            energy - target
        )));
    }
    Ok(ThermalBoundary::At { beta, energy })
}

/// Boundary at each field value; the target range is fixed along the grid.
pub fn thermal_boundary_curve(
    spec: &ModelSpec,
    grid: &[f64],
    range: &EnergyRange,
) -> Result<Vec<(f64, ThermalBoundary)>> {
    if !matches!(spec.family, Family::TransverseXy | Family::Xxz) {
        return Err(Error::UnsupportedModel(format!(
            "thermal boundaries are defined for the transverse XY and XXZ models, got {}",
            spec.family
        )));
    }
    grid.iter()
        .map(|&g| Ok((g, thermal_boundary(&Model::new(spec.with_g(g))?, range)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_has_no_boundary() {
        let model = Model::new(ModelSpec::transverse_xy(1.0, 0.0)).unwrap();
        assert_eq!(
            thermal_boundary(&model, &EnergyRange::symmetric(1.0)).unwrap(),
            ThermalBoundary::NoBoundary
        );
    }

    #[test]
    fn strong_field_crosses_lower_edge() {
        let model = Model::new(ModelSpec::transverse_xy(1.0, 2.0)).unwrap();
        let range = EnergyRange::symmetric(1.0);
        match thermal_boundary(&model, &range).unwrap() {
            ThermalBoundary::At { beta, energy } => {
                assert!((energy + 1.0).abs() < BOUNDARY_TOL);
                assert!(thermal_satisfies_wcec(&model, &range, 0.9 * beta).unwrap());
                assert!(!thermal_satisfies_wcec(&model, &range, 1.1 * beta).unwrap());
            }
            other => panic!("expected a boundary, got {other:?}"),
        }
    }

    #[test]
    fn infinite_temperature_always_satisfies() {
        let model = Model::new(ModelSpec::xxz(2.0, 3.0)).unwrap();
        assert!(thermal_satisfies_wcec(&model, &EnergyRange { lo: -2.0, hi: 1.0 }, 0.0).unwrap());
    }

    #[test]
    fn curve_rejects_other_families() {
        let spec = ModelSpec::ring_xy(3, 1.0, 0.0);
        assert!(thermal_boundary_curve(&spec, &[0.0], &EnergyRange::symmetric(1.0)).is_err());
    }
}
