//! Distillability, the energy constraint and the estimators built on them.

mod bell;
mod estimators;
mod thermal;

pub use bell::{
    bell_cross_section, classify_magnetized, find_nonconvexity_witness, magnetized_energy, BellLabel,
    CrossSectionPoint, NonConvexityWitness, AXIS_NAMES,
};
pub use estimators::{
    delta_p, energy_histogram, estimate_df, estimate_p, independence_check, p_via_independence,
    p_via_independence_std_error, DeltaP, IndependenceBin, IndependenceReport, INDEPENDENCE_MIN_COUNT,
};
pub use thermal::{thermal_boundary, thermal_boundary_curve, thermal_satisfies_wcec, ThermalBoundary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{pauli, EnergyRange, Model};
use crate::states::{QuantumState, RANK_TOL};
use crate::tensor::{hermitian_eig, hermitian_eigenvalues, kron, ComplexMatrix};

/// Absolute slack on the target-energy interval.
pub const WCEC_TOL: f64 = 1e-9;
/// Partial-transpose eigenvalues below `-NPPT_TOL` count as negative.
pub const NPPT_TOL: f64 = 1e-10;

/// `tr(H ρ)` in units of `J`.
pub fn average_energy(rho: &QuantumState, model: &Model) -> Result<f64> {
    rho.expectation(&model.hamiltonian)
}

/// Whether the energy lies in `[ε_1, ε_2]` up to [`WCEC_TOL`].
pub fn energy_in_range(energy: f64, range: &EnergyRange) -> bool {
    range.contains(energy, WCEC_TOL)
}

pub fn wcec_satisfied(rho: &QuantumState, model: &Model, range: &EnergyRange) -> Result<bool> {
    Ok(energy_in_range(average_energy(rho, model)?, range))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distillability {
    Distillable,
    Undistillable,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    MinPtEigenvalue(f64),
    SchmidtRank(usize),
    /// Smallest single-site marginal rank over the cuts of a three-qubit
    /// pure state.
    MinCutRank(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillabilityVerdict {
    pub verdict: Distillability,
    pub witness: Option<Witness>,
}

impl DistillabilityVerdict {
    pub fn is_distillable(&self) -> bool {
        self.verdict == Distillability::Distillable
    }

    fn unknown() -> Self {
        Self {
            verdict: Distillability::Unknown,
            witness: None,
        }
    }

    fn decided(distillable: bool, witness: Witness) -> Self {
        Self {
            verdict: if distillable {
                Distillability::Distillable
            } else {
                Distillability::Undistillable
            },
            witness: Some(witness),
        }
    }
}

fn marginal_rank(rho: &QuantumState, site: usize) -> Result<usize> {
    rho.partial_trace(&[site])?.numerical_rank()
}

/// Smallest partial-transpose eigenvalue (transpose on the first factor).
pub fn min_pt_eigenvalue(rho: &QuantumState) -> Result<f64> {
    Ok(hermitian_eigenvalues(&rho.partial_transpose(0)?)?[0])
}

/// Pure bipartite states: Schmidt rank at least 2. Mixed `2 ⊗ d` states:
/// negative partial transpose. Three-qubit pure states: entangled across
/// every single-site cut. Anything else is `Unknown`.
pub fn is_distillable(rho: &QuantumState) -> DistillabilityVerdict {
    let dims = rho.dims();
    let verdict = (|| -> Result<DistillabilityVerdict> {
        if rho.is_pure() {
            if dims.len() == 2 {
                let rank = marginal_rank(rho, 0)?;
                return Ok(DistillabilityVerdict::decided(rank >= 2, Witness::SchmidtRank(rank)));
            }
            if dims == [2, 2, 2] {
                let rank = (0..3).map(|k| marginal_rank(rho, k)).collect::<Result<Vec<_>>>()?;
                let min = rank.into_iter().min().expect("three cuts");
                return Ok(DistillabilityVerdict::decided(min >= 2, Witness::MinCutRank(min)));
            }
            return Ok(DistillabilityVerdict::unknown());
        }
        if dims.len() == 2 && dims.contains(&2) {
            let min = min_pt_eigenvalue(rho)?;
            return Ok(DistillabilityVerdict::decided(
                min < -NPPT_TOL,
                Witness::MinPtEigenvalue(min),
            ));
        }
        Ok(DistillabilityVerdict::unknown())
    })();
    verdict.unwrap_or_else(|_| DistillabilityVerdict::unknown())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScdVerdict {
    Scd,
    NotScd,
    Unknown,
}

/// Combines a distillability verdict with WCEC membership.
pub fn combine(distillability: Distillability, wcec: bool) -> ScdVerdict {
    match (distillability, wcec) {
        (_, false) | (Distillability::Undistillable, _) => ScdVerdict::NotScd,
        (Distillability::Distillable, true) => ScdVerdict::Scd,
        (Distillability::Unknown, true) => ScdVerdict::Unknown,
    }
}

pub fn is_scd(rho: &QuantumState, model: &Model, range: &EnergyRange) -> Result<ScdVerdict> {
    let wcec = wcec_satisfied(rho, model, range)?;
    Ok(combine(is_distillable(rho).verdict, wcec))
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &QuantumState) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let m = rho.density_matrix();
    let [_, y, _] = pauli();
    let yy = kron(&y, &y);
    let flipped = &(&yy * &m.conj()) * &yy;
    let sqrt_rho = hermitian_eig(&m)?.map(|x| x.max(0.0).sqrt());
    let r = &(&sqrt_rho * &flipped) * &sqrt_rho;
    // Symmetrize away rounding before the Hermitian solver sees it.
    let r = &(&r + &r.adjoint()) * 0.5;
    let mut lambda: Vec<f64> = hermitian_eigenvalues(&r)?
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// Numerical Schmidt rank of a pure bipartite state.
pub fn schmidt_rank(rho: &QuantumState) -> Result<usize> {
    if !rho.is_pure() || rho.dims().len() != 2 {
        return Err(Error::InvalidState("Schmidt rank needs a pure bipartite state".into()));
    }
    Ok(rho
        .partial_trace(&[0])?
        .eigenvalues()?
        .iter()
        .filter(|&&x| x > RANK_TOL)
        .count())
}

/// Dense, validated copy of a state.
pub fn as_density(rho: &QuantumState) -> Result<QuantumState> {
    let m: ComplexMatrix = rho.density_matrix().into_owned();
    QuantumState::from_density(m, rho.dims())
}
