//! Classification of the magnetized Bell-diagonal family
//! `ρ_m = (I + Σ c_αα σ^α⊗σ^α + m_1 σ^z⊗I + m_2 I⊗σ^z)/4`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distill::{energy_in_range, is_distillable, Distillability};
use crate::error::{Error, Result};
use crate::hamiltonian::{EnergyRange, Model};
use crate::states::magnetized_state;

/// Coordinate names of the parameter vector `[c_xx, c_yy, c_zz, m_1, m_2]`.
pub const AXIS_NAMES: [&str; 5] = ["cxx", "cyy", "czz", "m1", "m2"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellLabel {
    InvalidState,
    Undistillable,
    DistillableNotScd,
    Scd,
}

impl BellLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            BellLabel::InvalidState => "invalid-state",
            BellLabel::Undistillable => "undistillable",
            BellLabel::DistillableNotScd => "distillable-not-SCD",
            BellLabel::Scd => "SCD",
        }
    }
}

fn check_two_qubit(model: &Model) -> Result<()> {
    if model.spec.site_dims() != [2, 2] {
        return Err(Error::UnsupportedModel("magnetized states live on two qubits".into()));
    }
    Ok(())
}

/// `tr(H ρ_m)`, or `None` when the parameters give no valid state.
pub fn magnetized_energy(p: [f64; 5], model: &Model) -> Option<f64> {
    let rho = magnetized_state(p[0], p[1], p[2], p[3], p[4]).ok()?;
    rho.expectation(&model.hamiltonian).ok()
}

pub fn classify_magnetized(p: [f64; 5], model: &Model, range: &EnergyRange) -> Result<BellLabel> {
    check_two_qubit(model)?;
    let Ok(rho) = magnetized_state(p[0], p[1], p[2], p[3], p[4]) else {
        return Ok(BellLabel::InvalidState);
    };
    Ok(match is_distillable(&rho).verdict {
        Distillability::Distillable => {
            if energy_in_range(rho.expectation(&model.hamiltonian)?, range) {
                BellLabel::Scd
            } else {
                BellLabel::DistillableNotScd
            }
        }
        Distillability::Undistillable => BellLabel::Undistillable,
        Distillability::Unknown => unreachable!("two-qubit verdicts are always decided"),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionPoint {
    pub x: f64,
    pub y: f64,
    pub label: BellLabel,
}

/// Labels on a `resolution × resolution` grid over `[-1, 1]²` in the
/// coordinates `axes`, with the other coordinates taken from `base`.
pub fn bell_cross_section(
    model: &Model,
    range: &EnergyRange,
    base: [f64; 5],
    axes: (usize, usize),
    resolution: usize,
) -> Result<Vec<CrossSectionPoint>> {
    let (a, b) = axes;
    if a >= 5 || b >= 5 || a == b {
        return Err(Error::InvalidParameter(format!(
            "axes {axes:?} must be two distinct indices below 5"
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidParameter(
            "cross-section resolution must be at least 2".into(),
        ));
    }
    let step = 2.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let mut p = base;
            p[a] = -1.0 + i as f64 * step;
            p[b] = -1.0 + j as f64 * step;
            out.push(CrossSectionPoint {
                x: p[a],
                y: p[b],
                label: classify_magnetized(p, model, range)?,
            });
        }
    }
    Ok(out)
}

/// Two distillable states outside the energy window whose equal mixture is SCD.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonConvexityWitness {
    pub first: [f64; 5],
    pub second: [f64; 5],
    pub mixture: [f64; 5],
}

/// Random scan for a witness. Each draw is paired with its mirror image
/// (magnetizations negated), whose midpoint is Bell-diagonal. `ρ_m` is affine
/// in its parameters, so the mixture's parameters are the midpoint.
pub fn find_nonconvexity_witness(
    model: &Model,
    range: &EnergyRange,
    samples: usize,
    seed: u64,
) -> Result<Option<NonConvexityWitness>> {
    check_two_qubit(model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let first: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
        if classify_magnetized(first, model, range)? != BellLabel::DistillableNotScd {
            continue;
        }
        let second = [first[0], first[1], first[2], -first[3], -first[4]];
        if classify_magnetized(second, model, range)? != BellLabel::DistillableNotScd {
            continue;
        }
        let mixture: [f64; 5] = std::array::from_fn(|k| 0.5 * (first[k] + second[k]));
        if classify_magnetized(mixture, model, range)? == BellLabel::Scd {
            return Ok(Some(NonConvexityWitness { first, second, mixture }));
        }
    }
    Ok(None)
}
