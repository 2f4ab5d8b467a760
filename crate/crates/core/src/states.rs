//! Quantum states and the samplers used by the Monte Carlo estimators.

use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{pauli, Model, TargetName};
use crate::tensor::{
    complex_gaussian, haar_vector, hermitian_eig, hermitian_eigenvalues, kron, kron_vec, norm, partial_trace,
    partial_transpose, reduced_from_pure, ComplexMatrix, C64, ZERO,
};

/// Trace and normalization tolerance for constructed states.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this count as zero when measuring rank.
pub const RANK_TOL: f64 = 1e-12;
/// Stricter PSD tolerance for user-supplied correlator parametrizations.
const PARAM_PSD_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Pure(Vec<C64>),
    Density(ComplexMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    repr: Representation,
    dims: Vec<usize>,
    rank_hint: Option<usize>,
}

impl QuantumState {
    pub fn from_pure(amplitudes: Vec<C64>, dims: &[usize]) -> Result<Self> {
        check_dims(dims, amplitudes.len())?;
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("pure state norm {n} is not 1")));
        }
        Ok(Self {
            repr: Representation::Pure(amplitudes),
            dims: dims.to_vec(),
            rank_hint: Some(1),
        })
    }

    /// Normalizes `amplitudes` first.
    pub fn from_unnormalized(mut amplitudes: Vec<C64>, dims: &[usize]) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Self::from_pure(amplitudes, dims)
    }

    /// Validates trace, Hermiticity and positivity.
    pub fn from_density(matrix: ComplexMatrix, dims: &[usize]) -> Result<Self> {
        check_dims(dims, matrix.dim())?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let ev = hermitian_eigenvalues(&matrix)?;
        if ev[0] < -PSD_TOL {
            return Err(Error::NotPhysical { min_eigenvalue: ev[0] });
        }
        let matrix = matrix.with_subsystems(dims)?;
        Ok(Self {
            repr: Representation::Density(matrix),
            dims: dims.to_vec(),
            rank_hint: None,
        })
    }

    /// Skips validation; used by samplers whose construction guarantees the
    /// invariants.
    fn density_unchecked(matrix: ComplexMatrix, dims: &[usize], rank_hint: Option<usize>) -> Self {
        Self {
            repr: Representation::Density(matrix.with_subsystems(dims).expect("sampler dims")),
            dims: dims.to_vec(),
            rank_hint,
        }
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn rank_hint(&self) -> Option<usize> {
        self.rank_hint
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Representation::Pure(v) => Some(v),
            Representation::Density(_) => None,
        }
    }

    pub fn density_matrix(&self) -> Cow<'_, ComplexMatrix> {
        match &self.repr {
            Representation::Pure(v) => Cow::Owned(ComplexMatrix::outer(v).with_subsystems(&self.dims).expect("dims")),
            Representation::Density(m) => Cow::Borrowed(m),
        }
    }

    /// `tr(A ρ)` (real part; `A` is expected Hermitian).
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok(match &self.repr {
            Representation::Pure(v) => op.expectation(v).re,
            Representation::Density(m) => op.trace_product(m).re,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState> {
        let reduced = match &self.repr {
            Representation::Pure(v) => reduced_from_pure(v, &self.dims, keep)?,
            Representation::Density(m) => partial_trace(m, keep)?,
        };
        let dims = reduced.subsystem_dims().to_vec();
        Ok(Self::density_unchecked(reduced, &dims, None))
    }

    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        partial_transpose(&self.density_matrix(), subsystem)
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            Representation::Pure(_) => 1.0,
            Representation::Density(m) => m.trace_product(m).re,
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Representation::Pure(v) => norm(v).powi(2),
            Representation::Density(m) => m.trace().re,
        }
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.density_matrix())
    }

    /// Number of eigenvalues above [`RANK_TOL`].
    pub fn numerical_rank(&self) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&x| x > RANK_TOL).count())
    }

    /// Fidelity-style overlap `<ψ|ρ|ψ>` with a pure state.
    pub fn overlap_with_pure(&self, psi: &[C64]) -> Result<f64> {
        self.expectation(&ComplexMatrix::outer(psi))
    }
}

fn check_dims(dims: &[usize], total: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::InvalidParameter(format!(
            "subsystem dimensions {dims:?} must all be >= 2"
        )));
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch {
            expected: product,
            found: total,
        });
    }
    Ok(())
}

/// Haar-random pure state on the given factors.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<QuantumState> {
    let total: usize = dims.iter().product();
    check_dims(dims, total)?;
    QuantumState::from_pure(haar_vector(total, rng), dims)
}

/// Rank-`rank` state from the induced measure: a Haar pure state on
/// system ⊗ ancilla(`rank`), with the ancilla traced out.
pub fn random_mixed<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<QuantumState> {
    let total: usize = dims.iter().product();
    check_dims(dims, total)?;
    if rank == 0 || rank > total {
        return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={total}")));
    }
    let purification = haar_vector(total * rank, rng);
    if rank == 1 {
        // The ancilla factor is trivial; skip it so that dims stay >= 2.
        return QuantumState::from_pure(purification, dims);
    }
    let mut full_dims = dims.to_vec();
    full_dims.push(rank);
    let keep: Vec<usize> = (0..dims.len()).collect();
    let reduced = reduced_from_pure(&purification, &full_dims, &keep)?;
    Ok(QuantumState::density_unchecked(reduced, dims, Some(rank)))
}

/// Bell-basis populations `(ψ⁻, ψ⁺, φ⁻, φ⁺)` of the correlator triple.
pub fn bell_diagonal_weights(cxx: f64, cyy: f64, czz: f64) -> [f64; 4] {
    [
        (1.0 - cxx - cyy - czz) / 4.0,
        (1.0 + cxx + cyy - czz) / 4.0,
        (1.0 - cxx + cyy + czz) / 4.0,
        (1.0 + cxx - cyy + czz) / 4.0,
    ]
}

fn correlator_matrix(c: [f64; 3], m1: f64, m2: f64) -> ComplexMatrix {
    let p = pauli();
    let id = ComplexMatrix::identity(2);
    let mut acc = kron(&id, &id);
    for (k, op) in p.iter().enumerate() {
        acc = &acc + &kron(op, op).scale_real(c[k]);
    }
    acc = &acc + &kron(&p[2], &id).scale_real(m1);
    acc = &acc + &kron(&id, &p[2]).scale_real(m2);
    acc.scale_real(0.25)
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} outside [-1, 1]")))
    }
}

/// `(I⊗I + Σ c_αα σ^α⊗σ^α)/4`. Rejected when a Bell-basis weight is negative.
pub fn bell_diagonal(cxx: f64, cyy: f64, czz: f64) -> Result<QuantumState> {
    for (name, x) in [("cxx", cxx), ("cyy", cyy), ("czz", czz)] {
        check_unit_interval(name, x)?;
    }
    let weights = bell_diagonal_weights(cxx, cyy, czz);
    let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    if min < 0.0 {
        return Err(Error::NotPhysical { min_eigenvalue: min });
    }
    Ok(QuantumState::density_unchecked(
        correlator_matrix([cxx, cyy, czz], 0.0, 0.0),
        &[2, 2],
        None,
    ))
}

/// Bell-diagonal state with z magnetizations `m1`, `m2` added on each qubit.
pub fn magnetized_state(cxx: f64, cyy: f64, czz: f64, m1: f64, m2: f64) -> Result<QuantumState> {
    for (name, x) in [("cxx", cxx), ("cyy", cyy), ("czz", czz), ("m1", m1), ("m2", m2)] {
        check_unit_interval(name, x)?;
    }
    let m = correlator_matrix([cxx, cyy, czz], m1, m2);
    let min = magnetized_min_eigenvalue(cxx, cyy, czz, m1, m2);
    if min < -PARAM_PSD_TOL {
        return Err(Error::NotPhysical { min_eigenvalue: min });
    }
    Ok(QuantumState::density_unchecked(m, &[2, 2], None))
}

/// Smallest eigenvalue of the magnetized correlator matrix.
///
/// The matrix splits into the {|00>, |11>} and {|01>, |10>} blocks, each a
/// real 2x2 problem.
pub fn magnetized_min_eigenvalue(cxx: f64, cyy: f64, czz: f64, m1: f64, m2: f64) -> f64 {
    let block_min = |a: f64, d: f64, b: f64| 0.5 * (a + d) - (0.25 * (a - d).powi(2) + b * b).sqrt();
    // <00|ρ|00> = (1 + czz + m1 + m2)/4, <11|ρ|11> = (1 + czz - m1 - m2)/4, <00|ρ|11> = (cxx - cyy)/4
    let even = block_min(
        (1.0 + czz + m1 + m2) / 4.0,
        (1.0 + czz - m1 - m2) / 4.0,
        (cxx - cyy) / 4.0,
    );
    // <01|ρ|01> = (1 - czz + m1 - m2)/4, <10|ρ|10> = (1 - czz - m1 + m2)/4, <01|ρ|10> = (cxx + cyy)/4
    let odd = block_min(
        (1.0 - czz + m1 - m2) / 4.0,
        (1.0 - czz - m1 + m2) / 4.0,
        (cxx + cyy) / 4.0,
    );
    even.min(odd)
}

/// `p |ψ⁻><ψ⁻| + (1 - p) I/4`. Analytic fixture for distillability and
/// concurrence checks.
pub fn werner_state(p: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Werner weight {p} outside [0, 1]")));
    }
    let singlet = ComplexMatrix::outer(&target_amplitudes(TargetName::PsiMinus));
    let mixed = ComplexMatrix::identity(4).scale_real(0.25);
    let rho = &singlet.scale_real(p) + &mixed.scale_real(1.0 - p);
    Ok(QuantumState::density_unchecked(rho, &[2, 2], None))
}

/// Gibbs state `exp(-β H) / Z` of the model, `β` in units of `1/J`.
pub fn thermal_state(model: &Model, beta: f64) -> Result<QuantumState> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "inverse temperature {beta} must be finite and >= 0"
        )));
    }
    let spectrum = hermitian_eig(&model.hamiltonian)?;
    let ground = spectrum.min();
    // Shifting by the ground energy keeps the exponentials bounded by 1.
    let z: f64 = spectrum.eigenvalues.iter().map(|&e| (-beta * (e - ground)).exp()).sum();
    let rho = spectrum.map(|e| (-beta * (e - ground)).exp() / z);
    let dims = model.spec.site_dims();
    Ok(QuantumState::density_unchecked(rho, &dims, None))
}

/// `tr(H ρ_th(β))` evaluated on a precomputed spectrum.
pub fn thermal_energy(eigenvalues: &[f64], beta: f64) -> f64 {
    let ground = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let (mut num, mut den) = (0.0, 0.0);
    for &e in eigenvalues {
        let w = (-beta * (e - ground)).exp();
        num += w * e;
        den += w;
    }
    num / den
}

/// Three-qubit state `a1 |000> + a2 |φ1 φ2 φ3>`, normalized.
pub fn ghz_class_state(a1: C64, a2: C64, locals: [[C64; 2]; 3]) -> Result<QuantumState> {
    let mut amps = vec![ZERO; 8];
    amps[0] = a1;
    let product = kron_vec(&kron_vec(&locals[0], &locals[1]), &locals[2]);
    for (slot, p) in amps.iter_mut().zip(&product) {
        *slot += a2 * p;
    }
    QuantumState::from_unnormalized(amps, &[2, 2, 2])
}

/// Normalization below which a GHZ-class draw is discarded.
pub const GHZ_MIN_NORM: f64 = 1e-8;

/// GHZ-class sample: complex Gaussian `a1`, `a2` and Haar single-qubit
/// `|φ_i>`. Near-cancelling draws are resampled.
pub fn ghz_class_sample<R: Rng + ?Sized>(rng: &mut R) -> QuantumState {
    loop {
        let a1 = complex_gaussian(rng);
        let a2 = complex_gaussian(rng);
        let mut locals = [[ZERO; 2]; 3];
        for l in locals.iter_mut() {
            let v = haar_vector(2, rng);
            *l = [v[0], v[1]];
        }
        let mut amps = vec![ZERO; 8];
        amps[0] = a1;
        let product = kron_vec(&kron_vec(&locals[0], &locals[1]), &locals[2]);
        for (slot, p) in amps.iter_mut().zip(&product) {
            *slot += a2 * p;
        }
        if norm(&amps) >= GHZ_MIN_NORM {
            return QuantumState::from_unnormalized(amps, &[2, 2, 2]).expect("norm checked");
        }
    }
}

/// `a |001> + b |010> + c |100> + d |000>`, normalized.
pub fn w_class_state(a: C64, b: C64, c: C64, d: C64) -> Result<QuantumState> {
    let mut amps = vec![ZERO; 8];
    amps[0b001] = a;
    amps[0b010] = b;
    amps[0b100] = c;
    amps[0b000] = d;
    QuantumState::from_unnormalized(amps, &[2, 2, 2])
}

/// W-class sample with complex Gaussian `(a, b, c, d)`.
pub fn w_class_sample<R: Rng + ?Sized>(rng: &mut R) -> QuantumState {
    loop {
        let coeffs: Vec<C64> = (0..4).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = w_class_state(coeffs[0], coeffs[1], coeffs[2], coeffs[3]) {
            return s;
        }
    }
}

pub fn target_amplitudes(name: TargetName) -> Vec<C64> {
    let r = |x: f64| C64::new(x, 0.0);
    match name {
        TargetName::PsiMinus => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![ZERO, r(s), r(-s), ZERO]
        }
        TargetName::PhiD(d) => {
            let s = 1.0 / (d as f64).sqrt();
            let mut v = vec![ZERO; d * d];
            for i in 0..d {
                v[i * d + i] = r(s);
            }
            v
        }
        TargetName::Ghz3 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut v = vec![ZERO; 8];
            v[0] = r(s);
            v[7] = r(s);
            v
        }
        TargetName::W3 => {
            let s = 1.0 / 3f64.sqrt();
            let mut v = vec![ZERO; 8];
            v[0b001] = r(s);
            v[0b010] = r(s);
            v[0b100] = r(s);
            v
        }
    }
}

pub fn target_state(name: TargetName) -> Result<QuantumState> {
    if let TargetName::PhiD(d) = name {
        if d < 2 {
            return Err(Error::UnknownTarget(name.to_string()));
        }
    }
    QuantumState::from_pure(target_amplitudes(name), &name.site_dims())
}

/// Serializable description of a state distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sampler", rename_all = "snake_case")]
pub enum StateSampler {
    HaarPure {
        dims: Vec<usize>,
    },
    Induced {
        dims: Vec<usize>,
        rank: usize,
    },
    GhzClass,
    WClass,
    /// Uniform over the physical correlator tetrahedron (rejection from the cube).
    BellDiagonal,
}

impl StateSampler {
    pub fn dims(&self) -> Vec<usize> {
        match self {
            StateSampler::HaarPure { dims } | StateSampler::Induced { dims, .. } => dims.clone(),
            StateSampler::GhzClass | StateSampler::WClass => vec![2, 2, 2],
            StateSampler::BellDiagonal => vec![2, 2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = self.dims();
        let total: usize = dims.iter().product();
        check_dims(&dims, total)?;
        if let StateSampler::Induced { rank, .. } = self {
            if *rank == 0 || *rank > total {
                return Err(Error::InvalidParameter(format!("rank {rank} outside 1..={total}")));
            }
        }
        Ok(())
    }

    /// Whether the distillability oracle returns a definite verdict for
    /// every sample of this family.
    pub fn verdicts_decidable(&self) -> bool {
        match self {
            StateSampler::HaarPure { dims } => dims.len() == 2 || dims == &[2, 2, 2],
            StateSampler::Induced { dims, rank } => {
                *rank == 1 && dims.len() == 2 || dims.len() == 2 && dims.contains(&2)
            }
            StateSampler::GhzClass | StateSampler::WClass | StateSampler::BellDiagonal => true,
        }
    }

    pub fn name(&self) -> String {
        match self {
            StateSampler::HaarPure { dims } => format!("haar_pure{dims:?}"),
            StateSampler::Induced { dims, rank } => format!("induced{dims:?}/rank{rank}"),
            StateSampler::GhzClass => "ghz_class".into(),
            StateSampler::WClass => "w_class".into(),
            StateSampler::BellDiagonal => "bell_diagonal".into(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> QuantumState {
        match self {
            StateSampler::HaarPure { dims } => random_pure(dims, rng).expect("validated sampler"),
            StateSampler::Induced { dims, rank } => random_mixed(dims, *rank, rng).expect("validated sampler"),
            StateSampler::GhzClass => ghz_class_sample(rng),
            StateSampler::WClass => w_class_sample(rng),
            StateSampler::BellDiagonal => loop {
                let c: [f64; 3] = [
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                    rng.random_range(-1.0..=1.0),
                ];
                if let Ok(s) = bell_diagonal(c[0], c[1], c[2]) {
                    break s;
                }
            },
        }
    }
}
