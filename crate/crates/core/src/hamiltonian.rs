//! Spin Hamiltonians in units of the coupling `J`, split as
//! `H = H_int + g H_l` with `g = h / J`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_eig, kron_all, ComplexMatrix, C64, I, ONE, ZERO};

/// Largest chain handled by the dense builders.
pub const MAX_SITES: usize = 10;

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `alpha . S_1 + beta . S_2` on two spin-j particles.
    NonInteracting,
    /// `(n1 . S_1)(n2 . S_2) + g (alpha . S_1 + beta . S_2)`.
    MinimalInteraction,
    /// Two-qubit XY model in a field along z.
    #[default]
    TransverseXy,
    /// Two-qubit XY model in a field along x.
    LongitudinalXy,
    /// Two-qubit XXZ model in a field along z.
    Xxz,
    /// Two spin-1 particles with bilinear and biquadratic exchange.
    BilinearBiquadratic,
    /// Periodic XY ring of `sites` qubits in a transverse field.
    RingXy,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::NonInteracting,
        Family::MinimalInteraction,
        Family::TransverseXy,
        Family::LongitudinalXy,
        Family::Xxz,
        Family::BilinearBiquadratic,
        Family::RingXy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::NonInteracting => "non_interacting",
            Family::MinimalInteraction => "minimal_interaction",
            Family::TransverseXy => "transverse_xy",
            Family::LongitudinalXy => "longitudinal_xy",
            Family::Xxz => "xxz",
            Family::BilinearBiquadratic => "bilinear_biquadratic",
            Family::RingXy => "ring_xy",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::UnsupportedModel(format!("unknown family `{s}`")))
    }
}

/// Flat description of a Hamiltonian. Only the fields relevant to `family`
/// are read; the rest keep their defaults. Serializes to a flat JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSpec {
    pub family: Family,
    /// XY anisotropy.
    pub gamma: f64,
    /// Field ratio `h / J`.
    pub g: f64,
    /// XXZ anisotropy along z.
    pub delta: f64,
    /// Bilinear/biquadratic mixing angle in radians.
    pub theta: f64,
    /// Number of sites for the ring.
    pub sites: usize,
    /// Local dimension for the generic two-qudit families.
    pub local_dim: usize,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub n1: [f64; 3],
    pub n2: [f64; 3],
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            family: Family::TransverseXy,
            gamma: 1.0,
            g: 0.0,
            delta: 0.0,
            theta: 0.0,
            sites: 2,
            local_dim: 2,
            alpha: [0.0, 0.0, 1.0],
            beta: [0.0, 0.0, 1.0],
            n1: [0.0, 0.0, 1.0],
            n2: [0.0, 0.0, 1.0],
        }
    }
}

impl ModelSpec {
    pub fn transverse_xy(gamma: f64, g: f64) -> Self {
        Self {
            family: Family::TransverseXy,
            gamma,
            g,
            ..Self::default()
        }
    }

    pub fn longitudinal_xy(gamma: f64, g: f64) -> Self {
        Self {
            family: Family::LongitudinalXy,
            gamma,
            g,
            ..Self::default()
        }
    }

    pub fn xxz(delta: f64, g: f64) -> Self {
        Self {
            family: Family::Xxz,
            delta,
            g,
            ..Self::default()
        }
    }

    pub fn bilinear_biquadratic(theta: f64, g: f64) -> Self {
        Self {
            family: Family::BilinearBiquadratic,
            theta,
            g,
            local_dim: 3,
            ..Self::default()
        }
    }

    pub fn ring_xy(sites: usize, gamma: f64, g: f64) -> Self {
        Self {
            family: Family::RingXy,
            sites,
            gamma,
            g,
            ..Self::default()
        }
    }

    /// `H = alpha . S_1 + beta . S_2`; the overall scale `g` is 1.
    pub fn non_interacting(local_dim: usize, alpha: [f64; 3], beta: [f64; 3]) -> Self {
        Self {
            family: Family::NonInteracting,
            g: 1.0,
            local_dim,
            alpha,
            beta,
            ..Self::default()
        }
    }

    pub fn minimal_interaction(
        local_dim: usize,
        n1: [f64; 3],
        n2: [f64; 3],
        alpha: [f64; 3],
        beta: [f64; 3],
        g: f64,
    ) -> Self {
        Self {
            family: Family::MinimalInteraction,
            g,
            local_dim,
            n1,
            n2,
            alpha,
            beta,
            ..Self::default()
        }
    }

    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..self.clone() }
    }

    /// Dimensions of the tensor factors the Hamiltonian acts on.
    pub fn site_dims(&self) -> Vec<usize> {
        match self.family {
            Family::TransverseXy | Family::LongitudinalXy | Family::Xxz => vec![2, 2],
            Family::BilinearBiquadratic => vec![3, 3],
            Family::NonInteracting | Family::MinimalInteraction => vec![self.local_dim; 2],
            Family::RingXy => vec![2; self.sites],
        }
    }

    pub fn dim(&self) -> usize {
        self.site_dims().iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.gamma, self.g, self.delta, self.theta]
            .iter()
            .chain(&self.alpha)
            .chain(&self.beta)
            .chain(&self.n1)
            .chain(&self.n2)
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        let check_unit = |name: &str, v: &[f64; 3]| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > UNIT_TOL {
                Err(Error::InvalidParameter(format!(
                    "{name} must be a unit vector (norm {n})"
                )))
            } else {
                Ok(())
            }
        };
        match self.family {
            Family::NonInteracting => {
                check_qudit(self.local_dim)?;
                check_unit("alpha", &self.alpha)?;
                check_unit("beta", &self.beta)?;
                if self.g == 0.0 {
                    return Err(Error::UnsupportedModel(
                        "non_interacting with g = 0 is the zero Hamiltonian".into(),
                    ));
                }
            }
            Family::MinimalInteraction => {
                check_qudit(self.local_dim)?;
                check_unit("alpha", &self.alpha)?;
                check_unit("beta", &self.beta)?;
                check_unit("n1", &self.n1)?;
                check_unit("n2", &self.n2)?;
            }
            Family::RingXy => {
                // A two-site ring would count its single bond twice.
                if !(3..=MAX_SITES).contains(&self.sites) {
                    return Err(Error::UnsupportedModel(format!(
                        "ring_xy needs 3..={MAX_SITES} sites, got {}",
                        self.sites
                    )));
                }
            }
            Family::TransverseXy | Family::LongitudinalXy | Family::Xxz | Family::BilinearBiquadratic => {}
        }
        Ok(())
    }
}

fn check_qudit(d: usize) -> Result<()> {
    if (2..=8).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedModel(format!("local dimension {d} outside 2..=8")))
    }
}

/// Closed interval of dimensionless energies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRange {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidParameter(format!("energy range [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(half_width: f64) -> Self {
        let w = half_width.abs();
        Self { lo: -w, hi: w }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }

    pub fn contains_range(&self, other: &EnergyRange, tol: f64) -> bool {
        other.lo >= self.lo - tol && other.hi <= self.hi + tol
    }

    pub fn overlap(&self, other: &EnergyRange) -> Option<EnergyRange> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(EnergyRange { lo, hi })
    }
}

impl fmt::Display for EnergyRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Named target states of the distillation protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetName {
    /// `(|01> - |10>)/sqrt(2)`.
    PsiMinus,
    /// `sum_i |ii> / sqrt(d)`.
    PhiD(usize),
    /// `(|000> + |111>)/sqrt(2)`.
    Ghz3,
    /// `(|001> + |010> + |100>)/sqrt(3)`.
    W3,
}

impl TargetName {
    /// Whether every single-site marginal of the target is maximally mixed,
    /// which makes local field terms invisible to it.
    pub fn has_maximally_mixed_marginals(self) -> bool {
        !matches!(self, TargetName::W3)
    }

    pub fn site_dims(self) -> Vec<usize> {
        match self {
            TargetName::PsiMinus => vec![2, 2],
            TargetName::PhiD(d) => vec![d, d],
            TargetName::Ghz3 | TargetName::W3 => vec![2, 2, 2],
        }
    }
}

impl fmt::Display for TargetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetName::PsiMinus => f.write_str("psi_minus"),
            TargetName::PhiD(d) => write!(f, "phi_d({d})"),
            TargetName::Ghz3 => f.write_str("ghz3"),
            TargetName::W3 => f.write_str("w3"),
        }
    }
}

impl FromStr for TargetName {
    type Err = Error;

    /// Accepts `psi_minus`, `ghz3`, `w3`, `phi_d(3)`, `phi_d:3` and `phi3`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psi_minus" => return Ok(TargetName::PsiMinus),
            "ghz3" => return Ok(TargetName::Ghz3),
            "w3" => return Ok(TargetName::W3),
            _ => {}
        }
        let digits = s
            .strip_prefix("phi_d(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| s.strip_prefix("phi_d:"))
            .or_else(|| s.strip_prefix("phi"));
        match digits.and_then(|d| d.parse::<usize>().ok()) {
            Some(d) if d >= 2 => Ok(TargetName::PhiD(d)),
            _ => Err(Error::UnknownTarget(s.to_string())),
        }
    }
}

/// Spin-j matrices `(S^x, S^y, S^z)` for local dimension `d = 2j + 1`, in the
/// basis `m = j, j-1, ..., -j`.
pub fn spin_matrices(d: usize) -> [ComplexMatrix; 3] {
    let j = (d as f64 - 1.0) / 2.0;
    let m = |k: usize| j - k as f64;
    // <m+1| S^+ |m> = sqrt(j(j+1) - m(m+1)); row k-1 holds m+1.
    let raise = |row: usize, col: usize| {
        if row + 1 == col {
            let mm = m(col);
            (j * (j + 1.0) - mm * (mm + 1.0)).sqrt()
        } else {
            0.0
        }
    };
    let sx = ComplexMatrix::from_fn(d, |r, c| C64::new(0.5 * (raise(r, c) + raise(c, r)), 0.0));
    let sy = ComplexMatrix::from_fn(d, |r, c| {
        // (S^+ - S^-) / 2i
        C64::new(0.5 * (raise(r, c) - raise(c, r)), 0.0) * -I
    });
    let sz = ComplexMatrix::diag_real(&(0..d).map(m).collect::<Vec<_>>());
    [sx, sy, sz]
}

/// Pauli matrices `(σ^x, σ^y, σ^z)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let x = ComplexMatrix::from_vec(2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2");
    let y = ComplexMatrix::from_vec(2, vec![ZERO, -I, I, ZERO]).expect("2x2");
    let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
    [x, y, z]
}

/// Spin-1 matrices exactly as printed for the two-qutrit model.
pub fn spin_one_matrices() -> [ComplexMatrix; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let sx = ComplexMatrix::from_real(3, &[0.0, s, 0.0, s, 0.0, s, 0.0, s, 0.0]).expect("3x3");
    // (1 / (sqrt(2) i)) [[0,1,0],[-1,0,1],[0,-1,0]]
    let pref = C64::new(s, 0.0) / I;
    let sy = ComplexMatrix::from_real(3, &[0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0])
        .expect("3x3")
        .scale(pref);
    let sz = ComplexMatrix::diag_real(&[1.0, 0.0, -1.0]);
    [sx, sy, sz]
}

fn directed(ops: &[ComplexMatrix; 3], n: &[f64; 3]) -> ComplexMatrix {
    let mut acc = ops[0].scale_real(n[0]);
    acc = &acc + &ops[1].scale_real(n[1]);
    &acc + &ops[2].scale_real(n[2])
}

/// `op` on `site` of an `sites`-site register, identity elsewhere.
fn on_site(op: &ComplexMatrix, site: usize, dims: &[usize]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            if k == site {
                op.clone()
            } else {
                ComplexMatrix::identity(d)
            }
        })
        .collect();
    kron_all(&factors)
}

fn on_pair(a: &ComplexMatrix, i: usize, b: &ComplexMatrix, j: usize, dims: &[usize]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            if k == i {
                a.clone()
            } else if k == j {
                b.clone()
            } else {
                ComplexMatrix::identity(d)
            }
        })
        .collect();
    kron_all(&factors)
}

fn sum_over_sites(op: &ComplexMatrix, dims: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    let mut acc = ComplexMatrix::zeros(total).with_subsystems(dims).expect("dims");
    for site in 0..dims.len() {
        acc = &acc + &on_site(op, site, dims);
    }
    acc
}

fn xy_bond(gamma: f64, i: usize, j: usize, dims: &[usize]) -> ComplexMatrix {
    let [x, y, _] = pauli();
    let xx = on_pair(&x, i, &x, j, dims).scale_real((1.0 + gamma) / 2.0);
    let yy = on_pair(&y, i, &y, j, dims).scale_real((1.0 - gamma) / 2.0);
    &xx + &yy
}

/// The `g`-independent part `H_int`.
pub fn interaction_part(spec: &ModelSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let dims = spec.site_dims();
    let m = match spec.family {
        Family::NonInteracting => ComplexMatrix::zeros(spec.dim()).with_subsystems(&dims)?,
        Family::MinimalInteraction => {
            let s = spin_matrices(spec.local_dim);
            on_pair(&directed(&s, &spec.n1), 0, &directed(&s, &spec.n2), 1, &dims)
        }
        Family::TransverseXy | Family::LongitudinalXy => xy_bond(spec.gamma, 0, 1, &dims),
        Family::Xxz => {
            let [x, y, z] = pauli();
            let xx = on_pair(&x, 0, &x, 1, &dims);
            let yy = on_pair(&y, 0, &y, 1, &dims);
            let zz = on_pair(&z, 0, &z, 1, &dims).scale_real(spec.delta);
            (&(&xx + &yy) + &zz).scale_real(0.5)
        }
        Family::BilinearBiquadratic => {
            let s = spin_one_matrices();
            let mut dot = ComplexMatrix::zeros(9).with_subsystems(&dims)?;
            for op in &s {
                dot = &dot + &on_pair(op, 0, op, 1, &dims);
            }
            let sq = &dot * &dot;
            &dot.scale_real(spec.theta.cos()) + &sq.scale_real(spec.theta.sin())
        }
        Family::RingXy => {
            let n = spec.sites;
            let mut acc = ComplexMatrix::zeros(spec.dim()).with_subsystems(&dims)?;
            for i in 0..n {
                acc = &acc + &xy_bond(spec.gamma, i, (i + 1) % n, &dims);
            }
            acc
        }
    };
    Ok(m)
}

/// The field term `H_l` that is scaled by `g`.
pub fn local_part(spec: &ModelSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let dims = spec.site_dims();
    let [x, _, z] = pauli();
    let m = match spec.family {
        Family::NonInteracting | Family::MinimalInteraction => {
            let s = spin_matrices(spec.local_dim);
            let a = on_site(&directed(&s, &spec.alpha), 0, &dims);
            let b = on_site(&directed(&s, &spec.beta), 1, &dims);
            &a + &b
        }
        Family::TransverseXy | Family::Xxz | Family::RingXy => sum_over_sites(&z, &dims),
        Family::LongitudinalXy => sum_over_sites(&x, &dims),
        Family::BilinearBiquadratic => {
            let [_, _, sz] = spin_one_matrices();
            sum_over_sites(&sz, &dims)
        }
    };
    Ok(m)
}

/// `H / J = H_int + g H_l`.
pub fn build(spec: &ModelSpec) -> Result<ComplexMatrix> {
    let int = interaction_part(spec)?;
    let loc = local_part(spec)?;
    Ok(&int + &loc.scale_real(spec.g))
}

/// A model with its Hamiltonian matrix built once.
#[derive(Clone, Debug)]
pub struct Model {
    pub spec: ModelSpec,
    pub hamiltonian: ComplexMatrix,
}

impl Model {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        let hamiltonian = build(&spec)?;
        Ok(Self { spec, hamiltonian })
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.spec.with_g(g))
    }

    pub fn state_energy_bounds(&self) -> Result<EnergyRange> {
        if let Some(r) = state_energy_bounds_closed_form(&self.spec) {
            return Ok(r);
        }
        let s = hermitian_eig(&self.hamiltonian)?;
        EnergyRange::new(s.min(), s.max())
    }
}

/// `[E_1^g, E_2^g]`, the extreme eigenvalues of `H / J`. Uses the closed form
/// where one exists.
pub fn state_energy_bounds(spec: &ModelSpec) -> Result<EnergyRange> {
    spec.validate()?;
    match state_energy_bounds_closed_form(spec) {
        Some(r) => Ok(r),
        None => state_energy_bounds_numeric(spec),
    }
}

pub fn state_energy_bounds_numeric(spec: &ModelSpec) -> Result<EnergyRange> {
    let s = hermitian_eig(&build(spec)?)?;
    EnergyRange::new(s.min(), s.max())
}

fn min_max(values: &[f64]) -> EnergyRange {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EnergyRange { lo, hi }
}

/// Full closed-form spectrum where one is known.
pub fn closed_form_spectrum(spec: &ModelSpec) -> Option<Vec<f64>> {
    let g = spec.g;
    let mut values = match spec.family {
        Family::TransverseXy => {
            let e = (4.0 * g * g + spec.gamma * spec.gamma).sqrt();
            vec![-1.0, 1.0, -e, e]
        }
        Family::Xxz => {
            let d = spec.delta;
            vec![-1.0 - d / 2.0, 1.0 - d / 2.0, -2.0 * g + d / 2.0, 2.0 * g + d / 2.0]
        }
        Family::LongitudinalXy if spec.gamma == 1.0 => {
            // Ising coupling is diagonal in the x basis.
            vec![1.0 + 2.0 * g, 1.0 - 2.0 * g, -1.0, -1.0]
        }
        Family::BilinearBiquadratic => {
            let (c, s) = (spec.theta.cos(), spec.theta.sin());
            vec![
                c + s,
                -c + s,
                -2.0 * c + 4.0 * s,
                -g - c + s,
                g - c + s,
                -2.0 * g + c + s,
                -g + c + s,
                g + c + s,
                2.0 * g + c + s,
            ]
        }
        Family::NonInteracting => {
            // Eigenvalues g (m_1 + m_2) for unit directions.
            let d = spec.local_dim;
            let j = (d as f64 - 1.0) / 2.0;
            let ms: Vec<f64> = (0..d).map(|k| j - k as f64).collect();
            ms.iter().flat_map(|a| ms.iter().map(move |b| g * (a + b))).collect()
        }
        Family::MinimalInteraction | Family::RingXy | Family::LongitudinalXy => return None,
    };
    values.sort_by(f64::total_cmp);
    Some(values)
}

pub fn state_energy_bounds_closed_form(spec: &ModelSpec) -> Option<EnergyRange> {
    closed_form_spectrum(spec).map(|v| min_max(&v))
}

/// Closed-form `[ε_1, ε_2]` for the reachable target energy, where known.
/// `None` means the caller must fall back to the numerical optimizer.
pub fn target_energy_bounds_analytic(spec: &ModelSpec, target: TargetName) -> Option<EnergyRange> {
    match (spec.family, target) {
        (Family::TransverseXy | Family::LongitudinalXy, TargetName::PsiMinus | TargetName::PhiD(2)) => {
            Some(EnergyRange::symmetric(spec.gamma.abs().max(1.0)))
        }
        (Family::Xxz, TargetName::PsiMinus | TargetName::PhiD(2)) if spec.delta >= 0.0 => {
            let d = spec.delta;
            let hi = if d < 1.0 { 1.0 - d / 2.0 } else { d / 2.0 };
            Some(EnergyRange {
                lo: -(1.0 + d / 2.0),
                hi,
            })
        }
        (Family::RingXy, TargetName::Ghz3) if spec.sites == 3 && spec.gamma == 1.0 => {
            Some(EnergyRange { lo: -1.0, hi: 3.0 })
        }
        (Family::MinimalInteraction, TargetName::PsiMinus | TargetName::PhiD(2)) if spec.local_dim == 2 => {
            Some(EnergyRange::symmetric(0.25))
        }
        _ => None,
    }
}

/// `[-j(j+1)/3, j(j+1)/3]`, reached by aligning (or anti-aligning) each local
/// basis with its interaction axis. The true target range of the minimal
/// interaction contains this interval.
pub fn minimal_interaction_inner_range(local_dim: usize) -> EnergyRange {
    let j = (local_dim as f64 - 1.0) / 2.0;
    EnergyRange::symmetric(j * (j + 1.0) / 3.0)
}
