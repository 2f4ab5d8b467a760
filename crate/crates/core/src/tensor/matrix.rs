use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix, row-major, with an optional tensor-factor
/// structure.
///
/// `subsystem_dims` is either empty (unstructured) or a list whose product is
/// `dim`. Operations that act on a single factor (partial trace, partial
/// transpose, local unitaries) require the structured form.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
    subsystem_dims: Vec<usize>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
            subsystem_dims: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self {
            dim,
            data,
            subsystem_dims: Vec::new(),
        })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self {
            dim,
            data,
            subsystem_dims: Vec::new(),
        }
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Projector `|psi><psi|`.
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    pub fn with_subsystems(mut self, dims: &[usize]) -> Result<Self> {
        if !dims.is_empty() {
            if dims.contains(&0) {
                return Err(Error::InvalidParameter("zero subsystem dimension".into()));
            }
            let product: usize = dims.iter().product();
            if product != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: product,
                });
            }
        }
        self.subsystem_dims = dims.to_vec();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::from_fn(self.dim, |i, j| self.get(j, i).conj());
        m.subsystem_dims.clone_from(&self.subsystem_dims);
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::from_fn(self.dim, |i, j| self.get(j, i));
        m.subsystem_dims.clone_from(&self.subsystem_dims);
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
            subsystem_dims: self.subsystem_dims.clone(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
            subsystem_dims: self.subsystem_dims.clone(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on different dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A^dagger|` over entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() < tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "matvec dimension mismatch");
        (0..self.dim)
            .map(|i| {
                let row = &self.data[i * self.dim..(i + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `<v|A|v>` without normalization.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        assert_eq!(v.len(), self.dim, "expectation dimension mismatch");
        let mut acc = ZERO;
        for i in 0..self.dim {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let av: C64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            acc += v[i].conj() * av;
        }
        acc
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn column(&self, col: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, col)).collect()
    }
}

/// Tensor product `a ⊗ b`. Subsystem dimensions concatenate; an unstructured
/// operand contributes its full dimension as a single factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut data = vec![ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..nb {
                let row = (i * nb + k) * n + j * nb;
                for l in 0..nb {
                    data[row + l] = aij * b.get(k, l);
                }
            }
        }
    }
    let factors = |m: &ComplexMatrix| {
        if m.subsystem_dims.is_empty() {
            vec![m.dim]
        } else {
            m.subsystem_dims.clone()
        }
    };
    let mut dims = factors(a);
    dims.extend(factors(b));
    ComplexMatrix {
        dim: n,
        data,
        subsystem_dims: dims,
    }
}

/// Tensor product of a list of operators, left to right.
pub fn kron_all<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = ops.into_iter();
    let first = iter.next().expect("kron_all needs at least one operator").clone();
    let mut acc = if first.subsystem_dims.is_empty() {
        let d = first.dim;
        first.with_subsystems(&[d]).expect("single factor")
    } else {
        first
    };
    for op in iter {
        acc = kron(&acc, op);
    }
    acc
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn merged_dims(a: &ComplexMatrix, b: &ComplexMatrix) -> Vec<usize> {
    if a.subsystem_dims.is_empty() {
        b.subsystem_dims.clone()
    } else {
        a.subsystem_dims.clone()
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix addition dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
            subsystem_dims: merged_dims(self, rhs),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix subtraction dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
            subsystem_dims: merged_dims(self, rhs),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == ZERO {
                    continue;
                }
                let out = &mut data[i * n..(i + 1) * n];
                let brow = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        ComplexMatrix {
            dim: n,
            data,
            subsystem_dims: merged_dims(self, rhs),
        }
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale_real(rhs)
    }
}
