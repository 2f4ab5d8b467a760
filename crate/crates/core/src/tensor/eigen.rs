//! Cyclic Jacobi eigensolver for small complex Hermitian matrices.
//!
//! Every matrix in this crate is at most a few dozen rows wide, so the
//! solver favours robustness: each rotation annihilates one off-diagonal
//! pair exactly, and sweeps continue until the off-diagonal part underflows
//! relative to the diagonal.

use crate::error::{Error, Result};
use crate::tensor::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Largest entrywise `|A - A^dagger|` accepted as Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `A = V diag(λ) V^dagger` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose k-th column is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V diag(f(λ)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|x| C64::new(f(x), 0.0))
    }

    /// `V diag(f(λ)) V^dagger` for complex-valued `f`, e.g. `exp(iλ)`.
    pub fn map_complex(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v.get(i, k) * weights[k] * v.get(j, k).conj()).sum()
        });
        if !v.subsystem_dims().is_empty() {
            out = out.with_subsystems(v.subsystem_dims()).expect("same dims");
        }
        out
    }

    /// Max-norm of `A v_k - λ_k v_k` over all eigenpairs.
    pub fn max_residual(&self, a: &ComplexMatrix) -> f64 {
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = self.eigenvector(k);
                let av = a.matvec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - y * self.eigenvalues[k]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let deviation = a.hermiticity_deviation();
    if deviation < HERMITIAN_TOL {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation })
    }
}

/// Full spectrum and eigenvectors of a Hermitian matrix, ascending.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(a)?;
    let (values, vectors) = jacobi(a, true);
    let n = a.dim();
    let vectors = vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut eigenvectors = ComplexMatrix::from_fn(n, |i, col| vectors[i * n + order[col]]);
    if !a.subsystem_dims().is_empty() {
        eigenvectors = eigenvectors.with_subsystems(a.subsystem_dims())?;
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending. Skips eigenvector accumulation.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(a)?;
    let (mut values, _) = jacobi(a, false);
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn spectral_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map(f))
}

fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<Vec<C64>>) {
    let n = a.dim();
    // Symmetrize so that the rotations see an exactly Hermitian matrix.
    let mut w: Vec<C64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            if i == j {
                C64::new(a.get(i, i).re, 0.0)
            } else {
                (a.get(i, j) + a.get(j, i).conj()) * 0.5
            }
        })
        .collect();
    let mut v = want_vectors.then(|| {
        let mut id = vec![ZERO; n * n];
        for i in 0..n {
            id[i * n + i] = ONE;
        }
        id
    });

    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| w[p * n + q].norm())
            .sum();
        if off == 0.0 {
            break;
        }
        // Early sweeps skip tiny elements; later sweeps rotate everything.
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };

        for p in 0..n {
            for q in (p + 1)..n {
                let b = w[p * n + q];
                let abs_b = b.norm();
                let app = w[p * n + p].re;
                let aqq = w[q * n + q].re;
                // Negligible relative to both diagonal entries: drop it.
                if sweep > 3 && app.abs() + 100.0 * abs_b == app.abs() && aqq.abs() + 100.0 * abs_b == aqq.abs() {
                    w[p * n + q] = ZERO;
                    w[q * n + p] = ZERO;
                    continue;
                }
                if abs_b <= threshold || abs_b == 0.0 {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * abs_b);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = b / abs_b;
                let phase_conj = phase.conj();
                // V = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] in the (p, q) plane.
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = phase_conj * (-s);
                let vqq = phase_conj * c;

                // A <- A V
                for k in 0..n {
                    let akp = w[k * n + p];
                    let akq = w[k * n + q];
                    w[k * n + p] = akp * vpp + akq * vqp;
                    w[k * n + q] = akp * vpq + akq * vqq;
                }
                // A <- V^dagger A
                for k in 0..n {
                    let apk = w[p * n + k];
                    let aqk = w[q * n + k];
                    w[p * n + k] = vpp.conj() * apk + vqp.conj() * aqk;
                    w[q * n + k] = vpq.conj() * apk + vqq.conj() * aqk;
                }
                w[p * n + p] = C64::new(app - t * abs_b, 0.0);
                w[q * n + q] = C64::new(aqq + t * abs_b, 0.0);
                w[p * n + q] = ZERO;
                w[q * n + p] = ZERO;

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * vpp + vkq * vqp;
                        v[k * n + q] = vkp * vpq + vkq * vqq;
                    }
                }
            }
        }
    }
    let values = (0..n).map(|i| w[i * n + i].re).collect();
    (values, v)
}
