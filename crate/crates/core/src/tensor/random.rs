use rand::Rng;
use rand_distr::StandardNormal;

use crate::tensor::matrix::{ComplexMatrix, C64, ZERO};

/// Standard complex Gaussian: independent real and imaginary parts with
/// variance 1/2 each.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Uniformly distributed unit vector in `C^len` (Haar pure state).
pub fn haar_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let mut v = complex_gaussian_vec(len, rng);
        let n = norm(&v);
        if n > 1e-300 {
            v.iter_mut().for_each(|z| *z /= n);
            return v;
        }
    }
}

/// Haar-distributed unitary of size `d`.
///
/// Ginibre matrix, modified Gram-Schmidt on the columns, then each column is
/// multiplied by the phase of the corresponding `R` diagonal entry. Gram-Schmidt
/// already produces a positive real diagonal, so the phase correction is the
/// identity here, but it keeps the construction valid if the orthonormalizer
/// changes.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "haar_unitary needs d >= 1");
    let mut cols: Vec<Vec<C64>> = (0..d).map(|_| complex_gaussian_vec(d, rng)).collect();
    let mut phases = vec![C64::new(1.0, 0.0); d];
    for k in 0..d {
        for j in 0..k {
            let proj: C64 = cols[j].iter().zip(&cols[k]).map(|(a, b)| a.conj() * b).sum();
            let (head, tail) = cols.split_at_mut(k);
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= proj * y;
            }
        }
        let r_kk = norm(&cols[k]);
        cols[k].iter_mut().for_each(|z| *z /= r_kk);
        // r_kk is real and positive, so its phase is 1.
        phases[k] = C64::new(r_kk, 0.0) / r_kk;
    }
    let mut u = ComplexMatrix::zeros(d);
    for (k, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u.set(i, k, z * phases[k]);
        }
    }
    u
}

/// Complex determinant via Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> C64 {
    let n = m.dim();
    let mut a: Vec<C64> = m.data().to_vec();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].norm().total_cmp(&a[j * n + col].norm()))
            .expect("non-empty range");
        if a[pivot * n + col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[row * n + col] / p;
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
        }
    }
    det
}
