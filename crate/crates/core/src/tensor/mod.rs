//! Dense complex linear algebra on small matrices.

mod eigen;
mod matrix;
mod partial;
mod random;

pub use eigen::{hermitian_eig, hermitian_eigenvalues, spectral_function, Spectrum, HERMITIAN_TOL};
pub use matrix::{kron, kron_all, kron_vec, ComplexMatrix, C64, I, ONE, ZERO};
pub use partial::{partial_trace, partial_transpose, reduced_from_pure};
pub use random::{complex_gaussian, complex_gaussian_vec, determinant, haar_unitary, haar_vector, norm};

/// Applies the single-site operator `op` to factor `site` of the state
/// vector `psi` in place, without building the full tensor product.
pub fn apply_on_site(psi: &mut [C64], dims: &[usize], site: usize, op: &ComplexMatrix) {
    let d = dims[site];
    assert_eq!(op.dim(), d, "operator dimension does not match site");
    let inner: usize = dims[site + 1..].iter().product();
    let outer: usize = dims[..site].iter().product();
    let mut buf = vec![ZERO; d];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * d * inner + i;
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = psi[base + k * inner];
            }
            for r in 0..d {
                let mut acc = ZERO;
                for (k, x) in buf.iter().enumerate() {
                    acc += op.get(r, k) * x;
                }
                psi[base + r * inner] = acc;
            }
        }
    }
}

/// Unitary `exp(i G)` for a Hermitian generator `G`.
pub fn unitary_from_generator(generator: &ComplexMatrix) -> crate::Result<ComplexMatrix> {
    Ok(hermitian_eig(generator)?.map_complex(|x| C64::new(x.cos(), x.sin())))
}
