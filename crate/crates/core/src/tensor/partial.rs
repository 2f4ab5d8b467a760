use crate::error::{Error, Result};
use crate::tensor::matrix::{ComplexMatrix, C64, ZERO};

/// Mixed-radix digits of `index` for the given factor dimensions, most
/// significant factor first.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

fn structured_dims(m: &ComplexMatrix) -> Result<&[usize]> {
    let dims = m.subsystem_dims();
    if dims.is_empty() {
        Err(Error::Unstructured)
    } else {
        Ok(dims)
    }
}

fn normalized_keep(keep: &[usize], count: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= count) {
        return Err(Error::InvalidSubsystem { index: bad, count });
    }
    Ok(keep)
}

/// Transpose on one tensor factor: `<i_a j_b| M^{T_a} |k_a l_b> = <k_a j_b| M |i_a l_b>`.
pub fn partial_transpose(m: &ComplexMatrix, subsystem: usize) -> Result<ComplexMatrix> {
    let dims = structured_dims(m)?.to_vec();
    if subsystem >= dims.len() {
        return Err(Error::InvalidSubsystem {
            index: subsystem,
            count: dims.len(),
        });
    }
    let n = m.dim();
    let mut row_digits = vec![0; dims.len()];
    let mut col_digits = vec![0; dims.len()];
    let out = ComplexMatrix::from_fn(n, |i, j| {
        digits(i, &dims, &mut row_digits);
        digits(j, &dims, &mut col_digits);
        std::mem::swap(&mut row_digits[subsystem], &mut col_digits[subsystem]);
        m.get(compose(&row_digits, &dims), compose(&col_digits, &dims))
    });
    out.with_subsystems(&dims)
}

/// Reduced operator on the `keep` factors (sorted, deduplicated).
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    let dims = structured_dims(m)?.to_vec();
    let keep = normalized_keep(keep, dims.len())?;
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total: usize = traced_dims.iter().product();

    let mut full = vec![0; dims.len()];
    let mut kd = vec![0; keep.len()];
    let mut td = vec![0; traced.len()];
    let mut embed = |kept_index: usize, traced_index: usize| {
        digits(kept_index, &kept_dims, &mut kd);
        digits(traced_index, &traced_dims, &mut td);
        for (slot, &k) in kd.iter().zip(&keep) {
            full[k] = *slot;
        }
        for (slot, &k) in td.iter().zip(&traced) {
            full[k] = *slot;
        }
        compose(&full, &dims)
    };
    let mut index_map = vec![0usize; kept_total * traced_total];
    for a in 0..kept_total {
        for t in 0..traced_total {
            index_map[a * traced_total + t] = embed(a, t);
        }
    }
    let out = ComplexMatrix::from_fn(kept_total, |a, b| {
        (0..traced_total)
            .map(|t| m.get(index_map[a * traced_total + t], index_map[b * traced_total + t]))
            .sum()
    });
    out.with_subsystems(&kept_dims)
}

/// Reduced density matrix of the pure state `psi` on the `keep` factors,
/// computed without forming `|psi><psi|`.
pub fn reduced_from_pure(psi: &[C64], dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if psi.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: psi.len(),
        });
    }
    let keep = normalized_keep(keep, dims.len())?;
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product();
    let traced_total = total / kept_total;

    // Arrange psi as a kept x traced coefficient matrix, then M M^dagger.
    let mut coeffs = vec![ZERO; total];
    let mut full = vec![0; dims.len()];
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    for (idx, amp) in psi.iter().enumerate() {
        digits(idx, dims, &mut full);
        let a = keep.iter().fold(0, |acc, &k| acc * dims[k] + full[k]);
        let t = traced.iter().fold(0, |acc, &k| acc * dims[k] + full[k]);
        coeffs[a * traced_total + t] = *amp;
    }
    let out = ComplexMatrix::from_fn(kept_total, |a, b| {
        let ra = &coeffs[a * traced_total..(a + 1) * traced_total];
        let rb = &coeffs[b * traced_total..(b + 1) * traced_total];
        ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum()
    });
    out.with_subsystems(&kept_dims)
}
