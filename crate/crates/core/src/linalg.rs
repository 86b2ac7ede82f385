//! Dense complex and real linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here is deterministic and tolerance-driven; rank decisions
//! are made relative to the largest singular value of the input.

use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Hermitian average `(m + m^H) / 2`.
pub fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Deviation of `m` from being Hermitian, in Frobenius norm.
pub fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).norm() * 0.5
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. The input is Hermitized first, so callers may
/// pass matrices that are Hermitian only up to round-off.
pub fn herm_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let se = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &se.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Smallest eigenvalue of the Hermitized input, 0.0 for empty matrices.
pub fn min_eig(m: &DMatrix<C64>) -> f64 {
    let (vals, _) = herm_eigen(m);
    vals.first().copied().unwrap_or(0.0)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().as_slice().to_vec();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Rank by singular values with a cut at `rel_tol * sigma_max`.
pub fn svd_rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        None => 0,
        Some(&s0) if s0 <= 0.0 => 0,
        Some(&s0) => sv.iter().filter(|&&s| s > rel_tol * s0).count(),
    }
}

/// Orthonormal basis of the nullspace of a complex matrix.
pub fn nullspace(m: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return (0..ncols)
            .map(|j| {
                DVector::from_fn(ncols, |i, _| {
                    if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
    }
    // pad to at least square so v_t carries a full basis of the column space
    let work = if m.nrows() < ncols {
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let smax = svd.singular_values.max().max(0.0);
    let cut = rel_tol * smax;
    let mut out = Vec::new();
    for k in 0..v_t.nrows() {
        if k >= svd.singular_values.len() || svd.singular_values[k] <= cut {
            out.push(v_t.row(k).adjoint());
        }
    }
    out
}

/// Eigenvalues of a general complex matrix via the Schur form.
///
/// Falls back to a slightly perturbation-tolerant invocation; `None`
/// only when the QR iteration fails to converge.
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-14, 100_000)
        .or_else(|| nalgebra::linalg::Schur::try_new(m.clone(), 1e-10, 100_000))?;
    let (_q, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

/// Real-matrix nullspace with the same rank convention as [`nullspace`].
pub fn nullspace_real(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let ncols = m.ncols();
    if m.nrows() == 0 || ncols == 0 {
        return (0..ncols)
            .map(|j| DVector::from_fn(ncols, |i, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
    }
    let mut work = m.clone();
    if work.nrows() < ncols {
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        work = padded;
    }
    let svd = work.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let smax = svd.singular_values.max().max(0.0);
    let cut = rel_tol * smax;
    let mut out = Vec::new();
    for k in 0..v_t.nrows() {
        if k >= svd.singular_values.len() || svd.singular_values[k] <= cut {
            out.push(v_t.row(k).transpose());
        }
    }
    out
}

/// Rank of a set of real row vectors.
pub fn rank_real_rows(rows: &[DVector<f64>], rel_tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let dim = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.svd(false, false).singular_values;
    let smax = sv.max().max(0.0);
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// `n`-th matrix power by iterated multiplication; `n = 0` gives the identity.
pub fn matrix_power(m: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let dim = m.nrows();
    let mut acc = DMatrix::identity(dim, dim);
    for _ in 0..n {
        acc = &acc * m;
    }
    acc
}

/// Frobenius inner-product distance, convenience for tests and dedup.
pub fn matrix_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn herm_eigen_reconstructs() {
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(3.0, 0.0)],
        );
        let (vals, vecs) = herm_eigen(&h);
        assert!(vals[0] <= vals[1]);
        let mut rec = DMatrix::zeros(2, 2);
        for k in 0..2 {
            let v = vecs.column(k);
            rec += (v * v.adjoint()) * c(vals[k], 0.0);
        }
        assert!((rec - h).norm() < 1e-12);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let ns = nullspace(&m, 1e-12);
        assert_eq!(ns.len(), 1);
        assert!((&m * &ns[0]).norm() < 1e-12);
    }

    #[test]
    fn schur_eigenvalues_of_jordan_block() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let evs = complex_eigenvalues(&m).unwrap();
        for ev in evs {
            assert!((ev - c(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn rank_decisions() {
        let m = DMatrix::from_row_slice(2, 3, &[c(1.0, 0.0); 6]);
        assert_eq!(svd_rank(&m, 1e-12), 1);
        assert_eq!(nullspace(&m, 1e-12).len(), 2);
    }
}
