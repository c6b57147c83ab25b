//! Dense linear algebra on tangent spaces: metric inner products, nullspaces,
//! Gram-Schmidt and orthogonal complements.
//!
//! Every routine works with an explicit Gram matrix `g` (the metric at a
//! point), so orthogonality is always meant with respect to `g`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Relative residual norm below which Gram-Schmidt declares dependence.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-10;

pub fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.dot(&(g * v))
}

pub fn norm(g: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    inner(g, u, u).max(0.0).sqrt()
}

/// Basis of the kernel of `m`.
///
/// The matrix is padded with zero rows when it is wide so the SVD returns a
/// full right-singular basis. Singular values below `tol * sigma_max` are
/// treated as zero; a zero matrix has the whole space as kernel.
pub fn nullspace(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    let square = if rows < cols {
        let mut padded = DMatrix::zeros(cols, cols);
        padded.view_mut((0, 0), (rows, cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let cutoff = tol * sigma_max;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| sigma_max == 0.0 || **s <= cutoff)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Numerical rank with the same cutoff as [`nullspace`].
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    m.ncols() - nullspace(m, tol).len()
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass.
///
/// Fails with `RankDeficient` as soon as a vector loses all but a
/// `INDEPENDENCE_TOLERANCE` fraction of its norm, including the zero vector.
pub fn gram_schmidt(g: &DMatrix<f64>, vs: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for v in vs {
        let original = norm(g, v);
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = inner(g, u, &w);
                w.axpy(-c, u, 1.0);
            }
        }
        let n = norm(g, &w);
        if original == 0.0 || !n.is_finite() || n <= INDEPENDENCE_TOLERANCE * original {
            return Err(GeometryError::RankDeficient {
                rank: out.len(),
                expected: vs.len(),
            });
        }
        out.push(w / n);
    }
    Ok(out)
}

/// g-orthonormal basis of the g-orthogonal complement of `span(basis)`.
pub fn orthogonal_complement(
    g: &DMatrix<f64>,
    basis: &[DVector<f64>],
) -> Result<Vec<DVector<f64>>> {
    let n = g.nrows();
    if basis.is_empty() {
        return gram_schmidt(g, &standard_basis(n));
    }
    gram_schmidt(g, basis)?;
    let rows = DMatrix::from_fn(basis.len(), n, |i, j| basis[i].dot(&g.column(j)));
    let null = nullspace(&rows, RANK_TOLERANCE);
    gram_schmidt(g, &null)
}

/// g-orthonormal basis of `span(vs)`, silently dropping vectors whose
/// remainder after projection has g-norm below `tol`.
pub fn orthonormal_span(g: &DMatrix<f64>, vs: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = inner(g, u, &w);
                w.axpy(-c, u, 1.0);
            }
        }
        let n = norm(g, &w);
        if n.is_finite() && n > tol {
            out.push(w / n);
        }
    }
    out
}

pub fn standard_basis(n: usize) -> Vec<DVector<f64>> {
    (0..n)
        .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect()
}

/// Matrix whose columns are the given vectors.
pub fn columns(vs: &[DVector<f64>], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, vs.len(), |i, j| vs[j][i])
}

/// g-orthogonal projector onto `span(basis)` for a g-orthonormal basis.
pub fn projector(g: &DMatrix<f64>, basis: &[DVector<f64>]) -> DMatrix<f64> {
    let n = g.nrows();
    let mut p = DMatrix::zeros(n, n);
    for b in basis {
        p += b * (g * b).transpose();
    }
    p
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn nullspace_of_zero_and_identity() {
        assert_eq!(nullspace(&DMatrix::zeros(2, 2), RANK_TOLERANCE).len(), 2);
        assert!(nullspace(&DMatrix::identity(3, 3), RANK_TOLERANCE).is_empty());
    }

    #[test]
    fn nullspace_of_wide_matrix_is_annihilated() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, -1.0, 0.0, 1.0, 1.0, 3.0]);
        let null = nullspace(&m, RANK_TOLERANCE);
        assert_eq!(null.len(), 2);
        for x in &null {
            assert!((&m * x).norm() <= RANK_TOLERANCE * m.norm() * x.norm());
        }
        assert_eq!(rank(&m, RANK_TOLERANCE) + null.len(), 4);
    }

    #[test]
    fn gram_schmidt_examples() {
        let g = DMatrix::identity(2, 2);
        let out = gram_schmidt(&g, &[v(&[1.0, 0.0]), v(&[1.0, 1.0])]).unwrap();
        assert!((&out[0] - v(&[1.0, 0.0])).norm() < 1e-15);
        assert!((&out[1] - v(&[0.0, 1.0])).norm() < 1e-15);
        let basis = standard_basis(3);
        let same = gram_schmidt(&DMatrix::identity(3, 3), &basis).unwrap();
        assert_eq!(same, basis);
    }

    #[test]
    fn gram_schmidt_rejects_zero_and_dependent_vectors() {
        let g = DMatrix::identity(2, 2);
        assert!(matches!(
            gram_schmidt(&g, &[v(&[0.0, 0.0])]),
            Err(GeometryError::RankDeficient { rank: 0, .. })
        ));
        assert!(gram_schmidt(&g, &[v(&[1.0, 2.0]), v(&[2.0, 4.0])]).is_err());
    }

    #[test]
    fn complement_in_euclidean_space() {
        let g = DMatrix::identity(3, 3);
        let comp = orthogonal_complement(&g, &[v(&[1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(comp.len(), 2);
        for c in &comp {
            assert!(c[0].abs() < 1e-12);
        }
        let back = orthogonal_complement(&g, &comp).unwrap();
        assert_eq!(back.len(), 1);
        assert!((back[0][0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complement_respects_non_euclidean_metric() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let comp = orthogonal_complement(&g, &[v(&[1.0, 0.0])]).unwrap();
        assert!(inner(&g, &comp[0], &v(&[1.0, 0.0])).abs() < 1e-12);
        assert!((norm(&g, &comp[0]) - 1.0).abs() < 1e-12);
    }
}
