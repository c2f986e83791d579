//! Dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::tolerance::Tolerance;

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `max |M + M^T|`, zero for skew-symmetric matrices.
pub fn skew_residual(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m + m.transpose()))
}

/// `max |M - M^T|`, zero for symmetric matrices.
pub fn sym_residual(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Frobenius inner product `tr(A^T B)`.
pub fn frob_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn frob_norm(a: &DMatrix<f64>) -> f64 {
    frob_dot(a, a).sqrt()
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Basis of the skew-symmetric `n x n` matrices, Frobenius-orthonormal,
/// ordered by index pairs `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn skew_basis(n: usize) -> Vec<DMatrix<f64>> {
    let s = 1.0 / (2.0f64).sqrt();
    index_pairs(n)
        .into_iter()
        .map(|(i, j)| {
            let mut e = DMatrix::zeros(n, n);
            e[(j, i)] = s;
            e[(i, j)] = -s;
            e
        })
        .collect()
}

/// Basis of the symmetric `n x n` matrices, Frobenius-orthonormal:
/// diagonal units first, then normalized off-diagonal pairs.
pub fn sym_basis(n: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut e = DMatrix::zeros(n, n);
        e[(i, i)] = 1.0;
        out.push(e);
    }
    let s = 1.0 / (2.0f64).sqrt();
    for (i, j) in index_pairs(n) {
        let mut e = DMatrix::zeros(n, n);
        e[(i, j)] = s;
        e[(j, i)] = s;
        out.push(e);
    }
    out
}

/// Index pairs `(i, j)` with `i < j`, lexicographic.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

/// Reconstruct a matrix from coordinates in a matrix-space basis.
pub fn from_coords(coords: &DVector<f64>, basis: &[DMatrix<f64>]) -> DMatrix<f64> {
    let mut m = basis[0].clone() * coords[0];
    for (c, b) in coords.iter().zip(basis.iter()).skip(1) {
        m += b * *c;
    }
    m
}

/// Right-nullspace of `m`, returned as orthonormal columns.
///
/// Nullity is decided against `tol.threshold(sigma_max)`. Rows are padded
/// with zeros when the matrix is wider than tall so that the SVD exposes
/// the full right-singular basis.
pub fn nullspace(m: &DMatrix<f64>, tol: &Tolerance) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return DMatrix::identity(cols, cols);
    }
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("nullspace: SVD requested V^T");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let thresh = tol.threshold(sigma_max);
    let mut kernel_rows: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] <= thresh).collect();
    kernel_rows.extend(sigma.len()..cols);
    let mut out = DMatrix::zeros(cols, kernel_rows.len());
    for (c, &r) in kernel_rows.iter().enumerate() {
        out.set_column(c, &v_t.row(r).transpose());
    }
    canonicalize_columns(&mut out, tol);
    out
}

/// Orthonormal basis of the column span of `m` (SVD, rank by tolerance).
pub fn column_span(m: &DMatrix<f64>, tol: &Tolerance) -> DMatrix<f64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("column_span: SVD requested U");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let rank = (0..sigma.len())
        .filter(|&i| sigma[i] > tol.threshold(sigma_max))
        .count();
    let mut out = u.columns(0, rank).into_owned();
    canonicalize_columns(&mut out, tol);
    out
}

/// Fix the sign of each column: the entry of largest magnitude is positive.
pub fn canonicalize_columns(m: &mut DMatrix<f64>, tol: &Tolerance) {
    for mut col in m.column_iter_mut() {
        let mut lead = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[lead].abs() + tol.abs {
                lead = i;
            }
        }
        if col[lead] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Gram-Schmidt in matrix space; drops dependent members.
pub fn orthonormalize_matrices(mats: &[DMatrix<f64>], tol: &Tolerance) -> Vec<DMatrix<f64>> {
    let scale = mats.iter().map(frob_norm).fold(0.0, f64::max);
    let mut out: Vec<DMatrix<f64>> = Vec::new();
    for m in mats {
        let mut v = m.clone();
        // re-project once for numerical safety
        for _ in 0..2 {
            for b in &out {
                let c = frob_dot(&v, b);
                v -= b * c;
            }
        }
        let nrm = frob_norm(&v);
        if nrm > tol.threshold(scale.max(1.0)) {
            out.push(v / nrm);
        }
    }
    out
}

/// Residual of projecting `m` onto the span of an orthonormal matrix family.
pub fn projection_residual(m: &DMatrix<f64>, basis: &[DMatrix<f64>]) -> f64 {
    let mut v = m.clone();
    for b in basis {
        let c = frob_dot(&v, b);
        v -= b * c;
    }
    frob_norm(&v)
}

/// Mutual-containment check for two matrix families (spans at tolerance).
pub fn same_matrix_span(a: &[DMatrix<f64>], b: &[DMatrix<f64>], tol: &Tolerance) -> bool {
    let oa = orthonormalize_matrices(a, tol);
    let ob = orthonormalize_matrices(b, tol);
    if oa.len() != ob.len() {
        return false;
    }
    let thresh = tol.threshold(1.0);
    oa.iter().all(|m| projection_residual(m, &ob) <= thresh)
        && ob.iter().all(|m| projection_residual(m, &oa) <= thresh)
}

/// Characteristic polynomial coefficients `[1, c_1, ..., c_d]` of a square
/// matrix, highest degree first (Faddeev-LeVerrier).
pub fn charpoly(m: &DMatrix<f64>) -> Vec<f64> {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "charpoly needs a square matrix");
    let mut coeffs = vec![1.0];
    let mut n = DMatrix::<f64>::zeros(d, d);
    let id = DMatrix::<f64>::identity(d, d);
    let mut c = 1.0;
    for k in 1..=d {
        n = m * (n + &id * c);
        c = -n.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Coefficient-wise polynomial comparison at tolerance.
pub fn poly_close(a: &[f64], b: &[f64], tol: &Tolerance) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a
        .iter()
        .chain(b.iter())
        .fold(1.0f64, |acc, x| acc.max(x.abs()));
    a.iter()
        .zip(b.iter())
        .all(|(x, y)| (x - y).abs() <= tol.threshold(scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_of_diagonal() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![-4.0, 0.0, 0.0, 0.0]));
        // x^3 (x + 4)
        let p = charpoly(&m);
        assert_eq!(p.len(), 5);
        let expect = [1.0, 4.0, 0.0, 0.0, 0.0];
        for (a, b) in p.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn charpoly_of_rotation_block() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        // x^2 + 4
        let p = charpoly(&m);
        assert!(poly_close(&p, &[1.0, 0.0, 4.0], &Tolerance::default()));
    }

    #[test]
    fn nullspace_of_rotation_generator() {
        let tol = Tolerance::default();
        let mut m = DMatrix::zeros(4, 4);
        m[(2, 3)] = 1.0;
        m[(3, 2)] = -1.0;
        let ker = nullspace(&m, &tol);
        assert_eq!(ker.ncols(), 2);
        for c in ker.column_iter() {
            assert!(c[2].abs() < 1e-12 && c[3].abs() < 1e-12);
        }
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let tol = Tolerance::default();
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let ker = nullspace(&m, &tol);
        assert_eq!(ker.ncols(), 2);
        for c in ker.column_iter() {
            assert!(c[0].abs() < 1e-12);
        }
    }

    #[test]
    fn nullspace_of_degenerate_shapes() {
        let tol = Tolerance::default();
        let empty_domain = DMatrix::<f64>::zeros(4, 0);
        assert_eq!(nullspace(&empty_domain, &tol).ncols(), 0);
        let no_constraints = DMatrix::<f64>::zeros(0, 3);
        assert_eq!(nullspace(&no_constraints, &tol).ncols(), 3);
    }

    #[test]
    fn skew_basis_is_orthonormal() {
        let basis = skew_basis(4);
        assert_eq!(basis.len(), 6);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let d = frob_dot(a, b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-14);
            }
        }
    }
}
