//! Lie algebras, inner products, frames and structural subspaces.

use nalgebra::{DMatrix, DVector};

use crate::linalg;
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// A real Lie algebra given by structure constants.
///
/// The bracket is stored through the adjoint matrices: `ad[i]` has entry
/// `(k, j)` equal to the coefficient of `e_k` in `[e_i, e_j]`, so that
/// `[x, y] = sum_i x_i ad[i] y` for coordinate columns `x`, `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    ad: Vec<DMatrix<f64>>,
}

/// One violated identity found while validating structure constants.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureDiagnostic {
    /// `c[i][j][k] + c[j][i][k]` is not zero.
    Antisymmetry {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
    },
    /// The cyclic sum `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`
    /// has a nonzero coefficient; `residual` is its largest magnitude.
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        residual: f64,
    },
}

/// Validate a dense rank-3 array `c[i][j][k]` (meaning `[e_i,e_j] = sum_k
/// c[i][j][k] e_k`) and wrap it as a [`LieAlgebra`].
///
/// On failure the full list of violated identities is returned, each with
/// the offending index triple and residual magnitude.
pub fn validate_lie_algebra(
    structure: &[Vec<Vec<f64>>],
    tol: &Tolerance,
) -> std::result::Result<LieAlgebra, Vec<StructureDiagnostic>> {
    let n = structure.len();
    assert!(n >= 1, "structure constants must have positive dimension");
    for row in structure {
        assert_eq!(row.len(), n, "structure constants must be n x n x n");
        for col in row {
            assert_eq!(col.len(), n, "structure constants must be n x n x n");
        }
    }
    let scale = structure
        .iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    let thresh = tol.threshold(scale.max(1.0) * scale.max(1.0));
    let mut diagnostics = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let r = structure[i][j][k] + structure[j][i][k];
                if r.abs() > tol.threshold(scale.max(1.0)) {
                    diagnostics.push(StructureDiagnostic::Antisymmetry {
                        i,
                        j,
                        k,
                        residual: r.abs(),
                    });
                }
            }
        }
    }
    // Jacobi: coefficient of e_m in [[e_i,e_j],e_k] is sum_l c[i][j][l] c[l][k][m].
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut worst = 0.0f64;
                for m in 0..n {
                    let mut r = 0.0;
                    for l in 0..n {
                        r += structure[i][j][l] * structure[l][k][m]
                            + structure[j][k][l] * structure[l][i][m]
                            + structure[k][i][l] * structure[l][j][m];
                    }
                    worst = worst.max(r.abs());
                }
                if worst > thresh {
                    diagnostics.push(StructureDiagnostic::Jacobi {
                        i,
                        j,
                        k,
                        residual: worst,
                    });
                }
            }
        }
    }
    if !diagnostics.is_empty() {
        return Err(diagnostics);
    }
    let ad = (0..n)
        .map(|i| DMatrix::from_fn(n, n, |k, j| structure[i][j][k]))
        .collect();
    Ok(LieAlgebra { dim: n, ad })
}

impl LieAlgebra {
    /// Build from a sparse bracket list `(i, j, k, value)` with `i < j`;
    /// antisymmetry is filled in, the Jacobi identity is validated.
    pub fn from_brackets(
        dim: usize,
        brackets: &[(usize, usize, usize, f64)],
        tol: &Tolerance,
    ) -> std::result::Result<Self, Vec<StructureDiagnostic>> {
        let mut c = vec![vec![vec![0.0; dim]; dim]; dim];
        for &(i, j, k, v) in brackets {
            assert!(
                i < j && j < dim && k < dim,
                "bracket indices need i < j < dim"
            );
            c[i][j][k] += v;
            c[j][i][k] -= v;
        }
        validate_lie_algebra(&c, tol)
    }

    /// The abelian algebra of the given dimension.
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            ad: vec![DMatrix::zeros(dim, dim); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adjoint matrix of the `i`-th basis vector.
    pub fn ad(&self, i: usize) -> &DMatrix<f64> {
        &self.ad[i]
    }

    /// Adjoint matrix of an arbitrary element.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, xi) in x.iter().enumerate() {
            m += &self.ad[i] * *xi;
        }
        m
    }

    /// `c[i][j][k]`, the coefficient of `e_k` in `[e_i, e_j]`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.ad[i][(k, j)]
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_of(x) * y
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        self.ad[i].column(j).into_owned()
    }

    /// Dense structure constants `c[i][j][k]`.
    pub fn structure(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.c(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    /// Largest Jacobi residual over basis triples (zero on valid input).
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let r = self.ad_of(&self.bracket_basis(i, j)).column(k)
                        + self.ad_of(&self.bracket_basis(j, k)).column(i)
                        + self.ad_of(&self.bracket_basis(k, i)).column(j);
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }
}

/// A Lie algebra together with an inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    pub algebra: LieAlgebra,
    gram: DMatrix<f64>,
}

impl MetricLieAlgebra {
    /// Pair an algebra with a Gram matrix; the matrix must be symmetric and
    /// positive definite at the given tolerance.
    pub fn new(algebra: LieAlgebra, gram: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        let n = algebra.dim();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.nrows(),
            });
        }
        let residual = linalg::sym_residual(&gram);
        if residual > tol.threshold(linalg::max_abs(&gram)) {
            return Err(Error::MetricNotSymmetric { residual });
        }
        let mla = MetricLieAlgebra { algebra, gram };
        gram_schmidt(&mla, tol)?; // positive-definiteness check
        Ok(mla)
    }

    /// Euclidean inner product.
    pub fn with_identity_metric(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        MetricLieAlgebra {
            algebra,
            gram: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    /// Same algebra with the metric scaled by `t > 0` (a homothety).
    pub fn scale_metric(&self, t: f64) -> Self {
        MetricLieAlgebra {
            algebra: self.algebra.clone(),
            gram: &self.gram * t,
        }
    }
}

/// An invertible change of basis; column `j` holds the coordinates of the
/// new basis vector `f_j` in the old basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    matrix: DMatrix<f64>,
}

impl Frame {
    pub fn new(matrix: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        let det = matrix.determinant();
        let scale = linalg::max_abs(&matrix).powi(matrix.nrows() as i32);
        if det.abs() <= tol.threshold(scale) {
            return Err(Error::SingularFrame { det: det.abs() });
        }
        Ok(Frame { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Frame {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.matrix
            .clone()
            .try_inverse()
            .expect("frame invertibility checked at construction")
    }

    /// `max |P^T G P - I|`; zero when the frame is orthonormal for `G`.
    pub fn orthonormality_residual(&self, gram: &DMatrix<f64>) -> f64 {
        let n = self.dim();
        let p = &self.matrix;
        linalg::max_abs(&(p.transpose() * gram * p - DMatrix::identity(n, n)))
    }
}

fn gram_schmidt(mla: &MetricLieAlgebra, tol: &Tolerance) -> Result<DMatrix<f64>> {
    let n = mla.dim();
    let gram = mla.gram();
    let scale = linalg::max_abs(gram);
    let mut p = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut v = DVector::zeros(n);
        v[j] = 1.0;
        for k in 0..j {
            let proj = mla.inner(&p.column(k).into_owned(), &v);
            v -= p.column(k) * proj;
        }
        let pivot = mla.inner(&v, &v);
        if pivot <= tol.threshold(scale) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        p.set_column(j, &(v / pivot.sqrt()));
    }
    Ok(p)
}

/// Orthonormalize the input basis in order (Gram-Schmidt, no pivoting).
///
/// The returned frame `P` satisfies `P^T G P = I`; for a diagonal metric it
/// is the diagonal rescaling of the input basis.
pub fn orthonormal_frame(mla: &MetricLieAlgebra, tol: &Tolerance) -> Result<Frame> {
    let p = gram_schmidt(mla, tol)?;
    Frame::new(p, tol)
}

/// Structure constants of the same bracket in the basis given by `frame`.
pub fn change_basis(algebra: &LieAlgebra, frame: &Frame) -> Result<LieAlgebra> {
    let n = algebra.dim();
    if frame.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: frame.dim(),
        });
    }
    let p = frame.matrix();
    let p_inv = frame.inverse();
    // ad'[a] = sum_i P[i][a] P^{-1} ad[i] P
    let ad = (0..n)
        .map(|a| {
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                if p[(i, a)] != 0.0 {
                    m += &p_inv * algebra.ad(i) * p * p[(i, a)];
                }
            }
            m
        })
        .collect();
    Ok(LieAlgebra { dim: n, ad })
}

/// A linear subspace, stored as orthonormal basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Span of the given vectors; rank decided at tolerance.
    pub fn from_spanning(ambient_dim: usize, vectors: &[DVector<f64>], tol: &Tolerance) -> Self {
        if vectors.is_empty() {
            return Subspace {
                basis: DMatrix::zeros(ambient_dim, 0),
            };
        }
        let m = DMatrix::from_columns(vectors);
        Subspace {
            basis: linalg::column_span(&m, tol),
        }
    }

    /// Wrap already-orthonormal columns.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        Subspace { basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self, tol: &Tolerance) -> Subspace {
        let n = self.ambient_dim();
        let residual = DMatrix::identity(n, n) - self.projector();
        Subspace {
            basis: linalg::column_span(&residual, tol),
        }
    }

    /// Distance of `v` from the subspace.
    pub fn residual_of(&self, v: &DVector<f64>) -> f64 {
        (v - &self.basis * (self.basis.transpose() * v)).norm()
    }

    pub fn contains_vector(&self, v: &DVector<f64>, tol: &Tolerance) -> bool {
        self.residual_of(v) <= tol.threshold(v.norm().max(1.0))
    }

    pub fn contains(&self, other: &Subspace, tol: &Tolerance) -> bool {
        other
            .basis
            .column_iter()
            .all(|c| self.contains_vector(&c.into_owned(), tol))
    }

    /// Subspace equality as mutual containment of spans.
    pub fn same_as(&self, other: &Subspace, tol: &Tolerance) -> bool {
        self.dim() == other.dim() && self.contains(other, tol) && other.contains(self, tol)
    }

    /// Image under an invertible map, re-orthonormalized.
    pub fn map(&self, m: &DMatrix<f64>, tol: &Tolerance) -> Subspace {
        Subspace {
            basis: linalg::column_span(&(m * &self.basis), tol),
        }
    }
}

/// Column span of all bracket vectors `[e_i, e_j]`.
pub fn derived_subalgebra(algebra: &LieAlgebra, tol: &Tolerance) -> Subspace {
    let n = algebra.dim();
    let vectors: Vec<DVector<f64>> = linalg::index_pairs(n)
        .into_iter()
        .map(|(i, j)| algebra.bracket_basis(i, j))
        .collect();
    Subspace::from_spanning(n, &vectors, tol)
}

/// Span of brackets `[u, v]` with `u` in `a` and `v` in `b`.
pub fn bracket_span(algebra: &LieAlgebra, a: &Subspace, b: &Subspace, tol: &Tolerance) -> Subspace {
    let n = algebra.dim();
    let mut vectors = Vec::new();
    for u in a.basis().column_iter() {
        for v in b.basis().column_iter() {
            vectors.push(algebra.bracket(&u.into_owned(), &v.into_owned()));
        }
    }
    Subspace::from_spanning(n, &vectors, tol)
}

/// Nullspace of the stacked adjoint maps `x -> [e_i, x]`.
pub fn center(algebra: &LieAlgebra, tol: &Tolerance) -> Subspace {
    let n = algebra.dim();
    let mut stacked = DMatrix::zeros(n * n, n);
    for i in 0..n {
        stacked
            .view_mut((i * n, 0), (n, n))
            .copy_from(algebra.ad(i));
    }
    Subspace::from_orthonormal(linalg::nullspace(&stacked, tol))
}
