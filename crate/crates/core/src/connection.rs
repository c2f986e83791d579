//! Levi-Civita connection of a metric Lie algebra.
//!
//! The connection is produced by the Koszul formula
//! `2<nabla_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>` and is stored as
//! one operator matrix per orthonormal-frame direction.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{change_basis, orthonormal_frame, Frame, LieAlgebra, MetricLieAlgebra};
use crate::linalg;
use crate::parallel::SkewEndomorphism;
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// The Levi-Civita operators `nabla_{f_i}` in an orthonormal frame.
///
/// `gammas[i]` has entry `(k, j)` equal to `<nabla_{f_i} f_j, f_k>`; the
/// operators act on coordinate columns. Each `gammas[i]` is skew-symmetric
/// and the family is torsion-free against the frame structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    frame: Frame,
    gammas: Vec<DMatrix<f64>>,
}

impl Connection {
    pub fn dim(&self) -> usize {
        self.gammas.len()
    }

    /// The orthonormal frame the operators are expressed in.
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn gammas(&self) -> &[DMatrix<f64>] {
        &self.gammas
    }

    pub fn gamma(&self, i: usize) -> &DMatrix<f64> {
        &self.gammas[i]
    }

    /// Operator of `nabla_x` for `x` in frame coordinates.
    pub fn nabla_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            m += &self.gammas[i] * *xi;
        }
        m
    }

    /// Operator of `nabla_x` for `x` given in the input basis, expressed in
    /// input-basis coordinates (conjugation through the frame).
    pub fn nabla_in_input_basis(&self, x_input: &DVector<f64>) -> DMatrix<f64> {
        let p = self.frame.matrix();
        let p_inv = self.frame.inverse();
        let x_frame = &p_inv * x_input;
        p * self.nabla_of(&x_frame) * p_inv
    }

    /// `max |gamma_i + gamma_i^T|` over all operators.
    pub fn skew_residual(&self) -> f64 {
        self.gammas
            .iter()
            .map(linalg::skew_residual)
            .fold(0.0, f64::max)
    }

    /// `max |gamma_i e_j - gamma_j e_i - [f_i, f_j]|` against frame
    /// structure constants; zero for a torsion-free connection.
    pub fn torsion_residual(&self, algebra_in_frame: &LieAlgebra) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for (i, j) in linalg::index_pairs(n) {
            let r = self.gammas[i].column(j)
                - self.gammas[j].column(i)
                - algebra_in_frame.bracket_basis(i, j);
            worst = worst.max(r.amax());
        }
        worst
    }
}

/// Compute the Levi-Civita connection in the orthonormal frame of `mla`.
pub fn levi_civita(mla: &MetricLieAlgebra, tol: &Tolerance) -> Result<Connection> {
    let frame = orthonormal_frame(mla, tol)?;
    let on = change_basis(&mla.algebra, &frame)?;
    let n = on.dim();
    let mut gammas = vec![DMatrix::zeros(n, n); n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gammas[i][(k, j)] = 0.5 * (on.c(i, j, k) - on.c(j, k, i) + on.c(k, i, j));
            }
        }
    }
    Ok(Connection { frame, gammas })
}

/// Structure constants of `mla.algebra` in the connection's frame.
pub fn algebra_in_frame(mla: &MetricLieAlgebra, conn: &Connection) -> Result<LieAlgebra> {
    change_basis(&mla.algebra, conn.frame())
}

/// The linear forms of a two-rotation-block connection in dimension 4.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForms {
    /// `alpha(x) = <nabla_x e1, f1>` per frame direction.
    pub alpha: DVector<f64>,
    /// `beta(x) = <nabla_x e2, f2>` per frame direction.
    pub beta: DVector<f64>,
}

/// Read off the linear forms `alpha`, `beta` of a connection whose frame is
/// adapted to a parallel tensor `h` with two distinct rotation speeds.
///
/// Requires dimension 4, `h` in the block form `rot(a1) (+) rot(a2)` with
/// `|a1| != |a2|`, and every operator commuting with `h`. Each operator is
/// then checked to have the same two-block shape; the entry `(f1, e1)` of
/// `gamma_i` is `alpha(f_i)` and `(f2, e2)` is `beta(f_i)`.
pub fn connection_form_decomposition(
    conn: &Connection,
    h: &SkewEndomorphism,
    tol: &Tolerance,
) -> Result<ConnectionForms> {
    let n = conn.dim();
    if n != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: n,
        });
    }
    let hm = h.matrix();
    let scale = linalg::max_abs(hm).max(1.0);
    let block_res = two_block_residual(hm);
    if block_res > tol.threshold(scale) {
        return Err(Error::NotBlockForm {
            subject: "adapted tensor".to_string(),
            residual: block_res,
        });
    }
    let (a1, a2) = (hm[(1, 0)], hm[(3, 2)]);
    if (a1.abs() - a2.abs()).abs() <= tol.threshold(scale) {
        return Err(Error::NotBlockForm {
            subject: "adapted tensor (equal rotation speeds)".to_string(),
            residual: (a1.abs() - a2.abs()).abs(),
        });
    }
    for g in conn.gammas() {
        let c = linalg::max_abs(&linalg::commutator(g, hm));
        if c > tol.threshold(scale * linalg::max_abs(g).max(1.0)) {
            return Err(Error::NotParallel { residual: c });
        }
        let r = two_block_residual(g);
        if r > tol.threshold(linalg::max_abs(g).max(1.0)) {
            return Err(Error::NotBlockForm {
                subject: "connection operator".to_string(),
                residual: r,
            });
        }
    }
    let alpha = DVector::from_fn(4, |i, _| conn.gamma(i)[(1, 0)]);
    let beta = DVector::from_fn(4, |i, _| conn.gamma(i)[(3, 2)]);
    Ok(ConnectionForms { alpha, beta })
}

/// Largest entry outside the two rotation blocks (and off the skew pattern
/// within them) of a 4 x 4 matrix.
fn two_block_residual(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let in_block = (i < 2 && j < 2) || (i >= 2 && j >= 2);
            if !in_block || i == j {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst = worst.max((m[(0, 1)] + m[(1, 0)]).abs());
    worst = worst.max((m[(2, 3)] + m[(3, 2)]).abs());
    worst
}

/// Brackets on the orthonormal basis `{e1, f1, e2, f2}` reconstructed from
/// the connection forms through torsion-freeness. The output is always
/// built; it is a Lie algebra only when the Jacobi relations hold.
pub fn bracket_structure_from_forms(
    alpha: &DVector<f64>,
    beta: &DVector<f64>,
) -> Vec<Vec<Vec<f64>>> {
    let (a, b) = (alpha, beta);
    let mut c = vec![vec![vec![0.0; 4]; 4]; 4];
    let mut set = |i: usize, j: usize, k: usize, v: f64| {
        c[i][j][k] += v;
        c[j][i][k] -= v;
    };
    // [e1,f1] = -a(e1) e1 - a(f1) f1
    set(0, 1, 0, -a[0]);
    set(0, 1, 1, -a[1]);
    // [e1,e2] = b(e1) f2 - a(e2) f1
    set(0, 2, 3, b[0]);
    set(0, 2, 1, -a[2]);
    // [e1,f2] = -b(e1) e2 - a(f2) f1
    set(0, 3, 2, -b[0]);
    set(0, 3, 1, -a[3]);
    // [f1,e2] = b(f1) f2 + a(e2) e1
    set(1, 2, 3, b[1]);
    set(1, 2, 0, a[2]);
    // [f1,f2] = -b(f1) e2 + a(f2) e1
    set(1, 3, 2, -b[1]);
    set(1, 3, 0, a[3]);
    // [e2,f2] = -b(e2) e2 - b(f2) f2
    set(2, 3, 2, -b[2]);
    set(2, 3, 3, -b[3]);
    c
}

/// The ten quadratic relations the Jacobi identity imposes on the forms,
/// in their order of appearance. All vanish exactly when the reconstructed
/// brackets define a Lie algebra.
pub fn jacobi_relations(alpha: &DVector<f64>, beta: &DVector<f64>) -> [f64; 10] {
    let (a, b) = (alpha, beta);
    [
        a[0] * b[0] + a[1] * b[1],
        a[0] * a[2] + a[3] * b[1],
        -a[2] * a[1] + a[3] * b[0],
        a[0] * a[3] - a[2] * b[1],
        a[1] * a[3] + a[2] * b[0],
        b[2] * a[2] + b[3] * a[3],
        b[2] * b[0] + b[1] * a[3],
        -b[0] * b[3] + b[1] * a[2],
        b[2] * b[1] - b[0] * a[3],
        b[3] * b[1] + b[0] * a[2],
    ]
}

/// The same relations packaged as matrix equations: `det U`, `det V` and
/// the entries of the products `A B` and `C D`.
#[derive(Debug, Clone)]
pub struct RelationMatrices {
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl RelationMatrices {
    pub fn new(alpha: &DVector<f64>, beta: &DVector<f64>) -> Self {
        let (al, be) = (alpha, beta);
        RelationMatrices {
            u: DMatrix::from_row_slice(2, 2, &[al[0], -be[1], al[1], be[0]]),
            v: DMatrix::from_row_slice(2, 2, &[be[2], -al[3], be[3], al[2]]),
            a: DMatrix::from_row_slice(2, 2, &[al[2], al[3], al[3], -al[2]]),
            b: DMatrix::from_row_slice(2, 2, &[al[0], be[0], be[1], al[1]]),
            c: DMatrix::from_row_slice(2, 2, &[be[0], be[1], be[1], -be[0]]),
            d: DMatrix::from_row_slice(2, 2, &[be[2], al[2], al[3], be[3]]),
        }
    }

    /// `max(|det U|, |det V|, |A B|, |C D|)`; zero exactly when all ten
    /// relations vanish.
    pub fn residual(&self) -> f64 {
        self.u
            .determinant()
            .abs()
            .max(self.v.determinant().abs())
            .max(linalg::max_abs(&(&self.a * &self.b)))
            .max(linalg::max_abs(&(&self.c * &self.d)))
    }
}

/// Build the metric Lie algebra determined by nonzero connection forms, or
/// report which Jacobi relations fail (1-based indices into the relation
/// list).
pub fn build_from_connection_forms(
    alpha: &DVector<f64>,
    beta: &DVector<f64>,
    tol: &Tolerance,
) -> Result<MetricLieAlgebra> {
    assert_eq!(alpha.len(), 4);
    assert_eq!(beta.len(), 4);
    let scale = alpha.amax().max(beta.amax());
    if scale <= tol.abs {
        return Err(Error::ZeroConnectionForms);
    }
    let relations = jacobi_relations(alpha, beta);
    let thresh = tol.threshold(scale * scale);
    let violated: Vec<usize> = (0..10).filter(|&i| relations[i].abs() > thresh).collect();
    if !violated.is_empty() {
        return Err(Error::JacobiRelationsViolated {
            values: violated.iter().map(|&i| relations[i]).collect(),
            indices: violated.into_iter().map(|i| i + 1).collect(),
        });
    }
    let structure = bracket_structure_from_forms(alpha, beta);
    let algebra = crate::algebra::validate_lie_algebra(&structure, tol)
        .expect("vanishing relations imply the Jacobi identity");
    Ok(MetricLieAlgebra::with_identity_metric(algebra))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::collections::BTreeMap;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn build(name: &str) -> MetricLieAlgebra {
        catalog::catalog_build(name, &BTreeMap::new()).unwrap().0
    }

    fn covector(vals: [f64; 4]) -> DVector<f64> {
        DVector::from_row_slice(&vals)
    }

    #[test]
    fn abelian_connection_vanishes() {
        let mla = MetricLieAlgebra::with_identity_metric(LieAlgebra::abelian(4));
        let conn = levi_civita(&mla, &tol()).unwrap();
        for g in conn.gammas() {
            assert!(g.amax() < 1e-15);
        }
    }

    #[test]
    fn aff_connection() {
        // [e,f] = f with the identity metric: nabla_e = 0,
        // nabla_f e = -f, nabla_f f = e
        let aff = LieAlgebra::from_brackets(2, &[(0, 1, 1, 1.0)], &tol()).unwrap();
        let mla = MetricLieAlgebra::with_identity_metric(aff);
        let conn = levi_civita(&mla, &tol()).unwrap();
        assert!(conn.gamma(0).amax() < 1e-15);
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(linalg::max_abs(&(conn.gamma(1) - expect)) < 1e-15);
    }

    #[test]
    fn connection_is_metric_and_torsion_free() {
        for name in ["R_x_e2", "R2_x_aff", "aff_x_aff", "d4.2", "d4p_lambda"] {
            let mla = build(name);
            let conn = levi_civita(&mla, &tol()).unwrap();
            let on = algebra_in_frame(&mla, &conn).unwrap();
            assert!(conn.skew_residual() < 1e-12, "{name}");
            assert!(conn.torsion_residual(&on) < 1e-12, "{name}");
        }
    }

    #[test]
    fn gammas_scale_inversely_with_the_metric_root() {
        for name in ["R2_x_aff", "aff_x_aff", "d4.2"] {
            let mla = build(name);
            let base = levi_civita(&mla, &tol()).unwrap();
            for t in [0.25, 1.0, 4.0] {
                let scaled = levi_civita(&mla.scale_metric(t), &tol()).unwrap();
                for i in 0..mla.dim() {
                    let expect = base.gamma(i) / t.sqrt();
                    let diff = linalg::max_abs(&(scaled.gamma(i) - expect));
                    assert!(diff < 1e-12, "{name} t={t}: {diff:.3e}");
                }
            }
        }
    }

    #[test]
    fn form_decomposition_r2_x_aff() {
        let mla = build("R2_x_aff");
        let conn = levi_civita(&mla, &tol()).unwrap();
        let h = SkewEndomorphism::two_block(1.0, 2.0);
        let forms = connection_form_decomposition(&conn, &h, &tol()).unwrap();
        assert!(forms.alpha.amax() < 1e-12);
        let expect_beta = covector([0.0, 0.0, 0.0, -1.0]);
        assert!((forms.beta - expect_beta).amax() < 1e-12);
    }

    #[test]
    fn form_decomposition_r4p() {
        let mut params = BTreeMap::new();
        params.insert("lambda".to_string(), 2.0);
        let (mla, _) = catalog::catalog_build("r4p_lambda_0", &params).unwrap();
        let conn = levi_civita(&mla, &tol()).unwrap();
        let h = SkewEndomorphism::two_block(1.0, 2.0);
        let forms = connection_form_decomposition(&conn, &h, &tol()).unwrap();
        assert!((&forms.alpha - covector([0.0, -2.0, 0.0, 0.0])).amax() < 1e-12);
        assert!((&forms.beta - covector([-1.0, 0.0, 0.0, 0.0])).amax() < 1e-12);
        // feeding the forms back reproduces the catalog brackets
        let rebuilt = build_from_connection_forms(&forms.alpha, &forms.beta, &tol()).unwrap();
        for i in 0..4 {
            assert!(linalg::max_abs(&(rebuilt.algebra.ad(i) - mla.algebra.ad(i))) < 1e-12);
        }
    }

    #[test]
    fn form_decomposition_abelian() {
        let mla = MetricLieAlgebra::with_identity_metric(LieAlgebra::abelian(4));
        let conn = levi_civita(&mla, &tol()).unwrap();
        let h = SkewEndomorphism::two_block(1.0, 3.0);
        let forms = connection_form_decomposition(&conn, &h, &tol()).unwrap();
        assert!(forms.alpha.amax() < 1e-15 && forms.beta.amax() < 1e-15);
    }

    #[test]
    fn build_from_forms_examples() {
        // alpha = 0, beta = e^1: an R x e(2) presentation
        let mla = build_from_connection_forms(
            &covector([0.0; 4]),
            &covector([1.0, 0.0, 0.0, 0.0]),
            &tol(),
        )
        .unwrap();
        assert!((mla.algebra.c(0, 2, 3) - 1.0).abs() < 1e-15); // [e1,e2] = f2
        assert!((mla.algebra.c(0, 3, 2) + 1.0).abs() < 1e-15); // [e1,f2] = -e2

        // alpha = e^1, beta = e^2: an aff x aff presentation
        let mla = build_from_connection_forms(
            &covector([1.0, 0.0, 0.0, 0.0]),
            &covector([0.0, 0.0, 1.0, 0.0]),
            &tol(),
        )
        .unwrap();
        assert!((mla.algebra.c(0, 1, 0) + 1.0).abs() < 1e-15); // [e1,f1] = -e1
        assert!((mla.algebra.c(2, 3, 2) + 1.0).abs() < 1e-15); // [e2,f2] = -e2

        // alpha = e^2, beta = e^1: relations 5 and 10 fail with value 1
        let err = build_from_connection_forms(
            &covector([0.0, 0.0, 1.0, 0.0]),
            &covector([1.0, 0.0, 0.0, 0.0]),
            &tol(),
        )
        .unwrap_err();
        match err {
            Error::JacobiRelationsViolated { indices, values } => {
                assert_eq!(indices, vec![5, 10]);
                assert!(values.iter().all(|v| (v - 1.0).abs() < 1e-15));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn zero_forms_are_rejected() {
        let err = build_from_connection_forms(&covector([0.0; 4]), &covector([0.0; 4]), &tol())
            .unwrap_err();
        assert!(matches!(err, Error::ZeroConnectionForms));
    }

    #[test]
    fn matrix_route_matches_relations() {
        let alpha = covector([0.3, -1.2, 0.7, 0.1]);
        let beta = covector([-0.4, 0.9, 2.0, -0.8]);
        let rels = jacobi_relations(&alpha, &beta);
        let mats = RelationMatrices::new(&alpha, &beta);
        let worst = rels.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
        assert!((mats.residual() - worst).abs() < 1e-12);
        // det U is relation 1, det V relation 6
        assert!((mats.u.determinant() - rels[0]).abs() < 1e-15);
        assert!((mats.v.determinant() - rels[5]).abs() < 1e-15);
    }
}
