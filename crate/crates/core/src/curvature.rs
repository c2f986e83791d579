//! Curvature tensor, Ricci operator and sectional curvature.

use nalgebra::{DMatrix, DVector};

use crate::algebra::LieAlgebra;
use crate::connection::Connection;
use crate::linalg;
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// The curvature operators `R(f_i, f_j)` in the orthonormal frame,
/// `R(x,y) = nabla_x nabla_y - nabla_y nabla_x - nabla_{[x,y]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    operators: Vec<Vec<DMatrix<f64>>>,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.operators.len()
    }

    pub fn op(&self, i: usize, j: usize) -> &DMatrix<f64> {
        &self.operators[i][j]
    }

    /// `R(x, y)` for arbitrary coordinate vectors.
    pub fn op_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = x[i] * y[j];
                if c != 0.0 {
                    m += &self.operators[i][j] * c;
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.operators
            .iter()
            .flatten()
            .map(linalg::max_abs)
            .fold(0.0, f64::max)
    }

    /// `max |R(x,y)z + R(y,z)x + R(z,x)y|` over basis triples.
    pub fn first_bianchi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.operators[i][j].column(k)
                        + self.operators[j][k].column(i)
                        + self.operators[k][i].column(j);
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }

    /// `max |<R(x,y)z,w> - <R(z,w)x,y>|` over basis tuples.
    pub fn pair_symmetry_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let a = self.operators[i][j][(l, k)];
                        let b = self.operators[k][l][(j, i)];
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        worst
    }

    /// Skewness of each operator and antisymmetry in the argument pair.
    pub fn structure_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(linalg::skew_residual(&self.operators[i][j]));
                worst = worst.max(linalg::max_abs(
                    &(&self.operators[i][j] + &self.operators[j][i]),
                ));
            }
        }
        worst
    }
}

/// Curvature operators of a connection against the frame structure
/// constants. The brackets must be the connection frame's; a torsion
/// mismatch reports `FrameMismatch`.
pub fn curvature(
    conn: &Connection,
    algebra_in_frame: &LieAlgebra,
    tol: &Tolerance,
) -> Result<CurvatureData> {
    let n = conn.dim();
    if algebra_in_frame.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: algebra_in_frame.dim(),
        });
    }
    let torsion = conn.torsion_residual(algebra_in_frame);
    let scale = conn
        .gammas()
        .iter()
        .map(linalg::max_abs)
        .fold(1.0, f64::max);
    if torsion > tol.threshold(scale) {
        return Err(Error::FrameMismatch { residual: torsion });
    }
    let mut operators = vec![vec![DMatrix::zeros(n, n); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut m = linalg::commutator(conn.gamma(i), conn.gamma(j));
            m -= conn.nabla_of(&algebra_in_frame.bracket_basis(i, j));
            operators[i][j] = m;
        }
    }
    Ok(CurvatureData { operators })
}

/// The Ricci operator `Ric(y, z) = sum_i <R(f_i, y) z, f_i>` and the scalar
/// curvature, in the orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciData {
    pub operator: DMatrix<f64>,
    pub scalar: f64,
}

pub fn ricci(curv: &CurvatureData) -> RicciData {
    let n = curv.dim();
    let mut ric = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            ric[(j, k)] = (0..n).map(|i| curv.op(i, j)[(i, k)]).sum();
        }
    }
    let scalar = ric.trace();
    RicciData {
        operator: ric,
        scalar,
    }
}

/// Sectional curvature of the plane spanned by `x`, `y` in the orthonormal
/// frame: `K(x,y) = <R(x,y)y, x> / (|x|^2 |y|^2 - <x,y>^2)`.
pub fn sectional(
    curv: &CurvatureData,
    x: &DVector<f64>,
    y: &DVector<f64>,
    tol: &Tolerance,
) -> Result<f64> {
    let gram = x.norm_squared() * y.norm_squared() - x.dot(y).powi(2);
    let scale = x.norm_squared().max(y.norm_squared()).max(1.0);
    if gram <= tol.threshold(scale * scale) {
        return Err(Error::DegeneratePlane { gram });
    }
    let num = (curv.op_of(x, y) * y).dot(x);
    Ok(num / gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MetricLieAlgebra;
    use crate::catalog;
    use crate::connection::{algebra_in_frame, levi_civita};
    use std::collections::BTreeMap;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn pipeline(name: &str, params: &[(&str, f64)]) -> (MetricLieAlgebra, CurvatureData) {
        let map: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let (mla, _) = catalog::catalog_build(name, &map).unwrap();
        let conn = levi_civita(&mla, &tol()).unwrap();
        let on = algebra_in_frame(&mla, &conn).unwrap();
        let curv = curvature(&conn, &on, &tol()).unwrap();
        (mla, curv)
    }

    #[test]
    fn r_x_e2_is_flat() {
        let (_, curv) = pipeline("R_x_e2", &[]);
        assert!(curv.max_abs() < 1e-12);
    }

    #[test]
    fn abelian_is_flat() {
        let mla = MetricLieAlgebra::with_identity_metric(crate::algebra::LieAlgebra::abelian(4));
        let conn = levi_civita(&mla, &tol()).unwrap();
        let on = algebra_in_frame(&mla, &conn).unwrap();
        let curv = curvature(&conn, &on, &tol()).unwrap();
        assert!(curv.max_abs() < 1e-15);
    }

    #[test]
    fn d42_curvature_operators() {
        let (mla, curv) = pipeline("d4.2", &[]);
        let conn = levi_civita(&mla, &tol()).unwrap();
        // R(e0,e1) = nabla_{e1}
        assert!(linalg::max_abs(&(curv.op(0, 1) - conn.gamma(1))) < 1e-15);
        // R(e2,e3) = 1/2 [[0,-1,0,0],[1,0,0,0],[0,0,0,1],[0,0,-1,0]]
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -0.5, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, -0.5, 0.0,
            ],
        );
        assert!(linalg::max_abs(&(curv.op(2, 3) - expect)) < 1e-15);
    }

    #[test]
    fn ricci_golden_values() {
        let (_, curv) = pipeline("R2_x_aff", &[]);
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, -1.0, -1.0]));
        assert!(linalg::max_abs(&(&ricci(&curv).operator - expect)) < 1e-12);

        let (_, curv) = pipeline("aff_x_aff", &[("t", 1.0), ("s", 0.5)]);
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, -1.0, -2.0, -2.0]));
        assert!(linalg::max_abs(&(&ricci(&curv).operator - expect)) < 1e-12);

        let (_, curv) = pipeline("d4half", &[]);
        let expect = DMatrix::identity(4, 4) * -1.5;
        assert!(linalg::max_abs(&(&ricci(&curv).operator - expect)) < 1e-12);
    }

    #[test]
    fn sectional_examples() {
        // aff(R): K(e, f) = -1
        let aff = crate::algebra::LieAlgebra::from_brackets(2, &[(0, 1, 1, 1.0)], &tol()).unwrap();
        let mla = MetricLieAlgebra::with_identity_metric(aff);
        let conn = levi_civita(&mla, &tol()).unwrap();
        let on = algebra_in_frame(&mla, &conn).unwrap();
        let curv = curvature(&conn, &on, &tol()).unwrap();
        let k = sectional(
            &curv,
            &DVector::from_vec(vec![1.0, 0.0]),
            &DVector::from_vec(vec![0.0, 1.0]),
            &tol(),
        )
        .unwrap();
        assert!((k + 1.0).abs() < 1e-12);

        // aff x aff at (t, s) = (1, 1/2): K(e2, f2) = -2
        let (_, curv) = pipeline("aff_x_aff", &[("t", 1.0), ("s", 0.5)]);
        let k = sectional(
            &curv,
            &DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]),
            &DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]),
            &tol(),
        )
        .unwrap();
        assert!((k + 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let (_, curv) = pipeline("d4.2", &[]);
        let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let y = &x * 2.0;
        assert!(matches!(
            sectional(&curv, &x, &y, &tol()),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn frame_mismatch_is_detected() {
        let (mla, _) = pipeline("d4.2", &[]);
        let conn = levi_civita(&mla, &tol()).unwrap();
        let wrong = crate::algebra::LieAlgebra::abelian(4);
        assert!(matches!(
            curvature(&conn, &wrong, &tol()),
            Err(Error::FrameMismatch { .. })
        ));
    }

    #[test]
    fn scalar_curvature_is_frame_independent() {
        use crate::algebra::{change_basis, Frame};
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for name in ["aff_x_aff", "d4.2", "r4p_lambda_0"] {
            let (mla, _) = catalog::catalog_build(name, &BTreeMap::new()).unwrap();
            let n = mla.dim();
            let conn = levi_civita(&mla, &tol()).unwrap();
            let on = algebra_in_frame(&mla, &conn).unwrap();
            let scalar = ricci(&curvature(&conn, &on, &tol()).unwrap()).scalar;

            // re-present the same metric Lie algebra in a random orthogonal basis
            let raw = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
            let q = raw.qr().q();
            let frame = Frame::new(q.clone(), &tol()).unwrap();
            let moved_algebra = change_basis(&mla.algebra, &frame).unwrap();
            let moved_gram = q.transpose() * mla.gram() * &q;
            let moved = MetricLieAlgebra::new(moved_algebra, moved_gram, &tol()).unwrap();
            let conn = levi_civita(&moved, &tol()).unwrap();
            let on = algebra_in_frame(&moved, &conn).unwrap();
            let moved_scalar = ricci(&curvature(&conn, &on, &tol()).unwrap()).scalar;
            assert!((scalar - moved_scalar).abs() < 1e-9, "{name}");
        }
    }

    #[test]
    fn ricci_and_sectional_scale_inversely_with_the_metric() {
        for name in ["R2_x_aff", "aff_x_aff", "d4half"] {
            let (mla, _) = catalog::catalog_build(name, &BTreeMap::new()).unwrap();
            let base_conn = levi_civita(&mla, &tol()).unwrap();
            let base_on = algebra_in_frame(&mla, &base_conn).unwrap();
            let base_curv = curvature(&base_conn, &base_on, &tol()).unwrap();
            let base_ric = ricci(&base_curv);
            let x = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
            let y = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
            let base_k = sectional(&base_curv, &x, &y, &tol()).unwrap();
            for t in [0.25, 4.0] {
                let scaled = mla.scale_metric(t);
                let conn = levi_civita(&scaled, &tol()).unwrap();
                let on = algebra_in_frame(&scaled, &conn).unwrap();
                let curv = curvature(&conn, &on, &tol()).unwrap();
                let ric = ricci(&curv);
                let diff = linalg::max_abs(&(&ric.operator - &base_ric.operator / t));
                assert!(diff < 1e-12, "{name} t={t}: Ricci scaling {diff:.3e}");
                let k = sectional(&curv, &x, &y, &tol()).unwrap();
                assert!((k - base_k / t).abs() < 1e-12, "{name} t={t}: K scaling");
            }
        }
    }

    #[test]
    fn curvature_identities_hold() {
        for (name, params) in [
            ("d4.2", vec![]),
            ("d4p_lambda", vec![("lambda", 1.0)]),
            ("aff_x_aff", vec![("t", 4.0), ("s", 0.5)]),
        ] {
            let (_, curv) = pipeline(name, &params);
            assert!(curv.structure_residual() < 1e-12, "{name}");
            assert!(curv.first_bianchi_residual() < 1e-12, "{name}");
            assert!(curv.pair_symmetry_residual() < 1e-12, "{name}");
        }
    }
}
