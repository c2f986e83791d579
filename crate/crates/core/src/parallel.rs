//! Parallel skew-symmetric endomorphisms and equivalence fingerprints.
//!
//! A skew-symmetric endomorphism is parallel exactly when it commutes with
//! every connection operator; the solution space is the nullspace of the
//! stacked commutation map restricted to the skew matrices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{bracket_span, center, derived_subalgebra, MetricLieAlgebra, Subspace};
use crate::connection::{algebra_in_frame, levi_civita, Connection};
use crate::curvature::{curvature, ricci};
use crate::linalg;
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// A skew-symmetric matrix in the orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewEndomorphism {
    matrix: DMatrix<f64>,
}

impl SkewEndomorphism {
    pub fn new(matrix: DMatrix<f64>, tol: &Tolerance) -> Result<Self> {
        let residual = linalg::skew_residual(&matrix);
        if residual > tol.threshold(linalg::max_abs(&matrix).max(1.0)) {
            return Err(Error::NotSkew { residual });
        }
        Ok(SkewEndomorphism { matrix })
    }

    /// `rot(a1) (+) rot(a2)` on paired coordinates of a 4-dimensional space:
    /// `e1 -> a1 f1`, `f1 -> -a1 e1`, `e2 -> a2 f2`, `f2 -> -a2 e2`.
    pub fn two_block(a1: f64, a2: f64) -> Self {
        let mut m = DMatrix::zeros(4, 4);
        m[(1, 0)] = a1;
        m[(0, 1)] = -a1;
        m[(3, 2)] = a2;
        m[(2, 3)] = -a2;
        SkewEndomorphism { matrix: m }
    }

    /// The rotation generator of the plane `(i, j)`.
    pub fn plane_rotation(n: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(j, i)] = 1.0;
        m[(i, j)] = -1.0;
        SkewEndomorphism { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest commutation residual against the connection operators.
    pub fn parallel_residual(&self, conn: &Connection) -> f64 {
        conn.gammas()
            .iter()
            .map(|g| linalg::max_abs(&linalg::commutator(g, &self.matrix)))
            .fold(0.0, f64::max)
    }
}

/// Frobenius-orthonormal basis of the space of parallel skew-symmetric
/// endomorphisms of a connection.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelBasis {
    pub elements: Vec<SkewEndomorphism>,
}

impl ParallelBasis {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn matrices(&self) -> Vec<DMatrix<f64>> {
        self.elements.iter().map(|e| e.matrix().clone()).collect()
    }

    /// Residual of the orthogonal projection of `m` onto the basis span.
    pub fn projection_residual(&self, m: &DMatrix<f64>) -> f64 {
        linalg::projection_residual(m, &self.matrices())
    }

    pub fn contains(&self, h: &SkewEndomorphism, tol: &Tolerance) -> bool {
        self.projection_residual(h.matrix())
            <= tol.threshold(linalg::frob_norm(h.matrix()).max(1.0))
    }
}

/// Solve `[gamma_i, H] = 0` over the skew matrices.
///
/// The stacked commutation map is evaluated on the Frobenius-orthonormal
/// skew basis and its nullspace is extracted by SVD; the returned elements
/// are Frobenius-orthonormal with a deterministic sign convention.
pub fn parallel_space(conn: &Connection, tol: &Tolerance) -> ParallelBasis {
    let n = conn.dim();
    let skew = linalg::skew_basis(n);
    let mut stacked = DMatrix::zeros(n * n * n, skew.len());
    for (col, e) in skew.iter().enumerate() {
        for (i, g) in conn.gammas().iter().enumerate() {
            let c = linalg::commutator(g, e);
            for (r, v) in c.iter().enumerate() {
                stacked[(i * n * n + r, col)] = *v;
            }
        }
    }
    let kernel = linalg::nullspace(&stacked, tol);
    let elements = kernel
        .column_iter()
        .map(|coef| SkewEndomorphism {
            matrix: linalg::from_coords(&coef.into_owned(), &skew),
        })
        .collect();
    ParallelBasis { elements }
}

/// Eigenstructure of a skew endomorphism: rotation planes with speeds
/// `a_i >= 0` plus the kernel.
#[derive(Debug, Clone)]
pub struct SpectralClass {
    /// `(a_i, plane)` pairs with `a_i > 0`, ascending in `a_i`.
    pub rotation_pairs: Vec<(f64, Subspace)>,
    pub kernel: Subspace,
    /// All rotation speeds equal and trivial kernel, so `H^2 = -a^2 I`.
    pub is_complex_multiple: bool,
    /// A complex multiple with `a = 1`, so `H^2 = -I`.
    pub is_complex_structure: bool,
}

/// Classify a skew endomorphism by the spectrum of `-H^2`.
pub fn classify_element(h: &SkewEndomorphism, tol: &Tolerance) -> SpectralClass {
    let n = h.dim();
    let hm = h.matrix();
    let s = -(hm * hm); // symmetric positive semidefinite
    let eig = s.clone().symmetric_eigen();
    let lam_max = eig.eigenvalues.amax().max(0.0);
    let thresh = tol.threshold(lam_max.max(1.0));

    // kernel of H = zero-eigenspace of -H^2
    let mut kernel_cols = Vec::new();
    let mut active: Vec<(f64, DVector<f64>)> = Vec::new();
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i).into_owned();
        if lam.abs() <= thresh {
            kernel_cols.push(v);
        } else {
            active.push((lam.max(0.0).sqrt(), v));
        }
    }
    let kernel = Subspace::from_spanning(n, &kernel_cols, tol);

    // group by rotation speed, then split each eigenspace into H-invariant planes
    active.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut rotation_pairs: Vec<(f64, Subspace)> = Vec::new();
    let mut i = 0;
    while i < active.len() {
        let a = active[i].0;
        let mut group = vec![active[i].1.clone()];
        let mut j = i + 1;
        while j < active.len() && (active[j].0 - a).abs() <= tol.threshold(a.max(1.0)) {
            group.push(active[j].1.clone());
            j += 1;
        }
        i = j;
        // pair up: v with H v / a spans an invariant plane
        let mut remaining = Subspace::from_spanning(n, &group, tol);
        while remaining.dim() >= 2 {
            let v = remaining.basis().column(0).into_owned();
            let w = (hm * &v) / a;
            let plane = Subspace::from_spanning(n, &[v, w], tol);
            rotation_pairs.push((a, plane.clone()));
            // deflate
            let rest: Vec<DVector<f64>> = remaining
                .basis()
                .column_iter()
                .map(|c| {
                    let c = c.into_owned();
                    &c - plane.projector() * &c
                })
                .collect();
            remaining = Subspace::from_spanning(n, &rest, tol);
        }
    }

    let is_complex_multiple = kernel.dim() == 0
        && !rotation_pairs.is_empty()
        && rotation_pairs
            .iter()
            .all(|(a, _)| (a - rotation_pairs[0].0).abs() <= tol.threshold(rotation_pairs[0].0));
    let is_complex_structure =
        is_complex_multiple && (rotation_pairs[0].0 - 1.0).abs() <= tol.threshold(1.0);
    SpectralClass {
        rotation_pairs,
        kernel,
        is_complex_multiple,
        is_complex_structure,
    }
}

/// Search the span of a parallel basis for an element that is not a
/// multiple of a complex structure.
///
/// Finite deterministic search first (single elements, then pairwise
/// combinations with coefficients 1, -1, 2), then eight seeded random
/// combinations as a generic fallback. Returns the first witness found.
pub fn contains_non_complex_multiple(
    basis: &ParallelBasis,
    tol: &Tolerance,
    seed: u64,
) -> Option<SkewEndomorphism> {
    let is_witness = |m: &DMatrix<f64>| -> bool {
        if linalg::frob_norm(m) <= tol.threshold(1.0) {
            return false;
        }
        let h = SkewEndomorphism { matrix: m.clone() };
        !classify_element(&h, tol).is_complex_multiple
    };
    for e in &basis.elements {
        if is_witness(e.matrix()) {
            return Some(e.clone());
        }
    }
    const COEFFS: [f64; 3] = [1.0, -1.0, 2.0];
    for i in 0..basis.elements.len() {
        for j in (i + 1)..basis.elements.len() {
            for ci in COEFFS {
                for cj in COEFFS {
                    let m = basis.elements[i].matrix() * ci + basis.elements[j].matrix() * cj;
                    if is_witness(&m) {
                        return Some(SkewEndomorphism { matrix: m });
                    }
                }
            }
        }
    }
    if basis.elements.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = basis.elements[0].dim();
    for _ in 0..8 {
        let mut m = DMatrix::zeros(n, n);
        for e in &basis.elements {
            m += e.matrix() * (rng.random::<f64>() * 2.0 - 1.0);
        }
        if is_witness(&m) {
            return Some(SkewEndomorphism { matrix: m });
        }
    }
    None
}

/// Characteristic polynomial of the restriction of a tensor to an invariant
/// subspace, or the record that the subspace is not preserved.
#[derive(Debug, Clone, PartialEq)]
pub enum RestrictionCharPoly {
    Poly(Vec<f64>),
    NotPreserved,
}

impl RestrictionCharPoly {
    fn of(h: &DMatrix<f64>, w: &Subspace, tol: &Tolerance) -> Self {
        let q = w.basis();
        let image = h * q;
        let escape = linalg::max_abs(&(&image - w.projector() * &image));
        if escape > tol.threshold(linalg::max_abs(h).max(1.0)) {
            return RestrictionCharPoly::NotPreserved;
        }
        RestrictionCharPoly::Poly(linalg::charpoly(&(q.transpose() * image)))
    }

    fn close_to(&self, other: &Self, tol: &Tolerance) -> bool {
        match (self, other) {
            (RestrictionCharPoly::Poly(p), RestrictionCharPoly::Poly(q)) => {
                linalg::poly_close(p, q, tol)
            }
            (RestrictionCharPoly::NotPreserved, RestrictionCharPoly::NotPreserved) => true,
            _ => false,
        }
    }
}

/// Dimension data carried by a fingerprint: the algebra, its derived
/// algebra, center, second derived algebra and the parallel space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FingerprintDims {
    pub dim: usize,
    pub derived: usize,
    pub center: usize,
    pub second_derived: usize,
    pub parallel: usize,
}

/// Invariants of a pair (metric Lie algebra, parallel tensor) preserved by
/// every isometric isomorphism: characteristic polynomials of the Ricci
/// operator, of the tensor and of its restrictions to the derived algebra
/// and the center, the Killing form polynomial in an orthonormal frame,
/// and a dimension tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    pub ric_charpoly: Vec<f64>,
    pub h_charpoly: Vec<f64>,
    pub h_on_derived_charpoly: RestrictionCharPoly,
    pub h_on_center_charpoly: RestrictionCharPoly,
    pub killing_charpoly: Vec<f64>,
    pub dims: FingerprintDims,
}

/// Compute the fingerprint of `(mla, h)`; `h` must be parallel.
pub fn fingerprint(
    mla: &MetricLieAlgebra,
    h: &SkewEndomorphism,
    tol: &Tolerance,
) -> Result<Fingerprint> {
    let conn = levi_civita(mla, tol)?;
    let residual = h.parallel_residual(&conn);
    if residual > tol.threshold(linalg::max_abs(h.matrix()).max(1.0)) {
        return Err(Error::NotParallel { residual });
    }
    let on = algebra_in_frame(mla, &conn)?;
    let curv = curvature(&conn, &on, tol)?;
    let ric = ricci(&curv);

    let derived = derived_subalgebra(&on, tol);
    let zeta = center(&on, tol);
    let second = bracket_span(&on, &derived, &derived, tol);
    let parallel = parallel_space(&conn, tol);

    let n = on.dim();
    let mut killing = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            killing[(i, j)] = (on.ad(i) * on.ad(j)).trace();
        }
    }

    Ok(Fingerprint {
        ric_charpoly: linalg::charpoly(&ric.operator),
        h_charpoly: linalg::charpoly(h.matrix()),
        h_on_derived_charpoly: RestrictionCharPoly::of(h.matrix(), &derived, tol),
        h_on_center_charpoly: RestrictionCharPoly::of(h.matrix(), &zeta, tol),
        killing_charpoly: linalg::charpoly(&killing),
        dims: FingerprintDims {
            dim: n,
            derived: derived.dim(),
            center: zeta.dim(),
            second_derived: second.dim(),
            parallel: parallel.dim(),
        },
    })
}

/// Which fingerprint field separated two pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistinctionReason {
    Dims,
    RicciCharPoly,
    KillingCharPoly,
    TensorCharPoly,
    DerivedRestriction,
    CenterRestriction,
}

/// Outcome of the fingerprint comparison. `Distinct` is sound (equivalence
/// forces fingerprint equality); the comparison never claims equivalence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distinction {
    Distinct(DistinctionReason),
    Inconclusive,
}

/// Compare two pairs by fingerprint.
pub fn distinguish(
    a: (&MetricLieAlgebra, &SkewEndomorphism),
    b: (&MetricLieAlgebra, &SkewEndomorphism),
    tol: &Tolerance,
) -> Result<Distinction> {
    let fa = fingerprint(a.0, a.1, tol)?;
    let fb = fingerprint(b.0, b.1, tol)?;
    Ok(compare_fingerprints(&fa, &fb, tol))
}

/// Fingerprint comparison without recomputation.
pub fn compare_fingerprints(fa: &Fingerprint, fb: &Fingerprint, tol: &Tolerance) -> Distinction {
    if fa.dims != fb.dims {
        return Distinction::Distinct(DistinctionReason::Dims);
    }
    if !linalg::poly_close(&fa.ric_charpoly, &fb.ric_charpoly, tol) {
        return Distinction::Distinct(DistinctionReason::RicciCharPoly);
    }
    if !linalg::poly_close(&fa.killing_charpoly, &fb.killing_charpoly, tol) {
        return Distinction::Distinct(DistinctionReason::KillingCharPoly);
    }
    if !linalg::poly_close(&fa.h_charpoly, &fb.h_charpoly, tol) {
        return Distinction::Distinct(DistinctionReason::TensorCharPoly);
    }
    if !fa
        .h_on_derived_charpoly
        .close_to(&fb.h_on_derived_charpoly, tol)
    {
        return Distinction::Distinct(DistinctionReason::DerivedRestriction);
    }
    if !fa
        .h_on_center_charpoly
        .close_to(&fb.h_on_center_charpoly, tol)
    {
        return Distinction::Distinct(DistinctionReason::CenterRestriction);
    }
    Distinction::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LieAlgebra;
    use crate::catalog;
    use std::collections::BTreeMap;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn build(name: &str) -> (MetricLieAlgebra, Vec<SkewEndomorphism>) {
        catalog::catalog_build(name, &BTreeMap::new()).unwrap()
    }

    fn connection_of(mla: &MetricLieAlgebra) -> Connection {
        levi_civita(mla, &tol()).unwrap()
    }

    #[test]
    fn parallel_space_dimensions() {
        let (r2aff, _) = build("R2_x_aff");
        let basis = parallel_space(&connection_of(&r2aff), &tol());
        assert_eq!(basis.dim(), 2);
        for (i, j) in [(0, 1), (2, 3)] {
            let rot = SkewEndomorphism::plane_rotation(4, i, j);
            assert!(basis.contains(&rot, &tol()));
        }

        let ab = MetricLieAlgebra::with_identity_metric(LieAlgebra::abelian(4));
        assert_eq!(parallel_space(&connection_of(&ab), &tol()).dim(), 6);

        let (d42, designated) = build("d4.2");
        let basis = parallel_space(&connection_of(&d42), &tol());
        assert_eq!(basis.dim(), 1);
        assert!(basis.contains(&designated[0], &tol()));
    }

    #[test]
    fn parallel_elements_commute_with_curvature() {
        let (mla, _) = build("aff_x_aff");
        let conn = connection_of(&mla);
        let on = algebra_in_frame(&mla, &conn).unwrap();
        let curv = curvature(&conn, &on, &tol()).unwrap();
        let basis = parallel_space(&conn, &tol());
        for h in &basis.elements {
            for (i, j) in linalg::index_pairs(4) {
                let r = linalg::commutator(curv.op(i, j), h.matrix());
                assert!(linalg::max_abs(&r) < 1e-8);
            }
        }
    }

    #[test]
    fn parallel_space_closed_under_commutator() {
        for name in ["R_x_e2", "aff_x_aff", "d4half"] {
            let (mla, _) = build(name);
            let conn = connection_of(&mla);
            let basis = parallel_space(&conn, &tol());
            for a in &basis.elements {
                for b in &basis.elements {
                    let c = linalg::commutator(a.matrix(), b.matrix());
                    let h = SkewEndomorphism { matrix: c };
                    assert!(h.parallel_residual(&conn) < 1e-9, "{name}");
                }
            }
        }
    }

    #[test]
    fn classify_two_block() {
        let h = SkewEndomorphism::two_block(1.0, 2.0);
        let class = classify_element(&h, &tol());
        assert_eq!(class.kernel.dim(), 0);
        let speeds: Vec<f64> = class.rotation_pairs.iter().map(|p| p.0).collect();
        assert!((speeds[0] - 1.0).abs() < 1e-12 && (speeds[1] - 2.0).abs() < 1e-12);
        assert!(!class.is_complex_multiple);
    }

    #[test]
    fn classify_complex_structure() {
        // J from the Kähler presentation of R^2 x aff: Je1=e2, Je3=e4
        let (_, designated) = build("kahler_R2_x_aff");
        let j = &designated[0];
        let class = classify_element(j, &tol());
        assert!(class.is_complex_structure);
        // the degenerate eigenspace still splits into two invariant planes
        assert_eq!(class.rotation_pairs.len(), 2);
        for (speed, plane) in &class.rotation_pairs {
            assert!((speed - 1.0).abs() < 1e-12);
            assert_eq!(plane.dim(), 2);
            let image = j.matrix() * plane.basis();
            let escape = linalg::max_abs(&(&image - plane.projector() * &image));
            assert!(escape < 1e-12, "plane not invariant under J");
        }
        // the two planes are orthogonal
        let gram = class.rotation_pairs[0].1.basis().transpose()
            * class.rotation_pairs[1].1.basis();
        assert!(linalg::max_abs(&gram) < 1e-12);
    }

    #[test]
    fn classify_zero() {
        let h = SkewEndomorphism::new(DMatrix::zeros(4, 4), &tol()).unwrap();
        let class = classify_element(&h, &tol());
        assert_eq!(class.kernel.dim(), 4);
        assert!(class.rotation_pairs.is_empty());
        assert!(!class.is_complex_multiple);
    }

    #[test]
    fn witness_search() {
        let (r2aff, _) = build("R2_x_aff");
        let basis = parallel_space(&connection_of(&r2aff), &tol());
        let witness = contains_non_complex_multiple(&basis, &tol(), 0).unwrap();
        assert!(!classify_element(&witness, &tol()).is_complex_multiple);

        let (d42, _) = build("d4.2");
        let basis = parallel_space(&connection_of(&d42), &tol());
        assert!(contains_non_complex_multiple(&basis, &tol(), 0).is_none());

        let empty = ParallelBasis { elements: vec![] };
        assert!(contains_non_complex_multiple(&empty, &tol(), 0).is_none());
    }

    #[test]
    fn fingerprint_r2_x_aff() {
        let (mla, _) = build("R2_x_aff");
        let h = SkewEndomorphism::two_block(1.0, 2.0);
        let fp = fingerprint(&mla, &h, &tol()).unwrap();
        // h restricted to the center span{e1,f1}: x^2 + 1
        match &fp.h_on_center_charpoly {
            RestrictionCharPoly::Poly(p) => {
                assert!(linalg::poly_close(p, &[1.0, 0.0, 1.0], &tol()))
            }
            _ => panic!("center should be preserved"),
        }
        // full polynomial (x^2+1)(x^2+4) = x^4 + 5x^2 + 4
        assert!(linalg::poly_close(
            &fp.h_charpoly,
            &[1.0, 0.0, 5.0, 0.0, 4.0],
            &tol()
        ));
        assert_eq!(fp.dims.parallel, 2);
    }

    #[test]
    fn fingerprint_abelian_zero_tensor() {
        let mla = MetricLieAlgebra::with_identity_metric(LieAlgebra::abelian(4));
        let h = SkewEndomorphism::new(DMatrix::zeros(4, 4), &tol()).unwrap();
        let fp = fingerprint(&mla, &h, &tol()).unwrap();
        // everything is a power of x
        assert!(fp.ric_charpoly.iter().skip(1).all(|c| c.abs() < 1e-12));
        assert!(fp.h_charpoly.iter().skip(1).all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn fingerprint_ricci_poly_r4p() {
        let mut params = BTreeMap::new();
        params.insert("lambda".to_string(), 2.0);
        let (mla, designated) = catalog::catalog_build("r4p_lambda_0", &params).unwrap();
        let fp = fingerprint(&mla, &designated[0], &tol()).unwrap();
        // Ricci = diag(-4, -4, 0, 0): x^2 (x + 4)^2
        assert!(linalg::poly_close(
            &fp.ric_charpoly,
            &[1.0, 8.0, 16.0, 0.0, 0.0],
            &tol()
        ));
    }

    #[test]
    fn fingerprint_rejects_non_parallel() {
        let (d42, _) = build("d4.2");
        let h = SkewEndomorphism::plane_rotation(4, 0, 1);
        assert!(matches!(
            fingerprint(&d42, &h, &tol()),
            Err(Error::NotParallel { .. })
        ));
    }

    #[test]
    fn distinguish_swapped_speeds() {
        let (mla, _) = build("R2_x_aff");
        let h12 = SkewEndomorphism::two_block(1.0, 2.0);
        let h21 = SkewEndomorphism::two_block(2.0, 1.0);
        let d = distinguish((&mla, &h12), (&mla, &h21), &tol()).unwrap();
        assert_eq!(
            d,
            Distinction::Distinct(DistinctionReason::CenterRestriction)
        );
    }

    #[test]
    fn distinguish_identical_inputs() {
        let (mla, designated) = build("d4.2");
        let d = distinguish((&mla, &designated[0]), (&mla, &designated[0]), &tol()).unwrap();
        assert_eq!(d, Distinction::Inconclusive);
    }

    #[test]
    fn distinguish_opposite_complex_structures_is_inconclusive() {
        // the documented fingerprint blind spot: H_c vs H_{-c} on d'_{4,1}
        let mut plus = BTreeMap::new();
        plus.insert("c".to_string(), 1.0);
        let mut minus = BTreeMap::new();
        minus.insert("c".to_string(), -1.0);
        let (mla_p, des_p) = catalog::catalog_build("d4p_lambda", &plus).unwrap();
        let (mla_m, des_m) = catalog::catalog_build("d4p_lambda", &minus).unwrap();
        let d = distinguish((&mla_p, &des_p[0]), (&mla_m, &des_m[0]), &tol()).unwrap();
        assert_eq!(d, Distinction::Inconclusive);
    }
}
