//! Holonomy algebra and the invariant-factor (de Rham style) report.
//!
//! The holonomy Lie algebra of a left-invariant metric is spanned by the
//! curvature operators together with all their iterated covariant
//! derivatives; the span is closed here by repeatedly commuting with the
//! connection operators (the argument-correction terms of a covariant
//! derivative lie in the span of the previous level, so this closure
//! produces the same space level by level), followed by a commutator
//! closure pass.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{LieAlgebra, MetricLieAlgebra, Subspace};
use crate::connection::{algebra_in_frame, levi_civita, Connection};
use crate::curvature::{curvature, sectional, CurvatureData};
use crate::linalg;
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// A 2-form over the dual wedge basis `{e^i ^ e^j : i < j}`, lexicographic.
///
/// The identification with skew matrices is `omega(x, y) = <M x, y>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    dim: usize,
    coeffs: DVector<f64>,
}

impl TwoForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    /// Coefficient of `e^i ^ e^j` (requires `i < j`).
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        let pos = linalg::index_pairs(self.dim)
            .iter()
            .position(|&p| p == (i, j))
            .expect("coeff requires i < j < dim");
        self.coeffs[pos]
    }

    pub fn from_pairs(dim: usize, entries: &[(usize, usize, f64)]) -> Self {
        let pairs = linalg::index_pairs(dim);
        let mut coeffs = DVector::zeros(pairs.len());
        for &(i, j, v) in entries {
            let pos = pairs
                .iter()
                .position(|&p| p == (i, j))
                .expect("from_pairs requires i < j < dim");
            coeffs[pos] += v;
        }
        TwoForm { dim, coeffs }
    }
}

/// Identify a skew matrix with a 2-form via `omega(x,y) = <M x, y>`.
pub fn matrix_to_two_form(m: &DMatrix<f64>, tol: &Tolerance) -> Result<TwoForm> {
    let residual = linalg::skew_residual(m);
    if residual > tol.threshold(linalg::max_abs(m).max(1.0)) {
        return Err(Error::NotSkew { residual });
    }
    let n = m.nrows();
    let pairs = linalg::index_pairs(n);
    let coeffs = DVector::from_fn(pairs.len(), |p, _| {
        let (i, j) = pairs[p];
        m[(j, i)]
    });
    Ok(TwoForm { dim: n, coeffs })
}

/// Inverse identification.
pub fn two_form_to_matrix(omega: &TwoForm) -> DMatrix<f64> {
    let n = omega.dim;
    let mut m = DMatrix::zeros(n, n);
    for (p, (i, j)) in linalg::index_pairs(n).into_iter().enumerate() {
        m[(j, i)] = omega.coeffs[p];
        m[(i, j)] = -omega.coeffs[p];
    }
    m
}

/// An operator-valued tensor: a matrix for each tuple of basis arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTensor {
    dim: usize,
    order: usize,
    values: Vec<DMatrix<f64>>,
}

impl OperatorTensor {
    /// Order-zero tensor: a single operator.
    pub fn constant(value: DMatrix<f64>) -> Self {
        OperatorTensor {
            dim: value.nrows(),
            order: 0,
            values: vec![value],
        }
    }

    /// The curvature tensor as an order-2 operator tensor.
    pub fn from_curvature(curv: &CurvatureData) -> Self {
        let n = curv.dim();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(curv.op(i, j).clone());
            }
        }
        OperatorTensor {
            dim: n,
            order: 2,
            values,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn flat_index(&self, args: &[usize]) -> usize {
        assert_eq!(args.len(), self.order);
        args.iter().fold(0, |acc, &a| acc * self.dim + a)
    }

    /// Value at a tuple of basis indices.
    pub fn value(&self, args: &[usize]) -> &DMatrix<f64> {
        &self.values[self.flat_index(args)]
    }

    pub fn values(&self) -> &[DMatrix<f64>] {
        &self.values
    }
}

/// Covariant derivative of an operator-valued tensor; the direction becomes
/// the new leading argument slot:
/// `(nabla T)(k, args) = [gamma_k, T(args)] - sum_m T(args with arg_m
/// replaced by gamma_k arg_m)`, extended multilinearly.
pub fn covariant_derivative_tensor(conn: &Connection, t: &OperatorTensor) -> OperatorTensor {
    let n = t.dim;
    assert_eq!(conn.dim(), n);
    let order = t.order + 1;
    let mut values = Vec::with_capacity(t.values.len() * n);
    let mut args = vec![0usize; t.order];
    for k in 0..n {
        let gamma = conn.gamma(k);
        for flat in 0..t.values.len() {
            // decode flat index into args
            let mut rest = flat;
            for slot in (0..t.order).rev() {
                args[slot] = rest % n;
                rest /= n;
            }
            let mut m = linalg::commutator(gamma, &t.values[flat]);
            for slot in 0..t.order {
                let a = args[slot];
                // replace argument `a` by gamma_k e_a = sum_b gamma[(b, a)] e_b
                for b in 0..n {
                    let coef = gamma[(b, a)];
                    if coef != 0.0 {
                        let orig = args[slot];
                        args[slot] = b;
                        let idx = t.flat_index(&args);
                        args[slot] = orig;
                        m -= &t.values[idx] * coef;
                    }
                }
            }
            values.push(m);
        }
    }
    OperatorTensor {
        dim: n,
        order,
        values,
    }
}

/// Covariant derivative of a single 2-form in the direction `k`; reduces to
/// the commutator with the connection operator.
pub fn covariant_derivative_two_form(
    conn: &Connection,
    k: usize,
    omega: &TwoForm,
    tol: &Tolerance,
) -> TwoForm {
    let m = two_form_to_matrix(omega);
    let d = linalg::commutator(conn.gamma(k), &m);
    matrix_to_two_form(&d, tol).expect("commutator with a skew operator is skew")
}

/// Basis of the holonomy Lie algebra with stabilization metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyAlgebra {
    dim: usize,
    /// Frobenius-orthonormal spanning matrices in the orthonormal frame.
    pub basis: Vec<DMatrix<f64>>,
    /// Highest covariant-derivative order that contributed a new element.
    pub level_reached: usize,
    /// Whether a full derivative sweep added nothing before `max_level`.
    pub stabilized: bool,
}

impl HolonomyAlgebra {
    pub fn space_dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `max ||[b_i, b_j] - proj [b_i, b_j]||`; zero for a Lie subalgebra.
    pub fn bracket_closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in &self.basis {
            for b in &self.basis {
                let c = linalg::commutator(a, b);
                worst = worst.max(linalg::projection_residual(&c, &self.basis));
            }
        }
        worst
    }
}

/// Span of the curvature operators and all their covariant derivatives,
/// closed under the commutator bracket.
///
/// Each sweep adjoins `[gamma_k, -]` of the current span, which adds the
/// same elements as the next derivative level; the sweep loop stops when a
/// full level contributes nothing (`stabilized`) or `max_level` is reached.
pub fn holonomy_algebra(
    conn: &Connection,
    algebra_in_frame: &LieAlgebra,
    max_level: Option<usize>,
    tol: &Tolerance,
) -> Result<HolonomyAlgebra> {
    let n = conn.dim();
    let max_level = max_level.unwrap_or(n * (n + 1) / 2);
    let curv = curvature(conn, algebra_in_frame, tol)?;
    let mut seed: Vec<DMatrix<f64>> = Vec::new();
    for (i, j) in linalg::index_pairs(n) {
        seed.push(curv.op(i, j).clone());
    }
    let mut basis = linalg::orthonormalize_matrices(&seed, tol);
    let mut level_reached = 0;
    let mut stabilized = false;
    for level in 1..=max_level {
        let mut extended = basis.clone();
        for g in conn.gammas() {
            for m in &basis {
                extended.push(linalg::commutator(g, m));
            }
        }
        let next = linalg::orthonormalize_matrices(&extended, tol);
        if next.len() == basis.len() {
            stabilized = true;
            break;
        }
        basis = next;
        level_reached = level;
    }
    // commutator closure pass
    loop {
        let mut extended = basis.clone();
        for a in &basis {
            for b in &basis {
                extended.push(linalg::commutator(a, b));
            }
        }
        let next = linalg::orthonormalize_matrices(&extended, tol);
        if next.len() == basis.len() {
            break;
        }
        basis = next;
    }
    Ok(HolonomyAlgebra {
        dim: n,
        basis,
        level_reached,
        stabilized,
    })
}

/// One factor of the invariant decomposition; `flat` marks a piece of the
/// common kernel.
#[derive(Debug, Clone)]
pub struct InvariantFactor {
    pub subspace: Subspace,
    pub flat: bool,
}

/// Split the space into holonomy-invariant orthogonal subspaces: the common
/// kernel (in 1-dimensional pieces) plus blocks on which the symmetric
/// commutant is scalar.
///
/// The orthogonal projector onto an invariant subspace of a family of skew
/// operators is a symmetric element of its commutant, so a scalar symmetric
/// commutant certifies that a block admits no further orthogonal invariant
/// splitting.
pub fn invariant_decomposition(
    hol: &HolonomyAlgebra,
    tol: &Tolerance,
    seed: u64,
) -> Vec<InvariantFactor> {
    let (kernel, blocks) = split_invariant(hol, tol, seed);
    let n = hol.space_dim();
    let mut factors = Vec::new();
    for col in kernel.basis().column_iter() {
        factors.push(InvariantFactor {
            subspace: Subspace::from_spanning(n, &[col.into_owned()], tol),
            flat: true,
        });
    }
    for b in blocks {
        factors.push(InvariantFactor {
            subspace: b,
            flat: false,
        });
    }
    sort_by_leading_index(&mut factors, tol);
    factors
}

fn sort_by_leading_index(factors: &mut [InvariantFactor], tol: &Tolerance) {
    factors.sort_by_key(|f| leading_index(&f.subspace, tol));
}

/// Smallest ambient index with a nonzero component in the subspace.
fn leading_index(w: &Subspace, tol: &Tolerance) -> usize {
    let q = w.basis();
    for i in 0..q.nrows() {
        if q.row(i).norm() > tol.threshold(1.0) {
            return i;
        }
    }
    q.nrows()
}

fn split_invariant(hol: &HolonomyAlgebra, tol: &Tolerance, seed: u64) -> (Subspace, Vec<Subspace>) {
    let n = hol.space_dim();
    if hol.basis.is_empty() {
        return (Subspace::full(n), Vec::new());
    }
    let mut stacked = DMatrix::zeros(n * hol.basis.len(), n);
    for (i, b) in hol.basis.iter().enumerate() {
        stacked.view_mut((i * n, 0), (n, n)).copy_from(b);
    }
    let kernel = Subspace::from_orthonormal(linalg::nullspace(&stacked, tol));
    let complement = kernel.complement(tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocks = Vec::new();
    split_block(&hol.basis, &complement, tol, &mut rng, &mut blocks);
    (kernel, blocks)
}

/// Recursive splitting of an invariant block via the symmetric commutant.
fn split_block(
    operators: &[DMatrix<f64>],
    block: &Subspace,
    tol: &Tolerance,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Subspace>,
) {
    let m = block.dim();
    if m == 0 {
        return;
    }
    if m == 1 {
        out.push(block.clone());
        return;
    }
    let q = block.basis();
    let restricted: Vec<DMatrix<f64>> = operators.iter().map(|b| q.transpose() * b * q).collect();
    let commutant = symmetric_commutant(&restricted, m, tol);
    if commutant.len() <= 1 {
        out.push(block.clone());
        return;
    }
    // draw a generic symmetric commutant element and split by its eigenspaces
    for attempt in 0..(8 + commutant.len()) {
        let s = if attempt < 8 {
            let mut s = DMatrix::zeros(m, m);
            for c in &commutant {
                s += c * (rng.random::<f64>() * 2.0 - 1.0);
            }
            s
        } else {
            // deterministic fallback: a basis element with its trace removed
            let c = &commutant[attempt - 8];
            c - DMatrix::identity(m, m) * (c.trace() / m as f64)
        };
        let eig = s.clone().symmetric_eigen();
        let radius = eig.eigenvalues.amax().max(1.0);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for idx in order {
            match groups.last_mut() {
                Some(g)
                    if (eig.eigenvalues[idx] - eig.eigenvalues[g[0]]).abs()
                        <= tol.threshold(radius) =>
                {
                    g.push(idx)
                }
                _ => groups.push(vec![idx]),
            }
        }
        if groups.len() < 2 {
            continue;
        }
        for g in groups {
            let cols: Vec<DVector<f64>> = g
                .iter()
                .map(|&i| q * eig.eigenvectors.column(i).into_owned())
                .collect();
            let sub = Subspace::from_spanning(block.ambient_dim(), &cols, tol);
            split_block(operators, &sub, tol, rng, out);
        }
        return;
    }
    // no split found; treat as one block
    out.push(block.clone());
}

/// Basis of the symmetric matrices commuting with every operator.
fn symmetric_commutant(operators: &[DMatrix<f64>], m: usize, tol: &Tolerance) -> Vec<DMatrix<f64>> {
    let sym = linalg::sym_basis(m);
    let mut stacked = DMatrix::zeros(m * m * operators.len(), sym.len());
    for (col, e) in sym.iter().enumerate() {
        for (i, b) in operators.iter().enumerate() {
            let c = linalg::commutator(b, e);
            for (r, v) in c.iter().enumerate() {
                stacked[(i * m * m + r, col)] = *v;
            }
        }
    }
    let kernel = linalg::nullspace(&stacked, tol);
    kernel
        .column_iter()
        .map(|coef| linalg::from_coords(&coef.into_owned(), &sym))
        .collect()
}

/// Kind label of a de Rham factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorKind {
    /// Contained in the common kernel of the holonomy algebra.
    Flat,
    /// A 2-dimensional invariant block with the given sectional curvature;
    /// homogeneity makes the curvature of the plane constant on the group.
    Surface(f64),
    /// An invariant block with scalar symmetric commutant.
    Irreducible,
}

#[derive(Debug, Clone)]
pub struct DeRhamFactor {
    pub subspace: Subspace,
    pub kind: FactorKind,
}

impl DeRhamFactor {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// Orthogonal invariant factors with kind labels, ordered by leading basis
/// index; the flat factor is merged into a single piece.
#[derive(Debug, Clone)]
pub struct DeRhamDecomposition {
    pub factors: Vec<DeRhamFactor>,
    /// Propagated from the holonomy computation; a false value means the
    /// derivative span had not provably closed and the report may be coarse.
    pub stabilized: bool,
}

impl DeRhamDecomposition {
    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).sum()
    }

    /// Largest invariance residual `||(I - P) B P||` over factors and
    /// holonomy elements.
    pub fn invariance_residual(&self, hol: &HolonomyAlgebra) -> f64 {
        let n = hol.space_dim();
        let id = DMatrix::identity(n, n);
        let mut worst = 0.0f64;
        for f in &self.factors {
            let p = f.subspace.projector();
            for b in &hol.basis {
                worst = worst.max(linalg::max_abs(&((&id - &p) * b * &p)));
            }
        }
        worst
    }
}

/// Run the full pipeline (connection, curvature, holonomy, invariant
/// splitting) and label the factors.
pub fn derham_report(
    mla: &MetricLieAlgebra,
    max_level: Option<usize>,
    tol: &Tolerance,
    seed: u64,
) -> Result<DeRhamDecomposition> {
    let conn = levi_civita(mla, tol)?;
    let on = algebra_in_frame(mla, &conn)?;
    let curv = curvature(&conn, &on, tol)?;
    let hol = holonomy_algebra(&conn, &on, max_level, tol)?;
    let (kernel, blocks) = split_invariant(&hol, tol, seed);
    let mut factors = Vec::new();
    if kernel.dim() > 0 {
        factors.push(DeRhamFactor {
            subspace: kernel,
            kind: FactorKind::Flat,
        });
    }
    for b in blocks {
        let kind = if b.dim() == 2 {
            let x = b.basis().column(0).into_owned();
            let y = b.basis().column(1).into_owned();
            FactorKind::Surface(sectional(&curv, &x, &y, tol)?)
        } else {
            FactorKind::Irreducible
        };
        factors.push(DeRhamFactor { subspace: b, kind });
    }
    factors.sort_by_key(|f| leading_index(&f.subspace, tol));
    Ok(DeRhamDecomposition {
        factors,
        stabilized: hol.stabilized,
    })
}
