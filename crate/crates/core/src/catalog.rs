//! Built-in catalog of low-dimensional solvable metric Lie algebras.
//!
//! Entry names are stable ASCII identifiers:
//!
//! | name                   | algebra                     | parameters               |
//! |------------------------|-----------------------------|--------------------------|
//! | `abelian`              | abelian `R^n`               | `n >= 1` (default 4)     |
//! | `aff`                  | aff(R)                      | —                        |
//! | `h3`                   | Heisenberg h_3              | —                        |
//! | `r3_lambda`            | r_{3,lambda}                | `lambda`                 |
//! | `r3p_lambda`           | r'_{3,lambda}               | `lambda`                 |
//! | `d4lambda`             | d_{4,lambda} (bare family)  | `lambda >= 1/2`          |
//! | `d4p_lambda_alg`       | d'_{4,lambda} (bare family) | `lambda >= 0`            |
//! | `R_x_e2`               | R x e(2), metric `t I`      | `t > 0`, `a1`, `a2`      |
//! | `R2_x_aff`             | R^2 x aff(R), metric `t I`  | `t > 0`, `a1`, `a2`      |
//! | `r4p_lambda_0`         | r'_{4,lambda,0}, metric `t I`| `lambda > 0`, `t`, `a1`, `a2` |
//! | `aff_x_aff`            | aff(R) x aff(R), `diag(t,t,ts,ts)` | `t > 0`, `0 < s <= 1`, `a1`, `a2` |
//! | `d4half`               | d_{4,1/2}, metric `t I`     | `t > 0`, `c != 0`        |
//! | `d4.2`                 | d_{4,2}, metric `t I`       | `t > 0`, `c != 0`        |
//! | `d4p_lambda`           | d'_{4,lambda}, metric `t I` | `lambda > 0`, `t`, `c != 0` |
//! | `kahler_R2_x_aff`      | Kähler presentation         | `t > 0`                  |
//! | `kahler_R_x_e2`        | Kähler presentation         | `t > 0`                  |
//! | `kahler_aff_x_aff`     | Kähler presentation         | `t > 0`, `s > 0`         |
//! | `kahler_r4p_lambda_0`  | Kähler presentation (2 J's) | `lambda > 0`, `t > 0`    |
//! | `kahler_d4.2`          | Kähler presentation         | `t > 0`                  |
//! | `kahler_d4half`        | Kähler presentation         | `t > 0`                  |
//! | `kahler_d4p_half_delta`| Kähler presentation (2 J's) | `delta > 0`, `t > 0`     |
//!
//! The designated tensors of the `R_x_e2` .. `aff_x_aff` rows form the
//! two-parameter family `H_{a1,a2}` (rotation by `a1` on the first plane
//! and by `a2` on the second); the sign normalizations sometimes imposed on
//! `(a1, a2)` for classification purposes are not enforced here, since the
//! tensors are parallel for any real values. The `d4*` rows designate the
//! one-parameter family `c J`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::algebra::{LieAlgebra, MetricLieAlgebra};
use crate::connection::levi_civita;
use crate::parallel::{parallel_space, SkewEndomorphism};
use crate::tolerance::Tolerance;
use crate::{Error, Result};

/// A named parameter with its admissible range.
#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: &'static str,
    pub constraint: &'static str,
    pub default: f64,
    check: fn(f64) -> bool,
}

impl ParamSpec {
    fn positive(name: &'static str, default: f64) -> Self {
        ParamSpec {
            name,
            constraint: "must be > 0",
            default,
            check: |v| v > 0.0,
        }
    }

    fn real(name: &'static str, default: f64) -> Self {
        ParamSpec {
            name,
            constraint: "any real",
            default,
            check: |v| v.is_finite(),
        }
    }
}

/// Which part of the catalog an entry comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    /// Bare Lie algebra family with the identity metric.
    Family,
    /// Metric entry whose parallel space is 2-dimensional and contains
    /// tensors that are not complex multiples (reducible group).
    Reducible,
    /// Metric entry whose parallel tensors are all complex multiples
    /// (irreducible group).
    Irreducible,
    /// Kähler presentation in an orthonormal basis.
    Kahler,
    Abelian,
}

/// Descriptor of one catalog entry.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub dim: usize,
    pub description: &'static str,
    pub params: Vec<ParamSpec>,
    /// Parallel-space dimension the entry is expected to have, when the
    /// catalog pins one (used by `verify_table_entry`).
    pub expected_parallel_dim: Option<usize>,
}

/// All catalog descriptors, in a fixed order.
pub fn catalog_list() -> Vec<CatalogEntry> {
    use EntryKind::*;
    let t = || ParamSpec::positive("t", 1.0);
    let a12 = || vec![ParamSpec::real("a1", 1.0), ParamSpec::real("a2", 2.0)];
    let c = || ParamSpec {
        name: "c",
        constraint: "must be nonzero",
        default: 1.0,
        check: |v| v != 0.0 && v.is_finite(),
    };
    let mut entries = vec![
        CatalogEntry {
            name: "abelian",
            kind: Abelian,
            dim: 4,
            description: "abelian R^n with the identity metric",
            params: vec![ParamSpec {
                name: "n",
                constraint: "positive integer",
                default: 4.0,
                check: |v| v >= 1.0 && v.fract() == 0.0,
            }],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "aff",
            kind: Family,
            dim: 2,
            description: "aff(R): [e1,e2] = e2",
            params: vec![],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "h3",
            kind: Family,
            dim: 3,
            description: "Heisenberg algebra: [e1,e2] = e3",
            params: vec![],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "r3_lambda",
            kind: Family,
            dim: 3,
            description: "r_{3,lambda}: [e1,e2] = e2, [e1,e3] = lambda e3",
            params: vec![ParamSpec::real("lambda", 1.0)],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "r3p_lambda",
            kind: Family,
            dim: 3,
            description: "r'_{3,lambda}: [e1,e2] = lambda e2 - e3, [e1,e3] = e2 + lambda e3",
            params: vec![ParamSpec::real("lambda", 1.0)],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "d4lambda",
            kind: Family,
            dim: 4,
            description: "d_{4,lambda} family on the basis e1..e4, identity metric",
            params: vec![ParamSpec {
                name: "lambda",
                constraint: "must be >= 1/2",
                default: 1.0,
                check: |v| v >= 0.5,
            }],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "d4p_lambda_alg",
            kind: Family,
            dim: 4,
            description: "d'_{4,lambda} family on the basis e1..e4, identity metric",
            params: vec![ParamSpec {
                name: "lambda",
                constraint: "must be >= 0",
                default: 1.0,
                check: |v| v >= 0.0,
            }],
            expected_parallel_dim: None,
        },
        CatalogEntry {
            name: "R_x_e2",
            kind: Reducible,
            dim: 4,
            description: "R x e(2): [e1,e2] = -f2, [e1,f2] = e2; metric t I",
            params: {
                let mut p = vec![t()];
                p.extend(a12());
                p
            },
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "R2_x_aff",
            kind: Reducible,
            dim: 4,
            description: "R^2 x aff(R): [e2,f2] = f2; metric t I",
            params: {
                let mut p = vec![t()];
                p.extend(a12());
                p
            },
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "r4p_lambda_0",
            kind: Reducible,
            dim: 4,
            description: "r'_{4,lambda,0}: [e1,f1] = lambda f1, [e1,f2] = e2, [e1,e2] = -f2; metric t I",
            params: {
                let mut p = vec![ParamSpec::positive("lambda", 1.0), t()];
                p.extend(a12());
                p
            },
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "aff_x_aff",
            kind: Reducible,
            dim: 4,
            description: "aff(R) x aff(R): [e1,f1] = f1, [e2,f2] = f2; metric diag(t,t,ts,ts)",
            params: {
                let mut p = vec![
                    t(),
                    ParamSpec {
                        name: "s",
                        constraint: "must satisfy 0 < s <= 1",
                        default: 0.5,
                        check: |v| v > 0.0 && v <= 1.0,
                    },
                ];
                p.extend(a12());
                p
            },
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "d4half",
            kind: Irreducible,
            dim: 4,
            description: "d_{4,1/2}: [e1,e2]=e3, [e0,e1]=e1/2, [e0,e2]=e2/2, [e0,e3]=e3; metric t I",
            params: vec![t(), c()],
            expected_parallel_dim: Some(1),
        },
        CatalogEntry {
            name: "d4.2",
            kind: Irreducible,
            dim: 4,
            description: "d_{4,2}: [e1,e2]=e3, [e0,e1]=-e1, [e0,e2]=e2/2, [e0,e3]=-e3/2; metric t I",
            params: vec![t(), c()],
            expected_parallel_dim: Some(1),
        },
        CatalogEntry {
            name: "d4p_lambda",
            kind: Irreducible,
            dim: 4,
            description: "d'_{4,lambda}: [e1,e2]=e3, [e0,e1]=e1/2-e2/(2l), [e0,e2]=e1/(2l)+e2/2, [e0,e3]=e3; metric t I",
            params: vec![ParamSpec::positive("lambda", 1.0), t(), c()],
            expected_parallel_dim: Some(1),
        },
        CatalogEntry {
            name: "kahler_R2_x_aff",
            kind: Kahler,
            dim: 4,
            description: "R^2 x aff(R), orthonormal basis: [e1,e2] = t e2; J: e1->e2, e3->e4",
            params: vec![t()],
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "kahler_R_x_e2",
            kind: Kahler,
            dim: 4,
            description: "R x e(2), orthonormal basis: [e1,e2] = -t e3, [e1,e3] = t e2; J: e1->e4, e2->e3",
            params: vec![t()],
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "kahler_aff_x_aff",
            kind: Kahler,
            dim: 4,
            description: "aff(R) x aff(R), orthonormal basis: [e1,e2] = t e2, [e3,e4] = s e4; J: e1->e2, e3->e4",
            params: vec![t(), ParamSpec::positive("s", 1.0)],
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "kahler_r4p_lambda_0",
            kind: Kahler,
            dim: 4,
            description: "r'_{4,lambda,0}, orthonormal basis, two complex structures",
            params: vec![ParamSpec::positive("lambda", 1.0), t()],
            expected_parallel_dim: Some(2),
        },
        CatalogEntry {
            name: "kahler_d4.2",
            kind: Kahler,
            dim: 4,
            description: "d_{4,2}, orthonormal basis: brackets scaled by t; J: e4->-e1, e2->e3",
            params: vec![t()],
            expected_parallel_dim: Some(1),
        },
        CatalogEntry {
            name: "kahler_d4half",
            kind: Kahler,
            dim: 4,
            description: "d_{4,1/2}, orthonormal basis: brackets scaled by t; J: e1->e2, e4->e3",
            params: vec![t()],
            expected_parallel_dim: Some(1),
        },
        CatalogEntry {
            name: "kahler_d4p_half_delta",
            kind: Kahler,
            dim: 4,
            description: "d'_{4,delta/2}, orthonormal basis, two (opposite) complex structures",
            params: vec![ParamSpec::positive("delta", 1.0), t()],
            expected_parallel_dim: Some(1),
        },
    ];
    entries.sort_by_key(|e| e.name);
    entries
}

/// Look up a descriptor by name.
pub fn find_entry(name: &str) -> Result<CatalogEntry> {
    catalog_list()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

fn resolve_params(
    entry: &CatalogEntry,
    given: &BTreeMap<String, f64>,
) -> Result<BTreeMap<&'static str, f64>> {
    for key in given.keys() {
        if !entry.params.iter().any(|p| p.name == key) {
            return Err(Error::UnknownParam {
                entry: entry.name.to_string(),
                param: key.clone(),
            });
        }
    }
    let mut out = BTreeMap::new();
    for p in &entry.params {
        let v = given.get(p.name).copied().unwrap_or(p.default);
        if !(p.check)(v) {
            return Err(Error::ParamOutOfRange {
                param: p.name.to_string(),
                value: v,
                constraint: p.constraint.to_string(),
            });
        }
        out.insert(p.name, v);
    }
    Ok(out)
}

fn algebra(dim: usize, brackets: &[(usize, usize, usize, f64)]) -> LieAlgebra {
    // entries may be written generator-first; fold them into i < j order
    let normalized: Vec<(usize, usize, usize, f64)> = brackets
        .iter()
        .map(|&(i, j, k, v)| if i < j { (i, j, k, v) } else { (j, i, k, -v) })
        .collect();
    LieAlgebra::from_brackets(dim, &normalized, &Tolerance::default())
        .expect("catalog brackets satisfy the Jacobi identity")
}

fn skew(entries: &[(usize, usize, f64)]) -> SkewEndomorphism {
    // entries are (row, col, value) for the col -> row images; the mirrored
    // entries are filled in
    let mut m = DMatrix::zeros(4, 4);
    for &(r, c, v) in entries {
        m[(r, c)] = v;
        m[(c, r)] = -v;
    }
    SkewEndomorphism::new(m, &Tolerance::default()).expect("catalog tensors are skew")
}

/// `H_{a1,a2}`: rotation by `a1` on the first coordinate plane and by `a2`
/// on the second.
fn h_family(a1: f64, a2: f64) -> SkewEndomorphism {
    skew(&[(1, 0, a1), (3, 2, a2)])
}

/// `c J` with `J: e0 -> e3, e1 -> e2` (the complex structure designated for
/// `d4half` and `d4p_lambda`).
fn j_cross(c: f64) -> SkewEndomorphism {
    skew(&[(3, 0, c), (2, 1, c)])
}

/// Build a catalog entry: the metric Lie algebra plus its designated
/// skew-symmetric tensors (empty for bare families and `abelian`).
pub fn catalog_build(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<(MetricLieAlgebra, Vec<SkewEndomorphism>)> {
    let entry = find_entry(name)?;
    let p = resolve_params(&entry, params)?;
    let tol = Tolerance::default();
    let get = |k: &str| p[k];

    let (alg, gram, designated): (LieAlgebra, DMatrix<f64>, Vec<SkewEndomorphism>) = match name {
        "abelian" => {
            let n = get("n") as usize;
            (LieAlgebra::abelian(n), DMatrix::identity(n, n), vec![])
        }
        "aff" => (
            algebra(2, &[(0, 1, 1, 1.0)]),
            DMatrix::identity(2, 2),
            vec![],
        ),
        "h3" => (
            algebra(3, &[(0, 1, 2, 1.0)]),
            DMatrix::identity(3, 3),
            vec![],
        ),
        "r3_lambda" => {
            let l = get("lambda");
            (
                algebra(3, &[(0, 1, 1, 1.0), (0, 2, 2, l)]),
                DMatrix::identity(3, 3),
                vec![],
            )
        }
        "r3p_lambda" => {
            let l = get("lambda");
            (
                algebra(
                    3,
                    &[(0, 1, 1, l), (0, 1, 2, -1.0), (0, 2, 1, 1.0), (0, 2, 2, l)],
                ),
                DMatrix::identity(3, 3),
                vec![],
            )
        }
        "d4lambda" => {
            let l = get("lambda");
            (
                algebra(
                    4,
                    &[
                        (3, 0, 0, l),
                        (3, 1, 1, 1.0 - l),
                        (3, 2, 2, 1.0),
                        (0, 1, 2, 1.0),
                    ],
                ),
                DMatrix::identity(4, 4),
                vec![],
            )
        }
        "d4p_lambda_alg" => {
            let l = get("lambda");
            (
                algebra(
                    4,
                    &[
                        (3, 0, 0, l),
                        (3, 0, 1, -1.0),
                        (3, 1, 0, 1.0),
                        (3, 1, 1, l),
                        (3, 2, 2, 2.0 * l),
                        (0, 1, 2, 1.0),
                    ],
                ),
                DMatrix::identity(4, 4),
                vec![],
            )
        }
        "R_x_e2" => (
            algebra(4, &[(0, 2, 3, -1.0), (0, 3, 2, 1.0)]),
            DMatrix::identity(4, 4) * get("t"),
            vec![h_family(get("a1"), get("a2"))],
        ),
        "R2_x_aff" => (
            algebra(4, &[(2, 3, 3, 1.0)]),
            DMatrix::identity(4, 4) * get("t"),
            vec![h_family(get("a1"), get("a2"))],
        ),
        "r4p_lambda_0" => {
            let l = get("lambda");
            (
                algebra(4, &[(0, 1, 1, l), (0, 3, 2, 1.0), (0, 2, 3, -1.0)]),
                DMatrix::identity(4, 4) * get("t"),
                vec![h_family(get("a1"), get("a2"))],
            )
        }
        "aff_x_aff" => {
            let (t, s) = (get("t"), get("s"));
            let mut gram = DMatrix::identity(4, 4) * t;
            gram[(2, 2)] = t * s;
            gram[(3, 3)] = t * s;
            (
                algebra(4, &[(0, 1, 1, 1.0), (2, 3, 3, 1.0)]),
                gram,
                vec![h_family(get("a1"), get("a2"))],
            )
        }
        "d4half" => (
            algebra(
                4,
                &[
                    (1, 2, 3, 1.0),
                    (0, 1, 1, 0.5),
                    (0, 2, 2, 0.5),
                    (0, 3, 3, 1.0),
                ],
            ),
            DMatrix::identity(4, 4) * get("t"),
            vec![j_cross(get("c"))],
        ),
        "d4.2" => (
            algebra(
                4,
                &[
                    (1, 2, 3, 1.0),
                    (0, 1, 1, -1.0),
                    (0, 2, 2, 0.5),
                    (0, 3, 3, -0.5),
                ],
            ),
            DMatrix::identity(4, 4) * get("t"),
            vec![skew(&[(1, 0, get("c")), (3, 2, get("c"))])],
        ),
        "d4p_lambda" => {
            let l = get("lambda");
            (
                algebra(
                    4,
                    &[
                        (1, 2, 3, 1.0),
                        (0, 1, 1, 0.5),
                        (0, 1, 2, -0.5 / l),
                        (0, 2, 1, 0.5 / l),
                        (0, 2, 2, 0.5),
                        (0, 3, 3, 1.0),
                    ],
                ),
                DMatrix::identity(4, 4) * get("t"),
                vec![j_cross(get("c"))],
            )
        }
        "kahler_R2_x_aff" => (
            algebra(4, &[(0, 1, 1, get("t"))]),
            DMatrix::identity(4, 4),
            vec![skew(&[(1, 0, 1.0), (3, 2, 1.0)])],
        ),
        "kahler_R_x_e2" => {
            let t = get("t");
            (
                algebra(4, &[(0, 1, 2, -t), (0, 2, 1, t)]),
                DMatrix::identity(4, 4),
                vec![skew(&[(3, 0, 1.0), (2, 1, 1.0)])],
            )
        }
        "kahler_aff_x_aff" => (
            algebra(4, &[(0, 1, 1, get("t")), (2, 3, 3, get("s"))]),
            DMatrix::identity(4, 4),
            vec![skew(&[(1, 0, 1.0), (3, 2, 1.0)])],
        ),
        "kahler_r4p_lambda_0" => {
            let (l, t) = (get("lambda"), get("t"));
            (
                algebra(4, &[(3, 0, 0, t), (3, 1, 2, -t / l), (3, 2, 1, t / l)]),
                DMatrix::identity(4, 4),
                vec![
                    // J1: e1 -> -e4, e2 -> e3
                    skew(&[(3, 0, -1.0), (2, 1, 1.0)]),
                    // J2: e1 -> -e4, e2 -> -e3
                    skew(&[(3, 0, -1.0), (2, 1, -1.0)]),
                ],
            )
        }
        "kahler_d4.2" => {
            let t = get("t");
            (
                algebra(
                    4,
                    &[
                        (0, 1, 2, t),
                        (3, 2, 2, 0.5 * t),
                        (3, 0, 0, t),
                        (3, 1, 1, -0.5 * t),
                    ],
                ),
                DMatrix::identity(4, 4),
                // J: e4 -> -e1, e2 -> e3 (hence e1 -> e4, e3 -> -e2)
                vec![skew(&[(0, 3, -1.0), (2, 1, 1.0)])],
            )
        }
        "kahler_d4half" => {
            let t = get("t");
            (
                algebra(
                    4,
                    &[
                        (0, 1, 2, t),
                        (3, 2, 2, t),
                        (3, 0, 0, 0.5 * t),
                        (3, 1, 1, 0.5 * t),
                    ],
                ),
                DMatrix::identity(4, 4),
                // J: e1 -> e2, e4 -> e3
                vec![skew(&[(1, 0, 1.0), (2, 3, 1.0)])],
            )
        }
        "kahler_d4p_half_delta" => {
            let (d, t) = (get("delta"), get("t"));
            (
                algebra(
                    4,
                    &[
                        (0, 1, 2, t),
                        (3, 0, 0, 0.5 * t),
                        (3, 0, 1, -t / d),
                        (3, 1, 0, t / d),
                        (3, 1, 1, 0.5 * t),
                        (3, 2, 2, t),
                    ],
                ),
                DMatrix::identity(4, 4),
                vec![
                    skew(&[(1, 0, 1.0), (2, 3, 1.0)]),
                    skew(&[(1, 0, -1.0), (2, 3, -1.0)]),
                ],
            )
        }
        _ => unreachable!("find_entry vetted the name"),
    };
    let mla = MetricLieAlgebra::new(alg, gram, &tol)?;
    Ok((mla, designated))
}

/// Verification report for one catalog entry at given parameters.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub entry: String,
    /// Commutation residual of each designated tensor against the
    /// connection operators.
    pub tensor_residuals: Vec<f64>,
    /// Projection residual of each designated tensor onto the computed
    /// parallel space.
    pub span_residuals: Vec<f64>,
    pub parallel_dim: usize,
    pub expected_parallel_dim: Option<usize>,
    /// All designated tensors parallel and the dimension as expected.
    pub ok: bool,
}

/// Check that every designated tensor of an entry is parallel and that the
/// parallel-space dimension matches the cataloged value.
pub fn verify_table_entry(
    name: &str,
    params: &BTreeMap<String, f64>,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let entry = find_entry(name)?;
    let (mla, designated) = catalog_build(name, params)?;
    let conn = levi_civita(&mla, tol)?;
    let basis = parallel_space(&conn, tol);
    let tensor_residuals: Vec<f64> = designated
        .iter()
        .map(|h| h.parallel_residual(&conn))
        .collect();
    let span_residuals: Vec<f64> = designated
        .iter()
        .map(|h| basis.projection_residual(h.matrix()))
        .collect();
    let expected = match entry.kind {
        EntryKind::Abelian => Some(mla.dim() * (mla.dim() - 1) / 2),
        _ => entry.expected_parallel_dim,
    };
    let thresh = tol.threshold(1.0);
    let ok = tensor_residuals.iter().all(|&r| r <= thresh)
        && span_residuals.iter().all(|&r| r <= thresh)
        && expected.is_none_or(|d| d == basis.dim());
    Ok(VerificationReport {
        entry: name.to_string(),
        tensor_residuals,
        span_residuals,
        parallel_dim: basis.dim(),
        expected_parallel_dim: expected,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::parallel::classify_element;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn list_contains_required_entries() {
        let list = catalog_list();
        for name in [
            "aff",
            "h3",
            "r3_lambda",
            "r3p_lambda",
            "d4lambda",
            "d4p_lambda_alg",
            "R_x_e2",
            "R2_x_aff",
            "r4p_lambda_0",
            "aff_x_aff",
            "d4half",
            "d4.2",
            "d4p_lambda",
            "abelian",
        ] {
            assert!(list.iter().any(|e| e.name == name), "missing {name}");
        }
        assert_eq!(
            list.iter().filter(|e| e.kind == EntryKind::Kahler).count(),
            7
        );

        let d42 = list.iter().find(|e| e.name == "d4.2").unwrap();
        assert!(d42.params.iter().any(|p| p.name == "t"));
        let r4p = list.iter().find(|e| e.name == "r4p_lambda_0").unwrap();
        assert!(r4p.params.iter().any(|p| p.name == "lambda"));
        assert!(r4p.params.iter().any(|p| p.name == "t"));
        let affaff = list.iter().find(|e| e.name == "aff_x_aff").unwrap();
        assert!(affaff.params.iter().any(|p| p.name == "s"));
    }

    #[test]
    fn every_entry_builds_and_validates_at_defaults() {
        for entry in catalog_list() {
            let (mla, designated) = catalog_build(entry.name, &BTreeMap::new()).unwrap();
            assert!(
                mla.algebra.jacobi_residual() < 1e-12,
                "{} fails Jacobi",
                entry.name
            );
            for h in &designated {
                assert!(linalg::skew_residual(h.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn d42_build_matches_table() {
        let (mla, designated) = catalog_build("d4.2", &params(&[("t", 1.0)])).unwrap();
        let a = &mla.algebra;
        assert!((a.c(1, 2, 3) - 1.0).abs() < 1e-15);
        assert!((a.c(0, 1, 1) + 1.0).abs() < 1e-15);
        assert!((a.c(0, 2, 2) - 0.5).abs() < 1e-15);
        assert!((a.c(0, 3, 3) + 0.5).abs() < 1e-15);
        assert!(linalg::max_abs(&(mla.gram() - DMatrix::identity(4, 4))) < 1e-15);
        // designated J is the double rotation block
        let j = designated[0].matrix();
        assert!((j[(1, 0)] - 1.0).abs() < 1e-15 && (j[(3, 2)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn param_ranges_are_enforced() {
        let err = catalog_build("d4lambda", &params(&[("lambda", 0.3)])).unwrap_err();
        assert!(matches!(err, Error::ParamOutOfRange { .. }));
        let err = catalog_build("aff_x_aff", &params(&[("s", 1.5)])).unwrap_err();
        assert!(matches!(err, Error::ParamOutOfRange { .. }));
        let err = catalog_build("d4.2", &params(&[("t", -1.0)])).unwrap_err();
        assert!(matches!(err, Error::ParamOutOfRange { .. }));
        let err = catalog_build("nope", &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::UnknownEntry(_)));
        let err = catalog_build("h3", &params(&[("t", 1.0)])).unwrap_err();
        assert!(matches!(err, Error::UnknownParam { .. }));
    }

    #[test]
    fn abelian_convenience_entry() {
        let (mla, designated) = catalog_build("abelian", &params(&[("n", 4.0)])).unwrap();
        assert_eq!(mla.dim(), 4);
        assert!(designated.is_empty());
        assert!(mla.algebra.ad(0).amax() < 1e-15);
    }

    #[test]
    fn verify_reducible_rows() {
        let rep = verify_table_entry(
            "R_x_e2",
            &params(&[("t", 2.0), ("a1", 3.0), ("a2", -1.0)]),
            &tol(),
        )
        .unwrap();
        assert!(rep.ok);
        assert_eq!(rep.parallel_dim, 2);
        assert!(rep.tensor_residuals.iter().all(|&r| r < 1e-9));

        let rep = verify_table_entry("d4half", &params(&[("t", 1.0), ("c", 2.0)]), &tol()).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.parallel_dim, 1);

        let rep = verify_table_entry("abelian", &params(&[("n", 4.0)]), &tol()).unwrap();
        assert_eq!(rep.parallel_dim, 6);
        assert!(rep.ok);
    }

    #[test]
    fn kahler_tensors_are_complex_structures() {
        for entry in catalog_list()
            .iter()
            .filter(|e| e.kind == EntryKind::Kahler)
        {
            let (mla, designated) = catalog_build(entry.name, &BTreeMap::new()).unwrap();
            let conn = levi_civita(&mla, &tol()).unwrap();
            assert!(!designated.is_empty(), "{}", entry.name);
            for j in &designated {
                let sq = j.matrix() * j.matrix() + DMatrix::identity(4, 4);
                assert!(linalg::max_abs(&sq) < 1e-12, "{} J^2 != -I", entry.name);
                assert!(
                    j.parallel_residual(&conn) < 1e-9,
                    "{} J not parallel",
                    entry.name
                );
                assert!(classify_element(j, &tol()).is_complex_structure);
            }
        }
    }

    #[test]
    fn r4p_kahler_has_two_independent_structures() {
        let (mla, designated) = catalog_build("kahler_r4p_lambda_0", &BTreeMap::new()).unwrap();
        assert_eq!(designated.len(), 2);
        let sum = designated[0].matrix() + designated[1].matrix();
        let diff = designated[0].matrix() - designated[1].matrix();
        assert!(linalg::frob_norm(&sum) > 1.0 && linalg::frob_norm(&diff) > 1.0);
        let conn = levi_civita(&mla, &tol()).unwrap();
        let basis = parallel_space(&conn, &tol());
        assert_eq!(basis.dim(), 2);
    }

    #[test]
    fn homothety_of_the_metric_family() {
        for name in ["R_x_e2", "aff_x_aff", "d4.2", "d4p_lambda"] {
            let (at_one, _) = catalog_build(name, &BTreeMap::new()).unwrap();
            let (at_t, _) = catalog_build(name, &params(&[("t", 3.0)])).unwrap();
            let scaled = at_one.scale_metric(3.0);
            assert!(
                linalg::max_abs(&(at_t.gram() - scaled.gram())) < 1e-12,
                "{name}"
            );
        }
    }

    #[test]
    fn reducible_vs_irreducible_witnesses() {
        use crate::parallel::contains_non_complex_multiple;
        for entry in catalog_list() {
            let expected = match entry.kind {
                EntryKind::Reducible => true,
                EntryKind::Irreducible => false,
                _ => continue,
            };
            let (mla, _) = catalog_build(entry.name, &BTreeMap::new()).unwrap();
            let conn = levi_civita(&mla, &tol()).unwrap();
            let basis = parallel_space(&conn, &tol());
            let witness = contains_non_complex_multiple(&basis, &tol(), 0);
            assert_eq!(witness.is_some(), expected, "{}", entry.name);
        }
    }
}
