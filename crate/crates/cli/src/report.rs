//! Machine-readable analysis report.
//!
//! The JSON form round-trips losslessly: floats are serialized with enough
//! digits to recover the exact `f64`, all maps are ordered, and nothing in
//! the report depends on time or environment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use metlie::holonomy::{DeRhamDecomposition, FactorKind, HolonomyAlgebra};
use metlie::parallel::{
    Fingerprint, ParallelBasis, RestrictionCharPoly, SkewEndomorphism, SpectralClass,
};
use metlie::{Connection, CurvatureData, RicciData, Tolerance};

use metlie::nalgebra::DMatrix;

pub type Matrix = Vec<Vec<f64>>;

pub fn matrix_dto(m: &DMatrix<f64>) -> Matrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputEcho {
    Entry {
        name: String,
        params: BTreeMap<String, f64>,
    },
    File {
        path: String,
        sha256: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub sections: Sections,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Sections {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<ParallelSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curvature: Option<CurvatureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fingerprints: Option<Vec<FingerprintDto>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derham: Option<DerhamSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub warnings: Vec<String>,
    /// Named residual maxima collected while the sections were computed.
    pub residuals: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSection {
    pub dim: usize,
    pub valid: bool,
    pub jacobi_residual: f64,
    pub derived_dim: usize,
    pub center_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectionSection {
    /// Columns of the orthonormal frame in the input basis.
    pub frame: Matrix,
    /// Operator matrices `nabla_{f_i}` in the orthonormal frame.
    pub operators: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelSection {
    pub dimension: usize,
    pub basis: Vec<Matrix>,
    pub classes: Vec<SpectralClassDto>,
    /// A parallel element that is not a multiple of a complex structure,
    /// when the space contains one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_complex_witness: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralClassDto {
    pub rotation_speeds: Vec<f64>,
    pub kernel_dim: usize,
    pub is_complex_multiple: bool,
    pub is_complex_structure: bool,
}

impl SpectralClassDto {
    pub fn from_class(class: &SpectralClass) -> Self {
        SpectralClassDto {
            rotation_speeds: class.rotation_pairs.iter().map(|p| p.0).collect(),
            kernel_dim: class.kernel.dim(),
            is_complex_multiple: class.is_complex_multiple,
            is_complex_structure: class.is_complex_structure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSection {
    /// Curvature operators for index pairs `i < j`, lexicographic.
    pub operators: Vec<CurvatureOperatorDto>,
    /// Covariant derivatives of the curvature 2-forms in every direction.
    pub derivative_two_forms: Vec<DerivativeTwoFormDto>,
    pub ricci: Matrix,
    pub scalar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeTwoFormDto {
    /// Direction index `k` of `nabla_{e_k}`.
    pub k: usize,
    pub i: usize,
    pub j: usize,
    /// Coefficients of `nabla_{e_k} R^{ij}` over the dual wedge basis.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOperatorDto {
    pub i: usize,
    pub j: usize,
    pub matrix: Matrix,
    /// Coefficients over the dual wedge basis, same pair order.
    pub two_form: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintDto {
    /// Which tensor the fingerprint belongs to (designated or computed).
    pub source: String,
    pub ric_charpoly: Vec<f64>,
    pub h_charpoly: Vec<f64>,
    /// `None` when the tensor does not preserve the subspace.
    pub h_on_derived_charpoly: Option<Vec<f64>>,
    pub h_on_center_charpoly: Option<Vec<f64>>,
    pub killing_charpoly: Vec<f64>,
    pub dims: DimsDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimsDto {
    pub dim: usize,
    pub derived: usize,
    pub center: usize,
    pub second_derived: usize,
    pub parallel: usize,
}

impl FingerprintDto {
    pub fn from_fingerprint(source: String, fp: &Fingerprint) -> Self {
        let restriction = |r: &RestrictionCharPoly| match r {
            RestrictionCharPoly::Poly(p) => Some(p.clone()),
            RestrictionCharPoly::NotPreserved => None,
        };
        FingerprintDto {
            source,
            ric_charpoly: fp.ric_charpoly.clone(),
            h_charpoly: fp.h_charpoly.clone(),
            h_on_derived_charpoly: restriction(&fp.h_on_derived_charpoly),
            h_on_center_charpoly: restriction(&fp.h_on_center_charpoly),
            killing_charpoly: fp.killing_charpoly.clone(),
            dims: DimsDto {
                dim: fp.dims.dim,
                derived: fp.dims.derived,
                center: fp.dims.center,
                second_derived: fp.dims.second_derived,
                parallel: fp.dims.parallel,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomySection {
    pub dimension: usize,
    pub level_reached: usize,
    pub stabilized: bool,
    pub basis: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerhamSection {
    pub factors: Vec<DerhamFactorDto>,
    pub stabilized: bool,
    /// Surface curvatures are evaluated at the identity; left invariance
    /// makes them constant on the group.
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerhamFactorDto {
    Flat {
        dimension: usize,
        basis: Matrix,
    },
    Surface {
        dimension: usize,
        curvature: f64,
        basis: Matrix,
    },
    Irreducible {
        dimension: usize,
        basis: Matrix,
    },
}

pub fn connection_section(conn: &Connection) -> ConnectionSection {
    ConnectionSection {
        frame: matrix_dto(conn.frame().matrix()),
        operators: conn.gammas().iter().map(matrix_dto).collect(),
    }
}

pub fn parallel_section(
    basis: &ParallelBasis,
    witness: Option<&SkewEndomorphism>,
    tol: &Tolerance,
) -> ParallelSection {
    ParallelSection {
        dimension: basis.dim(),
        basis: basis
            .elements
            .iter()
            .map(|e| matrix_dto(e.matrix()))
            .collect(),
        classes: basis
            .elements
            .iter()
            .map(|e| SpectralClassDto::from_class(&metlie::classify_element(e, tol)))
            .collect(),
        non_complex_witness: witness.map(|w| matrix_dto(w.matrix())),
    }
}

pub fn curvature_section(
    conn: &Connection,
    curv: &CurvatureData,
    ric: &RicciData,
    tol: &Tolerance,
) -> CurvatureSection {
    let n = curv.dim();
    let mut operators = Vec::new();
    let mut derivative_two_forms = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = curv.op(i, j);
            let omega = metlie::matrix_to_two_form(m, tol).expect("curvature operators are skew");
            for k in 0..n {
                let d = metlie::holonomy::covariant_derivative_two_form(conn, k, &omega, tol);
                derivative_two_forms.push(DerivativeTwoFormDto {
                    k,
                    i,
                    j,
                    coeffs: d.coeffs().iter().cloned().collect(),
                });
            }
            operators.push(CurvatureOperatorDto {
                i,
                j,
                matrix: matrix_dto(m),
                two_form: omega.coeffs().iter().cloned().collect(),
            });
        }
    }
    CurvatureSection {
        operators,
        derivative_two_forms,
        ricci: matrix_dto(&ric.operator),
        scalar: ric.scalar,
    }
}

pub fn holonomy_section(hol: &HolonomyAlgebra) -> HolonomySection {
    HolonomySection {
        dimension: hol.rank(),
        level_reached: hol.level_reached,
        stabilized: hol.stabilized,
        basis: hol.basis.iter().map(matrix_dto).collect(),
    }
}

pub fn derham_section(rep: &DeRhamDecomposition) -> DerhamSection {
    let factors = rep
        .factors
        .iter()
        .map(|f| {
            let basis = matrix_dto(f.subspace.basis());
            match f.kind {
                FactorKind::Flat => DerhamFactorDto::Flat {
                    dimension: f.dim(),
                    basis,
                },
                FactorKind::Surface(k) => DerhamFactorDto::Surface {
                    dimension: f.dim(),
                    curvature: k,
                    basis,
                },
                FactorKind::Irreducible => DerhamFactorDto::Irreducible {
                    dimension: f.dim(),
                    basis,
                },
            }
        })
        .collect();
    DerhamSection {
        factors,
        stabilized: rep.stabilized,
        note: "surface curvature evaluated at the identity; constant by left invariance".into(),
    }
}
