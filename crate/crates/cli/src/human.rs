//! Plain-text rendering of an analysis report.

use std::fmt::Write;

use crate::report::*;

/// Fixed 6-significant-digit decimal, stable across runs. Values below the
/// default absolute tolerance render as a plain zero.
pub fn sig6(x: f64) -> String {
    if x.abs() < 1e-12 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 12) as usize;
    format!("{x:.decimals$}")
}

fn write_matrix(out: &mut String, m: &Matrix, indent: &str) {
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| format!("{:>12}", sig6(*v))).collect();
        let _ = writeln!(out, "{indent}[{}]", cells.join(" "));
    }
}

fn poly_string(p: &[f64]) -> String {
    // highest degree first, unit leading coefficient
    let d = p.len() - 1;
    let mut out = String::new();
    for (i, c) in p.iter().enumerate() {
        if c.abs() < 1e-14 {
            continue;
        }
        let pow = d - i;
        let var = match pow {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{pow}"),
        };
        let magnitude = if pow != 0 && (c.abs() - 1.0).abs() < 1e-14 {
            String::new()
        } else {
            sig6(c.abs())
        };
        let sep = if magnitude.is_empty() || var.is_empty() {
            ""
        } else {
            " "
        };
        if out.is_empty() {
            let sign = if *c < 0.0 { "-" } else { "" };
            out.push_str(&format!("{sign}{magnitude}{sep}{var}"));
        } else {
            let sign = if *c < 0.0 { " - " } else { " + " };
            out.push_str(&format!("{sign}{magnitude}{sep}{var}"));
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

/// Render a 2-form from its coefficients over the lexicographic wedge basis.
fn two_form_string(coeffs: &[f64]) -> String {
    // recover the dimension from len = n(n-1)/2
    let mut n = 1usize;
    while n * (n - 1) / 2 < coeffs.len() {
        n += 1;
    }
    let mut out = String::new();
    let mut p = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = coeffs[p];
            p += 1;
            if c.abs() < 1e-12 {
                continue;
            }
            if out.is_empty() {
                let sign = if c < 0.0 { "-" } else { "" };
                out.push_str(&format!("{sign}{} e^{{{i}{j}}}", sig6(c.abs())));
            } else {
                let sign = if c < 0.0 { " - " } else { " + " };
                out.push_str(&format!("{sign}{} e^{{{i}{j}}}", sig6(c.abs())));
            }
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

pub fn render(report: &AnalysisReport) -> String {
    let mut out = String::new();
    match &report.input {
        InputEcho::Entry { name, params } => {
            let ps: Vec<String> = params
                .iter()
                .map(|(k, v)| format!("{k}={}", sig6(*v)))
                .collect();
            let _ = writeln!(out, "input: catalog entry `{name}` [{}]", ps.join(", "));
        }
        InputEcho::File { path, sha256 } => {
            let _ = writeln!(out, "input: file `{path}` (sha256 {sha256})");
        }
    }
    let _ = writeln!(
        out,
        "tolerance: rel={:e} abs={:e}  seed: {}",
        report.tolerance.rel, report.tolerance.abs, report.seed
    );

    if let Some(c) = &report.sections.check {
        let _ = writeln!(out, "\n== check ==");
        let _ = writeln!(
            out,
            "dim {} | valid: {} | jacobi residual {:.3e}",
            c.dim, c.valid, c.jacobi_residual
        );
        let _ = writeln!(
            out,
            "derived subalgebra dim {} | center dim {}",
            c.derived_dim, c.center_dim
        );
    }

    if let Some(c) = &report.sections.connection {
        let _ = writeln!(out, "\n== connection (orthonormal frame) ==");
        let _ = writeln!(out, "frame columns in the input basis:");
        write_matrix(&mut out, &c.frame, "  ");
        for (i, g) in c.operators.iter().enumerate() {
            let _ = writeln!(out, "operator {i}:");
            write_matrix(&mut out, g, "  ");
        }
    }

    if let Some(p) = &report.sections.parallel {
        let _ = writeln!(out, "\n== parallel skew-symmetric endomorphisms ==");
        let _ = writeln!(out, "dimension: {}", p.dimension);
        for (i, (m, class)) in p.basis.iter().zip(&p.classes).enumerate() {
            let speeds: Vec<String> = class.rotation_speeds.iter().map(|a| sig6(*a)).collect();
            let _ = writeln!(
                out,
                "basis[{i}]: speeds [{}], kernel dim {}, complex multiple: {}, complex structure: {}",
                speeds.join(", "),
                class.kernel_dim,
                class.is_complex_multiple,
                class.is_complex_structure
            );
            write_matrix(&mut out, m, "  ");
        }
        match &p.non_complex_witness {
            Some(w) => {
                let _ = writeln!(out, "witness not a complex multiple:");
                write_matrix(&mut out, w, "  ");
            }
            None if p.dimension > 0 => {
                let _ = writeln!(
                    out,
                    "every parallel element is a multiple of a complex structure"
                );
            }
            None => {}
        }
    }

    if let Some(c) = &report.sections.curvature {
        let _ = writeln!(out, "\n== curvature ==");
        for op in &c.operators {
            let _ = writeln!(
                out,
                "R(e{}, e{}) = {}:",
                op.i,
                op.j,
                two_form_string(&op.two_form)
            );
            write_matrix(&mut out, &op.matrix, "  ");
        }
        for d in &c.derivative_two_forms {
            let _ = writeln!(
                out,
                "nabla_e{} R^{{{}{}}} = {}",
                d.k,
                d.i,
                d.j,
                two_form_string(&d.coeffs)
            );
        }
        let _ = writeln!(out, "Ricci operator:");
        write_matrix(&mut out, &c.ricci, "  ");
        let _ = writeln!(out, "scalar curvature: {}", sig6(c.scalar));
    }

    if let Some(fps) = &report.sections.fingerprints {
        let _ = writeln!(out, "\n== fingerprints ==");
        for fp in fps {
            let _ = writeln!(out, "tensor {}:", fp.source);
            let _ = writeln!(out, "  ric charpoly:     {}", poly_string(&fp.ric_charpoly));
            let _ = writeln!(out, "  h charpoly:       {}", poly_string(&fp.h_charpoly));
            let restriction = |r: &Option<Vec<f64>>| match r {
                Some(p) => poly_string(p),
                None => "(subspace not preserved)".to_string(),
            };
            let _ = writeln!(
                out,
                "  h on derived:     {}",
                restriction(&fp.h_on_derived_charpoly)
            );
            let _ = writeln!(
                out,
                "  h on center:      {}",
                restriction(&fp.h_on_center_charpoly)
            );
            let _ = writeln!(
                out,
                "  killing charpoly: {}",
                poly_string(&fp.killing_charpoly)
            );
            let d = &fp.dims;
            let _ = writeln!(
                out,
                "  dims: g={} [g,g]={} z(g)={} [[g,g],[g,g]]={} parallel={}",
                d.dim, d.derived, d.center, d.second_derived, d.parallel
            );
        }
    }

    if let Some(h) = &report.sections.holonomy {
        let _ = writeln!(out, "\n== holonomy algebra ==");
        let _ = writeln!(
            out,
            "dimension: {} | derivative level reached: {} | stabilized: {}",
            h.dimension, h.level_reached, h.stabilized
        );
        for (i, b) in h.basis.iter().enumerate() {
            let _ = writeln!(out, "basis[{i}]:");
            write_matrix(&mut out, b, "  ");
        }
    }

    if let Some(d) = &report.sections.derham {
        let _ = writeln!(out, "\n== de Rham factors ==");
        let labels: Vec<String> = d
            .factors
            .iter()
            .map(|f| match f {
                DerhamFactorDto::Flat { dimension, .. } => format!("Flat({dimension})"),
                DerhamFactorDto::Surface { curvature, .. } => {
                    format!("Surface(K={})", sig6(*curvature))
                }
                DerhamFactorDto::Irreducible { dimension, .. } => {
                    format!("Irreducible({dimension})")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", labels.join(" x "));
        for (f, label) in d.factors.iter().zip(&labels) {
            let basis = match f {
                DerhamFactorDto::Flat { basis, .. } => basis,
                DerhamFactorDto::Surface { basis, .. } => basis,
                DerhamFactorDto::Irreducible { basis, .. } => basis,
            };
            let _ = writeln!(out, "{label}: basis columns");
            write_matrix(&mut out, basis, "  ");
        }
        let _ = writeln!(out, "note: {}", d.note);
        if !d.stabilized {
            let _ = writeln!(out, "warning: holonomy span not stabilized");
        }
    }

    if !report.diagnostics.warnings.is_empty() || !report.diagnostics.residuals.is_empty() {
        let _ = writeln!(out, "\n== diagnostics ==");
        for w in &report.diagnostics.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for (name, r) in &report.diagnostics.residuals {
            let _ = writeln!(out, "residual {name}: {r:.3e}");
        }
    }
    out
}
