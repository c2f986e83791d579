//! Command-line front end for the metric Lie algebra toolkit.
//!
//! Exit codes: 0 on success, 1 when the analysis itself finds a violation
//! (invalid algebra, non-parallel designated tensor), 2 on usage or parse
//! errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use metlie::catalog;
use metlie::connection::algebra_in_frame;
use metlie::holonomy::{derham_report, holonomy_algebra};
use metlie::input::{AlgebraSpec, InputError};
use metlie::parallel::SkewEndomorphism;
use metlie::{
    center, contains_non_complex_multiple, curvature, derived_subalgebra, fingerprint, levi_civita,
    parallel_space, ricci, MetricLieAlgebra, Tolerance,
};

use metlie_cli::human;
use metlie_cli::report::*;

#[derive(Parser)]
#[command(
    name = "metlie",
    version,
    about = "Connection, parallel tensors, curvature, holonomy and de Rham factors of metric Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the algebra and metric, report structural subspaces
    Check(AnalyzeArgs),
    /// Levi-Civita connection operators in the orthonormal frame
    Connection(AnalyzeArgs),
    /// Basis and classification of the parallel skew-symmetric endomorphisms
    Parallel(AnalyzeArgs),
    /// Curvature operators, Ricci operator and scalar curvature
    Curvature(AnalyzeArgs),
    /// Equivalence fingerprints of the designated (or computed) tensors
    Fingerprint(AnalyzeArgs),
    /// Holonomy Lie algebra via curvature operators and their derivatives
    Holonomy(AnalyzeArgs),
    /// Orthogonal invariant factors with flat / surface / irreducible labels
    Derham(AnalyzeArgs),
    /// All sections
    Report(AnalyzeArgs),
    /// Catalog of built-in metric Lie algebras
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the built-in entries and their parameters
    List {
        #[arg(long)]
        json: bool,
    },
    /// Check the designated tensors of an entry against its parallel space
    Verify(AnalyzeArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Algebra-specification file (JSON)
    #[arg(long, conflicts_with = "entry")]
    file: Option<PathBuf>,
    /// Catalog entry name
    #[arg(long)]
    entry: Option<String>,
    /// Entry parameter as key=value (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Machine-readable JSON output
    #[arg(long)]
    json: bool,
    /// Seed for the witness search and commutant splitting
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the relative tolerance
    #[arg(long = "tol-rel")]
    tol_rel: Option<f64>,
    /// Override the absolute tolerance
    #[arg(long = "tol-abs")]
    tol_abs: Option<f64>,
    /// Cap on the covariant-derivative sweep count
    #[arg(long = "max-level")]
    max_level: Option<usize>,
}

enum Failure {
    /// Usage or parse problem (exit 2).
    Usage(String),
    /// Mathematically meaningful negative finding (exit 1).
    Finding(String),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Analysis {
    mla: MetricLieAlgebra,
    tol: Tolerance,
    echo: InputEcho,
    designated: Vec<SkewEndomorphism>,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--param expects KEY=VALUE, got `{item}`")))?;
        let value: f64 = value.parse().map_err(|_| {
            Failure::Usage(format!("parameter `{key}` has non-numeric value `{value}`"))
        })?;
        out.insert(key.to_string(), value);
    }
    Ok(out)
}

fn resolve_tolerance(base: Tolerance, args: &AnalyzeArgs) -> Result<Tolerance, Failure> {
    let rel = args.tol_rel.unwrap_or(base.rel);
    let abs = args.tol_abs.unwrap_or(base.abs);
    Tolerance::new(rel, abs).map_err(Failure::usage)
}

fn load_input(args: &AnalyzeArgs) -> Result<Analysis, Failure> {
    match (&args.file, &args.entry) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let digest: String = Sha256::digest(text.as_bytes())
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect();
            let spec = AlgebraSpec::from_json(&text).map_err(Failure::usage)?;
            let (mla, tol) = spec.load().map_err(|e| match e {
                InputError::Malformed(_) => Failure::usage(e),
                other => Failure::Finding(other.to_string()),
            })?;
            let tol = resolve_tolerance(tol, args)?;
            Ok(Analysis {
                mla,
                tol,
                echo: InputEcho::File {
                    path: path.display().to_string(),
                    sha256: digest,
                },
                designated: Vec::new(),
            })
        }
        (None, Some(name)) => {
            let params = parse_params(&args.params)?;
            let (mla, designated) =
                catalog::catalog_build(name, &params).map_err(Failure::usage)?;
            let tol = resolve_tolerance(Tolerance::default(), args)?;
            Ok(Analysis {
                mla,
                tol,
                echo: InputEcho::Entry {
                    name: name.clone(),
                    params,
                },
                designated,
            })
        }
        _ => Err(Failure::Usage(
            "provide exactly one of --file <path> or --entry <name>".into(),
        )),
    }
}

fn blank_report(analysis: &Analysis, seed: u64) -> AnalysisReport {
    AnalysisReport {
        input: analysis.echo.clone(),
        tolerance: analysis.tol,
        seed,
        sections: Sections::default(),
        diagnostics: Diagnostics::default(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Check,
    Connection,
    Parallel,
    Curvature,
    Fingerprint,
    Holonomy,
    Derham,
}

fn build_report(
    analysis: &Analysis,
    wanted: &[Section],
    args: &AnalyzeArgs,
) -> Result<AnalysisReport, Failure> {
    let tol = &analysis.tol;
    let mla = &analysis.mla;
    let mut rep = blank_report(analysis, args.seed);
    let has = |s: Section| wanted.contains(&s);

    if has(Section::Check) {
        rep.sections.check = Some(CheckSection {
            dim: mla.dim(),
            valid: true,
            jacobi_residual: mla.algebra.jacobi_residual(),
            derived_dim: derived_subalgebra(&mla.algebra, tol).dim(),
            center_dim: center(&mla.algebra, tol).dim(),
        });
    }

    let needs_connection = wanted.iter().any(|s| !matches!(s, Section::Check));
    if !needs_connection {
        return Ok(rep);
    }
    let conn = levi_civita(mla, tol).map_err(|e| Failure::Finding(e.to_string()))?;
    let on = algebra_in_frame(mla, &conn).map_err(|e| Failure::Finding(e.to_string()))?;
    rep.diagnostics
        .residuals
        .insert("connection_skew".into(), conn.skew_residual());
    rep.diagnostics
        .residuals
        .insert("connection_torsion".into(), conn.torsion_residual(&on));

    if has(Section::Connection) {
        rep.sections.connection = Some(connection_section(&conn));
    }

    if has(Section::Parallel) || has(Section::Fingerprint) {
        let basis = parallel_space(&conn, tol);
        let max_residual = basis
            .elements
            .iter()
            .map(|e| e.parallel_residual(&conn))
            .fold(0.0f64, f64::max);
        rep.diagnostics
            .residuals
            .insert("parallel_commutation".into(), max_residual);
        if has(Section::Parallel) {
            let witness = contains_non_complex_multiple(&basis, tol, args.seed);
            rep.sections.parallel = Some(parallel_section(&basis, witness.as_ref(), tol));
        }
        if has(Section::Fingerprint) {
            let mut tensors: Vec<(String, SkewEndomorphism)> = analysis
                .designated
                .iter()
                .enumerate()
                .map(|(i, h)| (format!("designated[{i}]"), h.clone()))
                .collect();
            if tensors.is_empty() {
                match basis.elements.first() {
                    Some(h) => tensors.push(("parallel[0]".into(), h.clone())),
                    None => rep
                        .diagnostics
                        .warnings
                        .push("parallel space is zero; nothing to fingerprint".into()),
                }
            }
            let mut dtos = Vec::new();
            for (source, h) in tensors {
                let fp = fingerprint(mla, &h, tol).map_err(|e| Failure::Finding(e.to_string()))?;
                dtos.push(FingerprintDto::from_fingerprint(source, &fp));
            }
            rep.sections.fingerprints = Some(dtos);
        }
    }

    if has(Section::Curvature) {
        let curv = curvature(&conn, &on, tol).map_err(|e| Failure::Finding(e.to_string()))?;
        let ric = ricci(&curv);
        rep.diagnostics
            .residuals
            .insert("first_bianchi".into(), curv.first_bianchi_residual());
        rep.diagnostics
            .residuals
            .insert("pair_symmetry".into(), curv.pair_symmetry_residual());
        rep.sections.curvature = Some(curvature_section(&conn, &curv, &ric, tol));
    }

    if has(Section::Holonomy) {
        let hol = holonomy_algebra(&conn, &on, args.max_level, tol)
            .map_err(|e| Failure::Finding(e.to_string()))?;
        if !hol.stabilized {
            rep.diagnostics
                .warnings
                .push("holonomy span did not stabilize before max-level".into());
        }
        rep.diagnostics.residuals.insert(
            "holonomy_bracket_closure".into(),
            hol.bracket_closure_residual(),
        );
        rep.sections.holonomy = Some(holonomy_section(&hol));
    }

    if has(Section::Derham) {
        let derham = derham_report(mla, args.max_level, tol, args.seed)
            .map_err(|e| Failure::Finding(e.to_string()))?;
        if !derham.stabilized {
            rep.diagnostics
                .warnings
                .push("holonomy span did not stabilize before max-level".into());
        }
        rep.sections.derham = Some(derham_section(&derham));
    }

    Ok(rep)
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("report serializes")
        );
    } else {
        print!("{}", human());
    }
}

fn run_analysis(args: &AnalyzeArgs, wanted: &[Section]) -> Result<(), Failure> {
    let analysis = load_input(args)?;
    let rep = build_report(&analysis, wanted, args)?;
    emit(args.json, &rep, || human::render(&rep));
    Ok(())
}

#[derive(Serialize)]
struct CatalogEntryDto {
    name: String,
    kind: String,
    dim: usize,
    description: String,
    params: Vec<CatalogParamDto>,
    expected_parallel_dim: Option<usize>,
}

#[derive(Serialize)]
struct CatalogParamDto {
    name: String,
    constraint: String,
    default: f64,
}

fn run_catalog_list(json: bool) {
    let entries: Vec<CatalogEntryDto> = catalog::catalog_list()
        .into_iter()
        .map(|e| CatalogEntryDto {
            name: e.name.to_string(),
            kind: format!("{:?}", e.kind),
            dim: e.dim,
            description: e.description.to_string(),
            params: e
                .params
                .iter()
                .map(|p| CatalogParamDto {
                    name: p.name.to_string(),
                    constraint: p.constraint.to_string(),
                    default: p.default,
                })
                .collect(),
            expected_parallel_dim: e.expected_parallel_dim,
        })
        .collect();
    emit(json, &entries, || {
        let mut out = String::new();
        for e in &entries {
            let params: Vec<String> = e
                .params
                .iter()
                .map(|p| format!("{} ({}, default {})", p.name, p.constraint, p.default))
                .collect();
            let params = if params.is_empty() {
                "-".to_string()
            } else {
                params.join("; ")
            };
            out.push_str(&format!(
                "{:<24} dim {}  [{}]  params: {}\n{:<24} {}\n",
                e.name, e.dim, e.kind, params, "", e.description
            ));
        }
        out
    });
}

#[derive(Serialize)]
struct VerifyDto {
    entry: String,
    params: BTreeMap<String, f64>,
    tensor_residuals: Vec<f64>,
    span_residuals: Vec<f64>,
    parallel_dim: usize,
    expected_parallel_dim: Option<usize>,
    ok: bool,
}

fn run_catalog_verify(args: &AnalyzeArgs) -> Result<(), Failure> {
    let name = args
        .entry
        .as_ref()
        .ok_or_else(|| Failure::Usage("catalog verify needs --entry <name>".into()))?;
    let params = parse_params(&args.params)?;
    let tol = resolve_tolerance(Tolerance::default(), args)?;
    let rep = catalog::verify_table_entry(name, &params, &tol).map_err(Failure::usage)?;
    let dto = VerifyDto {
        entry: rep.entry.clone(),
        params,
        tensor_residuals: rep.tensor_residuals.clone(),
        span_residuals: rep.span_residuals.clone(),
        parallel_dim: rep.parallel_dim,
        expected_parallel_dim: rep.expected_parallel_dim,
        ok: rep.ok,
    };
    emit(args.json, &dto, || {
        let mut out = String::new();
        out.push_str(&format!("entry: {}\n", dto.entry));
        for (i, (t, s)) in dto
            .tensor_residuals
            .iter()
            .zip(&dto.span_residuals)
            .enumerate()
        {
            out.push_str(&format!(
                "designated[{i}]: parallel residual {t:.3e}, span residual {s:.3e}\n"
            ));
        }
        out.push_str(&format!(
            "parallel dimension: {} (expected {})\n",
            dto.parallel_dim,
            dto.expected_parallel_dim
                .map_or("-".to_string(), |d| d.to_string())
        ));
        out.push_str(&format!("ok: {}\n", dto.ok));
        out
    });
    if !rep.ok {
        return Err(Failure::Finding(format!(
            "designated tensors of `{name}` failed verification"
        )));
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    use Section::*;
    match cli.command {
        Command::Check(args) => run_analysis(&args, &[Check]),
        Command::Connection(args) => run_analysis(&args, &[Connection]),
        Command::Parallel(args) => run_analysis(&args, &[Parallel]),
        Command::Curvature(args) => run_analysis(&args, &[Curvature]),
        Command::Fingerprint(args) => run_analysis(&args, &[Fingerprint]),
        Command::Holonomy(args) => run_analysis(&args, &[Holonomy]),
        Command::Derham(args) => run_analysis(&args, &[Derham]),
        Command::Report(args) => run_analysis(
            &args,
            &[
                Check,
                Connection,
                Parallel,
                Curvature,
                Fingerprint,
                Holonomy,
                Derham,
            ],
        ),
        Command::Catalog(CatalogCommand::List { json }) => {
            run_catalog_list(json);
            Ok(())
        }
        Command::Catalog(CatalogCommand::Verify(args)) => run_catalog_verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Finding(msg)) => {
            eprintln!("finding: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
