//! Command-line frontend: file ingestion, subcommand dispatch, JSON reports.
//!
//! Every subcommand prints one self-describing JSON report to stdout with a
//! fixed key order and floats at 17 significant digits, so identical
//! invocations produce byte-identical output. Exit codes: 0 success,
//! 1 validation error, 2 numerical failure, 64 usage error.

mod matrixfile;
mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pptmaps::channel::{make_gamma, make_schur, ChannelError};
use pptmaps::classify::{
    is_cp, is_ppt, ppt2_verify, schur_ppt_classify, t_ppt_of_adjacency, thresholds, ClassifyError,
    SchurVerdict, TPosOptions, ThresholdOptions,
};
use pptmaps::dynamics::{convergence_report, normalize_channel, DynamicsError, PERIPHERAL_TOL};
use pptmaps::ebcert::{build_certificate, verify_certificate, SeparabilityCertificate};
use pptmaps::graphs::{lovasz_theta_bar, parse_graph, Graph, GraphError};
use pptmaps::matcore::MatError;
use report::{complex_matrix_json, Report};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Parse { .. } | GraphError::Validation { .. } => {
                CliError::Validation(e.to_string())
            }
            GraphError::NoProgress { .. } | GraphError::Mat(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<MatError> for CliError {
    fn from(e: MatError) -> Self {
        match e {
            MatError::NoConvergence { .. } | MatError::Singular => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::Mat(m) => m.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::NotPpt { .. } | ClassifyError::EmptyGraph => {
                CliError::Validation(e.to_string())
            }
            ClassifyError::Channel(c) => c.into(),
            ClassifyError::Graph(g) => g.into(),
            ClassifyError::Mat(m) => m.into(),
            ClassifyError::Cert(c) => CliError::Validation(c.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::NotScalarUnital { .. } | DynamicsError::NotNormalized { .. } => {
                CliError::Validation(e.to_string())
            }
            DynamicsError::Channel(c) => c.into(),
            DynamicsError::Mat(m) => m.into(),
            DynamicsError::DefectivePeripheralSpectrum { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pptmaps",
    version,
    about = "Classify the graph channel family gamma_{t,A} = t*delta + S_A, certify separability, and trace channel iterates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full threshold report for a graph: t_cp, t_ppt, the p*d upper bound on
    /// t_eb, and all positivity lower bounds.
    Thresholds {
        /// Graph file in edge-list format ("p m" header, then "u v" lines).
        graph: PathBuf,
        /// Seed for the positivity-witness search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restarts for the positivity-witness search.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Iterations per restart for the positivity-witness search.
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Subgradient iterations for the theta bound.
        #[arg(long, default_value_t = 20_000)]
        theta_iters: usize,
    },
    /// Minimize lambda_max over the feasible pattern: the Lovász theta number
    /// of the complement, with certificate matrix.
    Theta {
        graph: PathBuf,
        #[arg(long, default_value_t = 20_000)]
        iters: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Build and exactly verify the separability certificate for
    /// gamma_{pd,A}.
    Certify {
        graph: PathBuf,
        /// Also write the certificate JSON to this path.
        #[arg(long)]
        cert_out: Option<PathBuf>,
    },
    /// Compose gamma_{t1,A} with gamma_{t2,B} (defaults: the PPT thresholds)
    /// and certify that the composition is entanglement breaking.
    Ppt2 {
        graph_a: PathBuf,
        graph_b: PathBuf,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        t2: Option<f64>,
    },
    /// Iterate the normalized channel (1/t) gamma_{t,A} and report the decay
    /// of the distance to its idempotent limit.
    Iterate {
        graph: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 25)]
        steps: usize,
    },
    /// Classify a Schur multiplier S_P from a dense complex matrix file.
    ClassifySchur {
        /// First line "rows cols", then rows of "a+bi" entries.
        matrix_file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Parse argv and run; returns the process exit code after printing the JSON
/// report to stdout (diagnostics go to stderr).
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    match dispatch(cli.command) {
        Ok(json) => {
            println!("{json}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_graph(&text)?)
}

fn graph_echo(path: &Path, g: &Graph) -> serde_json::Value {
    json!({
        "file": path.display().to_string(),
        "p": g.vertex_count(),
        "undirected_edges": g.edge_count(),
        "edges": g.edges().collect::<Vec<_>>(),
    })
}

fn emit<R: Serialize>(report: &Report<R>) -> Result<String, CliError> {
    report
        .to_json_string()
        .map_err(|e| CliError::Numerical(format!("report serialization failed: {e}")))
}

fn dispatch(cmd: Command) -> Result<String, CliError> {
    match cmd {
        Command::Thresholds {
            graph,
            seed,
            restarts,
            iters,
            theta_iters,
        } => {
            let g = load_graph(&graph)?;
            let opts = ThresholdOptions {
                theta_iters,
                theta_tol: 1e-7,
                tpos: TPosOptions {
                    restarts,
                    iters,
                    seed,
                    ..Default::default()
                },
            };
            let report = thresholds(&g, &opts)?;
            emit(&Report {
                command: "thresholds".into(),
                inputs: json!({
                    "graph": graph_echo(&graph, &g),
                    "edge_convention": "ordered",
                    "seed": seed,
                    "restarts": restarts,
                    "iters": iters,
                    "theta_iters": theta_iters,
                }),
                results: report,
                tolerances: json!({
                    "psd": 1e-9,
                    "hermitian": 1e-12,
                    "theta": 1e-7,
                    "t_pos_step_floor": TPosOptions::default().tol,
                }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
        Command::Theta { graph, iters, tol } => {
            let g = load_graph(&graph)?;
            let sol = lovasz_theta_bar(&g, iters, tol)?;
            emit(&Report {
                command: "theta".into(),
                inputs: json!({
                    "graph": graph_echo(&graph, &g),
                    "iters": iters,
                }),
                results: json!({
                    "value": sol.value,
                    "iterations": sol.iterations,
                    "gap_estimate": sol.gap_estimate,
                    "h": complex_matrix_json(&sol.h),
                }),
                tolerances: json!({ "theta": tol, "hermitian": 1e-12 }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
        Command::Certify { graph, cert_out } => {
            let g = load_graph(&graph)?;
            let a = g.adjacency_matrix();
            let cert = build_certificate(&a).map_err(|e| CliError::Validation(e.to_string()))?;
            let verification = verify_certificate(&cert, &a);
            let (verified, failure) = match &verification {
                Ok(()) => (true, None),
                Err(e) => (false, Some(e.to_string())),
            };
            if let Some(path) = &cert_out {
                let body = certificate_json(&cert)?;
                std::fs::write(path, body).map_err(|e| {
                    CliError::Validation(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            let d = g.max_degree();
            emit(&Report {
                command: "certify".into(),
                inputs: json!({
                    "graph": graph_echo(&graph, &g),
                    "level_t": (g.vertex_count() * d) as f64,
                }),
                results: json!({
                    "verified": verified,
                    "failure": failure,
                    "scale": cert.scale,
                    "term_count": cert.terms.len(),
                    "certificate": cert,
                }),
                tolerances: json!({ "arithmetic": "exact gaussian integers" }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
        Command::Ppt2 {
            graph_a,
            graph_b,
            t1,
            t2,
        } => {
            let ga = load_graph(&graph_a)?;
            let gb = load_graph(&graph_b)?;
            let a = ga.adjacency_matrix();
            let b = gb.adjacency_matrix();
            if ga.vertex_count() != gb.vertex_count() {
                return Err(CliError::Validation(format!(
                    "graphs must share a vertex count, got {} and {}",
                    ga.vertex_count(),
                    gb.vertex_count()
                )));
            }
            let t_ppt_a = t_ppt_of_adjacency(&a)?;
            let t_ppt_b = t_ppt_of_adjacency(&b)?;
            let t1 = t1.unwrap_or(t_ppt_a);
            let t2 = t2.unwrap_or(t_ppt_b);
            let (composition_is_gamma, eb_certified) = ppt2_verify(&a, &b, t1, t2)?;
            let p = ga.vertex_count();
            let product_edges: Vec<(usize, usize)> =
                ga.edges().filter(|&(u, v)| gb.has_edge(u, v)).collect();
            emit(&Report {
                command: "ppt2".into(),
                inputs: json!({
                    "graph_a": graph_echo(&graph_a, &ga),
                    "graph_b": graph_echo(&graph_b, &gb),
                    "t1": t1,
                    "t2": t2,
                }),
                results: json!({
                    "t_ppt_a": t_ppt_a,
                    "t_ppt_b": t_ppt_b,
                    "t_product": t1 * t2,
                    "schur_product_edges": product_edges,
                    "composition_is_gamma": composition_is_gamma,
                    "eb_certified": eb_certified,
                    "p": p,
                }),
                tolerances: json!({ "entrywise": 1e-10, "psd": 1e-9 }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
        Command::Iterate { graph, t, steps } => {
            if steps < 2 {
                return Err(CliError::Validation("--steps must be at least 2".into()));
            }
            let g = load_graph(&graph)?;
            let a = g.adjacency_matrix();
            let gamma = make_gamma(t, &a)?;
            let phi = normalize_channel(&gamma)?;
            let trace = convergence_report(&phi, steps)?;
            let pairs: Vec<(usize, f64)> = trace
                .k_values
                .iter()
                .copied()
                .zip(trace.distances.iter().copied())
                .collect();
            emit(&Report {
                command: "iterate".into(),
                inputs: json!({
                    "graph": graph_echo(&graph, &g),
                    "t": t,
                    "steps": steps,
                    "map": format!("(1/{t}) * gamma_{{t,A}}"),
                }),
                results: json!({
                    "norm": "frobenius (transfer matrices)",
                    "distances": pairs,
                    "fitted_rate": trace.fitted_rate,
                    "psi_idempotency_error": trace.psi_idempotency_error,
                    "psi_is_ppt": trace.psi_is_ppt,
                    "adjoint_side": trace.adjoint_side,
                    // The distances bound d(phi^k, EB) only when psi is PPT.
                    "eb_distance_bound": trace.is_eb_distance_bound(),
                }),
                tolerances: json!({
                    "peripheral": PERIPHERAL_TOL,
                    "idempotency": 1e-7,
                    "psd": 1e-9,
                }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
        Command::ClassifySchur { matrix_file, tol } => {
            let text = std::fs::read_to_string(&matrix_file).map_err(|e| {
                CliError::Validation(format!("cannot read {}: {e}", matrix_file.display()))
            })?;
            let pattern = matrixfile::parse_matrix(&text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", matrix_file.display())))?;
            if !pattern.is_square() {
                return Err(CliError::Validation(format!(
                    "Schur pattern must be square, got {}x{}",
                    pattern.rows(),
                    pattern.cols()
                )));
            }
            let verdict = schur_ppt_classify(&pattern, tol);
            let channel = make_schur(&pattern)?;
            let (_, min_eig) = is_cp(&channel, tol);
            let (_, min_eig_pt) = is_ppt(&channel, tol);
            let mut off = 0.0f64;
            for i in 0..pattern.rows() {
                for j in 0..pattern.cols() {
                    if i != j {
                        off = off.max(pattern[(i, j)].norm());
                    }
                }
            }
            emit(&Report {
                command: "classify-schur".into(),
                inputs: json!({
                    "matrix_file": matrix_file.display().to_string(),
                    "rows": pattern.rows(),
                    "cols": pattern.cols(),
                }),
                results: json!({
                    "verdict": verdict_name(verdict),
                    "choi_min_eig": min_eig,
                    "choi_pt_min_eig": min_eig_pt,
                    "off_diagonal_max": off,
                }),
                tolerances: json!({ "psd": tol, "hermitian": 1e-12 }),
                version: env!("CARGO_PKG_VERSION").into(),
            })
        }
    }
}

fn verdict_name(v: SchurVerdict) -> &'static str {
    match v {
        SchurVerdict::NotCp => "NotCP",
        SchurVerdict::CpNotPpt => "CPNotPPT",
        SchurVerdict::Ppt => "PPT",
    }
}

/// Certificate JSON with the same 17-digit float policy (certificates are
/// all-integer, so this is just the shared writer).
fn certificate_json(cert: &SeparabilityCertificate) -> Result<String, CliError> {
    report::to_json_string_17(cert)
        .map_err(|e| CliError::Numerical(format!("certificate serialization failed: {e}")))
}

pub use matrixfile::parse_matrix;
pub use report::to_json_string_17;
