//! `ncg`: command-line frontend for the spectral-triple numerics library.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
//! parse errors. Machine-readable output is JSON with a `schema_version`
//! field; complex numbers are `[re, im]` pairs. Every long flag can also
//! be set through an environment variable with the `NCG_` prefix
//! (`--tol` -> `NCG_TOL`, `--gamma-basis` -> `NCG_GAMMA_BASIS`, ...).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use ncg_core::clifford;
use ncg_core::fields::{FieldConfig, Moments};
use ncg_core::fluctuation::{fluctuate, hermitize, OneForm};
use ncg_core::io::{
    self, blocks_to_element, matrix_to_json, parse_algebra_atlas, parse_atlas,
    parse_field_config, parse_triple_spec, JsonMatrix,
};
use ncg_core::lagrangian::{
    action_breakdown, density_gauge, density_gravity, density_higgs, higgs_boundary_term,
};
use ncg_core::lattice::Lattice;
use ncg_core::moduli::{constraint_residual, solve_moduli};
use ncg_core::product::build_product;
use ncg_core::report::Report;
use ncg_core::triple::{build_triple, FiniteTriple};
use ncg_core::cech::verify_lift;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "ncg", version, about = "Finite spectral triples, gauge groups, spectral actions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Absolute tolerance on matrix-entry residuals.
    #[arg(long, global = true, default_value_t = 1e-10, env = "NCG_TOL")]
    tol: f64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, env = "NCG_FORMAT")]
    format: Format,
    /// Seed for randomized runs; echoed into the output for reproducibility.
    #[arg(long, global = true, default_value_t = 0, env = "NCG_SEED")]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build a triple from a spec file and verify all axioms.
    Check { spec: PathBuf },
    /// Report the gauge-group structure of a triple.
    GaugeGroup { spec: PathBuf },
    /// Solve for the moduli space of admissible Dirac matrices.
    DiracModuli { spec: PathBuf },
    /// Apply an inner fluctuation built from (a, b) coefficient blocks.
    Fluctuate {
        spec: PathBuf,
        /// JSON file {"terms": [{"a": [blocks], "b": [blocks]}, ...]}.
        #[arg(long)]
        coefficients: PathBuf,
    },
    /// Evaluate the spectral-action Lagrangian on a field configuration.
    Lagrangian {
        spec: PathBuf,
        fields: PathBuf,
        #[arg(long, default_value_t = 1.0, env = "NCG_F0")]
        f0: f64,
        #[arg(long, default_value_t = 1.0, env = "NCG_F2")]
        f2: f64,
        #[arg(long, default_value_t = 1.0, env = "NCG_F4")]
        f4: f64,
        /// Cutoff scale.
        #[arg(long, default_value_t = 1.0, env = "NCG_LAMBDA")]
        lambda: f64,
        /// Write per-site densities as CSV to this path.
        #[arg(long)]
        densities: Option<PathBuf>,
    },
    /// Assemble the product Dirac operator and compute its spectrum.
    Spectrum {
        spec: PathBuf,
        /// Field-configuration file; omit for zero fields on --lattice.
        fields: Option<PathBuf>,
        /// Lattice shape, e.g. 4x4x4x4; required when no fields file is given.
        #[arg(long, env = "NCG_LATTICE")]
        lattice: Option<String>,
        /// Lattice spacing for --lattice.
        #[arg(long, default_value_t = 1.0, env = "NCG_SPACING")]
        spacing: f64,
        /// Gamma-matrix basis identifier.
        #[arg(long, default_value = "standard", env = "NCG_GAMMA_BASIS")]
        gamma_basis: String,
        /// Cutoff scale for the Gaussian spectral-action trace.
        #[arg(long, default_value_t = 1.0, env = "NCG_LAMBDA")]
        lambda: f64,
        /// Write the sorted eigenvalues as CSV to this path.
        #[arg(long)]
        eigenvalues: Option<PathBuf>,
    },
    /// Verify cocycle data in an atlas file.
    Cech {
        atlas: PathBuf,
        /// Triple spec; required for --lift.
        #[arg(long)]
        triple: Option<PathBuf>,
        /// Algebra-valued candidate cocycle to verify as a lift of ATLAS.
        #[arg(long, requires = "triple")]
        lift: Option<PathBuf>,
        /// Also check the connection transformation law.
        #[arg(long)]
        connection: bool,
    },
}

/// A recoverable command failure: exit 2 plus a diagnostic.
struct UsageError(String);

macro_rules! usage_from {
    ($($t:ty),* $(,)?) => {
        $(impl From<$t> for UsageError {
            fn from(e: $t) -> Self {
                UsageError(e.to_string())
            }
        })*
    };
}

usage_from!(
    ncg_core::triple::TripleError,
    ncg_core::cech::CechError,
    ncg_core::fields::FieldError,
    ncg_core::lattice::LatticeError,
    ncg_core::clifford::CliffordError,
    ncg_core::product::ProductError,
    ncg_core::lagrangian::LagrangianError,
    io::IoError,
    std::io::Error,
);

fn read_file(path: &Path) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn load_triple(path: &Path, tol: f64) -> Result<FiniteTriple<f64>, UsageError> {
    let (data, dirac) = parse_triple_spec(&read_file(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    let t = build_triple(data, dirac).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(t.with_tolerance(tol))
}

fn report_to_json(rep: &Report) -> Value {
    serde_json::to_value(rep).expect("serializable")
}

fn report_lines(rep: &Report, out: &mut Vec<String>) {
    for c in &rep.checks {
        out.push(format!(
            "{:<40} {:>12.3e}  {}",
            c.name,
            c.residual,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
}

/// Result of one subcommand: JSON fields, text lines and the verdict.
struct Outcome {
    fields: Map<String, Value>,
    lines: Vec<String>,
    passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            fields: Map::new(),
            lines: Vec::new(),
            passed: true,
        }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.fields.insert(key.to_string(), v);
    }

    fn report(&mut self, key: &str, rep: &Report) {
        self.passed &= rep.passed();
        self.put(key, report_to_json(rep));
        report_lines(rep, &mut self.lines);
    }
}

fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    let tol = cli.tol;
    match &cli.command {
        Command::Check { spec } => {
            let t = load_triple(spec, tol)?;
            let mut out = Outcome::new();
            out.put("dim_h", json!(t.dim_h()));
            out.put("ko", json!(t.data().ko.n));
            out.lines.push(format!("dim_h: {}", t.dim_h()));
            out.report("axioms", &t.verify_axioms());
            Ok(out)
        }
        Command::GaugeGroup { spec } => {
            let t = load_triple(spec, tol)?;
            let g = t.gauge_structure();
            let mut out = Outcome::new();
            let components: Vec<Vec<usize>> = g
                .components
                .iter()
                .map(|c| c.iter().map(|&i| i + 1).collect())
                .collect();
            out.put("components", json!(components));
            out.put("dim_u_af", json!(g.dim_u_af));
            out.put("dim_aj", json!(g.dim_aj));
            out.put("gauge_lie_dim", json!(g.gauge_lie_dim));
            out.put("tau_rank", json!(g.tau_rank));
            out.lines.push(format!("components (1-based): {components:?}"));
            out.lines.push(format!("dim u(A):      {}", g.dim_u_af));
            out.lines.push(format!("dim (A)_J:     {}", g.dim_aj));
            out.lines.push(format!("gauge Lie dim: {}", g.gauge_lie_dim));
            out.lines.push(format!("rank tau:      {}", g.tau_rank));
            Ok(out)
        }
        Command::DiracModuli { spec } => {
            let t = load_triple(spec, tol)?;
            let space = solve_moduli(&t);
            let mut out = Outcome::new();
            out.put("real_dim", json!(space.real_dim));
            out.put("min_gap_ratio", json!(space.min_gap_ratio));
            out.put(
                "basis",
                json!(space.basis.iter().map(matrix_to_json).collect::<Vec<_>>()),
            );
            out.lines.push(format!("real_dim: {}", space.real_dim));
            out.lines
                .push(format!("min_gap_ratio: {:.3e}", space.min_gap_ratio));
            let mut rep = Report::new(tol);
            for (k, b) in space.basis.iter().enumerate() {
                rep.push(format!("constraint_residual_{k}"), constraint_residual(&t, b));
            }
            out.report("residuals", &rep);
            Ok(out)
        }
        Command::Fluctuate { spec, coefficients } => {
            let t = load_triple(spec, tol)?;
            let text = read_file(coefficients)?;
            let file: CoefficientFile = serde_json::from_str(&text)
                .map_err(|e| UsageError(format!("{}: {e}", coefficients.display())))?;
            let mut one_form = OneForm { terms: Vec::new() };
            for (k, term) in file.terms.iter().enumerate() {
                let field = format!("terms[{k}]");
                let a = blocks_to_element(&term.a, t.dims(), &field)
                    .map_err(|e| UsageError(format!("{}: {e}", coefficients.display())))?;
                let b = blocks_to_element(&term.b, t.dims(), &field)
                    .map_err(|e| UsageError(format!("{}: {e}", coefficients.display())))?;
                one_form.push(a, b);
            }
            let a = hermitize(&one_form.operator(&t));
            let d_a = fluctuate(&t, &a)?;
            let mut out = Outcome::new();
            out.put("one_form", json!(matrix_to_json(&a)));
            out.put("d_a", json!(matrix_to_json(&d_a)));
            let max = d_a
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            out.put("d_a_max_entry", json!(max));
            out.lines.push(format!("terms: {}", file.terms.len()));
            out.lines.push(format!("max |D_A| entry: {max:.6e}"));
            Ok(out)
        }
        Command::Lagrangian {
            spec,
            fields,
            f0,
            f2,
            f4,
            lambda,
            densities,
        } => {
            let t = load_triple(spec, tol)?;
            let cfg = parse_field_config(&read_file(fields)?)
                .map_err(|e| UsageError(format!("{}: {e}", fields.display())))?;
            let m = Moments::new(*f0, *f2, *f4, *lambda)?;
            let mut out = Outcome::new();
            out.report("fields", &cfg.validate(&t));
            if !out.passed {
                return Ok(out);
            }
            let breakdown = action_breakdown(&cfg, &m)?;
            out.put("gauge", json!(breakdown.gauge));
            out.put("higgs", json!(breakdown.higgs));
            out.put("higgs_boundary", json!(breakdown.higgs_boundary));
            out.put("gravity", json!(breakdown.gravity));
            out.put("total", json!(breakdown.total));
            out.lines.push(format!("gauge:          {:.12e}", breakdown.gauge));
            out.lines.push(format!("higgs:          {:.12e}", breakdown.higgs));
            out.lines
                .push(format!("higgs boundary: {:.12e}", breakdown.higgs_boundary));
            out.lines.push(format!("gravity:        {:.12e}", breakdown.gravity));
            out.lines.push(format!("total:          {:.12e}", breakdown.total));
            if let Some(path) = densities {
                let g = density_gauge(&cfg, &m)?;
                let h = density_higgs(&cfg, &m)?;
                let hb = higgs_boundary_term(&cfg, &m)?;
                let gr = density_gravity(&cfg, &m, cfg.dim_h)?;
                let mut csv = String::from("site,gauge,higgs,higgs_boundary,gravity\n");
                for s in 0..cfg.lattice.n_sites() {
                    csv.push_str(&format!("{},{:e},{:e},{:e},{:e}\n", s + 1, g[s], h[s], hb[s], gr[s]));
                }
                fs::write(path, csv)
                    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                out.put("densities_csv", json!(path.display().to_string()));
            }
            Ok(out)
        }
        Command::Spectrum {
            spec,
            fields,
            lattice,
            spacing,
            gamma_basis,
            lambda,
            eigenvalues,
        } => {
            if gamma_basis != "standard" {
                return Err(UsageError(format!(
                    "unknown gamma basis `{gamma_basis}` (available: standard)"
                )));
            }
            let t = load_triple(spec, tol)?;
            let cfg = match fields {
                Some(path) => parse_field_config(&read_file(path)?)
                    .map_err(|e| UsageError(format!("{}: {e}", path.display())))?,
                None => {
                    let shape = lattice
                        .as_deref()
                        .ok_or(UsageError("--lattice required without a fields file".into()))?;
                    let shape = parse_shape(shape)?;
                    FieldConfig::zero(Lattice::new(shape, *spacing)?, t.dim_h())
                }
            };
            let lat = cfg.lattice.clone();
            let cl = clifford::standard::<f64>(lat.dim())?;
            let mut out = Outcome::new();
            out.report("fields", &cfg.validate(&t));
            if !out.passed {
                return Ok(out);
            }
            let op = build_product(&lat, &cl, &cfg, &t)?;
            out.report("structure", &op.verify_structure());
            if lat.dim() == 4 {
                let (rep, ko) = op.verify_ko()?;
                out.put("product_ko", json!(ko.n));
                out.lines.push(format!("product KO-dimension: {}", ko.n));
                out.report("ko_signs", &rep);
            }
            let eigs = op.eigenvalues();
            let trace = op.spectral_action_trace(|x| (-x * x).exp(), *lambda);
            out.put("n_eigenvalues", json!(eigs.len()));
            out.put("trace_gaussian", json!(trace));
            out.put("lambda", json!(lambda));
            out.lines.push(format!("eigenvalues: {}", eigs.len()));
            out.lines
                .push(format!("Tr exp(-(D/Lambda)^2) = {trace:.12e}"));
            match eigenvalues {
                Some(path) => {
                    let mut csv = String::from("eigenvalue\n");
                    for e in &eigs {
                        csv.push_str(&format!("{e:e}\n"));
                    }
                    fs::write(path, csv)
                        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
                    out.put("eigenvalues_csv", json!(path.display().to_string()));
                }
                None => out.put("eigenvalues", json!(eigs)),
            }
            Ok(out)
        }
        Command::Cech {
            atlas,
            triple,
            lift,
            connection,
        } => {
            let text = read_file(atlas)?;
            let a = parse_atlas(&text)
                .map_err(|e| UsageError(format!("{}: {e}", atlas.display())))?;
            let mut out = Outcome::new();
            out.report("atlas", &a.validate(tol));
            out.report("cocycle", &a.verify_cocycle(tol)?);
            if *connection {
                out.report("connection", &a.verify_connection_compat(tol)?);
            }
            if let Some(lift_path) = lift {
                let t = load_triple(triple.as_ref().expect("clap requires"), tol)?;
                let candidate = parse_algebra_atlas(&read_file(lift_path)?, t.dims())
                    .map_err(|e| UsageError(format!("{}: {e}", lift_path.display())))?;
                out.report("lift", &verify_lift(&candidate, &a, &t, tol)?);
            }
            Ok(out)
        }
    }
}

#[derive(serde::Deserialize)]
struct CoefficientFile {
    terms: Vec<CoefficientTerm>,
}

#[derive(serde::Deserialize)]
struct CoefficientTerm {
    a: Vec<JsonMatrix>,
    b: Vec<JsonMatrix>,
}

fn parse_shape(s: &str) -> Result<Vec<usize>, UsageError> {
    s.split('x')
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| UsageError(format!("bad lattice shape `{s}` (expected e.g. 4x4x4x4)")))
        })
        .collect()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::GaugeGroup { .. } => "gauge-group",
        Command::DiracModuli { .. } => "dirac-moduli",
        Command::Fluctuate { .. } => "fluctuate",
        Command::Lagrangian { .. } => "lagrangian",
        Command::Spectrum { .. } => "spectrum",
        Command::Cech { .. } => "cech",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => {
                    let mut root = Map::new();
                    root.insert("schema_version".into(), json!(SCHEMA_VERSION));
                    root.insert("command".into(), json!(command_name(&cli.command)));
                    root.insert("tolerance".into(), json!(cli.tol));
                    root.insert("seed".into(), json!(cli.seed));
                    root.insert("passed".into(), json!(out.passed));
                    for (k, v) in out.fields {
                        root.insert(k, v);
                    }
                    println!("{}", serde_json::to_string_pretty(&Value::Object(root)).unwrap());
                }
                Format::Text => {
                    for line in &out.lines {
                        println!("{line}");
                    }
                    println!("result: {}", if out.passed { "pass" } else { "FAIL" });
                }
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
