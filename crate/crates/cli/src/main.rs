//! Command-line front end: theory tables, Monte Carlo experiments against
//! the closed forms, projection-theorem and affine-invariance checks, the
//! identity suites, and hull/angle data for polytope JSON documents.
//!
//! Exit codes: 0 success, 1 statistical failure (|z| at or above the
//! threshold, or a failed identity check), 2 configuration error, 3
//! numerical failure.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::Deserialize;

use polyangles::cones::solid_angle_mc;
use polyangles::error::Error;
use polyangles::geometry::io::{polytope_from_json, polytope_to_json};
use polyangles::geometry::{face_lattice, normal_cone, tangent_cone};
use polyangles::harness::{
    emit_tables, run_affine_invariance, run_experiment, run_projection_theorem, verify_identities,
    ComparisonRow, ExperimentConfig, Model, Quantity, TableSpec,
};
use polyangles::models::{Fixture, FixtureBody};
use polyangles::rng::derive_seed;
use polyangles::theory::DEFAULT_TOL;

#[derive(Parser)]
#[command(
    name = "polyangles",
    about = "Angle sums of random polytopes: closed forms and Monte Carlo verification",
    version
)]
struct Cli {
    /// Override the global geometric tolerance used by hull construction.
    #[arg(long, global = true)]
    geom_eps: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit theory-only tables over a range of n as CSV.
    Tables(TablesArgs),
    /// Run a Monte Carlo experiment and compare it to the closed form.
    Simulate(SimulateArgs),
    /// Check the projection theorem on a deterministic fixture.
    ProjectTheorem(ProjectTheoremArgs),
    /// Run the same experiment on P and on A P and compare the two.
    AffineInvariance(AffineArgs),
    /// Run the exact and quadrature identity suites.
    VerifyIdentities,
    /// Build the hull of a polytope JSON document and report its structure.
    Angles(AnglesArgs),
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long)]
    quantity: String,
    #[arg(long)]
    model: String,
    #[arg(long)]
    n_from: usize,
    #[arg(long)]
    n_to: usize,
    #[arg(long)]
    d: usize,
    /// Face dimension; all dimensions when omitted.
    #[arg(long)]
    j: Option<usize>,
    /// Index for grassmann/intrinsic sums; the full valid range when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config file; command-line flags override nothing when present.
    #[arg(long, conflicts_with_all = ["model", "n", "d", "j"])]
    config: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "f_count")]
    quantity: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 512)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// |z| at or above this value is a statistical failure (exit 1).
    #[arg(long, default_value_t = 3.0)]
    threshold: f64,
    #[arg(long)]
    out: Option<String>,
}

/// JSON form of an experiment configuration.
#[derive(Deserialize)]
struct ConfigFile {
    model: String,
    n: usize,
    d: usize,
    j: usize,
    #[serde(default)]
    k: Option<usize>,
    quantity: String,
    trials: u64,
    samples_per_angle: u64,
    seed: u64,
    #[serde(default)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ProjectTheoremArgs {
    /// Fixture name, e.g. cube(3) or regular-simplex(4).
    #[arg(long)]
    fixture: String,
    /// Face dimension; all valid j when omitted.
    #[arg(long)]
    j: Option<usize>,
    /// Grassmann index; all valid k > j when omitted.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    draws: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3.0)]
    threshold: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AffineArgs {
    #[arg(long, default_value = "gaussian")]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    j: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "internal_sum")]
    quantity: String,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 512)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// The map A: "diag:3,1", "shear:0.5", or row-major "a,b;c,d".
    #[arg(long)]
    map: String,
    #[arg(long, default_value_t = 3.0)]
    threshold: f64,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AnglesArgs {
    /// Path to a JSON document with "dim" and "vertices".
    path: String,
    /// When set, also estimate internal/external angle sums per dimension.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
}

fn write_output(out: &Option<String>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) => 2,
        Error::Io(_) | Error::Json(_) => 2,
        _ => 3,
    }
}

fn parse_map(d: usize, text: &str) -> Result<DMatrix<f64>, Error> {
    if let Some(diag) = text.strip_prefix("diag:") {
        let entries: Vec<f64> = diag
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad diagonal '{diag}'")))?;
        if entries.len() != d {
            return Err(Error::InvalidArgument(format!(
                "diagonal has {} entries, need {d}",
                entries.len()
            )));
        }
        return Ok(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                entries[i]
            } else {
                0.0
            }
        }));
    }
    if let Some(s) = text.strip_prefix("shear:") {
        let shear: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad shear '{s}'")))?;
        let mut m = DMatrix::identity(d, d);
        if d >= 2 {
            m[(0, 1)] = shear;
        }
        return Ok(m);
    }
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("bad matrix '{text}'")))?;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument(format!(
            "matrix must be {d} x {d}"
        )));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn cmd_tables(args: &TablesArgs) -> Result<u8, Error> {
    let spec = TableSpec {
        quantity: args.quantity.parse()?,
        model: args.model.parse()?,
        n_range: (args.n_from, args.n_to),
        d: args.d,
        j: args.j,
        k: args.k,
        tol: args.tol,
    };
    let rows = emit_tables(&spec)?;
    let mut text = String::from(ComparisonRow::CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    write_output(&args.out, &text)?;
    Ok(0)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<u8, Error> {
    let cfg = match &args.config {
        Some(path) => {
            let file: ConfigFile = serde_json::from_str(&fs::read_to_string(path)?)?;
            ExperimentConfig {
                model: file.model.parse()?,
                n: file.n,
                d: file.d,
                j: file.j,
                k: file.k,
                quantity: file.quantity.parse()?,
                trials: file.trials,
                samples_per_angle: file.samples_per_angle,
                seed: file.seed,
                tol: file.tol.unwrap_or(DEFAULT_TOL),
            }
        }
        None => {
            let missing = |name: &str| {
                Error::InvalidArgument(format!("--{name} is required without --config"))
            };
            ExperimentConfig {
                model: args
                    .model
                    .as_deref()
                    .ok_or_else(|| missing("model"))?
                    .parse()?,
                n: args.n.ok_or_else(|| missing("n"))?,
                d: args.d.ok_or_else(|| missing("d"))?,
                j: args.j.ok_or_else(|| missing("j"))?,
                k: args.k,
                quantity: args.quantity.parse()?,
                trials: args.trials,
                samples_per_angle: args.samples,
                seed: args.seed,
                tol: args.tol,
            }
        }
    };
    let row = run_experiment(&cfg)?;
    let mut text = String::from(ComparisonRow::CSV_HEADER);
    text.push('\n');
    text.push_str(&row.to_csv());
    text.push('\n');
    write_output(&args.out, &text)?;
    let z = row.z.unwrap_or(f64::INFINITY);
    Ok(if z.abs() < args.threshold { 0 } else { 1 })
}

fn cmd_project_theorem(args: &ProjectTheoremArgs) -> Result<u8, Error> {
    let fixture = Fixture::parse(&args.fixture)?;
    let body = fixture.build()?;
    let FixtureBody::Polytope(polytope) = body else {
        return Err(Error::InvalidArgument(
            "project-theorem needs a polytope fixture".into(),
        ));
    };
    let d = polytope.dim;
    let pairs: Vec<(usize, usize)> = match (args.j, args.k) {
        (Some(j), Some(k)) => vec![(j, k)],
        (Some(j), None) => (j + 1..=d).map(|k| (j, k)).collect(),
        (None, Some(k)) => (0..k).map(|j| (j, k)).collect(),
        (None, None) => (0..d)
            .flat_map(|j| (j + 1..=d).map(move |k| (j, k)))
            .collect(),
    };
    let mut text =
        String::from("j,k,gamma_sum,gamma_sum_stderr,face_deficit,face_deficit_stderr,z,discarded,draws,seed\n");
    let mut worst_z = 0.0f64;
    for (idx, &(j, k)) in pairs.iter().enumerate() {
        let row = run_projection_theorem(
            &polytope,
            j,
            k,
            args.draws,
            derive_seed(args.seed, idx as u64),
        )?;
        worst_z = worst_z.max(row.z.abs());
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            row.j,
            row.k,
            row.gamma_sum,
            row.gamma_sum_stderr,
            row.face_deficit,
            row.face_deficit_stderr,
            row.z,
            row.discarded,
            args.draws,
            args.seed,
        ));
    }
    write_output(&args.out, &text)?;
    Ok(if worst_z < args.threshold { 0 } else { 1 })
}

fn cmd_affine(args: &AffineArgs) -> Result<u8, Error> {
    let cfg = ExperimentConfig {
        model: args.model.parse::<Model>()?,
        n: args.n,
        d: args.d,
        j: args.j,
        k: args.k,
        quantity: args.quantity.parse::<Quantity>()?,
        trials: args.trials,
        samples_per_angle: args.samples,
        seed: args.seed,
        tol: args.tol,
    };
    let map = parse_map(args.d, &args.map)?;
    let paired = run_affine_invariance(&cfg, &map)?;
    let mut text = String::from(ComparisonRow::CSV_HEADER);
    text.push_str(",role,z_diff\n");
    text.push_str(&format!("{},base,{}\n", paired.base.to_csv(), paired.z_diff));
    text.push_str(&format!(
        "{},transformed,{}\n",
        paired.transformed.to_csv(),
        paired.z_diff
    ));
    write_output(&args.out, &text)?;
    Ok(if paired.z_diff.abs() < args.threshold {
        0
    } else {
        1
    })
}

fn cmd_verify_identities() -> Result<u8, Error> {
    let checks = verify_identities()?;
    let mut all_pass = true;
    for check in &checks {
        let status = if check.pass { "PASS" } else { "FAIL" };
        if check.detail.is_empty() {
            println!("{status} {}", check.name);
        } else {
            println!("{status} {} ({})", check.name, check.detail);
        }
        all_pass &= check.pass;
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn cmd_angles(args: &AnglesArgs) -> Result<u8, Error> {
    let text = fs::read_to_string(&args.path)?;
    let polytope = polytope_from_json(&text)?;
    let mut doc = serde_json::to_value(polytope_to_json(&polytope))?;
    if let Some(samples) = args.samples {
        let lattice = face_lattice(&polytope);
        let mut internal = Vec::new();
        let mut external = Vec::new();
        for faces in lattice.iter().take(polytope.dim) {
            let mut int_sum = 0.0;
            let mut ext_sum = 0.0;
            for (idx, face) in faces.iter().enumerate() {
                let seed = derive_seed(args.seed, idx as u64);
                int_sum += solid_angle_mc(&tangent_cone(&polytope, face), samples, seed)?.mean;
                ext_sum +=
                    solid_angle_mc(&normal_cone(&polytope, face), samples, derive_seed(seed, 1))?
                        .mean;
            }
            internal.push(int_sum);
            external.push(ext_sum);
        }
        let obj = doc.as_object_mut().expect("object");
        obj.insert("internal_angle_sums".into(), serde_json::json!(internal));
        obj.insert("external_angle_sums".into(), serde_json::json!(external));
        obj.insert("angle_samples".into(), serde_json::json!(samples));
        obj.insert("seed".into(), serde_json::json!(args.seed));
    }
    let mut rendered = serde_json::to_string_pretty(&doc)?;
    rendered.push('\n');
    write_output(&args.out, &rendered)?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, Error> {
    if let Some(eps) = cli.geom_eps {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument("geom-eps must be positive".into()));
        }
        polyangles::geometry::set_geom_eps(eps);
    }
    match &cli.command {
        Command::Tables(args) => cmd_tables(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::ProjectTheorem(args) => cmd_project_theorem(args),
        Command::AffineInvariance(args) => cmd_affine(args),
        Command::VerifyIdentities => cmd_verify_identities(),
        Command::Angles(args) => cmd_angles(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
