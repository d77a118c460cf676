//! Experiment runner: reproducible Monte Carlo experiments compared against
//! the closed-form layer, theory-only table emission, and the identity
//! verification suites.
//!
//! Trials are distributed over a rayon pool; every trial draws from its own
//! `(seed, trial)` stream and results are aggregated in trial order with
//! compensated summation, so output bytes do not depend on the worker
//! count.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cones::{
    conic_intrinsic_volumes_mc, crofton_consistency, grassmann_angle_mc, solid_angle_mc,
};
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, face_lattice, normal_cone, tangent_cone, Polytope};
use crate::models::{
    gaussian_projection_matrix, gaussian_projection_points, orthoscheme, regular_simplex_vertices,
    sample_gaussian_points, sample_walk_points, Fixture, WalkIncrementModel,
};
use crate::rng::{derive_seed, stream_rng, uniform_subspace_basis, RngSeed};
use crate::theory::{self, TheoryValue};
use crate::util::mean_and_stderr;

/// Which random model an experiment samples from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Gaussian,
    Walk,
    Projection(Fixture),
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Gaussian => write!(f, "gaussian"),
            Model::Walk => write!(f, "walk"),
            Model::Projection(fixture) => {
                let name = match fixture {
                    Fixture::RegularSimplex(n) => format!("regular-simplex({n})"),
                    Fixture::Orthoscheme(n) => format!("orthoscheme({n})"),
                    Fixture::Cube(d) => format!("cube({d})"),
                    Fixture::Orthant(n) => format!("orthant({n})"),
                };
                write!(f, "projection:{name}")
            }
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        match s {
            "gaussian" => Ok(Model::Gaussian),
            "walk" => Ok(Model::Walk),
            other => {
                if let Some(fixture) = other.strip_prefix("projection:") {
                    Ok(Model::Projection(Fixture::parse(fixture)?))
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown model '{other}' (expected gaussian, walk, or projection:<fixture>)"
                    )))
                }
            }
        }
    }
}

/// Which per-face statistic is being summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    FCount,
    InternalSum,
    ExternalSum,
    GrassmannSum,
    IntrinsicSum,
}

impl Quantity {
    pub fn needs_k(self) -> bool {
        matches!(self, Quantity::GrassmannSum | Quantity::IntrinsicSum)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Quantity::FCount => "f_count",
            Quantity::InternalSum => "internal_sum",
            Quantity::ExternalSum => "external_sum",
            Quantity::GrassmannSum => "grassmann_sum",
            Quantity::IntrinsicSum => "intrinsic_sum",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Quantity> {
        match s {
            "f_count" => Ok(Quantity::FCount),
            "internal_sum" => Ok(Quantity::InternalSum),
            "external_sum" => Ok(Quantity::ExternalSum),
            "grassmann_sum" => Ok(Quantity::GrassmannSum),
            "intrinsic_sum" => Ok(Quantity::IntrinsicSum),
            other => Err(Error::InvalidArgument(format!(
                "unknown quantity '{other}'"
            ))),
        }
    }
}

/// Full description of one reproducible experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n: usize,
    pub d: usize,
    pub j: usize,
    pub k: Option<usize>,
    pub quantity: Quantity,
    pub trials: u64,
    pub samples_per_angle: u64,
    pub seed: RngSeed,
    pub tol: f64,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.samples_per_angle == 0 {
            return Err(Error::InvalidArgument(
                "trials and samples must be positive".into(),
            ));
        }
        if self.quantity.needs_k() && self.k.is_none() {
            return Err(Error::InvalidArgument(format!(
                "quantity {} requires k",
                self.quantity
            )));
        }
        if self.j >= self.d {
            return Err(Error::InvalidArgument(format!(
                "face dimension j={} must be below d={}",
                self.j, self.d
            )));
        }
        if let Model::Projection(fixture) = &self.model {
            let param = match fixture {
                Fixture::RegularSimplex(n)
                | Fixture::Orthoscheme(n)
                | Fixture::Orthant(n) => *n,
                Fixture::Cube(_) => {
                    return Err(Error::InvalidArgument(
                        "cube projections have no closed-form theory; use the project-theorem command".into(),
                    ))
                }
            };
            if param != self.n {
                return Err(Error::InvalidArgument(format!(
                    "fixture parameter {param} disagrees with n={}",
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn k_required(&self) -> usize {
        self.k.expect("validated")
    }
}

/// One simulation-vs-theory comparison, the row format of all CSV output.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub quantity: String,
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub j: usize,
    pub k: Option<usize>,
    pub theory: TheoryValue,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub z: Option<f64>,
    pub trials: u64,
    pub samples: u64,
    pub discarded: u64,
    pub seed: RngSeed,
}

impl ComparisonRow {
    pub const CSV_HEADER: &'static str =
        "quantity,model,n,d,j,k,theory_exact,theory_approx,estimate,stderr,z,trials,samples,discarded,seed";

    pub fn to_csv(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.quantity,
            self.model,
            self.n,
            self.d,
            self.j,
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            self.theory.exact_string(),
            self.theory.approx,
            opt(self.estimate),
            opt(self.stderr),
            opt(self.z),
            self.trials,
            self.samples,
            self.discarded,
            self.seed,
        )
    }

    /// z-score against the theory value. A zero-variance estimate matching
    /// the theory within its quadrature bound scores zero; a genuine
    /// mismatch scores infinite.
    fn z_score(theory: &TheoryValue, estimate: f64, stderr: f64) -> f64 {
        if stderr > 0.0 {
            (estimate - theory.approx) / stderr
        } else if (estimate - theory.approx).abs() <= theory.abs_error_bound.max(1e-12) {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Theory value for one experiment configuration.
pub fn theory_for(cfg: &ExperimentConfig) -> Result<TheoryValue> {
    let (n, d, j, tol) = (cfg.n, cfg.d, cfg.j, cfg.tol);
    match &cfg.model {
        Model::Gaussian => match cfg.quantity {
            Quantity::FCount => theory::ef_gaussian(n, d, j, tol),
            Quantity::InternalSum => theory::internal_angle_sum_gaussian(n, d, j, tol),
            Quantity::ExternalSum => theory::external_angle_sum_gaussian(n, d, j, tol),
            Quantity::GrassmannSum => theory::grassmann_sum_gaussian(n, d, j, cfg.k_required(), tol),
            Quantity::IntrinsicSum => theory::intrinsic_sum_gaussian(n, d, j, cfg.k_required(), tol),
        },
        Model::Walk => match cfg.quantity {
            Quantity::FCount => theory::ef_walk(n, d, j),
            Quantity::InternalSum => theory::internal_angle_sum_walk(n, d, j),
            Quantity::ExternalSum => theory::external_angle_sum_walk(n, d, j),
            Quantity::GrassmannSum => theory::grassmann_sum_walk(n, d, j, cfg.k_required()),
            Quantity::IntrinsicSum => theory::intrinsic_sum_walk(n, d, j, cfg.k_required()),
        },
        Model::Projection(Fixture::RegularSimplex(_)) => {
            let gaussian_cfg = ExperimentConfig {
                model: Model::Gaussian,
                ..cfg.clone()
            };
            theory_for(&gaussian_cfg)
        }
        Model::Projection(Fixture::Orthoscheme(_)) => {
            let walk_cfg = ExperimentConfig {
                model: Model::Walk,
                ..cfg.clone()
            };
            theory_for(&walk_cfg)
        }
        Model::Projection(Fixture::Orthant(_)) => {
            let sums = theory::orthant_face_sums(n, j)?;
            match cfg.quantity {
                Quantity::FCount => theory::projection_grassmann_sum(&sums, d, j as isize - 1),
                Quantity::InternalSum => theory::projection_upsilon_sum(&sums, d, d),
                Quantity::ExternalSum => theory::projection_upsilon_sum(&sums, d, j),
                Quantity::GrassmannSum => {
                    theory::projection_grassmann_sum(&sums, d, cfg.k_required() as isize)
                }
                Quantity::IntrinsicSum => {
                    theory::projection_upsilon_sum(&sums, d, cfg.k_required())
                }
            }
        }
        Model::Projection(Fixture::Cube(_)) => Err(Error::InvalidArgument(
            "cube projections have no closed-form theory".into(),
        )),
    }
}

/// Sampled points for one polytope-model trial.
fn trial_points(cfg: &ExperimentConfig, trial: u64) -> Result<Vec<DVector<f64>>> {
    match &cfg.model {
        Model::Gaussian => Ok(sample_gaussian_points(cfg.n, cfg.d, cfg.seed, trial)),
        Model::Walk => sample_walk_points(
            cfg.n,
            &WalkIncrementModel::IidGaussian { dim: cfg.d },
            cfg.seed,
            trial,
        ),
        Model::Projection(Fixture::RegularSimplex(n)) => {
            // The isometric R^(n-1) embedding composed with a Gaussian matrix
            // gives the Gaussian polytope up to a random translation, which
            // face statistics never see.
            gaussian_projection_points(&regular_simplex_vertices(*n)?, cfg.d, cfg.seed, trial)
        }
        Model::Projection(Fixture::Orthoscheme(n)) => {
            let fixture = orthoscheme(*n)?;
            gaussian_projection_points(&fixture.vertices, cfg.d, cfg.seed, trial)
        }
        Model::Projection(_) => Err(Error::InvalidArgument(
            "not a polytope-model fixture".into(),
        )),
    }
}

/// Per-face angle statistic summed over the `j`-faces of a hull.
fn polytope_trial_value(
    cfg: &ExperimentConfig,
    hull: &Polytope,
    trial: u64,
) -> Result<(f64, u64)> {
    let lattice = face_lattice(hull);
    let faces = &lattice[cfg.j];
    let mut total = 0.0;
    let mut discarded = 0;
    for (idx, face) in faces.iter().enumerate() {
        let angle_seed = derive_seed(cfg.seed, trial.wrapping_mul(1_000_003) + idx as u64);
        match cfg.quantity {
            Quantity::FCount => total += 1.0,
            Quantity::InternalSum => {
                let cone = tangent_cone(hull, face);
                total += solid_angle_mc(&cone, cfg.samples_per_angle, angle_seed)?.mean;
            }
            Quantity::ExternalSum => {
                let cone = normal_cone(hull, face);
                total += solid_angle_mc(&cone, cfg.samples_per_angle, angle_seed)?.mean;
            }
            Quantity::GrassmannSum => {
                let cone = tangent_cone(hull, face);
                let est =
                    grassmann_angle_mc(&cone, cfg.k_required(), cfg.samples_per_angle, angle_seed)?;
                total += est.mean;
                discarded += est.discarded;
            }
            Quantity::IntrinsicSum => {
                let cone = tangent_cone(hull, face);
                let upsilon =
                    conic_intrinsic_volumes_mc(&cone, cfg.samples_per_angle, angle_seed)?;
                total += upsilon[cfg.k_required()].mean;
            }
        }
    }
    Ok((total, discarded))
}

/// One trial of the cone-valued projection model `A R^n_+`.
fn cone_trial_value(cfg: &ExperimentConfig, trial: u64) -> Result<(f64, u64)> {
    let a = gaussian_projection_matrix(cfg.n, cfg.d, cfg.seed, trial);
    let gens: Vec<DVector<f64>> = (0..cfg.n).map(|i| a.column(i).into_owned()).collect();
    let cone = crate::geometry::PolyCone::from_generators(cfg.d, gens)?;
    let faces = cone.faces()?;
    let mut total = 0.0;
    let mut discarded = 0;
    for (idx, face) in faces.iter().enumerate() {
        if face.dim != cfg.j {
            continue;
        }
        let angle_seed = derive_seed(cfg.seed, trial.wrapping_mul(1_000_003) + idx as u64);
        match cfg.quantity {
            Quantity::FCount => total += 1.0,
            Quantity::InternalSum => {
                let tangent = cone.tangent_at(face);
                total += solid_angle_mc(&tangent, cfg.samples_per_angle, angle_seed)?.mean;
            }
            Quantity::ExternalSum => {
                let normal = cone.normal_at(face)?;
                total += solid_angle_mc(&normal, cfg.samples_per_angle, angle_seed)?.mean;
            }
            Quantity::GrassmannSum => {
                let tangent = cone.tangent_at(face);
                let est = grassmann_angle_mc(
                    &tangent,
                    cfg.k_required(),
                    cfg.samples_per_angle,
                    angle_seed,
                )?;
                total += est.mean;
                discarded += est.discarded;
            }
            Quantity::IntrinsicSum => {
                let tangent = cone.tangent_at(face);
                let upsilon =
                    conic_intrinsic_volumes_mc(&tangent, cfg.samples_per_angle, angle_seed)?;
                total += upsilon[cfg.k_required()].mean;
            }
        }
    }
    Ok((total, discarded))
}

/// Attach the trial index to an error without losing its kind.
fn tag_trial(trial: u64, err: Error) -> Error {
    match err {
        Error::GeneralPosition(msg) => Error::GeneralPosition(format!("trial {trial}: {msg}")),
        Error::DegenerateInput(msg) => Error::DegenerateInput(format!("trial {trial}: {msg}")),
        Error::InternalInconsistency(msg) => {
            Error::InternalInconsistency(format!("trial {trial}: {msg}"))
        }
        other => other,
    }
}

fn run_trials(
    cfg: &ExperimentConfig,
    eval: impl Fn(u64) -> Result<(f64, u64)> + Sync,
) -> Result<(Vec<f64>, u64)> {
    let outcomes: Vec<Result<(f64, u64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| eval(t).map_err(|e| tag_trial(t, e)))
        .collect();
    let mut values = Vec::with_capacity(outcomes.len());
    let mut discarded = 0;
    for outcome in outcomes {
        let (v, disc) = outcome?;
        values.push(v);
        discarded += disc;
    }
    Ok((values, discarded))
}

/// Run one experiment: sample, measure, aggregate, compare to theory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonRow> {
    cfg.validate()?;
    let theory = theory_for(cfg)?;
    let (values, discarded) = match &cfg.model {
        Model::Projection(Fixture::Orthant(_)) => {
            run_trials(cfg, |t| cone_trial_value(cfg, t))?
        }
        _ => run_trials(cfg, |t| {
            let points = trial_points(cfg, t)?;
            let hull = convex_hull(&points)?;
            polytope_trial_value(cfg, &hull, t)
        })?,
    };
    let (mean, stderr) = mean_and_stderr(&values);
    Ok(ComparisonRow {
        quantity: cfg.quantity.to_string(),
        model: cfg.model.to_string(),
        n: cfg.n,
        d: cfg.d,
        j: cfg.j,
        k: cfg.k,
        z: Some(ComparisonRow::z_score(&theory, mean, stderr)),
        theory,
        estimate: Some(mean),
        stderr: Some(stderr),
        trials: cfg.trials,
        samples: cfg.samples_per_angle,
        discarded,
        seed: cfg.seed,
    })
}

/// Result of an affine-invariance run: the same experiment on `P` and on
/// `A P` with shared random streams, plus the paired z-score of the
/// difference.
#[derive(Clone, Debug)]
pub struct PairedComparison {
    pub base: ComparisonRow,
    pub transformed: ComparisonRow,
    pub z_diff: f64,
}

/// Run the experiment on the sampled polytopes and on their images under
/// the invertible map `a`, pairing trials.
pub fn run_affine_invariance(cfg: &ExperimentConfig, a: &DMatrix<f64>) -> Result<PairedComparison> {
    cfg.validate()?;
    if matches!(cfg.model, Model::Projection(_)) {
        return Err(Error::InvalidArgument(
            "affine invariance runs on the gaussian or walk model".into(),
        ));
    }
    if a.nrows() != cfg.d || a.ncols() != cfg.d {
        return Err(Error::InvalidArgument("map must be d x d".into()));
    }
    if a.clone().lu().determinant().abs() < 1e-12 {
        return Err(Error::InvalidArgument("map must be invertible".into()));
    }
    let theory = theory_for(cfg)?;

    let outcomes: Vec<Result<((f64, u64), (f64, u64))>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let run = || {
                let points = trial_points(cfg, t)?;
                let hull = convex_hull(&points)?;
                let base = polytope_trial_value(cfg, &hull, t)?;
                let mapped: Vec<DVector<f64>> = points.iter().map(|p| a * p).collect();
                let mapped_hull = convex_hull(&mapped)?;
                let transformed = polytope_trial_value(cfg, &mapped_hull, t)?;
                Ok((base, transformed))
            };
            run().map_err(|e| tag_trial(t, e))
        })
        .collect();

    let mut base_values = Vec::with_capacity(outcomes.len());
    let mut mapped_values = Vec::with_capacity(outcomes.len());
    let mut diffs = Vec::with_capacity(outcomes.len());
    let mut discarded = (0u64, 0u64);
    for outcome in outcomes {
        let ((v1, d1), (v2, d2)) = outcome?;
        base_values.push(v1);
        mapped_values.push(v2);
        diffs.push(v1 - v2);
        discarded.0 += d1;
        discarded.1 += d2;
    }
    let (mean1, se1) = mean_and_stderr(&base_values);
    let (mean2, se2) = mean_and_stderr(&mapped_values);
    let (dmean, dse) = mean_and_stderr(&diffs);
    let z_diff = if dse > 0.0 {
        dmean / dse
    } else if dmean.abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };

    let row = |estimate: f64, stderr: f64, disc: u64| ComparisonRow {
        quantity: cfg.quantity.to_string(),
        model: cfg.model.to_string(),
        n: cfg.n,
        d: cfg.d,
        j: cfg.j,
        k: cfg.k,
        theory: theory.clone(),
        z: Some(ComparisonRow::z_score(&theory, estimate, stderr)),
        estimate: Some(estimate),
        stderr: Some(stderr),
        trials: cfg.trials,
        samples: cfg.samples_per_angle,
        discarded: disc,
        seed: cfg.seed,
    };
    Ok(PairedComparison {
        base: row(mean1, se1, discarded.0),
        transformed: row(mean2, se2, discarded.1),
        z_diff,
    })
}

/// Two-sided comparison of the projection theorem on a deterministic
/// polytope: the Monte Carlo Grassmann-angle sum over `j`-faces against
/// `f_j(P) - mean f_j(Pi_k P)` over random subspace draws.
#[derive(Clone, Debug)]
pub struct ProjectionTheoremRow {
    pub j: usize,
    pub k: usize,
    pub gamma_sum: f64,
    pub gamma_sum_stderr: f64,
    pub face_deficit: f64,
    pub face_deficit_stderr: f64,
    pub z: f64,
    pub discarded: u64,
}

pub fn run_projection_theorem(
    polytope: &Polytope,
    j: usize,
    k: usize,
    draws: u64,
    seed: RngSeed,
) -> Result<ProjectionTheoremRow> {
    let d = polytope.dim;
    if !(j < k && k <= d) {
        return Err(Error::InvalidArgument(format!(
            "projection theorem needs 0 <= j < k <= d, got j={j}, k={k}, d={d}"
        )));
    }
    let lattice = face_lattice(polytope);
    let faces = &lattice[j];

    let estimates: Vec<crate::cones::AngleEstimate> = faces
        .par_iter()
        .enumerate()
        .map(|(idx, face)| {
            let cone = tangent_cone(polytope, face);
            grassmann_angle_mc(&cone, k, draws, derive_seed(seed, 5_000 + idx as u64))
        })
        .collect::<Result<_>>()?;
    let gamma_sum: f64 = estimates.iter().map(|e| e.mean).sum();
    let gamma_var: f64 = estimates.iter().map(|e| e.stderr * e.stderr).sum();
    let discarded: u64 = estimates.iter().map(|e| e.discarded).sum();

    // Draws whose projected hull cannot be certified at tolerance are
    // null events under general position; they are discarded and counted,
    // like uncertifiable trials in the Grassmann-angle estimator.
    let outcomes: Vec<Result<Option<f64>>> = (0..draws)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(derive_seed(seed, 77), t);
            let basis = uniform_subspace_basis(&mut rng, d, k);
            match crate::geometry::project(polytope, &basis.transpose()) {
                Ok(image) => Ok(Some(face_lattice(&image)[j].len() as f64)),
                Err(Error::GeneralPosition(_)) | Err(Error::DegenerateInput(_)) => Ok(None),
                Err(other) => Err(other),
            }
        })
        .collect();
    let mut counts = Vec::with_capacity(outcomes.len());
    let mut rhs_discarded = 0u64;
    for outcome in outcomes {
        match outcome? {
            Some(count) => counts.push(count),
            None => rhs_discarded += 1,
        }
    }
    if rhs_discarded > draws / 10 {
        return Err(Error::GeneralPosition(format!(
            "{rhs_discarded} of {draws} projection draws were uncertifiable"
        )));
    }
    let (mean_count, se_count) = mean_and_stderr(&counts);
    let face_deficit = faces.len() as f64 - mean_count;

    let spread = (gamma_var + se_count * se_count).sqrt();
    let z = if spread > 0.0 {
        (gamma_sum - face_deficit) / spread
    } else if (gamma_sum - face_deficit).abs() <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ProjectionTheoremRow {
        j,
        k,
        gamma_sum,
        gamma_sum_stderr: gamma_var.sqrt(),
        face_deficit,
        face_deficit_stderr: se_count,
        z,
        discarded: discarded + rhs_discarded,
    })
}

/// Grid description for theory-only tables. `j = None` ranges over all
/// face dimensions, and `k = None` over all valid indices when the
/// quantity uses one.
#[derive(Clone, Debug)]
pub struct TableSpec {
    pub quantity: Quantity,
    pub model: Model,
    pub n_range: (usize, usize),
    pub d: usize,
    pub j: Option<usize>,
    pub k: Option<usize>,
    pub tol: f64,
}

/// Theory-only rows over the requested (n, j, k) grid; walk values carry
/// their exact rational in the `theory_exact` column.
pub fn emit_tables(spec: &TableSpec) -> Result<Vec<ComparisonRow>> {
    let d = spec.d;
    let j_values: Vec<usize> = match spec.j {
        Some(j) => vec![j],
        None => (0..d).collect(),
    };
    let mut rows = Vec::new();
    for n in spec.n_range.0..=spec.n_range.1 {
        for &j in &j_values {
            let k_values: Vec<Option<usize>> = if spec.quantity.needs_k() {
                match spec.k {
                    Some(k) => vec![Some(k)],
                    None => match spec.quantity {
                        Quantity::GrassmannSum => (0..=d).map(Some).collect(),
                        _ => (j..=d).map(Some).collect(),
                    },
                }
            } else {
                vec![None]
            };
            for k in k_values {
                let cfg = ExperimentConfig {
                    model: spec.model.clone(),
                    n,
                    d,
                    j,
                    k,
                    quantity: spec.quantity,
                    trials: 1,
                    samples_per_angle: 1,
                    seed: 0,
                    tol: spec.tol,
                };
                cfg.validate()?;
                let theory = theory_for(&cfg)?;
                rows.push(ComparisonRow {
                    quantity: cfg.quantity.to_string(),
                    model: cfg.model.to_string(),
                    n,
                    d,
                    j,
                    k,
                    theory,
                    estimate: None,
                    stderr: None,
                    z: None,
                    trials: 0,
                    samples: 0,
                    discarded: 0,
                    seed: 0,
                });
            }
        }
    }
    Ok(rows)
}

/// Outcome of one named identity check.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Run the deterministic and fixed-seed identity suites. Every check is
/// recorded; the report is green only if all pass.
pub fn verify_identities() -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();

    // Exact Stirling convolution identities.
    let mut stirling_ok = true;
    for n in 1..=30 {
        for k in 1..=n {
            if !crate::combinatorics::stirling_identity_check(n, k)? {
                stirling_ok = false;
            }
        }
    }
    checks.push(CheckResult {
        name: "stirling-identities (n <= 30)".into(),
        pass: stirling_ok,
        detail: String::new(),
    });

    // Simplex-angle identities by quadrature.
    let mut worst: f64 = 0.0;
    for n in 1..=10 {
        for k in 1..=n {
            worst = worst.max(crate::simplex_angles::simplex_angle_identity_check(
                n, k, 1e-10,
            )?);
        }
    }
    checks.push(CheckResult {
        name: "simplex-angle-identities (n <= 10)".into(),
        pass: worst < 1e-8,
        detail: format!("max residual {worst:.3e}"),
    });

    // Euler relation on random hulls, exact integer arithmetic.
    let mut euler_ok = true;
    for trial in 0..25u64 {
        let pts = sample_gaussian_points(8, 3, 1234, trial);
        if crate::geometry::euler_check(&convex_hull(&pts)?) != 1 {
            euler_ok = false;
        }
        let pts = sample_gaussian_points(9, 2, 4321, trial);
        if crate::geometry::euler_check(&convex_hull(&pts)?) != 1 {
            euler_ok = false;
        }
    }
    checks.push(CheckResult {
        name: "euler-relation (50 random hulls)".into(),
        pass: euler_ok,
        detail: String::new(),
    });

    // Gram-Euler in expectation, exact for the walk model.
    let mut gram_ok = true;
    for (n, d) in [(5usize, 2usize), (6, 3), (7, 4)] {
        let mut acc = num_rational::BigRational::from_integer(num_bigint::BigInt::from(0));
        for j in 0..d {
            let term = theory::internal_angle_sum_walk(n, d, j)?.exact.unwrap();
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let parity = num_rational::BigRational::from_integer(num_bigint::BigInt::from(
            if d % 2 == 0 { 1 } else { -1 },
        ));
        if acc + parity != num_rational::BigRational::from_integer(num_bigint::BigInt::from(0)) {
            gram_ok = false;
        }
    }
    checks.push(CheckResult {
        name: "gram-euler (walk, exact)".into(),
        pass: gram_ok,
        detail: String::new(),
    });

    // Empirical Gram-Euler on small Gaussian polytopes.
    for (n, d) in [(5usize, 2usize), (5, 3)] {
        let trials = 600u64;
        let samples = 400u64;
        let seed = 2024;
        let values: Vec<Result<f64>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let pts = sample_gaussian_points(n, d, seed, t);
                let hull = convex_hull(&pts)?;
                let lattice = face_lattice(&hull);
                let mut sum = if d % 2 == 0 { 1.0 } else { -1.0 };
                for (jdim, faces) in lattice.iter().enumerate().take(d) {
                    for (idx, face) in faces.iter().enumerate() {
                        let cone = tangent_cone(&hull, face);
                        let alpha = solid_angle_mc(
                            &cone,
                            samples,
                            derive_seed(seed, t * 4096 + jdim as u64 * 64 + idx as u64),
                        )?;
                        let sign = if jdim % 2 == 0 { 1.0 } else { -1.0 };
                        sum += sign * alpha.mean;
                    }
                }
                Ok(sum)
            })
            .collect();
        let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
        let (mean, se) = mean_and_stderr(&values);
        let z = if se > 0.0 { mean / se } else { 0.0 };
        checks.push(CheckResult {
            name: format!("gram-euler-empirical (gaussian n={n} d={d})"),
            pass: z.abs() < 3.0,
            detail: format!("z = {z:.2}"),
        });
    }

    // Crofton consistency and intrinsic-volume normalization on fixtures.
    let cube = crate::models::cube(3)?;
    let cube_lattice = face_lattice(&cube);
    let cube_vertex_cone = tangent_cone(&cube, &cube_lattice[0][0]);
    let fixtures: Vec<(String, crate::geometry::PolyCone, usize)> = vec![
        ("orthant(2), k=1".into(), crate::models::orthant(2), 1),
        ("orthant(3), k=1".into(), crate::models::orthant(3), 1),
        ("orthant(3), k=2".into(), crate::models::orthant(3), 2),
        ("cube-vertex cone, k=2".into(), cube_vertex_cone, 2),
    ];
    for (name, cone, k) in fixtures {
        let report = crofton_consistency(&cone, k, 40_000, 555)?;
        let pass = report.residual <= 3.0 * report.stderr.max(1e-9);
        let total: f64 = report.upsilon.iter().map(|u| u.mean).sum();
        let total_se: f64 = report
            .upsilon
            .iter()
            .map(|u| u.stderr * u.stderr)
            .sum::<f64>()
            .sqrt();
        let norm_pass = (total - 1.0).abs() <= 3.0 * total_se.max(1e-9);
        checks.push(CheckResult {
            name: format!("crofton ({name})"),
            pass: pass && norm_pass,
            detail: format!(
                "residual {:.3e} (se {:.3e}), sum upsilon = {total:.4}",
                report.residual, report.stderr
            ),
        });
    }

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg() -> ExperimentConfig {
        ExperimentConfig {
            model: Model::Walk,
            n: 5,
            d: 2,
            j: 0,
            k: None,
            quantity: Quantity::FCount,
            trials: 400,
            samples_per_angle: 64,
            seed: 31,
            tol: 1e-10,
        }
    }

    #[test]
    fn model_and_quantity_round_trip() {
        for text in [
            "gaussian",
            "walk",
            "projection:cube(3)",
            "projection:regular-simplex(6)",
            "projection:orthant(4)",
        ] {
            let model: Model = text.parse().unwrap();
            assert_eq!(model.to_string(), text);
        }
        for text in [
            "f_count",
            "internal_sum",
            "external_sum",
            "grassmann_sum",
            "intrinsic_sum",
        ] {
            let q: Quantity = text.parse().unwrap();
            assert_eq!(q.to_string(), text);
        }
        assert!("torus".parse::<Model>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = base_cfg();
        cfg.quantity = Quantity::GrassmannSum;
        assert!(run_experiment(&cfg).is_err()); // k missing
        cfg.k = Some(1);
        cfg.trials = 50;
        assert!(run_experiment(&cfg).is_ok());
        let mut bad = base_cfg();
        bad.j = 2;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn walk_f_count_matches_baxter() {
        let mut cfg = base_cfg();
        cfg.n = 10;
        cfg.trials = 3_000;
        let row = run_experiment(&cfg).unwrap();
        assert!(row.z.unwrap().abs() < 4.0, "z = {:?}", row.z);
    }

    #[test]
    fn identical_config_reproduces_csv_bytes() {
        let mut cfg = base_cfg();
        cfg.quantity = Quantity::InternalSum;
        cfg.trials = 60;
        let a = run_experiment(&cfg).unwrap().to_csv();
        let b = run_experiment(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        // independent of worker count
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| run_experiment(&cfg).unwrap().to_csv());
        assert_eq!(a, c);
    }

    #[test]
    fn affine_invariance_identity_map_is_exact() {
        let mut cfg = base_cfg();
        cfg.model = Model::Gaussian;
        cfg.quantity = Quantity::InternalSum;
        cfg.trials = 40;
        let eye = DMatrix::identity(2, 2);
        let paired = run_affine_invariance(&cfg, &eye).unwrap();
        assert_eq!(
            paired.base.estimate.unwrap().to_bits(),
            paired.transformed.estimate.unwrap().to_bits()
        );
        assert_eq!(paired.z_diff, 0.0);
    }

    #[test]
    fn projection_theorem_on_simplex_line() {
        // projecting any 3-polytope to a line leaves a segment: f_0 = 2
        let simplex = convex_hull(&[
            DVector::from_vec(vec![0.0, 0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let row = run_projection_theorem(&simplex, 0, 1, 3_000, 17).unwrap();
        assert!((row.face_deficit - 2.0).abs() < 1e-12);
        assert!(row.z.abs() < 4.0, "z = {}", row.z);
        // k = d: both sides vanish identically
        let top = run_projection_theorem(&simplex, 0, 3, 100, 17).unwrap();
        assert_eq!(top.gamma_sum, 0.0);
        assert_eq!(top.face_deficit, 0.0);
        assert_eq!(top.z, 0.0);
    }

    #[test]
    fn tables_emit_harmonic_column() {
        let spec = TableSpec {
            quantity: Quantity::InternalSum,
            model: Model::Walk,
            n_range: (2, 10),
            d: 2,
            j: Some(0),
            k: None,
            tol: 1e-10,
        };
        let rows = emit_tables(&spec).unwrap();
        assert_eq!(rows.len(), 9);
        for (i, row) in rows.iter().enumerate() {
            let n = i + 2;
            let expect = crate::combinatorics::harmonic(n, 1)
                - num_rational::BigRational::from_integer(num_bigint::BigInt::from(1));
            assert_eq!(row.theory.exact.as_ref().unwrap(), &expect);
            assert!(row.to_csv().contains("walk"));
        }
        // zero column at k = d for grassmann sums
        let spec = TableSpec {
            quantity: Quantity::GrassmannSum,
            model: Model::Walk,
            n_range: (3, 7),
            d: 2,
            j: Some(0),
            k: Some(2),
            tol: 1e-10,
        };
        for row in emit_tables(&spec).unwrap() {
            assert!(row.theory.exact.unwrap().numer().bits() == 0);
        }
        // gaussian external-sum column equals the external simplex-angle total
        let spec = TableSpec {
            quantity: Quantity::ExternalSum,
            model: Model::Gaussian,
            n_range: (4, 8),
            d: 3,
            j: Some(1),
            k: None,
            tol: 1e-10,
        };
        for row in emit_tables(&spec).unwrap() {
            let sigma = crate::simplex_angles::external_angle_sum(row.n, 2, 1e-10)
                .unwrap()
                .value;
            assert!((row.theory.approx - sigma).abs() < 1e-9, "n = {}", row.n);
        }
    }

    #[test]
    fn csv_header_matches_row_fields() {
        let cfg = base_cfg();
        let row = run_experiment(&cfg).unwrap();
        let line = row.to_csv();
        assert_eq!(
            line.split(',').count(),
            ComparisonRow::CSV_HEADER.split(',').count()
        );
    }
}
