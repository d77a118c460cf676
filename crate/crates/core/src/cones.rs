//! Monte Carlo estimation of solid angles, Grassmann angles and conic
//! intrinsic volumes of polyhedral cones, plus the LP predicate for
//! subspace-cone intersection and the Crofton consistency check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::cone::{column_span, ConeStructure, PolyCone, CONE_EPS};
use crate::lp::{self, LpOutcome};
use crate::rng::{derive_seed, stream_rng, uniform_subspace_basis, unit_sphere_point, RngSeed};

/// Strict-margin threshold for the intersection LP: optima above it certify
/// a non-trivial intersection.
pub const LP_EPS: f64 = 1e-9;

/// Optima below this are a certified trivial intersection; the band between
/// the two thresholds cannot be certified either way.
const LP_ZERO: f64 = 1e-12;

/// A Bernoulli-style Monte Carlo estimate.
#[derive(Clone, Copy, Debug)]
pub struct AngleEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: RngSeed,
    /// Trials discarded because general position could not be certified.
    pub discarded: u64,
}

impl AngleEstimate {
    /// An exactly known value; no sampling was performed.
    pub fn exact(value: f64, seed: RngSeed) -> Self {
        AngleEstimate {
            mean: value,
            stderr: 0.0,
            samples: 0,
            seed,
            discarded: 0,
        }
    }

    fn bernoulli(hits: u64, effective: u64, seed: RngSeed, discarded: u64) -> Self {
        let mean = hits as f64 / effective as f64;
        AngleEstimate {
            mean,
            stderr: (mean * (1.0 - mean) / effective as f64).sqrt(),
            samples: effective,
            seed,
            discarded,
        }
    }
}

/// Orthonormal basis of a linear subspace, the sampled object behind
/// Grassmann angles.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    pub ambient_dim: usize,
    pub columns: DMatrix<f64>,
}

impl SubspaceBasis {
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        let gram = columns.transpose() * &columns;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "subspace basis is not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(SubspaceBasis {
            ambient_dim: columns.nrows(),
            columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.columns.ncols()
    }
}

/// Solid angle `alpha(C)`: the probability that a uniform point on the unit
/// sphere of `lin C` lies in `C`. Exactly one when `C` is a linear
/// subspace, with no sampling.
pub fn solid_angle_mc(cone: &PolyCone, samples: u64, seed: RngSeed) -> Result<AngleEstimate> {
    let structure = cone.structure()?;
    solid_angle_mc_with(cone, &structure, samples, seed)
}

fn solid_angle_mc_with(
    cone: &PolyCone,
    structure: &ConeStructure,
    samples: u64,
    seed: RngSeed,
) -> Result<AngleEstimate> {
    if structure.pointed.ncols() == 0 {
        return Ok(AngleEstimate::exact(1.0, seed));
    }
    assert!(samples > 0);
    let span = &structure.span;
    let r = span.ncols();
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let z = span * unit_sphere_point(&mut rng, r);
        if cone.halfspaces.iter().all(|a| a.dot(&z) <= CONE_EPS) {
            hits += 1;
        }
    }
    Ok(AngleEstimate::bernoulli(hits, samples, seed, 0))
}

/// Does the subspace spanned by `basis` intersect the cone outside the
/// origin?
///
/// Constraints that vanish identically on the subspace are dropped (the
/// subspace never violates them), then a strict-margin LP maximizes the
/// slack `t` with `A B y <= -t`, `|y|_inf <= 1`. A clearly positive optimum
/// certifies an interior intersection, a vanishing one certifies
/// triviality, and the band in between is a general-position failure.
pub fn subspace_intersects_cone(cone: &PolyCone, basis: &SubspaceBasis) -> Result<bool> {
    assert_eq!(basis.ambient_dim, cone.dim_ambient);
    let m = basis.dim();
    assert!(m >= 1, "subspace must have positive dimension");
    if cone.halfspaces.is_empty() {
        return Ok(true);
    }
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for a in &cone.halfspaces {
        let row = basis.columns.transpose() * a;
        if row.norm() > 1e-12 {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        // the subspace lies inside every constraint hyperplane
        return Ok(true);
    }

    // Variables: u in [0,2]^m (y = u - 1) and t >= 0; maximize t subject to
    // M u + t 1 <= M 1.
    let n_vars = m + 1;
    let mut lp_rows = Vec::with_capacity(rows.len() + m);
    let mut b = Vec::with_capacity(rows.len() + m);
    for row in &rows {
        let mut r: Vec<f64> = row.iter().cloned().collect();
        r.push(1.0);
        lp_rows.push(r);
        b.push(row.sum());
    }
    for i in 0..m {
        let mut r = vec![0.0; n_vars];
        r[i] = 1.0;
        lp_rows.push(r);
        b.push(2.0);
    }
    let mut c = vec![0.0; n_vars];
    c[m] = 1.0;

    match lp::solve_max(&c, &lp_rows, &b)? {
        LpOutcome::Optimal { objective, .. } => {
            if objective > LP_EPS {
                Ok(true)
            } else if objective <= LP_ZERO {
                Ok(false)
            } else {
                Err(Error::GeneralPosition(format!(
                    "intersection margin {objective:e} is below the certification threshold"
                )))
            }
        }
        LpOutcome::Unbounded | LpOutcome::Infeasible => Err(Error::InternalInconsistency(
            "intersection LP must be feasible and bounded".into(),
        )),
    }
}

/// Grassmann angle `gamma_k(C)`: the probability that a uniformly random
/// subspace of codimension `k` meets `C` non-trivially.
///
/// Exact for linear subspaces, for `k = 0`, and for `k >= dim C`; estimated
/// by sampling subspaces inside `lin C` otherwise (Grassmann angles do not
/// depend on the ambient dimension). Samples whose LP margin cannot be
/// certified are discarded and counted.
pub fn grassmann_angle_mc(
    cone: &PolyCone,
    k: usize,
    samples: u64,
    seed: RngSeed,
) -> Result<AngleEstimate> {
    let structure = cone.structure()?;
    let r = structure.span.ncols();
    if structure.pointed.ncols() == 0 {
        // linear subspace of dimension r
        let value = if k + 1 <= r { 1.0 } else { 0.0 };
        return Ok(AngleEstimate::exact(value, seed));
    }
    if k == 0 {
        return Ok(AngleEstimate::exact(1.0, seed));
    }
    if k >= r {
        return Ok(AngleEstimate::exact(0.0, seed));
    }
    assert!(samples > 0);

    // Work inside lin C, where the cone is full-dimensional.
    let reduced = PolyCone::from_halfspaces(
        r,
        cone.halfspaces
            .iter()
            .map(|a| structure.span.transpose() * a),
    );
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0u64;
    let mut discarded = 0u64;
    for _ in 0..samples {
        let basis = SubspaceBasis::new(uniform_subspace_basis(&mut rng, r, r - k))?;
        match subspace_intersects_cone(&reduced, &basis) {
            Ok(true) => hits += 1,
            Ok(false) => {}
            Err(Error::GeneralPosition(_)) => discarded += 1,
            Err(other) => return Err(other),
        }
    }
    let effective = samples - discarded;
    if effective == 0 {
        return Err(Error::GeneralPosition(
            "all Grassmann-angle trials were discarded".into(),
        ));
    }
    Ok(AngleEstimate::bernoulli(hits, effective, seed, discarded))
}

/// Internal angle of one cone face: uniform sphere sampling of `lin F`
/// against the cone constraints. Exact one when the face is the lineality
/// space itself.
fn face_solid_angle(
    cone: &PolyCone,
    structure: &ConeStructure,
    rays: &[usize],
    samples: u64,
    seed: RngSeed,
) -> AngleEstimate {
    if rays.is_empty() {
        return AngleEstimate::exact(1.0, seed);
    }
    let d = cone.dim_ambient;
    let mut cols: Vec<DVector<f64>> = (0..structure.lineality.ncols())
        .map(|c| structure.lineality.column(c).into_owned())
        .collect();
    for &j in rays {
        cols.push(structure.extreme_rays[j].clone());
    }
    let span = column_span(d, &cols);
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let z = &span * unit_sphere_point(&mut rng, span.ncols());
        if cone.halfspaces.iter().all(|a| a.dot(&z) <= CONE_EPS) {
            hits += 1;
        }
    }
    AngleEstimate::bernoulli(hits, samples, seed, 0)
}

/// External angle of one cone face: the solid angle of `pos` of the active
/// normals, sampled on the sphere of their span and tested against the
/// extreme rays of the face's tangent cone.
fn face_normal_angle(
    cone: &PolyCone,
    active: &[usize],
    samples: u64,
    seed: RngSeed,
) -> Result<AngleEstimate> {
    if active.is_empty() {
        // the face is the cone itself; its normal cone is {0}
        return Ok(AngleEstimate::exact(1.0, seed));
    }
    let d = cone.dim_ambient;
    let normals: Vec<DVector<f64>> = active.iter().map(|&i| cone.halfspaces[i].clone()).collect();
    let tangent = PolyCone::from_halfspaces(d, normals.iter().cloned());
    let tangent_structure = tangent.structure()?;
    if tangent_structure.extreme_rays.is_empty() {
        // tangent cone is a subspace, so the normal cone is its orthogonal
        // complement within the normal span: a subspace, angle one
        return Ok(AngleEstimate::exact(1.0, seed));
    }
    let span = column_span(d, &normals);
    let mut rng = stream_rng(seed, 0);
    let mut hits = 0u64;
    for _ in 0..samples {
        let z = &span * unit_sphere_point(&mut rng, span.ncols());
        if tangent_structure
            .extreme_rays
            .iter()
            .all(|g| g.dot(&z) <= CONE_EPS)
        {
            hits += 1;
        }
    }
    Ok(AngleEstimate::bernoulli(hits, samples, seed, 0))
}

/// Conic intrinsic volumes `upsilon_0..upsilon_d` of a polyhedral cone:
/// for each face, the product of its internal angle and the solid angle of
/// its normal cone, summed by face dimension.
pub fn conic_intrinsic_volumes_mc(
    cone: &PolyCone,
    samples: u64,
    seed: RngSeed,
) -> Result<Vec<AngleEstimate>> {
    let d = cone.dim_ambient;
    let structure = cone.structure()?;
    let faces = cone.faces_with(&structure)?;

    let mut mean = vec![0.0f64; d + 1];
    let mut var = vec![0.0f64; d + 1];
    for (idx, face) in faces.iter().enumerate() {
        let alpha = face_solid_angle(
            cone,
            &structure,
            &face.rays,
            samples,
            derive_seed(seed, 2 * idx as u64),
        );
        let normal = face_normal_angle(
            cone,
            &face.active,
            samples,
            derive_seed(seed, 2 * idx as u64 + 1),
        )?;
        let product = alpha.mean * normal.mean;
        // independent streams, so the product variance splits
        let product_var = (alpha.mean * normal.stderr).powi(2)
            + (normal.mean * alpha.stderr).powi(2);
        mean[face.dim] += product;
        var[face.dim] += product_var;
    }
    Ok((0..=d)
        .map(|k| AngleEstimate {
            mean: mean[k],
            stderr: var[k].sqrt(),
            samples,
            seed,
            discarded: 0,
        })
        .collect())
}

/// Output of [`crofton_consistency`].
#[derive(Clone, Debug)]
pub struct CroftonReport {
    /// `|gamma_k - 2 (upsilon_{k+1} + upsilon_{k+3} + ...)|`.
    pub residual: f64,
    /// Combined standard error of the residual.
    pub stderr: f64,
    pub gamma: Vec<AngleEstimate>,
    pub upsilon: Vec<AngleEstimate>,
    /// Per-index residual and stderr of `upsilon_k = (gamma_{k-1} - gamma_{k+1})/2`
    /// with `gamma_{-1} = 1` and the top relation `upsilon_d = gamma_{d-1}/2`.
    pub relation_residuals: Vec<(f64, f64)>,
}

/// Monte Carlo check of the conic Crofton formula at index `k`, plus the
/// linear relations tying every intrinsic volume to two Grassmann angles.
pub fn crofton_consistency(
    cone: &PolyCone,
    k: usize,
    samples: u64,
    seed: RngSeed,
) -> Result<CroftonReport> {
    if cone.is_linear_subspace()? {
        return Err(Error::InvalidArgument(
            "Crofton consistency is defined for cones that are not subspaces".into(),
        ));
    }
    let d = cone.dim_ambient;
    assert!(k <= d);
    let gamma: Vec<AngleEstimate> = (0..=d)
        .map(|i| grassmann_angle_mc(cone, i, samples, derive_seed(seed, 100 + i as u64)))
        .collect::<Result<_>>()?;
    let upsilon = conic_intrinsic_volumes_mc(cone, samples, derive_seed(seed, 7))?;

    let mut tail = 0.0;
    let mut tail_var = 0.0;
    let mut i = k + 1;
    while i <= d {
        tail += upsilon[i].mean;
        tail_var += upsilon[i].stderr.powi(2);
        i += 2;
    }
    let residual = (gamma[k].mean - 2.0 * tail).abs();
    let stderr = (gamma[k].stderr.powi(2) + 4.0 * tail_var).sqrt();

    let mut relation_residuals = Vec::new();
    for idx in 0..=d {
        let (gamma_lo, var_lo) = if idx == 0 {
            (1.0, 0.0)
        } else {
            (gamma[idx - 1].mean, gamma[idx - 1].stderr.powi(2))
        };
        let (gamma_hi, var_hi) = if idx == d {
            (0.0, 0.0)
        } else {
            (gamma[idx + 1].mean, gamma[idx + 1].stderr.powi(2))
        };
        let predicted = 0.5 * (gamma_lo - gamma_hi);
        let res = (upsilon[idx].mean - predicted).abs();
        let se = (upsilon[idx].stderr.powi(2) + 0.25 * (var_lo + var_hi)).sqrt();
        relation_residuals.push((res, se));
    }

    Ok(CroftonReport {
        residual,
        stderr,
        gamma,
        upsilon,
        relation_residuals,
    })
}
