//! Random models and deterministic fixtures: Gaussian point clouds, convex
//! hulls of exchangeable random walks, Gaussian projections, and the named
//! polytopes and cones used throughout the test harness.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, PolyCone, Polytope};
use crate::rng::{gaussian_matrix, gaussian_vector, stream_rng, RngSeed};

pub use crate::rng::RngSeed as Seed;

/// Law of the walk increments.
///
/// `PermutedFixed` shuffles a fixed list of increments uniformly: the
/// minimal non-trivial exchangeable-but-dependent model. `IidGaussian`
/// satisfies exchangeability and general position almost surely.
#[derive(Clone, Debug)]
pub enum WalkIncrementModel {
    IidGaussian { dim: usize },
    PermutedFixed { increments: Vec<DVector<f64>> },
}

impl WalkIncrementModel {
    pub fn dim(&self) -> usize {
        match self {
            WalkIncrementModel::IidGaussian { dim } => *dim,
            WalkIncrementModel::PermutedFixed { increments } => increments[0].len(),
        }
    }
}

/// `n` independent standard Gaussian points in `R^d`; their hull is the
/// Gaussian polytope.
pub fn sample_gaussian_points(n: usize, d: usize, seed: RngSeed, trial: u64) -> Vec<DVector<f64>> {
    let mut rng = stream_rng(seed, trial);
    (0..n).map(|_| gaussian_vector(&mut rng, d)).collect()
}

/// Partial sums `S_0 = 0, S_1, ..., S_n` of the increment model.
///
/// Fails with a general-position error when some `d` of `S_1..S_n` are
/// linearly dependent within tolerance; callers are expected to abort, not
/// silently retry, since retrying would bias downstream estimators.
pub fn sample_walk_points(
    n: usize,
    model: &WalkIncrementModel,
    seed: RngSeed,
    trial: u64,
) -> Result<Vec<DVector<f64>>> {
    let d = model.dim();
    if n < d {
        return Err(Error::InvalidArgument(format!(
            "walk needs n >= d, got n={n}, d={d}"
        )));
    }
    let mut rng = stream_rng(seed, trial);
    let increments: Vec<DVector<f64>> = match model {
        WalkIncrementModel::IidGaussian { dim } => {
            (0..n).map(|_| gaussian_vector(&mut rng, *dim)).collect()
        }
        WalkIncrementModel::PermutedFixed { increments } => {
            if increments.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "permuted-fixed model has {} increments but n={n}",
                    increments.len()
                )));
            }
            let mut shuffled = increments.clone();
            shuffled.shuffle(&mut rng);
            shuffled
        }
    };

    let mut points = Vec::with_capacity(n + 1);
    points.push(DVector::zeros(d));
    let mut sum = DVector::zeros(d);
    for xi in increments {
        sum += xi;
        points.push(sum.clone());
    }
    check_general_position(&points[1..], d)?;
    Ok(points)
}

/// Finite-tolerance surrogate of the general-position condition: every `d`
/// of the given points must be linearly independent. Decided by the
/// determinant against the product of the point norms, which keeps the
/// per-trial cost at one small determinant per subset.
fn check_general_position(sums: &[DVector<f64>], d: usize) -> Result<()> {
    let n = sums.len();
    let mut matrix = DMatrix::zeros(d, d);
    let norms: Vec<f64> = sums.iter().map(|s| s.norm()).collect();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        for (col, &i) in subset.iter().enumerate() {
            matrix.set_column(col, &sums[i]);
        }
        let scale: f64 = subset.iter().map(|&i| norms[i]).product();
        if matrix.determinant().abs() <= 1e-12 * scale {
            return Err(Error::GeneralPosition(format!(
                "partial sums {subset:?} are linearly dependent within tolerance"
            )));
        }
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if subset[i] != i + n - d {
                break;
            }
        }
        if subset[i] == i + n - d {
            return Ok(());
        }
        subset[i] += 1;
        for j in i + 1..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Images of the given vertices under a `d x n` standard Gaussian matrix.
pub fn gaussian_projection_points(
    vertices: &[DVector<f64>],
    d: usize,
    seed: RngSeed,
    trial: u64,
) -> Result<Vec<DVector<f64>>> {
    let n = vertices[0].len();
    if d > n {
        return Err(Error::InvalidArgument(format!(
            "projection target dimension {d} exceeds source dimension {n}"
        )));
    }
    let mut rng = stream_rng(seed, trial);
    let a = gaussian_matrix(&mut rng, d, n);
    Ok(vertices.iter().map(|v| &a * v).collect())
}

/// Gaussian matrix for one trial; exposed so cone-valued projections
/// (`A R^n_+`) can reuse the same stream convention.
pub fn gaussian_projection_matrix(
    n: usize,
    d: usize,
    seed: RngSeed,
    trial: u64,
) -> DMatrix<f64> {
    let mut rng = stream_rng(seed, trial);
    gaussian_matrix(&mut rng, d, n)
}

/// Named deterministic fixtures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// `conv(e_1, ..., e_n)` mapped isometrically into `R^(n-1)`.
    RegularSimplex(usize),
    /// `conv(0, e_1, e_1+e_2, ..., e_1+...+e_n)` in `R^n`.
    Orthoscheme(usize),
    /// `[0,1]^d`.
    Cube(usize),
    /// `R^n_+` as a cone.
    Orthant(usize),
}

/// A fixture is either a polytope or a cone.
#[derive(Clone, Debug)]
pub enum FixtureBody {
    Polytope(Polytope),
    Cone(PolyCone),
}

impl Fixture {
    pub fn parse(text: &str) -> Result<Fixture> {
        let (name, arg) = text
            .split_once('(')
            .and_then(|(n, rest)| rest.strip_suffix(')').map(|a| (n, a)))
            .or_else(|| text.split_once('-').map(|(n, a)| (n, a)))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "fixture '{text}' is not of the form name(k), e.g. cube(3)"
                ))
            })?;
        let k: usize = arg.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("fixture parameter '{arg}' is not an integer"))
        })?;
        match name.trim() {
            "regular-simplex" | "simplex" => Ok(Fixture::RegularSimplex(k)),
            "orthoscheme" => Ok(Fixture::Orthoscheme(k)),
            "cube" => Ok(Fixture::Cube(k)),
            "orthant" => Ok(Fixture::Orthant(k)),
            other => Err(Error::InvalidArgument(format!("unknown fixture '{other}'"))),
        }
    }

    pub fn build(&self) -> Result<FixtureBody> {
        match *self {
            Fixture::RegularSimplex(n) => Ok(FixtureBody::Polytope(regular_simplex(n)?)),
            Fixture::Orthoscheme(n) => Ok(FixtureBody::Polytope(orthoscheme(n)?)),
            Fixture::Cube(d) => Ok(FixtureBody::Polytope(cube(d)?)),
            Fixture::Orthant(n) => Ok(FixtureBody::Cone(orthant(n))),
        }
    }
}

/// Vertices of `conv(e_1, ..., e_n)` expressed in an orthonormal basis of
/// the sum-zero hyperplane (a Helmert basis), so the regular simplex comes
/// out full-dimensional in `R^(n-1)` with side length `sqrt 2`.
pub fn regular_simplex_vertices(n: usize) -> Result<Vec<DVector<f64>>> {
    if n < 2 {
        return Err(Error::InvalidArgument("regular simplex needs n >= 2".into()));
    }
    let mut verts = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = DVector::zeros(n - 1);
        for k in 1..n {
            // Helmert row k: (1,...,1, -k, 0,...,0) / sqrt(k(k+1)), k ones.
            let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
            let coordinate = if i < k {
                scale
            } else if i == k {
                -(k as f64) * scale
            } else {
                0.0
            };
            v[k - 1] = coordinate;
        }
        verts.push(v);
    }
    Ok(verts)
}

/// Regular simplex fixture inside its affine hull.
pub fn regular_simplex(n: usize) -> Result<Polytope> {
    convex_hull(&regular_simplex_vertices(n)?)
}

/// Schlafli orthoscheme of type B: the hull of the origin and the partial
/// sums of the standard basis.
pub fn orthoscheme(n: usize) -> Result<Polytope> {
    if n < 1 {
        return Err(Error::InvalidArgument("orthoscheme needs n >= 1".into()));
    }
    let mut points = vec![DVector::zeros(n)];
    let mut sum = DVector::zeros(n);
    for i in 0..n {
        sum[i] = 1.0;
        points.push(sum.clone());
    }
    convex_hull(&points)
}

/// Unit cube `[0,1]^d`.
pub fn cube(d: usize) -> Result<Polytope> {
    if d < 1 || d > 6 {
        return Err(Error::InvalidArgument(
            "cube fixture supports 1 <= d <= 6".into(),
        ));
    }
    let points: Vec<DVector<f64>> = (0..1u32 << d)
        .map(|mask| DVector::from_fn(d, |i, _| ((mask >> i) & 1) as f64))
        .collect();
    convex_hull(&points)
}

/// Non-negative orthant `R^n_+` as a cone in halfspace form.
pub fn orthant(n: usize) -> PolyCone {
    PolyCone::from_halfspaces(
        n,
        (0..n).map(|i| {
            let mut v = DVector::zeros(n);
            v[i] = -1.0;
            v
        }),
    )
}
