//! Cross-module statistical invariants: the Monte Carlo layer against the
//! quadrature layer, distributional equalities of the projection models,
//! and the random-projection identities behind the angle-sum theorems.

use num_traits::ToPrimitive;

use polyangles::combinatorics::binomial;
use polyangles::cones::solid_angle_mc;
use polyangles::geometry::{convex_hull, face_lattice, project, tangent_cone};
use polyangles::harness::{run_experiment, ExperimentConfig, Model, Quantity};
use polyangles::models::{cube, regular_simplex, sample_gaussian_points, Fixture};
use polyangles::rng::{derive_seed, stream_rng, uniform_subspace_basis};
use polyangles::simplex_angles::{external_angle_sum, internal_angle_sum};
use polyangles::util::mean_and_stderr;

/// Quadrature vs sphere sampling: sigma_int[n,k] / C(n,k) is the solid
/// angle of the tangent cone of the regular simplex at a (k-1)-face.
#[test]
fn simplex_internal_angles_match_cone_sampling() {
    for &(n, k) in &[(3usize, 1usize), (4, 2), (5, 3), (6, 1), (6, 5)] {
        let tol = 1e-10;
        let expected = internal_angle_sum(n, k, tol).unwrap().value
            / binomial(n, k).to_f64().unwrap();
        let simplex = regular_simplex(n).unwrap();
        let lattice = face_lattice(&simplex);
        let face = &lattice[k - 1][0];
        let cone = tangent_cone(&simplex, face);
        let estimate = solid_angle_mc(&cone, 200_000, 1900 + (n * 10 + k) as u64).unwrap();
        let slack = 4.0 * estimate.stderr.max(1e-9);
        assert!(
            (estimate.mean - expected).abs() <= slack,
            "(n,k)=({n},{k}): sampled {} vs quadrature {expected}",
            estimate.mean
        );
    }
}

/// The same check for external angles through the normal cone.
#[test]
fn simplex_external_angles_match_cone_sampling() {
    for &(n, k) in &[(4usize, 1usize), (4, 3), (5, 2)] {
        let tol = 1e-10;
        let expected = external_angle_sum(n, k, tol).unwrap().value
            / binomial(n, k).to_f64().unwrap();
        let simplex = regular_simplex(n).unwrap();
        let lattice = face_lattice(&simplex);
        let face = &lattice[k - 1][0];
        let cone = polyangles::geometry::normal_cone(&simplex, face);
        let estimate = solid_angle_mc(&cone, 200_000, 2100 + (n * 10 + k) as u64).unwrap();
        let slack = 4.0 * estimate.stderr.max(1e-9);
        assert!(
            (estimate.mean - expected).abs() <= slack,
            "(n,k)=({n},{k}): sampled {} vs quadrature {expected}",
            estimate.mean
        );
    }
}

/// Gaussian projections of the regular simplex have the face statistics of
/// the Gaussian polytope; projections of the orthoscheme those of the
/// Gaussian-increment walk hull.
#[test]
fn projection_models_match_their_distributions() {
    let simplex = run_experiment(&ExperimentConfig {
        model: Model::Projection(Fixture::RegularSimplex(6)),
        n: 6,
        d: 3,
        j: 0,
        k: None,
        quantity: Quantity::FCount,
        trials: 8_000,
        samples_per_angle: 1,
        seed: 2200,
        tol: 1e-10,
    })
    .unwrap();
    assert!(simplex.z.unwrap().abs() < 3.0, "simplex z = {:?}", simplex.z);

    let orthoscheme = run_experiment(&ExperimentConfig {
        model: Model::Projection(Fixture::Orthoscheme(6)),
        n: 6,
        d: 3,
        j: 1,
        k: None,
        quantity: Quantity::FCount,
        trials: 8_000,
        samples_per_angle: 1,
        seed: 2300,
        tol: 1e-10,
    })
    .unwrap();
    assert!(
        orthoscheme.z.unwrap().abs() < 3.0,
        "orthoscheme z = {:?}",
        orthoscheme.z
    );
}

/// The gamma-route of the orthant projection: expected ray count and
/// Grassmann sums of the random cone A R^4_+ against the exact fixture
/// sums.
#[test]
fn orthant_projection_gamma_route() {
    // E f_1(A R^4_+) = f_1(R^4_+) - sum_G gamma_3(T_G) = 4 - 1 = 3
    let count = run_experiment(&ExperimentConfig {
        model: Model::Projection(Fixture::Orthant(4)),
        n: 4,
        d: 3,
        j: 1,
        k: None,
        quantity: Quantity::FCount,
        trials: 20_000,
        samples_per_angle: 1,
        seed: 2700,
        tol: 1e-10,
    })
    .unwrap();
    assert!((count.theory.approx - 3.0).abs() < 1e-12);
    assert!(count.z.unwrap().abs() < 3.0, "ray count z = {:?}", count.z);

    let gamma = run_experiment(&ExperimentConfig {
        model: Model::Projection(Fixture::Orthant(4)),
        n: 4,
        d: 3,
        j: 0,
        k: Some(1),
        quantity: Quantity::GrassmannSum,
        trials: 1_500,
        samples_per_angle: 256,
        seed: 2800,
        tol: 1e-10,
    })
    .unwrap();
    assert!(gamma.z.unwrap().abs() < 3.0, "gamma sum z = {:?}", gamma.z);
}

/// Perles-Shephard at k = d-1: the internal-angle sum over j-faces equals
/// (f_j(P) - E f_j(Pi_{d-1} P)) / 2 for a deterministic fixture.
#[test]
fn perles_shephard_on_cube() {
    let cube = cube(3).unwrap();
    let lattice = face_lattice(&cube);
    let seed = 2400u64;
    for j in 0..2usize {
        let mut beta_sum = 0.0;
        let mut beta_var = 0.0;
        for (idx, face) in lattice[j].iter().enumerate() {
            let cone = tangent_cone(&cube, face);
            let est = solid_angle_mc(&cone, 40_000, derive_seed(seed, idx as u64)).unwrap();
            beta_sum += est.mean;
            beta_var += est.stderr * est.stderr;
        }
        let draws = 4_000u64;
        let counts: Vec<f64> = (0..draws)
            .map(|t| {
                let mut rng = stream_rng(derive_seed(seed, 999), t);
                let basis = uniform_subspace_basis(&mut rng, 3, 2);
                let image = project(&cube, &basis.transpose()).unwrap();
                face_lattice(&image)[j].len() as f64
            })
            .collect();
        let (mean_count, se_count) = mean_and_stderr(&counts);
        let rhs = 0.5 * lattice[j].len() as f64 - 0.5 * mean_count;
        let se = (beta_var + 0.25 * se_count * se_count).sqrt();
        assert!(
            (beta_sum - rhs).abs() <= 3.0 * se.max(1e-9),
            "j={j}: beta sum {beta_sum} vs half deficit {rhs}"
        );
    }
}

/// Injecting a 1e-3 perturbation into one angle-sum term must be visible
/// in the convolution-identity residual (sensitivity of the checker).
#[test]
fn identity_residual_detects_perturbation() {
    let tol = 1e-10;
    let n = 6;
    let k = 2;
    let mut alternating = 0.0;
    let mut plain = 0.0;
    for m in k..=n {
        let mut ext = external_angle_sum(n, m, tol).unwrap().value;
        if m == 4 {
            ext += 1e-3;
        }
        let term = ext * internal_angle_sum(m, k, tol).unwrap().value;
        let sign = if (n - m) % 2 == 0 { 1.0 } else { -1.0 };
        alternating += sign * term;
        plain += term;
    }
    let binom = binomial(n, k).to_f64().unwrap();
    let residual = alternating.abs().max((plain - binom).abs());
    assert!(residual > 1e-4, "perturbation went unnoticed: {residual:e}");
}

/// Estimated f-vector of a projected simplex against the closed form, face
/// dimension by face dimension (the distributional identity behind the
/// Gaussian-polytope formula).
#[test]
fn projected_simplex_f_vector_matches_formula() {
    let simplex = regular_simplex(6).unwrap();
    let trials = 6_000u64;
    for j in 0..3usize {
        let values: Vec<f64> = (0..trials)
            .map(|t| {
                let mut rng = stream_rng(2500, t);
                let basis = uniform_subspace_basis(&mut rng, 5, 3);
                let image = project(&simplex, &basis.transpose()).unwrap();
                face_lattice(&image)[j].len() as f64
            })
            .collect();
        let (mean, se) = mean_and_stderr(&values);
        let expect = polyangles::theory::ef_gaussian(6, 3, j, 1e-10).unwrap().approx;
        let z = (mean - expect) / se;
        assert!(z.abs() < 3.0, "j={j}: mean {mean} vs {expect}, z = {z:.2}");
    }
}

/// The walk theorems hold for any exchangeable increments in general
/// position, not just Gaussian ones: a fixed increment list under uniform
/// shuffling must reproduce the same 2 H_n vertex count.
#[test]
fn dependent_exchangeable_walk_matches_theory() {
    use polyangles::models::{sample_walk_points, WalkIncrementModel};
    use nalgebra::DVector;

    let n = 8usize;
    // a fixed, asymmetric increment list (checked for general position by
    // the sampler itself)
    let increments: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            let a = 0.7 + 0.31 * i as f64;
            DVector::from_vec(vec![a.cos() * (1.0 + 0.2 * i as f64), a.sin() - 0.1])
        })
        .collect();
    let model = WalkIncrementModel::PermutedFixed { increments };
    let trials = 20_000u64;
    let values: Vec<f64> = (0..trials)
        .map(|t| {
            let points = sample_walk_points(n, &model, 2900, t).unwrap();
            convex_hull(&points).unwrap().vertices.len() as f64
        })
        .collect();
    let (mean, se) = mean_and_stderr(&values);
    let expect = 2.0 * polyangles::combinatorics::harmonic(n, 1).to_f64().unwrap();
    let z = (mean - expect) / se;
    assert!(z.abs() < 3.0, "mean {mean} vs {expect}, z = {z:.2}");
}

/// Intrinsic-volume sums as a harness quantity on the Gaussian polytope:
/// the k = 1 sum over vertices of P(5,2) equals half the expected vertex
/// count (every planar vertex cone has upsilon_1 = 1/2).
#[test]
fn intrinsic_sum_quantity_on_gaussian_model() {
    let row = run_experiment(&ExperimentConfig {
        model: Model::Gaussian,
        n: 5,
        d: 2,
        j: 0,
        k: Some(1),
        quantity: Quantity::IntrinsicSum,
        trials: 1_500,
        samples_per_angle: 256,
        seed: 3000,
        tol: 1e-10,
    })
    .unwrap();
    let half_f0 = 0.5 * polyangles::theory::ef_gaussian(5, 2, 0, 1e-10).unwrap().approx;
    assert!((row.theory.approx - half_f0).abs() < 1e-8);
    assert!(row.z.unwrap().abs() < 3.0, "z = {:?}", row.z);
}

/// External-angle sums on the cone-valued projection model, against the
/// orthant fixture's exact value.
#[test]
fn external_sum_quantity_on_orthant_model() {
    let row = run_experiment(&ExperimentConfig {
        model: Model::Projection(Fixture::Orthant(4)),
        n: 4,
        d: 3,
        j: 1,
        k: None,
        quantity: Quantity::ExternalSum,
        trials: 1_500,
        samples_per_angle: 384,
        seed: 3100,
        tol: 1e-10,
    })
    .unwrap();
    // upsilon-sum at k = j: binom(4,1) * binom(3,0) * 2^(1-4) = 1/2
    assert!((row.theory.approx - 0.5).abs() < 1e-12);
    assert!(row.z.unwrap().abs() < 3.0, "z = {:?}", row.z);
}

/// One-dimensional models degenerate cleanly: every hull is a segment.
#[test]
fn one_dimensional_models() {
    let row = run_experiment(&ExperimentConfig {
        model: Model::Gaussian,
        n: 5,
        d: 1,
        j: 0,
        k: None,
        quantity: Quantity::FCount,
        trials: 500,
        samples_per_angle: 1,
        seed: 3200,
        tol: 1e-10,
    })
    .unwrap();
    assert_eq!(row.estimate.unwrap(), 2.0);
    assert!((row.theory.approx - 2.0).abs() <= row.theory.abs_error_bound);
    assert_eq!(row.z.unwrap(), 0.0);
}

/// Hulls of Gaussian samples at the simplex boundary n = d + 1: every
/// trial is a simplex, so the f-vector is deterministic.
#[test]
fn gaussian_boundary_hull_is_simplex() {
    for trial in 0..200u64 {
        let points = sample_gaussian_points(5, 4, 2600, trial);
        let hull = convex_hull(&points).unwrap();
        let f = hull.f_vector();
        for (j, &count) in f.iter().enumerate() {
            assert_eq!(
                count,
                binomial(5, j + 1).to_usize().unwrap(),
                "trial {trial} f_{j}"
            );
        }
    }
}
