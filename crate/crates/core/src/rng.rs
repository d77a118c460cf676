//! Reproducible random streams.
//!
//! Every Monte Carlo routine in this crate draws from a ChaCha8 stream keyed
//! by `(seed, stream_index)`. Streams are independent, so trials can be
//! distributed across workers in any order and still reproduce the
//! single-threaded run bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// 64-bit seed identifying an entire experiment.
pub type RngSeed = u64;

/// RNG for one work item (a trial, or one estimator run) of an experiment.
pub fn stream_rng(seed: RngSeed, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministically derived sub-seed (splitmix64 over `seed ^ salt`).
/// Used when one estimator needs several independent named streams.
pub fn derive_seed(seed: RngSeed, salt: u64) -> RngSeed {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard Gaussian vector in `R^d`.
pub fn gaussian_vector(rng: &mut impl Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// Matrix with independent standard Gaussian entries.
pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere of `R^d`.
pub fn unit_sphere_point(rng: &mut impl Rng, d: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, d);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Orthonormal basis of a uniformly distributed `m`-dimensional linear
/// subspace of `R^d`.
///
/// The span of a `d x m` standard Gaussian matrix is uniform on the
/// Grassmannian by rotation invariance; QR orthonormalizes the frame.
pub fn uniform_subspace_basis(rng: &mut impl Rng, d: usize, m: usize) -> DMatrix<f64> {
    assert!(m <= d, "subspace dimension exceeds ambient dimension");
    loop {
        let g = gaussian_matrix(rng, d, m);
        let qr = g.clone().qr();
        let r = qr.r();
        // a.s. full rank; retry on the null event
        if (0..m).all(|i| r[(i, i)].abs() > 1e-9) {
            return qr.q();
        }
    }
}
