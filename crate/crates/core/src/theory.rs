//! Closed-form expectations for both random-polytope models.
//!
//! Walk-model values are exact rationals built from Stirling numbers;
//! Gaussian-model values are finite sums of products of regular-simplex
//! angle sums with term-wise propagated quadrature error. Quantities that
//! admit two equivalent forms (primary and alternative Grassmann sums, the
//! two alternating forms at the top intrinsic index) are evaluated both
//! ways and compared at evaluation time — the redundancy is free
//! verification.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::combinatorics::{binomial, factorial, stirling_first, stirling_second};
use crate::error::{Error, Result};
use crate::simplex_angles::{external_angle_sum, internal_angle_sum};

/// Default per-term quadrature tolerance for Gaussian-model sums.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A theoretical value: exact rational when available, otherwise a float
/// with an accumulated absolute error bound.
#[derive(Clone, Debug)]
pub struct TheoryValue {
    pub exact: Option<BigRational>,
    pub approx: f64,
    pub abs_error_bound: f64,
}

impl TheoryValue {
    pub fn from_exact(value: BigRational) -> Self {
        let approx = value.to_f64().unwrap_or(f64::NAN);
        TheoryValue {
            exact: Some(value),
            approx,
            abs_error_bound: 0.0,
        }
    }

    pub fn from_quadrature(approx: f64, abs_error_bound: f64) -> Self {
        TheoryValue {
            exact: None,
            approx,
            abs_error_bound,
        }
    }

    pub fn zero() -> Self {
        TheoryValue::from_exact(BigRational::zero())
    }

    /// Exact value rendered as `p/q`, or empty for quadrature values.
    pub fn exact_string(&self) -> String {
        self.exact.as_ref().map(|r| r.to_string()).unwrap_or_default()
    }

    fn add(&self, other: &TheoryValue) -> TheoryValue {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => TheoryValue::from_exact(a + b),
            _ => TheoryValue::from_quadrature(
                self.approx + other.approx,
                self.abs_error_bound + other.abs_error_bound,
            ),
        }
    }

    fn sub(&self, other: &TheoryValue) -> TheoryValue {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => TheoryValue::from_exact(a - b),
            _ => TheoryValue::from_quadrature(
                self.approx - other.approx,
                self.abs_error_bound + other.abs_error_bound,
            ),
        }
    }
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// One Gaussian-model product `sigma_ext[n, m1] * sigma_int[m2, k2]` with
/// its propagated error bound. Out-of-range indices contribute exact zero.
fn sigma_product(n: usize, m1: usize, m2: usize, k2: usize, tol: f64) -> Result<(f64, f64)> {
    if m1 == 0 || m1 > n || k2 == 0 || k2 > m2 {
        return Ok((0.0, 0.0));
    }
    let ext = external_angle_sum(n, m1, tol)?;
    let int = internal_angle_sum(m2, k2, tol)?;
    let value = ext.value * int.value;
    let bound = ext.value.abs() * int.abs_error_bound
        + int.value.abs() * ext.abs_error_bound
        + ext.abs_error_bound * int.abs_error_bound;
    Ok((value, bound))
}

/// `2 sum_{l>=0} sigma_ext[n, top-2l] * sigma_int[top-2l, j+1]`.
fn gaussian_descending_sum(n: usize, top: isize, j: usize, tol: f64) -> Result<TheoryValue> {
    let mut value = 0.0;
    let mut bound = 0.0;
    let mut m = top;
    while m >= (j + 1) as isize {
        if m >= 1 {
            let (v, b) = sigma_product(n, m as usize, m as usize, j + 1, tol)?;
            value += 2.0 * v;
            bound += 2.0 * b;
        }
        m -= 2;
    }
    Ok(TheoryValue::from_quadrature(value, bound))
}

/// `2 sum_{l>=1} sigma_ext[n, base+2l] * sigma_int[base+2l, j+1]`.
fn gaussian_ascending_sum(n: usize, base: usize, j: usize, tol: f64) -> Result<TheoryValue> {
    let mut value = 0.0;
    let mut bound = 0.0;
    let mut m = base + 2;
    while m <= n {
        let (v, b) = sigma_product(n, m, m, j + 1, tol)?;
        value += 2.0 * v;
        bound += 2.0 * b;
        m += 2;
    }
    Ok(TheoryValue::from_quadrature(value, bound))
}

/// `(2 j!/n!) sum_{l>=0} s[n+1, top-2l] S[top-2l, j+1]`, exact.
fn walk_descending_sum(n: usize, top: isize, j: usize) -> BigRational {
    let mut acc = BigInt::zero();
    let mut m = top;
    while m >= (j + 1) as isize {
        if m >= 1 {
            acc += stirling_first(n + 1, m as usize) * stirling_second(m as usize, j + 1);
        }
        m -= 2;
    }
    ratio(BigInt::from(2) * factorial(j) * acc, factorial(n))
}

/// `(2 j!/n!) sum_{l>=1} s[n+1, base+2l] S[base+2l, j+1]`, exact.
fn walk_ascending_sum(n: usize, base: usize, j: usize) -> BigRational {
    let mut acc = BigInt::zero();
    let mut m = base + 2;
    while m <= n + 1 {
        acc += stirling_first(n + 1, m) * stirling_second(m, j + 1);
        m += 2;
    }
    ratio(BigInt::from(2) * factorial(j) * acc, factorial(n))
}

fn check_gaussian_ranges(n: usize, d: usize, j: usize) -> Result<()> {
    if d == 0 || n < d + 1 || j >= d {
        return Err(Error::InvalidArgument(format!(
            "gaussian model requires n >= d+1 and 0 <= j < d, got n={n}, d={d}, j={j}"
        )));
    }
    Ok(())
}

// The walk theorems are stated for n >= d, but the Stirling sums evaluate
// for every n >= 1 and remain the correct volume-normalized expectations
// when the hull is lower-dimensional (all solid angles of a degenerate hull
// vanish), so the theory layer accepts the full range. Samplers still
// require n >= d.
fn check_walk_ranges(n: usize, d: usize, j: usize) -> Result<()> {
    if d == 0 || n == 0 || j >= d {
        return Err(Error::InvalidArgument(format!(
            "walk model requires n >= 1 and 0 <= j < d, got n={n}, d={d}, j={j}"
        )));
    }
    Ok(())
}

/// Expected number of `j`-faces of the Gaussian polytope on `n` points in
/// `R^d`.
pub fn ef_gaussian(n: usize, d: usize, j: usize, tol: f64) -> Result<TheoryValue> {
    check_gaussian_ranges(n, d, j)?;
    gaussian_descending_sum(n, d as isize, j, tol)
}

/// Expected number of `j`-faces of the convex hull of an exchangeable
/// random walk with `n` steps in `R^d`; exact.
pub fn ef_walk(n: usize, d: usize, j: usize) -> Result<TheoryValue> {
    check_walk_ranges(n, d, j)?;
    Ok(TheoryValue::from_exact(walk_descending_sum(n, d as isize, j)))
}

/// Expected sum of the `k`-th Grassmann angles over the `j`-faces of the
/// Gaussian polytope. Computed from the difference of two descending sums
/// and cross-checked against the ascending alternative form.
pub fn grassmann_sum_gaussian(n: usize, d: usize, j: usize, k: usize, tol: f64) -> Result<TheoryValue> {
    check_gaussian_ranges(n, d, j)?;
    if k > d {
        return Err(Error::InvalidArgument(format!("k={k} exceeds d={d}")));
    }
    let primary =
        gaussian_descending_sum(n, d as isize, j, tol)?.sub(&gaussian_descending_sum(n, k as isize, j, tol)?);
    let alternative =
        gaussian_ascending_sum(n, k, j, tol)?.sub(&gaussian_ascending_sum(n, d, j, tol)?);
    let slack = (10.0 * tol).max(primary.abs_error_bound + alternative.abs_error_bound);
    if (primary.approx - alternative.approx).abs() > slack {
        return Err(Error::InternalInconsistency(format!(
            "grassmann sum forms disagree: {} vs {} (slack {slack:e})",
            primary.approx, alternative.approx
        )));
    }
    Ok(primary)
}

/// Walk-model analog of [`grassmann_sum_gaussian`]; both forms exact and
/// required to coincide exactly.
pub fn grassmann_sum_walk(n: usize, d: usize, j: usize, k: usize) -> Result<TheoryValue> {
    check_walk_ranges(n, d, j)?;
    if k > d {
        return Err(Error::InvalidArgument(format!("k={k} exceeds d={d}")));
    }
    let primary = walk_descending_sum(n, d as isize, j) - walk_descending_sum(n, k as isize, j);
    let alternative = walk_ascending_sum(n, k, j) - walk_ascending_sum(n, d, j);
    if primary != alternative {
        return Err(Error::InternalInconsistency(format!(
            "walk grassmann sum forms disagree: {primary} vs {alternative}"
        )));
    }
    Ok(TheoryValue::from_exact(primary))
}

/// Expected sum of internal angles at the `j`-faces of the Gaussian
/// polytope: the alternating simplex-angle sum.
pub fn internal_angle_sum_gaussian(n: usize, d: usize, j: usize, tol: f64) -> Result<TheoryValue> {
    check_gaussian_ranges(n, d, j)?;
    let mut value = 0.0;
    let mut bound = 0.0;
    for m in (j + 1..=d).rev() {
        let (v, b) = sigma_product(n, m, m, j + 1, tol)?;
        let sign = if (d - m) % 2 == 0 { 1.0 } else { -1.0 };
        value += sign * v;
        bound += b;
    }
    Ok(TheoryValue::from_quadrature(value, bound))
}

/// Expected sum of internal angles at the `j`-faces of the walk hull;
/// exact.
pub fn internal_angle_sum_walk(n: usize, d: usize, j: usize) -> Result<TheoryValue> {
    check_walk_ranges(n, d, j)?;
    let mut acc = BigRational::zero();
    for m in (j + 1..=d).rev() {
        let term = ratio(
            factorial(j) * stirling_first(n + 1, m) * stirling_second(m, j + 1),
            factorial(n),
        );
        if (d - m) % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(TheoryValue::from_exact(acc))
}

/// Expected sum of the `k`-th conic intrinsic volumes of the tangent cones
/// at `j`-faces of the Gaussian polytope. For `k = d` both alternating
/// forms are evaluated and compared.
pub fn intrinsic_sum_gaussian(n: usize, d: usize, j: usize, k: usize, tol: f64) -> Result<TheoryValue> {
    check_gaussian_ranges(n, d, j)?;
    if k < j || k > d {
        return Err(Error::InvalidArgument(format!(
            "intrinsic sums need j <= k <= d, got j={j}, k={k}, d={d}"
        )));
    }
    if k < d {
        let (v, b) = sigma_product(n, k + 1, k + 1, j + 1, tol)?;
        return Ok(TheoryValue::from_quadrature(v, b));
    }
    // k = d: descending alternating form, checked against the ascending one
    let primary = internal_angle_sum_gaussian(n, d, j, tol)?;
    let mut alt = 0.0;
    let mut alt_bound = 0.0;
    for m in d + 1..=n {
        let (v, b) = sigma_product(n, m, m, j + 1, tol)?;
        let sign = if (m - d) % 2 == 1 { 1.0 } else { -1.0 };
        alt += sign * v;
        alt_bound += b;
    }
    let slack = (10.0 * tol).max(primary.abs_error_bound + alt_bound);
    if (primary.approx - alt).abs() > slack {
        return Err(Error::InternalInconsistency(format!(
            "intrinsic top-index forms disagree: {} vs {alt} (slack {slack:e})",
            primary.approx
        )));
    }
    Ok(primary)
}

/// Walk-model analog of [`intrinsic_sum_gaussian`]; exact.
pub fn intrinsic_sum_walk(n: usize, d: usize, j: usize, k: usize) -> Result<TheoryValue> {
    check_walk_ranges(n, d, j)?;
    if k < j || k > d {
        return Err(Error::InvalidArgument(format!(
            "intrinsic sums need j <= k <= d, got j={j}, k={k}, d={d}"
        )));
    }
    if k < d {
        return Ok(TheoryValue::from_exact(ratio(
            factorial(j) * stirling_first(n + 1, k + 1) * stirling_second(k + 1, j + 1),
            factorial(n),
        )));
    }
    let primary = internal_angle_sum_walk(n, d, j)?;
    let mut alt = BigRational::zero();
    for m in d + 1..=n + 1 {
        let term = ratio(
            factorial(j) * stirling_first(n + 1, m) * stirling_second(m, j + 1),
            factorial(n),
        );
        if (m - d) % 2 == 1 {
            alt += term;
        } else {
            alt -= term;
        }
    }
    if primary.exact.as_ref() != Some(&alt) {
        return Err(Error::InternalInconsistency(
            "walk intrinsic top-index forms disagree".into(),
        ));
    }
    Ok(primary)
}

/// Expected sum of external angles at `j`-faces of the Gaussian polytope:
/// the external simplex-angle total `sigma_ext[n, j+1]`.
pub fn external_angle_sum_gaussian(n: usize, d: usize, j: usize, tol: f64) -> Result<TheoryValue> {
    intrinsic_sum_gaussian(n, d, j, j, tol)
}

/// Expected sum of external angles at `j`-faces of the walk hull:
/// `(j!/n!) s[n+1, j+1]`, exact.
pub fn external_angle_sum_walk(n: usize, d: usize, j: usize) -> Result<TheoryValue> {
    intrinsic_sum_walk(n, d, j, j)
}

/// Per-face-dimension angle data of a deterministic fixture `P`: the number
/// of `j`-faces and the sums over `j`-faces of the conic intrinsic volumes
/// of the tangent cones, indexed by `k = 0..=ambient`.
///
/// Grassmann-angle sums follow by the conic Crofton formula, which applies
/// term-wise because no tangent cone of a pointed face is a subspace.
#[derive(Clone, Debug)]
pub struct FixtureFaceSums {
    /// Dimension in which the fixture's cones live (the affine-hull
    /// dimension for the regular simplex).
    pub ambient: usize,
    pub j: usize,
    pub face_count: TheoryValue,
    pub upsilon: Vec<TheoryValue>,
}

impl FixtureFaceSums {
    /// `sum_G gamma_k(T_G(P))` from the Crofton tail; `k = -1` returns the
    /// face count (`gamma_{-1} = 1` by convention).
    pub fn gamma_sum(&self, k: isize) -> TheoryValue {
        if k < 0 {
            return self.face_count.clone();
        }
        let mut acc = TheoryValue::zero();
        let mut i = k as usize + 1;
        while i <= self.ambient {
            acc = acc.add(&self.upsilon[i]);
            i += 2;
        }
        acc.add(&acc)
    }
}

/// Exact face sums of the orthant `R^n_+` at face dimension `j`:
/// `binom(n,j) binom(n-j, k-j) 2^(j-n)`.
pub fn orthant_face_sums(n: usize, j: usize) -> Result<FixtureFaceSums> {
    if j > n {
        return Err(Error::InvalidArgument(format!("orthant has no {j}-faces in R^{n}")));
    }
    let two_pow = BigInt::one() << (n - j);
    let faces = binomial(n, j);
    let upsilon = (0..=n)
        .map(|k| {
            if k < j {
                TheoryValue::zero()
            } else {
                TheoryValue::from_exact(ratio(&faces * binomial(n - j, k - j), two_pow.clone()))
            }
        })
        .collect();
    Ok(FixtureFaceSums {
        ambient: n,
        j,
        face_count: TheoryValue::from_exact(BigRational::from_integer(faces)),
        upsilon,
    })
}

/// Exact face sums of the Schlafli orthoscheme in `R^n` at face dimension
/// `j`: `(j!/n!) s[n+1, k+1] S[k+1, j+1]`.
pub fn orthoscheme_face_sums(n: usize, j: usize) -> Result<FixtureFaceSums> {
    if j > n {
        return Err(Error::InvalidArgument(format!(
            "orthoscheme has no {j}-faces in R^{n}"
        )));
    }
    let upsilon = (0..=n)
        .map(|k| {
            TheoryValue::from_exact(ratio(
                factorial(j) * stirling_first(n + 1, k + 1) * stirling_second(k + 1, j + 1),
                factorial(n),
            ))
        })
        .collect();
    Ok(FixtureFaceSums {
        ambient: n,
        j,
        face_count: TheoryValue::from_exact(BigRational::from_integer(binomial(n + 1, j + 1))),
        upsilon,
    })
}

/// Face sums of the regular `n`-vertex simplex at face dimension `j`,
/// working inside its affine hull of dimension `n-1`:
/// `sigma_ext[n, k+1] sigma_int[k+1, j+1]`.
pub fn regular_simplex_face_sums(n: usize, j: usize, tol: f64) -> Result<FixtureFaceSums> {
    if n < 2 || j + 1 > n {
        return Err(Error::InvalidArgument(format!(
            "regular simplex on {n} vertices has no {j}-faces"
        )));
    }
    let upsilon = (0..n)
        .map(|k| {
            let (v, b) = sigma_product(n, k + 1, k + 1, j + 1, tol)?;
            Ok(TheoryValue::from_quadrature(v, b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixtureFaceSums {
        ambient: n - 1,
        j,
        face_count: TheoryValue::from_exact(BigRational::from_integer(binomial(n, j + 1))),
        upsilon,
    })
}

/// Expected Grassmann-angle sum `E sum_F gamma_k(T_F(AP))` for the Gaussian
/// projection of the fixture into `R^d`: `gamma_sum_k - gamma_sum_d` of the
/// fixture itself. `k = j - 1` (as `-1`-convention) gives the expected face
/// count of the image; `k = d` vanishes term-wise.
pub fn projection_grassmann_sum(sums: &FixtureFaceSums, d: usize, k: isize) -> Result<TheoryValue> {
    if d > sums.ambient || k < sums.j as isize - 1 || k > d as isize {
        return Err(Error::InvalidArgument(format!(
            "projection sums need j-1 <= k <= d <= ambient, got k={k}, d={d}"
        )));
    }
    Ok(sums.gamma_sum(k).sub(&sums.gamma_sum(d as isize)))
}

/// Expected intrinsic-volume sum `E sum_F upsilon_k(T_F(AP))` for the
/// Gaussian projection of the fixture into `R^d`: equal to the fixture's
/// own sum for `k < d`, and the alternating tail for `k = d`.
pub fn projection_upsilon_sum(sums: &FixtureFaceSums, d: usize, k: usize) -> Result<TheoryValue> {
    if d > sums.ambient || k < sums.j || k > d {
        return Err(Error::InvalidArgument(format!(
            "projection sums need j <= k <= d <= ambient, got j={}, k={k}, d={d}",
            sums.j
        )));
    }
    if k < d {
        return Ok(sums.upsilon[k].clone());
    }
    let mut acc = TheoryValue::zero();
    for s in 0..=(sums.ambient - d) {
        if s % 2 == 0 {
            acc = acc.add(&sums.upsilon[d + s]);
        } else {
            acc = acc.sub(&sums.upsilon[d + s]);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::harmonic;

    fn rational(num: i64, den: i64) -> BigRational {
        ratio(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn walk_face_counts() {
        // segment count
        let seg = ef_walk(1, 1, 0).unwrap();
        assert_eq!(seg.exact.unwrap(), rational(2, 1));
        // Baxter: E f_0 of the planar walk hull is 2 H_n
        for n in 2..=10 {
            let expect = harmonic(n, 1) * rational(2, 1);
            assert_eq!(ef_walk(n, 2, 0).unwrap().exact.unwrap(), expect, "n={n}");
        }
        // three steps in R^3 form a simplex a.s.
        for j in 0..3 {
            let expect = BigRational::from_integer(binomial(4, j + 1));
            assert_eq!(ef_walk(3, 3, j).unwrap().exact.unwrap(), expect);
        }
    }

    #[test]
    fn walk_internal_angle_sums_match_harmonic_forms() {
        // d=2: H_n - 1
        for n in 2..=12 {
            let expect = harmonic(n, 1) - BigRational::one();
            assert_eq!(
                internal_angle_sum_walk(n, 2, 0).unwrap().exact.unwrap(),
                expect,
                "n={n}"
            );
        }
        // d=3 vertices: H_n^2/2 - H_n - H_n^(2)/2 + 1
        for n in 3..=10 {
            let h = harmonic(n, 1);
            let h2 = harmonic(n, 2);
            let expect = &h * &h * rational(1, 2) - &h - h2 * rational(1, 2) + BigRational::one();
            assert_eq!(
                internal_angle_sum_walk(n, 3, 0).unwrap().exact.unwrap(),
                expect,
                "n={n}"
            );
        }
        // d=3 edges: (3/2)H_n^2 - H_n - (3/2)H_n^(2)
        for n in 3..=10 {
            let h = harmonic(n, 1);
            let h2 = harmonic(n, 2);
            let expect = &h * &h * rational(3, 2) - &h - h2 * rational(3, 2);
            assert_eq!(
                internal_angle_sum_walk(n, 3, 1).unwrap().exact.unwrap(),
                expect,
                "n={n}"
            );
        }
        // frozen anchor: n=3, d=3 vertex sum is exactly 1/6
        assert_eq!(
            internal_angle_sum_walk(3, 3, 0).unwrap().exact.unwrap(),
            rational(1, 6)
        );
    }

    #[test]
    fn walk_grassmann_closed_form() {
        // (n=10, d=2, j=0, k=1): 2 H_10 - 2
        let value = grassmann_sum_walk(10, 2, 0, 1).unwrap();
        let expect = harmonic(10, 1) * rational(2, 1) - rational(2, 1);
        assert_eq!(value.exact.unwrap(), expect);
        // k = d gives zero
        assert!(grassmann_sum_walk(7, 3, 1, 3).unwrap().exact.unwrap().is_zero());
        // k <= j reduces to the face count
        for k in 0..=1 {
            assert_eq!(
                grassmann_sum_walk(6, 3, 1, k).unwrap().exact.unwrap(),
                ef_walk(6, 3, 1).unwrap().exact.unwrap()
            );
        }
    }

    #[test]
    fn walk_intrinsic_values() {
        // (3,2,1,1): (1/6) s[4,2] = 11/6
        let v = intrinsic_sum_walk(3, 2, 1, 1).unwrap();
        assert_eq!(v.exact.unwrap(), rational(11, 6));
        // j = k = 0 is the external-angle total, always 1
        for (n, d) in [(4, 2), (5, 3), (7, 4)] {
            assert_eq!(
                intrinsic_sum_walk(n, d, 0, 0).unwrap().exact.unwrap(),
                BigRational::one()
            );
        }
        // the k = d case equals the internal-angle corollary
        assert_eq!(
            intrinsic_sum_walk(6, 3, 1, 3).unwrap().exact.unwrap(),
            internal_angle_sum_walk(6, 3, 1).unwrap().exact.unwrap()
        );
    }

    #[test]
    fn gaussian_simplex_boundary() {
        // n = d+1: the hull is a simplex a.s., so E f_j = binom(d+1, j+1)
        for d in 1..=5 {
            for j in 0..d {
                let value = ef_gaussian(d + 1, d, j, 1e-10).unwrap();
                let expect = binomial(d + 1, j + 1).to_f64().unwrap();
                assert!(
                    (value.approx - expect).abs() < 1e-6,
                    "d={d} j={j}: {} vs {expect}",
                    value.approx
                );
            }
        }
    }

    #[test]
    fn gaussian_segment_case() {
        let v = ef_gaussian(5, 1, 0, 1e-10).unwrap();
        assert!((v.approx - 2.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_forms_cross_check() {
        for k in 0..=3 {
            let v = grassmann_sum_gaussian(6, 3, 0, k, 1e-10).unwrap();
            assert!(v.approx >= -1e-9);
        }
        // k = d must vanish
        let top = grassmann_sum_gaussian(6, 3, 0, 3, 1e-10).unwrap();
        assert!(top.approx.abs() < 1e-8);
    }

    #[test]
    fn gaussian_grassmann_monotone_in_k() {
        let values: Vec<f64> = (0..=3)
            .map(|k| grassmann_sum_gaussian(7, 3, 0, k, 1e-10).unwrap().approx)
            .collect();
        for w in values.windows(2) {
            assert!(w[0] >= w[1] - 1e-8, "{values:?}");
        }
        let walk_values: Vec<BigRational> = (0..=3)
            .map(|k| grassmann_sum_walk(7, 3, 0, k).unwrap().exact.unwrap())
            .collect();
        for w in walk_values.windows(2) {
            assert!(w[0] >= w[1], "walk values not monotone");
        }
    }

    #[test]
    fn external_angle_corollaries() {
        // Gaussian: sigma_ext[n, 1] = 1 at j = 0
        for (n, d) in [(4, 2), (6, 3)] {
            let v = external_angle_sum_gaussian(n, d, 0, 1e-10).unwrap();
            assert!((v.approx - 1.0).abs() < 1e-8);
        }
        // walk: (j!/n!) s[n+1, j+1]
        let v = external_angle_sum_walk(6, 3, 1).unwrap();
        let expect = ratio(stirling_first(7, 2), factorial(6));
        assert_eq!(v.exact.unwrap(), expect);
    }

    #[test]
    fn gram_euler_in_expectation() {
        // sum_j (-1)^j internal_sum(n,d,j) + (-1)^d = 0
        for (n, d) in [(6usize, 2usize), (6, 3), (5, 4)] {
            let mut acc = BigRational::zero();
            for j in 0..d {
                let term = internal_angle_sum_walk(n, d, j).unwrap().exact.unwrap();
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            let parity = if d % 2 == 0 { BigRational::one() } else { -BigRational::one() };
            assert!((acc + parity).is_zero(), "walk Gram-Euler failed at n={n}, d={d}");

            let mut facc = 0.0;
            for j in 0..d {
                let term = internal_angle_sum_gaussian(n + 1, d, j, 1e-10).unwrap().approx;
                facc += if j % 2 == 0 { term } else { -term };
            }
            facc += if d % 2 == 0 { 1.0 } else { -1.0 };
            assert!(facc.abs() < 1e-8, "gaussian Gram-Euler failed at n={n}, d={d}");
        }
    }

    #[test]
    fn crofton_telescopes_grassmann_sums() {
        // gamma-sum from the upsilon route: 2 (ups_{k+1} + ups_{k+3} + ...)
        for (n, d) in [(6usize, 3usize), (8, 4)] {
            for j in 0..d {
                for k in j..d {
                    let direct = grassmann_sum_walk(n, d, j, k).unwrap().exact.unwrap();
                    let mut tail = BigRational::zero();
                    let mut i = k + 1;
                    while i <= d {
                        tail += intrinsic_sum_walk(n, d, j, i).unwrap().exact.unwrap();
                        i += 2;
                    }
                    assert_eq!(direct, tail * rational(2, 1), "n={n} d={d} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn orthant_sums_match_closed_form() {
        let sums = orthant_face_sums(4, 1).unwrap();
        // binom(4,1) binom(3, k-1) 2^{-3}
        for k in 1..=4usize {
            let expect = ratio(
                binomial(4, 1) * binomial(3, k - 1),
                BigInt::from(8),
            );
            assert_eq!(sums.upsilon[k].exact.as_ref().unwrap(), &expect);
        }
        assert!(sums.upsilon[0].exact.as_ref().unwrap().is_zero());
    }

    #[test]
    fn orthoscheme_projection_recovers_walk_theorems() {
        // projecting the orthoscheme of R^n to R^d reproduces the walk-model
        // intrinsic and grassmann sums
        let n = 6usize;
        let d = 3usize;
        for j in 0..d {
            let sums = orthoscheme_face_sums(n, j).unwrap();
            for k in j..d {
                let via_projection = projection_upsilon_sum(&sums, d, k).unwrap();
                let direct = intrinsic_sum_walk(n, d, j, k).unwrap();
                assert_eq!(via_projection.exact.unwrap(), direct.exact.unwrap());
            }
            let top = projection_upsilon_sum(&sums, d, d).unwrap();
            assert_eq!(
                top.exact.unwrap(),
                intrinsic_sum_walk(n, d, j, d).unwrap().exact.unwrap()
            );
            for k in j as isize..d as isize {
                let via_projection = projection_grassmann_sum(&sums, d, k).unwrap();
                let direct = grassmann_sum_walk(n, d, j, k as usize).unwrap();
                assert_eq!(via_projection.exact.unwrap(), direct.exact.unwrap());
            }
            // k = j-1 recovers the expected face count
            let count = projection_grassmann_sum(&sums, d, j as isize - 1).unwrap();
            assert_eq!(count.exact.unwrap(), ef_walk(n, d, j).unwrap().exact.unwrap());
            // k = d vanishes term-wise
            let top = projection_grassmann_sum(&sums, d, d as isize).unwrap();
            assert!(top.exact.unwrap().is_zero());
        }
    }

    #[test]
    fn simplex_projection_recovers_gaussian_theorems() {
        let n = 6usize;
        let d = 3usize;
        for j in 0..d {
            let sums = regular_simplex_face_sums(n, j, 1e-10).unwrap();
            for k in j..d {
                let via_projection = projection_upsilon_sum(&sums, d, k).unwrap();
                let direct = intrinsic_sum_gaussian(n, d, j, k, 1e-10).unwrap();
                assert!(
                    (via_projection.approx - direct.approx).abs() < 1e-8,
                    "j={j} k={k}"
                );
            }
            let count = projection_grassmann_sum(&sums, d, j as isize - 1).unwrap();
            let direct = ef_gaussian(n, d, j, 1e-10).unwrap();
            assert!((count.approx - direct.approx).abs() < 1e-7, "j={j}");
        }
    }

    #[test]
    fn invalid_ranges_rejected() {
        assert!(ef_gaussian(3, 3, 0, 1e-10).is_err());
        assert!(ef_walk(0, 3, 0).is_err());
        assert!(grassmann_sum_walk(5, 3, 3, 1).is_err());
        assert!(intrinsic_sum_walk(5, 3, 2, 1).is_err());
        assert!(projection_upsilon_sum(&orthant_face_sums(4, 1).unwrap(), 5, 2).is_err());
    }

    #[test]
    fn walk_formulas_extend_below_d() {
        // For n < d the hull is degenerate and every volume-normalized
        // angle vanishes; the Stirling sums reproduce that.
        assert_eq!(
            internal_angle_sum_walk(1, 2, 0).unwrap().exact.unwrap(),
            BigRational::zero()
        );
        // f-count still makes sense: two points make a segment.
        assert_eq!(
            ef_walk(1, 2, 0).unwrap().exact.unwrap(),
            rational(2, 1)
        );
    }
}
