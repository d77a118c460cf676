//! Internal and external angle sums of the regular simplex.
//!
//! The total internal angle of the regular `n`-vertex simplex over its
//! `k`-vertex faces, and the matching external total, are evaluated from
//! their one-dimensional integral representations:
//!
//! ```text
//! internal: C(n,k)/sqrt(2 pi) * int_0^inf  (Phi^(n-k)(ix/sqrt n) + Phi^(n-k)(-ix/sqrt n)) e^(-x^2/2) dx
//! external: C(n,k)/sqrt(2 pi) * int_0^inf  (Phi^(n-k)(x/sqrt k)  + Phi^(n-k)(-x/sqrt k))  e^(-x^2/2) dx
//! ```
//!
//! where `Phi` is the standard normal distribution function, continued to
//! the imaginary axis by `Phi(iz) = 1/2 + i/sqrt(2 pi) * int_0^z e^(t^2/2) dt`.
//! The internal integrand is a sum of complex conjugates, so it is computed
//! in modulus-phase form `2 exp(m log|Phi| - x^2/2) cos(m arg Phi)`, which
//! stays finite where the plain complex power overflows.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_traits::ToPrimitive;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::quad;

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Largest `|z|` accepted by [`phi_imag`]. Beyond roughly 37.8 the value of
/// the defining integral exceeds the double range; callers needing larger
/// arguments must work with [`gauss_exp_integral_log`].
pub const PHI_IMAG_Z_MAX: f64 = 40.0;

/// Standard normal distribution function, via the complementary error
/// function.
pub fn phi_real(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Value of the analytic continuation of the normal distribution function
/// at a purely imaginary argument `iz`; the real part is exactly 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPhiValue {
    pub re: f64,
    pub im: f64,
}

/// `int_0^z e^(t^2/2) dt` for `z >= 0`.
///
/// The range is split into panels on which `t^2/2` grows by at most 40, and
/// the dominant exponential is factored out of each panel before the
/// adaptive pass, so every inner integrand lies in `(0, 1]`.
pub fn gauss_exp_integral(z: f64) -> f64 {
    exp_sq_panels(z)
        .iter()
        .map(|&(log_scale, scaled)| log_scale.exp() * scaled)
        .sum()
}

/// `log int_0^z e^(t^2/2) dt` for `z > 0`, usable far past the point where
/// the integral itself overflows.
pub fn gauss_exp_integral_log(z: f64) -> f64 {
    let panels = exp_sq_panels(z);
    let max_log = panels
        .iter()
        .map(|&(ls, sv)| ls + sv.ln())
        .fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = panels
        .iter()
        .map(|&(ls, sv)| (ls + sv.ln() - max_log).exp())
        .sum();
    max_log + sum.ln()
}

/// Panel decomposition of `int_0^z e^(t^2/2) dt` as `(log scale, scaled
/// integral)` pairs with the scaled integral in `(0, 1] * panel width`.
fn exp_sq_panels(z: f64) -> Vec<(f64, f64)> {
    assert!(z.is_finite() && z >= 0.0);
    if z == 0.0 {
        return vec![(0.0, 0.0)];
    }
    let mut panels = Vec::new();
    let mut a = 0.0f64;
    while a < z {
        let b = (a * a + 80.0).sqrt().min(z);
        let scale = b * b / 2.0;
        let inner = quad::integrate(
            |t| (t * t / 2.0 - scale).exp(),
            a,
            b,
            0.0,
            1e-13,
            10_000,
        )
        .expect("smooth bounded integrand");
        panels.push((scale, inner.value));
        a = b;
    }
    panels
}

/// `Phi(iz)` for real `z`. Odd imaginary part, real part exactly 1/2.
///
/// Rejects `|z| > PHI_IMAG_Z_MAX`; such arguments overflow the double range
/// and must go through the log-magnitude path.
pub fn phi_imag(z: f64) -> Result<ComplexPhiValue> {
    if !z.is_finite() || z.abs() > PHI_IMAG_Z_MAX {
        return Err(Error::InvalidArgument(format!(
            "phi_imag: |z| = {} exceeds {PHI_IMAG_Z_MAX}; use gauss_exp_integral_log",
            z.abs()
        )));
    }
    let magnitude = gauss_exp_integral(z.abs()) / SQRT_2PI;
    Ok(ComplexPhiValue {
        re: 0.5,
        im: z.signum() * magnitude,
    })
}

/// Which angle of the regular simplex an [`AngleSumValue`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleKind {
    Internal,
    External,
}

/// A computed angle sum of the regular simplex together with the requested
/// absolute error target.
#[derive(Clone, Copy, Debug)]
pub struct AngleSumValue {
    pub value: f64,
    pub abs_error_bound: f64,
    pub n: usize,
    pub k: usize,
    pub kind: AngleKind,
}

static CACHE: LazyLock<RwLock<HashMap<(usize, usize, AngleKind, u64), f64>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// `log |Phi(iz)|` and `arg Phi(iz)` for `z >= 0`.
fn log_modulus_and_phase(z: f64) -> (f64, f64) {
    if z == 0.0 {
        return (0.5f64.ln(), 0.0);
    }
    if z <= 35.0 {
        let g = gauss_exp_integral(z) / SQRT_2PI;
        (0.5 * (0.25 + g * g).ln(), g.atan2(0.5))
    } else {
        // |Phi(iz)| ~ g with a vanishing correction from the real part 1/2.
        let log_g = gauss_exp_integral_log(z) - LN_SQRT_2PI;
        let inv_g = (-log_g).exp();
        (
            log_g + 0.5 * (0.25 * inv_g * inv_g).ln_1p(),
            std::f64::consts::FRAC_PI_2 - (0.5 * inv_g).atan(),
        )
    }
}

/// Truncation point for the internal-angle integral: the analytic tail
/// bound `C(n,k)/sqrt(2 pi) * 2 * 0.9^m * exp(-k X^2/(2n)) * n/(kX)` falls
/// below `budget` there.
///
/// The bound uses `|Phi(iz)| <= 0.9 e^(z^2/2)`, which follows from
/// `int_0^z e^(t^2/2) dt <= e^(z^2/2)`.
fn internal_cutoff(n: usize, k: usize, prefactor: f64, budget: f64) -> f64 {
    let m = (n - k) as f64;
    let c = k as f64 / (2.0 * n as f64);
    let scale = prefactor * 2.0 * 0.9f64.powf(m) / (2.0 * c);
    let mut x = (n as f64).sqrt().max(1.0);
    while scale * (-c * x * x).exp() / x > budget {
        x *= 1.25;
    }
    x
}

fn external_cutoff(prefactor: f64, budget: f64) -> f64 {
    let mut x = 1.0f64;
    while prefactor * 2.0 * (-x * x / 2.0).exp() / x > budget {
        x *= 1.25;
    }
    x
}

fn cached_or_compute(
    n: usize,
    k: usize,
    kind: AngleKind,
    tol: f64,
    compute: impl FnOnce() -> Result<f64>,
) -> Result<AngleSumValue> {
    let key = (n, k, kind, tol.to_bits());
    if let Some(&value) = CACHE.read().unwrap().get(&key) {
        return Ok(AngleSumValue {
            value,
            abs_error_bound: tol,
            n,
            k,
            kind,
        });
    }
    let value = compute()?;
    CACHE.write().unwrap().insert(key, value);
    Ok(AngleSumValue {
        value,
        abs_error_bound: tol,
        n,
        k,
        kind,
    })
}

/// Total internal angle of the regular `n`-vertex simplex at its `k`-vertex
/// faces, to absolute error `tol`. Zero for `k` outside `1..=n`.
pub fn internal_angle_sum(n: usize, k: usize, tol: f64) -> Result<AngleSumValue> {
    assert!(tol > 0.0, "tolerance must be positive");
    if n == 0 || k == 0 || k > n {
        return Ok(AngleSumValue {
            value: 0.0,
            abs_error_bound: 0.0,
            n,
            k,
            kind: AngleKind::Internal,
        });
    }
    cached_or_compute(n, k, AngleKind::Internal, tol, || {
        let m = (n - k) as f64;
        let sqrt_n = (n as f64).sqrt();
        let prefactor = binomial(n, k).to_f64().ok_or_else(|| {
            Error::InvalidArgument(format!("binomial({n},{k}) exceeds f64 range"))
        })? / SQRT_2PI;
        let cutoff = internal_cutoff(n, k, prefactor, tol / 10.0);
        let integrand = |x: f64| {
            let (log_r, theta) = log_modulus_and_phase(x / sqrt_n);
            2.0 * (m * log_r - x * x / 2.0).exp() * (m * theta).cos()
        };
        let quadrature = quad::integrate(integrand, 0.0, cutoff, 0.9 * tol / prefactor, 0.0, 30_000)?;
        Ok(prefactor * quadrature.value)
    })
}

/// Total external angle of the regular `n`-vertex simplex at its `k`-vertex
/// faces, to absolute error `tol`. Zero for `k` outside `1..=n`.
pub fn external_angle_sum(n: usize, k: usize, tol: f64) -> Result<AngleSumValue> {
    assert!(tol > 0.0, "tolerance must be positive");
    if n == 0 || k == 0 || k > n {
        return Ok(AngleSumValue {
            value: 0.0,
            abs_error_bound: 0.0,
            n,
            k,
            kind: AngleKind::External,
        });
    }
    cached_or_compute(n, k, AngleKind::External, tol, || {
        let m = (n - k) as i32;
        let sqrt_k = (k as f64).sqrt();
        let prefactor = binomial(n, k).to_f64().ok_or_else(|| {
            Error::InvalidArgument(format!("binomial({n},{k}) exceeds f64 range"))
        })? / SQRT_2PI;
        let cutoff = external_cutoff(prefactor, tol / 10.0);
        let integrand = |x: f64| {
            let p = phi_real(x / sqrt_k);
            (p.powi(m) + (1.0 - p).powi(m)) * (-x * x / 2.0).exp()
        };
        let quadrature = quad::integrate(integrand, 0.0, cutoff, 0.9 * tol / prefactor, 0.0, 30_000)?;
        Ok(prefactor * quadrature.value)
    })
}

/// Largest residual of the two convolution identities tying the internal
/// and external angle sums together: the alternating sum collapses to a
/// Kronecker delta and the plain sum to `C(n,k)`.
pub fn simplex_angle_identity_check(n: usize, k: usize, tol: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "identity check requires 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let mut alternating = 0.0;
    let mut plain = 0.0;
    for m in k..=n {
        let term = external_angle_sum(n, m, tol)?.value * internal_angle_sum(m, k, tol)?.value;
        let sign = if (n - m) % 2 == 0 { 1.0 } else { -1.0 };
        alternating += sign * term;
        plain += term;
    }
    let delta = if n == k { 1.0 } else { 0.0 };
    let binom = binomial(n, k).to_f64().unwrap();
    Ok((alternating - delta).abs().max((plain - binom).abs()))
}

/// `(m-1)`-st conic intrinsic volume of the tangent cone of the regular
/// `n`-vertex simplex at a `k`-vertex face:
/// `sigma_ext[n,m] * sigma_int[m,k] / C(n,k)`, and zero for `m < k` since
/// that cone has no faces of dimension below `k - 1`.
pub fn simplex_tangent_cone_upsilon(n: usize, k: usize, m: usize, tol: f64) -> Result<f64> {
    if k == 0 || k > n || m > n {
        return Err(Error::InvalidArgument(format!(
            "upsilon requires 1 <= k <= m <= n, got n={n}, k={k}, m={m}"
        )));
    }
    if m < k {
        return Ok(0.0);
    }
    let binom = binomial(n, k).to_f64().unwrap();
    Ok(external_angle_sum(n, m, tol)?.value * internal_angle_sum(m, k, tol)?.value / binom)
}
