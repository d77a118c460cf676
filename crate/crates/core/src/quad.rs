//! Adaptive Gauss-Kronrod quadrature on finite intervals.
//!
//! A 7-point Gauss / 15-point Kronrod pair is applied per panel; the panel
//! with the largest error estimate is bisected until the summed error meets
//! the target. Panels are ordered by (error, insertion index) so refinement
//! is deterministic.

// the published node and weight values are kept at full length
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae for the interval [-1, 1]; odd entries are the
// embedded Gauss-7 nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// One Gauss-Kronrod pass over `[a, b]`: returns the Kronrod value and a
/// QUADPACK-style error estimate.
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = kronrod.abs();
    let mut values = [0.0f64; 15];
    values[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        values[j] = f1;
        values[14 - j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((values[j] - mean).abs() + (values[14 - j] - mean).abs());
    }

    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    order: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.order == other.order
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.order.cmp(&self.order))
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    /// Summed per-panel error estimates at termination.
    pub abs_error: f64,
    pub panels: usize,
}

/// Integrate `f` over `[a, b]` until the error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`, bisecting at most `max_panels` times.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    assert!(a.is_finite() && b.is_finite() && b >= a);
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            panels: 0,
        });
    }

    let mut heap = BinaryHeap::new();
    let (value, error) = gauss_kronrod_15(&f, a, b);
    let mut total_value = value;
    let mut total_error = error;
    let mut order = 0u64;
    heap.push(Panel {
        a,
        b,
        value,
        error,
        order,
    });

    while total_error > abs_tol.max(rel_tol * total_value.abs()) {
        if heap.len() >= max_panels {
            return Err(Error::ToleranceNotMet {
                requested: abs_tol.max(rel_tol * total_value.abs()),
                achieved: total_error,
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gauss_kronrod_15(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod_15(&f, mid, worst.b);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        order += 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            order,
        });
        order += 1;
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            order,
        });
    }

    // Re-sum panel contributions smallest-interval-first drift is
    // negligible at this scale; keep the incrementally tracked totals but
    // recompute the value once for a tighter rounding profile.
    let panels = heap.len();
    let mut ordered: Vec<Panel> = heap.into_vec();
    ordered.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = ordered.iter().map(|p| p.value).sum();
    if total_error > abs_tol.max(rel_tol * f64::max(value.abs(), f64::MIN_POSITIVE)) {
        return Err(Error::ToleranceNotMet {
            requested: abs_tol,
            achieved: total_error,
        });
    }
    Ok(QuadResult {
        value,
        abs_error: total_error,
        panels,
    })
}
