//! Quadrature and scalar minimisation primitives.
//!
//! All analytic formulas in the crate go through [`integrate`] or
//! [`integrate_semi_infinite`] with the tolerances defined here, so the
//! tolerance policy lives in one place.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Relative tolerance used by every analytic formula.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Absolute tolerance used by every analytic formula.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;
/// Maximum number of subintervals the adaptive integrator may hold.
pub const MAX_SUBDIVISIONS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

// 21-point Kronrod abscissae with the embedded 10-point Gauss rule
// (QUADPACK qk21 tables).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_643_474_262,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut res_g = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Segment { lo, hi, value, error }
}

/// Adaptive 21-point Gauss–Kronrod integration of `f` over `[lower, upper]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate falls below `max(rel_tol * |value|, abs_tol)`.
pub fn integrate<F>(f: F, lower: f64, upper: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
        return Err(Error::Domain(format!(
            "integration bounds must be finite with lower < upper (got [{lower}, {upper}])"
        )));
    }

    let first = kronrod21(&f, lower, upper);
    let mut evaluations = 21;
    let mut value = first.value;
    let mut error = first.error;
    if !value.is_finite() {
        return Err(Error::Domain(format!("integrand is not finite on [{lower}, {upper}]")));
    }

    let mut heap = BinaryHeap::new();
    // segments too narrow to split further, kept out of the heap
    let mut settled_value = 0.0;
    let mut settled_error = 0.0;
    heap.push(first);

    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_SUBDIVISIONS {
            return Err(Error::NonConvergence {
                partial: value,
                abs_error_estimate: error,
                evaluations,
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            settled_value += worst.value;
            settled_error += worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod21(&f, worst.lo, mid);
        let right = kronrod21(&f, mid, worst.hi);
        evaluations += 42;
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::Domain(format!(
                "integrand is not finite on [{}, {}]",
                worst.lo, worst.hi
            )));
        }
        heap.push(left);
        heap.push(right);

        value = settled_value + heap.iter().map(|s| s.value).sum::<f64>();
        error = settled_error + heap.iter().map(|s| s.error).sum::<f64>();
    }

    if error > abs_tol.max(rel_tol * value.abs()) {
        return Err(Error::NonConvergence {
            partial: value,
            abs_error_estimate: error,
            evaluations,
        });
    }

    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations,
    })
}

/// Integrates `f` over `[lower, ∞)` through the substitution
/// `x = lower + t / (1 - t)`, `t ∈ [0, 1)`.
///
/// `f` must decay fast enough for the transformed integrand to vanish at
/// `t → 1`. Kronrod nodes never touch `t = 1`, so `f` is only evaluated at
/// finite points.
pub fn integrate_semi_infinite<F>(f: F, lower: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if !lower.is_finite() {
        return Err(Error::Domain(format!(
            "semi-infinite lower bound must be finite (got {lower})"
        )));
    }
    let transformed = |t: f64| {
        let one_minus = 1.0 - t;
        let fx = f(lower + t / one_minus);
        if fx == 0.0 {
            0.0
        } else {
            fx / (one_minus * one_minus)
        }
    };
    integrate(transformed, 0.0, 1.0, rel_tol, abs_tol)
}

/// Golden-section search for the minimiser of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, f(argmin))`. Unimodality is the caller's
/// responsibility; on a multimodal function the result is some local
/// minimum inside the bracket.
pub fn minimize_scalar<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    assert!(lo < hi, "minimize_scalar requires lo < hi");
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;

    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);

    loop {
        let floor = 4.0 * f64::EPSILON * (a.abs() + b.abs());
        if b - a <= (2.0 * x_tol).max(floor) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }

    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> QuadratureResult {
        integrate(f, a, b, DEFAULT_REL_TOL, DEFAULT_ABS_TOL).unwrap()
    }

    #[test]
    fn elementary_integrals() {
        assert!((quad(|x| x, 0.0, 1.0).value - 0.5).abs() < 1e-14);
        assert!((quad(f64::sin, 0.0, PI).value - 2.0).abs() < 1e-12);
        assert!((quad(|x| 4.0 / (1.0 + x * x), 0.0, 1.0).value - PI).abs() < 1e-10);
    }

    #[test]
    fn semi_infinite_integrals() {
        let run = |f: &dyn Fn(f64) -> f64| {
            integrate_semi_infinite(f, 0.0, DEFAULT_REL_TOL, DEFAULT_ABS_TOL)
                .unwrap()
                .value
        };
        assert!((run(&|x: f64| (-x).exp()) - 1.0).abs() < 1e-10);
        assert!((run(&|x: f64| x * (-x * x).exp()) - 0.5).abs() < 1e-10);
        for lambda in [1e-8, 1e-5, 1e-2, 1.0, 10.0] {
            let scale = 1.0 / (PI * lambda).sqrt();
            // substitute r = scale * u so the bulk of the mass sits at u ~ 1
            let v = run(&|u: f64| {
                let r = scale * u;
                2.0 * PI * r * lambda * (-PI * lambda * r * r).exp() * scale
            });
            assert!((v - 1.0).abs() < 1e-9, "lambda={lambda}: {v}");
        }
    }

    #[test]
    fn raw_contact_density_normalises_without_rescaling() {
        for lambda in [1e-5, 1e-2, 1.0] {
            let v = integrate_semi_infinite(
                |r| 2.0 * PI * r * lambda * (-PI * lambda * r * r).exp(),
                0.0,
                DEFAULT_REL_TOL,
                DEFAULT_ABS_TOL,
            )
            .unwrap()
            .value;
            assert!((v - 1.0).abs() < 1e-8, "lambda={lambda}: {v}");
        }
    }

    #[test]
    fn polynomial_error_estimate_bounds_actual_error() {
        for degree in 0..30 {
            let exact = 1.0 / (degree as f64 + 1.0);
            let r = quad(|x| x.powi(degree), 0.0, 1.0);
            assert!(
                (r.value - exact).abs() <= r.abs_error_estimate.max(f64::EPSILON),
                "degree {degree}: err {} > est {}",
                (r.value - exact).abs(),
                r.abs_error_estimate
            );
            assert!(r.abs_error_estimate >= 0.0);
        }
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(matches!(integrate(|x| x, 1.0, 0.0, 1e-9, 1e-12), Err(Error::Domain(_))));
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-9, 1e-12).is_err());
    }

    #[test]
    fn non_convergence_carries_partial_result() {
        // endpoint singularity with a tolerance no budget can reach
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 0.0, 1e-300);
        match r {
            Err(Error::NonConvergence {
                partial, evaluations, ..
            }) => {
                assert!((partial - 2.0).abs() < 1e-2, "{partial}");
                assert!(evaluations > 21);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn golden_section_examples() {
        let (x, _) = minimize_scalar(|x| (x - 3.0).powi(2), 0.0, 10.0, 1e-8);
        assert!((x - 3.0).abs() < 1e-8);
        // flat minimum: function comparisons resolve x only to ~sqrt(eps)
        let (x, v) = minimize_scalar(|x| x + 1.0 / x, 0.1, 10.0, 1e-8);
        assert!((x - 1.0).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
        let (x, _) = minimize_scalar(|x| (x - 2.0).cosh(), 0.0, 5.0, 1e-8);
        assert!((x - 2.0).abs() < 1e-6);
    }

    #[test]
    fn minimizer_at_bracket_edge() {
        let (x, _) = minimize_scalar(|x| x, 0.0, 1.0, 1e-9);
        assert!(x < 1e-8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn integrate_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, hi in 0.5f64..4.0) {
                let f = |x: f64| (x * 1.3).sin() + x * x;
                let g = |x: f64| (-x).exp() * x.cos();
                let lhs = quad(|x| a * f(x) + b * g(x), 0.0, hi).value;
                let rhs = a * quad(f, 0.0, hi).value + b * quad(g, 0.0, hi).value;
                prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + lhs.abs()));
            }

            #[test]
            fn quadratic_minimiser(center in -20.0f64..20.0, width in 1.0f64..30.0) {
                let lo = center - width * 0.3;
                let hi = center + width * 0.7;
                let (x, _) = minimize_scalar(|x| (x - center).powi(2), lo, hi, 1e-9);
                prop_assert!((x - center).abs() <= 1e-8);
            }
        }
    }
}
