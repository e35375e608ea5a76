//! UAV availability: the long-run fraction of time the drone spends serving
//! its hotspot, conditioned on the distance to its nearest charging station
//! and averaged over the station process.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{integrate, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
use crate::params::SystemParams;

/// One service/travel/charge cycle for a fixed station distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvailabilityBudget {
    /// Time at the hotspot, s.
    pub service_time: f64,
    /// Round-trip travel time, s.
    pub travel_time: f64,
    pub charging_time: f64,
    pub availability: f64,
}

/// Availability given the nearest-station distance `rs` (metres).
///
/// Stations beyond the maximum travel radius cannot be reached with any
/// service time left; availability is 0 there.
pub fn availability_given_rs(rs: f64, params: &SystemParams) -> AvailabilityBudget {
    let e = &params.energy;
    let v = params.velocity();
    let pm = params.travel_power();
    let b = e.battery_capacity;
    let ps = e.hover_service_power;
    let tch = e.charging_time;

    let travel_time = 2.0 * rs / v;
    if rs >= params.max_travel_radius() {
        return AvailabilityBudget {
            service_time: 0.0,
            travel_time,
            charging_time: tch,
            availability: 0.0,
        };
    }
    let service_time = (b - 2.0 * pm * rs / v) / ps;
    let reserve = b * v - 2.0 * pm * rs;
    let availability = reserve / (reserve + tch * ps * v + 2.0 * rs * ps);
    AvailabilityBudget {
        service_time,
        travel_time,
        charging_time: tch,
        availability,
    }
}

/// Station distance at which the conditional availability equals `x`.
///
/// Defined on `0 ≤ x ≤ B_max / (P_s T_ch + B_max)`; decreasing from the
/// maximum travel radius at `x = 0` to 0 at the upper end.
pub fn critical_radius(x: f64, params: &SystemParams) -> Result<f64> {
    let upper = params.max_availability();
    if !(0.0..=upper).contains(&x) {
        return Err(Error::Domain(format!("availability level {x} outside [0, {upper}]")));
    }
    Ok(critical_radius_unchecked(x, params))
}

fn critical_radius_unchecked(x: f64, params: &SystemParams) -> f64 {
    let e = &params.energy;
    let v = params.velocity();
    let pm = params.travel_power();
    let num = v * (e.battery_capacity * (x - 1.0) + e.hover_service_power * e.charging_time * x);
    let den = 2.0 * (pm * (x - 1.0) - e.hover_service_power * x);
    (num / den).max(0.0)
}

/// CDF of the conditional availability over the charging-station PPP.
///
/// `F(x) = exp(-λ_c π C(x)²)` on the support, 0 below it and 1 at and above
/// its upper end. The atom at 0 (no reachable station) has mass
/// `exp(-λ_c π R_max²)`.
pub fn availability_cdf(x: f64, params: &SystemParams) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x >= params.max_availability() {
        return 1.0;
    }
    let c = critical_radius_unchecked(x, params);
    (-params.network.station_density * PI * c * c).exp()
}

/// Mean availability `∫ (1 - F(x)) dx` over the support.
pub fn availability(params: &SystemParams) -> Result<f64> {
    let upper = params.max_availability();
    let lambda = params.network.station_density;
    let r = integrate(
        |x| {
            let c = critical_radius_unchecked(x, params);
            -(-lambda * PI * c * c).exp_m1()
        },
        0.0,
        upper,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?;
    Ok(r.value.clamp(0.0, upper))
}

/// Mean availability computed as `E[P(a | R_s)]` directly over the Rayleigh
/// contact distance of the station process.
///
/// Cross-check for [`availability`] only; it shares no code path with the
/// CDF inversion. Substitutes `u = λ_c π r²` so the weight is `e^{-u} du`.
pub fn availability_direct_expectation(params: &SystemParams) -> Result<f64> {
    let lambda = params.network.station_density;
    let r_max = params.max_travel_radius();
    let u_max = lambda * PI * r_max * r_max;
    let r = integrate(
        |u| {
            let rs = (u / (lambda * PI)).sqrt();
            availability_given_rs(rs, params).availability * (-u).exp()
        },
        0.0,
        u_max,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CruiseVelocity;

    fn table1() -> SystemParams {
        SystemParams::paper_table_1()
    }

    #[test]
    fn zero_distance_gives_maximum() {
        let p = table1();
        let a = availability_given_rs(0.0, &p);
        let hand = 319_680.0 / (319_680.0 + 177.5 * 300.0);
        assert!((a.availability - hand).abs() < 1e-9);
        assert!((a.availability - 0.8572).abs() < 1e-4);
        assert_eq!(a.travel_time, 0.0);
    }

    #[test]
    fn max_radius_gives_zero() {
        let p = table1();
        let a = availability_given_rs(p.max_travel_radius(), &p);
        assert_eq!(a.availability, 0.0);
        assert_eq!(a.service_time, 0.0);
        assert_eq!(availability_given_rs(1e9, &p).availability, 0.0);
    }

    #[test]
    fn five_km_with_table_velocity_and_power() {
        // fixed 18.46 m/s so the travel time is a hand value
        let mut p = table1();
        p.energy.cruise_velocity = CruiseVelocity::Fixed(18.46);
        let pm = p.travel_power();
        let a = availability_given_rs(5000.0, &p);
        let tse = (319_680.0 - 2.0 * pm * 5000.0 / 18.46) / 177.5;
        assert!((a.travel_time - 541.71).abs() < 0.01);
        assert!((a.service_time - tse).abs() < 1e-9);
        let frac = a.service_time / (a.service_time + a.charging_time + a.travel_time);
        assert!((a.availability - frac).abs() < 1e-12);
        assert!((a.availability - 0.608).abs() < 0.005);
        // default optimal speed
        assert!((availability_given_rs(5000.0, &table1()).availability - 0.608).abs() < 0.005);
    }

    #[test]
    fn critical_radius_endpoints() {
        let p = table1();
        assert!((critical_radius(0.0, &p).unwrap() - p.max_travel_radius()).abs() < 1e-6);
        assert!(critical_radius(p.max_availability(), &p).unwrap() < 1e-9);
        assert!(critical_radius(-0.01, &p).is_err());
        assert!(critical_radius(0.9, &p).is_err());
    }

    #[test]
    fn critical_radius_inverts_by_bisection() {
        // independent inversion of the conditional availability
        let p = table1();
        for x in [0.1, 0.3, 0.5, 0.8] {
            let (mut lo, mut hi) = (0.0, p.max_travel_radius());
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if availability_given_rs(mid, &p).availability > x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let c = critical_radius(x, &p).unwrap();
            assert!((c - lo).abs() < 1e-6 * p.max_travel_radius(), "x={x}: {c} vs {lo}");
            assert!((availability_given_rs(c, &p).availability - x).abs() < 1e-12);
        }
    }

    #[test]
    fn cdf_limits() {
        let p = table1();
        let r = p.max_travel_radius();
        let void = (-p.network.station_density * PI * r * r).exp();
        assert!((availability_cdf(0.0, &p) - void).abs() < 1e-12);
        assert_eq!(availability_cdf(-1e-9, &p), 0.0);
        assert_eq!(availability_cdf(p.max_availability(), &p), 1.0);
        assert_eq!(availability_cdf(2.0, &p), 1.0);
        let mid = availability_cdf(0.5, &p);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn availability_limits() {
        let p = table1();
        let dense = p.with_override("network.station_density_lambda_c", 1e6).unwrap();
        assert!((availability(&dense).unwrap() - p.max_availability()).abs() < 1e-3);
        let sparse = p.with_override("network.station_density_lambda_c", 1e-9).unwrap();
        assert!(availability(&sparse).unwrap() < 1e-4);
    }

    #[test]
    fn cdf_mean_matches_direct_expectation() {
        let p = table1();
        for lc in [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0] {
            let q = p.with_override("network.station_density_lambda_c", lc).unwrap();
            let a = availability(&q).unwrap();
            let b = availability_direct_expectation(&q).unwrap();
            assert!((a - b).abs() < 1e-8, "lc={lc}: {a} vs {b}");
            assert!((0.0..=q.max_availability()).contains(&a));
        }
    }

    #[test]
    fn conditional_availability_monotone_grid() {
        let base = table1();
        let radii: Vec<f64> = (0..10).map(|i| 2000.0 * i as f64).collect();
        let batteries: Vec<f64> = (1..=10).map(|i| 40_000.0 * i as f64).collect();
        let charge_times: Vec<f64> = (0..10).map(|i| 300.0 * i as f64).collect();
        let at = |rs: f64, b: f64, tch: f64| {
            let mut p = base;
            p.energy.battery_capacity = b;
            p.energy.charging_time = tch;
            availability_given_rs(rs, &p).availability
        };
        for (i, &rs) in radii.iter().enumerate() {
            for (j, &b) in batteries.iter().enumerate() {
                for (k, &tch) in charge_times.iter().enumerate() {
                    let v = at(rs, b, tch);
                    assert!((0.0..=1.0).contains(&v));
                    if i > 0 {
                        assert!(v <= at(radii[i - 1], b, tch));
                    }
                    if j > 0 {
                        assert!(v >= at(rs, batteries[j - 1], tch));
                    }
                    if k > 0 {
                        assert!(v <= at(rs, b, charge_times[k - 1]));
                    }
                }
            }
        }
    }

    #[test]
    fn cdf_monotone_in_x_and_density() {
        let p = table1();
        let dense = p.with_override("network.station_density_lambda_c", 0.1).unwrap();
        let mut last = 0.0;
        for i in 0..=200 {
            let x = -0.05 + i as f64 * 0.005;
            let f = availability_cdf(x, &p);
            assert!(f >= last);
            assert!(availability_cdf(x, &dense) <= f);
            last = f;
        }
    }
}
