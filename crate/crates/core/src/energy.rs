//! Rotary-wing propulsion power, travel energy and the energy-optimal
//! cruise speed.

use crate::error::{Error, Result};
use crate::numerics::minimize_scalar;
use crate::params::RotorParams;

/// Search bracket for the optimal cruise velocity, m/s.
pub const VELOCITY_BRACKET: (f64, f64) = (1.0, 60.0);
const VELOCITY_TOL: f64 = 1e-9;

/// The three summands of the forward-flight propulsion power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown {
    pub blade_profile: f64,
    pub induced: f64,
    pub parasite: f64,
    pub total: f64,
}

/// `P_m(v) = P₀(1 + 3v²/U²) + Pᵢv₀/v + ½d₀ρsAv³`.
///
/// Only defined for `v > 0`; hovering uses the separate service power.
pub fn propulsion_power(v: f64, rotor: &RotorParams) -> Result<PowerBreakdown> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Domain(format!(
            "propulsion power needs a positive velocity (got {v})"
        )));
    }
    let blade_profile = rotor.blade_profile_power * (1.0 + 3.0 * v * v / (rotor.tip_speed * rotor.tip_speed));
    let induced = rotor.induced_power * rotor.mean_induced_velocity / v;
    let parasite = rotor.parasite_coefficient() * v * v * v;
    Ok(PowerBreakdown {
        blade_profile,
        induced,
        parasite,
        total: blade_profile + induced + parasite,
    })
}

/// Energy to fly `distance` metres at speed `v`, J.
pub fn travel_energy(distance: f64, v: f64, rotor: &RotorParams) -> Result<f64> {
    if distance.is_nan() || distance < 0.0 {
        return Err(Error::Domain(format!(
            "travel distance must be non-negative (got {distance})"
        )));
    }
    Ok(distance * energy_per_meter(v, rotor)?)
}

/// Propulsion energy per metre, `P_m(v) / v`.
pub fn energy_per_meter(v: f64, rotor: &RotorParams) -> Result<f64> {
    Ok(propulsion_power(v, rotor)?.total / v)
}

/// Speed in [`VELOCITY_BRACKET`] minimising energy per metre travelled.
pub fn optimal_velocity(rotor: &RotorParams) -> f64 {
    let (lo, hi) = VELOCITY_BRACKET;
    let (v, _) = minimize_scalar(
        |v| energy_per_meter(v, rotor).unwrap_or(f64::INFINITY),
        lo,
        hi,
        VELOCITY_TOL,
    );
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_at_ten_mps() {
        let p = propulsion_power(10.0, &RotorParams::default()).unwrap();
        // 81.52 + 35.72 + 9.24 by hand
        assert!((p.blade_profile - 81.5238).abs() < 1e-3);
        assert!((p.induced - 35.7179).abs() < 1e-3);
        assert!((p.parasite - 9.2426).abs() < 1e-3);
        assert!((p.total - 126.5).abs() < 0.05);
        assert_eq!(p.total, p.blade_profile + p.induced + p.parasite);
    }

    #[test]
    fn power_near_table_velocity() {
        let p = propulsion_power(18.46, &RotorParams::default()).unwrap();
        assert!((p.total - 163.0).abs() < 0.05);
        assert!((p.total - 161.8).abs() / 161.8 < 0.03);
    }

    #[test]
    fn parasite_dominates_at_high_speed() {
        let rotor = RotorParams::default();
        let v = 1e5;
        let p = propulsion_power(v, &rotor).unwrap();
        let ratio = p.total / (v * v * v);
        assert!((ratio - rotor.parasite_coefficient()).abs() / rotor.parasite_coefficient() < 1e-3);
    }

    #[test]
    fn rejects_non_positive_velocity() {
        let rotor = RotorParams::default();
        assert!(propulsion_power(0.0, &rotor).is_err());
        assert!(propulsion_power(-3.0, &rotor).is_err());
        assert!(travel_energy(10.0, 0.0, &rotor).is_err());
        assert!(travel_energy(-1.0, 10.0, &rotor).is_err());
    }

    #[test]
    fn travel_energy_examples() {
        let rotor = RotorParams::default();
        assert_eq!(travel_energy(0.0, 10.0, &rotor).unwrap(), 0.0);
        let e = travel_energy(1000.0, 10.0, &rotor).unwrap();
        assert!((e - 12_650.0).abs() < 5.0);
        let e2 = travel_energy(2000.0, 10.0, &rotor).unwrap();
        assert!((e2 - 2.0 * e).abs() < 1e-9);
    }

    #[test]
    fn optimal_velocity_default_rotor() {
        let v = optimal_velocity(&RotorParams::default());
        assert!((18.0..=18.7).contains(&v), "{v}");
    }

    #[test]
    fn heavier_drag_slows_optimum() {
        let base = RotorParams::default();
        let mut draggy = base;
        draggy.fuselage_drag_ratio *= 8.0;
        assert!(optimal_velocity(&draggy) < optimal_velocity(&base));
    }

    #[test]
    fn optimum_is_stationary_point() {
        let rotor = RotorParams::default();
        let v = optimal_velocity(&rotor);
        let h = 1e-4;
        let d = (energy_per_meter(v + h, &rotor).unwrap() - energy_per_meter(v - h, &rotor).unwrap()) / (2.0 * h);
        assert!(d.abs() < 1e-6, "derivative {d}");
    }

    #[test]
    fn energy_per_meter_is_unimodal_on_bracket() {
        let rotor = RotorParams::default();
        let samples: Vec<f64> = (0..100)
            .map(|i| 1.0 + 59.0 * i as f64 / 99.0)
            .map(|v| energy_per_meter(v, &rotor).unwrap())
            .collect();
        let argmin = samples.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!(samples[..=argmin].windows(2).all(|w| w[1] <= w[0]));
        assert!(samples[argmin..].windows(2).all(|w| w[1] >= w[0]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn power_exceeds_blade_profile_floor(v in 1e-3f64..200.0) {
                let rotor = RotorParams::default();
                let p = propulsion_power(v, &rotor).unwrap();
                prop_assert!(p.total > rotor.blade_profile_power);
                prop_assert!(p.blade_profile > 0.0 && p.induced > 0.0 && p.parasite > 0.0);
            }

            #[test]
            fn travel_energy_is_distance_times_energy_per_meter(d in 0.0f64..1e5, v in 0.5f64..60.0) {
                let rotor = RotorParams::default();
                let e = travel_energy(d, v, &rotor).unwrap();
                let expect = d * (propulsion_power(v, &rotor).unwrap().total / v);
                prop_assert_eq!(e, expect);
            }
        }
    }
}
