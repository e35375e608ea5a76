//! Domain parameter types, all in SI units.
//!
//! Values are validated on construction; a [`SystemParams`] that exists is
//! internally consistent and immutable, so it can be shared freely across
//! threads.

use crate::energy;
use crate::error::{Error, Result};

/// Rotary-wing aerodynamic constants of the propulsion power model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorParams {
    /// Blade profile power in hover, W.
    pub blade_profile_power: f64,
    /// Induced power in hover, W.
    pub induced_power: f64,
    /// Rotor blade tip speed, m/s.
    pub tip_speed: f64,
    /// Mean rotor induced velocity in hover, m/s.
    pub mean_induced_velocity: f64,
    pub fuselage_drag_ratio: f64,
    /// kg/m³
    pub air_density: f64,
    pub rotor_solidity: f64,
    /// m²
    pub rotor_disc_area: f64,
}

impl Default for RotorParams {
    fn default() -> Self {
        Self {
            blade_profile_power: 79.86,
            induced_power: 88.63,
            tip_speed: 120.0,
            mean_induced_velocity: 4.03,
            fuselage_drag_ratio: 0.6,
            air_density: 1.225,
            rotor_solidity: 0.05,
            rotor_disc_area: 0.503,
        }
    }
}

impl RotorParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("energy.rotor.blade_profile_power_P0", self.blade_profile_power),
            ("energy.rotor.induced_power_Pi", self.induced_power),
            ("energy.rotor.tip_speed_Utip", self.tip_speed),
            ("energy.rotor.mean_induced_velocity_v0", self.mean_induced_velocity),
            ("energy.rotor.fuselage_drag_ratio_d0", self.fuselage_drag_ratio),
            ("energy.rotor.air_density_rho", self.air_density),
            ("energy.rotor.rotor_solidity_s", self.rotor_solidity),
            ("energy.rotor.rotor_disc_area_A", self.rotor_disc_area),
        ];
        for (name, v) in fields {
            require_positive(name, v)?;
        }
        if self.tip_speed <= self.mean_induced_velocity {
            return Err(Error::validation(
                "energy.rotor.tip_speed_Utip",
                format!(
                    "tip speed {} must exceed the mean induced velocity {}",
                    self.tip_speed, self.mean_induced_velocity
                ),
            ));
        }
        Ok(())
    }

    /// Coefficient of the `V³` parasite term, `½ d₀ ρ s A`.
    pub fn parasite_coefficient(&self) -> f64 {
        0.5 * self.fuselage_drag_ratio * self.air_density * self.rotor_solidity * self.rotor_disc_area
    }
}

/// Cruise speed used for the round trip to the charging station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CruiseVelocity {
    /// The energy-per-metre minimiser of the rotor model, resolved at
    /// construction.
    Optimal {
        resolved: f64,
    },
    Fixed(f64),
}

impl CruiseVelocity {
    pub fn value(&self) -> f64 {
        match *self {
            CruiseVelocity::Optimal { resolved } => resolved,
            CruiseVelocity::Fixed(v) => v,
        }
    }

    pub fn optimal(rotor: &RotorParams) -> Self {
        CruiseVelocity::Optimal {
            resolved: energy::optimal_velocity(rotor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Battery size, J.
    pub battery_capacity: f64,
    /// Power drawn while hovering and serving at the hotspot, W.
    pub hover_service_power: f64,
    /// Recharge or battery swap duration, s.
    pub charging_time: f64,
    pub cruise_velocity: CruiseVelocity,
    pub rotor: RotorParams,
}

impl EnergyParams {
    pub fn validate(&self) -> Result<()> {
        self.rotor.validate()?;
        require_positive("energy.battery_capacity_Bmax", self.battery_capacity)?;
        require_positive("energy.hover_service_power_Ps", self.hover_service_power)?;
        if !(self.charging_time >= 0.0 && self.charging_time.is_finite()) {
            return Err(Error::validation(
                "energy.charging_time_Tch",
                format!("must be finite and non-negative (got {})", self.charging_time),
            ));
        }
        require_positive("energy.cruise_velocity_V", self.cruise_velocity.value())
    }

    /// Propulsion power at the cruise velocity, W.
    pub fn travel_power(&self) -> f64 {
        energy::propulsion_power(self.cruise_velocity.value(), &self.rotor)
            .expect("cruise velocity validated positive")
            .total
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    /// Charging station density, m⁻².
    pub station_density: f64,
    /// Terrestrial base station density, m⁻².
    pub tbs_density: f64,
    /// UAV hovering altitude, m.
    pub uav_altitude: f64,
    /// Hotspot (cluster) radius, m.
    pub cluster_radius: f64,
}

impl NetworkParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("network.station_density_lambda_c", self.station_density)?;
        require_positive("network.tbs_density_lambda_T", self.tbs_density)?;
        require_positive("network.uav_altitude_h", self.uav_altitude)?;
        require_positive("network.cluster_radius_rc", self.cluster_radius)
    }

    /// Largest user–UAV 3-D distance inside the hotspot.
    pub fn max_user_distance(&self) -> f64 {
        self.uav_altitude.hypot(self.cluster_radius)
    }
}

/// Radio channel constants.
///
/// `eta_los` and `eta_nlos` are linear mean *excess losses*: received power
/// is divided by them, so 0 dB is lossless and a larger value attenuates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// W
    pub uav_tx_power: f64,
    /// W
    pub tbs_tx_power: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub alpha_tbs: f64,
    pub eta_los: f64,
    pub eta_nlos: f64,
    pub nakagami_m_los: u32,
    pub nakagami_m_nlos: u32,
    pub env_a: f64,
    pub env_b: f64,
    /// W
    pub noise_power: f64,
    /// Linear SNR threshold.
    pub snr_threshold: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("channel.uav_tx_power_rho_u", self.uav_tx_power),
            ("channel.tbs_tx_power_rho_t", self.tbs_tx_power),
            ("channel.eta_los", self.eta_los),
            ("channel.eta_nlos", self.eta_nlos),
            ("channel.noise_power_sigma2", self.noise_power),
            ("channel.snr_threshold_beta", self.snr_threshold),
        ] {
            require_positive(name, v)?;
        }
        for (name, v) in [
            ("channel.alpha_los", self.alpha_los),
            ("channel.alpha_nlos", self.alpha_nlos),
            ("channel.alpha_tbs", self.alpha_tbs),
        ] {
            if !(v >= 2.0 && v.is_finite()) {
                return Err(Error::validation(
                    name,
                    format!("path-loss exponent must be >= 2 (got {v})"),
                ));
            }
        }
        for (name, m) in [
            ("channel.nakagami_m_los", self.nakagami_m_los),
            ("channel.nakagami_m_nlos", self.nakagami_m_nlos),
        ] {
            if m < 1 {
                return Err(Error::validation(name, "Nakagami shape must be an integer >= 1"));
            }
        }
        for (name, v) in [("channel.env_a", self.env_a), ("channel.env_b", self.env_b)] {
            if !v.is_finite() {
                return Err(Error::validation(name, format!("must be finite (got {v})")));
            }
        }
        Ok(())
    }
}

/// Complete, validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub energy: EnergyParams,
    pub network: NetworkParams,
    pub channel: ChannelParams,
}

impl SystemParams {
    pub fn new(energy: EnergyParams, network: NetworkParams, channel: ChannelParams) -> Result<Self> {
        let params = Self {
            energy,
            network,
            channel,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        self.energy.validate()?;
        self.network.validate()?;
        self.channel.validate()?;
        let range = self.max_travel_radius();
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::validation(
                "energy",
                format!("maximum travel radius must be finite and positive (got {range})"),
            ));
        }
        Ok(())
    }

    /// The built-in default profile (`paper-table-1`).
    pub fn paper_table_1() -> Self {
        crate::config::ConfigDocument::paper_table_1()
            .normalize()
            .expect("built-in profile is valid")
    }

    pub fn velocity(&self) -> f64 {
        self.energy.cruise_velocity.value()
    }

    /// `P_m` at the cruise velocity.
    pub fn travel_power(&self) -> f64 {
        self.energy.travel_power()
    }

    /// Largest nearest-station distance for which a round trip still leaves
    /// service time: `V · B_max / (2 P_m)`.
    pub fn max_travel_radius(&self) -> f64 {
        self.velocity() * self.energy.battery_capacity / (2.0 * self.travel_power())
    }

    /// Upper end of the availability support, `B_max / (P_s T_ch + B_max)`.
    pub fn max_availability(&self) -> f64 {
        let e = &self.energy;
        e.battery_capacity / (e.hover_service_power * e.charging_time + e.battery_capacity)
    }
}

/// `V · B_max / (2 P_m(V))`.
pub fn max_travel_radius(params: &SystemParams) -> f64 {
    params.max_travel_radius()
}

fn require_positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(
            field,
            format!("must be finite and strictly positive (got {v})"),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn with_battery(b: f64) -> SystemParams {
        let mut p = SystemParams::paper_table_1();
        p.energy.battery_capacity = b;
        p
    }

    #[test]
    fn default_max_travel_radius() {
        let p = SystemParams::paper_table_1();
        let hand = p.velocity() * 319_680.0 / (2.0 * p.travel_power());
        assert!((p.max_travel_radius() - hand).abs() < 1e-6);
        // table values 18.46 m/s and 161.8 W give 18236 m
        assert!((p.max_travel_radius() - 18_236.0).abs() / 18_236.0 < 0.01);
    }

    #[test]
    fn radius_is_linear_in_battery() {
        let one = with_battery(1000.0).max_travel_radius();
        let two = with_battery(2000.0).max_travel_radius();
        assert!((two - 2.0 * one).abs() < 1e-9);
        assert!(with_battery(1e-9).max_travel_radius() < 1e-6);
    }

    #[test]
    fn rejects_bad_rotor() {
        let r = RotorParams {
            tip_speed: 3.0,
            ..RotorParams::default()
        };
        assert!(matches!(r.validate(), Err(Error::Validation { field, .. }) if field == "energy.rotor.tip_speed_Utip"));
        let r = RotorParams {
            air_density: 0.0,
            ..RotorParams::default()
        };
        assert!(r.validate().is_err());
    }

    #[test]
    fn rejects_bad_channel() {
        let base = SystemParams::paper_table_1();
        let mut c = base.channel;
        c.alpha_los = 1.5;
        assert!(c.validate().is_err());
        let mut c = base.channel;
        c.nakagami_m_nlos = 0;
        assert!(c.validate().is_err());
        let mut c = base.channel;
        c.noise_power = -1.0;
        assert!(matches!(c.validate(), Err(Error::Validation { field, .. }) if field == "channel.noise_power_sigma2"));
    }

    #[test]
    fn zero_charging_time_is_allowed() {
        let mut p = SystemParams::paper_table_1();
        p.energy.charging_time = 0.0;
        assert!(p.validate().is_ok());
        assert_eq!(p.max_availability(), 1.0);
        p.energy.charging_time = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn radius_monotone_in_battery_and_speed_ratio() {
        let p = SystemParams::paper_table_1();
        let mut last = 0.0;
        for b in [1e3, 1e4, 1e5, 3e5, 1e6] {
            let r = with_battery(b).max_travel_radius();
            assert!(r > last);
            last = r;
        }
        // radius ∝ V / P_m(V); compare two fixed speeds
        let radius_at = |v: f64| {
            let mut q = p;
            q.energy.cruise_velocity = CruiseVelocity::Fixed(v);
            (q.max_travel_radius(), v / q.travel_power())
        };
        let (r1, k1) = radius_at(8.0);
        let (r2, k2) = radius_at(15.0);
        assert_eq!(r1 < r2, k1 < k2);
    }
}
