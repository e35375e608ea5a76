//! Flat key-value configuration documents and their conversion to SI.
//!
//! A document is TOML. Tables are flattened to dotted keys, so
//! `[network]\nuav_altitude_h = 60` and `network.uav_altitude_h = 60` are
//! the same entry. Two reserved top-level keys steer ingestion:
//!
//! * `units = "external" | "si"` (default `external`): whether values are
//!   in the units listed in [`SCHEMA`] or already in SI.
//! * `profile = "paper-table-1" | "none"` (default `paper-table-1`): the
//!   profile supplying values for keys the document omits. With `none`
//!   every key is required.
//!
//! Any other key not in [`SCHEMA`] is rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{ChannelParams, CruiseVelocity, EnergyParams, NetworkParams, RotorParams, SystemParams};

/// Name of the built-in default profile.
pub const PAPER_TABLE_1: &str = "paper-table-1";

/// External unit of a configuration key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    /// Already SI (W, m, m/s, kg/m³, dimensionless).
    Si,
    WattHour,
    Minute,
    PerSquareKilometer,
    /// Power ratio in dB, converted as `10^(x/10)`.
    Decibel,
    /// Positive integer count.
    Integer,
    /// m/s, or the string `"optimal"`.
    Velocity,
}

impl Unit {
    pub fn label(self) -> &'static str {
        match self {
            Unit::Si => "SI",
            Unit::WattHour => "W·h",
            Unit::Minute => "min",
            Unit::PerSquareKilometer => "km^-2",
            Unit::Decibel => "dB",
            Unit::Integer => "integer",
            Unit::Velocity => "m/s | \"optimal\"",
        }
    }

    /// Converts a value in this unit to SI.
    pub fn to_si(self, x: f64) -> f64 {
        match self {
            Unit::Si | Unit::Integer | Unit::Velocity => x,
            Unit::WattHour => x * 3600.0,
            Unit::Minute => x * 60.0,
            Unit::PerSquareKilometer => x / 1e6,
            Unit::Decibel => 10f64.powf(x / 10.0),
        }
    }

    pub fn from_si(self, x: f64) -> f64 {
        match self {
            Unit::Si | Unit::Integer | Unit::Velocity => x,
            Unit::WattHour => x / 3600.0,
            Unit::Minute => x / 60.0,
            Unit::PerSquareKilometer => x * 1e6,
            Unit::Decibel => 10.0 * x.log10(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub unit: Unit,
    /// Default in the external unit; `None` only for the velocity sentinel.
    pub default: Option<f64>,
    pub description: &'static str,
}

const fn key(key: &'static str, unit: Unit, default: f64, description: &'static str) -> KeySpec {
    KeySpec {
        key,
        unit,
        default: Some(default),
        description,
    }
}

/// Every accepted key, its external unit and its `paper-table-1` default.
pub const SCHEMA: &[KeySpec] = &[
    key("energy.battery_capacity_Bmax", Unit::WattHour, 88.8, "battery size"),
    key(
        "energy.hover_service_power_Ps",
        Unit::Si,
        177.5,
        "hover + communication power at the hotspot, W",
    ),
    key(
        "energy.charging_time_Tch",
        Unit::Minute,
        5.0,
        "recharge or battery swap time",
    ),
    KeySpec {
        key: "energy.cruise_velocity_V",
        unit: Unit::Velocity,
        default: None,
        description: "travel speed; \"optimal\" minimises energy per metre",
    },
    key(
        "energy.rotor.blade_profile_power_P0",
        Unit::Si,
        79.86,
        "blade profile power in hover, W",
    ),
    key(
        "energy.rotor.induced_power_Pi",
        Unit::Si,
        88.63,
        "induced power in hover, W",
    ),
    key(
        "energy.rotor.tip_speed_Utip",
        Unit::Si,
        120.0,
        "rotor blade tip speed, m/s",
    ),
    key(
        "energy.rotor.mean_induced_velocity_v0",
        Unit::Si,
        4.03,
        "mean rotor induced velocity in hover, m/s",
    ),
    key(
        "energy.rotor.fuselage_drag_ratio_d0",
        Unit::Si,
        0.6,
        "fuselage drag ratio",
    ),
    key("energy.rotor.air_density_rho", Unit::Si, 1.225, "air density, kg/m^3"),
    key("energy.rotor.rotor_solidity_s", Unit::Si, 0.05, "rotor solidity"),
    key(
        "energy.rotor.rotor_disc_area_A",
        Unit::Si,
        0.503,
        "rotor disc area, m^2",
    ),
    key(
        "network.station_density_lambda_c",
        Unit::PerSquareKilometer,
        1e-2,
        "charging station density",
    ),
    key(
        "network.tbs_density_lambda_T",
        Unit::PerSquareKilometer,
        10.0,
        "terrestrial base station density",
    ),
    key("network.uav_altitude_h", Unit::Si, 60.0, "UAV altitude, m"),
    key("network.cluster_radius_rc", Unit::Si, 100.0, "hotspot radius, m"),
    key("channel.uav_tx_power_rho_u", Unit::Si, 0.1, "UAV transmit power, W"),
    key("channel.tbs_tx_power_rho_t", Unit::Si, 10.0, "TBS transmit power, W"),
    key("channel.alpha_los", Unit::Si, 2.1, "LoS path-loss exponent"),
    key("channel.alpha_nlos", Unit::Si, 4.0, "NLoS path-loss exponent"),
    key("channel.alpha_tbs", Unit::Si, 4.0, "TBS path-loss exponent"),
    key("channel.eta_los", Unit::Decibel, 0.0, "LoS mean excess loss"),
    key("channel.eta_nlos", Unit::Decibel, 20.0, "NLoS mean excess loss"),
    key("channel.nakagami_m_los", Unit::Integer, 3.0, "LoS Nakagami shape"),
    key("channel.nakagami_m_nlos", Unit::Integer, 1.0, "NLoS Nakagami shape"),
    key("channel.env_a", Unit::Si, 25.27, "LoS environment constant a"),
    key("channel.env_b", Unit::Si, 0.5, "LoS environment constant b"),
    key("channel.noise_power_sigma2", Unit::Si, 1e-9, "noise power, W"),
    key("channel.snr_threshold_beta", Unit::Decibel, 20.0, "SNR threshold"),
];

pub fn key_spec(key: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|k| k.key == key)
}

/// Units in which a document's values are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    External,
    Si,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    Number(f64),
    Optimal,
}

/// A parsed configuration document: raw values keyed by dotted path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigDocument {
    pub units: Units,
    /// Profile supplying omitted keys; `None` means every key is required.
    pub profile: Option<String>,
    pub values: BTreeMap<String, ConfigValue>,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        Self::paper_table_1()
    }
}

impl ConfigDocument {
    /// Empty document inheriting every value from `paper-table-1`.
    pub fn paper_table_1() -> Self {
        Self {
            units: Units::External,
            profile: Some(PAPER_TABLE_1.to_string()),
            values: BTreeMap::new(),
        }
    }

    /// Resolves `--config` arguments: a built-in profile name or a path.
    pub fn load(source: &str) -> Result<Self> {
        if source == PAPER_TABLE_1 {
            return Ok(Self::paper_table_1());
        }
        Self::from_file(source)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("malformed document: {}", e.message())))?;
        let mut flat = Vec::new();
        flatten("", &table, &mut flat);

        let mut doc = ConfigDocument {
            units: Units::External,
            profile: Some(PAPER_TABLE_1.to_string()),
            values: BTreeMap::new(),
        };
        for (k, v) in flat {
            match k.as_str() {
                "units" => {
                    doc.units = match v.as_str() {
                        Some("external") => Units::External,
                        Some("si") => Units::Si,
                        _ => {
                            return Err(Error::Config(format!(
                                "`units` must be \"external\" or \"si\" (got {v})"
                            )))
                        }
                    }
                }
                "profile" => {
                    doc.profile = match v.as_str() {
                        Some("none") => None,
                        Some(PAPER_TABLE_1) => Some(PAPER_TABLE_1.to_string()),
                        _ => return Err(Error::Config(format!("unknown profile {v}"))),
                    }
                }
                _ => {
                    let spec = key_spec(&k).ok_or_else(|| Error::UnknownKey(k.clone()))?;
                    let value = match (&v, spec.unit) {
                        (toml::Value::String(s), Unit::Velocity) if s == "optimal" => ConfigValue::Optimal,
                        (toml::Value::Integer(i), _) => ConfigValue::Number(*i as f64),
                        (toml::Value::Float(f), _) => ConfigValue::Number(*f),
                        _ => return Err(Error::Config(format!("`{k}` must be a number (got {v})"))),
                    };
                    doc.values.insert(k, value);
                }
            }
        }
        Ok(doc)
    }

    /// Sets `key` to `value`, given in the document's own units.
    pub fn set(&mut self, key: &str, value: ConfigValue) -> Result<()> {
        key_spec(key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        self.values.insert(key.to_string(), value);
        Ok(())
    }

    /// Sets `key` from a value in its external unit, converting if the
    /// document is in SI.
    pub fn set_external(&mut self, key: &str, value: f64) -> Result<()> {
        let spec = key_spec(key).ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        let stored = match self.units {
            Units::External => value,
            Units::Si => spec.unit.to_si(value),
        };
        self.set(key, ConfigValue::Number(stored))
    }

    fn lookup(&self, spec: &KeySpec) -> Result<ConfigValue> {
        if let Some(v) = self.values.get(spec.key) {
            return Ok(v.clone());
        }
        if self.profile.is_none() {
            return Err(Error::MissingKey(spec.key.to_string()));
        }
        Ok(match spec.default {
            // profile defaults are in external units
            Some(d) => ConfigValue::Number(match self.units {
                Units::External => d,
                Units::Si => spec.unit.to_si(d),
            }),
            None => ConfigValue::Optimal,
        })
    }

    fn number(&self, key: &str) -> Result<f64> {
        let spec = key_spec(key).expect("schema key");
        match self.lookup(spec)? {
            ConfigValue::Number(x) => Ok(match self.units {
                Units::External => spec.unit.to_si(x),
                Units::Si => x,
            }),
            ConfigValue::Optimal => Err(Error::Config(format!("`{key}` must be a number"))),
        }
    }

    fn integer(&self, key: &str) -> Result<u32> {
        let x = self.number(key)?;
        if x.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&x) {
            return Err(Error::validation(key, format!("must be a positive integer (got {x})")));
        }
        Ok(x as u32)
    }

    /// Converts to validated SI parameters.
    pub fn normalize(&self) -> Result<SystemParams> {
        let rotor = RotorParams {
            blade_profile_power: self.number("energy.rotor.blade_profile_power_P0")?,
            induced_power: self.number("energy.rotor.induced_power_Pi")?,
            tip_speed: self.number("energy.rotor.tip_speed_Utip")?,
            mean_induced_velocity: self.number("energy.rotor.mean_induced_velocity_v0")?,
            fuselage_drag_ratio: self.number("energy.rotor.fuselage_drag_ratio_d0")?,
            air_density: self.number("energy.rotor.air_density_rho")?,
            rotor_solidity: self.number("energy.rotor.rotor_solidity_s")?,
            rotor_disc_area: self.number("energy.rotor.rotor_disc_area_A")?,
        };
        rotor.validate()?;
        let velocity_spec = key_spec("energy.cruise_velocity_V").expect("schema key");
        let cruise_velocity = match self.lookup(velocity_spec)? {
            ConfigValue::Optimal => CruiseVelocity::optimal(&rotor),
            ConfigValue::Number(v) => CruiseVelocity::Fixed(v),
        };
        let energy = EnergyParams {
            battery_capacity: self.number("energy.battery_capacity_Bmax")?,
            hover_service_power: self.number("energy.hover_service_power_Ps")?,
            charging_time: self.number("energy.charging_time_Tch")?,
            cruise_velocity,
            rotor,
        };
        let network = NetworkParams {
            station_density: self.number("network.station_density_lambda_c")?,
            tbs_density: self.number("network.tbs_density_lambda_T")?,
            uav_altitude: self.number("network.uav_altitude_h")?,
            cluster_radius: self.number("network.cluster_radius_rc")?,
        };
        let channel = ChannelParams {
            uav_tx_power: self.number("channel.uav_tx_power_rho_u")?,
            tbs_tx_power: self.number("channel.tbs_tx_power_rho_t")?,
            alpha_los: self.number("channel.alpha_los")?,
            alpha_nlos: self.number("channel.alpha_nlos")?,
            alpha_tbs: self.number("channel.alpha_tbs")?,
            eta_los: self.number("channel.eta_los")?,
            eta_nlos: self.number("channel.eta_nlos")?,
            nakagami_m_los: self.integer("channel.nakagami_m_los")?,
            nakagami_m_nlos: self.integer("channel.nakagami_m_nlos")?,
            env_a: self.number("channel.env_a")?,
            env_b: self.number("channel.env_b")?,
            noise_power: self.number("channel.noise_power_sigma2")?,
            snr_threshold: self.number("channel.snr_threshold_beta")?,
        };
        SystemParams::new(energy, network, channel)
    }

    /// Renders the document as TOML. Floats use Rust's shortest
    /// round-trip representation, so re-parsing is lossless.
    pub fn to_toml_string(&self) -> String {
        let mut out = String::new();
        let units = match self.units {
            Units::External => "external",
            Units::Si => "si",
        };
        let _ = writeln!(out, "units = \"{units}\"");
        let _ = writeln!(out, "profile = \"{}\"", self.profile.as_deref().unwrap_or("none"));
        for spec in SCHEMA {
            if let Some(v) = self.values.get(spec.key) {
                match v {
                    ConfigValue::Optimal => {
                        let _ = writeln!(out, "{} = \"optimal\"", spec.key);
                    }
                    ConfigValue::Number(x) if spec.unit == Unit::Integer => {
                        let _ = writeln!(out, "{} = {}", spec.key, *x as i64);
                    }
                    ConfigValue::Number(x) => {
                        let _ = writeln!(out, "{} = {:?}", spec.key, x);
                    }
                }
            }
        }
        out
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&path, t, out),
            other => out.push((path, other.clone())),
        }
    }
}

/// Parses a document and converts it to SI parameters.
pub fn normalize_params(text: &str) -> Result<SystemParams> {
    ConfigDocument::parse(text)?.normalize()
}

impl SystemParams {
    /// Complete SI document describing these parameters. An optimal cruise
    /// velocity is kept as the `"optimal"` sentinel.
    pub fn to_document(&self) -> ConfigDocument {
        let e = &self.energy;
        let r = &e.rotor;
        let n = &self.network;
        let c = &self.channel;
        let mut values = BTreeMap::new();
        let mut put = |k: &str, v: ConfigValue| {
            values.insert(k.to_string(), v);
        };
        let num = ConfigValue::Number;
        put("energy.battery_capacity_Bmax", num(e.battery_capacity));
        put("energy.hover_service_power_Ps", num(e.hover_service_power));
        put("energy.charging_time_Tch", num(e.charging_time));
        put(
            "energy.cruise_velocity_V",
            match e.cruise_velocity {
                CruiseVelocity::Optimal { .. } => ConfigValue::Optimal,
                CruiseVelocity::Fixed(v) => num(v),
            },
        );
        put("energy.rotor.blade_profile_power_P0", num(r.blade_profile_power));
        put("energy.rotor.induced_power_Pi", num(r.induced_power));
        put("energy.rotor.tip_speed_Utip", num(r.tip_speed));
        put("energy.rotor.mean_induced_velocity_v0", num(r.mean_induced_velocity));
        put("energy.rotor.fuselage_drag_ratio_d0", num(r.fuselage_drag_ratio));
        put("energy.rotor.air_density_rho", num(r.air_density));
        put("energy.rotor.rotor_solidity_s", num(r.rotor_solidity));
        put("energy.rotor.rotor_disc_area_A", num(r.rotor_disc_area));
        put("network.station_density_lambda_c", num(n.station_density));
        put("network.tbs_density_lambda_T", num(n.tbs_density));
        put("network.uav_altitude_h", num(n.uav_altitude));
        put("network.cluster_radius_rc", num(n.cluster_radius));
        put("channel.uav_tx_power_rho_u", num(c.uav_tx_power));
        put("channel.tbs_tx_power_rho_t", num(c.tbs_tx_power));
        put("channel.alpha_los", num(c.alpha_los));
        put("channel.alpha_nlos", num(c.alpha_nlos));
        put("channel.alpha_tbs", num(c.alpha_tbs));
        put("channel.eta_los", num(c.eta_los));
        put("channel.eta_nlos", num(c.eta_nlos));
        put("channel.nakagami_m_los", num(f64::from(c.nakagami_m_los)));
        put("channel.nakagami_m_nlos", num(f64::from(c.nakagami_m_nlos)));
        put("channel.env_a", num(c.env_a));
        put("channel.env_b", num(c.env_b));
        put("channel.noise_power_sigma2", num(c.noise_power));
        put("channel.snr_threshold_beta", num(c.snr_threshold));
        ConfigDocument {
            units: Units::Si,
            profile: None,
            values,
        }
    }

    /// Copy with one key replaced by `value` in that key's external unit.
    pub fn with_override(&self, key: &str, value: f64) -> Result<SystemParams> {
        let mut doc = self.to_document();
        doc.set_external(key, value)?;
        doc.normalize()
    }
}

/// Markdown table of every key, its unit and its default.
pub fn schema_table() -> String {
    let mut out = String::from("| key | unit | default | meaning |\n|---|---|---|---|\n");
    for spec in SCHEMA {
        let default = match spec.default {
            None => "\"optimal\"".to_string(),
            Some(d) if d != 0.0 && !(1e-3..1e6).contains(&d.abs()) => format!("{d:e}"),
            Some(d) => d.to_string(),
        };
        let _ = writeln!(
            out,
            "| `{}` | {} | {} | {} |",
            spec.key,
            spec.unit.label(),
            default,
            spec.description
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs()
    }

    #[test]
    fn table_1_conversions() {
        let p = normalize_params("").unwrap();
        assert!(close(p.energy.battery_capacity, 319_680.0, 1e-12));
        assert!(close(p.channel.snr_threshold, 100.0, 1e-12));
        assert!(close(p.network.station_density, 1e-8, 1e-12));
        assert!(close(p.network.tbs_density, 1e-5, 1e-12));
        assert!(close(p.energy.charging_time, 300.0, 1e-12));
        assert_eq!(p.channel.eta_los, 1.0);
        assert!(close(p.channel.eta_nlos, 100.0, 1e-12));
        assert!(matches!(p.energy.cruise_velocity, CruiseVelocity::Optimal { .. }));
    }

    #[test]
    fn explicit_values_override_profile() {
        let p = normalize_params(
            "[energy]\nbattery_capacity_Bmax = 10\ncruise_velocity_V = 12.5\n[network]\nstation_density_lambda_c = 1",
        )
        .unwrap();
        assert!(close(p.energy.battery_capacity, 36_000.0, 1e-12));
        assert_eq!(p.energy.cruise_velocity, CruiseVelocity::Fixed(12.5));
        assert!(close(p.network.station_density, 1e-6, 1e-12));
        let q = normalize_params("network.uav_altitude_h = 80").unwrap();
        assert_eq!(q.network.uav_altitude, 80.0);
    }

    #[test]
    fn unknown_key_is_hard_error() {
        assert_eq!(
            normalize_params("network.bogus = 3").unwrap_err(),
            Error::UnknownKey("network.bogus".into())
        );
    }

    #[test]
    fn missing_key_without_profile() {
        let err = normalize_params("profile = \"none\"").unwrap_err();
        assert!(matches!(err, Error::MissingKey(_)));
    }

    #[test]
    fn non_positive_quantity_names_field() {
        let err = normalize_params("network.uav_altitude_h = -5").unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "network.uav_altitude_h"),
            "{err}"
        );
        let err = normalize_params("energy.rotor.air_density_rho = 0").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "energy.rotor.air_density_rho"));
    }

    #[test]
    fn non_integer_nakagami_rejected() {
        let err = normalize_params("channel.nakagami_m_los = 2.5").unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "channel.nakagami_m_los"));
        assert!(normalize_params("channel.nakagami_m_los = 2.0").is_ok());
    }

    #[test]
    fn malformed_and_mistyped_values() {
        assert!(matches!(normalize_params("x = = 1"), Err(Error::Config(_))));
        assert!(matches!(
            normalize_params("network.uav_altitude_h = \"high\""),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            normalize_params("units = \"furlongs\""),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn si_round_trip_is_bitwise() {
        let p = normalize_params("energy.cruise_velocity_V = 17.3\nchannel.eta_nlos = 13.7").unwrap();
        let text = p.to_document().to_toml_string();
        let q = normalize_params(&text).unwrap();
        assert_eq!(p, q);
        // and idempotent on SI input
        let r = normalize_params(&q.to_document().to_toml_string()).unwrap();
        assert_eq!(q, r);
    }

    #[test]
    fn override_in_external_units() {
        let p = SystemParams::paper_table_1();
        let q = p.with_override("network.station_density_lambda_c", 1.0).unwrap();
        assert!(close(q.network.station_density, 1e-6, 1e-12));
        let q = p.with_override("energy.charging_time_Tch", 40.0).unwrap();
        assert!(close(q.energy.charging_time, 2400.0, 1e-12));
        assert_eq!(q.network, p.network);
        assert!(matches!(p.with_override("nope", 1.0), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn schema_defaults_all_valid() {
        assert!(schema_table().lines().count() == SCHEMA.len() + 2);
        for spec in SCHEMA {
            if let Some(d) = spec.default {
                let back = spec.unit.from_si(spec.unit.to_si(d));
                assert!((back - d).abs() <= 1e-12 * d.abs().max(1.0), "{}", spec.key);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_random_params(
                wh in 1.0f64..500.0,
                minutes in 0.0f64..120.0,
                lc in 1e-4f64..10.0,
                beta_db in -10.0f64..40.0,
                h in 10.0f64..300.0,
            ) {
                let text = format!(
                    "energy.battery_capacity_Bmax = {wh:?}\nenergy.charging_time_Tch = {minutes:?}\n\
                     network.station_density_lambda_c = {lc:?}\nchannel.snr_threshold_beta = {beta_db:?}\n\
                     network.uav_altitude_h = {h:?}\n"
                );
                let p = normalize_params(&text).unwrap();
                let q = normalize_params(&p.to_document().to_toml_string()).unwrap();
                prop_assert_eq!(p, q);
            }
        }
    }
}
