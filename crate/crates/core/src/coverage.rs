//! SNR coverage of the reference hotspot user.
//!
//! The user is served by its hotspot UAV when the UAV is available and by
//! the nearest terrestrial base station (TBS) otherwise. The user–UAV
//! distance `R_U` is the 3-D distance, with density `2r / r_c²` on
//! `[h, √(h² + r_c²)]` for a user uniform in the hotspot disk.

use std::f64::consts::PI;

use crate::availability::{availability, availability_cdf, availability_given_rs};
use crate::error::Result;
use crate::numerics::{integrate, integrate_semi_infinite, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};
use crate::params::{ChannelParams, NetworkParams, SystemParams};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageBreakdown {
    pub p_cov_uav: f64,
    pub p_cov_uav_los_part: f64,
    pub p_cov_uav_nlos_part: f64,
    pub p_cov_tbs: f64,
    pub availability: f64,
    pub p_cov_total: f64,
}

/// Elevation angle in degrees of a UAV at altitude `h` seen from 3-D
/// distance `r3d`.
fn elevation_deg(r3d: f64, h: f64) -> f64 {
    let ground = (r3d * r3d - h * h).max(0.0).sqrt();
    h.atan2(ground).to_degrees()
}

/// Probability of a line-of-sight link at 3-D distance `r3d ≥ h`.
pub fn los_probability(r3d: f64, network: &NetworkParams, channel: &ChannelParams) -> Result<f64> {
    let h = network.uav_altitude;
    if r3d.is_nan() || r3d < h {
        return Err(Error::Domain(format!(
            "user-UAV distance {r3d} is below the UAV altitude {h}"
        )));
    }
    Ok(los_probability_at_angle(elevation_deg(r3d, h), channel))
}

/// `1 / (1 + a exp(-b(θ - a)))` with the elevation angle `θ` in degrees.
pub(crate) fn los_probability_at_angle(theta_deg: f64, channel: &ChannelParams) -> f64 {
    1.0 / (1.0 + channel.env_a * (-channel.env_b * (theta_deg - channel.env_a)).exp())
}

pub fn nlos_probability(r3d: f64, network: &NetworkParams, channel: &ChannelParams) -> Result<f64> {
    Ok(1.0 - los_probability(r3d, network, channel)?)
}

/// `P(G ≥ g)` for a unit-mean gamma gain with integer shape `m`:
/// `e^{-mg} Σ_{k<m} (mg)^k / k!`.
pub fn gamma_ccdf(m: u32, g: f64) -> f64 {
    debug_assert!(m >= 1 && g >= 0.0);
    let mg = f64::from(m) * g;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..m {
        term *= mg / f64::from(k);
        sum += term;
    }
    (-mg).exp() * sum
}

/// Normalised SNR threshold of the LoS link at distance `r`:
/// `β σ² η_L r^{α_L} / ρ_u`.
fn threshold_los(r: f64, c: &ChannelParams) -> f64 {
    c.snr_threshold * c.noise_power * c.eta_los * r.powf(c.alpha_los) / c.uav_tx_power
}

fn threshold_nlos(r: f64, c: &ChannelParams) -> f64 {
    c.snr_threshold * c.noise_power * c.eta_nlos * r.powf(c.alpha_nlos) / c.uav_tx_power
}

fn threshold_tbs(r: f64, c: &ChannelParams) -> f64 {
    c.snr_threshold * c.noise_power * r.powf(c.alpha_tbs) / c.tbs_tx_power
}

/// UAV-tier coverage `(total, los_part, nlos_part)`.
pub fn coverage_uav(params: &SystemParams) -> Result<(f64, f64, f64)> {
    let n = &params.network;
    let c = &params.channel;
    let h = n.uav_altitude;
    let r_max = n.max_user_distance();
    let rc2 = n.cluster_radius * n.cluster_radius;

    let los = integrate(
        |r| {
            let pl = los_probability_at_angle(elevation_deg(r, h), c);
            pl * gamma_ccdf(c.nakagami_m_los, threshold_los(r, c)) * 2.0 * r / rc2
        },
        h,
        r_max,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?
    .value;
    let nlos = integrate(
        |r| {
            let pn = 1.0 - los_probability_at_angle(elevation_deg(r, h), c);
            pn * gamma_ccdf(c.nakagami_m_nlos, threshold_nlos(r, c)) * 2.0 * r / rc2
        },
        h,
        r_max,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?
    .value;
    let los = los.clamp(0.0, 1.0);
    let nlos = nlos.clamp(0.0, 1.0);
    Ok(((los + nlos).min(1.0), los, nlos))
}

/// TBS-tier coverage with the Rayleigh contact distance of the TBS PPP and
/// unit-mean exponential fading.
pub fn coverage_tbs(params: &SystemParams) -> Result<f64> {
    let lambda = params.network.tbs_density;
    let c = &params.channel;
    // r = scale * s puts the contact-distance mass at s ~ 1
    let scale = 1.0 / (PI * lambda).sqrt();
    let r = integrate_semi_infinite(
        |s| {
            let g = threshold_tbs(scale * s, c);
            2.0 * s * (-s * s - g).exp()
        },
        0.0,
        DEFAULT_REL_TOL,
        DEFAULT_ABS_TOL,
    )?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Availability-weighted total coverage.
pub fn total_coverage(params: &SystemParams) -> Result<CoverageBreakdown> {
    let (p_cov_uav, los, nlos) = coverage_uav(params)?;
    let p_cov_tbs = coverage_tbs(params)?;
    let pa = availability(params)?;
    Ok(CoverageBreakdown {
        p_cov_uav,
        p_cov_uav_los_part: los,
        p_cov_uav_nlos_part: nlos,
        p_cov_tbs,
        availability: pa,
        p_cov_total: pa * p_cov_uav + (1.0 - pa) * p_cov_tbs,
    })
}

/// Coverage conditioned on the nearest-station distance `rs`.
pub fn conditional_coverage(rs: f64, params: &SystemParams) -> Result<f64> {
    let (uav, _, _) = coverage_uav(params)?;
    let tbs = coverage_tbs(params)?;
    Ok(mix(availability_given_rs(rs, params).availability, uav, tbs))
}

fn mix(pa: f64, uav: f64, tbs: f64) -> f64 {
    pa * uav + (1.0 - pa) * tbs
}

/// Distribution of the conditional coverage over the station process.
///
/// The conditional coverage is an affine image of the conditional
/// availability. When both tiers have the same coverage the image collapses
/// to a point mass, reported as [`ConditionalCoverageDistribution::PointMass`].
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConditionalCoverageDistribution {
    Affine {
        p_cov_uav: f64,
        p_cov_tbs: f64,
        params: SystemParams,
    },
    PointMass(f64),
}

impl ConditionalCoverageDistribution {
    pub fn new(params: &SystemParams) -> Result<Self> {
        let (uav, _, _) = coverage_uav(params)?;
        let tbs = coverage_tbs(params)?;
        Ok(Self::from_tiers(uav, tbs, params))
    }

    pub fn from_tiers(p_cov_uav: f64, p_cov_tbs: f64, params: &SystemParams) -> Self {
        if p_cov_uav == p_cov_tbs {
            Self::PointMass(p_cov_tbs)
        } else {
            Self::Affine {
                p_cov_uav,
                p_cov_tbs,
                params: *params,
            }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Self::PointMass(_))
    }

    /// Conditional coverage at station distance `rs`.
    pub fn value_at(&self, rs: f64) -> f64 {
        match *self {
            Self::PointMass(v) => v,
            Self::Affine {
                p_cov_uav,
                p_cov_tbs,
                ref params,
            } => mix(availability_given_rs(rs, params).availability, p_cov_uav, p_cov_tbs),
        }
    }

    /// Smallest and largest achievable conditional coverage.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::PointMass(v) => (v, v),
            Self::Affine {
                p_cov_uav,
                p_cov_tbs,
                ref params,
            } => {
                let best = mix(params.max_availability(), p_cov_uav, p_cov_tbs);
                (best.min(p_cov_tbs), best.max(p_cov_tbs))
            }
        }
    }

    /// Coverage value at `R_s = 0`, the largest conditional coverage when
    /// the UAV tier beats the TBS tier.
    pub fn zero_distance_value(&self) -> f64 {
        self.value_at(0.0)
    }

    /// `P(P_cov|R_s > θ)`.
    pub fn ccdf(&self, theta: f64) -> f64 {
        match *self {
            Self::PointMass(v) => {
                if theta < v {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Affine {
                p_cov_uav,
                p_cov_tbs,
                ref params,
            } => {
                let x = (theta - p_cov_tbs) / (p_cov_uav - p_cov_tbs);
                if p_cov_uav > p_cov_tbs {
                    1.0 - availability_cdf(x, params)
                } else if x <= 0.0 {
                    // decreasing map: P(a < x); the only atom sits at a = 0
                    0.0
                } else {
                    availability_cdf(x, params)
                }
            }
        }
    }

    /// `P(P_cov|R_s ≤ θ)`.
    pub fn cdf(&self, theta: f64) -> f64 {
        1.0 - self.ccdf(theta)
    }
}

/// `P(P_cov|R_s > θ)` for the given parameters.
pub fn conditional_coverage_ccdf(theta: f64, params: &SystemParams) -> Result<f64> {
    Ok(ConditionalCoverageDistribution::new(params)?.ccdf(theta))
}
