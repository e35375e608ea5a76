//! Simulation oracle for availability and coverage.
//!
//! Point processes enter every estimand only through contact distances, so
//! those are sampled from their exact Rayleigh laws instead of realising
//! PPPs in a window. Trials run in fixed-size chunks; chunk `i` draws from
//! ChaCha8 stream `i` of the configured seed, and chunk totals are reduced
//! in chunk order, so results do not depend on thread scheduling.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::coverage::los_probability_at_angle;
use crate::error::{Error, Result};
use crate::params::SystemParams;

const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub confidence_level: f64,
    /// Cycles simulated by [`timeline_availability`].
    pub horizon_cycles: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 42,
            confidence_level: 0.99,
            horizon_cycles: 16,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::validation("trials", "need at least one trial"));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::validation(
                "confidence",
                format!("confidence level must lie in (0, 1) (got {})", self.confidence_level),
            ));
        }
        if self.horizon_cycles < 1 {
            return Err(Error::validation("horizon_cycles", "need at least one cycle"));
        }
        Ok(())
    }

    /// Two-sided normal quantile for the configured confidence level.
    pub fn z_score(&self) -> f64 {
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        normal.inverse_cdf(0.5 * (1.0 + self.confidence_level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub ci_half_width: f64,
    pub trials: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn contains(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.ci_half_width
    }
}

/// Three coverage estimates from one batch of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimates {
    pub total: McEstimate,
    pub uav_tier: McEstimate,
    pub tbs_tier: McEstimate,
}

/// Draws the distance to the nearest point of a PPP of density `lambda`
/// (per m²) by inverting `F(r) = 1 - exp(-λπr²)`.
pub fn sample_nearest_station_distance<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> f64 {
    // 1 - U lies in (0, 1], keeping the log finite
    let u = 1.0 - rng.random::<f64>();
    (-u.ln() / (PI * lambda)).sqrt()
}

/// Unit-mean gamma fading gain with shape `m` and scale `1/m`.
pub fn sample_gamma_gain<R: Rng + ?Sized>(rng: &mut R, m: u32) -> f64 {
    let m = f64::from(m);
    Gamma::new(m, 1.0 / m).expect("shape validated positive").sample(rng)
}

/// Simulates `horizon_cycles` rounds of outbound flight, service, return
/// flight and charging with explicit battery bookkeeping, and returns the
/// fraction of elapsed time spent serving.
pub fn timeline_availability(rs: f64, params: &SystemParams, horizon_cycles: u32) -> f64 {
    let v = params.velocity();
    let leg_energy = params.travel_power() * rs / v;
    let leg_time = rs / v;
    let e = &params.energy;
    if 2.0 * leg_energy >= e.battery_capacity {
        return 0.0;
    }

    let mut served = 0.0;
    let mut elapsed = 0.0;
    for _ in 0..horizon_cycles {
        let mut battery = e.battery_capacity;
        battery -= leg_energy;
        elapsed += leg_time;
        // serve until only the return-leg energy is left
        let serve = (battery - leg_energy) / e.hover_service_power;
        served += serve;
        elapsed += serve;
        battery = leg_energy;
        battery -= leg_energy;
        elapsed += leg_time;
        debug_assert!(battery.abs() <= 1e-9 * e.battery_capacity);
        elapsed += e.charging_time;
    }
    if elapsed == 0.0 {
        // zero-length cycle: no travel, no charging, no battery
        return 0.0;
    }
    served / elapsed
}

/// Whether the UAV is found available at a uniformly random instant.
pub fn availability_decision<R: Rng + ?Sized>(rng: &mut R, rs: f64, params: &SystemParams) -> bool {
    rng.random::<f64>() < timeline_availability(rs, params, 1)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_sizes(trials: u64) -> Vec<(u64, u64)> {
    let n_chunks = trials.div_ceil(CHUNK);
    (0..n_chunks).map(|i| (i, CHUNK.min(trials - i * CHUNK))).collect()
}

fn mean_estimate(sum: f64, sum_sq: f64, mc: &McConfig) -> McEstimate {
    let n = mc.trials as f64;
    let mean = sum / n;
    let var = if mc.trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        ci_half_width: mc.z_score() * (var / n).sqrt(),
        trials: mc.trials,
        seed: mc.seed,
    }
}

fn proportion_estimate(hits: u64, mc: &McConfig) -> McEstimate {
    let h = hits as f64;
    mean_estimate(h, h, mc)
}

/// Mean of the conditional availability over sampled station distances.
pub fn estimate_availability(params: &SystemParams, mc: &McConfig) -> Result<McEstimate> {
    mc.validate()?;
    let lambda = params.network.station_density;
    let partials: Vec<(f64, f64)> = chunk_sizes(mc.trials)
        .into_par_iter()
        .map(|(chunk, n)| {
            let mut rng = chunk_rng(mc.seed, chunk);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let rs = sample_nearest_station_distance(&mut rng, lambda);
                let a = timeline_availability(rs, params, 1);
                sum += a;
                sum_sq += a * a;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partials.iter().fold((0.0, 0.0), |(s, q), &(a, b)| (s + a, q + b));
    Ok(mean_estimate(sum, sum_sq, mc))
}

#[derive(Default, Clone, Copy)]
struct CoverageCounts {
    total: u64,
    uav: u64,
    tbs: u64,
}

/// Samples the full hotspot model: station distance, UAV availability,
/// user position, LoS state, fading and nearest-TBS link.
pub fn estimate_coverage(params: &SystemParams, mc: &McConfig) -> Result<CoverageEstimates> {
    mc.validate()?;
    let n = &params.network;
    let c = &params.channel;
    let noise = c.noise_power;

    let partials: Vec<CoverageCounts> = chunk_sizes(mc.trials)
        .into_par_iter()
        .map(|(chunk, trials)| {
            let mut rng = chunk_rng(mc.seed, chunk);
            let mut counts = CoverageCounts::default();
            for _ in 0..trials {
                let rs = sample_nearest_station_distance(&mut rng, n.station_density);
                let available = availability_decision(&mut rng, rs, params);

                // user uniform in the hotspot disk, UAV overhead at h
                let ground = n.cluster_radius * rng.random::<f64>().sqrt();
                let r_u = ground.hypot(n.uav_altitude);
                let elevation = n.uav_altitude.atan2(ground).to_degrees();
                let los = rng.random::<f64>() < los_probability_at_angle(elevation, c);
                let (m, alpha, eta) = if los {
                    (c.nakagami_m_los, c.alpha_los, c.eta_los)
                } else {
                    (c.nakagami_m_nlos, c.alpha_nlos, c.eta_nlos)
                };
                let gain = sample_gamma_gain(&mut rng, m);
                let snr_u = c.uav_tx_power * gain * r_u.powf(-alpha) / eta / noise;
                let uav_ok = snr_u >= c.snr_threshold;

                let r_t = sample_nearest_station_distance(&mut rng, n.tbs_density);
                let h: f64 = Exp1.sample(&mut rng);
                let snr_t = c.tbs_tx_power * h * r_t.powf(-c.alpha_tbs) / noise;
                let tbs_ok = snr_t >= c.snr_threshold;

                counts.uav += u64::from(uav_ok);
                counts.tbs += u64::from(tbs_ok);
                counts.total += u64::from(if available { uav_ok } else { tbs_ok });
            }
            counts
        })
        .collect();

    let sum = partials
        .iter()
        .fold(CoverageCounts::default(), |acc, p| CoverageCounts {
            total: acc.total + p.total,
            uav: acc.uav + p.uav,
            tbs: acc.tbs + p.tbs,
        });
    Ok(CoverageEstimates {
        total: proportion_estimate(sum.total, mc),
        uav_tier: proportion_estimate(sum.uav, mc),
        tbs_tier: proportion_estimate(sum.tbs, mc),
    })
}

/// Empirical `P(X > θ)` of the conditional coverage for each `θ`, from
/// `mc.trials` sampled station distances. `coverage_at(rs)` maps a station
/// distance to the conditional coverage.
pub fn empirical_ccdf<F>(
    thetas: &[f64],
    coverage_at: F,
    params: &SystemParams,
    mc: &McConfig,
) -> Result<Vec<McEstimate>>
where
    F: Fn(f64) -> f64 + Sync,
{
    mc.validate()?;
    let lambda = params.network.station_density;
    let partials: Vec<Vec<u64>> = chunk_sizes(mc.trials)
        .into_par_iter()
        .map(|(chunk, n)| {
            let mut rng = chunk_rng(mc.seed, chunk);
            let mut above = vec![0u64; thetas.len()];
            for _ in 0..n {
                let x = coverage_at(sample_nearest_station_distance(&mut rng, lambda));
                for (slot, &t) in above.iter_mut().zip(thetas) {
                    *slot += u64::from(x > t);
                }
            }
            above
        })
        .collect();
    Ok((0..thetas.len())
        .map(|i| proportion_estimate(partials.iter().map(|p| p[i]).sum(), mc))
        .collect())
}
