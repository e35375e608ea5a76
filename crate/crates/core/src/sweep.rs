//! Parameter sweeps and CSV tables for the command-line front end.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::availability::availability;
use crate::config::{key_spec, Unit};
use crate::coverage::{coverage_tbs, coverage_uav, ConditionalCoverageDistribution};
use crate::error::{Error, Result};
use crate::montecarlo::{empirical_ccdf, estimate_availability, estimate_coverage, McConfig, McEstimate};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Availability,
    CoverageTotal,
    CoverageUav,
    CoverageTbs,
    /// Conditional coverage CCDF at [`SweepSpec::ccdf_theta`].
    Ccdf,
}

impl Output {
    pub fn name(self) -> &'static str {
        match self {
            Output::Availability => "availability",
            Output::CoverageTotal => "coverage_total",
            Output::CoverageUav => "coverage_uav",
            Output::CoverageTbs => "coverage_tbs",
            Output::Ccdf => "ccdf",
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "availability" => Output::Availability,
            "coverage_total" => Output::CoverageTotal,
            "coverage_uav" => Output::CoverageUav,
            "coverage_tbs" => Output::CoverageTbs,
            "ccdf" => Output::Ccdf,
            other => return Err(Error::Config(format!("unknown sweep output `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted configuration key, e.g. `network.station_density_lambda_c`.
    pub parameter_path: String,
    /// Swept values in the key's external unit.
    pub values: Vec<f64>,
    pub outputs: Vec<Output>,
    pub mc_check: bool,
    /// Coverage level at which the `ccdf` output is evaluated.
    pub ccdf_theta: Option<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let spec = key_spec(&self.parameter_path)
            .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{}`", self.parameter_path)))?;
        if spec.unit == Unit::Integer && self.values.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Config(format!(
                "`{}` only takes integer values",
                self.parameter_path
            )));
        }
        if self.values.is_empty() {
            return Err(Error::Config("sweep needs at least one value".into()));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("sweep needs at least one output".into()));
        }
        if self.outputs.contains(&Output::Ccdf) && self.ccdf_theta.is_none() {
            return Err(Error::Config("the `ccdf` output needs a theta".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept value in its external unit.
    pub swept_value: f64,
    /// One analytic value per requested output, in request order.
    pub analytic: Vec<f64>,
    pub mc: Option<Vec<McEstimate>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter_path: String,
    pub outputs: Vec<Output>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn to_table(&self) -> CsvTable {
        let mut header = vec![self.parameter_path.clone()];
        let with_mc = self.rows.iter().any(|r| r.mc.is_some());
        for o in &self.outputs {
            header.push(o.name().to_string());
            if with_mc {
                header.push(format!("{}_mc", o.name()));
                header.push(format!("{}_ci", o.name()));
            }
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row = vec![r.swept_value];
                for (i, &a) in r.analytic.iter().enumerate() {
                    row.push(a);
                    if let Some(mc) = &r.mc {
                        row.push(mc[i].mean);
                        row.push(mc[i].ci_half_width);
                    }
                }
                row
            })
            .collect();
        CsvTable { header, rows }
    }
}

/// Header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Fixed-width text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            let _ = write!(out, "{h:>24}");
        }
        out.push('\n');
        for row in &self.rows {
            for v in row {
                let _ = write!(out, "{:>24}", format!("{v:.8}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses `lo:hi:log:N`, `lo:hi:lin:N` or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("bad value list `{text}`: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, kind, n] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let n: usize = n.trim().parse().map_err(|_| bad("count must be an integer"))?;
            if n == 0 {
                return Err(bad("count must be positive"));
            }
            let at = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            match kind.trim() {
                "lin" => (0..n).map(|i| lo + (hi - lo) * at(i)).collect(),
                "log" => {
                    if lo <= 0.0 || hi <= 0.0 {
                        return Err(bad("log spacing needs positive bounds"));
                    }
                    let (a, b) = (lo.log10(), hi.log10());
                    (0..n).map(|i| 10f64.powf(a + (b - a) * at(i))).collect()
                }
                _ => return Err(bad("spacing must be `lin` or `log`")),
            }
        }
        [single] => single
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<f64>>>()?,
        _ => return Err(bad("expected lo:hi:lin|log:N or a comma list")),
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(values)
}

struct Analytic {
    availability: f64,
    uav: f64,
    tbs: f64,
}

impl Analytic {
    fn total(&self) -> f64 {
        self.availability * self.uav + (1.0 - self.availability) * self.tbs
    }
}

fn evaluate(outputs: &[Output], theta: Option<f64>, params: &SystemParams) -> Result<Vec<f64>> {
    let needs_tiers = outputs.iter().any(|o| *o != Output::Availability);
    let (uav, tbs) = if needs_tiers {
        (coverage_uav(params)?.0, coverage_tbs(params)?)
    } else {
        (f64::NAN, f64::NAN)
    };
    let a = Analytic {
        availability: availability(params)?,
        uav,
        tbs,
    };
    Ok(outputs
        .iter()
        .map(|o| match o {
            Output::Availability => a.availability,
            Output::CoverageTotal => a.total(),
            Output::CoverageUav => a.uav,
            Output::CoverageTbs => a.tbs,
            Output::Ccdf => {
                ConditionalCoverageDistribution::from_tiers(a.uav, a.tbs, params).ccdf(theta.expect("validated"))
            }
        })
        .collect())
}

fn evaluate_mc(
    outputs: &[Output],
    theta: Option<f64>,
    params: &SystemParams,
    mc: &McConfig,
) -> Result<Vec<McEstimate>> {
    let needs_cov = outputs
        .iter()
        .any(|o| matches!(o, Output::CoverageTotal | Output::CoverageUav | Output::CoverageTbs));
    let cov = if needs_cov {
        Some(estimate_coverage(params, mc)?)
    } else {
        None
    };
    outputs
        .iter()
        .map(|o| {
            Ok(match o {
                Output::Availability => estimate_availability(params, mc)?,
                Output::CoverageTotal => cov.expect("computed").total,
                Output::CoverageUav => cov.expect("computed").uav_tier,
                Output::CoverageTbs => cov.expect("computed").tbs_tier,
                Output::Ccdf => {
                    let (uav, tbs) = (coverage_uav(params)?.0, coverage_tbs(params)?);
                    let d = ConditionalCoverageDistribution::from_tiers(uav, tbs, params);
                    empirical_ccdf(&[theta.expect("validated")], |rs| d.value_at(rs), params, mc)?[0]
                }
            })
        })
        .collect()
}

/// Evaluates the requested outputs at every swept value. Rows come back in
/// input order.
pub fn run_sweep(spec: &SweepSpec, base: &SystemParams, mc: &McConfig) -> Result<SweepResult> {
    spec.validate()?;
    if spec.mc_check {
        mc.validate()?;
    }
    let rows = spec
        .values
        .par_iter()
        .map(|&value| {
            let params = base.with_override(&spec.parameter_path, value)?;
            let analytic = evaluate(&spec.outputs, spec.ccdf_theta, &params)?;
            let mc = if spec.mc_check {
                Some(evaluate_mc(&spec.outputs, spec.ccdf_theta, &params, mc)?)
            } else {
                None
            };
            Ok(SweepRow {
                swept_value: value,
                analytic,
                mc,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        parameter_path: spec.parameter_path.clone(),
        outputs: spec.outputs.clone(),
        rows,
    })
}

/// One curve of a figure: a key held at a value for the whole curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub key: &'static str,
    pub value: f64,
    pub label: String,
}

/// Charging-station densities (km⁻²) for the coverage-vs-density figure.
pub fn figure2_densities() -> Vec<f64> {
    parse_values("1e-3:1e1:log:41").expect("static grid")
}

pub fn figure2_series() -> (Vec<Series>, Vec<Series>) {
    let charging = [5.0, 40.0]
        .into_iter()
        .map(|m| Series {
            key: "energy.charging_time_Tch",
            value: m,
            label: format!("coverage_total[T_ch={m}min]"),
        })
        .collect();
    let battery = [44.4, 88.8, 177.6]
        .into_iter()
        .map(|wh| Series {
            key: "energy.battery_capacity_Bmax",
            value: wh,
            label: format!("coverage_total[B_max={wh}Wh]"),
        })
        .collect();
    (charging, battery)
}

/// Total coverage against charging-station density, one column per series.
pub fn coverage_vs_density(
    base: &SystemParams,
    series: &[Series],
    densities: &[f64],
    mc: Option<&McConfig>,
) -> Result<CsvTable> {
    let mut header = vec!["network.station_density_lambda_c".to_string()];
    let mut columns = Vec::new();
    for s in series {
        let curve_base = base.with_override(s.key, s.value)?;
        let spec = SweepSpec {
            parameter_path: "network.station_density_lambda_c".into(),
            values: densities.to_vec(),
            outputs: vec![Output::CoverageTotal],
            mc_check: mc.is_some(),
            ccdf_theta: None,
        };
        let result = run_sweep(&spec, &curve_base, mc.unwrap_or(&McConfig::default()))?;
        header.push(s.label.clone());
        let mut col: Vec<Vec<f64>> = result.rows.iter().map(|r| vec![r.analytic[0]]).collect();
        if mc.is_some() {
            header.push(format!("{}_mc", s.label));
            header.push(format!("{}_ci", s.label));
            for (c, r) in col.iter_mut().zip(&result.rows) {
                let e = r.mc.as_ref().expect("mc requested")[0];
                c.push(e.mean);
                c.push(e.ci_half_width);
            }
        }
        columns.push(col);
    }
    let rows = densities
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut row = vec![d];
            for col in &columns {
                row.extend_from_slice(&col[i]);
            }
            row
        })
        .collect();
    Ok(CsvTable { header, rows })
}

pub fn figure3_thetas() -> Vec<f64> {
    parse_values("0:1:lin:201").expect("static grid")
}

/// CCDF of the conditional coverage on a θ grid, one column per series.
pub fn ccdf_curves(base: &SystemParams, series: &[Series], thetas: &[f64], mc: Option<&McConfig>) -> Result<CsvTable> {
    let mut header = vec!["theta".to_string()];
    let mut columns = Vec::new();
    for s in series {
        let params = base.with_override(s.key, s.value)?;
        let d = ConditionalCoverageDistribution::new(&params)?;
        let label = s.label.replace("coverage_total", "ccdf");
        header.push(label.clone());
        let mut col: Vec<Vec<f64>> = thetas.iter().map(|&t| vec![d.ccdf(t)]).collect();
        if let Some(mc) = mc {
            header.push(format!("{label}_mc"));
            header.push(format!("{label}_ci"));
            let est = empirical_ccdf(thetas, |rs| d.value_at(rs), &params, mc)?;
            for (c, e) in col.iter_mut().zip(est) {
                c.push(e.mean);
                c.push(e.ci_half_width);
            }
        }
        columns.push(col);
    }
    let rows = thetas
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut row = vec![t];
            for col in &columns {
                row.extend_from_slice(&col[i]);
            }
            row
        })
        .collect();
    Ok(CsvTable { header, rows })
}
