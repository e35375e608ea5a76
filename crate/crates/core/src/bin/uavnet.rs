use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uavnet::availability::{availability, availability_cdf};
use uavnet::config::{schema_table, ConfigDocument, PAPER_TABLE_1};
use uavnet::coverage::{total_coverage, ConditionalCoverageDistribution};
use uavnet::energy::{energy_per_meter, optimal_velocity, propulsion_power};
use uavnet::montecarlo::{estimate_availability, estimate_coverage, McConfig};
use uavnet::sweep::{
    ccdf_curves, coverage_vs_density, figure2_densities, figure2_series, figure3_thetas, parse_values, run_sweep,
    CsvTable, Output, SweepSpec,
};
use uavnet::{Error, Result, SystemParams};

#[derive(Parser)]
#[command(
    name = "uavnet",
    version,
    about = "Availability and coverage of UAV-assisted cellular networks"
)]
struct Cli {
    /// Configuration file, or the built-in profile name `paper-table-1`.
    #[arg(long, global = true, default_value = PAPER_TABLE_1)]
    config: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct McArgs {
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            trials: self.trials,
            seed: self.seed,
            confidence_level: self.confidence,
            ..McConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Energy-optimal cruise velocity and the propulsion power breakdown.
    Vopt {
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean availability, optionally with its CDF at given levels.
    Avail {
        /// Availability levels, as a list or `lo:hi:lin|log:N`.
        #[arg(long)]
        quantiles: Option<String>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tier, availability and total coverage.
    Coverage {
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CCDF of the coverage conditioned on the station distance, as CSV.
    Ccdf {
        #[arg(long, default_value = "0:1:lin:101")]
        thetas: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimates with confidence intervals.
    Montecarlo {
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one configuration key and write a CSV table.
    Sweep {
        /// Dotted configuration key, e.g. network.station_density_lambda_c.
        #[arg(long)]
        param: String,
        /// Values in the key's external unit: `lo:hi:log:N`, `lo:hi:lin:N` or a comma list.
        #[arg(long)]
        values: String,
        /// Comma list of availability, coverage_total, coverage_uav, coverage_tbs, ccdf.
        #[arg(long, default_value = "coverage_total")]
        outputs: String,
        /// Coverage level for the `ccdf` output.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        mc_check: bool,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coverage against charging-station density for several charging times and battery sizes.
    #[command(name = "reproduce-fig2")]
    ReproduceFig2 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        mc_check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Conditional-coverage CCDF for several charging times and battery sizes.
    #[command(name = "reproduce-fig3")]
    ReproduceFig3 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        mc_check: bool,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Print every configuration key with its unit and default.
    Schema,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn vopt(params: &SystemParams, csv: bool) -> Result<String> {
    let rotor = &params.energy.rotor;
    let v = optimal_velocity(rotor);
    let p = propulsion_power(v, rotor)?;
    let per_m = energy_per_meter(v, rotor)?;
    if csv {
        return Ok(format!(
            "v_opt,total_power,blade_profile,induced,parasite,energy_per_meter\n{v},{},{},{},{},{per_m}\n",
            p.total, p.blade_profile, p.induced, p.parasite
        ));
    }
    let mut s = String::new();
    let _ = writeln!(s, "V_opt               {v:>12.4} m/s");
    let _ = writeln!(s, "P_m(V_opt)          {:>12.4} W", p.total);
    let _ = writeln!(s, "  blade profile     {:>12.4} W", p.blade_profile);
    let _ = writeln!(s, "  induced           {:>12.4} W", p.induced);
    let _ = writeln!(s, "  parasite          {:>12.4} W", p.parasite);
    let _ = writeln!(s, "energy per metre    {per_m:>12.4} J/m");
    Ok(s)
}

fn avail(params: &SystemParams, quantiles: Option<&str>, csv: bool) -> Result<String> {
    let pa = availability(params)?;
    let levels = match quantiles {
        Some(q) => parse_values(q)?,
        None if csv => parse_values("0:1:lin:21")?,
        None => Vec::new(),
    };
    let table = CsvTable {
        header: vec!["x".into(), "cdf".into()],
        rows: levels.iter().map(|&x| vec![x, availability_cdf(x, params)]).collect(),
    };
    if csv {
        return Ok(table.to_csv());
    }
    let mut s = String::new();
    let _ = writeln!(s, "availability P_a           {pa:.8}");
    let _ = writeln!(s, "max availability (R_s=0)   {:.8}", params.max_availability());
    let _ = writeln!(s, "max travel radius          {:.3} m", params.max_travel_radius());
    if !levels.is_empty() {
        s.push('\n');
        s.push_str(&table.to_text());
    }
    Ok(s)
}

fn coverage(params: &SystemParams, csv: bool) -> Result<String> {
    let b = total_coverage(params)?;
    let rows = [
        ("p_cov_uav", b.p_cov_uav),
        ("p_cov_uav_los_part", b.p_cov_uav_los_part),
        ("p_cov_uav_nlos_part", b.p_cov_uav_nlos_part),
        ("p_cov_tbs", b.p_cov_tbs),
        ("availability", b.availability),
        ("p_cov_total", b.p_cov_total),
    ];
    let mut s = String::new();
    if csv {
        s.push_str("quantity,value\n");
        for (k, v) in rows {
            let _ = writeln!(s, "{k},{v}");
        }
    } else {
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<22}{v:.8}");
        }
    }
    Ok(s)
}

fn ccdf(params: &SystemParams, thetas: &str) -> Result<String> {
    let d = ConditionalCoverageDistribution::new(params)?;
    let thetas = parse_values(thetas)?;
    let table = CsvTable {
        header: vec!["theta".into(), "ccdf".into()],
        rows: thetas.iter().map(|&t| vec![t, d.ccdf(t)]).collect(),
    };
    Ok(table.to_csv())
}

fn montecarlo(params: &SystemParams, mc: &McConfig, csv: bool) -> Result<String> {
    let a = estimate_availability(params, mc)?;
    let c = estimate_coverage(params, mc)?;
    let b = total_coverage(params)?;
    let rows = [
        ("availability", b.availability, a),
        ("coverage_total", b.p_cov_total, c.total),
        ("coverage_uav", b.p_cov_uav, c.uav_tier),
        ("coverage_tbs", b.p_cov_tbs, c.tbs_tier),
    ];
    let mut s = String::new();
    if csv {
        s.push_str("quantity,analytic,mc,ci,trials,seed\n");
        for (k, analytic, e) in rows {
            let _ = writeln!(
                s,
                "{k},{analytic},{},{},{},{}",
                e.mean, e.ci_half_width, e.trials, e.seed
            );
        }
    } else {
        let _ = writeln!(
            s,
            "trials {}  seed {}  confidence {}",
            mc.trials, mc.seed, mc.confidence_level
        );
        let _ = writeln!(s, "{:<16}{:>14}{:>14}{:>14}", "quantity", "analytic", "mc", "ci");
        for (k, analytic, e) in rows {
            let _ = writeln!(s, "{k:<16}{analytic:>14.6}{:>14.6}{:>14.6}", e.mean, e.ci_half_width);
        }
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<()> {
    let params = ConfigDocument::load(&cli.config)?.normalize()?;
    match cli.command {
        Command::Vopt { csv, out } => emit(&vopt(&params, csv)?, out.as_deref()),
        Command::Avail { quantiles, csv, out } => emit(&avail(&params, quantiles.as_deref(), csv)?, out.as_deref()),
        Command::Coverage { csv, out } => emit(&coverage(&params, csv)?, out.as_deref()),
        Command::Ccdf { thetas, out } => emit(&ccdf(&params, &thetas)?, out.as_deref()),
        Command::Montecarlo { mc, csv, out } => emit(&montecarlo(&params, &mc.config(), csv)?, out.as_deref()),
        Command::Sweep {
            param,
            values,
            outputs,
            theta,
            mc_check,
            mc,
            out,
        } => {
            let spec = SweepSpec {
                parameter_path: param,
                values: parse_values(&values)?,
                outputs: outputs
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<Vec<Output>>>()?,
                mc_check,
                ccdf_theta: theta,
            };
            let result = run_sweep(&spec, &params, &mc.config())?;
            emit(&result.to_table().to_csv(), out.as_deref())
        }
        Command::ReproduceFig2 { out_dir, mc_check, mc } => {
            let mc = mc.config();
            let mc = mc_check.then_some(&mc);
            let (charging, battery) = figure2_series();
            let densities = figure2_densities();
            std::fs::create_dir_all(&out_dir)?;
            let a = coverage_vs_density(&params, &charging, &densities, mc)?;
            std::fs::write(out_dir.join("fig2a.csv"), a.to_csv())?;
            let b = coverage_vs_density(&params, &battery, &densities, mc)?;
            std::fs::write(out_dir.join("fig2b.csv"), b.to_csv())?;
            println!(
                "wrote {} and {}",
                out_dir.join("fig2a.csv").display(),
                out_dir.join("fig2b.csv").display()
            );
            Ok(())
        }
        Command::ReproduceFig3 { out_dir, mc_check, mc } => {
            let mc = mc.config();
            let mc = mc_check.then_some(&mc);
            let (charging, battery) = figure2_series();
            let thetas = figure3_thetas();
            std::fs::create_dir_all(&out_dir)?;
            let a = ccdf_curves(&params, &charging, &thetas, mc)?;
            std::fs::write(out_dir.join("fig3a.csv"), a.to_csv())?;
            let b = ccdf_curves(&params, &battery, &thetas, mc)?;
            std::fs::write(out_dir.join("fig3b.csv"), b.to_csv())?;
            println!(
                "wrote {} and {}",
                out_dir.join("fig3a.csv").display(),
                out_dir.join("fig3b.csv").display()
            );
            Ok(())
        }
        Command::Schema => {
            print!("{}", schema_table());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uavnet: {e}");
            ExitCode::from(1)
        }
    }
}
