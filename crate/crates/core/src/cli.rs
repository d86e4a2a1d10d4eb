//! The `offt` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
//! 3 verification failure. `OFFT_OUTPUT_DIR` overrides the configured
//! output directory; `--output` overrides both.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{OutputFormat, RunConfig};
use crate::error::{domain, OfftError, Result};
use crate::network::{
    frequency_response, sample_outputs, time_simulate, DelayedInterferometer, DiPort,
    NetworkParams, OfftNetwork,
};
use crate::oracle::{dft, match_ports};
use crate::output::{self, ExtinctionReport, JsonComplex, ScalingSummary, ToleranceSummary};
use crate::photonic::WaveguideContext;
use crate::scaling::{channel_capacity, crossover_n};
use crate::sensitivity::{
    analytic_extinction_ratio, crosstalk_tolerance, di_extinction_ratio, er_vs_loss_curve,
    run_sweep, Arm, SweepKind, SweepParameter, SweepSpec,
};
use crate::thermal::{phase_to_temperature, temperature_to_phase, HeaterSection};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Environment variable that overrides the output directory.
pub const OUTPUT_DIR_ENV: &str = "OFFT_OUTPUT_DIR";

/// Largest residual `verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(
    name = "offt",
    version,
    about = "Simulate an integrated all-optical FFT"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-port transmission versus frequency.
    Response(ResponseArgs),
    /// Run the named sweeps of a config (all of them by default).
    Sweep(SweepArgs),
    /// Convert between heater phase and temperature change.
    Thermal(ThermalArgs),
    /// Loss, power, area and figure of merit versus N, against a GPU.
    Scaling(ScalingArgs),
    /// Check the simulator against the reference DFT on random windows.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub common: Common,
    /// DFT bins to emit, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ports: Option<Vec<usize>>,
    /// Lowest frequency, Hz
    #[arg(long)]
    pub f_lo: Option<f64>,
    /// Highest frequency, Hz; one comb period above zero by default
    #[arg(long)]
    pub f_hi: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Name of the sweep to run.
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["dphi", "dt"])))]
pub struct ThermalArgs {
    /// Phase shift, rad.
    #[arg(long, allow_negative_numbers = true)]
    pub dphi: Option<f64>,
    /// Temperature change, K.
    #[arg(long = "dT", id = "dt", allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Heater length, m.
    #[arg(long, default_value_t = 500e-6)]
    pub length: f64,
    /// Wavelength, m.
    #[arg(long, default_value_t = 1550e-9)]
    pub lambda: f64,
    /// Thermo-optic coefficient, 1/K.
    #[arg(long, default_value_t = 1.9e-4)]
    pub dndt: f64,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest N in the table (a power of two).
    #[arg(long, default_value_t = 1024)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON run configuration; the ideal 10 GHz design when absent.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Transform size, overriding the config.
    #[arg(long)]
    pub n: Option<usize>,
    /// Random windows to test
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub trials: u32,
    /// Seed of the window generator
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Response(a) => cmd_response(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Thermal(a) => cmd_thermal(a, out),
        Command::Scaling(a) => cmd_scaling(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error.
pub fn exit_code(e: &OfftError) -> i32 {
    match e {
        OfftError::Io(_) => EXIT_IO,
        OfftError::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        OfftError::Json(j) if j.is_io() => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

struct Resolved {
    config: RunConfig,
    dir: PathBuf,
    format: OutputFormat,
}

fn resolve(common: &Common) -> Result<Resolved> {
    let config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let dir = common
        .output
        .clone()
        .or_else(|| {
            std::env::var_os(OUTPUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        })
        .unwrap_or_else(|| config.output.directory.clone());
    let format = common.format.unwrap_or(config.output.format);
    Ok(Resolved {
        config,
        dir,
        format,
    })
}

fn report_paths(out: &mut dyn Write, paths: &[PathBuf]) -> Result<()> {
    for p in paths {
        writeln!(out, "wrote {}", p.display())?;
    }
    Ok(())
}

fn cmd_response(a: &ResponseArgs, out: &mut dyn Write) -> Result<i32> {
    let r = resolve(&a.common)?;
    let net = OfftNetwork::build(&r.config.network)?;
    let n = net.n_points();
    let settings = &r.config.response;
    let f_lo = a.f_lo.unwrap_or(settings.f_lo_hz);
    let f_hi = a
        .f_hi
        .or(settings.f_hi_hz)
        .unwrap_or(n as f64 * net.system_frequency());
    let points = a.points.unwrap_or(settings.points);
    if points == 0 {
        return Err(domain("--points must be >= 1"));
    }
    if !(f_lo.is_finite() && f_hi.is_finite() && f_hi >= f_lo) {
        return Err(domain(format!("invalid frequency range [{f_lo}, {f_hi}]")));
    }
    let bins = a
        .ports
        .clone()
        .or_else(|| settings.ports.clone())
        .unwrap_or_else(|| (0..n).collect());
    if let Some(&bad) = bins.iter().find(|&&b| b >= n) {
        return Err(domain(format!(
            "port {bad} out of range; valid ports are 0..={}",
            n - 1
        )));
    }
    let freqs: Vec<f64> = if points == 1 {
        vec![f_lo]
    } else {
        let step = (f_hi - f_lo) / (points - 1) as f64;
        (0..points).map(|i| f_lo + i as f64 * step).collect()
    };
    let resp = frequency_response(&net, &freqs)?;
    let path = output::write_response(&r.dir, r.format, &resp, &bins, net.port_map())?;
    report_paths(out, &[path])?;
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let r = resolve(&a.common)?;
    let specs: Vec<&SweepSpec> = match &a.spec {
        Some(name) => vec![r.config.sweep(name)?],
        None if r.config.sweeps.is_empty() => return Err(domain("the config defines no sweeps")),
        None => r.config.sweeps.iter().collect(),
    };
    let net = OfftNetwork::build(&r.config.network)?;
    for spec in specs {
        let paths = match spec.kind {
            SweepKind::Transmission => {
                let result = run_sweep(&net, spec)?;
                let tolerance = if spec.parameter == SweepParameter::Phase {
                    tolerance_summary(
                        &r.config,
                        &net,
                        spec,
                        result.probe_frequencies[spec.target_port],
                    )
                } else {
                    None
                };
                output::write_sweep(&r.dir, r.format, &result, tolerance.as_ref())?
            }
            SweepKind::Extinction => {
                let report = extinction_report(&net, spec)?;
                vec![output::write_extinction(&r.dir, r.format, &report)?]
            }
        };
        report_paths(out, &paths)?;
    }
    Ok(EXIT_OK)
}

/// Heater tolerance for a phase sweep; `None` when the network already
/// leaks beyond the threshold.
fn tolerance_summary(
    cfg: &RunConfig,
    net: &OfftNetwork,
    spec: &SweepSpec,
    probe: f64,
) -> Option<ToleranceSummary> {
    let threshold = cfg.crosstalk.threshold_db;
    let rad = crosstalk_tolerance(
        net,
        &spec.target,
        threshold,
        spec.target_port,
        probe,
        cfg.crosstalk.metric,
    )
    .ok()?;
    let kelvin = phase_to_temperature(rad, &cfg.thermal).ok()?;
    Some(ToleranceSummary {
        threshold_db: threshold,
        target_port: spec.target_port,
        probe_hz: probe,
        tolerance_rad: rad,
        tolerance_k: kelvin,
    })
}

fn extinction_report(net: &OfftNetwork, spec: &SweepSpec) -> Result<ExtinctionReport> {
    let losses = spec.parameter_values()?;
    let curve = er_vs_loss_curve(net, &losses, spec.target.arm)?;
    let first = net.cell(1, 0)?;
    let mut single_cell = Vec::with_capacity(losses.len());
    let mut analytic = Vec::with_capacity(losses.len());
    for &gamma in &losses {
        let mut di = DelayedInterferometer::ideal(first.arm_delay_long, 0.0);
        match spec.target.arm {
            Arm::Long => di.arm_loss_long_db = gamma,
            Arm::Short => di.arm_loss_short_db = gamma,
        }
        single_cell.push(di_extinction_ratio(&di, DiPort::Cross)?);
        analytic.push(analytic_extinction_ratio(gamma)?);
    }
    Ok(ExtinctionReport {
        name: spec.name.clone(),
        curve,
        single_cell,
        analytic,
    })
}

fn cmd_thermal(a: &ThermalArgs, out: &mut dyn Write) -> Result<i32> {
    let ctx = WaveguideContext::new(WaveguideContext::default().n_eff, a.lambda, a.dndt)?;
    let heater = HeaterSection::new(a.length, ctx)?;
    let (dphi, dt) = match (a.dphi, a.dt) {
        (Some(p), None) => (p, phase_to_temperature(p, &heater)?),
        (None, Some(t)) => (temperature_to_phase(t, &heater)?, t),
        _ => return Err(domain("give exactly one of --dphi and --dT")),
    };
    writeln!(out, "length_m      {}", a.length)?;
    writeln!(out, "wavelength_m  {}", a.lambda)?;
    writeln!(out, "dn_dt_per_k   {}", a.dndt)?;
    writeln!(out, "rad_per_k     {}", heater.phase_per_kelvin())?;
    writeln!(out, "dphi_rad      {dphi}")?;
    writeln!(out, "dT_k          {dt}")?;
    Ok(EXIT_OK)
}

fn cmd_scaling(a: &ScalingArgs, out: &mut dyn Write) -> Result<i32> {
    let r = resolve(&a.common)?;
    let model = &r.config.scaling;
    let rows = model.table(a.n_max)?;
    let crossover = crossover_n(model)?;
    let in_table = rows
        .iter()
        .find(|row| row.ratio <= 1.0)
        .map(|row| row.n_points);
    let channels = r.config.network.n_points;
    let summary = ScalingSummary {
        crossover,
        n_max: a.n_max,
        crossover_in_table: in_table,
        capacity_single_bps: channel_capacity(8, model.system_frequency_hz, 1)?,
        capacity_all_bps: channel_capacity(8, model.system_frequency_hz, channels)?,
    };
    let paths = output::write_scaling(&r.dir, r.format, &rows, &summary)?;
    report_paths(out, &paths)?;
    match in_table {
        Some(n) => writeln!(out, "crossover at N = {n}")?,
        None => writeln!(out, "no crossover observed up to N = {}", a.n_max)?,
    }
    if let Some(c) = summary.crossover.continuous {
        writeln!(out, "continuous crossover N = {c}")?;
    }
    writeln!(out, "ratio at N = 4: {}", summary.crossover.ratio_n4)?;
    writeln!(
        out,
        "QAM-256 capacity: {} Gbps per channel, {} Gbps for N = {channels}",
        summary.capacity_single_bps / 1e9,
        summary.capacity_all_bps / 1e9
    )?;
    Ok(EXIT_OK)
}

/// Result of one DFT-equivalence run.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub n_points: usize,
    pub trials: u32,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// Newest-first window with the largest residual.
    pub worst_window: Vec<Complex64>,
    /// `permutation[physical port]` found on the worst window.
    pub permutation: Vec<usize>,
}

/// Drives `trials` seeded random windows through the network and compares
/// the sampled outputs, in physical port order, with the reference DFT.
pub fn verify_network(net: &OfftNetwork, trials: u32, seed: u64) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(domain("need at least one trial"));
    }
    let n = net.n_points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: Option<(f64, Vec<Complex64>, Vec<usize>)> = None;
    let mut total = 0.0;
    for _ in 0..trials {
        let window: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let input: Vec<Complex64> = window.iter().rev().copied().collect();
        let trace = time_simulate(net, &input)?;
        let frame = sample_outputs(&trace, 0)?.remove(0);
        let m = match_ports(&net.to_physical_order(&frame), &dft(&window))?;
        total += m.residual;
        if worst.as_ref().is_none_or(|w| m.residual > w.0) {
            worst = Some((m.residual, window, m.permutation));
        }
    }
    let (max_residual, worst_window, permutation) = worst.expect("trials >= 1");
    Ok(VerifyReport {
        n_points: n,
        trials,
        max_residual,
        mean_residual: total / trials as f64,
        worst_window,
        permutation,
    })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let mut params = match &a.config {
        Some(path) => RunConfig::load(path)?.network,
        None => NetworkParams::ideal(4, 10e9),
    };
    if let Some(n) = a.n {
        params.n_points = n;
    }
    let net = OfftNetwork::build(&params)?;
    let rep = verify_network(&net, a.trials, a.seed)?;
    writeln!(out, "n_points      {}", rep.n_points)?;
    writeln!(out, "trials        {}", rep.trials)?;
    writeln!(out, "seed          {}", a.seed)?;
    writeln!(out, "max_residual  {:e}", rep.max_residual)?;
    writeln!(out, "mean_residual {:e}", rep.mean_residual)?;
    writeln!(out, "port_map      {:?}", net.port_map())?;
    if rep.max_residual < VERIFY_TOLERANCE {
        writeln!(out, "PASS")?;
        return Ok(EXIT_OK);
    }
    writeln!(
        out,
        "FAIL: residual {:e} >= {:e}",
        rep.max_residual, VERIFY_TOLERANCE
    )?;
    let window: Vec<JsonComplex> = rep.worst_window.iter().map(|&c| c.into()).collect();
    writeln!(
        err,
        "worst window (newest first): {}",
        serde_json::to_string(&window)?
    )?;
    Ok(EXIT_VERIFY)
}
