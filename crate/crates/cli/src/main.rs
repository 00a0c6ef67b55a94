//! `fcl-dvr`: simulate scenarios, size components, analyse traces and
//! compare topologies.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numeric abort.

use std::f64::consts::{PI, SQRT_2};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcl_dvr_core::analysis::{
    harmonic_spectrum, rms, scenario_metrics, sliding_rms, topology_comparison, MetricsConfig, DEFAULT_HARMONIC_CAP,
};
use fcl_dvr_core::design::{
    check_dc_link, dc_link_limit, design_report, rated_load_current, series_transformer_ratio,
    size_magnetizing_inductance, switch_stress, transformer_capacity, turns_ratio_for_sag, DesignInputs,
    FaultLimitSpec, RatioForm,
};
use fcl_dvr_core::io::{
    design_report_doc, log_table, metrics_section, parse_topology_params, read_scenario_file, read_trace_file,
    topology_report, write_trace_file, Report, Section,
};
use fcl_dvr_core::scenario::presets;
use fcl_dvr_core::scenario::units::{parse_quantity, Dimension};
use fcl_dvr_core::sim::{Channel, EventLog, OperatingMode};
use fcl_dvr_core::{run_scenario, Error, Result};

#[derive(Parser)]
#[command(name = "fcl-dvr", version, about = "Fault current limiter and dynamic voltage restorer toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the waveform trace.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write a metrics and event report.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Component sizing.
    Design {
        #[command(subcommand)]
        what: Design,
        /// Write the report here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Measurements on a stored trace.
    Analyze {
        #[command(subcommand)]
        what: Analyze,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Loss comparison of the reference topologies.
    CompareTopologies {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// Quantities are given with units, e.g. `220V`, `0.5 mH`, `10us`.
fn quantity(text: &str, dim: Dimension) -> std::result::Result<f64, String> {
    parse_quantity(text, dim).map_err(|e| e.to_string())
}

macro_rules! quantity_parser {
    ($name:ident, $dim:expr) => {
        fn $name(text: &str) -> std::result::Result<f64, String> {
            quantity(text, $dim)
        }
    };
}

quantity_parser!(volts, Dimension::Voltage);
quantity_parser!(amps, Dimension::Current);
quantity_parser!(hertz, Dimension::Frequency);
quantity_parser!(henry, Dimension::Inductance);
quantity_parser!(volt_amps, Dimension::ApparentPower);
quantity_parser!(seconds, Dimension::Time);
quantity_parser!(ratio, Dimension::Dimensionless);

#[derive(Args)]
struct RatedCurrent {
    /// Rated load current.
    #[arg(long, value_parser = amps, required_unless_present = "load_va", conflicts_with = "load_va")]
    rated_current: Option<f64>,
    /// Rated load apparent power; the current follows as S / V.
    #[arg(long, value_parser = volt_amps)]
    load_va: Option<f64>,
}

impl RatedCurrent {
    fn resolve(&self, v_source: f64) -> Result<f64> {
        match (self.rated_current, self.load_va) {
            (Some(i), _) => Ok(i),
            (None, Some(s)) => rated_load_current(s, v_source),
            (None, None) => unreachable!("clap requires one of the two"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StressMode {
    Fault,
    Compensation,
}

#[derive(Subcommand)]
enum Design {
    /// Largest magnetizing inductance that still limits the fault current
    /// to lambda_i times rated.
    Lm {
        #[arg(long, value_parser = volts)]
        v_source: f64,
        #[arg(long, value_parser = hertz, default_value = "50Hz")]
        frequency: f64,
        #[arg(long, value_parser = ratio)]
        lambda_i: f64,
        #[command(flatten)]
        rated: RatedCurrent,
    },
    /// Injection transformer ratio for a given sag fraction.
    Turns {
        #[arg(long, value_parser = ratio)]
        lambda_v: f64,
        #[arg(long, value_parser = volts)]
        v_line: f64,
        /// Inverter AC output voltage (RMS).
        #[arg(long, value_parser = volts)]
        v_ac_inv: f64,
    },
    /// Series-transformer ratio k from the limiting requirement.
    SeriesRatio {
        #[arg(long, value_parser = volts)]
        v_source: f64,
        #[arg(long, value_parser = hertz, default_value = "50Hz")]
        frequency: f64,
        #[arg(long, value_parser = ratio)]
        lambda_i: f64,
        #[command(flatten)]
        rated: RatedCurrent,
        /// Secondary-referred magnetizing inductance.
        #[arg(long, value_parser = henry)]
        l_secondary: f64,
        /// Evaluate the ratio without the square root.
        #[arg(long)]
        literal: bool,
    },
    /// Series transformer rating.
    Capacity {
        #[arg(long, value_parser = volts)]
        v_source: f64,
        #[arg(long, value_parser = ratio)]
        lambda_i: f64,
        #[command(flatten)]
        rated: RatedCurrent,
    },
    /// DC-link bound for a switch blocking voltage, optionally checking a
    /// proposed link voltage.
    DcLink {
        #[arg(long, value_parser = volts)]
        v_ces: f64,
        #[arg(long, value_parser = volts)]
        v_dc: Option<f64>,
    },
    /// Peak blocking voltage on the switch pair.
    Stress {
        #[arg(long, value_enum)]
        mode: StressMode,
        /// Line voltage variation after the fault, as a fraction.
        #[arg(long, value_parser = ratio, default_value = "0.28")]
        alpha: f64,
        /// Source voltage (RMS).
        #[arg(long, value_parser = volts)]
        v_source: f64,
        #[arg(long, value_parser = ratio)]
        turns_ratio: f64,
        #[arg(long, value_parser = volts)]
        v_dc: f64,
    },
    /// Full sizing pass.
    Report {
        #[arg(long, value_parser = volts)]
        v_source: f64,
        #[arg(long, value_parser = hertz, default_value = "50Hz")]
        frequency: f64,
        #[arg(long, value_parser = ratio)]
        lambda_i: f64,
        #[arg(long, value_parser = volt_amps)]
        load_va: f64,
        #[arg(long, value_parser = ratio)]
        lambda_v: f64,
        #[arg(long, value_parser = volts)]
        v_ac_inv: f64,
        #[arg(long, value_parser = henry)]
        l_secondary: f64,
        #[arg(long, value_parser = volts)]
        v_ces: f64,
        #[arg(long, value_parser = volts)]
        v_dc: f64,
        #[arg(long, value_parser = ratio, default_value = "0.28")]
        alpha: f64,
    },
}

#[derive(Args)]
struct TraceSelection {
    #[arg(long)]
    trace: PathBuf,
    /// Column to analyse: v_source, v_pcc, v_load, i_line or u_comp.
    #[arg(long, default_value = "v_pcc", value_parser = parse_channel)]
    channel: Channel,
    #[arg(long, value_parser = hertz, default_value = "50Hz")]
    fundamental: f64,
    /// Window start; defaults to the last full window of the trace.
    #[arg(long, value_parser = seconds)]
    start: Option<f64>,
    /// Window length; defaults to one fundamental period.
    #[arg(long, value_parser = seconds)]
    window: Option<f64>,
}

fn parse_channel(name: &str) -> std::result::Result<Channel, String> {
    Channel::from_name(name).ok_or_else(|| format!("unknown channel `{name}`"))
}

#[derive(Subcommand)]
enum Analyze {
    /// Total harmonic distortion over a whole number of periods.
    Thd {
        #[command(flatten)]
        sel: TraceSelection,
        #[arg(long, default_value_t = DEFAULT_HARMONIC_CAP)]
        harmonics: usize,
    },
    /// RMS over the window, with the extremes of the sliding one-period RMS
    /// across the whole trace.
    Rms {
        #[command(flatten)]
        sel: TraceSelection,
    },
    /// Sag depth, compensation error, limiting ratio and efficiency.
    Metrics {
        #[arg(long)]
        trace: PathBuf,
        /// Scenario that produced the trace; needed for the event log.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

// A reader that stops early (`| head`) is not an error.
fn to_stdout(bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => report.write_file(path),
        None => {
            let mut buf = Vec::new();
            report.write(&mut buf)?;
            to_stdout(&buf)
        }
    }
}

fn simulate(scenario: &Path, out: &Path, report: Option<&Path>) -> Result<()> {
    let sc = read_scenario_file(scenario)?;
    let res = run_scenario(&sc)?;
    write_trace_file(&res.trace, out)?;
    let cfg = MetricsConfig::for_scenario(&sc)?;
    let metrics = scenario_metrics(&res.trace, Some(&res.log), &cfg)?;
    let doc = Report::new("simulation")
        .section(
            Section::new("run")
                .entry("rows", res.trace.len() as f64, "")
                .entry("horizon", sc.horizon, "s")
                .entry("dt", sc.dt, "s")
                .entry("rated_peak_current", res.rated.peak_current, "A"),
        )
        .section(metrics_section(&metrics))
        .section(Section::new("events").with_table(log_table(&res.log)));
    match report {
        Some(path) => doc.write_file(path),
        None => to_stdout(doc.to_text().as_bytes()),
    }
}

fn design(what: &Design) -> Result<Report> {
    let omega = |f: f64| 2.0 * PI * f;
    let section = match *what {
        Design::Lm { v_source, frequency, lambda_i, ref rated } => {
            let i = rated.resolve(v_source)?;
            Section::new("lm")
                .entry("rated_current", i, "A")
                .entry("l_m_max", size_magnetizing_inductance(v_source, omega(frequency), lambda_i, i)?, "H")
        }
        Design::Turns { lambda_v, v_line, v_ac_inv } => {
            Section::new("turns").entry("turns_ratio", turns_ratio_for_sag(lambda_v, v_line, v_ac_inv)?, "")
        }
        Design::SeriesRatio { v_source, frequency, lambda_i, ref rated, l_secondary, literal } => {
            let i = rated.resolve(v_source)?;
            let form = if literal { RatioForm::Literal } else { RatioForm::SquareRoot };
            let k = series_transformer_ratio(v_source, lambda_i, i, omega(frequency), l_secondary, form)?;
            Section::new("series_ratio").entry("rated_current", i, "A").entry("series_ratio_k", k, "")
        }
        Design::Capacity { v_source, lambda_i, ref rated } => {
            let i = rated.resolve(v_source)?;
            Section::new("capacity")
                .entry("rated_current", i, "A")
                .entry("transformer_va", transformer_capacity(lambda_i, i, v_source)?, "VA")
        }
        Design::DcLink { v_ces, v_dc } => {
            if let Some(v) = v_dc {
                check_dc_link(v, v_ces)?;
            }
            Section::new("dc_link").entry("dc_link_max", dc_link_limit(v_ces), "V")
        }
        Design::Stress { mode, alpha, v_source, turns_ratio, v_dc } => {
            let mode = match mode {
                StressMode::Fault => OperatingMode::FaultLimiting,
                StressMode::Compensation => OperatingMode::Compensation,
            };
            let s = switch_stress(mode, alpha, v_source * SQRT_2, turns_ratio, v_dc)?;
            Section::new("stress")
                .entry("stress_pos", s.positive_half, "V")
                .entry("stress_neg", s.negative_half, "V")
        }
        Design::Report {
            v_source,
            frequency,
            lambda_i,
            load_va,
            lambda_v,
            v_ac_inv,
            l_secondary,
            v_ces,
            v_dc,
            alpha,
        } => {
            let inputs = DesignInputs {
                v_source_rms: v_source,
                frequency,
                limit: FaultLimitSpec {
                    fault_multiple_lambda_i: lambda_i,
                    load_va,
                    sag_ratio_lambda_v: lambda_v,
                },
                v_ac_inv,
                l_secondary,
                v_ces,
                v_dc,
                alpha,
            };
            return Ok(design_report_doc(&design_report(&inputs)?));
        }
    };
    Ok(Report::new("design").section(section))
}

fn select(sel: &TraceSelection) -> Result<(Vec<f64>, f64, f64, f64)> {
    let trace = read_trace_file(&sel.trace)?;
    let window = sel.window.unwrap_or(1.0 / sel.fundamental);
    let end = trace.time.last().copied().unwrap_or(0.0) + trace.sample_period;
    let start = sel.start.unwrap_or(end - window).max(0.0);
    let samples = trace.window(sel.channel, start, window)?.to_vec();
    Ok((samples, trace.sample_period, start, window))
}

fn analyze(what: &Analyze) -> Result<Report> {
    let section = match what {
        Analyze::Thd { sel, harmonics } => {
            let (samples, dt, start, window) = select(sel)?;
            let spec = harmonic_spectrum(&samples, dt, sel.fundamental, *harmonics)?;
            Section::new("thd")
                .entry("start", start, "s")
                .entry("window", window, "s")
                .entry("fundamental_rms", spec.harmonic_rms[0], sel.channel.column().rsplit('_').next().unwrap_or(""))
                .entry("thd", spec.thd()?, "")
        }
        Analyze::Rms { sel } => {
            let unit = sel.channel.column().rsplit('_').next().unwrap_or("");
            let (samples, _, start, window) = select(sel)?;
            let trace = read_trace_file(&sel.trace)?;
            let period = (1.0 / (sel.fundamental * trace.sample_period)).round() as usize;
            let sliding = sliding_rms(trace.channel(sel.channel), period)?;
            let (lo, hi) = sliding.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            Section::new("rms")
                .entry("start", start, "s")
                .entry("window", window, "s")
                .entry("rms", rms(&samples)?, unit)
                .entry("sliding_rms_min", lo, unit)
                .entry("sliding_rms_max", hi, unit)
        }
        Analyze::Metrics { trace, scenario } => {
            let trace = read_trace_file(trace)?;
            let Some(path) = scenario else {
                return Err(Error::MissingEventLog);
            };
            let sc = read_scenario_file(path)?;
            let log = EventLog::reconstruct(&trace, &sc.events);
            let cfg = MetricsConfig::for_scenario(&sc)?;
            let m = scenario_metrics(&trace, Some(&log), &cfg)?;
            return Ok(Report::new("metrics")
                .section(metrics_section(&m))
                .section(Section::new("events").with_table(log_table(&log))));
        }
    };
    Ok(Report::new("analysis").section(section))
}

fn compare(params: &Path) -> Result<Report> {
    let inputs = parse_topology_params(&std::fs::read_to_string(params)?)?;
    let rows = topology_comparison(&inputs.operating_point, &inputs.params)?;
    Ok(topology_report(&rows, &inputs.operating_point))
}

fn run(cli: Cli) -> Result<()> {
    presets::self_test()?;
    match cli.command {
        Command::Simulate { scenario, out, report } => simulate(&scenario, &out, report.as_deref()),
        Command::Design { what, out } => emit(&design(&what)?, out.as_deref()),
        Command::Analyze { what, out } => emit(&analyze(&what)?, out.as_deref()),
        Command::CompareTopologies { params, out } => emit(&compare(&params)?, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_numeric_abort() {
                3
            } else if e.is_validation() {
                2
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}
