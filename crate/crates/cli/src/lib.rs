//! The `aqt` command line: argument parsing and dispatch to `aqt-core`.

pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use aqt_core::adiabatic_frame::analytic_fidelity_x;
use aqt_core::hamiltonian::build_block;
use aqt_core::model::{mixing_angle, total_time};
use aqt_core::propagator::{evolve_final, Space};
use aqt_core::scan::{find_resonances, run_scan, ResonanceOptions, ResonanceReport, ScanSettings};
use aqt_core::spectral::{eig_heisenberg, eig_numeric, eig_xx};
use aqt_core::{Amplitudes, Coupling, Schedule, SimulationConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::output::{csv_table, to_json, Format, Metadata, Sink};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Largest |‖(a, b)‖ - 1| that is silently repaired by renormalizing.
pub const RENORMALIZE_LIMIT: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "aqt", version, about = "Three-qubit adiabatic quantum teleportation simulator")]
pub struct Cli {
    /// Cap on worker threads used by scans.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate one protocol run and report the teleportation fidelity.
    Simulate(SimulateArgs),
    /// Infidelity 1 - F on a uniform grid of x = JT/(pi hbar).
    Scan(ScanArgs),
    /// Scan, then locate and refine the infidelity minima.
    Resonances(ResonanceArgs),
    /// Instantaneous block eigenvalues along s in [0, 1].
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingPreset {
    Xx,
    Heisenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Linear,
    Harmonic,
    QuadA,
    QuadB,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Self {
        match s {
            ScheduleArg::Linear => Schedule::Linear,
            ScheduleArg::Harmonic => Schedule::Harmonic,
            ScheduleArg::QuadA => Schedule::QuadA,
            ScheduleArg::QuadB => Schedule::QuadB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Block,
    Full,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Coupling preset: xx (gamma = 0) or heisenberg (gamma = 1).
    #[arg(long, value_enum, conflicts_with = "gamma")]
    pub coupling: Option<CouplingPreset>,

    /// Anisotropy gamma of the exchange coupling, in [0, 2].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,

    /// Interpolation schedule (f, g).
    #[arg(long, value_enum, default_value = "harmonic")]
    pub schedule: ScheduleArg,
}

impl ModelArgs {
    fn coupling(&self) -> Result<Coupling, Failure> {
        match (self.coupling, self.gamma) {
            (Some(CouplingPreset::Heisenberg), _) => Ok(Coupling::HEISENBERG),
            (_, Some(gamma)) => Coupling::new(gamma).map_err(Failure::usage),
            _ => Ok(Coupling::XX),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
    pub x_min: f64,

    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub x_max: f64,

    #[arg(long, default_value_t = 400)]
    pub points: usize,

    /// Fixed RK4 step count instead of the per-point reference resolution.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Total time as x = JT/(pi hbar).
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub a_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b_im: f64,

    /// Propagate the 3-dimensional block or the full 8-dimensional register.
    #[arg(long, value_enum, default_value = "full")]
    pub space: SpaceArg,

    /// RK4 step count; defaults to the reference resolution for x.
    #[arg(long)]
    pub steps: Option<usize>,

    /// Step-halving tolerance on the fidelity.
    #[arg(long, default_value_t = SimulationConfig::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub range: RangeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub range: RangeArgs,

    /// Refined minima at or below this infidelity are reported as resonances.
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Number of samples of s, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub points: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure { code: EXIT_USAGE, message: format!("error: {e}") }
    }
}

impl From<aqt_core::Error> for Failure {
    fn from(e: aqt_core::Error) -> Self {
        let code = match e {
            aqt_core::Error::Domain(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure { code, message: format!("error: {e}") }
    }
}

impl From<output::OutputError> for Failure {
    fn from(e: output::OutputError) -> Self {
        Failure::usage(e)
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => Err(Failure { code: EXIT_NUMERICAL, message: format!("error: thread pool: {e}") }),
        },
        None => run(&cli.command),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.message);
            f.code
        }
    }
}

pub fn run(command: &Command) -> Result<(), Failure> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Scan(args) => scan(args),
        Command::Resonances(args) => resonances(args),
        Command::Spectrum(args) => spectrum(args),
    }
}

/// Builds normalized amplitudes, renormalizing small deviations with a
/// warning and rejecting larger ones.
pub fn parse_amplitudes(a: Complex64, b: Complex64) -> Result<(Amplitudes, Option<String>), Failure> {
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let off = (norm - 1.0).abs();
    if !norm.is_finite() || off >= RENORMALIZE_LIMIT {
        return Err(Failure::usage(format!(
            "amplitudes (a, b) have norm {norm}, which is not within {RENORMALIZE_LIMIT:e} of 1"
        )));
    }
    let amps = Amplitudes::normalized(a, b).map_err(Failure::usage)?;
    let warning = (off > 0.0).then(|| format!("warning: renormalized amplitudes (norm was {norm})"));
    Ok((amps, warning))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub metadata: Metadata,
    pub coupling: Coupling,
    pub schedule: Schedule,
    pub jt_over_pi: f64,
    pub total_time: f64,
    pub amplitudes: Amplitudes,
    pub space: Space,
    pub steps: usize,
    pub fidelity: f64,
    pub infidelity: f64,
    pub fidelity_half_step: f64,
    pub norm_drift: f64,
    pub sz_drift: Option<f64>,
    /// Closed-form fidelity, available for XX coupling with the harmonic schedule.
    pub analytic_fidelity: Option<f64>,
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let coupling = args.model.coupling()?;
    let schedule = Schedule::from(args.model.schedule);
    let (amplitudes, warning) =
        parse_amplitudes(Complex64::new(args.a_re, args.a_im), Complex64::new(args.b_re, args.b_im))?;
    if let Some(w) = warning {
        eprintln!("{w}");
    }
    let mut config = SimulationConfig::new(coupling, schedule, args.x)
        .with_amplitudes(amplitudes)
        .with_tolerance(args.tolerance);
    if let Some(steps) = args.steps {
        config = config.with_steps(steps);
    }
    config.validate()?;
    let space = match args.space {
        SpaceArg::Block => Space::Block,
        SpaceArg::Full => Space::Full,
    };
    let mut sink = Sink::open(args.output.out.as_deref())?;
    let run = evolve_final(&config, space)?;
    let analytic_fidelity = if coupling.is_xx() && schedule == Schedule::Harmonic {
        Some(analytic_fidelity_x(args.x)?)
    } else {
        None
    };
    let record = SimulationRecord {
        metadata: Metadata::new("simulate"),
        coupling,
        schedule,
        jt_over_pi: args.x,
        total_time: total_time(args.x),
        amplitudes,
        space,
        steps: run.steps,
        fidelity: run.fidelity,
        infidelity: run.infidelity(),
        fidelity_half_step: run.fidelity_half_step,
        norm_drift: run.norm_drift,
        sz_drift: run.sz_drift,
        analytic_fidelity,
    };
    let text = match args.output.format {
        Format::Json => to_json(&record),
        Format::Csv => csv_table(&["x", "infidelity", "fidelity"], [vec![args.x, record.infidelity, record.fidelity]]),
    };
    sink.write(&text)?;
    sink.commit()?;
    Ok(())
}

fn settings(range: &RangeArgs) -> ScanSettings {
    ScanSettings { steps: range.steps, ..ScanSettings::default() }
}

fn scan(args: &ScanArgs) -> Result<(), Failure> {
    let coupling = args.model.coupling()?;
    let r = &args.range;
    let mut sink = Sink::open(args.output.out.as_deref())?;
    let series = run_scan(coupling, args.model.schedule.into(), r.x_min, r.x_max, r.points, &settings(r))?;
    let text = match args.output.format {
        Format::Csv => output::series_csv(&series),
        Format::Json => output::series_json(&series),
    };
    sink.write(&text)?;
    sink.commit()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceDocument {
    pub metadata: Metadata,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    #[serde(flatten)]
    pub report: ResonanceReport,
}

fn resonances(args: &ResonanceArgs) -> Result<(), Failure> {
    let coupling = args.model.coupling()?;
    let r = &args.range;
    if !(args.threshold.is_finite() && args.threshold > 0.0) {
        return Err(Failure::usage(format!("--threshold must be positive, got {}", args.threshold)));
    }
    let options = ResonanceOptions { threshold: args.threshold, ..ResonanceOptions::default() };
    let mut sink = Sink::open(args.output.out.as_deref())?;
    let series = run_scan(coupling, args.model.schedule.into(), r.x_min, r.x_max, r.points, &settings(r))?;
    let report = find_resonances(&series, &options)?;
    let text = match args.output.format {
        Format::Json => to_json(&ResonanceDocument {
            metadata: Metadata::new("resonances"),
            x_min: r.x_min,
            x_max: r.x_max,
            points: r.points,
            report,
        }),
        Format::Csv => csv_table(
            &["x", "infidelity", "resonance"],
            report.minima.iter().map(|m| {
                let hit = if m.infidelity <= options.threshold { 1.0 } else { 0.0 };
                vec![m.x, m.infidelity, hit]
            }),
        ),
    };
    sink.write(&text)?;
    sink.commit()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub s: f64,
    pub theta: f64,
    pub energies: [f64; 3],
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub metadata: Metadata,
    pub coupling: Coupling,
    pub schedule: Schedule,
    pub samples: Vec<SpectrumSample>,
}

pub fn spectrum_samples(coupling: Coupling, schedule: Schedule, points: usize) -> Result<Vec<SpectrumSample>, Failure> {
    if points < 2 {
        return Err(Failure::usage(format!("--points must be at least 2, got {points}")));
    }
    (0..points)
        .map(|i| {
            let s = i as f64 / (points - 1) as f64;
            let (f, g) = schedule.eval(s)?;
            let system = match coupling.preset_name() {
                Some("xx") => eig_xx(f, g, aqt_core::model::J)?,
                Some("heisenberg") => eig_heisenberg(f, g, aqt_core::model::J)?,
                _ => eig_numeric(&build_block(coupling, f, g).matrix)?,
            };
            Ok(SpectrumSample { s, theta: mixing_angle(f, g)?, energies: system.energies, gap: system.ground_gap() })
        })
        .collect()
}

fn spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let coupling = args.model.coupling()?;
    let schedule = Schedule::from(args.model.schedule);
    let mut sink = Sink::open(args.output.out.as_deref())?;
    let samples = spectrum_samples(coupling, schedule, args.points)?;
    let text = match args.output.format {
        Format::Json => to_json(&SpectrumDocument { metadata: Metadata::new("spectrum"), coupling, schedule, samples }),
        Format::Csv => csv_table(
            &["s", "theta", "e0", "e1", "e2", "gap"],
            samples.iter().map(|p| vec![p.s, p.theta, p.energies[0], p.energies[1], p.energies[2], p.gap]),
        ),
    };
    sink.write(&text)?;
    sink.commit()?;
    Ok(())
}
