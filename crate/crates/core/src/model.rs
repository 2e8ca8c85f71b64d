//! Shared domain types: couplings, switching schedules and simulation
//! configuration.
//!
//! Units are fixed throughout the crate: ħ = 1 and the coupling strength
//! J = 1, so energies are in units of J and times in units of ħ/J. Total
//! run times are reported through the scan coordinate `x = JT/(πħ)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Reduced Planck constant in the crate's unit system.
pub const HBAR: f64 = 1.0;

/// Coupling strength J; the energy unit.
pub const J: f64 = 1.0;

/// Converts the scan coordinate `x = JT/(πħ)` into the run time `T` in units
/// of ħ/J.
pub fn total_time(x: f64) -> f64 {
    PI * HBAR * x / J
}

/// Inverse of [`total_time`].
pub fn scan_coordinate(t_total: f64) -> f64 {
    J * t_total / (PI * HBAR)
}

/// Exchange coupling between neighbouring qubits, parameterized by the
/// anisotropy of the σzσz term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    gamma: f64,
}

impl Coupling {
    /// σxσx + σyσy only.
    pub const XX: Coupling = Coupling { gamma: 0.0 };
    /// Isotropic exchange.
    pub const HEISENBERG: Coupling = Coupling { gamma: 1.0 };

    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return domain(format!("anisotropy must be finite and non-negative, got {gamma}"));
        }
        Ok(Coupling { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_xx(&self) -> bool {
        self.gamma == 0.0
    }

    /// Preset name if this coupling is one of the two presets.
    pub fn preset_name(&self) -> Option<&'static str> {
        if self.gamma == 0.0 {
            Some("xx")
        } else if self.gamma == 1.0 {
            Some("heisenberg")
        } else {
            None
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => write!(f, "gamma={}", self.gamma),
        }
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xx" => Ok(Coupling::XX),
            "heisenberg" => Ok(Coupling::HEISENBERG),
            other => domain(format!("unknown coupling preset `{other}` (expected xx or heisenberg)")),
        }
    }
}

/// The switching-function pair (f, g) used to interpolate from the initial to
/// the final Hamiltonian, as a function of normalized time s = t/T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// f = 1 - s, g = s
    Linear,
    /// f = cos(πs/2), g = sin(πs/2)
    Harmonic,
    /// f = 1 - s², g = s(2 - s)
    QuadA,
    /// f = 1 - s², g = s²
    QuadB,
}

impl Schedule {
    pub const ALL: [Schedule; 4] = [
        Schedule::Linear,
        Schedule::Harmonic,
        Schedule::QuadA,
        Schedule::QuadB,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Linear => "linear",
            Schedule::Harmonic => "harmonic",
            Schedule::QuadA => "quad-a",
            Schedule::QuadB => "quad-b",
        }
    }

    /// Evaluates (f, g) at normalized time `s`.
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return domain(format!("normalized time must lie in [0, 1], got {s}"));
        }
        Ok(self.eval_unchecked(s))
    }

    /// Same as [`Schedule::eval`] for callers that already guarantee
    /// `0 <= s <= 1`.
    pub(crate) fn eval_unchecked(&self, s: f64) -> (f64, f64) {
        match self {
            Schedule::Linear => (1.0 - s, s),
            Schedule::Harmonic => {
                let (sin, cos) = (FRAC_PI_2 * s).sin_cos();
                (cos, sin)
            }
            Schedule::QuadA => (1.0 - s * s, s * (2.0 - s)),
            Schedule::QuadB => (1.0 - s * s, s * s),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(Schedule::Linear),
            "harmonic" => Ok(Schedule::Harmonic),
            "quad-a" | "quada" => Ok(Schedule::QuadA),
            "quad-b" | "quadb" => Ok(Schedule::QuadB),
            other => domain(format!(
                "unknown schedule `{other}` (expected linear, harmonic, quad-a or quad-b)"
            )),
        }
    }
}

/// Free-function form of [`Schedule::eval`].
pub fn schedule_eval(kind: Schedule, s: f64) -> Result<(f64, f64)> {
    kind.eval(s)
}

/// Mixing angle θ = atan2(g, f), which runs from 0 to π/2 along every
/// schedule. The two-argument form stays defined at f = 0.
pub fn mixing_angle(f: f64, g: f64) -> Result<f64> {
    if f < 0.0 || g < 0.0 || !f.is_finite() || !g.is_finite() {
        return domain(format!("switching values must be finite and non-negative, got ({f}, {g})"));
    }
    if f == 0.0 && g == 0.0 {
        return domain("mixing angle undefined for f = g = 0");
    }
    Ok(g.atan2(f))
}

/// Amplitudes (a, b) of the qubit state a|0⟩ + b|1⟩ to be teleported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    a: Complex64,
    b: Complex64,
}

impl Amplitudes {
    /// Normalization tolerance at construction.
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::TOLERANCE {
            return domain(format!("|a|² + |b|² = {norm}, expected 1"));
        }
        Ok(Amplitudes { a, b })
    }

    /// Rescales (a, b) to unit norm. Fails on a zero or non-finite pair.
    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return domain("cannot normalize a zero or non-finite amplitude pair");
        }
        Ok(Amplitudes { a: a / norm, b: b / norm })
    }

    /// |0⟩
    pub fn up() -> Self {
        Amplitudes { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }
}

impl Default for Amplitudes {
    fn default() -> Self {
        Amplitudes::up()
    }
}

/// Everything needed to run one teleportation simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub coupling: Coupling,
    pub schedule: Schedule,
    /// Scan coordinate x = JT/(πħ).
    pub jt_over_pi: f64,
    /// Fixed RK4 step count; `None` selects the reference resolution.
    pub steps: Option<usize>,
    /// Maximum allowed fidelity change under step halving.
    pub tolerance: f64,
    pub amplitudes: Amplitudes,
}

impl SimulationConfig {
    /// Smallest accepted step count.
    pub const MIN_STEPS: usize = 16;
    pub const DEFAULT_TOLERANCE: f64 = 1e-8;

    pub fn new(coupling: Coupling, schedule: Schedule, jt_over_pi: f64) -> Self {
        SimulationConfig {
            coupling,
            schedule,
            jt_over_pi,
            steps: None,
            tolerance: Self::DEFAULT_TOLERANCE,
            amplitudes: Amplitudes::up(),
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_amplitudes(mut self, amplitudes: Amplitudes) -> Self {
        self.amplitudes = amplitudes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.jt_over_pi.is_finite() && self.jt_over_pi > 0.0) {
            return domain(format!("JT/π must be positive and finite, got {}", self.jt_over_pi));
        }
        if let Some(steps) = self.steps {
            if steps < Self::MIN_STEPS {
                return domain(format!("at least {} steps required, got {steps}", Self::MIN_STEPS));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return domain(format!("tolerance must be positive, got {}", self.tolerance));
        }
        // Re-validate in case the struct was deserialized.
        Amplitudes::new(self.amplitudes.a, self.amplitudes.b)?;
        Ok(())
    }

    /// Step count actually used: the override, or `max(1024, ceil(1024 x))`.
    pub fn resolved_steps(&self) -> usize {
        self.steps.unwrap_or_else(|| reference_steps(self.jt_over_pi))
    }
}

/// Reference RK4 resolution for a run of length x = JT/π.
pub fn reference_steps(jt_over_pi: f64) -> usize {
    (1024.0 * jt_over_pi).ceil().max(1024.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    #[test]
    fn schedule_examples() {
        assert_eq!(schedule_eval(Schedule::Linear, 0.0).unwrap(), (1.0, 0.0));
        let (f, g) = schedule_eval(Schedule::Harmonic, 0.5).unwrap();
        assert!((f - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(schedule_eval(Schedule::QuadA, 1.0).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn schedule_rejects_out_of_range() {
        assert!(schedule_eval(Schedule::Linear, -1e-9).is_err());
        assert!(schedule_eval(Schedule::QuadB, 1.0 + 1e-12).is_err());
        assert!(schedule_eval(Schedule::Harmonic, f64::NAN).is_err());
    }

    #[test]
    fn boundary_values() {
        for kind in Schedule::ALL {
            let (f0, g0) = kind.eval(0.0).unwrap();
            let (f1, g1) = kind.eval(1.0).unwrap();
            assert!((f0 - 1.0).abs() <= 1e-15 && g0.abs() <= 1e-15, "{kind}");
            assert!(f1.abs() <= 1e-15 && (g1 - 1.0).abs() <= 1e-15, "{kind}");
        }
    }

    #[test]
    fn sampled_schedules_are_nonvanishing_and_monotone() {
        for kind in Schedule::ALL {
            let mut prev = kind.eval(0.0).unwrap();
            let mut prev_theta = 0.0;
            for i in 1..=1000 {
                let s = i as f64 / 1000.0;
                let (f, g) = kind.eval(s).unwrap();
                assert!(f * f + g * g > 0.0);
                assert!((0.0..=1.0).contains(&f) && (0.0..=1.0).contains(&g));
                assert!(f <= prev.0 && g >= prev.1, "{kind} not monotone at s={s}");
                let theta = mixing_angle(f, g).unwrap();
                assert!(theta >= prev_theta, "{kind}: θ decreased at s={s}");
                prev = (f, g);
                prev_theta = theta;
            }
        }
    }

    #[test]
    fn harmonic_stays_on_unit_circle() {
        for i in 0..=1000 {
            let (f, g) = Schedule::Harmonic.eval(i as f64 / 1000.0).unwrap();
            assert!((f * f + g * g - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn mixing_angle_examples() {
        assert_eq!(mixing_angle(1.0, 0.0).unwrap(), 0.0);
        assert!((mixing_angle(0.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let h = 2f64.sqrt() / 2.0;
        assert!((mixing_angle(h, h).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(mixing_angle(0.0, 0.0).is_err());
    }

    #[test]
    fn amplitudes_are_validated() {
        let c = |re| Complex64::new(re, 0.0);
        assert!(Amplitudes::new(c(1.0), c(0.0)).is_ok());
        assert!(Amplitudes::new(c(1.0), c(1e-3)).is_err());
        let n = Amplitudes::normalized(c(3.0), c(4.0)).unwrap();
        assert!((n.a().re - 0.6).abs() < 1e-15 && (n.b().re - 0.8).abs() < 1e-15);
        assert!(Amplitudes::normalized(c(0.0), c(0.0)).is_err());
    }

    #[test]
    fn coupling_validation_and_parsing() {
        assert!(Coupling::new(-0.1).is_err());
        assert!(Coupling::new(f64::INFINITY).is_err());
        assert_eq!("XX".parse::<Coupling>().unwrap(), Coupling::XX);
        assert_eq!("heisenberg".parse::<Coupling>().unwrap(), Coupling::HEISENBERG);
        assert!("ising".parse::<Coupling>().is_err());
        assert_eq!("quad-b".parse::<Schedule>().unwrap(), Schedule::QuadB);
    }

    #[test]
    fn config_validation() {
        let cfg = SimulationConfig::new(Coupling::XX, Schedule::Linear, 1.0);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.resolved_steps(), 1024);
        assert_eq!(SimulationConfig::new(Coupling::XX, Schedule::Linear, 2.5).resolved_steps(), 2560);
        assert!(SimulationConfig::new(Coupling::XX, Schedule::Linear, 0.0).validate().is_err());
        assert!(cfg.with_steps(8).validate().is_err());
    }
}
