//! Infidelity sweeps over x = JT/π, resonance detection and envelope fits.
//!
//! Grid points are evaluated in parallel on the current rayon pool and
//! assembled in grid order; each point is a pure function of its inputs, so
//! results do not depend on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabatic_frame::analytic_fidelity_x;
use crate::error::{domain, Error, Result};
use crate::model::{Coupling, Schedule, SimulationConfig};
use crate::propagator::{evolve_final, Space};

/// Integrator settings shared by every point of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Fixed RK4 step count; `None` selects the reference resolution per point.
    pub steps: Option<usize>,
    /// Step-halving fidelity tolerance.
    pub tolerance: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        ScanSettings { steps: None, tolerance: SimulationConfig::DEFAULT_TOLERANCE }
    }
}

/// Allowed excursion of 1 - F outside [0, 1] from rounding and norm drift.
const RANGE_SLACK: f64 = 1e-12;

/// Block-space infidelity 1 - F at one run length.
pub fn infidelity_at(coupling: Coupling, schedule: Schedule, x: f64, settings: &ScanSettings) -> Result<f64> {
    let mut config = SimulationConfig::new(coupling, schedule, x).with_tolerance(settings.tolerance);
    config.steps = settings.steps;
    let infidelity = evolve_final(&config, Space::Block)?.infidelity();
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&infidelity) {
        return Err(Error::Invariant(format!("infidelity {infidelity} outside [0, 1] at x = {x}")));
    }
    Ok(infidelity)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub coupling: Coupling,
    pub schedule: Schedule,
    pub settings: ScanSettings,
    pub grid: Vec<f64>,
    pub infidelity: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// RK4 step count used at each grid point.
    pub steps: Vec<usize>,
    /// Closed-form fidelity, recorded for XX coupling with the harmonic schedule.
    pub analytic_fidelity: Option<Vec<f64>>,
}

impl ScanSeries {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Largest |F_rk4 - F_analytic| when the closed form is available.
    pub fn max_analytic_deviation(&self) -> Option<f64> {
        self.analytic_fidelity.as_ref().map(|a| {
            a.iter()
                .zip(&self.fidelity)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// Evenly spaced grid of `points` values from `x_min` to `x_max` inclusive.
pub fn linear_grid(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(x_min.is_finite() && x_max.is_finite() && x_min > 0.0 && x_min < x_max) {
        return domain(format!("need 0 < x_min < x_max, got [{x_min}, {x_max}]"));
    }
    if points < 2 {
        return domain(format!("need at least 2 grid points, got {points}"));
    }
    let step = (x_max - x_min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { x_max } else { x_min + step * i as f64 })
        .collect())
}

pub fn run_scan(
    coupling: Coupling,
    schedule: Schedule,
    x_min: f64,
    x_max: f64,
    points: usize,
    settings: &ScanSettings,
) -> Result<ScanSeries> {
    let grid = linear_grid(x_min, x_max, points)?;
    run_scan_on_grid(coupling, schedule, grid, settings)
}

pub fn run_scan_on_grid(coupling: Coupling, schedule: Schedule, grid: Vec<f64>, settings: &ScanSettings) -> Result<ScanSeries> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[0] < w[1])) || grid[0] <= 0.0 {
        return domain("grid must hold at least 2 positive, strictly increasing values");
    }
    let infidelity = grid
        .par_iter()
        .map(|&x| infidelity_at(coupling, schedule, x, settings))
        .collect::<Result<Vec<_>>>()?;
    let fidelity = infidelity.iter().map(|e| 1.0 - e).collect();
    let steps = grid
        .iter()
        .map(|&x| {
            let mut c = SimulationConfig::new(coupling, schedule, x);
            c.steps = settings.steps;
            c.resolved_steps()
        })
        .collect();
    let analytic_fidelity = if coupling.is_xx() && schedule == Schedule::Harmonic {
        Some(grid.iter().map(|&x| analytic_fidelity_x(x)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(ScanSeries { coupling, schedule, settings: *settings, grid, infidelity, fidelity, steps, analytic_fidelity })
}

/// A refined local extremum of the infidelity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub x: f64,
    pub infidelity: f64,
}

/// Least-squares fit infidelity ≈ prefactor · x^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOptions {
    /// Refined minima at or below this infidelity count as resonances.
    pub threshold: f64,
    /// Width of the final golden-section bracket.
    pub dx: f64,
    /// Envelope peaks below this x are left out of the power-law fit.
    pub fit_min_x: f64,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions { threshold: 1e-6, dx: 1e-6, fit_min_x: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub coupling: Coupling,
    pub schedule: Schedule,
    pub options: ResonanceOptions,
    /// Every refined interior minimum, ascending in x.
    pub minima: Vec<Extremum>,
    /// The minima with infidelity at or below the threshold.
    pub resonances: Vec<Extremum>,
    /// Refined interior maxima, ascending in x.
    pub envelope: Vec<Extremum>,
    pub power_law: Option<PowerLaw>,
}

impl ResonanceReport {
    /// For each minimum, the ratio of the lower adjacent envelope peak to the
    /// minimum's infidelity. Minima with no neighbouring peak are skipped.
    pub fn dip_depths(&self) -> Vec<(Extremum, f64)> {
        self.minima
            .iter()
            .filter_map(|m| {
                let left = self.envelope.iter().rev().find(|p| p.x < m.x);
                let right = self.envelope.iter().find(|p| p.x > m.x);
                let local = match (left, right) {
                    (Some(l), Some(r)) => l.infidelity.min(r.infidelity),
                    (Some(p), None) | (None, Some(p)) => p.infidelity,
                    (None, None) => return None,
                };
                Some((*m, local / m.infidelity.max(f64::MIN_POSITIVE)))
            })
            .collect()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of `objective` on [lo, hi], stopping
/// when the bracket is narrower than `dx`. Returns the best point evaluated,
/// which is never worse than `seed`.
pub fn golden_section_min(
    mut objective: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    dx: f64,
    seed: (f64, f64),
) -> Result<(f64, f64)> {
    if !(lo < hi) || !(dx > 0.0) {
        return domain(format!("invalid golden-section bracket [{lo}, {hi}] with dx {dx}"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut best = seed;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    while b - a > dx {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Ordinary least squares of ln(infidelity) against ln(x).
pub fn fit_power_law(samples: &[Extremum]) -> Option<PowerLaw> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|e| e.x > 0.0 && e.infidelity > 0.0)
        .map(|e| (e.x.ln(), e.infidelity.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let xs = samples.iter().filter(|e| e.x > 0.0 && e.infidelity > 0.0).map(|e| e.x);
    Some(PowerLaw {
        exponent,
        prefactor: (my - exponent * mx).exp(),
        points: pts.len(),
        x_min: xs.clone().fold(f64::INFINITY, f64::min),
        x_max: xs.fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Indices of strict interior local minima (`sign = 1`) or maxima (`sign = -1`).
fn interior_extrema(values: &[f64], sign: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| {
            let (l, m, r) = (sign * values[i - 1], sign * values[i], sign * values[i + 1]);
            m < l && m <= r
        })
        .collect()
}

/// Brackets the grid extrema, refines each by golden-section search on freshly
/// computed infidelities, and fits the envelope peaks to a power law.
pub fn find_resonances(series: &ScanSeries, options: &ResonanceOptions) -> Result<ResonanceReport> {
    if series.len() < 16 {
        return domain(format!("resonance search needs at least 16 grid points, got {}", series.len()));
    }
    let (coupling, schedule, settings) = (series.coupling, series.schedule, series.settings);
    let refine = |i: usize, sign: f64| -> Result<Extremum> {
        let (lo, hi) = (series.grid[i - 1], series.grid[i + 1]);
        let seed = (series.grid[i], sign * series.infidelity[i]);
        let (x, v) = golden_section_min(
            |x| infidelity_at(coupling, schedule, x, &settings).map(|e| sign * e),
            lo,
            hi,
            options.dx,
            seed,
        )?;
        Ok(Extremum { x, infidelity: sign * v })
    };

    let minima = interior_extrema(&series.infidelity, 1.0)
        .into_par_iter()
        .map(|i| refine(i, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let envelope = interior_extrema(&series.infidelity, -1.0)
        .into_par_iter()
        .map(|i| refine(i, -1.0))
        .collect::<Result<Vec<_>>>()?;

    let resonances = minima.iter().copied().filter(|m| m.infidelity <= options.threshold).collect();
    let fit_samples: Vec<Extremum> = envelope.iter().copied().filter(|p| p.x >= options.fit_min_x).collect();
    Ok(ResonanceReport {
        coupling,
        schedule,
        options: *options,
        minima,
        resonances,
        envelope,
        power_law: fit_power_law(&fit_samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(linear_grid(1.0, 1.0, 10).is_err());
        assert!(linear_grid(0.0, 1.0, 10).is_err());
        assert!(linear_grid(0.5, 1.0, 1).is_err());
        let g = linear_grid(0.25, 10.0, 400).unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.25);
        assert_eq!(g[399], 10.0);
        assert!(run_scan(Coupling::XX, Schedule::Linear, 2.0, 2.0, 10, &ScanSettings::default()).is_err());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let mut calls = 0;
        let (x, v) = golden_section_min(
            |x| {
                calls += 1;
                Ok((x - 0.3).powi(2) + 1.0)
            },
            0.0,
            1.0,
            1e-9,
            (1.0, 1.49),
        )
        .unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((v - 1.0).abs() < 1e-15);
        assert!(calls < 60);
    }

    #[test]
    fn golden_section_keeps_better_seed() {
        // Seed better than anything in the bracket is returned untouched.
        let (x, v) = golden_section_min(|x| Ok(x), 1.0, 2.0, 1e-3, (0.5, 0.5)).unwrap();
        assert_eq!((x, v), (0.5, 0.5));
        assert!(golden_section_min(|x| Ok(x), 2.0, 1.0, 1e-3, (0.5, 0.5)).is_err());
    }

    #[test]
    fn power_law_recovers_exponent() {
        let samples: Vec<Extremum> = (1..20)
            .map(|k| {
                let x = k as f64 * 1.7;
                Extremum { x, infidelity: 0.3 * x.powf(-2.0) }
            })
            .collect();
        let fit = fit_power_law(&samples).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-12);
        assert!((fit.prefactor - 0.3).abs() < 1e-12);
        assert_eq!(fit.points, 19);
        assert!(fit_power_law(&samples[..1]).is_none());
    }

    #[test]
    fn extrema_detection() {
        let v = [3.0, 1.0, 2.0, 5.0, 4.0, 4.5, 0.0];
        assert_eq!(interior_extrema(&v, 1.0), vec![1, 4]);
        assert_eq!(interior_extrema(&v, -1.0), vec![3, 5]);
    }

    #[test]
    fn short_series_rejected() {
        let s = run_scan(Coupling::XX, Schedule::Harmonic, 0.5, 1.0, 8, &ScanSettings::default()).unwrap();
        assert!(find_resonances(&s, &ResonanceOptions::default()).is_err());
    }

    #[test]
    fn dip_depth_uses_lower_neighbour() {
        let report = ResonanceReport {
            coupling: Coupling::XX,
            schedule: Schedule::Linear,
            options: ResonanceOptions::default(),
            minima: vec![Extremum { x: 1.0, infidelity: 1e-6 }, Extremum { x: 3.0, infidelity: 1e-3 }],
            resonances: vec![],
            envelope: vec![Extremum { x: 0.5, infidelity: 1e-2 }, Extremum { x: 2.0, infidelity: 1e-3 }],
            power_law: None,
        };
        let d = report.dip_depths();
        assert!((d[0].1 - 1e3).abs() < 1e-6);
        assert!((d[1].1 - 1.0).abs() < 1e-12);
    }
}
