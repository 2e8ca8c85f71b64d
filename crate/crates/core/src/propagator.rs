//! Fixed-step RK4 integration of i∂ₜψ = H(t)ψ for the three-dimensional
//! sector and the full eight-dimensional system, plus the teleportation
//! initial/target states and fidelity.
//!
//! Block-space runs use the S_z = +½ sector coordinates; the S_z = -½ sector
//! carries the same block Hamiltonian, so one block run describes both.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::hamiltonian::{build_block, final_hamiltonian, initial_hamiltonian, sz_diagonal, Subspace, FULL_DIM};
use crate::model::{total_time, Amplitudes, Coupling, Schedule, SimulationConfig};

/// Runs shorter than this (in x = JT/π) are treated as the sudden limit.
pub const SUDDEN_LIMIT: f64 = 1e-6;

/// Number of stored samples in a [`Trajectory`], endpoints included.
const RECORDED_SAMPLES: usize = 257;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Coordinates in the S_z = +½ sector basis (|100⟩, |010⟩, |001⟩).
    Block,
    /// Full computational basis |q₁q₂q₃⟩.
    Full,
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Block => 3,
            Space::Full => FULL_DIM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub space: Space,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, space: Space) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return domain(format!("{:?} state needs {} amplitudes, got {}", space, space.dim(), amplitudes.len()));
        }
        let state = StateVector { amplitudes, space };
        if (state.norm() - 1.0).abs() > 1e-12 {
            return domain(format!("state norm {} is not 1", state.norm()));
        }
        Ok(state)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.space != other.space {
            return domain(format!("cannot overlap {:?} and {:?} states", self.space, other.space));
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    /// Restriction of a full-space state to one S_z sector.
    pub fn sector(&self, subspace: Subspace) -> Result<[Complex64; 3]> {
        if self.space != Space::Full {
            return domain("sector coordinates need a full-space state");
        }
        Ok(subspace.basis().map(|i| self.amplitudes[i]))
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn real3(v: [f64; 3]) -> [Complex64; 3] {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Singlet on qubits 2,3 with qubit 1 up, in block coordinates.
pub fn initial_state_block() -> [Complex64; 3] {
    real3([0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2])
}

/// Singlet on qubits 1,2 with qubit 3 up, in block coordinates.
pub fn target_state_block() -> [Complex64; 3] {
    real3([-FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0])
}

/// (a|0⟩ + b|1⟩)₁ ⊗ (|01⟩ - |10⟩)₂₃/√2
pub fn initial_state_full(amps: Amplitudes) -> StateVector {
    let mut v = vec![ZERO; FULL_DIM];
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[0b001] = amps.a() * h;
    v[0b010] = -amps.a() * h;
    v[0b101] = amps.b() * h;
    v[0b110] = -amps.b() * h;
    StateVector { amplitudes: v, space: Space::Full }
}

/// (|01⟩ - |10⟩)₁₂/√2 ⊗ (a|0⟩ + b|1⟩)₃
pub fn target_state_full(amps: Amplitudes) -> StateVector {
    let mut v = vec![ZERO; FULL_DIM];
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v[0b010] = amps.a() * h;
    v[0b100] = -amps.a() * h;
    v[0b011] = amps.b() * h;
    v[0b101] = -amps.b() * h;
    StateVector { amplitudes: v, space: Space::Full }
}

pub fn initial_state(space: Space, amps: Amplitudes) -> StateVector {
    match space {
        Space::Block => StateVector { amplitudes: initial_state_block().to_vec(), space },
        Space::Full => initial_state_full(amps),
    }
}

pub fn target_state(space: Space, amps: Amplitudes) -> StateVector {
    match space {
        Space::Block => StateVector { amplitudes: target_state_block().to_vec(), space },
        Space::Full => target_state_full(amps),
    }
}

/// |⟨target|final⟩|²
pub fn fidelity(final_state: &StateVector, target: &StateVector) -> Result<f64> {
    Ok(target.inner(final_state)?.norm_sqr())
}

/// ⟨ψ|S_z|ψ⟩ for a full-space state.
pub fn sz_expectation(state: &StateVector) -> Result<f64> {
    if state.space != Space::Full {
        return domain("S_z expectation needs a full-space state");
    }
    Ok(sz_of(&state.amplitudes))
}

fn sz_of(v: &[Complex64]) -> f64 {
    sz_diagonal().iter().zip(v).map(|(s, z)| s * z.norm_sqr()).sum()
}

/// dψ/dt = -i H(t) ψ with H(t) = f(t/T) A + g(t/T) B for fixed real
/// matrices A, B (both the block and the full Hamiltonian are real).
struct LinearDrive<const N: usize> {
    a: [[f64; N]; N],
    b: [[f64; N]; N],
    schedule: Schedule,
    t_total: f64,
}

impl<const N: usize> LinearDrive<N> {
    fn hamiltonian(&self, t: f64) -> [[f64; N]; N] {
        let s = (t / self.t_total).clamp(0.0, 1.0);
        let (f, g) = self.schedule.eval_unchecked(s);
        let mut h = [[0.0; N]; N];
        for r in 0..N {
            for c in 0..N {
                h[r][c] = self.a[r][c] * f + self.b[r][c] * g;
            }
        }
        h
    }

    /// -i H ψ, optionally at ψ + scale·k.
    fn derivative(h: &[[f64; N]; N], psi: &[Complex64; N], k: Option<(&[Complex64; N], f64)>) -> [Complex64; N] {
        let mut point = *psi;
        if let Some((k, scale)) = k {
            for (p, k) in point.iter_mut().zip(k) {
                *p += k * scale;
            }
        }
        let mut out = [ZERO; N];
        for (o, row) in out.iter_mut().zip(h) {
            let (mut re, mut im) = (0.0, 0.0);
            for (hc, p) in row.iter().zip(&point) {
                re += hc * p.re;
                im += hc * p.im;
            }
            *o = Complex64::new(im, -re);
        }
        out
    }

    fn step(&self, h0: &[[f64; N]; N], h_mid: &[[f64; N]; N], h1: &[[f64; N]; N], dt: f64, psi: &[Complex64; N]) -> [Complex64; N] {
        let k1 = Self::derivative(h0, psi, None);
        let k2 = Self::derivative(h_mid, psi, Some((&k1, 0.5 * dt)));
        let k3 = Self::derivative(h_mid, psi, Some((&k2, 0.5 * dt)));
        let k4 = Self::derivative(h1, psi, Some((&k3, dt)));
        let mut out = *psi;
        for i in 0..N {
            out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
        out
    }

    /// Integrates over [0, T] in `steps` equal steps, calling `observe` after
    /// every step with (step index, time, state).
    fn integrate(&self, psi0: [Complex64; N], steps: usize, mut observe: impl FnMut(usize, f64, &[Complex64; N])) -> [Complex64; N] {
        let dt = self.t_total / steps as f64;
        let mut psi = psi0;
        let mut h0 = self.hamiltonian(0.0);
        for k in 0..steps {
            let t = k as f64 * dt;
            let t_next = if k + 1 == steps { self.t_total } else { (k + 1) as f64 * dt };
            let h_mid = self.hamiltonian(t + 0.5 * dt);
            let h1 = self.hamiltonian(t_next);
            psi = self.step(&h0, &h_mid, &h1, dt, &psi);
            observe(k + 1, t_next, &psi);
            h0 = h1;
        }
        psi
    }
}

fn block_drive(coupling: Coupling, schedule: Schedule, t_total: f64) -> LinearDrive<3> {
    let a = build_block(coupling, 1.0, 0.0).matrix;
    let b = build_block(coupling, 0.0, 1.0).matrix;
    LinearDrive { a, b, schedule, t_total }
}

fn full_drive(coupling: Coupling, schedule: Schedule, t_total: f64) -> LinearDrive<FULL_DIM> {
    let real = |m: [[Complex64; FULL_DIM]; FULL_DIM]| m.map(|row| row.map(|z| z.re));
    LinearDrive { a: real(initial_hamiltonian(coupling)), b: real(final_hamiltonian(coupling)), schedule, t_total }
}

/// A propagated run with sparse samples and integrator diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub steps: usize,
    /// Largest |‖ψ(t)‖ - 1| over all steps.
    pub norm_drift: f64,
    /// Largest |⟨S_z⟩(t) - ⟨S_z⟩(0)| over all steps; full-space runs only.
    pub sz_drift: Option<f64>,
    /// Fidelity at `steps` and at `2 * steps`.
    pub fidelity: f64,
    pub fidelity_half_step: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

fn run<const N: usize>(
    drive: &LinearDrive<N>,
    psi0: [Complex64; N],
    target: &[Complex64; N],
    steps: usize,
    space: Space,
    record: bool,
) -> (Trajectory, [Complex64; N]) {
    let stride = (steps / (RECORDED_SAMPLES - 1)).max(1);
    let track_sz = space == Space::Full;
    let sz0 = if track_sz { sz_of(&psi0) } else { 0.0 };
    let mut times = vec![0.0];
    let mut states = vec![StateVector { amplitudes: psi0.to_vec(), space }];
    let mut norm_drift: f64 = 0.0;
    let mut sz_drift: f64 = 0.0;
    let psi = drive.integrate(psi0, steps, |k, t, psi| {
        norm_drift = norm_drift.max((norm(psi) - 1.0).abs());
        if track_sz {
            sz_drift = sz_drift.max((sz_of(psi) - sz0).abs());
        }
        if record && (k % stride == 0 || k == steps) {
            times.push(t);
            states.push(StateVector { amplitudes: psi.to_vec(), space });
        }
    });
    if !record {
        times.push(drive.t_total);
        states.push(StateVector { amplitudes: psi.to_vec(), space });
    }
    let fidelity = inner(target, &psi).norm_sqr();
    let trajectory = Trajectory {
        times,
        states,
        steps,
        norm_drift,
        sz_drift: track_sz.then_some(sz_drift),
        fidelity,
        fidelity_half_step: fidelity,
    };
    (trajectory, psi)
}

fn sudden<const N: usize>(psi0: [Complex64; N], target: &[Complex64; N], space: Space) -> Trajectory {
    let fidelity = inner(target, &psi0).norm_sqr();
    let state = StateVector { amplitudes: psi0.to_vec(), space };
    Trajectory {
        times: vec![0.0, 0.0],
        states: vec![state.clone(), state],
        steps: 0,
        norm_drift: (norm(&psi0) - 1.0).abs(),
        sz_drift: (space == Space::Full).then_some(0.0),
        fidelity,
        fidelity_half_step: fidelity,
    }
}

fn evolve_with<const N: usize>(
    drive: LinearDrive<N>,
    psi0: [Complex64; N],
    target: [Complex64; N],
    config: &SimulationConfig,
    space: Space,
    record: bool,
) -> Result<Trajectory> {
    if config.jt_over_pi < SUDDEN_LIMIT {
        return Ok(sudden(psi0, &target, space));
    }
    let steps = config.resolved_steps();
    let (mut trajectory, _) = run(&drive, psi0, &target, steps, space, record);
    let fine = drive.integrate(psi0, 2 * steps, |_, _, _| {});
    let fine_fidelity = inner(&target, &fine).norm_sqr();
    let difference = (trajectory.fidelity - fine_fidelity).abs();
    if difference > config.tolerance {
        return Err(Error::Unconverged {
            steps,
            coarse: trajectory.fidelity,
            fine: fine_fidelity,
            difference,
            tolerance: config.tolerance,
        });
    }
    trajectory.fidelity_half_step = fine_fidelity;
    Ok(trajectory)
}

fn to_array<const N: usize>(v: &[Complex64]) -> [Complex64; N] {
    let mut out = [ZERO; N];
    out.copy_from_slice(v);
    out
}

/// Propagates the teleportation protocol from t = 0 to T = πx with RK4,
/// checking the final fidelity against a run at half the step size.
///
/// The returned trajectory holds up to 257 evenly spaced samples.
pub fn evolve(config: &SimulationConfig, space: Space) -> Result<Trajectory> {
    evolve_impl(config, space, true)
}

/// As [`evolve`], but only the initial and final states are kept.
pub fn evolve_final(config: &SimulationConfig, space: Space) -> Result<Trajectory> {
    evolve_impl(config, space, false)
}

fn evolve_impl(config: &SimulationConfig, space: Space, record: bool) -> Result<Trajectory> {
    config.validate()?;
    let t_total = total_time(config.jt_over_pi);
    match space {
        Space::Block => evolve_with(
            block_drive(config.coupling, config.schedule, t_total),
            initial_state_block(),
            target_state_block(),
            config,
            space,
            record,
        ),
        Space::Full => evolve_with(
            full_drive(config.coupling, config.schedule, t_total),
            to_array(&initial_state_full(config.amplitudes).amplitudes),
            to_array(&target_state_full(config.amplitudes).amplitudes),
            config,
            space,
            record,
        ),
    }
}

/// Final block-space state of a single RK4 run with exactly `steps` steps and
/// no convergence check. Used for convergence-order studies.
pub fn propagate_block(coupling: Coupling, schedule: Schedule, jt_over_pi: f64, steps: usize) -> Result<[Complex64; 3]> {
    if !(jt_over_pi.is_finite() && jt_over_pi > 0.0) || steps == 0 {
        return domain("need positive JT/π and at least one step");
    }
    let drive = block_drive(coupling, schedule, total_time(jt_over_pi));
    Ok(drive.integrate(initial_state_block(), steps, |_, _, _| {}))
}
