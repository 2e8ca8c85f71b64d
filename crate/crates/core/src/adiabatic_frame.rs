//! Exact solution for XX coupling with the harmonic schedule.
//!
//! In the frame of instantaneous eigenvectors, ψ(t) = A(t) φ(t), the
//! generator D - iħA⁻¹∂ₜA is time independent:
//! H_tr = ħω₀ Z + ħω₁ Y′ with ω₀ = 2J/ħ and ω₁ = π/(2T). Evolution is then a
//! constant-axis precession of a spin-1, and the final fidelity has a closed
//! form with exact zeros at ΩT = 2πn.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::hamiltonian::{build_block, Mat3, Subspace};
use crate::model::{total_time, Amplitudes, Coupling, Schedule, HBAR};
use crate::propagator::{initial_state_block, target_state_block, Space, StateVector};

pub type CMat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Orthogonal matrix whose columns are the XX eigenvectors at mixing angle θ,
/// ordered (E₋, E₀, E₊).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMatrix {
    pub theta: f64,
    pub matrix: Mat3,
}

pub fn frame_matrix(theta: f64) -> Result<FrameMatrix> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return domain(format!("mixing angle must lie in [0, π/2], got {theta}"));
    }
    Ok(frame_matrix_unchecked(theta))
}

fn frame_matrix_unchecked(theta: f64) -> FrameMatrix {
    let (s, c) = theta.sin_cos();
    let h = FRAC_1_SQRT_2;
    FrameMatrix {
        theta,
        matrix: [[s * h, c, s * h], [-h, 0.0, h], [c * h, -s, c * h]],
    }
}

impl FrameMatrix {
    pub fn column(&self, k: usize) -> [f64; 3] {
        [self.matrix[0][k], self.matrix[1][k], self.matrix[2][k]]
    }

    /// AᵀMA
    pub fn conjugate(&self, m: &Mat3) -> Mat3 {
        let a = &self.matrix;
        let mut out = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += a[i][r] * m[i][j] * a[j][c];
                    }
                }
                out[r][c] = acc;
            }
        }
        out
    }

    /// Largest deviation of AᵀA from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let ata = self.conjugate(&id);
        let mut err: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                err = err.max((ata[r][c] - id[r][c]).abs());
            }
        }
        err
    }

    fn apply(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let a = &self.matrix;
        [0, 1, 2].map(|r| (0..3).map(|c| v[c] * a[r][c]).sum())
    }

    fn apply_transpose(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let a = &self.matrix;
        [0, 1, 2].map(|r| (0..3).map(|c| v[c] * a[c][r]).sum())
    }
}

/// Z = diag(-1, 0, 1)
pub fn z_matrix() -> CMat3 {
    let mut z = [[ZERO; 3]; 3];
    z[0][0] = Complex64::new(-1.0, 0.0);
    z[2][2] = Complex64::new(1.0, 0.0);
    z
}

/// Y′ = (1/√2) [[0, i, 0], [-i, 0, -i], [0, i, 0]]
pub fn y_prime_matrix() -> CMat3 {
    let h = FRAC_1_SQRT_2;
    [[ZERO, I * h, ZERO], [-I * h, ZERO, -I * h], [ZERO, I * h, ZERO]]
}

/// The time-independent adiabatic-frame Hamiltonian for one (J, T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedHamiltonian {
    pub j: f64,
    pub t_total: f64,
    /// 2J/ħ
    pub omega0: f64,
    /// π/(2T), the angular frequency of the switching functions.
    pub omega1: f64,
    /// √(ω₀² + ω₁²)
    pub omega: f64,
    /// atan(ω₁/ω₀)
    pub alpha: f64,
    pub matrix: CMat3,
}

impl TransformedHamiltonian {
    pub fn new(j: f64, t_total: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return domain(format!("coupling strength must be positive, got {j}"));
        }
        if !(t_total.is_finite() && t_total > 0.0) {
            return domain(format!("run time must be positive, got {t_total}"));
        }
        let omega0 = 2.0 * j / HBAR;
        let omega1 = PI / (2.0 * t_total);
        let (z, y) = (z_matrix(), y_prime_matrix());
        let mut matrix = [[ZERO; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                matrix[r][c] = (z[r][c] * omega0 + y[r][c] * omega1) * HBAR;
            }
        }
        Ok(TransformedHamiltonian {
            j,
            t_total,
            omega0,
            omega1,
            omega: omega0.hypot(omega1),
            alpha: omega1.atan2(omega0),
            matrix,
        })
    }

    /// Unit-J constructor from the scan coordinate x = JT/π.
    pub fn from_x(x: f64) -> Result<Self> {
        Self::new(1.0, total_time(x))
    }

    /// Only XX coupling with the harmonic schedule has a time-independent
    /// adiabatic-frame generator.
    pub fn for_config(coupling: Coupling, schedule: Schedule, j: f64, t_total: f64) -> Result<Self> {
        if !coupling.is_xx() || schedule != Schedule::Harmonic {
            return domain(format!(
                "closed-form adiabatic frame requires xx coupling and harmonic schedule, got {coupling}/{schedule}"
            ));
        }
        Self::new(j, t_total)
    }

    /// Eigenvalues (-ħΩ, 0, ħΩ).
    pub fn eigenvalues(&self) -> [f64; 3] {
        [-HBAR * self.omega, 0.0, HBAR * self.omega]
    }

    /// Closed-form eigenvectors in the order of [`Self::eigenvalues`]:
    /// |e∓⟩ = ½(1 ± cos α, ±i√2 sin α, 1 ∓ cos α) and
    /// |e₀⟩ = (1/√2)(-sin α, i√2 cos α, sin α).
    pub fn eigenvectors(&self) -> [[Complex64; 3]; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let r = |x: f64| Complex64::new(x, 0.0);
        let plus_minus = |sign: f64| {
            [
                r(0.5 * (1.0 - sign * ca)),
                -I * (0.5 * sign * SQRT_2 * sa),
                r(0.5 * (1.0 + sign * ca)),
            ]
        };
        let e0 = [r(-sa * FRAC_1_SQRT_2), I * ca, r(sa * FRAC_1_SQRT_2)];
        [plus_minus(-1.0), e0, plus_minus(1.0)]
    }

    /// U_tr(t) = exp(-i H_tr t/ħ) by spectral decomposition.
    pub fn propagator(&self, t: f64) -> CMat3 {
        let vectors = self.eigenvectors();
        let mut u = [[ZERO; 3]; 3];
        for (e, v) in self.eigenvalues().iter().zip(vectors.iter()) {
            let phase = Complex64::from_polar(1.0, -e * t / HBAR);
            for r in 0..3 {
                for c in 0..3 {
                    u[r][c] += phase * v[r] * v[c].conj();
                }
            }
        }
        u
    }

    /// Mixing angle θ(t) = ω₁ t.
    pub fn theta(&self, t: f64) -> f64 {
        (self.omega1 * t).clamp(0.0, FRAC_PI_2)
    }

    /// Block state at time t: A(t) U_tr(t) Aᵀ(0) ψ(0).
    pub fn block_state(&self, t: f64, psi0: &[Complex64; 3]) -> [Complex64; 3] {
        let phi0 = frame_matrix_unchecked(0.0).apply_transpose(psi0);
        let u = self.propagator(t);
        let phi: [Complex64; 3] = [0, 1, 2].map(|r| (0..3).map(|c| u[r][c] * phi0[c]).sum());
        frame_matrix_unchecked(self.theta(t)).apply(&phi)
    }

    /// D - iħAᵀ∂ₜA at time t, with the derivative taken by central
    /// differences of step 1e-6 T.
    pub fn finite_difference_generator(&self, t: f64) -> CMat3 {
        let h = 1e-6 * self.t_total;
        let (g, f) = (self.omega1 * t).sin_cos();
        let hamiltonian = build_block(Coupling::XX, f, g).matrix.map(|row| row.map(|x| x * self.j));
        let a = frame_matrix_unchecked(self.omega1 * t);
        let d = a.conjugate(&hamiltonian);
        let (ap, am) = (
            frame_matrix_unchecked(self.omega1 * (t + h)).matrix,
            frame_matrix_unchecked(self.omega1 * (t - h)).matrix,
        );
        let mut out = [[ZERO; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let mut deriv = 0.0;
                for k in 0..3 {
                    deriv += a.matrix[k][r] * (ap[k][c] - am[k][c]) / (2.0 * h);
                }
                out[r][c] = Complex64::new(d[r][c], -HBAR * deriv);
            }
        }
        out
    }

    /// Largest entrywise deviation between H_tr and the finite-difference
    /// generator at T/4, T/2 and 3T/4.
    pub fn generator_mismatch(&self) -> f64 {
        [0.25, 0.5, 0.75]
            .iter()
            .map(|frac| {
                let fd = self.finite_difference_generator(frac * self.t_total);
                let mut err: f64 = 0.0;
                for r in 0..3 {
                    for c in 0..3 {
                        err = err.max((fd[r][c] - self.matrix[r][c]).norm());
                    }
                }
                err
            })
            .fold(0.0, f64::max)
    }
}

/// Builds H_tr and confirms it against the frame-derivative definition.
pub fn transformed_hamiltonian(j: f64, t_total: f64) -> Result<TransformedHamiltonian> {
    let h = TransformedHamiltonian::new(j, t_total)?;
    let mismatch = h.generator_mismatch();
    if mismatch > 1e-8 {
        return Err(Error::Invariant(format!(
            "adiabatic-frame generator differs from finite-difference value by {mismatch:e}"
        )));
    }
    Ok(h)
}

/// Exact final state for the input qubit a|0⟩ + b|1⟩ at t = T, in the full
/// computational basis.
pub fn exact_evolve(amps: Amplitudes, j: f64, t_total: f64) -> Result<StateVector> {
    let h = TransformedHamiltonian::new(j, t_total)?;
    let block = h.block_state(t_total, &initial_state_block());
    let mut v = vec![ZERO; 8];
    // Up sector holds a·block; the down sector's initial coordinates are
    // the negated block start, so it carries -b·block.
    for (k, &i) in Subspace::Up.basis().iter().enumerate() {
        v[i] = amps.a() * block[k];
    }
    for (k, &i) in Subspace::Down.basis().iter().enumerate() {
        v[i] = -amps.b() * block[k];
    }
    Ok(StateVector { amplitudes: v, space: Space::Full })
}

/// Exact block-space fidelity at T, computed from the evolved state.
pub fn exact_block_fidelity(j: f64, t_total: f64) -> Result<f64> {
    let h = TransformedHamiltonian::new(j, t_total)?;
    let psi = h.block_state(t_total, &initial_state_block());
    let target = target_state_block();
    Ok(target.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm_sqr())
}

/// Closed-form fidelity
/// F = ¼[cos²(ΩT)(1+cos²α)² + 4 sin²(ΩT) cos²α + 2 cos(ΩT) sin²α (1+cos²α) + sin⁴α].
pub fn analytic_fidelity(j: f64, t_total: f64) -> Result<f64> {
    let h = TransformedHamiltonian::new(j, t_total)?;
    let (sin_wt, cos_wt) = (h.omega * t_total).sin_cos();
    let (sa, ca) = h.alpha.sin_cos();
    let (c2, s2) = (ca * ca, sa * sa);
    Ok(0.25
        * (cos_wt * cos_wt * (1.0 + c2).powi(2)
            + 4.0 * sin_wt * sin_wt * c2
            + 2.0 * cos_wt * s2 * (1.0 + c2)
            + s2 * s2))
}

/// [`analytic_fidelity`] at J = 1 as a function of x = JT/π.
pub fn analytic_fidelity_x(x: f64) -> Result<f64> {
    analytic_fidelity(1.0, total_time(x))
}

/// Fidelity at the half-period points ΩT = (2k+1)π: cos⁴α.
pub fn envelope_fidelity_x(x: f64) -> Result<f64> {
    let h = TransformedHamiltonian::from_x(x)?;
    Ok(h.alpha.cos().powi(4))
}

/// Resonant run lengths x_n = √(n² - 1/16), n = 1..=n_max, where ΩT = 2πn.
pub fn resonance_times(n_max: usize) -> Result<Vec<f64>> {
    if n_max < 1 {
        return domain("need at least one resonance");
    }
    Ok((1..=n_max).map(|n| ((n * n) as f64 - 1.0 / 16.0).sqrt()).collect())
}

/// Run lengths where ΩT = (2k+1)π, the infidelity maxima between resonances.
pub fn antiresonance_times(k_max: usize) -> Vec<f64> {
    (0..k_max)
        .map(|k| {
            let half = (2 * k + 1) as f64 / 2.0;
            (half * half - 1.0 / 16.0).sqrt()
        })
        .collect()
}
