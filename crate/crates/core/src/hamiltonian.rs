//! The three-qubit Hamiltonian H(t) = f(t) H_i + g(t) H_f and its reduction
//! to the total-S_z blocks.
//!
//! Computational basis |q₁q₂q₃⟩ with qubit 1 as the most significant bit and
//! |0⟩ = spin up, so basis index = 4 q₁ + 2 q₂ + q₃.

use num_complex::Complex64;

use crate::model::{Coupling, J};

pub const FULL_DIM: usize = 8;

pub type Mat3 = [[f64; 3]; 3];
pub type Mat8 = [[Complex64; FULL_DIM]; FULL_DIM];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    fn element(self, row: usize, col: usize) -> Complex64 {
        match (self, row, col) {
            (Pauli::X, 0, 1) | (Pauli::X, 1, 0) => Complex64::new(1.0, 0.0),
            (Pauli::Y, 0, 1) => Complex64::new(0.0, -1.0),
            (Pauli::Y, 1, 0) => Complex64::new(0.0, 1.0),
            (Pauli::Z, 0, 0) => Complex64::new(1.0, 0.0),
            (Pauli::Z, 1, 1) => Complex64::new(-1.0, 0.0),
            _ => ZERO,
        }
    }
}

/// Bit of qubit `k` (1-based) in a basis index.
fn qubit_bit(index: usize, k: usize) -> usize {
    (index >> (3 - k)) & 1
}

/// σ_{iμ} σ_{jμ} as an 8×8 matrix.
fn pauli_pair(i: usize, j: usize, p: Pauli) -> Mat8 {
    let mut m = [[ZERO; FULL_DIM]; FULL_DIM];
    for (row, m_row) in m.iter_mut().enumerate() {
        for (col, entry) in m_row.iter_mut().enumerate() {
            let mut value = Complex64::new(1.0, 0.0);
            for k in 1..=3 {
                let (r, c) = (qubit_bit(row, k), qubit_bit(col, k));
                value *= if k == i || k == j {
                    p.element(r, c)
                } else if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    ZERO
                };
            }
            *entry = value;
        }
    }
    m
}

/// J (σᵢₓσⱼₓ + σᵢᵧσⱼᵧ + γ σᵢzσⱼz)
fn exchange(i: usize, j: usize, gamma: f64) -> Mat8 {
    let (xx, yy, zz) = (pauli_pair(i, j, Pauli::X), pauli_pair(i, j, Pauli::Y), pauli_pair(i, j, Pauli::Z));
    let mut m = [[ZERO; FULL_DIM]; FULL_DIM];
    for r in 0..FULL_DIM {
        for c in 0..FULL_DIM {
            m[r][c] = (xx[r][c] + yy[r][c] + zz[r][c] * gamma) * J;
        }
    }
    m
}

/// Initial Hamiltonian: qubits 2 and 3 coupled.
pub fn initial_hamiltonian(coupling: Coupling) -> Mat8 {
    exchange(2, 3, coupling.gamma())
}

/// Final Hamiltonian: qubits 1 and 2 coupled.
pub fn final_hamiltonian(coupling: Coupling) -> Mat8 {
    exchange(1, 2, coupling.gamma())
}

/// Total S_z = ½(σ₁z + σ₂z + σ₃z), diagonal in the computational basis.
pub fn sz_diagonal() -> [f64; FULL_DIM] {
    let mut d = [0.0; FULL_DIM];
    for (index, value) in d.iter_mut().enumerate() {
        *value = (1..=3)
            .map(|k| if qubit_bit(index, k) == 0 { 0.5 } else { -0.5 })
            .sum();
    }
    d
}

/// The two three-dimensional S_z sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subspace {
    /// S_z = +½, basis (|100⟩, |010⟩, |001⟩).
    Up,
    /// S_z = -½, basis (|011⟩, |101⟩, |110⟩).
    Down,
}

impl Subspace {
    pub const BOTH: [Subspace; 2] = [Subspace::Up, Subspace::Down];

    /// Computational-basis indices of the sector basis, in block order.
    pub fn basis(&self) -> [usize; 3] {
        match self {
            Subspace::Up => [0b100, 0b010, 0b001],
            Subspace::Down => [0b011, 0b101, 0b110],
        }
    }

    pub fn sz(&self) -> f64 {
        match self {
            Subspace::Up => 0.5,
            Subspace::Down => -0.5,
        }
    }
}

/// The full 8×8 Hamiltonian at a given schedule point.
#[derive(Debug, Clone, PartialEq)]
pub struct FullHamiltonian {
    pub matrix: Mat8,
    pub coupling: Coupling,
    pub f: f64,
    pub g: f64,
}

/// Energies of the two one-dimensional blocks on |000⟩ and |111⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarBlocks {
    pub e_000: f64,
    pub e_111: f64,
}

impl FullHamiltonian {
    /// Largest |H - H†| entry.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        let mut err: f64 = 0.0;
        for r in 0..FULL_DIM {
            for c in 0..FULL_DIM {
                err = err.max((m[r][c] - m[c][r].conj()).norm());
            }
        }
        err
    }

    /// max |[H, S_z]| entry.
    pub fn sz_commutator_norm(&self) -> f64 {
        let sz = sz_diagonal();
        let mut err: f64 = 0.0;
        for r in 0..FULL_DIM {
            for c in 0..FULL_DIM {
                err = err.max((self.matrix[r][c] * (sz[c] - sz[r])).norm());
            }
        }
        err
    }

    pub fn scalar_blocks(&self) -> ScalarBlocks {
        ScalarBlocks { e_000: self.matrix[0][0].re, e_111: self.matrix[7][7].re }
    }

    pub fn apply(&self, psi: &[Complex64; FULL_DIM]) -> [Complex64; FULL_DIM] {
        let mut out = [ZERO; FULL_DIM];
        for (o, row) in out.iter_mut().zip(self.matrix.iter()) {
            *o = row.iter().zip(psi).map(|(h, p)| h * p).sum();
        }
        out
    }
}

/// f H_i + g H_f for the given coupling.
pub fn build_full(coupling: Coupling, f: f64, g: f64) -> FullHamiltonian {
    let hi = initial_hamiltonian(coupling);
    let hf = final_hamiltonian(coupling);
    let mut matrix = [[ZERO; FULL_DIM]; FULL_DIM];
    for r in 0..FULL_DIM {
        for c in 0..FULL_DIM {
            matrix[r][c] = hi[r][c] * f + hf[r][c] * g;
        }
    }
    FullHamiltonian { matrix, coupling, f, g }
}

/// The 3×3 block acting on either S_z = ±½ sector (both are identical).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockHamiltonian {
    pub matrix: Mat3,
    pub coupling: Coupling,
    pub f: f64,
    pub g: f64,
}

/// Closed-form sector Hamiltonian, a Λ-system with couplings 2g and 2f.
pub fn build_block(coupling: Coupling, f: f64, g: f64) -> BlockHamiltonian {
    let gamma = coupling.gamma();
    let matrix = [
        [(f - g) * gamma * J, 2.0 * g * J, 0.0],
        [2.0 * g * J, -(f + g) * gamma * J, 2.0 * f * J],
        [0.0, 2.0 * f * J, -(f - g) * gamma * J],
    ];
    BlockHamiltonian { matrix, coupling, f, g }
}

/// Restricts the full Hamiltonian to one S_z sector.
pub fn project_block(full: &FullHamiltonian, subspace: Subspace) -> BlockHamiltonian {
    let basis = subspace.basis();
    let mut matrix = [[0.0; 3]; 3];
    for (r, &br) in basis.iter().enumerate() {
        for (c, &bc) in basis.iter().enumerate() {
            matrix[r][c] = full.matrix[br][bc].re;
        }
    }
    BlockHamiltonian { matrix, coupling: full.coupling, f: full.f, g: full.g }
}

impl BlockHamiltonian {
    pub fn max_abs_diff(&self, other: &BlockHamiltonian) -> f64 {
        max_abs_diff3(&self.matrix, &other.matrix)
    }
}

pub fn max_abs_diff3(a: &Mat3, b: &Mat3) -> f64 {
    let mut err: f64 = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            err = err.max((a[r][c] - b[r][c]).abs());
        }
    }
    err
}
