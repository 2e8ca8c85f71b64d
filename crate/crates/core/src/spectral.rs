//! Instantaneous eigensystems of the sector Hamiltonian.
//!
//! Closed forms exist for the XX and Heisenberg couplings; [`eig_numeric`]
//! handles any real symmetric 3×3 matrix and serves as their oracle.
//!
//! Sign conventions: the closed forms keep the orientation in which every
//! eigenvector is a continuous function of the mixing angle on [0, π/2]
//! (e.g. the XX ground vector is (sin θ, -1, cos θ)/√2 everywhere). A
//! per-vector rule such as "first nonzero component positive" would flip that
//! vector at θ = 0. The numeric solver returns a canonical sign (first
//! component above 1e-10 in magnitude is positive) and can be re-oriented
//! against a neighbouring solution with [`EigenSystem::aligned_to`].
//!
//! All eigenvectors here are real, so the geometric (Berry) phase accumulated
//! along a schedule is identically zero; see [`BERRY_PHASE`].

use crate::error::{domain, Result};
use crate::hamiltonian::Mat3;
use crate::model::mixing_angle;

/// Geometric phase picked up by an adiabatically transported eigenvector.
/// Zero because the eigenvectors are real along the whole sweep.
pub const BERRY_PHASE: f64 = 0.0;

const SIGN_THRESHOLD: f64 = 1e-10;

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub energies: [f64; 3],
    /// `vectors[k]` is the eigenvector of `energies[k]`.
    pub vectors: [[f64; 3]; 3],
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = dot(&v, &v).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn mat_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

impl EigenSystem {
    /// Largest ‖H v - E v‖ over the three pairs.
    pub fn max_residual(&self, h: &Mat3) -> f64 {
        (0..3)
            .map(|k| {
                let hv = mat_vec(h, &self.vectors[k]);
                let e = self.energies[k];
                (0..3)
                    .map(|i| (hv[i] - e * self.vectors[k][i]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((dot(&self.vectors[i], &self.vectors[j]) - target).abs());
            }
        }
        err
    }

    /// Σ Eₖ vₖ vₖᵀ
    pub fn reconstruct(&self) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for k in 0..3 {
            let v = &self.vectors[k];
            for r in 0..3 {
                for c in 0..3 {
                    m[r][c] += self.energies[k] * v[r] * v[c];
                }
            }
        }
        m
    }

    /// Orthogonal projector onto the span of the listed eigenvectors.
    pub fn projector(&self, levels: &[usize]) -> Mat3 {
        let mut p = [[0.0; 3]; 3];
        for &k in levels {
            let v = &self.vectors[k];
            for r in 0..3 {
                for c in 0..3 {
                    p[r][c] += v[r] * v[c];
                }
            }
        }
        p
    }

    /// Copy with each vector's sign chosen to overlap non-negatively with the
    /// corresponding vector of `reference`.
    pub fn aligned_to(&self, reference: &EigenSystem) -> EigenSystem {
        let mut out = *self;
        for k in 0..3 {
            if dot(&out.vectors[k], &reference.vectors[k]) < 0.0 {
                out.vectors[k] = out.vectors[k].map(|x| -x);
            }
        }
        out
    }

    /// Gap between the two lowest levels.
    pub fn ground_gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }
}

/// Closed-form XX eigensystem. Energies (-2J√(f²+g²), 0, 2J√(f²+g²)) with
/// vectors (sin θ, -1, cos θ)/√2, (cos θ, 0, -sin θ), (sin θ, 1, cos θ)/√2.
pub fn eig_xx(f: f64, g: f64, j: f64) -> Result<EigenSystem> {
    let theta = mixing_angle(f, g)?;
    let (s, c) = theta.sin_cos();
    let r = 2.0 * j * f.hypot(g);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(EigenSystem {
        energies: [-r, 0.0, r],
        vectors: [[s * h, -h, c * h], [c, 0.0, -s], [s * h, h, c * h]],
    })
}

/// Closed-form Heisenberg eigensystem.
///
/// Levels: E₋ = J(-f-g-2√(f²-fg+g²)), E₊ = J(-f-g+2√(f²-fg+g²)) and
/// E₀ = J(f+g). Since E₊ ≤ E₀ the ascending order is (E₋, E₊, E₀); the two
/// upper levels meet at θ = 0.
///
/// The E± vectors are (sin θ, -cos θ ± √q, cos θ - sin θ ∓ √q) with
/// q = 1 - cos θ sin θ, each normalized by its own squared norm
/// 4q ± 2(2cos θ - sin θ)√q (upper sign for the lower level). E₊ vanishes
/// as θ → 0, so it is evaluated after dividing out sin θ, which leaves the
/// finite limit (2, -1, -1)/√6.
pub fn eig_heisenberg(f: f64, g: f64, j: f64) -> Result<EigenSystem> {
    let theta = mixing_angle(f, g)?;
    let (s, c) = theta.sin_cos();
    let q = 1.0 - c * s;
    let root = q.sqrt();
    let split = 2.0 * (f * f - f * g + g * g).sqrt();

    let minus = normalize([s, -c - root, c - s + root]);

    // (s, s(s - c)/(√q + c), c - s - √q) / s, cancellation-free near θ = 0.
    let third = if c >= s { -c / ((c - s) + root) } else { (c - s - root) / s };
    let plus = normalize([1.0, (s - c) / (root + c), third]);

    let zero = [1.0 / 3f64.sqrt(); 3];

    Ok(EigenSystem {
        energies: [j * (-f - g - split), j * (-f - g + split), j * (f + g)],
        vectors: [minus, plus, zero],
    })
}

/// Squared norm of the unnormalized E₋ (`lower = true`) or E₊ vector.
pub fn heisenberg_norm_factor(theta: f64, lower: bool) -> f64 {
    let (s, c) = theta.sin_cos();
    let q = 1.0 - c * s;
    let cross = 2.0 * (2.0 * c - s) * q.sqrt();
    if lower {
        4.0 * q + cross
    } else {
        4.0 * q - cross
    }
}

/// Eigensystem of a real symmetric 3×3 matrix by cyclic Jacobi rotations.
pub fn eig_numeric(h: &Mat3) -> Result<EigenSystem> {
    let scale = h.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if h.iter().flatten().any(|x| !x.is_finite()) {
        return domain("matrix has non-finite entries");
    }
    for r in 0..3 {
        for c in 0..r {
            if (h[r][c] - h[c][r]).abs() > 1e-12 * scale.max(1.0) {
                return domain(format!("matrix is not symmetric at ({r}, {c})"));
            }
        }
    }

    let mut a = *h;
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _sweep in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off == 0.0 || off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
            let t = if tau == 0.0 { 1.0 } else { t };
            let cs = 1.0 / (1.0 + t * t).sqrt();
            let sn = t * cs;
            // A ← Jᵀ A J with J the (p, q) rotation.
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = cs * akp - sn * akq;
                a[k][q] = sn * akp + cs * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = cs * apk - sn * aqk;
                a[q][k] = sn * apk + cs * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = cs * vp - sn * vq;
                row[q] = sn * vp + cs * vq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
    let mut out = EigenSystem { energies: [0.0; 3], vectors: [[0.0; 3]; 3] };
    for (slot, &k) in order.iter().enumerate() {
        out.energies[slot] = a[k][k];
        let mut vec = normalize([v[0][k], v[1][k], v[2][k]]);
        if let Some(first) = vec.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                vec = vec.map(|x| -x);
            }
        }
        out.vectors[slot] = vec;
    }
    Ok(out)
}
