//! Explicit 4×4 density-matrix path.
//!
//! Every closed form in the crate is written directly in terms of (a⃗, b⃗, E).
//! This module rebuilds ρ from Pauli tensor products and evaluates the same
//! quantities by traces and partial traces, so the closed forms have an
//! independent route to be checked against.

use nalgebra::{Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;

use crate::bloch::Vec3;

pub type Qubit = Matrix2<Complex64>;
pub type TwoQubit = Matrix4<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// σ₀ = 𝕀, σ₁ = X, σ₂ = Y, σ₃ = Z.
pub fn pauli(k: usize) -> Qubit {
    let (z, o, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match k {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn kron(a: &Qubit, b: &Qubit) -> TwoQubit {
    let mut out = TwoQubit::zeros();
    for r in 0..2 {
        for s in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    out[(2 * r + p, 2 * s + q)] = a[(r, s)] * b[(p, q)];
                }
            }
        }
    }
    out
}

/// v⃗·σ⃗.
pub fn sigma_dot(v: &Vec3) -> Qubit {
    pauli(1) * c(v.x, 0.0) + pauli(2) * c(v.y, 0.0) + pauli(3) * c(v.z, 0.0)
}

/// ρ for a diagonal correlation matrix.
pub fn density_matrix(a: &Vec3, b: &Vec3, e_diagonal: &Vec3) -> TwoQubit {
    density_matrix_general(a, b, &Matrix3::from_diagonal(e_diagonal))
}

/// ρ = ¼(𝕀 + a⃗·σ⃗⊗𝕀 + 𝕀⊗b⃗·σ⃗ + Σᵢⱼ Tᵢⱼ σᵢ⊗σⱼ) for a full correlation matrix T.
pub fn density_matrix_general(a: &Vec3, b: &Vec3, t: &Matrix3<f64>) -> TwoQubit {
    let id = pauli(0);
    let mut rho = kron(&id, &id) + kron(&sigma_dot(a), &id) + kron(&id, &sigma_dot(b));
    for i in 0..3 {
        for j in 0..3 {
            if t[(i, j)] != 0.0 {
                rho += kron(&pauli(i + 1), &pauli(j + 1)) * c(t[(i, j)], 0.0);
            }
        }
    }
    rho * c(0.25, 0.0)
}

/// Eigenvalues of a Hermitian 4×4 matrix, ascending.
pub fn eigenvalues(rho: &TwoQubit) -> [f64; 4] {
    let ev = rho.symmetric_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(f64::total_cmp);
    out
}

pub fn min_eigenvalue(rho: &TwoQubit) -> f64 {
    eigenvalues(rho)[0]
}

/// Π±(v̂) = (𝕀 ± v̂·σ⃗)/2.
pub fn projector(axis: &Vec3, sign: f64) -> Qubit {
    (pauli(0) + sigma_dot(axis) * c(sign, 0.0)) * c(0.5, 0.0)
}

/// Tr[ρ Π_i(n̂) ⊗ Π_j(m̂)].
pub fn joint_probability(rho: &TwoQubit, n: &Vec3, i: f64, m: &Vec3, j: f64) -> f64 {
    (rho * kron(&projector(n, i), &projector(m, j))).trace().re
}

/// Bloch vector of a single-qubit operator normalized to unit trace.
pub fn qubit_bloch(rho: &Qubit) -> Vec3 {
    let tr = rho.trace().re;
    Vec3::new(
        (rho * pauli(1)).trace().re / tr,
        (rho * pauli(2)).trace().re / tr,
        (rho * pauli(3)).trace().re / tr,
    )
}

/// Unnormalized state of B after outcome `i` of A's measurement along m̂.
pub fn conditional_b(rho: &TwoQubit, m: &Vec3, i: f64) -> Qubit {
    let projected = kron(&projector(m, i), &pauli(0)) * rho;
    partial_trace_a(&projected)
}

/// Probability of outcome `i` and B's conditional Bloch vector.
pub fn conditional_b_state(rho: &TwoQubit, m: &Vec3, i: f64) -> (f64, Vec3) {
    let sub = conditional_b(rho, m, i);
    let p = sub.trace().re;
    (p, if p > 0.0 { qubit_bloch(&sub) } else { Vec3::zeros() })
}

pub fn partial_trace_a(rho: &TwoQubit) -> Qubit {
    let mut out = Qubit::zeros();
    for p in 0..2 {
        for q in 0..2 {
            out[(p, q)] = rho[(p, q)] + rho[(2 + p, 2 + q)];
        }
    }
    out
}

/// U = −i β̂·σ⃗, the π rotation about β̂.
pub fn pi_rotation(beta: &Vec3) -> Qubit {
    sigma_dot(beta) * c(0.0, -1.0)
}

/// Applies the π rotation about β̂ to a qubit given by its Bloch vector.
pub fn rotate_pi_bloch(r: &Vec3, beta: &Vec3) -> Vec3 {
    let rho = (pauli(0) + sigma_dot(r)) * c(0.5, 0.0);
    let u = pi_rotation(beta);
    qubit_bloch(&(u * rho * u.adjoint()))
}

/// −Σ λ log₂ λ over the spectrum, with 0·log 0 = 0.
pub fn von_neumann_entropy(rho: &TwoQubit) -> f64 {
    eigenvalues(rho)
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_is_one_and_hermitian() {
        let rho = density_matrix(&Vec3::new(0.1, 0.2, -0.3), &Vec3::new(0.0, -0.4, 0.1), &Vec3::new(0.2, -0.1, 0.3));
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!((rho - rho.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn pi_rotation_reflects_about_axis() {
        let beta = Vec3::z();
        let r = Vec3::new(0.3, -0.2, 0.5);
        let rot = rotate_pi_bloch(&r, &beta);
        assert!((rot - Vec3::new(-0.3, 0.2, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_gives_marginal() {
        let b = Vec3::new(0.1, 0.2, 0.3);
        let rho = density_matrix(&Vec3::new(0.2, 0.0, 0.0), &b, &Vec3::new(0.1, 0.1, 0.1));
        assert!((qubit_bloch(&partial_trace_a(&rho)) - b).norm() < 1e-14);
    }
}
