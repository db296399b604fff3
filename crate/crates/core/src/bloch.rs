//! Two-qubit states in Bloch–Fano form
//!
//! ρ = ¼ (𝕀⊗𝕀 + a⃗·σ⃗ ⊗ 𝕀 + 𝕀 ⊗ b⃗·σ⃗ + Σᵢ Eᵢᵢ σᵢ ⊗ σᵢ)
//!
//! with the correlation matrix held in its diagonal (local-unitary canonical)
//! form E = κ·diag(ĉ). States with a⃗ = b⃗ = 0 are the maximally-mixed-marginal
//! states (MMMS), fully described by the correlation vector c⃗ = κĉ.

use crate::density;
use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Eigenvalue floor below which a reconstructed density matrix is rejected.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Slack on the four half-space inequalities of the tetrahedron.
pub const TETRAHEDRON_TOL: f64 = 1e-10;

/// Tolerance on |v| = 1 for vectors that must already be unit length.
pub const UNIT_TOL: f64 = 1e-9;

/// Single-qubit Bloch vector (a⃗ or b⃗).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub Vec3);

impl BlochVector {
    pub fn zero() -> Self {
        Self(Vec3::zeros())
    }

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vec3::new(x, y, z))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// True when the vector describes a valid single-qubit state.
    pub fn is_marginal(&self) -> bool {
        self.0.iter().all(|c| c.is_finite()) && self.norm() <= 1.0 + POSITIVITY_TOL
    }

    pub fn is_zero(&self) -> bool {
        self.0 == Vec3::zeros()
    }
}

/// Diagonal correlation matrix E = κ·diag(ĉ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    kappa: f64,
    direction: Vec3,
}

impl CorrelationMatrix {
    /// Builds E from its diagonal c⃗ = κĉ. For c⃗ = 0 the direction defaults to ẑ.
    pub fn from_diagonal(c: Vec3) -> Self {
        let kappa = c.norm();
        let direction = if kappa > 0.0 { c / kappa } else { Vec3::z() };
        Self { kappa, direction }
    }

    pub fn from_parts(kappa: f64, direction: Vec3) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be ≥ 0, got {kappa}")));
        }
        let direction = unit(direction)?;
        Ok(Self { kappa, direction })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Unit direction ĉ.
    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    /// The correlation vector c⃗ = κĉ (the diagonal of E).
    pub fn diagonal(&self) -> Vec3 {
        self.direction * self.kappa
    }

    /// E·v for the diagonal E; identical to v·E since E is symmetric.
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.diagonal().component_mul(v)
    }

    /// n̂ E m̂ᵀ.
    pub fn bilinear(&self, n: &Vec3, m: &Vec3) -> f64 {
        self.apply(n).dot(m)
    }

    /// Squared singular values κ²cᵢ².
    pub fn squared_singular_values(&self) -> Vec3 {
        let d = self.diagonal();
        d.component_mul(&d)
    }
}

/// A two-qubit state (a⃗, b⃗, E) with its positivity status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub a: BlochVector,
    pub b: BlochVector,
    pub e: CorrelationMatrix,
    physical: bool,
    min_eigenvalue: f64,
}

impl TwoQubitState {
    /// Builds a state and rejects it unless the reconstructed ρ is positive.
    pub fn new(a: Vec3, b: Vec3, e_diagonal: Vec3) -> Result<Self> {
        let s = Self::new_unchecked(a, b, e_diagonal)?;
        if s.physical {
            Ok(s)
        } else {
            Err(Error::NonPhysical { min_eigenvalue: s.min_eigenvalue })
        }
    }

    /// Builds a state without rejecting non-positive operators. The
    /// positivity status is still computed and recorded.
    pub fn new_unchecked(a: Vec3, b: Vec3, e_diagonal: Vec3) -> Result<Self> {
        if !(a.iter().chain(b.iter()).chain(e_diagonal.iter())).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("state parameters must be finite".into()));
        }
        let e = CorrelationMatrix::from_diagonal(e_diagonal);
        let min_eigenvalue = if a == Vec3::zeros() && b == Vec3::zeros() {
            mmms_min_eigenvalue(&e_diagonal)
        } else {
            density::min_eigenvalue(&density::density_matrix(&a, &b, &e_diagonal))
        };
        Ok(Self {
            a: BlochVector(a),
            b: BlochVector(b),
            e,
            physical: min_eigenvalue >= -POSITIVITY_TOL,
            min_eigenvalue,
        })
    }

    /// Maximally-mixed-marginal state with c⃗ = κĉ.
    pub fn mmms(kappa: f64, c_hat: Vec3) -> Result<Self> {
        let s = Self::mmms_forced(kappa, c_hat)?;
        if s.physical {
            Ok(s)
        } else {
            Err(Error::NonPhysical { min_eigenvalue: s.min_eigenvalue })
        }
    }

    /// Like [`TwoQubitState::mmms`] but keeps non-positive states, flagged.
    pub fn mmms_forced(kappa: f64, c_hat: Vec3) -> Result<Self> {
        let e = CorrelationMatrix::from_parts(kappa, c_hat)?;
        let mut s = Self::new_unchecked(Vec3::zeros(), Vec3::zeros(), e.diagonal())?;
        // keep the caller's direction even when κ = 0
        s.e = e;
        Ok(s)
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    /// Smallest eigenvalue of the reconstructed density operator.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn is_mmms(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn kappa(&self) -> f64 {
        self.e.kappa()
    }

    pub fn c_hat(&self) -> Vec3 {
        self.e.direction()
    }

    /// c⃗ = κĉ.
    pub fn correlation_vector(&self) -> Vec3 {
        self.e.diagonal()
    }

    /// The state with the local Bloch vectors removed, ρ(a⃗ = 0, b⃗ = 0).
    pub fn stripped(&self) -> Self {
        let mut s = Self::new_unchecked(Vec3::zeros(), Vec3::zeros(), self.e.diagonal())
            .expect("finite parameters stay finite");
        s.e = self.e;
        s
    }

    pub fn ensure_physical(&self) -> Result<()> {
        if self.physical {
            Ok(())
        } else {
            Err(Error::NonPhysical { min_eigenvalue: self.min_eigenvalue })
        }
    }

    /// Tr ρ², from the reconstructed 4×4 density matrix.
    pub fn purity(&self) -> f64 {
        let rho = density::density_matrix(&self.a.0, &self.b.0, &self.e.diagonal());
        (rho * rho).trace().re
    }
}

/// Rank-1 projective observable along a unit Bloch axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    axis: Vec3,
}

impl Observable {
    /// Accepts vectors already of unit length (within 1e−9) and renormalizes.
    pub fn new(axis: Vec3) -> Result<Self> {
        Ok(Self { axis: unit(axis)? })
    }

    /// Normalizes any finite nonzero vector.
    pub fn from_direction(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidInput(format!("cannot normalize {v:?}")));
        }
        Ok(Self { axis: v / norm })
    }

    pub fn x() -> Self {
        Self { axis: Vec3::x() }
    }

    pub fn y() -> Self {
        Self { axis: Vec3::y() }
    }

    pub fn z() -> Self {
        Self { axis: Vec3::z() }
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }
}

/// (n̂ on A, m̂ on B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservablePair {
    pub n: Observable,
    pub m: Observable,
}

impl ObservablePair {
    pub fn new(n: Observable, m: Observable) -> Self {
        Self { n, m }
    }
}

/// Outcome table of a joint local measurement. Index 0 is the `+` outcome,
/// index 1 the `−` outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pub p: [[f64; 2]; 2],
    pub pa: [f64; 2],
    pub pb: [f64; 2],
    /// The correlation scalar n̂Em̂ᵀ.
    pub x: f64,
}

impl JointDistribution {
    /// p_ij = (1 + i·α + j·β + ij·x)/4 with α = n̂·a⃗, β = m̂·b⃗.
    pub fn from_moments(alpha: f64, beta: f64, x: f64) -> Self {
        let mut p = [[0.0; 2]; 2];
        for (r, i) in [1.0, -1.0].into_iter().enumerate() {
            for (c, j) in [1.0, -1.0].into_iter().enumerate() {
                p[r][c] = clamp_prob((1.0 + i * alpha + j * beta + i * j * x) / 4.0);
            }
        }
        Self {
            p,
            pa: [clamp_prob((1.0 + alpha) / 2.0), clamp_prob((1.0 - alpha) / 2.0)],
            pb: [clamp_prob((1.0 + beta) / 2.0), clamp_prob((1.0 - beta) / 2.0)],
            x,
        }
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }
}

/// Joint outcome probabilities of measuring n̂ on A and m̂ on B.
pub fn joint_distribution(state: &TwoQubitState, pair: &ObservablePair) -> Result<JointDistribution> {
    state.ensure_physical()?;
    Ok(joint_distribution_unchecked(state, pair))
}

/// [`joint_distribution`] without the positivity gate.
pub fn joint_distribution_unchecked(state: &TwoQubitState, pair: &ObservablePair) -> JointDistribution {
    let n = pair.n.axis();
    let m = pair.m.axis();
    JointDistribution::from_moments(n.dot(&state.a.0), m.dot(&state.b.0), state.e.bilinear(&n, &m))
}

/// Membership of c⃗ in the tetrahedron with vertices (−1,−1,−1), (−1,1,1),
/// (1,−1,1), (1,1,−1). Each face inequality is one eigenvalue of the MMMS
/// density matrix (times four).
pub fn is_in_tetrahedron(c: &Vec3) -> bool {
    tetrahedron_faces(c).iter().all(|&f| f >= -TETRAHEDRON_TOL)
}

/// The four values 1 ∓ … whose non-negativity defines the tetrahedron.
pub fn tetrahedron_faces(c: &Vec3) -> [f64; 4] {
    [
        1.0 - c.x - c.y - c.z,
        1.0 - c.x + c.y + c.z,
        1.0 + c.x - c.y + c.z,
        1.0 + c.x + c.y - c.z,
    ]
}

fn mmms_min_eigenvalue(c: &Vec3) -> f64 {
    tetrahedron_faces(c).iter().fold(f64::INFINITY, |acc, &f| acc.min(f / 4.0))
}

fn unit(v: Vec3) -> Result<Vec3> {
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::InvalidInput(format!("expected a unit vector, |v| = {norm}")));
    }
    Ok(v / norm)
}

pub(crate) fn clamp_prob(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}
