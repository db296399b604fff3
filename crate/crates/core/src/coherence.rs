//! Coherence of product measurement bases.
//!
//! For a product basis {Π_i(n̂) ⊗ Π_j(m̂)} the relative-entropy coherence is
//! Coh = H(p_ij) − S(ρ). For maximally mixed marginals H(p_ij) = 2 − I(n̂, m̂),
//! so coherence and mutual information are complementary at fixed state.

use crate::bloch::{joint_distribution, tetrahedron_faces, ObservablePair, TwoQubitState, Vec3};
use crate::density;
use crate::error::{Error, Result};
use crate::mutual_info::{avg_mi_general, mutual_information, shannon_entropy};
use crate::sphere::{average_s2x_s2, QuadratureSpec};
use crate::symmetry::{suborbits, CLASS_TOL};

/// Largest tolerated mismatch between H − S and 2 − I − S.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceBreakdown {
    pub h_basis: f64,
    pub s_vn: f64,
    pub coherence: f64,
}

/// S(ρ) in bits. Maximally mixed marginals use the closed-form spectrum,
/// other states the reconstructed density matrix.
pub fn von_neumann_entropy(state: &TwoQubitState) -> Result<f64> {
    state.ensure_physical()?;
    if state.is_mmms() {
        let faces = tetrahedron_faces(&state.correlation_vector());
        let probs = faces.map(|f| (f / 4.0).max(0.0));
        return Ok(shannon_entropy(&probs));
    }
    let rho = density::density_matrix(&state.a.0, &state.b.0, &state.e.diagonal());
    Ok(density::von_neumann_entropy(&rho))
}

pub fn coherence_of_basis(state: &TwoQubitState, pair: &ObservablePair) -> Result<CoherenceBreakdown> {
    require_mmms(state)?;
    let jd = joint_distribution(state, pair)?;
    let h_basis = shannon_entropy(jd.p.iter().flatten());
    let s_vn = von_neumann_entropy(state)?;
    let coherence = h_basis - s_vn;
    let via_mi = 2.0 - mutual_information(state, pair)? - s_vn;
    if (coherence - via_mi).abs() > IDENTITY_TOL {
        return Err(Error::Domain(format!(
            "coherence identity violated: H − S = {coherence}, 2 − I − S = {via_mi}"
        )));
    }
    Ok(CoherenceBreakdown { h_basis, s_vn, coherence })
}

/// ⟨Coh⟩ over S²×S², as 2 − ⟨I⟩ − S(ρ).
pub fn avg_coherence(state: &TwoQubitState, quad: &QuadratureSpec) -> Result<f64> {
    Ok(2.0 - avg_mi_general(state, quad)? - von_neumann_entropy(state)?)
}

/// ⟨Coh⟩ by direct double-sphere quadrature of the basis entropy.
pub fn avg_coherence_direct(state: &TwoQubitState, quad: &QuadratureSpec) -> Result<f64> {
    require_mmms(state)?;
    let s_vn = von_neumann_entropy(state)?;
    let e = state.e;
    let h = average_s2x_s2(
        |n, m| {
            let x = e.bilinear(n, m);
            let p = [(1.0 + x) / 4.0, (1.0 - x) / 4.0, (1.0 - x) / 4.0, (1.0 + x) / 4.0].map(|v: f64| v.max(0.0));
            shannon_entropy(&p)
        },
        quad,
    );
    Ok(h - s_vn)
}

/// ⟨Coh⟩ at every physical member of the two sub-orbits of ĉ (reached with
/// and without the spin flip).
pub fn suborbit_avg_coherence(kappa: f64, c_hat: &Vec3, quad: &QuadratureSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let (plus, minus) = suborbits(c_hat, CLASS_TOL);
    let eval = |dirs: Vec<Vec3>| -> Result<Vec<f64>> {
        dirs.into_iter()
            .filter_map(|d| TwoQubitState::mmms(kappa, d).ok())
            .map(|s| avg_coherence(&s, quad))
            .collect()
    };
    Ok((eval(plus)?, eval(minus)?))
}

fn require_mmms(state: &TwoQubitState) -> Result<()> {
    if state.is_mmms() {
        Ok(())
    } else {
        Err(Error::InvalidInput("coherence identity holds for maximally mixed marginals only".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::Observable;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn entropy_examples() {
        let mixed = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 2.0).abs() < 1e-15);
        let singlet = TwoQubitState::mmms(SQRT3, -Vec3::new(1.0, 1.0, 1.0) / SQRT3).unwrap();
        assert!(von_neumann_entropy(&singlet).unwrap().abs() < 1e-12);
        let cl = TwoQubitState::mmms(1.0, Vec3::z()).unwrap();
        assert!((von_neumann_entropy(&cl).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_spectrum_matches_density_matrix() {
        let s = TwoQubitState::mmms(0.9, Vec3::new(0.3, -0.5, 0.8).normalize()).unwrap();
        let rho = density::density_matrix(&Vec3::zeros(), &Vec3::zeros(), &s.correlation_vector());
        assert!((von_neumann_entropy(&s).unwrap() - density::von_neumann_entropy(&rho)).abs() < 1e-12);
    }

    #[test]
    fn coherence_examples() {
        let mixed = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        let pair = ObservablePair::new(Observable::x(), Observable::y());
        assert!(coherence_of_basis(&mixed, &pair).unwrap().coherence.abs() < 1e-14);

        let singlet = TwoQubitState::mmms(SQRT3, -Vec3::new(1.0, 1.0, 1.0) / SQRT3).unwrap();
        let n = Observable::from_direction(Vec3::new(0.2, 0.4, -0.3)).unwrap();
        let b = coherence_of_basis(&singlet, &ObservablePair::new(n, n)).unwrap();
        assert!((b.coherence - 1.0).abs() < 1e-12);

        let cl = TwoQubitState::mmms(1.0, Vec3::z()).unwrap();
        let b = coherence_of_basis(&cl, &ObservablePair::new(Observable::x(), Observable::x())).unwrap();
        assert!((b.coherence - 1.0).abs() < 1e-14);
        assert!((b.h_basis - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spin_flip_changes_entropy() {
        let c = Vec3::new(1.0, 1.0, 1.0) / SQRT3;
        let plus = TwoQubitState::mmms(0.5, c).unwrap();
        let minus = TwoQubitState::mmms(0.5, -c).unwrap();
        let d = von_neumann_entropy(&plus).unwrap() - von_neumann_entropy(&minus).unwrap();
        assert!(d.abs() > 1e-3);
    }

    #[test]
    fn averaged_identity_matches_direct_quadrature() {
        let s = TwoQubitState::mmms(0.6, Vec3::new(0.2, 0.5, -0.7).normalize()).unwrap();
        let q = QuadratureSpec::new(32, 64).unwrap();
        let a = avg_coherence(&s, &q).unwrap();
        let b = avg_coherence_direct(&s, &q).unwrap();
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn average_is_constant_on_each_suborbit() {
        let c = Vec3::new(0.2, 0.5, 0.71f64.sqrt());
        let q = QuadratureSpec::new(32, 64).unwrap();
        let (plus, minus) = suborbit_avg_coherence(0.5, &c, &q).unwrap();
        assert_eq!(plus.len(), 24);
        for group in [&plus, &minus] {
            assert!(group.iter().all(|v| (v - group[0]).abs() < 1e-9));
        }
    }
}
