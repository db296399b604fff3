//! Signed-permutation orbits of correlation directions.
//!
//! An element (s, σ) maps ĉ to d̂ with dᵢ = sᵢ c_σ(i). The 48 elements form
//! the hyperoctahedral group. The 24 with s₁s₂s₃ = +1 are realizable by
//! local rotations on both qubits; the remaining 24 additionally need the
//! spin flip ĉ → −ĉ, which is positive only on 𝒯 ∩ −𝒯.

use nalgebra::Matrix3;

use crate::bloch::{is_in_tetrahedron, Vec3};
use crate::error::{Error, Result};

/// Default tolerance for comparing components.
pub const CLASS_TOL: f64 = 1e-9;

/// Gaps below this (but above the tolerance) raise the boundary flag.
pub const BOUNDARY_BAND: f64 = 1e-6;

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitElement {
    pub signs: [i8; 3],
    pub perm: [usize; 3],
}

impl OrbitElement {
    pub fn identity() -> Self {
        Self { signs: [1, 1, 1], perm: [0, 1, 2] }
    }

    pub fn new(signs: [i8; 3], perm: [usize; 3]) -> Result<Self> {
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidInput(format!("signs must be ±1, got {signs:?}")));
        }
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of 0..3")));
            }
            seen[p] = true;
        }
        Ok(Self { signs, perm })
    }

    /// All 48 elements, proper ones first.
    pub fn all() -> Vec<Self> {
        let mut out = Vec::with_capacity(48);
        for perm in PERMUTATIONS {
            for bits in 0..8u8 {
                let signs = [0, 1, 2].map(|k| if bits >> k & 1 == 1 { -1 } else { 1 });
                out.push(Self { signs, perm });
            }
        }
        out.sort_by_key(|e| !e.is_proper());
        out
    }

    pub fn apply(&self, c: &Vec3) -> Vec3 {
        Vec3::from_fn(|i, _| f64::from(self.signs[i]) * c[self.perm[i]])
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            signs: [0, 1, 2].map(|i| self.signs[i] * other.signs[self.perm[i]]),
            perm: [0, 1, 2].map(|i| other.perm[self.perm[i]]),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut perm = [0; 3];
        for i in 0..3 {
            perm[self.perm[i]] = i;
        }
        Self { signs: [0, 1, 2].map(|j| self.signs[perm[j]]), perm }
    }

    /// s₁s₂s₃ = +1: implementable with local rotations alone.
    pub fn is_proper(&self) -> bool {
        self.signs.iter().product::<i8>() == 1
    }

    fn permutation_sign(&self) -> f64 {
        let p = self.perm;
        let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        if inversions % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Orthogonal (O_A, O_B) with O_A diag(c⃗) O_Bᵀ = diag(d⃗). For proper
    /// elements both matrices are rotations; for the others their
    /// determinants differ and no pair of rotations exists.
    pub fn matrices(&self) -> (Matrix3<f64>, Matrix3<f64>) {
        let mut p = Matrix3::zeros();
        for i in 0..3 {
            p[(i, self.perm[i])] = 1.0;
        }
        let s = Matrix3::from_diagonal(&Vec3::from_fn(|i, _| f64::from(self.signs[i])));
        let flip = if self.is_proper() { self.permutation_sign() } else { 1.0 };
        (s * p * flip, p * flip)
    }

    /// Transforms B's local Bloch vector along with the correlations.
    pub fn co_rotate_b(&self, b: &Vec3) -> Vec3 {
        self.matrices().1 * b
    }

    /// Transforms A's local Bloch vector along with the correlations.
    pub fn co_rotate_a(&self, a: &Vec3) -> Vec3 {
        self.matrices().0 * a
    }
}

pub fn apply_orbit(el: &OrbitElement, c_hat: &Vec3) -> Vec3 {
    el.apply(c_hat)
}

/// Distinct images of ĉ under the 48 elements, in first-seen order.
pub fn orbit(c_hat: &Vec3, tol: f64) -> Vec<Vec3> {
    dedup(OrbitElement::all().iter().map(|e| e.apply(c_hat)), tol)
}

/// Images under proper and improper elements. The union is [`orbit`]; the
/// two lists coincide when −ĉ is already reachable by a rotation.
pub fn suborbits(c_hat: &Vec3, tol: f64) -> (Vec<Vec3>, Vec<Vec3>) {
    let all = OrbitElement::all();
    let (proper, improper): (Vec<&OrbitElement>, Vec<&OrbitElement>) = all.iter().partition(|e| e.is_proper());
    (
        dedup(proper.iter().map(|e| e.apply(c_hat)), tol),
        dedup(improper.iter().map(|e| e.apply(c_hat)), tol),
    )
}

/// Orbit members d̂ for which κd̂ stays inside 𝒯.
pub fn orbit_physical_subset(kappa: f64, c_hat: &Vec3) -> Vec<Vec3> {
    orbit(c_hat, CLASS_TOL).into_iter().filter(|d| is_in_tetrahedron(&(d * kappa))).collect()
}

/// Whether −c⃗ is also a valid correlation vector.
pub fn spin_flip_admissible(c_vec: &Vec3) -> Result<bool> {
    if !is_in_tetrahedron(c_vec) {
        return Err(Error::InvalidInput(format!("{c_vec:?} lies outside the tetrahedron")));
    }
    Ok(is_in_tetrahedron(&-c_vec))
}

fn dedup(points: impl Iterator<Item = Vec3>, tol: f64) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (q - p).amax() <= tol) {
            out.push(p);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymmetryClass {
    Iso3,
    /// Two equal moduli ε with the third √(1 − 2ε²).
    Iso2(f64),
    Iso2_0,
    Generic,
}

impl SymmetryClass {
    pub fn tag(&self) -> &'static str {
        match self {
            SymmetryClass::Iso3 => "Iso3",
            SymmetryClass::Iso2(_) => "Iso2",
            SymmetryClass::Iso2_0 => "Iso2_0",
            SymmetryClass::Generic => "Generic",
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            SymmetryClass::Iso2(e) => Some(*e),
            SymmetryClass::Iso2_0 => Some(0.0),
            _ => None,
        }
    }
}

/// Class plus a flag set when some component gap lies between the
/// tolerance and [`BOUNDARY_BAND`], where rounding could flip the verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub class: SymmetryClass,
    pub near_boundary: bool,
}

pub fn classify(c_hat: &Vec3, tol: f64) -> Result<Classification> {
    let norm = c_hat.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("ĉ must be a unit vector, |ĉ| = {norm}")));
    }
    let mut s = [c_hat.x.abs(), c_hat.y.abs(), c_hat.z.abs()];
    s.sort_by(f64::total_cmp);
    let gaps = [s[0], s[1] - s[0], s[2] - s[1]];
    let near_boundary = gaps.iter().any(|&g| g > tol && g < BOUNDARY_BAND);
    let class = if gaps[1] <= tol && gaps[2] <= tol {
        SymmetryClass::Iso3
    } else if s[0] <= tol && s[1] <= tol {
        SymmetryClass::Iso2_0
    } else if gaps[1] <= tol {
        SymmetryClass::Iso2(0.5 * (s[0] + s[1]))
    } else if gaps[2] <= tol {
        SymmetryClass::Iso2(0.5 * (s[1] + s[2]))
    } else {
        SymmetryClass::Generic
    };
    Ok(Classification { class, near_boundary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eps_dir(eps: f64) -> Vec3 {
        // 1 − 2ε² rounds to ~1e−16 at ε = 1/√2; treat that as an exact zero
        let z2 = 1.0 - 2.0 * eps * eps;
        Vec3::new(eps, eps, if z2 < 1e-12 { 0.0 } else { z2.sqrt() })
    }

    #[test]
    fn group_has_48_distinct_elements() {
        let all = OrbitElement::all();
        assert_eq!(all.len(), 48);
        for (i, a) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|b| a != b));
        }
        assert_eq!(all.iter().filter(|e| e.is_proper()).count(), 24);
    }

    #[test]
    fn composition_matches_sequential_application() {
        let c = Vec3::new(0.2, -0.5, 0.7);
        let all = OrbitElement::all();
        for a in &all {
            assert_eq!(a.compose(&a.inverse()), OrbitElement::identity());
            for b in &all {
                let ab = a.compose(b);
                assert!(all.contains(&ab));
                assert!((ab.apply(&c) - a.apply(&b.apply(&c))).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn documented_actions() {
        let iso = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let inv = OrbitElement::new([-1, -1, -1], [0, 1, 2]).unwrap();
        assert_eq!(apply_orbit(&inv, &iso), -iso);
        let swap = OrbitElement::new([1, 1, 1], [1, 0, 2]).unwrap();
        assert_eq!(swap.apply(&Vec3::new(0.6, 0.0, 0.8)), Vec3::new(0.0, 0.6, 0.8));
        assert!(OrbitElement::new([2, 1, 1], [0, 1, 2]).is_err());
        assert!(OrbitElement::new([1, 1, 1], [0, 0, 2]).is_err());
    }

    #[test]
    fn orbit_cardinalities() {
        assert_eq!(orbit(&(Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt()), CLASS_TOL).len(), 8);
        assert_eq!(orbit(&Vec3::z(), CLASS_TOL).len(), 6);
        assert_eq!(orbit(&eps_dir(0.5), CLASS_TOL).len(), 24);
        assert_eq!(orbit(&eps_dir(0.4), CLASS_TOL).len(), 24);
        assert_eq!(orbit(&eps_dir(0.5f64.sqrt()), CLASS_TOL).len(), 12);
        assert_eq!(orbit(&Vec3::new(0.2, 0.5, 0.71f64.sqrt()), CLASS_TOL).len(), 48);
    }

    #[test]
    fn matrices_reproduce_the_map() {
        let c = Vec3::new(0.3, -0.4, 0.866);
        for el in OrbitElement::all() {
            let (oa, ob) = el.matrices();
            let lhs = oa * Matrix3::from_diagonal(&c) * ob.transpose();
            assert!((lhs - Matrix3::from_diagonal(&el.apply(&c))).amax() < 1e-14);
            assert!((oa * oa.transpose() - Matrix3::identity()).amax() < 1e-14);
            if el.is_proper() {
                assert!((oa.determinant() - 1.0).abs() < 1e-14);
                assert!((ob.determinant() - 1.0).abs() < 1e-14);
            } else {
                assert!((oa.determinant() * ob.determinant() + 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn classification() {
        let iso = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        assert_eq!(classify(&iso, CLASS_TOL).unwrap().class, SymmetryClass::Iso3);
        assert_eq!(classify(&Vec3::new(0.0, -1.0, 0.0), CLASS_TOL).unwrap().class, SymmetryClass::Iso2_0);
        let g = Vec3::new(0.2, 0.5, 0.71f64.sqrt());
        assert_eq!(classify(&g, CLASS_TOL).unwrap().class, SymmetryClass::Generic);
        match classify(&eps_dir(0.5), CLASS_TOL).unwrap().class {
            SymmetryClass::Iso2(e) => assert!((e - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        match classify(&Vec3::new(-0.5f64.sqrt(), 0.0, 0.5f64.sqrt()), CLASS_TOL).unwrap().class {
            SymmetryClass::Iso2(e) => assert!((e - 0.5f64.sqrt()).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let near = Vec3::new(1e-7, 0.0, 1.0).normalize();
        assert!(classify(&near, CLASS_TOL).unwrap().near_boundary);
        assert!(classify(&Vec3::new(1.0, 1.0, 0.0), CLASS_TOL).is_err());
    }

    #[test]
    fn spin_flip() {
        assert!(spin_flip_admissible(&Vec3::zeros()).unwrap());
        assert!(!spin_flip_admissible(&Vec3::new(1.0, 1.0, -1.0)).unwrap());
        assert!(spin_flip_admissible(&Vec3::new(0.3, 0.3, 0.3)).unwrap());
        assert!(spin_flip_admissible(&Vec3::new(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn physical_subsets() {
        let iso = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        assert_eq!(orbit_physical_subset(3f64.sqrt(), &iso).len(), 4);
        assert_eq!(orbit_physical_subset(0.5, &iso).len(), 8);
        assert_eq!(orbit_physical_subset(1.0, &Vec3::z()).len(), 6);
        // the proper suborbit of a physical direction is always physical
        let c = Vec3::new(-0.5, -0.6, -0.624_499_799_839_839_8);
        let kept = orbit_physical_subset(1.2, &c);
        let (proper, _) = suborbits(&c, CLASS_TOL);
        for d in &proper {
            assert!(kept.iter().any(|k| (k - d).amax() < 1e-12));
        }
    }

    #[test]
    fn suborbits_of_isotropic_direction_are_opposite() {
        let iso = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let (p, m) = suborbits(&iso, CLASS_TOL);
        assert_eq!((p.len(), m.len()), (4, 4));
        for d in &p {
            assert!(m.iter().any(|e| (e + d).amax() < 1e-15));
        }
    }
}
