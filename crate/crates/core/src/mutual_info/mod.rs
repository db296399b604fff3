//! Mutual information between local observables and its Haar averages.
//!
//! For an MMMS the joint table depends on x = n̂Em̂ᵀ only and
//!
//! I(x) = ½[(1 − x) log₂(1 − x) + (1 + x) log₂(1 + x)].
//!
//! Averaging over n̂ first gives a closed form in R = |Em̂|²; averaging that
//! over m̂ is closed-form for the single-axis and isotropic directions and is
//! done by quadrature otherwise.

mod lerch;

use std::f64::consts::LN_2;

pub use lerch::lerch_phi_2_3half;

use crate::bloch::{joint_distribution, ObservablePair, Observable, TwoQubitState};
use crate::error::{Error, Result};
use crate::sphere::{average_s2, average_s2x_s2, QuadratureSpec};

/// |x| within this distance of 1 is treated as perfect (anti)correlation.
pub const EDGE_TOL: f64 = 1e-12;

/// Default tolerance used to compare singular values in [`omega_max_dim`].
pub const DEGENERACY_TOL: f64 = 1e-9;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Below this argument the closed forms are replaced by their power series.
const SERIES_R: f64 = 0.05;

/// Shannon entropy in bits; zero entries contribute nothing.
pub fn shannon_entropy<'a, I>(probs: I) -> f64
where
    I: IntoIterator<Item = &'a f64>,
{
    probs.into_iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// I(x) for maximally mixed marginals, in bits.
pub fn mi_from_correlation(x: f64) -> f64 {
    let ax = x.abs();
    if ax >= 1.0 - EDGE_TOL {
        return 1.0;
    }
    0.5 * ((1.0 - ax) * (1.0 - ax).log2() + (1.0 + ax) * (1.0 + ax).log2())
}

/// Mutual information of the joint outcome table of (n̂ on A, m̂ on B).
pub fn mutual_information(state: &TwoQubitState, pair: &ObservablePair) -> Result<f64> {
    if state.is_mmms() {
        state.ensure_physical()?;
        let x = state.e.bilinear(&pair.n.axis(), &pair.m.axis());
        return Ok(mi_from_correlation(x));
    }
    let jd = joint_distribution(state, pair)?;
    let h = shannon_entropy(&jd.pa) + shannon_entropy(&jd.pb) - shannon_entropy(jd.p.iter().flatten());
    Ok(h.clamp(0.0, 1.0))
}

/// ⟨I⟩ over n̂ at fixed m̂, for an MMMS.
pub fn avg_mi_single(state: &TwoQubitState, m: &Observable) -> Result<f64> {
    require_mmms(state)?;
    let em = state.e.apply(&m.axis());
    avg_mi_single_from_r(em.norm_squared())
}

/// [(1 + R) atanh√R − √R (1 − ln(1 − R))] / (√R ln 4), with R = |Em̂|².
pub fn avg_mi_single_from_r(r: f64) -> Result<f64> {
    if !(0.0..=1.0 + EDGE_TOL).contains(&r) {
        return Err(Error::Domain(format!("R must lie in [0, 1), got {r}")));
    }
    if r >= 1.0 {
        return Ok((2.0 * LN_2 - 1.0) / (2.0 * LN_2));
    }
    if r < SERIES_R {
        return Ok(single_series(r));
    }
    let s = r.sqrt();
    Ok(((1.0 + r) * s.atanh() - s * (1.0 - (-r).ln_1p())) / (s * 2.0 * LN_2))
}

/// (1/2ln2) Σₕ Rʰ / (h(2h − 1)(2h + 1)).
fn single_series(r: f64) -> f64 {
    let mut sum = 0.0;
    let mut rh = 1.0;
    for h in 1..200 {
        rh *= r;
        let hf = h as f64;
        let term = rh / (hf * (2.0 * hf - 1.0) * (2.0 * hf + 1.0));
        sum += term;
        if term < 1e-18 * sum.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum / (2.0 * LN_2)
}

/// ⟨I⟩ over S²×S² for the single-axis ("classical") direction ĉ = ẑ.
pub fn avg_mi_classical(kappa: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::Domain(format!("classical average needs 0 ≤ κ ≤ 1, got {kappa}")));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if kappa * kappa < SERIES_R {
        return Ok(classical_series(kappa));
    }
    let k2 = kappa * kappa;
    if kappa == 1.0 {
        let phi = lerch::lerch_phi_2_3half_closed(1.0);
        return Ok((8.0 * LN_2 - 6.0 + phi) / (8.0 * LN_2));
    }
    let phi = lerch::lerch_phi_2_3half_closed(k2);
    let num = -6.0 * kappa + (6.0 + 2.0 * k2) * kappa.atanh() + kappa.powi(3) * phi + 4.0 * kappa * (-k2).ln_1p();
    Ok(num / (8.0 * kappa * LN_2))
}

/// (1/2ln2) Σₕ κ²ʰ / (h(2h − 1)(2h + 1)²).
fn classical_series(kappa: f64) -> f64 {
    let k2 = kappa * kappa;
    let mut sum = 0.0;
    let mut kh = 1.0;
    for h in 1..200 {
        kh *= k2;
        let hf = h as f64;
        let term = kh / (hf * (2.0 * hf - 1.0) * (2.0 * hf + 1.0).powi(2));
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum / (2.0 * LN_2)
}

/// ⟨I⟩ over S²×S² for isotropic correlations, |c₁| = |c₂| = |c₃| = κ/√3.
pub fn avg_mi_isotropic(kappa: f64) -> Result<f64> {
    if !(0.0..=SQRT3 + EDGE_TOL).contains(&kappa) {
        return Err(Error::Domain(format!("isotropic average needs 0 ≤ κ ≤ √3, got {kappa}")));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let y = kappa / SQRT3;
    if y * y < SERIES_R {
        return Ok(single_series(y * y));
    }
    if y >= 1.0 {
        return Ok((2.0 * LN_2 - 1.0) / (2.0 * LN_2));
    }
    let k2 = kappa * kappa;
    let ln4 = 2.0 * LN_2;
    let first = (3.0 + k2) * y.atanh() / (SQRT3 * kappa * ln4);
    let second = SQRT3 * kappa * (1.0 - (-k2 / 3.0).ln_1p()) / (SQRT3 * kappa * ln4);
    Ok(first - second)
}

/// ⟨I⟩ over S²×S² for an arbitrary MMMS: the n̂ average is taken in closed
/// form and the m̂ average by quadrature. Orders are doubled when a
/// singular value is within 1e−6 of one.
pub fn avg_mi_general(state: &TwoQubitState, quad: &QuadratureSpec) -> Result<f64> {
    require_mmms(state)?;
    state.ensure_physical()?;
    let s2 = state.e.squared_singular_values();
    let quad = if s2.max() > 1.0 - 1e-6 { quad.doubled() } else { *quad };
    let f = |m: &crate::Vec3| {
        let r = s2.dot(&m.component_mul(m)).min(1.0);
        avg_mi_single_from_r(r).expect("R stays in [0, 1] for physical states")
    };
    Ok(average_s2(f, &quad))
}

/// Brute-force ⟨I⟩ by tensor-product quadrature of I(n̂Em̂ᵀ) over both spheres.
pub fn avg_mi_double_sphere(state: &TwoQubitState, quad: &QuadratureSpec) -> Result<f64> {
    require_mmms(state)?;
    let e = state.e;
    Ok(average_s2x_s2(|n, m| mi_from_correlation(e.bilinear(n, m)), quad))
}

/// Dimension of the manifold of maximally correlated observable pairs.
pub fn omega_max_dim(state: &TwoQubitState) -> Result<u8> {
    omega_max_dim_with_tol(state, DEGENERACY_TOL)
}

pub fn omega_max_dim_with_tol(state: &TwoQubitState, tol: f64) -> Result<u8> {
    require_mmms(state)?;
    if state.kappa() == 0.0 {
        return Err(Error::DegenerateInput("Ω_Max is undefined for κ = 0".into()));
    }
    let c = state.c_hat();
    let mut s = [c.x.abs(), c.y.abs(), c.z.abs()];
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(if s[0] - s[2] <= tol {
        2
    } else if s[0] - s[1] <= tol {
        1
    } else {
        0
    })
}

fn require_mmms(state: &TwoQubitState) -> Result<()> {
    if state.is_mmms() {
        Ok(())
    } else {
        Err(Error::InvalidInput("operation is defined for maximally mixed marginals only".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{joint_distribution, Vec3};
    use crate::density;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn product_state_has_no_information() {
        let s = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        let pair = ObservablePair::new(Observable::x(), Observable::z());
        assert_eq!(mutual_information(&s, &pair).unwrap(), 0.0);
    }

    #[test]
    fn singlet_aligned_pair_is_one_bit() {
        let c_hat = -Vec3::new(1.0, 1.0, 1.0) / SQRT3;
        let s = TwoQubitState::mmms(SQRT3, c_hat).unwrap();
        let n = Observable::from_direction(Vec3::new(0.3, -0.7, 0.2)).unwrap();
        assert_eq!(mutual_information(&s, &ObservablePair::new(n, n)).unwrap(), 1.0);
    }

    #[test]
    fn closed_form_matches_shannon_table() {
        let s = TwoQubitState::mmms(0.5, Vec3::z()).unwrap();
        let pair = ObservablePair::new(Observable::z(), Observable::z());
        let got = mutual_information(&s, &pair).unwrap();
        close(got, 0.188_721_875_540_867_14, 1e-15);
        let jd = joint_distribution(&s, &pair).unwrap();
        let h = shannon_entropy(&jd.pa) + shannon_entropy(&jd.pb) - shannon_entropy(jd.p.iter().flatten());
        close(got, h, 1e-15);
    }

    #[test]
    fn general_state_matches_trace_oracle() {
        let a = Vec3::new(0.1, -0.2, 0.3);
        let b = Vec3::new(-0.2, 0.1, 0.25);
        let e = Vec3::new(0.3, -0.2, 0.4);
        let s = TwoQubitState::new(a, b, e).unwrap();
        let n = Vec3::new(0.2, 0.5, -0.8).normalize();
        let m = Vec3::new(-0.6, 0.1, 0.3).normalize();
        let pair = ObservablePair::new(Observable::new(n).unwrap(), Observable::new(m).unwrap());
        let jd = joint_distribution(&s, &pair).unwrap();
        let rho = density::density_matrix(&a, &b, &e);
        for (r, i) in [1.0, -1.0].into_iter().enumerate() {
            for (c, j) in [1.0, -1.0].into_iter().enumerate() {
                close(jd.p[r][c], density::joint_probability(&rho, &n, i, &m, j), 1e-14);
            }
        }
        let mi = mutual_information(&s, &pair).unwrap();
        assert!(mi > 0.0 && mi < 1.0);
    }

    #[test]
    fn single_average_limits() {
        assert_eq!(avg_mi_single_from_r(0.0).unwrap(), 0.0);
        close(avg_mi_single_from_r(1.0).unwrap(), 0.278_652_479_555_518_3, 1e-15);
        assert!(avg_mi_single_from_r(1.1).is_err());
        for (r, want) in [(0.01, 0.002_406_903_125_297_613_6), (0.3, 0.074_511_769_231_216_19), (0.64, 0.166_273_448_628_497_2), (0.99, 0.275_086_664_793_854_2)] {
            close(avg_mi_single_from_r(r).unwrap(), want, 1e-14);
        }
        // series and closed form agree at the switch point
        let s = single_series(SERIES_R);
        let rs = SERIES_R.sqrt();
        let closed = ((1.0 + SERIES_R) * rs.atanh() - rs * (1.0 - (-SERIES_R).ln_1p())) / (rs * 2.0 * LN_2);
        close(s, closed, 1e-15);
    }

    #[test]
    fn single_average_matches_quadrature() {
        let s = TwoQubitState::mmms(0.8, Vec3::z()).unwrap();
        let m = Observable::z();
        let e = s.e;
        let quad = average_s2(|n| mi_from_correlation(e.bilinear(n, &m.axis())), &QuadratureSpec::default());
        close(avg_mi_single(&s, &m).unwrap(), quad, 1e-8);
    }

    #[test]
    fn classical_reference_values() {
        let cases = [
            (0.01, 8.015_020_540_199_283e-6),
            (0.1, 0.000_801_979_127_904_331_4),
            (0.3, 0.007_253_165_115_495_057),
            (0.5, 0.020_354_717_449_590_556),
            (0.9, 0.068_815_746_044_247_53),
            (0.99, 0.084_653_487_771_410_89),
            (1.0, 0.086_558_031_700_514_83),
        ];
        for (k, want) in cases {
            close(avg_mi_classical(k).unwrap(), want, 1e-14);
        }
        assert_eq!(avg_mi_classical(0.0).unwrap(), 0.0);
        assert!(avg_mi_classical(1.01).is_err());
    }

    #[test]
    fn isotropic_reference_values() {
        let cases = [
            (0.1, 0.000_801_764_665_484_190_3),
            (0.5, 0.020_208_529_595_016_517),
            (1.0, 0.083_118_627_418_093_62),
            (1.7, 0.265_830_215_889_015_56),
        ];
        for (k, want) in cases {
            close(avg_mi_isotropic(k).unwrap(), want, 1e-14);
        }
        assert!(avg_mi_isotropic(SQRT3 - 1e-8).unwrap().is_finite());
        assert!(avg_mi_isotropic(1.8).is_err());
    }

    #[test]
    fn general_average_reduces_to_closed_forms() {
        let q = QuadratureSpec::default();
        let iso = TwoQubitState::mmms(0.7, -Vec3::new(1.0, 1.0, 1.0) / SQRT3).unwrap();
        close(avg_mi_general(&iso, &q).unwrap(), avg_mi_isotropic(0.7).unwrap(), 1e-7);
        let cl = TwoQubitState::mmms(0.7, Vec3::z()).unwrap();
        close(avg_mi_general(&cl, &q).unwrap(), avg_mi_classical(0.7).unwrap(), 1e-7);
        let zero = TwoQubitState::mmms(0.0, Vec3::x()).unwrap();
        assert_eq!(avg_mi_general(&zero, &q).unwrap(), 0.0);
    }

    #[test]
    fn omega_max_classes() {
        let cl = TwoQubitState::mmms(0.5, Vec3::z()).unwrap();
        assert_eq!(omega_max_dim(&cl).unwrap(), 0);
        let eps = TwoQubitState::mmms(0.5, Vec3::new(1.0, 1.0, 0.0).normalize()).unwrap();
        assert_eq!(omega_max_dim(&eps).unwrap(), 1);
        let iso = TwoQubitState::mmms(0.5, Vec3::new(1.0, 1.0, 1.0).normalize()).unwrap();
        assert_eq!(omega_max_dim(&iso).unwrap(), 2);
        let zero = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        assert!(matches!(omega_max_dim(&zero), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn mi_strictly_increases_with_kappa() {
        let c_hat = Vec3::new(0.2, -0.5, 0.6).normalize();
        let n = Vec3::new(0.1, 0.4, 0.9).normalize();
        let m = Vec3::new(-0.3, -0.2, 0.7).normalize();
        let pair = ObservablePair::new(Observable::new(n).unwrap(), Observable::new(m).unwrap());
        let mut prev = -1.0;
        for k in 1..=10 {
            let s = TwoQubitState::mmms(0.05 * k as f64, c_hat).unwrap();
            let v = mutual_information(&s, &pair).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}
