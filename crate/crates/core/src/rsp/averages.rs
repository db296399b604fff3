//! Averages over targets n̂ ∈ S², closed forms and quadrature.

use std::f64::consts::{LN_2, PI};

use super::{evaluate, rsp_scalars, BetaPolicy, RspScalars, RspTask};
use crate::bloch::{Observable, TwoQubitState, Vec3};
use crate::error::{Error, Result};
use crate::mutual_info::mi_from_correlation;
use crate::sphere::{mc_average_s2, piecewise_nodes, Frame, McEstimate, McSpec, QuadratureSpec};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// ⟨F⟩ for isotropic correlations: 1 − log₂(1 + κ/√3).
pub fn avg_f_3iso(kappa: f64) -> Result<f64> {
    check_range(kappa, SQRT3, "isotropic")?;
    Ok(1.0 - (kappa / SQRT3).ln_1p() / LN_2)
}

/// ⟨𝒢⟩ for isotropic correlations: I(κ/√3).
pub fn avg_gain_3iso(kappa: f64) -> Result<f64> {
    check_range(kappa, SQRT3, "isotropic")?;
    Ok(mi_from_correlation(kappa / SQRT3))
}

/// ⟨F⟩ for ĉ = ẑ: 1 − ((1 + κ)ln(1 + κ) − κ)/(κ ln 2).
pub fn avg_f_2iso0(kappa: f64) -> Result<f64> {
    check_range(kappa, 1.0, "single-axis")?;
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let inner = if kappa < 1e-2 {
        // Σ_{j≥2} (−κ)ʲ / (j(j − 1)), divided by κ
        let mut sum = 0.0;
        let mut p = 1.0;
        for j in 2..40 {
            p *= -kappa;
            sum += -p / (j * (j - 1)) as f64;
        }
        sum
    } else {
        ((1.0 + kappa) * kappa.ln_1p() - kappa) / kappa
    };
    Ok(1.0 - inner / LN_2)
}

/// ⟨𝒢⟩ for ĉ = ẑ: [(1 + κ)² ln(1 + κ) − (1 − κ)² ln(1 − κ) − 2κ]/(4κ ln 2).
pub fn avg_gain_2iso0(kappa: f64) -> Result<f64> {
    check_range(kappa, 1.0, "single-axis")?;
    if kappa == 0.0 {
        return Ok(0.0);
    }
    if kappa < 0.1 {
        let k2 = kappa * kappa;
        let mut sum = 0.0;
        let mut p = 1.0;
        for h in 1..40 {
            p *= k2;
            let hf = h as f64;
            sum += p / (2.0 * hf * (2.0 * hf - 1.0) * (2.0 * hf + 1.0));
        }
        return Ok(sum / LN_2);
    }
    let minus = if kappa == 1.0 { 0.0 } else { (1.0 - kappa).powi(2) * (-kappa).ln_1p() };
    Ok(((1.0 + kappa).powi(2) * kappa.ln_1p() - minus - 2.0 * kappa) / (4.0 * kappa * LN_2))
}

/// (⟨𝒢⟩_single-axis − ⟨𝒢⟩_iso)/⟨𝒢⟩_iso at equal κ.
pub fn delta_gain(kappa: f64) -> Result<f64> {
    check_positive(kappa)?;
    let iso = avg_gain_3iso(kappa)?;
    Ok((avg_gain_2iso0(kappa)? - iso) / iso)
}

/// (⟨F⟩_single-axis − ⟨F⟩_iso)/⟨F⟩_iso at equal κ.
pub fn delta_fom(kappa: f64) -> Result<f64> {
    check_positive(kappa)?;
    let iso = avg_f_3iso(kappa)?;
    Ok((avg_f_2iso0(kappa)? - iso) / iso)
}

/// ⟨𝒢^U⟩ for a⃗ = 0, |b⃗| = b and isotropic E, valid while every target is
/// useful (κ/√3 > b):
/// ⟨𝒢⟩_iso + (1 − (f(1) − f(−1))/(6b))/ln 2, f(±1) = (1 ± b)(3 ± κ√3) ln(1 ± b).
pub fn avg_gain_isotropic_nonmmms(kappa: f64, b: f64) -> Result<f64> {
    let t = kappa / SQRT3;
    if b.is_nan() || t.is_nan() || b < 0.0 || t <= b {
        return Err(Error::Domain(format!(
            "closed form needs κ/√3 > b ≥ 0 (κ/√3 = {t}, b = {b}); use average_over_relevant"
        )));
    }
    super::isotropic_nonmmms(kappa, b)?;
    let base = avg_gain_3iso(kappa)?;
    if b == 0.0 {
        return Ok(base);
    }
    let k3 = kappa * SQRT3;
    let f_plus = (1.0 + b) * (3.0 + k3) * b.ln_1p();
    let f_minus = if b == 1.0 { 0.0 } else { (1.0 - b) * (3.0 - k3) * (-b).ln_1p() };
    Ok(base + (1.0 - (f_plus - f_minus) / (6.0 * b)) / LN_2)
}

fn check_range(kappa: f64, max: f64, what: &str) -> Result<()> {
    if !(0.0..=max + 1e-12).contains(&kappa) {
        return Err(Error::Domain(format!("{what} average needs 0 ≤ κ ≤ {max}, got {kappa}")));
    }
    Ok(())
}

fn check_positive(kappa: f64) -> Result<()> {
    if kappa.is_nan() || kappa <= 0.0 {
        return Err(Error::Domain(format!("relative difference needs κ > 0, got {kappa}")));
    }
    Ok(())
}

/// Target averages of the standard and optimized protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RspAverages {
    /// ⟨F^U⟩, the standard protocol that always uses the correlations.
    pub f_u: f64,
    pub f_un: f64,
    pub f_opt: f64,
    /// ⟨𝒢 χ_U⟩.
    pub gain: f64,
    /// ⟨F^U − F^opt⟩.
    pub delta_f: f64,
    /// Measure of the useful set.
    pub useful_fraction: f64,
}

/// Quadrature pole: b̂ when b⃗ ≠ 0, otherwise the axis of the largest |cᵢ|.
fn relevant_frame(state: &TwoQubitState) -> Frame {
    let b = state.b.0;
    if b.norm() > 1e-12 {
        return Frame::with_pole(&b);
    }
    let c = state.correlation_vector().abs();
    let k = c.imax();
    Frame::with_pole(&Vec3::ith(k, 1.0))
}

/// cos θ values along the meridian at φ where |n̂E|² = (n̂·b⃗)².
fn usefulness_breaks(state: &TwoQubitState, frame: &Frame, phi: f64) -> Vec<f64> {
    let b = state.b.0;
    if b.norm() <= 1e-12 {
        return Vec::new();
    }
    let g = |u: f64| {
        let n = frame.point(u, phi);
        state.e.apply(&n).norm_squared() - n.dot(&b).powi(2)
    };
    const SAMPLES: usize = 64;
    let mut roots = Vec::new();
    let mut u0 = -1.0;
    let mut g0 = g(u0);
    for k in 1..=SAMPLES {
        let u1 = -1.0 + 2.0 * k as f64 / SAMPLES as f64;
        let g1 = g(u1);
        if g0 == 0.0 {
            roots.push(u0);
        } else if g0 * g1 < 0.0 {
            let (mut lo, mut hi, mut glo) = (u0, u1, g0);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm * glo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
                if hi - lo < 1e-15 {
                    break;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        u0 = u1;
        g0 = g1;
    }
    roots
}

/// Averages over targets n̂ of the per-target evaluation, with β̂ from
/// `policy`. The usefulness boundary is located on every meridian and used
/// as a panel break, so the indicator and the min in F^opt stay resolved.
pub fn average_over_relevant(state: &TwoQubitState, policy: &BetaPolicy, quad: &QuadratureSpec) -> Result<RspAverages> {
    state.ensure_physical()?;
    quad.validate()?;
    let frame = relevant_frame(state);
    let nodes = piecewise_nodes(&frame, quad, |phi| usefulness_breaks(state, &frame, phi));
    let mut acc = [0.0; 6];
    for (n, w) in &nodes {
        let task = RspTask::with_policy(Observable::from_direction(*n)?, policy);
        let ev = evaluate(state, &task)?;
        let useful = if ev.useful { 1.0 } else { 0.0 };
        for (slot, v) in acc.iter_mut().zip([ev.f_u, ev.f_un, ev.f_opt, ev.gain, ev.f_u - ev.f_opt, useful]) {
            *slot += w * v;
        }
    }
    Ok(RspAverages {
        f_u: acc[0],
        f_un: acc[1],
        f_opt: acc[2],
        gain: acc[3],
        delta_f: acc[4],
        useful_fraction: acc[5].clamp(0.0, 1.0),
    })
}

/// Monte-Carlo estimate of one field of the per-target scalars.
pub fn mc_average_rsp<F>(state: &TwoQubitState, spec: &McSpec, field: F) -> Result<McEstimate>
where
    F: Fn(&RspScalars) -> f64 + Sync,
{
    state.ensure_physical()?;
    let (e, b, mmms) = (state.e, state.b.0, state.is_mmms());
    Ok(mc_average_s2(|n| field(&rsp_scalars(e.apply(n).norm(), n.dot(&b).abs(), mmms)), spec))
}

/// min over β̂ of the average of |En̂|² on the great circle ⊥ β̂:
/// κ²(c_a² + c_b²)/2 over the two smallest |cᵢ|.
pub fn min_beta_avg_payoff(state: &TwoQubitState) -> Result<f64> {
    if !state.is_mmms() {
        return Err(Error::InvalidInput("defined for maximally mixed marginals only".into()));
    }
    let mut s2 = state.e.squared_singular_values();
    s2.as_mut_slice().sort_by(f64::total_cmp);
    Ok(0.5 * (s2[0] + s2[1]))
}

/// Average of |En̂|² over the great circle orthogonal to β̂, by the
/// trapezoid rule in the circle angle.
pub fn circle_avg_payoff(state: &TwoQubitState, beta: &Vec3) -> f64 {
    let frame = Frame::with_pole(beta);
    const POINTS: usize = 64;
    (0..POINTS)
        .map(|k| state.e.apply(&frame.point(0.0, 2.0 * PI * k as f64 / POINTS as f64)).norm_squared())
        .sum::<f64>()
        / POINTS as f64
}

/// Direct minimization of [`circle_avg_payoff`] over β̂: a θ–φ grid on the
/// upper hemisphere followed by pattern search from the best grid point.
pub fn min_beta_avg_payoff_grid(state: &TwoQubitState, n_grid: usize) -> f64 {
    let n_grid = n_grid.max(4);
    let dir = |th: f64, ph: f64| Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
    let obj = |th: f64, ph: f64| circle_avg_payoff(state, &dir(th, ph));
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=n_grid {
        let th = 0.5 * PI * i as f64 / n_grid as f64;
        for j in 0..2 * n_grid {
            let ph = PI * j as f64 / n_grid as f64;
            let v = obj(th, ph);
            if v < best.0 {
                best = (v, th, ph);
            }
        }
    }
    let (mut v, mut th, mut ph) = best;
    let mut step = PI / n_grid as f64;
    while step > 1e-10 {
        let mut moved = false;
        for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let cand = obj(th + dt, ph + dp);
            if cand < v {
                v = cand;
                th += dt;
                ph += dp;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    v
}
