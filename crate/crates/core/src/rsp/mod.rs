//! Remote state preparation with one classical bit.
//!
//! A measures m̂ on the first qubit and sends the outcome; on `−` B applies a π
//! rotation about β̂ ⊥ n̂. B's average output r⃗ is judged against the target
//! n̂ by F = 1 − log₂(1 + n̂·r⃗). When b⃗ ≠ 0 the optimized protocol lets A
//! decline to use the correlations whenever |n̂·b⃗| beats |n̂E|.

mod averages;
mod trials;

pub use averages::*;
pub use trials::*;

use crate::bloch::{BlochVector, Observable, ObservablePair, TwoQubitState, Vec3};
use crate::error::{Error, Result};
use crate::mutual_info::mi_from_correlation;

/// |n̂E| at or below this counts as no correlation with the target.
pub const ZERO_CORRELATION_TOL: f64 = 1e-12;

/// Largest |n̂·β̂| accepted for a task.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Outcome probabilities at or below this drop their branch.
pub const BRANCH_TOL: f64 = 1e-15;

/// Target n̂ for B and rotation axis β̂ ⊥ n̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RspTask {
    target: Observable,
    axis: Observable,
}

impl RspTask {
    pub fn new(target: Observable, axis: Observable) -> Result<Self> {
        let dot = target.axis().dot(&axis.axis());
        if dot.abs() > ORTHOGONALITY_TOL {
            return Err(Error::InvalidInput(format!("rotation axis must be orthogonal to the target (n̂·β̂ = {dot:.3e})")));
        }
        Ok(Self { target, axis })
    }

    pub fn with_policy(target: Observable, policy: &BetaPolicy) -> Self {
        let axis = Observable::from_direction(policy.beta_for(&target.axis())).expect("policy returns a unit vector");
        Self { target, axis }
    }

    pub fn target(&self) -> Observable {
        self.target
    }

    pub fn axis(&self) -> Observable {
        self.axis
    }
}

/// Rule choosing β̂ for each target when only n̂ is given.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BetaPolicy {
    /// ẑ × n̂ normalized, or x̂ × n̂ when n̂ ∥ ẑ.
    #[default]
    ZCross,
    /// The component of a fixed vector orthogonal to n̂, falling back to
    /// [`BetaPolicy::ZCross`] when the vector is parallel to n̂.
    Toward(Vec3),
}

impl BetaPolicy {
    pub fn beta_for(&self, n: &Vec3) -> Vec3 {
        match self {
            BetaPolicy::ZCross => {
                let v = Vec3::z().cross(n);
                if v.norm() > 1e-8 {
                    v.normalize()
                } else {
                    Vec3::x().cross(n).normalize()
                }
            }
            BetaPolicy::Toward(v) => {
                let w = v - n * v.dot(n);
                if w.norm() > 1e-8 {
                    w.normalize()
                } else {
                    BetaPolicy::ZCross.beta_for(n)
                }
            }
        }
    }
}

/// B's conditional states after A's measurement and the protocol's output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RspOutcome {
    pub p_plus: f64,
    pub p_minus: f64,
    /// `None` when the outcome has zero probability.
    pub r_plus: Option<BlochVector>,
    pub r_minus: Option<BlochVector>,
    pub r_final: BlochVector,
    pub degenerate: bool,
}

/// v ↦ 2(v·β̂)β̂ − v.
pub fn pi_reflect(v: &Vec3, beta: &Vec3) -> Vec3 {
    beta * (2.0 * v.dot(beta)) - v
}

/// Runs the standard protocol with A measuring m̂.
pub fn post_measurement(state: &TwoQubitState, m: &Observable, task: &RspTask) -> Result<RspOutcome> {
    state.ensure_physical()?;
    let m = m.axis();
    let beta = task.axis.axis();
    let alpha = m.dot(&state.a.0);
    let me = state.e.apply(&m);
    let b = state.b.0;
    // p_i r⃗_i, defined even when p_i vanishes
    let w_plus = (b + me) * 0.5;
    let w_minus = (b - me) * 0.5;
    let p_plus = crate::bloch::clamp_prob((1.0 + alpha) / 2.0);
    let p_minus = crate::bloch::clamp_prob((1.0 - alpha) / 2.0);
    let branch = |p: f64, w: Vec3| (p > BRANCH_TOL).then(|| BlochVector(w / p));
    Ok(RspOutcome {
        p_plus,
        p_minus,
        r_plus: branch(p_plus, w_plus),
        r_minus: branch(p_minus, w_minus),
        r_final: BlochVector(w_plus + pi_reflect(&w_minus, &beta)),
        degenerate: p_plus <= BRANCH_TOL || p_minus <= BRANCH_TOL,
    })
}

/// n̂^E = n̂E/|n̂E|.
pub fn optimal_measurement(state: &TwoQubitState, n: &Observable) -> Result<Observable> {
    let v = state.e.apply(&n.axis());
    if v.norm() <= ZERO_CORRELATION_TOL {
        return Err(Error::ZeroCorrelation);
    }
    Observable::from_direction(v)
}

/// F = 1 − log₂(1 + x) with x = n̂Em̂ᵀ, for A measuring `pair.n` and the
/// target `pair.m`. Returns +∞ when x ≤ −1 + 1e−15.
pub fn figure_of_merit(state: &TwoQubitState, pair: &ObservablePair) -> f64 {
    fom_from_correlation(state.e.bilinear(&pair.n.axis(), &pair.m.axis()))
}

pub fn fom_from_correlation(x: f64) -> f64 {
    if x <= -1.0 + 1e-15 {
        f64::INFINITY
    } else {
        1.0 - (1.0 + x).log2()
    }
}

/// Gain of the correlated procedure over the polarization-only one:
/// relative entropy of ((1 ± e)/2) with respect to ((1 ± β)/2).
pub fn gain_non_mmms(e: f64, beta: f64) -> f64 {
    let cross = |p: f64, q: f64| if p == 0.0 { 0.0 } else { p * q.log2() };
    mi_from_correlation(e) - cross(0.5 * (1.0 + e), 1.0 + beta) - cross(0.5 * (1.0 - e), 1.0 - beta)
}

/// Per-target record of the standard and optimized protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RspEvaluation {
    pub task: RspTask,
    /// n̂^E; `None` when E annihilates n̂.
    pub m_opt: Option<Observable>,
    /// |n̂E|.
    pub correlation: f64,
    /// |n̂·b⃗|.
    pub polarization: f64,
    pub f_u: f64,
    pub f_un: f64,
    pub f_opt: f64,
    pub useful: bool,
    pub gain: f64,
    /// Set when the computed gain came out negative.
    pub gain_flagged: bool,
    /// Positivity of ρ(a⃗ = 0, b⃗ = 0).
    pub stripped_physical: bool,
}

/// Scalar part of [`evaluate`]: depends on the target only through
/// e = |n̂E| and β = |n̂·b⃗|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RspScalars {
    pub f_u: f64,
    pub f_un: f64,
    pub f_opt: f64,
    pub useful: bool,
    pub gain: f64,
}

pub fn rsp_scalars(e: f64, beta: f64, mmms: bool) -> RspScalars {
    let f_u = fom_from_correlation(e);
    let f_un = fom_from_correlation(beta);
    let useful = e > ZERO_CORRELATION_TOL && e >= beta;
    let gain = match (useful, mmms) {
        (false, _) => 0.0,
        (true, true) => mi_from_correlation(e),
        (true, false) => gain_non_mmms(e, beta),
    };
    RspScalars { f_u, f_un, f_opt: f_u.min(f_un), useful, gain }
}

pub fn evaluate(state: &TwoQubitState, task: &RspTask) -> Result<RspEvaluation> {
    state.ensure_physical()?;
    let n = task.target.axis();
    let e = state.e.apply(&n).norm();
    let beta = n.dot(&state.b.0).abs();
    let m_opt = match optimal_measurement(state, &task.target) {
        Ok(m) => Some(m),
        Err(Error::ZeroCorrelation) => None,
        Err(other) => return Err(other),
    };
    let s = rsp_scalars(e, beta, state.is_mmms());
    Ok(RspEvaluation {
        task: *task,
        m_opt,
        correlation: e,
        polarization: beta,
        f_u: s.f_u,
        f_un: s.f_un,
        f_opt: s.f_opt,
        useful: s.useful,
        gain: s.gain,
        gain_flagged: s.gain < 0.0,
        stripped_physical: state.stripped().is_physical(),
    })
}

/// Sign test (n̂·r⃗₊)(n̂·r⃗₋) ≤ 0 on the conditional states for m̂ = n̂^E.
/// False when E annihilates n̂.
pub fn usefulness_condition_check(state: &TwoQubitState, task: &RspTask) -> Result<bool> {
    let m = match optimal_measurement(state, &task.target) {
        Ok(m) => m,
        Err(Error::ZeroCorrelation) => return Ok(false),
        Err(other) => return Err(other),
    };
    let out = post_measurement(state, &m, task)?;
    let n = task.target.axis();
    let product = match (out.r_plus, out.r_minus) {
        (Some(rp), Some(rm)) => n.dot(&rp.0) * n.dot(&rm.0),
        // a vanishing branch: compare the unnormalized p_i r⃗_i instead
        _ => {
            let me = state.e.apply(&m.axis());
            n.dot(&(state.b.0 + me)) * n.dot(&(state.b.0 - me))
        }
    };
    Ok(product <= 0.0)
}

/// Relative entropy between B's ±n̂ statistics with and without the
/// correlations, from the explicit outcome tables of the protocol run with
/// m̂ = n̂^E.
pub fn gain_from_tables(state: &TwoQubitState, task: &RspTask) -> Result<f64> {
    let m = optimal_measurement(state, &task.target)?;
    let out = post_measurement(state, &m, task)?;
    let n = task.target.axis();
    let x = n.dot(&out.r_final.0);
    let beta = n.dot(&state.b.0).abs();
    let p = [(1.0 + x) / 2.0, (1.0 - x) / 2.0];
    let q = [(1.0 + beta) / 2.0, (1.0 - beta) / 2.0];
    Ok(p.iter().zip(&q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).log2()).sum())
}

/// λ|00⟩ + √(1 − λ²)|11⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateParam {
    pub lambda: f64,
}

impl PureStateParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("λ must lie in [0, 1], got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn state(&self) -> Result<TwoQubitState> {
        let l = self.lambda;
        let s = 2.0 * l * (1.0 - l * l).sqrt();
        let ab = Vec3::new(0.0, 0.0, 2.0 * l * l - 1.0);
        TwoQubitState::new(ab, ab, Vec3::new(s, -s, 1.0))
    }
}

pub fn pure_state(lambda: f64) -> Result<TwoQubitState> {
    PureStateParam::new(lambda)?.state()
}

/// a⃗ = 0, b⃗ = b ẑ, E = −(κ/√3)𝕀. Rejected outside the positive region.
pub fn isotropic_nonmmms(kappa: f64, b: f64) -> Result<TwoQubitState> {
    if kappa < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!("κ and b must be non-negative, got ({kappa}, {b})")));
    }
    let t = kappa / 3f64.sqrt();
    TwoQubitState::new(Vec3::zeros(), Vec3::new(0.0, 0.0, b), Vec3::repeat(-t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn singlet() -> TwoQubitState {
        TwoQubitState::mmms(SQRT3, -Vec3::new(1.0, 1.0, 1.0) / SQRT3).unwrap()
    }

    fn task(n: Vec3, beta: Vec3) -> RspTask {
        RspTask::new(Observable::new(n).unwrap(), Observable::new(beta).unwrap()).unwrap()
    }

    #[test]
    fn task_requires_orthogonal_axis() {
        assert!(RspTask::new(Observable::x(), Observable::x()).is_err());
        let t = RspTask::with_policy(Observable::z(), &BetaPolicy::ZCross);
        assert!(t.axis().axis().dot(&Vec3::z()).abs() < 1e-15);
        let n = Vec3::new(0.3, -0.4, 0.5).normalize();
        let b = BetaPolicy::Toward(Vec3::y()).beta_for(&n);
        assert!(b.dot(&n).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mmms_conditional_states() {
        let s = TwoQubitState::mmms(0.8, Vec3::new(0.2, 0.5, -0.6).normalize()).unwrap();
        let m = Observable::from_direction(Vec3::new(1.0, 2.0, -0.5)).unwrap();
        let t = task(Vec3::x(), Vec3::z());
        let out = post_measurement(&s, &m, &t).unwrap();
        let me = s.e.apply(&m.axis());
        assert_eq!((out.p_plus, out.p_minus), (0.5, 0.5));
        assert!((out.r_plus.unwrap().0 - me).norm() < 1e-15);
        assert!((out.r_minus.unwrap().0 + me).norm() < 1e-15);
        let zero = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        assert_eq!(post_measurement(&zero, &m, &t).unwrap().r_final.0, Vec3::zeros());
    }

    #[test]
    fn output_state_closed_form_and_density_oracle() {
        let s = pure_state(0.7).unwrap();
        let t = task(Vec3::x(), Vec3::z());
        let m = Observable::x();
        let out = post_measurement(&s, &m, &t).unwrap();
        let me = s.e.apply(&m.axis());
        let beta = Vec3::z();
        let closed = me + beta * (s.b.0 - me).dot(&beta);
        assert!((out.r_final.0 - closed).norm() < 1e-12);

        let rho = density::density_matrix(&s.a.0, &s.b.0, &s.e.diagonal());
        let (pp, rp) = density::conditional_b_state(&rho, &m.axis(), 1.0);
        let (pm, rm) = density::conditional_b_state(&rho, &m.axis(), -1.0);
        let oracle = rp * pp + density::rotate_pi_bloch(&rm, &beta) * pm;
        assert!((out.r_final.0 - oracle).norm() < 1e-12);
        assert!((out.p_plus - pp).abs() < 1e-12);
    }

    #[test]
    fn optimal_measurement_examples() {
        let iso = TwoQubitState::mmms(1.0, Vec3::new(1.0, 1.0, -1.0) / SQRT3).unwrap();
        let n = Vec3::new(0.3, 0.4, 0.5).normalize();
        let m = optimal_measurement(&iso, &Observable::new(n).unwrap()).unwrap();
        // parallel to n̂ up to the signs of the diagonal
        assert!((m.axis().component_mul(&Vec3::new(1.0, 1.0, -1.0)) - n).norm() < 1e-15);
        let cl = TwoQubitState::mmms(0.7, Vec3::z()).unwrap();
        assert_eq!(optimal_measurement(&cl, &Observable::x()), Err(Error::ZeroCorrelation));
        let eps = TwoQubitState::mmms(0.7, Vec3::new(1.0, 1.0, 0.0).normalize()).unwrap();
        assert!((optimal_measurement(&eps, &Observable::x()).unwrap().axis() - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn figure_of_merit_examples() {
        let cl = TwoQubitState::mmms(0.7, Vec3::z()).unwrap();
        assert_eq!(figure_of_merit(&cl, &ObservablePair::new(Observable::x(), Observable::x())), 1.0);
        let n = Observable::from_direction(Vec3::new(1.0, -2.0, 0.3)).unwrap();
        let s = singlet();
        let m = optimal_measurement(&s, &n).unwrap();
        assert!(figure_of_merit(&s, &ObservablePair::new(m, n)).abs() < 1e-15);
        assert_eq!(fom_from_correlation(-1.0), f64::INFINITY);
        let iso = TwoQubitState::mmms(1.0, -Vec3::new(1.0, 1.0, 1.0) / SQRT3).unwrap();
        let ev = evaluate(&iso, &task(Vec3::x(), Vec3::z())).unwrap();
        assert!((ev.f_u - 0.342_496_936_884_082_2).abs() < 1e-15);
    }

    #[test]
    fn evaluate_examples() {
        let ev = evaluate(&singlet(), &task(Vec3::new(0.6, 0.8, 0.0), Vec3::z())).unwrap();
        assert!(ev.f_u.abs() < 1e-15 && (ev.gain - 1.0).abs() < 1e-15 && ev.useful);

        let zero = TwoQubitState::mmms(0.0, Vec3::z()).unwrap();
        let ev = evaluate(&zero, &task(Vec3::x(), Vec3::z())).unwrap();
        assert_eq!((ev.f_u, ev.f_un, ev.f_opt, ev.gain), (1.0, 1.0, 1.0, 0.0));
        assert!(ev.m_opt.is_none() && !ev.useful);

        let pure = pure_state(0.8).unwrap();
        for k in 0..16 {
            let phi = k as f64 * 0.39;
            let ev = evaluate(&pure, &task(Vec3::new(phi.cos(), phi.sin(), 0.0), Vec3::z())).unwrap();
            assert!(ev.useful && ev.gain >= 0.0 && ev.f_opt == ev.f_u);
        }
    }

    #[test]
    fn unuseful_target_falls_back_to_polarization() {
        // κ = 0.3 with b = 0.9 is not positive in this family
        let s = isotropic_nonmmms(0.15, 0.9).unwrap();
        let t = task(Vec3::new(0.2, 0.0, 1.0).normalize(), Vec3::y());
        let ev = evaluate(&s, &t).unwrap();
        assert!(!ev.useful && ev.gain == 0.0 && ev.f_opt == ev.f_un && ev.f_un < ev.f_u);
        assert!(!usefulness_condition_check(&s, &t).unwrap());
    }

    #[test]
    fn sign_test_for_pure_states() {
        let s = pure_state(0.6).unwrap();
        for k in 0..20 {
            let th = 0.3 + 0.13 * k as f64;
            let n = Vec3::new(th.sin() * (2.0 * th).cos(), th.sin() * (2.0 * th).sin(), th.cos());
            let beta = BetaPolicy::ZCross.beta_for(&n);
            assert!(usefulness_condition_check(&s, &task(n, beta)).unwrap());
        }
    }

    #[test]
    fn gain_is_a_relative_entropy() {
        assert!((gain_non_mmms(0.4, 0.0) - mi_from_correlation(0.4)).abs() < 1e-16);
        assert!(gain_non_mmms(0.3, 0.3).abs() < 1e-15);
        let s = isotropic_nonmmms(0.9, 0.3).unwrap();
        let t = task(Vec3::new(0.5, 0.1, 0.7).normalize(), BetaPolicy::ZCross.beta_for(&Vec3::new(0.5, 0.1, 0.7).normalize()));
        let ev = evaluate(&s, &t).unwrap();
        assert!((gain_from_tables(&s, &t).unwrap() - ev.gain).abs() < 1e-14);
    }

    #[test]
    fn pure_state_parameterization() {
        for l in [0.0, 0.55, 0.6, 0.9, 1.0] {
            let s = pure_state(l).unwrap();
            assert!((s.purity() - 1.0).abs() < 1e-12);
        }
        assert!(pure_state(1.1).is_err());
    }
}
