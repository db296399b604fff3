//! Shot-by-shot simulation and the rotated single-axis protocol.

use nalgebra::Matrix3;
use rand::Rng;
use rayon::prelude::*;

use super::{fom_from_correlation, optimal_measurement, pi_reflect, post_measurement, RspTask};
use crate::bloch::{clamp_prob, Observable, TwoQubitState, Vec3};
use crate::density;
use crate::error::{Error, Result};
use crate::sphere::chunk_rng;

const TRIAL_CHUNK: u64 = 1 << 14;

/// Empirical ±n̂ statistics of repeated protocol runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub n_trials: u64,
    /// A's measurement axis.
    pub measurement: Observable,
    /// Runs where A obtained `+`.
    pub a_plus: u64,
    /// Runs where B found `+n̂`.
    pub b_plus: u64,
    pub freq_plus: f64,
    pub freq_minus: f64,
    /// (1 + n̂·r⃗)/2 for the protocol's output r⃗.
    pub expected_plus: f64,
    /// Binomial standard error of `freq_plus` under `expected_plus`.
    pub std_err: f64,
}

impl TrialStats {
    /// |freq − expected| in units of the binomial standard error. Zero when
    /// both the deviation and the error vanish.
    pub fn z_score(&self) -> f64 {
        let dev = (self.freq_plus - self.expected_plus).abs();
        if dev == 0.0 {
            0.0
        } else {
            dev / self.std_err
        }
    }
}

/// Simulates the protocol with A measuring n̂^E, or n̂ itself when E
/// annihilates the target.
pub fn simulate_trials(state: &TwoQubitState, task: &RspTask, n_trials: u64, seed: u64) -> Result<TrialStats> {
    let m = match optimal_measurement(state, &task.target()) {
        Ok(m) => m,
        Err(Error::ZeroCorrelation) => task.target(),
        Err(other) => return Err(other),
    };
    simulate_trials_with(state, task, &m, n_trials, seed)
}

/// Each run samples A's outcome from p_i, forms B's conditional state
/// r⃗_i (rotated about β̂ on `−`), then samples B's ±n̂ outcome from it.
/// Runs are drawn in fixed chunks from per-chunk streams, so the counts
/// depend only on (seed, n_trials).
pub fn simulate_trials_with(
    state: &TwoQubitState,
    task: &RspTask,
    m: &Observable,
    n_trials: u64,
    seed: u64,
) -> Result<TrialStats> {
    if n_trials == 0 {
        return Err(Error::InvalidInput("n_trials must be ≥ 1".into()));
    }
    let out = post_measurement(state, m, task)?;
    let n = task.target().axis();
    let beta = task.axis().axis();
    let prob_b_plus = |r: Option<Vec3>| r.map_or(0.5, |r| clamp_prob((1.0 + n.dot(&r)) / 2.0));
    let q_plus = prob_b_plus(out.r_plus.map(|r| r.0));
    let q_minus = prob_b_plus(out.r_minus.map(|r| pi_reflect(&r.0, &beta)));
    let p_plus = out.p_plus;

    let n_chunks = n_trials.div_ceil(TRIAL_CHUNK);
    let counts: Vec<(u64, u64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(seed, chunk);
            let count = TRIAL_CHUNK.min(n_trials - chunk * TRIAL_CHUNK);
            let (mut a, mut b) = (0, 0);
            for _ in 0..count {
                let a_plus = rng.random::<f64>() < p_plus;
                let q = if a_plus { q_plus } else { q_minus };
                a += u64::from(a_plus);
                b += u64::from(rng.random::<f64>() < q);
            }
            (a, b)
        })
        .collect();
    let (a_plus, b_plus) = counts.iter().fold((0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    let expected_plus = clamp_prob((1.0 + n.dot(&out.r_final.0)) / 2.0);
    let nf = n_trials as f64;
    Ok(TrialStats {
        n_trials,
        measurement: *m,
        a_plus,
        b_plus,
        freq_plus: b_plus as f64 / nf,
        freq_minus: 1.0 - b_plus as f64 / nf,
        expected_plus,
        std_err: (expected_plus * (1.0 - expected_plus) / nf).sqrt(),
    })
}

/// Rotation taking ẑ to the unit vector `n`.
pub fn rotation_from_z(n: &Vec3) -> Matrix3<f64> {
    let n = n.normalize();
    let axis = Vec3::z().cross(&n);
    let s = axis.norm();
    let c = n.z;
    if s < 1e-15 {
        return if c > 0.0 { Matrix3::identity() } else { Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0)) };
    }
    let k = axis / s;
    let kx = k.cross_matrix();
    Matrix3::identity() + kx * s + kx * kx * (1.0 - c)
}

/// F of the single-axis state (κ = 1, ĉ = ẑ) after B's frame is rotated so
/// that ẑ maps to the target: A measures ẑ, B's conditional states are ±n̂
/// and the π rotation about β̂ returns −n̂ to n̂.
pub fn adapted_classical_rsp(task: &RspTask) -> Result<f64> {
    let state = TwoQubitState::mmms(1.0, Vec3::z())?;
    let out = post_measurement(&state, &Observable::z(), &RspTask::new(Observable::z(), Observable::x())?)?;
    let rot = rotation_from_z(&task.target().axis());
    let beta = task.axis().axis();
    let r_plus = rot * out.r_plus.ok_or(Error::ZeroCorrelation)?.0;
    let r_minus = rot * out.r_minus.ok_or(Error::ZeroCorrelation)?.0;
    let r = r_plus * out.p_plus + pi_reflect(&r_minus, &beta) * out.p_minus;
    Ok(fom_from_correlation(task.target().axis().dot(&r)))
}

/// The same quantity from the explicit 4×4 state with correlation matrix
/// T = ẑ n̂ᵀ, A measuring ẑ.
pub fn adapted_classical_rsp_density(task: &RspTask) -> f64 {
    let n = task.target().axis();
    let mut t = Matrix3::zeros();
    for j in 0..3 {
        t[(2, j)] = n[j];
    }
    let rho = density::density_matrix_general(&Vec3::zeros(), &Vec3::zeros(), &t);
    let (pp, rp) = density::conditional_b_state(&rho, &Vec3::z(), 1.0);
    let (pm, rm) = density::conditional_b_state(&rho, &Vec3::z(), -1.0);
    let r = rp * pp + density::rotate_pi_bloch(&rm, &task.axis().axis()) * pm;
    fom_from_correlation(n.dot(&r))
}
