//! Numeric acceptance checks.
//!
//! Checks 1–16 are the acceptance criteria; 17 and 18 are extra property
//! checks that only run in the `props` and `all` suites. Every check draws
//! from its own seeded stream, so a suite run is deterministic.

use std::f64::consts::PI;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bloch::{is_in_tetrahedron, joint_distribution, Observable, ObservablePair, TwoQubitState, Vec3};
use crate::coherence::{coherence_of_basis, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::figures::{figure6, FigureGrid};
use crate::mutual_info::{
    avg_mi_classical, avg_mi_general, avg_mi_isotropic, avg_mi_single_from_r, mi_from_correlation, mutual_information,
    omega_max_dim, shannon_entropy,
};
use crate::rsp::{
    adapted_classical_rsp, avg_f_2iso0, avg_f_3iso, avg_gain_2iso0, avg_gain_3iso, avg_gain_isotropic_nonmmms,
    average_over_relevant, evaluate, figure_of_merit, gain_from_tables, min_beta_avg_payoff, min_beta_avg_payoff_grid,
    pure_state, simulate_trials, usefulness_condition_check, BetaPolicy, RspTask,
};
use crate::sphere::{average_s2, average_s2x_s2, chunk_rng, random_unit, QuadratureSpec};
use crate::symmetry::orbit;
use crate::symmetry::CLASS_TOL;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Outcome of one check. `measured` is the worst residual, violation or
/// mismatch count; the check passes when it stays within `tolerance`
/// (criterion 10 uses intervals and reports them in `detail`).
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub tolerance: f64,
    pub measured: f64,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ClosedForms,
    Props,
    All,
}

impl Suite {
    pub fn ids(&self) -> Vec<u8> {
        match self {
            Suite::ClosedForms => vec![1, 2, 10, 16],
            Suite::Props => vec![3, 4, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 17, 18],
            Suite::All => (1..=18).collect(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed-forms" => Ok(Suite::ClosedForms),
            "props" => Ok(Suite::Props),
            "all" => Ok(Suite::All),
            _ => Err(Error::InvalidInput(format!("unknown suite {s:?}; expected props, closed-forms or all"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub quad: QuadratureSpec,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { quad: QuadratureSpec::default(), seed: 1 }
    }
}

pub const CHECK_NAMES: [&str; 18] = [
    "closed forms agree with double-sphere quadrature",
    "single-observable average peaks at 0.27865",
    "isotropic and single-axis directions bound <I>",
    "Coh + I + S = 2",
    "relative-entropy gain equals I(n^E, n)",
    "orbit cardinalities",
    "dimension of the maximally correlated set",
    "n^E minimizes F over measurements",
    "sign test matches |nE| > |n.b|",
    "relative class differences dG and dF",
    "Delta<F> vanishes where kappa/sqrt3 > b",
    "pure-state usefulness and the Bell state",
    "closed-form min over beta of the circle payoff",
    "trial frequencies match the protocol output",
    "adapted single-axis protocol is perfect",
    "isotropic gain with b -> 0",
    "coherence complementarity and monotonicity",
    "isotropic and single-axis directions bound <F> and <G>",
];

pub fn check_name(id: u8) -> Result<&'static str> {
    CHECK_NAMES
        .get(usize::from(id).wrapping_sub(1))
        .copied()
        .ok_or_else(|| Error::InvalidInput(format!("no check {id}")))
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckResult>> {
    suite.ids().into_iter().map(|id| run_check(id, cfg)).collect()
}

pub fn run_check(id: u8, cfg: &VerifyConfig) -> Result<CheckResult> {
    let name = check_name(id)?;
    let mut rng = chunk_rng(cfg.seed, u64::from(id));
    let start = Instant::now();
    let (tolerance, measured, pass, detail) = match id {
        1 => check_closed_forms(&cfg.quad, start)?,
        2 => check_single_peak()?,
        3 => check_mi_extremality(&mut rng, &cfg.quad)?,
        4 => check_coherence_identity(&mut rng)?,
        5 => check_gain_identity(&mut rng)?,
        6 => check_orbits(),
        7 => check_omega_max()?,
        8 => check_optimal_measurement(&mut rng)?,
        9 => check_usefulness(&mut rng)?,
        10 => check_fig3()?,
        11 => check_fig6(&cfg.quad)?,
        12 => check_pure_states(&mut rng, &cfg.quad)?,
        13 => check_min_beta(&mut rng)?,
        14 => check_trials(&mut rng, cfg.seed)?,
        15 => check_adapted(&mut rng)?,
        16 => check_b_limit()?,
        17 => check_coherence_props(&mut rng)?,
        18 => check_rsp_extremality(&mut rng, &cfg.quad)?,
        _ => unreachable!("check_name rejects other ids"),
    };
    Ok(CheckResult { id, name, tolerance, measured, pass, detail, seconds: start.elapsed().as_secs_f64() })
}

type Outcome = (f64, f64, bool, String);

fn within(tol: f64, measured: f64, detail: String) -> Outcome {
    (tol, measured, measured <= tol, detail)
}

/// Largest κ with κĉ in the tetrahedron.
pub fn kappa_max(c_hat: &Vec3) -> f64 {
    let worst = [
        c_hat.x + c_hat.y + c_hat.z,
        c_hat.x - c_hat.y - c_hat.z,
        -c_hat.x + c_hat.y - c_hat.z,
        -c_hat.x - c_hat.y + c_hat.z,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    1.0 / worst
}

/// Uniform direction and κ uniform on the physical range.
pub fn random_mmms<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    let c = random_unit(rng);
    let kappa = rng.random::<f64>() * kappa_max(&c);
    TwoQubitState::mmms_forced(kappa, c).expect("κ below the tetrahedron bound")
}

/// Random local vectors and diagonal correlations, resampled until positive.
pub fn random_non_mmms<R: Rng + ?Sized>(rng: &mut R) -> TwoQubitState {
    loop {
        let a = random_unit(rng) * (0.6 * rng.random::<f64>());
        let b = random_unit(rng) * (0.9 * rng.random::<f64>());
        let c = random_unit(rng) * rng.random::<f64>();
        if let Ok(s) = TwoQubitState::new(a, b, c) {
            return s;
        }
    }
}

pub fn random_task<R: Rng + ?Sized>(rng: &mut R) -> RspTask {
    let n = Observable::from_direction(random_unit(rng)).expect("unit vector");
    RspTask::with_policy(n, &BetaPolicy::default())
}

/// Integrands that depend on n̂ alone are integrated over one sphere; the
/// second factor of the product rule would only multiply by its unit weight.
fn check_closed_forms(quad: &QuadratureSpec, start: Instant) -> Result<Outcome> {
    let log2p1 = |x: f64| (1.0 + x).log2();
    let iso = -Vec3::new(1.0, 1.0, 1.0) / SQRT3;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for kappa in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let e_single = Vec3::new(0.0, 0.0, kappa);
        let e_iso = iso * kappa;
        let diffs = [
            ("avg over one sphere", avg_mi_single_from_r(kappa * kappa)?, {
                average_s2(|n| mi_from_correlation(kappa * n.z), quad)
            }),
            ("<I> single-axis", avg_mi_classical(kappa)?, {
                average_s2x_s2(|n, m| mi_from_correlation(n.dot(&e_single.component_mul(m))), quad)
            }),
            ("<I> isotropic", avg_mi_isotropic(kappa)?, {
                average_s2x_s2(|n, m| mi_from_correlation(n.dot(&e_iso.component_mul(m))), quad)
            }),
            ("<F> isotropic", avg_f_3iso(kappa)?, {
                average_s2(|n| 1.0 - log2p1(e_iso.component_mul(n).norm()), quad)
            }),
            ("<G> isotropic", avg_gain_3iso(kappa)?, {
                average_s2(|n| mi_from_correlation(e_iso.component_mul(n).norm()), quad)
            }),
            ("<F> single-axis", avg_f_2iso0(kappa)?, {
                average_s2(|n| 1.0 - log2p1(e_single.component_mul(n).norm()), quad)
            }),
            ("<G> single-axis", avg_gain_2iso0(kappa)?, {
                average_s2(|n| mi_from_correlation(e_single.component_mul(n).norm()), quad)
            }),
        ];
        for (label, closed, oracle) in diffs {
            let d = (closed - oracle).abs();
            if d > worst {
                worst = d;
                at = format!("{label} at kappa = {kappa}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let tol = 1e-7;
    let detail = if secs < 30.0 { format!("worst {at}") } else { format!("worst {at}; over the 30 s budget") };
    Ok((tol, worst, worst < tol && secs < 30.0, detail))
}

fn check_single_peak() -> Result<Outcome> {
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..=1000 {
        let r = k as f64 / 1000.0;
        let v = avg_mi_single_from_r(r)?;
        if v > best.0 {
            best = (v, r);
        }
    }
    let rounded = (best.0 * 1e5).round() / 1e5;
    let d = (rounded - 0.27865).abs();
    Ok((5e-6, d, d < 5e-6 && best.1 == 1.0, format!("max {:.8} at R = {}", best.0, best.1)))
}

fn check_mi_extremality(rng: &mut ChaCha8Rng, quad: &QuadratureSpec) -> Result<Outcome> {
    let kappa = 0.8;
    let lo = avg_mi_isotropic(kappa)?;
    let hi = avg_mi_classical(kappa)?;
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 500 {
        let c = random_unit(rng);
        if !is_in_tetrahedron(&(c * kappa)) {
            continue;
        }
        accepted += 1;
        let v = avg_mi_general(&TwoQubitState::mmms(kappa, c)?, quad)?;
        worst = worst.max(lo - v).max(v - hi);
    }
    Ok(within(1e-7, worst.max(0.0), format!("bounds [{lo:.10}, {hi:.10}], 500 directions")))
}

fn check_coherence_identity(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let s = random_mmms(rng);
        let pair = random_pair(rng);
        let jd = joint_distribution(&s, &pair)?;
        let coh = shannon_entropy(jd.p.iter().flatten()) - von_neumann_entropy(&s)?;
        let r = coh + mutual_information(&s, &pair)? + von_neumann_entropy(&s)? - 2.0;
        worst = worst.max(r.abs());
    }
    Ok(within(1e-10, worst, "1000 draws".into()))
}

fn random_pair<R: Rng + ?Sized>(rng: &mut R) -> ObservablePair {
    let n = Observable::from_direction(random_unit(rng)).expect("unit vector");
    let m = Observable::from_direction(random_unit(rng)).expect("unit vector");
    ObservablePair::new(n, m)
}

fn check_gain_identity(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 1000 {
        let s = random_mmms(rng);
        let task = random_task(rng);
        let g = match gain_from_tables(&s, &task) {
            Ok(g) => g,
            Err(Error::ZeroCorrelation) => continue,
            Err(e) => return Err(e),
        };
        let m = crate::rsp::optimal_measurement(&s, &task.target())?;
        let jd = joint_distribution(&s, &ObservablePair::new(m, task.target()))?;
        let mi = shannon_entropy(&jd.pa) + shannon_entropy(&jd.pb) - shannon_entropy(jd.p.iter().flatten());
        worst = worst.max((g - mi).abs());
        done += 1;
    }
    Ok(within(1e-10, worst, "1000 tasks".into()))
}

fn check_orbits() -> Outcome {
    let eps_dir = |e: f64| Vec3::new(e, e, (1.0 - 2.0 * e * e).max(0.0).sqrt());
    let cases = [
        (Vec3::new(1.0, 1.0, 1.0) / SQRT3, 8),
        (eps_dir(0.4), 24),
        (Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt(), 12),
        (Vec3::z(), 6),
    ];
    let sizes: Vec<usize> = cases.iter().map(|(c, _)| orbit(c, CLASS_TOL).len()).collect();
    let wrong = cases.iter().zip(&sizes).filter(|((_, want), got)| *want != **got).count();
    within(0.0, wrong as f64, format!("sizes {sizes:?}, expected [8, 24, 12, 6]"))
}

fn check_omega_max() -> Result<Outcome> {
    let cases = [
        (TwoQubitState::mmms(0.5, -Vec3::new(1.0, 1.0, 1.0) / SQRT3)?, 2),
        (TwoQubitState::mmms(0.5, Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt())?, 1),
        (TwoQubitState::mmms(0.5, Vec3::z())?, 0),
    ];
    let dims = cases.iter().map(|(s, _)| omega_max_dim(s)).collect::<Result<Vec<_>>>()?;
    let wrong = cases.iter().zip(&dims).filter(|((_, want), got)| want != *got).count();
    Ok(within(0.0, wrong as f64, format!("dimensions {dims:?}, expected [2, 1, 0]")))
}

/// Fibonacci lattice on the sphere.
fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

fn check_optimal_measurement(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let grid: Vec<Observable> =
        fibonacci_sphere(10_000).into_iter().map(|v| Observable::from_direction(v).expect("unit")).collect();
    let mut worst = f64::NEG_INFINITY;
    let mut done = 0;
    while done < 200 {
        let s = if done % 2 == 0 { random_mmms(rng) } else { random_non_mmms(rng) };
        let task = random_task(rng);
        let m = match crate::rsp::optimal_measurement(&s, &task.target()) {
            Ok(m) => m,
            Err(Error::ZeroCorrelation) => continue,
            Err(e) => return Err(e),
        };
        let f_opt = figure_of_merit(&s, &ObservablePair::new(m, task.target()));
        let f_grid = grid
            .iter()
            .map(|g| figure_of_merit(&s, &ObservablePair::new(*g, task.target())))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(f_opt - f_grid);
        done += 1;
    }
    Ok(within(1e-9, worst.max(0.0), format!("largest F(n^E) - min grid F = {worst:.3e}")))
}

fn check_usefulness(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (mut compared, mut disagree, mut useful) = (0, 0, 0);
    while compared < 10_000 {
        let s = random_non_mmms(rng);
        let task = random_task(rng);
        let n = task.target().axis();
        let gap = s.e.apply(&n).norm() - n.dot(&s.b.0).abs();
        if gap.abs() < 1e-10 {
            continue;
        }
        compared += 1;
        let sign = usefulness_condition_check(&s, &task)?;
        useful += usize::from(gap > 0.0);
        disagree += usize::from(sign != (gap > 0.0));
    }
    Ok(within(0.0, disagree as f64, format!("{useful} of 10000 draws useful")))
}

fn check_fig3() -> Result<Outcome> {
    let (mut dg, mut df) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let (mut kg, mut kf) = (0.0, 0.0);
    for k in 1..1000 {
        let kappa = k as f64 / 1000.0;
        let g = crate::rsp::delta_gain(kappa)?;
        let f = crate::rsp::delta_fom(kappa)?;
        if g > dg {
            (dg, kg) = (g, kappa);
        }
        if f > df {
            (df, kf) = (f, kappa);
        }
    }
    let pass = (0.07..=0.09).contains(&dg) && (0.22..=0.28).contains(&df);
    let detail = format!(
        "max dG = {dg:.6} at kappa = {kg} (want [0.07, 0.09]); max dF = {df:.6} at kappa = {kf} (want [0.22, 0.28])"
    );
    Ok((0.0, df, pass, detail))
}

fn check_fig6(quad: &QuadratureSpec) -> Result<Outcome> {
    let t = figure6(&FigureGrid::default(), quad)?;
    let (mut inside, mut outside) = (0.0f64, 0.0f64);
    let (mut n_in, mut n_out) = (0, 0);
    for r in &t.rows {
        if r[0] / SQRT3 > r[1] {
            inside = inside.max(r[2].abs());
            n_in += 1;
        } else {
            outside = outside.max(r[2]);
            n_out += 1;
        }
    }
    let tol = 1e-8;
    let pass = inside < tol && outside > 0.0;
    let detail = format!("{n_in} points with kappa/sqrt3 > b, {n_out} others (largest Delta<F> there {outside:.4e})");
    Ok((tol, inside, pass, detail))
}

fn check_pure_states(rng: &mut ChaCha8Rng, quad: &QuadratureSpec) -> Result<Outcome> {
    let mut not_useful = 0;
    for lambda in [0.55, 0.7, 0.9] {
        let s = pure_state(lambda)?;
        for _ in 0..1000 {
            let task = random_task(rng);
            let ev = evaluate(&s, &task)?;
            let sign = usefulness_condition_check(&s, &task)?;
            not_useful += usize::from(!(ev.useful && sign));
        }
    }
    let bell = average_over_relevant(&pure_state(0.5f64.sqrt())?, &BetaPolicy::default(), quad)?;
    let dev = bell.f_u.abs().max((bell.gain - 1.0).abs());
    let tol = 1e-9;
    let pass = not_useful == 0 && dev < tol;
    Ok((tol, dev, pass, format!("{not_useful} non-useful targets of 3000; Bell <F> = {:.3e}, <G> = {:.12}", bell.f_u, bell.gain)))
}

fn check_min_beta(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_mmms(rng);
        let closed = min_beta_avg_payoff(&s)?;
        worst = worst.max((closed - min_beta_avg_payoff_grid(&s, 24)).abs());
    }
    Ok(within(1e-6, worst, "100 states".into()))
}

fn check_trials(rng: &mut ChaCha8Rng, seed: u64) -> Result<Outcome> {
    let mut inside = 0;
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let s = if k % 2 == 0 { random_mmms(rng) } else { random_non_mmms(rng) };
        let task = random_task(rng);
        let stats = simulate_trials(&s, &task, 100_000, seed.wrapping_add(k))?;
        let z = stats.z_score();
        worst = worst.max(z);
        inside += usize::from(z <= 3.0);
    }
    let misses = 20 - inside;
    Ok((1.0, misses as f64, misses <= 1, format!("{inside}/20 within 3 standard errors, largest z = {worst:.3}")))
}

fn check_adapted(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        worst = worst.max(adapted_classical_rsp(&random_task(rng))?);
    }
    Ok((1e-10, worst, worst < 1e-10, "100 tasks".into()))
}

fn check_b_limit() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for kappa in [0.3, 0.6, 0.9] {
        worst = worst.max((avg_gain_isotropic_nonmmms(kappa, 1e-8)? - avg_gain_3iso(kappa)?).abs());
    }
    Ok((1e-6, worst, worst < 1e-6, "b = 1e-8".into()))
}

/// Complementarity of I and Coh at a fixed state, and growth of Coh with κ
/// at a fixed pair.
fn check_coherence_props(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut failures = 0;
    for _ in 0..200 {
        let s = random_mmms(rng);
        let (p, q) = (random_pair(rng), random_pair(rng));
        let (ip, iq) = (mutual_information(&s, &p)?, mutual_information(&s, &q)?);
        if (ip - iq).abs() < 1e-12 {
            continue;
        }
        let (cp, cq) = (coherence_of_basis(&s, &p)?.coherence, coherence_of_basis(&s, &q)?.coherence);
        failures += usize::from((ip > iq) != (cp < cq));
    }
    for _ in 0..50 {
        let c = random_unit(rng);
        let pair = random_pair(rng);
        let x = c.component_mul(&pair.m.axis()).dot(&pair.n.axis());
        if x.abs() < 1e-6 {
            continue;
        }
        let top = kappa_max(&c);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let kappa = top * k as f64 / 20.0 * (1.0 - 1e-9);
            let coh = coherence_of_basis(&TwoQubitState::mmms(kappa, c)?, &pair)?.coherence;
            failures += usize::from(coh <= prev);
            prev = coh;
        }
    }
    Ok(within(0.0, failures as f64, "200 pair comparisons, 50 kappa sweeps".into()))
}

fn check_rsp_extremality(rng: &mut ChaCha8Rng, quad: &QuadratureSpec) -> Result<Outcome> {
    let kappa = 0.8;
    let (f_lo, f_hi) = (avg_f_3iso(kappa)?, avg_f_2iso0(kappa)?);
    let (g_lo, g_hi) = (avg_gain_3iso(kappa)?, avg_gain_2iso0(kappa)?);
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 500 {
        let c = random_unit(rng);
        if !is_in_tetrahedron(&(c * kappa)) {
            continue;
        }
        accepted += 1;
        let avg = average_over_relevant(&TwoQubitState::mmms(kappa, c)?, &BetaPolicy::default(), quad)?;
        worst = worst.max(f_lo - avg.f_u).max(avg.f_u - f_hi).max(g_lo - avg.gain).max(avg.gain - g_hi);
    }
    let detail = format!("<F> in [{f_lo:.8}, {f_hi:.8}], <G> in [{g_lo:.8}, {g_hi:.8}], 500 directions");
    Ok(within(1e-7, worst.max(0.0), detail))
}
