//! Haar averages over S² and S²×S².
//!
//! Deterministic route: product rule with Gauss–Legendre nodes in cos θ and
//! the trapezoid rule in φ. By default the cos θ interval is split at the
//! equator of the quadrature frame, so integrands with a |n̂·v̂| kink along a
//! great circle keep spectral accuracy once the frame pole is aligned with v̂.
//!
//! Stochastic route: Haar-uniform Monte Carlo from normalized Gaussian
//! triples, drawn in fixed-size chunks from ChaCha streams indexed by
//! (seed, chunk). Chunk results are reduced in chunk order, so the estimate
//! is bitwise identical whether chunks run sequentially or on a thread pool.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bloch::Vec3;
use crate::error::{Error, Result};

/// How the cos θ interval is divided into Gauss–Legendre panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaRule {
    /// One panel on [−1, 1].
    Single,
    /// Two panels [−1, 0] and [0, 1], each with half the nodes.
    SplitEquator,
}

/// Orders of the product rule on one sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub rule: ThetaRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 128, rule: ThetaRule::SplitEquator }
    }
}

impl QuadratureSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        let spec = Self { n_theta, n_phi, rule: ThetaRule::SplitEquator };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rule(mut self, rule: ThetaRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 2 || self.n_phi < 4 {
            return Err(Error::InvalidInput(format!(
                "quadrature orders must satisfy n_theta ≥ 2, n_phi ≥ 4 (got {}, {})",
                self.n_theta, self.n_phi
            )));
        }
        if self.rule == ThetaRule::SplitEquator && self.n_theta < 4 {
            return Err(Error::InvalidInput("split rule needs n_theta ≥ 4".into()));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self { n_theta: 2 * self.n_theta, n_phi: 2 * self.n_phi, rule: self.rule }
    }

    fn panel_nodes(&self) -> usize {
        match self.rule {
            ThetaRule::Single => self.n_theta,
            ThetaRule::SplitEquator => (self.n_theta / 2).max(2),
        }
    }

    fn base_breaks(&self) -> Vec<f64> {
        match self.rule {
            ThetaRule::Single => vec![-1.0, 1.0],
            ThetaRule::SplitEquator => vec![-1.0, 0.0, 1.0],
        }
    }

    /// Flattened (unit vector, weight) nodes in the frame with pole ẑ.
    /// Weights sum to one.
    pub fn nodes(&self) -> Vec<(Vec3, f64)> {
        piecewise_nodes(&Frame::standard(), self, |_| Vec::new())
    }
}

/// Orthonormal frame whose third axis is the quadrature pole.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    e1: Vec3,
    e2: Vec3,
    pole: Vec3,
}

impl Frame {
    pub fn standard() -> Self {
        Self { e1: Vec3::x(), e2: Vec3::y(), pole: Vec3::z() }
    }

    /// Frame with the given (nonzero) pole; falls back to the standard frame.
    pub fn with_pole(pole: &Vec3) -> Self {
        let norm = pole.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Self::standard();
        }
        let p = pole / norm;
        if (p - Vec3::z()).norm() < 1e-15 {
            return Self::standard();
        }
        let helper = if p.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = (helper - p * p.dot(&helper)).normalize();
        let e2 = p.cross(&e1);
        Self { e1, e2, pole: p }
    }

    pub fn pole(&self) -> Vec3 {
        self.pole
    }

    /// Point with cos θ = u and azimuth φ.
    pub fn point(&self, u: f64, phi: f64) -> Vec3 {
        let s = (1.0 - u * u).max(0.0).sqrt();
        self.e1 * (s * phi.cos()) + self.e2 * (s * phi.sin()) + self.pole * u
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// (1/4π)∫ f dΩ in the standard frame.
pub fn average_s2<F>(f: F, quad: &QuadratureSpec) -> f64
where
    F: Fn(&Vec3) -> f64,
{
    average_s2_in_frame(f, &Frame::standard(), quad)
}

/// Same average, with the product grid laid out in `frame`.
pub fn average_s2_in_frame<F>(f: F, frame: &Frame, quad: &QuadratureSpec) -> f64
where
    F: Fn(&Vec3) -> f64,
{
    average_s2_piecewise(f, frame, quad, |_| Vec::new())
}

/// Average with extra cos θ breakpoints per azimuth. `breaks(φ)` returns
/// interior points of (−1, 1) where the integrand is known to be non-smooth
/// along that meridian; each resulting panel gets its own Gauss rule.
pub fn average_s2_piecewise<F, B>(f: F, frame: &Frame, quad: &QuadratureSpec, breaks: B) -> f64
where
    F: Fn(&Vec3) -> f64,
    B: Fn(f64) -> Vec<f64>,
{
    piecewise_nodes(frame, quad, breaks).iter().map(|(n, w)| w * f(n)).sum()
}

/// The (unit vector, weight) nodes used by [`average_s2_piecewise`], for
/// integrands with several components evaluated at once.
pub fn piecewise_nodes<B>(frame: &Frame, quad: &QuadratureSpec, breaks: B) -> Vec<(Vec3, f64)>
where
    B: Fn(f64) -> Vec<f64>,
{
    let (gx, gw) = gauss_legendre(quad.panel_nodes());
    let base = quad.base_breaks();
    let mut out = Vec::with_capacity(quad.n_theta * quad.n_phi);
    for k in 0..quad.n_phi {
        let phi = 2.0 * PI * k as f64 / quad.n_phi as f64;
        let mut cuts = base.clone();
        cuts.extend(breaks(phi).into_iter().filter(|u| *u > -1.0 && *u < 1.0));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        for win in cuts.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let half = 0.5 * (hi - lo);
            for (x, w) in gx.iter().zip(&gw) {
                out.push((frame.point(lo + half * (x + 1.0), phi), 0.5 * half * w / quad.n_phi as f64));
            }
        }
    }
    out
}

/// Average over S²×S² of f(n̂, m̂) with the same rule on both spheres.
/// The outer sphere is evaluated in parallel; the reduction is ordered.
pub fn average_s2x_s2<F>(f: F, quad: &QuadratureSpec) -> f64
where
    F: Fn(&Vec3, &Vec3) -> f64 + Sync,
{
    let nodes = quad.nodes();
    let partial: Vec<f64> = nodes
        .par_iter()
        .map(|(n, wn)| wn * nodes.iter().map(|(m, wm)| wm * f(n, m)).sum::<f64>())
        .collect();
    partial.iter().sum()
}

/// Sample budget and seed of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSpec {
    pub n_samples: usize,
    pub seed: u64,
}

impl McSpec {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidInput("n_samples must be ≥ 1".into()));
        }
        Ok(Self { n_samples, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McDomain {
    S2,
    S2xS2,
}

impl McDomain {
    fn arity(self) -> usize {
        match self {
            McDomain::S2 => 1,
            McDomain::S2xS2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
}

const MC_CHUNK: usize = 1 << 14;

/// Haar-uniform unit vector from a normalized Gaussian triple.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Generator for chunk `chunk` of the stream identified by `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte-Carlo mean and standard error of f over the chosen domain. `f`
/// receives one unit vector for S² and two for S²×S².
pub fn mc_average<F>(f: F, spec: &McSpec, domain: McDomain) -> McEstimate
where
    F: Fn(&[Vec3]) -> f64 + Sync,
{
    let n_chunks = spec.n_samples.div_ceil(MC_CHUNK);
    let arity = domain.arity();
    let stats: Vec<(f64, f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = chunk_rng(spec.seed, chunk as u64);
            let count = MC_CHUNK.min(spec.n_samples - chunk * MC_CHUNK);
            let mut buf = [Vec3::zeros(); 2];
            let (mut mean, mut m2) = (0.0, 0.0);
            for k in 0..count {
                for slot in buf.iter_mut().take(arity) {
                    *slot = random_unit(&mut rng);
                }
                let v = f(&buf[..arity]);
                let delta = v - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (v - mean);
            }
            (count as f64, mean, m2)
        })
        .collect();
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for (nb, mb, m2b) in stats {
        let total = n + nb;
        let delta = mb - mean;
        mean += delta * nb / total;
        m2 += m2b + delta * delta * n * nb / total;
        n = total;
    }
    let var = if n > 1.0 { m2 / (n - 1.0) } else { 0.0 };
    McEstimate { mean, std_err: (var / n).sqrt() }
}

/// Convenience wrapper for single-sphere integrands.
pub fn mc_average_s2<F>(f: F, spec: &McSpec) -> McEstimate
where
    F: Fn(&Vec3) -> f64 + Sync,
{
    mc_average(|v| f(&v[0]), spec, McDomain::S2)
}

/// Convenience wrapper for two-sphere integrands.
pub fn mc_average_s2x_s2<F>(f: F, spec: &McSpec) -> McEstimate
where
    F: Fn(&Vec3, &Vec3) -> f64 + Sync,
{
    mc_average(|v| f(&v[0], &v[1]), spec, McDomain::S2xS2)
}
