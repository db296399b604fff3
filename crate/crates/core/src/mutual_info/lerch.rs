//! Φ(z, 2, 3/2) = Σₖ zᵏ/(k + 3/2)².
//!
//! Small z: the series is summed directly. Otherwise the first
//! [`HEAD_TERMS`] terms are summed and the tail is replaced by its
//! Euler–Maclaurin expansion, whose integral part has a closed form in the
//! exponential integral E₁. The tail route stays accurate up to and
//! including z = 1, where Φ(1, 2, 3/2) = ζ(2, 3/2) = π²/2 − 4.

use crate::error::{Error, Result};

const A: f64 = 1.5;
const HEAD_TERMS: usize = 32;
const DIRECT_MAX_Z: f64 = 0.5;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// B₂ₚ/(2p)! for p = 1..=5.
const EM_COEFFS: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
];

/// Lerch transcendent Φ(z, 2, 3/2) for 0 ≤ z < 1.
pub fn lerch_phi_2_3half(z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!("Φ(z, 2, 3/2) needs 0 ≤ z < 1, got {z}")));
    }
    Ok(lerch_phi_2_3half_closed(z))
}

/// Same as [`lerch_phi_2_3half`] but also accepts the endpoint z = 1.
pub(crate) fn lerch_phi_2_3half_closed(z: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&z));
    if z <= DIRECT_MAX_Z {
        return direct_sum(z);
    }
    let mut head = 0.0;
    let mut zk = 1.0;
    for k in 0..HEAD_TERMS {
        head += zk / sq(k as f64 + A);
        zk *= z;
    }
    head + tail(z, HEAD_TERMS as f64)
}

fn direct_sum(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = 1.0;
    let mut k = 0.0;
    loop {
        let term = zk / sq(k + A);
        sum += term;
        if term <= 1e-17 * sum {
            return sum;
        }
        zk *= z;
        k += 1.0;
    }
}

/// Σ_{k ≥ n} g(k) with g(x) = e^{−wx}/(x + a)², w = −ln z.
fn tail(z: f64, n: f64) -> f64 {
    let w = -z.ln();
    let y = n + A;
    let integral = if w == 0.0 { 1.0 / y } else { (-w * n).exp() / y - w * (w * A).exp() * e1(w * y) };
    let mut sum = integral + 0.5 * g_derivative(0, w, n);
    for (p, coeff) in EM_COEFFS.iter().enumerate() {
        sum -= coeff * g_derivative(2 * p + 1, w, n);
    }
    sum
}

/// d^order/dx^order of e^{−wx}(x + a)^{−2} at x.
fn g_derivative(order: usize, w: f64, x: f64) -> f64 {
    let y = x + A;
    let mut binom = 1.0;
    let mut fact = 1.0; // (j + 1)!
    let mut acc = 0.0;
    for j in 0..=order {
        if j > 0 {
            binom *= (order - j + 1) as f64 / j as f64;
            fact *= (j + 1) as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += binom * (-w).powi((order - j) as i32) * sign * fact * y.powi(-2 - j as i32);
    }
    (-w * x).exp() * acc
}

/// Exponential integral E₁(x), x > 0.
fn e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // modified Lentz on the continued fraction e^{−x}/(x + 1 − 1/(x + 3 − 4/(x + 5 − …)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

fn sq(x: f64) -> f64 {
    x * x
}
