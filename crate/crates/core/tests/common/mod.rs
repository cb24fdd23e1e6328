//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the crate's own theory or steering code.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Standard normal upper tail by composite Simpson on [x, x + 12].
pub fn q_quadrature(x: f64) -> f64 {
    let n = 20_000;
    let (a, b) = (x, x + 12.0);
    let h = (b - a) / n as f64;
    let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * PI).sqrt();
    let mut s = pdf(a) + pdf(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}

/// QPSK bit error rate with Gray mapping at `snr_db` (Es/N0).
pub fn qpsk_ber(snr_db: f64) -> f64 {
    q_quadrature(10f64.powf(snr_db / 10.0).sqrt())
}

/// Inverse of [`q_quadrature`] by bisection.
pub fn q_inverse(p: f64) -> f64 {
    let (mut lo, mut hi) = (-8.0, 8.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_quadrature(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Normalized steered magnitude of equal-amplitude ideal modes at offset
/// `delta_deg` from the steering direction.
pub fn steered_magnitude(orders: &[i32], delta_deg: f64) -> f64 {
    let d = delta_deg.to_radians();
    let (re, im) = orders.iter().fold((0.0, 0.0), |(re, im), &m| {
        (re + (m as f64 * d).cos(), im + (m as f64 * d).sin())
    });
    (re * re + im * im).sqrt() / orders.len() as f64
}

/// Full width (deg) of the main lobe where the normalized magnitude stays
/// above the level giving `ber_threshold` at `snr_db`.
pub fn main_lobe_width(orders: &[i32], snr_db: f64, ber_threshold: f64) -> f64 {
    let level = q_inverse(ber_threshold) / 10f64.powf(snr_db / 10.0).sqrt();
    let f = |d: f64| steered_magnitude(orders, d) - level;
    let mut hi = 0.0;
    while f(hi) > 0.0 {
        hi += 0.01;
    }
    let mut lo = hi - 0.01;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    2.0 * lo
}

/// Three-sigma binomial band half-width for a rate `p` over `n` trials.
pub fn three_sigma(p: f64, n: f64) -> f64 {
    3.0 * (p * (1.0 - p) / n).sqrt()
}

/// Signed angular difference a - b in (-180, 180].
pub fn ang_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}
