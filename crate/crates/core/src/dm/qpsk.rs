use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::{Error, Result};

/// Gray-mapped constellation indexed by `(b0 << 1) | b1`:
/// 00 -> 45 deg, 01 -> 135 deg, 10 -> 315 deg, 11 -> 225 deg.
pub const QPSK_POINTS: [Complex64; 4] = [
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
];

pub fn qpsk_point(b0: bool, b1: bool) -> Complex64 {
    QPSK_POINTS[((b0 as usize) << 1) | b1 as usize]
}

pub fn qpsk_modulate(bits: &[bool]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(bits.chunks_exact(2).map(|p| qpsk_point(p[0], p[1])).collect())
}

/// Quadrant decision for one symbol. Points on an axis go to the
/// counter-clockwise neighbour; the origin decides as 45 deg.
#[inline]
pub(crate) fn decide(r: Complex64) -> (bool, bool) {
    let b0 = r.im < 0.0 || (r.im == 0.0 && r.re < 0.0);
    let b1 = r.re < 0.0 || (r.re == 0.0 && r.im > 0.0);
    (b0, b1)
}

pub fn qpsk_demodulate(received: &[Complex64]) -> Vec<bool> {
    received
        .iter()
        .flat_map(|&r| {
            let (b0, b1) = decide(r);
            [b0, b1]
        })
        .collect()
}
