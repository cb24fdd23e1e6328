use libm::erfc;

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Per-bit error probability of Gray-coded QPSK at `Es/N0 = snr_db`:
/// `Q(sqrt(Es/N0))`.
pub fn theoretical_qpsk_ber(snr_db: f64) -> f64 {
    q_function(10f64.powf(snr_db / 10.0).sqrt())
}
