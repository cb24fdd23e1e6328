//! Directional modulation (DM) simulation over multi-mode antennas.
//!
//! Two transmission schemes are modeled:
//!
//! * **Switched single-port DM**: one RF chain; every QPSK symbol leaves
//!   through a randomly chosen port after a per-port compensation phase that
//!   aligns all ports at the legitimate user (LU) direction.
//! * **Simultaneous multiport DM**: phase-conjugate beamforming across all
//!   active ports, with optional null-space artificial noise.
//!
//! The crate is organized bottom-up:
//!
//! ```text
//! antenna   analytic azimuthal modes, steering weights, array factor
//! pattern   sampled far-field patterns: synthesis, CSV I/O, resampling, shadowing
//! dm        QPSK, compensation, transmitters, AWGN receiver, closed-form BER
//! sweep     seeded per-angle BER sweeps, region extraction, subset tables
//! plot      static SVG rendering of sweep results
//! ```

pub mod antenna;
pub mod dm;
mod error;
pub mod pattern;
pub mod plot;
pub mod sweep;

pub use error::{Error, Result};

/// Wraps an angle in degrees into `[0, 360)`.
pub fn wrap_deg(phi: f64) -> f64 {
    let w = phi.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

/// Signed angular difference `a - b` folded into `(-180, 180]`.
pub fn angle_diff_deg(a: f64, b: f64) -> f64 {
    let d = wrap_deg(a - b);
    if d > 180.0 {
        d - 360.0
    } else {
        d
    }
}
