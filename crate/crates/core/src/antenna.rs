//! Analytic model of a multi-mode antenna in the horizontal plane.
//!
//! Every port radiates a single azimuthal mode `a * exp(j(m*phi + psi))`.
//! Modes of different order `m` have different phase windings around the
//! azimuth, which is what makes beamsteering (and directional modulation)
//! possible from a single compact radiator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{wrap_deg, Error, Result};

/// Largest accepted azimuthal order.
pub const MAX_MODE_ORDER: i32 = 8;

/// Port identifier (1-based, as on the physical antenna: P1..PN).
pub type PortId = u32;

/// `exp(j * deg)` with the angle reduced to `[0, 360)` first.
pub fn cis_deg(deg: f64) -> Complex64 {
    Complex64::from_polar(1.0, wrap_deg(deg).to_radians())
}

/// One azimuthal radiating mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    m: i32,
    amplitude: f64,
    phase_offset_deg: f64,
}

impl ModeSpec {
    pub fn new(m: i32, amplitude: f64, phase_offset_deg: f64) -> Result<Self> {
        if m.abs() > MAX_MODE_ORDER {
            return Err(Error::InvalidMode(format!(
                "|m| = {} exceeds {MAX_MODE_ORDER}",
                m.abs()
            )));
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::InvalidMode(format!(
                "amplitude {amplitude} must be finite and >= 0"
            )));
        }
        if !phase_offset_deg.is_finite() {
            return Err(Error::InvalidMode(format!(
                "phase offset {phase_offset_deg} is not finite"
            )));
        }
        Ok(Self {
            m,
            amplitude,
            phase_offset_deg: wrap_deg(phase_offset_deg),
        })
    }

    /// Unit-amplitude mode with zero phase offset.
    pub fn unit(m: i32) -> Result<Self> {
        Self::new(m, 1.0, 0.0)
    }

    pub fn order(&self) -> i32 {
        self.m
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase_offset_deg(&self) -> f64 {
        self.phase_offset_deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPort {
    pub id: PortId,
    pub mode: ModeSpec,
}

/// Hardware figures carried through to reports. Never computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaMetadata {
    /// Antenna height in wavelengths.
    pub profile_lambda: f64,
    /// Total radiation efficiency in percent.
    pub efficiency_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaConfig {
    ports: Vec<AntennaPort>,
    metadata: Option<AntennaMetadata>,
}

impl AntennaConfig {
    /// Validates port count (2..=8) and id uniqueness.
    pub fn new(ports: Vec<AntennaPort>, metadata: Option<AntennaMetadata>) -> Result<Self> {
        if !(2..=8).contains(&ports.len()) {
            return Err(Error::InvalidAntenna(format!("{} ports; expected 2 to 8", ports.len())));
        }
        for (i, p) in ports.iter().enumerate() {
            if p.id == 0 {
                return Err(Error::InvalidAntenna("port ids start at 1".into()));
            }
            if ports[..i].iter().any(|q| q.id == p.id) {
                return Err(Error::InvalidAntenna(format!("duplicate port id {}", p.id)));
            }
        }
        Ok(Self { ports, metadata })
    }

    pub fn ports(&self) -> &[AntennaPort] {
        &self.ports
    }

    pub fn metadata(&self) -> Option<AntennaMetadata> {
        self.metadata
    }

    pub fn port(&self, id: PortId) -> Option<&AntennaPort> {
        self.ports.iter().find(|p| p.id == id)
    }

    /// Keeps only the listed ports, in the listed order.
    pub fn subset(&self, ids: &[PortId], metadata: Option<AntennaMetadata>) -> Result<Self> {
        let ports = ids
            .iter()
            .map(|&id| {
                self.port(id)
                    .copied()
                    .ok_or_else(|| Error::InvalidAntenna(format!("no port {id}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ports, metadata)
    }
}

/// The five-port stacked-patch antenna: P1 monopole-like (m = 0), P2/P3 the
/// counter-rotating triple-winding pair (m = +3/-3), P4/P5 the
/// counter-rotating dual-winding pair (m = +2/-2).
pub fn canonical_antenna() -> AntennaConfig {
    let orders = [(1, 0), (2, 3), (3, -3), (4, 2), (5, -2)];
    let ports = orders
        .iter()
        .map(|&(id, m)| AntennaPort {
            id,
            mode: ModeSpec::unit(m).expect("canonical orders are in range"),
        })
        .collect();
    AntennaConfig::new(
        ports,
        Some(AntennaMetadata {
            profile_lambda: 0.19,
            efficiency_pct: 49.0,
        }),
    )
    .expect("canonical antenna is valid")
}

/// Horizontal-plane field of one mode at azimuth `phi_deg`.
pub fn mode_field(mode: &ModeSpec, phi_deg: f64) -> Complex64 {
    let phase = mode.m as f64 * wrap_deg(phi_deg) + mode.phase_offset_deg;
    cis_deg(phase) * mode.amplitude
}

/// Unit-magnitude phase-conjugate weights for a set of port gains observed
/// at the steering direction. `ids` names the ports for error reporting.
pub fn conjugate_weights(
    ids: impl IntoIterator<Item = PortId>,
    gains: &[Complex64],
    phi0_deg: f64,
) -> Result<Vec<Complex64>> {
    ids.into_iter()
        .zip(gains)
        .map(|(id, g)| {
            let mag = g.norm();
            if mag <= f64::EPSILON {
                Err(Error::DegeneratePort {
                    port: id,
                    phi_deg: phi0_deg,
                })
            } else {
                Ok(g.conj() / mag)
            }
        })
        .collect()
}

/// Weights that bring every port into phase at `phi0_deg`.
pub fn steering_weights(config: &AntennaConfig, phi0_deg: f64) -> Result<Vec<Complex64>> {
    let gains: Vec<Complex64> = config.ports.iter().map(|p| mode_field(&p.mode, phi0_deg)).collect();
    conjugate_weights(config.ports.iter().map(|p| p.id), &gains, phi0_deg)
}

/// Composite field `sum_n w_n E_n(phi)`.
pub fn array_factor(config: &AntennaConfig, weights: &[Complex64], phi_deg: f64) -> Result<Complex64> {
    if weights.len() != config.ports.len() {
        return Err(Error::WeightCountMismatch {
            weights: weights.len(),
            ports: config.ports.len(),
        });
    }
    Ok(config
        .ports
        .iter()
        .zip(weights)
        .map(|(p, w)| w * mode_field(&p.mode, phi_deg))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < TOL
    }

    fn subset_of_orders(orders: &[i32]) -> AntennaConfig {
        let ports = orders
            .iter()
            .enumerate()
            .map(|(i, &m)| AntennaPort {
                id: i as u32 + 1,
                mode: ModeSpec::unit(m).unwrap(),
            })
            .collect();
        AntennaConfig::new(ports, None).unwrap()
    }

    #[test]
    fn canonical_layout() {
        let ant = canonical_antenna();
        let orders: Vec<_> = ant.ports().iter().map(|p| (p.id, p.mode.order())).collect();
        assert_eq!(orders, vec![(1, 0), (2, 3), (3, -3), (4, 2), (5, -2)]);
        assert!(ant.ports().iter().all(|p| p.mode.amplitude() == 1.0));
        assert_eq!(
            ant.metadata(),
            Some(AntennaMetadata {
                profile_lambda: 0.19,
                efficiency_pct: 49.0
            })
        );
    }

    #[test]
    fn mode_validation() {
        assert!(ModeSpec::new(9, 1.0, 0.0).is_err());
        assert!(ModeSpec::new(-9, 1.0, 0.0).is_err());
        assert!(ModeSpec::new(2, -0.1, 0.0).is_err());
        assert!(ModeSpec::new(2, f64::NAN, 0.0).is_err());
        assert_eq!(ModeSpec::new(2, 1.0, -90.0).unwrap().phase_offset_deg(), 270.0);
        assert_eq!(ModeSpec::new(2, 1.0, 360.0).unwrap().phase_offset_deg(), 0.0);
    }

    #[test]
    fn config_validation() {
        let p = |id| AntennaPort {
            id,
            mode: ModeSpec::unit(0).unwrap(),
        };
        assert!(AntennaConfig::new(vec![p(1)], None).is_err());
        assert!(AntennaConfig::new(vec![p(1), p(1)], None).is_err());
        assert!(AntennaConfig::new(vec![p(0), p(1)], None).is_err());
        assert!(AntennaConfig::new((1..=9).map(p).collect(), None).is_err());
        assert!(AntennaConfig::new((1..=8).map(p).collect(), None).is_ok());
    }

    #[test]
    fn mode_field_examples() {
        let m0 = ModeSpec::unit(0).unwrap();
        let m2 = ModeSpec::unit(2).unwrap();
        let m_3 = ModeSpec::unit(-3).unwrap();
        assert!(close(mode_field(&m0, 123.0), Complex64::new(1.0, 0.0)));
        assert!(close(mode_field(&m2, 45.0), Complex64::new(0.0, 1.0)));
        assert!(close(mode_field(&m_3, 60.0), Complex64::new(-1.0, 0.0)));
        let shifted = ModeSpec::new(1, 2.0, 30.0).unwrap();
        let v = mode_field(&shifted, 60.0);
        assert!((v.norm() - 2.0).abs() < TOL);
        assert!((v.arg().to_degrees() - 90.0).abs() < 1e-9);
    }

    #[test]
    fn steering_examples() {
        let ant = canonical_antenna();
        let w = steering_weights(&ant, 45.0).unwrap();
        // P4 is m = +2
        assert!(close(w[3], Complex64::new(0.0, -1.0)));
        let af = array_factor(&ant, &w, 45.0).unwrap();
        assert!(close(af, Complex64::new(5.0, 0.0)));
        let w0 = steering_weights(&ant, 0.0).unwrap();
        assert!(w0.iter().all(|w| close(*w, Complex64::new(1.0, 0.0))));
    }

    #[test]
    fn degenerate_port_rejected() {
        let ports = vec![
            AntennaPort {
                id: 1,
                mode: ModeSpec::new(0, 0.0, 0.0).unwrap(),
            },
            AntennaPort {
                id: 2,
                mode: ModeSpec::unit(2).unwrap(),
            },
        ];
        let ant = AntennaConfig::new(ports, None).unwrap();
        assert!(matches!(
            steering_weights(&ant, 10.0),
            Err(Error::DegeneratePort { port: 1, .. })
        ));
    }

    #[test]
    fn weight_count_mismatch() {
        let ant = canonical_antenna();
        assert!(matches!(
            array_factor(&ant, &[Complex64::new(1.0, 0.0); 3], 0.0),
            Err(Error::WeightCountMismatch { weights: 3, ports: 5 })
        ));
    }

    #[test]
    fn array_factor_closed_forms() {
        let ant = canonical_antenna();
        for phi0 in [0.0, 45.0, 137.0, 300.0] {
            let w = steering_weights(&ant, phi0).unwrap();
            for delta in (0..360).step_by(7) {
                let d = (delta as f64).to_radians();
                let expect = 1.0 + 2.0 * (2.0 * d).cos() + 2.0 * (3.0 * d).cos();
                let af = array_factor(&ant, &w, phi0 + delta as f64).unwrap();
                assert!((af - Complex64::new(expect, 0.0)).norm() < 1e-9);
            }
            let back = array_factor(&ant, &w, phi0 + 180.0).unwrap();
            assert!(close(back, Complex64::new(1.0, 0.0)));
        }
        // bi-directional subset {0, +2, -2}
        let bi = subset_of_orders(&[0, 2, -2]);
        let w = steering_weights(&bi, 45.0).unwrap();
        let main = array_factor(&bi, &w, 45.0).unwrap();
        let back = array_factor(&bi, &w, 225.0).unwrap();
        assert!(close(main, Complex64::new(3.0, 0.0)));
        assert!(close(back, Complex64::new(3.0, 0.0)));
    }

    #[test]
    fn canonical_peak_tracks_steering() {
        let ant = canonical_antenna();
        for phi0 in 0..360 {
            let phi0 = phi0 as f64;
            let w = steering_weights(&ant, phi0).unwrap();
            let mut best = (f64::NEG_INFINITY, 0.0);
            for k in 0..360 {
                let phi = k as f64;
                let mag = array_factor(&ant, &w, phi).unwrap().norm();
                // ties toward phi0
                if mag > best.0 + 1e-9 || ((mag - best.0).abs() <= 1e-9 && phi == phi0) {
                    best = (mag, phi);
                }
            }
            assert_eq!(best.1, phi0);
        }
    }

    #[test]
    fn tri_directional_subset() {
        let tri = subset_of_orders(&[0, 3, -3]);
        for phi0 in [0.0, 45.0, 200.0] {
            let w = steering_weights(&tri, phi0).unwrap();
            for k in 0..3 {
                let af = array_factor(&tri, &w, phi0 + 120.0 * k as f64).unwrap();
                assert!((af.norm() - 3.0).abs() < 1e-12);
            }
        }
    }

    /// Stationary points of `2cos(2d) + 2cos(3d)` found by bisection on the
    /// closed-form derivative, independent of the array-factor code path.
    fn sidelobe_oracle() -> (f64, f64) {
        let af = |d: f64| 2.0 * (2.0 * d).cos() + 2.0 * (3.0 * d).cos();
        let daf = |d: f64| -4.0 * (2.0 * d).sin() - 6.0 * (3.0 * d).sin();
        let (mut lo, mut hi) = (60f64.to_radians(), 80f64.to_radians());
        assert!(daf(lo).signum() != daf(hi).signum());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if daf(mid).signum() == daf(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let d = 0.5 * (lo + hi);
        (d.to_degrees(), af(d).abs())
    }

    #[test]
    fn dual_triple_subset_sidelobes() {
        let (delta, peak) = sidelobe_oracle();
        // frozen oracle output
        assert!((delta - 68.876).abs() < 1e-3, "{delta}");
        assert!((peak - 3.2684).abs() < 1e-4, "{peak}");

        let sub = subset_of_orders(&[3, -3, 2, -2]);
        let phi0 = 45.0;
        let w = steering_weights(&sub, phi0).unwrap();
        let mag = |d: f64| array_factor(&sub, &w, phi0 + d).unwrap().norm();
        for sign in [1.0, -1.0] {
            let d = sign * delta;
            assert!((mag(d) - peak).abs() < 1e-9);
            assert!(mag(d) > mag(d + 0.05) && mag(d) > mag(d - 0.05));
        }
    }

    proptest! {
        #[test]
        fn array_factor_is_periodic(phi0 in 0.0f64..360.0, phi in -720.0f64..720.0) {
            let ant = canonical_antenna();
            let w = steering_weights(&ant, phi0).unwrap();
            let a = array_factor(&ant, &w, phi).unwrap();
            let b = array_factor(&ant, &w, phi + 360.0).unwrap();
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn steered_composite_is_sum_of_amplitudes(
            phi0 in 0.0f64..360.0,
            amps in proptest::collection::vec(0.1f64..3.0, 5),
            offsets in proptest::collection::vec(0.0f64..360.0, 5),
        ) {
            let orders = [0, 3, -3, 2, -2];
            let ports = (0..5).map(|i| AntennaPort {
                id: i as u32 + 1,
                mode: ModeSpec::new(orders[i], amps[i], offsets[i]).unwrap(),
            }).collect();
            let ant = AntennaConfig::new(ports, None).unwrap();
            let w = steering_weights(&ant, phi0).unwrap();
            let af = array_factor(&ant, &w, phi0).unwrap();
            let total: f64 = amps.iter().sum();
            prop_assert!((af.re - total).abs() < 1e-9);
            prop_assert!(af.im.abs() < 1e-9);
        }
    }
}
