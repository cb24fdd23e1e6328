use serde::{Deserialize, Serialize};

use crate::antenna::PortId;
use crate::pattern::AzimuthPattern;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One port active per symbol, chosen at random, with compensation.
    SwitchedSinglePort,
    /// All active ports driven together with phase-conjugate weights.
    SimultaneousMultiport,
}

/// Everything needed to reproduce one DM experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmSessionConfig {
    pub scheme: Scheme,
    pub active_port_ids: Vec<PortId>,
    /// Handshake port (switched only). Drawn from the session rng when unset.
    #[serde(default)]
    pub reference_port_id: Option<PortId>,
    pub phi_lu_deg: f64,
    /// Es/N0 in dB at the LU direction.
    pub snr_db: f64,
    pub n_symbols: usize,
    pub seed: u64,
    /// Artificial-noise power relative to the signal (multiport only).
    #[serde(default)]
    pub an_power_ratio: f64,
}

impl DmSessionConfig {
    pub fn switched(ports: &[PortId], phi_lu_deg: f64, snr_db: f64, n_symbols: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::SwitchedSinglePort,
            active_port_ids: ports.to_vec(),
            reference_port_id: None,
            phi_lu_deg,
            snr_db,
            n_symbols,
            seed,
            an_power_ratio: 0.0,
        }
    }

    pub fn multiport(ports: &[PortId], phi_lu_deg: f64, snr_db: f64, n_symbols: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::SimultaneousMultiport,
            ..Self::switched(ports, phi_lu_deg, snr_db, n_symbols, seed)
        }
    }

    pub fn with_reference(mut self, port: PortId) -> Self {
        self.reference_port_id = Some(port);
        self
    }

    pub fn with_artificial_noise(mut self, ratio: f64) -> Self {
        self.an_power_ratio = ratio;
        self
    }

    /// Noise variance (total, both quadratures) for unit-energy symbols.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSession(m));
        if !(self.phi_lu_deg.is_finite() && (0.0..360.0).contains(&self.phi_lu_deg)) {
            return bad(format!("phi out of range: {} not in [0, 360)", self.phi_lu_deg));
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return bad(format!("snr {} dB is not usable", self.snr_db));
        }
        if self.n_symbols == 0 {
            return bad("n_symbols must be >= 1".into());
        }
        if self.active_port_ids.is_empty() {
            return bad("empty port set".into());
        }
        for (i, id) in self.active_port_ids.iter().enumerate() {
            if self.active_port_ids[..i].contains(id) {
                return bad(format!("port {id} listed twice"));
            }
        }
        if !(self.an_power_ratio.is_finite() && self.an_power_ratio >= 0.0) {
            return bad(format!("artificial-noise ratio {} must be >= 0", self.an_power_ratio));
        }
        match self.scheme {
            Scheme::SwitchedSinglePort => {
                if self.active_port_ids.len() < 2 {
                    return bad("switched scheme needs a reference port and at least one data port".into());
                }
                if let Some(r) = self.reference_port_id {
                    if !self.active_port_ids.contains(&r) {
                        return bad(format!("reference port {r} is not active"));
                    }
                }
                if self.an_power_ratio > 0.0 {
                    return bad("artificial noise applies to the multiport scheme only".into());
                }
            }
            Scheme::SimultaneousMultiport => {
                if self.reference_port_id.is_some() {
                    return bad("reference port applies to the switched scheme only".into());
                }
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus membership of every port in `pattern`.
    pub fn validate_for(&self, pattern: &AzimuthPattern) -> Result<()> {
        self.validate()?;
        for &id in &self.active_port_ids {
            pattern.port_index(id)?;
        }
        Ok(())
    }
}
