use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::qpsk::{decide, qpsk_modulate, QPSK_POINTS};
use super::session::{DmSessionConfig, Scheme};
use crate::antenna::{cis_deg, conjugate_weights, PortId};
use crate::pattern::AzimuthPattern;
use crate::{Error, Result};

/// Below this magnitude a mean gain carries no usable phase.
const PHASE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TxPath {
    Port(PortId),
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emission {
    pub path: TxPath,
    /// Phase rotation applied before the port, degrees.
    pub compensation_deg: f64,
}

/// Everything sent during one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxRecord {
    pub bits: Vec<bool>,
    /// Unit-energy QPSK symbols, before compensation.
    pub symbols: Vec<Complex64>,
    pub emissions: Vec<Emission>,
    pub reference_port: Option<PortId>,
    /// Per-symbol artificial-noise excitation, `symbols.len() x ports` row-major
    /// in active-port order. Multiport only.
    pub artificial_noise: Option<Vec<Complex64>>,
}

impl TxRecord {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbol as it leaves the RF chain (compensation applied).
    pub fn emitted(&self, k: usize) -> Complex64 {
        self.symbols[k] * cis_deg(self.emissions[k].compensation_deg)
    }
}

pub fn random_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// Phase delay (degrees) that de-rotates `port` to zero phase at the LU.
pub fn compensation_phase(pattern: &AzimuthPattern, port_id: PortId, phi_lu_deg: f64) -> Result<f64> {
    let g = pattern.gain_at(pattern.port_index(port_id)?, phi_lu_deg);
    if g.norm() <= f64::EPSILON {
        return Err(Error::DegeneratePortAtLu {
            port: port_id,
            phi_deg: phi_lu_deg,
        });
    }
    Ok(-g.arg().to_degrees())
}

/// Gain seen at `phi_deg` for a symbol sent through `port_id` with its LU
/// compensation applied.
pub fn effective_gain_switched(
    pattern: &AzimuthPattern,
    port_id: PortId,
    phi_deg: f64,
    phi_lu_deg: f64,
) -> Result<Complex64> {
    let comp = compensation_phase(pattern, port_id, phi_lu_deg)?;
    let g = pattern.gain_at(pattern.port_index(port_id)?, phi_deg);
    Ok(g * cis_deg(comp))
}

/// Phase-conjugate beam toward the LU, normalized to unit gain there.
struct MultiportBeam {
    port_index: Vec<usize>,
    weights: Vec<Complex64>,
    lu_gains: Vec<Complex64>,
}

impl MultiportBeam {
    fn new(config: &DmSessionConfig, pattern: &AzimuthPattern) -> Result<Self> {
        if config.active_port_ids.is_empty() {
            return Err(Error::InvalidSession("empty port set".into()));
        }
        let port_index = config
            .active_port_ids
            .iter()
            .map(|&id| pattern.port_index(id))
            .collect::<Result<Vec<_>>>()?;
        let lu_gains: Vec<Complex64> = port_index
            .iter()
            .map(|&i| pattern.gain_at(i, config.phi_lu_deg))
            .collect();
        let mut weights = conjugate_weights(config.active_port_ids.iter().copied(), &lu_gains, config.phi_lu_deg)
            .map_err(|e| match e {
                Error::DegeneratePort { port, phi_deg } => Error::DegeneratePortAtLu { port, phi_deg },
                other => other,
            })?;
        let peak: f64 = lu_gains.iter().map(|g| g.norm()).sum();
        for w in &mut weights {
            *w /= peak;
        }
        Ok(Self {
            port_index,
            weights,
            lu_gains,
        })
    }

    fn gains_at(&self, pattern: &AzimuthPattern, phi_deg: f64) -> Vec<Complex64> {
        self.port_index.iter().map(|&i| pattern.gain_at(i, phi_deg)).collect()
    }

    fn composite(&self, gains: &[Complex64]) -> Complex64 {
        self.weights.iter().zip(gains).map(|(w, g)| w * g).sum()
    }

    fn weight_power(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }
}

/// Composite beam gain at `phi_deg`; equals 1 at the LU.
pub fn multiport_composite_gain(config: &DmSessionConfig, pattern: &AzimuthPattern, phi_deg: f64) -> Result<Complex64> {
    let beam = MultiportBeam::new(config, pattern)?;
    Ok(beam.composite(&beam.gains_at(pattern, phi_deg)))
}

fn check_bits(config: &DmSessionConfig, bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() != 2 * config.n_symbols {
        return Err(Error::InvalidSession(format!(
            "{} bits supplied for {} symbols",
            bits.len(),
            config.n_symbols
        )));
    }
    qpsk_modulate(bits)
}

/// Switched single-port transmission: reference port (drawn if unset), then
/// one uniformly drawn data port per symbol from the remaining ports.
pub fn transmit_switched<R: Rng + ?Sized>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    bits: &[bool],
    rng: &mut R,
) -> Result<TxRecord> {
    if config.scheme != Scheme::SwitchedSinglePort {
        return Err(Error::InvalidSession("session is not switched".into()));
    }
    config.validate_for(pattern)?;
    let symbols = check_bits(config, bits)?;
    let active = &config.active_port_ids;
    let reference = match config.reference_port_id {
        Some(r) => r,
        None => active[rng.random_range(0..active.len())],
    };
    let data: Vec<(PortId, f64)> = active
        .iter()
        .filter(|&&id| id != reference)
        .map(|&id| Ok((id, compensation_phase(pattern, id, config.phi_lu_deg)?)))
        .collect::<Result<_>>()?;

    let emissions = (0..symbols.len())
        .map(|_| {
            let (port, comp) = data[rng.random_range(0..data.len())];
            Emission {
                path: TxPath::Port(port),
                compensation_deg: comp,
            }
        })
        .collect();
    Ok(TxRecord {
        bits: bits.to_vec(),
        symbols,
        emissions,
        reference_port: Some(reference),
        artificial_noise: None,
    })
}

/// Simultaneous multiport transmission. With `an_power_ratio > 0` each
/// symbol carries an artificial-noise excitation confined to the subspace
/// that radiates nothing toward the LU.
pub fn transmit_multiport<R: Rng + ?Sized>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    bits: &[bool],
    rng: &mut R,
) -> Result<TxRecord> {
    if config.scheme != Scheme::SimultaneousMultiport {
        return Err(Error::InvalidSession("session is not multiport".into()));
    }
    config.validate_for(pattern)?;
    let symbols = check_bits(config, bits)?;
    let beam = MultiportBeam::new(config, pattern)?;
    let n_ports = beam.weights.len();

    let artificial_noise = if config.an_power_ratio > 0.0 && n_ports > 1 {
        let e = &beam.lu_gains;
        let e_pow: f64 = e.iter().map(|g| g.norm_sqr()).sum();
        // projected isotropic noise has mean power n_ports - 1
        let scale = (config.an_power_ratio * beam.weight_power() / (n_ports - 1) as f64).sqrt();
        let mut an = Vec::with_capacity(symbols.len() * n_ports);
        let mut z = vec![Complex64::new(0.0, 0.0); n_ports];
        for _ in 0..symbols.len() {
            for zi in z.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *zi = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            }
            let leak: Complex64 = z.iter().zip(e).map(|(zi, ei)| zi * ei).sum::<Complex64>() / e_pow;
            an.extend(z.iter().zip(e).map(|(zi, ei)| (zi - leak * ei.conj()) * scale));
        }
        Some(an)
    } else {
        None
    };

    Ok(TxRecord {
        bits: bits.to_vec(),
        emissions: vec![
            Emission {
                path: TxPath::Composite,
                compensation_deg: 0.0,
            };
            symbols.len()
        ],
        symbols,
        reference_port: None,
        artificial_noise,
    })
}

pub fn transmit<R: Rng + ?Sized>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    bits: &[bool],
    rng: &mut R,
) -> Result<TxRecord> {
    match config.scheme {
        Scheme::SwitchedSinglePort => transmit_switched(config, pattern, bits, rng),
        Scheme::SimultaneousMultiport => transmit_multiport(config, pattern, bits, rng),
    }
}

/// Error tally and EVM for one receive direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxOutcome {
    pub bit_errors: u64,
    pub n_bits: u64,
    /// RMS distance of equalized symbols to the nearest constellation point.
    pub evm_rms: f64,
}

impl RxOutcome {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.n_bits as f64
    }
}

/// Per-symbol channel at one azimuth, plus the genie equalizer phase.
enum Channel {
    Switched {
        ports: Vec<(PortId, Complex64)>,
    },
    Multiport {
        gain: Complex64,
        an_gains: Option<Vec<Complex64>>,
    },
}

fn unit_phase(mean: Complex64) -> Complex64 {
    // a vanishing mean has no phase to remove
    if mean.norm() < PHASE_FLOOR {
        Complex64::new(1.0, 0.0)
    } else {
        (mean / mean.norm()).conj()
    }
}

fn channel_at(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    tx: &TxRecord,
    phi_deg: f64,
) -> Result<(Channel, Complex64)> {
    match config.scheme {
        Scheme::SwitchedSinglePort => {
            let reference = tx.reference_port;
            let ports = config
                .active_port_ids
                .iter()
                .filter(|&&id| Some(id) != reference)
                .map(|&id| {
                    let comp = compensation_phase(pattern, id, config.phi_lu_deg)?;
                    let g = pattern.gain_at(pattern.port_index(id)?, phi_deg);
                    Ok((id, g * cis_deg(comp)))
                })
                .collect::<Result<Vec<_>>>()?;
            let mean = ports.iter().map(|p| p.1).sum::<Complex64>() / ports.len() as f64;
            Ok((Channel::Switched { ports }, unit_phase(mean)))
        }
        Scheme::SimultaneousMultiport => {
            let beam = MultiportBeam::new(config, pattern)?;
            let gains = beam.gains_at(pattern, phi_deg);
            let gain = beam.composite(&gains);
            let an_gains = tx.artificial_noise.as_ref().map(|_| gains);
            Ok((Channel::Multiport { gain, an_gains }, unit_phase(gain)))
        }
    }
}

/// Runs the AWGN channel at `phi_deg` and hands each equalized symbol to `visit`.
fn receive_each<R, F>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    tx: &TxRecord,
    phi_deg: f64,
    rng: &mut R,
    mut visit: F,
) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(usize, Complex64),
{
    let (channel, derotate) = channel_at(config, pattern, tx, phi_deg)?;
    let sigma = (config.noise_variance() / 2.0).sqrt();
    let n_ports = config.active_port_ids.len();

    for k in 0..tx.len() {
        let x = tx.symbols[k];
        let faded = match &channel {
            Channel::Switched { ports } => {
                let TxPath::Port(id) = tx.emissions[k].path else {
                    return Err(Error::InvalidSession("record is not switched".into()));
                };
                let g = ports
                    .iter()
                    .find(|p| p.0 == id)
                    .map(|p| p.1)
                    .ok_or(Error::UnknownPort(id))?;
                x * g
            }
            Channel::Multiport { gain, an_gains } => {
                let mut s = x * gain;
                if let (Some(g), Some(an)) = (an_gains, &tx.artificial_noise) {
                    let row = &an[k * n_ports..(k + 1) * n_ports];
                    s += row.iter().zip(g).map(|(a, g)| a * g).sum::<Complex64>();
                }
                s
            }
        };
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let r = faded + Complex64::new(re, im) * sigma;
        visit(k, r * derotate);
    }
    Ok(())
}

/// Bit errors and EVM at `phi_deg` after the genie constant-phase equalizer.
///
/// The equalizer removes `arg` of the uniform mean of the per-port effective
/// gains (switched) or of the composite gain (multiport), modeling the
/// strongest receiver that can only undo a static rotation.
pub fn receive_and_count<R: Rng + ?Sized>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    tx: &TxRecord,
    phi_deg: f64,
    rng: &mut R,
) -> Result<RxOutcome> {
    let mut errors = 0u64;
    let mut err_pow = 0.0;
    receive_each(config, pattern, tx, phi_deg, rng, |k, r| {
        let (b0, b1) = decide(r);
        errors += (b0 != tx.bits[2 * k]) as u64 + (b1 != tx.bits[2 * k + 1]) as u64;
        let ideal = QPSK_POINTS[((b0 as usize) << 1) | b1 as usize];
        err_pow += (r - ideal).norm_sqr();
    })?;
    Ok(RxOutcome {
        bit_errors: errors,
        n_bits: 2 * tx.len() as u64,
        evm_rms: (err_pow / tx.len().max(1) as f64).sqrt(),
    })
}

/// Equalized received symbols at `phi_deg`.
pub fn receive_symbols<R: Rng + ?Sized>(
    config: &DmSessionConfig,
    pattern: &AzimuthPattern,
    tx: &TxRecord,
    phi_deg: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(tx.len());
    receive_each(config, pattern, tx, phi_deg, rng, |_, r| out.push(r))?;
    Ok(out)
}
