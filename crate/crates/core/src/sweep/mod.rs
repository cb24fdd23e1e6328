//! Full-plane BER sweeps and the reports built on them.
//!
//! A sweep evaluates one transmitted record (drawn once from the session's
//! transmitter stream) at every grid azimuth, with an independent noise
//! stream per angle (see [`seed`]). Serial and parallel execution produce
//! bit-identical results.

mod regions;
pub mod seed;
mod table;

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::{random_bits, receive_and_count, receive_symbols, transmit, DmSessionConfig, TxRecord};
use crate::pattern::{grid_size, AzimuthPattern};
use crate::{Error, Result};

pub use regions::{extract_regions, extract_regions_from, lu_metrics, LuMetrics, Region, RegionReport};
pub use table::{
    standard_configurations, subset_table, subset_table_for, SubsetReport, SubsetRow, TableConfig, TableSettings,
    REGION_THRESHOLD, TABLE_CSV_HEADER,
};

pub const SWEEP_CSV_HEADER: &str = "angle_deg,ber,evm_rms";

/// How per-angle evaluations are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// Dedicated pool with this many threads (0 = rayon's default).
    Threads(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerSweepResult {
    pub step_deg: f64,
    pub ber: Vec<f64>,
    pub evm_rms: Option<Vec<f64>>,
    pub session: DmSessionConfig,
}

impl BerSweepResult {
    pub fn len(&self) -> usize {
        self.ber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ber.is_empty()
    }

    pub fn angle_deg(&self, k: usize) -> f64 {
        k as f64 * self.step_deg
    }

    /// Grid index closest to `phi_deg`.
    pub fn nearest_index(&self, phi_deg: f64) -> usize {
        (crate::wrap_deg(phi_deg) / self.step_deg).round() as usize % self.len()
    }

    /// `angle_deg,ber,evm_rms` rows; the EVM column is empty when absent.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(40 * self.len());
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for (k, ber) in self.ber.iter().enumerate() {
            let _ = write!(out, "{},{ber},", self.angle_deg(k));
            if let Some(evm) = &self.evm_rms {
                let _ = write!(out, "{}", evm[k]);
            }
            out.push('\n');
        }
        out
    }
}

/// Draws the session's bits and transmit record from its transmitter stream.
pub fn session_transmission(session: &DmSessionConfig, pattern: &AzimuthPattern) -> Result<TxRecord> {
    let mut rng = seed::stream_rng(session.seed, seed::TX_STREAM);
    let bits = random_bits(2 * session.n_symbols, &mut rng);
    transmit(session, pattern, &bits, &mut rng)
}

pub fn ber_sweep(session: &DmSessionConfig, pattern: &AzimuthPattern, step_deg: f64) -> Result<BerSweepResult> {
    ber_sweep_with(session, pattern, step_deg, Execution::Parallel)
}

pub fn ber_sweep_with(
    session: &DmSessionConfig,
    pattern: &AzimuthPattern,
    step_deg: f64,
    execution: Execution,
) -> Result<BerSweepResult> {
    let n = grid_size(step_deg)?;
    session.validate_for(pattern)?;
    let tx = session_transmission(session, pattern)?;

    let eval = |k: usize| {
        let mut rng = seed::stream_rng(session.seed, k as u64);
        receive_and_count(session, pattern, &tx, k as f64 * step_deg, &mut rng).map(|o| (o.ber(), o.evm_rms))
    };
    let outcomes: Vec<(f64, f64)> = match execution {
        Execution::Serial => (0..n).map(eval).collect::<Result<_>>()?,
        Execution::Parallel => (0..n).into_par_iter().map(eval).collect::<Result<_>>()?,
        Execution::Threads(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?
            .install(|| (0..n).into_par_iter().map(eval).collect::<Result<_>>())?,
    };
    let (ber, evm) = outcomes.into_iter().unzip();
    Ok(BerSweepResult {
        step_deg,
        ber,
        evm_rms: Some(evm),
        session: session.clone(),
    })
}

/// Rows read back from a sweep CSV (for plotting).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub angle_deg: Vec<f64>,
    pub ber: Vec<f64>,
    pub evm_rms: Vec<Option<f64>>,
}

pub fn parse_sweep_csv(text: &str) -> Result<SweepTable> {
    let bad = |line: usize, msg: String| Err(Error::InvalidSweep(format!("line {line}: {msg}")));
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, h)) if h == SWEEP_CSV_HEADER => {}
        Some((n, h)) => return bad(n, format!("expected header '{SWEEP_CSV_HEADER}', got '{h}'")),
        None => return bad(1, "empty input".into()),
    }
    let mut table = SweepTable {
        angle_deg: vec![],
        ber: vec![],
        evm_rms: vec![],
    };
    for (n, line) in lines {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return bad(n, format!("expected 3 columns, found {}", cols.len()));
        }
        let angle: f64 = match cols[0].parse() {
            Ok(v) if f64::is_finite(v) => v,
            _ => return bad(n, format!("bad angle '{}'", cols[0])),
        };
        let ber: f64 = match cols[1].parse() {
            Ok(v) if (0.0..=1.0).contains(&v) => v,
            _ => return bad(n, format!("bad ber '{}'", cols[1])),
        };
        let evm = if cols[2].is_empty() {
            None
        } else {
            match cols[2].parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Some(v),
                _ => return bad(n, format!("bad evm '{}'", cols[2])),
            }
        };
        table.angle_deg.push(angle);
        table.ber.push(ber);
        table.evm_rms.push(evm);
    }
    if table.ber.is_empty() {
        return bad(1, "no data rows".into());
    }
    Ok(table)
}

/// Equalized IQ samples observed at one azimuth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub phi_deg: f64,
    pub points: Vec<Complex64>,
    pub evm_rms: f64,
}

pub fn constellation_capture(
    session: &DmSessionConfig,
    pattern: &AzimuthPattern,
    phi_deg: f64,
    k_symbols: usize,
) -> Result<Constellation> {
    if k_symbols == 0 {
        return Err(Error::InvalidSession("k_symbols must be >= 1".into()));
    }
    let session = DmSessionConfig {
        n_symbols: k_symbols,
        ..session.clone()
    };
    session.validate_for(pattern)?;
    let tx = session_transmission(&session, pattern)?;
    let mut rng = seed::stream_rng(session.seed, seed::CAPTURE_STREAM);
    let points = receive_symbols(&session, pattern, &tx, phi_deg, &mut rng)?;
    let err_pow: f64 = points
        .iter()
        .map(|p| {
            crate::dm::QPSK_POINTS
                .iter()
                .map(|c| (p - c).norm_sqr())
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(Constellation {
        phi_deg,
        evm_rms: (err_pow / points.len() as f64).sqrt(),
        points,
    })
}
