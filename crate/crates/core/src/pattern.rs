//! Sampled horizontal-plane far-field patterns.
//!
//! An [`AzimuthPattern`] holds one complex gain per port per grid angle on
//! a uniform grid `k * step_deg`, `k = 0..360/step_deg`. Patterns come from
//! the analytic antenna model ([`synthesize_pattern`]) or from solver
//! exports in the pattern CSV format:
//!
//! ```text
//! angle_deg,port,mag_db,phase_deg
//! 0,1,0,0
//! 0,2,-3.5,12.25
//! ...
//! ```
//!
//! `mag_db` is `20 log10 |E|`; every port must appear at every grid angle.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antenna::{mode_field, AntennaConfig, PortId};
use crate::{angle_diff_deg, wrap_deg, Error, Result};

pub const CSV_HEADER: &str = "angle_deg,port,mag_db,phase_deg";

const GRID_TOL: f64 = 1e-6;

/// Number of grid points for `step_deg`, or an error if it does not divide 360.
pub fn grid_size(step_deg: f64) -> Result<usize> {
    if !step_deg.is_finite() || step_deg <= 0.0 || step_deg > 360.0 {
        return Err(Error::InvalidStep(step_deg));
    }
    let n = 360.0 / step_deg;
    let rounded = n.round();
    if (n - rounded).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidStep(step_deg));
    }
    Ok(rounded as usize)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AzimuthPattern {
    step_deg: f64,
    port_ids: Vec<PortId>,
    gains: Vec<Vec<Complex64>>,
}

impl AzimuthPattern {
    pub fn new(step_deg: f64, port_ids: Vec<PortId>, gains: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = grid_size(step_deg)?;
        if port_ids.is_empty() {
            return Err(Error::InvalidPattern("no ports".into()));
        }
        if port_ids.len() != gains.len() {
            return Err(Error::InvalidPattern(format!(
                "{} port ids but {} gain rows",
                port_ids.len(),
                gains.len()
            )));
        }
        for (i, (id, row)) in port_ids.iter().zip(&gains).enumerate() {
            if port_ids[..i].contains(id) {
                return Err(Error::InvalidPattern(format!("duplicate port {id}")));
            }
            if row.len() != n {
                return Err(Error::InvalidPattern(format!(
                    "port {id} has {} samples, grid needs {n}",
                    row.len()
                )));
            }
            if let Some(k) = row.iter().position(|g| !(g.re.is_finite() && g.im.is_finite())) {
                return Err(Error::InvalidPattern(format!(
                    "port {id} has a non-finite gain at {} deg",
                    k as f64 * step_deg
                )));
            }
        }
        Ok(Self {
            step_deg,
            port_ids,
            gains,
        })
    }

    pub fn step_deg(&self) -> f64 {
        self.step_deg
    }

    pub fn len(&self) -> usize {
        self.gains[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn port_ids(&self) -> &[PortId] {
        &self.port_ids
    }

    pub fn angle_deg(&self, k: usize) -> f64 {
        k as f64 * self.step_deg
    }

    pub fn port_index(&self, id: PortId) -> Result<usize> {
        self.port_ids
            .iter()
            .position(|&p| p == id)
            .ok_or(Error::UnknownPort(id))
    }

    /// Samples of one port, indexed like the grid.
    pub fn row(&self, port_index: usize) -> &[Complex64] {
        &self.gains[port_index]
    }

    pub fn rows(&self) -> impl Iterator<Item = (PortId, &[Complex64])> {
        self.port_ids.iter().copied().zip(self.gains.iter().map(Vec::as_slice))
    }

    /// Gain of one port at an arbitrary azimuth. Exact on grid points,
    /// complex-linear between them (wrapping from the last point to the first).
    pub fn gain_at(&self, port_index: usize, phi_deg: f64) -> Complex64 {
        let row = &self.gains[port_index];
        let n = row.len();
        let pos = wrap_deg(phi_deg) / self.step_deg;
        let nearest = pos.round();
        if (pos - nearest).abs() < 1e-9 {
            return row[nearest as usize % n];
        }
        let lo = pos.floor();
        let t = pos - lo;
        let a = row[lo as usize % n];
        let b = row[(lo as usize + 1) % n];
        Complex64::new(a.re + (b.re - a.re) * t, a.im + (b.im - a.im) * t)
    }

    /// Gains of every port at `phi_deg`, in port order.
    pub fn gains_at(&self, phi_deg: f64) -> Vec<Complex64> {
        (0..self.port_ids.len()).map(|i| self.gain_at(i, phi_deg)).collect()
    }
}

/// Tabulates every port's analytic mode on a uniform grid.
pub fn synthesize_pattern(config: &AntennaConfig, step_deg: f64) -> Result<AzimuthPattern> {
    let n = grid_size(step_deg)?;
    let gains = config
        .ports()
        .iter()
        .map(|p| (0..n).map(|k| mode_field(&p.mode, k as f64 * step_deg)).collect())
        .collect();
    AzimuthPattern::new(step_deg, config.ports().iter().map(|p| p.id).collect(), gains)
}

fn csv_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::PatternCsv {
        line,
        column,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(raw: &str, line: usize, column: usize, name: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| csv_err(line, column, format!("cannot parse {name} '{}'", raw.trim())))
}

/// Parses the pattern CSV format. Ports are returned sorted by id.
pub fn parse_pattern_csv(text: &str) -> Result<AzimuthPattern> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, h)) if h.split(',').map(str::trim).eq(CSV_HEADER.split(',')) => {}
        Some((n, h)) => {
            return Err(csv_err(n, 1, format!("expected header '{CSV_HEADER}', got '{h}'")));
        }
        None => return Err(csv_err(1, 1, "empty input")),
    }

    // angle key (micro-degrees) -> (angle, first line seen)
    let mut angles: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    // port -> angle key -> gain
    let mut ports: BTreeMap<PortId, BTreeMap<i64, Complex64>> = BTreeMap::new();

    for (n, line) in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(csv_err(
                n,
                cols.len().min(4) + 1,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let angle: f64 = field(cols[0], n, 1, "angle_deg")?;
        let port: PortId = field(cols[1], n, 2, "port")?;
        let mag_db: f64 = field(cols[2], n, 3, "mag_db")?;
        let phase_deg: f64 = field(cols[3], n, 4, "phase_deg")?;

        if !angle.is_finite() || !(0.0..360.0).contains(&angle) {
            return Err(csv_err(n, 1, format!("angle {angle} outside [0, 360)")));
        }
        if mag_db.is_nan() || mag_db == f64::INFINITY {
            return Err(csv_err(n, 3, format!("magnitude {mag_db} dB is not usable")));
        }
        if !phase_deg.is_finite() {
            return Err(csv_err(n, 4, format!("phase {phase_deg} is not finite")));
        }

        let key = (angle * 1e6).round() as i64;
        angles.entry(key).or_insert((angle, n));
        let gain = Complex64::from_polar(10f64.powf(mag_db / 20.0), phase_deg.to_radians());
        if ports.entry(port).or_default().insert(key, gain).is_some() {
            return Err(csv_err(n, 1, format!("duplicate row for angle {angle}, port {port}")));
        }
    }

    if ports.is_empty() {
        return Err(csv_err(1, 1, "no data rows"));
    }

    let grid: Vec<(f64, usize)> = angles.values().copied().collect();
    if grid[0].0.abs() > GRID_TOL {
        return Err(csv_err(grid[0].1, 1, "non-uniform grid: first angle must be 0"));
    }
    let step = if grid.len() == 1 { 360.0 } else { grid[1].0 - grid[0].0 };
    for (k, &(angle, line)) in grid.iter().enumerate() {
        if (angle - k as f64 * step).abs() > GRID_TOL {
            return Err(csv_err(
                line,
                1,
                format!("non-uniform grid: angle {angle} breaks spacing {step}"),
            ));
        }
    }
    let n = grid_size(step).map_err(|_| {
        csv_err(
            grid[0].1,
            1,
            format!("non-uniform grid: step {step} does not divide 360"),
        )
    })?;
    if n != grid.len() {
        let (last, line) = grid[grid.len() - 1];
        return Err(csv_err(
            line,
            1,
            format!(
                "non-uniform grid: {} angles up to {last} do not close the circle at step {step}",
                grid.len()
            ),
        ));
    }

    let keys: Vec<i64> = angles.keys().copied().collect();
    let mut ids = Vec::with_capacity(ports.len());
    let mut gains = Vec::with_capacity(ports.len());
    for (id, samples) in ports {
        let row = keys
            .iter()
            .zip(&grid)
            .map(|(key, &(angle, line))| {
                samples
                    .get(key)
                    .copied()
                    .ok_or_else(|| csv_err(line, 2, format!("port {id} missing at angle {angle}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ids.push(id);
        gains.push(row);
    }
    AzimuthPattern::new(step, ids, gains)
}

/// Serializes a pattern in the CSV format, angle-major, ports in pattern order.
pub fn write_pattern_csv(pattern: &AzimuthPattern) -> String {
    let mut out = String::with_capacity(32 * pattern.len() * pattern.port_ids.len() + 40);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for k in 0..pattern.len() {
        let angle = pattern.angle_deg(k);
        for (id, row) in pattern.rows() {
            let g = row[k];
            let mag_db = 20.0 * g.norm().log10();
            let phase = g.arg().to_degrees();
            let _ = writeln!(out, "{angle},{id},{mag_db},{phase}");
        }
    }
    out
}

/// Re-grids a pattern by complex-linear interpolation.
pub fn resample(pattern: &AzimuthPattern, new_step_deg: f64) -> Result<AzimuthPattern> {
    let n = grid_size(new_step_deg)?;
    if (new_step_deg - pattern.step_deg).abs() < 1e-12 {
        return Ok(pattern.clone());
    }
    let gains = (0..pattern.port_ids.len())
        .map(|i| (0..n).map(|k| pattern.gain_at(i, k as f64 * new_step_deg)).collect())
        .collect();
    AzimuthPattern::new(new_step_deg, pattern.port_ids.clone(), gains)
}

/// Raised-cosine attenuation in dB at angular offset `offset_deg` from the
/// mask center.
fn shadow_db(offset_deg: f64, width_deg: f64, depth_db: f64) -> f64 {
    let half = width_deg / 2.0;
    if offset_deg >= half {
        0.0
    } else {
        depth_db * 0.5 * (1.0 + (std::f64::consts::PI * offset_deg / half).cos())
    }
}

/// Attenuates all ports around `center_deg` with a raised-cosine mask:
/// `depth_db` at the center, 0 dB at `center +- width/2` and beyond.
/// Phases are untouched.
pub fn apply_shadowing(
    pattern: &AzimuthPattern,
    center_deg: f64,
    width_deg: f64,
    depth_db: f64,
) -> Result<AzimuthPattern> {
    if !(width_deg > 0.0 && width_deg <= 360.0) {
        return Err(Error::InvalidShadowing(format!(
            "width {width_deg} deg outside (0, 360]"
        )));
    }
    if !(depth_db.is_finite() && depth_db >= 0.0) {
        return Err(Error::InvalidShadowing(format!("depth {depth_db} dB must be >= 0")));
    }
    if !center_deg.is_finite() {
        return Err(Error::InvalidShadowing("center is not finite".into()));
    }
    let scale: Vec<f64> = (0..pattern.len())
        .map(|k| {
            let offset = angle_diff_deg(pattern.angle_deg(k), center_deg).abs();
            10f64.powf(-shadow_db(offset, width_deg, depth_db) / 20.0)
        })
        .collect();
    let gains = pattern
        .gains
        .iter()
        .map(|row| row.iter().zip(&scale).map(|(g, s)| g * *s).collect())
        .collect();
    AzimuthPattern::new(pattern.step_deg, pattern.port_ids.clone(), gains)
}
