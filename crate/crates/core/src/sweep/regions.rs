use serde::{Deserialize, Serialize};

use super::BerSweepResult;
use crate::wrap_deg;

/// One maximal run of grid angles with BER below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// First grid angle of the run (the run may wrap through 0 deg).
    pub start_deg: f64,
    pub center_deg: f64,
    pub width_deg: f64,
    pub min_ber: f64,
}

impl Region {
    /// Whether grid angle `phi_deg` belongs to this run.
    pub fn contains(&self, phi_deg: f64, step_deg: f64) -> bool {
        let offset = wrap_deg(phi_deg - self.start_deg);
        offset < self.width_deg - step_deg / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub threshold: f64,
    pub step_deg: f64,
    pub regions: Vec<Region>,
}

impl RegionReport {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn containing(&self, phi_deg: f64) -> Option<&Region> {
        self.regions.iter().find(|r| r.contains(phi_deg, self.step_deg))
    }
}

pub fn extract_regions(sweep: &BerSweepResult, threshold: f64) -> RegionReport {
    extract_regions_from(&sweep.ber, sweep.step_deg, threshold)
}

/// Region extraction on a raw BER grid (`ber[k]` at `k * step_deg`).
pub fn extract_regions_from(ber: &[f64], step_deg: f64, threshold: f64) -> RegionReport {
    let n = ber.len();
    let below = |k: usize| ber[k % n] < threshold;
    let mut regions = Vec::new();

    let region = |start: usize, len: usize| {
        let min_ber = (start..start + len).map(|k| ber[k % n]).fold(f64::INFINITY, f64::min);
        Region {
            start_deg: start as f64 * step_deg,
            center_deg: wrap_deg((start as f64 + (len as f64 - 1.0) / 2.0) * step_deg),
            width_deg: len as f64 * step_deg,
            min_ber,
        }
    };

    match (0..n).find(|&k| !below(k)) {
        None if n > 0 => {
            // whole circle: centre on the best angle
            let best = (0..n).min_by(|&a, &b| ber[a].total_cmp(&ber[b])).unwrap_or(0);
            regions.push(Region {
                start_deg: 0.0,
                center_deg: best as f64 * step_deg,
                width_deg: 360.0,
                min_ber: ber[best],
            });
        }
        None => {}
        Some(anchor) => {
            // walk one full turn starting just after a high-BER point so that
            // runs crossing 0 deg come out whole
            let mut k = anchor + 1;
            while k <= anchor + n {
                if below(k) {
                    let start = k;
                    while below(k) {
                        k += 1;
                    }
                    regions.push(region(start % n, k - start));
                } else {
                    k += 1;
                }
            }
        }
    }
    regions.sort_by(|a, b| a.start_deg.total_cmp(&b.start_deg));
    RegionReport {
        threshold,
        step_deg,
        regions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuMetrics {
    pub lu_ber: f64,
    /// Width of the region holding the LU grid angle; 0 when there is none.
    pub lu_beamwidth_deg: f64,
    /// Largest BER outside every region.
    pub max_off_region_ber: f64,
}

pub fn lu_metrics(sweep: &BerSweepResult, regions: &RegionReport) -> LuMetrics {
    let lu_index = sweep.nearest_index(sweep.session.phi_lu_deg);
    let lu_angle = sweep.angle_deg(lu_index);
    let lu_beamwidth_deg = regions.containing(lu_angle).map_or(0.0, |r| r.width_deg);
    let max_off_region_ber = (0..sweep.len())
        .filter(|&k| regions.containing(sweep.angle_deg(k)).is_none())
        .map(|k| sweep.ber[k])
        .fold(0.0, f64::max);
    LuMetrics {
        lu_ber: sweep.ber[lu_index],
        lu_beamwidth_deg,
        max_off_region_ber,
    }
}
