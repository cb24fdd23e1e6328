use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ber_sweep_with, extract_regions, lu_metrics, Execution};
use crate::antenna::{AntennaMetadata, PortId};
use crate::dm::{DmSessionConfig, Scheme};
use crate::pattern::AzimuthPattern;
use crate::Result;

/// Threshold that defines a low-BER region in comparison tables.
pub const REGION_THRESHOLD: f64 = 1e-2;

/// One antenna configuration evaluated in a comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub name: String,
    pub scheme: Scheme,
    pub ports: Vec<PortId>,
    pub metadata: Option<AntennaMetadata>,
}

impl TableConfig {
    pub fn new(scheme: Scheme, ports: &[PortId], metadata: Option<AntennaMetadata>) -> Self {
        let kind = match scheme {
            Scheme::SwitchedSinglePort => "switched",
            Scheme::SimultaneousMultiport => "multiport",
        };
        let list: Vec<String> = ports.iter().map(|p| format!("P{p}")).collect();
        Self {
            name: format!("{kind} {}", list.join("+")),
            scheme,
            ports: ports.to_vec(),
            metadata,
        }
    }
}

fn meta(profile_lambda: f64, efficiency_pct: f64) -> Option<AntennaMetadata> {
    Some(AntennaMetadata {
        profile_lambda,
        efficiency_pct,
    })
}

/// The five-port antenna (switched and multiport) and its three patch
/// subsets, with each build's profile height (wavelengths) and total efficiency.
pub fn standard_configurations() -> Vec<TableConfig> {
    use Scheme::*;
    vec![
        TableConfig::new(SwitchedSinglePort, &[1, 2, 3, 4, 5], meta(0.19, 49.0)),
        TableConfig::new(SimultaneousMultiport, &[1, 2, 3, 4, 5], meta(0.19, 49.0)),
        TableConfig::new(SimultaneousMultiport, &[2, 3, 4, 5], meta(0.12, 49.0)),
        TableConfig::new(SimultaneousMultiport, &[1, 4, 5], meta(0.12, 87.0)),
        TableConfig::new(SimultaneousMultiport, &[1, 2, 3], meta(0.12, 49.0)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSettings {
    pub snr_db: f64,
    pub n_symbols: usize,
    pub seed: u64,
    pub phi_lu_deg: Vec<f64>,
    pub step_deg: f64,
}

impl Default for TableSettings {
    fn default() -> Self {
        Self {
            snr_db: 12.0,
            n_symbols: 100_000,
            seed: 7,
            phi_lu_deg: vec![45.0, 135.0, 225.0, 315.0],
            step_deg: 1.0,
        }
    }
}

/// Per-configuration averages over the LU directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRow {
    pub name: String,
    pub scheme: Scheme,
    pub ports: Vec<PortId>,
    /// Mean region count over the LU directions.
    pub region_count: f64,
    pub region_counts: Vec<usize>,
    /// LU region width per LU direction (0 when no region holds the LU).
    pub lu_beamwidths_deg: Vec<f64>,
    pub lu_ber: f64,
    pub lu_beamwidth_deg: f64,
    pub max_off_region_ber: f64,
    pub profile_lambda: Option<f64>,
    pub efficiency_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetReport {
    pub threshold: f64,
    pub settings: TableSettings,
    pub rows: Vec<SubsetRow>,
}

pub const TABLE_CSV_HEADER: &str =
    "name,scheme,ports,region_count,lu_ber,lu_beamwidth_deg,max_off_region_ber,profile_lambda,efficiency_pct";

impl SubsetReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::new();
        out.push_str(TABLE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let ports: Vec<String> = r.ports.iter().map(u32::to_string).collect();
            let scheme = match r.scheme {
                Scheme::SwitchedSinglePort => "switched",
                Scheme::SimultaneousMultiport => "multiport",
            };
            let _ = writeln!(
                out,
                "{},{scheme},{},{},{},{},{},{},{}",
                r.name,
                ports.join(" "),
                r.region_count,
                r.lu_ber,
                r.lu_beamwidth_deg,
                r.max_off_region_ber,
                opt(r.profile_lambda),
                opt(r.efficiency_pct),
            );
        }
        out
    }
}

/// [`subset_table_for`] over [`standard_configurations`].
pub fn subset_table(pattern: &AzimuthPattern, settings: &TableSettings, execution: Execution) -> Result<SubsetReport> {
    subset_table_for(pattern, settings, &standard_configurations(), execution)
}

pub fn subset_table_for(
    pattern: &AzimuthPattern,
    settings: &TableSettings,
    configs: &[TableConfig],
    execution: Execution,
) -> Result<SubsetReport> {
    let mut rows = Vec::with_capacity(configs.len());
    for cfg in configs {
        let mut counts = Vec::new();
        let mut widths = Vec::new();
        let (mut lu_ber, mut off) = (0.0, 0.0);
        for &phi_lu in &settings.phi_lu_deg {
            let session = DmSessionConfig {
                scheme: cfg.scheme,
                active_port_ids: cfg.ports.clone(),
                reference_port_id: None,
                phi_lu_deg: phi_lu,
                snr_db: settings.snr_db,
                n_symbols: settings.n_symbols,
                seed: settings.seed,
                an_power_ratio: 0.0,
            };
            let sweep = ber_sweep_with(&session, pattern, settings.step_deg, execution)?;
            let regions = extract_regions(&sweep, REGION_THRESHOLD);
            let m = lu_metrics(&sweep, &regions);
            counts.push(regions.len());
            lu_ber += m.lu_ber;
            widths.push(m.lu_beamwidth_deg);
            off += m.max_off_region_ber;
        }
        let n = settings.phi_lu_deg.len().max(1) as f64;
        rows.push(SubsetRow {
            name: cfg.name.clone(),
            scheme: cfg.scheme,
            ports: cfg.ports.clone(),
            region_count: counts.iter().sum::<usize>() as f64 / n,
            region_counts: counts,
            lu_ber: lu_ber / n,
            lu_beamwidth_deg: widths.iter().sum::<f64>() / n,
            lu_beamwidths_deg: widths,
            max_off_region_ber: off / n,
            profile_lambda: cfg.metadata.map(|m| m.profile_lambda),
            efficiency_pct: cfg.metadata.map(|m| m.efficiency_pct),
        });
    }
    Ok(SubsetReport {
        threshold: REGION_THRESHOLD,
        settings: settings.clone(),
        rows,
    })
}
