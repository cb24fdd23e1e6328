mod manifest;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dirmod::antenna::{canonical_antenna, PortId};
use dirmod::dm::{DmSessionConfig, Scheme};
use dirmod::pattern::{
    apply_shadowing, parse_pattern_csv, resample, synthesize_pattern, write_pattern_csv, AzimuthPattern,
};
use dirmod::plot::{render_svg, PlotKind, PlotOptions, Series};
use dirmod::sweep::{
    ber_sweep_with, extract_regions, lu_metrics, parse_sweep_csv, standard_configurations, subset_table_for, Execution,
    LuMetrics, Region, TableConfig, TableSettings, REGION_THRESHOLD,
};

use manifest::{PatternSource, RunManifest, RunSpec, MANIFEST_FILE};

pub const THREADS_ENV: &str = "DIRMOD_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or session parameters.
    Usage(String),
    /// Unreadable or malformed input file.
    Input(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn runtime(e: impl fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "dirmod",
    version,
    about = "Directional modulation simulator for multi-mode antennas"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER-vs-azimuth sweep for one session; writes sweep.csv, regions.json, manifest.json.
    Sweep(SweepArgs),
    /// Region counts and beamwidths for the standard port subsets; writes table.json, table.csv, manifest.json.
    CompareSubsets(CompareArgs),
    /// Render one or more sweep CSVs as an SVG plot.
    Plot(PlotArgs),
    /// Synthesize, import or shadow pattern CSVs.
    #[command(subcommand)]
    Pattern(PatternCommand),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    Switched,
    Multiport,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Switched => Scheme::SwitchedSinglePort,
            SchemeArg::Multiport => Scheme::SimultaneousMultiport,
        }
    }
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Pattern CSV to use instead of the analytic five-port antenna.
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "switched")]
    scheme: SchemeArg,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    ports: Vec<PortId>,
    /// Handshake port (switched); drawn at random when omitted.
    #[arg(long)]
    reference: Option<PortId>,
    /// LU azimuth in degrees, [0, 360).
    #[arg(long, allow_negative_numbers = true)]
    lu: f64,
    #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 100_000)]
    symbols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// Artificial-noise power ratio (multiport).
    #[arg(long, default_value_t = 0.0)]
    an_ratio: f64,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Evaluate a single multiport subset instead of the standard set, e.g. `--subsets 1,4,5`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    subsets: Vec<PortId>,
    #[arg(long, value_delimiter = ',', default_value = "45,135,225,315")]
    lu: Vec<f64>,
    #[arg(long, default_value_t = 12.0, allow_negative_numbers = true)]
    snr_db: f64,
    #[arg(long, default_value_t = 100_000)]
    symbols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV (repeat for overlays; first solid, then dashed).
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Legend labels, one per input (defaults to file stems).
    #[arg(long = "label")]
    labels: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    lu: Option<f64>,
    #[arg(long)]
    cartesian: bool,
    #[arg(long)]
    title: Option<String>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Debug, Subcommand)]
enum PatternCommand {
    /// Tabulate the analytic five-port antenna.
    Synth {
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Validate a pattern CSV, optionally re-gridding it.
    Import {
        input: PathBuf,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Apply a raised-cosine shadowing mask.
    Shadow {
        /// Source pattern (defaults to the analytic antenna at 1 deg).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        center: f64,
        #[arg(long)]
        width: f64,
        #[arg(long)]
        depth_db: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Output directory (defaults to the manifest's directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::CompareSubsets(a) => cmd_compare_subsets(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Pattern(p) => cmd_pattern(p),
        Command::Replay(a) => cmd_replay(a),
    }
}

fn execution_from_env() -> CliResult<Execution> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(Execution::Parallel),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(Execution::Parallel),
            Ok(n) => Ok(Execution::Threads(n)),
            Err(_) => Err(CliError::Usage(format!("{THREADS_ENV}='{v}' is not a thread count"))),
        },
    }
}

fn read_pattern(path: &Path) -> CliResult<AzimuthPattern> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read pattern {}: {e}", path.display())))?;
    parse_pattern_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_pattern(source: &PatternSource) -> CliResult<AzimuthPattern> {
    match source {
        PatternSource::Synth { step_deg } => {
            synthesize_pattern(&canonical_antenna(), *step_deg).map_err(|e| CliError::Usage(e.to_string()))
        }
        PatternSource::File { path } => read_pattern(path),
    }
}

fn pattern_source(path: Option<PathBuf>, step_deg: f64) -> PatternSource {
    match path {
        Some(path) => PatternSource::File { path },
        None => PatternSource::Synth { step_deg },
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(runtime)
}

fn check_step(step: f64) -> CliResult<()> {
    dirmod::pattern::grid_size(step)
        .map(|_| ())
        .map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
struct RegionsJson<'a> {
    threshold: f64,
    step_deg: f64,
    regions: &'a [Region],
    lu: LuMetrics,
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let session = DmSessionConfig {
        scheme: a.scheme.into(),
        active_port_ids: a.ports,
        reference_port_id: a.reference,
        phi_lu_deg: a.lu,
        snr_db: a.snr_db,
        n_symbols: a.symbols,
        seed: a.seed,
        an_power_ratio: a.an_ratio,
    };
    let run = RunSpec::Sweep {
        session,
        step_deg: a.step,
    };
    execute(run, pattern_source(a.source.pattern, a.step), &a.source.out)
}

fn cmd_compare_subsets(a: CompareArgs) -> CliResult<()> {
    let configs = if a.subsets.is_empty() {
        standard_configurations()
    } else {
        let known = standard_configurations();
        let metadata = known
            .iter()
            .find(|c| c.scheme == Scheme::SimultaneousMultiport && c.ports == a.subsets)
            .and_then(|c| c.metadata);
        vec![TableConfig::new(Scheme::SimultaneousMultiport, &a.subsets, metadata)]
    };
    let settings = TableSettings {
        snr_db: a.snr_db,
        n_symbols: a.symbols,
        seed: a.seed,
        phi_lu_deg: a.lu,
        step_deg: a.step,
    };
    let run = RunSpec::CompareSubsets { settings, configs };
    execute(run, pattern_source(a.source.pattern, a.step), &a.source.out)
}

/// Runs a recorded (or freshly built) `RunSpec` and writes outputs plus manifest.
fn execute(run: RunSpec, source: PatternSource, out: &Path) -> CliResult<()> {
    let execution = execution_from_env()?;
    let usage = |e: dirmod::Error| CliError::Usage(e.to_string());

    // flag-level validation before touching any pattern file
    match &run {
        RunSpec::Sweep { session, step_deg } => {
            check_step(*step_deg)?;
            session.validate().map_err(usage)?;
        }
        RunSpec::CompareSubsets { settings, configs } => {
            check_step(settings.step_deg)?;
            if settings.phi_lu_deg.is_empty() {
                return Err(CliError::Usage("no LU directions given".into()));
            }
            for cfg in configs {
                for &lu in &settings.phi_lu_deg {
                    let probe = DmSessionConfig {
                        scheme: cfg.scheme,
                        active_port_ids: cfg.ports.clone(),
                        reference_port_id: None,
                        phi_lu_deg: lu,
                        snr_db: settings.snr_db,
                        n_symbols: settings.n_symbols,
                        seed: settings.seed,
                        an_power_ratio: 0.0,
                    };
                    probe.validate().map_err(usage)?;
                }
            }
        }
    }

    let pattern = load_pattern(&source)?;
    let mut outputs = Vec::new();
    match &run {
        RunSpec::Sweep { session, step_deg } => {
            session.validate_for(&pattern).map_err(usage)?;
            let sweep = ber_sweep_with(session, &pattern, *step_deg, execution).map_err(runtime)?;
            let regions = extract_regions(&sweep, REGION_THRESHOLD);
            let lu = lu_metrics(&sweep, &regions);
            let csv_path = out.join("sweep.csv");
            let json_path = out.join("regions.json");
            write_file(&csv_path, &sweep.to_csv())?;
            write_file(
                &json_path,
                &to_json(&RegionsJson {
                    threshold: regions.threshold,
                    step_deg: regions.step_deg,
                    regions: &regions.regions,
                    lu,
                })?,
            )?;
            outputs.extend([csv_path, json_path]);
        }
        RunSpec::CompareSubsets { settings, configs } => {
            for cfg in configs {
                for &id in &cfg.ports {
                    pattern.port_index(id).map_err(usage)?;
                }
            }
            let report = subset_table_for(&pattern, settings, configs, execution).map_err(runtime)?;
            let json_path = out.join("table.json");
            let csv_path = out.join("table.csv");
            write_file(&json_path, &to_json(&report)?)?;
            write_file(&csv_path, &report.to_csv())?;
            outputs.extend([json_path, csv_path]);
        }
    }
    let manifest = RunManifest::new(run, source, outputs);
    write_file(&out.join(MANIFEST_FILE), &to_json(&manifest)?)
}

fn cmd_replay(a: ReplayArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| CliError::Input(format!("cannot read manifest {}: {e}", a.manifest.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.manifest.display())))?;
    let out = match a.out {
        Some(dir) => dir,
        None => a
            .manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    execute(manifest.run, manifest.pattern, &out)
}

fn cmd_plot(a: PlotArgs) -> CliResult<()> {
    if !a.labels.is_empty() && a.labels.len() != a.inputs.len() {
        return Err(CliError::Usage(format!(
            "{} labels for {} inputs",
            a.labels.len(),
            a.inputs.len()
        )));
    }
    let mut series = Vec::with_capacity(a.inputs.len());
    for (i, path) in a.inputs.iter().enumerate() {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let table = parse_sweep_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let label = a.labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem()
                .map_or_else(|| format!("series {}", i + 1), |s| s.to_string_lossy().into_owned())
        });
        series.push(Series {
            label,
            angle_deg: table.angle_deg,
            ber: table.ber,
        });
    }
    let opts = PlotOptions {
        kind: if a.cartesian {
            PlotKind::Cartesian
        } else {
            PlotKind::Polar
        },
        title: a.title,
        lu_deg: a.lu,
        threshold: REGION_THRESHOLD,
    };
    write_file(&a.output, &render_svg(&series, &opts))
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_pattern(cmd: PatternCommand) -> CliResult<()> {
    let input_err = |e: dirmod::Error| CliError::Input(e.to_string());
    match cmd {
        PatternCommand::Synth { step, output } => {
            check_step(step)?;
            let p = synthesize_pattern(&canonical_antenna(), step).map_err(input_err)?;
            emit(&write_pattern_csv(&p), output.as_deref())
        }
        PatternCommand::Import { input, step, output } => {
            let mut p = read_pattern(&input)?;
            if let Some(step) = step {
                check_step(step)?;
                p = resample(&p, step).map_err(input_err)?;
            }
            emit(&write_pattern_csv(&p), output.as_deref())
        }
        PatternCommand::Shadow {
            input,
            center,
            width,
            depth_db,
            output,
        } => {
            let p = match input {
                Some(path) => read_pattern(&path)?,
                None => synthesize_pattern(&canonical_antenna(), 1.0).map_err(input_err)?,
            };
            let s = apply_shadowing(&p, center, width, depth_db).map_err(input_err)?;
            emit(&write_pattern_csv(&s), output.as_deref())
        }
    }
}
