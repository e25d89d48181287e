//! Subcommand implementations. Each command reads the config, writes the run
//! manifest first, then its result CSVs.

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::schema::{ConfigFile, Resolved};
use leobf::opt::{benchmark, summarize, SolverConfig};
use leobf::rem;
use leobf::sim::{self, GridSpec};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub struct CommonArgs {
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub quiet: bool,
}

impl CommonArgs {
    fn load(&self) -> Result<(String, Resolved), CliError> {
        let text = fs::read_to_string(&self.config_path).map_err(|e| {
            CliError::Config(format!(
                "cannot read config {}: {e}",
                self.config_path.display()
            ))
        })?;
        let file = ConfigFile::parse(&text)?;
        let resolved = file.resolve(self.seed_override)?;
        Ok((text, resolved))
    }

    fn prepare_out_dir(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out_dir)?;
        Ok(())
    }

    fn say(&self, message: &str) {
        if !self.quiet {
            println!("{message}");
        }
    }
}

fn write_manifest(
    common: &CommonArgs,
    command: &str,
    config_text: &str,
    resolved: &Resolved,
    outputs: &[&Path],
) -> Result<(), CliError> {
    let manifest = RunManifest::new(
        command,
        &common.config_path,
        config_text,
        common.seed_override,
        resolved,
        outputs,
    )?;
    manifest.write(&common.out_dir.join("manifest.json"))
}

fn trace_csv(trace: &sim::CapacityTrace) -> String {
    let mut out = String::from("t_s");
    for id in &trace.user_ids {
        let _ = write!(out, ",user_{id}_bps");
    }
    out.push_str(",total_bps,rem_update\n");
    for row in &trace.rows {
        let _ = write!(out, "{:.6}", row.t_s);
        for bps in &row.per_user_bps {
            let _ = write!(out, ",{bps}");
        }
        let _ = writeln!(out, ",{},{}", row.total_bps, row.rem_update);
    }
    out
}

pub fn cmd_run(common: &CommonArgs, dump_snapshots: bool) -> Result<(), CliError> {
    let (text, resolved) = common.load()?;
    common.prepare_out_dir()?;

    let trace_path = common.out_dir.join("trace.csv");
    let snapshots_path = common.out_dir.join("snapshots.csv");
    let mut outputs: Vec<&Path> = vec![&trace_path];
    if dump_snapshots {
        outputs.push(&snapshots_path);
    }
    write_manifest(common, "run", &text, &resolved, &outputs)?;

    let trace = sim::run_pass(&resolved.scenario)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&trace_path, trace_csv(&trace))?;

    if dump_snapshots {
        fs::write(&snapshots_path, snapshots_csv(&resolved))?;
    }
    common.say(&format!(
        "run: {} rows -> {}",
        trace.rows.len(),
        trace_path.display()
    ));
    Ok(())
}

/// Debug dump of the REM view at every update instant.
fn snapshots_csv(resolved: &Resolved) -> String {
    let scenario = &resolved.scenario;
    let mut out = String::from("timestamp_s,kind,id,lat_deg,lon_deg,eirp_w\n");
    let policy = scenario.effective_policy();
    let dt = scenario.rem_policy.update_interval_s;
    let updates = (scenario.duration_s / dt).floor() as u64;
    for i in 0..=updates {
        let t = i as f64 * dt;
        let snapshot = rem::query(&scenario.world, &policy, t);
        for (kind, nodes) in [
            ("user", &snapshot.reported_users),
            ("interferer", &snapshot.reported_interferers),
        ] {
            for n in nodes {
                let _ = writeln!(
                    out,
                    "{:.6},{kind},{},{},{},{}",
                    snapshot.timestamp_s,
                    n.id,
                    n.position.latitude_deg(),
                    n.position.longitude_deg(),
                    n.eirp_w
                );
            }
        }
    }
    out
}

pub fn cmd_bench(common: &CommonArgs, summary: bool) -> Result<(), CliError> {
    let (text, resolved) = common.load()?;
    common.prepare_out_dir()?;

    let bench_path = common.out_dir.join("bench.csv");
    let summary_path = common.out_dir.join("bench_summary.csv");
    let mut outputs: Vec<&Path> = vec![&bench_path];
    if summary {
        outputs.push(&summary_path);
    }
    write_manifest(common, "bench", &text, &resolved, &outputs)?;

    let scenario = &resolved.scenario;
    let template = bench_template(&resolved)?;
    let configs: Vec<SolverConfig> = resolved
        .file
        .bench_algorithms()?
        .into_iter()
        .map(|algorithm| SolverConfig {
            algorithm,
            ..scenario.solver.clone()
        })
        .collect();
    let rows = benchmark(
        &template,
        &configs,
        resolved.file.bench.trials,
        scenario.master_seed,
        &resolved.file.bench_draw(),
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = String::from("algorithm,trial,sinr_db,capacity_bps,wall_time_s,eval_count\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.6},{}",
            row.algorithm, row.trial, row.sinr_db, row.capacity_bps, row.wall_time_s, row.eval_count
        );
    }
    fs::write(&bench_path, csv)?;

    if summary {
        let mut csv = String::from(
            "algorithm,trials,min_sinr_db,q1_sinr_db,median_sinr_db,q3_sinr_db,max_sinr_db,mean_sinr_db,mean_wall_time_s\n",
        );
        for s in summarize(&rows) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{:.6}",
                s.algorithm,
                s.trials,
                s.min_sinr_db,
                s.q1_sinr_db,
                s.median_sinr_db,
                s.q3_sinr_db,
                s.max_sinr_db,
                s.mean_sinr_db,
                s.mean_wall_time_s
            );
        }
        fs::write(&summary_path, csv)?;
    }
    common.say(&format!("bench: {} rows -> {}", rows.len(), bench_path.display()));
    Ok(())
}

/// The benchmark reuses the scenario's world only for emitter counts and
/// powers; directions are redrawn per trial.
fn bench_template(resolved: &Resolved) -> Result<leobf::opt::ObjectiveSpec, CliError> {
    let scenario = &resolved.scenario;
    let nadir = leobf::geom::ArrivalDirection::new(
        0.0,
        0.0,
        resolved.file.bench_draw().satellite_altitude_km,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let emitters = |nodes: &[rem::GroundNode]| -> Vec<leobf::opt::DirectedEmitter> {
        nodes
            .iter()
            .map(|n| leobf::opt::DirectedEmitter {
                direction: nadir,
                eirp_w: n.eirp_w,
            })
            .collect()
    };
    leobf::opt::ObjectiveSpec::new(
        scenario.mode,
        emitters(scenario.world.users()),
        emitters(scenario.world.interferers()),
        scenario.geometry,
        scenario.budget,
    )
    .map_err(|e| CliError::Config(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    DeltaT,
    Q,
    ErrorKm,
    ArraySize,
}

impl std::str::FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "delta_t" => Ok(SweepAxis::DeltaT),
            "q" => Ok(SweepAxis::Q),
            "error_km" => Ok(SweepAxis::ErrorKm),
            "array_size" => Ok(SweepAxis::ArraySize),
            other => Err(CliError::Config(format!(
                "unknown sweep axis '{other}' (expected delta_t | q | error_km | array_size)"
            ))),
        }
    }
}

pub struct SweepArgs {
    pub axis: SweepAxis,
    pub values: Option<String>,
    pub delta_ts: Option<String>,
    pub n_seeds: usize,
}

fn parse_list<T: std::str::FromStr>(csv: &str, what: &str) -> Result<Vec<T>, CliError> {
    csv.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("cannot parse {what} value '{v}'")))
        })
        .collect()
}

fn parse_sizes(csv: &str) -> Result<Vec<(usize, usize)>, CliError> {
    csv.split(',')
        .map(|v| {
            let v = v.trim();
            let (m, n) = v
                .split_once('x')
                .ok_or_else(|| CliError::Config(format!("array size '{v}' is not MxN")))?;
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| CliError::Config(format!("array size '{v}' is not MxN")))
            };
            Ok((parse(m)?, parse(n)?))
        })
        .collect()
}

pub fn cmd_sweep(common: &CommonArgs, args: &SweepArgs) -> Result<(), CliError> {
    let (text, resolved) = common.load()?;
    common.prepare_out_dir()?;

    let sweep_path = common.out_dir.join("sweep.csv");
    write_manifest(common, "sweep", &text, &resolved, &[&sweep_path])?;

    let scenario = &resolved.scenario;
    let config_dt = scenario.rem_policy.update_interval_s;
    let delta_ts: Vec<f64> = match &args.delta_ts {
        Some(csv) => parse_list(csv, "delta_t")?,
        None => vec![config_dt],
    };
    let j = scenario.world.num_interferers();

    let mut csv = String::from("param_name,param_value,delta_t_s,seed,mean_total_bps\n");
    match args.axis {
        SweepAxis::DeltaT => {
            let values: Vec<f64> = match &args.values {
                Some(v) => parse_list(v, "delta_t")?,
                None => vec![1.0, 5.0, 15.0],
            };
            let rows = sim::sweep_partial(scenario, &[j], &values, args.n_seeds)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            for r in rows {
                let _ = writeln!(
                    csv,
                    "delta_t_s,{},{},{},{}",
                    r.delta_t_s, r.delta_t_s, r.seed, r.mean_total_bps
                );
            }
        }
        SweepAxis::Q => {
            let values: Vec<usize> = match &args.values {
                Some(v) => parse_list(v, "q")?,
                None => (1..=j).rev().collect(),
            };
            let rows = sim::sweep_partial(scenario, &values, &delta_ts, args.n_seeds)
                .map_err(map_sweep_error)?;
            for r in rows {
                let _ = writeln!(csv, "q,{},{},{},{}", r.q, r.delta_t_s, r.seed, r.mean_total_bps);
            }
        }
        SweepAxis::ErrorKm => {
            let values: Vec<f64> = match &args.values {
                Some(v) => parse_list(v, "error_km")?,
                None => vec![0.0, 25.0, 50.0, 100.0],
            };
            let size = (scenario.geometry.m_rows(), scenario.geometry.n_cols());
            let rows = sim::sweep_error(scenario, &values, &[size], args.n_seeds)
                .map_err(map_sweep_error)?;
            for r in rows {
                let _ = writeln!(
                    csv,
                    "error_km,{},{},{},{}",
                    r.error_km, config_dt, r.seed, r.mean_total_bps
                );
            }
        }
        SweepAxis::ArraySize => {
            let sizes = match &args.values {
                Some(v) => parse_sizes(v)?,
                None => vec![(4, 4), (8, 8)],
            };
            let error = scenario.rem_policy.position_error_km;
            let rows = sim::sweep_error(scenario, &[error], &sizes, args.n_seeds)
                .map_err(map_sweep_error)?;
            for r in rows {
                let _ = writeln!(
                    csv,
                    "array_size,{}x{},{},{},{}",
                    r.m_rows, r.n_cols, config_dt, r.seed, r.mean_total_bps
                );
            }
        }
    }
    fs::write(&sweep_path, csv)?;
    common.say(&format!("sweep -> {}", sweep_path.display()));
    Ok(())
}

/// Sweep-value validation problems are config errors, not runtime failures.
fn map_sweep_error(e: leobf::Error) -> CliError {
    match e {
        leobf::Error::InvalidConfig(msg) => CliError::Config(msg),
        other => CliError::Runtime(other.to_string()),
    }
}

pub struct FootprintArgs {
    pub time_s: f64,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    pub resolution_deg: f64,
}

pub fn cmd_footprint(common: &CommonArgs, args: &FootprintArgs) -> Result<(), CliError> {
    let (text, resolved) = common.load()?;
    common.prepare_out_dir()?;

    let footprint_path = common.out_dir.join("footprint.csv");
    write_manifest(common, "footprint", &text, &resolved, &[&footprint_path])?;

    let grid = GridSpec {
        lat_min_deg: args.lat_min,
        lat_max_deg: args.lat_max,
        lon_min_deg: args.lon_min,
        lon_max_deg: args.lon_max,
        resolution_deg: args.resolution_deg,
    };
    grid.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let fp = sim::footprint(&resolved.scenario, &grid, args.time_s)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = String::from("lat_deg,lon_deg,rel_power_db\n");
    for cell in &fp.cells {
        let _ = writeln!(csv, "{},{},{}", cell.lat_deg, cell.lon_deg, cell.rel_power_db);
    }
    fs::write(&footprint_path, csv)?;
    common.say(&format!(
        "footprint: {} cells -> {}",
        fp.cells.len(),
        footprint_path.display()
    ));
    Ok(())
}

pub fn cmd_validate(common: &CommonArgs) -> Result<(), CliError> {
    let (_text, resolved) = common.load()?;
    common.say(&format!(
        "config ok: K={}, J={}, {}x{} array, duration {} s",
        resolved.scenario.world.num_users(),
        resolved.scenario.world.num_interferers(),
        resolved.scenario.geometry.m_rows(),
        resolved.scenario.geometry.n_cols(),
        resolved.scenario.duration_s
    ));
    Ok(())
}
