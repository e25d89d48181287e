//! Time-stepped scenario execution.
//!
//! A pass walks evaluation instants at a fixed step. At every REM update
//! instant the satellite queries the REM, recomputes estimated arrival angles
//! from the snapshot and its own ephemeris, and re-solves the weight problem;
//! between updates the weights stay frozen while capacity is evaluated
//! against the true world and the true satellite position. Sweeps rerun the
//! pass across policy settings and seeds; the footprint renders the received
//! power over a ground grid for one solved instant.

use crate::array::{ArrayGeometry, WeightVector};
use crate::error::{Error, Result};
use crate::geom::{ecef_to_arrival, propagate, EcefPosition, OrbitalElements};
use crate::link::{BeamformingMode, LinkBudget};
use crate::opt::{solve, DirectedEmitter, ObjectiveSpec, SolverConfig};
use crate::par::par_map;
use crate::rem::{self, KnownInterferers, RemPolicy, RemSnapshot, WorldState};
use crate::seeds;

const STREAM_SOLVER: u64 = 0x01;
const STREAM_REM_ERROR: u64 = 0x02;
const STREAM_SWEEP_SEED: u64 = 0x03;
const STREAM_STEP_SOLVER: u64 = 0x04;

/// Full description of one simulated pass.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub orbital: OrbitalElements,
    pub geometry: ArrayGeometry,
    pub budget: LinkBudget,
    pub world: WorldState,
    pub rem_policy: RemPolicy,
    pub mode: BeamformingMode,
    pub solver: SolverConfig,
    pub duration_s: f64,
    pub eval_step_s: f64,
    pub master_seed: u64,
    /// Re-solve at every evaluation step against the stale snapshot
    /// positions instead of freezing weights between updates.
    pub reoptimize_each_step: bool,
    /// Test hook: pin the satellite at its epoch position.
    pub freeze_satellite: bool,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "duration_s = {} must be positive",
                self.duration_s
            )));
        }
        if !(self.eval_step_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eval_step_s = {} must be positive",
                self.eval_step_s
            )));
        }
        if self.eval_step_s > self.rem_policy.update_interval_s {
            return Err(Error::InvalidConfig(format!(
                "eval_step_s = {} exceeds rem_policy.update_interval_s = {}",
                self.eval_step_s, self.rem_policy.update_interval_s
            )));
        }
        let ratio = self.rem_policy.update_interval_s / self.eval_step_s;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::InvalidConfig(format!(
                "rem_policy.update_interval_s = {} must be an integer multiple of eval_step_s = {}",
                self.rem_policy.update_interval_s, self.eval_step_s
            )));
        }
        if let KnownInterferers::Count(q) = self.rem_policy.known_interferers {
            if q > self.world.num_interferers() {
                return Err(Error::InvalidConfig(format!(
                    "rem_policy.known_interferer_count = {q} exceeds interferer count J = {}",
                    self.world.num_interferers()
                )));
            }
        }
        Ok(())
    }

    fn steps_per_update(&self) -> usize {
        (self.rem_policy.update_interval_s / self.eval_step_s).round() as usize
    }

    fn num_rows(&self) -> usize {
        (self.duration_s / self.eval_step_s).round() as usize + 1
    }

    /// Effective REM policy with the error stream split off the master seed.
    /// This is the policy the pass actually queries with.
    pub fn effective_policy(&self) -> RemPolicy {
        RemPolicy {
            error_seed: seeds::derive2(
                self.master_seed,
                STREAM_REM_ERROR,
                self.rem_policy.error_seed,
            ),
            ..self.rem_policy
        }
    }

    fn satellite_at(&self, t_s: f64) -> EcefPosition {
        if self.freeze_satellite {
            propagate(&self.orbital, 0.0)
        } else {
            propagate(&self.orbital, t_s)
        }
    }
}

/// One evaluation instant of a pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t_s: f64,
    pub per_user_bps: Vec<f64>,
    pub total_bps: f64,
    pub rem_update: bool,
}

/// Capacity time series over a pass, uniformly spaced at the evaluation step.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTrace {
    pub user_ids: Vec<u32>,
    pub rows: Vec<TraceRow>,
}

impl CapacityTrace {
    pub fn mean_total_bps(&self) -> f64 {
        self.rows.iter().map(|r| r.total_bps).sum::<f64>() / self.rows.len() as f64
    }
}

/// Builds the optimizer's view of the world from a snapshot and the
/// satellite position at the update instant.
fn estimated_objective(
    config: &ScenarioConfig,
    snapshot: &RemSnapshot,
    sat: EcefPosition,
) -> Result<ObjectiveSpec> {
    let to_emitters = |nodes: &[rem::ReportedNode]| -> Result<Vec<DirectedEmitter>> {
        nodes
            .iter()
            .map(|n| {
                Ok(DirectedEmitter {
                    direction: ecef_to_arrival(sat, n.position)?,
                    eirp_w: n.eirp_w,
                })
            })
            .collect()
    };
    ObjectiveSpec::new(
        config.mode,
        to_emitters(&snapshot.reported_users)?,
        to_emitters(&snapshot.reported_interferers)?,
        config.geometry,
        config.budget,
    )
}

/// The true-world objective used for capacity evaluation at time t.
fn true_objective(config: &ScenarioConfig, sat: EcefPosition) -> Result<ObjectiveSpec> {
    let mk = |nodes: &[rem::GroundNode]| -> Result<Vec<DirectedEmitter>> {
        nodes
            .iter()
            .map(|n| {
                Ok(DirectedEmitter {
                    direction: ecef_to_arrival(sat, n.position)?,
                    eirp_w: n.eirp_w,
                })
            })
            .collect()
    };
    ObjectiveSpec::new(
        config.mode,
        mk(config.world.users())?,
        mk(config.world.interferers())?,
        config.geometry,
        config.budget,
    )
}

/// Runs one pass and returns the capacity trace.
///
/// Weight updates happen at integer multiples of the REM update interval
/// (Eq-style frozen weights in between); rows are evaluated against the true
/// world at the true satellite position.
pub fn run_pass(config: &ScenarioConfig) -> Result<CapacityTrace> {
    config.validate()?;
    let policy = config.effective_policy();
    let steps_per_update = config.steps_per_update();
    let n_rows = config.num_rows();

    let mut weights: Vec<WeightVector> = Vec::new();
    let mut rows = Vec::with_capacity(n_rows);

    for row_index in 0..n_rows {
        let t_s = row_index as f64 * config.eval_step_s;
        let update_index = (row_index / steps_per_update) as u64;
        let is_update_row = row_index % steps_per_update == 0;

        if is_update_row {
            let t_update = update_index as f64 * config.rem_policy.update_interval_s;
            let snapshot = rem::query(&config.world, &policy, t_update);
            let sat_update = config.satellite_at(t_update);
            let spec = estimated_objective(config, &snapshot, sat_update)?;
            let solver = SolverConfig {
                seed: seeds::derive2(config.master_seed, STREAM_SOLVER, update_index),
                ..config.solver.clone()
            };
            weights = solve(&spec, &solver)?.weights;
        } else if config.reoptimize_each_step {
            // Alternate reading: re-solve every step against the stale
            // snapshot positions with the current ephemeris.
            let snapshot = rem::query(&config.world, &policy, t_s);
            let spec = estimated_objective(config, &snapshot, config.satellite_at(t_s))?;
            let solver = SolverConfig {
                seed: seeds::derive2(config.master_seed, STREAM_STEP_SOLVER, row_index as u64),
                ..config.solver.clone()
            };
            weights = solve(&spec, &solver)?.weights;
        }

        let evaluation = true_objective(config, config.satellite_at(t_s))?.compile();
        let per_user_bps: Vec<f64> = evaluation
            .per_user_sinr(&weights)?
            .into_iter()
            .map(|g| crate::link::throughput_bps(g, config.budget.bandwidth_hz))
            .collect();
        let total_bps = crate::link::total_capacity_bps(config.mode, &per_user_bps)?;
        rows.push(TraceRow {
            t_s,
            per_user_bps,
            total_bps,
            rem_update: is_update_row,
        });
    }

    Ok(CapacityTrace {
        user_ids: config.world.users().iter().map(|u| u.id).collect(),
        rows,
    })
}

/// One cell of the partial-REM sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSweepRow {
    pub q: usize,
    pub delta_t_s: f64,
    pub seed: u64,
    pub mean_total_bps: f64,
}

/// Mean total capacity per (Q, update interval, seed). Seed index j maps to
/// the same derived seed in every cell, so columns pair across policies.
pub fn sweep_partial(
    config: &ScenarioConfig,
    q_values: &[usize],
    delta_ts: &[f64],
    n_seeds: usize,
) -> Result<Vec<PartialSweepRow>> {
    for &q in q_values {
        if q > config.world.num_interferers() {
            return Err(Error::InvalidConfig(format!(
                "sweep q = {q} exceeds interferer count J = {}",
                config.world.num_interferers()
            )));
        }
    }
    let mut cells = Vec::new();
    for &q in q_values {
        for &dt in delta_ts {
            for j in 0..n_seeds {
                cells.push((q, dt, j));
            }
        }
    }
    let results = par_map(cells.len(), |i| {
        let (q, dt, j) = cells[i];
        let seed = seeds::derive2(config.master_seed, STREAM_SWEEP_SEED, j as u64);
        let mut cell = config.clone();
        cell.master_seed = seed;
        cell.rem_policy.known_interferers = KnownInterferers::Count(q);
        cell.rem_policy.update_interval_s = dt;
        let trace = run_pass(&cell)?;
        Ok(PartialSweepRow {
            q,
            delta_t_s: dt,
            seed,
            mean_total_bps: trace.mean_total_bps(),
        })
    });
    results.into_iter().collect()
}

/// One cell of the localization-error sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSweepRow {
    pub error_km: f64,
    pub m_rows: usize,
    pub n_cols: usize,
    pub seed: u64,
    pub mean_total_bps: f64,
}

/// Mean total capacity per (position error, array size, seed). Weights come
/// from the reported (displaced) interferer positions; capacity is evaluated
/// against the truth.
pub fn sweep_error(
    config: &ScenarioConfig,
    error_values_km: &[f64],
    array_sizes: &[(usize, usize)],
    n_seeds: usize,
) -> Result<Vec<ErrorSweepRow>> {
    if error_values_km.iter().any(|e| *e < 0.0) {
        return Err(Error::InvalidConfig("error values must be non-negative".into()));
    }
    let mut cells = Vec::new();
    for &(m, n) in array_sizes {
        for &err in error_values_km {
            for j in 0..n_seeds {
                cells.push((m, n, err, j));
            }
        }
    }
    let results = par_map(cells.len(), |i| {
        let (m, n, err, j) = cells[i];
        let seed = seeds::derive2(config.master_seed, STREAM_SWEEP_SEED, j as u64);
        let mut cell = config.clone();
        cell.master_seed = seed;
        cell.geometry = ArrayGeometry::new(
            m,
            n,
            config.geometry.dx_wavelengths(),
            config.geometry.dy_wavelengths(),
        )?;
        cell.rem_policy.position_error_km = err;
        let trace = run_pass(&cell)?;
        Ok(ErrorSweepRow {
            error_km: err,
            m_rows: m,
            n_cols: n,
            seed,
            mean_total_bps: trace.mean_total_bps(),
        })
    });
    results.into_iter().collect()
}

/// Ground grid for the footprint render.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lat_min_deg: f64,
    pub lat_max_deg: f64,
    pub lon_min_deg: f64,
    pub lon_max_deg: f64,
    pub resolution_deg: f64,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution_deg > 0.0) {
            return Err(Error::InvalidConfig("grid resolution must be positive".into()));
        }
        if self.lat_min_deg >= self.lat_max_deg || self.lon_min_deg >= self.lon_max_deg {
            return Err(Error::InvalidConfig("grid bounds are empty".into()));
        }
        Ok(())
    }

    fn axis(min: f64, max: f64, res: f64) -> Vec<f64> {
        let n = ((max - min) / res + 1e-9).floor() as usize + 1;
        (0..n).map(|i| min + i as f64 * res).collect()
    }

    pub fn latitudes(&self) -> Vec<f64> {
        Self::axis(self.lat_min_deg, self.lat_max_deg, self.resolution_deg)
    }

    pub fn longitudes(&self) -> Vec<f64> {
        Self::axis(self.lon_min_deg, self.lon_max_deg, self.resolution_deg)
    }
}

/// Relative received power at the satellite from a reference transmitter in
/// each visible grid cell, normalized so the peak cell is 0 dB.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintCell {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub rel_power_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FootprintGrid {
    pub cells: Vec<FootprintCell>,
}

impl FootprintGrid {
    /// Relative power of the cell nearest to (lat, lon).
    pub fn nearest_cell_db(&self, lat_deg: f64, lon_deg: f64) -> Option<f64> {
        self.cells
            .iter()
            .min_by(|a, b| {
                let da = (a.lat_deg - lat_deg).powi(2) + (a.lon_deg - lon_deg).powi(2);
                let db = (b.lat_deg - lat_deg).powi(2) + (b.lon_deg - lon_deg).powi(2);
                da.partial_cmp(&db).unwrap()
            })
            .map(|c| c.rel_power_db)
    }
}

/// Solves the weight problem once at time `t_s` and renders the received
/// power from a 1 W reference transmitter over the grid. Cells below the
/// satellite's horizon are omitted; an entirely hidden grid is an error.
pub fn footprint(config: &ScenarioConfig, grid: &GridSpec, t_s: f64) -> Result<FootprintGrid> {
    config.validate()?;
    grid.validate()?;
    let policy = config.effective_policy();
    let update_index = (t_s / config.rem_policy.update_interval_s).floor().max(0.0) as u64;
    let t_update = update_index as f64 * config.rem_policy.update_interval_s;
    let snapshot = rem::query(&config.world, &policy, t_update);
    let sat_update = config.satellite_at(t_update);
    let spec = estimated_objective(config, &snapshot, sat_update)?;
    let solver = SolverConfig {
        seed: seeds::derive2(config.master_seed, STREAM_SOLVER, update_index),
        ..config.solver.clone()
    };
    let weights = solve(&spec, &solver)?.weights;

    let sat = config.satellite_at(t_s);
    let lambda = config.budget.wavelength_m();
    let lats = grid.latitudes();
    let lons = grid.longitudes();

    let powers: Vec<Option<(f64, f64, f64)>> = par_map(lats.len() * lons.len(), |i| {
        let lat = lats[i / lons.len()];
        let lon = lons[i % lons.len()];
        let cell = EcefPosition::from_lat_lon(lat, lon, 0.0);
        // Above-horizon test: the satellite must be above the cell's local
        // tangent plane.
        let to_sat = sat.as_vec().sub(cell.as_vec());
        if to_sat.dot(cell.as_vec()) <= 0.0 {
            return None;
        }
        let direction = ecef_to_arrival(sat, cell).ok()?;
        let channel = crate::link::channel(&config.geometry, &direction, lambda);
        let power: f64 = weights.iter().map(|w| channel.combined_power(w)).sum();
        Some((lat, lon, power))
    });

    let peak = powers
        .iter()
        .flatten()
        .map(|&(_, _, p)| p)
        .fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() || peak <= 0.0 {
        return Err(Error::BelowHorizon);
    }
    let cells = powers
        .into_iter()
        .flatten()
        .map(|(lat_deg, lon_deg, p)| FootprintCell {
            lat_deg,
            lon_deg,
            rel_power_db: 10.0 * (p / peak).log10(),
        })
        .collect();
    Ok(FootprintGrid { cells })
}
