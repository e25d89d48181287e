//! Beamforming weight optimization.
//!
//! The decision variables are per-element amplitudes and phases, flattened as
//! `[amplitudes, phases]` per stream (one stream for analog beamforming, one
//! per user for digital). Amplitudes live in [0, 1] and are rescaled by their
//! sum whenever it exceeds 1, which keeps every candidate inside the L1
//! feasibility region while leaving the search space box-shaped. Phases are
//! optimized unwrapped and reduced mod 2*pi only on output.
//!
//! Six interchangeable solvers search the same objective; all of them are
//! deterministic under a fixed seed and truncate against a shared evaluation
//! budget, so a longer budget always extends (never reorders) the evaluation
//! stream of a shorter one.

mod solvers;

use crate::array::{ArrayGeometry, WeightVector};
use crate::error::{Error, Result};
use crate::geom::{ArrivalDirection, EARTH_RADIUS_KM};
use crate::link::{
    channel, sinr, throughput_bps, to_db, total_capacity_bps, BeamformingMode, Emitter, LinkBudget,
};
use crate::par::par_map;
use crate::seeds;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub(crate) use solvers::Evaluator;

/// An emitter described by its arrival direction and EIRP.
#[derive(Debug, Clone, Copy)]
pub struct DirectedEmitter {
    pub direction: ArrivalDirection,
    pub eirp_w: f64,
}

/// The arguments of the capacity objective: who transmits from where, the
/// array receiving them, and the link budget.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    pub mode: BeamformingMode,
    pub users: Vec<DirectedEmitter>,
    pub interferers: Vec<DirectedEmitter>,
    pub geometry: ArrayGeometry,
    pub budget: LinkBudget,
}

impl ObjectiveSpec {
    pub fn new(
        mode: BeamformingMode,
        users: Vec<DirectedEmitter>,
        interferers: Vec<DirectedEmitter>,
        geometry: ArrayGeometry,
        budget: LinkBudget,
    ) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::InvalidWorld("objective needs at least one user".into()));
        }
        if users.iter().chain(&interferers).any(|e| !(e.eirp_w > 0.0)) {
            return Err(Error::InvalidWorld("emitter EIRPs must be positive".into()));
        }
        Ok(Self {
            mode,
            users,
            interferers,
            geometry,
            budget,
        })
    }

    /// Number of independent weight vectors being optimized.
    pub fn streams(&self) -> usize {
        match self.mode {
            BeamformingMode::Analog => 1,
            BeamformingMode::Digital => self.users.len(),
        }
    }

    /// Raw parameter vector length: amplitudes then phases, per stream.
    pub fn candidate_len(&self) -> usize {
        self.streams() * 2 * self.geometry.num_elements()
    }

    /// Precomputes channels and noise for repeated evaluation.
    pub fn compile(&self) -> CompiledObjective {
        let lambda = self.budget.wavelength_m();
        let mk = |e: &DirectedEmitter| Emitter {
            channel: channel(&self.geometry, &e.direction, lambda),
            power_w: e.eirp_w,
        };
        CompiledObjective {
            mode: self.mode,
            users: self.users.iter().map(mk).collect(),
            interferers: self.interferers.iter().map(mk).collect(),
            num_elements: self.geometry.num_elements(),
            noise_power_w: self.budget.noise_power_w(),
            bandwidth_hz: self.budget.bandwidth_hz,
        }
    }
}

/// Objective with channels baked in; reentrant and cheap to evaluate.
#[derive(Debug, Clone)]
pub struct CompiledObjective {
    mode: BeamformingMode,
    users: Vec<Emitter>,
    interferers: Vec<Emitter>,
    num_elements: usize,
    noise_power_w: f64,
    bandwidth_hz: f64,
}

impl CompiledObjective {
    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn streams(&self) -> usize {
        match self.mode {
            BeamformingMode::Analog => 1,
            BeamformingMode::Digital => self.users.len(),
        }
    }

    pub fn candidate_len(&self) -> usize {
        self.streams() * 2 * self.num_elements
    }

    /// Maps a raw candidate onto feasible weight vectors: amplitudes clamped
    /// to [0, 1] and rescaled by their sum when it exceeds 1, phases taken
    /// as-is.
    pub fn weights_from_candidate(&self, candidate: &[f64]) -> Result<Vec<WeightVector>> {
        if candidate.len() != self.candidate_len() {
            return Err(Error::DimensionMismatch {
                expected: self.candidate_len(),
                got: candidate.len(),
            });
        }
        let mn = self.num_elements;
        let mut out = Vec::with_capacity(self.streams());
        for block in candidate.chunks_exact(2 * mn) {
            let mut amps: Vec<f64> = block[..mn].iter().map(|a| a.clamp(0.0, 1.0)).collect();
            let total: f64 = amps.iter().sum();
            if total > 1.0 {
                for a in &mut amps {
                    *a /= total;
                }
            }
            let weights: Vec<Complex64> = amps
                .iter()
                .zip(&block[mn..])
                .map(|(&a, &p)| Complex64::from_polar(a, p))
                .collect();
            out.push(WeightVector::new(weights)?);
        }
        Ok(out)
    }

    /// Per-user linear SINR under the given per-stream weights.
    pub fn per_user_sinr(&self, weights: &[WeightVector]) -> Result<Vec<f64>> {
        if weights.len() != self.streams() {
            return Err(Error::DimensionMismatch {
                expected: self.streams(),
                got: weights.len(),
            });
        }
        self.users
            .iter()
            .enumerate()
            .map(|(k, user)| {
                let w = match self.mode {
                    BeamformingMode::Analog => &weights[0],
                    BeamformingMode::Digital => &weights[k],
                };
                sinr(w, user, &self.interferers, self.noise_power_w)
            })
            .collect()
    }

    /// Total capacity at the given weights (bit/s).
    pub fn evaluate_weights(&self, weights: &[WeightVector]) -> Result<f64> {
        let caps: Vec<f64> = self
            .per_user_sinr(weights)?
            .into_iter()
            .map(|g| throughput_bps(g, self.bandwidth_hz))
            .collect();
        total_capacity_bps(self.mode, &caps)
    }

    /// Total capacity at a raw candidate (bit/s).
    pub fn evaluate(&self, candidate: &[f64]) -> Result<f64> {
        let weights = self.weights_from_candidate(candidate)?;
        self.evaluate_weights(&weights)
    }

    /// Per-stream matched-filter phases: stream `s` is matched to user `s`
    /// (the single analog stream to the first user). Under conjugate
    /// combining the weights copy the steering phases.
    fn match_phases(&self, stream: usize) -> Vec<f64> {
        let user = &self.users[stream.min(self.users.len() - 1)];
        user.channel.steering().iter().map(|v| v.arg()).collect()
    }

    /// Canonical initial candidate: uniform amplitudes, conjugate-matched
    /// phases per stream.
    pub(crate) fn default_init(&self) -> Vec<f64> {
        let mn = self.num_elements;
        let mut out = Vec::with_capacity(self.candidate_len());
        for s in 0..self.streams() {
            out.extend(std::iter::repeat(1.0 / mn as f64).take(mn));
            out.extend(self.match_phases(s));
        }
        out
    }

    /// True for amplitude coordinates of the raw candidate layout.
    pub(crate) fn is_amplitude_dim(&self, i: usize) -> bool {
        (i % (2 * self.num_elements)) < self.num_elements
    }

    /// Search-box extent per coordinate: 1 for amplitudes, 2*pi for phases.
    pub(crate) fn dim_range(&self, i: usize) -> f64 {
        if self.is_amplitude_dim(i) {
            1.0
        } else {
            TAU
        }
    }
}

/// Evaluates the capacity objective for a raw candidate.
pub fn evaluate_objective(spec: &ObjectiveSpec, candidate: &[f64]) -> Result<f64> {
    spec.compile().evaluate(candidate)
}

/// The six weight-synthesis algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LocalAscent,
    GlobalSearch,
    Genetic,
    PatternSearch,
    ParticleSwarm,
    SimulatedAnnealing,
}

impl Algorithm {
    pub fn all() -> [Algorithm; 6] {
        [
            Algorithm::LocalAscent,
            Algorithm::GlobalSearch,
            Algorithm::Genetic,
            Algorithm::PatternSearch,
            Algorithm::ParticleSwarm,
            Algorithm::SimulatedAnnealing,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::LocalAscent => "local_ascent",
            Algorithm::GlobalSearch => "global_search",
            Algorithm::Genetic => "genetic",
            Algorithm::PatternSearch => "pattern_search",
            Algorithm::ParticleSwarm => "particle_swarm",
            Algorithm::SimulatedAnnealing => "simulated_annealing",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local_ascent" => Ok(Algorithm::LocalAscent),
            "global_search" => Ok(Algorithm::GlobalSearch),
            "genetic" => Ok(Algorithm::Genetic),
            "pattern_search" => Ok(Algorithm::PatternSearch),
            "particle_swarm" => Ok(Algorithm::ParticleSwarm),
            "simulated_annealing" => Ok(Algorithm::SimulatedAnnealing),
            other => Err(Error::InvalidConfig(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Solver settings. A fixed seed makes a run fully deterministic; the
/// evaluation budget is a hard cap shared by all algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub budget_evals: usize,
    /// Scattered local-ascent restarts (global search).
    pub restarts: usize,
    /// Population size (genetic).
    pub population: usize,
    /// Swarm size (particle swarm).
    pub swarm_size: usize,
    /// Initial temperature as a fraction of |f(x0)| (simulated annealing).
    pub initial_temperature_frac: f64,
    /// Geometric cooling factor per proposal (simulated annealing).
    pub cooling_rate: f64,
    /// Gaussian proposal sigma as a fraction of each coordinate range
    /// (simulated annealing).
    pub proposal_step_frac: f64,
    /// Initial mesh size as a fraction of each coordinate range
    /// (pattern search).
    pub initial_mesh_frac: f64,
    /// Mesh convergence threshold as a fraction of each coordinate range
    /// (pattern search).
    pub mesh_tolerance_frac: f64,
    /// Uniform jitter applied to the canonical initial phases (rad).
    pub init_phase_jitter_rad: f64,
    /// Relative uniform jitter applied to the canonical initial amplitudes.
    pub init_amplitude_jitter: f64,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm, seed: u64, budget_evals: usize) -> Self {
        Self {
            algorithm,
            seed,
            budget_evals,
            ..Self::default()
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::ParticleSwarm,
            seed: 0,
            budget_evals: 2000,
            restarts: 8,
            population: 40,
            swarm_size: 30,
            initial_temperature_frac: 0.1,
            cooling_rate: 0.995,
            proposal_step_frac: 0.15,
            initial_mesh_frac: 0.25,
            mesh_tolerance_frac: 1e-5,
            init_phase_jitter_rad: 0.5,
            init_amplitude_jitter: 0.25,
        }
    }
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Best feasible weights found, one vector per stream.
    pub weights: Vec<WeightVector>,
    /// Total capacity at `weights` (bit/s).
    pub objective_value_bps: f64,
    /// Per-user SINR at `weights` (dB).
    pub sinr_db: Vec<f64>,
    /// Objective evaluations consumed.
    pub eval_count: usize,
    /// Wall time of the solve call (s); the only non-reproducible field.
    pub wall_time_s: f64,
    /// Best-so-far objective after each evaluation (non-decreasing).
    pub trace: Vec<f64>,
}

/// Runs the configured solver and returns the best feasible weights found.
///
/// The canonical initial candidate is always evaluated first, so a budget of
/// one evaluation returns exactly its value.
pub fn solve(spec: &ObjectiveSpec, config: &SolverConfig) -> Result<SolveResult> {
    if config.budget_evals == 0 {
        return Err(Error::InvalidConfig("budget_evals must be at least 1".into()));
    }
    let compiled = spec.compile();
    let started = Instant::now();
    let mut evaluator = Evaluator::new(&compiled, config.budget_evals);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let init = compiled.default_init();
    if evaluator.eval(&init).is_some() {
        solvers::run(&compiled, config, &mut evaluator, &mut rng);
    }
    let wall_time_s = started.elapsed().as_secs_f64();

    let (best_params, objective_value_bps, eval_count, trace) = evaluator.into_parts();
    let weights = compiled.weights_from_candidate(&best_params)?;
    let sinr_db = compiled
        .per_user_sinr(&weights)?
        .into_iter()
        .map(to_db)
        .collect();
    Ok(SolveResult {
        weights,
        objective_value_bps,
        sinr_db,
        eval_count,
        wall_time_s,
        trace,
    })
}

/// Angular scenario-draw distribution used by the benchmark harness:
/// off-nadir uniform in [0, max], azimuth uniform, range from the
/// ground-sphere intersection at the given altitude.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioDraw {
    pub max_off_nadir_rad: f64,
    pub satellite_altitude_km: f64,
}

impl Default for ScenarioDraw {
    fn default() -> Self {
        Self {
            max_off_nadir_rad: 45f64.to_radians(),
            satellite_altitude_km: 800.0,
        }
    }
}

impl ScenarioDraw {
    /// Slant range to the ground sphere along an off-nadir angle.
    pub fn range_km(&self, off_nadir_rad: f64) -> f64 {
        let r = EARTH_RADIUS_KM + self.satellite_altitude_km;
        let sin_t = off_nadir_rad.sin();
        r * off_nadir_rad.cos() - (EARTH_RADIUS_KM.powi(2) - (r * sin_t).powi(2)).sqrt()
    }

    pub fn draw_direction(&self, rng: &mut ChaCha8Rng) -> ArrivalDirection {
        let theta = rng.gen_range(0.0..self.max_off_nadir_rad);
        let phi = rng.gen_range(0.0..TAU);
        ArrivalDirection {
            azimuth_rad: phi,
            off_nadir_rad: theta,
            range_km: self.range_km(theta),
        }
    }
}

/// One benchmark observation: algorithm x trial.
#[derive(Debug, Clone)]
pub struct BenchmarkRow {
    pub algorithm: Algorithm,
    pub trial: usize,
    /// Mean per-user SINR at the returned weights (dB).
    pub sinr_db: f64,
    pub capacity_bps: f64,
    pub wall_time_s: f64,
    pub eval_count: usize,
}

/// Per-algorithm distribution summary of benchmark rows.
#[derive(Debug, Clone)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub trials: usize,
    pub min_sinr_db: f64,
    pub q1_sinr_db: f64,
    pub median_sinr_db: f64,
    pub q3_sinr_db: f64,
    pub max_sinr_db: f64,
    pub mean_sinr_db: f64,
    pub mean_wall_time_s: f64,
}

/// Compares solver configurations over randomly drawn scenarios.
///
/// Trial `i` draws one scenario (directions redrawn, counts and EIRPs taken
/// from the template) and one solver seed, both derived from `master_seed`,
/// and hands the identical pair to every configuration, so algorithms are
/// compared on paired samples. Trials run in parallel; each owns its
/// generators.
pub fn benchmark(
    template: &ObjectiveSpec,
    configs: &[SolverConfig],
    trials: usize,
    master_seed: u64,
    draw: &ScenarioDraw,
) -> Result<Vec<BenchmarkRow>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    const STREAM_SCENARIO: u64 = 0x5ce0;
    const STREAM_SOLVER: u64 = 0x50e0;

    let per_trial: Vec<Result<Vec<BenchmarkRow>>> = par_map(trials, |trial| {
        let mut scen_rng =
            ChaCha8Rng::seed_from_u64(seeds::derive2(master_seed, STREAM_SCENARIO, trial as u64));
        let redraw = |nodes: &[DirectedEmitter], rng: &mut ChaCha8Rng| -> Vec<DirectedEmitter> {
            nodes
                .iter()
                .map(|n| DirectedEmitter {
                    direction: draw.draw_direction(rng),
                    eirp_w: n.eirp_w,
                })
                .collect()
        };
        let users = redraw(&template.users, &mut scen_rng);
        let interferers = redraw(&template.interferers, &mut scen_rng);
        let spec = ObjectiveSpec::new(
            template.mode,
            users,
            interferers,
            template.geometry,
            template.budget,
        )?;
        let solver_seed = seeds::derive2(master_seed, STREAM_SOLVER, trial as u64);

        let mut rows = Vec::with_capacity(configs.len());
        for config in configs {
            let cfg = SolverConfig {
                seed: solver_seed,
                ..config.clone()
            };
            let result = solve(&spec, &cfg)?;
            let mean_sinr_db = result.sinr_db.iter().sum::<f64>() / result.sinr_db.len() as f64;
            rows.push(BenchmarkRow {
                algorithm: config.algorithm,
                trial,
                sinr_db: mean_sinr_db,
                capacity_bps: result.objective_value_bps,
                wall_time_s: result.wall_time_s,
                eval_count: result.eval_count,
            });
        }
        Ok(rows)
    });

    let mut rows = Vec::with_capacity(trials * configs.len());
    for trial_rows in per_trial {
        rows.extend(trial_rows?);
    }
    Ok(rows)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Summarizes rows per algorithm, in first-appearance order.
pub fn summarize(rows: &[BenchmarkRow]) -> Vec<AlgorithmSummary> {
    let mut order: Vec<Algorithm> = Vec::new();
    for row in rows {
        if !order.contains(&row.algorithm) {
            order.push(row.algorithm);
        }
    }
    order
        .into_iter()
        .map(|alg| {
            let mut sinrs: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| r.sinr_db)
                .collect();
            sinrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let times: Vec<f64> = rows
                .iter()
                .filter(|r| r.algorithm == alg)
                .map(|r| r.wall_time_s)
                .collect();
            AlgorithmSummary {
                algorithm: alg,
                trials: sinrs.len(),
                min_sinr_db: sinrs[0],
                q1_sinr_db: quantile(&sinrs, 0.25),
                median_sinr_db: quantile(&sinrs, 0.5),
                q3_sinr_db: quantile(&sinrs, 0.75),
                max_sinr_db: *sinrs.last().unwrap(),
                mean_sinr_db: sinrs.iter().sum::<f64>() / sinrs.len() as f64,
                mean_wall_time_s: times.iter().sum::<f64>() / times.len() as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dir(azimuth_rad: f64, off_nadir_rad: f64) -> ArrivalDirection {
        ArrivalDirection::new(azimuth_rad, off_nadir_rad, 820.0).unwrap()
    }

    fn single_user_spec() -> ObjectiveSpec {
        ObjectiveSpec::new(
            BeamformingMode::Analog,
            vec![DirectedEmitter {
                direction: dir(0.8, 0.3),
                eirp_w: 10.0,
            }],
            vec![],
            ArrayGeometry::half_wavelength(4, 4).unwrap(),
            LinkBudget::l_band_default(),
        )
        .unwrap()
    }

    fn nulling_spec() -> ObjectiveSpec {
        // Interference-dominated: hot interferer, quiet receiver.
        let budget = LinkBudget::new(1.575e9, 20e6, 0.29).unwrap();
        ObjectiveSpec::new(
            BeamformingMode::Analog,
            vec![DirectedEmitter {
                direction: dir(0.0, 0.05),
                eirp_w: 10.0,
            }],
            vec![DirectedEmitter {
                direction: dir(0.0, 0.95),
                eirp_w: 1000.0,
            }],
            ArrayGeometry::half_wavelength(4, 4).unwrap(),
            budget,
        )
        .unwrap()
    }

    #[test]
    fn spec_rejects_empty_user_list() {
        let r = ObjectiveSpec::new(
            BeamformingMode::Analog,
            vec![],
            vec![],
            ArrayGeometry::half_wavelength(4, 4).unwrap(),
            LinkBudget::l_band_default(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn zero_amplitudes_give_zero_capacity() {
        let spec = single_user_spec();
        let candidate = vec![0.0; spec.candidate_len()];
        assert_eq!(evaluate_objective(&spec, &candidate).unwrap(), 0.0);
    }

    #[test]
    fn candidate_length_is_checked() {
        let spec = single_user_spec();
        assert!(evaluate_objective(&spec, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn matched_candidate_equals_closed_form_capacity() {
        let spec = single_user_spec();
        let compiled = spec.compile();
        let value = compiled.evaluate(&compiled.default_init()).unwrap();
        // Closed form: gamma = P * L * MN / sigma^2 at the matched filter.
        let lambda = spec.budget.wavelength_m();
        let l_pwr = crate::link::fspl_amplitude(lambda, 820e3).powi(2);
        let gamma = 10.0 * l_pwr * 16.0 / spec.budget.noise_power_w();
        let expected = spec.budget.bandwidth_hz * (1.0 + gamma).log2();
        assert_relative_eq!(value, expected, max_relative = 1e-9);
    }

    #[test]
    fn amplitude_projection_rescales_onto_simplex() {
        let spec = single_user_spec();
        let compiled = spec.compile();
        let mut candidate = vec![0.9; 16];
        candidate.extend(vec![0.0; 16]);
        let w = &compiled.weights_from_candidate(&candidate).unwrap()[0];
        assert_relative_eq!(w.l1_norm(), 1.0, max_relative = 1e-12);
        // Under the sum cap, amplitudes pass through unchanged.
        let mut small = vec![0.01; 16];
        small.extend(vec![0.0; 16]);
        let w = &compiled.weights_from_candidate(&small).unwrap()[0];
        assert_relative_eq!(w.l1_norm(), 0.16, max_relative = 1e-12);
    }

    #[test]
    fn element_relabeling_leaves_objective_unchanged() {
        // Relabeling the square lattice by transposing (m, n) maps element
        // positions (x, y) -> (y, x); mirroring every azimuth about pi/4
        // undoes that, so the transposed candidate on the mirrored scenario
        // evaluates identically.
        let mirror = |spec: &ObjectiveSpec| {
            let flip = |e: &DirectedEmitter| DirectedEmitter {
                direction: ArrivalDirection::new(
                    (std::f64::consts::FRAC_PI_2 - e.direction.azimuth_rad).rem_euclid(TAU),
                    e.direction.off_nadir_rad,
                    e.direction.range_km,
                )
                .unwrap(),
                eirp_w: e.eirp_w,
            };
            ObjectiveSpec::new(
                spec.mode,
                spec.users.iter().map(flip).collect(),
                spec.interferers.iter().map(flip).collect(),
                spec.geometry,
                spec.budget,
            )
            .unwrap()
        };
        let spec = single_user_spec();
        let compiled = spec.compile();
        let mirrored = mirror(&spec).compile();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let candidate: Vec<f64> = (0..32)
                .map(|i| {
                    if i < 16 {
                        rng.gen_range(0.0..1.0)
                    } else {
                        rng.gen_range(0.0..TAU)
                    }
                })
                .collect();
            let mut transposed = candidate.clone();
            for n in 0..4 {
                for m in 0..4 {
                    transposed[m * 4 + n] = candidate[n * 4 + m];
                    transposed[16 + m * 4 + n] = candidate[16 + n * 4 + m];
                }
            }
            let v0 = compiled.evaluate(&candidate).unwrap();
            let v1 = mirrored.evaluate(&transposed).unwrap();
            assert_relative_eq!(v0, v1, max_relative = 1e-12);
        }
    }

    #[test]
    fn budget_of_one_returns_initial_candidate_value() {
        let spec = single_user_spec();
        let compiled = spec.compile();
        let init_value = compiled.evaluate(&compiled.default_init()).unwrap();
        for alg in Algorithm::all() {
            let res = solve(&spec, &SolverConfig::new(alg, 9, 1)).unwrap();
            assert_eq!(res.eval_count, 1);
            assert_relative_eq!(res.objective_value_bps, init_value, max_relative = 1e-12);
        }
    }

    #[test]
    fn solve_is_deterministic_per_seed() {
        let spec = nulling_spec();
        for alg in Algorithm::all() {
            let cfg = SolverConfig::new(alg, 1234, 300);
            let a = solve(&spec, &cfg).unwrap();
            let b = solve(&spec, &cfg).unwrap();
            assert_eq!(a.objective_value_bps.to_bits(), b.objective_value_bps.to_bits());
            assert_eq!(a.eval_count, b.eval_count);
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.sinr_db, b.sinr_db);
        }
    }

    #[test]
    fn returned_weights_are_feasible_and_consistent() {
        let spec = nulling_spec();
        let compiled = spec.compile();
        for alg in Algorithm::all() {
            let res = solve(&spec, &SolverConfig::new(alg, 7, 400)).unwrap();
            for w in &res.weights {
                assert!(w.is_feasible(), "{alg} returned infeasible weights");
                for p in w.phases_rad() {
                    assert!((0.0..TAU).contains(&p));
                }
            }
            let reevaluated = compiled.evaluate_weights(&res.weights).unwrap();
            assert_relative_eq!(reevaluated, res.objective_value_bps, max_relative = 1e-9);
        }
    }

    #[test]
    fn best_so_far_trace_is_monotone() {
        let spec = nulling_spec();
        for alg in Algorithm::all() {
            let res = solve(&spec, &SolverConfig::new(alg, 21, 500)).unwrap();
            assert_eq!(res.trace.len(), res.eval_count);
            for pair in res.trace.windows(2) {
                assert!(pair[1] >= pair[0], "{alg} trace decreased");
            }
        }
    }

    #[test]
    fn doubling_budget_never_hurts() {
        let spec = nulling_spec();
        for alg in Algorithm::all() {
            for seed in [3, 5, 8] {
                let short = solve(&spec, &SolverConfig::new(alg, seed, 250)).unwrap();
                let long = solve(&spec, &SolverConfig::new(alg, seed, 500)).unwrap();
                assert!(
                    long.objective_value_bps >= short.objective_value_bps,
                    "{alg} got worse with a larger budget"
                );
                // Same seed stream: the short trace is a prefix of the long one.
                assert_eq!(&long.trace[..short.trace.len()], &short.trace[..]);
            }
        }
    }

    #[test]
    fn every_solver_recovers_matched_filter_bound() {
        let spec = single_user_spec();
        let compiled = spec.compile();
        let bound = compiled.evaluate(&compiled.default_init()).unwrap();
        for alg in Algorithm::all() {
            let res = solve(&spec, &SolverConfig::new(alg, 31, 1500)).unwrap();
            assert!(
                res.objective_value_bps >= bound * (1.0 - 1e-12),
                "{alg} fell below the matched-filter floor"
            );
        }
    }

    #[test]
    fn null_steering_beats_uniform_baseline_by_ten_db() {
        // One strong separated interferer in a noise-starved budget: the
        // optimizer must carve a null that uniform weights do not have.
        let spec = nulling_spec();
        let compiled = spec.compile();
        let uniform = vec![WeightVector::uniform(16)];
        let uniform_sinr = compiled.per_user_sinr(&uniform).unwrap()[0];
        for alg in [Algorithm::GlobalSearch, Algorithm::ParticleSwarm] {
            let res = solve(&spec, &SolverConfig::new(alg, 5, 4000)).unwrap();
            let gain_db = res.sinr_db[0] - to_db(uniform_sinr);
            assert!(
                gain_db >= 10.0,
                "{alg} improved only {gain_db:.1} dB over uniform weights"
            );
        }
    }

    #[test]
    fn benchmark_pairs_scenarios_across_algorithms() {
        let spec = nulling_spec();
        let configs: Vec<SolverConfig> = [Algorithm::ParticleSwarm, Algorithm::SimulatedAnnealing]
            .iter()
            .map(|&a| SolverConfig::new(a, 0, 200))
            .collect();
        let rows = benchmark(&spec, &configs, 3, 99, &ScenarioDraw::default()).unwrap();
        assert_eq!(rows.len(), 6);
        let rows2 = benchmark(&spec, &configs, 3, 99, &ScenarioDraw::default()).unwrap();
        for (a, b) in rows.iter().zip(&rows2) {
            assert_eq!(a.sinr_db.to_bits(), b.sinr_db.to_bits());
            assert_eq!(a.capacity_bps.to_bits(), b.capacity_bps.to_bits());
            assert_eq!(a.eval_count, b.eval_count);
        }
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].trials, 3);
        assert!(summary[0].min_sinr_db <= summary[0].median_sinr_db);
        assert!(summary[0].median_sinr_db <= summary[0].max_sinr_db);
    }

    #[test]
    fn scenario_draw_range_matches_nadir_altitude() {
        let draw = ScenarioDraw::default();
        assert_abs_diff_eq!(draw.range_km(0.0), 800.0, epsilon = 1e-9);
        assert!(draw.range_km(0.6) > 800.0);
    }
}
