//! Scenario config file schema.
//!
//! One TOML file mirrors the simulator's scenario config one-to-one. Units
//! are SI with suffixed field names. Ground nodes are authored as
//! (lat_deg, lon_deg, alt_m, eirp_w, role) and converted to ECEF at load.
//! Every field except the node list has a default, so a minimal config is
//! just a `[[nodes]]` entry or two.

use crate::error::CliError;
use leobf::array::ArrayGeometry;
use leobf::geom::{EcefPosition, OrbitalElements};
use leobf::link::{BeamformingMode, LinkBudget};
use leobf::opt::{Algorithm, ScenarioDraw, SolverConfig};
use leobf::rem::{GroundNode, KnownInterferers, NodeRole, RemPolicy, WorldState};
use leobf::sim::ScenarioConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_duration_s")]
    pub duration_s: f64,
    #[serde(default = "default_eval_step_s")]
    pub eval_step_s: f64,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub reoptimize_each_step: bool,
    #[serde(default)]
    pub freeze_satellite: bool,
    #[serde(default)]
    pub orbital: OrbitalSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub budget: BudgetSection,
    #[serde(default)]
    pub rem_policy: RemPolicySection,
    #[serde(default)]
    pub solver: SolverSection,
    pub nodes: Vec<NodeSection>,
    #[serde(default)]
    pub bench: BenchSection,
}

fn default_duration_s() -> f64 {
    150.0
}

fn default_eval_step_s() -> f64 {
    0.01
}

fn default_mode() -> String {
    "analog".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitalSection {
    pub semi_major_axis_km: f64,
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub arg_periapsis_deg: f64,
    pub true_anomaly_deg: f64,
}

impl Default for OrbitalSection {
    fn default() -> Self {
        Self {
            semi_major_axis_km: 7173.0,
            eccentricity: 0.0,
            inclination_deg: 86.39,
            raan_deg: 146.16,
            arg_periapsis_deg: 269.5,
            true_anomaly_deg: 0.6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub m_rows: usize,
    pub n_cols: usize,
    pub dx_wavelengths: f64,
    pub dy_wavelengths: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            m_rows: 4,
            n_cols: 4,
            dx_wavelengths: 0.5,
            dy_wavelengths: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_temperature_k: f64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: 1.575e9,
            bandwidth_hz: 20e6,
            noise_temperature_k: 290.0,
        }
    }
}

/// "all" or an integer count.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum KnownCount {
    Count(usize),
    Name(String),
}

impl Default for KnownCount {
    fn default() -> Self {
        KnownCount::Name("all".to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct RemPolicySection {
    pub update_interval_s: f64,
    pub known_interferer_count: KnownCount,
    pub position_error_km: f64,
    pub error_seed: u64,
    pub random_subset: bool,
}

impl Default for RemPolicySection {
    fn default() -> Self {
        Self {
            update_interval_s: 5.0,
            known_interferer_count: KnownCount::default(),
            position_error_km: 0.0,
            error_seed: 0,
            random_subset: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub algorithm: String,
    pub budget_evals: usize,
    pub restarts: usize,
    pub population: usize,
    pub swarm_size: usize,
    pub initial_temperature_frac: f64,
    pub cooling_rate: f64,
    pub proposal_step_frac: f64,
    pub initial_mesh_frac: f64,
    pub mesh_tolerance_frac: f64,
    pub init_phase_jitter_rad: f64,
    pub init_amplitude_jitter: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            algorithm: d.algorithm.name().to_string(),
            budget_evals: d.budget_evals,
            restarts: d.restarts,
            population: d.population,
            swarm_size: d.swarm_size,
            initial_temperature_frac: d.initial_temperature_frac,
            cooling_rate: d.cooling_rate,
            proposal_step_frac: d.proposal_step_frac,
            initial_mesh_frac: d.initial_mesh_frac,
            mesh_tolerance_frac: d.mesh_tolerance_frac,
            init_phase_jitter_rad: d.init_phase_jitter_rad,
            init_amplitude_jitter: d.init_amplitude_jitter,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeSection {
    pub lat_deg: f64,
    pub lon_deg: f64,
    #[serde(default)]
    pub alt_m: f64,
    pub eirp_w: f64,
    pub role: String,
    #[serde(default)]
    pub id: Option<u32>,
    #[serde(default)]
    pub carrier_hz: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub trials: usize,
    pub algorithms: Vec<String>,
    pub max_off_nadir_deg: f64,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            trials: 20,
            algorithms: Algorithm::all().iter().map(|a| a.name().to_string()).collect(),
            max_off_nadir_deg: 45.0,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    /// Applies an optional seed override and builds the simulator config.
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<Resolved, CliError> {
        let mut file = self.clone();
        if let Some(seed) = seed_override {
            file.master_seed = seed;
        }
        let scenario = file.build_scenario()?;
        Ok(Resolved { file, scenario })
    }

    fn build_scenario(&self) -> Result<ScenarioConfig, CliError> {
        let cfg = |e: leobf::Error| CliError::Config(e.to_string());

        let orbital = OrbitalElements::new(
            self.orbital.semi_major_axis_km,
            self.orbital.eccentricity,
            self.orbital.inclination_deg,
            self.orbital.raan_deg,
            self.orbital.arg_periapsis_deg,
            self.orbital.true_anomaly_deg,
        )
        .map_err(cfg)?;
        let geometry = ArrayGeometry::new(
            self.geometry.m_rows,
            self.geometry.n_cols,
            self.geometry.dx_wavelengths,
            self.geometry.dy_wavelengths,
        )
        .map_err(cfg)?;
        let budget = LinkBudget::new(
            self.budget.carrier_frequency_hz,
            self.budget.bandwidth_hz,
            self.budget.noise_temperature_k,
        )
        .map_err(cfg)?;

        let known = match &self.rem_policy.known_interferer_count {
            KnownCount::Count(q) => KnownInterferers::Count(*q),
            KnownCount::Name(name) if name == "all" => KnownInterferers::All,
            KnownCount::Name(other) => {
                return Err(CliError::Config(format!(
                    "rem_policy.known_interferer_count must be an integer or \"all\", got \"{other}\""
                )))
            }
        };
        let mut rem_policy = RemPolicy::new(
            self.rem_policy.update_interval_s,
            known,
            self.rem_policy.position_error_km,
            self.rem_policy.error_seed,
        )
        .map_err(cfg)?;
        rem_policy.random_subset = self.rem_policy.random_subset;

        let mode = match self.mode.as_str() {
            "analog" => BeamformingMode::Analog,
            "digital" => BeamformingMode::Digital,
            other => {
                return Err(CliError::Config(format!(
                    "mode must be \"analog\" or \"digital\", got \"{other}\""
                )))
            }
        };

        let algorithm: Algorithm = self
            .solver
            .algorithm
            .parse()
            .map_err(|e: leobf::Error| CliError::Config(format!("solver.algorithm: {e}")))?;
        let solver = SolverConfig {
            algorithm,
            seed: 0, // per-update seeds derive from master_seed inside the sim
            budget_evals: self.solver.budget_evals,
            restarts: self.solver.restarts,
            population: self.solver.population,
            swarm_size: self.solver.swarm_size,
            initial_temperature_frac: self.solver.initial_temperature_frac,
            cooling_rate: self.solver.cooling_rate,
            proposal_step_frac: self.solver.proposal_step_frac,
            initial_mesh_frac: self.solver.initial_mesh_frac,
            mesh_tolerance_frac: self.solver.mesh_tolerance_frac,
            init_phase_jitter_rad: self.solver.init_phase_jitter_rad,
            init_amplitude_jitter: self.solver.init_amplitude_jitter,
        };

        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (index, node) in self.nodes.iter().enumerate() {
            let role = match node.role.as_str() {
                "user" => NodeRole::User,
                "interferer" => NodeRole::Interferer,
                other => {
                    return Err(CliError::Config(format!(
                        "nodes[{index}].role must be \"user\" or \"interferer\", got \"{other}\""
                    )))
                }
            };
            nodes.push(GroundNode {
                id: node.id.unwrap_or(index as u32),
                role,
                position: EcefPosition::from_lat_lon(node.lat_deg, node.lon_deg, node.alt_m / 1e3),
                eirp_w: node.eirp_w,
                carrier_hz: node.carrier_hz.unwrap_or(self.budget.carrier_frequency_hz),
            });
        }
        let world = WorldState::new(nodes).map_err(cfg)?;

        let scenario = ScenarioConfig {
            orbital,
            geometry,
            budget,
            world,
            rem_policy,
            mode,
            solver,
            duration_s: self.duration_s,
            eval_step_s: self.eval_step_s,
            master_seed: self.master_seed,
            reoptimize_each_step: self.reoptimize_each_step,
            freeze_satellite: self.freeze_satellite,
        };
        scenario.validate().map_err(cfg)?;
        Ok(scenario)
    }

    pub fn bench_algorithms(&self) -> Result<Vec<Algorithm>, CliError> {
        self.bench
            .algorithms
            .iter()
            .map(|name| {
                name.parse()
                    .map_err(|e: leobf::Error| CliError::Config(format!("bench.algorithms: {e}")))
            })
            .collect()
    }

    pub fn bench_draw(&self) -> ScenarioDraw {
        ScenarioDraw {
            max_off_nadir_rad: self.bench.max_off_nadir_deg.to_radians(),
            satellite_altitude_km: (self.orbital.semi_major_axis_km
                - leobf::geom::EARTH_RADIUS_KM)
                .max(100.0),
        }
    }
}

/// Parsed file with the seed override applied, plus the simulator config it
/// produces. The file half is what the manifest echoes.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub file: ConfigFile,
    pub scenario: ScenarioConfig,
}

impl Resolved {
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(&self.file)
            .map_err(|e| CliError::Runtime(format!("could not serialize resolved config: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [[nodes]]
        lat_deg = 0.0
        lon_deg = 0.0
        eirp_w = 10.0
        role = "user"
    "#;

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let file = ConfigFile::parse(MINIMAL).unwrap();
        let resolved = file.resolve(None).unwrap();
        assert_eq!(resolved.scenario.world.num_users(), 1);
        assert_eq!(resolved.scenario.eval_step_s, 0.01);
        assert_eq!(resolved.scenario.duration_s, 150.0);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = format!("{MINIMAL}\nnot_a_field = 3\n");
        let err = ConfigFile::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("not_a_field"), "{err}");
    }

    #[test]
    fn q_above_j_names_the_field() {
        let bad = format!(
            r#"
            [rem_policy]
            known_interferer_count = 2
            {MINIMAL}
        "#
        );
        let file = ConfigFile::parse(&bad).unwrap();
        let err = file.resolve(None).unwrap_err();
        assert!(
            err.to_string().contains("known_interferer_count"),
            "message was: {err}"
        );
    }

    #[test]
    fn resolved_config_round_trips() {
        let file = ConfigFile::parse(MINIMAL).unwrap();
        let resolved = file.resolve(Some(7)).unwrap();
        let echoed = resolved.to_toml().unwrap();
        let reparsed = ConfigFile::parse(&echoed).unwrap();
        assert_eq!(reparsed, resolved.file);
        assert_eq!(reparsed.master_seed, 7);
    }

    #[test]
    fn seed_override_applies() {
        let file = ConfigFile::parse(MINIMAL).unwrap();
        assert_eq!(file.resolve(Some(99)).unwrap().scenario.master_seed, 99);
        assert_eq!(file.resolve(None).unwrap().scenario.master_seed, 0);
    }
}
