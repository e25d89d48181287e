//! Solver implementations behind [`super::solve`].
//!
//! Every solver consumes candidates through the shared [`Evaluator`], which
//! enforces the evaluation budget and tracks the best parameters seen, so no
//! solver can return a candidate worse than the best it evaluated. Candidate
//! streams never depend on the budget itself: a larger budget replays the
//! same evaluations and then continues.

use super::{CompiledObjective, SolverConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::TAU;

/// Budget-limited objective evaluator with best-so-far tracking.
pub(crate) struct Evaluator<'a> {
    objective: &'a CompiledObjective,
    budget: usize,
    evals: usize,
    best_value: f64,
    best_params: Vec<f64>,
    trace: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(objective: &'a CompiledObjective, budget: usize) -> Self {
        Self {
            objective,
            budget,
            evals: 0,
            best_value: f64::NEG_INFINITY,
            best_params: Vec::new(),
            trace: Vec::with_capacity(budget.min(1 << 20)),
        }
    }

    /// Evaluates one candidate, or returns `None` once the budget is spent.
    pub(crate) fn eval(&mut self, params: &[f64]) -> Option<f64> {
        if self.evals >= self.budget {
            return None;
        }
        let value = self
            .objective
            .evaluate(params)
            .expect("solver produced a candidate of the wrong length");
        self.evals += 1;
        if value > self.best_value {
            self.best_value = value;
            self.best_params = params.to_vec();
        }
        self.trace.push(self.best_value);
        Some(value)
    }

    pub(crate) fn into_parts(self) -> (Vec<f64>, f64, usize, Vec<f64>) {
        (self.best_params, self.best_value, self.evals, self.trace)
    }
}

/// Clamps amplitude coordinates into [0, 1]; phases stay unwrapped.
fn clamp_amplitudes(objective: &CompiledObjective, params: &mut [f64]) {
    for (i, p) in params.iter_mut().enumerate() {
        if objective.is_amplitude_dim(i) {
            *p = p.clamp(0.0, 1.0);
        }
    }
}

/// Canonical init plus this run's random perturbation.
fn perturbed_init(
    objective: &CompiledObjective,
    config: &SolverConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut x = objective.default_init();
    for (i, v) in x.iter_mut().enumerate() {
        if objective.is_amplitude_dim(i) {
            *v *= 1.0 + rng.gen_range(-config.init_amplitude_jitter..=config.init_amplitude_jitter);
        } else {
            *v += rng.gen_range(-config.init_phase_jitter_rad..=config.init_phase_jitter_rad);
        }
    }
    clamp_amplitudes(objective, &mut x);
    x
}

/// Uniform draw over the search box.
fn random_candidate(objective: &CompiledObjective, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..objective.candidate_len())
        .map(|i| {
            if objective.is_amplitude_dim(i) {
                rng.gen_range(0.0..1.0)
            } else {
                rng.gen_range(0.0..TAU)
            }
        })
        .collect()
}

/// Dispatches to the configured algorithm. Returning early just means the
/// budget ran out; the evaluator already holds the best parameters.
pub(crate) fn run(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    use super::Algorithm::*;
    match config.algorithm {
        LocalAscent => local_ascent(objective, config, evaluator, rng),
        GlobalSearch => global_search(objective, config, evaluator, rng),
        Genetic => genetic(objective, config, evaluator, rng),
        PatternSearch => pattern_search(objective, config, evaluator, rng),
        ParticleSwarm => particle_swarm(objective, config, evaluator, rng),
        SimulatedAnnealing => simulated_annealing(objective, config, evaluator, rng),
    }
}

/// Projected gradient ascent with forward-difference gradients and a
/// backtracking (Armijo) line search.
fn ascend_from(
    objective: &CompiledObjective,
    evaluator: &mut Evaluator,
    mut x: Vec<f64>,
) -> Option<()> {
    const FD_STEP_FRAC: f64 = 1e-7;
    const ARMIJO_C1: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 25;

    let dims = objective.candidate_len();
    let mut fx = evaluator.eval(&x)?;
    let mut stride: f64 = 0.1;
    loop {
        // Forward-difference gradient, scaled per coordinate range.
        let mut grad = vec![0.0; dims];
        for i in 0..dims {
            let h = FD_STEP_FRAC * objective.dim_range(i);
            let saved = x[i];
            x[i] = saved + h;
            let fp = match evaluator.eval(&x) {
                Some(v) => v,
                None => return None,
            };
            x[i] = saved;
            grad[i] = (fp - fx) / h;
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm <= 1e-12 * (1.0 + fx.abs()) {
            return Some(());
        }
        let direction: Vec<f64> = grad.iter().map(|g| g / gnorm).collect();

        let mut alpha = (stride * 2.0).min(1.0);
        let mut accepted = false;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial: Vec<f64> = x
                .iter()
                .zip(&direction)
                .map(|(xi, di)| xi + alpha * di)
                .collect();
            clamp_amplitudes(objective, &mut trial);
            let ft = evaluator.eval(&trial)?;
            if ft > fx + ARMIJO_C1 * alpha * gnorm {
                x = trial;
                fx = ft;
                stride = alpha;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // No ascent even at the smallest step: converged.
            return Some(());
        }
    }
}

fn local_ascent(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    let start = perturbed_init(objective, config, rng);
    let _ = ascend_from(objective, evaluator, start);
}

/// Local ascent restarted from scattered points, keeping the best.
fn global_search(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    for restart in 0..config.restarts.max(1) {
        let start = if restart == 0 {
            perturbed_init(objective, config, rng)
        } else {
            random_candidate(objective, rng)
        };
        if ascend_from(objective, evaluator, start).is_none() {
            return;
        }
    }
}

/// Generalized coordinate mesh search with mesh halving on failed polls.
fn pattern_search(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    let dims = objective.candidate_len();
    let mut x = perturbed_init(objective, config, rng);
    let mut fx = match evaluator.eval(&x) {
        Some(v) => v,
        None => return,
    };
    let mut mesh: Vec<f64> = (0..dims)
        .map(|i| config.initial_mesh_frac * objective.dim_range(i))
        .collect();
    loop {
        let mut improved = false;
        'poll: for i in 0..dims {
            for sign in [1.0, -1.0] {
                let saved = x[i];
                x[i] = saved + sign * mesh[i];
                if objective.is_amplitude_dim(i) {
                    x[i] = x[i].clamp(0.0, 1.0);
                }
                let ft = match evaluator.eval(&x) {
                    Some(v) => v,
                    None => return,
                };
                if ft > fx {
                    fx = ft;
                    improved = true;
                    break 'poll;
                }
                x[i] = saved;
            }
        }
        if !improved {
            for m in &mut mesh {
                *m *= 0.5;
            }
            let converged = mesh
                .iter()
                .enumerate()
                .all(|(i, m)| *m < config.mesh_tolerance_frac * objective.dim_range(i));
            if converged {
                return;
            }
        }
    }
}

/// Real-coded genetic algorithm: tournament selection, blend crossover,
/// Gaussian mutation, two-elite survival.
fn genetic(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    const TOURNAMENT: usize = 3;
    const BLEND_ALPHA: f64 = 0.5;
    const ELITES: usize = 2;
    const MUTATION_SIGMA_FRAC: f64 = 0.1;

    let dims = objective.candidate_len();
    let pop_size = config.population.max(ELITES + 2);
    let mutation_prob = 1.0 / dims as f64;

    let mut population: Vec<(Vec<f64>, f64)> = Vec::with_capacity(pop_size);
    for p in 0..pop_size {
        let genome = if p == 0 {
            perturbed_init(objective, config, rng)
        } else {
            random_candidate(objective, rng)
        };
        let fitness = match evaluator.eval(&genome) {
            Some(v) => v,
            None => return,
        };
        population.push((genome, fitness));
    }

    loop {
        let mut next: Vec<(Vec<f64>, f64)> = Vec::with_capacity(pop_size);
        let mut ranked: Vec<usize> = (0..population.len()).collect();
        ranked.sort_by(|&a, &b| population[b].1.partial_cmp(&population[a].1).unwrap());
        for &idx in ranked.iter().take(ELITES) {
            next.push(population[idx].clone());
        }

        let tournament = |rng: &mut ChaCha8Rng| -> usize {
            let mut best = rng.gen_range(0..population.len());
            for _ in 1..TOURNAMENT {
                let contender = rng.gen_range(0..population.len());
                if population[contender].1 > population[best].1 {
                    best = contender;
                }
            }
            best
        };

        while next.len() < pop_size {
            let a = tournament(rng);
            let b = tournament(rng);
            let mut child = vec![0.0; dims];
            for i in 0..dims {
                let (lo, hi) = {
                    let (pa, pb) = (population[a].0[i], population[b].0[i]);
                    let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
                    let spread = BLEND_ALPHA * (hi - lo);
                    (lo - spread, hi + spread)
                };
                child[i] = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
                if rng.gen_range(0.0..1.0) < mutation_prob {
                    let sigma = MUTATION_SIGMA_FRAC * objective.dim_range(i);
                    child[i] += Normal::new(0.0, sigma).unwrap().sample(rng);
                }
            }
            clamp_amplitudes(objective, &mut child);
            let fitness = match evaluator.eval(&child) {
                Some(v) => v,
                None => return,
            };
            next.push((child, fitness));
        }
        population = next;
    }
}

/// Global-best particle swarm with the standard constriction constants
/// (inertia 0.729, cognitive and social factors 1.49).
fn particle_swarm(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    const INERTIA: f64 = 0.729;
    const COGNITIVE: f64 = 1.49;
    const SOCIAL: f64 = 1.49;

    let dims = objective.candidate_len();
    let swarm_size = config.swarm_size.max(2);
    let vmax: Vec<f64> = (0..dims).map(|i| 0.5 * objective.dim_range(i)).collect();

    let mut positions: Vec<Vec<f64>> = Vec::with_capacity(swarm_size);
    let mut velocities: Vec<Vec<f64>> = Vec::with_capacity(swarm_size);
    let mut pbest: Vec<(Vec<f64>, f64)> = Vec::with_capacity(swarm_size);
    let mut gbest: Option<(Vec<f64>, f64)> = None;

    for p in 0..swarm_size {
        let x = if p == 0 {
            perturbed_init(objective, config, rng)
        } else {
            random_candidate(objective, rng)
        };
        let v: Vec<f64> = (0..dims)
            .map(|i| rng.gen_range(-0.1..0.1) * objective.dim_range(i))
            .collect();
        let f = match evaluator.eval(&x) {
            Some(v) => v,
            None => return,
        };
        if gbest.as_ref().map_or(true, |(_, g)| f > *g) {
            gbest = Some((x.clone(), f));
        }
        pbest.push((x.clone(), f));
        positions.push(x);
        velocities.push(v);
    }

    loop {
        for p in 0..swarm_size {
            let (gx, _) = gbest.as_ref().unwrap().clone();
            for i in 0..dims {
                let r1: f64 = rng.gen_range(0.0..1.0);
                let r2: f64 = rng.gen_range(0.0..1.0);
                let v = INERTIA * velocities[p][i]
                    + COGNITIVE * r1 * (pbest[p].0[i] - positions[p][i])
                    + SOCIAL * r2 * (gx[i] - positions[p][i]);
                velocities[p][i] = v.clamp(-vmax[i], vmax[i]);
                positions[p][i] += velocities[p][i];
            }
            clamp_amplitudes(objective, &mut positions[p]);
            let f = match evaluator.eval(&positions[p]) {
                Some(v) => v,
                None => return,
            };
            if f > pbest[p].1 {
                pbest[p] = (positions[p].clone(), f);
            }
            if f > gbest.as_ref().unwrap().1 {
                gbest = Some((positions[p].clone(), f));
            }
        }
    }
}

/// Metropolis annealing with Gaussian proposals and geometric cooling. The
/// starting temperature scales with the initial objective magnitude so the
/// acceptance rule is invariant to the capacity scale.
fn simulated_annealing(
    objective: &CompiledObjective,
    config: &SolverConfig,
    evaluator: &mut Evaluator,
    rng: &mut ChaCha8Rng,
) {
    let dims = objective.candidate_len();
    let mut x = perturbed_init(objective, config, rng);
    let mut fx = match evaluator.eval(&x) {
        Some(v) => v,
        None => return,
    };
    let mut temperature = config.initial_temperature_frac * fx.abs().max(1.0);
    let sigmas: Vec<f64> = (0..dims)
        .map(|i| config.proposal_step_frac * objective.dim_range(i))
        .collect();

    loop {
        let mut proposal = x.clone();
        for i in 0..dims {
            proposal[i] += Normal::new(0.0, sigmas[i]).unwrap().sample(rng);
        }
        clamp_amplitudes(objective, &mut proposal);
        let fp = match evaluator.eval(&proposal) {
            Some(v) => v,
            None => return,
        };
        let delta = fp - fx;
        let accept = delta >= 0.0
            || (temperature > 0.0 && rng.gen_range(0.0..1.0) < (delta / temperature).exp());
        if accept {
            x = proposal;
            fx = fp;
        }
        temperature *= config.cooling_rate;
    }
}
