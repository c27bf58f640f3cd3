//! Fact-finding/instructor population optimizer over box-bounded real vectors.
//!
//! Two equal-sized teams search together. Fact finders explore by differential moves between
//! random peers and then jump relative to the best position with a probability that grows with
//! their rank. Chasers pursue along the team mean and are blended with an instructor that learns
//! from the population mean in teaching-learning style. Every move is clamped to the bounds and
//! kept only if it improves the agent, so the best-so-far objective never increases.
//!
//! A run is single-threaded and draws all randomness from one seeded ChaCha generator in a fixed
//! order, so a seed reproduces the trace bit for bit.

pub mod moves;

use std::io::Write;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use moves::{
    chaser_move, combine, first_suspect_move, guard_divisor, instructor_move, learner_move, location_probability,
    mean_position, second_suspect_move,
};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("objective returned {value} at {position:?}")]
    ObjectiveNotFinite { position: Vec<f64>, value: f64 },
}

/// Function to minimize. Must be deterministic for a fixed position.
pub trait Objective {
    fn evaluate(&self, position: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64> Objective for F {
    fn evaluate(&self, position: &[f64]) -> f64 {
        self(position)
    }
}

/// Per-dimension `(lo, hi)` box with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Bounds(Vec<(f64, f64)>);

impl Bounds {
    pub fn new(limits: Vec<(f64, f64)>) -> Result<Self, OptimizerError> {
        if limits.is_empty() {
            return Err(OptimizerError::InvalidConfig("zero-dimensional search space".into()));
        }
        if let Some((i, (lo, hi))) = limits
            .iter()
            .enumerate()
            .find(|(_, (lo, hi))| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(OptimizerError::InvalidConfig(format!(
                "dimension {i}: bounds ({lo}, {hi}) need finite lo < hi"
            )));
        }
        Ok(Self(limits))
    }

    pub fn uniform(lo: f64, hi: f64, dim: usize) -> Result<Self, OptimizerError> {
        Self::new(vec![(lo, hi); dim])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn limits(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn clamp(&self, position: &mut [f64]) {
        for (x, &(lo, hi)) in position.iter_mut().zip(&self.0) {
            *x = x.clamp(lo, hi);
        }
    }

    pub fn contains(&self, position: &[f64]) -> bool {
        position.len() == self.0.len() && position.iter().zip(&self.0).all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.0.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect()
    }
}

impl TryFrom<Vec<(f64, f64)>> for Bounds {
    type Error = OptimizerError;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Bounds> for Vec<(f64, f64)> {
    fn from(b: Bounds) -> Self {
        b.0
    }
}

/// Which update rules run each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Suspect detection, inquiry, pursuit and instructor blending.
    #[default]
    FactFindingInstructor,
    /// Ablation: instructor learning plus teacher-phase moves for every agent, nothing else.
    InstructorOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfiConfig {
    /// Agents per team.
    pub population_size: usize,
    pub max_iterations: usize,
    pub bounds: Bounds,
    /// Stop as soon as the best objective is at or below this.
    pub objective_tolerance: f64,
    /// Smallest magnitude allowed for the pursuit divisor.
    pub a4_epsilon: f64,
    pub seed: u64,
    #[serde(default)]
    pub variant: Variant,
}

impl FfiConfig {
    pub fn new(bounds: Bounds) -> Self {
        Self {
            population_size: 20,
            max_iterations: 100,
            bounds,
            objective_tolerance: 0.0,
            a4_epsilon: 0.1,
            seed: 0,
            variant: Variant::default(),
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |msg: String| Err(OptimizerError::InvalidConfig(msg));
        if self.population_size < 4 {
            return bad(format!("population size {} < 4", self.population_size));
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.objective_tolerance >= 0.0) {
            return bad(format!("objective tolerance {}", self.objective_tolerance));
        }
        if !(self.a4_epsilon > 0.0 && self.a4_epsilon.is_finite()) {
            return bad(format!("a4 epsilon {}", self.a4_epsilon));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dimension()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub position: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub fact_finders: Vec<Agent>,
    pub chasers: Vec<Agent>,
    pub instructor: Agent,
    pub best: Agent,
    pub iteration: usize,
}

impl Population {
    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.fact_finders
            .iter()
            .chain(&self.chasers)
            .chain(std::iter::once(&self.instructor))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOutcome {
    pub best: Agent,
    /// Best objective after each iteration.
    pub trace: Vec<f64>,
    pub initial_best: f64,
    pub evaluations: usize,
}

impl OptimizeOutcome {
    /// Writes `iteration,best_objective` rows, iterations counted from 1.
    pub fn write_trace_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "best_objective"])?;
        for (i, f) in self.trace.iter().enumerate() {
            w.write_record([(i + 1).to_string(), f.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Stateful optimizer run: configuration, seeded generator and population.
pub struct Ffi<'a, O: Objective + ?Sized> {
    cfg: FfiConfig,
    objective: &'a O,
    rng: ChaCha8Rng,
    population: Population,
    evaluations: usize,
}

impl<'a, O: Objective + ?Sized> Ffi<'a, O> {
    /// Draws both teams uniformly inside the bounds, fact finders first. The instructor starts
    /// at the best initial agent.
    pub fn new(objective: &'a O, cfg: FfiConfig) -> Result<Self, OptimizerError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut evaluations = 0;
        let mut spawn = |rng: &mut ChaCha8Rng| -> Result<Agent, OptimizerError> {
            let position = cfg.bounds.sample(rng);
            let objective = checked_eval(objective, &position)?;
            evaluations += 1;
            Ok(Agent { position, objective })
        };
        let fact_finders = (0..cfg.population_size)
            .map(|_| spawn(&mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let chasers = (0..cfg.population_size)
            .map(|_| spawn(&mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let best = fact_finders
            .iter()
            .chain(&chasers)
            .min_by(|a, b| a.objective.total_cmp(&b.objective))
            .cloned()
            .expect("population is non-empty");
        let population = Population {
            fact_finders,
            chasers,
            instructor: best.clone(),
            best,
            iteration: 0,
        };
        Ok(Self {
            cfg,
            objective,
            rng,
            population,
            evaluations,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn config(&self) -> &FfiConfig {
        &self.cfg
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn evaluate(&mut self, position: &[f64]) -> Result<f64, OptimizerError> {
        self.evaluations += 1;
        checked_eval(self.objective, position)
    }

    fn note_best(&mut self, agent: &Agent) {
        if agent.objective < self.population.best.objective {
            self.population.best = agent.clone();
        }
    }

    /// Greedy replacement: `slot` takes `candidate` only if it strictly improves.
    fn offer(&mut self, team: Team, slot: usize, candidate: Vec<f64>) -> Result<bool, OptimizerError> {
        let objective = self.evaluate(&candidate)?;
        let current = match team {
            Team::FactFinders => &mut self.population.fact_finders[slot],
            Team::Chasers => &mut self.population.chasers[slot],
            Team::Instructor => &mut self.population.instructor,
        };
        if objective < current.objective {
            *current = Agent {
                position: candidate,
                objective,
            };
            let accepted = current.clone();
            self.note_best(&accepted);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// `count` distinct indices of `0..n` other than `exclude`.
    fn peers(&mut self, n: usize, exclude: usize, count: usize) -> Vec<usize> {
        index::sample(&mut self.rng, n - 1, count)
            .into_iter()
            .map(|i| if i >= exclude { i + 1 } else { i })
            .collect()
    }

    fn uniform_vec(&mut self, lo: f64, hi: f64) -> Vec<f64> {
        let dim = self.cfg.dimension();
        (0..dim).map(|_| lo + (hi - lo) * self.rng.random::<f64>()).collect()
    }

    fn teaching_factor(&mut self) -> f64 {
        if self.rng.random_bool(0.5) {
            2.0
        } else {
            1.0
        }
    }

    fn clamped(&self, mut position: Vec<f64>) -> Vec<f64> {
        self.cfg.bounds.clamp(&mut position);
        position
    }

    /// Candidate for fact finder `tau` from three distinct random peers.
    pub fn suspect_first_candidate(&mut self, tau: usize) -> Vec<f64> {
        let peers = self.peers(self.cfg.population_size, tau, 3);
        let a = self.uniform_vec(-1.0, 1.0);
        let ff = &self.population.fact_finders;
        let c = first_suspect_move(
            &ff[tau].position,
            &ff[peers[0]].position,
            &ff[peers[1]].position,
            &ff[peers[2]].position,
            &a,
        );
        self.clamped(c)
    }

    /// Candidate for fact finder `d` anchored at the best position found so far.
    pub fn suspect_second_candidate(&mut self, d: usize) -> Vec<f64> {
        let peers = self.peers(self.cfg.population_size, d, 2);
        let a5 = self.uniform_vec(0.0, 1.0);
        let ff = &self.population.fact_finders;
        let c = second_suspect_move(
            &self.population.best.position,
            &ff[peers[0]].position,
            &ff[d].position,
            &ff[peers[1]].position,
            &a5,
        );
        self.clamped(c)
    }

    /// Pursuit candidate for chaser `tau` given the chaser-team mean.
    pub fn chaser_candidate(&mut self, tau: usize, chaser_mean: &[f64]) -> Vec<f64> {
        let a3 = self.uniform_vec(0.0, 1.0);
        let eps = self.cfg.a4_epsilon;
        let a4: Vec<f64> = self.uniform_vec(-1.0, 1.0).into_iter().map(|v| guard_divisor(v, eps)).collect();
        let c = chaser_move(&self.population.chasers[tau].position, chaser_mean, &a3, &a4);
        self.clamped(c)
    }

    fn everyone_mean(&self) -> Vec<f64> {
        let p = &self.population;
        mean_position(
            p.fact_finders.iter().chain(&p.chasers).map(|a| a.position.as_slice()),
            self.cfg.dimension(),
        )
    }

    /// Instructor candidate from the mean of both teams.
    pub fn instructor_candidate(&mut self) -> Vec<f64> {
        let mean = self.everyone_mean();
        let t = self.teaching_factor();
        let a1 = self.uniform_vec(0.0, 1.0);
        let c = instructor_move(&self.population.instructor.position, &mean, t, &a1);
        self.clamped(c)
    }

    /// Runs one iteration and returns the best objective afterwards.
    pub fn step(&mut self) -> Result<f64, OptimizerError> {
        match self.cfg.variant {
            Variant::FactFindingInstructor => self.full_step()?,
            Variant::InstructorOnly => self.instructor_only_step()?,
        }
        self.population.iteration += 1;
        Ok(self.population.best.objective)
    }

    fn full_step(&mut self) -> Result<(), OptimizerError> {
        let x = self.cfg.population_size;

        for tau in 0..x {
            let c = self.suspect_first_candidate(tau);
            self.offer(Team::FactFinders, tau, c)?;
        }

        let objectives: Vec<f64> = self.population.fact_finders.iter().map(|a| a.objective).collect();
        for (d, p) in location_probability(&objectives).into_iter().enumerate() {
            if self.rng.random::<f64>() < p {
                let c = self.suspect_second_candidate(d);
                self.offer(Team::FactFinders, d, c)?;
            }
        }

        let c = self.instructor_candidate();
        self.offer(Team::Instructor, 0, c)?;

        let chaser_mean = mean_position(
            self.population.chasers.iter().map(|a| a.position.as_slice()),
            self.cfg.dimension(),
        );
        for tau in 0..x {
            let pursuit = self.chaser_candidate(tau, &chaser_mean);
            self.offer(Team::Chasers, tau, pursuit.clone())?;
            let blended = self.clamped(combine(&pursuit, &self.population.instructor.position));
            self.offer(Team::Chasers, tau, blended)?;
        }
        Ok(())
    }

    fn instructor_only_step(&mut self) -> Result<(), OptimizerError> {
        let c = self.instructor_candidate();
        self.offer(Team::Instructor, 0, c)?;
        let mean = self.everyone_mean();
        for team in [Team::FactFinders, Team::Chasers] {
            for i in 0..self.cfg.population_size {
                let t = self.teaching_factor();
                let a1 = self.uniform_vec(0.0, 1.0);
                let current = match team {
                    Team::FactFinders => &self.population.fact_finders[i].position,
                    _ => &self.population.chasers[i].position,
                };
                let c = learner_move(current, &self.population.instructor.position, &mean, t, &a1);
                let c = self.clamped(c);
                self.offer(team, i, c)?;
            }
        }
        Ok(())
    }

    /// Iterates until the best objective reaches the tolerance or the iteration cap.
    pub fn run(mut self) -> Result<OptimizeOutcome, OptimizerError> {
        let initial_best = self.population.best.objective;
        let mut trace = Vec::with_capacity(self.cfg.max_iterations);
        while self.population.iteration < self.cfg.max_iterations {
            let best = self.step()?;
            trace.push(best);
            if best <= self.cfg.objective_tolerance {
                break;
            }
        }
        Ok(OptimizeOutcome {
            best: self.population.best,
            trace,
            initial_best,
            evaluations: self.evaluations,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum Team {
    FactFinders,
    Chasers,
    Instructor,
}

fn checked_eval<O: Objective + ?Sized>(objective: &O, position: &[f64]) -> Result<f64, OptimizerError> {
    let value = objective.evaluate(position);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(OptimizerError::ObjectiveNotFinite {
            position: position.to_vec(),
            value,
        })
    }
}

/// Seeds and evaluates a population without iterating.
pub fn init_population<O: Objective + ?Sized>(cfg: &FfiConfig, objective: &O) -> Result<Population, OptimizerError> {
    Ffi::new(objective, cfg.clone()).map(|f| f.population)
}

/// Minimizes `objective` inside `cfg.bounds`.
pub fn optimize<O: Objective + ?Sized>(objective: &O, cfg: &FfiConfig) -> Result<OptimizeOutcome, OptimizerError> {
    Ffi::new(objective, cfg.clone())?.run()
}

/// `Σ xᵢ²`, the usual smoke-test objective.
pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dim: usize, x: usize, iters: usize, seed: u64) -> FfiConfig {
        FfiConfig {
            population_size: x,
            max_iterations: iters,
            seed,
            ..FfiConfig::new(Bounds::uniform(-5.0, 5.0, dim).unwrap())
        }
    }

    #[test]
    fn init_within_bounds_and_deterministic() {
        let c = FfiConfig {
            population_size: 4,
            seed: 9,
            ..FfiConfig::new(Bounds::uniform(0.0, 1.0, 2).unwrap())
        };
        let p = init_population(&c, &sphere).unwrap();
        assert_eq!(p.fact_finders.len() + p.chasers.len(), 8);
        assert!(p.agents().all(|a| c.bounds.contains(&a.position)));
        let best = p
            .agents()
            .map(|a| a.objective)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(p.best.objective, best);
        assert_eq!(p.instructor, p.best);
        assert_eq!(p, init_population(&c, &sphere).unwrap());
    }

    #[test]
    fn degenerate_bounds_rejected() {
        assert!(Bounds::new(vec![(1.0, 1.0)]).is_err());
        assert!(Bounds::new(vec![(0.0, f64::INFINITY)]).is_err());
        assert!(Bounds::new(vec![]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(optimize(&sphere, &cfg(2, 3, 10, 0)).is_err());
        assert!(optimize(&sphere, &cfg(2, 4, 0, 0)).is_err());
        let mut c = cfg(2, 4, 10, 0);
        c.a4_epsilon = 0.0;
        assert!(optimize(&sphere, &c).is_err());
    }

    #[test]
    fn non_finite_objective_propagates() {
        let nan = |_: &[f64]| f64::NAN;
        assert!(matches!(
            optimize(&nan, &cfg(2, 4, 5, 0)),
            Err(OptimizerError::ObjectiveNotFinite { .. })
        ));
    }

    #[test]
    fn single_iteration_trace() {
        let out = optimize(&sphere, &cfg(2, 10, 1, 3)).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert!(out.trace[0] <= out.initial_best);
    }

    #[test]
    fn infinite_tolerance_stops_after_first_iteration() {
        let mut c = cfg(3, 10, 50, 3);
        c.objective_tolerance = f64::INFINITY;
        assert_eq!(optimize(&sphere, &c).unwrap().trace.len(), 1);
    }

    #[test]
    fn trace_is_monotone_and_reproducible() {
        let c = cfg(4, 12, 60, 17);
        let a = optimize(&sphere, &c).unwrap();
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]));
        let b = optimize(&sphere, &c).unwrap();
        assert_eq!(
            a.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.trace.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn instructor_only_variant_improves() {
        let mut c = cfg(2, 20, 100, 5);
        c.variant = Variant::InstructorOnly;
        let out = optimize(&sphere, &c).unwrap();
        assert!(out.best.objective < out.initial_best);
        assert!(out.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn trace_csv() {
        let out = optimize(&sphere, &cfg(2, 4, 3, 1)).unwrap();
        let mut buf = Vec::new();
        out.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "iteration,best_objective");
        assert_eq!(lines.len(), 1 + out.trace.len());
        assert!(lines[1].starts_with("1,"));
    }

    #[test]
    fn steps_stay_in_bounds() {
        let c = cfg(3, 6, 1, 21);
        let mut ffi = Ffi::new(&sphere, c.clone()).unwrap();
        for _ in 0..30 {
            for tau in 0..6 {
                assert!(c.bounds.contains(&ffi.suspect_first_candidate(tau)));
                assert!(c.bounds.contains(&ffi.suspect_second_candidate(tau)));
                let mean = vec![40.0, -40.0, 0.0];
                assert!(c.bounds.contains(&ffi.chaser_candidate(tau, &mean)));
            }
            assert!(c.bounds.contains(&ffi.instructor_candidate()));
            ffi.step().unwrap();
            assert!(ffi.population().agents().all(|a| c.bounds.contains(&a.position)));
        }
    }
}
