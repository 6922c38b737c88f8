//! Moran birth-death dynamics on a [`GraphTopology`].
//!
//! [`step`] executes one literal update of the process. Runs to absorption go
//! through [`EventEngine`], which samples only state-changing events and draws
//! the number of intervening no-op steps from a geometric distribution; the
//! resulting step counts and outcomes have the same law as repeated [`step`]
//! calls.

mod engine;
mod fenwick;
pub mod kernel;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::topology::GraphTopology;

pub use engine::{EventEngine, Flip};
pub use kernel::flip_probabilities;

/// Generator used for every stochastic routine in the crate.
pub type SimRng = ChaCha8Rng;

/// Recorded alongside stochastic output so results can be regenerated.
pub const RNG_NAME: &str = "ChaCha8Rng::seed_from_u64(seed + replica)";

/// Stream for replica `index` under base seed `seed`.
pub fn replica_rng(seed: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(seed.wrapping_add(index))
}

/// Order of birth and death, with the capital letter marking the step that
/// depends on fitness.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpdateRule {
    /// Reproducer chosen proportional to fitness, victim by edge weight.
    Bd,
    /// Reproducer uniform, victim by edge weight over victim fitness.
    bD,
    /// Victim uniform, reproducer by fitness times edge weight.
    dB,
    /// Victim inversely proportional to fitness, reproducer by edge weight.
    Db,
}

impl UpdateRule {
    pub const ALL: [UpdateRule; 4] = [Self::Bd, Self::bD, Self::dB, Self::Db];
}

impl FromStr for UpdateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Bd" => Ok(Self::Bd),
            "bD" => Ok(Self::bD),
            "dB" => Ok(Self::dB),
            "Db" => Ok(Self::Db),
            other => invalid(format!("unknown update rule `{other}` (expected Bd, bD, dB or Db)")),
        }
    }
}

impl fmt::Display for UpdateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Where the first mutant appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    UniformNode,
    ReservoirOnly,
    /// Offspring site of one replacement event in the all-resident population.
    FecundityWeighted,
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform_node" => Ok(Self::UniformNode),
            "reservoir" | "reservoir_only" => Ok(Self::ReservoirOnly),
            "fecundity" | "fecundity_weighted" => Ok(Self::FecundityWeighted),
            other => invalid(format!(
                "unknown placement `{other}` (expected uniform, reservoir or fecundity)"
            )),
        }
    }
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformNode => "uniform",
            Self::ReservoirOnly => "reservoir",
            Self::FecundityWeighted => "fecundity",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Relative mutant fitness.
    pub r: f64,
    pub rule: UpdateRule,
    pub placement: Placement,
    pub seed: u64,
    /// Step cap; `None` means 1000·N².
    pub max_steps: Option<u64>,
}

impl SimConfig {
    pub fn new(r: f64) -> Self {
        Self { r, rule: UpdateRule::Bd, placement: Placement::UniformNode, seed: 0, max_steps: None }
    }

    pub fn rule(mut self, rule: UpdateRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn placement(mut self, placement: Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_steps(mut self, cap: u64) -> Self {
        self.max_steps = Some(cap);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return invalid(format!("fitness r must be positive and finite, got {}", self.r));
        }
        if self.max_steps == Some(0) {
            return invalid("max_steps must be at least 1");
        }
        Ok(())
    }

    pub fn step_cap(&self, node_count: usize) -> u64 {
        let n = node_count as u64;
        self.max_steps.unwrap_or_else(|| 1000u64.saturating_mul(n).saturating_mul(n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Absorption {
    MutantFixation,
    MutantExtinction,
    StepCapReached,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationOutcome {
    pub result: Absorption,
    /// Steps of the discrete-time process, no-op steps included.
    pub steps: u64,
    pub seed: u64,
    pub initial_mutant: usize,
}

/// Node set with O(1) insert, remove and uniform pick.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeSet {
    items: Vec<usize>,
    pos: Vec<usize>,
}

impl NodeSet {
    const ABSENT: usize = usize::MAX;

    fn new(n: usize) -> Self {
        Self { items: Vec::new(), pos: vec![Self::ABSENT; n] }
    }

    fn full(n: usize) -> Self {
        Self { items: (0..n).collect(), pos: (0..n).collect() }
    }

    fn insert(&mut self, v: usize) {
        if self.pos[v] == Self::ABSENT {
            self.pos[v] = self.items.len();
            self.items.push(v);
        }
    }

    fn remove(&mut self, v: usize) {
        let i = self.pos[v];
        if i == Self::ABSENT {
            return;
        }
        let last = *self.items.last().expect("non-empty");
        self.items.swap_remove(i);
        if last != v {
            self.pos[last] = i;
        }
        self.pos[v] = Self::ABSENT;
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.items[rng.random_range(0..self.items.len())]
    }
}

/// Resident/mutant assignment with per-class index sets. Total fitness is a
/// function of the counts, `F = N + m(r-1)`, so it never drifts.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    is_mutant: Vec<bool>,
    mutants: NodeSet,
    residents: NodeSet,
    r: f64,
}

impl PopulationState {
    pub fn homogeneous(node_count: usize, r: f64) -> Self {
        Self {
            is_mutant: vec![false; node_count],
            mutants: NodeSet::new(node_count),
            residents: NodeSet::full(node_count),
            r,
        }
    }

    pub fn with_mutants(node_count: usize, r: f64, mutants: &[usize]) -> Result<Self> {
        let mut s = Self::homogeneous(node_count, r);
        for &v in mutants {
            if v >= node_count {
                return invalid(format!("node {v} out of range"));
            }
            s.set(v, true);
        }
        Ok(s)
    }

    pub fn node_count(&self) -> usize {
        self.is_mutant.len()
    }

    pub fn mutant_count(&self) -> usize {
        self.mutants.items.len()
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_mutant(&self, v: usize) -> bool {
        self.is_mutant[v]
    }

    pub fn assignment(&self) -> &[bool] {
        &self.is_mutant
    }

    pub fn mutant_nodes(&self) -> &[usize] {
        &self.mutants.items
    }

    pub fn fitness(&self, v: usize) -> f64 {
        if self.is_mutant[v] {
            self.r
        } else {
            1.0
        }
    }

    /// `F_t = N + m(r-1)`, evaluated as `(N-m) + m r`.
    pub fn total_fitness(&self) -> f64 {
        let m = self.mutant_count();
        (self.node_count() - m) as f64 + m as f64 * self.r
    }

    pub fn is_absorbed(&self) -> bool {
        let m = self.mutant_count();
        m == 0 || m == self.node_count()
    }

    pub fn set(&mut self, v: usize, mutant: bool) {
        self.is_mutant[v] = mutant;
        if mutant {
            self.residents.remove(v);
            self.mutants.insert(v);
        } else {
            self.mutants.remove(v);
            self.residents.insert(v);
        }
    }
}

/// Homogeneous resident population with one mutant placed per `cfg.placement`.
pub fn place_initial_mutant<R: Rng + ?Sized>(
    g: &GraphTopology,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<PopulationState> {
    cfg.validate()?;
    let n = g.node_count();
    let node = match cfg.placement {
        Placement::UniformNode => rng.random_range(0..n),
        Placement::ReservoirOnly => {
            let reservoir = g.reservoir_nodes();
            if reservoir.is_empty() {
                return Err(Error::NoReservoir);
            }
            reservoir[rng.random_range(0..reservoir.len())]
        }
        Placement::FecundityWeighted => match cfg.rule {
            // All fitnesses equal: reproducer uniform, offspring site by weight.
            UpdateRule::Bd | UpdateRule::bD => {
                let u = rng.random_range(0..n);
                pick_by_weight(g.out_edges(u).iter().map(|(v, w)| (*v, *w.numer() as f64 / *w.denom() as f64)), rng)
                    .ok_or_else(|| Error::InvalidGraph(format!("node {u} has no out-edges")))?
            }
            // Death first: the vacated site is uniform.
            UpdateRule::dB | UpdateRule::Db => rng.random_range(0..n),
        },
    };
    let mut state = PopulationState::homogeneous(n, cfg.r);
    state.set(node, true);
    Ok(state)
}

fn pick_by_weight<R: Rng + ?Sized>(
    items: impl Iterator<Item = (usize, f64)> + Clone,
    rng: &mut R,
) -> Option<usize> {
    let total: f64 = items.clone().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    let mut last = None;
    for (v, w) in items {
        if w <= 0.0 {
            continue;
        }
        last = Some(v);
        if target < w {
            return Some(v);
        }
        target -= w;
    }
    last
}

fn weight(w: &crate::scalar::Weight) -> f64 {
    *w.numer() as f64 / *w.denom() as f64
}

/// Change applied by one step: `node` took the type of `parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Replacement {
    pub node: usize,
    pub parent: usize,
    pub changed: bool,
}

fn apply(state: &mut PopulationState, parent: usize, node: usize) -> Replacement {
    let new_type = state.is_mutant(parent);
    let changed = state.is_mutant(node) != new_type;
    if changed {
        state.set(node, new_type);
    }
    Replacement { node, parent, changed }
}

/// One update of the process. Fitness-proportional picks use the two-class
/// shortcut: choose the mutant class with probability `m r / F`, then a node
/// uniformly inside the class.
pub fn step<R: Rng + ?Sized>(
    g: &GraphTopology,
    state: &mut PopulationState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Option<Replacement>> {
    check_transient(state)?;
    let n = state.node_count();
    let r = cfg.r;
    let m = state.mutant_count() as f64;
    let (parent, node) = match cfg.rule {
        UpdateRule::Bd => {
            let f = state.total_fitness();
            let u = if rng.random::<f64>() * f < m * r {
                state.mutants.pick(rng)
            } else {
                state.residents.pick(rng)
            };
            let Some(v) = pick_by_weight(g.out_edges(u).iter().map(|(v, w)| (*v, weight(w))), rng) else {
                return Ok(None);
            };
            (u, v)
        }
        UpdateRule::bD => {
            let u = rng.random_range(0..n);
            let edges = g.out_edges(u).iter().map(|(v, w)| (*v, weight(w) / state.fitness(*v)));
            let Some(v) = pick_by_weight(edges, rng) else { return Ok(None) };
            (u, v)
        }
        UpdateRule::dB => {
            let v = rng.random_range(0..n);
            let edges = g.in_edges(v).iter().map(|(u, w)| (*u, weight(w) * state.fitness(*u)));
            let Some(u) = pick_by_weight(edges, rng) else { return Ok(None) };
            (u, v)
        }
        UpdateRule::Db => {
            let inv_total = (n as f64 - m) + m / r;
            let v = if rng.random::<f64>() * inv_total < m / r {
                state.mutants.pick(rng)
            } else {
                state.residents.pick(rng)
            };
            let Some(u) = pick_by_weight(g.in_edges(v).iter().map(|(u, w)| (*u, weight(w))), rng) else {
                return Ok(None);
            };
            (u, v)
        }
    };
    Ok(Some(apply(state, parent, node)))
}

/// Same process as [`step`], selecting by a linear scan over all nodes.
/// Kept as the reference the class-based sampler is tested against.
pub fn step_reference<R: Rng + ?Sized>(
    g: &GraphTopology,
    state: &mut PopulationState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<Option<Replacement>> {
    check_transient(state)?;
    let n = state.node_count();
    let nodes = |f: &dyn Fn(usize) -> f64| (0..n).map(|v| (v, f(v))).collect::<Vec<_>>();
    let (parent, node) = match cfg.rule {
        UpdateRule::Bd => {
            let u = pick_by_weight(nodes(&|v| state.fitness(v)).into_iter(), rng).expect("n > 0");
            let Some(v) = pick_by_weight(g.out_edges(u).iter().map(|(v, w)| (*v, weight(w))), rng) else {
                return Ok(None);
            };
            (u, v)
        }
        UpdateRule::bD => {
            let u = pick_by_weight(nodes(&|_| 1.0).into_iter(), rng).expect("n > 0");
            let edges = g.out_edges(u).iter().map(|(v, w)| (*v, weight(w) / state.fitness(*v)));
            let Some(v) = pick_by_weight(edges, rng) else { return Ok(None) };
            (u, v)
        }
        UpdateRule::dB => {
            let v = pick_by_weight(nodes(&|_| 1.0).into_iter(), rng).expect("n > 0");
            let edges = g.in_edges(v).iter().map(|(u, w)| (*u, weight(w) * state.fitness(*u)));
            let Some(u) = pick_by_weight(edges, rng) else { return Ok(None) };
            (u, v)
        }
        UpdateRule::Db => {
            let v = pick_by_weight(nodes(&|v| 1.0 / state.fitness(v)).into_iter(), rng).expect("n > 0");
            let Some(u) = pick_by_weight(g.in_edges(v).iter().map(|(u, w)| (*u, weight(w))), rng) else {
                return Ok(None);
            };
            (u, v)
        }
    };
    Ok(Some(apply(state, parent, node)))
}

fn check_transient(state: &PopulationState) -> Result<()> {
    if state.is_absorbed() {
        return Err(Error::AbsorbingState {
            mutants: state.mutant_count(),
            nodes: state.node_count(),
        });
    }
    Ok(())
}

fn classify(state_m: usize, n: usize) -> Option<Absorption> {
    if state_m == 0 {
        Some(Absorption::MutantExtinction)
    } else if state_m == n {
        Some(Absorption::MutantFixation)
    } else {
        None
    }
}

/// Places the initial mutant and runs the event-driven simulator until
/// absorption or the step cap.
pub fn run_to_absorption<R: Rng + ?Sized>(
    g: &GraphTopology,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<SimulationOutcome> {
    let state = place_initial_mutant(g, cfg, rng)?;
    let initial_mutant = state.mutant_nodes()[0];
    let (result, steps) = run_from_state(g, &state, cfg, rng)?;
    Ok(SimulationOutcome { result, steps, seed: cfg.seed, initial_mutant })
}

/// Event-driven run from an arbitrary configuration.
pub fn run_from_state<R: Rng + ?Sized>(
    g: &GraphTopology,
    state: &PopulationState,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(Absorption, u64)> {
    cfg.validate()?;
    let n = g.node_count();
    let cap = cfg.step_cap(n);
    if let Some(done) = classify(state.mutant_count(), n) {
        return Ok((done, 0));
    }
    let mut engine = EventEngine::new(g, state.assignment(), cfg.r, cfg.rule)?;
    let mut steps = 0u64;
    loop {
        match engine.advance(rng, cap - steps) {
            Some(flip) => {
                steps += flip.steps;
                if let Some(done) = classify(engine.mutant_count(), n) {
                    return Ok((done, steps));
                }
            }
            None => return Ok((Absorption::StepCapReached, cap)),
        }
    }
}

/// Literal step-by-step run; only practical for small graphs.
pub fn run_to_absorption_stepwise<R: Rng + ?Sized>(
    g: &GraphTopology,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<SimulationOutcome> {
    let mut state = place_initial_mutant(g, cfg, rng)?;
    let initial_mutant = state.mutant_nodes()[0];
    let cap = cfg.step_cap(g.node_count());
    let mut steps = 0u64;
    while !state.is_absorbed() {
        if steps == cap {
            return Ok(SimulationOutcome {
                result: Absorption::StepCapReached,
                steps,
                seed: cfg.seed,
                initial_mutant,
            });
        }
        step(g, &mut state, cfg, rng)?;
        steps += 1;
    }
    let result = classify(state.mutant_count(), state.node_count()).expect("absorbed");
    Ok(SimulationOutcome { result, steps, seed: cfg.seed, initial_mutant })
}

#[cfg(test)]
mod tests;
