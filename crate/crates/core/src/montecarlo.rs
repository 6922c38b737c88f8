//! Seeded replica harness: fixation estimates, the one-to-two reservoir
//! probe, and Wilson score intervals.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    place_initial_mutant, replica_rng, run_to_absorption, Absorption, EventEngine, Placement, SimConfig, RNG_NAME,
};
use crate::error::{invalid, Error, Result};
use crate::topology::GraphTopology;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "EVOGRAPH_THREADS";

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub successes: u64,
    /// Replicas that finished; capped runs are not included.
    pub trials: u64,
    /// Replicas stopped by the step cap.
    pub capped: u64,
    pub p: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed_base: u64,
    pub steps_total: u64,
    pub rng: String,
    pub wall_clock_secs: f64,
}

impl EstimateReport {
    fn from_tally(t: Tally, seed_base: u64, started: Instant) -> Self {
        let trials = t.successes + t.failures;
        let (ci_lo, ci_hi) = wilson_interval(t.successes, trials, Z95);
        let p = if trials == 0 { f64::NAN } else { t.successes as f64 / trials as f64 };
        Self {
            successes: t.successes,
            trials,
            capped: t.capped,
            p,
            ci_lo,
            ci_hi,
            seed_base,
            steps_total: t.steps,
            rng: RNG_NAME.to_string(),
            wall_clock_secs: started.elapsed().as_secs_f64(),
        }
    }

    /// Interval at an arbitrary quantile, e.g. `z = 4` for a 4-sigma band.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.successes, self.trials, z)
    }

    /// Copy with the timing zeroed, for byte-stable output.
    pub fn without_timing(&self) -> Self {
        Self { wall_clock_secs: 0.0, ..self.clone() }
    }

    pub fn warning(&self) -> Option<String> {
        (self.capped > 0).then(|| format!("{} replicas hit the step cap and were excluded", self.capped))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    successes: u64,
    failures: u64,
    capped: u64,
    steps: u64,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            successes: self.successes + o.successes,
            failures: self.failures + o.failures,
            capped: self.capped + o.capped,
            steps: self.steps + o.steps,
        }
    }

    fn record(result: Absorption, steps: u64) -> Tally {
        let mut t = Tally { steps, ..Tally::default() };
        match result {
            Absorption::MutantFixation => t.successes = 1,
            Absorption::MutantExtinction => t.failures = 1,
            Absorption::StepCapReached => t.capped = 1,
        }
        t
    }
}

/// Worker count from `EVOGRAPH_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `trials` replicas, replica `i` on stream `replica_rng(seed, i)`, and
/// sums the outcomes. Counts are summed, so scheduling cannot change results.
fn run_replicas<F>(trials: u64, job: F) -> Result<Tally>
where
    F: Fn(u64) -> Result<Tally> + Sync + Send,
{
    let work = || (0..trials).into_par_iter().map(&job).try_reduce(Tally::default, |a, b| Ok(a.add(b)));
    match thread_cap() {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
        Some(_) => (0..trials).try_fold(Tally::default(), |acc, i| Ok(acc.add(job(i)?))),
        None => work(),
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return invalid("trials must be at least 1");
    }
    Ok(())
}

/// Fixation frequency over independent replicas.
pub fn estimate_fixation(g: &GraphTopology, cfg: &SimConfig, trials: u64) -> Result<EstimateReport> {
    cfg.validate()?;
    check_trials(trials)?;
    let started = Instant::now();
    let tally = run_replicas(trials, |i| {
        let mut rng = replica_rng(cfg.seed, i);
        let out = run_to_absorption(g, cfg, &mut rng)?;
        Ok(Tally::record(out.result, out.steps))
    })?;
    Ok(EstimateReport::from_tally(tally, cfg.seed, started))
}

/// Chance that a single reservoir mutant is followed by a second reservoir
/// mutant before the reservoirs are mutant-free again. Success is the first
/// moment two reservoir nodes are mutants; stem and root mutants do not count.
pub fn estimate_one_to_two(g: &GraphTopology, cfg: &SimConfig, trials: u64) -> Result<EstimateReport> {
    cfg.validate()?;
    check_trials(trials)?;
    if g.superstar().is_none() {
        return Err(Error::NotSuperstar);
    }
    if cfg.placement != Placement::ReservoirOnly {
        return invalid("one-to-two probe needs reservoir placement");
    }
    let cap = cfg.step_cap(g.node_count());
    let started = Instant::now();
    let tally = run_replicas(trials, |i| {
        let mut rng = replica_rng(cfg.seed, i);
        let state = place_initial_mutant(g, cfg, &mut rng)?;
        let mut engine = EventEngine::new(g, state.assignment(), cfg.r, cfg.rule)?;
        let mut in_reservoir = 1usize;
        let mut steps = 0u64;
        loop {
            let Some(flip) = engine.advance(&mut rng, cap - steps) else {
                return Ok(Tally::record(Absorption::StepCapReached, cap));
            };
            steps += flip.steps;
            if g.is_reservoir(flip.node) {
                if flip.became_mutant {
                    in_reservoir += 1;
                } else {
                    in_reservoir -= 1;
                }
                match in_reservoir {
                    2 => return Ok(Tally::record(Absorption::MutantFixation, steps)),
                    0 => return Ok(Tally::record(Absorption::MutantExtinction, steps)),
                    _ => {}
                }
            }
        }
    })?;
    Ok(EstimateReport::from_tally(tally, cfg.seed, started))
}
