use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::SeedableRng;

use super::*;
use crate::topology::{build_family, build_superstar, FamilyKind, GraphTopology, SuperstarSpec};

fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Chi-square critical value at upper tail 1e-4 (Wilson-Hilferty).
fn chi2_critical(df: usize) -> f64 {
    let k = df as f64;
    let z = 3.719;
    k * (1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt()).powi(3)
}

/// Chi-square statistic of `counts` against probabilities `p`.
fn chi2(counts: &[u64], p: &[f64]) -> (f64, usize) {
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut df = 0usize;
    for (c, &pi) in counts.iter().zip(p) {
        let expected = pi * total as f64;
        if expected > 0.0 {
            stat += (*c as f64 - expected).powi(2) / expected;
            df += 1;
        } else {
            assert_eq!(*c, 0, "event with zero probability was observed");
        }
    }
    (stat, df.saturating_sub(1).max(1))
}

fn assert_matches(counts: &[u64], p: &[f64], what: &str) {
    let (stat, df) = chi2(counts, p);
    assert!(stat < chi2_critical(df), "{what}: chi2 = {stat:.2} with df {df}");
}

fn small_graphs() -> Vec<GraphTopology> {
    let half = crate::scalar::Weight::new(1, 2);
    let one = crate::scalar::Weight::new(1, 1);
    // irregular weights: node 0 splits 1/2-1/2, node 1 goes to 2, node 2 splits
    let raw = GraphTopology::from_edges(
        4,
        &[(0, 1, half), (0, 2, half), (1, 2, one), (2, 0, half), (2, 3, half), (3, 0, one)],
        None,
    )
    .unwrap();
    vec![
        build_family(FamilyKind::Complete, 5).unwrap(),
        build_family(FamilyKind::DirectedCycle, 4).unwrap(),
        build_family(FamilyKind::Star, 12).unwrap(),
        build_superstar(SuperstarSpec::new(2, 10, 3).unwrap()).unwrap(),
        raw,
    ]
}

fn kernel_vector(g: &GraphTopology, state: &[bool], r: f64, rule: UpdateRule) -> Vec<f64> {
    let mut p = vec![0.0; g.node_count() + 1];
    for (v, x) in flip_probabilities(g, state, &r, rule) {
        p[v] = x;
    }
    let moved: f64 = p.iter().sum();
    p[g.node_count()] = 1.0 - moved;
    p
}

#[test]
fn placement_uniform_and_reservoir() {
    let spec = SuperstarSpec::new(5, 5, 4).unwrap();
    let g = build_superstar(spec).unwrap();
    let mut r = rng(1);
    let mut counts = vec![0u64; g.node_count()];
    let cfg = SimConfig::new(2.0);
    for _ in 0..92_000 {
        let s = place_initial_mutant(&g, &cfg, &mut r).unwrap();
        assert_eq!(s.mutant_count(), 1);
        counts[s.mutant_nodes()[0]] += 1;
    }
    assert_matches(&counts, &vec![1.0 / 46.0; 46], "uniform placement");

    let cfg = cfg.placement(Placement::ReservoirOnly);
    let mut counts = vec![0u64; g.node_count()];
    for _ in 0..50_000 {
        let s = place_initial_mutant(&g, &cfg, &mut r).unwrap();
        counts[s.mutant_nodes()[0]] += 1;
    }
    let p: Vec<f64> = (0..46).map(|v| if g.is_reservoir(v) { 1.0 / 25.0 } else { 0.0 }).collect();
    assert_matches(&counts, &p, "reservoir placement");

    let star = build_family(FamilyKind::Star, 5).unwrap();
    assert_eq!(place_initial_mutant(&star, &cfg, &mut r), Err(Error::NoReservoir));
}

#[test]
fn fecundity_placement_follows_in_weight() {
    let spec = SuperstarSpec::new(4, 6, 3).unwrap();
    let g = build_superstar(spec).unwrap();
    let n = g.node_count();
    let cfg = SimConfig::new(2.0).placement(Placement::FecundityWeighted);
    let mut r = rng(2);
    let mut counts = vec![0u64; n];
    for _ in 0..100_000 {
        counts[place_initial_mutant(&g, &cfg, &mut r).unwrap().mutant_nodes()[0]] += 1;
    }
    let p: Vec<f64> = (0..n).map(|v| crate::scalar::to_f64(&g.in_weight(v)) / n as f64).collect();
    assert_matches(&counts, &p, "fecundity placement");
    // the stem tops absorb L/N each
    assert!((p[spec.stem_node(0, 1)] - 6.0 / n as f64).abs() < 1e-15);

    let cfg = cfg.rule(UpdateRule::dB);
    let mut counts = vec![0u64; n];
    for _ in 0..60_000 {
        counts[place_initial_mutant(&g, &cfg, &mut r).unwrap().mutant_nodes()[0]] += 1;
    }
    assert_matches(&counts, &vec![1.0 / n as f64; n], "death-first fecundity placement");
}

#[test]
fn step_on_k2_fixes_with_two_thirds() {
    let g = build_family(FamilyKind::Complete, 2).unwrap();
    let cfg = SimConfig::new(2.0);
    let mut r = rng(3);
    let mut fixed = 0u64;
    let trials = 60_000;
    for _ in 0..trials {
        let mut s = PopulationState::with_mutants(2, 2.0, &[0]).unwrap();
        step(&g, &mut s, &cfg, &mut r).unwrap();
        if s.mutant_count() == 2 {
            fixed += 1;
        }
    }
    assert_matches(&[fixed, trials - fixed], &[2.0 / 3.0, 1.0 / 3.0], "K2 step");
}

#[test]
fn neutral_bd_reproducer_is_uniform() {
    let g = build_superstar(SuperstarSpec::new(2, 3, 2).unwrap()).unwrap();
    let n = g.node_count();
    let cfg = SimConfig::new(1.0);
    let mut r = rng(4);
    let mut counts = vec![0u64; n];
    let mut s = PopulationState::with_mutants(n, 1.0, &[1, 4, 9]).unwrap();
    for _ in 0..50_000 {
        let before = s.clone();
        let rep = step(&g, &mut s, &cfg, &mut r).unwrap().unwrap();
        counts[rep.parent] += 1;
        s = before;
    }
    assert_matches(&counts, &vec![1.0 / n as f64; n], "neutral reproducer");
}

#[test]
fn step_rejects_absorbed_state() {
    let g = build_family(FamilyKind::DirectedCycle, 3).unwrap();
    let mut s = PopulationState::homogeneous(3, 2.0);
    let err = step(&g, &mut s, &SimConfig::new(2.0), &mut rng(0)).unwrap_err();
    assert_eq!(err, Error::AbsorbingState { mutants: 0, nodes: 3 });
    let mut full = PopulationState::with_mutants(3, 2.0, &[0, 1, 2]).unwrap();
    assert!(step_reference(&g, &mut full, &SimConfig::new(2.0), &mut rng(0)).is_err());
}

#[test]
fn fitness_bookkeeping_holds_along_trajectories() {
    let g = build_superstar(SuperstarSpec::new(3, 4, 3).unwrap()).unwrap();
    let n = g.node_count();
    for rule in UpdateRule::ALL {
        let cfg = SimConfig::new(1.7).rule(rule);
        let mut r = rng(5);
        let mut s = PopulationState::with_mutants(n, 1.7, &[1, 2, 3, 20]).unwrap();
        for _ in 0..20_000 {
            if s.is_absorbed() {
                break;
            }
            let m0 = s.mutant_count();
            step(&g, &mut s, &cfg, &mut r).unwrap();
            let m1 = s.mutant_count();
            assert!(m0.abs_diff(m1) <= 1);
            let count = s.assignment().iter().filter(|&&b| b).count();
            assert_eq!(count, m1);
            let scratch: f64 = (0..n).map(|v| s.fitness(v)).sum();
            assert!((scratch - s.total_fitness()).abs() < 1e-9);
            let direct = n as f64 + m1 as f64 * (1.7 - 1.0);
            assert!((direct - s.total_fitness()).abs() < 1e-9);
            if m1 > 0 && m1 < n {
                assert!((n as f64) < s.total_fitness() && s.total_fitness() < 1.7 * n as f64);
            }
        }
    }
}

/// The class-based stepper, the linear-scan stepper and the exact kernel
/// agree on the distribution of the node that changes.
#[test]
fn steppers_agree_with_kernel() {
    let mut r = rng(6);
    for g in small_graphs() {
        let n = g.node_count();
        let mutants: Vec<usize> = (0..n).filter(|v| v % 3 == 0).collect();
        for rule in UpdateRule::ALL {
            for fit in [0.5, 2.0] {
                let cfg = SimConfig::new(fit).rule(rule);
                let base = PopulationState::with_mutants(n, fit, &mutants).unwrap();
                let p = kernel_vector(&g, base.assignment(), fit, rule);
                for (name, stepper) in [
                    ("class", step::<SimRng> as fn(&_, &mut _, &_, &mut SimRng) -> _),
                    ("reference", step_reference::<SimRng>),
                ] {
                    let mut counts = vec![0u64; n + 1];
                    for _ in 0..40_000 {
                        let mut s = base.clone();
                        match stepper(&g, &mut s, &cfg, &mut r).unwrap() {
                            Some(rep) if rep.changed => counts[rep.node] += 1,
                            _ => counts[n] += 1,
                        }
                    }
                    assert_matches(&counts, &p, &format!("{name} {rule} r={fit} N={n}"));
                }
            }
        }
    }
}

#[test]
fn engine_matches_kernel() {
    let mut r = rng(7);
    for g in small_graphs() {
        let n = g.node_count();
        for rule in UpdateRule::ALL {
            for fit in [0.5, 1.0, 3.0] {
                let state: Vec<bool> = (0..n).map(|v| v % 2 == 1 || v == 0).collect();
                let engine = EventEngine::new(&g, &state, fit, rule).unwrap();
                let p = kernel_vector(&g, &state, fit, rule);
                let moving = 1.0 - p[n];
                assert!((engine.change_probability() - moving).abs() < 1e-12);
                let mut counts = vec![0u64; n + 1];
                for _ in 0..30_000 {
                    counts[engine.sample_target(&mut r).unwrap()] += 1;
                }
                let cond: Vec<f64> = p[..n].iter().map(|x| x / moving).chain([0.0]).collect();
                assert_matches(&counts, &cond, &format!("engine {rule} r={fit} N={n}"));
            }
        }
    }
}

#[test]
fn engine_incremental_state_matches_fresh_build() {
    let spec = SuperstarSpec::new(3, 12, 4).unwrap();
    let g = build_superstar(spec).unwrap();
    let n = g.node_count();
    let mut r = rng(8);
    for rule in UpdateRule::ALL {
        let mut state = vec![false; n];
        state[1] = true;
        let mut engine = EventEngine::new(&g, &state, 1.9, rule).unwrap();
        for i in 0..3000 {
            let v = (i * 7919 + 13) % n;
            engine.flip(v);
            state[v] = !state[v];
            if i % 97 == 0 {
                let fresh = EventEngine::new(&g, &state, 1.9, rule).unwrap();
                let kernel: f64 = flip_probabilities(&g, &state, &1.9, rule).iter().map(|x| x.1).sum();
                assert!((engine.change_probability() - fresh.change_probability()).abs() < 1e-12);
                assert!((engine.change_probability() - kernel).abs() < 1e-12);
                assert_eq!(engine.mutant_count(), state.iter().filter(|&&b| b).count());
            }
        }
        // random events keep the bookkeeping consistent too
        for _ in 0..2000 {
            if engine.mutant_count() == 0 || engine.mutant_count() == n {
                break;
            }
            engine.advance(&mut r, u64::MAX).unwrap();
        }
        let fresh = EventEngine::new(&g, engine.assignment(), 1.9, rule).unwrap();
        assert!((engine.change_probability() - fresh.change_probability()).abs() < 1e-12);
    }
}

#[test]
fn root_of_superstar_is_replaced_at_rate_b_over_f() {
    // only the root is a mutant; under Bd it is replaced by any stem end
    let spec = SuperstarSpec::new(4, 3, 2).unwrap();
    let g = build_superstar(spec).unwrap();
    let n = g.node_count();
    let cfg = SimConfig::new(2.0);
    let base = PopulationState::with_mutants(n, 2.0, &[0]).unwrap();
    let f = base.total_fitness();
    let mut r = rng(9);
    let steps = 1_000_000u64;
    let mut hits = 0u64;
    for _ in 0..steps {
        let mut s = base.clone();
        if let Some(rep) = step(&g, &mut s, &cfg, &mut r).unwrap() {
            if rep.node == 0 && rep.changed {
                hits += 1;
            }
        }
    }
    let p = spec.branches as f64 / f;
    assert_matches(&[hits, steps - hits], &[p, 1.0 - p], "root replacement");
}

fn trajectory_hash(g: &GraphTopology, cfg: &SimConfig) -> (u64, Absorption) {
    let mut r = replica_rng(cfg.seed, 0);
    let state = place_initial_mutant(g, cfg, &mut r).unwrap();
    let mut engine = EventEngine::new(g, state.assignment(), cfg.r, cfg.rule).unwrap();
    let mut h = DefaultHasher::new();
    state.mutant_nodes().hash(&mut h);
    loop {
        let Some(flip) = engine.advance(&mut r, u64::MAX) else { return (h.finish(), Absorption::StepCapReached) };
        (flip.node, flip.steps, flip.became_mutant).hash(&mut h);
        match engine.mutant_count() {
            0 => return (h.finish(), Absorption::MutantExtinction),
            m if m == g.node_count() => return (h.finish(), Absorption::MutantFixation),
            _ => {}
        }
    }
}

#[test]
fn identical_seeds_reproduce_event_sequences() {
    let g = build_superstar(SuperstarSpec::new(3, 5, 3).unwrap()).unwrap();
    for rule in UpdateRule::ALL {
        let cfg = SimConfig::new(2.0).rule(rule).seed(42);
        assert_eq!(trajectory_hash(&g, &cfg), trajectory_hash(&g, &cfg));
        let a = run_to_absorption(&g, &cfg, &mut replica_rng(9, 3)).unwrap();
        let b = run_to_absorption(&g, &cfg, &mut replica_rng(9, 3)).unwrap();
        assert_eq!(a, b);
    }
    let cfg = SimConfig::new(2.0).seed(42);
    let other = SimConfig::new(2.0).seed(43);
    assert_ne!(trajectory_hash(&g, &cfg).0, trajectory_hash(&g, &other).0);
}

#[test]
fn step_cap_is_reported_not_folded() {
    let g = build_superstar(SuperstarSpec::new(3, 5, 3).unwrap()).unwrap();
    let cfg = SimConfig::new(2.0).max_steps(5).placement(Placement::ReservoirOnly);
    let mut r = rng(10);
    let mut capped = 0;
    for _ in 0..200 {
        let out = run_to_absorption(&g, &cfg, &mut r).unwrap();
        assert!(out.steps <= 5);
        if out.result == Absorption::StepCapReached {
            capped += 1;
            assert_eq!(out.steps, 5);
        }
    }
    assert!(capped > 150);
    assert!(SimConfig::new(2.0).max_steps(0).validate().is_err());
    assert!(SimConfig::new(-1.0).validate().is_err());
    assert_eq!(SimConfig::new(1.0).step_cap(10), 100_000);
}

#[test]
fn frozen_graph_hits_cap() {
    // two disconnected self-loops: a mixed state can never change
    let one = crate::scalar::Weight::new(1, 1);
    let g = GraphTopology::from_edges(2, &[(0, 0, one), (1, 1, one)], None).unwrap();
    let s = PopulationState::with_mutants(2, 2.0, &[0]).unwrap();
    let (res, steps) = run_from_state(&g, &s, &SimConfig::new(2.0).max_steps(1000), &mut rng(0)).unwrap();
    assert_eq!((res, steps), (Absorption::StepCapReached, 1000));
}

fn fixation_count(g: &GraphTopology, cfg: &SimConfig, trials: u64, stepwise: bool) -> (u64, f64) {
    let mut fixed = 0;
    let mut steps = 0.0;
    for i in 0..trials {
        let mut r = replica_rng(cfg.seed, i);
        let out = if stepwise {
            run_to_absorption_stepwise(g, cfg, &mut r).unwrap()
        } else {
            run_to_absorption(g, cfg, &mut r).unwrap()
        };
        assert_ne!(out.result, Absorption::StepCapReached);
        if out.result == Absorption::MutantFixation {
            fixed += 1;
        }
        steps += out.steps as f64;
    }
    (fixed, steps / trials as f64)
}

fn within_sigma(hits: u64, n: u64, p: f64, sigmas: f64) -> bool {
    let sd = (p * (1.0 - p) / n as f64).sqrt();
    ((hits as f64 / n as f64) - p).abs() <= sigmas * sd
}

#[test]
fn event_engine_and_literal_stepping_agree() {
    let g = build_superstar(SuperstarSpec::new(2, 2, 2).unwrap()).unwrap();
    for rule in UpdateRule::ALL {
        let cfg = SimConfig::new(2.0).rule(rule).seed(11);
        let (fa, sa) = fixation_count(&g, &cfg, 20_000, false);
        let (fb, sb) = fixation_count(&g, &cfg.clone().seed(99_000), 20_000, true);
        let pooled = (fa + fb) as f64 / 40_000.0;
        let sd = (pooled * (1.0 - pooled) * 2.0 / 20_000.0).sqrt();
        assert!(((fa as f64 - fb as f64) / 20_000.0).abs() < 4.0 * sd, "{rule}: {fa} vs {fb}");
        // mean absorption time within 5%
        assert!((sa - sb).abs() / sb < 0.05, "{rule}: steps {sa} vs {sb}");
    }
}

#[test]
fn classic_fixation_values() {
    let cycle = build_family(FamilyKind::DirectedCycle, 5).unwrap();
    let (f, _) = fixation_count(&cycle, &SimConfig::new(1.0).seed(1), 100_000, false);
    assert!(within_sigma(f, 100_000, 0.2, 4.0), "{f}");

    let k6 = build_family(FamilyKind::Complete, 6).unwrap();
    let (f, _) = fixation_count(&k6, &SimConfig::new(2.0).seed(2), 100_000, false);
    assert!(within_sigma(f, 100_000, 32.0 / 63.0, 4.0), "{f}");

    let k2 = build_family(FamilyKind::Complete, 2).unwrap();
    let (f, _) = fixation_count(&k2, &SimConfig::new(1e6).seed(3), 1000, false);
    assert!(f >= 999);
}

#[test]
fn neutral_cycle_every_start_fixes_with_one_over_n() {
    let g = build_family(FamilyKind::DirectedCycle, 5).unwrap();
    let cfg = SimConfig::new(1.0);
    for start in 0..5 {
        let s = PopulationState::with_mutants(5, 1.0, &[start]).unwrap();
        let mut r = rng(100 + start as u64);
        let mut fixed = 0;
        for _ in 0..20_000 {
            if run_from_state(&g, &s, &cfg, &mut r).unwrap().0 == Absorption::MutantFixation {
                fixed += 1;
            }
        }
        assert!(within_sigma(fixed, 20_000, 0.2, 4.0), "start {start}: {fixed}");
    }
}

#[test]
fn parsing_round_trips() {
    for rule in UpdateRule::ALL {
        assert_eq!(rule.to_string().parse::<UpdateRule>().unwrap(), rule);
    }
    for p in [Placement::UniformNode, Placement::ReservoirOnly, Placement::FecundityWeighted] {
        assert_eq!(p.to_string().parse::<Placement>().unwrap(), p);
    }
    assert!("BD".parse::<UpdateRule>().is_err());
    assert!("edge".parse::<Placement>().is_err());
}
