//! Event-driven simulator.
//!
//! Every edge `u -> v` whose endpoints differ in type can fire and flip `v`.
//! Edges are attributed either to their reproducer `u` (one rate slot per
//! reproducer) or, when `v` is *target-keyed*, to `v` itself (one rate slot per
//! target). High in-degree targets are target-keyed so that flipping any node
//! touches O(in-degree of non-keyed targets + keyed out-neighbours) slots, which
//! keeps both hubs of a superstar (root and stem tops) at O(1) per event.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::topology::GraphTopology;

use super::fenwick::RateTree;
use super::UpdateRule;

/// Under `Bd` and `bD`, targets with more in-edges than this are target-keyed
/// (under `bD` only when every in-neighbour has out-degree one).
const HUB_IN_DEGREE: usize = 8;
/// Flips between full recomputations of the floating-point sums.
const REBUILD_INTERVAL: u64 = 1 << 18;

/// One state-changing event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flip {
    pub node: usize,
    pub became_mutant: bool,
    /// Process steps consumed, including the no-op steps before this event.
    pub steps: u64,
}

#[derive(Debug, Clone)]
pub struct EventEngine<'g> {
    graph: &'g GraphTopology,
    rule: UpdateRule,
    r: f64,
    is_mutant: Vec<bool>,
    mutants: usize,
    keyed: Vec<bool>,

    out_start: Vec<usize>,
    edge_source: Vec<u32>,
    edge_target: Vec<u32>,
    edge_w: Vec<f64>,

    /// `open[2u + t]`: edges from `u` into non-keyed targets of type `t`.
    open: Vec<Vec<u32>>,
    open_w: Vec<f64>,
    edge_pos: Vec<u32>,
    open_wmax: Vec<f64>,
    /// Edges into each non-keyed node, as edge ids.
    in_start: Vec<usize>,
    in_ids: Vec<u32>,

    /// `keyed_in_w[2v + t]`: in-weight of keyed `v` from neighbours of type `t`.
    keyed_in_w: Vec<f64>,
    keyed_in_count: Vec<u32>,
    /// Out-edges of each node that end in a keyed target.
    keyed_out_start: Vec<usize>,
    keyed_out: Vec<(u32, f64)>,

    /// Slots `0..n` are reproducer rates, `n..2n` target rates.
    rates: RateTree,
    flips_since_rebuild: u64,
}

#[inline]
fn ty(mutant: bool) -> usize {
    mutant as usize
}

impl<'g> EventEngine<'g> {
    pub fn new(g: &'g GraphTopology, assignment: &[bool], r: f64, rule: UpdateRule) -> Result<Self> {
        let n = g.node_count();
        if assignment.len() != n {
            return invalid(format!("assignment has {} entries for N = {n}", assignment.len()));
        }
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("fitness r must be positive and finite, got {r}"));
        }
        let keyed: Vec<bool> = (0..n)
            .map(|v| match rule {
                UpdateRule::Bd => g.in_edges(v).len() > HUB_IN_DEGREE,
                // a reproducer with a single out-edge fires it with probability one
                // whenever the types differ, whatever the fitnesses
                UpdateRule::bD => {
                    g.in_edges(v).len() > HUB_IN_DEGREE && g.in_edges(v).iter().all(|&(u, _)| g.out_edges(u).len() == 1)
                }
                UpdateRule::dB | UpdateRule::Db => true,
            })
            .collect();

        let mut out_start = Vec::with_capacity(n + 1);
        let mut edge_source = Vec::with_capacity(g.edge_count());
        let mut edge_target = Vec::with_capacity(g.edge_count());
        let mut edge_w = Vec::with_capacity(g.edge_count());
        let mut keyed_out_start = Vec::with_capacity(n + 1);
        let mut keyed_out = Vec::new();
        let mut in_lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut open_wmax = vec![0.0f64; n];
        for u in 0..n {
            out_start.push(edge_target.len());
            keyed_out_start.push(keyed_out.len());
            for (v, w) in g.out_edges(u) {
                let w = *w.numer() as f64 / *w.denom() as f64;
                let e = edge_target.len() as u32;
                edge_source.push(u as u32);
                edge_target.push(*v as u32);
                edge_w.push(w);
                if keyed[*v] {
                    keyed_out.push((*v as u32, w));
                } else {
                    in_lists[*v].push(e);
                    open_wmax[u] = open_wmax[u].max(w);
                }
            }
        }
        out_start.push(edge_target.len());
        keyed_out_start.push(keyed_out.len());
        let mut in_start = Vec::with_capacity(n + 1);
        let mut in_ids = Vec::new();
        for list in in_lists {
            in_start.push(in_ids.len());
            in_ids.extend(list);
        }
        in_start.push(in_ids.len());

        let mutants = assignment.iter().filter(|&&b| b).count();
        let edges = edge_target.len();
        let mut engine = Self {
            graph: g,
            rule,
            r,
            is_mutant: assignment.to_vec(),
            mutants,
            keyed,
            out_start,
            edge_source,
            edge_target,
            edge_w,
            open: vec![Vec::new(); 2 * n],
            open_w: vec![0.0; 2 * n],
            edge_pos: vec![u32::MAX; edges],
            open_wmax,
            in_start,
            in_ids,
            keyed_in_w: vec![0.0; 2 * n],
            keyed_in_count: vec![0; 2 * n],
            keyed_out_start,
            keyed_out,
            rates: RateTree::new(2 * n),
            flips_since_rebuild: 0,
        };
        engine.rebuild_all();
        Ok(engine)
    }

    pub fn graph(&self) -> &GraphTopology {
        self.graph
    }

    pub fn mutant_count(&self) -> usize {
        self.mutants
    }

    pub fn is_mutant(&self, v: usize) -> bool {
        self.is_mutant[v]
    }

    pub fn assignment(&self) -> &[bool] {
        &self.is_mutant
    }

    fn n(&self) -> usize {
        self.is_mutant.len()
    }

    fn fitness_of(&self, mutant: bool) -> f64 {
        if mutant {
            self.r
        } else {
            1.0
        }
    }

    /// Per-step normalizer the slot rates are divided by.
    fn normalizer(&self) -> f64 {
        let n = self.n() as f64;
        let m = self.mutants as f64;
        match self.rule {
            UpdateRule::Bd => (n - m) + m * self.r,
            UpdateRule::bD | UpdateRule::dB => n,
            UpdateRule::Db => (n - m) + m / self.r,
        }
    }

    /// Probability that the next step changes the configuration.
    pub fn change_probability(&self) -> f64 {
        (self.rates.total() / self.normalizer()).min(1.0)
    }

    fn reproducer_rate(&self, u: usize) -> f64 {
        let own = self.is_mutant[u];
        let opp_w = self.open_w[2 * u + ty(!own)];
        if opp_w <= 0.0 {
            return 0.0;
        }
        match self.rule {
            UpdateRule::Bd => self.fitness_of(own) * opp_w,
            UpdateRule::bD => {
                let denom = self.open_w[2 * u] + self.open_w[2 * u + 1] / self.r;
                opp_w / self.fitness_of(!own) / denom
            }
            UpdateRule::dB | UpdateRule::Db => 0.0,
        }
    }

    fn target_rate(&self, v: usize) -> f64 {
        if !self.keyed[v] {
            return 0.0;
        }
        let own = self.is_mutant[v];
        let opp_w = self.keyed_in_w[2 * v + ty(!own)];
        if opp_w <= 0.0 {
            return 0.0;
        }
        let (res_w, mut_w) = (self.keyed_in_w[2 * v], self.keyed_in_w[2 * v + 1]);
        match self.rule {
            UpdateRule::Bd => self.fitness_of(!own) * opp_w,
            UpdateRule::dB => self.fitness_of(!own) * opp_w / (res_w + self.r * mut_w),
            UpdateRule::Db => opp_w / (res_w + mut_w) / self.fitness_of(own),
            UpdateRule::bD => self.keyed_in_count[2 * v + ty(!own)] as f64,
        }
    }

    fn refresh(&mut self, v: usize) {
        let n = self.n();
        let rr = self.reproducer_rate(v);
        self.rates.set(v, rr);
        let tr = self.target_rate(v);
        self.rates.set(n + v, tr);
    }

    fn rebuild_all(&mut self) {
        let n = self.n();
        for list in &mut self.open {
            list.clear();
        }
        self.open_w.iter_mut().for_each(|w| *w = 0.0);
        self.keyed_in_w.iter_mut().for_each(|w| *w = 0.0);
        self.keyed_in_count.iter_mut().for_each(|c| *c = 0);
        for u in 0..n {
            let own = ty(self.is_mutant[u]);
            for e in self.out_start[u]..self.out_start[u + 1] {
                let v = self.edge_target[e] as usize;
                let w = self.edge_w[e];
                if self.keyed[v] {
                    self.keyed_in_w[2 * v + own] += w;
                    self.keyed_in_count[2 * v + own] += 1;
                } else {
                    let slot = 2 * u + ty(self.is_mutant[v]);
                    self.edge_pos[e] = self.open[slot].len() as u32;
                    self.open[slot].push(e as u32);
                    self.open_w[slot] += w;
                }
            }
        }
        for v in 0..n {
            let rr = self.reproducer_rate(v);
            self.rates.set(v, rr);
            let tr = self.target_rate(v);
            self.rates.set(n + v, tr);
        }
        self.rates.rebuild();
        self.flips_since_rebuild = 0;
    }

    fn move_open_edge(&mut self, e: usize, from: usize, to: usize) {
        let pos = self.edge_pos[e] as usize;
        let list = &mut self.open[from];
        list.swap_remove(pos);
        if let Some(&moved) = list.get(pos) {
            self.edge_pos[moved as usize] = pos as u32;
        }
        let w = self.edge_w[e];
        self.open_w[from] = if list.is_empty() { 0.0 } else { self.open_w[from] - w };
        self.edge_pos[e] = self.open[to].len() as u32;
        self.open[to].push(e as u32);
        self.open_w[to] += w;
    }

    /// Flips `x` and updates every slot whose rate depends on it.
    pub fn flip(&mut self, x: usize) {
        let old = self.is_mutant[x];
        let (from, to) = (ty(old), ty(!old));
        self.is_mutant[x] = !old;
        if old {
            self.mutants -= 1;
        } else {
            self.mutants += 1;
        }

        if !self.keyed[x] {
            for k in self.in_start[x]..self.in_start[x + 1] {
                let e = self.in_ids[k] as usize;
                let u = self.edge_source[e] as usize;
                self.move_open_edge(e, 2 * u + from, 2 * u + to);
                if u != x {
                    self.refresh(u);
                }
            }
        }
        for k in self.keyed_out_start[x]..self.keyed_out_start[x + 1] {
            let (v, w) = self.keyed_out[k];
            let v = v as usize;
            let (a, b) = (2 * v + from, 2 * v + to);
            self.keyed_in_count[a] -= 1;
            self.keyed_in_w[a] = if self.keyed_in_count[a] == 0 { 0.0 } else { self.keyed_in_w[a] - w };
            self.keyed_in_count[b] += 1;
            self.keyed_in_w[b] += w;
            if v != x {
                self.refresh(v);
            }
        }
        self.refresh(x);

        self.flips_since_rebuild += 1;
        if self.flips_since_rebuild >= REBUILD_INTERVAL {
            self.rebuild_all();
        }
    }

    /// Samples which node the next state-changing event flips, without
    /// applying it. `None` when no event can occur.
    pub fn sample_target<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let n = self.n();
        let total = self.rates.total();
        if total <= 0.0 {
            return None;
        }
        loop {
            let slot = self.rates.find(rng.random::<f64>() * total)?;
            if slot >= n {
                return Some(slot - n);
            }
            let u = slot;
            let list = &self.open[2 * u + ty(!self.is_mutant[u])];
            if list.is_empty() {
                continue;
            }
            let wmax = self.open_wmax[u];
            loop {
                let e = list[rng.random_range(0..list.len())] as usize;
                let w = self.edge_w[e];
                if w >= wmax || rng.random::<f64>() * wmax < w {
                    return Some(self.edge_target[e] as usize);
                }
            }
        }
    }

    /// Advances to the next state-changing event if it happens within
    /// `budget` steps. Returns `None` (state untouched) otherwise, including
    /// when the configuration is frozen.
    pub fn advance<R: Rng + ?Sized>(&mut self, rng: &mut R, budget: u64) -> Option<Flip> {
        let p = self.change_probability();
        if p <= 0.0 || budget == 0 {
            return None;
        }
        let steps = if p >= 1.0 {
            1
        } else {
            let u = 1.0 - rng.random::<f64>();
            let extra = (u.ln() / (-p).ln_1p()).floor();
            if extra >= budget as f64 {
                return None;
            }
            1 + extra as u64
        };
        if steps > budget {
            return None;
        }
        let node = self.sample_target(rng)?;
        let became_mutant = !self.is_mutant[node];
        self.flip(node);
        Some(Flip { node, became_mutant, steps })
    }
}
