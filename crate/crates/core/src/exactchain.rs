//! Exact fixation probabilities for small graphs from the absorbing chain on
//! all `2^N` mutant configurations. Rows come from the same one-step kernel
//! the simulator is tested against.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::{flip_probabilities, UpdateRule};
use crate::error::{invalid, Error, Result};
use crate::scalar::rational_from_f64;
use crate::topology::GraphTopology;

pub const DEFAULT_NODE_CAP: usize = 16;
/// Systems up to this many configurations are solved by dense LU.
pub const DENSE_STATE_LIMIT: usize = 2048;
pub const RESIDUAL_GATE: f64 = 1e-12;

/// Bitmask over nodes, bit `v` set when node `v` is a mutant.
pub type ConfigurationIndex = u64;

pub fn mask_of(is_mutant: &[bool]) -> ConfigurationIndex {
    is_mutant.iter().enumerate().filter(|(_, &m)| m).fold(0, |acc, (v, _)| acc | 1 << v)
}

pub fn assignment_of(mask: ConfigurationIndex, nodes: usize) -> Vec<bool> {
    (0..nodes).map(|v| mask >> v & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactFixation {
    pub rule: UpdateRule,
    pub r: f64,
    /// Fixation probability starting from a single mutant at each node.
    pub per_node: Vec<f64>,
    /// Average of `per_node`, i.e. uniform placement.
    pub average: f64,
    /// Max-norm residual of the solved system.
    pub residual: f64,
    pub states: usize,
    pub strongly_connected: bool,
}

impl ExactFixation {
    /// Average fixation probability when the first mutant is placed
    /// uniformly on `nodes`.
    pub fn mean_over(&self, nodes: &[usize]) -> f64 {
        nodes.iter().map(|&v| self.per_node[v]).sum::<f64>() / nodes.len() as f64
    }
}

/// One row of the configuration chain, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub stay: BigRational,
    /// Successor configurations (one bit flipped) with their probabilities.
    pub moves: Vec<(ConfigurationIndex, BigRational)>,
}

impl TransitionRow {
    pub fn total(&self) -> BigRational {
        self.moves.iter().fold(self.stay.clone(), |acc, (_, p)| acc + p)
    }
}

pub fn exact_transition_row(
    g: &GraphTopology,
    state: ConfigurationIndex,
    r: &BigRational,
    rule: UpdateRule,
) -> Result<TransitionRow> {
    let n = g.node_count();
    if n > 63 {
        return Err(Error::TooLarge { nodes: n, cap: 63 });
    }
    let full = (1u64 << n) - 1;
    if state & !full != 0 {
        return invalid(format!("configuration {state:#x} has bits beyond {n} nodes"));
    }
    if state == 0 || state == full {
        return Err(Error::AbsorbingState { mutants: state.count_ones() as usize, nodes: n });
    }
    let moves: Vec<_> = flip_probabilities(g, &assignment_of(state, n), r, rule)
        .into_iter()
        .map(|(v, p)| (state ^ 1 << v, p))
        .collect();
    let moved = moves.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p);
    Ok(TransitionRow { stay: BigRational::one() - moved, moves })
}

pub fn exact_fixation(g: &GraphTopology, r: f64, rule: UpdateRule) -> Result<ExactFixation> {
    exact_fixation_with_cap(g, r, rule, DEFAULT_NODE_CAP)
}

pub fn exact_fixation_with_cap(g: &GraphTopology, r: f64, rule: UpdateRule, cap: usize) -> Result<ExactFixation> {
    if !(r > 0.0 && r.is_finite()) {
        return invalid(format!("fitness r must be positive and finite, got {r}"));
    }
    let n = g.node_count();
    if n > cap.min(30) {
        return Err(Error::TooLarge { nodes: n, cap: cap.min(30) });
    }
    let strongly_connected = g.is_strongly_connected();
    let chain = JumpChain::build(g, r, rule);
    let (x, residual) = if chain.states() <= DENSE_STATE_LIMIT { chain.solve_dense()? } else { chain.solve_iterative()? };
    if !(residual < RESIDUAL_GATE) {
        return Err(Error::Solver(format!("residual {residual:e} above {RESIDUAL_GATE:e}")));
    }
    let per_node: Vec<f64> = (0..n).map(|v| x[1 << v]).collect();
    let average = per_node.iter().sum::<f64>() / n as f64;
    Ok(ExactFixation { rule, r, per_node, average, residual, states: chain.states(), strongly_connected })
}

/// Fixation probability from every configuration.
pub fn exact_fixation_all_states(g: &GraphTopology, r: f64, rule: UpdateRule) -> Result<Vec<f64>> {
    if g.node_count() > DEFAULT_NODE_CAP {
        return Err(Error::TooLarge { nodes: g.node_count(), cap: DEFAULT_NODE_CAP });
    }
    let chain = JumpChain::build(g, r, rule);
    let (x, _) = if chain.states() <= DENSE_STATE_LIMIT { chain.solve_dense()? } else { chain.solve_iterative()? };
    Ok(x)
}

/// Embedded jump chain: each transient row normalised by its move mass.
/// Configurations that can never change are pinned to zero.
struct JumpChain {
    nodes: usize,
    rows: Vec<Vec<(u8, f64)>>,
}

impl JumpChain {
    fn build(g: &GraphTopology, r: f64, rule: UpdateRule) -> Self {
        let n = g.node_count();
        let full = (1usize << n) - 1;
        let mut rows = vec![Vec::new(); full + 1];
        for (s, row) in rows.iter_mut().enumerate().take(full).skip(1) {
            let p = flip_probabilities(g, &assignment_of(s as u64, n), &r, rule);
            let mass: f64 = p.iter().map(|(_, x)| x).sum();
            if mass > 0.0 {
                *row = p.into_iter().map(|(v, x)| (v as u8, x / mass)).collect();
            }
        }
        Self { nodes: n, rows }
    }

    fn states(&self) -> usize {
        self.rows.len()
    }

    fn full(&self) -> usize {
        self.rows.len() - 1
    }

    fn boundary(&self, s: usize) -> Option<f64> {
        if s == self.full() {
            Some(1.0)
        } else if self.rows[s].is_empty() {
            Some(0.0)
        } else {
            None
        }
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (s, row) in self.rows.iter().enumerate() {
            let res = match self.boundary(s) {
                Some(b) => x[s] - b,
                None => x[s] - row.iter().map(|&(v, q)| q * x[s ^ 1 << v]).sum::<f64>(),
            };
            worst = worst.max(res.abs());
        }
        worst
    }

    fn solve_dense(&self) -> Result<(Vec<f64>, f64)> {
        let m = self.states();
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (s, row) in self.rows.iter().enumerate() {
            a[(s, s)] = 1.0;
            match self.boundary(s) {
                Some(v) => b[s] = v,
                None => {
                    for &(v, q) in row {
                        a[(s, s ^ 1 << v)] -= q;
                    }
                }
            }
        }
        let lu = a.clone().lu();
        let mut x = lu.solve(&b).ok_or_else(|| Error::Solver("singular absorption system".into()))?;
        // one round of iterative refinement
        let r = &b - &a * &x;
        if let Some(dx) = lu.solve(&r) {
            x += dx;
        }
        let x: Vec<f64> = x.iter().copied().collect();
        let res = self.residual(&x);
        Ok((x, res))
    }

    /// Symmetric Gauss-Seidel sweeps until the residual passes the gate.
    fn solve_iterative(&self) -> Result<(Vec<f64>, f64)> {
        let m = self.states();
        let mut x: Vec<f64> = (0..m).map(|s| s.count_ones() as f64 / self.nodes as f64).collect();
        let relax = |x: &mut Vec<f64>, s: usize| {
            x[s] = match self.boundary(s) {
                Some(b) => b,
                None => self.rows[s].iter().map(|&(v, q)| q * x[s ^ 1 << v]).sum(),
            };
        };
        for sweep in 0..200_000 {
            for s in 0..m {
                relax(&mut x, s);
            }
            for s in (0..m).rev() {
                relax(&mut x, s);
            }
            if sweep % 8 == 7 {
                let res = self.residual(&x);
                if res < RESIDUAL_GATE * 1e-2 {
                    return Ok((x, res));
                }
            }
        }
        let res = self.residual(&x);
        if res < RESIDUAL_GATE {
            Ok((x, res))
        } else {
            Err(Error::Solver(format!("Gauss-Seidel stalled at residual {res:e}")))
        }
    }
}

/// Exact rational solve for very small graphs; used to cross-check the float
/// solvers.
pub fn exact_fixation_rational(g: &GraphTopology, r: f64, rule: UpdateRule) -> Result<Vec<BigRational>> {
    let n = g.node_count();
    if n > 6 {
        return Err(Error::TooLarge { nodes: n, cap: 6 });
    }
    let r = rational_from_f64(r).ok_or_else(|| Error::InvalidParameter("fitness r must be finite".into()))?;
    let m = 1usize << n;
    let full = m - 1;
    // augmented matrix [A | b]
    let mut a = vec![vec![BigRational::zero(); m + 1]; m];
    for s in 0..m {
        a[s][s] = BigRational::one();
        if s == full {
            a[s][m] = BigRational::one();
        } else if s != 0 {
            let row = exact_transition_row(g, s as u64, &r, rule)?;
            let mass = BigRational::one() - &row.stay;
            if mass.is_zero() {
                continue;
            }
            for (t, p) in row.moves {
                a[s][t as usize] = &a[s][t as usize] - p / &mass;
            }
        }
    }
    for col in 0..m {
        let pivot = (col..m).find(|&i| !a[i][col].is_zero()).ok_or_else(|| Error::Solver("singular absorption system".into()))?;
        a.swap(col, pivot);
        let inv = BigRational::one() / &a[col][col];
        for j in col..=m {
            a[col][j] = &a[col][j] * &inv;
        }
        for i in 0..m {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=m {
                    let d = &f * &a[col][j];
                    a[i][j] = &a[i][j] - d;
                }
            }
        }
    }
    Ok((0..n).map(|v| a[1 << v][m].clone()).collect())
}
