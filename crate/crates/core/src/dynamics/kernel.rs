//! Exact one-step flip probabilities. Shared by the absorbing-chain oracle,
//! the event-driven simulator's tests and the reference stepper.

use crate::scalar::Scalar;
use crate::topology::GraphTopology;

use super::UpdateRule;

/// Probability that each node changes type in the next step, given the
/// current assignment. Only nodes with positive probability are listed, in
/// increasing node order. The remaining mass is the probability that the
/// step leaves the configuration unchanged.
pub fn flip_probabilities<T: Scalar>(
    g: &GraphTopology,
    is_mutant: &[bool],
    r: &T,
    rule: UpdateRule,
) -> Vec<(usize, T)> {
    let n = g.node_count();
    debug_assert_eq!(is_mutant.len(), n);
    let one = T::one();
    let fit = |v: usize| if is_mutant[v] { r.clone() } else { one.clone() };
    let n_t = T::from_usize(n);
    let mut p = vec![T::zero(); n];

    match rule {
        UpdateRule::Bd => {
            let total = (0..n).fold(T::zero(), |acc, v| acc + fit(v));
            for u in 0..n {
                let fu = fit(u);
                for (v, w) in g.out_edges(u) {
                    if is_mutant[*v] != is_mutant[u] {
                        let inc = fu.clone() * T::from_weight(w) / total.clone();
                        p[*v] = p[*v].clone() + inc;
                    }
                }
            }
        }
        UpdateRule::bD => {
            for u in 0..n {
                let edges = g.out_edges(u);
                let denom = edges
                    .iter()
                    .fold(T::zero(), |acc, (v, w)| acc + T::from_weight(w) / fit(*v));
                if denom == T::zero() {
                    continue;
                }
                for (v, w) in edges {
                    if is_mutant[*v] != is_mutant[u] {
                        let inc = T::from_weight(w) / fit(*v) / denom.clone() / n_t.clone();
                        p[*v] = p[*v].clone() + inc;
                    }
                }
            }
        }
        UpdateRule::dB => {
            for (v, slot) in p.iter_mut().enumerate() {
                let (mut opp, mut all) = (T::zero(), T::zero());
                for (u, w) in g.in_edges(v) {
                    let term = fit(*u) * T::from_weight(w);
                    if is_mutant[*u] != is_mutant[v] {
                        opp = opp + term.clone();
                    }
                    all = all + term;
                }
                if all != T::zero() {
                    *slot = opp / all / n_t.clone();
                }
            }
        }
        UpdateRule::Db => {
            let inv_total = (0..n).fold(T::zero(), |acc, v| acc + one.clone() / fit(v));
            for (v, slot) in p.iter_mut().enumerate() {
                let (mut opp, mut all) = (T::zero(), T::zero());
                for (u, w) in g.in_edges(v) {
                    let w = T::from_weight(w);
                    if is_mutant[*u] != is_mutant[v] {
                        opp = opp + w.clone();
                    }
                    all = all + w;
                }
                if all != T::zero() {
                    *slot = one.clone() / fit(v) / inv_total.clone() * opp / all;
                }
            }
        }
    }

    p.into_iter()
        .enumerate()
        .filter(|(_, x)| *x > T::zero())
        .collect()
}
