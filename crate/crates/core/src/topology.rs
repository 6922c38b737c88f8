//! Graph families the Moran process runs on.
//!
//! Every node has weighted out-degree exactly one, with weights stored as
//! exact fractions. Node ids are dense; superstars use the layout
//! `root = 0`, then reservoirs branch-major, then stems branch-major.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum NodeRole {
    Root,
    Reservoir { branch: usize },
    /// `position` runs from 1 (fed by the reservoir) to H (feeds the root).
    Stem { branch: usize, position: usize },
    Plain,
}

/// Shape parameters of a superstar: `B` branches, each with `L` reservoir
/// nodes feeding a directed stem of `H` nodes into a shared root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperstarSpec {
    pub branches: usize,
    pub reservoir: usize,
    pub stem: usize,
}

impl SuperstarSpec {
    pub fn new(branches: usize, reservoir: usize, stem: usize) -> Result<Self> {
        if branches < 1 {
            return Err(Error::InvalidParameter("superstar needs B >= 1".into()));
        }
        if reservoir < 1 {
            return Err(Error::InvalidParameter("superstar needs L >= 1".into()));
        }
        if stem < 2 {
            return Err(Error::InvalidParameter(
                "superstar needs H >= 2 (use GraphTopology::from_edges for shorter stems)".into(),
            ));
        }
        Ok(Self { branches, reservoir, stem })
    }

    /// N = B(L+H)+1.
    pub fn node_count(&self) -> usize {
        self.branches * (self.reservoir + self.stem) + 1
    }

    /// Moves between any two reservoir nodes, H+2.
    pub fn k(&self) -> usize {
        self.stem + 2
    }

    pub fn reservoir_total(&self) -> usize {
        self.branches * self.reservoir
    }

    pub const ROOT: usize = 0;

    pub fn reservoir_node(&self, branch: usize, j: usize) -> usize {
        debug_assert!(branch < self.branches && j < self.reservoir);
        1 + branch * self.reservoir + j
    }

    /// Stem node at `position` in 1..=H.
    pub fn stem_node(&self, branch: usize, position: usize) -> usize {
        debug_assert!(branch < self.branches && (1..=self.stem).contains(&position));
        1 + self.reservoir_total() + branch * self.stem + (position - 1)
    }
}

/// Named non-superstar families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Complete,
    DirectedCycle,
    Star,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" => Ok(Self::Complete),
            "cycle" | "directed_cycle" => Ok(Self::DirectedCycle),
            "star" => Ok(Self::Star),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Complete => "complete",
            Self::DirectedCycle => "directed_cycle",
            Self::Star => "star",
        })
    }
}

/// Weighted directed graph with node roles. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTopology {
    out_edges: Vec<Vec<(usize, Weight)>>,
    in_edges: Vec<Vec<(usize, Weight)>>,
    roles: Vec<NodeRole>,
    superstar: Option<SuperstarSpec>,
}

impl GraphTopology {
    /// Raw constructor for user-supplied graphs. Checks that targets are in
    /// range, weights lie in (0, 1] and every node's out-weights sum to one.
    /// Self-loops are accepted here even though no builder produces them.
    pub fn from_edges(
        node_count: usize,
        edges: &[(usize, usize, Weight)],
        roles: Option<Vec<NodeRole>>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let roles = roles.unwrap_or_else(|| vec![NodeRole::Plain; node_count]);
        if roles.len() != node_count {
            return Err(Error::InvalidGraph(format!(
                "{} roles for {} nodes",
                roles.len(),
                node_count
            )));
        }
        let mut out_edges = vec![Vec::new(); node_count];
        for &(src, dst, w) in edges {
            if src >= node_count || dst >= node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} out of range for N = {node_count}"
                )));
            }
            if w.is_zero() || w > Weight::one() {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} has weight {w} outside (0, 1]"
                )));
            }
            out_edges[src].push((dst, w));
        }
        for (node, edges) in out_edges.iter().enumerate() {
            let total = edges.iter().fold(BigRational::zero(), |acc, (_, w)| acc + big(w));
            if !total.is_one() {
                return Err(Error::InvalidGraph(format!(
                    "node {node} has out-weight {total}, expected 1"
                )));
            }
        }
        Ok(Self::assemble(out_edges, roles, None))
    }

    fn assemble(
        out_edges: Vec<Vec<(usize, Weight)>>,
        roles: Vec<NodeRole>,
        superstar: Option<SuperstarSpec>,
    ) -> Self {
        let mut in_edges = vec![Vec::new(); out_edges.len()];
        for (src, edges) in out_edges.iter().enumerate() {
            for &(dst, w) in edges {
                in_edges[dst].push((src, w));
            }
        }
        Self { out_edges, in_edges, roles, superstar }
    }

    pub fn node_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn out_edges(&self, node: usize) -> &[(usize, Weight)] {
        &self.out_edges[node]
    }

    pub fn in_edges(&self, node: usize) -> &[(usize, Weight)] {
        &self.in_edges[node]
    }

    pub fn role(&self, node: usize) -> NodeRole {
        self.roles[node]
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    /// Superstar parameters when the graph came from [`build_superstar`].
    pub fn superstar(&self) -> Option<&SuperstarSpec> {
        self.superstar.as_ref()
    }

    pub fn reservoir_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| matches!(self.roles[v], NodeRole::Reservoir { .. }))
            .collect()
    }

    pub fn is_reservoir(&self, node: usize) -> bool {
        matches!(self.roles[node], NodeRole::Reservoir { .. })
    }

    /// Exact weighted in-degree of `node`.
    pub fn in_weight(&self, node: usize) -> BigRational {
        self.in_edges[node].iter().fold(BigRational::zero(), |acc, (_, w)| acc + big(w))
    }

    /// True iff every node's weighted in-degree equals its weighted out-degree.
    pub fn is_circulation(&self) -> bool {
        (0..self.node_count()).all(|v| {
            let out = self.out_edges[v].iter().fold(BigRational::zero(), |acc, (_, w)| acc + big(w));
            self.in_weight(v) == out
        })
    }

    /// Forward and backward reachability from node 0.
    pub fn is_strongly_connected(&self) -> bool {
        let reach = |adj: &Vec<Vec<(usize, Weight)>>| {
            let mut seen = vec![false; adj.len()];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&self.out_edges) && reach(&self.in_edges)
    }

    pub fn to_document(&self) -> GraphDocument {
        let edges = self
            .out_edges
            .iter()
            .enumerate()
            .flat_map(|(src, es)| {
                es.iter().map(move |&(dst, w)| {
                    (src, dst, format!("{}/{}", w.numer(), w.denom()))
                })
            })
            .collect();
        GraphDocument { n: self.node_count(), roles: self.roles.clone(), edges }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.into_graph()
    }
}

/// Serialized graph: `{"n": N, "roles": [...], "edges": [[src, dst, "p/q"], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    #[serde(default)]
    pub roles: Vec<NodeRole>,
    pub edges: Vec<(usize, usize, String)>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<GraphTopology> {
        let edges = self
            .edges
            .iter()
            .map(|(s, d, w)| Ok((*s, *d, parse_weight(w)?)))
            .collect::<Result<Vec<_>>>()?;
        let roles = if self.roles.is_empty() { None } else { Some(self.roles) };
        GraphTopology::from_edges(self.n, &edges, roles)
    }
}

fn parse_weight(text: &str) -> Result<Weight> {
    let bad = || Error::Format(format!("weight `{text}` is not a fraction p/q"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text.trim(), "1"),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(Weight::new(p, q))
}

fn big(w: &Weight) -> BigRational {
    BigRational::new(BigInt::from(*w.numer()), BigInt::from(*w.denom()))
}

/// Superstar with the fixed node layout described in the module docs.
pub fn build_superstar(spec: SuperstarSpec) -> Result<GraphTopology> {
    let spec = SuperstarSpec::new(spec.branches, spec.reservoir, spec.stem)?;
    let n = spec.node_count();
    let mut out_edges = vec![Vec::new(); n];
    let mut roles = vec![NodeRole::Plain; n];
    roles[SuperstarSpec::ROOT] = NodeRole::Root;

    let fan_out = spec.reservoir_total() as u64;
    let root_w = Weight::new(1, fan_out);
    for b in 0..spec.branches {
        for j in 0..spec.reservoir {
            let v = spec.reservoir_node(b, j);
            roles[v] = NodeRole::Reservoir { branch: b };
            out_edges[SuperstarSpec::ROOT].push((v, root_w));
            out_edges[v].push((spec.stem_node(b, 1), Weight::one()));
        }
        for i in 1..=spec.stem {
            let v = spec.stem_node(b, i);
            roles[v] = NodeRole::Stem { branch: b, position: i };
            let next = if i == spec.stem { SuperstarSpec::ROOT } else { spec.stem_node(b, i + 1) };
            out_edges[v].push((next, Weight::one()));
        }
    }
    Ok(GraphTopology::assemble(out_edges, roles, Some(spec)))
}

/// Complete graph, directed cycle or star on `size` nodes.
pub fn build_family(kind: FamilyKind, size: usize) -> Result<GraphTopology> {
    if size < 2 {
        return Err(Error::InvalidParameter(format!("{kind} needs at least 2 nodes, got {size}")));
    }
    let n = size;
    let mut out_edges = vec![Vec::new(); n];
    match kind {
        FamilyKind::Complete => {
            let w = Weight::new(1, (n - 1) as u64);
            for (u, edges) in out_edges.iter_mut().enumerate() {
                edges.extend((0..n).filter(|&v| v != u).map(|v| (v, w)));
            }
        }
        FamilyKind::DirectedCycle => {
            for (u, edges) in out_edges.iter_mut().enumerate() {
                edges.push(((u + 1) % n, Weight::one()));
            }
        }
        FamilyKind::Star => {
            let w = Weight::new(1, (n - 1) as u64);
            for leaf in 1..n {
                out_edges[0].push((leaf, w));
                out_edges[leaf].push((0, Weight::one()));
            }
        }
    }
    Ok(GraphTopology::assemble(out_edges, vec![NodeRole::Plain; n], None))
}
