use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{
    Instance, ItemSet, Prior, Realization, RealizationRef, UtilityDescriptor, UtilityModel,
    MAX_ITEMS,
};

/// A social network with independent-cascade edge probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionGraph {
    nodes: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl DiffusionGraph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if nodes == 0 || nodes > MAX_ITEMS {
            return Err(Error::InvalidInstance(format!(
                "graph must have 1..={MAX_ITEMS} nodes, got {nodes}"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &(u, v, p) in &edges {
            if u >= nodes || v >= nodes {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) leaves the graph")));
            }
            if u == v {
                return Err(Error::InvalidInstance(format!("self-loop on node {u}")));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {v}) has probability {p} outside [0, 1]"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidInstance(format!("edge ({u}, {v}) listed twice")));
            }
        }
        Ok(DiffusionGraph { nodes, edges })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Edges whose status is actually random.
    pub fn uncertain_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.2 > 0.0 && e.2 < 1.0)
            .count()
    }
}

/// A random digraph: each ordered pair is an edge with probability
/// `density`, its propagation probability drawn from `probs`.
pub fn random_graph<R: Rng>(
    rng: &mut R,
    nodes: usize,
    density: f64,
    probs: &[f64],
    max_uncertain: usize,
) -> Result<DiffusionGraph> {
    let mut edges = Vec::new();
    let mut uncertain = 0;
    for u in 0..nodes {
        for v in 0..nodes {
            if u == v || rng.gen::<f64>() >= density {
                continue;
            }
            let p = probs[rng.gen_range(0..probs.len())];
            if p > 0.0 && p < 1.0 {
                if uncertain == max_uncertain {
                    continue;
                }
                uncertain += 1;
            }
            edges.push((u, v, p));
        }
    }
    DiffusionGraph::new(nodes, edges)
}

/// `f(S, φ)`: number of nodes reachable from `S` through live edges, each
/// node of `S` counted once.
#[derive(Clone, Debug)]
pub struct ViralUtility {
    graph: DiffusionGraph,
    /// `reach[i][u]`: nodes reachable from `u` in realization `i`.
    reach: Vec<Vec<u64>>,
}

impl UtilityModel for ViralUtility {
    fn value(&self, set: ItemSet, phi: RealizationRef<'_>) -> f64 {
        let reach = &self.reach[phi.index];
        set.iter()
            .fold(0u64, |acc, u| acc | reach[u.0])
            .count_ones() as f64
    }

    fn claims_minimal_dependency(&self) -> bool {
        true
    }

    fn descriptor(&self) -> Option<UtilityDescriptor> {
        Some(UtilityDescriptor::Viral {
            nodes: self.graph.nodes,
            edges: self.graph.edges.clone(),
        })
    }
}

fn reachable(nodes: usize, out: &[u64], start: usize) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= out[u];
        }
        frontier = next & !seen;
        seen |= next;
    }
    debug_assert!(nodes == 64 || seen >> nodes == 0);
    seen
}

/// One realization per live/blocked assignment of the uncertain edges.
/// A node's state is its full-adoption feedback: the status of every edge
/// leaving a node it reaches through live edges.
pub fn build_viral_marketing(g: &DiffusionGraph, support_cap: usize) -> Result<Instance> {
    let m = g.uncertain_edges();
    let size = 1u128.checked_shl(m as u32).unwrap_or(u128::MAX);
    if size > support_cap as u128 {
        return Err(Error::SupportTooLarge {
            size,
            cap: support_cap,
        });
    }
    let uncertain: Vec<usize> = (0..g.edges.len())
        .filter(|&i| g.edges[i].2 > 0.0 && g.edges[i].2 < 1.0)
        .collect();
    let n = g.nodes;
    let mut labels: Vec<HashMap<Vec<(usize, bool)>, usize>> = vec![HashMap::new(); n];
    let mut support = Vec::with_capacity(size as usize);
    let mut reach_table = Vec::with_capacity(size as usize);
    for mask in 0..(size as u64) {
        let mut live = vec![false; g.edges.len()];
        let mut prob = 1.0;
        for (i, &(_, _, p)) in g.edges.iter().enumerate() {
            live[i] = p >= 1.0;
        }
        for (bit, &i) in uncertain.iter().enumerate() {
            let p = g.edges[i].2;
            if mask >> bit & 1 == 1 {
                live[i] = true;
                prob *= p;
            } else {
                prob *= 1.0 - p;
            }
        }
        let mut out = vec![0u64; n];
        for (i, &(u, v, _)) in g.edges.iter().enumerate() {
            if live[i] {
                out[u] |= 1u64 << v;
            }
        }
        let reach: Vec<u64> = (0..n).map(|u| reachable(n, &out, u)).collect();
        let states = (0..n)
            .map(|u| {
                let feedback: Vec<(usize, bool)> = g
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(w, _, _))| reach[u] >> w & 1 == 1)
                    .map(|(i, _)| (i, live[i]))
                    .collect();
                let next = labels[u].len();
                *labels[u].entry(feedback).or_insert(next)
            })
            .collect::<Vec<_>>();
        support.push((Realization::from_labels(states), prob));
        reach_table.push(reach);
    }
    let num_states = labels.iter().map(|l| l.len()).max().unwrap_or(1).max(1);
    let prior = Prior::new(support)?;
    Instance::from_model(
        num_states,
        prior,
        ViralUtility {
            graph: g.clone(),
            reach: reach_table,
        },
    )
}
