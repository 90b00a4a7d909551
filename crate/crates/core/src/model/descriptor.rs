use serde::{Deserialize, Serialize};

use super::ItemSet;

/// Serializable description of a utility, stored under `"utility"` in an
/// instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum UtilityDescriptor {
    /// Every subset with one value per support realization, in prior order.
    Table {
        rows: Vec<TableRow>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        minimal_dependency: bool,
    },
    /// Version-space reduction. `labels[h]` is hypothesis `h`'s label
    /// vector over the data points; `weights[h]` its unnormalized weight.
    ActiveLearning {
        labels: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
    /// Independent cascade reach. Edges are `[u, v, p]`.
    Viral {
        nodes: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    /// Stochastic coverage: `items[e]` lists the subsets item `e` may cover.
    Coverage {
        universe: usize,
        items: Vec<Vec<CoverOutcome>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        element_weights: Option<Vec<f64>>,
    },
    /// Unreliable sensors: `weights[s][l]` is the coverage sensor `s` gives
    /// location `l` when working; `failure[s]` its failure probability.
    Sensors {
        weights: Vec<Vec<f64>>,
        failure: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub set: ItemSet,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverOutcome {
    pub covers: Vec<usize>,
    pub prob: f64,
}
