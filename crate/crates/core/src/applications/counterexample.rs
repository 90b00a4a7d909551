use crate::error::{Error, Result};
use crate::model::{Instance, ItemId, ItemSet, Prior, Realization, State, TableUtility};

/// The three-item instance on which worst-case greedy is arbitrarily bad.
///
/// States `o1`, `o2` are `State(0)`, `State(1)`. The support is
/// `φ1 = (o1, o2, o2)`, `φ2 = (o2, o1, o2)`, `φ3 = (o2, o2, o1)`, uniform.
/// The utility is linear: `e1` always adds `eps`; `e2` and `e3` add 1 in
/// state `o2` and nothing in state `o1`.
pub fn counterexample(eps: f64) -> Result<Instance> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEps(eps));
    }
    let support = vec![
        Realization::from_labels([0, 1, 1]),
        Realization::from_labels([1, 0, 1]),
        Realization::from_labels([1, 1, 0]),
    ];
    let gain = |e: ItemId, phi: &Realization| {
        if e.0 == 0 {
            eps
        } else if phi.state(e) == State(1) {
            1.0
        } else {
            0.0
        }
    };
    let rows = ItemSet::full(3).subsets().map(|s| {
        let values = support
            .iter()
            .map(|phi| s.iter().map(|e| gain(e, phi)).sum())
            .collect();
        (s, values)
    });
    let table = TableUtility::new(3, 3, rows, true)?;
    Instance::from_model(2, Prior::uniform(support)?, table)
}
