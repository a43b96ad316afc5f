//! Collector algorithms for subset counting queries.
//!
//! Every engine visits sets in some order, adds up the weights of the
//! relevant ones (those contained in the query), and stops as soon as it can
//! certify `(1 - d) W(Q) <= W' <= W(Q)`:
//!
//! * [`exact_count`] walks the lexicographical tree and returns `W(Q)`.
//! * [`sorted_count`] scans the collection by decreasing weight, bounding the
//!   missing mass with suffix sums, and falls back to the exact walk.
//! * [`treedy_count`] runs a best-first search over the greedy tree, keyed by
//!   aggregate potentials.
//! * [`ideal_count`] is an oracle that accumulates the fewest heaviest
//!   relevant sets; its visit count is a lower bound for every collector.
//!
//! All engines compute with the scaled weights of
//! [`WeightedCollection::scaled_weights`] and report `log W'`.

mod exact;
mod ideal;
mod sorted;
mod treedy;

use std::fmt;
use std::str::FromStr;

pub use exact::{exact_count, exact_count_with};
pub use ideal::{ideal_count, ideal_count_with};
pub use sorted::{sorted_count, sorted_count_with, SortedIndex};
pub use treedy::{treedy_count, treedy_count_with, GreedyTree};

use crate::collection::WeightedCollection;
use crate::error::{Error, Result};
use crate::subset::Subset;

/// Relative slack on stopping tests. Ties such as `200 >= 0.8 * 250` must
/// hold despite rounding in the scaled weights.
pub const CERTIFICATE_SLACK: f64 = 1e-12;

/// Outcome of a counting query.
#[derive(Clone, Debug, PartialEq)]
pub struct CountResult {
    /// `log W'`; negative infinity encodes `W' = 0`.
    pub log_total: f64,
    /// Sets examined while answering the query.
    pub visited: usize,
    /// Relevant sets whose weight was added to `W'`.
    pub relevant_accumulated: usize,
    pub switched_to_exact: bool,
    /// `W'` equals `W(Q)` by construction.
    pub is_exact: bool,
    /// Work done before the counted visits. Only [`ideal_count`] reports a
    /// nonzero value: the scan that lists the relevant sets.
    pub preparation_visits: usize,
}

impl CountResult {
    pub(crate) fn from_scaled(sum: f64, log_wmax: f64) -> Self {
        CountResult {
            log_total: scaled_to_log(sum, log_wmax),
            visited: 0,
            relevant_accumulated: 0,
            switched_to_exact: false,
            is_exact: false,
            preparation_visits: 0,
        }
    }
}

pub(crate) fn scaled_to_log(sum: f64, log_wmax: f64) -> f64 {
    if sum > 0.0 {
        sum.ln() + log_wmax
    } else {
        f64::NEG_INFINITY
    }
}

/// `acc >= (1 - d) * total`, up to [`CERTIFICATE_SLACK`].
#[inline]
pub(crate) fn meets(acc: f64, total: f64, d: f64) -> bool {
    acc >= (1.0 - d) * total * (1.0 - CERTIFICATE_SLACK)
}

/// The stopping rule `W' >= (1 - d)(W' + residual)`, where `residual`
/// bounds the relevant mass not yet accumulated.
#[inline]
pub(crate) fn certified(acc: f64, residual: f64, d: f64) -> bool {
    meets(acc, acc + residual, d)
}

pub(crate) fn check_tolerance(d: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&d) {
        Ok(d)
    } else {
        Err(Error::InvalidTolerance(d))
    }
}

/// Observer of an engine run. All methods default to no-ops, and `()` is the
/// disabled probe; engines are generic over it, so a disabled probe compiles
/// away.
pub trait Probe {
    /// `set` was examined for the first time and received visit `number`.
    fn visit(&mut self, _set: Subset, _number: usize, _relevant: bool) {}
    /// The scaled weight of the relevant `set` was added to `W'`.
    fn accumulate(&mut self, _set: Subset, _scaled_weight: f64) {}
    /// Everything accumulated so far was discarded (Sorted switching over to
    /// the exact walk).
    fn restart(&mut self) {}
    /// End of a step: the running `W'` and the engine's upper bound on the
    /// relevant mass not yet accumulated, both scaled.
    fn step(&mut self, _accumulated: f64, _residual: f64) {}
}

impl Probe for () {}

impl<P: Probe + ?Sized> Probe for &mut P {
    fn visit(&mut self, set: Subset, number: usize, relevant: bool) {
        (**self).visit(set, number, relevant)
    }
    fn accumulate(&mut self, set: Subset, scaled_weight: f64) {
        (**self).accumulate(set, scaled_weight)
    }
    fn restart(&mut self) {
        (**self).restart()
    }
    fn step(&mut self, accumulated: f64, residual: f64) {
        (**self).step(accumulated, residual)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Visit {
    pub set: Subset,
    pub number: usize,
    pub relevant: bool,
}

/// A [`Probe`] that records everything.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VisitLog {
    pub visits: Vec<Visit>,
    /// Accumulated sets with scaled weights, cleared on restart.
    pub accumulated: Vec<(Subset, f64)>,
    pub steps: Vec<(f64, f64)>,
    pub restarts: usize,
}

impl VisitLog {
    pub fn visited_sets(&self) -> Vec<Subset> {
        self.visits.iter().map(|v| v.set).collect()
    }

    pub fn accumulated_sets(&self) -> Vec<Subset> {
        self.accumulated.iter().map(|a| a.0).collect()
    }
}

impl Probe for VisitLog {
    fn visit(&mut self, set: Subset, number: usize, relevant: bool) {
        self.visits.push(Visit { set, number, relevant });
    }
    fn accumulate(&mut self, set: Subset, scaled_weight: f64) {
        self.accumulated.push((set, scaled_weight));
    }
    fn restart(&mut self) {
        self.accumulated.clear();
        self.restarts += 1;
    }
    fn step(&mut self, accumulated: f64, residual: f64) {
        self.steps.push((accumulated, residual));
    }
}

/// Which collector answers a query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EngineKind {
    Exact,
    Sorted,
    Treedy,
    Ideal,
}

impl EngineKind {
    pub const ALL: [EngineKind; 4] =
        [EngineKind::Exact, EngineKind::Sorted, EngineKind::Treedy, EngineKind::Ideal];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Exact => "exact",
            EngineKind::Sorted => "sorted",
            EngineKind::Treedy => "treedy",
            EngineKind::Ideal => "ideal",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown engine {s:?} (expected exact, sorted, treedy or ideal)"))
    }
}

/// A collection together with the sorted index and greedy tree built from it.
#[derive(Clone, Debug)]
pub struct IndexedCollection {
    collection: WeightedCollection,
    sorted: SortedIndex,
    tree: GreedyTree,
}

impl IndexedCollection {
    pub fn new(collection: WeightedCollection) -> Self {
        let sorted = SortedIndex::build(&collection);
        let tree = GreedyTree::build(&collection);
        IndexedCollection { collection, sorted, tree }
    }

    pub(crate) fn from_parts(collection: WeightedCollection, sorted: SortedIndex, tree: GreedyTree) -> Self {
        IndexedCollection { collection, sorted, tree }
    }

    pub fn collection(&self) -> &WeightedCollection {
        &self.collection
    }

    pub fn sorted_index(&self) -> &SortedIndex {
        &self.sorted
    }

    pub fn greedy_tree(&self) -> &GreedyTree {
        &self.tree
    }

    pub fn count(&self, kind: EngineKind, q: Subset, d: f64) -> Result<CountResult> {
        self.count_with(kind, q, d, &mut ())
    }

    pub fn count_with<P: Probe>(
        &self,
        kind: EngineKind,
        q: Subset,
        d: f64,
        probe: &mut P,
    ) -> Result<CountResult> {
        match kind {
            EngineKind::Exact => {
                check_tolerance(d)?;
                Ok(exact_count_with(&self.collection, q, probe))
            }
            EngineKind::Sorted => sorted_count_with(&self.sorted, &self.collection, q, d, probe),
            EngineKind::Treedy => treedy_count_with(&self.tree, q, d, probe),
            EngineKind::Ideal => ideal_count_with(&self.collection, q, d, probe),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for k in EngineKind::ALL {
            assert_eq!(k.to_string().parse::<EngineKind>().unwrap(), k);
        }
        assert!("fast".parse::<EngineKind>().is_err());
    }

    #[test]
    fn stopping_rule_ties() {
        // The worked example stops exactly on the boundary.
        assert!(certified(200.0 / 99.0, 50.0 / 99.0, 0.2));
        assert!(!certified(150.0, 100.0, 0.2));
        assert!(certified(0.0, 5.0, 1.0));
        assert!(certified(3.0, 0.0, 0.0));
        assert!(!certified(0.0, 5.0, 0.0));
    }

    #[test]
    fn tolerance_range() {
        assert!(check_tolerance(0.0).is_ok());
        assert!(check_tolerance(1.0).is_ok());
        assert!(check_tolerance(-0.1).is_err());
        assert!(check_tolerance(1.5).is_err());
        assert!(check_tolerance(f64::NAN).is_err());
    }
}
