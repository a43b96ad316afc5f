use super::{certified, check_tolerance, exact, CountResult, Probe};
use crate::collection::WeightedCollection;
use crate::error::Result;
use crate::subset::Subset;

/// The collection sorted by decreasing weight, with suffix sums.
///
/// Position `i` (1-based) holds `S_i`; `suffix(i)` is the total scaled weight
/// of `S_{i+1}, .., S_m`, so `suffix(0)` is the total and `suffix(m) = 0`.
/// Equal weights are ordered lexicographically.
#[derive(Clone, Debug)]
pub struct SortedIndex {
    sets: Vec<Subset>,
    weights: Vec<f64>,
    suffix: Vec<f64>,
}

impl SortedIndex {
    pub fn build(c: &WeightedCollection) -> Self {
        let lw = c.log_weights();
        let mut order: Vec<usize> = (0..c.m()).collect();
        // Entries are already lexicographic, so a stable sort keeps the tie rule.
        order.sort_by(|&a, &b| lw[b].total_cmp(&lw[a]));
        let sets: Vec<Subset> = order.iter().map(|&i| c.sets()[i]).collect();
        let weights: Vec<f64> = order.iter().map(|&i| c.scaled_weights()[i]).collect();
        // Summed from the lightest end, which keeps small suffixes accurate.
        let mut suffix = vec![0.0; weights.len() + 1];
        for i in (0..weights.len()).rev() {
            suffix[i] = suffix[i + 1] + weights[i];
        }
        SortedIndex { sets, weights, suffix }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Sets in decreasing weight order.
    pub fn order(&self) -> &[Subset] {
        &self.sets
    }

    /// Scaled weights aligned with [`SortedIndex::order`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn suffix(&self, i: usize) -> f64 {
        self.suffix[i]
    }

    pub fn suffix_sums(&self) -> &[f64] {
        &self.suffix
    }
}

/// Approximate `W(Q)` by scanning the heaviest sets first.
///
/// `t` starts at an upper bound on the number of relevant sets and counts
/// down as relevant sets are found; the `t` entries after the current
/// position outweigh whatever relevant mass is still missing. Each step
/// accumulates, then tries to stop, then switches over to the exact walk once
/// as many sets have been scanned as there may be relevant ones.
pub fn sorted_count(
    idx: &SortedIndex,
    c: &WeightedCollection,
    q: Subset,
    d: f64,
) -> Result<CountResult> {
    sorted_count_with(idx, c, q, d, &mut ())
}

pub fn sorted_count_with<P: Probe>(
    idx: &SortedIndex,
    c: &WeightedCollection,
    q: Subset,
    d: f64,
    probe: &mut P,
) -> Result<CountResult> {
    let d = check_tolerance(d)?;
    let m = idx.len();
    let upper = c.relevant_count_upper(q);
    let residual = |j: usize, t: usize| idx.suffix[j] - idx.suffix[(j + t).min(m)];

    let mut t = upper;
    let mut acc = 0.0;
    let mut accumulated = 0;

    let r0 = residual(0, t);
    probe.step(0.0, r0);
    if certified(0.0, r0, d) {
        return Ok(CountResult::from_scaled(0.0, c.log_wmax()));
    }

    let mut j = 0;
    loop {
        j += 1;
        let s = idx.sets[j - 1];
        let relevant = s.is_subset_of(q);
        probe.visit(s, j, relevant);
        if relevant {
            acc += idx.weights[j - 1];
            accumulated += 1;
            t = t.saturating_sub(1);
            probe.accumulate(s, idx.weights[j - 1]);
        }
        let r = residual(j, t);
        probe.step(acc, r);
        if certified(acc, r, d) {
            return Ok(CountResult {
                visited: j,
                relevant_accumulated: accumulated,
                is_exact: t == 0 && c.complete_upto_k(),
                ..CountResult::from_scaled(acc, c.log_wmax())
            });
        }
        if j >= upper {
            probe.restart();
            let ex = exact::walk(c, q, probe, j);
            return Ok(CountResult {
                visited: j + ex.visited,
                switched_to_exact: true,
                ..ex
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::VisitLog;
    use crate::fixtures::{lettered, letters, worked_example};

    #[test]
    fn worked_order_and_suffix() {
        let c = worked_example();
        let idx = SortedIndex::build(&c);
        let order: Vec<String> = idx.order().iter().map(|&s| letters(s)).collect();
        assert_eq!(order, ["AB", "AD", "A", "∅", "B", "AC", "D", "BD", "C", "CD", "BC"]);
        let s = idx.suffix_sums();
        assert!((s[0] * 99.0 - 584.0).abs() < 1e-9);
        assert_eq!(s[11], 0.0);
        assert!((s[7] * 99.0 - 50.0).abs() < 1e-9);
        for i in 1..=11 {
            assert!((s[i - 1] - s[i] - idx.weights()[i - 1]).abs() < 1e-15);
        }
    }

    #[test]
    fn single_entry_index() {
        let c = WeightedCollection::new(3, vec![(Subset::EMPTY, 1.7)]).unwrap();
        let idx = SortedIndex::build(&c);
        assert_eq!(idx.order(), &[Subset::EMPTY]);
        assert_eq!(idx.suffix_sums(), &[1.0, 0.0]);
    }

    #[test]
    fn equal_weights_tie_lexicographically() {
        let entries = vec![
            (Subset::EMPTY, 0.0),
            (Subset::singleton(1), 2.0),
            (Subset::singleton(0), 2.0),
        ];
        let c = WeightedCollection::new(2, entries).unwrap();
        let idx = SortedIndex::build(&c);
        assert_eq!(idx.order()[..2], [Subset::singleton(0), Subset::singleton(1)]);
    }

    #[test]
    fn worked_stops_without_switching() {
        let c = worked_example();
        let idx = SortedIndex::build(&c);
        let mut log = VisitLog::default();
        let r = sorted_count_with(&idx, &c, lettered("BCD"), 0.2, &mut log).unwrap();
        let order: Vec<String> = log.visited_sets().into_iter().map(letters).collect();
        assert_eq!(order, ["AB", "AD", "A", "∅", "B", "AC", "D"]);
        assert_eq!(r.visited, 7);
        assert_eq!(r.relevant_accumulated, 3);
        assert!(!r.switched_to_exact);
        assert!((r.log_total - 200f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_tolerance_switches_to_exact() {
        let c = worked_example();
        let idx = SortedIndex::build(&c);
        let mut log = VisitLog::default();
        let r = sorted_count_with(&idx, &c, lettered("BCD"), 0.0, &mut log).unwrap();
        assert!(r.switched_to_exact);
        assert!(r.is_exact);
        assert_eq!(r.visited, 7 + 8);
        assert_eq!(log.restarts, 1);
        assert_eq!(log.accumulated.len(), 7);
        assert!((r.log_total - 250f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn full_tolerance_returns_zero() {
        let c = worked_example();
        let idx = SortedIndex::build(&c);
        let r = sorted_count(&idx, &c, lettered("BCD"), 1.0).unwrap();
        assert_eq!(r.log_total, f64::NEG_INFINITY);
        assert_eq!(r.visited, 0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let c = worked_example();
        let idx = SortedIndex::build(&c);
        assert!(sorted_count(&idx, &c, Subset::EMPTY, 1.01).is_err());
        assert!(sorted_count(&idx, &c, Subset::EMPTY, -0.5).is_err());
    }
}
