//! Validated, immutable weighted downward-closed collections.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

/// A downward-closed family of weighted subsets of `{0, .., n-1}`.
///
/// Weights are kept as natural logarithms. Engines work with the scaled
/// linear weights `exp(log w - log_wmax)`, which lie in `(0, 1]` and are
/// precomputed here.
///
/// Entries are stored in lexicographic order, so entry `0` is always the
/// empty set and every set's lexicographical-tree parent precedes it.
#[derive(Clone, Debug)]
pub struct WeightedCollection {
    n: usize,
    sets: Vec<Subset>,
    log_weights: Vec<f64>,
    scaled: Vec<f64>,
    log_wmax: f64,
    max_card: usize,
    complete_upto_k: bool,
    // Successor links of the lexicographical tree in CSR form: the sons of
    // entry `i` are `sons[son_start[i]..son_start[i + 1]]`, ascending.
    son_start: Vec<u32>,
    sons: Vec<u32>,
}

/// Number of subsets of an `n`-set with at most `k` elements, saturating.
pub fn binomial_prefix_sum(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=k.min(n) {
        total = total.saturating_add(term);
        // C(n, i+1) = C(n, i) * (n - i) / (i + 1), exact in integers.
        term = term.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

impl WeightedCollection {
    /// Validates `entries` and builds the collection.
    ///
    /// The family must be downward closed; missing subsets are reported, not
    /// filled in (see [`WeightedCollection::downward_closure`]).
    pub fn new(n: usize, mut entries: Vec<(Subset, f64)>) -> Result<Self> {
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge { n, limit: MAX_GROUND });
        }
        if entries.is_empty() {
            return Err(Error::EmptyInput("a collection needs at least the empty set"));
        }
        for &(s, lw) in &entries {
            if !s.fits(n) {
                let element = s.max_element().unwrap_or(0);
                return Err(Error::ElementOutOfRange { element, n });
            }
            if !lw.is_finite() {
                return Err(Error::NonFiniteWeight(s));
            }
        }
        if !entries.windows(2).all(|w| w[0].0 < w[1].0) {
            entries.sort_by_key(|e| e.0);
        }
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateSubset(w[0].0));
        }
        let (sets, log_weights): (Vec<Subset>, Vec<f64>) = entries.into_iter().unzip();

        let find = |t: Subset| sets.binary_search(&t).ok();
        for &s in &sets {
            // Largest element first, so the lexicographical-tree parent is checked first.
            for x in s.iter().rev() {
                let t = s.without(x);
                if find(t).is_none() {
                    return Err(Error::NotDownwardClosed { missing: t, of: s });
                }
            }
        }
        if sets[0] != Subset::EMPTY {
            return Err(Error::NotDownwardClosed { missing: Subset::EMPTY, of: sets[0] });
        }

        let m = sets.len();
        let max_card = sets.iter().map(|s| s.len()).max().unwrap_or(0);
        let complete_upto_k = binomial_prefix_sum(n, max_card) == m as u128;
        let log_wmax = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scaled = log_weights.iter().map(|lw| (lw - log_wmax).exp()).collect();

        let mut parent = vec![0u32; m];
        let mut son_count = vec![0u32; m + 1];
        for (i, &s) in sets.iter().enumerate().skip(1) {
            let top = s.max_element().expect("only entry 0 is empty");
            let p = find(s.without(top)).expect("closure checked above");
            parent[i] = p as u32;
            son_count[p] += 1;
        }
        let mut son_start = vec![0u32; m + 1];
        for i in 0..m {
            son_start[i + 1] = son_start[i] + son_count[i];
        }
        let mut fill = son_start.clone();
        let mut sons = vec![0u32; m.saturating_sub(1)];
        for (i, &p) in parent.iter().enumerate().skip(1) {
            let p = p as usize;
            sons[fill[p] as usize] = i as u32;
            fill[p] += 1;
        }

        Ok(WeightedCollection {
            n,
            sets,
            log_weights,
            scaled,
            log_wmax,
            max_card,
            complete_upto_k,
            son_start,
            sons,
        })
    }

    /// Adds every missing subset of every entry with log-weight
    /// `fill_log_weight`, keeping the given weights of the given sets.
    pub fn downward_closure(
        n: usize,
        entries: Vec<(Subset, f64)>,
        fill_log_weight: f64,
    ) -> Result<Self> {
        if !fill_log_weight.is_finite() {
            return Err(Error::NonFiniteFill);
        }
        let mut given: HashMap<Subset, f64> = HashMap::with_capacity(entries.len());
        for &(s, lw) in &entries {
            if given.insert(s, lw).is_some() {
                return Err(Error::DuplicateSubset(s));
            }
        }
        let mut all = given.clone();
        for &(s, _) in &entries {
            if !s.fits(n) {
                // Reported with the proper error by `new`.
                continue;
            }
            for t in s.subsets() {
                all.entry(t).or_insert(fill_log_weight);
            }
        }
        if entries.is_empty() {
            all.insert(Subset::EMPTY, fill_log_weight);
        }
        WeightedCollection::new(n, all.into_iter().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries.
    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn max_card(&self) -> usize {
        self.max_card
    }

    /// True iff the entries are exactly all subsets of size at most `max_card`.
    pub fn complete_upto_k(&self) -> bool {
        self.complete_upto_k
    }

    pub fn log_wmax(&self) -> f64 {
        self.log_wmax
    }

    /// Entries in lexicographic order.
    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Linear weights divided by the maximum weight.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled
    }

    pub fn iter(&self) -> impl Iterator<Item = (Subset, f64)> + '_ {
        self.sets.iter().copied().zip(self.log_weights.iter().copied())
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.sets.binary_search(&s).ok()
    }

    pub fn log_weight(&self, s: Subset) -> Option<f64> {
        self.index_of(s).map(|i| self.log_weights[i])
    }

    /// Lexicographical-tree sons of entry `i`, ascending by added element.
    pub fn sons(&self, i: usize) -> &[u32] {
        &self.sons[self.son_start[i] as usize..self.son_start[i + 1] as usize]
    }

    /// An upper bound on the number of relevant sets (entries contained in
    /// `q`). Exact when the collection is complete up to `max_card`.
    pub fn relevant_count_upper(&self, q: Subset) -> usize {
        let k = q.len();
        let m = self.m();
        if self.complete_upto_k {
            binomial_prefix_sum(k, self.max_card).min(m as u128) as usize
        } else if k >= 64 {
            m
        } else {
            (1u128 << k).min(m as u128) as usize
        }
    }

    /// Same collection with every log-weight shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        WeightedCollection::new(self.n, self.iter().map(|(s, lw)| (s, lw + delta)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;

    fn set(xs: &[usize]) -> Subset {
        Subset::from_elements(xs.iter().copied()).unwrap()
    }

    #[test]
    fn worked_shape() {
        let c = worked_example();
        assert_eq!(c.m(), 11);
        assert_eq!(c.max_card(), 2);
        assert!(c.complete_upto_k());
        assert!((c.log_wmax() - 99f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn minimal_family() {
        let c = WeightedCollection::new(1, vec![(Subset::EMPTY, 0.0)]).unwrap();
        assert_eq!(c.m(), 1);
        assert_eq!(c.max_card(), 0);
        assert!(c.complete_upto_k());
    }

    #[test]
    fn rejects_missing_singleton() {
        let err = WeightedCollection::new(2, vec![(Subset::EMPTY, 0.0), (set(&[0, 1]), 0.0)])
            .unwrap_err();
        match err {
            Error::NotDownwardClosed { missing, .. } => assert_eq!(missing, set(&[0])),
            e => panic!("unexpected {e}"),
        }
        let err = WeightedCollection::new(
            2,
            vec![(Subset::EMPTY, 0.0), (set(&[1]), 0.0), (set(&[0, 1]), 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotDownwardClosed { missing, .. } if missing == set(&[0])));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(WeightedCollection::new(2, vec![]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            WeightedCollection::new(2, vec![(Subset::EMPTY, 0.0), (Subset::EMPTY, 1.0)]),
            Err(Error::DuplicateSubset(_))
        ));
        assert!(matches!(
            WeightedCollection::new(2, vec![(Subset::EMPTY, 0.0), (set(&[2]), 0.0)]),
            Err(Error::ElementOutOfRange { element: 2, n: 2 })
        ));
        assert!(matches!(
            WeightedCollection::new(2, vec![(Subset::EMPTY, f64::NAN)]),
            Err(Error::NonFiniteWeight(_))
        ));
        assert!(matches!(
            WeightedCollection::new(2, vec![(set(&[0]), 0.0)]),
            Err(Error::NotDownwardClosed { .. })
        ));
    }

    #[test]
    fn closure_of_single_pair_is_power_set() {
        let c = WeightedCollection::downward_closure(2, vec![(set(&[0, 1]), 0.0)], -40.0).unwrap();
        assert_eq!(c.m(), 4);
        for s in [Subset::EMPTY, set(&[0]), set(&[1])] {
            assert_eq!(c.log_weight(s), Some(-40.0));
        }
        assert_eq!(c.log_weight(set(&[0, 1])), Some(0.0));
    }

    #[test]
    fn closure_is_idempotent_on_closed_input() {
        let c = worked_example();
        let entries: Vec<_> = c.iter().collect();
        let d = WeightedCollection::downward_closure(4, entries, -7.0).unwrap();
        assert_eq!(c.sets(), d.sets());
        assert_eq!(c.log_weights(), d.log_weights());
    }

    #[test]
    fn closure_rejects_non_finite_fill() {
        let entries = vec![(set(&[0, 1]), 2f64.ln()), (set(&[1, 2]), 3f64.ln())];
        assert!(matches!(
            WeightedCollection::downward_closure(3, entries, f64::NEG_INFINITY),
            Err(Error::NonFiniteFill)
        ));
    }

    #[test]
    fn closure_rejects_duplicates() {
        let entries = vec![(set(&[0]), 0.0), (set(&[0]), 1.0)];
        assert!(matches!(
            WeightedCollection::downward_closure(3, entries, 0.0),
            Err(Error::DuplicateSubset(_))
        ));
    }

    #[test]
    fn relevant_count_upper_cases() {
        let c = worked_example();
        assert_eq!(c.relevant_count_upper(set(&[1, 2, 3])), 7);
        assert_eq!(c.relevant_count_upper(Subset::EMPTY), 1);

        // Closed but not complete: {}, {0}, {1}, {0,1}, {2}; m = 5.
        let entries = vec![
            (Subset::EMPTY, 0.0),
            (set(&[0]), 0.0),
            (set(&[1]), 0.0),
            (set(&[0, 1]), 0.0),
            (set(&[2]), 0.0),
        ];
        let c = WeightedCollection::new(12, entries).unwrap();
        assert!(!c.complete_upto_k());
        assert_eq!(c.relevant_count_upper(Subset::full(10)), 5);
        assert_eq!(c.relevant_count_upper(set(&[0])), 2);
        assert_eq!(c.relevant_count_upper(Subset::EMPTY), 1);
    }

    #[test]
    fn lex_tree_sons() {
        let c = worked_example();
        let names: Vec<Subset> = c.sons(0).iter().map(|&i| c.sets()[i as usize]).collect();
        assert_eq!(names, vec![set(&[0]), set(&[1]), set(&[2]), set(&[3])]);
        let b = c.index_of(set(&[1])).unwrap();
        let names: Vec<Subset> = c.sons(b).iter().map(|&i| c.sets()[i as usize]).collect();
        assert_eq!(names, vec![set(&[1, 2]), set(&[1, 3])]);
        let d = c.index_of(set(&[3])).unwrap();
        assert!(c.sons(d).is_empty());
    }

    #[test]
    fn binomial_sums() {
        assert_eq!(binomial_prefix_sum(20, 3), 1351);
        assert_eq!(binomial_prefix_sum(4, 2), 11);
        assert_eq!(binomial_prefix_sum(3, 5), 8);
        assert_eq!(binomial_prefix_sum(0, 0), 1);
        assert_eq!(binomial_prefix_sum(64, 64), 1u128 << 64);
    }
}
