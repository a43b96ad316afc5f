use super::{CountResult, Probe};
use crate::collection::WeightedCollection;
use crate::subset::Subset;

/// `W(Q)` by a depth-first walk of the lexicographical tree.
///
/// Each set is linked to its sons `S ∪ {x}`; a son is examined (and counted
/// as a visit) by testing `x ∈ Q`, and the subtree below an irrelevant son is
/// skipped.
pub fn exact_count(c: &WeightedCollection, q: Subset) -> CountResult {
    exact_count_with(c, q, &mut ())
}

pub fn exact_count_with<P: Probe>(c: &WeightedCollection, q: Subset, probe: &mut P) -> CountResult {
    walk(c, q, probe, 0)
}

/// The walk itself; visit numbers start after `offset`.
pub(super) fn walk<P: Probe>(
    c: &WeightedCollection,
    q: Subset,
    probe: &mut P,
    offset: usize,
) -> CountResult {
    let sets = c.sets();
    let w = c.scaled_weights();

    let mut visited = 1;
    let mut relevant = 1;
    probe.visit(sets[0], offset + visited, true);
    let mut sum = w[0];
    probe.accumulate(sets[0], w[0]);

    // (node, position of the next son to examine)
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some(top) = stack.last_mut() {
        let sons = c.sons(top.0);
        if top.1 == sons.len() {
            stack.pop();
            continue;
        }
        let son = sons[top.1] as usize;
        top.1 += 1;
        visited += 1;
        let is_relevant = sets[son].is_subset_of(q);
        probe.visit(sets[son], offset + visited, is_relevant);
        if is_relevant {
            relevant += 1;
            sum += w[son];
            probe.accumulate(sets[son], w[son]);
            stack.push((son, 0));
        }
    }

    CountResult {
        visited,
        relevant_accumulated: relevant,
        is_exact: true,
        ..CountResult::from_scaled(sum, c.log_wmax())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::VisitLog;
    use crate::fixtures::{lettered, letters, worked_example};

    #[test]
    fn worked_visit_order() {
        let c = worked_example();
        let mut log = VisitLog::default();
        let r = exact_count_with(&c, lettered("BCD"), &mut log);
        let order: Vec<String> = log.visited_sets().into_iter().map(letters).collect();
        assert_eq!(order, ["∅", "A", "B", "BC", "BD", "C", "CD", "D"]);
        assert_eq!(r.visited, 8);
        assert_eq!(r.relevant_accumulated, 7);
        assert!(r.is_exact);
        assert!((r.log_total - 250f64.ln()).abs() < 1e-12);
        let numbers: Vec<usize> = log.visits.iter().map(|v| v.number).collect();
        assert_eq!(numbers, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn empty_query_tests_every_son_of_root() {
        let c = worked_example();
        let r = exact_count(&c, Subset::EMPTY);
        assert_eq!(r.visited, 5);
        assert_eq!(r.relevant_accumulated, 1);
        assert!((r.log_total - 80f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn full_query_sums_everything() {
        let c = worked_example();
        let r = exact_count(&c, Subset::full(4));
        assert_eq!(r.visited, 11);
        assert!((r.log_total - 584f64.ln()).abs() < 1e-12);
    }
}
