use super::{check_tolerance, meets, CountResult, Probe};
use crate::collection::WeightedCollection;
use crate::error::Result;
use crate::subset::Subset;

/// The idealized collector: the fewest heaviest relevant sets whose total
/// reaches `(1 - d) W(Q)`.
///
/// This is an oracle. The relevant sets are listed by scanning the whole
/// collection, which is reported as `preparation_visits`; `visited` counts
/// only the accumulated sets.
pub fn ideal_count(c: &WeightedCollection, q: Subset, d: f64) -> Result<CountResult> {
    ideal_count_with(c, q, d, &mut ())
}

pub fn ideal_count_with<P: Probe>(
    c: &WeightedCollection,
    q: Subset,
    d: f64,
    probe: &mut P,
) -> Result<CountResult> {
    let d = check_tolerance(d)?;
    let lw = c.log_weights();
    let w = c.scaled_weights();
    let mut relevant: Vec<usize> = (0..c.m()).filter(|&i| c.sets()[i].is_subset_of(q)).collect();
    relevant.sort_by(|&a, &b| lw[b].total_cmp(&lw[a]));
    let total: f64 = relevant.iter().map(|&i| w[i]).sum();

    let mut acc = 0.0;
    let mut r = 0;
    for &i in &relevant {
        if meets(acc, total, d) {
            break;
        }
        acc += w[i];
        r += 1;
        probe.visit(c.sets()[i], r, true);
        probe.accumulate(c.sets()[i], w[i]);
    }
    probe.step(acc, total - acc);

    Ok(CountResult {
        visited: r,
        relevant_accumulated: r,
        is_exact: r == relevant.len(),
        preparation_visits: c.m(),
        ..CountResult::from_scaled(acc, c.log_wmax())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::VisitLog;
    use crate::fixtures::{lettered, letters, worked_example};

    #[test]
    fn worked_accumulates_three_heaviest() {
        let c = worked_example();
        let mut log = VisitLog::default();
        let r = ideal_count_with(&c, lettered("BCD"), 0.2, &mut log).unwrap();
        let sets: Vec<String> = log.accumulated_sets().into_iter().map(letters).collect();
        assert_eq!(sets, ["∅", "B", "D"]);
        assert_eq!(r.visited, 3);
        assert_eq!(r.preparation_visits, 11);
        assert!((r.log_total - 200f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_tolerance_takes_everything() {
        let r = ideal_count(&worked_example(), lettered("BCD"), 0.0).unwrap();
        assert_eq!(r.visited, 7);
        assert!(r.is_exact);
        assert!((r.log_total - 250f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn full_tolerance_takes_nothing() {
        let r = ideal_count(&worked_example(), lettered("BCD"), 1.0).unwrap();
        assert_eq!(r.visited, 0);
        assert_eq!(r.log_total, f64::NEG_INFINITY);
    }
}
