//! Reference computations of `W(Q)`: a linear scan and the fast zeta transform.
//!
//! Both are independent of the query engines and serve as their oracles.

use crate::collection::WeightedCollection;
use crate::error::{Error, Result};
use crate::subset::Subset;

/// Largest ground set accepted by [`zeta_all`].
pub const ZETA_MAX_GROUND: usize = 24;

/// `log W(Q)` by visiting every entry of the collection.
pub fn brute_force_weight(c: &WeightedCollection, q: Subset) -> f64 {
    let total: f64 = c
        .sets()
        .iter()
        .zip(c.scaled_weights())
        .filter(|(s, _)| s.is_subset_of(q))
        .map(|(_, w)| w)
        .sum();
    total.ln() + c.log_wmax()
}

/// Number of entries contained in `q`, by enumeration.
pub fn relevant_count(c: &WeightedCollection, q: Subset) -> usize {
    c.sets().iter().filter(|s| s.is_subset_of(q)).count()
}

/// `log W(Q)` for every `Q`, indexed by the membership mask of `Q`.
///
/// Runs the zeta transform over all `2^n` subsets in `n * 2^n` additions on
/// the scaled linear weights.
pub fn zeta_all(c: &WeightedCollection) -> Result<Vec<f64>> {
    let n = c.n();
    if n > ZETA_MAX_GROUND {
        return Err(Error::GroundSetTooLarge { n, limit: ZETA_MAX_GROUND });
    }
    let size = 1usize << n;
    let mut table = vec![0.0f64; size];
    for (s, &w) in c.sets().iter().zip(c.scaled_weights()) {
        table[s.mask() as usize] = w;
    }
    for bit in 0..n {
        let step = 1usize << bit;
        for mask in 0..size {
            if mask & step != 0 {
                table[mask] += table[mask ^ step];
            }
        }
    }
    let offset = c.log_wmax();
    Ok(table.into_iter().map(|w| w.ln() + offset).collect())
}
