// Drawing subsets of a query in proportion to their weights, and how far
// an approximate collector's distribution drifts from the exact one.

use std::collections::BTreeMap;

use subsetq::fixtures::{lettered, letters, worked_example};
use subsetq::sampling::{collect_trace, sample_many, tv_distance};
use subsetq::{EngineKind, IndexedCollection};

pub fn run_example() -> subsetq::Result<()> {
    let idx = IndexedCollection::new(worked_example());
    let q = lettered("BCD");

    let exact = collect_trace(&idx, EngineKind::Exact, q, 0.0)?;
    for d in [0.0, 0.2, 0.5] {
        let trace = collect_trace(&idx, EngineKind::Treedy, q, d)?;
        let tv = tv_distance(&trace.distribution(), &exact.distribution())?;
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for s in sample_many(&trace, 10_000, 1) {
            *counts.entry(letters(s)).or_default() += 1;
        }
        println!("d = {d}: {} sets in trace, TV to exact {tv:.3}", trace.len());
        for (name, n) in counts {
            println!("    {name:>2} {:.3}", n as f64 / 10_000.0);
        }
    }
    Ok(())
}

fn main() -> subsetq::Result<()> {
    run_example()
}
