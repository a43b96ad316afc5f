// Every engine on the four-element worked example, with its visit order.
//
// Run with `cargo run -p subsetq --example walkthrough`.

use subsetq::engines::VisitLog;
use subsetq::fixtures::{lettered, letters, worked_example};
use subsetq::{EngineKind, IndexedCollection};

pub fn run_example() -> subsetq::Result<()> {
    let idx = IndexedCollection::new(worked_example());
    let q = lettered("BCD");
    let d = 0.2;
    println!("query {}  tolerance {d}", letters(q));
    for engine in EngineKind::ALL {
        let mut log = VisitLog::default();
        let r = idx.count_with(engine, q, d, &mut log)?;
        let order: Vec<String> = log.visited_sets().into_iter().map(letters).collect();
        let kept: Vec<String> = log.accumulated_sets().into_iter().map(letters).collect();
        println!(
            "{engine:>6}: W' = {:>5.1}  visited {:>2} [{}]  accumulated [{}]",
            r.log_total.exp(),
            r.visited,
            order.join(" "),
            kept.join(" ")
        );
    }
    Ok(())
}

fn main() -> subsetq::Result<()> {
    run_example()
}
