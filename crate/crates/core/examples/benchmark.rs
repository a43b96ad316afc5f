// A small paired sweep: every engine answers the same random queries on a
// steep instance, and medians of visited sets are compared per query size.

use subsetq::bench::{run_bench, summarize, BenchConfig, InstanceSource};
use subsetq::generators::{Family, GenSpec};
use subsetq::EngineKind;

pub fn run_example() -> subsetq::Result<()> {
    let spec = GenSpec::new(Family::Steep, 16, 3, 7)?;
    let mut cfg = BenchConfig::new(
        vec![InstanceSource::Generated(spec)],
        vec![EngineKind::Exact, EngineKind::Sorted, EngineKind::Treedy, EngineKind::Ideal],
        vec![0.01],
    );
    cfg.queries_per_size = 20;
    cfg.sizes = Some(vec![4, 8, 12, 16]);
    cfg.validate = true;
    let report = run_bench(&cfg)?;

    println!("size  engine   median visited");
    for s in summarize(&report.rows)? {
        println!("{:>4}  {:<7} {:>8.1}", s.query_size, s.engine.name(), s.median_visited);
    }
    for b in &report.builds {
        println!("built {} in {} us", b.structure, b.elapsed_ns / 1000);
    }
    Ok(())
}

fn main() -> subsetq::Result<()> {
    run_example()
}
