// Generating an instance, writing it as a weight table, and querying the
// reloaded copy.

use subsetq::generators::{gen_instance, Family, GenSpec};
use subsetq::{table_file, EngineKind, IndexedCollection, Subset};

pub fn run_example() -> subsetq::Result<()> {
    let spec = GenSpec::new(Family::Mixture, 12, 3, 42)?;
    let c = gen_instance(&spec)?;
    let path = std::env::temp_dir().join(format!("{}-{}.wt", spec.id(), std::process::id()));
    table_file::save(&c, &path)?;
    let loaded = table_file::load(&path)?;
    std::fs::remove_file(&path).map_err(|e| subsetq::Error::Io { path: path.clone(), source: e })?;
    println!("{}: m = {}, log w_max = {:.3}", spec.id(), loaded.m(), loaded.log_wmax());

    let idx = IndexedCollection::new(loaded);
    let q: Subset = "0,2,3,5,7,8,11".parse()?;
    for engine in EngineKind::ALL {
        let r = idx.count(engine, q, 0.05)?;
        println!(
            "{engine:>6}: log W' = {:.6}  visited {:>3}  switched {}",
            r.log_total, r.visited, r.switched_to_exact
        );
    }
    Ok(())
}

fn main() -> subsetq::Result<()> {
    run_example()
}
