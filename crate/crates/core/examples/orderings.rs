// Scoring node orderings from per-node parent-set tables, sampling a DAG
// compatible with one, and a short Metropolis run over orderings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsetq::generators::{gen_instance, Family, GenSpec};
use subsetq::ordering::{mcmc_orderings, ordering_log_score, sample_dag, NodeTables, Ordering};
use subsetq::EngineKind;

pub fn run_example() -> subsetq::Result<()> {
    let nodes = 6;
    let tables = (0..nodes)
        .map(|v| gen_instance(&GenSpec::new(Family::Flat, nodes - 1, 2, 100 + v as u64)?))
        .collect::<subsetq::Result<Vec<_>>>()?;
    let t = NodeTables::new(tables)?;

    let o = Ordering::identity(nodes);
    for d in [0.0, 0.1] {
        println!("log score of {o} at d = {d}: {:.4}", ordering_log_score(&t, &o, d, EngineKind::Treedy)?);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let parents = sample_dag(&t, &o, 0.05, EngineKind::Treedy, &mut rng)?;
    for (v, p) in parents.iter().enumerate() {
        println!("node {v} <- {p}");
    }

    let chain = mcmc_orderings(&t, 2000, 0.05, &mut rng, EngineKind::Treedy)?;
    let (best, score) = chain.iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("chain is nonempty");
    println!("best of {} states: {best} with {score:.4}", chain.len());
    Ok(())
}

fn main() -> subsetq::Result<()> {
    run_example()
}
