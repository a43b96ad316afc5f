//! `subsetq` command-line front-end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data, load, validation
//! or write failures.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsetq::bench::{median, run_bench, write_csv, BenchConfig, InstanceSource};
use subsetq::generators::{gen_instance, Family, GenSpec};
use subsetq::ordering::{load_tables, mcmc_orderings, ordering_log_score, sample_dag, Ordering};
use subsetq::sampling::{collect_trace, sample_many};
use subsetq::{table_file, EngineKind, IndexedCollection, Subset};

#[derive(Parser)]
#[command(name = "subsetq", version, about = "Approximate subset-sum queries over weighted set families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic weight table.
    Generate(GenerateArgs),
    /// Answer one counting query.
    Query(QueryArgs),
    /// Draw subsets of a query in proportion to their weights.
    Sample(SampleArgs),
    /// Run a benchmark sweep and write per-query rows as CSV.
    Bench(BenchArgs),
    /// Score, sample or explore node orderings.
    Order(OrderArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    n: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=64))]
    k: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_parser = parse_engine)]
    engine: EngineKind,
    #[arg(long, default_value_t = 0.0, value_parser = parse_tolerance)]
    tolerance: f64,
    /// Comma-separated element indices, or "." for the empty set.
    #[arg(long, value_parser = parse_subset)]
    query: Subset,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    weights: PathBuf,
    #[arg(long, value_parser = parse_engine, default_value = "treedy")]
    engine: EngineKind,
    #[arg(long, default_value_t = 0.0, value_parser = parse_sampling_tolerance)]
    tolerance: f64,
    #[arg(long, value_parser = parse_subset)]
    query: Subset,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Weight-table file; repeatable.
    #[arg(long)]
    weights: Vec<PathBuf>,
    /// Generated instance as family:n:k:seed; repeatable.
    #[arg(long = "gen", value_parser = parse_gen)]
    generated: Vec<GenSpec>,
    /// Weight functions per --gen spec, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeats: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_engine, default_value = "exact,sorted,treedy")]
    engines: Vec<EngineKind>,
    #[arg(long, value_delimiter = ',', value_parser = parse_tolerance, default_value = "0.01")]
    tolerances: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    queries_per_size: usize,
    /// Query sizes; defaults to 1..=n per instance.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Check every result against the brute-force oracle.
    #[arg(long)]
    validate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderMode {
    Score,
    Mcmc,
    Dag,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum)]
    mode: OrderMode,
    /// Space- or comma-separated node indices; defaults to the identity.
    #[arg(long, value_parser = parse_ordering)]
    ordering: Option<Ordering>,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value_t = 0.0, value_parser = parse_sampling_tolerance)]
    tolerance: f64,
    #[arg(long, value_parser = parse_engine, default_value = "treedy")]
    engine: EngineKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse()
}

fn parse_subset(s: &str) -> Result<Subset, String> {
    s.parse::<Subset>().map_err(|e| e.to_string())
}

fn parse_gen(s: &str) -> Result<GenSpec, String> {
    s.parse::<GenSpec>().map_err(|e| e.to_string())
}

fn parse_ordering(s: &str) -> Result<Ordering, String> {
    s.parse::<Ordering>().map_err(|e| e.to_string())
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let d: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if (0.0..=1.0).contains(&d) {
        Ok(d)
    } else {
        Err(format!("tolerance must lie in [0, 1], got {d}"))
    }
}

fn parse_sampling_tolerance(s: &str) -> Result<f64, String> {
    let d = parse_tolerance(s)?;
    if d < 1.0 {
        Ok(d)
    } else {
        Err("sampling needs a tolerance below 1".into())
    }
}

/// An error with its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 1, err: anyhow::anyhow!(msg.into()) }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 2, err: e.into() }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Generate(a) => generate(a, &mut out),
        Command::Query(a) => query(a, &mut out),
        Command::Sample(a) => sample(a, &mut out),
        Command::Bench(a) => bench(a, &mut out),
        Command::Order(a) => order(a, &mut out),
    };
    let result = result.and_then(|()| out.flush().map_err(Failure::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn generate(a: GenerateArgs, out: &mut impl Write) -> Outcome {
    if a.k > a.n {
        return Err(Failure::usage(format!("--k {} exceeds --n {}", a.k, a.n)));
    }
    let spec = GenSpec::new(a.family, a.n as usize, a.k as usize, a.seed).map_err(|e| Failure::usage(e.to_string()))?;
    let c = gen_instance(&spec)?;
    table_file::save(&c, &a.out)?;
    writeln!(out, "m={} log_wmax={}", c.m(), c.log_wmax())?;
    Ok(())
}

fn load_indexed(path: &PathBuf, q: Subset) -> Result<IndexedCollection, Failure> {
    let c = table_file::load(path)?;
    if !q.fits(c.n()) {
        return Err(anyhow::anyhow!("query {q} has elements outside the ground set of size {}", c.n()).into());
    }
    Ok(IndexedCollection::new(c))
}

fn query(a: QueryArgs, out: &mut impl Write) -> Outcome {
    let idx = load_indexed(&a.weights, a.query)?;
    let r = idx.count(a.engine, a.query, a.tolerance)?;
    writeln!(
        out,
        "log_w={} visited={} relevant={} switched={}",
        r.log_total,
        r.visited,
        r.relevant_accumulated,
        u8::from(r.switched_to_exact)
    )?;
    Ok(())
}

fn sample(a: SampleArgs, out: &mut impl Write) -> Outcome {
    let idx = load_indexed(&a.weights, a.query)?;
    if a.count == 0 {
        return Ok(());
    }
    let trace = collect_trace(&idx, a.engine, a.query, a.tolerance)?;
    for s in sample_many(&trace, a.count, a.seed) {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

fn bench(a: BenchArgs, out: &mut impl Write) -> Outcome {
    let mut instances: Vec<InstanceSource> = a.weights.into_iter().map(InstanceSource::File).collect();
    for spec in a.generated {
        instances.extend(
            (0..a.repeats).map(|r| InstanceSource::Generated(GenSpec { seed: spec.seed.wrapping_add(r), ..spec })),
        );
    }
    if instances.is_empty() {
        return Err(Failure::usage("bench needs at least one --weights or --gen instance"));
    }
    let mut cfg = BenchConfig::new(instances, a.engines, a.tolerances);
    cfg.queries_per_size = a.queries_per_size;
    cfg.sizes = a.sizes;
    cfg.seed = a.seed;
    cfg.validate = a.validate;
    cfg.check().map_err(|e| Failure::usage(e.to_string()))?;

    let report = run_bench(&cfg)?;
    let file = File::create(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let mut csv = BufWriter::new(file);
    write_csv(&report.rows, &mut csv).and_then(|()| csv.flush()).with_context(|| format!("cannot write {}", a.out.display()))?;

    writeln!(out, "rows={}", report.rows.len())?;
    for &engine in &cfg.engines {
        for &d in &cfg.tolerances {
            let mut visited: Vec<f64> = report
                .rows
                .iter()
                .filter(|r| r.engine == engine && r.tolerance == d)
                .map(|r| r.visited as f64)
                .collect();
            if let Some(med) = median(&mut visited) {
                writeln!(out, "engine={engine} tolerance={d} queries={} median_visited={med}", visited.len())?;
            }
        }
    }
    // Timings vary between runs, so they stay off standard output.
    for b in &report.builds {
        eprintln!("build {} {} {} ns", b.instance, b.structure, b.elapsed_ns);
    }
    Ok(())
}

fn order(a: OrderArgs, out: &mut impl Write) -> Outcome {
    let tables = load_tables(&a.manifest)?;
    let ordering = match a.ordering {
        Some(o) if o.len() != tables.n() => {
            return Err(Failure::usage(format!("ordering has {} nodes, manifest has {}", o.len(), tables.n())));
        }
        Some(o) => o,
        None => Ordering::identity(tables.n()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    match a.mode {
        OrderMode::Score => {
            let s = ordering_log_score(&tables, &ordering, a.tolerance, a.engine)?;
            writeln!(out, "log_score={s}")?;
        }
        OrderMode::Mcmc => {
            let chain = mcmc_orderings(&tables, a.steps, a.tolerance, &mut rng, a.engine)?;
            for (step, (o, s)) in chain.iter().enumerate() {
                writeln!(out, "{step}\t{s}\t{o}")?;
            }
        }
        OrderMode::Dag => {
            let parents = sample_dag(&tables, &ordering, a.tolerance, a.engine, &mut rng)?;
            for (v, p) in parents.iter().enumerate() {
                writeln!(out, "{v}\t{p}")?;
            }
        }
    }
    Ok(())
}
