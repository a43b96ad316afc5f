//! Experiment harness: run engines over instances and query sweeps and
//! record visit counts and wall time per query.
//!
//! Queries are drawn once per `(instance, size, index)` and shared by every
//! engine and tolerance, so comparisons between rows are paired. Structure
//! builds are timed separately from queries.

use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::collection::WeightedCollection;
use crate::engines::{EngineKind, GreedyTree, IndexedCollection, SortedIndex};
use crate::error::{Error, Result};
use crate::generators::{gen_instance, sample_query, GenSpec};
use crate::oracle::brute_force_weight;
use crate::subset::Subset;
use crate::table_file;

pub const CSV_HEADER: &str = "instance,family,n,k,engine,tolerance,query_size,query_idx,visited,relevant_acc,switched,log_result,elapsed_ns";

/// Largest ground set for which validation runs the brute-force oracle.
pub const VALIDATE_MAX_GROUND: usize = 20;

#[derive(Clone, Debug)]
pub enum InstanceSource {
    File(PathBuf),
    Generated(GenSpec),
    /// An in-memory collection with an identifier.
    Given { id: String, collection: WeightedCollection },
}

impl InstanceSource {
    fn load(&self) -> Result<(String, String, WeightedCollection)> {
        Ok(match self {
            InstanceSource::File(path) => {
                let id = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                (id, "file".into(), table_file::load(path)?)
            }
            InstanceSource::Generated(spec) => {
                (spec.id(), spec.family.to_string(), gen_instance(spec)?)
            }
            InstanceSource::Given { id, collection } => (id.clone(), "given".into(), collection.clone()),
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub instances: Vec<InstanceSource>,
    pub engines: Vec<EngineKind>,
    pub tolerances: Vec<f64>,
    pub queries_per_size: usize,
    /// Query sizes; `None` means every size from 1 to `n`.
    pub sizes: Option<Vec<usize>>,
    /// Fixed queries. When nonempty they replace the sampled sweep.
    pub queries: Vec<Subset>,
    pub seed: u64,
    /// Check every answer against the brute-force oracle (instances with
    /// `n <= 20` only).
    pub validate: bool,
}

impl BenchConfig {
    pub fn new(instances: Vec<InstanceSource>, engines: Vec<EngineKind>, tolerances: Vec<f64>) -> Self {
        BenchConfig {
            instances,
            engines,
            tolerances,
            queries_per_size: 1,
            sizes: None,
            queries: Vec::new(),
            seed: 0,
            validate: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        if let Some(&d) = self.tolerances.iter().find(|d| !(0.0..=1.0).contains(*d)) {
            return Err(Error::InvalidTolerance(d));
        }
        if self.queries_per_size == 0 && self.queries.is_empty() {
            return Err(Error::InvalidSpec("queries_per_size must be at least 1".into()));
        }
        if self.engines.is_empty() || self.tolerances.is_empty() || self.instances.is_empty() {
            return Err(Error::EmptyInput("benchmark needs instances, engines and tolerances"));
        }
        Ok(())
    }
}

/// One query answered by one engine at one tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub engine: EngineKind,
    pub tolerance: f64,
    pub query_size: usize,
    pub query_idx: usize,
    pub visited: usize,
    pub relevant_acc: usize,
    pub switched: bool,
    pub log_result: f64,
    pub elapsed_ns: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuildTiming {
    pub instance: String,
    /// `"sorted"` or `"treedy"`.
    pub structure: &'static str,
    pub elapsed_ns: u64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    /// Query rows in canonical order: instance, engine, tolerance, size, index.
    pub rows: Vec<BenchRow>,
    pub builds: Vec<BuildTiming>,
}

fn elapsed_ns(start: Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// Canonical row position: instance, engine, tolerance, size, query index.
type RowKey = (usize, usize, usize, usize, usize);

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.check()?;
    let mut report = BenchReport::default();
    let mut keyed: Vec<(RowKey, BenchRow)> = Vec::new();

    for (inst_no, source) in cfg.instances.iter().enumerate() {
        let (id, family, collection) = source.load()?;
        let n = collection.n();
        let k = collection.max_card();

        let start = Instant::now();
        let sorted = SortedIndex::build(&collection);
        report.builds.push(BuildTiming { instance: id.clone(), structure: "sorted", elapsed_ns: elapsed_ns(start) });
        let start = Instant::now();
        let tree = GreedyTree::build(&collection);
        report.builds.push(BuildTiming { instance: id.clone(), structure: "treedy", elapsed_ns: elapsed_ns(start) });
        let indexed = IndexedCollection::from_parts(collection, sorted, tree);

        let queries = query_plan(cfg, inst_no, n)?;
        for (query_idx, q) in queries {
            let oracle = (cfg.validate && n <= VALIDATE_MAX_GROUND)
                .then(|| brute_force_weight(indexed.collection(), q));
            for (e_pos, &engine) in cfg.engines.iter().enumerate() {
                for (t_pos, &d) in cfg.tolerances.iter().enumerate() {
                    let start = Instant::now();
                    let r = indexed.count(engine, q, d)?;
                    let elapsed = elapsed_ns(start);
                    if let Some(w) = oracle {
                        check_against_oracle(&id, engine, d, q, r.log_total, w)?;
                    }
                    let row = BenchRow {
                        instance: id.clone(),
                        family: family.clone(),
                        n,
                        k,
                        engine,
                        tolerance: d,
                        query_size: q.len(),
                        query_idx,
                        visited: r.visited,
                        relevant_acc: r.relevant_accumulated,
                        switched: r.switched_to_exact,
                        log_result: r.log_total,
                        elapsed_ns: elapsed,
                    };
                    keyed.push(((inst_no, e_pos, t_pos, q.len(), query_idx), row));
                }
            }
        }
    }
    keyed.sort_by_key(|(key, _)| *key);
    report.rows = keyed.into_iter().map(|(_, row)| row).collect();
    Ok(report)
}

/// `(index within its size, query)` pairs for one instance.
fn query_plan(cfg: &BenchConfig, inst_no: usize, n: usize) -> Result<Vec<(usize, Subset)>> {
    if !cfg.queries.is_empty() {
        let mut per_size = vec![0usize; 65];
        return cfg
            .queries
            .iter()
            .map(|&q| {
                if !q.fits(n) {
                    return Err(Error::ElementOutOfRange { element: q.max_element().unwrap_or(0), n });
                }
                let idx = per_size[q.len()];
                per_size[q.len()] += 1;
                Ok((idx, q))
            })
            .collect();
    }
    let sizes: Vec<usize> = cfg.sizes.clone().unwrap_or_else(|| (1..=n).collect());
    let mut plan = Vec::with_capacity(sizes.len() * cfg.queries_per_size);
    for size in sizes {
        // One stream per (instance, size) keeps plans stable when the size list changes.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(((inst_no as u64) << 8) | size as u64);
        for idx in 0..cfg.queries_per_size {
            plan.push((idx, sample_query(n, size, &mut rng)?));
        }
    }
    Ok(plan)
}

fn check_against_oracle(id: &str, engine: EngineKind, d: f64, q: Subset, got: f64, exact: f64) -> Result<()> {
    const REL: f64 = 1e-9;
    let upper_ok = got <= exact + REL;
    let lower_ok = d >= 1.0 || got >= exact + (1.0 - d).ln() - REL;
    if upper_ok && lower_ok {
        Ok(())
    } else {
        Err(Error::ValidationFailed(format!(
            "{id}: {engine} at d = {d} on {q} returned log {got}, oracle log {exact}"
        )))
    }
}

/// Formats `x` with `digits` significant digits in plain decimal notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..).
    let sig = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if sig > digits && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.instance),
            csv_field(&r.family),
            r.n,
            r.k,
            r.engine,
            r.tolerance,
            r.query_size,
            r.query_idx,
            r.visited,
            r.relevant_acc,
            u8::from(r.switched),
            format_significant(r.log_result, 12),
            r.elapsed_ns
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Aggregates over the rows of one `(engine, tolerance, query size)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub engine: EngineKind,
    pub tolerance: f64,
    pub query_size: usize,
    pub count: usize,
    pub median_visited: f64,
    pub mean_visited: f64,
    pub mean_elapsed_ns: f64,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

pub fn summarize(rows: &[BenchRow]) -> Result<Vec<Summary>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("no rows to summarize"));
    }
    let mut sorted: Vec<&BenchRow> = rows.iter().collect();
    sorted.sort_by(|a, b| {
        a.engine
            .cmp(&b.engine)
            .then(a.tolerance.total_cmp(&b.tolerance))
            .then(a.query_size.cmp(&b.query_size))
    });
    let same_cell = |a: &BenchRow, b: &BenchRow| {
        a.engine == b.engine && a.tolerance.total_cmp(&b.tolerance).is_eq() && a.query_size == b.query_size
    };
    Ok(sorted
        .chunk_by(|a, b| same_cell(a, b))
        .map(|cell| {
            let count = cell.len();
            let mut visited: Vec<f64> = cell.iter().map(|r| r.visited as f64).collect();
            let mean_visited = visited.iter().sum::<f64>() / count as f64;
            let mean_elapsed_ns = cell.iter().map(|r| r.elapsed_ns as f64).sum::<f64>() / count as f64;
            Summary {
                engine: cell[0].engine,
                tolerance: cell[0].tolerance,
                query_size: cell[0].query_size,
                count,
                median_visited: median(&mut visited).expect("cells are nonempty"),
                mean_visited,
                mean_elapsed_ns,
            }
        })
        .collect())
}
