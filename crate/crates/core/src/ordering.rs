//! Node-ordering scores for order-based Bayesian network structure sampling.
//!
//! Each node `v` has a weight table over its candidate parent sets, i.e. a
//! collection over the other `N - 1` nodes. Given an ordering
//! `v_1 .. v_N`, the ordering's score is the product of
//! `W_j = W_{v_j}({v_1, .., v_{j-1}})`, one subset counting query per node.
//! Scoring with tolerance `d` answers each factor with tolerance `d / N`,
//! which keeps the product within `[(1 - d) prod W_j, prod W_j]`.
//!
//! Table `v` numbers its ground set by skipping `v`: global node `g` is
//! local element `g` if `g < v` and `g - 1` otherwise.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;

use crate::collection::WeightedCollection;
use crate::engines::{CountResult, EngineKind, IndexedCollection};
use crate::error::{Error, Result};
use crate::sampling::{collect_trace, sample_one};
use crate::subset::{Subset, MAX_GROUND};
use crate::table_file;

/// Per-node parent-set weight tables, indexed for querying.
#[derive(Clone, Debug)]
pub struct NodeTables {
    tables: Vec<IndexedCollection>,
}

impl NodeTables {
    /// `tables[v]` is node `v`'s table over the other nodes.
    pub fn new(tables: Vec<WeightedCollection>) -> Result<Self> {
        let n = tables.len();
        if n == 0 {
            return Err(Error::EmptyInput("at least one node table is required"));
        }
        if n > MAX_GROUND {
            return Err(Error::GroundSetTooLarge { n, limit: MAX_GROUND });
        }
        for (v, t) in tables.iter().enumerate() {
            if t.n() != n - 1 {
                return Err(Error::ManifestMismatch(format!(
                    "table of node {v} has a ground set of {} elements; expected {} (all nodes but {v})",
                    t.n(),
                    n - 1
                )));
            }
        }
        Ok(NodeTables { tables: tables.into_iter().map(IndexedCollection::new).collect() })
    }

    pub fn n(&self) -> usize {
        self.tables.len()
    }

    pub fn table(&self, v: usize) -> &IndexedCollection {
        &self.tables[v]
    }

    pub fn total_entries(&self) -> usize {
        self.tables.iter().map(|t| t.collection().m()).sum()
    }

    /// Global node set to node `v`'s local numbering; `v` must not be in it.
    pub fn to_local(v: usize, global: Subset) -> Subset {
        debug_assert!(!global.contains(v));
        let g = global.mask() as u128;
        let low = (1u128 << v) - 1;
        Subset::from_mask(((g & low) | ((g >> (v + 1)) << v)) as u64)
    }

    /// Node `v`'s local numbering back to global node indices.
    pub fn to_global(v: usize, local: Subset) -> Subset {
        let l = local.mask() as u128;
        let low = (1u128 << v) - 1;
        Subset::from_mask(((l & low) | ((l >> v) << (v + 1))) as u64)
    }
}

/// Parses a manifest: `ordertables 1`, `n <int>`, then `node <i> <path>`
/// once per node. Relative paths are taken relative to `base`.
pub fn parse_manifest(text: &str, origin: &Path, base: &Path) -> Result<Vec<PathBuf>> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_path_buf(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "ordertables 1")) => {}
        Some((no, _)) => return Err(err(no, "expected `ordertables 1`".into())),
        None => return Err(err(0, "empty manifest".into())),
    }
    let n = match lines.next() {
        Some((no, l)) => {
            let mut it = l.split_whitespace();
            match (it.next(), it.next().and_then(|v| v.parse::<usize>().ok()), it.next()) {
                (Some("n"), Some(n), None) => n,
                _ => return Err(err(no, "expected `n <int>`".into())),
            }
        }
        None => return Err(err(0, "missing `n <int>`".into())),
    };
    let mut paths: Vec<Option<PathBuf>> = vec![None; n];
    for (no, l) in lines {
        let mut it = l.splitn(3, char::is_whitespace);
        let (Some("node"), Some(i), Some(path)) = (it.next(), it.next(), it.next()) else {
            return Err(err(no, "expected `node <i> <path>`".into()));
        };
        let i: usize = i.parse().map_err(|_| err(no, format!("bad node index {i:?}")))?;
        if i >= n {
            return Err(Error::ManifestMismatch(format!("node {i} is outside 0..{n}")));
        }
        if paths[i].is_some() {
            return Err(Error::ManifestMismatch(format!("node {i} is listed twice")));
        }
        let p = PathBuf::from(path.trim());
        paths[i] = Some(if p.is_absolute() { p } else { base.join(p) });
    }
    paths
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| Error::ManifestMismatch(format!("node {i} has no table"))))
        .collect()
}

/// Loads the tables listed in a manifest file.
pub fn load_tables(manifest: impl AsRef<Path>) -> Result<NodeTables> {
    let manifest = manifest.as_ref();
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let paths = parse_manifest(&text, manifest, base)?;
    let tables = paths.iter().map(table_file::load).collect::<Result<Vec<_>>>()?;
    NodeTables::new(tables)
}

/// A permutation of the nodes `0 .. N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &v in &order {
            if v >= order.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidOrdering(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Ordering(order))
    }

    pub fn identity(n: usize) -> Self {
        Ordering((0..n).collect())
    }

    pub fn nodes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[must_use]
    pub fn reversed(&self) -> Self {
        Ordering(self.0.iter().rev().copied().collect())
    }

    pub fn swap(&mut self, i: usize, j: usize) {
        self.0.swap(i, j);
    }

    /// Every ordering of `0 .. n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Ordering> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Ordering>) {
            if prefix.len() == used.len() {
                out.push(Ordering(prefix.clone()));
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    prefix.push(v);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    fn check_for(&self, t: &NodeTables) -> Result<()> {
        if self.len() != t.n() {
            return Err(Error::InvalidOrdering(format!(
                "ordering has {} nodes, tables have {}",
                self.len(),
                t.n()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Ordering {
    /// Space-separated node indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Ordering {
    type Err = Error;

    /// Node indices separated by spaces or commas.
    fn from_str(s: &str) -> Result<Self> {
        let order = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidOrdering(format!("bad node {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ordering::new(order)
    }
}

fn per_factor_tolerance(d: f64, n: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidTolerance(d));
    }
    Ok(d / n as f64)
}

/// Answers `W_j` for every position `j`, with per-factor tolerance `d / N`.
pub fn ordering_factors(t: &NodeTables, o: &Ordering, d: f64, engine: EngineKind) -> Result<Vec<CountResult>> {
    o.check_for(t)?;
    let per = per_factor_tolerance(d, t.n())?;
    let mut preceding = Subset::EMPTY;
    let mut out = Vec::with_capacity(t.n());
    for &v in o.nodes() {
        let q = NodeTables::to_local(v, preceding);
        out.push(t.table(v).count(engine, q, per)?);
        preceding = preceding.with(v);
    }
    Ok(out)
}

/// `sum_j log W'_j`: the log score of the ordering, up to normalization.
pub fn ordering_log_score(t: &NodeTables, o: &Ordering, d: f64, engine: EngineKind) -> Result<f64> {
    Ok(ordering_factors(t, o, d, engine)?.iter().map(|r| r.log_total).sum())
}

/// Samples a DAG compatible with `o`: one parent set per node, drawn from
/// the node's collector trace for its predecessors, with tolerance `d / N`.
///
/// Returns `parents[v]` in global node indices.
pub fn sample_dag<R: Rng + ?Sized>(
    t: &NodeTables,
    o: &Ordering,
    d: f64,
    engine: EngineKind,
    rng: &mut R,
) -> Result<Vec<Subset>> {
    o.check_for(t)?;
    let per = per_factor_tolerance(d, t.n())?;
    let mut parents = vec![Subset::EMPTY; t.n()];
    let mut preceding = Subset::EMPTY;
    for &v in o.nodes() {
        let q = NodeTables::to_local(v, preceding);
        let trace = collect_trace(t.table(v), engine, q, per)?;
        parents[v] = NodeTables::to_global(v, sample_one(&trace, rng));
        preceding = preceding.with(v);
    }
    Ok(parents)
}

/// A Metropolis chain over orderings, starting from the identity.
///
/// Each step proposes swapping two uniformly chosen positions and accepts
/// with probability `min(1, exp(score' - score))`. Returns the initial state
/// followed by the state after each step.
pub fn mcmc_orderings<R: Rng + ?Sized>(
    t: &NodeTables,
    steps: usize,
    d: f64,
    rng: &mut R,
    engine: EngineKind,
) -> Result<Vec<(Ordering, f64)>> {
    let n = t.n();
    let mut current = Ordering::identity(n);
    let mut score = ordering_log_score(t, &current, d, engine)?;
    let mut chain = Vec::with_capacity(steps + 1);
    chain.push((current.clone(), score));
    for _ in 0..steps {
        if n >= 2 {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let mut proposal = current.clone();
            proposal.swap(i, j);
            let proposed = ordering_log_score(t, &proposal, d, engine)?;
            let u: f64 = rng.gen();
            if u < (proposed - score).exp() {
                current = proposal;
                score = proposed;
            }
        }
        chain.push((current.clone(), score));
    }
    Ok(chain)
}
