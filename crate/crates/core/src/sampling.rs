//! Subset sampling on top of counting collectors.
//!
//! A collector run leaves behind the relevant sets it accumulated. Drawing
//! `u` uniformly from `(0, W']` and returning the set whose cumulative-sum
//! interval contains `u` samples `S` with probability `w(S) / W'`, which is
//! within total variation `1 - W'/W <= d` of the exact `w(S) / W(Q)`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engines::{EngineKind, IndexedCollection, Probe};
use crate::error::{Error, Result};
use crate::subset::Subset;

/// Accumulated sets of one collector run with their cumulative scaled weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectorTrace {
    sets: Vec<Subset>,
    cum: Vec<f64>,
    log_scale: f64,
}

#[derive(Default)]
struct Recorder {
    sets: Vec<Subset>,
    cum: Vec<f64>,
}

impl Probe for Recorder {
    fn accumulate(&mut self, set: Subset, w: f64) {
        // Weights that underflowed to zero can never be drawn.
        if w > 0.0 {
            let prev = self.cum.last().copied().unwrap_or(0.0);
            self.sets.push(set);
            self.cum.push(prev + w);
        }
    }

    fn restart(&mut self) {
        self.sets.clear();
        self.cum.clear();
    }
}

impl CollectorTrace {
    /// Builds a trace from sets and their scaled weights, in order.
    pub fn from_weights(sets_and_weights: &[(Subset, f64)], log_scale: f64) -> Result<Self> {
        let mut rec = Recorder::default();
        for &(s, w) in sets_and_weights {
            rec.accumulate(s, w);
        }
        if rec.sets.is_empty() {
            return Err(Error::EmptyInput("a trace needs positive mass"));
        }
        Ok(CollectorTrace { sets: rec.sets, cum: rec.cum, log_scale })
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    /// Cumulative scaled weights `W_1 < W_2 < .. < W_r`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    /// Add to a scaled value's logarithm to recover the true weight.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Total scaled mass `W'`.
    pub fn total(&self) -> f64 {
        *self.cum.last().expect("traces are nonempty")
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The sampling distribution `w(S) / W'` over the trace sets.
    pub fn distribution(&self) -> Vec<(Subset, f64)> {
        let total = self.total();
        let mut prev = 0.0;
        self.sets
            .iter()
            .zip(&self.cum)
            .map(|(&s, &c)| {
                let p = (c - prev) / total;
                prev = c;
                (s, p)
            })
            .collect()
    }
}

/// Runs a collector and records the sets it accumulated, in order.
///
/// `d` must lie in `[0, 1)`: at `d = 1` a collector may return no mass at
/// all, which cannot be sampled from.
pub fn collect_trace(
    idx: &IndexedCollection,
    engine: EngineKind,
    q: Subset,
    d: f64,
) -> Result<CollectorTrace> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidTolerance(d));
    }
    let mut rec = Recorder::default();
    idx.count_with(engine, q, d, &mut rec)?;
    if rec.sets.is_empty() {
        return Err(Error::EmptyInput("the collector accumulated no mass"));
    }
    Ok(CollectorTrace { sets: rec.sets, cum: rec.cum, log_scale: idx.collection().log_wmax() })
}

/// The set `S_i` with `W_{i-1} < u <= W_i`, for `u` in `(0, W']`.
pub fn draw(trace: &CollectorTrace, u: f64) -> Result<Subset> {
    let total = trace.total();
    if !(u > 0.0 && u <= total) {
        return Err(Error::OutOfRange { u, total });
    }
    let i = trace.cum.partition_point(|&c| c < u);
    Ok(trace.sets[i.min(trace.sets.len() - 1)])
}

/// `count` independent draws using a ChaCha generator seeded with `seed`.
pub fn sample_many(trace: &CollectorTrace, count: usize, seed: u64) -> Vec<Subset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(trace, count, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(trace: &CollectorTrace, count: usize, rng: &mut R) -> Vec<Subset> {
    (0..count).map(|_| sample_one(trace, rng)).collect()
}

pub fn sample_one<R: Rng + ?Sized>(trace: &CollectorTrace, rng: &mut R) -> Subset {
    let total = trace.total();
    // gen() is in [0, 1), so 1 - gen() is in (0, 1].
    let u = total * (1.0 - rng.gen::<f64>());
    // A subnormal total can round u to zero; the first set owns that end.
    let u = if u > 0.0 { u } else { trace.cum[0] };
    draw(trace, u).expect("u lies in (0, W']")
}

/// Total variation distance: half the L1 distance between `p` and `q`.
///
/// Repeated atoms are merged. Both inputs must sum to 1 within `1e-9`.
pub fn tv_distance(p: &[(Subset, f64)], q: &[(Subset, f64)]) -> Result<f64> {
    for dist in [p, q] {
        let total: f64 = dist.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-9 || dist.iter().any(|a| a.1 < 0.0) {
            return Err(Error::NotNormalized(total));
        }
    }
    let mut diff: HashMap<Subset, f64> = HashMap::new();
    for &(s, x) in p {
        *diff.entry(s).or_default() += x;
    }
    for &(s, x) in q {
        *diff.entry(s).or_default() -= x;
    }
    Ok((diff.values().map(|v| v.abs()).sum::<f64>() / 2.0).min(1.0))
}
