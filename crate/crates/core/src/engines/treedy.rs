use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{certified, check_tolerance, CountResult, Probe};
use crate::collection::WeightedCollection;
use crate::error::Result;
use crate::subset::Subset;

const NONE: u32 = u32::MAX;

/// Mantissa bits dropped when ranking potentials.
const TIE_BITS: u32 = 20;

/// Ranking key for a nonnegative potential. Values that agree to about
/// 1e-10 relative share a key and fall back to the tie rule, so equal sums
/// computed under different scalings rank the same way.
fn tie_key(x: f64) -> u64 {
    (x.to_bits() + (1 << (TIE_BITS - 1))) >> TIE_BITS
}

/// The lexicographical tree re-linked for greedy search.
///
/// Every node keeps a link to its son with the largest weight potential and
/// to its brother with the next largest one. The weight potential `phi(S)` is
/// the total weight of the subtree rooted at `S`; the aggregate potential
/// `psi(S)` adds the potentials of all brothers after `S` in the chain.
/// Node indices are the collection's lexicographic entry indices.
#[derive(Clone, Debug)]
pub struct GreedyTree {
    sets: Vec<Subset>,
    weights: Vec<f64>,
    phi: Vec<f64>,
    psi: Vec<f64>,
    first_son: Vec<u32>,
    next_brother: Vec<u32>,
    log_wmax: f64,
}

impl GreedyTree {
    pub fn build(c: &WeightedCollection) -> Self {
        let m = c.m();
        let weights = c.scaled_weights().to_vec();

        // Sons have larger indices than their parent.
        let mut phi = weights.clone();
        for i in (0..m).rev() {
            let below: f64 = c.sons(i).iter().map(|&s| phi[s as usize]).sum();
            phi[i] += below;
        }

        let mut first_son = vec![NONE; m];
        let mut next_brother = vec![NONE; m];
        let mut psi = phi.clone();
        let mut sons: Vec<u32> = Vec::new();
        for (i, first) in first_son.iter_mut().enumerate() {
            sons.clear();
            sons.extend_from_slice(c.sons(i));
            if sons.is_empty() {
                continue;
            }
            // Sons arrive by ascending element; the stable sort keeps that for ties.
            sons.sort_by_key(|&s| std::cmp::Reverse(tie_key(phi[s as usize])));
            *first = sons[0];
            for pair in sons.windows(2) {
                next_brother[pair[0] as usize] = pair[1];
            }
            for k in (0..sons.len() - 1).rev() {
                let (cur, next) = (sons[k] as usize, sons[k + 1] as usize);
                psi[cur] = phi[cur] + psi[next];
            }
        }

        GreedyTree {
            sets: c.sets().to_vec(),
            weights,
            phi,
            psi,
            first_son,
            next_brother,
            log_wmax: c.log_wmax(),
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn log_wmax(&self) -> f64 {
        self.log_wmax
    }

    pub fn index_of(&self, s: Subset) -> Option<usize> {
        self.sets.binary_search(&s).ok()
    }

    pub fn set(&self, node: usize) -> Subset {
        self.sets[node]
    }

    /// Scaled weight of a node.
    pub fn weight(&self, node: usize) -> f64 {
        self.weights[node]
    }

    /// Scaled weight potential of a node.
    pub fn weight_potential(&self, node: usize) -> f64 {
        self.phi[node]
    }

    /// Scaled aggregate potential of a node.
    pub fn aggregate_potential(&self, node: usize) -> f64 {
        self.psi[node]
    }

    pub fn first_son(&self, node: usize) -> Option<usize> {
        link(self.first_son[node])
    }

    pub fn next_brother(&self, node: usize) -> Option<usize> {
        link(self.next_brother[node])
    }

    /// Sons of a node in greedy order.
    pub fn sons(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.first_son(node), move |&s| self.next_brother(s))
    }
}

fn link(v: u32) -> Option<usize> {
    (v != NONE).then_some(v as usize)
}

/// Queue entry: larger `psi` first, then the lexicographically smaller set.
#[derive(Clone, Copy, Debug)]
struct Queued {
    psi: f64,
    key: u64,
    node: u32,
}

impl Queued {
    fn new(psi: f64, node: u32) -> Self {
        Queued { psi, key: tie_key(psi), node }
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

/// Approximate `W(Q)` by best-first search over the greedy tree.
///
/// The frontier `R` holds relevant sets keyed by aggregate potential. Each
/// step pops the largest, adds its weight to `W'`, and pushes its first
/// relevant later brother and its first relevant son; irrelevant sets met on
/// the way are skipped together with their subtrees. The search stops once
/// `W' >= (1 - d)(W' + Psi(R))`.
///
/// `Psi(R)` is summed over the frontier at every test until the popped
/// aggregate potential falls below `d W'`; from then on it is updated
/// incrementally.
pub fn treedy_count(t: &GreedyTree, q: Subset, d: f64) -> Result<CountResult> {
    treedy_count_with(t, q, d, &mut ())
}

pub fn treedy_count_with<P: Probe>(
    t: &GreedyTree,
    q: Subset,
    d: f64,
    probe: &mut P,
) -> Result<CountResult> {
    let d = check_tolerance(d)?;
    probe.step(0.0, t.psi[0]);
    if certified(0.0, t.psi[0], d) {
        return Ok(CountResult::from_scaled(0.0, t.log_wmax));
    }

    let mut queue = BinaryHeap::new();
    queue.push(Queued::new(t.psi[0], 0));
    let mut visited = 1;
    probe.visit(t.sets[0], visited, true);

    let mut acc = 0.0;
    let mut accumulated = 0;
    let mut incremental = false;
    let mut psi_sum = 0.0;

    while let Some(top) = queue.pop() {
        let node = top.node as usize;
        acc += t.weights[node];
        accumulated += 1;
        probe.accumulate(t.sets[node], t.weights[node]);

        if incremental {
            psi_sum -= top.psi;
        } else if top.psi < d * acc {
            incremental = true;
            psi_sum = queue.iter().map(|e| e.psi).sum();
        }

        for start in [t.next_brother[node], t.first_son[node]] {
            let mut cur = start;
            while cur != NONE {
                let s = t.sets[cur as usize];
                visited += 1;
                let relevant = s.is_subset_of(q);
                probe.visit(s, visited, relevant);
                if relevant {
                    let psi = t.psi[cur as usize];
                    queue.push(Queued::new(psi, cur));
                    if incremental {
                        psi_sum += psi;
                    }
                    break;
                }
                cur = t.next_brother[cur as usize];
            }
        }

        let residual = if incremental {
            psi_sum.max(0.0)
        } else {
            queue.iter().map(|e| e.psi).sum()
        };
        probe.step(acc, residual);
        if queue.is_empty() || certified(acc, residual, d) {
            break;
        }
    }

    Ok(CountResult {
        visited,
        relevant_accumulated: accumulated,
        is_exact: queue.is_empty(),
        ..CountResult::from_scaled(acc, t.log_wmax)
    })
}
