//! Random benchmark instances and query sets.
//!
//! Every instance family is built from one component: draw
//! `U_i ~ Uniform(kappa - 1, kappa)` for each element and give every set
//! `S` with `|S| <= k` the log-weight `lambda * sum_{i in S} U_i`. The empty
//! set always has weight 1.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collection::{binomial_prefix_sum, WeightedCollection};
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

pub const FLAT_LAMBDA: f64 = 10.0;
pub const STEEP_LAMBDA: f64 = 200.0;

/// Offsets `kappa * n - k` of the five components per group in a mixture.
pub const MIXTURE_OFFSETS: [i64; 5] = [-1, 0, 1, 2, 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `lambda = 10`, `kappa = k / n`.
    Flat,
    /// `lambda = 200`, `kappa = k / n`.
    Steep,
    /// Sum of five flat and five steep components with `kappa n` in
    /// `k-1 ..= k+3`.
    Mixture,
    /// A mixture whose weights are permuted among sets of equal size.
    Shuffled,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Flat, Family::Steep, Family::Mixture, Family::Shuffled];

    pub fn name(self) -> &'static str {
        match self {
            Family::Flat => "flat",
            Family::Steep => "steep",
            Family::Mixture => "mixture",
            Family::Shuffled => "shuffled",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?} (expected flat, steep, mixture or shuffled)"))
    }
}

/// Parameters of a generated instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, k: usize, seed: u64) -> Result<Self> {
        let spec = GenSpec { family, n, k, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.k && self.k <= self.n && self.n <= MAX_GROUND) {
            return Err(Error::InvalidSpec(format!(
                "need 1 <= k <= n <= {MAX_GROUND}, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        Ok(())
    }

    /// A readable identifier such as `steep-n20-k3-s7`.
    pub fn id(&self) -> String {
        format!("{}-n{}-k{}-s{}", self.family, self.n, self.k, self.seed)
    }
}

impl FromStr for GenSpec {
    type Err = String;

    /// `family:n:k:seed`, e.g. `steep:20:3:7`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [family, n, k, seed] = parts[..] else {
            return Err(format!("expected family:n:k:seed, got {s:?}"));
        };
        let num = |v: &str| v.parse::<u64>().map_err(|_| format!("bad number {v:?} in {s:?}"));
        GenSpec::new(family.parse()?, num(n)? as usize, num(k)? as usize, num(seed)?)
            .map_err(|e| e.to_string())
    }
}

/// All subsets of `{0, .., n-1}` with at most `k` elements, in
/// lexicographic order.
pub fn complete_family(n: usize, k: usize) -> Vec<Subset> {
    let size = binomial_prefix_sum(n, k);
    let mut out = Vec::with_capacity(usize::try_from(size).unwrap_or(0).min(1 << 24));
    fn extend(cur: Subset, from: usize, n: usize, k: usize, out: &mut Vec<Subset>) {
        out.push(cur);
        if cur.len() == k {
            return;
        }
        for x in from..n {
            extend(cur.with(x), x + 1, n, k, out);
        }
    }
    extend(Subset::EMPTY, 0, n, k, &mut out);
    out
}

fn draw_component<R: Rng + ?Sized>(n: usize, lambda: f64, kappa: f64, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| lambda * rng.gen_range(kappa - 1.0..kappa)).collect()
}

fn component_log_weight(per_element: &[f64], s: Subset) -> f64 {
    s.iter().map(|i| per_element[i]).sum()
}

/// One component: `log w(S) = lambda * sum_{i in S} U_i` over all `|S| <= k`.
pub fn gen_component<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    lambda: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<WeightedCollection> {
    if n > MAX_GROUND || k > n {
        return Err(Error::InvalidSpec(format!("need k <= n <= {MAX_GROUND}")));
    }
    let scaled = draw_component(n, lambda, kappa, rng);
    let entries = complete_family(n, k)
        .into_iter()
        .map(|s| (s, component_log_weight(&scaled, s)))
        .collect();
    WeightedCollection::new(n, entries)
}

/// `(lambda, kappa)` of the ten mixture components: five flat, then five steep.
pub fn mixture_components(n: usize, k: usize) -> Vec<(f64, f64)> {
    [FLAT_LAMBDA, STEEP_LAMBDA]
        .into_iter()
        .flat_map(|lambda| {
            MIXTURE_OFFSETS
                .into_iter()
                .map(move |off| (lambda, (k as i64 + off) as f64 / n as f64))
        })
        .collect()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Generates an instance. The same spec always yields the same collection.
pub fn gen_instance(spec: &GenSpec) -> Result<WeightedCollection> {
    spec.validate()?;
    let GenSpec { family, n, k, seed } = *spec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kappa = k as f64 / n as f64;
    match family {
        Family::Flat => gen_component(n, k, FLAT_LAMBDA, kappa, &mut rng),
        Family::Steep => gen_component(n, k, STEEP_LAMBDA, kappa, &mut rng),
        Family::Mixture => WeightedCollection::new(n, mixture_entries(n, k, &mut rng)),
        Family::Shuffled => {
            let mut entries = mixture_entries(n, k, &mut rng);
            // Separate stream, so the permutation does not disturb the mixture draws.
            let mut perm_rng = ChaCha8Rng::seed_from_u64(seed);
            perm_rng.set_stream(1);
            shuffle_within_sizes(&mut entries, k, &mut perm_rng);
            WeightedCollection::new(n, entries)
        }
    }
}

fn mixture_entries<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<(Subset, f64)> {
    let components: Vec<Vec<f64>> = mixture_components(n, k)
        .into_iter()
        .map(|(lambda, kappa)| draw_component(n, lambda, kappa, rng))
        .collect();
    let mut buf = vec![0.0; components.len()];
    complete_family(n, k)
        .into_iter()
        .map(|s| {
            for (b, comp) in buf.iter_mut().zip(&components) {
                *b = component_log_weight(comp, s);
            }
            (s, log_sum_exp(&buf))
        })
        .collect()
}

/// Permutes log-weights uniformly among entries of equal cardinality.
pub fn shuffle_within_sizes<R: Rng + ?Sized>(entries: &mut [(Subset, f64)], k: usize, rng: &mut R) {
    for size in 0..=k {
        let slots: Vec<usize> = (0..entries.len()).filter(|&i| entries[i].0.len() == size).collect();
        let mut weights: Vec<f64> = slots.iter().map(|&i| entries[i].1).collect();
        weights.shuffle(rng);
        for (&i, w) in slots.iter().zip(weights) {
            entries[i].1 = w;
        }
    }
}

/// A uniformly random subset of `{0, .., n-1}` with exactly `size` elements.
pub fn sample_query<R: Rng + ?Sized>(n: usize, size: usize, rng: &mut R) -> Result<Subset> {
    if size > n || n > MAX_GROUND {
        return Err(Error::SizeOutOfRange { size, n });
    }
    Subset::from_elements(rand::seq::index::sample(rng, n, size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table_file;

    #[test]
    fn empty_set_weighs_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (lambda, kappa) in [(10.0, 0.2), (200.0, 0.5), (0.0, 0.3)] {
            let c = gen_component(8, 3, lambda, kappa, &mut rng).unwrap();
            assert_eq!(c.log_weight(Subset::EMPTY), Some(0.0));
        }
    }

    #[test]
    fn zero_lambda_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = gen_component(6, 2, 0.0, 0.5, &mut rng).unwrap();
        assert!(c.log_weights().iter().all(|&lw| lw == 0.0));
    }

    #[test]
    fn component_size_and_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (lambda, kappa) = (200.0, 0.15);
        let c = gen_component(20, 3, lambda, kappa, &mut rng).unwrap();
        assert_eq!(c.m(), 1 + 20 + 190 + 1140);
        assert!(c.complete_upto_k());
        let (lo, hi) = (lambda * 3.0 * (kappa - 1.0), lambda * 3.0 * kappa);
        assert!(c.log_weights().iter().all(|&lw| lo <= lw && lw <= hi));
    }

    #[test]
    fn mixture_empty_set_weighs_ten() {
        for fam in [Family::Mixture, Family::Shuffled] {
            let c = gen_instance(&GenSpec::new(fam, 7, 2, 5).unwrap()).unwrap();
            let w = c.log_weight(Subset::EMPTY).unwrap().exp();
            assert!((w - 10.0).abs() < 1e-12, "{fam}: {w}");
        }
    }

    #[test]
    fn mixture_dominates_its_components() {
        let (n, k, seed) = (9, 3, 21);
        let mix = gen_instance(&GenSpec::new(Family::Mixture, n, k, seed).unwrap()).unwrap();
        // Replay the component draws with the same stream.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (lambda, kappa) in mixture_components(n, k) {
            let comp = draw_component(n, lambda, kappa, &mut rng);
            for (s, lw) in mix.iter() {
                assert!(lw >= component_log_weight(&comp, s) - 1e-12);
            }
        }
    }

    #[test]
    fn shuffled_preserves_per_size_multisets() {
        let (n, k, seed) = (10, 3, 4);
        let mix = gen_instance(&GenSpec::new(Family::Mixture, n, k, seed).unwrap()).unwrap();
        let shuf = gen_instance(&GenSpec::new(Family::Shuffled, n, k, seed).unwrap()).unwrap();
        assert_eq!(mix.sets(), shuf.sets());
        for size in 0..=k {
            let by_size = |c: &WeightedCollection| {
                let mut v: Vec<f64> = c.iter().filter(|(s, _)| s.len() == size).map(|e| e.1).collect();
                v.sort_by(f64::total_cmp);
                v
            };
            assert_eq!(by_size(&mix), by_size(&shuf));
        }
        assert_ne!(mix.log_weights(), shuf.log_weights());
        assert_eq!(mix.log_weight(Subset::EMPTY), shuf.log_weight(Subset::EMPTY));
    }

    #[test]
    fn generation_is_deterministic() {
        for fam in Family::ALL {
            let spec = GenSpec::new(fam, 20, 3, 7).unwrap();
            let a = table_file::to_string(&gen_instance(&spec).unwrap());
            let b = table_file::to_string(&gen_instance(&spec).unwrap());
            assert_eq!(a, b);
            let c = gen_instance(&spec).unwrap();
            assert_eq!(c.m(), 1351);
        }
        let a = gen_instance(&GenSpec::new(Family::Flat, 20, 3, 7).unwrap()).unwrap();
        let b = gen_instance(&GenSpec::new(Family::Flat, 20, 3, 8).unwrap()).unwrap();
        assert_ne!(a.log_weights(), b.log_weights());
    }

    #[test]
    fn spec_validation_and_parsing() {
        assert!(GenSpec::new(Family::Flat, 1, 1, 0).is_ok());
        assert!(GenSpec::new(Family::Flat, 3, 0, 0).is_err());
        assert!(GenSpec::new(Family::Flat, 3, 4, 0).is_err());
        assert!(GenSpec::new(Family::Flat, 65, 2, 0).is_err());
        let s: GenSpec = "steep:20:3:7".parse().unwrap();
        assert_eq!(s, GenSpec::new(Family::Steep, 20, 3, 7).unwrap());
        assert!("steep:20:3".parse::<GenSpec>().is_err());
        assert!("hilly:20:3:1".parse::<GenSpec>().is_err());
        assert_eq!(s.id(), "steep-n20-k3-s7");
    }

    #[test]
    fn complete_family_is_lexicographic() {
        let f = complete_family(5, 2);
        assert_eq!(f.len(), 16);
        assert!(f.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn query_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_query(10, 10, &mut rng).unwrap(), Subset::full(10));
        assert_eq!(sample_query(10, 0, &mut rng).unwrap(), Subset::EMPTY);
        assert!(matches!(sample_query(10, 11, &mut rng), Err(Error::SizeOutOfRange { .. })));

        let draws = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..draws {
            let q = sample_query(10, 3, &mut rng).unwrap();
            assert_eq!(q.len(), 3);
            for x in q {
                counts[x] += 1;
            }
        }
        for c in counts {
            let f = c as f64 / draws as f64;
            assert!((f - 0.3).abs() < 0.01, "{f}");
        }
    }
}
