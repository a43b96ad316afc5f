use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsetq::engines::VisitLog;
use subsetq::generators::{gen_instance, Family, GenSpec};
use subsetq::oracle::{brute_force_weight, relevant_count, zeta_all};
use subsetq::ordering::{ordering_log_score, NodeTables, Ordering};
use subsetq::sampling::{collect_trace, sample_many};
use subsetq::{EngineKind, IndexedCollection, Subset, WeightedCollection};

const REL: f64 = 1e-9;

fn arb_collection() -> impl Strategy<Value = WeightedCollection> {
    (1usize..=9).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        (
            Just(n),
            prop::collection::vec((0..=full, -30.0f64..30.0), 1..24),
            -40.0f64..10.0,
        )
            .prop_map(|(n, raw, fill)| {
                let mut raw: Vec<(Subset, f64)> = raw.into_iter().map(|(m, w)| (Subset::from_mask(m), w)).collect();
                raw.sort_by_key(|e| e.0);
                raw.dedup_by_key(|e| e.0);
                WeightedCollection::downward_closure(n, raw, fill).unwrap()
            })
    })
}

fn arb_generated() -> impl Strategy<Value = WeightedCollection> {
    (0usize..4, 1usize..=10, 1usize..=4, any::<u64>()).prop_map(|(f, n, k, seed)| {
        gen_instance(&GenSpec::new(Family::ALL[f], n, k.min(n), seed).unwrap()).unwrap()
    })
}

fn arb_instance() -> impl Strategy<Value = WeightedCollection> {
    prop_oneof![arb_collection(), arb_generated()]
}

fn query_for(c: &WeightedCollection, mask: u64) -> Subset {
    Subset::from_mask(mask & Subset::full(c.n()).mask())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn certificates_hold(c in arb_instance(), masks in prop::collection::vec(any::<u64>(), 8)) {
        let zeta = zeta_all(&c).unwrap();
        let idx = IndexedCollection::new(c.clone());
        for mask in masks {
            let q = query_for(&c, mask);
            let exact = zeta[q.mask() as usize];
            for d in [0.0, 0.01, 0.1, 0.5, 1.0] {
                for engine in EngineKind::ALL {
                    let r = idx.count(engine, q, d).unwrap();
                    prop_assert!(r.log_total <= exact + REL, "{engine} d={d} overshoots");
                    if d < 1.0 {
                        prop_assert!(r.log_total >= exact + (1.0 - d).ln() - REL,
                            "{engine} d={d} on {q}: {} vs {exact}", r.log_total);
                    }
                    if d == 0.0 && exact.is_finite() {
                        prop_assert!((r.log_total - exact).abs() <= REL * exact.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn tolerance_one_accumulates_nothing(c in arb_instance(), mask in any::<u64>()) {
        let idx = IndexedCollection::new(c.clone());
        let q = query_for(&c, mask);
        for engine in [EngineKind::Sorted, EngineKind::Treedy, EngineKind::Ideal] {
            let r = idx.count(engine, q, 1.0).unwrap();
            prop_assert_eq!(r.log_total, f64::NEG_INFINITY);
            prop_assert_eq!(r.relevant_accumulated, 0);
        }
    }

    #[test]
    fn exact_walk_skips_only_irrelevant_subtrees(c in arb_instance(), mask in any::<u64>()) {
        let idx = IndexedCollection::new(c.clone());
        let q = query_for(&c, mask);
        let mut log = VisitLog::default();
        let r = idx.count_with(EngineKind::Exact, q, 0.0, &mut log).unwrap();
        // Every relevant set is reached, and every visit has a relevant parent.
        prop_assert_eq!(r.relevant_accumulated, relevant_count(&c, q));
        for v in &log.visits {
            prop_assert_eq!(v.relevant, v.set.is_subset_of(q));
            if let Some(top) = v.set.max_element() {
                prop_assert!(v.set.without(top).is_subset_of(q));
            }
        }
        prop_assert!(r.is_exact);
    }

    #[test]
    fn ideal_is_minimal(c in arb_instance(), mask in any::<u64>(), d in 0.0f64..1.0) {
        let idx = IndexedCollection::new(c.clone());
        let q = query_for(&c, mask);
        let ideal = idx.count(EngineKind::Ideal, q, d).unwrap().relevant_accumulated;
        for engine in [EngineKind::Exact, EngineKind::Sorted, EngineKind::Treedy] {
            prop_assert!(idx.count(engine, q, d).unwrap().relevant_accumulated >= ideal);
        }
    }

    #[test]
    fn greedy_tree_identities(c in arb_instance()) {
        let idx = IndexedCollection::new(c.clone());
        let t = idx.greedy_tree();
        let w = c.scaled_weights();
        for node in 0..t.len() {
            let s = t.set(node);
            // The subtree of S holds the sets that extend S by larger elements.
            let below: f64 = c.sets().iter().enumerate()
                .filter(|(_, x)| s.is_subset_of(**x) && Subset::from_mask(x.mask() & !s.mask()).iter().all(|e| s.max_element().is_none_or(|m| e > m)))
                .map(|(i, _)| w[i])
                .sum();
            prop_assert!((t.weight_potential(node) - below).abs() <= REL * below.max(1e-300));
            let sons: Vec<usize> = t.sons(node).collect();
            let mut lex: Vec<usize> = c.sons(node).iter().map(|&x| x as usize).collect();
            lex.sort_unstable();
            let mut sorted = sons.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, lex);
            for pair in sons.windows(2) {
                prop_assert!(t.weight_potential(pair[0]) >= t.weight_potential(pair[1]) * (1.0 - REL));
                let chain = t.weight_potential(pair[0]) + t.aggregate_potential(pair[1]);
                prop_assert!((t.aggregate_potential(pair[0]) - chain).abs() <= REL * chain);
            }
        }
        prop_assert!((t.weight_potential(0) - w.iter().sum::<f64>()).abs() <= REL * t.weight_potential(0));
    }

    #[test]
    fn runs_are_deterministic(c in arb_instance(), mask in any::<u64>(), d in 0.0f64..1.0, seed in any::<u64>()) {
        let a = IndexedCollection::new(c.clone());
        let b = IndexedCollection::new(c.clone());
        let q = query_for(&c, mask);
        for engine in EngineKind::ALL {
            let (mut la, mut lb) = (VisitLog::default(), VisitLog::default());
            prop_assert_eq!(a.count_with(engine, q, d, &mut la).unwrap(), b.count_with(engine, q, d, &mut lb).unwrap());
            prop_assert_eq!(la, lb);
        }
        // Fails only when every relevant weight underflows.
        if let Ok(trace) = collect_trace(&a, EngineKind::Treedy, q, d) {
            prop_assert_eq!(sample_many(&trace, 50, seed), sample_many(&trace, 50, seed));
        }
    }

    #[test]
    fn shift_keeps_visit_order(c in arb_instance(), mask in any::<u64>(), d in 0.0f64..1.0, shift in -80.0f64..80.0) {
        let a = IndexedCollection::new(c.clone());
        let b = IndexedCollection::new(c.shifted(shift).unwrap());
        let q = query_for(&c, mask);
        for engine in EngineKind::ALL {
            let (mut la, mut lb) = (VisitLog::default(), VisitLog::default());
            let ra = a.count_with(engine, q, d, &mut la).unwrap();
            let rb = b.count_with(engine, q, d, &mut lb).unwrap();
            prop_assert_eq!(&la.visits, &lb.visits);
            prop_assert_eq!(la.accumulated_sets(), lb.accumulated_sets());
            if ra.log_total.is_finite() {
                prop_assert!((rb.log_total - ra.log_total - shift).abs() <= 1e-9 * shift.abs().max(ra.log_total.abs()).max(1.0));
            }
        }
    }
}

fn node_tables(n: usize, seed: u64) -> (NodeTables, Vec<WeightedCollection>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables: Vec<WeightedCollection> = (0..n)
        .map(|_| {
            let spec = GenSpec::new(Family::Flat, n - 1, 2.min(n - 1), rand::Rng::gen(&mut rng)).unwrap();
            gen_instance(&spec).unwrap()
        })
        .collect();
    (NodeTables::new(tables.clone()).unwrap(), tables)
}

#[test]
fn engines_agree_on_ordering_scores_without_tolerance() {
    let (t, tables) = node_tables(5, 12);
    for o in Ordering::all(5) {
        let mut before = Subset::EMPTY;
        let mut oracle = 0.0;
        for &v in o.nodes() {
            oracle += brute_force_weight(&tables[v], NodeTables::to_local(v, before));
            before = before.with(v);
        }
        for engine in EngineKind::ALL {
            let s = ordering_log_score(&t, &o, 0.0, engine).unwrap();
            assert!((s - oracle).abs() <= REL * oracle.abs().max(1.0), "{engine} on {o}");
        }
    }
}
