use proptest::prelude::*;
use rsd_core::labeling::length_bound;
use rsd_core::protocol::{oracle, run_protocol_with, RunOptions};
use rsd_core::{decode_label, encode_label, gen, Label, Tag};

fn tag() -> impl Strategy<Value = Tag> {
    (0u32..64, any::<bool>()).prop_map(|(id, bit)| Tag::new(id, bit))
}

fn label() -> impl Strategy<Value = Label> {
    (any::<[bool; 7]>(), tag(), tag(), tag()).prop_map(|(markers, l1, l2, l3)| Label { markers, l1, l2, l3 })
}

proptest! {
    #[test]
    fn label_round_trip(lbl in label()) {
        prop_assert_eq!(decode_label(&encode_label(&lbl)), Ok(lbl));
    }

    #[test]
    fn plans_hold_their_invariants(n in 2usize..80, cap in 2usize..12, extra in 0usize..80, seed: u64) {
        let g = gen::random_graph(n, cap, extra, seed).unwrap();
        let o = oracle(&g).unwrap();
        prop_assert_eq!(o.plan.check(&g, &o.decomposition), Ok(()));
        prop_assert_eq!(o.weights.weight[o.decomposition.root], n as u64);
        prop_assert!(o.scheme.max_bits() <= length_bound(g.max_degree() as u64));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn traces_are_deterministic_and_sound(n in 2usize..30, cap in 2usize..6, extra in 0usize..20, seed: u64) {
        let g = gen::random_graph(n, cap, extra, seed).unwrap();
        let opts = RunOptions { record_trace: true, cap_multiplier: 64 };
        let a = run_protocol_with(&g, opts).unwrap();
        let b = run_protocol_with(&g, opts).unwrap();
        let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
        prop_assert!(ta.is_sound(&g));
        prop_assert_eq!(ta.rounds.len() as u64, a.rounds_used);
        prop_assert_eq!(ta, tb);
        prop_assert!(a.outputs.iter().all(|&o| o == Some(n as u64)));
    }
}
