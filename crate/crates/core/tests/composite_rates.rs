use icl_core::composite::{
    certify, certify_time_sharing, max_symmetric_rate, max_weighted_rate,
    time_shared_symmetric_rate, SearchOptions,
};
use icl_core::instance::{builtin_instance, IndexCodingInstance, MessageId, MessageSet, UserSpec};
use icl_core::outer::acyclic_symmetric_bound;
use icl_core::rational::ExactRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

#[test]
fn small_builtins() {
    let opts = SearchOptions::default();
    for (name, rate) in [
        ("xor2", q(1, 1)),
        ("no-side-info(3)", q(1, 3)),
        ("no-side-info(1)", q(1, 1)),
    ] {
        let inst = builtin_instance(name).unwrap();
        let per_choice = max_symmetric_rate(&inst, &opts).unwrap();
        assert_eq!(per_choice.symmetric_rate, rate, "{name}");
        assert!(certify(&inst, &per_choice));
        let hull = time_shared_symmetric_rate(&inst, &opts).unwrap();
        assert_eq!(hull.symmetric_rate, rate, "{name}");
        assert!(certify_time_sharing(&inst, &hull));
    }
}

#[test]
fn rates_scale_with_channel_bits() {
    let opts = SearchOptions::default();
    let inst = builtin_instance("no-side-info(2)")
        .unwrap()
        .with_channel_bits(3);
    assert_eq!(
        max_symmetric_rate(&inst, &opts).unwrap().symmetric_rate,
        q(3, 2)
    );
}

fn ids(mask: u32, n: usize) -> MessageSet {
    (0..n)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| MessageId(b as u32 + 1))
        .collect()
}

/// User `j` demands message `j` and knows a random subset of the others.
fn unicast() -> impl Strategy<Value = IndexCodingInstance> {
    (2usize..=4).prop_flat_map(|n| {
        prop::collection::vec(any::<u32>(), n).prop_map(move |masks| {
            let users = masks
                .iter()
                .enumerate()
                .map(|(j, m)| UserSpec::new(ids(1 << j, n), ids(m & !(1 << j), n)))
                .collect();
            IndexCodingInstance::new(n, users, 1)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hull_sits_between_per_choice_and_acyclic_bound(inst in unicast()) {
        let opts = SearchOptions::default();
        let per_choice = max_symmetric_rate(&inst, &opts).unwrap();
        let hull = time_shared_symmetric_rate(&inst, &opts).unwrap();
        prop_assert!(certify(&inst, &per_choice));
        prop_assert!(certify_time_sharing(&inst, &hull));
        prop_assert!(per_choice.symmetric_rate <= hull.symmetric_rate);
        prop_assert!(hull.symmetric_rate <= acyclic_symmetric_bound(&inst).unwrap());
    }

    #[test]
    fn dual_weights_bound_every_choice(inst in unicast()) {
        let opts = SearchOptions::default();
        let hull = time_shared_symmetric_rate(&inst, &opts).unwrap();
        let best = max_weighted_rate(&inst, &hull.weights, &opts).unwrap();
        prop_assert_eq!(best.value, Some(hull.symmetric_rate));
    }
}
