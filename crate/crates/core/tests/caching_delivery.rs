use icl_core::caching::{
    cman_place, decode_all_users, deliver, dman_deliver, dman_place, r_c_opt, r_c_opt_envelope,
    r_cman, reduce_to_index_coding, reduced_load, subsets_of_size, synthesize_theorem4_scheme,
    verify_theorem4, CacheError, DeliveryMode, DemandVector, FileLibrary, SubfileMap, UserSet,
};
use icl_core::instance::MessageId;
use icl_core::rational::{binomial, ExactRational};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

fn dv(d: &[usize], n: usize) -> DemandVector {
    DemandVector::new(d.to_vec(), n).unwrap()
}

fn users(set: &[usize]) -> UserSet {
    UserSet::from_users(set.iter().copied())
}

#[test]
fn two_user_reduction() {
    let map = SubfileMap::centralized(2, 2, 1, 2).unwrap();
    let r = reduce_to_index_coding(&map, &dv(&[1, 2], 2), 1).unwrap();
    assert_eq!(r.instance.num_messages(), 4);
    let id = |i, w: &[usize]| r.message_of(i, users(w)).unwrap();
    let u1 = r.instance.user(1);
    assert_eq!(u1.demands, [id(1, &[2])].into_iter().collect());
    assert_eq!(u1.knows, [id(1, &[1]), id(2, &[1])].into_iter().collect());
}

#[test]
fn nothing_cached_means_no_side_information() {
    let map = SubfileMap::centralized(3, 2, 0, 4).unwrap();
    let r = reduce_to_index_coding(&map, &dv(&[1, 2, 2], 2), 1).unwrap();
    assert!(r.instance.users().iter().all(|u| u.knows.is_empty()));
}

#[test]
fn common_demand_reduction() {
    let map = SubfileMap::centralized(3, 3, 1, 3).unwrap();
    let r = reduce_to_index_coding(&map, &dv(&[1, 1, 1], 3), 1).unwrap();
    assert_eq!(r.instance.num_messages(), 3);
    assert!(r.instance.users().iter().all(|u| u.demands.len() == 2));
}

#[test]
fn full_caches_leave_nobody() {
    let map = SubfileMap::centralized(2, 2, 2, 1).unwrap();
    let err = reduce_to_index_coding(&map, &dv(&[1, 2], 2), 1).unwrap_err();
    assert_eq!(err, CacheError::EmptyDemand { users: vec![1, 2] });
}

#[test]
fn theorem4_reference_cases() {
    for (k, n, t, d, load) in [
        (4, 2, 1, vec![1, 2, 1, 2], q(5, 4)),
        (3, 3, 1, vec![1, 2, 3], q(1, 1)),
        (2, 1, 1, vec![1, 1], q(1, 2)),
    ] {
        let report = verify_theorem4(k, n, t, &dv(&d, n)).unwrap();
        assert!(report.pass, "K={k} N={n} t={t}");
        assert!(report.worst_case);
        assert_eq!(report.load, load);
        assert_eq!(report.load, r_c_opt(k, n, t).unwrap());
    }
}

#[test]
fn synthesized_channel_counts_payloads() {
    let s = synthesize_theorem4_scheme(4, 2, 1, &dv(&[1, 2, 1, 2], 2), 3).unwrap();
    assert_eq!(s.scheme.channel_bits(), 15);
    // t = K - 1 with distinct demands: one payload XORing every user's piece.
    let s = synthesize_theorem4_scheme(3, 3, 2, &dv(&[1, 2, 3], 3), 1).unwrap();
    assert_eq!(s.scheme.composites().len(), 1);
    assert_eq!(s.scheme.composites()[0].support.len(), 3);
    assert_eq!(s.scheme.channel_bits(), 1);
}

#[test]
fn synthesized_supports_are_payload_sets() {
    let d = dv(&[1, 1, 2], 2);
    let s = synthesize_theorem4_scheme(3, 2, 1, &d, 1).unwrap();
    let leaders = d.leaders();
    let expected: Vec<_> = subsets_of_size(3, 2)
        .into_iter()
        .filter(|w| w.intersects(leaders))
        .map(|w| {
            w.members()
                .map(|k| s.reduction.message_of(d.of(k), w.without(k)).unwrap())
                .collect::<std::collections::BTreeSet<MessageId>>()
        })
        .collect();
    let got: Vec<_> = s
        .scheme
        .composites()
        .iter()
        .map(|c| c.support.clone())
        .collect();
    assert_eq!(got, expected);
}

#[test]
fn decentralized_placement_is_reproducible() {
    let lib = FileLibrary::random(3, 2000, 7).unwrap();
    let a = dman_place(3, &lib, &q(3, 2), 11).unwrap();
    let b = dman_place(3, &lib, &q(3, 2), 11).unwrap();
    assert_eq!(a.1, b.1);
    let c = dman_place(3, &lib, &q(3, 2), 12).unwrap();
    assert_ne!(a.1, c.1);
}

#[test]
fn decentralized_subfile_fractions() {
    let bits = 100_000;
    let lib = FileLibrary::random(2, bits, 3).unwrap();
    let (_, map) = dman_place(3, &lib, &q(1, 1), 5).unwrap();
    for file in 1..=2 {
        for size in 0..=3 {
            for w in subsets_of_size(3, size) {
                let share = map.len(file, w) as f64 / bits as f64;
                assert!((share - 0.125).abs() <= 0.03 * 0.125, "{w}: {share}");
            }
        }
    }
}

#[test]
fn decentralized_decodes_everywhere() {
    let bits = 10_000;
    for k in 1..=4usize {
        for n in 1..=4usize {
            let lib = FileLibrary::random(n, bits, (k * 10 + n) as u64).unwrap();
            let m = q(n as i64, 3);
            let (cache, map) = dman_place(k, &lib, &m, 1).unwrap();
            let demands: Vec<DemandVector> = if k <= 3 {
                DemandVector::all(k, n).collect()
            } else {
                vec![
                    dv(&(0..k).map(|u| u % n + 1).collect::<Vec<_>>(), n),
                    dv(&vec![1; k], n),
                ]
            };
            for d in demands {
                let tx = dman_deliver(&lib, &map, &d).unwrap();
                for (u, file) in decode_all_users(&map, &cache, &tx, &d)
                    .into_iter()
                    .enumerate()
                {
                    assert_eq!(file.unwrap(), *lib.file(d.of(u + 1)), "K={k} N={n} d=({d})");
                }
            }
        }
    }
}

#[test]
fn nearly_full_caches_send_almost_nothing() {
    let lib = FileLibrary::random(2, 20_000, 1).unwrap();
    let (_, map) = dman_place(2, &lib, &q(199, 100), 2).unwrap();
    let tx = dman_deliver(&lib, &map, &dv(&[1, 2], 2)).unwrap();
    assert!(tx.load() < q(1, 50));
}

#[test]
fn envelope_meets_corner_points() {
    for k in 1..=5usize {
        for n in 1..=5usize {
            for t in 0..=k {
                let m = ExactRational::from(t * n) / ExactRational::from(k);
                let env = r_c_opt_envelope(k, n, &m).unwrap();
                assert!(env <= r_c_opt(k, n, t).unwrap());
            }
            let mid = ExactRational::from(n) / ExactRational::from(2usize);
            let env = r_c_opt_envelope(k, n, &mid).unwrap();
            assert!(env >= ExactRational::zero());
        }
    }
    // With N >= K every corner point lies on the envelope.
    assert_eq!(
        r_c_opt_envelope(4, 4, &q(1, 1)).unwrap(),
        r_c_opt(4, 4, 1).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centralized_loads_and_decoding(
        k in 1usize..=4,
        n in 1usize..=3,
        t_frac in 0.0f64..=1.0,
        raw in prop::collection::vec(1usize..=3, 4),
        seed in any::<u64>(),
    ) {
        let t = (t_frac * k as f64).round() as usize;
        let d = dv(&raw.iter().take(k).map(|&x| (x - 1) % n + 1).collect::<Vec<_>>(), n);
        let bits = binomial(k as u64, t as u64) as usize * 3;
        let lib = FileLibrary::random(n, bits, seed).unwrap();
        let (cache, map) = cman_place(k, t, &lib).unwrap();
        for mode in [DeliveryMode::Full, DeliveryMode::Reduced] {
            let tx = deliver(&lib, &map, &d, mode).unwrap();
            let expected = match mode {
                DeliveryMode::Full => r_cman(k, t).unwrap(),
                DeliveryMode::Reduced => reduced_load(k, d.distinct().len(), t).unwrap(),
            };
            prop_assert_eq!(tx.load(), expected);
            for (u, file) in decode_all_users(&map, &cache, &tx, &d).into_iter().enumerate() {
                prop_assert_eq!(&file.unwrap(), lib.file(d.of(u + 1)));
            }
        }
    }
}
