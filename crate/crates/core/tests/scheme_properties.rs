use icl_core::composite::DecodingChoice;
use icl_core::gf2::{BitVec, Gf2Matrix};
use icl_core::instance::{IndexCodingInstance, MessageId, MessageSet, UserSpec};
use icl_core::scheme::{
    check_scheme, conditional_entropy, kappa, zero_error_decode_check, Composite, DecodeMode,
    LinearScheme,
};
use proptest::prelude::*;

fn ids(mask: u32, n: usize) -> MessageSet {
    (0..n)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| MessageId(b as u32 + 1))
        .collect()
}

/// Instances with one demanded message per user and random side information.
fn instance() -> impl Strategy<Value = IndexCodingInstance> {
    (2usize..=5).prop_flat_map(|n| {
        prop::collection::vec((0..n, any::<u32>()), 1..=n).prop_map(move |users| {
            let specs = users
                .into_iter()
                .map(|(d, mask)| {
                    let knows = ids(mask & !(1 << d), n);
                    UserSpec::new(ids(1 << d, n), knows)
                })
                .collect();
            IndexCodingInstance::new(n, specs, 2)
        })
    })
}

/// Random linear schemes: up to three composites with random supports and
/// one or two rows each, confined to the support's columns.
fn scheme_for(n: usize) -> impl Strategy<Value = LinearScheme> {
    (
        prop::collection::vec(1usize..=2, n),
        prop::collection::vec((1u32..1 << n, 1usize..=2, any::<u64>()), 0..=3),
    )
        .prop_map(move |(bits, comps)| {
            let total: usize = bits.iter().sum();
            let mut starts = vec![0];
            for b in &bits {
                starts.push(starts.last().unwrap() + b);
            }
            let mut composites: Vec<Composite> = Vec::new();
            for (mask, rows, seed) in comps {
                let support = ids(mask, n);
                if composites.iter().any(|c| c.support == support) {
                    continue;
                }
                let mut state = seed;
                let rows = (0..rows)
                    .map(|_| {
                        let mut row = BitVec::zeros(total);
                        for m in &support {
                            for c in starts[m.offset()]..starts[m.index()] {
                                state = state
                                    .wrapping_mul(6364136223846793005)
                                    .wrapping_add(1442695040888963407);
                                row.set(c, state >> 63 == 1);
                            }
                        }
                        row
                    })
                    .collect();
                composites.push(Composite {
                    support,
                    map: Gf2Matrix::from_rows(total, rows),
                });
            }
            let channel = composites.iter().map(|c| c.map.num_rows()).sum::<usize>() as u64;
            LinearScheme::new(bits, channel.max(1), composites).unwrap()
        })
}

fn instance_and_scheme() -> impl Strategy<Value = (IndexCodingInstance, LinearScheme)> {
    instance().prop_flat_map(|inst| {
        let n = inst.num_messages();
        (Just(inst), scheme_for(n))
    })
}

proptest! {
    #[test]
    fn entropy_shrinks_with_more_side_information(
        (inst, scheme) in instance_and_scheme(),
        a in any::<u32>(),
        b in any::<u32>(),
    ) {
        let n = inst.num_messages();
        let small = ids(a, n);
        let large: MessageSet = small.union(&ids(b, n)).copied().collect();
        let h_small = conditional_entropy(&scheme, &small);
        let h_large = conditional_entropy(&scheme, &large);
        prop_assert!(h_large <= h_small);
        prop_assert!(h_small <= scheme.channel_bits() as usize);
        prop_assert_eq!(conditional_entropy(&scheme, &inst.all_messages()), 0);
    }

    #[test]
    fn kappa_is_monotone_and_bounded((inst, scheme) in instance_and_scheme(), extra in any::<u32>()) {
        let n = inst.num_messages();
        for (j, u) in inst.users().iter().enumerate() {
            let free = ids(extra, n);
            let k_set: MessageSet = u.demands.union(&free).copied()
                .filter(|m| !u.knows.contains(m)).collect();
            let others: Vec<MessageId> = k_set.difference(&u.demands).copied().collect();
            let mut previous = 0;
            let mut j_set = u.demands.clone();
            for step in 0..=others.len() {
                if step > 0 {
                    j_set.insert(others[step - 1]);
                }
                let value = kappa(&scheme, &inst, j, &j_set, &k_set).unwrap();
                let bound: usize = j_set.iter().map(|m| scheme.msg_bits()[m.offset()]).sum();
                prop_assert!(value >= previous);
                prop_assert!(value <= bound);
                previous = value;
            }
        }
    }

    #[test]
    fn decode_modes_agree((inst, scheme) in instance_and_scheme()) {
        let a = zero_error_decode_check(&inst, &scheme, DecodeMode::Algebraic).unwrap();
        let e = zero_error_decode_check(&inst, &scheme, DecodeMode::Enumerate).unwrap();
        prop_assert_eq!(a, e);
    }

    #[test]
    fn mac_conditions_match_decodability((inst, scheme) in instance_and_scheme()) {
        let verdict = check_scheme(&inst, &scheme, &DecodingChoice::demands_only(&inst)).unwrap();
        let decodes = zero_error_decode_check(&inst, &scheme, DecodeMode::Algebraic).unwrap();
        for (j, ok) in decodes.iter().enumerate() {
            prop_assert_eq!(verdict.mac_ok(j), *ok);
        }
    }
}
