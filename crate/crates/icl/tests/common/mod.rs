//! Seeded generators shared by the oracle suites and the acceptance run.
#![allow(dead_code)]

use icl::oracle::{enumerate_lp_vertices, exhaustive_conditional_entropy};
use icl_core::composite::{solve_choice, DecodingChoice};
use icl_core::gf2::{BitVec, Gf2Matrix};
use icl_core::instance::{builtin_instance, MessageId, MessageSet};
use icl_core::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use icl_core::rational::ExactRational;
use icl_core::scheme::{
    composite_embedding, conditional_entropy, kappa, zero_error_decode_check, Composite,
    DecodeMode, LinearScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Up to 4 variables and 6 integer constraints, most with a box constraint.
pub fn random_lp(seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = LinearProgram::new();
    let n = rng.random_range(1..=4);
    let vars: Vec<_> = (0..n).map(|i| lp.add_variable(format!("x{i}"))).collect();
    let objective = vars
        .iter()
        .map(|&v| (v, ExactRational::from(rng.random_range(-2i64..=4))))
        .collect();
    lp.set_objective(objective).unwrap();
    let m = rng.random_range(1..=5);
    for _ in 0..m {
        let terms = vars
            .iter()
            .map(|&v| (v, ExactRational::from(rng.random_range(-3i64..=3))))
            .collect();
        let relation = match rng.random_range(0..6) {
            0 => Relation::Ge,
            1 => Relation::Eq,
            _ => Relation::Le,
        };
        let rhs = ExactRational::from(rng.random_range(-1i64..=8));
        lp.add_constraint(terms, relation, rhs).unwrap();
    }
    if rng.random_bool(0.8) {
        let terms = vars.iter().map(|&v| (v, ExactRational::one())).collect();
        lp.add_constraint(terms, Relation::Le, ExactRational::from(8i64))
            .unwrap();
    }
    lp
}

#[derive(Debug, Default)]
pub struct LpTally {
    pub optimal: usize,
    pub infeasible: usize,
    pub unbounded: usize,
    pub mismatches: Vec<u64>,
}

/// Simplex optimum against the best vertex, for each seed.
pub fn lp_agreement(seeds: std::ops::Range<u64>) -> LpTally {
    let mut tally = LpTally::default();
    for seed in seeds {
        let lp = random_lp(seed);
        let sol = solve_lp(&lp);
        let vertices = enumerate_lp_vertices(&lp).expect("within the oracle's size");
        let best = vertices.iter().map(|v| lp.objective_at(v)).max();
        let agrees = match sol.status {
            LpStatus::Optimal => {
                tally.optimal += 1;
                lp.is_feasible(&sol.assignment) && sol.optimum == best
            }
            LpStatus::Infeasible => {
                tally.infeasible += 1;
                vertices.is_empty()
            }
            LpStatus::Unbounded => {
                tally.unbounded += 1;
                !vertices.is_empty()
            }
        };
        if !agrees {
            tally.mismatches.push(seed);
        }
    }
    tally
}

fn ids(mask: u32, n: usize) -> MessageSet {
    (0..n)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| MessageId(b as u32 + 1))
        .collect()
}

/// A random linear scheme with at most 10 message bits in total, and a
/// random set of known messages.
pub fn random_scheme(seed: u64) -> (LinearScheme, MessageSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4usize);
    let mut bits: Vec<usize> = (0..n).map(|_| rng.random_range(1..=3)).collect();
    while bits.iter().sum::<usize>() > 10 {
        let i = rng.random_range(0..n);
        bits[i] = (bits[i] - 1).max(1);
    }
    let total: usize = bits.iter().sum();
    let mut starts = vec![0];
    for b in &bits {
        starts.push(starts.last().unwrap() + b);
    }
    let mut composites: Vec<Composite> = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let support = ids(rng.random_range(1u32..1 << n), n);
        if composites.iter().any(|c| c.support == support) {
            continue;
        }
        let rows = (0..rng.random_range(1..=3))
            .map(|_| {
                let mut row = BitVec::zeros(total);
                for m in &support {
                    for c in starts[m.offset()]..starts[m.index()] {
                        row.set(c, rng.random_bool(0.5));
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
    let scheme = LinearScheme::new(bits, channel, composites).unwrap();
    let known = ids(rng.random_range(0u32..1 << n), n);
    (scheme, known)
}

/// Seeds whose rank-based entropy differs from the tabulated one.
pub fn entropy_mismatches(seeds: std::ops::Range<u64>) -> Vec<u64> {
    seeds
        .filter(|&seed| {
            let (scheme, known) = random_scheme(seed);
            assert!(scheme.total_bits() <= 10);
            let exhaustive = exhaustive_conditional_entropy(&scheme, &known).unwrap();
            exhaustive != Some(ExactRational::from(conditional_entropy(&scheme, &known)))
        })
        .collect()
}

/// Embeds a choice's optimal allocation, scaled to integers, and checks that
/// the scheme's entropies are the composite coding quantities: channel
/// entropy given `A_j` is the sum of `S_P` over `P` not inside `A_j`, and
/// `kappa_J` is the sum over `P` inside `A_j ∪ K_j` meeting `J`.
pub fn embedding_spot_check(name: &str) -> Result<(), String> {
    let inst = builtin_instance(name).map_err(|e| e.to_string())?;
    let choice = DecodingChoice::demands_only(&inst);
    let outcome = solve_choice(&inst, choice.clone()).map_err(|e| e.to_string())?;
    let mut scale = ExactRational::one();
    for s in outcome.allocation.rates.values() {
        let (_, den) = (s * &scale).to_i128_parts().unwrap();
        scale = &scale * &ExactRational::from(den as u64);
    }
    let mut scaled = outcome.allocation.clone();
    for s in scaled.rates.values_mut() {
        *s = &*s * &scale;
    }
    let scheme = composite_embedding(&inst, &scaled).map_err(|e| e.to_string())?;
    let sum_where = |keep: &dyn Fn(&MessageSet) -> bool| -> ExactRational {
        scaled
            .rates
            .iter()
            .filter(|(p, _)| keep(p))
            .map(|(_, s)| s.clone())
            .sum()
    };

    for (j, u) in inst.users().iter().enumerate() {
        let h = ExactRational::from(conditional_entropy(&scheme, &u.knows));
        let expected = sum_where(&|p| !p.is_subset(&u.knows));
        if h != expected {
            return Err(format!(
                "{name}: user {} channel entropy {h} != {expected}",
                j + 1
            ));
        }
        let k_set = &choice.sets[j];
        let within: MessageSet = u.knows.union(k_set).copied().collect();
        let members: Vec<MessageId> = k_set.iter().copied().collect();
        for mask in 1u32..1 << members.len() {
            let j_set: MessageSet = members
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, m)| *m)
                .collect();
            if j_set.is_disjoint(&u.demands) {
                continue;
            }
            let k = kappa(&scheme, &inst, j, &j_set, k_set).map_err(|e| e.to_string())?;
            let v_j = sum_where(&|p| p.is_subset(&within) && !p.is_disjoint(&j_set));
            if ExactRational::from(k) != v_j {
                return Err(format!("{name}: user {} kappa {k} != v_J {v_j}", j + 1));
            }
        }
    }
    let decodes = zero_error_decode_check(&inst, &scheme, DecodeMode::Algebraic)
        .map_err(|e| e.to_string())?;
    if !decodes.iter().all(|&b| b) {
        return Err(format!("{name}: embedded scheme does not decode"));
    }
    Ok(())
}
