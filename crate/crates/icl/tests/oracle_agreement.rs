mod common;

use icl::oracle::{best_scalar_linear_rate, enumerate_lp_vertices, SearchBudget};
use icl_core::composite::{max_symmetric_rate, DecodingChoice, SearchOptions};
use icl_core::instance::builtin_instance;
use icl_core::lp::{solve_lp, LinearProgram, Relation};
use icl_core::outer::acyclic_symmetric_bound;
use icl_core::rational::ExactRational;
use icl_core::scheme::check_scheme;

#[test]
fn simplex_matches_vertex_enumeration() {
    let tally = common::lp_agreement(0..100);
    assert!(tally.mismatches.is_empty(), "{:?}", tally.mismatches);
    assert!(tally.optimal >= 50, "{tally:?}");
}

#[test]
fn rank_entropy_matches_tabulation() {
    assert!(common::entropy_mismatches(0..50).is_empty());
}

#[test]
fn embedding_reproduces_composite_quantities() {
    for name in ["xor2", "no-side-info(3)"] {
        common::embedding_spot_check(name).unwrap();
    }
}

#[test]
fn xor2_lp_optimum_is_a_vertex() {
    let inst = builtin_instance("xor2").unwrap();
    let choice = DecodingChoice::demands_only(&inst);
    let lp = icl_core::composite::build_composite_lp(
        &inst,
        &choice,
        &icl_core::composite::RateObjective::Symmetric,
    )
    .unwrap();
    let best = enumerate_lp_vertices(&lp.lp)
        .unwrap()
        .iter()
        .map(|v| lp.lp.objective_at(v))
        .max();
    assert_eq!(best, Some(ExactRational::one()));
    assert_eq!(solve_lp(&lp.lp).optimum, best);
}

#[test]
fn infeasible_lp_has_no_vertices() {
    let mut lp = LinearProgram::new();
    let x = lp.add_variable("x");
    lp.set_objective(vec![(x, ExactRational::one())]).unwrap();
    lp.add_constraint(
        vec![(x, ExactRational::one())],
        Relation::Le,
        ExactRational::from(-1i64),
    )
    .unwrap();
    assert!(enumerate_lp_vertices(&lp).unwrap().is_empty());
}

#[test]
fn scalar_oracle_witnesses_certify() {
    let budget = SearchBudget::default();
    for name in ["xor2", "no-side-info(1)", "no-side-info(2)"] {
        let inst = builtin_instance(name).unwrap();
        let r = best_scalar_linear_rate(&inst, &budget).unwrap();
        let inst = inst.with_channel_bits(r.witness.channel_bits());
        let verdict =
            check_scheme(&inst, &r.witness, &DecodingChoice::demands_only(&inst)).unwrap();
        assert!(verdict.pass(), "{name}");
        assert_eq!(verdict.symmetric_rate, r.rate, "{name}");
    }
}

#[test]
fn xor2_oracle_composite_and_outer_agree() {
    let inst = builtin_instance("xor2").unwrap();
    let oracle = best_scalar_linear_rate(&inst, &SearchBudget::default())
        .unwrap()
        .rate;
    let composite = max_symmetric_rate(&inst, &SearchOptions::default())
        .unwrap()
        .normalized_rate(&inst);
    let outer = acyclic_symmetric_bound(&inst).unwrap();
    assert_eq!(oracle, ExactRational::one());
    assert_eq!(composite, oracle);
    assert_eq!(outer, oracle);
}
