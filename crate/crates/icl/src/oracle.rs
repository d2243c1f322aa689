//! Brute-force baselines: exhaustive scalar linear schemes, LP vertex
//! enumeration and entropies by counting. Exponential by design and kept out
//! of the main computation paths.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use icl_core::gf2::{BitVec, Gf2Matrix};
use icl_core::instance::{IndexCodingInstance, MessageSet};
use icl_core::lp::LinearProgram;
use icl_core::rational::ExactRational;
use icl_core::scheme::{zero_error_decode_check, Composite, DecodeMode, LinearScheme};

pub const MAX_ORACLE_MESSAGES: usize = 4;
pub const MAX_ORACLE_CHANNEL_BITS: u64 = 2;
pub const MAX_VERTEX_VARIABLES: usize = 6;
pub const MAX_VERTEX_CONSTRAINTS: usize = 10;
pub const MAX_ENTROPY_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_channel_bits: u64,
    /// Common bit length `L` of every message.
    pub max_msg_bits: usize,
    pub max_candidates: u64,
    pub time_cap: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_channel_bits: 2,
            max_msg_bits: 2,
            max_candidates: 1 << 24,
            time_cap: Duration::from_secs(60),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// `L / c` of the best decodable scheme found.
    pub rate: ExactRational,
    pub witness: LinearScheme,
    pub candidates: u64,
}

/// Tries every encoding matrix `X = M U` with `c <= max_channel_bits`
/// channel bits and a common message length `L <= max_msg_bits`, keeping
/// the best `L / c` for which every user decodes with zero error.
pub fn best_scalar_linear_rate(
    inst: &IndexCodingInstance,
    budget: &SearchBudget,
) -> Result<OracleResult, OracleError> {
    let n = inst.num_messages();
    if n > MAX_ORACLE_MESSAGES {
        return Err(OracleError::TooLarge(format!(
            "{n} messages, at most {MAX_ORACLE_MESSAGES}"
        )));
    }
    if budget.max_channel_bits > MAX_ORACLE_CHANNEL_BITS {
        return Err(OracleError::BudgetExceeded(format!(
            "{} channel bits, at most {MAX_ORACLE_CHANNEL_BITS}",
            budget.max_channel_bits
        )));
    }
    let start = Instant::now();
    let mut shapes: Vec<(u64, usize)> = (1..=budget.max_channel_bits)
        .flat_map(|c| (1..=budget.max_msg_bits).map(move |l| (c, l)))
        .collect();
    // Best rate first; among equal rates the smaller channel.
    shapes.sort_by(|a, b| {
        let ra = ExactRational::from(a.1) / ExactRational::from(a.0);
        let rb = ExactRational::from(b.1) / ExactRational::from(b.0);
        rb.cmp(&ra).then(a.0.cmp(&b.0))
    });
    let support: MessageSet = inst.all_messages();
    let mut candidates = 0u64;
    for (c, l) in shapes {
        let cols = n * l;
        let entries = c as usize * cols;
        if entries >= 63 {
            return Err(OracleError::BudgetExceeded(format!(
                "{entries} matrix entries"
            )));
        }
        for m in 0u64..1 << entries {
            candidates += 1;
            if candidates > budget.max_candidates {
                return Err(OracleError::BudgetExceeded(format!(
                    "more than {} candidates",
                    budget.max_candidates
                )));
            }
            if candidates.is_multiple_of(1024) && start.elapsed() > budget.time_cap {
                return Err(OracleError::BudgetExceeded("time cap reached".into()));
            }
            let rows = (0..c as usize)
                .map(|r| BitVec::from_u64(cols, m >> (r * cols)))
                .collect();
            let scheme = LinearScheme::new(
                vec![l; n],
                c,
                vec![Composite {
                    support: support.clone(),
                    map: Gf2Matrix::from_rows(cols, rows),
                }],
            )
            .expect("full support admits any matrix");
            let ok = zero_error_decode_check(inst, &scheme, DecodeMode::Algebraic)
                .expect("algebraic mode has no size limit");
            if ok.iter().all(|&b| b) {
                return Ok(OracleResult {
                    rate: ExactRational::from(l) / ExactRational::from(c),
                    witness: scheme,
                    candidates,
                });
            }
        }
    }
    Ok(OracleResult {
        rate: ExactRational::zero(),
        witness: LinearScheme::new(vec![0; n], 1, Vec::new()).expect("empty scheme"),
        candidates,
    })
}

/// Every basic feasible solution of `lp` (with `x >= 0`), found by solving
/// each square subsystem of tight constraints.
pub fn enumerate_lp_vertices(lp: &LinearProgram) -> Result<Vec<Vec<ExactRational>>, OracleError> {
    let n = lp.num_variables();
    let m = lp.constraints().len();
    if n > MAX_VERTEX_VARIABLES || m > MAX_VERTEX_CONSTRAINTS {
        return Err(OracleError::TooLarge(format!(
            "{n} variables and {m} constraints (limits {MAX_VERTEX_VARIABLES} and {MAX_VERTEX_CONSTRAINTS})"
        )));
    }
    // Rows a.x = b candidates: every constraint, then x_i = 0.
    let mut rows: Vec<(Vec<ExactRational>, ExactRational)> = lp
        .constraints()
        .iter()
        .map(|c| {
            let mut a = vec![ExactRational::zero(); n];
            for (v, coef) in &c.terms {
                a[v.0] += coef;
            }
            (a, c.rhs.clone())
        })
        .collect();
    for i in 0..n {
        let mut a = vec![ExactRational::zero(); n];
        a[i] = ExactRational::one();
        rows.push((a, ExactRational::zero()));
    }
    let mut found: Vec<Vec<ExactRational>> = Vec::new();
    for subset in combinations(rows.len(), n) {
        let a: Vec<Vec<ExactRational>> = subset.iter().map(|&k| rows[k].0.clone()).collect();
        let b: Vec<ExactRational> = subset.iter().map(|&k| rows[k].1.clone()).collect();
        let Some(x) = solve_square(a, b) else {
            continue;
        };
        if lp.is_feasible(&x) && !found.contains(&x) {
            found.push(x);
        }
    }
    found.sort();
    Ok(found)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == k {
            out.push(acc.clone());
            return;
        }
        for i in start..n {
            acc.push(i);
            rec(i + 1, n, k, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gauss-Jordan elimination; `None` if singular.
fn solve_square(
    mut a: Vec<Vec<ExactRational>>,
    mut b: Vec<ExactRational>,
) -> Option<Vec<ExactRational>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot) {
                    *x -= &(&f * p);
                }
                let delta = &f * &b[col];
                b[r] -= &delta;
            }
        }
    }
    Some(b)
}

/// `H(X | U_known)` by tabulating `X` over every message assignment.
/// `None` if some conditional distribution is not uniform on a power-of-two
/// support, in which case the value is not an integer average.
pub fn exhaustive_conditional_entropy(
    scheme: &LinearScheme,
    known: &MessageSet,
) -> Result<Option<ExactRational>, OracleError> {
    let total = scheme.total_bits();
    if total > MAX_ENTROPY_BITS {
        return Err(OracleError::TooLarge(format!(
            "{total} message bits, at most {MAX_ENTROPY_BITS}"
        )));
    }
    let known_cols: Vec<usize> = known
        .iter()
        .filter(|m| m.index() <= scheme.num_messages())
        .flat_map(|&m| scheme.column_range(m))
        .collect();
    let m = scheme.global_matrix();
    // known-bit pattern -> histogram of X
    let mut groups: BTreeMap<u64, BTreeMap<BitVec, u64>> = BTreeMap::new();
    for u in 0u64..1 << total {
        let x = m.mul_vec(&BitVec::from_u64(total, u));
        let key = known_cols
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &c)| acc | (u >> c & 1) << k);
        *groups.entry(key).or_default().entry(x).or_default() += 1;
    }
    let mut sum = ExactRational::zero();
    for hist in groups.values() {
        let support = hist.len() as u64;
        let first = *hist.values().next().expect("nonempty group");
        if !support.is_power_of_two() || hist.values().any(|&c| c != first) {
            return Ok(None);
        }
        sum += ExactRational::from(u64::from(support.trailing_zeros()));
    }
    Ok(Some(sum / ExactRational::from(groups.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use icl_core::instance::{builtin_instance, message_set, UserSpec};
    use icl_core::lp::Relation;
    use icl_core::lp::{solve_lp, LpStatus};

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn xor2_oracle() {
        let inst = builtin_instance("xor2").unwrap();
        let r = best_scalar_linear_rate(&inst, &SearchBudget::default()).unwrap();
        assert_eq!(r.rate, q(1, 1));
        assert_eq!(
            r.witness.global_matrix().row(0),
            &BitVec::parse("11").unwrap()
        );
    }

    #[test]
    fn no_side_info_needs_two_bits() {
        let inst = builtin_instance("no-side-info(2)").unwrap();
        let r = best_scalar_linear_rate(&inst, &SearchBudget::default()).unwrap();
        assert_eq!(r.rate, q(1, 2));
        assert_eq!(r.witness.channel_bits(), 2);
    }

    #[test]
    fn single_user_identity() {
        let inst = IndexCodingInstance::new(
            1,
            vec![UserSpec::new(message_set([1]), MessageSet::new())],
            1,
        );
        let r = best_scalar_linear_rate(&inst, &SearchBudget::default()).unwrap();
        assert_eq!(r.rate, q(1, 1));
    }

    #[test]
    fn budget_limits() {
        let inst = builtin_instance("example1").unwrap();
        assert!(matches!(
            best_scalar_linear_rate(&inst, &SearchBudget::default()),
            Err(OracleError::TooLarge(_))
        ));
        let tight = SearchBudget {
            max_candidates: 2,
            ..SearchBudget::default()
        };
        let inst = builtin_instance("no-side-info(2)").unwrap();
        assert!(matches!(
            best_scalar_linear_rate(&inst, &tight),
            Err(OracleError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn vertices_of_an_interval() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x");
        lp.set_objective(vec![(x, q(1, 1))]).unwrap();
        lp.add_constraint(vec![(x, q(1, 1))], Relation::Le, q(1, 1))
            .unwrap();
        assert_eq!(
            enumerate_lp_vertices(&lp).unwrap(),
            vec![vec![q(0, 1)], vec![q(1, 1)]]
        );
        let mut bad = LinearProgram::new();
        let x = bad.add_variable("x");
        bad.add_constraint(vec![(x, q(1, 1))], Relation::Le, q(-1, 1))
            .unwrap();
        assert!(enumerate_lp_vertices(&bad).unwrap().is_empty());
        assert_eq!(solve_lp(&bad).status, LpStatus::Infeasible);
    }

    #[test]
    fn redundant_equalities_keep_their_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_variable("x");
        lp.add_constraint(vec![(x, q(1, 1))], Relation::Eq, q(0, 1))
            .unwrap();
        lp.add_constraint(vec![(x, q(2, 1))], Relation::Eq, q(0, 1))
            .unwrap();
        assert_eq!(enumerate_lp_vertices(&lp).unwrap(), vec![vec![q(0, 1)]]);
    }

    #[test]
    fn counting_entropy() {
        let s = icl_core::scheme::builtin_scheme("example2").unwrap();
        let h = exhaustive_conditional_entropy(&s, &message_set([1, 4, 6])).unwrap();
        assert_eq!(h, Some(q(3, 1)));
        let h = exhaustive_conditional_entropy(&s, &message_set([1, 2, 3, 4, 5, 6])).unwrap();
        assert_eq!(h, Some(q(0, 1)));
    }
}
