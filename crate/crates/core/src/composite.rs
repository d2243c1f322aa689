//! Composite coding inner bound.
//!
//! For a fixed decoding choice `(K_1, ..., K_K')` the achievable region is a
//! polyhedron in the rates and the composite index rates `S_P`; the symmetric
//! rate of the choice is one LP. The inner bound is the convex hull of the
//! union of these regions over every choice, evaluated by column generation
//! in [`time_shared_symmetric_rate`]; [`max_symmetric_rate`] gives the best
//! single choice without time sharing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use crate::instance::{IndexCodingInstance, MessageId, MessageSet, UserSpec};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Relation, VarId};
use crate::rational::ExactRational;
use crate::screen::ScreenLp;

/// Largest message count for which the `2^N' - 1` composite variables are built.
pub const MAX_COMPOSITE_MESSAGES: usize = 16;

/// Default bound on the number of decoding choices enumerated.
pub const DEFAULT_SEARCH_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompositeError {
    #[error("decoding-choice search space of {size} exceeds the limit {limit}")]
    SearchSpaceOverflow { size: u128, limit: u64 },
    #[error("{0} messages is too many for composite coding (max {MAX_COMPOSITE_MESSAGES})")]
    TooManyMessages(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(alloc::string::String),
    #[error("invalid decoding choice for user {0}")]
    InvalidChoice(usize),
    #[error("weight vector has {got} entries, expected {expected}")]
    WeightLength { got: usize, expected: usize },
}

/// Per-user decoding sets `K_j` with `D_j ⊆ K_j ⊆ [1..N'] \ A_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecodingChoice {
    pub sets: Vec<MessageSet>,
}

impl DecodingChoice {
    /// `K_j = D_j` for every user.
    pub fn demands_only(inst: &IndexCodingInstance) -> Self {
        Self {
            sets: inst.users().iter().map(|u| u.demands.clone()).collect(),
        }
    }

    /// Checks `D_j ⊆ K_j ⊆ [1..N'] \ A_j`; returns the first offending user.
    pub fn check(&self, inst: &IndexCodingInstance) -> Result<(), CompositeError> {
        if self.sets.len() != inst.num_users() {
            return Err(CompositeError::InvalidChoice(
                self.sets.len().min(inst.num_users()) + 1,
            ));
        }
        for (j, (k, u)) in self.sets.iter().zip(inst.users()).enumerate() {
            let in_range = k
                .iter()
                .all(|m| m.0 >= 1 && m.index() <= inst.num_messages());
            if !in_range || !u.demands.is_subset(k) || !k.is_disjoint(&u.knows) {
                return Err(CompositeError::InvalidChoice(j + 1));
            }
        }
        Ok(())
    }
}

fn mask_of(set: &MessageSet) -> u64 {
    set.iter().fold(0u64, |m, id| m | (1 << id.offset()))
}

fn set_of(mask: u64) -> MessageSet {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| MessageId(b as u32 + 1))
        .collect()
}

fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    // Increasing order of all submasks, including 0 and `mask`.
    let mut next = Some(0u64);
    core::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(((cur | !mask).wrapping_add(1)) & mask)
        };
        Some(cur)
    })
}

/// Per-user option lists and an odometer over their cross product.
pub struct DecodingChoices {
    options: Vec<Vec<MessageSet>>,
    cursor: Option<Vec<usize>>,
    capped: bool,
}

impl DecodingChoices {
    pub fn options(&self) -> &[Vec<MessageSet>] {
        &self.options
    }

    /// True when a per-user cap shrank the search (the result is then only a
    /// lower bound on the uncapped maximum).
    pub fn is_under_approximation(&self) -> bool {
        self.capped
    }

    pub fn total(&self) -> u128 {
        self.options.iter().map(|o| o.len() as u128).product()
    }

    /// The choice at lexicographic rank `index` without iterating.
    pub fn nth_choice(&self, mut index: u128) -> DecodingChoice {
        let mut picks = vec![0usize; self.options.len()];
        for (j, opts) in self.options.iter().enumerate().rev() {
            let n = opts.len() as u128;
            picks[j] = (index % n) as usize;
            index /= n;
        }
        self.choice_at(&picks)
    }

    fn choice_at(&self, picks: &[usize]) -> DecodingChoice {
        DecodingChoice {
            sets: picks
                .iter()
                .zip(&self.options)
                .map(|(&p, o)| o[p].clone())
                .collect(),
        }
    }
}

impl Iterator for DecodingChoices {
    type Item = DecodingChoice;

    fn next(&mut self) -> Option<DecodingChoice> {
        let cur = self.cursor.take()?;
        let out = self.choice_at(&cur);
        let mut next = cur;
        let mut j = next.len();
        loop {
            if j == 0 {
                break;
            }
            j -= 1;
            next[j] += 1;
            if next[j] < self.options[j].len() {
                self.cursor = Some(next);
                break;
            }
            next[j] = 0;
        }
        Some(out)
    }
}

/// All `K_j` choices, first user most significant, each user's options in
/// lexicographic set order.
pub fn enumerate_decoding_choices(
    inst: &IndexCodingInstance,
    per_user_cap: Option<usize>,
    search_limit: u64,
) -> Result<DecodingChoices, CompositeError> {
    let all = inst.all_messages();
    let mut uncapped: u128 = 1;
    let mut options = Vec::with_capacity(inst.num_users());
    for u in inst.users() {
        let free: MessageSet = all
            .difference(&u.knows)
            .filter(|m| !u.demands.contains(m))
            .copied()
            .collect();
        uncapped = uncapped.saturating_mul(1u128 << free.len().min(127));
        let free_mask = mask_of(&free);
        let mut opts: Vec<MessageSet> = submasks(free_mask)
            .filter(|&extra| per_user_cap.is_none_or(|cap| extra.count_ones() as usize <= cap))
            .map(|extra| {
                let mut k = u.demands.clone();
                k.extend(set_of(extra));
                k
            })
            .collect();
        opts.sort();
        options.push(opts);
    }
    if per_user_cap.is_none() && uncapped > u128::from(search_limit) {
        return Err(CompositeError::SearchSpaceOverflow {
            size: uncapped,
            limit: search_limit,
        });
    }
    let capped_total: u128 = options.iter().map(|o| o.len() as u128).product();
    if capped_total > u128::from(search_limit) {
        return Err(CompositeError::SearchSpaceOverflow {
            size: capped_total,
            limit: search_limit,
        });
    }
    let capped = capped_total < uncapped;
    let cursor = if options.iter().all(|o| !o.is_empty()) {
        Some(vec![0; options.len()])
    } else {
        None
    };
    Ok(DecodingChoices {
        options,
        cursor,
        capped,
    })
}

/// What the per-choice LP maximizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RateObjective {
    /// A single common rate `R` for every message.
    Symmetric,
    /// Per-message rates `R_i` weighted by the given vector (length `N'`).
    Weighted(Vec<ExactRational>),
}

/// The LP for one decoding choice together with its variable layout.
#[derive(Clone, Debug)]
pub struct CompositeLp {
    pub lp: LinearProgram,
    /// `R` in symmetric mode, `R_1..R_N'` in weighted mode.
    pub rate_vars: Vec<VarId>,
    /// `S_P` for every nonempty `P`, indexed by bitmask `P - 1`.
    pub s_vars: Vec<VarId>,
}

impl CompositeLp {
    pub fn s_var(&self, p: &MessageSet) -> VarId {
        self.s_vars[(mask_of(p) - 1) as usize]
    }
}

fn check_size(inst: &IndexCodingInstance) -> Result<(), CompositeError> {
    if inst.num_messages() > MAX_COMPOSITE_MESSAGES {
        return Err(CompositeError::TooManyMessages(inst.num_messages()));
    }
    Ok(())
}

pub fn build_composite_lp(
    inst: &IndexCodingInstance,
    choice: &DecodingChoice,
    objective: &RateObjective,
) -> Result<CompositeLp, CompositeError> {
    check_size(inst)?;
    choice.check(inst)?;
    let full: u64 = (1u64 << inst.num_messages()) - 1;
    let masks: Vec<u64> = (1..=full).collect();
    let (lp, rate_vars, s_vars) =
        assemble(inst, &exact_rows(inst, choice), objective, &masks, true)?;
    Ok(CompositeLp {
        lp,
        rate_vars,
        s_vars,
    })
}

/// Composite indices worth keeping for one choice. `S_P` is dropped when some
/// other index is charged to no more users in the first stage and appears in
/// at least the same second-stage constraints; any solution can move the rate
/// of `P` onto that index, so the optimum is unchanged.
fn undominated_masks(n: usize, users: &[UserRows]) -> Vec<u64> {
    let full: u64 = (1u64 << n) - 1;
    // (users charged, per-user decoded part or None when unusable)
    let sig: Vec<(u64, Vec<Option<u64>>)> = (1..=full)
        .map(|p| {
            let mut cost = 0u64;
            let gain = users
                .iter()
                .enumerate()
                .map(|(j, u)| {
                    if p & !u.known != 0 {
                        cost |= 1 << j;
                    }
                    if p & !u.usable == 0 && p & u.decoded != 0 {
                        Some(p & u.decoded)
                    } else {
                        None
                    }
                })
                .collect();
            (cost, gain)
        })
        .collect();
    let dominates = |q: usize, p: usize| -> bool {
        let (cq, gq) = &sig[q];
        let (cp, gp) = &sig[p];
        cq & !cp == 0
            && gp.iter().zip(gq).all(|(x, y)| match (x, y) {
                (None, _) => true,
                (Some(_), None) => false,
                (Some(x), Some(y)) => x & !y == 0,
            })
    };
    (0..full as usize)
        .filter(|&p| {
            if sig[p].1.iter().all(Option::is_none) {
                return false;
            }
            !(0..full as usize).any(|q| q != p && dominates(q, p) && (q < p || !dominates(p, q)))
        })
        .map(|p| p as u64 + 1)
        .collect()
}

type Assembled = (LinearProgram, Vec<VarId>, Vec<VarId>);

/// Row pattern of one user: first-stage charges for composites outside
/// `known`, second-stage constraints for every nonempty `J ⊆ decoded` over
/// composites inside `usable`.
#[derive(Clone, Copy, Debug)]
struct UserRows {
    known: u64,
    decoded: u64,
    usable: u64,
}

impl UserRows {
    fn exact(u: &UserSpec, k: &MessageSet) -> Self {
        let known = mask_of(&u.knows);
        let decoded = mask_of(k);
        Self {
            known,
            decoded,
            usable: known | decoded,
        }
    }
}

fn exact_rows(inst: &IndexCodingInstance, choice: &DecodingChoice) -> Vec<UserRows> {
    inst.users()
        .iter()
        .zip(&choice.sets)
        .map(|(u, k)| UserRows::exact(u, k))
        .collect()
}

fn assemble(
    inst: &IndexCodingInstance,
    users: &[UserRows],
    objective: &RateObjective,
    masks: &[u64],
    named: bool,
) -> Result<Assembled, CompositeError> {
    let n = inst.num_messages();
    let mut lp = LinearProgram::new();
    let rate_vars: Vec<VarId> = match objective {
        RateObjective::Symmetric => vec![lp.add_variable("R")],
        RateObjective::Weighted(w) => {
            if w.len() != n {
                return Err(CompositeError::WeightLength {
                    got: w.len(),
                    expected: n,
                });
            }
            (1..=n)
                .map(|i| {
                    lp.add_variable(if named {
                        format!("R{i}")
                    } else {
                        String::new()
                    })
                })
                .collect()
        }
    };
    let s_vars: Vec<VarId> = masks
        .iter()
        .map(|&p| {
            lp.add_variable(if named {
                format!("S{}", crate::instance::SetDisplay(&set_of(p)))
            } else {
                String::new()
            })
        })
        .collect();
    let one = ExactRational::one();
    let c = ExactRational::from(inst.channel_bits());

    match objective {
        RateObjective::Symmetric => lp.set_objective(vec![(rate_vars[0], one.clone())]),
        RateObjective::Weighted(w) => lp.set_objective(
            rate_vars
                .iter()
                .zip(w)
                .filter(|(_, w)| !w.is_zero())
                .map(|(v, w)| (*v, w.clone()))
                .collect(),
        ),
    }
    .expect("objective uses declared variables");

    for u in users {
        let a = u.known;
        // First decoding stage: every composite not determined by A_j.
        let terms: Vec<_> = masks
            .iter()
            .zip(&s_vars)
            .filter(|(p, _)| *p & !a != 0)
            .map(|(_, v)| (*v, one.clone()))
            .collect();
        if !terms.is_empty() || named {
            lp.add_constraint(terms, Relation::Le, c.clone())
                .expect("declared");
        }

        // Second decoding stage: |J| R <= v_J for all nonempty J ⊆ K_j.
        let ak = u.usable;
        for j in submasks(u.decoded).skip(1) {
            let mut terms: Vec<(VarId, ExactRational)> = match objective {
                RateObjective::Symmetric => {
                    vec![(rate_vars[0], ExactRational::from(j.count_ones() as u64))]
                }
                RateObjective::Weighted(_) => (0..n)
                    .filter(|b| j >> b & 1 == 1)
                    .map(|b| (rate_vars[b], one.clone()))
                    .collect(),
            };
            terms.extend(
                masks
                    .iter()
                    .zip(&s_vars)
                    .filter(|(p, _)| *p & !ak == 0 && *p & j != 0)
                    .map(|(_, v)| (*v, -one.clone())),
            );
            lp.add_constraint(terms, Relation::Le, ExactRational::zero())
                .expect("declared");
        }
    }
    Ok((lp, rate_vars, s_vars))
}

/// Solves one choice's LP over the undominated composite indices only.
struct Solved {
    optimum: Option<ExactRational>,
    rates: Vec<ExactRational>,
    allocation: CompositeAllocation,
}

fn solve_reduced(
    inst: &IndexCodingInstance,
    choice: &DecodingChoice,
    objective: &RateObjective,
) -> Result<Solved, CompositeError> {
    check_size(inst)?;
    choice.check(inst)?;
    solve_rows(inst, &exact_rows(inst, choice), objective)
}

fn solve_rows(
    inst: &IndexCodingInstance,
    users: &[UserRows],
    objective: &RateObjective,
) -> Result<Solved, CompositeError> {
    let masks = undominated_masks(inst.num_messages(), users);
    let (lp, rate_vars, s_vars) = assemble(inst, users, objective, &masks, false)?;
    Ok(solved_from(solve_lp(&lp), &masks, &rate_vars, &s_vars))
}

fn solved_from(sol: LpSolution, masks: &[u64], rate_vars: &[VarId], s_vars: &[VarId]) -> Solved {
    match sol.status {
        LpStatus::Optimal => Solved {
            rates: rate_vars.iter().map(|v| sol.value(*v).clone()).collect(),
            allocation: CompositeAllocation {
                rates: masks
                    .iter()
                    .zip(s_vars)
                    .filter(|(_, v)| !sol.value(**v).is_zero())
                    .map(|(p, v)| (set_of(*p), sol.value(*v).clone()))
                    .collect(),
            },
            optimum: sol.optimum,
        },
        LpStatus::Unbounded => Solved {
            optimum: None,
            rates: Vec::new(),
            allocation: CompositeAllocation::default(),
        },
        LpStatus::Infeasible => unreachable!("zero rates are always feasible"),
    }
}

/// Integer objective for screening: numerators over a common denominator.
#[derive(Clone, Debug)]
struct ScreenObjective {
    num: Vec<i128>,
    den: i128,
    symmetric: bool,
}

impl ScreenObjective {
    fn new(objective: &RateObjective) -> Option<Self> {
        match objective {
            RateObjective::Symmetric => Some(Self {
                num: vec![1],
                den: 1,
                symmetric: true,
            }),
            RateObjective::Weighted(w) => {
                let parts: Vec<(i128, i128)> =
                    w.iter().map(|x| x.to_i128_parts()).collect::<Option<_>>()?;
                let mut den: i128 = 1;
                for (_, d) in &parts {
                    den = den.checked_mul(d / gcd_i128(den, *d))?;
                }
                let num = parts
                    .iter()
                    .map(|(n, d)| n.checked_mul(den / d))
                    .collect::<Option<_>>()?;
                Some(Self {
                    num,
                    den,
                    symmetric: false,
                })
            }
        }
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Float relaxation-free copy of the exact LP over the same columns, for
/// cheap certified upper bounds.
fn screen_lp(users: &[UserRows], masks: &[u64], obj: &ScreenObjective, c: i64) -> ScreenLp {
    let rate_cols = obj.num.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for u in users {
        let row: Vec<(usize, i64)> = masks
            .iter()
            .enumerate()
            .filter(|(_, p)| *p & !u.known != 0)
            .map(|(i, _)| (rate_cols + i, 1))
            .collect();
        if !row.is_empty() {
            rows.push(row);
            rhs.push(c);
        }
        for j in submasks(u.decoded).skip(1) {
            let mut row: Vec<(usize, i64)> = if obj.symmetric {
                vec![(0, i64::from(j.count_ones()))]
            } else {
                (0..rate_cols)
                    .filter(|b| j >> b & 1 == 1)
                    .map(|b| (b, 1))
                    .collect()
            };
            row.extend(
                masks
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| *p & !u.usable == 0 && *p & j != 0)
                    .map(|(i, _)| (rate_cols + i, -1)),
            );
            rows.push(row);
            rhs.push(0);
        }
    }
    let mut obj_num = obj.num.clone();
    obj_num.resize(rate_cols + masks.len(), 0);
    ScreenLp {
        num_cols: rate_cols + masks.len(),
        rows,
        rhs,
        obj_num,
        obj_den: obj.den,
        // Every rate and every kept composite sits under some user's
        // first-stage budget.
        col_bound: c,
    }
}

/// Exact optimum of a choice unless a screening bound shows it cannot exceed
/// `cutoff`.
fn solve_screened(
    inst: &IndexCodingInstance,
    choice: &DecodingChoice,
    objective: &RateObjective,
    screen: Option<&ScreenObjective>,
    cutoff: Option<&ExactRational>,
) -> Result<Option<Solved>, CompositeError> {
    check_size(inst)?;
    choice.check(inst)?;
    let users = exact_rows(inst, choice);
    let masks = undominated_masks(inst.num_messages(), &users);
    if let (Some(obj), Some((p, q)), Ok(c)) = (
        screen,
        cutoff.and_then(ExactRational::to_i128_parts),
        i64::try_from(inst.channel_bits()),
    ) {
        let slp = screen_lp(&users, &masks, obj, c);
        if let Some(bound) = slp.bound() {
            if bound.at_most(p, q) == Some(true) {
                return Ok(None);
            }
        }
    }
    let (lp, rate_vars, s_vars) = assemble(inst, &users, objective, &masks, false)?;
    Ok(Some(solved_from(
        solve_lp(&lp),
        &masks,
        &rate_vars,
        &s_vars,
    )))
}

/// Composite index rates `S_P` (bits per channel use); absent entries are 0.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CompositeAllocation {
    pub rates: BTreeMap<MessageSet, ExactRational>,
}

impl CompositeAllocation {
    pub fn get(&self, p: &MessageSet) -> ExactRational {
        self.rates
            .get(p)
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositeResult {
    /// Bits per channel use.
    pub symmetric_rate: ExactRational,
    pub best_choice: DecodingChoice,
    pub allocation: CompositeAllocation,
    /// Set when a per-user cap restricted the search.
    pub under_approximation: bool,
    pub choices_evaluated: u128,
}

impl CompositeResult {
    /// Symmetric rate divided by `c`.
    pub fn normalized_rate(&self, inst: &IndexCodingInstance) -> ExactRational {
        &self.symmetric_rate / &ExactRational::from(inst.channel_bits())
    }
}

/// Optimum of one choice's LP in symmetric mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceOutcome {
    pub choice: DecodingChoice,
    pub rate: ExactRational,
    pub allocation: CompositeAllocation,
}

pub fn solve_choice(
    inst: &IndexCodingInstance,
    choice: DecodingChoice,
) -> Result<ChoiceOutcome, CompositeError> {
    let solved = solve_reduced(inst, &choice, &RateObjective::Symmetric)?;
    // R = 0, S = 0 is always feasible and R <= v_J <= c bounds the rate.
    let rate = solved.optimum.expect("symmetric composite LP is bounded");
    Ok(ChoiceOutcome {
        choice,
        rate,
        allocation: solved.allocation,
    })
}

/// Deterministic reduction: higher rate wins, ties go to the lexicographically
/// smaller choice.
pub fn prefer(a: ChoiceOutcome, b: ChoiceOutcome) -> ChoiceOutcome {
    match a.rate.cmp(&b.rate) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.choice <= b.choice {
                a
            } else {
                b
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub per_user_cap: Option<usize>,
    pub search_limit: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            per_user_cap: None,
            search_limit: DEFAULT_SEARCH_LIMIT,
        }
    }
}

fn ensure_valid(inst: &IndexCodingInstance) -> Result<(), CompositeError> {
    let report = inst.validate();
    if let Some(v) = report.violations.first() {
        return Err(CompositeError::InvalidInstance(format!("{v}")));
    }
    check_size(inst)
}

/// Maximum symmetric rate of the composite coding inner bound, evaluated
/// sequentially over every decoding choice.
pub fn max_symmetric_rate(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
) -> Result<CompositeResult, CompositeError> {
    ensure_valid(inst)?;
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let under = choices.is_under_approximation();
    let total = choices.total();
    let best = best_symmetric_of(inst, choices)?.expect("at least one decoding choice");
    Ok(finish(best, under, total))
}

/// The first maximizing choice among those of lexicographic rank in `range`.
pub fn best_symmetric_in(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
    range: Range<u128>,
) -> Result<Option<ChoiceOutcome>, CompositeError> {
    ensure_valid(inst)?;
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let end = range.end.min(choices.total());
    best_symmetric_of(inst, (range.start..end).map(|i| choices.nth_choice(i)))
}

fn best_symmetric_of(
    inst: &IndexCodingInstance,
    choices: impl Iterator<Item = DecodingChoice>,
) -> Result<Option<ChoiceOutcome>, CompositeError> {
    let screen = ScreenObjective::new(&RateObjective::Symmetric);
    let mut best: Option<ChoiceOutcome> = None;
    for choice in choices {
        let cutoff = best.as_ref().map(|b| &b.rate);
        let Some(solved) = solve_screened(
            inst,
            &choice,
            &RateObjective::Symmetric,
            screen.as_ref(),
            cutoff,
        )?
        else {
            continue;
        };
        let outcome = ChoiceOutcome {
            choice,
            rate: solved.optimum.expect("symmetric composite LP is bounded"),
            allocation: solved.allocation,
        };
        best = Some(match best {
            None => outcome,
            Some(b) => prefer(b, outcome),
        });
    }
    Ok(best)
}

pub fn finish(best: ChoiceOutcome, under_approximation: bool, total: u128) -> CompositeResult {
    CompositeResult {
        symmetric_rate: best.rate,
        best_choice: best.choice,
        allocation: best.allocation,
        under_approximation,
        choices_evaluated: total,
    }
}

/// Re-evaluates both decoding stages at `(rate, allocation)` exactly.
pub fn certify(inst: &IndexCodingInstance, result: &CompositeResult) -> bool {
    certify_rate(
        inst,
        &result.best_choice,
        &result.symmetric_rate,
        &result.allocation,
    )
}

pub fn certify_rate(
    inst: &IndexCodingInstance,
    choice: &DecodingChoice,
    rate: &ExactRational,
    alloc: &CompositeAllocation,
) -> bool {
    certify_rates(
        inst,
        choice,
        &vec![rate.clone(); inst.num_messages()],
        alloc,
    )
}

/// Per-message version of [`certify_rate`]: `sum_{i in J} R_i <= v_J`.
pub fn certify_rates(
    inst: &IndexCodingInstance,
    choice: &DecodingChoice,
    rates: &[ExactRational],
    alloc: &CompositeAllocation,
) -> bool {
    if choice.check(inst).is_err() || rates.len() != inst.num_messages() {
        return false;
    }
    if rates
        .iter()
        .chain(alloc.rates.values())
        .any(|v| v.is_negative())
    {
        return false;
    }
    let c = ExactRational::from(inst.channel_bits());
    for (u, k) in inst.users().iter().zip(&choice.sets) {
        let decompress: ExactRational = alloc
            .rates
            .iter()
            .filter(|(p, _)| !p.is_subset(&u.knows))
            .map(|(_, v)| v.clone())
            .sum();
        if decompress > c {
            return false;
        }
        let ak: MessageSet = u.knows.union(k).copied().collect();
        for j in submasks(mask_of(k)).skip(1) {
            let jset = set_of(j);
            let v_j: ExactRational = alloc
                .rates
                .iter()
                .filter(|(p, _)| p.is_subset(&ak) && !p.is_disjoint(&jset))
                .map(|(_, v)| v.clone())
                .sum();
            let load: ExactRational = jset.iter().map(|m| rates[m.index() - 1].clone()).sum();
            if load > v_j {
                return false;
            }
        }
    }
    true
}

/// Best weighted sum over the composite region: the per-choice polyhedra are
/// maximized separately and the largest value kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedResult {
    /// `None` when some choice's LP is unbounded (a positively weighted
    /// message nobody decodes).
    pub value: Option<ExactRational>,
    pub best_choice: DecodingChoice,
    pub rates: Vec<ExactRational>,
    pub allocation: CompositeAllocation,
    pub under_approximation: bool,
}

pub fn max_weighted_rate(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
    opts: &SearchOptions,
) -> Result<WeightedResult, CompositeError> {
    Ok(weighted_rate_above(inst, weights, opts, None)?.expect("no floor, some choice wins"))
}

/// Lexicographically first choice maximizing the weighted sum, restricted to
/// values strictly above `floor`; `None` certifies that no choice beats it.
pub fn weighted_rate_above(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
    opts: &SearchOptions,
    floor: Option<&ExactRational>,
) -> Result<Option<WeightedResult>, CompositeError> {
    ensure_valid(inst)?;
    let objective = weighted_objective(inst, weights)?;
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let under = choices.is_under_approximation();
    let screen = ScreenObjective::new(&objective);
    let mut best: Option<WeightedResult> = None;
    for choice in choices {
        let cutoff = best.as_ref().and_then(|b| b.value.as_ref()).or(floor);
        let Some(solved) = solve_screened(inst, &choice, &objective, screen.as_ref(), cutoff)?
        else {
            continue;
        };
        let candidate = weighted_result(choice, solved, under);
        if candidate.value.is_none() {
            return Ok(Some(candidate));
        }
        if weighted_improves(&candidate, best.as_ref(), floor) {
            best = Some(candidate);
        }
    }
    Ok(best)
}

/// Up to `limit` choices whose weighted optimum beats `floor`, best first
/// (ties in lexicographic order). Unbounded choices count as best.
pub fn weighted_columns_above(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
    opts: &SearchOptions,
    floor: Option<&ExactRational>,
    limit: usize,
) -> Result<Vec<WeightedResult>, CompositeError> {
    weighted_columns_in(inst, weights, opts, floor, limit, 0..u128::MAX)
}

/// [`weighted_columns_above`] over the choices of lexicographic rank in
/// `range`. Merging the results of consecutive ranges with
/// [`insert_ranked`], in order, gives the result over their union.
pub fn weighted_columns_in(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
    opts: &SearchOptions,
    floor: Option<&ExactRational>,
    limit: usize,
    range: Range<u128>,
) -> Result<Vec<WeightedResult>, CompositeError> {
    ensure_valid(inst)?;
    let objective = weighted_objective(inst, weights)?;
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let under = choices.is_under_approximation();
    let end = range.end.min(choices.total());
    let screen = ScreenObjective::new(&objective);
    let mut kept: Vec<WeightedResult> = Vec::new();
    for choice in (range.start..end).map(|i| choices.nth_choice(i)) {
        let worst = if kept.len() == limit {
            kept.last()
        } else {
            None
        };
        let cutoff = worst.and_then(|b| b.value.as_ref()).or(floor);
        let Some(solved) = solve_screened(inst, &choice, &objective, screen.as_ref(), cutoff)?
        else {
            continue;
        };
        let candidate = weighted_result(choice, solved, under);
        let worst = if kept.len() == limit {
            kept.last()
        } else {
            None
        };
        if weighted_improves(&candidate, worst, floor) {
            insert_ranked(&mut kept, candidate, limit);
        }
    }
    Ok(kept)
}

/// Keeps `kept` sorted best first with at most `limit` entries; among equal
/// values the earlier insertion stays ahead.
pub fn insert_ranked(kept: &mut Vec<WeightedResult>, candidate: WeightedResult, limit: usize) {
    let pos = kept
        .iter()
        .position(|k| weighted_improves(&candidate, Some(k), None))
        .unwrap_or(kept.len());
    if pos < limit {
        kept.insert(pos, candidate);
        kept.truncate(limit);
    }
}

fn weighted_objective(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
) -> Result<RateObjective, CompositeError> {
    if weights.len() != inst.num_messages() {
        return Err(CompositeError::WeightLength {
            got: weights.len(),
            expected: inst.num_messages(),
        });
    }
    Ok(RateObjective::Weighted(weights.to_vec()))
}

/// Weighted optimum of a single decoding choice.
pub fn solve_weighted(
    inst: &IndexCodingInstance,
    choice: DecodingChoice,
    objective: &RateObjective,
    under_approximation: bool,
) -> Result<WeightedResult, CompositeError> {
    let solved = solve_reduced(inst, &choice, objective)?;
    Ok(weighted_result(choice, solved, under_approximation))
}

fn weighted_result(choice: DecodingChoice, solved: Solved, under: bool) -> WeightedResult {
    WeightedResult {
        value: solved.optimum,
        rates: solved.rates,
        allocation: solved.allocation,
        best_choice: choice,
        under_approximation: under,
    }
}

/// Strictly better than both the incumbent and the floor. Scanning choices in
/// lexicographic order with this test keeps the first maximizer.
pub fn weighted_improves(
    candidate: &WeightedResult,
    incumbent: Option<&WeightedResult>,
    floor: Option<&ExactRational>,
) -> bool {
    let Some(v) = &candidate.value else {
        return true;
    };
    floor.is_none_or(|f| v > f)
        && incumbent.is_none_or(|b| b.value.as_ref().is_some_and(|bv| v > bv))
}

/// Hill climbing over decoding choices, changing one user's `K_j` per step.
/// Returns the best local optimum reached from `seeds` if it beats `floor`.
/// Cheap but incomplete; an exhaustive search has to confirm a `None`.
fn local_search(
    inst: &IndexCodingInstance,
    options: &[Vec<MessageSet>],
    objective: &RateObjective,
    seeds: &[DecodingChoice],
    floor: &ExactRational,
) -> Result<Option<WeightedResult>, CompositeError> {
    let mut best: Option<WeightedResult> = None;
    let mut visited: BTreeMap<DecodingChoice, ()> = BTreeMap::new();
    for seed in seeds {
        if visited.insert(seed.clone(), ()).is_some() {
            continue;
        }
        let mut current = solve_weighted(inst, seed.clone(), objective, false)?;
        loop {
            let mut moved = false;
            'users: for (j, opts) in options.iter().enumerate() {
                for k in opts {
                    if *k == current.best_choice.sets[j] {
                        continue;
                    }
                    let mut next = current.best_choice.clone();
                    next.sets[j] = k.clone();
                    if visited.insert(next.clone(), ()).is_some() {
                        continue;
                    }
                    let cand = solve_weighted(inst, next, objective, false)?;
                    if cand.value.is_none() {
                        return Ok(Some(cand));
                    }
                    if cand.value > current.value {
                        current = cand;
                        moved = true;
                        break 'users;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        if weighted_improves(&current, best.as_ref(), Some(floor)) {
            best = Some(current);
        }
    }
    Ok(best)
}

/// One vertex of a choice's rate polyhedron used with time-sharing weight
/// `share`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeShareComponent {
    pub share: ExactRational,
    pub choice: DecodingChoice,
    pub rates: Vec<ExactRational>,
    pub allocation: CompositeAllocation,
}

/// Symmetric rate of the convex hull of all per-choice rate regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeSharedResult {
    /// Bits per channel use.
    pub symmetric_rate: ExactRational,
    /// Mixture achieving the rate; shares sum to one.
    pub components: Vec<TimeShareComponent>,
    /// Nonnegative weights summing to one with `w . r <= symmetric_rate`
    /// for every choice and every achievable `r`; zero on messages nobody
    /// demands.
    pub weights: Vec<ExactRational>,
    pub under_approximation: bool,
    /// Weighted searches performed (one per generated column plus the final
    /// certifying search).
    pub rounds: usize,
}

impl TimeSharedResult {
    pub fn normalized_rate(&self, inst: &IndexCodingInstance) -> ExactRational {
        &self.symmetric_rate / &ExactRational::from(inst.channel_bits())
    }
}

fn demanded(inst: &IndexCodingInstance) -> Vec<bool> {
    let mut out = vec![false; inst.num_messages()];
    for u in inst.users() {
        for m in &u.demands {
            out[m.index() - 1] = true;
        }
    }
    out
}

/// Column generation over time-sharing mixtures. The restricted master picks
/// weights `w` minimizing the best known weighted rate; a local search and,
/// failing that, an exhaustive weighted search then either find a choice
/// beating it or prove none exists, at which point the master value is the
/// symmetric rate of the hull.
pub fn time_shared_symmetric_rate(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
) -> Result<TimeSharedResult, CompositeError> {
    time_shared_with(inst, opts, |w, floor| {
        weighted_columns_above(inst, w, opts, floor, COLUMNS_PER_SEARCH)
    })
}

/// Columns added to the master per exhaustive search.
pub const COLUMNS_PER_SEARCH: usize = 64;

/// Column generation with a caller-supplied exhaustive search, which must
/// behave like [`weighted_columns_above`]: an empty result certifies that no
/// choice beats the floor.
pub fn time_shared_with<F>(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
    mut exhaustive: F,
) -> Result<TimeSharedResult, CompositeError>
where
    F: FnMut(
        &[ExactRational],
        Option<&ExactRational>,
    ) -> Result<Vec<WeightedResult>, CompositeError>,
{
    ensure_valid(inst)?;
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let under = choices.is_under_approximation();
    let options = choices.options();
    let n = inst.num_messages();
    let active = demanded(inst);
    let count = active.iter().filter(|&&a| a).count();
    let mut weights: Vec<ExactRational> = active
        .iter()
        .map(|&a| {
            if a {
                ExactRational::new(1, count as i64)
            } else {
                ExactRational::zero()
            }
        })
        .collect();
    let mut columns: Vec<WeightedResult> = Vec::new();
    let mut floor: Option<ExactRational> = None;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut found = Vec::new();
        if let Some(f) = &floor {
            let mut seeds: Vec<DecodingChoice> =
                columns.iter().map(|c| c.best_choice.clone()).collect();
            seeds.push(choices.nth_choice(0));
            let objective = RateObjective::Weighted(weights.clone());
            found.extend(local_search(inst, options, &objective, &seeds, f)?);
        }
        if found.is_empty() {
            found = exhaustive(&weights, floor.as_ref())?;
        }
        if found.is_empty() {
            break;
        }
        for col in found {
            assert!(
                col.value.is_some(),
                "demanded-message weights keep pricing bounded"
            );
            columns.push(col);
        }
        let (z, w) = master_weights(n, &active, &columns);
        weights = w;
        floor = Some(z);
    }
    let symmetric_rate = floor.expect("at least one column");
    let shares = master_shares(&active, &columns, &symmetric_rate);
    let components = columns
        .into_iter()
        .zip(shares)
        .filter(|(_, mu)| !mu.is_zero())
        .map(|(col, share)| TimeShareComponent {
            share,
            choice: col.best_choice,
            rates: col.rates,
            allocation: col.allocation,
        })
        .collect();
    Ok(TimeSharedResult {
        symmetric_rate,
        components,
        weights,
        under_approximation: under,
        rounds,
    })
}

/// min z s.t. z >= w . r for every column, w >= 0, sum w = 1, w = 0 off the
/// demanded messages.
fn master_weights(
    n: usize,
    active: &[bool],
    columns: &[WeightedResult],
) -> (ExactRational, Vec<ExactRational>) {
    let mut lp = LinearProgram::new();
    let w: Vec<Option<VarId>> = active
        .iter()
        .enumerate()
        .map(|(i, &a)| a.then(|| lp.add_variable(format!("w{}", i + 1))))
        .collect();
    let z = lp.add_variable("z");
    let one = ExactRational::one();
    lp.set_objective(vec![(z, -one.clone())]).expect("declared");
    for col in columns {
        let mut terms: Vec<_> = w
            .iter()
            .zip(&col.rates)
            .filter_map(|(v, r)| v.map(|v| (v, r.clone())))
            .collect();
        terms.push((z, -one.clone()));
        lp.add_constraint(terms, Relation::Le, ExactRational::zero())
            .expect("declared");
    }
    lp.add_constraint(
        w.iter().flatten().map(|v| (*v, one.clone())).collect(),
        Relation::Eq,
        one.clone(),
    )
    .expect("declared");
    let sol = solve_lp(&lp);
    assert_eq!(
        sol.status,
        LpStatus::Optimal,
        "master is a bounded feasible LP"
    );
    let weights = (0..n)
        .map(|i| w[i].map_or_else(ExactRational::zero, |v| sol.value(v).clone()))
        .collect();
    (sol.value(z).clone(), weights)
}

/// max R s.t. R <= sum_k mu_k r^k_i on demanded messages, sum mu = 1.
fn master_shares(
    active: &[bool],
    columns: &[WeightedResult],
    expected: &ExactRational,
) -> Vec<ExactRational> {
    let mut lp = LinearProgram::new();
    let r = lp.add_variable("R");
    let mu: Vec<VarId> = (0..columns.len())
        .map(|k| lp.add_variable(format!("mu{k}")))
        .collect();
    let one = ExactRational::one();
    lp.set_objective(vec![(r, one.clone())]).expect("declared");
    for (i, _) in active.iter().enumerate().filter(|(_, &a)| a) {
        let mut terms = vec![(r, one.clone())];
        terms.extend(
            columns
                .iter()
                .zip(&mu)
                .filter(|(c, _)| !c.rates[i].is_zero())
                .map(|(c, v)| (*v, -c.rates[i].clone())),
        );
        lp.add_constraint(terms, Relation::Le, ExactRational::zero())
            .expect("declared");
    }
    lp.add_constraint(
        mu.iter().map(|v| (*v, one.clone())).collect(),
        Relation::Eq,
        one,
    )
    .expect("declared");
    let sol = solve_lp(&lp);
    assert_eq!(
        sol.optimum.as_ref(),
        Some(expected),
        "primal and dual masters agree"
    );
    mu.iter().map(|v| sol.value(*v).clone()).collect()
}

/// Checks the achievability half of a time-sharing result: every component
/// is feasible for its choice and the mixture gives each demanded message at
/// least the claimed rate.
pub fn certify_time_sharing(inst: &IndexCodingInstance, result: &TimeSharedResult) -> bool {
    let total: ExactRational = result.components.iter().map(|c| c.share.clone()).sum();
    if total != 1 || result.components.iter().any(|c| c.share.is_negative()) {
        return false;
    }
    if !result
        .components
        .iter()
        .all(|c| certify_rates(inst, &c.choice, &c.rates, &c.allocation))
    {
        return false;
    }
    demanded(inst)
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .all(|(i, _)| {
            let mixed: ExactRational = result
                .components
                .iter()
                .map(|c| &c.share * &c.rates[i])
                .sum();
            mixed >= result.symmetric_rate
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{builtin_instance, message_set};

    fn count_for_user(inst: &IndexCodingInstance, user: usize) -> usize {
        enumerate_decoding_choices(inst, None, DEFAULT_SEARCH_LIMIT)
            .unwrap()
            .options()[user - 1]
            .len()
    }

    #[test]
    fn choice_counts() {
        let ex1 = builtin_instance("example1").unwrap();
        assert_eq!(count_for_user(&ex1, 1), 8);
        assert_eq!(count_for_user(&ex1, 4), 4);
        let all = enumerate_decoding_choices(&ex1, None, DEFAULT_SEARCH_LIMIT).unwrap();
        assert_eq!(all.total(), 65_536);
        assert!(!all.is_under_approximation());
        let xor2 = builtin_instance("xor2").unwrap();
        let choices: Vec<_> = enumerate_decoding_choices(&xor2, None, DEFAULT_SEARCH_LIMIT)
            .unwrap()
            .collect();
        assert_eq!(choices, vec![DecodingChoice::demands_only(&xor2)]);
    }

    #[test]
    fn lexicographic_order() {
        let ex1 = builtin_instance("example1").unwrap();
        let opts = enumerate_decoding_choices(&ex1, None, DEFAULT_SEARCH_LIMIT).unwrap();
        let user1: Vec<MessageSet> = opts.options()[0].clone();
        assert_eq!(user1[0], message_set([1]));
        assert_eq!(user1[1], message_set([1, 2]));
        assert_eq!(user1[7], message_set([1, 6]));
        let mut prev: Option<DecodingChoice> = None;
        for (i, c) in opts.enumerate().take(300) {
            if let Some(p) = &prev {
                assert!(p < &c, "order broken at {i}");
            }
            prev = Some(c);
        }
        let mut opts = enumerate_decoding_choices(&ex1, None, DEFAULT_SEARCH_LIMIT).unwrap();
        let third = opts.nth_choice(2);
        assert_eq!(opts.nth(2).unwrap(), third);
    }

    #[test]
    fn overflow_guard() {
        let ex1 = builtin_instance("example1").unwrap();
        assert!(matches!(
            enumerate_decoding_choices(&ex1, None, 1000),
            Err(CompositeError::SearchSpaceOverflow { size: 65_536, .. })
        ));
        let capped = enumerate_decoding_choices(&ex1, Some(0), 1000).unwrap();
        assert!(capped.is_under_approximation());
        assert_eq!(capped.total(), 1);
    }

    #[test]
    fn xor2_lp_shape() {
        let xor2 = builtin_instance("xor2").unwrap();
        let clp = build_composite_lp(
            &xor2,
            &DecodingChoice::demands_only(&xor2),
            &RateObjective::Symmetric,
        )
        .unwrap();
        assert_eq!(clp.lp.num_variables(), 4);
        let s1 = clp.s_var(&message_set([1]));
        let s12 = clp.s_var(&message_set([1, 2]));
        let r = clp.rate_vars[0];
        let one = ExactRational::one();
        let has = |terms: &[(VarId, ExactRational)], rhs: ExactRational| {
            clp.lp.constraints().iter().any(|c| {
                let mut a = c.terms.clone();
                let mut b = terms.to_vec();
                a.sort();
                b.sort();
                a == b && c.rhs == rhs && c.relation == Relation::Le
            })
        };
        // user 1 decompression: S_{1} + S_{12} <= c
        assert!(has(&[(s1, one.clone()), (s12, one.clone())], one.clone()));
        // user 1, J = {1}: R <= S_{1} + S_{12}
        assert!(has(
            &[(r, one.clone()), (s1, -one.clone()), (s12, -one.clone())],
            ExactRational::zero()
        ));
    }

    #[test]
    fn no_side_info_decompression_covers_everything() {
        let inst = builtin_instance("no-side-info(2)").unwrap();
        let clp = build_composite_lp(
            &inst,
            &DecodingChoice::demands_only(&inst),
            &RateObjective::Symmetric,
        )
        .unwrap();
        let decompression: Vec<_> = clp
            .lp
            .constraints()
            .iter()
            .filter(|c| c.rhs == 1i64)
            .collect();
        assert_eq!(decompression.len(), 2);
        for c in decompression {
            assert_eq!(c.terms.len(), 3);
        }
    }

    #[test]
    fn example1_variable_count() {
        let ex1 = builtin_instance("example1").unwrap();
        let clp = build_composite_lp(
            &ex1,
            &DecodingChoice::demands_only(&ex1),
            &RateObjective::Symmetric,
        )
        .unwrap();
        assert_eq!(clp.lp.num_variables(), 64);
    }

    #[test]
    fn small_instances() {
        let xor2 = builtin_instance("xor2").unwrap();
        let r = max_symmetric_rate(&xor2, &SearchOptions::default()).unwrap();
        assert_eq!(r.symmetric_rate, ExactRational::one());
        assert!(certify(&xor2, &r));

        let nsi = builtin_instance("no-side-info(3)").unwrap();
        let r = max_symmetric_rate(&nsi, &SearchOptions::default()).unwrap();
        assert_eq!(r.symmetric_rate, ExactRational::new(1, 3));
        assert!(certify(&nsi, &r));
    }

    #[test]
    fn rate_scales_with_channel_bits() {
        let nsi = builtin_instance("no-side-info(3)").unwrap();
        let r1 = max_symmetric_rate(&nsi, &SearchOptions::default()).unwrap();
        let r2 = max_symmetric_rate(&nsi.clone().with_channel_bits(2), &SearchOptions::default())
            .unwrap();
        assert_eq!(
            r2.symmetric_rate,
            &r1.symmetric_rate * &ExactRational::from_integer(2)
        );
    }

    #[test]
    fn certificate_rejects_inflated_rate() {
        let xor2 = builtin_instance("xor2").unwrap();
        let mut r = max_symmetric_rate(&xor2, &SearchOptions::default()).unwrap();
        r.symmetric_rate = ExactRational::new(3, 2);
        assert!(!certify(&xor2, &r));
    }

    #[test]
    fn invalid_choice_rejected() {
        let xor2 = builtin_instance("xor2").unwrap();
        let bad = DecodingChoice {
            sets: vec![message_set([1, 2]), message_set([2])],
        };
        assert_eq!(
            build_composite_lp(&xor2, &bad, &RateObjective::Symmetric).unwrap_err(),
            CompositeError::InvalidChoice(1)
        );
    }

    #[test]
    fn weighted_mode() {
        let nsi = builtin_instance("no-side-info(2)").unwrap();
        let w = vec![ExactRational::one(), ExactRational::one()];
        let r = max_weighted_rate(&nsi, &w, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, Some(ExactRational::one()));
        let w = vec![ExactRational::from_integer(2), ExactRational::one()];
        let r = max_weighted_rate(&nsi, &w, &SearchOptions::default()).unwrap();
        assert_eq!(r.value, Some(ExactRational::from_integer(2)));
        assert_eq!(r.rates, vec![ExactRational::one(), ExactRational::zero()]);
        assert!(matches!(
            max_weighted_rate(&nsi, &w[..1], &SearchOptions::default()),
            Err(CompositeError::WeightLength {
                got: 1,
                expected: 2
            })
        ));
    }
}
