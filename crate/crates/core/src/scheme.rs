//! Deterministic GF(2)-linear schemes: rank-based entropies, the `kappa`
//! mutual-information terms, scheme checks and zero-error decoding.
//!
//! Message `i` contributes `L_i` uniform bits `U_i`; the columns of every
//! composite map are the concatenation `U_1 .. U_N'`. Entropies of linear
//! functions of uniform bits are matrix ranks.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use crate::composite::{CompositeAllocation, DecodingChoice};
use crate::gf2::{BitVec, Gf2Matrix};
use crate::instance::{message_set, IndexCodingInstance, MessageId, MessageSet};
use crate::rational::ExactRational;

/// Largest unknown-bit count `zero_error_decode_check` enumerates.
pub const MAX_ENUMERATION_BITS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("composite {index} has {got} columns, expected {expected}")]
    ColumnMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("composite {index} uses column {column} outside its support")]
    SupportViolation { index: usize, column: usize },
    #[error("composite {index} has an empty or out-of-range support")]
    BadSupport { index: usize },
    #[error("scheme has {got} messages, instance has {expected}")]
    MessageCountMismatch { got: usize, expected: usize },
    #[error("invalid decoding set for user {user}")]
    InvalidDecodingSet { user: usize },
    #[error("user {user} has {bits} unknown bits, more than {MAX_ENUMERATION_BITS} to enumerate")]
    EnumerationTooLarge { user: usize, bits: usize },
    #[error("composite rate for {0} is not a nonnegative integer")]
    NonIntegerAllocation(String),
    #[error("unknown builtin scheme `{0}`")]
    UnknownName(String),
}

/// One composite index `X_P = f_P(U_i : i in P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composite {
    pub support: MessageSet,
    pub map: Gf2Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScheme {
    msg_bits: Vec<usize>,
    channel_bits: u64,
    composites: Vec<Composite>,
}

impl LinearScheme {
    pub fn new(
        msg_bits: Vec<usize>,
        channel_bits: u64,
        composites: Vec<Composite>,
    ) -> Result<Self, SchemeError> {
        let total: usize = msg_bits.iter().sum();
        let n = msg_bits.len();
        let scheme = Self {
            msg_bits,
            channel_bits,
            composites,
        };
        for (index, comp) in scheme.composites.iter().enumerate() {
            if comp.support.is_empty() || comp.support.iter().any(|m| m.0 == 0 || m.index() > n) {
                return Err(SchemeError::BadSupport { index });
            }
            if comp.map.num_cols() != total {
                return Err(SchemeError::ColumnMismatch {
                    index,
                    got: comp.map.num_cols(),
                    expected: total,
                });
            }
            let allowed = scheme.columns_of(|m| comp.support.contains(&m));
            if let Some(column) = comp
                .map
                .nonzero_columns()
                .into_iter()
                .find(|c| allowed.binary_search(c).is_err())
            {
                return Err(SchemeError::SupportViolation { index, column });
            }
        }
        Ok(scheme)
    }

    pub fn num_messages(&self) -> usize {
        self.msg_bits.len()
    }

    pub fn msg_bits(&self) -> &[usize] {
        &self.msg_bits
    }

    pub fn channel_bits(&self) -> u64 {
        self.channel_bits
    }

    pub fn with_channel_bits(mut self, channel_bits: u64) -> Self {
        self.channel_bits = channel_bits;
        self
    }

    pub fn composites(&self) -> &[Composite] {
        &self.composites
    }

    pub fn total_bits(&self) -> usize {
        self.msg_bits.iter().sum()
    }

    /// Columns holding the bits of `m`.
    pub fn column_range(&self, m: MessageId) -> Range<usize> {
        let start: usize = self.msg_bits[..m.offset()].iter().sum();
        start..start + self.msg_bits[m.offset()]
    }

    fn columns_of(&self, mut keep: impl FnMut(MessageId) -> bool) -> Vec<usize> {
        (1..=self.num_messages() as u32)
            .map(MessageId)
            .filter(|&m| keep(m))
            .flat_map(|m| self.column_range(m))
            .collect()
    }

    /// All composite rows stacked: the encoding matrix `M`.
    pub fn global_matrix(&self) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(0, self.total_bits());
        for c in &self.composites {
            m.stack(&c.map);
        }
        m
    }

    /// Composites with at least one nonzero row.
    pub fn nonzero_composites(&self) -> impl Iterator<Item = &Composite> {
        self.composites.iter().filter(|c| !c.map.is_zero())
    }
}

/// `H(X | U_i : i in known)`, in bits.
pub fn conditional_entropy(scheme: &LinearScheme, known: &MessageSet) -> usize {
    let cols = scheme.columns_of(|m| !known.contains(&m));
    scheme.global_matrix().select_columns(&cols).rank()
}

/// `kappa_J = I(U_J ; X | U_{A_j ∪ K_j \ J})` for user `j` (0-based).
pub fn kappa(
    scheme: &LinearScheme,
    inst: &IndexCodingInstance,
    user: usize,
    j_set: &MessageSet,
    k_set: &MessageSet,
) -> Result<usize, SchemeError> {
    let invalid = SchemeError::InvalidDecodingSet { user: user + 1 };
    let spec = inst.users().get(user).ok_or(invalid.clone())?;
    let valid = j_set.is_subset(k_set)
        && !j_set.is_disjoint(&spec.demands)
        && spec.demands.is_subset(k_set)
        && k_set.is_disjoint(&spec.knows)
        && k_set
            .iter()
            .all(|m| m.0 >= 1 && m.index() <= scheme.num_messages());
    if !valid {
        return Err(invalid);
    }
    Ok(kappa_unchecked(scheme, &spec.knows, j_set, k_set))
}

fn kappa_unchecked(
    scheme: &LinearScheme,
    knows: &MessageSet,
    j_set: &MessageSet,
    k_set: &MessageSet,
) -> usize {
    let full: MessageSet = knows.union(k_set).copied().collect();
    let partial: MessageSet = full.difference(j_set).copied().collect();
    conditional_entropy(scheme, &partial) - conditional_entropy(scheme, &full)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacCheck {
    pub set: MessageSet,
    pub kappa: usize,
    /// `sum_{i in J} L_i`.
    pub load: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeVerdict {
    pub channel_ok: Vec<bool>,
    /// `H(X | U_{A_j})` per user.
    pub channel_entropy: Vec<usize>,
    pub mac: Vec<Vec<MacCheck>>,
    pub rate_vector: Vec<usize>,
    /// Minimum of `L_i / c` over demanded messages.
    pub symmetric_rate: ExactRational,
}

impl SchemeVerdict {
    pub fn mac_ok(&self, user: usize) -> bool {
        self.mac[user].iter().all(|m| m.ok)
    }

    pub fn pass(&self) -> bool {
        self.channel_ok.iter().all(|&b| b) && (0..self.mac.len()).all(|j| self.mac_ok(j))
    }
}

/// Checks the channel and MAC conditions of every user under `choice`.
pub fn check_scheme(
    inst: &IndexCodingInstance,
    scheme: &LinearScheme,
    choice: &DecodingChoice,
) -> Result<SchemeVerdict, SchemeError> {
    if scheme.num_messages() != inst.num_messages() {
        return Err(SchemeError::MessageCountMismatch {
            got: scheme.num_messages(),
            expected: inst.num_messages(),
        });
    }
    choice.check(inst).map_err(|e| match e {
        crate::composite::CompositeError::InvalidChoice(user) => {
            SchemeError::InvalidDecodingSet { user }
        }
        _ => SchemeError::InvalidDecodingSet { user: 0 },
    })?;
    let c = scheme.channel_bits;
    let mut channel_ok = Vec::new();
    let mut channel_entropy = Vec::new();
    let mut mac = Vec::new();
    for (spec, k_set) in inst.users().iter().zip(&choice.sets) {
        let h = conditional_entropy(scheme, &spec.knows);
        channel_entropy.push(h);
        channel_ok.push(h as u64 <= c);
        let members: Vec<MessageId> = k_set.iter().copied().collect();
        let mut checks = Vec::new();
        for mask in 1u64..1 << members.len() {
            let j_set: MessageSet = members
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &m)| m)
                .collect();
            if j_set.is_disjoint(&spec.demands) {
                continue;
            }
            let kappa = kappa_unchecked(scheme, &spec.knows, &j_set, k_set);
            let load = j_set.iter().map(|m| scheme.msg_bits[m.offset()]).sum();
            checks.push(MacCheck {
                set: j_set,
                kappa,
                load,
                ok: load <= kappa,
            });
        }
        mac.push(checks);
    }
    let min_bits = inst
        .users()
        .iter()
        .flat_map(|u| u.demands.iter())
        .map(|m| scheme.msg_bits[m.offset()])
        .min()
        .unwrap_or(0);
    Ok(SchemeVerdict {
        channel_ok,
        channel_entropy,
        mac,
        rate_vector: scheme.msg_bits.clone(),
        symmetric_rate: ExactRational::from(min_bits) / ExactRational::from(c),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeMode {
    /// Null-space test on the unknown columns.
    Algebraic,
    /// Exhaustive check that the received word determines the demands.
    Enumerate,
}

/// Whether each user recovers its demanded bits with zero error from `X`
/// and its side information.
///
/// Both modes condition on side information equal to zero: `X` is linear, so
/// the known part of `X` can always be subtracted.
pub fn zero_error_decode_check(
    inst: &IndexCodingInstance,
    scheme: &LinearScheme,
    mode: DecodeMode,
) -> Result<Vec<bool>, SchemeError> {
    if scheme.num_messages() != inst.num_messages() {
        return Err(SchemeError::MessageCountMismatch {
            got: scheme.num_messages(),
            expected: inst.num_messages(),
        });
    }
    let m = scheme.global_matrix();
    inst.users()
        .iter()
        .enumerate()
        .map(|(j, spec)| {
            let unknown = scheme.columns_of(|msg| !spec.knows.contains(&msg));
            let demanded: Vec<usize> = unknown
                .iter()
                .enumerate()
                .filter(|(_, c)| {
                    spec.demands
                        .iter()
                        .any(|&d| scheme.column_range(d).contains(c))
                })
                .map(|(k, _)| k)
                .collect();
            let sub = m.select_columns(&unknown);
            match mode {
                DecodeMode::Algebraic => Ok(sub
                    .nullspace()
                    .iter()
                    .all(|v| demanded.iter().all(|&k| !v.get(k)))),
                DecodeMode::Enumerate => {
                    if unknown.len() > MAX_ENUMERATION_BITS {
                        return Err(SchemeError::EnumerationTooLarge {
                            user: j + 1,
                            bits: unknown.len(),
                        });
                    }
                    Ok(enumerate_decodes(&sub, &demanded))
                }
            }
        })
        .collect()
}

/// Walks all inputs in Gray-code order and checks that equal outputs always
/// carry equal demanded bits.
fn enumerate_decodes(sub: &Gf2Matrix, demanded: &[usize]) -> bool {
    let n = sub.num_cols();
    let columns = sub.transpose();
    let mut x = BitVec::zeros(sub.num_rows());
    let mut u = 0u64;
    let mut seen: BTreeMap<BitVec, u64> = BTreeMap::new();
    let demand_bits = |u: u64| {
        demanded
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &c)| acc | (u >> c & 1) << k)
    };
    for step in 0u64..1 << n {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            u ^= 1 << bit;
            x.xor_assign(columns.row(bit));
        }
        let d = demand_bits(u);
        if *seen.entry(x.clone()).or_insert(d) != d {
            return false;
        }
    }
    true
}

/// The shipped schemes; `example2` sends `U1+U3+U4`, `U2+U4+U5` and
/// `U1+U2+U6` with one bit per message over a 3-bit channel.
pub fn builtin_scheme(name: &str) -> Result<LinearScheme, SchemeError> {
    match name {
        "example2" => {
            let composite = |ids: [u32; 3]| {
                let mut row = BitVec::zeros(6);
                for i in ids {
                    row.set(i as usize - 1, true);
                }
                Composite {
                    support: message_set(ids),
                    map: Gf2Matrix::from_rows(6, alloc::vec![row]),
                }
            };
            LinearScheme::new(
                alloc::vec![1; 6],
                3,
                alloc::vec![
                    composite([1, 3, 4]),
                    composite([2, 4, 5]),
                    composite([1, 2, 6])
                ],
            )
        }
        _ => Err(SchemeError::UnknownName(name.into())),
    }
}

pub fn builtin_scheme_names() -> [&'static str; 1] {
    ["example2"]
}

/// Realizes an integer composite allocation as a linear scheme: message `i`
/// is split into one private segment of `S_P` bits for every `P` containing
/// it, and `X_P` is the bitwise XOR of the segments of its members.
///
/// The resulting entropies reproduce the composite coding quantities:
/// `H(X | U_A) = sum_{P not in A} S_P` and `kappa_J = v_J`.
pub fn composite_embedding(
    inst: &IndexCodingInstance,
    alloc: &CompositeAllocation,
) -> Result<LinearScheme, SchemeError> {
    let n = inst.num_messages();
    let mut sizes: Vec<(&MessageSet, usize)> = Vec::new();
    for (p, s) in &alloc.rates {
        let bad = || SchemeError::NonIntegerAllocation(crate::instance::SetDisplay(p).to_string());
        if s.is_negative() || !s.is_integer() {
            return Err(bad());
        }
        let bits = usize::try_from(s.numer()).map_err(|_| bad())?;
        if p.is_empty() || p.iter().any(|m| m.0 == 0 || m.index() > n) {
            return Err(bad());
        }
        if bits > 0 {
            sizes.push((p, bits));
        }
    }
    let mut msg_bits = alloc::vec![0usize; n];
    // Offset of each (P, member) segment within that member's bits.
    let mut segment: BTreeMap<(usize, MessageId), usize> = BTreeMap::new();
    for (k, (p, bits)) in sizes.iter().enumerate() {
        for &m in p.iter() {
            segment.insert((k, m), msg_bits[m.offset()]);
            msg_bits[m.offset()] += bits;
        }
    }
    let starts: Vec<usize> = msg_bits
        .iter()
        .scan(0, |acc, &l| {
            let s = *acc;
            *acc += l;
            Some(s)
        })
        .collect();
    let total: usize = msg_bits.iter().sum();
    let composites = sizes
        .iter()
        .enumerate()
        .map(|(k, (p, bits))| {
            let rows = (0..*bits)
                .map(|r| {
                    let mut row = BitVec::zeros(total);
                    for &m in p.iter() {
                        row.set(starts[m.offset()] + segment[&(k, m)] + r, true);
                    }
                    row
                })
                .collect();
            Composite {
                support: (*p).clone(),
                map: Gf2Matrix::from_rows(total, rows),
            }
        })
        .collect();
    LinearScheme::new(msg_bits, inst.channel_bits(), composites)
}
