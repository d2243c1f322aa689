//! General index coding instances and their side-information digraphs.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// 1-based message index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId(pub u32);

impl MessageId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Zero-based position, for column and bitmask offsets.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Debug for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type MessageSet = BTreeSet<MessageId>;

pub fn message_set<I: IntoIterator<Item = u32>>(ids: I) -> MessageSet {
    ids.into_iter().map(MessageId).collect()
}

/// Writes a set as `{1,3,4}`.
pub struct SetDisplay<'a>(pub &'a MessageSet);

impl fmt::Display for SetDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, m) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserSpec {
    pub demands: MessageSet,
    pub knows: MessageSet,
}

impl UserSpec {
    pub fn new(demands: MessageSet, knows: MessageSet) -> Self {
        Self { demands, knows }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance is not multiple unicast: {0}")]
    NotMultipleUnicast(String),
    #[error("unknown builtin instance `{0}`")]
    UnknownName(String),
}

/// Users' demand and side-information sets over `num_messages` messages,
/// broadcast over a channel carrying `channel_bits` bits per use.
///
/// Construction does not validate; see [`IndexCodingInstance::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexCodingInstance {
    num_messages: usize,
    users: Vec<UserSpec>,
    channel_bits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyDemand { user: usize },
    FullSideInformation { user: usize },
    Overlap { user: usize, messages: MessageSet },
    OutOfRange { user: usize, message: MessageId },
    UnusedMessage { message: MessageId },
    ZeroChannelBits,
    NoUsers,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDemand { user } => write!(f, "user {user}: empty demand set"),
            Violation::FullSideInformation { user } => {
                write!(f, "user {user}: side information covers every message")
            }
            Violation::Overlap { user, messages } => {
                write!(
                    f,
                    "user {user}: demand/side-info overlap {}",
                    SetDisplay(messages)
                )
            }
            Violation::OutOfRange { user, message } => {
                write!(f, "user {user}: message {message} out of range")
            }
            Violation::UnusedMessage { message } => {
                write!(f, "message {message} appears in no user's sets")
            }
            Violation::ZeroChannelBits => f.write_str("channel_bits must be positive"),
            Violation::NoUsers => f.write_str("instance has no users"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl IndexCodingInstance {
    pub fn new(num_messages: usize, users: Vec<UserSpec>, channel_bits: u64) -> Self {
        Self {
            num_messages,
            users,
            channel_bits,
        }
    }

    pub fn num_messages(&self) -> usize {
        self.num_messages
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn users(&self) -> &[UserSpec] {
        &self.users
    }

    /// User `j`, 1-based.
    pub fn user(&self, j: usize) -> &UserSpec {
        &self.users[j - 1]
    }

    pub fn channel_bits(&self) -> u64 {
        self.channel_bits
    }

    pub fn with_channel_bits(mut self, channel_bits: u64) -> Self {
        self.channel_bits = channel_bits;
        self
    }

    pub fn all_messages(&self) -> MessageSet {
        (1..=self.num_messages as u32).map(MessageId).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.users.is_empty() {
            violations.push(Violation::NoUsers);
        }
        if self.channel_bits == 0 {
            violations.push(Violation::ZeroChannelBits);
        }
        let all = self.all_messages();
        let mut used = MessageSet::new();
        for (idx, u) in self.users.iter().enumerate() {
            let user = idx + 1;
            if u.demands.is_empty() {
                violations.push(Violation::EmptyDemand { user });
            }
            for &m in u.demands.iter().chain(u.knows.iter()) {
                if m.0 == 0 || m.index() > self.num_messages {
                    violations.push(Violation::OutOfRange { user, message: m });
                } else {
                    used.insert(m);
                }
            }
            if !all.is_empty() && all.is_subset(&u.knows) {
                violations.push(Violation::FullSideInformation { user });
            }
            let overlap: MessageSet = u.demands.intersection(&u.knows).copied().collect();
            if !overlap.is_empty() {
                violations.push(Violation::Overlap {
                    user,
                    messages: overlap,
                });
            }
        }
        for m in all.difference(&used) {
            violations.push(Violation::UnusedMessage { message: *m });
        }
        ValidationReport { violations }
    }

    /// True when every user demands exactly one message and no two users share one.
    pub fn is_multiple_unicast(&self) -> bool {
        self.multiple_unicast_check().is_ok()
    }

    fn multiple_unicast_check(&self) -> Result<(), InstanceError> {
        let mut seen = MessageSet::new();
        for (idx, u) in self.users.iter().enumerate() {
            if u.demands.len() != 1 {
                return Err(InstanceError::NotMultipleUnicast(alloc::format!(
                    "user {} demands {} messages",
                    idx + 1,
                    u.demands.len()
                )));
            }
            let m = *u.demands.iter().next().unwrap();
            if !seen.insert(m) {
                return Err(InstanceError::NotMultipleUnicast(alloc::format!(
                    "message {m} demanded by more than one user"
                )));
            }
        }
        Ok(())
    }

    pub fn side_info_graph(&self) -> Result<SideInfoGraph, InstanceError> {
        self.multiple_unicast_check()?;
        let mut pairs: Vec<(MessageId, &UserSpec)> = self
            .users
            .iter()
            .map(|u| (*u.demands.iter().next().unwrap(), u))
            .collect();
        pairs.sort_by_key(|(m, _)| *m);
        let vertices: Vec<MessageId> = pairs.iter().map(|(m, _)| *m).collect();
        let out = pairs
            .iter()
            .map(|(_, u)| {
                u.knows
                    .iter()
                    .filter_map(|k| vertices.binary_search(k).ok())
                    .collect()
            })
            .collect();
        Ok(SideInfoGraph { vertices, out })
    }
}

/// Directed graph over demanded messages; `i -> j` iff the user demanding `i`
/// knows `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideInfoGraph {
    vertices: Vec<MessageId>,
    out: Vec<Vec<usize>>,
}

impl SideInfoGraph {
    pub fn from_edges(vertices: Vec<MessageId>, edges: &[(MessageId, MessageId)]) -> Self {
        let mut out = alloc::vec![Vec::new(); vertices.len()];
        for (a, b) in edges {
            let ia = vertices
                .iter()
                .position(|v| v == a)
                .expect("edge tail not a vertex");
            let ib = vertices
                .iter()
                .position(|v| v == b)
                .expect("edge head not a vertex");
            if !out[ia].contains(&ib) {
                out[ia].push(ib);
            }
        }
        for o in &mut out {
            o.sort_unstable();
        }
        Self { vertices, out }
    }

    pub fn vertices(&self) -> &[MessageId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Out-neighbours of vertex position `v`.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn edges(&self) -> Vec<(MessageId, MessageId)> {
        let mut edges = Vec::new();
        for (i, outs) in self.out.iter().enumerate() {
            for &j in outs {
                edges.push((self.vertices[i], self.vertices[j]));
            }
        }
        edges
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

/// The worked instances that ship with the library.
pub fn builtin_instance(name: &str) -> Result<IndexCodingInstance, InstanceError> {
    let name = name.trim();
    match name {
        "example1" => Ok(example1()),
        "xor2" => Ok(IndexCodingInstance::new(
            2,
            alloc::vec![
                UserSpec::new(message_set([1]), message_set([2])),
                UserSpec::new(message_set([2]), message_set([1])),
            ],
            1,
        )),
        _ => {
            let k = name
                .strip_prefix("no-side-info(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| name.strip_prefix("no-side-info:"))
                .and_then(|k| k.trim().parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| InstanceError::UnknownName(String::from(name)))?;
            Ok(no_side_info(k))
        }
    }
}

pub fn builtin_names() -> [&'static str; 3] {
    ["example1", "xor2", "no-side-info(K)"]
}

fn no_side_info(k: u32) -> IndexCodingInstance {
    let users = (1..=k)
        .map(|i| UserSpec::new(message_set([i]), MessageSet::new()))
        .collect();
    IndexCodingInstance::new(k as usize, users, 1)
}

/// Six-user multiple unicast instance on which composite coding is strictly
/// suboptimal. Channel bits default to 1.
fn example1() -> IndexCodingInstance {
    let sets: [(u32, &[u32]); 6] = [
        (1, &[3, 4]),
        (2, &[4, 5]),
        (3, &[5, 6]),
        (4, &[2, 3, 6]),
        (5, &[1, 4, 6]),
        (6, &[1, 2]),
    ];
    let users = sets
        .iter()
        .map(|(d, a)| UserSpec::new(message_set([*d]), message_set(a.iter().copied())))
        .collect();
    IndexCodingInstance::new(6, users, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn example1_is_valid() {
        let inst = builtin_instance("example1").unwrap();
        assert!(inst.validate().is_ok());
        assert_eq!(inst.num_messages(), 6);
        assert_eq!(inst.user(1).knows, message_set([3, 4]));
        assert_eq!(inst.user(5).knows, message_set([1, 4, 6]));
    }

    #[test]
    fn builtins_validate() {
        for name in [
            "example1",
            "xor2",
            "no-side-info(1)",
            "no-side-info(3)",
            "no-side-info:5",
        ] {
            assert!(builtin_instance(name).unwrap().validate().is_ok(), "{name}");
        }
        let xor2 = builtin_instance("xor2").unwrap();
        assert_eq!(xor2.user(1).demands, message_set([1]));
        assert_eq!(xor2.user(1).knows, message_set([2]));
        let nsi = builtin_instance("no-side-info(3)").unwrap();
        assert_eq!(nsi.num_users(), 3);
        assert!(nsi.users().iter().all(|u| u.knows.is_empty()));
        assert_eq!(
            builtin_instance("nope"),
            Err(InstanceError::UnknownName("nope".into()))
        );
        assert!(builtin_instance("no-side-info(0)").is_err());
    }

    #[test]
    fn empty_demand_is_reported() {
        let inst = IndexCodingInstance::new(
            2,
            vec![
                UserSpec::new(MessageSet::new(), message_set([1])),
                UserSpec::new(message_set([2]), message_set([1])),
            ],
            1,
        );
        let report = inst.validate();
        assert_eq!(report.violations, vec![Violation::EmptyDemand { user: 1 }]);
        assert_eq!(
            alloc::format!("{}", report.violations[0]),
            "user 1: empty demand set"
        );
    }

    #[test]
    fn overlap_is_reported() {
        let inst = IndexCodingInstance::new(
            3,
            vec![
                UserSpec::new(message_set([1, 2]), message_set([2])),
                UserSpec::new(message_set([3]), MessageSet::new()),
            ],
            1,
        );
        let report = inst.validate();
        assert_eq!(
            report.violations,
            vec![Violation::Overlap {
                user: 1,
                messages: message_set([2])
            }]
        );
        assert!(alloc::format!("{}", report.violations[0]).contains("demand/side-info overlap"));
    }

    #[test]
    fn range_and_coverage_violations() {
        let inst = IndexCodingInstance::new(
            3,
            vec![UserSpec::new(message_set([1]), message_set([4]))],
            0,
        );
        let v = inst.validate().violations;
        assert!(v.contains(&Violation::ZeroChannelBits));
        assert!(v.contains(&Violation::OutOfRange {
            user: 1,
            message: MessageId(4)
        }));
        assert!(v.contains(&Violation::UnusedMessage {
            message: MessageId(2)
        }));
        let full = IndexCodingInstance::new(
            1,
            vec![UserSpec::new(message_set([1]), message_set([1]))],
            1,
        );
        assert!(full
            .validate()
            .violations
            .contains(&Violation::FullSideInformation { user: 1 }));
    }

    #[test]
    fn example1_graph_edges() {
        let g = builtin_instance("example1")
            .unwrap()
            .side_info_graph()
            .unwrap();
        let edges = g.edges();
        let from = |v: u32| -> Vec<u32> {
            edges
                .iter()
                .filter(|(a, _)| a.0 == v)
                .map(|(_, b)| b.0)
                .collect()
        };
        assert_eq!(from(1), vec![3, 4]);
        assert_eq!(from(4), vec![2, 3, 6]);
        assert_eq!(g.len(), 6);
        assert_eq!(g.edge_count(), 14);
        assert_eq!(
            g,
            builtin_instance("example1")
                .unwrap()
                .side_info_graph()
                .unwrap()
        );
    }

    #[test]
    fn small_graphs() {
        let g = builtin_instance("xor2").unwrap().side_info_graph().unwrap();
        assert_eq!(
            g.edges(),
            vec![(MessageId(1), MessageId(2)), (MessageId(2), MessageId(1))]
        );
        let g = builtin_instance("no-side-info(2)")
            .unwrap()
            .side_info_graph()
            .unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn graph_rejects_multicast() {
        let inst = IndexCodingInstance::new(
            2,
            vec![UserSpec::new(message_set([1, 2]), MessageSet::new())],
            1,
        );
        assert!(matches!(
            inst.side_info_graph(),
            Err(InstanceError::NotMultipleUnicast(_))
        ));
        let shared = IndexCodingInstance::new(
            2,
            vec![
                UserSpec::new(message_set([1]), message_set([2])),
                UserSpec::new(message_set([1]), MessageSet::new()),
            ],
            1,
        );
        assert!(shared.side_info_graph().is_err());
    }

    #[test]
    fn undemanded_side_info_is_not_a_vertex() {
        let inst = IndexCodingInstance::new(
            3,
            vec![
                UserSpec::new(message_set([1]), message_set([2, 3])),
                UserSpec::new(message_set([2]), message_set([3])),
            ],
            1,
        );
        let g = inst.side_info_graph().unwrap();
        assert_eq!(g.vertices(), &[MessageId(1), MessageId(2)]);
        assert_eq!(g.edges(), vec![(MessageId(1), MessageId(2))]);
    }
}
