//! The maximum acyclic induced subgraph (MAIS) outer bound for multiple
//! unicast instances: messages of any acyclic set `S` satisfy
//! `sum_{i in S} R_i <= c`, so `R_sym <= c / |S|`.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{IndexCodingInstance, InstanceError, MessageId, SideInfoGraph};
use crate::rational::ExactRational;

pub const DEFAULT_MAX_VERTICES: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OuterError {
    #[error("graph has {got} vertices, more than the limit {limit}")]
    TooManyVertices { got: usize, limit: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicBoundResult {
    pub mais_size: usize,
    /// Lexicographically smallest maximum acyclic set.
    pub witness: Vec<MessageId>,
    pub symmetric_upper: ExactRational,
}

pub fn mais(graph: &SideInfoGraph, channel_bits: u64) -> Result<AcyclicBoundResult, OuterError> {
    mais_with_limit(graph, channel_bits, DEFAULT_MAX_VERTICES)
}

pub fn mais_with_limit(
    graph: &SideInfoGraph,
    channel_bits: u64,
    limit: usize,
) -> Result<AcyclicBoundResult, OuterError> {
    let n = graph.len();
    if n > limit.min(31) {
        return Err(OuterError::TooManyVertices { got: n, limit });
    }
    if n == 0 {
        return Err(OuterError::EmptyGraph);
    }
    let out: Vec<u32> = (0..n)
        .map(|v| graph.successors(v).iter().fold(0, |m, &w| m | 1 << w))
        .collect();
    let mut search = Search {
        out: &out,
        n,
        best: 0,
        best_size: 0,
    };
    search.dfs(0, 0, 0);
    let witness_mask = search.best;
    assert!(
        is_acyclic_kahn(graph, witness_mask),
        "maximum acyclic set failed the independent cycle check"
    );
    let mut witness: Vec<MessageId> = (0..n)
        .filter(|&v| witness_mask >> v & 1 == 1)
        .map(|v| graph.vertices()[v])
        .collect();
    witness.sort();
    Ok(AcyclicBoundResult {
        mais_size: witness.len(),
        symmetric_upper: ExactRational::from(channel_bits) / ExactRational::from(witness.len()),
        witness,
    })
}

/// `c / mais` on the side-information digraph of a multiple unicast instance.
pub fn acyclic_symmetric_bound(inst: &IndexCodingInstance) -> Result<ExactRational, OuterError> {
    let graph = inst.side_info_graph()?;
    Ok(mais(&graph, inst.channel_bits())?.symmetric_upper)
}

struct Search<'a> {
    out: &'a [u32],
    n: usize,
    best: u32,
    best_size: u32,
}

impl Search<'_> {
    /// Include-before-exclude over vertices in order, so the first set of a
    /// given size reached is the lexicographically smallest one. Cyclic sets
    /// are never extended: every superset of a cycle is cyclic.
    fn dfs(&mut self, v: usize, set: u32, size: u32) {
        if size + (self.n - v) as u32 <= self.best_size {
            return;
        }
        if v == self.n {
            self.best = set;
            self.best_size = size;
            return;
        }
        let with = set | 1 << v;
        if !self.closes_cycle(v, with) {
            self.dfs(v + 1, with, size + 1);
        }
        self.dfs(v + 1, set, size);
    }

    /// Whether `v` reaches itself inside `set`.
    fn closes_cycle(&self, v: usize, set: u32) -> bool {
        let mut seen = 0u32;
        let mut frontier = self.out[v] & set;
        while frontier != 0 {
            if frontier >> v & 1 == 1 {
                return true;
            }
            seen |= frontier;
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let w = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.out[w];
            }
            frontier = next & set & !seen;
        }
        false
    }
}

/// Kahn's algorithm on the subgraph induced by `mask`.
fn is_acyclic_kahn(graph: &SideInfoGraph, mask: u32) -> bool {
    let n = graph.len();
    let inside = |v: usize| mask >> v & 1 == 1;
    let mut indegree = vec![0usize; n];
    for v in (0..n).filter(|&v| inside(v)) {
        for &w in graph.successors(v) {
            if inside(w) {
                indegree[w] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| inside(v) && indegree[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = queue.pop() {
        removed += 1;
        for &w in graph.successors(v) {
            if inside(w) {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push(w);
                }
            }
        }
    }
    removed == mask.count_ones() as usize
}
