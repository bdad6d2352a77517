//! Explicit adversary sequences and closed-form oracles: the three-graph
//! lower-bound construction with its per-round influence formulas, and the
//! chain-collection invariants behind the directed and undirected chain
//! bounds.
//!
//! All index arithmetic is exact integer arithmetic; floors and ceilings are
//! never computed through floating point.

use serde::Serialize;
use thiserror::Error;

use crate::dissemination::{run, RoundCount, SimulationTrace};
use crate::graphs::{GraphSequence, LabeledDigraph};
use crate::nodeset::{NodeId, NodeSet, MAX_N};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("lower-bound construction needs 4 <= n <= {max}, got {n}", max = MAX_N)]
    UnsupportedN { n: u32 },
    #[error("round {r} outside 0..={last} for n = {n}")]
    RoundOutOfRange { r: u32, last: u32, n: u32 },
    #[error("node {i} out of range 1..={n}")]
    NodeOutOfRange { i: u32, n: u32 },
    #[error("round {round} of the trace is not a directed chain")]
    NotAChainRound { round: u32 },
    #[error("round {round} of the trace is not an undirected chain")]
    NotAnUndirectedChainRound { round: u32 },
    #[error("collection construction failed at round {round}: {dropped} sets dropped, at most {allowed} allowed")]
    TooManyDrops { round: u32, dropped: u32, allowed: u32 },
    #[error("collection at round {round} violates the union bound for I = {members:?}")]
    UnionBoundViolated { round: u32, members: Vec<u32> },
}

/// `⌈(3n-1)/2⌉ - 2`, the length of the lower-bound sequence.
pub fn expected_lower_bound(n: u32) -> u32 {
    ceil_div(3 * n - 1, 2) - 2
}

fn ceil_div(a: u32, b: u32) -> u32 {
    a.div_ceil(b)
}

/// The three graphs of the lower-bound construction and their schedule:
/// `G1` for rounds `1..=⌊(n-1)/2⌋`, `G2` up to round `n-2`, `G3` up to round
/// `⌈(3n-1)/2⌉ - 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundSequence {
    n: u32,
    pub g1: LabeledDigraph,
    pub g2: LabeledDigraph,
    pub g3: LabeledDigraph,
    pub phase1: (u32, u32),
    pub phase2: (u32, u32),
    pub phase3: (u32, u32),
}

impl LowerBoundSequence {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn total_rounds(&self) -> u32 {
        self.phase3.1
    }

    pub fn graph_for_round(&self, r: u32) -> Option<&LabeledDigraph> {
        if (self.phase1.0..=self.phase1.1).contains(&r) {
            Some(&self.g1)
        } else if (self.phase2.0..=self.phase2.1).contains(&r) {
            Some(&self.g2)
        } else if (self.phase3.0..=self.phase3.1).contains(&r) {
            Some(&self.g3)
        } else {
            None
        }
    }

    /// The schedule expanded into an explicit finite sequence.
    pub fn to_sequence(&self) -> GraphSequence {
        let rounds: Vec<LabeledDigraph> =
            (1..=self.total_rounds()).map(|r| self.graph_for_round(r).unwrap().clone()).collect();
        GraphSequence::new(self.n, rounds, None).expect("schedule rounds share n")
    }
}

/// Builds the lower-bound construction for `n >= 4`.
///
/// `G1` is the chain `1 -> 2 -> ... -> n`. `G2` is rooted at `n` with edges
/// `n -> 1`, `n -> n-1`, `i -> i+1` for `i <= ⌊n/2⌋ - 1` and `i -> i-1` for
/// `i >= ⌊n/2⌋ + 2`. `G3` is the chain rooted at `⌊n/2⌋` running
/// `⌊n/2⌋ -> ... -> n -> 1 -> ... -> ⌊n/2⌋ - 1`.
pub fn lower_bound_sequence(n: u32) -> Result<LowerBoundSequence, ConstructionError> {
    if !(4..=MAX_N).contains(&n) {
        return Err(ConstructionError::UnsupportedN { n });
    }
    let half = n / 2;

    let g1_edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
    let g1 = LabeledDigraph::new(n, &g1_edges, false).unwrap();

    let mut g2_edges = vec![(n, 1), (n, n - 1)];
    for i in 1..=half.saturating_sub(1) {
        g2_edges.push((i, i + 1));
    }
    for i in (half + 2..=n - 1).rev() {
        g2_edges.push((i, i - 1));
    }
    let g2 = LabeledDigraph::new(n, &g2_edges, false).unwrap();

    let mut g3_edges: Vec<(u32, u32)> = (half..n).map(|i| (i, i + 1)).collect();
    g3_edges.push((n, 1));
    for i in 1..=half.saturating_sub(2) {
        g3_edges.push((i, i + 1));
    }
    let g3 = LabeledDigraph::new(n, &g3_edges, false).unwrap();

    let p1_end = (n - 1) / 2;
    Ok(LowerBoundSequence {
        n,
        g1,
        g2,
        g3,
        phase1: (1, p1_end),
        phase2: (p1_end + 1, n - 2),
        phase3: (n - 1, expected_lower_bound(n)),
    })
}

/// How `⌊(-n-1)/2⌋` in the closed-form influence block is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegDivReading {
    /// Floor toward negative infinity (Euclidean division).
    FloorTowardNegInfinity,
    /// Truncation toward zero.
    TruncateTowardZero,
}

/// How the wrapped set of the final phase is read for `2i <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrapReading {
    /// The unwrapped interval `{i, ..., ⌊(n-1)/2⌋ + i + r - (n-2)}` continued
    /// cyclically past `n`.
    CyclicContinuation,
    /// The wrap endpoint `r - (n-2)` exactly as printed.
    AsPrinted,
}

/// A complete reading of the formula block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormulaReading {
    pub neg_div: NegDivReading,
    pub wrap: WrapReading,
}

impl FormulaReading {
    pub const ALL: [FormulaReading; 4] = [
        FormulaReading {
            neg_div: NegDivReading::FloorTowardNegInfinity,
            wrap: WrapReading::CyclicContinuation,
        },
        FormulaReading {
            neg_div: NegDivReading::FloorTowardNegInfinity,
            wrap: WrapReading::AsPrinted,
        },
        FormulaReading {
            neg_div: NegDivReading::TruncateTowardZero,
            wrap: WrapReading::CyclicContinuation,
        },
        FormulaReading {
            neg_div: NegDivReading::TruncateTowardZero,
            wrap: WrapReading::AsPrinted,
        },
    ];

    /// The reading that matches the simulation for every tested `n`.
    pub const IDENTIFIED: FormulaReading = FormulaReading::ALL[0];

    pub fn label(&self) -> String {
        let nd = match self.neg_div {
            NegDivReading::FloorTowardNegInfinity => "floor",
            NegDivReading::TruncateTowardZero => "trunc",
        };
        let wr = match self.wrap {
            WrapReading::CyclicContinuation => "cyclic",
            WrapReading::AsPrinted => "printed",
        };
        format!("{nd}+{wr}")
    }
}

/// The closed-form influence set `S_i(r)` of the lower-bound execution,
/// under the identified formula reading.
pub fn closed_form_influence(n: u32, i: NodeId, r: u32) -> Result<NodeSet, ConstructionError> {
    closed_form_influence_with(FormulaReading::IDENTIFIED, n, i, r)
}

/// The closed-form influence set under an explicit reading of the ambiguous
/// spots; [`verify_lower_bound`] reports which readings match simulation.
pub fn closed_form_influence_with(
    reading: FormulaReading,
    n: u32,
    i: NodeId,
    r: u32,
) -> Result<NodeSet, ConstructionError> {
    if !(4..=MAX_N).contains(&n) {
        return Err(ConstructionError::UnsupportedN { n });
    }
    if i.get() > n {
        return Err(ConstructionError::NodeOutOfRange { i: i.get(), n });
    }
    let last = expected_lower_bound(n);
    if r > last {
        return Err(ConstructionError::RoundOutOfRange { r, last, n });
    }

    let ni = i64::from(n);
    let ii = i64::from(i.get());
    let ri = i64::from(r);
    let half_floor = ni / 2; // ⌊n/2⌋
    let half_minus = (ni - 1) / 2; // ⌊(n-1)/2⌋

    if r == 0 {
        return Ok(NodeSet::singleton(i));
    }

    if ri <= half_minus {
        // Chain phase: S_i(r) = {i, ..., min(r+i, n)}.
        return Ok(interval(ii, (ri + ii).min(ni)));
    }

    if ri <= ni - 2 {
        // Two-branch phase.
        return if 2 * ii <= ni {
            Ok(interval(ii, half_minus + ii))
        } else {
            let start = (half_floor + 1).max(ii - (ri - half_minus));
            Ok(interval(start, ni).union(interval(1, ri - half_minus)))
        };
    }

    // Final phase.
    if 2 * ii > ni {
        let neg = match reading.neg_div {
            NegDivReading::FloorTowardNegInfinity => (-ni - 1).div_euclid(2),
            NegDivReading::TruncateTowardZero => (-ni - 1) / 2,
        };
        let start = (half_floor + 1).max(ii + 2 + neg);
        let wrap_end = (ni + 2) / 2 - 2; // ⌈(n+1)/2⌉ - 2
        return Ok(interval(start, ni).union(interval(1, wrap_end)));
    }

    let end = half_minus + ii + ri - (ni - 2);
    match reading.wrap {
        WrapReading::CyclicContinuation => {
            if end <= ni {
                Ok(interval(ii, end))
            } else {
                Ok(interval(ii, ni).union(interval(1, end - ni)))
            }
        }
        WrapReading::AsPrinted => {
            // Printed case split: unwrapped while i <= ⌈(3n+1)/2⌉ - 2 - r.
            if ii <= (3 * ni + 2) / 2 - 2 - ri {
                Ok(interval(ii, end))
            } else {
                Ok(interval(ii, ni).union(interval(1, ri - (ni - 2))))
            }
        }
    }
}

fn interval(lo: i64, hi: i64) -> NodeSet {
    if lo > hi {
        return NodeSet::EMPTY;
    }
    debug_assert!(lo >= 1 && hi <= i64::from(MAX_N));
    NodeSet::interval(lo as u32, hi as u32)
}

/// One formula/simulation mismatch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulaMismatch {
    pub i: u32,
    pub r: u32,
    pub formula: NodeSet,
    pub simulated: NodeSet,
}

/// Outcome of checking one formula reading against the simulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReadingOutcome {
    pub reading: FormulaReading,
    pub label: String,
    pub matches: bool,
    pub first_mismatch: Option<FormulaMismatch>,
}

/// Verification report for the lower-bound construction at one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LowerBoundReport {
    pub n: u32,
    pub expected_rounds: u32,
    pub simulated: RoundCount,
    /// (a) the simulated dissemination time equals `⌈(3n-1)/2⌉ - 2` exactly.
    pub dissemination_exact: bool,
    /// (b) no influence set reaches size `n` before the final round.
    pub no_premature_full: bool,
    /// (c) per-reading formula comparison against the simulation.
    pub readings: Vec<ReadingOutcome>,
    /// The first reading matching at every `(i, r)`, if any.
    pub identified_reading: Option<String>,
    pub pass: bool,
}

/// Simulates the constructed sequence and checks the dissemination time, the
/// absence of premature full sets, and the closed-form formulas at every
/// `(i, r)` in range.
pub fn verify_lower_bound(n: u32) -> Result<LowerBoundReport, ConstructionError> {
    let construction = lower_bound_sequence(n)?;
    let total = construction.total_rounds();
    let trace = run(construction.to_sequence(), total).expect("construction supplies its rounds");

    let simulated = trace.dissemination_time();
    let dissemination_exact = simulated == RoundCount::Finite(total);
    let no_premature_full = (0..total)
        .all(|r| trace.state_at(r).map(|s| !s.is_terminal()).unwrap_or(false));

    let mut readings = Vec::new();
    for reading in FormulaReading::ALL {
        let mut first_mismatch = None;
        'scan: for r in 0..=trace.last_round() {
            let state = trace.state_at(r).unwrap();
            for i in (0..n as usize).map(NodeId::from_index) {
                let formula = closed_form_influence_with(reading, n, i, r)?;
                let simulated = state.influence_set(i);
                if formula != simulated {
                    first_mismatch = Some(FormulaMismatch {
                        i: i.get(),
                        r,
                        formula,
                        simulated,
                    });
                    break 'scan;
                }
            }
        }
        readings.push(ReadingOutcome {
            reading,
            label: reading.label(),
            matches: first_mismatch.is_none(),
            first_mismatch,
        });
    }
    let identified_reading = readings.iter().find(|o| o.matches).map(|o| o.label.clone());
    let pass = dissemination_exact && no_premature_full && identified_reading.is_some();

    Ok(LowerBoundReport {
        n,
        expected_rounds: total,
        simulated,
        dissemination_exact,
        no_premature_full,
        readings,
        identified_reading,
        pass,
    })
}

/// A verified collection of influence sets at one round, witnessing the
/// union bound behind the chain dissemination bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollectionWitness {
    pub round: u32,
    pub members: Vec<NodeId>,
    pub sets: Vec<NodeSet>,
    /// Minimum member size required at this round.
    pub min_size: u32,
    /// Union lower bound is `union_base + |I| - 1` for every nonempty `I`.
    pub union_base: u32,
}

impl CollectionWitness {
    /// Brute-force check of the union bound over all nonempty sub-index-sets.
    pub fn union_bound_holds(&self) -> bool {
        let m = self.sets.len();
        debug_assert!(m <= 20);
        for mask in 1u32..(1 << m) {
            let mut union = NodeSet::EMPTY;
            for (j, &s) in self.sets.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    union |= s;
                }
            }
            if union.len() < self.union_base + mask.count_ones() - 1 {
                return false;
            }
        }
        true
    }
}

/// Witnesses for every simulated round of a directed-chain trace: `n - r`
/// sets of size at least `r + 1` whose unions obey
/// `|⋃_{i ∈ I} S_{p_i}(r)| >= r + 1 + |I| - 1`.
///
/// Follows the proof's admission order: carry the previous members forward in
/// ascending index order, dropping at most one per round.
pub fn chain_collection_invariant(
    trace: &SimulationTrace,
) -> Result<Vec<CollectionWitness>, ConstructionError> {
    collection_invariant(trace, ChainFlavor::Directed)
}

/// The undirected variant: `n - 2r` sets of size at least `2r + 1` with
/// `|⋃| >= 2r + 1 + |I| - 1`, dropping at most two sets per round.
pub fn undirected_chain_invariant(
    trace: &SimulationTrace,
) -> Result<Vec<CollectionWitness>, ConstructionError> {
    collection_invariant(trace, ChainFlavor::Undirected)
}

#[derive(Clone, Copy, PartialEq)]
enum ChainFlavor {
    Directed,
    Undirected,
}

impl ChainFlavor {
    fn check_round(self, g: &LabeledDigraph, round: u32) -> Result<(), ConstructionError> {
        let report = g.classify();
        match self {
            ChainFlavor::Directed if !report.is_directed_chain => {
                Err(ConstructionError::NotAChainRound { round })
            }
            ChainFlavor::Undirected if !report.is_undirected_chain => {
                Err(ConstructionError::NotAnUndirectedChainRound { round })
            }
            _ => Ok(()),
        }
    }

    fn min_size(self, r: u32) -> u32 {
        match self {
            ChainFlavor::Directed => r + 1,
            ChainFlavor::Undirected => 2 * r + 1,
        }
    }

    fn allowed_drops(self) -> u32 {
        match self {
            ChainFlavor::Directed => 1,
            ChainFlavor::Undirected => 2,
        }
    }

    /// Largest round the invariant covers.
    fn max_round(self, n: u32) -> u32 {
        match self {
            ChainFlavor::Directed => n - 1,
            ChainFlavor::Undirected => (n - 1) / 2,
        }
    }
}

fn collection_invariant(
    trace: &SimulationTrace,
    flavor: ChainFlavor,
) -> Result<Vec<CollectionWitness>, ConstructionError> {
    let n = trace.n();
    let last = trace.last_round().min(flavor.max_round(n));

    let mut members: Vec<NodeId> = (0..n as usize).map(NodeId::from_index).collect();
    let mut witnesses = Vec::new();

    let base = CollectionWitness {
        round: 0,
        members: members.clone(),
        sets: members.iter().map(|&p| NodeSet::singleton(p)).collect(),
        min_size: flavor.min_size(0),
        union_base: flavor.min_size(0),
    };
    if !base.union_bound_holds() {
        return Err(ConstructionError::UnionBoundViolated {
            round: 0,
            members: members.iter().map(|p| p.get()).collect(),
        });
    }
    witnesses.push(base);

    for r in 1..=last {
        let graph = trace.sequence().graph_at(r).expect("trace round exists");
        flavor.check_round(graph, r)?;
        let state = trace.state_at(r).expect("state exists");
        let min_size = flavor.min_size(r);
        let union_base = min_size;

        let mut admitted: Vec<NodeId> = Vec::with_capacity(members.len());
        let mut admitted_sets: Vec<NodeSet> = Vec::new();
        let mut dropped = 0u32;
        for &p in &members {
            let candidate = state.influence_set(p);
            let admissible = candidate.len() >= min_size
                && union_bound_with(&admitted_sets, candidate, union_base);
            if admissible {
                admitted.push(p);
                admitted_sets.push(candidate);
            } else {
                dropped += 1;
            }
        }
        if dropped > flavor.allowed_drops() {
            return Err(ConstructionError::TooManyDrops {
                round: r,
                dropped,
                allowed: flavor.allowed_drops(),
            });
        }

        let witness = CollectionWitness {
            round: r,
            members: admitted.clone(),
            sets: admitted_sets,
            min_size,
            union_base,
        };
        if !witness.union_bound_holds() {
            return Err(ConstructionError::UnionBoundViolated {
                round: r,
                members: admitted.iter().map(|p| p.get()).collect(),
            });
        }
        members = admitted;
        witnesses.push(witness);
    }
    Ok(witnesses)
}

/// Whether adding `candidate` keeps `|⋃| >= base + |I| - 1` for every subset
/// `I` that includes the candidate.
fn union_bound_with(admitted: &[NodeSet], candidate: NodeSet, base: u32) -> bool {
    let m = admitted.len();
    debug_assert!(m <= 20);
    for mask in 0u32..(1 << m) {
        let mut union = candidate;
        for (j, &s) in admitted.iter().enumerate() {
            if mask & (1 << j) != 0 {
                union |= s;
            }
        }
        if union.len() < base + mask.count_ones() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissemination::run;
    use crate::graphs::GraphSequence;

    fn id(v: u32) -> NodeId {
        NodeId::new(v).unwrap()
    }

    fn set(vs: &[u32]) -> NodeSet {
        vs.iter().map(|&v| id(v)).collect()
    }

    #[test]
    fn construction_shape_n6() {
        let c = lower_bound_sequence(6).unwrap();
        assert_eq!(c.phase1, (1, 2));
        assert_eq!(c.phase2, (3, 4));
        assert_eq!(c.phase3, (5, 7));
        let g1_edges: Vec<(u32, u32)> =
            c.g1.edges().iter().map(|&(u, v)| (u.get(), v.get())).collect();
        assert_eq!(g1_edges, vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]);

        let mut g2_edges: Vec<(u32, u32)> =
            c.g2.edges().iter().map(|&(u, v)| (u.get(), v.get())).collect();
        g2_edges.sort_unstable();
        assert_eq!(g2_edges, vec![(1, 2), (2, 3), (5, 4), (6, 1), (6, 5)]);
        let report = c.g2.classify();
        assert_eq!(report.root, Some(id(6)));
        assert_eq!(report.leaf_count, Some(2));
    }

    #[test]
    fn construction_graphs_are_rooted_trees() {
        for n in 4..=20 {
            let c = lower_bound_sequence(n).unwrap();
            for (g, leaves) in [(&c.g1, 1), (&c.g2, 2), (&c.g3, 1)] {
                let report = g.classify();
                assert!(report.is_rooted_tree, "n={n}: {g:?}");
                assert_eq!(report.leaf_count, Some(leaves), "n={n}: {g:?}");
            }
            assert_eq!(c.g3.classify().root, Some(id(n / 2)));
        }
    }

    #[test]
    fn schedule_lengths() {
        assert_eq!(lower_bound_sequence(4).unwrap().total_rounds(), 4);
        assert_eq!(expected_lower_bound(7), 8);
        assert_eq!(expected_lower_bound(10), 13);
        assert!(lower_bound_sequence(3).is_err());
    }

    #[test]
    fn closed_form_chain_phase() {
        assert_eq!(closed_form_influence(6, id(1), 1).unwrap(), set(&[1, 2]));
        assert_eq!(closed_form_influence(6, id(5), 2).unwrap(), set(&[5, 6]));
        assert_eq!(closed_form_influence(6, id(6), 0).unwrap(), set(&[6]));
        assert!(closed_form_influence(6, id(1), 8).is_err());
    }

    #[test]
    fn verify_small_n() {
        for (n, expected) in [(4, 4), (7, 8), (10, 13)] {
            let report = verify_lower_bound(n).unwrap();
            assert_eq!(report.expected_rounds, expected);
            assert!(report.pass, "n={n}: {report:?}");
            assert_eq!(report.identified_reading.as_deref(), Some("floor+cyclic"));
        }
    }

    #[test]
    fn printed_wrap_reading_fails_for_larger_n() {
        // The as-printed wrap endpoint over-claims at (i, r) = (n/2, n) for
        // n = 6; the report must say so while the cyclic reading matches.
        let report = verify_lower_bound(6).unwrap();
        let printed = report
            .readings
            .iter()
            .find(|o| o.label == "floor+printed")
            .unwrap();
        assert!(!printed.matches);
        let mismatch = printed.first_mismatch.as_ref().unwrap();
        assert_eq!((mismatch.i, mismatch.r), (3, 6));
        assert!(report.pass);
    }

    #[test]
    fn truncation_reading_fails_for_even_n() {
        let report = verify_lower_bound(4).unwrap();
        let trunc = report.readings.iter().find(|o| o.label == "trunc+cyclic").unwrap();
        assert!(!trunc.matches);
        assert_eq!(trunc.first_mismatch.as_ref().map(|m| (m.i, m.r)), Some((4, 3)));
    }

    #[test]
    fn chain_witnesses_on_constant_chain() {
        let n = 6;
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
        let chain = LabeledDigraph::new(n, &edges, false).unwrap();
        let trace = run(GraphSequence::constant(chain), n - 1).unwrap();
        let witnesses = chain_collection_invariant(&trace).unwrap();
        assert_eq!(witnesses.len(), n as usize);
        assert_eq!(witnesses[0].members.len(), n as usize);
        for w in &witnesses {
            assert_eq!(w.members.len() as u32, n - w.round);
            assert!(w.sets.iter().all(|s| s.len() >= w.min_size));
        }
        // Endpoint: a single member holding all of Π.
        let last = witnesses.last().unwrap();
        assert_eq!(last.members.len(), 1);
        assert!(last.sets[0].is_full(n));
    }

    #[test]
    fn undirected_witnesses_on_constant_chain() {
        let n = 5;
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
        let chain = LabeledDigraph::new(n, &edges, true).unwrap();
        let trace = run(GraphSequence::constant(chain), n).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::Finite(2));
        let witnesses = undirected_chain_invariant(&trace).unwrap();
        for w in &witnesses {
            assert_eq!(w.members.len() as u32, n - 2 * w.round);
            assert!(w.sets.iter().all(|s| s.len() >= w.min_size));
            assert!(w.union_bound_holds());
        }
    }

    #[test]
    fn reports_and_witnesses_serialize() {
        let report = verify_lower_bound(6).unwrap();
        let doc = serde_json::to_string(&report).unwrap();
        assert!(doc.contains("\"identified_reading\":\"floor+cyclic\""), "{doc}");

        let edges: Vec<(u32, u32)> = (1..4).map(|i| (i, i + 1)).collect();
        let chain = LabeledDigraph::new(4, &edges, false).unwrap();
        let trace = run(GraphSequence::constant(chain), 3).unwrap();
        let witnesses = chain_collection_invariant(&trace).unwrap();
        let doc = serde_json::to_string(&witnesses).unwrap();
        assert!(doc.contains("\"union_base\""), "{doc}");
    }

    #[test]
    fn chain_invariant_rejects_non_chain_rounds() {
        let star = LabeledDigraph::new(4, &[(1, 2), (1, 3), (1, 4)], false).unwrap();
        let trace = run(GraphSequence::constant(star), 3).unwrap();
        assert_eq!(
            chain_collection_invariant(&trace),
            Err(ConstructionError::NotAChainRound { round: 1 })
        );
    }
}
