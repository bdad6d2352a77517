//! Coverings of the process set built from influence sets: strictness,
//! unique nodes, the reduction procedure, and the round-by-round structural
//! checks that make the upper-bound proofs auditable on concrete traces.

use serde::Serialize;
use thiserror::Error;

use crate::dissemination::SimulationTrace;
use crate::nodeset::{NodeId, NodeSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoveringError {
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("index sets are not shrinking: round {round} adds member {member}")]
    IndexSetGrew { round: u32, member: u32 },
    #[error("view round {view} precedes formation round {formed}")]
    ViewBeforeFormation { formed: u32, view: u32 },
    #[error("round {round} is outside the simulated trace (last round {last})")]
    RoundOutOfRange { round: u32, last: u32 },
    #[error("the selected influence sets do not cover all of 1..={n}")]
    NotACovering { n: u32 },
    #[error("covering sequence starts at round {start}, expected consecutive rounds")]
    NonConsecutiveRounds { start: u32 },
    #[error("round {round} of the trace is not a rooted tree")]
    NotARootedTreeRound { round: u32 },
}

/// Whether the union of `sets` is all of `{1..=n}`.
pub fn is_covering(sets: &[NodeSet], n: u32) -> bool {
    sets.iter().fold(NodeSet::EMPTY, |acc, &s| acc | s).is_full(n)
}

/// An index set `I` together with the influence sets it selects at a view
/// round `r >= t` (the round the covering was formed at).
#[derive(Debug, Clone, PartialEq)]
pub struct Covering {
    n: u32,
    formed_at: u32,
    view_round: u32,
    index_set: Vec<NodeId>,
    sets: Vec<NodeSet>,
}

impl Covering {
    /// Builds `C_{I(t)}(r)` from a trace; fails unless the union covers `Π`.
    pub fn from_trace(
        trace: &SimulationTrace,
        index_set: &[NodeId],
        formed_at: u32,
        view_round: u32,
    ) -> Result<Self, CoveringError> {
        if index_set.is_empty() {
            return Err(CoveringError::EmptyIndexSet);
        }
        if view_round < formed_at {
            return Err(CoveringError::ViewBeforeFormation { formed: formed_at, view: view_round });
        }
        let state = trace
            .state_at(view_round)
            .ok_or(CoveringError::RoundOutOfRange { round: view_round, last: trace.last_round() })?;
        let mut members: Vec<NodeId> = index_set.to_vec();
        members.sort_unstable();
        members.dedup();
        let sets: Vec<NodeSet> = members.iter().map(|&p| state.influence_set(p)).collect();
        if !is_covering(&sets, trace.n()) {
            return Err(CoveringError::NotACovering { n: trace.n() });
        }
        Ok(Covering { n: trace.n(), formed_at, view_round, index_set: members, sets })
    }

    /// The same index set re-evaluated at a later round; still a covering by
    /// monotonicity.
    pub fn view_at(&self, trace: &SimulationTrace, round: u32) -> Result<Covering, CoveringError> {
        Covering::from_trace(trace, &self.index_set, self.formed_at, round)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn formed_at(&self) -> u32 {
        self.formed_at
    }

    pub fn view_round(&self) -> u32 {
        self.view_round
    }

    pub fn index_set(&self) -> &[NodeId] {
        &self.index_set
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    pub fn size(&self) -> usize {
        self.index_set.len()
    }

    pub fn member_set(&self, p: NodeId) -> Option<NodeSet> {
        self.index_set.iter().position(|&q| q == p).map(|i| self.sets[i])
    }

    /// For each member `p`, the nodes lying in `S_p` and in no other member
    /// set. Aligned with `index_set`; entries may be empty.
    pub fn unique_nodes(&self) -> Vec<NodeSet> {
        self.index_set
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let others = self
                    .sets
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .fold(NodeSet::EMPTY, |acc, (_, &s)| acc | s);
                self.sets[i].difference(others)
            })
            .collect()
    }

    /// Unique nodes of a single member.
    pub fn member_unique(&self, p: NodeId) -> NodeSet {
        match self.index_set.iter().position(|&q| q == p) {
            Some(i) => self.unique_nodes()[i],
            None => NodeSet::EMPTY,
        }
    }

    /// Strict iff every member set contains a unique node; agrees with the
    /// removal-based definition (removing any one member breaks coverage).
    pub fn is_strict(&self) -> bool {
        self.unique_nodes().iter().all(|u| !u.is_empty())
    }

    /// The removal-based definition of strictness, kept as an independent
    /// route for cross-checking `is_strict`.
    pub fn is_strict_by_removal(&self) -> bool {
        (0..self.sets.len()).all(|skip| {
            let union = self
                .sets
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != skip)
                .fold(NodeSet::EMPTY, |acc, (_, &s)| acc | s);
            !union.is_full(self.n)
        })
    }

    /// Repeatedly removes the smallest-index member with no unique node until
    /// every member has one.
    pub fn reduce_to_strict(&self) -> StrictCovering {
        let mut covering = self.clone();
        let mut log = Vec::new();
        loop {
            let unique = covering.unique_nodes();
            let unique_total: u32 = unique.iter().map(|u| u.len()).sum();
            match unique.iter().position(|u| u.is_empty()) {
                None => {
                    return StrictCovering { unique, covering, reduction_log: log };
                }
                Some(i) => {
                    let removed = covering.index_set[i];
                    let removed_size = covering.sets[i].len();
                    covering.index_set.remove(i);
                    covering.sets.remove(i);
                    let new_total: u32 =
                        covering.unique_nodes().iter().map(|u| u.len()).sum();
                    log.push(ReductionStep {
                        removed,
                        removed_size,
                        unique_gain: new_total - unique_total,
                    });
                }
            }
        }
    }
}

/// One removal performed by [`Covering::reduce_to_strict`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStep {
    pub removed: NodeId,
    pub removed_size: u32,
    /// How many nodes became unique through this removal; at most
    /// `removed_size`.
    pub unique_gain: u32,
}

/// A covering in which every member set has at least one unique node.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictCovering {
    covering: Covering,
    unique: Vec<NodeSet>,
    reduction_log: Vec<ReductionStep>,
}

impl StrictCovering {
    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    /// Unique-node sets aligned with the covering's index set; all nonempty.
    pub fn unique_nodes(&self) -> &[NodeSet] {
        &self.unique
    }

    pub fn reduction_log(&self) -> &[ReductionStep] {
        &self.reduction_log
    }
}

/// A sequence of coverings `C_{I(r)}(r)` over consecutive rounds with
/// shrinking index sets `I(r+1) ⊆ I(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringSequence {
    entries: Vec<Covering>,
}

impl CoveringSequence {
    pub fn new(entries: Vec<Covering>) -> Result<Self, CoveringError> {
        if entries.is_empty() {
            return Err(CoveringError::EmptyIndexSet);
        }
        let start = entries[0].view_round;
        for (k, window) in entries.windows(2).enumerate() {
            if window[1].view_round != window[0].view_round + 1 {
                return Err(CoveringError::NonConsecutiveRounds { start });
            }
            for &p in &window[1].index_set {
                if !window[0].index_set.contains(&p) {
                    return Err(CoveringError::IndexSetGrew {
                        round: start + k as u32 + 1,
                        member: p.get(),
                    });
                }
            }
        }
        Ok(CoveringSequence { entries })
    }

    /// The trivial sequence `I(r) = Π` for every simulated round.
    pub fn full(trace: &SimulationTrace) -> Result<Self, CoveringError> {
        let all: Vec<NodeId> = (0..trace.n() as usize).map(NodeId::from_index).collect();
        let entries = (0..=trace.last_round())
            .map(|r| Covering::from_trace(trace, &all, r, r))
            .collect::<Result<_, _>>()?;
        CoveringSequence::new(entries)
    }

    /// The reduction schedule behind the `Σ ⌈n/i⌉` bound: start from all
    /// influence sets and re-reduce to a strict covering at every round.
    pub fn reduction_schedule(trace: &SimulationTrace) -> Result<Self, CoveringError> {
        let mut index: Vec<NodeId> = (0..trace.n() as usize).map(NodeId::from_index).collect();
        let mut entries = Vec::with_capacity(trace.states().len());
        for r in 0..=trace.last_round() {
            let covering = Covering::from_trace(trace, &index, r, r)?;
            let strict = covering.reduce_to_strict();
            index = strict.covering().index_set().to_vec();
            entries.push(strict.covering().clone());
        }
        CoveringSequence::new(entries)
    }

    pub fn entries(&self) -> &[Covering] {
        &self.entries
    }

    pub fn first_round(&self) -> u32 {
        self.entries[0].view_round
    }

    pub fn last_round(&self) -> u32 {
        self.entries.last().unwrap().view_round
    }
}

/// Outcome of one structural check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    /// The member whose set witnesses the failure, when failing.
    pub violating_member: Option<u32>,
}

impl CheckOutcome {
    fn pass() -> Self {
        CheckOutcome { pass: true, violating_member: None }
    }

    fn fail(member: Option<NodeId>) -> Self {
        CheckOutcome { pass: false, violating_member: member.map(NodeId::get) }
    }
}

/// Per-round results of the covering checks along a trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundCheck {
    pub round: u32,
    /// Whether the covering entering this round was strict; the unique-loss
    /// and growth-bound checks only apply to strict coverings.
    pub strict: bool,
    /// Every member except possibly a root-containing one loses a unique node.
    pub unique_loss: Option<CheckOutcome>,
    /// At most `leaf_count` member sets fail to grow.
    pub growth_bound: Option<CheckOutcome>,
    /// Some member set grows.
    pub some_member_grows: CheckOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringPropertyReport {
    pub rounds: Vec<RoundCheck>,
    /// At time 2, the predecessors-of-leaves covering has all member sets of
    /// size at least 2 (skipped for traces shorter than two rounds).
    pub size_two_covering: Option<CheckOutcome>,
    pub all_pass: bool,
}

/// Checks the covering properties round by round along `trace`, using the
/// supplied covering schedule. Every trace round must be a rooted tree.
pub fn check_covering_properties(
    trace: &SimulationTrace,
    schedule: &CoveringSequence,
) -> Result<CoveringPropertyReport, CoveringError> {
    if schedule.last_round() > trace.last_round() {
        return Err(CoveringError::RoundOutOfRange {
            round: schedule.last_round(),
            last: trace.last_round(),
        });
    }
    let mut rounds = Vec::new();
    for covering in schedule.entries() {
        let before = covering.view_round();
        let round = before + 1;
        if round > trace.last_round() {
            break;
        }
        // The growth guarantees hold while dissemination is incomplete.
        if trace.state_at(before).expect("round exists").is_terminal() {
            break;
        }
        let graph = trace.sequence().graph_at(round).expect("trace round exists");
        let report = graph.classify();
        if !report.is_rooted_tree {
            return Err(CoveringError::NotARootedTreeRound { round });
        }
        let root = report.root.expect("rooted tree has a root");
        let leaves = report.leaf_count.expect("rooted tree has a leaf count");
        let after = covering.view_at(trace, round)?;

        let strict = covering.is_strict();
        let unique_loss = strict.then(|| check_unique_loss(covering, &after, root));
        let growth_bound = strict.then(|| check_growth_bound(covering, &after, leaves));
        let some_member_grows = check_some_member_grows(covering, &after);
        rounds.push(RoundCheck { round, strict, unique_loss, growth_bound, some_member_grows });
    }

    let size_two_covering =
        (trace.n() >= 2 && trace.last_round() >= 2).then(|| check_size_two_covering(trace));

    let all_pass = rounds.iter().all(|r| {
        r.unique_loss.as_ref().is_none_or(|c| c.pass)
            && r.growth_bound.as_ref().is_none_or(|c| c.pass)
            && r.some_member_grows.pass
    }) && size_two_covering.as_ref().is_none_or(|c| c.pass);

    Ok(CoveringPropertyReport { rounds, size_two_covering, all_pass })
}

/// In a strict covering, every member except possibly one loses a unique node
/// over the round, and an exempt member must contain the round graph's root.
fn check_unique_loss(before: &Covering, after: &Covering, root: NodeId) -> CheckOutcome {
    let unique_before = before.unique_nodes();
    let unique_after = after.unique_nodes();
    let mut failures = Vec::new();
    for (i, &p) in before.index_set().iter().enumerate() {
        let lost = !unique_before[i].difference(unique_after[i]).is_empty();
        if !lost {
            failures.push((p, before.sets()[i]));
        }
    }
    match failures.as_slice() {
        [] => CheckOutcome::pass(),
        [(p, set)] => {
            if set.contains(root) {
                CheckOutcome::pass()
            } else {
                CheckOutcome::fail(Some(*p))
            }
        }
        many => CheckOutcome::fail(Some(many[0].0)),
    }
}

/// With `leaves` leaves in the round graph, at most `leaves` member sets of a
/// strict covering fail to grow.
fn check_growth_bound(before: &Covering, after: &Covering, leaves: u32) -> CheckOutcome {
    let mut non_growing = Vec::new();
    for (i, &p) in before.index_set().iter().enumerate() {
        if after.sets()[i].len() == before.sets()[i].len() {
            non_growing.push(p);
        }
    }
    if non_growing.len() as u32 <= leaves {
        CheckOutcome::pass()
    } else {
        CheckOutcome::fail(non_growing.last().copied())
    }
}

fn check_some_member_grows(before: &Covering, after: &Covering) -> CheckOutcome {
    let grew = before
        .index_set()
        .iter()
        .enumerate()
        .any(|(i, _)| after.sets()[i].len() > before.sets()[i].len());
    if grew {
        CheckOutcome::pass()
    } else {
        CheckOutcome::fail(before.index_set().first().copied())
    }
}

/// The predecessors-of-leaves construction: the non-leaves of the round-1
/// graph form a covering whose member sets all have size at least 2 by
/// time 2.
fn check_size_two_covering(trace: &SimulationTrace) -> CheckOutcome {
    let g1 = trace.sequence().graph_at(1).expect("trace has a first round");
    let index: Vec<NodeId> = (0..trace.n() as usize)
        .map(NodeId::from_index)
        .filter(|&p| !g1.out_neighbors(p).is_empty())
        .collect();
    let covering = match Covering::from_trace(trace, &index, 2, 2) {
        Ok(c) => c,
        Err(_) => return CheckOutcome::fail(None),
    };
    match covering.index_set().iter().zip(covering.sets()).find(|(_, s)| s.len() < 2) {
        None => CheckOutcome::pass(),
        Some((&p, _)) => CheckOutcome::fail(Some(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissemination::{run, run_exact};
    use crate::graphs::{GraphSequence, LabeledDigraph};

    fn id(v: u32) -> NodeId {
        NodeId::new(v).unwrap()
    }

    fn set(vs: &[u32]) -> NodeSet {
        vs.iter().map(|&v| id(v)).collect()
    }

    fn example_trace() -> SimulationTrace {
        let g1 = LabeledDigraph::new(5, &[(5, 3), (5, 2), (2, 4), (4, 1)], false).unwrap();
        let g2 = LabeledDigraph::new(5, &[(1, 3), (3, 2), (3, 4), (3, 5)], false).unwrap();
        let g3 = LabeledDigraph::new(5, &[(2, 3), (2, 1), (1, 4), (3, 5)], false).unwrap();
        run(GraphSequence::new(5, vec![g1, g2, g3], None).unwrap(), 10).unwrap()
    }

    #[test]
    fn covering_predicate() {
        assert!(is_covering(&[set(&[1, 2]), set(&[2, 3]), set(&[3, 1])], 3));
        assert!(!is_covering(&[set(&[1, 2]), set(&[2, 3])], 4));
    }

    #[test]
    fn example_round1_nonleaf_covering() {
        // The influence sets of the non-leaf nodes of the first round graph:
        // S_5(1) = {2,3,5}, S_2(1) = {2,4}, S_4(1) = {1,4}.
        let trace = example_trace();
        let covering =
            Covering::from_trace(&trace, &[id(5), id(2), id(4)], 1, 1).unwrap();
        assert_eq!(covering.member_set(id(5)), Some(set(&[2, 3, 5])));
        assert_eq!(covering.member_set(id(2)), Some(set(&[2, 4])));
        assert_eq!(covering.member_set(id(4)), Some(set(&[1, 4])));

        // Unique nodes: S_5 keeps {3,5}, S_2 has none, S_4 keeps {1}.
        assert_eq!(covering.member_unique(id(5)), set(&[3, 5]));
        assert_eq!(covering.member_unique(id(2)), NodeSet::EMPTY);
        assert_eq!(covering.member_unique(id(4)), set(&[1]));
        assert!(!covering.is_strict());

        let strict = covering.reduce_to_strict();
        assert_eq!(strict.covering().index_set(), &[id(4), id(5)]);
        assert!(strict.covering().is_strict());
        assert_eq!(strict.reduction_log().len(), 1);
        assert_eq!(strict.reduction_log()[0].removed, id(2));
    }

    #[test]
    fn disjoint_partition_is_strict() {
        let trace = run(GraphSequence::new(3, vec![], None).unwrap(), 0).unwrap();
        let covering = Covering::from_trace(&trace, &[id(1), id(2), id(3)], 0, 0).unwrap();
        assert!(covering.is_strict());
        assert!(covering.is_strict_by_removal());
        for u in covering.unique_nodes() {
            assert_eq!(u.len(), 1);
        }
        let reduced = covering.reduce_to_strict();
        assert_eq!(reduced.covering(), &covering);
    }

    #[test]
    fn all_full_sets_reduce_to_one() {
        let s1 = LabeledDigraph::new(3, &[(1, 2), (1, 3)], false).unwrap();
        let s2 = LabeledDigraph::new(3, &[(2, 1), (2, 3)], false).unwrap();
        let s3 = LabeledDigraph::new(3, &[(3, 1), (3, 2)], false).unwrap();
        let seq = GraphSequence::new(3, vec![s1, s2, s3], None).unwrap();
        let trace = run_exact(seq, 3).unwrap();
        // After three alternating stars every influence set is Π.
        let covering = Covering::from_trace(&trace, &[id(1), id(2), id(3)], 3, 3).unwrap();
        assert!(covering.unique_nodes().iter().all(|u| u.is_empty()));
        let strict = covering.reduce_to_strict();
        assert_eq!(strict.covering().size(), 1);
        // A one-set strict covering signals completed dissemination.
        assert!(strict.covering().sets()[0].is_full(3));
    }

    #[test]
    fn strictness_definitions_agree_on_example() {
        let trace = example_trace();
        let covering = Covering::from_trace(&trace, &[id(5), id(2), id(4)], 1, 1).unwrap();
        assert_eq!(covering.is_strict(), covering.is_strict_by_removal());
        let strict = covering.reduce_to_strict();
        assert_eq!(strict.covering().is_strict(), strict.covering().is_strict_by_removal());
    }

    #[test]
    fn property_checks_pass_on_example_trace() {
        let trace = example_trace();
        let schedule = CoveringSequence::reduction_schedule(&trace).unwrap();
        let report = check_covering_properties(&trace, &schedule).unwrap();
        assert!(report.all_pass, "{report:?}");
    }

    #[test]
    fn property_checks_on_constant_chain() {
        let n = 6;
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
        let chain = LabeledDigraph::new(n, &edges, false).unwrap();
        let trace = run(GraphSequence::constant(chain), n * n).unwrap();
        let schedule = CoveringSequence::full(&trace).unwrap();
        let report = check_covering_properties(&trace, &schedule).unwrap();
        // Full coverings are not strict in general; the growth check still applies.
        assert!(report.all_pass, "{report:?}");

        let schedule = CoveringSequence::reduction_schedule(&trace).unwrap();
        let report = check_covering_properties(&trace, &schedule).unwrap();
        assert!(report.all_pass, "{report:?}");
    }

    #[test]
    fn strict_covering_viewed_later_reduces_further() {
        // Form the strict covering {S_4, S_5} at round 1, view it at round 3:
        // S_5(3) has become all of Π, S_4 loses its unique nodes, and the
        // reduction leaves the single full set, signalling completion.
        let trace = example_trace();
        let strict = Covering::from_trace(&trace, &[id(5), id(2), id(4)], 1, 1)
            .unwrap()
            .reduce_to_strict();
        let later = strict.covering().view_at(&trace, 3).unwrap();
        assert_eq!(later.member_set(id(5)), Some(NodeSet::full(5)));
        let reduced = later.reduce_to_strict();
        assert_eq!(reduced.covering().size(), 1);
        assert!(reduced.covering().sets()[0].is_full(5));
    }

    #[test]
    fn constant_star_terminates_immediately_and_passes_checks() {
        let star = LabeledDigraph::new(5, &[(2, 1), (2, 3), (2, 4), (2, 5)], false).unwrap();
        let trace = run(GraphSequence::constant(star), 10).unwrap();
        assert_eq!(trace.termination_round(), Some(1));
        let schedule = CoveringSequence::reduction_schedule(&trace).unwrap();
        let report = check_covering_properties(&trace, &schedule).unwrap();
        assert!(report.all_pass, "{report:?}");
        assert!(report.rounds[0].some_member_grows.pass);
    }

    #[test]
    fn covering_sequence_rejects_growing_index_sets() {
        let trace = example_trace();
        assert_eq!(
            Covering::from_trace(&trace, &[id(1), id(2)], 0, 0),
            Err(CoveringError::NotACovering { n: 5 })
        );
        let all = [id(1), id(2), id(3), id(4), id(5)];
        let c0 = Covering::from_trace(&trace, &all, 0, 0).unwrap();
        let c1 = Covering::from_trace(&trace, &[id(2), id(4), id(5)], 1, 1).unwrap();
        let c2 = Covering::from_trace(&trace, &[id(1), id(2), id(4), id(5)], 2, 2).unwrap();
        assert!(CoveringSequence::new(vec![c0, c1.clone()]).is_ok());
        assert_eq!(
            CoveringSequence::new(vec![c1, c2]),
            Err(CoveringError::IndexSetGrew { round: 2, member: 1 })
        );
    }
}
