//! The deterministic round engine: influence sets, knowledge sets, and
//! dissemination times.
//!
//! Influence sets are the primary representation; the knowledge sets of the
//! full-information protocol are their transpose. The engine applies the
//! update rule to any digraph, so disconnected rounds (and the resulting
//! unbounded dissemination times) are expressible.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{GraphSequence, LabeledDigraph};
use crate::nodeset::{NodeId, NodeSet, MAX_N};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DissemError {
    #[error("node count {n} out of range 1..={max}", max = MAX_N)]
    InvalidNodeCount { n: u32 },
    #[error("state has n = {state}, graph has n = {graph}")]
    DimensionMismatch { state: u32, graph: u32 },
    #[error("sequence supplies only {available} rounds, round {needed} requested and no repetition rule")]
    HorizonExceeded { needed: u32, available: u32 },
}

/// The vector `(S_1(r), ..., S_n(r))` of influence sets at the end of round
/// `r`; `S_p` is the set of processes that have heard of `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluenceState {
    n: u32,
    round: u32,
    sets: Vec<NodeSet>,
}

impl InfluenceState {
    /// Round-0 state: `S_p(0) = {p}` for all `p`.
    pub fn initial(n: u32) -> Result<Self, DissemError> {
        if n == 0 || n > MAX_N {
            return Err(DissemError::InvalidNodeCount { n });
        }
        let sets = (0..n as usize).map(|i| NodeSet::singleton(NodeId::from_index(i))).collect();
        Ok(InfluenceState { n, round: 0, sets })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn influence_sets(&self) -> &[NodeSet] {
        &self.sets
    }

    pub fn influence_set(&self, p: NodeId) -> NodeSet {
        self.sets[p.index()]
    }

    /// One synchronous round under `g`:
    /// `S_p(r+1) = S_p(r) ∪ { q' : (q, q') ∈ g, q ∈ S_p(r) }`.
    pub fn step(&self, g: &LabeledDigraph) -> Result<Self, DissemError> {
        if g.n() != self.n {
            return Err(DissemError::DimensionMismatch { state: self.n, graph: g.n() });
        }
        let out = g.out_masks();
        let sets = self.sets.iter().map(|&s| step_set(s, out)).collect();
        Ok(InfluenceState { n: self.n, round: self.round + 1, sets })
    }

    /// The dual view: `K_q(r) = { p : q ∈ S_p(r) }`.
    pub fn knowledge_set(&self, q: NodeId) -> NodeSet {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(q))
            .map(|(i, _)| NodeId::from_index(i))
            .collect()
    }

    pub fn knowledge_sets(&self) -> Vec<NodeSet> {
        (0..self.n as usize).map(|i| self.knowledge_set(NodeId::from_index(i))).collect()
    }

    /// Nodes whose influence set is all of `Π`; equals `⋂_q K_q`.
    pub fn winners(&self) -> NodeSet {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_full(self.n))
            .map(|(i, _)| NodeId::from_index(i))
            .collect()
    }

    pub fn is_terminal(&self) -> bool {
        self.sets.iter().any(|s| s.is_full(self.n))
    }

    pub fn max_set_size(&self) -> u32 {
        self.sets.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    pub fn total_mass(&self) -> u64 {
        self.sets.iter().map(|s| u64::from(s.len())).sum()
    }
}

pub(crate) fn step_set(s: NodeSet, out: &[NodeSet]) -> NodeSet {
    let mut next = s;
    for q in s.iter() {
        next |= out[q.index()];
    }
    next
}

/// Number of rounds; either exact or a lower bound when a horizon cut the
/// observation short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundCount {
    Finite(u32),
    /// Not yet terminated; the true value is `>=` this.
    AtLeast(u32),
}

impl RoundCount {
    pub fn finite(self) -> Option<u32> {
        match self {
            RoundCount::Finite(v) => Some(v),
            RoundCount::AtLeast(_) => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, RoundCount::Finite(_))
    }
}

impl fmt::Display for RoundCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundCount::Finite(v) => write!(f, "{v}"),
            RoundCount::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

impl Serialize for RoundCount {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            RoundCount::Finite(v) => serializer.serialize_u32(*v),
            RoundCount::AtLeast(v) => {
                use serde::ser::SerializeMap;
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("at_least", v)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for RoundCount {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Finite(u32),
            AtLeast { at_least: u32 },
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Finite(v) => RoundCount::Finite(v),
            Repr::AtLeast { at_least } => RoundCount::AtLeast(at_least),
        })
    }
}

/// The state history of a simulation, `r = 0, 1, ..., R`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    sequence: GraphSequence,
    states: Vec<InfluenceState>,
    termination_round: Option<u32>,
}

impl SimulationTrace {
    pub fn sequence(&self) -> &GraphSequence {
        &self.sequence
    }

    pub fn states(&self) -> &[InfluenceState] {
        &self.states
    }

    pub fn state_at(&self, r: u32) -> Option<&InfluenceState> {
        self.states.get(r as usize)
    }

    pub fn n(&self) -> u32 {
        self.sequence.n()
    }

    /// Last simulated round.
    pub fn last_round(&self) -> u32 {
        self.states.len() as u32 - 1
    }

    pub fn termination_round(&self) -> Option<u32> {
        self.termination_round
    }

    /// `B_G`: first round at which some influence set is all of `Π`
    /// (equivalently, `⋂_p K_p ≠ ∅`).
    pub fn dissemination_time(&self) -> RoundCount {
        match self.termination_round {
            Some(r) => RoundCount::Finite(r),
            None => RoundCount::AtLeast(self.last_round() + 1),
        }
    }

    /// `B_G(p)`: first round at which `p ∈ ⋂_q K_q`, i.e. `S_p = Π`.
    pub fn node_dissemination_time(&self, p: NodeId) -> RoundCount {
        for state in &self.states {
            if state.influence_set(p).is_full(self.n()) {
                return RoundCount::Finite(state.round());
            }
        }
        RoundCount::AtLeast(self.last_round() + 1)
    }

    /// Winning nodes at the termination round, if any.
    pub fn winners(&self) -> NodeSet {
        match self.termination_round {
            Some(r) => self.states[r as usize].winners(),
            None => NodeSet::EMPTY,
        }
    }
}

/// Simulates up to `horizon` rounds, stopping early at the first round with a
/// full influence set. Errors when the sequence runs out of rounds before the
/// horizon is reached or dissemination completes.
pub fn run(sequence: GraphSequence, horizon: u32) -> Result<SimulationTrace, DissemError> {
    run_inner(sequence, horizon, true)
}

/// As [`run`], but keeps simulating past the first full influence set, for
/// analyses that inspect later rounds. The termination round is still the
/// first round with a full set.
pub fn run_exact(sequence: GraphSequence, rounds: u32) -> Result<SimulationTrace, DissemError> {
    run_inner(sequence, rounds, false)
}

fn run_inner(
    sequence: GraphSequence,
    horizon: u32,
    stop_at_termination: bool,
) -> Result<SimulationTrace, DissemError> {
    let mut states = vec![InfluenceState::initial(sequence.n())?];
    let mut termination_round = if states[0].is_terminal() { Some(0) } else { None };
    for r in 1..=horizon {
        if stop_at_termination && termination_round.is_some() {
            break;
        }
        let available = sequence.listed_rounds().len() as u32;
        let g = sequence
            .graph_at(r)
            .ok_or(DissemError::HorizonExceeded { needed: r, available })?;
        let next = states.last().unwrap().step(g)?;
        if termination_round.is_none() && next.is_terminal() {
            termination_round = Some(r);
        }
        states.push(next);
    }
    Ok(SimulationTrace { sequence, states, termination_round })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::RepeatRule;

    fn id(v: u32) -> NodeId {
        NodeId::new(v).unwrap()
    }

    fn set(vs: &[u32]) -> NodeSet {
        vs.iter().map(|&v| id(v)).collect()
    }

    /// The three-round worked example: graphs and the printed knowledge sets.
    pub(crate) fn example_sequence() -> GraphSequence {
        let g1 = LabeledDigraph::new(5, &[(5, 3), (5, 2), (2, 4), (4, 1)], false).unwrap();
        let g2 = LabeledDigraph::new(5, &[(1, 3), (3, 2), (3, 4), (3, 5)], false).unwrap();
        let g3 = LabeledDigraph::new(5, &[(2, 3), (2, 1), (1, 4), (3, 5)], false).unwrap();
        GraphSequence::new(5, vec![g1, g2, g3], None).unwrap()
    }

    fn example_knowledge(round: usize) -> Vec<NodeSet> {
        match round {
            1 => vec![set(&[1, 4]), set(&[2, 5]), set(&[3, 5]), set(&[2, 4]), set(&[5])],
            2 => vec![set(&[1, 4]), set(&[2, 3, 5]), set(&[1, 3, 4, 5]), set(&[2, 3, 4, 5]), set(&[3, 5])],
            3 => vec![
                set(&[1, 2, 3, 4, 5]),
                set(&[2, 3, 5]),
                set(&[1, 2, 3, 4, 5]),
                set(&[1, 2, 3, 4, 5]),
                set(&[1, 3, 4, 5]),
            ],
            _ => unreachable!(),
        }
    }

    #[test]
    fn initial_state_is_singletons() {
        let s = InfluenceState::initial(5).unwrap();
        for p in 1..=5 {
            assert_eq!(s.influence_set(id(p)), NodeSet::singleton(id(p)));
            assert_eq!(s.knowledge_set(id(p)), NodeSet::singleton(id(p)));
        }
        assert!(InfluenceState::initial(1).unwrap().is_terminal());
        assert_eq!(InfluenceState::initial(0), Err(DissemError::InvalidNodeCount { n: 0 }));
    }

    #[test]
    fn example_knowledge_sets_match_round_by_round() {
        let seq = example_sequence();
        let mut state = InfluenceState::initial(5).unwrap();
        for round in 1..=3 {
            state = state.step(seq.graph_at(round as u32).unwrap()).unwrap();
            assert_eq!(state.knowledge_sets(), example_knowledge(round), "round {round}");
        }
    }

    #[test]
    fn step_on_empty_graph_only_advances_round() {
        let s = InfluenceState::initial(4).unwrap();
        let g = LabeledDigraph::new(4, &[], false).unwrap();
        let next = s.step(&g).unwrap();
        assert_eq!(next.round(), 1);
        assert_eq!(next.influence_sets(), s.influence_sets());

        let wrong = LabeledDigraph::new(3, &[], false).unwrap();
        assert_eq!(s.step(&wrong), Err(DissemError::DimensionMismatch { state: 4, graph: 3 }));
    }

    #[test]
    fn example_trace_times() {
        let trace = run(example_sequence(), 10).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::Finite(3));
        assert_eq!(trace.winners(), set(&[3, 5]));
        assert_eq!(trace.node_dissemination_time(id(3)), RoundCount::Finite(3));
        assert_eq!(trace.node_dissemination_time(id(5)), RoundCount::Finite(3));
        // S_1(3) = {1,3,4,5} != Π, so node 1 is not yet disseminated.
        assert_eq!(trace.state_at(3).unwrap().influence_set(id(1)), set(&[1, 3, 4, 5]));
        assert_eq!(trace.node_dissemination_time(id(1)), RoundCount::AtLeast(4));
    }

    #[test]
    fn constant_chain_takes_n_minus_1_rounds() {
        let n = 6;
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i, i + 1)).collect();
        let chain = LabeledDigraph::new(n, &edges, false).unwrap();
        let trace = run(GraphSequence::constant(chain), n).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::Finite(n - 1));
        // Only the root's value makes it everywhere; no edge ever enters the root.
        assert_eq!(trace.node_dissemination_time(id(1)), RoundCount::Finite(n - 1));
        assert_eq!(trace.node_dissemination_time(id(2)), RoundCount::AtLeast(n));
    }

    #[test]
    fn single_node_terminates_at_round_zero() {
        let seq = GraphSequence::new(1, vec![], None).unwrap();
        let trace = run(seq, 5).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::Finite(0));
    }

    #[test]
    fn star_round_disseminates_immediately() {
        let star = LabeledDigraph::new(5, &[(2, 1), (2, 3), (2, 4), (2, 5)], false).unwrap();
        let trace = run(GraphSequence::constant(star), 10).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::Finite(1));
    }

    #[test]
    fn disconnected_components_never_terminate() {
        let g = LabeledDigraph::new(4, &[(1, 2), (2, 1), (3, 4), (4, 3)], false).unwrap();
        let trace = run(GraphSequence::constant(g), 50).unwrap();
        assert_eq!(trace.dissemination_time(), RoundCount::AtLeast(51));
    }

    #[test]
    fn finite_sequence_without_repeat_errors_past_the_end() {
        let g = LabeledDigraph::new(3, &[(1, 2)], false).unwrap();
        let seq = GraphSequence::new(3, vec![g], None).unwrap();
        assert_eq!(
            run(seq, 4),
            Err(DissemError::HorizonExceeded { needed: 2, available: 1 })
        );
    }

    #[test]
    fn run_exact_continues_past_termination() {
        let star = LabeledDigraph::new(4, &[(1, 2), (1, 3), (1, 4)], false).unwrap();
        let seq = GraphSequence::new(4, vec![star; 3], Some(RepeatRule { from: 1, to: 3 })).unwrap();
        let trace = run_exact(seq, 3).unwrap();
        assert_eq!(trace.termination_round(), Some(1));
        assert_eq!(trace.last_round(), 3);
    }

    #[test]
    fn round_count_serde() {
        assert_eq!(serde_json::to_string(&RoundCount::Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&RoundCount::AtLeast(51)).unwrap(), r#"{"at_least":51}"#);
        let f: RoundCount = serde_json::from_str("3").unwrap();
        assert_eq!(f, RoundCount::Finite(3));
        let a: RoundCount = serde_json::from_str(r#"{"at_least":51}"#).unwrap();
        assert_eq!(a, RoundCount::AtLeast(51));
    }
}
