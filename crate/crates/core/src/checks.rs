//! Randomized property suites over simulated traces.
//!
//! These drive the `verify lemma1`, `verify lemma2`, and `properties` CLI
//! verbs. Every suite is a deterministic function of its configuration; the
//! knowledge-set engine used by the duality check is maintained independently
//! of the influence-set engine it cross-checks.

use serde::Serialize;

use crate::adversary::pigeonhole_cap;
use crate::constructions::{chain_collection_invariant, undirected_chain_invariant};
use crate::coverings::{check_covering_properties, Covering, CoveringSequence};
use crate::dissemination::{run_exact, SimulationTrace};
use crate::graphs::{GraphClassDescriptor, GraphSequence, LabeledDigraph};
use crate::nodeset::{NodeId, NodeSet};
use crate::rng::SplitRng;

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: u32,
    /// Traces use node counts in `2..=max_n`.
    pub max_n: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, trials: 1000, max_n: 8 }
    }
}

/// Result of one property over all its trials.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub pass: bool,
    pub trials: u32,
    /// First failing trial, if any.
    pub failure: Option<String>,
}

impl CheckReport {
    fn run(name: &'static str, trials: u32, mut f: impl FnMut(u32) -> Result<(), String>) -> Self {
        for trial in 0..trials {
            if let Err(message) = f(trial) {
                return CheckReport {
                    name,
                    pass: false,
                    trials,
                    failure: Some(format!("trial {trial}: {message}")),
                };
            }
        }
        CheckReport { name, pass: true, trials, failure: None }
    }
}

fn random_rooted_tree_trace(rng: &mut SplitRng, max_n: u32) -> SimulationTrace {
    random_rooted_tree_trace_rounds(rng, max_n, 0)
}

fn random_rooted_tree_trace_rounds(
    rng: &mut SplitRng,
    max_n: u32,
    min_rounds: u32,
) -> SimulationTrace {
    let n = rng.range(2, max_n);
    let desc = GraphClassDescriptor::rooted_trees(n).expect("valid n");
    let horizon = pigeonhole_cap(n).max(2).max(min_rounds);
    let rounds: Vec<LabeledDigraph> =
        (0..horizon).map(|_| desc.sample_with(rng).expect("tree sampling")).collect();
    let seq = GraphSequence::new(n, rounds, None).expect("rounds share n");
    run_exact(seq, horizon).expect("sequence supplies its rounds")
}

fn random_chain_trace(rng: &mut SplitRng, max_n: u32, undirected: bool) -> SimulationTrace {
    let n = rng.range(2, max_n);
    let desc = if undirected {
        GraphClassDescriptor::undirected_chains(n).expect("valid n")
    } else {
        GraphClassDescriptor::directed_chains(n).expect("valid n")
    };
    let horizon = n;
    let rounds: Vec<LabeledDigraph> =
        (0..horizon).map(|_| desc.sample_with(rng).expect("chain sampling")).collect();
    let seq = GraphSequence::new(n, rounds, None).expect("rounds share n");
    run_exact(seq, horizon).expect("sequence supplies its rounds")
}

/// Influence-set elementary properties: initial state, update rule (via the
/// independently maintained knowledge view), the two dissemination-time
/// characterizations, monotonicity, root growth, mass growth, and the
/// pigeonhole cap.
pub fn lemma1_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut reports = Vec::new();

    reports.push(CheckReport::run("initial-state", cfg.trials.min(100), |trial| {
        let n = 1 + trial % 16;
        let state = crate::dissemination::InfluenceState::initial(n).map_err(|e| e.to_string())?;
        for p in (0..n as usize).map(NodeId::from_index) {
            if state.influence_set(p) != NodeSet::singleton(p) {
                return Err(format!("S_{p}(0) != {{{p}}}"));
            }
        }
        Ok(())
    }));

    let base = SplitRng::new(cfg.seed);
    reports.push(CheckReport::run("knowledge-duality", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial));
        // Both views maintained over 100 random rounds, well past termination.
        let trace = random_rooted_tree_trace_rounds(&mut rng, cfg.max_n, 100);
        check_duality(&trace)
    }));

    reports.push(CheckReport::run("dissemination-time-agreement", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(1);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        check_time_characterizations(&trace)
    }));

    reports.push(CheckReport::run("monotonicity", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(2);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        check_monotonicity(&trace)
    }));

    reports.push(CheckReport::run("root-growth", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(3);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        check_root_growth(&trace)
    }));

    reports.push(CheckReport::run("mass-growth", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(4);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        check_mass_growth(&trace)
    }));

    reports.push(CheckReport::run("pigeonhole-cap", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(5);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        match trace.termination_round() {
            Some(r) if r <= pigeonhole_cap(trace.n()) => Ok(()),
            Some(r) => Err(format!("terminated at {r} past the pigeonhole cap")),
            None => Err(format!(
                "no termination within {} rounds on a rooted-tree sequence",
                trace.last_round()
            )),
        }
    }));

    reports.push(CheckReport::run("node-time-minimum", cfg.trials.min(200), |trial| {
        let mut rng = base.split(u64::from(trial)).split(6);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        check_node_time_minimum(&trace)
    }));

    reports
}

/// Independent knowledge-set engine: `K_p(r+1) = K_p(r) ∪ ⋃_{(q,p)} K_q(r)`.
fn knowledge_step(k: &[NodeSet], g: &LabeledDigraph) -> Vec<NodeSet> {
    (0..k.len())
        .map(|i| {
            let p = NodeId::from_index(i);
            let mut next = k[i];
            for q in g.in_neighbors(p).iter() {
                next |= k[q.index()];
            }
            next
        })
        .collect()
}

fn check_duality(trace: &SimulationTrace) -> Result<(), String> {
    let n = trace.n();
    let mut knowledge: Vec<NodeSet> =
        (0..n as usize).map(|i| NodeSet::singleton(NodeId::from_index(i))).collect();
    for r in 0..=trace.last_round() {
        let state = trace.state_at(r).unwrap();
        if state.knowledge_sets() != knowledge {
            return Err(format!("knowledge view disagrees at round {r}"));
        }
        for p in (0..n as usize).map(NodeId::from_index) {
            for q in (0..n as usize).map(NodeId::from_index) {
                let lhs = state.influence_set(p).contains(q);
                let rhs = knowledge[q.index()].contains(p);
                if lhs != rhs {
                    return Err(format!("duality broken at round {r} for (p={p}, q={q})"));
                }
            }
        }
        if r < trace.last_round() {
            knowledge = knowledge_step(&knowledge, trace.sequence().graph_at(r + 1).unwrap());
        }
    }
    Ok(())
}

fn check_time_characterizations(trace: &SimulationTrace) -> Result<(), String> {
    // Via max_p |S_p| = n.
    let by_influence = trace
        .states()
        .iter()
        .find(|s| s.max_set_size() == trace.n())
        .map(|s| s.round());
    // Via ⋂_p K_p != ∅, folded over the knowledge view.
    let by_knowledge = trace
        .states()
        .iter()
        .find(|s| {
            s.knowledge_sets().iter().fold(NodeSet::full(trace.n()), |acc, &k| acc.intersection(k))
                != NodeSet::EMPTY
        })
        .map(|s| s.round());
    if by_influence != by_knowledge {
        return Err(format!("characterizations disagree: {by_influence:?} vs {by_knowledge:?}"));
    }
    if by_influence != trace.termination_round() {
        return Err("termination round disagrees with the scan".into());
    }
    Ok(())
}

fn check_monotonicity(trace: &SimulationTrace) -> Result<(), String> {
    for w in trace.states().windows(2) {
        for (i, (&a, &b)) in w[0].influence_sets().iter().zip(w[1].influence_sets()).enumerate() {
            if !a.is_subset(b) {
                return Err(format!("S_{} shrank at round {}", i + 1, w[1].round()));
            }
        }
    }
    Ok(())
}

fn check_root_growth(trace: &SimulationTrace) -> Result<(), String> {
    let n = trace.n();
    for w in trace.states().windows(2) {
        let round = w[1].round();
        let g = trace.sequence().graph_at(round).unwrap();
        let Some(root) = g.classify().root else {
            return Err(format!("round {round} is not rooted"));
        };
        for q in (0..n as usize).map(NodeId::from_index) {
            let before = w[0].influence_set(q);
            if before.contains(root) && before.len() < n && w[1].influence_set(q).len() <= before.len()
            {
                return Err(format!("S_{q} holding the root {root} failed to grow at round {round}"));
            }
        }
    }
    Ok(())
}

fn check_mass_growth(trace: &SimulationTrace) -> Result<(), String> {
    for w in trace.states().windows(2) {
        if !w[0].is_terminal() && w[1].total_mass() <= w[0].total_mass() {
            return Err(format!("total influence mass stalled at round {}", w[1].round()));
        }
    }
    Ok(())
}

fn check_node_time_minimum(trace: &SimulationTrace) -> Result<(), String> {
    let per_node = (0..trace.n() as usize)
        .map(|i| trace.node_dissemination_time(NodeId::from_index(i)))
        .filter_map(|t| t.finite())
        .min();
    match (trace.termination_round(), per_node) {
        (Some(b), Some(min)) if b == min => Ok(()),
        (None, None) => Ok(()),
        (b, min) => Err(format!("B = {b:?} but min_p B(p) = {min:?}")),
    }
}

/// Covering properties on random rooted-tree traces: strictness definitions
/// agree, reduction behaves, unique-node loss, the leaf growth bound, the
/// size-two covering at time 2, and per-round growth of some member.
pub fn lemma2_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let base = SplitRng::new(cfg.seed.wrapping_add(0x5eed));

    reports.push(CheckReport::run("strictness-definitions-agree", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial));
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        for covering in random_coverings(&mut rng, &trace, 3) {
            if covering.is_strict() != covering.is_strict_by_removal() {
                return Err(format!(
                    "strictness definitions disagree for I = {:?} at round {}",
                    covering.index_set(),
                    covering.view_round()
                ));
            }
        }
        Ok(())
    }));

    reports.push(CheckReport::run("reduction-to-strict", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(1);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        for covering in random_coverings(&mut rng, &trace, 3) {
            let strict = covering.reduce_to_strict();
            if !strict.covering().is_strict() {
                return Err("reduction output is not strict".into());
            }
            let subset = strict
                .covering()
                .index_set()
                .iter()
                .all(|p| covering.index_set().contains(p));
            if !subset {
                return Err("reduction enlarged the index set".into());
            }
            for step in strict.reduction_log() {
                if step.unique_gain > step.removed_size {
                    return Err(format!(
                        "removing {} (size {}) freed {} unique nodes",
                        step.removed, step.removed_size, step.unique_gain
                    ));
                }
            }
            if strict.covering().size() == 1 && !strict.covering().sets()[0].is_full(trace.n()) {
                return Err("one-set strict covering without completed dissemination".into());
            }
        }
        Ok(())
    }));

    reports.push(CheckReport::run("covering-round-properties", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(2);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        let schedule =
            CoveringSequence::reduction_schedule(&trace).map_err(|e| e.to_string())?;
        let report = check_covering_properties(&trace, &schedule).map_err(|e| e.to_string())?;
        if !report.all_pass {
            return Err(format!("{report:?}"));
        }
        // The trivial full schedule exercises the some-member-grows check on
        // non-strict coverings.
        let full = CoveringSequence::full(&trace).map_err(|e| e.to_string())?;
        let report = check_covering_properties(&trace, &full).map_err(|e| e.to_string())?;
        if !report.all_pass {
            return Err(format!("{report:?}"));
        }
        Ok(())
    }));

    reports.push(CheckReport::run("random-strict-covering-properties", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(3);
        let trace = random_rooted_tree_trace(&mut rng, cfg.max_n);
        for covering in random_coverings(&mut rng, &trace, 2) {
            if covering.view_round() >= trace.last_round() {
                continue;
            }
            let strict = covering.reduce_to_strict().covering().clone();
            let entries = vec![strict];
            let schedule = CoveringSequence::new(entries).map_err(|e| e.to_string())?;
            let report =
                check_covering_properties(&trace, &schedule).map_err(|e| e.to_string())?;
            if !report.all_pass {
                return Err(format!("{report:?}"));
            }
        }
        Ok(())
    }));

    reports
}

/// Random coverings drawn from a trace: random view rounds and random index
/// sets, retried until the covering property holds.
fn random_coverings(rng: &mut SplitRng, trace: &SimulationTrace, count: u32) -> Vec<Covering> {
    let n = trace.n();
    let mut coverings = Vec::new();
    let mut attempts = 0;
    while coverings.len() < count as usize && attempts < 200 {
        attempts += 1;
        let round = rng.below(trace.last_round() + 1);
        let mut index: Vec<NodeId> = Vec::new();
        for i in 0..n as usize {
            if rng.below(2) == 1 {
                index.push(NodeId::from_index(i));
            }
        }
        if index.is_empty() {
            continue;
        }
        if let Ok(covering) = Covering::from_trace(trace, &index, round, round) {
            coverings.push(covering);
        }
    }
    if coverings.is_empty() {
        // The full index set always covers.
        let all: Vec<NodeId> = (0..n as usize).map(NodeId::from_index).collect();
        coverings.push(Covering::from_trace(trace, &all, 0, 0).expect("full covering"));
    }
    coverings
}

/// Chain-collection witnesses on random directed and undirected chain traces.
pub fn collection_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut reports = Vec::new();
    let base = SplitRng::new(cfg.seed.wrapping_add(0xc0ffee));

    reports.push(CheckReport::run("chain-union-bound", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial));
        let trace = random_chain_trace(&mut rng, cfg.max_n, false);
        let witnesses = chain_collection_invariant(&trace).map_err(|e| e.to_string())?;
        for w in &witnesses {
            if w.members.len() as u32 != trace.n() - w.round {
                return Err(format!("round {}: expected {} members", w.round, trace.n() - w.round));
            }
            if !w.union_bound_holds() {
                return Err(format!("union bound fails at round {}", w.round));
            }
        }
        Ok(())
    }));

    reports.push(CheckReport::run("chain-time-bound", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(1);
        let trace = random_chain_trace(&mut rng, cfg.max_n, false);
        match trace.termination_round() {
            Some(r) if r <= trace.n() - 1 => Ok(()),
            other => Err(format!("chain trace terminated at {other:?}")),
        }
    }));

    reports.push(CheckReport::run("undirected-chain-union-bound", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(2);
        let trace = random_chain_trace(&mut rng, cfg.max_n.max(3).min(9), true);
        let witnesses = undirected_chain_invariant(&trace).map_err(|e| e.to_string())?;
        for w in &witnesses {
            if w.members.len() as u32 != trace.n() - 2 * w.round {
                return Err(format!("round {}: wrong member count", w.round));
            }
            if !w.union_bound_holds() {
                return Err(format!("union bound fails at round {}", w.round));
            }
        }
        Ok(())
    }));

    reports.push(CheckReport::run("undirected-chain-time-bound", cfg.trials, |trial| {
        let mut rng = base.split(u64::from(trial)).split(3);
        let trace = random_chain_trace(&mut rng, cfg.max_n.max(3).min(9), true);
        match trace.termination_round() {
            Some(r) if r <= (trace.n() - 1).div_ceil(2) => Ok(()),
            other => Err(format!("undirected chain trace terminated at {other:?}")),
        }
    }));

    reports
}

/// Everything: the lemma suites plus the collection witnesses.
pub fn full_property_suite(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let mut reports = lemma1_suite(cfg);
    reports.extend(lemma2_suite(cfg));
    reports.extend(collection_suite(cfg));
    reports
}
