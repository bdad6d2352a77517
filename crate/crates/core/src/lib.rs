//! Data dissemination in synchronous dynamic networks under oblivious
//! message adversaries: a round-by-round simulator for knowledge and
//! influence sets, a covering calculus, explicit lower-bound constructions
//! with closed-form oracles, and an exhaustive adversary search producing
//! exact small-n worst-case dissemination times with replayable certificates.

pub mod adversary;
pub mod checks;
pub mod constructions;
pub mod coverings;
pub mod dissemination;
pub mod graphs;
pub mod io;
pub mod nodeset;
pub mod rng;

pub use adversary::{
    greedy_adversary, nlogn_bound, pigeonhole_cap, verify_upper_bound, worst_case_time,
};
pub use constructions::{
    closed_form_influence, expected_lower_bound, lower_bound_sequence, verify_lower_bound,
};
pub use dissemination::{run, run_exact, InfluenceState, RoundCount, SimulationTrace};
pub use graphs::{GraphClassDescriptor, GraphSequence, LabeledDigraph};
pub use nodeset::{NodeId, NodeSet, MAX_N};
