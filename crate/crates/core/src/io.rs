//! File formats: graph JSON, sequence JSON Lines, DOT export, trace JSON and
//! CSV summaries.
//!
//! A graph is `{"n": int, "undirected": bool, "edges": [[u,v],...]}`; a
//! sequence file holds one graph per line in round order, optionally followed
//! by a trailing `{"repeat": {"from": r1, "to": r2}}` directive for a
//! periodic suffix. Undirected graphs list each edge once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dissemination::{RoundCount, SimulationTrace};
use crate::graphs::{GraphError, GraphSequence, LabeledDigraph, RepeatRule, SequenceError};
use crate::nodeset::NodeSet;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("sequence file contains no rounds")]
    EmptySequence,
    #[error("repeat directive must be the last line (line {line})")]
    RepeatNotLast { line: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// The wire form of a [`LabeledDigraph`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: u32,
    pub undirected: bool,
    pub edges: Vec<(u32, u32)>,
}

impl From<&LabeledDigraph> for GraphJson {
    fn from(g: &LabeledDigraph) -> GraphJson {
        GraphJson {
            n: g.n(),
            undirected: g.is_undirected(),
            edges: g.undirected_edges().iter().map(|&(u, v)| (u.get(), v.get())).collect(),
        }
    }
}

impl GraphJson {
    pub fn build(&self) -> Result<LabeledDigraph, GraphError> {
        LabeledDigraph::new(self.n, &self.edges, self.undirected)
    }
}

pub fn graph_to_json(g: &LabeledDigraph) -> String {
    serde_json::to_string(&GraphJson::from(g)).expect("graph serializes")
}

pub fn graph_from_json(text: &str) -> Result<LabeledDigraph, FormatError> {
    let parsed: GraphJson = serde_json::from_str(text)?;
    Ok(parsed.build()?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SequenceLine {
    Repeat { repeat: RepeatRule },
    Graph(GraphJson),
}

/// Parses a sequence file; errors carry 1-based line numbers.
pub fn sequence_from_jsonl(text: &str) -> Result<GraphSequence, FormatError> {
    let mut rounds: Vec<LabeledDigraph> = Vec::new();
    let mut repeat: Option<(usize, RepeatRule)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some((at, _)) = repeat {
            return Err(FormatError::RepeatNotLast { line: at });
        }
        let parsed: SequenceLine = serde_json::from_str(raw)
            .map_err(|e| FormatError::Line { line, message: e.to_string() })?;
        match parsed {
            SequenceLine::Repeat { repeat: rule } => repeat = Some((line, rule)),
            SequenceLine::Graph(graph) => {
                let built = graph
                    .build()
                    .map_err(|e| FormatError::Line { line, message: e.to_string() })?;
                rounds.push(built);
            }
        }
    }
    let n = rounds.first().ok_or(FormatError::EmptySequence)?.n();
    Ok(GraphSequence::new(n, rounds, repeat.map(|(_, rule)| rule))?)
}

pub fn sequence_to_jsonl(seq: &GraphSequence) -> String {
    let mut out = String::new();
    for g in seq.listed_rounds() {
        out.push_str(&graph_to_json(g));
        out.push('\n');
    }
    if let Some(rule) = seq.repeat_rule() {
        out.push_str(
            &serde_json::json!({ "repeat": { "from": rule.from, "to": rule.to } }).to_string(),
        );
        out.push('\n');
    }
    out
}

/// DOT export: `u -> v` for directed graphs, `u -- v` (once per edge) for
/// undirected ones.
pub fn graph_to_dot(g: &LabeledDigraph) -> String {
    let (header, arrow) = if g.is_undirected() { ("graph", "--") } else { ("digraph", "->") };
    let mut out = format!("{header} G {{\n");
    for v in 1..=g.n() {
        out.push_str(&format!("  {v};\n"));
    }
    for (u, v) in g.undirected_edges() {
        out.push_str(&format!("  {u} {arrow} {v};\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize)]
struct TraceRoundJson {
    round: u32,
    influence: Vec<NodeSet>,
}

#[derive(Debug, Serialize)]
struct TraceJson {
    n: u32,
    termination_round: Option<u32>,
    dissemination_time: RoundCount,
    winners: NodeSet,
    states: Vec<TraceRoundJson>,
}

/// Trace JSON: per-round arrays of influence sets as sorted node lists.
pub fn trace_to_json(trace: &SimulationTrace) -> String {
    let states = trace
        .states()
        .iter()
        .map(|s| TraceRoundJson { round: s.round(), influence: s.influence_sets().to_vec() })
        .collect();
    let doc = TraceJson {
        n: trace.n(),
        termination_round: trace.termination_round(),
        dissemination_time: trace.dissemination_time(),
        winners: trace.winners(),
        states,
    };
    serde_json::to_string_pretty(&doc).expect("trace serializes")
}

/// CSV summary: `round,max_set_size,intersection_size`.
pub fn trace_to_csv(trace: &SimulationTrace) -> String {
    let mut out = String::from("round,max_set_size,intersection_size\n");
    for s in trace.states() {
        out.push_str(&format!("{},{},{}\n", s.round(), s.max_set_size(), s.winners().len()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissemination::run;

    #[test]
    fn graph_json_round_trip() {
        let g = LabeledDigraph::new(5, &[(5, 3), (5, 2), (2, 4), (4, 1)], false).unwrap();
        let text = graph_to_json(&g);
        assert_eq!(text, r#"{"n":5,"undirected":false,"edges":[[2,4],[4,1],[5,2],[5,3]]}"#);
        assert_eq!(graph_from_json(&text).unwrap(), g);

        let und = LabeledDigraph::new(3, &[(2, 1), (2, 3)], true).unwrap();
        assert_eq!(graph_from_json(&graph_to_json(&und)).unwrap(), und);
    }

    #[test]
    fn sequence_round_trip_with_repeat() {
        let chain = LabeledDigraph::new(3, &[(1, 2), (2, 3)], false).unwrap();
        let seq = GraphSequence::constant(chain);
        let text = sequence_to_jsonl(&seq);
        let parsed = sequence_from_jsonl(&text).unwrap();
        assert_eq!(parsed, seq);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = sequence_from_jsonl("{\"n\":3,\"undirected\":false,\"edges\":[]}\nnot json\n")
            .unwrap_err();
        match err {
            FormatError::Line { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }

        let bad_edge = r#"{"n":3,"undirected":false,"edges":[[1,5]]}"#;
        let err = sequence_from_jsonl(bad_edge).unwrap_err();
        match err {
            FormatError::Line { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other}"),
        }

        assert!(matches!(sequence_from_jsonl("\n\n"), Err(FormatError::EmptySequence)));
    }

    #[test]
    fn repeat_must_be_last() {
        let text = "{\"repeat\":{\"from\":1,\"to\":1}}\n{\"n\":2,\"undirected\":false,\"edges\":[[1,2]]}\n";
        assert!(matches!(sequence_from_jsonl(text), Err(FormatError::RepeatNotLast { .. })));
    }

    #[test]
    fn dot_output_shape() {
        let g = LabeledDigraph::new(3, &[(1, 2), (2, 3)], false).unwrap();
        assert_eq!(graph_to_dot(&g), "digraph G {\n  1;\n  2;\n  3;\n  1 -> 2;\n  2 -> 3;\n}\n");
        let und = LabeledDigraph::new(2, &[(1, 2)], true).unwrap();
        assert_eq!(graph_to_dot(&und), "graph G {\n  1;\n  2;\n  1 -- 2;\n}\n");
    }

    #[test]
    fn trace_exports() {
        let chain = LabeledDigraph::new(3, &[(1, 2), (2, 3)], false).unwrap();
        let trace = run(GraphSequence::constant(chain), 5).unwrap();
        let json = trace_to_json(&trace);
        assert!(json.contains("\"termination_round\": 2"));
        let csv = trace_to_csv(&trace);
        assert_eq!(csv, "round,max_set_size,intersection_size\n0,1,0\n1,2,0\n2,3,1\n");
    }
}
