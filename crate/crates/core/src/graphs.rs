//! Per-round communication graphs, graph classes, and graph sequences.
//!
//! Graphs are immutable after construction and safe to share across threads.
//! Undirected graphs are stored as symmetric digraphs so the same round
//! engine serves both the directed and the undirected setting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nodeset::{NodeId, NodeSet, MAX_N};
use crate::rng::SplitRng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count {n} out of range 1..={max}", max = MAX_N)]
    NodeCount { n: u32 },
    #[error("node {node} out of range 1..={n}")]
    NodeOutOfRange { node: u32, n: u32 },
    #[error("self-loop at node {node}")]
    SelfLoop { node: u32 },
    #[error("duplicate edge ({from},{to})")]
    DuplicateEdge { from: u32, to: u32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("class {kind} on {n} nodes exceeds the enumeration ceiling n <= {max}")]
    EnumerationCapacity { kind: String, n: u32, max: u32 },
    #[error("leaf parameter {leaves} out of range 1..={max} for n = {n}", max = n - 1)]
    LeafParameter { leaves: u32, n: u32 },
    #[error("explicit graph list is empty")]
    EmptyExplicitList,
    #[error("explicit graph list mixes node counts {a} and {b}")]
    MixedNodeCounts { a: u32, b: u32 },
    #[error("sampling {kind} on {n} nodes did not hit the target leaf count")]
    SamplingExhausted { kind: String, n: u32 },
}

/// A labeled digraph on nodes `1..=n`; one round's communication graph.
///
/// Edge `(u, v)` means `v` receives `u`'s round message.
#[derive(Clone, PartialEq, Eq)]
pub struct LabeledDigraph {
    n: u32,
    undirected: bool,
    edges: Vec<(NodeId, NodeId)>,
    out: Vec<NodeSet>,
    ins: Vec<NodeSet>,
}

impl LabeledDigraph {
    /// Validates and builds a graph. With `undirected` set, the edge set is
    /// symmetrized; listing both orientations of the same undirected edge is
    /// rejected as a duplicate.
    pub fn new(n: u32, edges: &[(u32, u32)], undirected: bool) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_N {
            return Err(GraphError::NodeCount { n });
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut directed = Vec::with_capacity(if undirected { edges.len() * 2 } else { edges.len() });
        for &(u, v) in edges {
            if u == 0 || u > n {
                return Err(GraphError::NodeOutOfRange { node: u, n });
            }
            if v == 0 || v > n {
                return Err(GraphError::NodeOutOfRange { node: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            let key = if undirected { (u.min(v), u.max(v)) } else { (u, v) };
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { from: u, to: v });
            }
            let (u, v) = (NodeId::new(u).unwrap(), NodeId::new(v).unwrap());
            directed.push((u, v));
            if undirected {
                directed.push((v, u));
            }
        }
        directed.sort_unstable();
        let mut out = vec![NodeSet::EMPTY; n as usize];
        let mut ins = vec![NodeSet::EMPTY; n as usize];
        for &(u, v) in &directed {
            out[u.index()].insert(v);
            ins[v.index()].insert(u);
        }
        Ok(LabeledDigraph { n, undirected, edges: directed, out, ins })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    /// All directed edges in sorted order (both orientations for undirected
    /// graphs).
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Each undirected edge once, as `(min, max)` pairs. Directed graphs
    /// return their edge list unchanged.
    pub fn undirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        if !self.undirected {
            return self.edges.clone();
        }
        self.edges.iter().copied().filter(|&(u, v)| u < v).collect()
    }

    pub fn out_neighbors(&self, p: NodeId) -> NodeSet {
        self.out[p.index()]
    }

    pub fn in_neighbors(&self, p: NodeId) -> NodeSet {
        self.ins[p.index()]
    }

    pub(crate) fn out_masks(&self) -> &[NodeSet] {
        &self.out
    }

    /// The graph with every edge reversed.
    pub fn reverse(&self) -> LabeledDigraph {
        let rev: Vec<(u32, u32)> = if self.undirected {
            self.undirected_edges().iter().map(|&(u, v)| (v.get(), u.get())).collect()
        } else {
            self.edges.iter().map(|&(u, v)| (v.get(), u.get())).collect()
        };
        LabeledDigraph::new(self.n, &rev, self.undirected).expect("reversal preserves validity")
    }

    /// Whether the directed edge set is closed under reversal.
    pub fn is_symmetric(&self) -> bool {
        self.edges.iter().all(|&(u, v)| self.out[v.index()].contains(u))
    }

    pub fn classify(&self) -> ClassificationReport {
        classify(self)
    }
}

impl std::fmt::Debug for LabeledDigraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LabeledDigraph(n={}, {}", self.n, if self.undirected { "undirected" } else { "directed" })?;
        for &(u, v) in &self.edges {
            write!(f, ", {u}->{v}")?;
        }
        write!(f, ")")
    }
}

/// Structural classification of a single round graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub is_rooted_tree: bool,
    pub root: Option<NodeId>,
    pub leaf_count: Option<u32>,
    pub is_directed_chain: bool,
    pub is_undirected_chain: bool,
    pub is_undirected_connected: bool,
}

/// A rooted tree has n-1 edges, a unique in-degree-0 root, in-degree 1
/// everywhere else, and every node reachable from the root. Leaves are the
/// out-degree-0 nodes. A directed chain is a rooted tree with one leaf.
pub fn classify(g: &LabeledDigraph) -> ClassificationReport {
    let n = g.n;
    let mut root = None;
    let mut in_degrees_ok = true;
    for p in (1..=n).map(|v| NodeId::new(v).unwrap()) {
        match g.in_neighbors(p).len() {
            0 => {
                if root.replace(p).is_some() {
                    in_degrees_ok = false;
                }
            }
            1 => {}
            _ => in_degrees_ok = false,
        }
    }
    let mut is_rooted_tree = false;
    if g.edges.len() as u32 == n.saturating_sub(1) && in_degrees_ok {
        if let Some(r) = root {
            is_rooted_tree = reachable_from(g, r).is_full(n);
        }
    }
    let leaf_count = is_rooted_tree.then(|| {
        (1..=n)
            .map(|v| NodeId::new(v).unwrap())
            .filter(|&p| g.out_neighbors(p).is_empty())
            .count() as u32
    });

    let symmetric = g.is_symmetric();
    let is_undirected_connected = symmetric && undirected_connected(g);
    let is_undirected_chain = symmetric && undirected_path(g);

    ClassificationReport {
        is_rooted_tree,
        root: is_rooted_tree.then(|| root.unwrap()),
        leaf_count,
        is_directed_chain: is_rooted_tree && leaf_count == Some(1),
        is_undirected_chain,
        is_undirected_connected,
    }
}

fn reachable_from(g: &LabeledDigraph, start: NodeId) -> NodeSet {
    let mut seen = NodeSet::singleton(start);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = NodeSet::EMPTY;
        for p in frontier.iter() {
            next |= g.out_neighbors(p);
        }
        frontier = next.difference(seen);
        seen |= next;
    }
    seen
}

fn undirected_connected(g: &LabeledDigraph) -> bool {
    // Caller guarantees symmetry, so out-reachability is connectivity.
    reachable_from(g, NodeId::new(1).unwrap()).is_full(g.n)
}

fn undirected_path(g: &LabeledDigraph) -> bool {
    let n = g.n;
    if n == 1 {
        return g.edges.is_empty();
    }
    if g.edges.len() as u32 != 2 * (n - 1) {
        return false;
    }
    let mut endpoints = 0;
    for p in (1..=n).map(|v| NodeId::new(v).unwrap()) {
        match g.out_neighbors(p).len() {
            1 => endpoints += 1,
            2 => {}
            _ => return false,
        }
    }
    endpoints == 2 && undirected_connected(g)
}

/// A named, parameterized class of candidate round graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphClassDescriptor {
    n: u32,
    kind: ClassKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassKind {
    RootedTrees,
    RootedTreesWithLeaves { leaves: u32 },
    DirectedChains,
    UndirectedChains,
    Star,
    ExplicitList { graphs: Vec<LabeledDigraph>, symmetric: bool },
}

/// Enumeration ceiling for the labeled-tree classes: 6^5 = 7776 rooted trees
/// is the point past which the adversary search, not the enumeration, is the
/// binding cost anyway.
pub const TREE_ENUMERATION_CEILING: u32 = 6;
/// Enumeration ceiling for the chain classes (8! = 40320 orderings).
pub const CHAIN_ENUMERATION_CEILING: u32 = 8;

impl GraphClassDescriptor {
    pub fn rooted_trees(n: u32) -> Result<Self, ClassError> {
        check_n(n)?;
        Ok(Self { n, kind: ClassKind::RootedTrees })
    }

    pub fn rooted_trees_with_leaves(n: u32, leaves: u32) -> Result<Self, ClassError> {
        check_n(n)?;
        if n < 2 || leaves == 0 || leaves > n - 1 {
            return Err(ClassError::LeafParameter { leaves, n });
        }
        Ok(Self { n, kind: ClassKind::RootedTreesWithLeaves { leaves } })
    }

    pub fn directed_chains(n: u32) -> Result<Self, ClassError> {
        check_n(n)?;
        Ok(Self { n, kind: ClassKind::DirectedChains })
    }

    pub fn undirected_chains(n: u32) -> Result<Self, ClassError> {
        check_n(n)?;
        Ok(Self { n, kind: ClassKind::UndirectedChains })
    }

    pub fn star(n: u32) -> Result<Self, ClassError> {
        check_n(n)?;
        Ok(Self { n, kind: ClassKind::Star })
    }

    /// A class given by an explicit graph list. `symmetric` declares that the
    /// class is invariant under node relabeling, which the adversary search
    /// needs before it may canonicalize states.
    pub fn explicit_list(graphs: Vec<LabeledDigraph>, symmetric: bool) -> Result<Self, ClassError> {
        let n = graphs.first().ok_or(ClassError::EmptyExplicitList)?.n();
        for g in &graphs {
            if g.n() != n {
                return Err(ClassError::MixedNodeCounts { a: n, b: g.n() });
            }
        }
        Ok(Self { n, kind: ClassKind::ExplicitList { graphs, symmetric } })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ClassKind::RootedTrees => "rooted-trees",
            ClassKind::RootedTreesWithLeaves { .. } => "rooted-trees-with-leaves",
            ClassKind::DirectedChains => "directed-chains",
            ClassKind::UndirectedChains => "undirected-chains",
            ClassKind::Star => "star",
            ClassKind::ExplicitList { .. } => "explicit-list",
        }
    }

    pub fn leaves(&self) -> Option<u32> {
        match self.kind {
            ClassKind::RootedTreesWithLeaves { leaves } => Some(leaves),
            _ => None,
        }
    }

    /// Declared relabeling symmetry; every built-in class has it.
    pub fn is_label_symmetric(&self) -> bool {
        match &self.kind {
            ClassKind::ExplicitList { symmetric, .. } => *symmetric,
            _ => true,
        }
    }

    /// Every member graph of this class is a rooted tree, which bounds the
    /// dissemination time by the pigeonhole cap.
    pub fn is_rooted_class(&self) -> bool {
        match &self.kind {
            ClassKind::ExplicitList { graphs, .. } => {
                graphs.iter().all(|g| g.classify().is_rooted_tree)
            }
            _ => true,
        }
    }

    /// Emits every graph of the class exactly once, in a deterministic order.
    pub fn enumerate(&self) -> Result<Box<dyn Iterator<Item = LabeledDigraph> + '_>, ClassError> {
        let n = self.n;
        match &self.kind {
            ClassKind::RootedTrees => {
                self.check_ceiling(TREE_ENUMERATION_CEILING)?;
                Ok(Box::new(RootedTreeIter::new(n)))
            }
            ClassKind::RootedTreesWithLeaves { leaves } => {
                self.check_ceiling(TREE_ENUMERATION_CEILING)?;
                let leaves = *leaves;
                Ok(Box::new(
                    RootedTreeIter::new(n).filter(move |g| g.classify().leaf_count == Some(leaves)),
                ))
            }
            ClassKind::DirectedChains => {
                self.check_ceiling(CHAIN_ENUMERATION_CEILING)?;
                Ok(Box::new(PermutationIter::new(n).map(move |p| chain_graph(n, &p))))
            }
            ClassKind::UndirectedChains => {
                self.check_ceiling(CHAIN_ENUMERATION_CEILING)?;
                Ok(Box::new(PermutationIter::new(n).filter_map(move |p| {
                    // Keep one representative per reversal pair.
                    if n > 1 && p[0] > p[n as usize - 1] {
                        None
                    } else {
                        Some(undirected_chain_graph(n, &p))
                    }
                })))
            }
            ClassKind::Star => Ok(Box::new((1..=n).map(move |c| star_graph(n, c)))),
            ClassKind::ExplicitList { graphs, .. } => Ok(Box::new(graphs.iter().cloned())),
        }
    }

    /// The length of the `enumerate` stream.
    pub fn count(&self) -> Result<u64, ClassError> {
        Ok(self.enumerate()?.count() as u64)
    }

    /// Deterministic function of `(self, seed)`; uniform over the class for
    /// `RootedTrees`. The leaf-constrained class is sampled by rejection and
    /// reports an error if the target leaf count is not hit within a large
    /// attempt budget.
    pub fn sample(&self, seed: u64) -> Result<LabeledDigraph, ClassError> {
        let mut rng = SplitRng::new(seed);
        self.sample_with(&mut rng)
    }

    /// As [`Self::sample`] but drawing from a caller-provided stream.
    pub fn sample_with(&self, rng: &mut SplitRng) -> Result<LabeledDigraph, ClassError> {
        let n = self.n;
        match &self.kind {
            ClassKind::RootedTrees => Ok(sample_rooted_tree(n, rng)),
            ClassKind::RootedTreesWithLeaves { leaves } => {
                for _ in 0..1_000_000 {
                    let g = sample_rooted_tree(n, rng);
                    if g.classify().leaf_count == Some(*leaves) {
                        return Ok(g);
                    }
                }
                Err(ClassError::SamplingExhausted { kind: self.name().into(), n })
            }
            ClassKind::DirectedChains => Ok(chain_graph(n, &rng.permutation(n))),
            ClassKind::UndirectedChains => Ok(undirected_chain_graph(n, &rng.permutation(n))),
            ClassKind::Star => Ok(star_graph(n, rng.below(n) + 1)),
            ClassKind::ExplicitList { graphs, .. } => {
                Ok(graphs[rng.below(graphs.len() as u32) as usize].clone())
            }
        }
    }

    /// Whether `g` belongs to this class, per `classify`.
    pub fn contains(&self, g: &LabeledDigraph) -> bool {
        if g.n() != self.n {
            return false;
        }
        let report = g.classify();
        match &self.kind {
            ClassKind::RootedTrees => report.is_rooted_tree,
            ClassKind::RootedTreesWithLeaves { leaves } => report.leaf_count == Some(*leaves),
            ClassKind::DirectedChains => report.is_directed_chain,
            ClassKind::UndirectedChains => report.is_undirected_chain,
            ClassKind::Star => {
                if self.n == 1 {
                    report.is_rooted_tree
                } else {
                    report.leaf_count == Some(self.n - 1)
                }
            }
            ClassKind::ExplicitList { graphs, .. } => graphs.contains(g),
        }
    }

    fn check_ceiling(&self, max: u32) -> Result<(), ClassError> {
        if self.n > max {
            return Err(ClassError::EnumerationCapacity { kind: self.name().into(), n: self.n, max });
        }
        Ok(())
    }
}

fn check_n(n: u32) -> Result<(), ClassError> {
    if n == 0 || n > MAX_N {
        return Err(ClassError::Graph(GraphError::NodeCount { n }));
    }
    Ok(())
}

fn chain_graph(n: u32, order: &[u32]) -> LabeledDigraph {
    let edges: Vec<(u32, u32)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    LabeledDigraph::new(n, &edges, false).expect("permutation path is valid")
}

fn undirected_chain_graph(n: u32, order: &[u32]) -> LabeledDigraph {
    let edges: Vec<(u32, u32)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    LabeledDigraph::new(n, &edges, true).expect("permutation path is valid")
}

fn star_graph(n: u32, center: u32) -> LabeledDigraph {
    let edges: Vec<(u32, u32)> = (1..=n).filter(|&v| v != center).map(|v| (center, v)).collect();
    LabeledDigraph::new(n, &edges, false).expect("star is valid")
}

/// Labeled rooted trees in lexicographic `(Prüfer sequence, root)` order.
struct RootedTreeIter {
    n: u32,
    prufer: PruferIter,
    current_edges: Option<Vec<(u32, u32)>>,
    next_root: u32,
}

impl RootedTreeIter {
    fn new(n: u32) -> Self {
        RootedTreeIter { n, prufer: PruferIter::new(n), current_edges: None, next_root: 1 }
    }
}

impl Iterator for RootedTreeIter {
    type Item = LabeledDigraph;

    fn next(&mut self) -> Option<LabeledDigraph> {
        loop {
            if let Some(edges) = &self.current_edges {
                if self.next_root <= self.n {
                    let root = self.next_root;
                    self.next_root += 1;
                    return Some(orient_from_root(self.n, edges, root));
                }
                self.current_edges = None;
            }
            let seq = self.prufer.next()?;
            self.current_edges = Some(decode_prufer(&seq, self.n));
            self.next_root = 1;
        }
    }
}

/// Odometer over `[1..=n]^(n-2)` in lexicographic order.
struct PruferIter {
    n: u32,
    state: Option<Vec<u32>>,
}

impl PruferIter {
    fn new(n: u32) -> Self {
        let len = n.saturating_sub(2) as usize;
        PruferIter { n, state: Some(vec![1; len]) }
    }
}

impl Iterator for PruferIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.state.clone()?;
        let mut next = current.clone();
        let mut advanced = false;
        for slot in next.iter_mut().rev() {
            if *slot < self.n {
                *slot += 1;
                advanced = true;
                break;
            }
            *slot = 1;
        }
        self.state = advanced.then_some(next);
        Some(current)
    }
}

/// Standard Prüfer decoding; yields the unrooted labeled tree's edges.
fn decode_prufer(seq: &[u32], n: u32) -> Vec<(u32, u32)> {
    if n == 1 {
        return Vec::new();
    }
    let mut degree = vec![1u32; n as usize + 1];
    for &v in seq {
        degree[v as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n as usize - 1);
    let mut leaf_heap: std::collections::BinaryHeap<std::cmp::Reverse<u32>> =
        (1..=n).filter(|&v| degree[v as usize] == 1).map(std::cmp::Reverse).collect();
    for &v in seq {
        let std::cmp::Reverse(leaf) = leaf_heap.pop().expect("prufer decode leaf");
        edges.push((leaf, v));
        degree[v as usize] -= 1;
        if degree[v as usize] == 1 {
            leaf_heap.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaf_heap.pop().expect("final leaf");
    let std::cmp::Reverse(b) = leaf_heap.pop().expect("final leaf");
    edges.push((a, b));
    edges
}

/// Orients an unrooted tree's edges away from `root`.
fn orient_from_root(n: u32, edges: &[(u32, u32)], root: u32) -> LabeledDigraph {
    let mut adjacency = vec![Vec::new(); n as usize + 1];
    for &(u, v) in edges {
        adjacency[u as usize].push(v);
        adjacency[v as usize].push(u);
    }
    let mut oriented = Vec::with_capacity(edges.len());
    let mut visited = vec![false; n as usize + 1];
    let mut queue = std::collections::VecDeque::from([root]);
    visited[root as usize] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u as usize] {
            if !visited[v as usize] {
                visited[v as usize] = true;
                oriented.push((u, v));
                queue.push_back(v);
            }
        }
    }
    LabeledDigraph::new(n, &oriented, false).expect("oriented tree is valid")
}

fn sample_rooted_tree(n: u32, rng: &mut SplitRng) -> LabeledDigraph {
    if n == 1 {
        return LabeledDigraph::new(1, &[], false).unwrap();
    }
    let seq: Vec<u32> = (0..n - 2).map(|_| rng.below(n) + 1).collect();
    let edges = decode_prufer(&seq, n);
    let root = rng.below(n) + 1;
    orient_from_root(n, &edges, root)
}

/// Lexicographic permutations of `1..=n`.
struct PermutationIter {
    state: Option<Vec<u32>>,
}

impl PermutationIter {
    fn new(n: u32) -> Self {
        PermutationIter { state: Some((1..=n).collect()) }
    }
}

impl Iterator for PermutationIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.state.clone()?;
        let mut next = current.clone();
        self.state = next_permutation(&mut next).then_some(next);
        Some(current)
    }
}

fn next_permutation(perm: &mut [u32]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// A repetition rule for periodic suffixes: after the listed rounds, the
/// sequence cycles through rounds `from..=to` forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatRule {
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SequenceError {
    #[error("sequence has no rounds and no node count")]
    Empty,
    #[error("round {round} has n = {got}, sequence has n = {expected}")]
    MixedNodeCounts { round: usize, got: u32, expected: u32 },
    #[error("repeat range {from}..{to} not within 1..{len}")]
    BadRepeatRange { from: u32, to: u32, len: u32 },
}

/// A finite ordered list of round graphs (1-based rounds), optionally
/// extended to an infinite sequence by a [`RepeatRule`].
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSequence {
    n: u32,
    rounds: Vec<LabeledDigraph>,
    repeat: Option<RepeatRule>,
}

impl GraphSequence {
    pub fn new(
        n: u32,
        rounds: Vec<LabeledDigraph>,
        repeat: Option<RepeatRule>,
    ) -> Result<Self, SequenceError> {
        for (i, g) in rounds.iter().enumerate() {
            if g.n() != n {
                return Err(SequenceError::MixedNodeCounts { round: i + 1, got: g.n(), expected: n });
            }
        }
        if let Some(rule) = repeat {
            let len = rounds.len() as u32;
            if rule.from == 0 || rule.from > rule.to || rule.to > len {
                return Err(SequenceError::BadRepeatRange { from: rule.from, to: rule.to, len });
            }
        }
        Ok(GraphSequence { n, rounds, repeat })
    }

    /// The constant sequence `g, g, g, ...`.
    pub fn constant(g: LabeledDigraph) -> Self {
        let n = g.n();
        GraphSequence::new(n, vec![g], Some(RepeatRule { from: 1, to: 1 })).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn listed_rounds(&self) -> &[LabeledDigraph] {
        &self.rounds
    }

    pub fn repeat_rule(&self) -> Option<RepeatRule> {
        self.repeat
    }

    pub fn is_infinite(&self) -> bool {
        self.repeat.is_some()
    }

    /// The graph of round `r >= 1`, or `None` past the end of a finite
    /// sequence.
    pub fn graph_at(&self, r: u32) -> Option<&LabeledDigraph> {
        if r == 0 {
            return None;
        }
        let len = self.rounds.len() as u32;
        if r <= len {
            return Some(&self.rounds[r as usize - 1]);
        }
        let rule = self.repeat?;
        let period = rule.to - rule.from + 1;
        let offset = (r - len - 1) % period;
        Some(&self.rounds[(rule.from - 1 + offset) as usize])
    }

    /// Length-`i` prefix as an owned finite sequence.
    pub fn prefix(&self, i: u32) -> Option<GraphSequence> {
        let rounds: Vec<LabeledDigraph> =
            (1..=i).map(|r| self.graph_at(r).cloned()).collect::<Option<_>>()?;
        Some(GraphSequence { n: self.n, rounds, repeat: None })
    }
}
