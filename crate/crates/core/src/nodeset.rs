//! Node identifiers and fixed-capacity node sets.
//!
//! Processes are labeled `1..=n`. A [`NodeSet`] is a subset of them backed by
//! a `u128` bitmask (bit `i - 1` stands for node `i`), which keeps influence
//! and knowledge sets `Copy` and makes the round update a handful of `OR`s.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest node count a [`NodeSet`] can hold.
pub const MAX_N: u32 = 128;

/// A process identifier in `1..=n`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct NodeId(u32);

impl NodeId {
    /// Returns `None` unless `1 <= value <= MAX_N`. The per-graph upper bound
    /// `value <= n` is enforced where the relevant `n` is known.
    pub fn new(value: u32) -> Option<Self> {
        (1..=MAX_N).contains(&value).then_some(NodeId(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Zero-based position, for indexing vectors of per-node data.
    pub fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < MAX_N as usize);
        NodeId(index as u32 + 1)
    }
}

impl TryFrom<u32> for NodeId {
    type Error = String;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        NodeId::new(value).ok_or_else(|| format!("node id {value} out of range 1..={MAX_N}"))
    }
}

impl From<NodeId> for u32 {
    fn from(id: NodeId) -> u32 {
        id.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of nodes drawn from `1..=MAX_N`.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct NodeSet(u128);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub fn singleton(p: NodeId) -> Self {
        NodeSet(1u128 << p.index())
    }

    /// The full set `{1, ..., n}`.
    pub fn full(n: u32) -> Self {
        debug_assert!(n <= MAX_N);
        NodeSet(mask_width(n))
    }

    /// The interval `{lo, ..., hi}`; empty when `lo > hi`.
    pub fn interval(lo: u32, hi: u32) -> Self {
        debug_assert!(lo >= 1 && hi <= MAX_N);
        if lo > hi {
            return NodeSet::EMPTY;
        }
        NodeSet(mask_width(hi - lo + 1) << (lo - 1))
    }

    pub fn insert(&mut self, p: NodeId) {
        self.0 |= 1u128 << p.index();
    }

    pub fn remove(&mut self, p: NodeId) {
        self.0 &= !(1u128 << p.index());
    }

    pub fn contains(self, p: NodeId) -> bool {
        self.0 & (1u128 << p.index()) != 0
    }

    pub fn union(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 | other.0)
    }

    pub fn intersection(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & other.0)
    }

    pub fn difference(self, other: NodeSet) -> NodeSet {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_full(self, n: u32) -> bool {
        self.0 == mask_width(n)
    }

    pub fn iter(self) -> impl Iterator<Item = NodeId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let idx = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(NodeId::from_index(idx))
            }
        })
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.iter().map(NodeId::get).collect()
    }

    pub(crate) fn bits(self) -> u128 {
        self.0
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        let mut set = NodeSet::EMPTY;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl std::ops::BitOr for NodeSet {
    type Output = NodeSet;
    fn bitor(self, rhs: NodeSet) -> NodeSet {
        self.union(rhs)
    }
}

impl std::ops::BitOrAssign for NodeSet {
    fn bitor_assign(&mut self, rhs: NodeSet) {
        self.0 |= rhs.0;
    }
}

impl TryFrom<Vec<u32>> for NodeSet {
    type Error = String;

    fn try_from(values: Vec<u32>) -> Result<Self, Self::Error> {
        let mut set = NodeSet::EMPTY;
        for v in values {
            let id = NodeId::new(v).ok_or_else(|| format!("node id {v} out of range"))?;
            set.insert(id);
        }
        Ok(set)
    }
}

impl From<NodeSet> for Vec<u32> {
    fn from(set: NodeSet) -> Vec<u32> {
        set.to_vec()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

fn mask_width(width: u32) -> u128 {
    if width == 0 {
        0
    } else {
        u128::MAX >> (128 - width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(v: u32) -> NodeId {
        NodeId::new(v).unwrap()
    }

    #[test]
    fn singleton_and_full() {
        let s = NodeSet::singleton(id(3));
        assert!(s.contains(id(3)));
        assert_eq!(s.len(), 1);
        let f = NodeSet::full(5);
        assert_eq!(f.to_vec(), vec![1, 2, 3, 4, 5]);
        assert!(f.is_full(5));
        assert!(!NodeSet::full(4).is_full(5));
    }

    #[test]
    fn interval_endpoints() {
        assert_eq!(NodeSet::interval(2, 4).to_vec(), vec![2, 3, 4]);
        assert_eq!(NodeSet::interval(4, 2), NodeSet::EMPTY);
        assert_eq!(NodeSet::interval(1, 128).len(), 128);
    }

    #[test]
    fn node_id_bounds() {
        assert!(NodeId::new(0).is_none());
        assert!(NodeId::new(129).is_none());
        assert_eq!(NodeId::new(128).unwrap().get(), 128);
    }

    #[test]
    fn serde_sorted_list() {
        let s: NodeSet = [id(4), id(1), id(3)].into_iter().collect();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3,4]");
        let back: NodeSet = serde_json::from_str("[4,1,3]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<NodeSet>("[0]").is_err());
    }
}
