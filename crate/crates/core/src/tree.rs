//! Parameterized suffix tree as a flat node array, built from PSA + PLCP.
//!
//! Nodes are numbered in preorder with children in lexicographic order, so
//! the root is node 0, every child has a larger id than its parent, and
//! iterating ids in reverse visits children before parents. Each node covers
//! a half-open PSA interval; edge labels are windows of prev-encoded
//! suffixes and are never materialized.

use std::ops::Range;

use crate::alphabet::PText;
use crate::encoding::PrevSymbol;
use crate::error::InvariantError;
use crate::psa::PsaIndex;

pub type NodeId = usize;

pub const ROOT: NodeId = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub parent: Option<NodeId>,
    /// Length of the root-to-node label.
    pub depth: usize,
    /// PSA interval of the leaves below this node.
    pub lo: usize,
    pub hi: usize,
    /// Start of a suffix passing through this node (that of PSA row `lo`);
    /// the edge label is `prev(T[suffix_start..])[parent.depth..depth]`.
    pub suffix_start: usize,
    pub children: Vec<NodeId>,
}

impl Node {
    pub fn range(&self) -> Range<usize> {
        self.lo..self.hi
    }

    pub fn leaf_count(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixTree {
    nodes: Vec<Node>,
}

struct Open {
    depth: usize,
    lo: usize,
    children: Vec<usize>,
}

/// Stack-based construction over the LCP intervals of the suffix array.
pub fn build_tree(index: &PsaIndex, text: &PText) -> SuffixTree {
    let psa = index.psa();
    let plcp = index.plcp();
    let n = psa.len();
    // Nodes are first collected in closing order, then renumbered.
    let mut closed: Vec<(usize, usize, usize, Vec<usize>)> = Vec::with_capacity(2 * n);
    let mut stack = vec![Open {
        depth: 0,
        lo: 0,
        children: Vec::new(),
    }];
    let close = |open: Open, hi: usize, closed: &mut Vec<(usize, usize, usize, Vec<usize>)>| {
        closed.push((open.depth, open.lo, hi, open.children));
        closed.len() - 1
    };
    for i in 0..n {
        let h = if i == 0 { 0 } else { plcp[i] };
        while stack.last().expect("root stays on the stack").depth > h {
            let v = stack.pop().unwrap();
            let lo = v.lo;
            let id = close(v, i, &mut closed);
            let top = stack.last_mut().unwrap();
            if top.depth >= h {
                top.children.push(id);
            } else {
                stack.push(Open {
                    depth: h,
                    lo,
                    children: vec![id],
                });
            }
        }
        stack.push(Open {
            depth: text.suffix_len(psa[i]),
            lo: i,
            children: Vec::new(),
        });
    }
    while let Some(v) = stack.pop() {
        let id = close(v, n, &mut closed);
        if let Some(top) = stack.last_mut() {
            top.children.push(id);
        }
    }

    // Preorder renumbering; the root closed last.
    let mut nodes = Vec::with_capacity(closed.len());
    let mut work = vec![(closed.len() - 1, None)];
    while let Some((old, parent)) = work.pop() {
        let id = nodes.len();
        let (depth, lo, hi, ref kids) = closed[old];
        nodes.push(Node {
            parent,
            depth,
            lo,
            hi,
            suffix_start: psa[lo],
            children: Vec::with_capacity(kids.len()),
        });
        if let Some(p) = parent {
            nodes[p].children.push(id);
        }
        work.extend(kids.iter().rev().map(|&k| (k, Some(id))));
    }
    SuffixTree { nodes }
}

impl SuffixTree {
    /// Rebuilds a tree from per-node records; children are derived from the
    /// parent links.
    pub(crate) fn from_nodes(mut nodes: Vec<Node>) -> Self {
        for v in 0..nodes.len() {
            nodes[v].children.clear();
            if let Some(p) = nodes[v].parent {
                if p < v {
                    nodes[p].children.push(v);
                }
            }
        }
        SuffixTree { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_len(&self, v: NodeId) -> usize {
        let node = &self.nodes[v];
        node.depth - node.parent.map_or(0, |p| self.nodes[p].depth)
    }

    /// Symbol at `offset` (0-based) along the edge into `v`.
    pub fn edge_symbol(&self, text: &PText, v: NodeId, offset: usize) -> PrevSymbol {
        assert!(offset < self.edge_len(v), "offset {offset} beyond edge of node {v}");
        let node = &self.nodes[v];
        let begin = node.parent.map_or(0, |p| self.nodes[p].depth);
        text.prev_at(node.suffix_start, begin + offset)
    }

    /// First symbol of the edge into `v`, the key children are ordered by.
    pub fn first_symbol(&self, text: &PText, v: NodeId) -> PrevSymbol {
        self.edge_symbol(text, v, 0)
    }

    /// Suffix start of a leaf.
    pub fn leaf_position(&self, v: NodeId) -> Option<usize> {
        let node = &self.nodes[v];
        node.is_leaf().then_some(node.suffix_start)
    }

    /// Child of `v` whose edge starts with `symbol`.
    pub fn child_by_symbol(&self, text: &PText, v: NodeId, symbol: PrevSymbol) -> Option<NodeId> {
        let kids = &self.nodes[v].children;
        kids.binary_search_by(|&c| self.first_symbol(text, c).cmp(&symbol))
            .ok()
            .map(|i| kids[i])
    }

    /// Checks the compact-trie invariants against the suffix array.
    pub fn validate(&self, index: &PsaIndex, text: &PText) -> Result<(), InvariantError> {
        let err = |detail: String| Err(InvariantError::new("tree", detail));
        let n = index.len();
        if self.nodes.is_empty() || self.nodes[ROOT].parent.is_some() {
            return err("missing root".into());
        }
        if self.nodes.len() > 2 * n - 1 {
            return err(format!("{} nodes for {n} suffixes", self.nodes.len()));
        }
        let root = &self.nodes[ROOT];
        if root.lo != 0 || root.hi != n || root.depth != 0 {
            return err("root does not span the suffix array".into());
        }
        let mut leaves = 0;
        for (v, node) in self.nodes.iter().enumerate() {
            if node.lo >= node.hi || node.hi > n {
                return err(format!("node {v} has range {:?}", node.range()));
            }
            if node.suffix_start != index.psa()[node.lo] {
                return err(format!("node {v} suffix start does not match PSA row {}", node.lo));
            }
            if let Some(p) = node.parent {
                if p >= v || self.nodes[p].depth >= node.depth {
                    return err(format!("node {v} is not below its parent {p}"));
                }
            }
            if node.is_leaf() {
                leaves += 1;
                if node.leaf_count() != 1 || node.depth != text.suffix_len(node.suffix_start) {
                    return err(format!("leaf {v} does not span exactly its suffix"));
                }
                continue;
            }
            if v != ROOT && node.children.len() < 2 {
                return err(format!("internal node {v} has a single child"));
            }
            let mut cursor = node.lo;
            let mut last_key = None;
            for &c in &node.children {
                let child = &self.nodes[c];
                if child.parent != Some(v) || child.lo != cursor {
                    return err(format!("children of node {v} do not partition its range"));
                }
                cursor = child.hi;
                let key = self.first_symbol(text, c);
                if last_key.is_some_and(|k| k >= key) {
                    return err(format!("children of node {v} are not strictly ordered"));
                }
                last_key = Some(key);
            }
            if cursor != node.hi {
                return err(format!("children of node {v} do not cover its range"));
            }
            // Every suffix of the node must share its label, and the label must
            // be maximal (children diverge right after it).
            let lcp = if node.leaf_count() > 1 {
                index.lcp_between(node.lo, node.hi - 1)
            } else {
                node.depth
            };
            if lcp != node.depth {
                return err(format!("node {v} depth {} but its suffixes share {lcp}", node.depth));
            }
        }
        if leaves != n {
            return err(format!("{leaves} leaves for {n} suffixes"));
        }
        Ok(())
    }
}
