//! The parameterized suffix tray: suffix tree nodes with at least
//! `max(sigma, pi)` leaves (p-nodes) keep enough information to descend in
//! constant time per symbol, and the search switches to a small range of the
//! suffix array as soon as it leaves them.
//!
//! Construction runs in five stages:
//!
//! 1. [`build_psa`] sorts prev-encoded suffixes.
//! 2. [`build_tree`] derives the suffix tree from PSA + PLCP.
//! 3. [`classify_pnodes`] marks p-nodes, branching p-nodes (two or more
//!    p-node children) and the heavy child of every other p-node.
//! 4. [`propagate_rep_pairs`] gives each p-node the largest leaf position
//!    below it and materializes the f-array of that suffix for branching
//!    p-nodes, in one right-to-left sweep.
//! 5. [`build_parrays`] turns each f-array into the renaming
//!    `f_{v, spe(v)}` and from it the node's p-array, a table indexed by
//!    the rank of the next spe symbol.

use std::cmp::Ordering;
use std::ops::Range;

use crate::alphabet::{PText, Symbol, Universe};
use crate::encoding::{prev, spe, FArray, FposSweep, PFunction, PrevSymbol};
use crate::error::{BuildError, InvariantError, QueryError};
use crate::psa::{build_psa, PsaIndex, SearchStats};
use crate::tree::{build_tree, NodeId, SuffixTree, ROOT};

/// Per-node tray data. Vectors are indexed by [`NodeId`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotations {
    pub(crate) threshold: usize,
    pub(crate) is_pnode: Vec<bool>,
    pub(crate) is_branching: Vec<bool>,
    pub(crate) heavy: Vec<Option<NodeId>>,
    /// Largest leaf position below each p-node.
    pub(crate) rep: Vec<Option<usize>>,
    /// Index of the node's p-array in `pool` (in units of `pi + sigma`).
    pub(crate) parray_slot: Vec<Option<usize>>,
    pub(crate) pool: Vec<Option<NodeId>>,
    pub(crate) width: usize,
}

impl Annotations {
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn is_pnode(&self, v: NodeId) -> bool {
        self.is_pnode[v]
    }

    pub fn is_branching(&self, v: NodeId) -> bool {
        self.is_branching[v]
    }

    pub fn heavy_child(&self, v: NodeId) -> Option<NodeId> {
        self.heavy[v]
    }

    pub fn rep_position(&self, v: NodeId) -> Option<usize> {
        self.rep[v]
    }

    /// p-array of a branching p-node, indexed by `rank - 1`.
    pub fn parray(&self, v: NodeId) -> Option<&[Option<NodeId>]> {
        self.parray_slot[v].map(|s| &self.pool[s * self.width..(s + 1) * self.width])
    }

    pub fn pnode_count(&self) -> usize {
        self.is_pnode.iter().filter(|&&b| b).count()
    }

    pub fn branching_count(&self) -> usize {
        self.is_branching.iter().filter(|&&b| b).count()
    }

    pub fn parray_cells(&self) -> usize {
        self.pool.len()
    }
}

/// Marks p-nodes, branching p-nodes and heavy children in one bottom-up pass.
pub fn classify_pnodes(tree: &SuffixTree, text: &PText) -> Annotations {
    let universe = text.universe();
    let threshold = universe.threshold();
    let count = tree.len();
    let is_pnode: Vec<bool> = tree.nodes().iter().map(|v| v.leaf_count() >= threshold).collect();
    let mut is_branching = vec![false; count];
    let mut heavy = vec![None; count];
    for (v, node) in tree.nodes().iter().enumerate() {
        if !is_pnode[v] {
            continue;
        }
        let mut pchildren = node.children.iter().copied().filter(|&c| is_pnode[c]);
        match (pchildren.next(), pchildren.next()) {
            (Some(_), Some(_)) => is_branching[v] = true,
            (Some(only), None) => heavy[v] = Some(only),
            _ => {}
        }
    }
    Annotations {
        threshold,
        is_pnode,
        is_branching,
        heavy,
        rep: vec![None; count],
        parray_slot: vec![None; count],
        pool: Vec::new(),
        width: universe.size() as usize,
    }
}

/// A branching p-node with its representative suffix and that suffix's
/// f-array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepPair {
    pub node: NodeId,
    pub position: usize,
    pub farray: FArray,
}

/// Stores the largest leaf position of every p-node and returns the f-array
/// pairs of the branching p-nodes, ordered by node id.
pub fn propagate_rep_pairs(tree: &SuffixTree, ann: &mut Annotations, text: &PText) -> Vec<RepPair> {
    let mut largest = vec![0usize; tree.len()];
    for v in (0..tree.len()).rev() {
        let node = tree.node(v);
        largest[v] = match node.children.iter().map(|&c| largest[c]).max() {
            Some(m) => m,
            None => node.suffix_start,
        };
        if ann.is_pnode[v] {
            ann.rep[v] = Some(largest[v]);
        }
    }

    let mut wanted: Vec<(usize, NodeId)> = (0..tree.len())
        .filter(|&v| ann.is_branching[v])
        .map(|v| (largest[v], v))
        .collect();
    wanted.sort_unstable_by(|a, b| b.cmp(a));
    let mut pairs = Vec::with_capacity(wanted.len());
    let mut sweep = FposSweep::new(text);
    let mut next = wanted.iter().peekable();
    while let Some(pos) = sweep.advance() {
        while let Some(&(_, v)) = next.next_if(|&&(p, _)| p == pos) {
            pairs.push(RepPair {
                node: v,
                position: pos,
                farray: sweep.farray(),
            });
        }
        if next.peek().is_none() {
            break;
        }
    }
    pairs.sort_unstable_by_key(|p| p.node);
    pairs
}

/// `(pair index, offset, symbol)` for every parameterized symbol occurring
/// in each pair's node label.
fn label_occurrences(tree: &SuffixTree, pairs: &[RepPair]) -> Vec<(usize, u32, Symbol)> {
    let mut triples = Vec::new();
    for (j, pair) in pairs.iter().enumerate() {
        let depth = tree.node(pair.node).depth;
        for (k, off) in pair.farray.offsets().iter().enumerate() {
            if let Some(o) = *off {
                if (o as usize) < depth {
                    triples.push((j, o, k as Symbol + 1));
                }
            }
        }
    }
    triples
}

fn renamings_from_sorted(universe: Universe, count: usize, sorted: &[(usize, u32, Symbol)]) -> Vec<PFunction> {
    let mut out = vec![PFunction::empty(universe); count];
    let mut l = 0;
    let mut current = usize::MAX;
    for &(j, _, x) in sorted {
        if j != current {
            current = j;
            l = 0;
        }
        l += 1;
        out[j].set(x, l);
    }
    out
}

/// `f_{v, spe(v)}` for every pair, ordering all label occurrences at once
/// with a two-key LSD radix sort (offset, then pair index).
pub fn renamings_by_radix(text: &PText, tree: &SuffixTree, pairs: &[RepPair]) -> Vec<PFunction> {
    let triples = label_occurrences(tree, pairs);
    let by_offset = counting_sort(&triples, text.len(), |t| t.1 as usize);
    let sorted = counting_sort(&by_offset, pairs.len(), |t| t.0);
    renamings_from_sorted(text.universe(), pairs.len(), &sorted)
}

/// Same result as [`renamings_by_radix`] using a comparison sort.
pub fn renamings_by_sort(text: &PText, tree: &SuffixTree, pairs: &[RepPair]) -> Vec<PFunction> {
    let mut triples = label_occurrences(tree, pairs);
    triples.sort_unstable();
    renamings_from_sorted(text.universe(), pairs.len(), &triples)
}

fn counting_sort<T: Copy>(items: &[T], buckets: usize, key: impl Fn(&T) -> usize) -> Vec<T> {
    let mut start = vec![0usize; buckets + 1];
    for it in items {
        start[key(it) + 1] += 1;
    }
    for b in 0..buckets {
        start[b + 1] += start[b];
    }
    let mut out = vec![items.first().copied(); items.len()];
    for it in items {
        let slot = &mut start[key(it)];
        out[*slot] = Some(*it);
        *slot += 1;
    }
    out.into_iter().map(|x| x.expect("every slot filled")).collect()
}

/// p-array of node `v` from the renaming `f = f_{v, spe(v)}` of the label
/// starting at text position `start`.
///
/// A child whose edge starts with static `c` sits at `rank(c)`. A child
/// starting with distance `k > 0` repeats the parameterized symbol `k`
/// places back, whose spe name is `f(T[start + |v| - k])`. The child
/// starting with distance 0 is reached by every parameterized id that does
/// not occur in `spe(v)`.
pub fn fill_parray(
    tree: &SuffixTree,
    text: &PText,
    v: NodeId,
    start: usize,
    f: &PFunction,
) -> Result<Vec<Option<NodeId>>, BuildError> {
    let universe = text.universe();
    let depth = tree.node(v).depth;
    let mut cells: Vec<Option<NodeId>> = vec![None; universe.size() as usize];
    let mut assign = |x: Symbol, c: NodeId| match cells[x as usize - 1].replace(c) {
        Some(first) => Err(BuildError::ParrayCollision {
            node: v,
            rank: x,
            first,
            second: c,
        }),
        None => Ok(()),
    };
    for &c in &tree.node(v).children {
        match tree.first_symbol(text, c) {
            PrevSymbol::Static(s) => assign(s, c)?,
            PrevSymbol::Distance(0) => {
                for x in f.domain_len() as Symbol + 1..=universe.pi {
                    assign(x, c)?;
                }
            }
            PrevSymbol::Distance(k) => {
                let source = text.symbols()[start + depth - k as usize];
                let x = f
                    .apply(source)
                    .ok_or(BuildError::UnmappedSymbol { node: v, child: c })?;
                assign(x, c)?;
            }
        }
    }
    Ok(cells)
}

/// Computes and stores the p-array of every branching p-node.
pub fn build_parrays(
    tree: &SuffixTree,
    ann: &mut Annotations,
    text: &PText,
    pairs: &[RepPair],
) -> Result<(), BuildError> {
    let renamings = renamings_by_radix(text, tree, pairs);
    ann.pool = Vec::with_capacity(pairs.len() * ann.width);
    for (slot, (pair, f)) in pairs.iter().zip(&renamings).enumerate() {
        let cells = fill_parray(tree, text, pair.node, pair.position, f)?;
        ann.pool.extend(cells);
        ann.parray_slot[pair.node] = Some(slot);
    }
    Ok(())
}

/// Instrumentation for one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub symbol_comparisons: u64,
    pub nodes_visited: u64,
    pub parray_lookups: u64,
    pub psa_probes: u64,
    /// Size of the largest PSA range handed to the binary search.
    pub max_range_searched: usize,
}

/// Occurrences of a pattern: a PSA interval plus instrumentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryResult {
    pub range: Range<usize>,
    pub stats: QueryStats,
}

impl QueryResult {
    pub fn occ(&self) -> usize {
        self.range.len()
    }
}

/// Structural counts and the margins to the space bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrayStats {
    pub n: usize,
    pub pi: u32,
    pub sigma: u32,
    pub threshold: usize,
    pub nodes: usize,
    pub leaves: usize,
    pub pnodes: usize,
    pub branching_pnodes: usize,
    pub heavy_links: usize,
    pub parray_cells: usize,
    /// `floor(n / max(sigma, pi))`.
    pub branching_bound: usize,
    /// `2n`.
    pub cell_bound: usize,
}

/// PSA, PLCP, suffix tree and tray annotations of one text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsTray {
    text: PText,
    index: PsaIndex,
    tree: SuffixTree,
    ann: Annotations,
}

/// Builds the full tray for `text`. `with_rmq` enables the accelerated PSA
/// range search.
pub fn assemble(text: PText, with_rmq: bool) -> Result<PsTray, BuildError> {
    let index = build_psa(&text, with_rmq);
    let tree = build_tree(&index, &text);
    let mut ann = classify_pnodes(&tree, &text);
    let pairs = propagate_rep_pairs(&tree, &mut ann, &text);
    build_parrays(&tree, &mut ann, &text, &pairs)?;
    let tray = PsTray { text, index, tree, ann };
    debug_assert_eq!(tray.validate(), Ok(()));
    Ok(tray)
}

enum Edge {
    Mismatch,
    Exhausted,
    Arrived,
}

impl PsTray {
    pub(crate) fn from_parts(text: PText, index: PsaIndex, tree: SuffixTree, ann: Annotations) -> Self {
        PsTray { text, index, tree, ann }
    }

    pub fn text(&self) -> &PText {
        &self.text
    }

    pub fn index(&self) -> &PsaIndex {
        &self.index
    }

    pub fn tree(&self) -> &SuffixTree {
        &self.tree
    }

    pub fn annotations(&self) -> &Annotations {
        &self.ann
    }

    /// All p-match occurrences of `pattern` (canonical ids).
    pub fn query(&self, pattern: &[Symbol]) -> Result<QueryResult, QueryError> {
        let universe = self.text.universe();
        if pattern.is_empty() {
            return Err(QueryError::EmptyPattern);
        }
        if let Some(&bad) = pattern.iter().find(|&&s| !universe.contains(s)) {
            return Err(QueryError::SymbolOutOfRange(bad));
        }
        let mut stats = QueryStats::default();
        let m = pattern.len();
        if m > self.text.len() {
            return Ok(QueryResult { range: 0..0, stats });
        }
        let pp = prev(pattern, universe);
        let sp = spe(pattern, universe);
        let range = self.descend(&pp, &sp, &mut stats);
        Ok(QueryResult { range, stats })
    }

    /// Parses `raw` with the text's alphabet and queries it.
    pub fn query_raw(&self, raw: &[u8]) -> Result<QueryResult, QueryError> {
        match self.text.encode_pattern(raw)? {
            Some(p) => self.query(&p),
            None => Ok(QueryResult {
                range: 0..0,
                stats: QueryStats::default(),
            }),
        }
    }

    /// Text positions (0-based) of a result, ascending.
    pub fn positions(&self, result: &QueryResult) -> Vec<usize> {
        let mut out = self.index.report(result.range.clone()).to_vec();
        out.sort_unstable();
        out
    }

    fn descend(&self, pp: &[PrevSymbol], sp: &[Symbol], stats: &mut QueryStats) -> Range<usize> {
        let m = pp.len();
        let empty = 0..0;
        let mut v = ROOT;
        loop {
            stats.nodes_visited += 1;
            let node = self.tree.node(v);
            let d = node.depth;
            if d >= m {
                return node.range();
            }
            if let Some(parray) = self.ann.parray(v) {
                stats.parray_lookups += 1;
                let Some(c) = parray[sp[d] as usize - 1] else {
                    return empty;
                };
                debug_assert_eq!(self.tree.first_symbol(&self.text, c), pp[d]);
                if !self.ann.is_pnode[c] {
                    return self.search(self.tree.node(c).range(), pp, d + 1, stats);
                }
                match self.follow_edge(c, 1, pp, stats) {
                    Edge::Mismatch => return empty,
                    Edge::Exhausted => return self.tree.node(c).range(),
                    Edge::Arrived => v = c,
                }
            } else if let Some(h) = self.ann.heavy[v] {
                stats.symbol_comparisons += 1;
                let heavy = self.tree.node(h);
                match self.tree.first_symbol(&self.text, h).cmp(&pp[d]) {
                    Ordering::Equal => match self.follow_edge(h, 1, pp, stats) {
                        Edge::Mismatch => return empty,
                        Edge::Exhausted => return heavy.range(),
                        Edge::Arrived => v = h,
                    },
                    Ordering::Greater => return self.search(node.lo..heavy.lo, pp, d, stats),
                    Ordering::Less => return self.search(heavy.hi..node.hi, pp, d, stats),
                }
            } else {
                return self.search(node.range(), pp, d, stats);
            }
        }
    }

    /// Matches the edge into `c` from `offset` on.
    fn follow_edge(&self, c: NodeId, offset: usize, pp: &[PrevSymbol], stats: &mut QueryStats) -> Edge {
        stats.nodes_visited += 1;
        let begin = self.tree.node(c).depth - self.tree.edge_len(c);
        for off in offset..self.tree.edge_len(c) {
            let k = begin + off;
            if k == pp.len() {
                return Edge::Exhausted;
            }
            stats.symbol_comparisons += 1;
            if self.tree.edge_symbol(&self.text, c, off) != pp[k] {
                return Edge::Mismatch;
            }
        }
        if self.tree.node(c).depth == pp.len() {
            Edge::Exhausted
        } else {
            Edge::Arrived
        }
    }

    fn search(&self, range: Range<usize>, pp: &[PrevSymbol], skip: usize, stats: &mut QueryStats) -> Range<usize> {
        stats.max_range_searched = stats.max_range_searched.max(range.len());
        let mut s = SearchStats::default();
        let found = self.index.range_search(&self.text, pp, range, skip, &mut s);
        stats.symbol_comparisons += s.comparisons;
        stats.psa_probes += s.probes;
        found
    }

    /// PSA-only search over the whole suffix array, for comparison.
    pub fn query_psa_only(&self, pattern: &[Symbol]) -> Result<QueryResult, QueryError> {
        if pattern.is_empty() {
            return Err(QueryError::EmptyPattern);
        }
        let universe = self.text.universe();
        if let Some(&bad) = pattern.iter().find(|&&s| !universe.contains(s)) {
            return Err(QueryError::SymbolOutOfRange(bad));
        }
        let mut stats = QueryStats::default();
        let pp = prev(pattern, universe);
        let range = self.search(0..self.index.len(), &pp, 0, &mut stats);
        Ok(QueryResult { range, stats })
    }

    pub fn stats(&self) -> TrayStats {
        let u = self.text.universe();
        let n = self.text.len();
        TrayStats {
            n,
            pi: u.pi,
            sigma: u.sigma,
            threshold: self.ann.threshold,
            nodes: self.tree.len(),
            leaves: self.tree.nodes().iter().filter(|v| v.is_leaf()).count(),
            pnodes: self.ann.pnode_count(),
            branching_pnodes: self.ann.branching_count(),
            heavy_links: self.ann.heavy.iter().flatten().count(),
            parray_cells: self.ann.parray_cells(),
            branching_bound: n / self.ann.threshold,
            cell_bound: 2 * n,
        }
    }

    /// Checks every structural invariant of the index.
    pub fn validate(&self) -> Result<(), InvariantError> {
        self.index.validate(&self.text)?;
        self.tree.validate(&self.index, &self.text)?;
        let err = |detail: String| Err(InvariantError::new("tray", detail));
        let ann = &self.ann;
        let count = self.tree.len();
        let universe = self.text.universe();
        if ann.threshold != universe.threshold() || ann.width != universe.size() as usize {
            return err("threshold or p-array width does not match the alphabet".into());
        }
        let lens = [
            ann.is_pnode.len(),
            ann.is_branching.len(),
            ann.heavy.len(),
            ann.rep.len(),
            ann.parray_slot.len(),
        ];
        if lens.iter().any(|&l| l != count) {
            return err("annotation arrays do not match the node count".into());
        }
        let expected = classify_pnodes(&self.tree, &self.text);
        if expected.is_pnode != ann.is_pnode || expected.is_branching != ann.is_branching || expected.heavy != ann.heavy
        {
            return err("p-node classification is inconsistent with leaf counts".into());
        }
        for v in 0..count {
            let node = self.tree.node(v);
            let rep_ok = match ann.rep[v] {
                Some(i) => ann.is_pnode[v] && self.index.report(node.range()).iter().max() == Some(&i),
                None => !ann.is_pnode[v],
            };
            if !rep_ok {
                return err(format!("node {v} has a wrong representative position"));
            }
            if ann.parray_slot[v].is_some() != ann.is_branching[v] {
                return err(format!("node {v}: p-array presence differs from branching flag"));
            }
            if let Some(cells) = ann.parray_slot[v].and_then(|s| ann.pool.get(s * ann.width..(s + 1) * ann.width)) {
                for &cell in cells.iter().flatten() {
                    if self.tree.nodes().get(cell).and_then(|c| c.parent) != Some(v) {
                        return err(format!("p-array of node {v} points to non-child {cell}"));
                    }
                }
                for &c in &node.children {
                    if !cells.contains(&Some(c)) {
                        return err(format!("p-array of node {v} never reaches child {c}"));
                    }
                }
            } else if ann.parray_slot[v].is_some() {
                return err(format!("p-array of node {v} lies outside the pool"));
            }
        }
        let branching = ann.branching_count();
        if ann.pool.len() != branching * ann.width {
            return err("p-array pool size does not match the branching p-node count".into());
        }
        let n = self.text.len();
        if branching * ann.threshold > n {
            return err(format!(
                "{branching} branching p-nodes exceed n / max(sigma, pi) = {n} / {}",
                ann.threshold
            ));
        }
        if ann.pool.len() > 2 * n {
            return err(format!("{} p-array cells exceed 2n = {}", ann.pool.len(), 2 * n));
        }
        Ok(())
    }
}
