//! Brute-force reference implementations.
//!
//! Everything here is a direct transcription of a definition and must not
//! call into the optimized code paths (`encoding`, `psa`, `tray`); tests use
//! these functions to check those paths.

use thiserror::Error;

use crate::alphabet::{PText, Symbol, Universe};
use crate::encoding::PrevSymbol;
use crate::tree::{NodeId, SuffixTree};

/// Largest number of distinct parameterized symbols [`naive_spe`] accepts.
pub const MAX_SPE_PARAMS: usize = 8;
/// Largest text [`naive_psa`] accepts.
pub const MAX_PSA_LEN: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle capacity exceeded: {0}")]
    Capacity(String),
}

/// prev encoding by scanning back from every position.
pub fn naive_prev(w: &[Symbol], universe: Universe) -> Vec<PrevSymbol> {
    (0..w.len()).map(|i| naive_prev_symbol(w, 0, i, universe)).collect()
}

/// `prev(w[from..])[i - from]`.
fn naive_prev_symbol(w: &[Symbol], from: usize, i: usize, universe: Universe) -> PrevSymbol {
    if !universe.is_param(w[i]) {
        return PrevSymbol::Static(w[i]);
    }
    match (from..i).rev().find(|&j| w[j] == w[i]) {
        Some(j) => PrevSymbol::Distance((i - j) as u32),
        None => PrevSymbol::Distance(0),
    }
}

/// Whether a bijection fixing static symbols maps `x` onto `y`.
pub fn naive_p_match(x: &[Symbol], y: &[Symbol], universe: Universe) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut forward = std::collections::HashMap::new();
    let mut backward = std::collections::HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        if universe.is_param(a) != universe.is_param(b) {
            return false;
        }
        if !universe.is_param(a) {
            if a != b {
                return false;
            }
            continue;
        }
        if *forward.entry(a).or_insert(b) != b || *backward.entry(b).or_insert(a) != a {
            return false;
        }
    }
    true
}

/// All 0-based positions `i` with `T[i..i + m]` p-matching `pattern`,
/// ascending.
pub fn naive_ppm(text: &PText, pattern: &[Symbol]) -> Vec<usize> {
    let universe = text.universe();
    let t = text.symbols();
    let m = pattern.len();
    if m == 0 || m > t.len() {
        return Vec::new();
    }
    let target = naive_prev(pattern, universe);
    (0..=t.len() - m)
        .filter(|&i| (0..m).all(|k| naive_prev_symbol(t, i, i + k, universe) == target[k]))
        .collect()
}

/// Lexicographically smallest p-string p-matching `w`, by trying every
/// renaming of its parameterized symbols.
///
/// Only bijections onto `1..=k` (k = number of distinct parameterized
/// symbols) are enumerated: any injective renaming using a larger id is
/// beaten by compressing its image order-preservingly onto `1..=k`.
pub fn naive_spe(w: &[Symbol], universe: Universe) -> Result<Vec<Symbol>, OracleError> {
    let mut distinct: Vec<Symbol> = w.iter().copied().filter(|&s| universe.is_param(s)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() > MAX_SPE_PARAMS {
        return Err(OracleError::Capacity(format!(
            "{} distinct parameterized symbols (max {MAX_SPE_PARAMS})",
            distinct.len()
        )));
    }
    let mut images: Vec<Symbol> = (1..=distinct.len() as Symbol).collect();
    let mut best: Option<Vec<Symbol>> = None;
    permute(&mut images, 0, &mut |perm| {
        let renamed: Vec<Symbol> = w
            .iter()
            .map(|&s| match distinct.binary_search(&s) {
                Ok(k) if universe.is_param(s) => perm[k],
                _ => s,
            })
            .collect();
        if best.as_ref().is_none_or(|b| renamed < *b) {
            best = Some(renamed);
        }
    });
    Ok(best.unwrap_or_default())
}

fn permute(items: &mut [Symbol], k: usize, visit: &mut impl FnMut(&[Symbol])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// PSA and PLCP by materializing and sorting every prev-encoded suffix.
pub fn naive_psa(text: &PText) -> Result<(Vec<usize>, Vec<usize>), OracleError> {
    let t = text.symbols();
    if t.len() > MAX_PSA_LEN {
        return Err(OracleError::Capacity(format!(
            "text of length {} (max {MAX_PSA_LEN})",
            t.len()
        )));
    }
    let suffixes: Vec<Vec<PrevSymbol>> = (0..t.len()).map(|i| naive_prev(&t[i..], text.universe())).collect();
    let mut psa: Vec<usize> = (0..t.len()).collect();
    psa.sort_by(|&a, &b| suffixes[a].cmp(&suffixes[b]));
    let mut plcp = vec![0; t.len()];
    for i in 1..t.len() {
        let (a, b) = (&suffixes[psa[i - 1]], &suffixes[psa[i]]);
        plcp[i] = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    }
    Ok((psa, plcp))
}

/// 0-based first-occurrence offsets of each parameterized symbol in `suffix`.
pub fn naive_fpos(suffix: &[Symbol], universe: Universe) -> Vec<Option<u32>> {
    (1..=universe.pi)
        .map(|x| suffix.iter().position(|&s| s == x).map(|o| o as u32))
        .collect()
}

/// p-array of `node` straight from its definition: entry `rank(x)` is the
/// child whose label has `prev(spe(v) x)` as a prefix.
pub fn naive_parray(tree: &SuffixTree, text: &PText, node: NodeId) -> Result<Vec<Option<NodeId>>, OracleError> {
    let universe = text.universe();
    let t = text.symbols();
    let v = tree.node(node);
    let label = &t[v.suffix_start..v.suffix_start + v.depth];
    let base = naive_spe(label, universe)?;
    let child_labels: Vec<(NodeId, Vec<PrevSymbol>)> = v
        .children
        .iter()
        .map(|&c| {
            let c_node = tree.node(c);
            let full = naive_prev(&t[c_node.suffix_start..c_node.suffix_start + c_node.depth], universe);
            (c, full)
        })
        .collect();
    Ok((1..=universe.size())
        .map(|x| {
            let mut extended = base.clone();
            extended.push(x);
            let wanted = naive_prev(&extended, universe);
            child_labels
                .iter()
                .find(|(_, label)| label.starts_with(&wanted))
                .map(|&(c, _)| c)
        })
        .collect())
}
