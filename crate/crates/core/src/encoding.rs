//! prev encoding, smallest parameterized encoding, f-arrays and p-functions.
//!
//! All positions and offsets in this module are 0-based.

use std::cmp::Ordering;

use crate::alphabet::{PText, Symbol, Universe};

/// One symbol of a prev-encoded string.
///
/// The derived order is the one every suffix comparison relies on: all
/// distances (numerically) come before all static symbols, and static
/// symbols are ordered by id, which puts the end-marker last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrevSymbol {
    /// Distance to the previous occurrence of a parameterized symbol, or 0
    /// for its first occurrence.
    Distance(u32),
    Static(Symbol),
}

impl PrevSymbol {
    pub fn is_static(self) -> bool {
        matches!(self, PrevSymbol::Static(_))
    }
}

/// prev encoding of `w`.
pub fn prev(w: &[Symbol], universe: Universe) -> Vec<PrevSymbol> {
    let mut last = vec![usize::MAX; universe.pi as usize + 1];
    w.iter()
        .enumerate()
        .map(|(i, &s)| {
            if universe.is_param(s) {
                let j = std::mem::replace(&mut last[s as usize], i);
                if j == usize::MAX {
                    PrevSymbol::Distance(0)
                } else {
                    PrevSymbol::Distance((i - j) as u32)
                }
            } else {
                PrevSymbol::Static(s)
            }
        })
        .collect()
}

/// Smallest parameterized encoding of `w`: the `l`-th distinct parameterized
/// symbol (by first occurrence) becomes id `l`; static symbols are kept.
pub fn spe(w: &[Symbol], universe: Universe) -> Vec<Symbol> {
    let mut rename = vec![0 as Symbol; universe.pi as usize + 1];
    let mut next = 0;
    w.iter()
        .map(|&s| {
            if !universe.is_param(s) {
                return s;
            }
            let slot = &mut rename[s as usize];
            if *slot == 0 {
                next += 1;
                *slot = next;
            }
            *slot
        })
        .collect()
}

/// `prev(T[start..])[offset]`, read off the prev encoding of the whole text.
///
/// A distance reaching back past `start` becomes a first occurrence inside
/// the window.
#[inline]
pub fn prev_char_in_window(global: &[PrevSymbol], start: usize, offset: usize) -> PrevSymbol {
    match global[start + offset] {
        PrevSymbol::Distance(d) if d as usize > offset => PrevSymbol::Distance(0),
        other => other,
    }
}

/// Whether two strings parameterized-match.
pub fn p_match(x: &[Symbol], y: &[Symbol], universe: Universe) -> bool {
    x.len() == y.len() && prev(x, universe) == prev(y, universe)
}

/// First-occurrence offsets of every parameterized symbol in one suffix.
///
/// `get(x)` is the 0-based offset of the first `x` in the suffix, `None` if
/// `x` does not occur in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FArray(Vec<Option<u32>>);

impl FArray {
    pub fn from_offsets(offsets: Vec<Option<u32>>) -> Self {
        FArray(offsets)
    }

    /// Indexed by `rank(x) - 1`.
    pub fn offsets(&self) -> &[Option<u32>] {
        &self.0
    }

    pub fn get(&self, x: Symbol) -> Option<u32> {
        self.0.get(x as usize - 1).copied().flatten()
    }
}

/// Right-to-left sweep maintaining the f-array of the current suffix.
///
/// Holds absolute text positions; a step costs O(1) and an f-array is only
/// materialized (O(pi)) when asked for.
pub struct FposSweep<'a> {
    text: &'a PText,
    first: Vec<usize>,
    pos: usize,
}

impl<'a> FposSweep<'a> {
    /// A sweep positioned before the end of the text; call [`advance`]
    /// to reach suffix `n - 1`.
    ///
    /// [`advance`]: FposSweep::advance
    pub fn new(text: &'a PText) -> Self {
        FposSweep {
            text,
            first: vec![usize::MAX; text.universe().pi as usize],
            pos: text.len(),
        }
    }

    /// Moves to the next suffix to the left and returns its start, or
    /// `None` when the whole text has been swept.
    pub fn advance(&mut self) -> Option<usize> {
        if self.pos == 0 {
            return None;
        }
        self.pos -= 1;
        let s = self.text.symbols()[self.pos];
        if self.text.universe().is_param(s) {
            self.first[s as usize - 1] = self.pos;
        }
        Some(self.pos)
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    /// First-occurrence offset of `x` in the current suffix.
    pub fn offset(&self, x: Symbol) -> Option<u32> {
        match self.first[x as usize - 1] {
            usize::MAX => None,
            abs => Some((abs - self.pos) as u32),
        }
    }

    pub fn farray(&self) -> FArray {
        FArray((1..=self.first.len() as Symbol).map(|x| self.offset(x)).collect())
    }
}

/// `(i, fpos(T[i..]))` for `i = n - 1` down to `0`.
pub fn fpos_stream(text: &PText) -> impl Iterator<Item = (usize, FArray)> + '_ {
    let mut sweep = FposSweep::new(text);
    std::iter::from_fn(move || sweep.advance().map(|i| (i, sweep.farray())))
}

/// A renaming of parameterized symbols, identity on static symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFunction {
    /// `map[x - 1]` is the image of parameterized symbol `x`.
    map: Vec<Option<Symbol>>,
}

impl PFunction {
    pub fn empty(universe: Universe) -> Self {
        PFunction {
            map: vec![None; universe.pi as usize],
        }
    }

    pub(crate) fn set(&mut self, x: Symbol, image: Symbol) {
        self.map[x as usize - 1] = Some(image);
    }

    /// Image of `s`: static symbols map to themselves, parameterized symbols
    /// outside the domain to `None`.
    pub fn apply(&self, s: Symbol) -> Option<Symbol> {
        match self.map.get((s as usize).wrapping_sub(1)) {
            Some(image) => *image,
            None => Some(s),
        }
    }

    /// Number of parameterized symbols in the domain.
    pub fn domain_len(&self) -> usize {
        self.map.iter().filter(|m| m.is_some()).count()
    }

    /// The p-function taking `q` to `r`, if they p-match.
    pub fn between(q: &[Symbol], r: &[Symbol], universe: Universe) -> Option<Self> {
        if !p_match(q, r, universe) {
            return None;
        }
        let mut f = PFunction::empty(universe);
        for (&a, &b) in q.iter().zip(r) {
            if universe.is_param(a) {
                f.set(a, b);
            }
        }
        Some(f)
    }
}

/// `f_{v, spe(v)}` for the window `v = T[i..i + limit]`, given the f-array
/// of `T[i..]`.
///
/// The parameterized symbols of `v` are exactly those with first-occurrence
/// offset below `limit`; ordering them by that offset, the `l`-th maps to
/// canonical id `l`.
pub fn pfunction_from_fpos(text: &PText, limit: usize, farr: &FArray) -> PFunction {
    let universe = text.universe();
    let mut present: Vec<(u32, Symbol)> = farr
        .offsets()
        .iter()
        .enumerate()
        .filter_map(|(k, off)| off.filter(|&o| (o as usize) < limit).map(|o| (o, k as Symbol + 1)))
        .collect();
    present.sort_unstable();
    let mut f = PFunction::empty(universe);
    for (l, &(_, x)) in present.iter().enumerate() {
        f.set(x, l as Symbol + 1);
    }
    f
}

/// Compares a prev-encoded suffix of the text against `pattern`, starting at
/// offset `from` (the caller knows the first `from` symbols agree).
///
/// Returns the ordering of the suffix's length-`m` prefix relative to the
/// pattern and the number of agreeing leading symbols. A suffix that runs
/// out before the pattern does is smaller. `comparisons` counts symbol
/// comparisons performed.
pub(crate) fn compare_suffix(
    text: &PText,
    start: usize,
    pattern: &[PrevSymbol],
    from: usize,
    comparisons: &mut u64,
) -> (Ordering, usize) {
    let len = text.suffix_len(start);
    let mut k = from;
    while k < pattern.len() {
        if k >= len {
            return (Ordering::Less, k);
        }
        *comparisons += 1;
        match text.prev_at(start, k).cmp(&pattern[k]) {
            Ordering::Equal => k += 1,
            ord => return (ord, k),
        }
    }
    (Ordering::Equal, k)
}
