//! Parameterized suffix array, its LCP array, and range search.

use std::cmp::Ordering;
use std::ops::Range;

use crate::alphabet::PText;
use crate::encoding::{compare_suffix, PrevSymbol};
use crate::error::InvariantError;
use crate::rmq::SparseTable;

/// Counters filled in by [`PsaIndex::range_search`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub comparisons: u64,
    pub probes: u64,
}

/// Which binary search [`PsaIndex::range_search_with`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every probe compares from the caller's `skip` offset.
    Plain,
    /// Probes reuse known prefix lengths via the PLCP range-minimum table.
    Accelerated,
}

/// `psa[i]` is the start of the `i`-th smallest prev-encoded suffix;
/// `plcp[i]` is the length of its longest common prefix with suffix
/// `psa[i - 1]` (`plcp[0] = 0`). Everything is 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsaIndex {
    psa: Vec<usize>,
    plcp: Vec<usize>,
    rmq: Option<SparseTable>,
}

fn compare_suffixes(text: &PText, a: usize, b: usize) -> (Ordering, usize) {
    let limit = text.suffix_len(a).min(text.suffix_len(b));
    for k in 0..limit {
        match text.prev_at(a, k).cmp(&text.prev_at(b, k)) {
            Ordering::Equal => {}
            ord => return (ord, k),
        }
    }
    (text.suffix_len(a).cmp(&text.suffix_len(b)), limit)
}

/// Sorts all suffixes of `text` by their prev encodings.
pub fn build_psa(text: &PText, with_rmq: bool) -> PsaIndex {
    let mut psa: Vec<usize> = (0..text.len()).collect();
    psa.sort_unstable_by(|&a, &b| compare_suffixes(text, a, b).0);
    let mut plcp = vec![0; psa.len()];
    for i in 1..psa.len() {
        plcp[i] = compare_suffixes(text, psa[i - 1], psa[i]).1;
    }
    PsaIndex::from_parts(psa, plcp, with_rmq)
}

impl PsaIndex {
    pub fn from_parts(psa: Vec<usize>, plcp: Vec<usize>, with_rmq: bool) -> Self {
        let rmq = with_rmq.then(|| SparseTable::new(&plcp));
        PsaIndex { psa, plcp, rmq }
    }

    pub fn len(&self) -> usize {
        self.psa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psa.is_empty()
    }

    pub fn psa(&self) -> &[usize] {
        &self.psa
    }

    pub fn plcp(&self) -> &[usize] {
        &self.plcp
    }

    pub fn has_rmq(&self) -> bool {
        self.rmq.is_some()
    }

    /// LCP of suffixes `psa[a]` and `psa[b]`, `a < b`.
    pub fn lcp_between(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b);
        match &self.rmq {
            Some(rmq) => rmq.min(a + 1, b),
            None => self.plcp[a + 1..=b].iter().copied().min().unwrap_or(0),
        }
    }

    /// Text positions of the suffixes in `range`, in PSA order.
    pub fn report(&self, range: Range<usize>) -> &[usize] {
        &self.psa[range]
    }

    /// Maximal subrange of `range` whose suffixes start with `pattern`.
    ///
    /// Every suffix in `range` must agree with `pattern` on its first `skip`
    /// symbols. Uses the accelerated search when the range-minimum table
    /// was built.
    pub fn range_search(
        &self,
        text: &PText,
        pattern: &[PrevSymbol],
        range: Range<usize>,
        skip: usize,
        stats: &mut SearchStats,
    ) -> Range<usize> {
        let mode = if self.has_rmq() {
            SearchMode::Accelerated
        } else {
            SearchMode::Plain
        };
        self.range_search_with(mode, text, pattern, range, skip, stats)
    }

    pub fn range_search_with(
        &self,
        mode: SearchMode,
        text: &PText,
        pattern: &[PrevSymbol],
        range: Range<usize>,
        skip: usize,
        stats: &mut SearchStats,
    ) -> Range<usize> {
        let Range { start: lo, end: hi } = range;
        assert!(hi <= self.len(), "range {lo}..{hi} exceeds the suffix array");
        if lo >= hi {
            return lo..lo;
        }
        let m = pattern.len();
        if skip >= m {
            return lo..hi;
        }
        #[cfg(debug_assertions)]
        for &start in &self.psa[lo..hi] {
            let agree = (0..skip).all(|k| k < text.suffix_len(start) && text.prev_at(start, k) == pattern[k]);
            debug_assert!(agree, "suffix {start} disagrees with the pattern within skip={skip}");
        }
        let accelerated = mode == SearchMode::Accelerated;
        let (first, lcp) = self.bound(
            text,
            pattern,
            lo..hi,
            None,
            skip,
            accelerated,
            |o| o == Ordering::Less,
            stats,
        );
        if lcp != Some(m) {
            return first..first;
        }
        let (end, _) = self.bound(
            text,
            pattern,
            first..hi,
            Some(m),
            skip,
            accelerated,
            |o| o != Ordering::Greater,
            stats,
        );
        first..end
    }

    /// First index in `range` whose suffix goes right of the pattern under
    /// `goes_left`, with the suffix's known agreement length (if it is a
    /// real index).
    ///
    /// With `left = Some(lcp)`, `range.start` is itself a known left
    /// boundary agreeing on `lcp` symbols; otherwise the left boundary is
    /// the virtual slot before `range.start`.
    #[allow(clippy::too_many_arguments)]
    fn bound(
        &self,
        text: &PText,
        pattern: &[PrevSymbol],
        range: Range<usize>,
        left: Option<usize>,
        skip: usize,
        accelerated: bool,
        goes_left: impl Fn(Ordering) -> bool,
        stats: &mut SearchStats,
    ) -> (usize, Option<usize>) {
        let (mut l, mut lcp_l, mut l_real) = match left {
            Some(lcp) => (range.start as isize, lcp, true),
            None => (range.start as isize - 1, skip, false),
        };
        let (mut r, mut lcp_r, mut r_real) = (range.end as isize, skip, false);
        while r - l > 1 {
            let mid = ((l + r) / 2) as usize;
            stats.probes += 1;
            let mut compare_from = |from: usize| {
                let (ord, h) = compare_suffix(text, self.psa[mid], pattern, from, &mut stats.comparisons);
                (goes_left(ord), h)
            };
            let (to_left, h) = if !accelerated {
                compare_from(skip)
            } else if lcp_l >= lcp_r {
                let x = if l_real {
                    self.lcp_between(l as usize, mid)
                } else {
                    lcp_l
                };
                match x.cmp(&lcp_l) {
                    Ordering::Greater => (true, lcp_l),
                    Ordering::Less => (false, x),
                    Ordering::Equal => compare_from(lcp_l),
                }
            } else {
                let x = if r_real {
                    self.lcp_between(mid, r as usize)
                } else {
                    lcp_r
                };
                match x.cmp(&lcp_r) {
                    Ordering::Greater => (false, lcp_r),
                    Ordering::Less => (true, x),
                    Ordering::Equal => compare_from(lcp_r),
                }
            };
            if to_left {
                (l, lcp_l, l_real) = (mid as isize, h, true);
            } else {
                (r, lcp_r, r_real) = (mid as isize, h, true);
            }
        }
        (r as usize, r_real.then_some(lcp_r))
    }

    /// Checks the permutation, sortedness and PLCP invariants.
    pub fn validate(&self, text: &PText) -> Result<(), InvariantError> {
        let n = text.len();
        if self.psa.len() != n || self.plcp.len() != n {
            return Err(InvariantError::new(
                "psa",
                format!(
                    "lengths {} / {} for a text of length {n}",
                    self.psa.len(),
                    self.plcp.len()
                ),
            ));
        }
        let mut seen = vec![false; n];
        for &p in &self.psa {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(InvariantError::new("psa", format!("not a permutation (entry {p})")));
            }
        }
        if n > 0 && self.plcp[0] != 0 {
            return Err(InvariantError::new("plcp", "first entry is not 0"));
        }
        for i in 1..n {
            let (ord, lcp) = compare_suffixes(text, self.psa[i - 1], self.psa[i]);
            if ord != Ordering::Less {
                return Err(InvariantError::new(
                    "psa",
                    format!("rows {} and {i} out of order", i - 1),
                ));
            }
            if lcp != self.plcp[i] {
                return Err(InvariantError::new(
                    "plcp",
                    format!("row {i} stores {} but the suffixes share {lcp}", self.plcp[i]),
                ));
            }
        }
        if let Some(rmq) = &self.rmq {
            if *rmq != SparseTable::new(&self.plcp) {
                return Err(InvariantError::new("rmq", "table does not match plcp"));
            }
        }
        Ok(())
    }
}
