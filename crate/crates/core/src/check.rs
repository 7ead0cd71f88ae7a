//! Randomized oracle-equivalence checks shared by the test suites and the
//! `self-check` command.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alphabet::Symbol;
use crate::oracle::{naive_parray, naive_ppm};
use crate::tray::{PsTray, QueryStats};

/// Random pattern over the text's symbols (end-marker excluded): half are
/// text windows under a random renaming of parameterized symbols, a third
/// of those with one symbol replaced; the rest are uniform random strings.
pub fn random_pattern<R: Rng + ?Sized>(rng: &mut R, tray: &PsTray, max_len: usize) -> Vec<Symbol> {
    let text = tray.text();
    let universe = text.universe();
    let body = &text.symbols()[..text.len() - 1];
    let alphabet = universe.size() - 1;
    let max_len = max_len.max(1);
    if rng.gen_bool(0.5) {
        let start = rng.gen_range(0..body.len());
        let len = rng.gen_range(1..=max_len.min(body.len() - start));
        let mut rename: Vec<Symbol> = (1..=universe.pi).collect();
        rename.shuffle(rng);
        let mut window: Vec<Symbol> = body[start..start + len]
            .iter()
            .map(|&s| {
                if universe.is_param(s) {
                    rename[s as usize - 1]
                } else {
                    s
                }
            })
            .collect();
        if rng.gen_ratio(1, 3) {
            let k = rng.gen_range(0..window.len());
            window[k] = rng.gen_range(1..=alphabet);
        }
        window
    } else {
        let len = rng.gen_range(1..=max_len);
        (0..len).map(|_| rng.gen_range(1..=alphabet)).collect()
    }
}

/// Exclusive ceiling on the PSA range any query may binary-search:
/// `(sigma + pi + 1) * max(sigma, pi)`.
pub fn range_ceiling(tray: &PsTray) -> usize {
    let u = tray.text().universe();
    (u.size() as usize + 1) * u.threshold()
}

/// Compares every branching p-node's p-array with the definitional one.
/// Returns the number of nodes checked, or a description of the first
/// mismatch.
pub fn check_parrays(tray: &PsTray) -> Result<usize, String> {
    let ann = tray.annotations();
    let mut checked = 0;
    for v in (0..tray.tree().len()).filter(|&v| ann.is_branching(v)) {
        let expected = naive_parray(tray.tree(), tray.text(), v).map_err(|e| e.to_string())?;
        let actual = ann.parray(v).expect("branching p-nodes carry a p-array");
        if actual != expected.as_slice() {
            return Err(format!("node {v}: p-array {actual:?}, oracle {expected:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelfCheckReport {
    pub trials: usize,
    pub total_occurrences: usize,
    pub query_mismatches: usize,
    pub range_violations: usize,
    pub first_failure: Option<String>,
}

impl SelfCheckReport {
    pub fn passed(&self) -> bool {
        self.query_mismatches == 0 && self.range_violations == 0
    }
}

/// Runs `trials` random queries, comparing each with [`naive_ppm`] and
/// checking the range-size ceiling.
pub fn self_check<R: Rng + ?Sized>(tray: &PsTray, trials: usize, max_len: usize, rng: &mut R) -> SelfCheckReport {
    let mut report = SelfCheckReport::default();
    let ceiling = range_ceiling(tray);
    for _ in 0..trials {
        let pattern = random_pattern(rng, tray, max_len);
        let result = tray.query(&pattern).expect("generated patterns are valid");
        let got = tray.positions(&result);
        let want = naive_ppm(tray.text(), &pattern);
        report.trials += 1;
        report.total_occurrences += want.len();
        let QueryStats { max_range_searched, .. } = result.stats;
        if got != want {
            report.query_mismatches += 1;
            report.first_failure.get_or_insert_with(|| {
                format!(
                    "pattern {:?}: index {:?}, oracle {:?}",
                    tray.text().render(&pattern),
                    got,
                    want
                )
            });
        }
        if max_range_searched >= ceiling {
            report.range_violations += 1;
            report.first_failure.get_or_insert_with(|| {
                format!(
                    "pattern {:?}: searched a PSA range of {max_range_searched} (ceiling {ceiling})",
                    tray.text().render(&pattern)
                )
            });
        }
    }
    report
}
