//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Thresholds are the constants below.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pstray::check::{check_parrays, random_pattern, range_ceiling};
use pstray::encoding::{fpos_stream, pfunction_from_fpos, prev_char_in_window};
use pstray::io::to_bytes;
use pstray::oracle::{naive_fpos, naive_p_match, naive_parray, naive_ppm, naive_prev, naive_spe};
use pstray::tray::fill_parray;
use pstray::{assemble, ingest, load, prev, save, spe, AlphabetSpec, PText, PrevSymbol, PsTray, Symbol, Universe};

const GOLDEN_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_TEXTS: usize = 250;
const PATTERNS_PER_TEXT: usize = 40;
const MAX_N: usize = 2000;
const MAX_M: usize = 50;
const RANDOM_PARRAY_TEXTS: usize = 1000;
const RANDOM_PARRAY_MAX_N: usize = 300;
const EXHAUSTIVE_LEN: usize = 6;
const PAIRWISE_LEN: usize = 5;
const BATTERY: usize = 100;

type Outcome = Result<String, String>;
type Criterion = Box<dyn FnOnce(&mut CostLedger) -> Outcome>;

fn main() {
    let mut failed = 0;
    let mut cost = CostLedger::default();
    let criteria: [(&str, Criterion); 7] = [
        ("golden vectors", Box::new(criterion_goldens)),
        ("oracle equivalence", Box::new(criterion_oracle)),
        ("structural bounds", Box::new(criterion_structure)),
        (
            "p-array pipeline vs oracle",
            Box::new(|_: &mut CostLedger| criterion_parrays()),
        ),
        ("encoding laws", Box::new(|_: &mut CostLedger| criterion_encoding())),
        ("query-cost instrumentation", Box::new(criterion_cost)),
        (
            "serialization",
            Box::new(|_: &mut CostLedger| criterion_serialization()),
        ),
    ];
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let outcome = run(&mut cost);
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} [{secs:.2} s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} [{secs:.2} s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

/// Instrumentation gathered by criteria 1 and 2 and judged by criterion 6,
/// plus the indexes built along the way for criterion 3.
#[derive(Default)]
struct CostLedger {
    queries: usize,
    rmq_queries: usize,
    range_violations: Vec<String>,
    comparison_violations: Vec<String>,
    worst_slack: Option<f64>,
    structure_checked: usize,
    structure_violations: Vec<String>,
}

impl CostLedger {
    fn record(&mut self, tray: &PsTray, pattern: &[Symbol], stats: &pstray::QueryResult) {
        self.queries += 1;
        let ceiling = range_ceiling(tray);
        let s = stats.stats;
        if s.max_range_searched >= ceiling {
            self.range_violations.push(format!(
                "range {} >= ceiling {ceiling} for {:?}",
                s.max_range_searched,
                tray.text().render(pattern)
            ));
        }
        if tray.index().has_rmq() {
            self.rmq_queries += 1;
            let n = tray.text().len() as f64;
            let envelope = 4.0 * (pattern.len() as f64 + n.log2()) + stats.occ() as f64;
            let used = s.symbol_comparisons as f64;
            if used > envelope {
                self.comparison_violations.push(format!(
                    "{used} comparisons > {envelope:.1} for m={} n={n} occ={}",
                    pattern.len(),
                    stats.occ()
                ));
            }
            let slack = envelope - used;
            self.worst_slack = Some(self.worst_slack.map_or(slack, |w| w.min(slack)));
        }
    }

    fn inspect(&mut self, tray: &PsTray) {
        self.structure_checked += 1;
        if let Some(v) = structure_violation(tray) {
            if self.structure_violations.len() < 5 {
                self.structure_violations.push(v);
            }
        }
    }
}

fn byte_text(raw: &[u8], pi: &str, sigma: &str) -> PText {
    ingest(raw, &AlphabetSpec::bytes(pi, sigma).unwrap()).unwrap()
}

fn render_prev(p: &[PrevSymbol], names: impl Fn(Symbol) -> char) -> String {
    p.iter()
        .map(|s| match *s {
            PrevSymbol::Distance(d) => char::from_digit(d, 36).unwrap(),
            PrevSymbol::Static(c) => names(c),
        })
        .collect()
}

fn node_label(tray: &PsTray, v: usize) -> String {
    let text = tray.text();
    let node = tray.tree().node(v);
    let window = &text.symbols()[node.suffix_start..node.suffix_start + node.depth];
    render_prev(&prev(window, text.universe()), |c| {
        String::from_utf8_lossy(text.alphabet().token(c).unwrap())
            .chars()
            .next()
            .unwrap()
    })
}

fn one_based(positions: Vec<usize>) -> Vec<usize> {
    positions.into_iter().map(|p| p + 1).collect()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn criterion_goldens(cost: &mut CostLedger) -> Outcome {
    let started = Instant::now();
    // x y z A B over one universe; the end-marker is 6.
    let u = Universe::new(3, 3);
    let ids = |s: &str| -> Vec<Symbol> {
        s.bytes()
            .map(|b| match b {
                b'x' => 1,
                b'y' => 2,
                b'z' => 3,
                b'A' => 4,
                _ => 5,
            })
            .collect()
    };
    let names = |c: Symbol| if c == 4 { 'A' } else { 'B' };
    let letters = |w: &[Symbol]| -> String { w.iter().map(|&c| b"xyzAB"[c as usize - 1] as char).collect() };
    for w in ["yxzAyyyBxzz", "zxyAzzzBxyy"] {
        let got = render_prev(&prev(&ids(w), u), names);
        ensure(got == "000A411B771", || format!("prev({w}) = {got}"))?;
        let got = letters(&spe(&ids(w), u));
        ensure(got == "xyzAxxxByzz", || format!("spe({w}) = {got}"))?;
    }

    let sample = byte_text(b"zAxAyyxyAxxy", "xyz", "A");
    for rmq in [true, false] {
        let tray = assemble(sample.clone(), rmq).map_err(|e| e.to_string())?;
        cost.inspect(&tray);
        let psa = one_based(tray.index().psa().to_vec());
        ensure(psa == [6, 7, 11, 5, 10, 3, 8, 1, 12, 4, 9, 2, 13], || {
            format!("PSA {psa:?}")
        })?;
        let plcp = tray.index().plcp();
        ensure(plcp == [0, 2, 2, 1, 3, 1, 5, 3, 1, 0, 4, 2, 0], || {
            format!("PLCP {plcp:?}")
        })?;

        let ann = tray.annotations();
        let mut pnodes: Vec<String> = (0..tray.tree().len())
            .filter(|&v| ann.is_pnode(v))
            .map(|v| node_label(&tray, v))
            .collect();
        pnodes.sort();
        ensure(pnodes == ["", "0", "00", "0A0", "A0"], || format!("p-nodes {pnodes:?}"))?;
        let mut branching: Vec<String> = (0..tray.tree().len())
            .filter(|&v| ann.is_branching(v))
            .map(|v| node_label(&tray, v))
            .collect();
        branching.sort();
        ensure(branching == ["", "0"], || format!("branching p-nodes {branching:?}"))?;

        // Node 0A0 with v = zAx at text position 0: spe(v) = xAy, so the
        // child continuing with distance 1 is reached through rank(y) = 2.
        let node = (0..tray.tree().len())
            .find(|&v| node_label(&tray, v) == "0A0")
            .ok_or("no node 0A0")?;
        let (_, farr) = fpos_stream(tray.text()).find(|&(i, _)| i == 0).unwrap();
        let f = pfunction_from_fpos(tray.text(), 3, &farr);
        let (x, y, z) = (1, 2, 3);
        ensure(
            f.apply(z) == Some(x) && f.apply(x) == Some(y) && f.apply(y).is_none(),
            || format!("f_(zAx, xAy) = {f:?}"),
        )?;
        let cells = fill_parray(tray.tree(), tray.text(), node, 0, &f).map_err(|e| e.to_string())?;
        let via_y = cells[1].ok_or("p-array(0A0)[rank(y)] is empty")?;
        let label = node_label(&tray, via_y);
        ensure(label.starts_with("0A01"), || {
            format!("p-array(0A0)[rank(y)] leads to {label}")
        })?;
        let oracle = naive_parray(tray.tree(), tray.text(), node).map_err(|e| e.to_string())?;
        ensure(cells == oracle, || format!("p-array(0A0) {cells:?}, oracle {oracle:?}"))?;

        let q = tray.query_raw(b"xAyy").map_err(|e| e.to_string())?;
        ensure(one_based(tray.positions(&q)) == [3, 8], || "xAyy".into())?;
        cost.record(&tray, &sample.encode_pattern(b"xAyy").unwrap().unwrap(), &q);
    }

    let clones = byte_text(b"xyzAxxxAyyzAzx", "xyz", "A");
    for rmq in [true, false] {
        let tray = assemble(clones.clone(), rmq).map_err(|e| e.to_string())?;
        cost.inspect(&tray);
        let q = tray.query_raw(b"yAzz").map_err(|e| e.to_string())?;
        let got = one_based(tray.positions(&q));
        ensure(got == [3, 7], || format!("PPM(yAzz) = {got:?}"))?;
        cost.record(&tray, &clones.encode_pattern(b"yAzz").unwrap().unwrap(), &q);
    }

    let elapsed = started.elapsed();
    ensure(elapsed < GOLDEN_BUDGET, || format!("took {elapsed:?}"))?;
    Ok("prev/spe, PSA/PLCP, p-node sets, 0A0 p-array, occurrences {3,7}".into())
}

fn random_text(rng: &mut ChaCha8Rng, max_n: usize, pi_range: (usize, usize)) -> PText {
    let pi = rng.gen_range(pi_range.0..=pi_range.1);
    let sigma = rng.gen_range(1..=4);
    let letters: Vec<u8> = b"uvwxyz"[..pi].iter().chain(&b"ABCD"[..sigma]).copied().collect();
    let n = if rng.gen_bool(0.25) {
        rng.gen_range(1..=50.min(max_n))
    } else {
        rng.gen_range(1..=max_n)
    };
    let raw: Vec<u8> = (0..n).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
    let pi_str = std::str::from_utf8(&b"uvwxyz"[..pi]).unwrap();
    let sigma_str = std::str::from_utf8(&b"ABCD"[..sigma]).unwrap();
    byte_text(&raw, pi_str, sigma_str)
}

fn criterion_oracle(cost: &mut CostLedger) -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut trials = 0;
    let mut occurrences = 0;
    let mut mismatches = Vec::new();
    for t in 0..ORACLE_TEXTS {
        let text = random_text(&mut rng, MAX_N, (0, 6));
        let tray = assemble(text, t % 4 != 3).map_err(|e| e.to_string())?;
        cost.inspect(&tray);
        for _ in 0..PATTERNS_PER_TEXT {
            let pattern = random_pattern(&mut rng, &tray, MAX_M);
            let result = tray.query(&pattern).map_err(|e| e.to_string())?;
            let got = tray.positions(&result);
            let want = naive_ppm(tray.text(), &pattern);
            trials += 1;
            occurrences += want.len();
            if got != want && mismatches.len() < 3 {
                mismatches.push(format!("{:?}: {got:?} vs {want:?}", tray.text().render(&pattern)));
            }
            cost.record(&tray, &pattern, &result);
        }
    }
    let elapsed = started.elapsed();
    ensure(mismatches.is_empty(), || format!("mismatches: {mismatches:?}"))?;
    ensure(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{trials} trials, {occurrences} occurrences, 0 mismatches"))
}

/// First violated structural property, checked independently of
/// `validate` except where noted.
fn structure_violation(tray: &PsTray) -> Option<String> {
    if let Err(e) = tray.validate() {
        return Some(format!("validate: {e}"));
    }
    let text = tray.text();
    let n = text.len();
    let t = text.universe().threshold();
    let ann = tray.annotations();
    if ann.branching_count() * t > n {
        return Some(format!("{} branching p-nodes > {n}/{t}", ann.branching_count()));
    }
    if ann.parray_cells() > 2 * n {
        return Some(format!("{} p-array cells > 2*{n}", ann.parray_cells()));
    }
    let psa = tray.index().psa();
    let mut sorted = psa.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Some("PSA is not a permutation".into());
    }
    for w in psa.windows(2) {
        let (a, b) = (w[0], w[1]);
        let common = text.suffix_len(a).min(text.suffix_len(b));
        let order = (0..common)
            .map(|k| text.prev_at(a, k).cmp(&text.prev_at(b, k)))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| text.suffix_len(a).cmp(&text.suffix_len(b)));
        if order.is_ge() {
            return Some(format!("suffixes {a} and {b} out of order"));
        }
    }
    for (v, node) in tray.tree().nodes().iter().enumerate() {
        if node.children.is_empty() {
            if node.hi - node.lo != 1 {
                return Some(format!("leaf {v} covers {:?}", node.range()));
            }
            continue;
        }
        let mut ranges: Vec<_> = node.children.iter().map(|&c| tray.tree().node(c).range()).collect();
        ranges.sort_by_key(|r| r.start);
        let contiguous = ranges.windows(2).all(|w| w[0].end == w[1].start);
        if !contiguous || ranges[0].start != node.lo || ranges.last().unwrap().end != node.hi {
            return Some(format!("children of {v} do not partition {:?}", node.range()));
        }
    }
    None
}

fn criterion_structure(cost: &mut CostLedger) -> Outcome {
    ensure(cost.structure_checked > 0, || "no indexes were built".into())?;
    ensure(cost.structure_violations.is_empty(), || {
        format!("{:?}", cost.structure_violations)
    })?;
    Ok(format!("{} indexes, 0 violations", cost.structure_checked))
}

/// All strings of length `len` over ids `1..=k`, in lexicographic order.
fn all_strings(k: Symbol, len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=k).map(move |c| {
                    let mut next = w.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out
}

fn parray_check(text: PText) -> Result<usize, String> {
    let tray = assemble(text, false).map_err(|e| e.to_string())?;
    check_parrays(&tray)
}

fn criterion_parrays() -> Outcome {
    let mut texts = 0;
    let mut nodes = 0;
    for len in 1..=EXHAUSTIVE_LEN {
        for w in all_strings(5, len) {
            let raw: Vec<u8> = w.iter().map(|&c| b"xyzAB"[c as usize - 1]).collect();
            nodes += parray_check(byte_text(&raw, "xyz", "AB"))?;
            texts += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for _ in 0..RANDOM_PARRAY_TEXTS {
        nodes += parray_check(random_text(&mut rng, RANDOM_PARRAY_MAX_N, (1, 6)))?;
        texts += 1;
    }
    Ok(format!("{texts} texts, {nodes} branching p-nodes, 0 mismatches"))
}

fn criterion_encoding() -> Outcome {
    let u = Universe::new(3, 3);
    let mut strings = 0;
    let mut pairs = 0u64;
    for len in 1..=EXHAUSTIVE_LEN {
        let words = all_strings(5, len);
        strings += words.len();
        let mut classes: HashMap<Vec<PrevSymbol>, (Vec<Symbol>, Vec<Symbol>)> = HashMap::new();
        for w in &words {
            let p = prev(w, u);
            let s = spe(w, u);
            ensure(p == naive_prev(w, u), || format!("prev({w:?})"))?;
            ensure(Ok(&s) == naive_spe(w, u).as_ref(), || format!("spe({w:?})"))?;
            ensure(spe(&s, u) == s, || format!("spe not idempotent on {w:?}"))?;
            for (j, sym) in p.iter().enumerate() {
                if let PrevSymbol::Distance(k) = *sym {
                    let k = k as usize;
                    ensure(k == 0 || s[j] == s[j - k], || {
                        format!("repeat at {j} of {w:?} not preserved by spe")
                    })?;
                }
            }
            // One class per prev value; spe must be constant on it and
            // every member must p-match the class representative.
            let (rep, rep_spe) = classes.entry(p).or_insert_with(|| (w.clone(), s.clone()));
            ensure(*rep_spe == s, || {
                format!("{w:?} and {rep:?}: equal prev, different spe")
            })?;
            ensure(naive_p_match(w, rep, u), || {
                format!("{w:?} and {rep:?}: equal prev, no p-match")
            })?;
        }
        // Distinct classes: distinct spe and no p-match between
        // representatives. p-match is an equivalence, so this covers all
        // pairs of strings of this length.
        let reps: Vec<_> = classes.values().collect();
        let mut spes: Vec<_> = reps.iter().map(|(_, s)| s).collect();
        spes.sort();
        spes.dedup();
        ensure(spes.len() == reps.len(), || {
            format!("length {len}: two prev classes share an spe")
        })?;
        for (a, (ra, _)) in reps.iter().enumerate() {
            for (rb, _) in &reps[a + 1..] {
                ensure(!naive_p_match(ra, rb, u), || {
                    format!("{ra:?} ~ {rb:?} with different prev")
                })?;
            }
        }
        if len <= PAIRWISE_LEN {
            let encoded: Vec<_> = words.iter().map(|w| (prev(w, u), spe(w, u))).collect();
            for (x, (px, sx)) in words.iter().zip(&encoded) {
                for (y, (py, sy)) in words.iter().zip(&encoded) {
                    let by_prev = px == py;
                    let by_spe = sx == sy;
                    let by_map = naive_p_match(x, y, u);
                    ensure(by_prev == by_spe && by_spe == by_map, || format!("{x:?} vs {y:?}"))?;
                    pairs += 1;
                }
            }
        }
    }

    let mut texts = 0;
    for len in 1..=EXHAUSTIVE_LEN {
        for w in all_strings(5, len) {
            let raw: Vec<u8> = w.iter().map(|&c| b"xyzAB"[c as usize - 1]).collect();
            let text = byte_text(&raw, "xyz", "AB");
            let t = text.symbols();
            let tu = text.universe();
            for (i, farr) in fpos_stream(&text) {
                ensure(farr.offsets() == naive_fpos(&t[i..], tu).as_slice(), || {
                    format!("fpos at {i} of {raw:?}")
                })?;
                let materialized = naive_prev(&t[i..], tu);
                for (d, want) in materialized.iter().enumerate() {
                    ensure(prev_char_in_window(text.prev(), i, d) == *want, || {
                        format!("window symbol ({i}, {d}) of {raw:?}")
                    })?;
                }
            }
            texts += 1;
        }
    }
    Ok(format!(
        "{strings} strings, {pairs} pairs compared directly, {texts} texts for fpos and windows"
    ))
}

fn criterion_cost(cost: &mut CostLedger) -> Outcome {
    ensure(cost.queries > 0 && cost.rmq_queries > 0, || {
        "no queries recorded".into()
    })?;
    ensure(cost.range_violations.is_empty(), || {
        format!(
            "{} range violations, e.g. {}",
            cost.range_violations.len(),
            cost.range_violations[0]
        )
    })?;
    ensure(cost.comparison_violations.is_empty(), || {
        format!(
            "{} comparison-envelope violations, e.g. {}",
            cost.comparison_violations.len(),
            cost.comparison_violations[0]
        )
    })?;
    Ok(format!(
        "{} queries under the range ceiling, {} with rmq inside the comparison envelope (min slack {:.1})",
        cost.queries,
        cost.rmq_queries,
        cost.worst_slack.unwrap_or(0.0)
    ))
}

fn criterion_serialization() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut queries = 0;
    let mut corpus = vec![
        byte_text(b"zAxAyyxyAxxy", "xyz", "A"),
        byte_text(b"xyzAxxxAyyzAzx", "xyz", "A"),
    ];
    for _ in 0..3 {
        corpus.push(random_text(&mut rng, MAX_N, (1, 6)));
    }
    for (k, text) in corpus.into_iter().enumerate() {
        let tray = assemble(text, k % 2 == 0).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("index{k}.pst"));
        save(&tray, &path).map_err(|e| e.to_string())?;
        let loaded = load(&path).map_err(|e| e.to_string())?;
        ensure(loaded == tray, || format!("index {k}: loaded tray differs"))?;
        let again = dir.path().join(format!("index{k}.again.pst"));
        save(&loaded, &again).map_err(|e| e.to_string())?;
        let first = std::fs::read(&path).map_err(|e| e.to_string())?;
        let second = std::fs::read(&again).map_err(|e| e.to_string())?;
        ensure(first == second && first == to_bytes(&tray), || {
            format!("index {k}: bytes differ")
        })?;
        for _ in 0..BATTERY {
            let pattern = random_pattern(&mut rng, &tray, MAX_M);
            let before = tray.query(&pattern).map_err(|e| e.to_string())?;
            let after = loaded.query(&pattern).map_err(|e| e.to_string())?;
            ensure(
                before == after && tray.positions(&before) == loaded.positions(&after),
                || format!("index {k}: query {:?} changed", tray.text().render(&pattern)),
            )?;
            queries += 1;
        }
    }
    Ok(format!(
        "5 indexes byte-identical after reload, {queries} queries unchanged"
    ))
}
