use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pstray::check::{check_parrays, self_check};
use pstray::oracle::naive_ppm;
use pstray::{assemble, ingest, load, save, AlphabetSpec, InputMode, PText, PsTray, QueryResult};

/// Parameterized pattern matching with a suffix tray index.
#[derive(Parser)]
#[command(name = "pstray", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index a text and write the index file.
    Build {
        #[arg(long)]
        text: PathBuf,
        #[command(flatten)]
        alphabet: AlphabetArgs,
        #[arg(long)]
        out: PathBuf,
        /// Skip the range-minimum table (plain binary search in PSA ranges).
        #[arg(long)]
        no_rmq: bool,
    },
    /// Print the 1-based start of every occurrence, one per line, ascending.
    Query {
        #[arg(long)]
        index: PathBuf,
        /// The pattern, or `@path` to read it from a file.
        #[arg(long, allow_hyphen_values = true)]
        pattern: String,
        /// Print query counters as key=value lines on stderr.
        #[arg(long)]
        stats: bool,
        /// Also scan the text directly and fail if the answers differ.
        #[arg(long)]
        oracle_check: bool,
    },
    /// Structural report of an index, including the space-bound margins.
    Stats {
        #[arg(long)]
        index: PathBuf,
    },
    /// Compare the tray against binary search over the whole suffix array.
    Bench {
        #[arg(long)]
        index: PathBuf,
        /// One pattern per line.
        #[arg(long)]
        patterns: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Random queries checked against a direct scan.
    SelfCheck {
        #[arg(long)]
        text: PathBuf,
        #[command(flatten)]
        alphabet: AlphabetArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_len: usize,
    },
}

#[derive(Args)]
struct AlphabetArgs {
    /// Alphabet spec file (`pi:`, `sigma:`, `mode:` lines).
    #[arg(long, conflicts_with_all = ["pi", "sigma", "mode"])]
    alphabet: Option<PathBuf>,
    /// Parameterized symbols, in spec-file syntax.
    #[arg(long, allow_hyphen_values = true)]
    pi: Option<String>,
    /// Static symbols in spec-file syntax, or `auto`.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// `bytes` (default) or `tokens`.
    #[arg(long)]
    mode: Option<String>,
}

impl AlphabetArgs {
    fn spec(&self) -> Result<AlphabetSpec> {
        let source = match &self.alphabet {
            Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            None => {
                let (Some(pi), Some(sigma)) = (&self.pi, &self.sigma) else {
                    bail!("give either --alphabet or both --pi and --sigma");
                };
                let mode = self.mode.as_deref().unwrap_or("bytes");
                format!("pi: {pi}\nsigma: {sigma}\nmode: {mode}\n")
            }
        };
        Ok(AlphabetSpec::parse(&source)?)
    }
}

/// One trailing line break is treated as file framing, not content.
fn strip_newline(mut raw: Vec<u8>) -> Vec<u8> {
    if raw.last() == Some(&b'\n') {
        raw.pop();
        if raw.last() == Some(&b'\r') {
            raw.pop();
        }
    }
    raw
}

fn read_text(path: &Path, spec: &AlphabetSpec) -> Result<PText> {
    let raw = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let raw = match spec.mode {
        InputMode::Bytes => strip_newline(raw),
        InputMode::Tokens => raw,
    };
    ingest(&raw, spec).with_context(|| format!("ingesting {}", path.display()))
}

fn load_index(path: &Path) -> Result<PsTray> {
    load(path).with_context(|| format!("loading {}", path.display()))
}

fn print_report(out: &mut impl Write, pairs: &[(&str, String)]) -> io::Result<()> {
    for (key, value) in pairs {
        writeln!(out, "{key}={value}")?;
    }
    Ok(())
}

fn summary(tray: &PsTray) -> Vec<(&'static str, String)> {
    let s = tray.stats();
    vec![
        ("n", s.n.to_string()),
        ("pi", s.pi.to_string()),
        ("sigma", s.sigma.to_string()),
        ("threshold", s.threshold.to_string()),
        ("nodes", s.nodes.to_string()),
        ("leaves", s.leaves.to_string()),
        ("internal_nodes", (s.nodes - s.leaves).to_string()),
        ("pnodes", s.pnodes.to_string()),
        ("branching_pnodes", s.branching_pnodes.to_string()),
        ("parray_cells", s.parray_cells.to_string()),
    ]
}

/// Occurrence query on raw pattern bytes; `None` when a static symbol of
/// the pattern never occurs in the text (no occurrences).
fn run_query(tray: &PsTray, raw: &[u8]) -> Result<(QueryResult, Option<Vec<pstray::Symbol>>)> {
    let encoded = tray.text().encode_pattern(raw)?;
    let result = tray.query_raw(raw)?;
    Ok((result, encoded))
}

fn read_pattern(arg: &str, mode: InputMode) -> Result<Vec<u8>> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let raw = fs::read(path).with_context(|| format!("reading {path}"))?;
            Ok(match mode {
                InputMode::Bytes => strip_newline(raw),
                InputMode::Tokens => raw,
            })
        }
        None => Ok(arg.as_bytes().to_vec()),
    }
}

enum Outcome {
    Ok,
    CheckFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Build {
            text,
            alphabet,
            out: path,
            no_rmq,
        } => {
            let spec = alphabet.spec()?;
            let text = read_text(&text, &spec)?;
            let tray = assemble(text, !no_rmq)?;
            save(&tray, &path).with_context(|| format!("writing {}", path.display()))?;
            print_report(&mut out, &summary(&tray))?;
        }
        Command::Query {
            index,
            pattern,
            stats,
            oracle_check,
        } => {
            let tray = load_index(&index)?;
            let raw = read_pattern(&pattern, tray.text().alphabet().spec().mode)?;
            let (result, encoded) = run_query(&tray, &raw)?;
            let positions = tray.positions(&result);
            for p in &positions {
                writeln!(out, "{}", p + 1)?;
            }
            out.flush()?;
            if stats {
                let s = result.stats;
                print_report(
                    &mut io::stderr(),
                    &[
                        ("occ", result.occ().to_string()),
                        ("symbol_comparisons", s.symbol_comparisons.to_string()),
                        ("nodes_visited", s.nodes_visited.to_string()),
                        ("parray_lookups", s.parray_lookups.to_string()),
                        ("psa_probes", s.psa_probes.to_string()),
                        ("max_range_searched", s.max_range_searched.to_string()),
                    ],
                )?;
            }
            if oracle_check {
                let expected = encoded.map_or_else(Vec::new, |p| naive_ppm(tray.text(), &p));
                if expected != positions {
                    eprintln!("pstray: oracle mismatch: index {positions:?}, scan {expected:?} (0-based)");
                    return Ok(Outcome::CheckFailed);
                }
            }
        }
        Command::Stats { index } => {
            let tray = load_index(&index)?;
            let s = tray.stats();
            let mut report = summary(&tray);
            report.extend([
                ("heavy_links", s.heavy_links.to_string()),
                ("rmq", tray.index().has_rmq().to_string()),
                ("branching_bound", s.branching_bound.to_string()),
                (
                    "branching_margin",
                    (s.branching_bound as i64 - s.branching_pnodes as i64).to_string(),
                ),
                ("cell_bound", s.cell_bound.to_string()),
                ("cell_margin", (s.cell_bound as i64 - s.parray_cells as i64).to_string()),
                ("range_ceiling", pstray::check::range_ceiling(&tray).to_string()),
            ]);
            print_report(&mut out, &report)?;
        }
        Command::Bench { index, patterns, csv } => {
            let tray = load_index(&index)?;
            let mode = tray.text().alphabet().spec().mode;
            let source = fs::read(&patterns).with_context(|| format!("reading {}", patterns.display()))?;
            let mut sink: Box<dyn Write> = match &csv {
                Some(path) => Box::new(BufWriter::new(
                    fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
                )),
                None => Box::new(&mut out),
            };
            writeln!(
                sink,
                "pattern_id,m,occ,comparisons_tray,comparisons_psa,max_range,micros_tray,micros_psa"
            )?;
            let lines = source
                .split(|&b| b == b'\n')
                .map(|l| l.strip_suffix(b"\r").unwrap_or(l));
            for (id, line) in lines.filter(|l| !l.is_empty()).enumerate() {
                let encoded = tray
                    .text()
                    .encode_pattern(line)
                    .with_context(|| format!("pattern {id}"))?;
                let Some(pattern) = encoded else {
                    let m = match mode {
                        InputMode::Bytes => line.len(),
                        InputMode::Tokens => line
                            .split(|b| b.is_ascii_whitespace())
                            .filter(|t| !t.is_empty())
                            .count(),
                    };
                    writeln!(sink, "{id},{m},0,0,0,0,0.000,0.000")?;
                    continue;
                };
                let started = Instant::now();
                let fast = tray.query(&pattern)?;
                let micros_tray = started.elapsed().as_secs_f64() * 1e6;
                let started = Instant::now();
                let slow = tray.query_psa_only(&pattern)?;
                let micros_psa = started.elapsed().as_secs_f64() * 1e6;
                if fast.occ() != slow.occ() {
                    bail!(
                        "pattern {id}: tray found {} occurrences, PSA search {}",
                        fast.occ(),
                        slow.occ()
                    );
                }
                writeln!(
                    sink,
                    "{id},{},{},{},{},{},{micros_tray:.3},{micros_psa:.3}",
                    pattern.len(),
                    fast.occ(),
                    fast.stats.symbol_comparisons,
                    slow.stats.symbol_comparisons,
                    fast.stats.max_range_searched,
                )?;
            }
            sink.flush()?;
        }
        Command::SelfCheck {
            text,
            alphabet,
            trials,
            seed,
            max_len,
        } => {
            if trials == 0 {
                return Ok(Outcome::Ok);
            }
            let spec = alphabet.spec()?;
            let tray = assemble(read_text(&text, &spec)?, true)?;
            tray.validate()?;
            let parrays = check_parrays(&tray);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = self_check(&tray, trials, max_len, &mut rng);
            print_report(
                &mut out,
                &[
                    ("trials", report.trials.to_string()),
                    ("occurrences", report.total_occurrences.to_string()),
                    ("query_mismatches", report.query_mismatches.to_string()),
                    ("range_violations", report.range_violations.to_string()),
                    ("parrays_checked", parrays.as_ref().map_or(0, |n| *n).to_string()),
                ],
            )?;
            out.flush()?;
            if let Err(e) = &parrays {
                eprintln!("pstray: p-array mismatch: {e}");
            }
            if let Some(failure) = &report.first_failure {
                eprintln!("pstray: {failure}");
            }
            if parrays.is_err() || !report.passed() {
                return Ok(Outcome::CheckFailed);
            }
        }
    }
    out.flush()?;
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("pstray: {e:#}");
            ExitCode::from(2)
        }
    }
}
