//! On-disk index format.
//!
//! Layout (all integers are little-endian `u64`; byte strings are a length
//! followed by raw bytes):
//!
//! ```text
//! magic "PSTRAY01" | version | n | pi | sigma | flags (bit 0: rmq)
//! alphabet: mode | sigma policy | #pi members, members | #sigma members, members
//!           | #tokens, tokens (ids 1..pi+sigma-1)
//! text:     n symbols
//! psa:      n entries
//! plcp:     n entries
//! tree:     #nodes | threshold | per node: parent, suffix_start, depth_begin,
//!           depth, lo, hi, flags (bit 0 p-node, bit 1 branching),
//!           heavy child, p-array slot, representative position
//! p-arrays: #cells | cells
//! checksum: SHA-256 of everything above (32 bytes)
//! ```
//!
//! Absent references are stored as `u64::MAX`.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetSpec, InputMode, PText, SigmaPolicy, Symbol, Universe};
use crate::error::InvariantError;
use crate::psa::PsaIndex;
use crate::tray::{Annotations, PsTray};
use crate::tree::{Node, SuffixTree};

pub const MAGIC: &[u8; 8] = b"PSTRAY01";
pub const FORMAT_VERSION: u64 = 1;
const NIL: u64 = u64::MAX;
const DIGEST_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0} (expected {FORMAT_VERSION})")]
    Version(u64),
    #[error("checksum mismatch: file is truncated or corrupt")]
    Checksum,
    #[error("section {section}: {reason}")]
    Section { section: &'static str, reason: String },
    #[error("invariant violated after load")]
    Invariant(#[from] InvariantError),
}

struct Writer(Vec<u8>);

impl Writer {
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }

    fn opt(&mut self, v: Option<usize>) {
        self.u64(v.map_or(NIL, |x| x as u64));
    }

    fn bytes(&mut self, b: &[u8]) {
        self.usize(b.len());
        self.0.extend_from_slice(b);
    }

    fn byte_list<'a>(&mut self, items: impl ExactSizeIterator<Item = &'a Vec<u8>>) {
        self.usize(items.len());
        for it in items {
            self.bytes(it);
        }
    }
}

/// Serializes a tray to bytes.
pub fn to_bytes(tray: &PsTray) -> Vec<u8> {
    let text = tray.text();
    let universe = text.universe();
    let index = tray.index();
    let tree = tray.tree();
    let ann = tray.annotations();
    let mut w = Writer(Vec::new());
    w.0.extend_from_slice(MAGIC);
    w.u64(FORMAT_VERSION);
    w.usize(text.len());
    w.u64(universe.pi as u64);
    w.u64(universe.sigma as u64);
    w.u64(index.has_rmq() as u64);

    let spec = text.alphabet().spec();
    w.u64(match spec.mode {
        InputMode::Bytes => 0,
        InputMode::Tokens => 1,
    });
    match &spec.sigma {
        SigmaPolicy::Explicit(set) => {
            w.u64(0);
            w.byte_list(spec.pi_members.iter());
            w.byte_list(set.iter());
        }
        SigmaPolicy::Complement => {
            w.u64(1);
            w.byte_list(spec.pi_members.iter());
            w.usize(0);
        }
    }
    w.byte_list(text.alphabet().tokens().iter());

    for &s in text.symbols() {
        w.u64(s as u64);
    }
    for &p in index.psa() {
        w.usize(p);
    }
    for &l in index.plcp() {
        w.usize(l);
    }

    w.usize(tree.len());
    w.usize(ann.threshold());
    for (v, node) in tree.nodes().iter().enumerate() {
        w.opt(node.parent);
        w.usize(node.suffix_start);
        w.usize(node.depth - tree.edge_len(v));
        w.usize(node.depth);
        w.usize(node.lo);
        w.usize(node.hi);
        w.u64(ann.is_pnode(v) as u64 | (ann.is_branching(v) as u64) << 1);
        w.opt(ann.heavy_child(v));
        w.opt(ann.parray_slot[v]);
        w.opt(ann.rep_position(v));
    }
    w.usize(ann.pool.len());
    for &cell in &ann.pool {
        w.opt(cell);
    }

    let digest = Sha256::digest(&w.0);
    w.0.extend_from_slice(digest.as_slice());
    w.0
}

pub fn save(tray: &PsTray, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, to_bytes(tray))
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
    section: &'static str,
}

impl<'a> Reader<'a> {
    fn fail(&self, reason: impl Into<String>) -> LoadError {
        LoadError::Section {
            section: self.section,
            reason: reason.into(),
        }
    }

    fn u64(&mut self) -> Result<u64, LoadError> {
        let end = self.at + 8;
        let chunk = self
            .buf
            .get(self.at..end)
            .ok_or_else(|| self.fail("unexpected end of data"))?;
        self.at = end;
        Ok(u64::from_le_bytes(chunk.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, LoadError> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.fail(format!("value {v} does not fit in memory")))
    }

    /// A count of items that each take at least `unit` bytes.
    fn count(&mut self, unit: usize) -> Result<usize, LoadError> {
        let c = self.usize()?;
        if c.saturating_mul(unit) > self.buf.len() - self.at {
            return Err(self.fail(format!("declared length {c} exceeds the section")));
        }
        Ok(c)
    }

    fn opt(&mut self) -> Result<Option<usize>, LoadError> {
        match self.u64()? {
            NIL => Ok(None),
            v => Ok(Some(v as usize)),
        }
    }

    fn bytes(&mut self) -> Result<Vec<u8>, LoadError> {
        let len = self.count(1)?;
        let out = self.buf[self.at..self.at + len].to_vec();
        self.at += len;
        Ok(out)
    }

    fn byte_list(&mut self) -> Result<Vec<Vec<u8>>, LoadError> {
        let c = self.count(8)?;
        (0..c).map(|_| self.bytes()).collect()
    }

    fn vec(&mut self, n: usize) -> Result<Vec<usize>, LoadError> {
        if n.saturating_mul(8) > self.buf.len() - self.at {
            return Err(self.fail(format!("declared length {n} exceeds the section")));
        }
        (0..n).map(|_| self.usize()).collect()
    }
}

/// Parses and fully validates an index image.
pub fn from_bytes(bytes: &[u8]) -> Result<PsTray, LoadError> {
    if bytes.len() >= MAGIC.len() && &bytes[..MAGIC.len()] != MAGIC {
        return Err(LoadError::BadMagic);
    }
    if bytes.len() < MAGIC.len() + DIGEST_LEN {
        return Err(LoadError::Checksum);
    }
    let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(LoadError::Checksum);
    }
    let mut r = Reader {
        buf: body,
        at: MAGIC.len(),
        section: "header",
    };
    let version = r.u64()?;
    if version != FORMAT_VERSION {
        return Err(LoadError::Version(version));
    }
    let n = r.usize()?;
    let pi = r.u64()?;
    let sigma = r.u64()?;
    let flags = r.u64()?;
    if sigma == 0 || pi + sigma > u32::MAX as u64 || n < 2 {
        return Err(r.fail(format!("implausible sizes n={n} pi={pi} sigma={sigma}")));
    }
    let universe = Universe::new(pi as u32, sigma as u32);

    r.section = "alphabet";
    let mode = match r.u64()? {
        0 => InputMode::Bytes,
        1 => InputMode::Tokens,
        m => return Err(r.fail(format!("unknown input mode {m}"))),
    };
    let policy = r.u64()?;
    let pi_members: BTreeSet<Vec<u8>> = r.byte_list()?.into_iter().collect();
    let sigma_members: BTreeSet<Vec<u8>> = r.byte_list()?.into_iter().collect();
    let sigma_policy = match policy {
        0 => SigmaPolicy::Explicit(sigma_members),
        1 => SigmaPolicy::Complement,
        p => return Err(r.fail(format!("unknown sigma policy {p}"))),
    };
    let spec = AlphabetSpec::new(pi_members, sigma_policy, mode).map_err(|e| r.fail(e.to_string()))?;
    let tokens = r.byte_list()?;
    if tokens.len() as u64 != pi + sigma - 1 {
        return Err(r.fail(format!(
            "{} tokens for pi + sigma - 1 = {}",
            tokens.len(),
            pi + sigma - 1
        )));
    }
    if tokens.windows(2).any(|w| w[0] == w[1]) {
        return Err(r.fail("duplicate token"));
    }

    r.section = "text";
    let symbols = r.vec(n)?;
    if symbols.iter().any(|&s| s == 0 || s as u64 > pi + sigma)
        || symbols.iter().filter(|&&s| s as u32 == universe.sentinel()).count() != 1
        || symbols[n - 1] as u32 != universe.sentinel()
    {
        return Err(r.fail("symbol out of range or misplaced end-marker"));
    }
    let symbols: Vec<Symbol> = symbols.into_iter().map(|s| s as Symbol).collect();

    r.section = "psa";
    let psa = r.vec(n)?;
    r.section = "plcp";
    let plcp = r.vec(n)?;

    r.section = "tree";
    let count = r.count(80)?;
    let threshold = r.usize()?;
    let mut nodes = Vec::with_capacity(count);
    let mut is_pnode = Vec::with_capacity(count);
    let mut is_branching = Vec::with_capacity(count);
    let mut heavy = Vec::with_capacity(count);
    let mut parray_slot = Vec::with_capacity(count);
    let mut rep = Vec::with_capacity(count);
    for v in 0..count {
        let parent = r.opt()?;
        let suffix_start = r.usize()?;
        let depth_begin = r.usize()?;
        let depth = r.usize()?;
        let lo = r.usize()?;
        let hi = r.usize()?;
        let node_flags = r.u64()?;
        let parent_depth = match parent {
            Some(p) if p < v => nodes.get(p).map(|n: &Node| n.depth),
            Some(_) => None,
            None => Some(0),
        };
        let edge_ok = if v == 0 {
            parent.is_none() && depth == 0
        } else {
            parent.is_some() && depth_begin < depth
        };
        if !edge_ok || parent_depth != Some(depth_begin) || suffix_start >= n {
            return Err(r.fail(format!("node {v} has an inconsistent edge window")));
        }
        nodes.push(Node {
            parent,
            depth,
            lo,
            hi,
            suffix_start,
            children: Vec::new(),
        });
        is_pnode.push(node_flags & 1 != 0);
        is_branching.push(node_flags & 2 != 0);
        heavy.push(r.opt()?);
        parray_slot.push(r.opt()?);
        rep.push(r.opt()?);
    }

    r.section = "p-arrays";
    let cells = r.count(8)?;
    let pool = (0..cells).map(|_| r.opt()).collect::<Result<Vec<_>, _>>()?;
    if r.at != body.len() {
        return Err(r.fail(format!("{} trailing bytes", body.len() - r.at)));
    }

    let alphabet = Alphabet::from_parts(spec, tokens);
    let text = PText::assemble(symbols, universe, alphabet);
    let index = PsaIndex::from_parts(psa, plcp, flags & 1 != 0);
    let tree = SuffixTree::from_nodes(nodes);
    let ann = Annotations {
        threshold,
        is_pnode,
        is_branching,
        heavy,
        rep,
        parray_slot,
        pool,
        width: universe.size() as usize,
    };
    let tray = PsTray::from_parts(text, index, tree, ann);
    tray.validate()?;
    Ok(tray)
}

pub fn load(path: impl AsRef<Path>) -> Result<PsTray, LoadError> {
    from_bytes(&fs::read(path)?)
}
