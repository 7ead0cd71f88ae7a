//! Alphabets, text ingestion, and the canonical symbol universe.
//!
//! External input is either a byte stream (every byte is one symbol) or a
//! whitespace-separated token stream. After ingestion every symbol is an
//! internal id in `1..=pi + sigma`:
//!
//! * parameterized symbols occurring in the text get `1..=pi`, in
//!   lexicographic order of their external tokens;
//! * static symbols occurring in the text get `pi + 1..pi + sigma`, again in
//!   lexicographic order;
//! * the end-marker is `pi + sigma`, the largest id, and is counted in `sigma`.
//!
//! With this numbering the rank of a symbol is the symbol id itself.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Internal symbol id. Valid ids are `1..=universe.size()`.
pub type Symbol = u32;

/// External name reserved for the end-marker.
pub const SENTINEL_TOKEN: &[u8] = b"$";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("empty input")]
    EmptyInput,
    #[error("token {0:?} is in neither the parameterized nor the static alphabet")]
    Unclassified(String),
    #[error("token {0:?} collides with the end-marker")]
    SentinelCollision(String),
    #[error("token {0:?} is declared both parameterized and static")]
    Overlap(String),
    #[error("alphabet spec line {line}: {reason}")]
    SpecSyntax { line: usize, reason: String },
    #[error("byte-mode alphabet member {0:?} is not a single byte")]
    NotAByte(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("symbol id {id} is outside the universe 1..={size}")]
pub struct RankError {
    pub id: Symbol,
    pub size: u32,
}

/// How raw input is split into symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputMode {
    Bytes,
    Tokens,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaPolicy {
    /// Only these tokens are static; anything else is a classification error.
    Explicit(BTreeSet<Vec<u8>>),
    /// Every token not declared parameterized is static.
    Complement,
}

/// Declares which external tokens are parameterized and which are static.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSpec {
    pub pi_members: BTreeSet<Vec<u8>>,
    pub sigma: SigmaPolicy,
    pub mode: InputMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolClass {
    Parameterized,
    Static,
}

fn show(token: &[u8]) -> String {
    String::from_utf8_lossy(token).into_owned()
}

impl AlphabetSpec {
    pub fn new(
        pi_members: impl IntoIterator<Item = impl AsRef<[u8]>>,
        sigma: SigmaPolicy,
        mode: InputMode,
    ) -> Result<Self, AlphabetError> {
        let spec = AlphabetSpec {
            pi_members: pi_members.into_iter().map(|t| t.as_ref().to_vec()).collect(),
            sigma,
            mode,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Byte-mode spec where every byte of `pi` is parameterized and every
    /// byte of `sigma` is static.
    pub fn bytes(pi: &str, sigma: &str) -> Result<Self, AlphabetError> {
        let sigma = sigma.bytes().map(|b| vec![b]).collect();
        Self::new(
            pi.bytes().map(|b| vec![b]),
            SigmaPolicy::Explicit(sigma),
            InputMode::Bytes,
        )
    }

    fn check(&self) -> Result<(), AlphabetError> {
        let statics: Box<dyn Iterator<Item = &Vec<u8>>> = match &self.sigma {
            SigmaPolicy::Explicit(set) => Box::new(set.iter()),
            SigmaPolicy::Complement => Box::new(std::iter::empty()),
        };
        for token in self.pi_members.iter().chain(statics) {
            if token.as_slice() == SENTINEL_TOKEN {
                return Err(AlphabetError::SentinelCollision(show(token)));
            }
            if self.mode == InputMode::Bytes && token.len() != 1 {
                return Err(AlphabetError::NotAByte(show(token)));
            }
        }
        if let SigmaPolicy::Explicit(set) = &self.sigma {
            if let Some(t) = set.intersection(&self.pi_members).next() {
                return Err(AlphabetError::Overlap(show(t)));
            }
        }
        Ok(())
    }

    /// Parses the three-line spec file format:
    ///
    /// ```text
    /// pi: x y z
    /// sigma: A B        (or `sigma: auto`)
    /// mode: bytes       (or `mode: tokens`)
    /// ```
    ///
    /// In byte mode every byte of every listed item is a member, so
    /// `pi: xyz` and `pi: x y z` are equivalent. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(source: &str) -> Result<Self, AlphabetError> {
        let mut pi: Option<Vec<&str>> = None;
        let mut sigma: Option<Option<Vec<&str>>> = None;
        let mut mode = None;
        for (idx, raw) in source.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |reason: &str| AlphabetError::SpecSyntax {
                line: idx + 1,
                reason: reason.to_string(),
            };
            let (key, value) = line.split_once(':').ok_or_else(|| syntax("expected `key: value`"))?;
            let items: Vec<&str> = value.split_whitespace().collect();
            match key.trim() {
                "pi" => pi = Some(items),
                "sigma" => {
                    sigma = Some(if items == ["auto"] { None } else { Some(items) });
                }
                "mode" => {
                    mode = Some(match items.as_slice() {
                        ["bytes"] => InputMode::Bytes,
                        ["tokens"] => InputMode::Tokens,
                        _ => return Err(syntax("mode must be `bytes` or `tokens`")),
                    })
                }
                other => return Err(syntax(&format!("unknown key `{other}`"))),
            }
        }
        let missing = |what: &str| AlphabetError::SpecSyntax {
            line: 0,
            reason: format!("missing `{what}` line"),
        };
        let mode = mode.ok_or_else(|| missing("mode"))?;
        let pi = pi.ok_or_else(|| missing("pi"))?;
        let sigma = sigma.ok_or_else(|| missing("sigma"))?;
        let members = |items: Vec<&str>| -> BTreeSet<Vec<u8>> {
            match mode {
                InputMode::Bytes => items.iter().flat_map(|s| s.bytes()).map(|b| vec![b]).collect(),
                InputMode::Tokens => items.iter().map(|s| s.as_bytes().to_vec()).collect(),
            }
        };
        let sigma = match sigma {
            None => SigmaPolicy::Complement,
            Some(items) => SigmaPolicy::Explicit(members(items)),
        };
        let spec = AlphabetSpec {
            pi_members: members(pi),
            sigma,
            mode,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Splits raw input into external tokens according to the input mode.
    pub fn tokenize<'a>(&self, raw: &'a [u8]) -> Vec<&'a [u8]> {
        match self.mode {
            InputMode::Bytes => raw.chunks(1).collect(),
            InputMode::Tokens => raw
                .split(|b| b.is_ascii_whitespace())
                .filter(|t| !t.is_empty())
                .collect(),
        }
    }

    pub fn classify(&self, token: &[u8]) -> Result<SymbolClass, AlphabetError> {
        if token == SENTINEL_TOKEN {
            return Err(AlphabetError::SentinelCollision(show(token)));
        }
        if self.pi_members.contains(token) {
            return Ok(SymbolClass::Parameterized);
        }
        match &self.sigma {
            SigmaPolicy::Complement => Ok(SymbolClass::Static),
            SigmaPolicy::Explicit(set) if set.contains(token) => Ok(SymbolClass::Static),
            SigmaPolicy::Explicit(_) => Err(AlphabetError::Unclassified(show(token))),
        }
    }
}

/// Sizes of the canonical symbol universe of one text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    /// Distinct parameterized symbols occurring in the text.
    pub pi: u32,
    /// Distinct static symbols occurring in the text, end-marker included.
    pub sigma: u32,
}

impl Universe {
    pub fn new(pi: u32, sigma: u32) -> Self {
        debug_assert!(sigma >= 1, "the end-marker is always static");
        Universe { pi, sigma }
    }

    /// `pi + sigma`, the length of a p-array.
    pub fn size(self) -> u32 {
        self.pi + self.sigma
    }

    pub fn sentinel(self) -> Symbol {
        self.size()
    }

    pub fn is_param(self, s: Symbol) -> bool {
        s >= 1 && s <= self.pi
    }

    pub fn contains(self, s: Symbol) -> bool {
        s >= 1 && s <= self.size()
    }

    /// `max(sigma, pi)`: minimum leaf count of a p-node.
    pub fn threshold(self) -> usize {
        self.pi.max(self.sigma) as usize
    }
}

/// Rank of a symbol in the ordered universe (parameterized before static,
/// end-marker last). Canonical ids make this the identity on `1..=pi+sigma`.
pub fn rank(x: Symbol, universe: Universe) -> Result<u32, RankError> {
    if universe.contains(x) {
        Ok(x)
    } else {
        Err(RankError {
            id: x,
            size: universe.size(),
        })
    }
}

/// Bidirectional map between external tokens and internal ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    spec: AlphabetSpec,
    /// `tokens[id - 1]` for every id except the end-marker.
    tokens: Vec<Vec<u8>>,
    ids: HashMap<Vec<u8>, Symbol>,
}

impl Alphabet {
    pub(crate) fn from_parts(spec: AlphabetSpec, tokens: Vec<Vec<u8>>) -> Self {
        let ids = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as Symbol + 1))
            .collect();
        Alphabet { spec, tokens, ids }
    }

    pub fn spec(&self) -> &AlphabetSpec {
        &self.spec
    }

    /// External tokens of ids `1..pi+sigma` (end-marker excluded).
    pub fn tokens(&self) -> &[Vec<u8>] {
        &self.tokens
    }

    pub fn id(&self, token: &[u8]) -> Option<Symbol> {
        self.ids.get(token).copied()
    }

    /// External token of `id`; the end-marker renders as `$`.
    pub fn token(&self, id: Symbol) -> Option<&[u8]> {
        let idx = (id as usize).checked_sub(1)?;
        match self.tokens.get(idx) {
            Some(t) => Some(t),
            None if idx == self.tokens.len() => Some(SENTINEL_TOKEN),
            None => None,
        }
    }
}

/// A p-string over canonical ids, terminated by the end-marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PText {
    symbols: Vec<Symbol>,
    universe: Universe,
    alphabet: Alphabet,
    prev: Vec<crate::encoding::PrevSymbol>,
}

impl PText {
    /// Builds a text directly from canonical ids (no end-marker); the
    /// external names are synthesized as the decimal ids.
    ///
    /// Every id in `1..=pi` and `pi+1..pi+sigma` must occur, and none may
    /// equal the end-marker.
    pub fn from_canonical(body: &[Symbol], universe: Universe) -> Result<Self, AlphabetError> {
        if body.is_empty() {
            return Err(AlphabetError::EmptyInput);
        }
        let mut seen = vec![false; universe.size() as usize];
        for &s in body {
            if s == universe.sentinel() {
                return Err(AlphabetError::SentinelCollision(s.to_string()));
            }
            if !universe.contains(s) {
                return Err(AlphabetError::Unclassified(s.to_string()));
            }
            seen[s as usize - 1] = true;
        }
        if let Some(missing) = seen[..seen.len() - 1].iter().position(|&b| !b) {
            return Err(AlphabetError::Unclassified(format!("{} does not occur", missing + 1)));
        }
        let tokens: Vec<Vec<u8>> = (1..universe.sentinel())
            .map(|id| format!("#{id}").into_bytes())
            .collect();
        let pi_members = tokens[..universe.pi as usize].iter().cloned().collect();
        let sigma = tokens[universe.pi as usize..].iter().cloned().collect();
        let spec = AlphabetSpec {
            pi_members,
            sigma: SigmaPolicy::Explicit(sigma),
            mode: InputMode::Tokens,
        };
        let mut symbols = body.to_vec();
        symbols.push(universe.sentinel());
        Ok(Self::assemble(symbols, universe, Alphabet::from_parts(spec, tokens)))
    }

    pub(crate) fn assemble(symbols: Vec<Symbol>, universe: Universe, alphabet: Alphabet) -> Self {
        let prev = crate::encoding::prev(&symbols, universe);
        PText {
            symbols,
            universe,
            alphabet,
            prev,
        }
    }

    /// Length including the end-marker.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// prev encoding of the whole text.
    pub fn prev(&self) -> &[crate::encoding::PrevSymbol] {
        &self.prev
    }

    /// `prev(T[start..])[offset]` without materializing the suffix.
    #[inline]
    pub fn prev_at(&self, start: usize, offset: usize) -> crate::encoding::PrevSymbol {
        crate::encoding::prev_char_in_window(&self.prev, start, offset)
    }

    /// Length of the suffix starting at `start`.
    #[inline]
    pub fn suffix_len(&self, start: usize) -> usize {
        self.symbols.len() - start
    }

    /// Maps a pattern to canonical ids.
    ///
    /// Returns `Ok(None)` when the pattern provably has no occurrence: it
    /// uses a static token absent from the text, or more distinct
    /// parameterized tokens than the text has. Parameterized tokens unknown
    /// to the text are given unused parameterized ids, which leaves the
    /// pattern's prev encoding unchanged.
    pub fn encode_pattern(&self, raw: &[u8]) -> Result<Option<Vec<Symbol>>, AlphabetError> {
        let spec = self.alphabet.spec();
        let tokens = spec.tokenize(raw);
        if tokens.is_empty() {
            return Err(AlphabetError::EmptyInput);
        }
        let mut classes = Vec::with_capacity(tokens.len());
        for t in &tokens {
            classes.push(spec.classify(t)?);
        }
        let mut used = vec![false; self.universe.pi as usize + 1];
        let mut fresh: HashMap<&[u8], Option<Symbol>> = HashMap::new();
        for (t, class) in tokens.iter().zip(&classes) {
            match (class, self.alphabet.id(t)) {
                (SymbolClass::Static, None) => return Ok(None),
                (SymbolClass::Parameterized, Some(id)) => used[id as usize] = true,
                (SymbolClass::Parameterized, None) => {
                    fresh.insert(t, None);
                }
                (SymbolClass::Static, Some(_)) => {}
            }
        }
        let mut spare = (1..=self.universe.pi).filter(|&id| !used[id as usize]);
        let mut out = Vec::with_capacity(tokens.len());
        for t in &tokens {
            let id = match self.alphabet.id(t) {
                Some(id) => id,
                None => {
                    let slot = fresh.get_mut(t).expect("classified above");
                    match slot {
                        Some(id) => *id,
                        None => match spare.next() {
                            Some(id) => *slot.insert(id),
                            None => return Ok(None),
                        },
                    }
                }
            };
            out.push(id);
        }
        Ok(Some(out))
    }

    /// Renders a symbol sequence with external tokens, space-separated in
    /// token mode.
    pub fn render(&self, symbols: &[Symbol]) -> String {
        let sep = match self.alphabet.spec().mode {
            InputMode::Bytes => "",
            InputMode::Tokens => " ",
        };
        symbols
            .iter()
            .map(|&s| self.alphabet.token(s).map(show).unwrap_or_else(|| format!("<{s}>")))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for PText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&self.symbols))
    }
}

/// Parses raw input into a canonical p-string with the end-marker appended.
pub fn ingest(raw: &[u8], spec: &AlphabetSpec) -> Result<PText, AlphabetError> {
    let tokens = spec.tokenize(raw);
    if tokens.is_empty() {
        return Err(AlphabetError::EmptyInput);
    }
    let mut params = BTreeSet::new();
    let mut statics = BTreeSet::new();
    for t in &tokens {
        match spec.classify(t)? {
            SymbolClass::Parameterized => params.insert(*t),
            SymbolClass::Static => statics.insert(*t),
        };
    }
    let universe = Universe::new(params.len() as u32, statics.len() as u32 + 1);
    let ordered: Vec<Vec<u8>> = params.into_iter().chain(statics).map(<[u8]>::to_vec).collect();
    let alphabet = Alphabet::from_parts(spec.clone(), ordered);
    let mut symbols: Vec<Symbol> = tokens
        .iter()
        .map(|t| alphabet.id(t).expect("every token was classified"))
        .collect();
    symbols.push(universe.sentinel());
    Ok(PText::assemble(symbols, universe, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PText {
        ingest(b"zAxAyyxyAxxy", &AlphabetSpec::bytes("xyz", "A").unwrap()).unwrap()
    }

    #[test]
    fn ingest_sample_text() {
        let t = sample();
        assert_eq!(t.universe(), Universe::new(3, 2));
        assert_eq!(t.len(), 13);
        // z A x A y y x y A x x y $
        assert_eq!(t.symbols(), &[3, 4, 1, 4, 2, 2, 1, 2, 4, 1, 1, 2, 5]);
    }

    #[test]
    fn ingest_static_only() {
        let t = ingest(b"A", &AlphabetSpec::bytes("", "A").unwrap()).unwrap();
        assert_eq!(t.universe(), Universe::new(0, 2));
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn ingest_token_mode() {
        let spec = AlphabetSpec::parse("pi: x y\nsigma: auto\nmode: tokens\n").unwrap();
        let t = ingest(b"x x  y\n", &spec).unwrap();
        assert_eq!(t.symbols(), &[1, 1, 2, 3]);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn ingest_errors() {
        let spec = AlphabetSpec::bytes("xy", "A").unwrap();
        assert_eq!(ingest(b"", &spec), Err(AlphabetError::EmptyInput));
        assert_eq!(ingest(b"xB", &spec), Err(AlphabetError::Unclassified("B".into())));
        let auto = AlphabetSpec::parse("pi: x\nsigma: auto\nmode: bytes").unwrap();
        assert_eq!(ingest(b"x$", &auto), Err(AlphabetError::SentinelCollision("$".into())));
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            AlphabetSpec::bytes("x$", "A"),
            Err(AlphabetError::SentinelCollision(_))
        ));
        assert!(matches!(AlphabetSpec::bytes("xA", "A"), Err(AlphabetError::Overlap(_))));
        assert!(matches!(
            AlphabetSpec::parse("pi: x\nsigma: A\n"),
            Err(AlphabetError::SpecSyntax { .. })
        ));
        assert!(matches!(
            AlphabetSpec::parse("pi: x\nsigma: A\nmode: lines"),
            Err(AlphabetError::SpecSyntax { line: 3, .. })
        ));
        let a = AlphabetSpec::parse("# comment\npi: xyz\nsigma: A\nmode: bytes").unwrap();
        assert_eq!(a, AlphabetSpec::bytes("xyz", "A").unwrap());
    }

    #[test]
    fn ranks() {
        let u = sample().universe();
        assert_eq!(rank(1, u), Ok(1));
        assert_eq!(rank(4, u), Ok(4)); // A follows x, y, z
        assert_eq!(rank(u.sentinel(), u), Ok(5));
        assert!(rank(0, u).is_err());
        assert!(rank(6, u).is_err());
    }

    #[test]
    fn external_map_round_trip() {
        let t = sample();
        assert_eq!(t.to_string(), "zAxAyyxyAxxy$");
        for (i, &s) in t.symbols()[..t.len() - 1].iter().enumerate() {
            let tok = t.alphabet().token(s).unwrap();
            assert_eq!(tok, &b"zAxAyyxyAxxy"[i..=i]);
            assert_eq!(t.alphabet().id(tok), Some(s));
        }
    }

    #[test]
    fn pattern_encoding() {
        let spec = AlphabetSpec::parse("pi: x y z w\nsigma: A B\nmode: bytes").unwrap();
        let t = ingest(b"xyAx", &spec).unwrap();
        // universe: x=1 y=2 A=3 $=4
        assert_eq!(t.encode_pattern(b"yA").unwrap(), Some(vec![2, 3]));
        // w is unknown to the text but x is not used by the pattern
        assert_eq!(t.encode_pattern(b"wy").unwrap(), Some(vec![1, 2]));
        // three distinct parameters cannot fit into two
        assert_eq!(t.encode_pattern(b"xyz").unwrap(), None);
        // B is static and absent from the text
        assert_eq!(t.encode_pattern(b"xB").unwrap(), None);
        assert_eq!(t.encode_pattern(b""), Err(AlphabetError::EmptyInput));
        assert!(t.encode_pattern(b"xC").is_err());
    }

    #[test]
    fn canonical_construction() {
        let t = PText::from_canonical(&[1, 2, 3, 1], Universe::new(2, 2)).unwrap();
        assert_eq!(t.symbols(), &[1, 2, 3, 1, 4]);
        assert!(PText::from_canonical(&[1, 3], Universe::new(2, 2)).is_err());
        assert!(PText::from_canonical(&[1, 2, 4], Universe::new(2, 2)).is_err());
    }
}
