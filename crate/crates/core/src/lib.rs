//! Parameterized suffix trays.
//!
//! Two strings parameterized-match when a bijective renaming of the
//! parameterized symbols turns one into the other while static symbols stay
//! fixed. [`PsTray`] indexes a text so that every parameterized occurrence of
//! a pattern is found by descending the parameterized suffix tree through its
//! heavy (p-node) part in constant time per symbol and finishing with a
//! binary search over a small range of the parameterized suffix array.
//!
//! ```
//! use pstray::{assemble, ingest, AlphabetSpec};
//!
//! let spec = AlphabetSpec::bytes("xyz", "A").unwrap();
//! let text = ingest(b"xyzAxxxAyyzAzx", &spec).unwrap();
//! let tray = assemble(text, true).unwrap();
//! let hits = tray.query_raw(b"yAzz").unwrap();
//! assert_eq!(tray.positions(&hits), [2, 6]);
//! ```
//!
//! Positions, offsets and PSA rows are 0-based throughout the library.

pub mod alphabet;
pub mod check;
pub mod encoding;
pub mod error;
pub mod io;
pub mod oracle;
pub mod psa;
pub mod rmq;
pub mod tray;
pub mod tree;

pub use alphabet::{ingest, rank, AlphabetSpec, InputMode, PText, SigmaPolicy, Symbol, Universe};
pub use encoding::{p_match, prev, spe, FArray, PFunction, PrevSymbol};
pub use error::{BuildError, InvariantError, QueryError};
pub use io::{load, save, LoadError};
pub use psa::{build_psa, PsaIndex, SearchMode, SearchStats};
pub use tray::{assemble, PsTray, QueryResult, QueryStats, TrayStats};
pub use tree::{build_tree, NodeId, SuffixTree};
