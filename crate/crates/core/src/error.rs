use thiserror::Error;

use crate::alphabet::{AlphabetError, Symbol};

/// A structural invariant of a built or loaded index does not hold.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{structure}: {detail}")]
pub struct InvariantError {
    pub structure: &'static str,
    pub detail: String,
}

impl InvariantError {
    pub(crate) fn new(structure: &'static str, detail: impl Into<String>) -> Self {
        InvariantError {
            structure,
            detail: detail.into(),
        }
    }
}

/// Failures while assembling the tray. Any of these indicates a bug.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("p-array of node {node}: rank {rank} claimed by children {first} and {second}")]
    ParrayCollision {
        node: usize,
        rank: u32,
        first: usize,
        second: usize,
    },
    #[error("p-array of node {node}: child {child} has a back-reference outside the node label")]
    UnmappedSymbol { node: usize, child: usize },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("empty pattern")]
    EmptyPattern,
    #[error("pattern symbol {0} is outside the text's symbol universe")]
    SymbolOutOfRange(Symbol),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}
