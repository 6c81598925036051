use std::io;

use thiserror::Error;

/// Errors raised while reading or building a graph.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graph is empty after removing self-loops and isolated vertices")]
    Empty,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Errors raised by the binary graph cache.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("not a graph cache file (bad magic)")]
    BadMagic,
    #[error("cache is truncated or inconsistent: {0}")]
    Corrupt(String),
    #[error("cache was built from different input (expected hash {expected}, found {found})")]
    HashMismatch { expected: String, found: String },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Errors from core decomposition.
#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("core decomposition of an empty graph")]
    EmptyGraph,
    #[error("approximation factor must be > 1, got {0}")]
    BadFactor(f64),
}

/// Errors from a refinement step.
#[derive(Debug, Error, PartialEq)]
pub enum RefineError {
    #[error("ordering has {got} entries but graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("ordering is not a permutation (vertex {0} repeated or out of range)")]
    NotPermutation(u32),
    #[error("load vector has {got} entries but graph has {expected} vertices")]
    LoadsMismatch { expected: usize, got: usize },
}

/// Errors from the exact oracle.
#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("graph has {n} vertices, oracle limit is {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("oracle on an empty graph")]
    EmptyGraph,
}

/// Errors from a framework run.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}
