//! Approximate densest subgraphs by core pruning and load-based refinement.
//!
//! The density of a vertex set `S` is `|E(S)| / |S|`. [`framework::run`]
//! prunes the input to a dense core, then alternates vertex orderings and
//! suffix-density scans while tightening the core as better subgraphs show
//! up. Densities are exact rationals throughout.

pub mod cache;
pub mod core_decomp;
pub mod density;
pub mod error;
pub mod framework;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod refine;
pub mod scan;

pub use core_decomp::{approx_coreness, exact_coreness, get_core, CoreDecomposition, CoreKind};
pub use density::Density;
pub use error::{CacheError, CoreError, GraphError, OracleError, RefineError, RunError};
pub use framework::{run, run_with_observer, Algorithm, Pruning, RunConfig, RunResult, RunTrace};
pub use graph::{parse_edge_list, read_edge_list_file, Graph, GraphStats, ParseOptions, VertexId};
pub use oracle::{brute_force_densest, OracleResult};
pub use refine::{
    density_and_load_update, load_peel_order, load_sort_order, LoadState, RefineOutcome,
    VertexOrdering,
};
