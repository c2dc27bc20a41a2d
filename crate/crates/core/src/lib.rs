//! Discrete homotopy of graph walks and the tools built on it: C4-closure
//! parity invariants, a bounded coloring pipeline for graphs mapping into
//! odd-cycle-free targets, Borsuk graph samples, neighborhood complexes and
//! homomorphism search.

pub mod cli;
pub mod closure;
pub mod coloring;
pub mod complex;
pub mod fixtures;
pub mod graph;
pub mod homotopy;
pub mod homsearch;
pub mod invariants;
pub mod pipeline;
pub mod sphere;
pub mod traversal;
pub mod walk;

pub use closure::{c4_partition, phi_partition, ClosurePartition, EdgeMultiset, GraphHom, HomError};
pub use coloring::{exact_chromatic, Coloring, ColoringError};
pub use graph::{parse_graph, EdgeId, Graph, GraphError};
pub use homsearch::{fold_search, hom_exists, FoldOptions, FoldTrace, HomSearchResult, HomSearchStatus};
pub use homotopy::{are_homotopic, HomotopyVerdict, Separation};
pub use invariants::{find_pivot_edge, InvariantContext, InvariantSpec, Pivot};
pub use walk::{apply_move, replay_moves, Move, Walk};
