//! Compile unitary matrices into circuits of controlled single-qubit
//! rotations by recursive cosine-sine decomposition, and shrink the result
//! by searching for permutations `P`, `Q` with `U = Q^T P^T U' P Q`.
//!
//! Qubit 1 is the most significant bit of a basis-state index.

pub mod benchgen;
pub mod circuit;
pub mod cli;
pub mod csd;
pub mod error;
pub mod export;
pub mod linalg;
pub mod optimizer;
pub mod perm;

pub use circuit::{evaluate, qubit_perm_to_swap_circuit, reduce, Circuit, Control, Gate, Kind, Op, SegmentedCircuit};
pub use csd::{csd_gate_count, csd_step, decompose, leaf_decomposition, Branch, CsdBlocks, LeafDecomposition};
pub use error::{Error, Result};
pub use linalg::{expand_to_power_of_two, is_unitary, UnitaryMatrix, C64};
pub use optimizer::{
    anneal, cost, parallel_search, select_qubit_permutation, AnnealConfig, CostBreakdown, CostModel, SearchResult,
    SearchState,
};
pub use perm::{perm_list_to_matrix, qubit_perm_to_full_perm, swap_gate_count, PermutationList, QubitPermutation};
