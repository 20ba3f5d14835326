//! Exact combinatorics of `σ∘f` on `N` equal subintervals.

pub mod blocks;
pub mod classify;
pub mod sets;

pub use blocks::{stabilizer_order, BlockDecomposition};
pub use classify::{
    classify_fast, classify_oracle, delta, has_subshift_witness, subshift_witness_proportion,
    MixingStatus, MixingVerdict, DEFAULT_ORACLE_CAP,
};
pub use sets::{image, is_coset_union, spread, FamilyKind, MapFamily, Subset};
