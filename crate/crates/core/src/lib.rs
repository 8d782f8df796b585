//! Merge independently built local chain complexes into a single global
//! complex by epsilon-congruence of their 0-, 1- and 2-cells.
//!
//! The input is an [`AccumulatorComplex`]: vertex instances plus the
//! block-diagonal coboundaries `[Δ₀]` (edges × vertex instances) and `[Δ₁]`
//! (faces × edges) of every local complex. [`chain_congruence`] welds
//! vertices that lie within `ε` of each other, then identifies edges and
//! faces with the same facets, producing the global coboundaries `[δ₀]`,
//! `[δ₁]` of a [`QuotientComplex`].
//!
//! ```
//! use chaincongruence_core::{chain_congruence, generate, MergeOptions};
//!
//! let acc = generate::exploded_grid(&generate::GridOptions::unit_cube(7)).unwrap();
//! let q = chain_congruence(&acc, &MergeOptions::default()).unwrap();
//! assert_eq!(q.counts(), [8, 12, 6]);
//! ```

pub mod bench;
pub mod congruence;
pub mod error;
pub mod generate;
pub mod io;
pub mod partition;
pub mod sparse;
pub mod validation;
pub mod vertex;

pub use congruence::{
    cell_congruence_aa, cell_congruence_sparse, chain_congruence, AccumulatorComplex, CellArray,
    Engine, MergeOptions, QuotientComplex,
};
pub use error::{Error, Result};
pub use partition::{ClassPartition, SignedClassMap};
pub use sparse::{signed_column_signature, ColumnVector, Sign, SignedSparseMatrix};
pub use validation::{
    check_dd_zero, check_partitions, euler_characteristic, validate, ValidationReport,
};
pub use vertex::{vertex_congruence, KdTree, PointCloud, SpatialIndex, Tolerance};
