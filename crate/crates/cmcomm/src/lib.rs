//! Commutator theory for finite algebras, computationally.
//!
//! This crate computes higher (k-ary) commutators of congruences on finite
//! algebras given by operation tables.  The central objects are *cube
//! algebras*: for congruences `T = (t0, .., t(k-1))` of an algebra `A`, the
//! subalgebra `M(T) <= A^(2^k)` generated by cubes that vary along a single
//! coordinate.  A commutator `[T]` is the least congruence `d` such that every
//! cube in `M(T)` whose supporting lines lie in `d` also has its pivot line in
//! `d`; it is computed both by a direct fixpoint and, as a cross-check, by
//! scanning the congruence lattice for the centrality condition.
//!
//! On top of that sit chains of modularity witness terms (quaternary terms
//! whose identities characterize congruence modularity), square rotations
//! driven by those chains, and a harness that sweeps structural theorems —
//! symmetry, additivity, behavior under quotients, agreement with the
//! two-term variant — across a corpus of small algebras.
//!
//! The `cmcomm` binary exposes the same functionality on the command line;
//! see the repository README for the JSON formats involved.

pub mod algebra;
pub mod cli;
pub mod commutator;
pub mod congruence;
pub mod cubes;
pub mod dayterms;
pub mod error;
pub mod theorems;

pub use algebra::{FiniteAlgebra, Operation, Term};
pub use commutator::{centrality, commutator_by_lattice_scan, higher_commutator};
pub use congruence::{cg, congruence_lattice, CongruenceLattice, Partition};
pub use cubes::{generate_matrix_algebra, Cube, CubeIndex, Line, MatrixAlgebra, Square};
pub use dayterms::{find_day_chain, generator_set, verify_day_chain, DayChain, PreparedChain};
pub use error::{Error, Result};
