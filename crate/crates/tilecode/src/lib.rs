//! Discrete flows of triangles and tetrahedra over integer lattices, and
//! their application to encoding local protein backbone structure.
//!
//! - [`lattice`] — slant/flat simplices of `Z^3` and `Z^4`, the diagonal
//!   projection, gradients, fibers, and the two-choice successor rules.
//! - [`flow`] — peaks-and-valleys surfaces, the induced vector field,
//!   trajectory tracing with closure detection, and binary derivative codes.
//! - [`geom`] — projected tetrahedra in R^3 with rigid transforms and the
//!   edge structure that lets chains of them fold.
//! - [`encode`] — the six-step folding encoder turning 5-residue Cα
//!   fragments into 5-tile codes and one-letter symbols.
//! - [`pdb`] — fixed-column PDB reading into per-chain Cα traces.

pub mod encode;
pub mod flow;
pub mod geom;
pub mod lattice;
pub mod pdb;

pub use encode::{encode_chain, encode_fragment, ChainSites, EncoderConfig, Fragment, TileCode};
pub use flow::{derivative_code, surface_simplex, trace, Derivative, PeakSet, Trajectory};
pub use lattice::{flat_class, project, Dim, FlatClass, Gradient, Monomial, OrderedSimplex};
pub use pdb::{parse_pdb, three_to_one, CaTrace};
