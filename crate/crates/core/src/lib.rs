//! Constructions of directed strongly regular graphs (DSRGs) and their exact
//! verification.
//!
//! Two families are built here:
//!
//! * difference digraphs of *partial sum families* over `G = R × R`, where `R`
//!   is a finite chain ring (prime field, extension field or Galois ring) and
//!   the sets are unions of lines of a spread of `G`;
//! * Cayley digraphs of the semidirect product `F_q ⋊ ⟨ω^e⟩`, whose connection
//!   set is cut out by a cyclotomic class.
//!
//! Every construction is checked with integer arithmetic only: group-ring
//! convolutions for the families and connection sets, and exact squaring of
//! the bit-packed adjacency matrix for the materialized digraphs.
//!
//! The heavy inner loops (matrix rows, convolution cells, product tallies) run
//! on rayon when the `parallel` feature is enabled, which it is by default.
//! Each of them can also be forced onto the calling thread with
//! [`Execution::Sequential`].

pub mod algebra;
pub mod cyclotomy;
pub mod digraph;
mod error;
mod exec;
pub mod psf;
pub mod semidirect;
pub mod spread;
pub mod sweep;

pub use algebra::{ChainRing, Elem, GroupElement};
pub use digraph::{Digraph, DsrgParams, DsrgViolation};
pub use error::{Error, Result};
pub use exec::Execution;
pub use psf::{PsfConfig, PsfFamily, PsfViolation};
pub use spread::{Label, Spread};
