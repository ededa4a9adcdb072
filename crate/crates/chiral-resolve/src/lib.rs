//! chiral-resolve: an exact-arithmetic engine for graded fermionic Fock
//! spaces and the modules they build over the polynomial ring of odd boson
//! modes.
//!
//! Every object in scope is graded by a non-negative integer energy and
//! every operator is homogeneous, so each claim (quotient dimensions, free
//! resolutions, Koszul exactness, semi-infinite de Rham cohomology,
//! symplectic wedge quotients, q-series characters) reduces to finite exact
//! rational linear algebra per degree. The `suites` module packages the
//! checks into machine-readable reports; the `chiral-resolve` binary drives
//! them from the command line.

pub mod linalg;
pub mod fock;
pub mod poly;
pub mod characters;
pub mod graded;
pub mod bosefermi;
pub mod screening;
pub mod homology;
pub mod symplectic;
pub mod suites;

pub mod report;
pub mod cli;
