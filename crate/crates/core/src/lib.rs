//! Strong positive partial transposition (SPPT), quantum discord and the
//! relation between them for `2 x N` and `3 x N` bipartite states.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is plain
//! dense complex linear algebra on small matrices; IO lives in the companion
//! `sppt` crate.
//!
//! ```
//! use sppt_core::{families, factorization, Tolerance};
//!
//! let tol = Tolerance::default();
//! let bell = families::BellDiagonalParams::new([0.25; 4]).unwrap();
//! let state = families::bell_diagonal(&bell, &tol).unwrap();
//! assert!(factorization::is_sppt(&state, &tol).unwrap().is_sppt);
//! ```

#![no_std]
// Once std is linked (tests), its inherent f64 methods shadow `num_traits::Float`
// and those imports look unused; they are required in the plain no_std build.

extern crate alloc;

pub mod bipartite;
pub mod discord;
pub mod error;
pub mod factorization;
pub mod families;
pub mod linalg;
pub mod matrix;
pub mod optimize;
pub mod random;
pub mod tolerance;

pub use bipartite::BipartiteState;
pub use error::Error;
pub use matrix::{c64, ComplexMatrix, C64};
pub use tolerance::Tolerance;
