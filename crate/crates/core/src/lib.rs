//! Exact Gram matrices, Specht modules and elementary divisors for
//! Iwahori–Hecke algebras of symmetric groups.
//!
//! Scalars are [`LaurentPoly`] values over Z, Q or F_p. Everything is exact;
//! there is no floating point anywhere.

pub mod coxeter;
pub mod error;
pub mod hecke;
mod poly;
pub mod qlaurent;
pub mod snf;
pub mod specht;
pub mod tableaux;
pub mod verify;

pub use coxeter::{distinguished_reps, w_ab, w_lambda, Perm, Word};
pub use error::{Error, Result};
pub use hecke::HeckeElt;
pub use qlaurent::{
    cyclo_display, cyclotomic, hook_polynomial, normalize_and_gcd, quantum_factorial, quantum_integer,
    CoeffRing, CycloDisplay, LaurentPoly,
};
pub use snf::{EDList, JumpNotation, ObstructionReport, ObstructionStatus};
pub use specht::{gram_matrix, GramKind, GramMatrix, ModuleVector};
pub use tableaux::{Composition, PairTableau, Partition, Tableau};
