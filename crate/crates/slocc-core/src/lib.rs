//! Exact classification of tripartite 2xMxN pure states under SLOCC.
//!
//! A 2xMxN state is stored as a pair of MxN matrices over the Gaussian
//! rationals Q(i). Two states are SLOCC-equivalent iff the pairs are related
//! by invertible local operators (T, P, Q). The library reduces a pair to a
//! canonical block form built from the rank staircase of the pencil
//! a*G1 + b*G2 and the Jordan structure of its square part, normalized under
//! projective changes of the pencil parameter. All arithmetic is exact.

pub mod canonical;
pub mod enumerate;
mod error;
pub mod exactmath;
pub mod jordan;
pub mod pencil;
pub mod reduction;
pub mod state;
pub mod verify;

pub use canonical::{classify, equivalent, CanonicalForm};
pub use enumerate::{count_table, enumerate_families, instantiate, ClassFamily};
pub use error::{Error, Result};
pub use exactmath::{GaussRat, Matrix};
pub use jordan::SegreSymbol;
pub use pencil::{PencilSignature, ProjectivePoint};
pub use reduction::{BlockNormalPair, DeficiencyInfo, IloTriple, ReductionTranscript};
pub use state::MatrixPair;
pub use verify::Seed;
