//! All-or-nothing transforms over finite fields: constructions,
//! verification, exhaustive canonical-form searches, equivalence
//! classification, and the bridges to orthogonal arrays and resilient
//! functions.
//!
//! A linear AONT is an invertible matrix M over GF(q) in which every t-by-t
//! submatrix is invertible; general AONT are explicit bijection tables
//! verified through the unbiased-array characterization. The search engine
//! exhaustively enumerates reduced (2,q,q)-AONT for prime powers q <= 11
//! and partitions the results into equivalence classes.

pub mod construct;
pub mod equiv;
pub mod field;
pub mod matrix;
pub mod search;
pub mod table1;
pub mod transform;

pub use field::{Field, FieldError};
pub use matrix::{MatrixGF, MatrixOp, StandardFormInfo, VerifyReport, Witness};
pub use search::{SearchMode, SearchResult, SearchSpec};
