//! Exact computation of injective capacities and cogenerator numbers of
//! modules over computable commutative rings, together with explicit
//! construction of global module embeddings from local data.
//!
//! Two ring universes are shipped: finite-dimensional commutative algebras
//! over a prime field given by structure constants ([`artinian`]), and the
//! univariate polynomial ring over a prime field ([`pid`]). Both plug into
//! the same synthesis engine ([`synthesis`]) through a prime-site adapter
//! interface. Everything is validated against a deliberately naive
//! brute-force [`oracle`].

pub mod field;
pub mod genpos;
pub mod artinian;
pub mod pid;
pub mod synthesis;
pub mod graded;
pub mod oracle;
pub mod sweep;
pub mod par;

pub use field::{El, Field, Matrix, Poly};
