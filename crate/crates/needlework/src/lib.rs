//! A desk-scale laboratory for the polynomial method over finite fields:
//! Kakeya and Nikodym sets with rank certificates, randomness mergers,
//! locally correctable Reed-Muller codes, additive-combinatorics energy
//! machinery, incidence and joints counting, Sylvester-Gallai and design
//! matrices, and Sinkhorn-style matrix scaling.
//!
//! Everything is sized so that claims can be checked exhaustively. Field
//! arithmetic is exact, incidence geometry over the rationals is exact,
//! and the only floating point in the crate is quarantined in the modules
//! that genuinely need it (rigid-motion lines and matrix scaling).
//!
//! The runnable examples are the front door; each one walks a single
//! capability end to end:
//!
//! ```text
//! cargo run --example kakeya_sets
//! cargo run --example polynomial_certificates
//! cargo run --example merger_attack
//! cargo run --example bourgain_bias
//! cargo run --example local_correction
//! cargo run --example additive_energy
//! cargo run --example bsg_extraction
//! cargo run --example incidence_counts
//! cargo run --example joints_and_distances
//! cargo run --example sylvester_gallai
//! cargo run --example matrix_scaling
//! ```
//!
//! The same functionality is scriptable through the one thin binary,
//! `needle`, which reads and writes the JSON/CSV formats documented in
//! the README and emits a machine-readable run report per invocation.

pub mod acceptance;
pub mod addcomb;
pub mod cli;
pub mod extract;
pub mod field;
pub mod incidence;
pub mod kakeya;
pub mod lcc;
pub mod linalg;
pub mod poly;
pub mod report;
pub mod scaling;
pub mod sgdesign;

pub use field::{Field, FieldElement, FieldError, FieldSpec};
pub use poly::{MultiPoly, PolyError, UniPoly};
