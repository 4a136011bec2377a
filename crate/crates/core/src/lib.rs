//! Verification engine for structural Ramsey theory over finite relational
//! structures.
//!
//! The crate decides arrow relations and embedding Ramsey degrees by
//! adversarial coloring search, checks the convex Ramsey property through
//! exact rational linear programming, verifies amalgamation-class axioms at
//! a size bound and builds limit approximants, and computes finite-window
//! shadows of orbit closures for precompact expansions. Every verdict can be
//! written out as a replayable [`certificate::Certificate`].

pub mod canon;
pub mod certificate;
pub mod convex;
pub mod embedding;
pub mod error;
pub mod flows;
pub mod fraisse;
pub mod ramsey;
pub mod rational;
pub mod structure;
pub mod text;

pub use canon::{automorphisms, canonical_form, find_isomorphism, is_isomorphic, CanonicalForm};
pub use embedding::{
    copies_of_tuple, embeds, enumerate_embeddings, Embedding, TupleCopy,
};
pub use error::{Error, ParseError, Result};
pub use structure::{build, FinStructure, Signature, Symbol, Tuple};
