//! Concern detection over predicate-argument structure.
//!
//! The crate is split along the processing pipeline:
//!
//! * [`wordnet`] parses WordNet database files and scores synset pairs with
//!   Wu-Palmer similarity.
//! * [`lexicon`] holds the moral-foundation lexicon and its three WordNet
//!   expansions.
//! * [`frames`] ingests or heuristically extracts proposition frames and
//!   exposes the role scopes used elsewhere.
//! * [`induction`] turns a domain corpus into candidate propositions for a
//!   human curator and compiles the curated concern-type lexicon.
//! * [`detection`] produces explainable per-tweet records.
//! * [`evaluation`] scores records against annotated ground truth.

pub mod detection;
pub mod error;
pub mod evaluation;
pub mod frames;
pub mod induction;
pub mod io;
pub mod lexicon;
pub mod text;
pub mod wordnet;

pub use error::{Error, Result};
