//! Reference recommendation for wiki articles through their wikilinks.
//!
//! The pipeline has two steps. Step I decides, for every wikilink of a target
//! page, whether the linked page is a useful source of references
//! ([`linkclassify`]). Step II ranks the references of the accepted links and
//! returns a top-k list ([`refrank`]). [`evaluate`] scores both steps against
//! the references the target already carries, and [`pipeline`] wires the
//! stages together.
//!
//! The crate is `no_std` and only needs `alloc`. Reading and writing files is
//! left to the companion `wikiref` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod context;
pub mod corpus;
mod error;
pub mod evaluate;
pub mod linkclassify;
pub mod pipeline;
pub mod refrank;
pub mod seed;
pub mod synth;
pub mod textsim;

pub use error::{Error, Result};

/// Version string embedded in every persisted artifact.
pub const ARTIFACT_VERSION: &str = concat!("wikiref-", env!("CARGO_PKG_VERSION"));
