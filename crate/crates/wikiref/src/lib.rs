//! Command-line pipeline around `wikiref-core`: corpus and vector files,
//! run configuration, model and report artifacts.

pub mod artifacts;
pub mod cli;
pub mod commands;
pub mod config;
pub mod corpus_file;
pub mod error;
pub mod render;
pub mod vectors;
pub mod workspace;
