//! Corpus-driven XML Schema subsetting and parser generation.

pub mod analyzer;
pub mod binding;
pub mod builtins;
pub mod emit;
pub mod interp;
pub mod loader;
pub mod model;
pub mod pipeline;
pub mod simplify;
