//! Fixture suite, generated parsers and shared checks for xsdbind.
//!
//! The build script runs the full pipeline over every fixture and variant
//! and compiles the output into this crate; [`PARSERS`] lists the results.

pub mod fixtures;
pub mod synth;

use xsdbind_runtime::{Mode, ParseResult, Value, Warning};

pub struct GeneratedParser {
    pub name: &'static str,
    pub fixture: &'static str,
    pub variant: &'static str,
    /// The binding model the parser was generated from.
    pub model_json: &'static str,
    pub generated_dir: &'static str,
    pub parse: fn(&str, Mode) -> ParseResult<(Value, Vec<Warning>)>,
}

pub mod generated {
    use super::*;
    include!(concat!(env!("OUT_DIR"), "/generated.rs"));
}

pub use generated::PARSERS;

pub fn parser(fixture: &str, variant: &str) -> &'static GeneratedParser {
    PARSERS
        .iter()
        .find(|p| p.fixture == fixture && p.variant == variant)
        .unwrap_or_else(|| panic!("no parser {fixture}_{variant}"))
}

/// Absolute path of the fixture directory.
pub fn fixtures_root() -> std::path::PathBuf {
    fixtures::fixtures_dir(std::path::Path::new(env!("CARGO_MANIFEST_DIR")))
}
