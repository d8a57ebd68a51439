//! Parsers for the `orders` binding model: 8 classes.
#![allow(unused_imports, unused_variables, unused_mut, dead_code, unreachable_code, non_camel_case_types, clippy::all)]

pub mod dispatch;
pub mod values;
pub mod address;
pub mod comment;
pub mod gift;
pub mod line;
pub mod money;
pub mod order;
pub mod orders;
pub mod party;

pub use dispatch::{parse_bytes, parse_document, Root};
pub use values::ToValue;
