//! Streaming event interface for generated XML parsers.
//!
//! [`XmlReader`] is a small namespace-aware pull parser; [`ParseContext`]
//! wraps it with the strict/lenient violation policy and the helpers that
//! generated code calls (subtree skipping, simple-text reads, wrapper descent).

mod context;
pub mod encoding;
mod event;
mod name;
mod reader;
mod value;

pub use context::{
    traverse, Mode, ParseContext, ParseError, ParseResult, Recovery, Violation, ViolationCode,
    Warning,
};
pub use event::{Attribute, Location, XmlEvent};
pub use name::{is_ncname, QName, XMLNS_NS, XML_NS, XSI_NS};
pub use reader::{XmlError, XmlReader};
pub use value::Value;
