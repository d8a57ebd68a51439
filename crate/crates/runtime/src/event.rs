use std::fmt;

use crate::name::QName;

/// A namespace-resolved attribute. Namespace declarations never appear here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: QName,
    pub value: String,
}

/// One pull event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XmlEvent {
    StartElement {
        name: QName,
        attributes: Vec<Attribute>,
    },
    /// Character data; adjacent runs (including CDATA sections and text split
    /// by comments or processing instructions) arrive as one event.
    Text(String),
    EndElement(QName),
    EndDocument,
}

/// 1-based line and column (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}
