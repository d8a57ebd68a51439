//! Parse context shared by generated parsers: event access, subtree skipping
//! and the strict/lenient violation policy.

use std::fmt;

use thiserror::Error;

use crate::event::{Attribute, Location, XmlEvent};
use crate::name::{QName, XSI_NS};
use crate::reader::{is_xml_space, XmlError, XmlReader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Strict,
    Lenient,
}

/// The violation classes the lenient policy recovers from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationCode {
    UnknownElement,
    MissingRequired,
    BadSimpleValue,
    UnexpectedText,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::UnknownElement => "UNKNOWN_ELEMENT",
            ViolationCode::MissingRequired => "MISSING_REQUIRED",
            ViolationCode::BadSimpleValue => "BAD_SIMPLE_VALUE",
            ViolationCode::UnexpectedText => "UNEXPECTED_TEXT",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub location: Location,
    pub code: ViolationCode,
    pub message: String,
    /// Lexical value that failed conversion, for `BAD_SIMPLE_VALUE`.
    pub raw: Option<String>,
}

impl Warning {
    /// `WARN <file>:<line>:<col> <code> <message>`
    pub fn log_line(&self, file: &str) -> String {
        format!(
            "WARN {file}:{}:{} {} {}",
            self.location.line, self.location.column, self.code, self.message
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Violation<'v> {
    UnknownElement(&'v QName),
    MissingRequired { class: &'v str, field: &'v str },
    BadSimpleValue { name: &'v QName, raw: &'v str },
    UnexpectedText(&'v str),
}

impl Violation<'_> {
    pub fn code(&self) -> ViolationCode {
        match self {
            Violation::UnknownElement(_) => ViolationCode::UnknownElement,
            Violation::MissingRequired { .. } => ViolationCode::MissingRequired,
            Violation::BadSimpleValue { .. } => ViolationCode::BadSimpleValue,
            Violation::UnexpectedText(_) => ViolationCode::UnexpectedText,
        }
    }
}

/// What the lenient policy did about a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recovery {
    /// The unknown subtree was consumed; holds the number of elements skipped.
    SkippedSubtree(usize),
    /// The required field stays unset.
    LeftAbsent,
    /// The field stays unset; the raw lexical value is kept on the warning.
    KeptRaw(String),
    DiscardedText,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("MALFORMED_XML {0}")]
    Malformed(#[from] XmlError),
    #[error("{location}: UNKNOWN_ELEMENT unexpected element {name}")]
    UnknownElement { name: QName, location: Location },
    #[error("{location}: MISSING_REQUIRED {class}.{field} is required")]
    MissingRequired {
        class: String,
        field: String,
        location: Location,
    },
    #[error("{location}: BAD_SIMPLE_VALUE {name} has invalid value {raw:?}")]
    BadSimpleValue {
        name: QName,
        raw: String,
        location: Location,
    },
    #[error("{location}: UNEXPECTED_TEXT text {text:?} in element-only content")]
    UnexpectedText { text: String, location: Location },
    #[error("{location}: unknown root element {name}")]
    UnknownRoot { name: QName, location: Location },
    #[error("{location}: unexpected end of document")]
    UnexpectedEnd { location: Location },
}

impl ParseError {
    pub fn code(&self) -> Option<ViolationCode> {
        match self {
            ParseError::UnknownElement { .. } => Some(ViolationCode::UnknownElement),
            ParseError::MissingRequired { .. } => Some(ViolationCode::MissingRequired),
            ParseError::BadSimpleValue { .. } => Some(ViolationCode::BadSimpleValue),
            ParseError::UnexpectedText { .. } => Some(ViolationCode::UnexpectedText),
            _ => None,
        }
    }
}

pub type ParseResult<T> = Result<T, ParseError>;

/// One per document. Generated parsers pull events through it and report
/// violations to it; strict mode turns violations into errors, lenient mode
/// into warnings.
#[derive(Debug)]
pub struct ParseContext<'a> {
    reader: XmlReader<'a>,
    mode: Mode,
    warnings: Vec<Warning>,
}

impl<'a> ParseContext<'a> {
    pub fn new(src: &'a str, mode: Mode) -> Self {
        Self::with_reader(XmlReader::new(src), mode)
    }

    pub fn from_bytes(bytes: &'a [u8], mode: Mode) -> ParseResult<Self> {
        Ok(Self::with_reader(XmlReader::from_bytes(bytes)?, mode))
    }

    pub fn with_reader(reader: XmlReader<'a>, mode: Mode) -> Self {
        ParseContext {
            reader,
            mode,
            warnings: Vec::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn reader(&self) -> &XmlReader<'a> {
        &self.reader
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<Warning> {
        std::mem::take(&mut self.warnings)
    }

    #[inline]
    pub fn next_event(&mut self) -> ParseResult<XmlEvent> {
        Ok(self.reader.next_event()?)
    }

    pub fn location(&mut self) -> Location {
        self.reader.location()
    }

    /// Consumes everything up to and including the end tag matching the
    /// start event just returned. Returns the number of elements skipped,
    /// counting the subtree root.
    pub fn skip_subtree(&mut self) -> ParseResult<usize> {
        let mut depth = 1usize;
        let mut count = 1usize;
        loop {
            match self.reader.next_event()? {
                XmlEvent::StartElement { .. } => {
                    depth += 1;
                    count += 1;
                }
                XmlEvent::EndElement(_) => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(count);
                    }
                }
                XmlEvent::Text(_) => {}
                XmlEvent::EndDocument => return Err(self.unexpected_end()),
            }
        }
    }

    /// Reads the character content of a simple-typed element through its end
    /// tag. Child elements are unknown-element violations.
    pub fn read_simple_text(&mut self) -> ParseResult<String> {
        let mut text = String::new();
        loop {
            match self.reader.next_event()? {
                XmlEvent::Text(t) => {
                    if text.is_empty() {
                        text = t;
                    } else {
                        text.push_str(&t);
                    }
                }
                XmlEvent::StartElement { name, .. } => self.unknown_element(&name)?,
                XmlEvent::EndElement(_) => return Ok(text),
                XmlEvent::EndDocument => return Err(self.unexpected_end()),
            }
        }
    }

    /// Applies the tolerance policy to one violation. In strict mode this is
    /// always an error.
    pub fn lenient_recover(&mut self, violation: Violation<'_>) -> ParseResult<Recovery> {
        let location = self.reader.location();
        if self.mode == Mode::Strict {
            return Err(match violation {
                Violation::UnknownElement(name) => ParseError::UnknownElement {
                    name: name.clone(),
                    location,
                },
                Violation::MissingRequired { class, field } => ParseError::MissingRequired {
                    class: class.to_string(),
                    field: field.to_string(),
                    location,
                },
                Violation::BadSimpleValue { name, raw } => ParseError::BadSimpleValue {
                    name: name.clone(),
                    raw: raw.to_string(),
                    location,
                },
                Violation::UnexpectedText(text) => ParseError::UnexpectedText {
                    text: text.to_string(),
                    location,
                },
            });
        }
        let (message, raw, recovery) = match violation {
            Violation::UnknownElement(name) => {
                let skipped = self.skip_subtree()?;
                (
                    format!("skipped unknown element {name}"),
                    None,
                    Recovery::SkippedSubtree(skipped),
                )
            }
            Violation::MissingRequired { class, field } => (
                format!("{class}.{field} is required but absent"),
                None,
                Recovery::LeftAbsent,
            ),
            Violation::BadSimpleValue { name, raw } => (
                format!("{name} has invalid value {raw:?}"),
                Some(raw.to_string()),
                Recovery::KeptRaw(raw.to_string()),
            ),
            Violation::UnexpectedText(text) => (
                format!("discarded text {:?}", abbreviate(text)),
                None,
                Recovery::DiscardedText,
            ),
        };
        self.warnings.push(Warning {
            location,
            code: violation.code(),
            message,
            raw,
        });
        Ok(recovery)
    }

    pub fn unknown_element(&mut self, name: &QName) -> ParseResult<()> {
        self.lenient_recover(Violation::UnknownElement(name))
            .map(drop)
    }

    pub fn missing_required(&mut self, class: &str, field: &str) -> ParseResult<()> {
        self.lenient_recover(Violation::MissingRequired { class, field })
            .map(drop)
    }

    pub fn bad_simple_value(&mut self, name: &QName, raw: &str) -> ParseResult<()> {
        self.lenient_recover(Violation::BadSimpleValue { name, raw })
            .map(drop)
    }

    /// Whitespace-only text is ignorable and never a violation.
    pub fn unexpected_text(&mut self, text: &str) -> ParseResult<()> {
        if text.chars().all(is_xml_space) {
            return Ok(());
        }
        self.lenient_recover(Violation::UnexpectedText(text))
            .map(drop)
    }

    /// The resolved `xsi:type` of the element whose start event was just read.
    pub fn xsi_type(&self, attributes: &[Attribute]) -> Option<QName> {
        attributes
            .iter()
            .find(|a| a.name.is(XSI_NS, "type"))
            .and_then(|a| self.reader.resolve_qname_value(&a.value))
    }

    pub fn is_nil(&self, attributes: &[Attribute]) -> bool {
        attributes
            .iter()
            .any(|a| a.name.is(XSI_NS, "nil") && matches!(a.value.trim(), "true" | "1"))
    }

    /// Descends through single-child wrapper elements. Positioned after the
    /// outer wrapper's start tag; finds `path[0]` among its children, then
    /// `path[1]` inside that, and so on, and calls `inner` at the innermost
    /// start tag. Consumes through the outer wrapper's end tag.
    pub fn descend<T, F>(&mut self, path: &[(&str, &str)], inner: F) -> ParseResult<Option<T>>
    where
        F: FnOnce(&mut Self, &[Attribute]) -> ParseResult<T>,
    {
        let Some((&(ns, local), rest)) = path.split_first() else {
            return Ok(None);
        };
        let mut inner = Some(inner);
        let mut value = None;
        loop {
            match self.reader.next_event()? {
                XmlEvent::StartElement { name, attributes } => {
                    if name.is(ns, local) && inner.is_some() {
                        let f = inner.take().expect("checked above");
                        value = if rest.is_empty() {
                            Some(f(self, &attributes)?)
                        } else {
                            self.descend(rest, f)?
                        };
                    } else {
                        self.unknown_element(&name)?;
                    }
                }
                XmlEvent::Text(text) => self.unexpected_text(&text)?,
                XmlEvent::EndElement(_) => return Ok(value),
                XmlEvent::EndDocument => return Err(self.unexpected_end()),
            }
        }
    }

    pub fn unexpected_end(&mut self) -> ParseError {
        ParseError::UnexpectedEnd {
            location: self.reader.location(),
        }
    }

    pub fn unknown_root(&mut self, name: &QName) -> ParseError {
        ParseError::UnknownRoot {
            name: name.clone(),
            location: self.reader.location(),
        }
    }

    /// Reads up to the root start tag.
    pub fn root_start(&mut self) -> ParseResult<(QName, Vec<Attribute>)> {
        loop {
            match self.reader.next_event()? {
                XmlEvent::StartElement { name, attributes } => return Ok((name, attributes)),
                XmlEvent::EndDocument => return Err(self.unexpected_end()),
                _ => {}
            }
        }
    }

    /// Consumes the rest of the document after the root element.
    pub fn finish(&mut self) -> ParseResult<()> {
        while self.reader.next_event()? != XmlEvent::EndDocument {}
        Ok(())
    }
}

fn abbreviate(text: &str) -> String {
    let trimmed = text.trim();
    if trimmed.chars().count() > 40 {
        let mut s: String = trimmed.chars().take(40).collect();
        s.push('…');
        s
    } else {
        trimmed.to_string()
    }
}

/// Pulls every event and discards it. The baseline for parse-overhead
/// measurements.
pub fn traverse(src: &str) -> ParseResult<usize> {
    let mut reader = XmlReader::new(src);
    let mut events = 0usize;
    loop {
        let event = reader.next_event()?;
        events += 1;
        if event == XmlEvent::EndDocument {
            return Ok(events);
        }
    }
}
