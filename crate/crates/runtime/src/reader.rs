//! Pull parser producing namespace-resolved [`XmlEvent`]s.
//!
//! Supports the XML 1.0 subset that data documents and schema files use:
//! elements, attributes, namespaces, character and the five predefined entity
//! references, CDATA sections, comments and processing instructions. A
//! DOCTYPE declaration is skipped without being interpreted, so any entity it
//! declares remains undefined.

use std::borrow::Cow;

use thiserror::Error;

use crate::encoding;
use crate::event::{Attribute, Location, XmlEvent};
use crate::name::{QName, XMLNS_NS, XML_NS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {reason}")]
pub struct XmlError {
    pub location: Location,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Prolog,
    Content,
    Epilog,
    Done,
}

#[derive(Debug)]
struct Open {
    /// Byte range of the lexical name in the start tag.
    raw: (usize, usize),
    name: QName,
    bindings_len: usize,
}

#[derive(Debug, Default)]
struct LineCache {
    offset: usize,
    line: usize,
    column: usize,
}

impl LineCache {
    fn locate(&mut self, src: &str, target: usize) -> Location {
        let target = target.min(src.len());
        if target < self.offset || self.line == 0 {
            *self = LineCache {
                offset: 0,
                line: 1,
                column: 1,
            };
        }
        for c in src[self.offset..target].chars() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        self.offset = target;
        Location {
            line: self.line,
            column: self.column,
        }
    }
}

#[derive(Debug)]
struct State {
    pos: usize,
    phase: Phase,
    open: Vec<Open>,
    bindings: Vec<(String, String)>,
    pending_end: bool,
    pending_pop: bool,
    event_start: usize,
    lines: LineCache,
}

/// Streaming reader over an in-memory document.
#[derive(Debug)]
pub struct XmlReader<'a> {
    src: Cow<'a, str>,
    st: State,
}

impl<'a> XmlReader<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::from_cow(Cow::Borrowed(src))
    }

    /// Decodes UTF-8 or BOM-marked UTF-16 input.
    pub fn from_bytes(bytes: &'a [u8]) -> Result<Self, XmlError> {
        let text = encoding::decode(bytes).map_err(|reason| XmlError {
            location: Location { line: 1, column: 1 },
            reason,
        })?;
        Ok(Self::from_cow(text))
    }

    fn from_cow(src: Cow<'a, str>) -> Self {
        let skip = if src.starts_with('\u{FEFF}') { 3 } else { 0 };
        XmlReader {
            src,
            st: State {
                pos: skip,
                phase: Phase::Prolog,
                open: Vec::new(),
                bindings: Vec::new(),
                pending_end: false,
                pending_pop: false,
                event_start: skip,
                lines: LineCache::default(),
            },
        }
    }

    pub fn next_event(&mut self) -> Result<XmlEvent, XmlError> {
        let XmlReader { src, st } = self;
        st.next(src)
    }

    /// Location of the most recently returned event.
    pub fn location(&mut self) -> Location {
        let XmlReader { src, st } = self;
        let at = st.event_start;
        st.lines.locate(src, at)
    }

    /// Number of currently open elements.
    pub fn depth(&self) -> usize {
        self.st.open.len() - usize::from(self.st.pending_pop)
    }

    /// Resolves a namespace prefix in the scope of the element whose start
    /// or end event was returned last.
    pub fn resolve_prefix(&self, prefix: &str) -> Option<&str> {
        self.st.resolve(prefix)
    }

    /// Resolves a QName-valued attribute or text (e.g. `xsi:type="gml:PointType"`);
    /// an unprefixed value takes the default namespace.
    pub fn resolve_qname_value(&self, lexical: &str) -> Option<QName> {
        let lexical = lexical.trim_matches(is_xml_space);
        let (prefix, local) = match lexical.split_once(':') {
            Some((p, l)) => (p, l),
            None => ("", lexical),
        };
        if !crate::name::is_ncname(local) {
            return None;
        }
        let namespace = self.st.resolve(prefix)?;
        Some(QName::new(namespace, local))
    }

    /// In-scope `(prefix, uri)` bindings, innermost last. Later entries shadow
    /// earlier ones with the same prefix.
    pub fn bindings(&self) -> &[(String, String)] {
        &self.st.bindings
    }
}

pub(crate) fn is_xml_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

fn is_space_byte(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r')
}

fn is_name_start_byte(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b':' || b >= 0x80
}

fn is_name_byte(b: u8) -> bool {
    is_name_start_byte(b) || b.is_ascii_digit() || b == b'-' || b == b'.'
}

impl State {
    fn resolve(&self, prefix: &str) -> Option<&str> {
        if prefix == "xml" {
            return Some(XML_NS);
        }
        match self.bindings.iter().rev().find(|(p, _)| p == prefix) {
            Some((_, uri)) => Some(uri.as_str()),
            None if prefix.is_empty() => Some(""),
            None => None,
        }
    }

    fn err<T>(&mut self, src: &str, at: usize, reason: impl Into<String>) -> Result<T, XmlError> {
        let location = self.lines.locate(src, at);
        Err(XmlError {
            location,
            reason: reason.into(),
        })
    }

    fn next(&mut self, src: &str) -> Result<XmlEvent, XmlError> {
        if self.pending_pop {
            self.pending_pop = false;
            if let Some(open) = self.open.pop() {
                self.bindings.truncate(open.bindings_len);
            }
            if self.open.is_empty() {
                self.phase = Phase::Epilog;
            }
        }
        if self.pending_end {
            self.pending_end = false;
            self.pending_pop = true;
            let name = self.open.last().map(|o| o.name.clone()).unwrap_or_default();
            return Ok(XmlEvent::EndElement(name));
        }
        loop {
            match self.phase {
                Phase::Done => return Ok(XmlEvent::EndDocument),
                Phase::Prolog | Phase::Epilog => {
                    let bytes = src.as_bytes();
                    while self.pos < bytes.len() && is_space_byte(bytes[self.pos]) {
                        self.pos += 1;
                    }
                    self.event_start = self.pos;
                    if self.pos >= bytes.len() {
                        if self.phase == Phase::Prolog {
                            return self.err(src, self.pos, "document has no root element");
                        }
                        self.phase = Phase::Done;
                        return Ok(XmlEvent::EndDocument);
                    }
                    let rest = &src[self.pos..];
                    if rest.starts_with("<?") {
                        self.skip_pi(src)?;
                    } else if rest.starts_with("<!--") {
                        self.skip_comment(src)?;
                    } else if rest.starts_with("<!DOCTYPE") && self.phase == Phase::Prolog {
                        self.skip_doctype(src)?;
                    } else if self.phase == Phase::Prolog
                        && bytes.len() > self.pos + 1
                        && is_name_start_byte(bytes[self.pos + 1])
                        && bytes[self.pos] == b'<'
                    {
                        self.phase = Phase::Content;
                        return self.start_tag(src);
                    } else {
                        return self.err(src, self.pos, "content outside the root element");
                    }
                }
                Phase::Content => return self.content(src),
            }
        }
    }

    fn content(&mut self, src: &str) -> Result<XmlEvent, XmlError> {
        let bytes = src.as_bytes();
        let mut text: Option<String> = None;
        self.event_start = self.pos;
        loop {
            if self.pos >= bytes.len() {
                let name = self
                    .open
                    .last()
                    .map(|o| o.name.to_string())
                    .unwrap_or_default();
                return self.err(
                    src,
                    self.pos,
                    format!("unexpected end of input inside <{name}>"),
                );
            }
            match bytes[self.pos] {
                b'<' => {
                    let rest = &src[self.pos..];
                    if rest.starts_with("<!--") {
                        self.skip_comment(src)?;
                    } else if rest.starts_with("<?") {
                        self.skip_pi(src)?;
                    } else if rest.starts_with("<![CDATA[") {
                        let body_start = self.pos + 9;
                        let Some(len) = src[body_start..].find("]]>") else {
                            return self.err(src, self.pos, "unterminated CDATA section");
                        };
                        push_normalized(
                            text.get_or_insert_with(String::new),
                            &src[body_start..body_start + len],
                        );
                        self.pos = body_start + len + 3;
                    } else if let Some(t) = text.take() {
                        return Ok(XmlEvent::Text(t));
                    } else {
                        self.event_start = self.pos;
                        if rest.starts_with("</") {
                            return self.end_tag(src);
                        }
                        return self.start_tag(src);
                    }
                }
                b'&' => {
                    let (c, next) = self.entity(src, self.pos)?;
                    text.get_or_insert_with(String::new).push(c);
                    self.pos = next;
                }
                _ => {
                    let end = bytes[self.pos..]
                        .iter()
                        .position(|&b| b == b'<' || b == b'&')
                        .map_or(bytes.len(), |p| self.pos + p);
                    let chunk = &src[self.pos..end];
                    if chunk.contains("]]>") {
                        return self.err(src, self.pos, "']]>' is not allowed in character data");
                    }
                    push_normalized(text.get_or_insert_with(String::new), chunk);
                    self.pos = end;
                }
            }
        }
    }

    /// Decodes the reference starting at `at` (which holds `&`).
    fn entity(&mut self, src: &str, at: usize) -> Result<(char, usize), XmlError> {
        let Some(len) = src[at..].find(';') else {
            return self.err(src, at, "unterminated entity reference");
        };
        let body = &src[at + 1..at + len];
        let next = at + len + 1;
        let c = match body {
            "lt" => '<',
            "gt" => '>',
            "amp" => '&',
            "apos" => '\'',
            "quot" => '"',
            _ if body.starts_with("#x") => match u32::from_str_radix(&body[2..], 16)
                .ok()
                .and_then(char::from_u32)
            {
                Some(c) if is_xml_char(c) => c,
                _ => return self.err(src, at, format!("invalid character reference &{body};")),
            },
            _ if body.starts_with('#') => {
                match body[1..].parse::<u32>().ok().and_then(char::from_u32) {
                    Some(c) if is_xml_char(c) => c,
                    _ => return self.err(src, at, format!("invalid character reference &{body};")),
                }
            }
            _ => return self.err(src, at, format!("undefined entity &{body};")),
        };
        Ok((c, next))
    }

    fn skip_comment(&mut self, src: &str) -> Result<(), XmlError> {
        match src[self.pos + 4..].find("-->") {
            Some(len) => {
                self.pos += 4 + len + 3;
                Ok(())
            }
            None => self.err(src, self.pos, "unterminated comment"),
        }
    }

    fn skip_pi(&mut self, src: &str) -> Result<(), XmlError> {
        match src[self.pos + 2..].find("?>") {
            Some(len) => {
                self.pos += 2 + len + 2;
                Ok(())
            }
            None => self.err(src, self.pos, "unterminated processing instruction"),
        }
    }

    fn skip_doctype(&mut self, src: &str) -> Result<(), XmlError> {
        let bytes = src.as_bytes();
        let start = self.pos;
        let mut i = self.pos + 9;
        let mut depth = 0usize;
        let mut quote: Option<u8> = None;
        while i < bytes.len() {
            let b = bytes[i];
            match quote {
                Some(q) if b == q => quote = None,
                Some(_) => {}
                None => match b {
                    b'"' | b'\'' => quote = Some(b),
                    b'[' => depth += 1,
                    b']' => depth = depth.saturating_sub(1),
                    b'>' if depth == 0 => {
                        self.pos = i + 1;
                        return Ok(());
                    }
                    _ => {}
                },
            }
            i += 1;
        }
        self.err(src, start, "unterminated DOCTYPE declaration")
    }

    fn name(&mut self, src: &str) -> Result<(usize, usize), XmlError> {
        let bytes = src.as_bytes();
        let start = self.pos;
        if start >= bytes.len() || !is_name_start_byte(bytes[start]) {
            return self.err(src, start, "expected a name");
        }
        let mut end = start + 1;
        while end < bytes.len() && is_name_byte(bytes[end]) {
            end += 1;
        }
        self.pos = end;
        Ok((start, end))
    }

    fn skip_space(&mut self, src: &str) -> bool {
        let bytes = src.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && is_space_byte(bytes[self.pos]) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn start_tag(&mut self, src: &str) -> Result<XmlEvent, XmlError> {
        let bytes = src.as_bytes();
        let tag_start = self.pos;
        self.pos += 1;
        let raw = self.name(src)?;
        let mut raw_attrs: Vec<((usize, usize), String)> = Vec::new();
        let empty;
        loop {
            let had_space = self.skip_space(src);
            match bytes.get(self.pos) {
                None => return self.err(src, tag_start, "unterminated start tag"),
                Some(b'>') => {
                    self.pos += 1;
                    empty = false;
                    break;
                }
                Some(b'/') => {
                    if bytes.get(self.pos + 1) != Some(&b'>') {
                        return self.err(src, self.pos, "expected '/>'");
                    }
                    self.pos += 2;
                    empty = true;
                    break;
                }
                Some(_) => {
                    if !had_space {
                        return self.err(src, self.pos, "expected whitespace before attribute");
                    }
                    let attr_at = self.pos;
                    let name = self.name(src)?;
                    self.skip_space(src);
                    if bytes.get(self.pos) != Some(&b'=') {
                        return self.err(src, self.pos, "expected '=' after attribute name");
                    }
                    self.pos += 1;
                    self.skip_space(src);
                    let value = self.attribute_value(src)?;
                    let lexical = &src[name.0..name.1];
                    if raw_attrs.iter().any(|(r, _)| &src[r.0..r.1] == lexical) {
                        return self.err(src, attr_at, format!("duplicate attribute '{lexical}'"));
                    }
                    raw_attrs.push((name, value));
                }
            }
        }

        let bindings_len = self.bindings.len();
        for ((s, e), value) in &raw_attrs {
            let lexical = &src[*s..*e];
            if lexical == "xmlns" {
                self.bindings.push((String::new(), value.clone()));
            } else if let Some(prefix) = lexical.strip_prefix("xmlns:") {
                if value.is_empty() {
                    return self.err(
                        src,
                        *s,
                        format!("prefix '{prefix}' bound to an empty namespace"),
                    );
                }
                if prefix == "xmlns" || (prefix == "xml" && value != XML_NS) {
                    return self.err(
                        src,
                        *s,
                        format!("reserved prefix '{prefix}' cannot be rebound"),
                    );
                }
                self.bindings.push((prefix.to_string(), value.clone()));
            }
        }

        let name = match self.expand(&src[raw.0..raw.1], true) {
            Some(n) => n,
            None => {
                return self.err(
                    src,
                    raw.0,
                    format!("unbound prefix in element '{}'", &src[raw.0..raw.1]),
                )
            }
        };
        let mut attributes = Vec::with_capacity(raw_attrs.len());
        for ((s, e), value) in raw_attrs {
            let lexical = &src[s..e];
            if lexical == "xmlns" || lexical.starts_with("xmlns:") {
                continue;
            }
            let Some(attr_name) = self.expand(lexical, false) else {
                return self.err(src, s, format!("unbound prefix in attribute '{lexical}'"));
            };
            if attributes.iter().any(|a: &Attribute| a.name == attr_name) {
                return self.err(src, s, format!("duplicate attribute '{attr_name}'"));
            }
            attributes.push(Attribute {
                name: attr_name,
                value,
            });
        }
        self.open.push(Open {
            raw,
            name: name.clone(),
            bindings_len,
        });
        self.pending_end = empty;
        Ok(XmlEvent::StartElement { name, attributes })
    }

    fn expand(&self, lexical: &str, use_default: bool) -> Option<QName> {
        match lexical.split_once(':') {
            Some((prefix, local)) => {
                if prefix.is_empty() || local.is_empty() || local.contains(':') {
                    return None;
                }
                if prefix == "xmlns" {
                    return Some(QName::new(XMLNS_NS, local));
                }
                Some(QName::new(self.resolve(prefix)?, local))
            }
            None if use_default => Some(QName::new(self.resolve("").unwrap_or(""), lexical)),
            None => Some(QName::local(lexical)),
        }
    }

    fn attribute_value(&mut self, src: &str) -> Result<String, XmlError> {
        let bytes = src.as_bytes();
        let quote = match bytes.get(self.pos) {
            Some(&q @ (b'"' | b'\'')) => q,
            _ => return self.err(src, self.pos, "expected quoted attribute value"),
        };
        let open_at = self.pos;
        self.pos += 1;
        let mut value = String::new();
        loop {
            match bytes.get(self.pos) {
                None => return self.err(src, open_at, "unterminated attribute value"),
                Some(&b) if b == quote => {
                    self.pos += 1;
                    return Ok(value);
                }
                Some(b'<') => {
                    return self.err(src, self.pos, "'<' is not allowed in attribute values")
                }
                Some(b'&') => {
                    let (c, next) = self.entity(src, self.pos)?;
                    value.push(c);
                    self.pos = next;
                }
                Some(_) => {
                    let end = bytes[self.pos..]
                        .iter()
                        .position(|&b| b == quote || b == b'<' || b == b'&')
                        .map_or(bytes.len(), |p| self.pos + p);
                    let chunk = &src[self.pos..end];
                    if chunk.bytes().any(|b| matches!(b, b'\t' | b'\n' | b'\r')) {
                        let normalized = chunk.replace("\r\n", " ");
                        value.extend(
                            normalized
                                .chars()
                                .map(|c| if is_xml_space(c) { ' ' } else { c }),
                        );
                    } else {
                        value.push_str(chunk);
                    }
                    self.pos = end;
                }
            }
        }
    }

    fn end_tag(&mut self, src: &str) -> Result<XmlEvent, XmlError> {
        let at = self.pos;
        self.pos += 2;
        let raw = self.name(src)?;
        self.skip_space(src);
        if src.as_bytes().get(self.pos) != Some(&b'>') {
            return self.err(src, self.pos, "expected '>' to close end tag");
        }
        self.pos += 1;
        let lexical = &src[raw.0..raw.1];
        let Some(open) = self.open.last() else {
            return self.err(src, at, format!("unexpected end tag </{lexical}>"));
        };
        if &src[open.raw.0..open.raw.1] != lexical {
            let expected = src[open.raw.0..open.raw.1].to_string();
            return self.err(
                src,
                at,
                format!("end tag </{lexical}> does not match <{expected}>"),
            );
        }
        self.pending_pop = true;
        Ok(XmlEvent::EndElement(open.name.clone()))
    }
}

fn push_normalized(out: &mut String, chunk: &str) {
    if chunk.contains('\r') {
        out.push_str(&chunk.replace("\r\n", "\n").replace('\r', "\n"));
    } else {
        out.push_str(chunk);
    }
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r')
        || ('\u{20}'..='\u{D7FF}').contains(&c)
        || ('\u{E000}'..='\u{FFFD}').contains(&c)
        || (c as u32) >= 0x10000
}

#[cfg(test)]
mod tests {
    use super::*;
    use XmlEvent::*;

    fn events(src: &str) -> Result<Vec<XmlEvent>, XmlError> {
        let mut r = XmlReader::new(src);
        let mut out = Vec::new();
        loop {
            let e = r.next_event()?;
            let done = e == EndDocument;
            out.push(e);
            if done {
                return Ok(out);
            }
        }
    }

    fn start(local: &str) -> XmlEvent {
        StartElement {
            name: QName::local(local),
            attributes: vec![],
        }
    }

    #[test]
    fn empty_element() {
        assert_eq!(
            events("<a/>").unwrap(),
            vec![start("a"), EndElement(QName::local("a")), EndDocument]
        );
    }

    #[test]
    fn comments_skipped_and_text_coalesced() {
        assert_eq!(
            events("<a>x<!--c-->y</a>").unwrap(),
            vec![
                start("a"),
                Text("xy".into()),
                EndElement(QName::local("a")),
                EndDocument
            ]
        );
        assert_eq!(
            events("<a>1<![CDATA[<2>]]>&amp;<?pi x?>3</a>").unwrap()[1],
            Text("1<2>&3".into())
        );
    }

    #[test]
    fn unterminated_is_malformed() {
        assert!(events("<a>").is_err());
        assert!(events("<a><b></a>").is_err());
        assert!(events("<a></a><b/>").is_err());
        assert!(events("").is_err());
    }

    #[test]
    fn namespaces_resolve_and_scope() {
        let ev =
            events(r#"<p:a xmlns:p="urn:p" xmlns="urn:d" p:x="1" y="2"><b/><c xmlns=""/></p:a>"#)
                .unwrap();
        assert_eq!(
            ev[0],
            StartElement {
                name: QName::new("urn:p", "a"),
                attributes: vec![
                    Attribute {
                        name: QName::new("urn:p", "x"),
                        value: "1".into()
                    },
                    Attribute {
                        name: QName::local("y"),
                        value: "2".into()
                    },
                ],
            }
        );
        assert_eq!(
            ev[1],
            StartElement {
                name: QName::new("urn:d", "b"),
                attributes: vec![]
            }
        );
        assert_eq!(ev[3], start("c"));
        assert!(events("<q:a/>").is_err());
    }

    #[test]
    fn qname_values_resolve_in_element_scope() {
        let mut r = XmlReader::new(r#"<a xmlns:g="urn:g"><b xmlns:g="urn:h"/><c/></a>"#);
        r.next_event().unwrap();
        assert_eq!(r.resolve_qname_value("g:T"), Some(QName::new("urn:g", "T")));
        r.next_event().unwrap();
        assert_eq!(r.resolve_qname_value("g:T"), Some(QName::new("urn:h", "T")));
        r.next_event().unwrap();
        r.next_event().unwrap();
        assert_eq!(r.resolve_qname_value("g:T"), Some(QName::new("urn:g", "T")));
        assert_eq!(r.resolve_qname_value("zz:T"), None);
    }

    #[test]
    fn doctype_is_skipped_but_custom_entities_fail() {
        let doc = r#"<?xml version="1.0"?><!DOCTYPE a [<!ENTITY e "x">]><a>&lt;</a>"#;
        assert_eq!(events(doc).unwrap()[1], Text("<".into()));
        assert!(events(r#"<!DOCTYPE a [<!ENTITY e "x">]><a>&e;</a>"#).is_err());
    }

    #[test]
    fn locations_are_reported() {
        let err = events("<a>\n  <b>\n</a>").unwrap_err();
        assert_eq!(err.location, Location { line: 3, column: 1 });
    }

    #[test]
    fn attribute_whitespace_is_normalized() {
        let ev = events("<a v=\"x\ny\tz\"/>").unwrap();
        let StartElement { attributes, .. } = &ev[0] else {
            panic!()
        };
        assert_eq!(attributes[0].value, "x y z");
    }

    #[test]
    fn utf16_with_bom() {
        let mut bytes = vec![0xFF, 0xFE];
        for u in "<a>é</a>".encode_utf16() {
            bytes.extend_from_slice(&u.to_le_bytes());
        }
        let mut r = XmlReader::from_bytes(&bytes).unwrap();
        r.next_event().unwrap();
        assert_eq!(r.next_event().unwrap(), Text("é".into()));
    }
}
