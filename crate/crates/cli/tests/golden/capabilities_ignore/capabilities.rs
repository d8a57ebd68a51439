//! `Capabilities`, bound from `complexType:urn:example:sensors:capabilities/~type`.

use xsdbind_runtime::{Attribute, ParseContext, ParseResult, QName, Value, XmlEvent};

use super::values::{self, ToValue};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Capabilities {
    pub version: Option<String>,
    pub service: Option<Box<super::service_info::ServiceInfo>>,
    pub extension: Option<Box<super::extension::Extension>>,
}

impl Capabilities {
    pub const NAME: &'static str = "Capabilities";
    /// Element fields here and in bases, for presence tracking.
    pub const SLOTS: usize = 3;
    const ACCEPTS_TEXT: bool = false;

    pub fn parse(ctx: &mut ParseContext<'_>, element: &QName, attrs: &[Attribute]) -> ParseResult<Self> {
        let mut out = Self::default();
        let mut seen = [false; Self::SLOTS];
        let mut text = String::new();
        out.attributes(ctx, attrs)?;
        loop {
            match ctx.next_event()? {
                XmlEvent::StartElement { name, attributes } => {
                    if !out.child(ctx, &mut seen, &name, &attributes)? {
                        if Self::skips(&name.namespace) {
                            ctx.skip_subtree()?;
                        } else {
                            ctx.unknown_element(&name)?;
                        }
                    }
                }
                XmlEvent::Text(t) => {
                    if Self::ACCEPTS_TEXT {
                        text.push_str(&t);
                    } else {
                        ctx.unexpected_text(&t)?;
                    }
                }
                XmlEvent::EndElement(_) => break,
                XmlEvent::EndDocument => return Err(ctx.unexpected_end()),
            }
        }
        out.finish(ctx, &seen, element, &text)?;
        Ok(out)
    }

    pub(crate) fn attributes(&mut self, ctx: &mut ParseContext<'_>, attrs: &[Attribute]) -> ParseResult<()> {
        match attrs.iter().find(|a| a.name.is("", "version")) {
            Some(a) => match values::Lexical::from_lexical(&a.value) {
                Some(v) => self.version = Some(v),
                None => ctx.bad_simple_value(&a.name, &a.value)?,
            },
            None => ctx.missing_required(Self::NAME, "version")?,
        }
        Ok(())
    }

    /// Binds one child element to the first free field that takes it.
    pub(crate) fn child(
        &mut self,
        ctx: &mut ParseContext<'_>,
        seen: &mut [bool],
        name: &QName,
        attrs: &[Attribute],
    ) -> ParseResult<bool> {
        if !seen[0] && name.is("urn:example:sensors", "service") {
            let v = super::service_info::ServiceInfo::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[0] = true;
            self.service = v;
            return Ok(true);
        }
        if name.is("urn:example:sensors", "contents") {
            ctx.skip_subtree()?;
            return Ok(true);
        }
        if !seen[2] && name.is("urn:example:sensors", "extension") {
            let v = super::extension::Extension::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[2] = true;
            self.extension = v;
            return Ok(true);
        }
        Ok(false)
    }

    pub(crate) fn finish(&mut self, ctx: &mut ParseContext<'_>, seen: &[bool], element: &QName, text: &str) -> ParseResult<()> {
        if !seen[0] {
            ctx.missing_required(Self::NAME, "service")?;
        }
        Ok(())
    }

    /// Whether an unknown child in `ns` is let through silently.
    fn skips(ns: &str) -> bool {
        false
    }

    pub(crate) fn push_fields(&self, out: &mut Value) {
        if let Some(v) = &self.version {
            out.push_field("version", v.to_value());
        }
        if let Some(v) = &self.service {
            out.push_field("service", v.to_value());
        }
        if let Some(v) = &self.extension {
            out.push_field("extension", v.to_value());
        }
    }
}

impl ToValue for Capabilities {
    fn to_value(&self) -> Value {
        let mut out = Value::object(Self::NAME);
        self.push_fields(&mut out);
        out
    }
}
