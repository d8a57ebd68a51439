//! `Money`, bound from `complexType:urn:example:orders:Money`.

use xsdbind_runtime::{Attribute, ParseContext, ParseResult, QName, Value, XmlEvent};

use super::values::{self, ToValue};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Money {
    pub value: Option<super::values::Decimal>,
    pub currency: Option<String>,
}

impl Money {
    pub const NAME: &'static str = "Money";
    /// Element fields here and in bases, for presence tracking.
    pub const SLOTS: usize = 0;
    const ACCEPTS_TEXT: bool = true;

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
        match attrs.iter().find(|a| a.name.is("", "currency")) {
            Some(a) => match values::Lexical::from_lexical(&a.value) {
                Some(v) => self.currency = Some(v),
                None => ctx.bad_simple_value(&a.name, &a.value)?,
            },
            None => ctx.missing_required(Self::NAME, "currency")?,
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
        Ok(false)
    }

    pub(crate) fn finish(&mut self, ctx: &mut ParseContext<'_>, seen: &[bool], element: &QName, text: &str) -> ParseResult<()> {
        match values::Lexical::from_lexical(text) {
            Some(v) => self.value = Some(v),
            None => ctx.bad_simple_value(element, text)?,
        }
        Ok(())
    }

    /// Whether an unknown child in `ns` is let through silently.
    fn skips(ns: &str) -> bool {
        false
    }

    pub(crate) fn push_fields(&self, out: &mut Value) {
        if let Some(v) = &self.value {
            out.push_field("value", v.to_value());
        }
        if let Some(v) = &self.currency {
            out.push_field("currency", v.to_value());
        }
    }
}

impl ToValue for Money {
    fn to_value(&self) -> Value {
        let mut out = Value::object(Self::NAME);
        self.push_fields(&mut out);
        out
    }
}
