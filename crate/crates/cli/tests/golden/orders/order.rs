//! `Order`, bound from `complexType:urn:example:orders:Order`.

use xsdbind_runtime::{Attribute, ParseContext, ParseResult, QName, Value, XmlEvent};

use super::values::{self, ToValue};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Order {
    pub id: Option<String>,
    pub placed: Option<String>,
    pub codes: Option<String>,
    pub customer: Option<Box<super::party::Party>>,
    pub ship_to: Option<Box<super::address::Address>>,
    pub line: Vec<Box<super::line::Line>>,
    pub total: Option<Box<super::money::Money>>,
    pub comment: Option<Box<super::comment::Comment>>,
    pub rush: Option<bool>,
    pub tag: Option<String>,
    pub gift: Option<Box<super::gift::Gift>>,
}

impl Order {
    pub const NAME: &'static str = "Order";
    /// Element fields here and in bases, for presence tracking.
    pub const SLOTS: usize = 8;
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
        match attrs.iter().find(|a| a.name.is("", "id")) {
            Some(a) => match values::Lexical::from_lexical(&a.value) {
                Some(v) => self.id = Some(v),
                None => ctx.bad_simple_value(&a.name, &a.value)?,
            },
            None => ctx.missing_required(Self::NAME, "id")?,
        }
        match attrs.iter().find(|a| a.name.is("", "placed")) {
            Some(a) => match values::Lexical::from_lexical(&a.value) {
                Some(v) => self.placed = Some(v),
                None => ctx.bad_simple_value(&a.name, &a.value)?,
            },
            None => {}
        }
        match attrs.iter().find(|a| a.name.is("", "codes")) {
            Some(a) => match values::Lexical::from_lexical(&a.value) {
                Some(v) => self.codes = Some(v),
                None => ctx.bad_simple_value(&a.name, &a.value)?,
            },
            None => {}
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
        if !seen[0] && name.is("urn:example:orders", "customer") {
            let v = super::party::Party::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[0] = true;
            self.customer = v;
            return Ok(true);
        }
        if !seen[1] && name.is("urn:example:orders", "shipTo") {
            let v = super::address::Address::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[1] = true;
            self.ship_to = v;
            return Ok(true);
        }
        if name.is("urn:example:orders", "line") {
            let v = super::line::Line::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            if let Some(v) = v {
                self.line.push(v);
            }
            return Ok(true);
        }
        if !seen[3] && name.is("urn:example:orders", "total") {
            let v = super::money::Money::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[3] = true;
            self.total = v;
            return Ok(true);
        }
        if !seen[4] && name.is("urn:example:orders", "comment") {
            let v = super::comment::Comment::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[4] = true;
            self.comment = v;
            return Ok(true);
        }
        if !seen[5] && name.is("urn:example:orders", "rush") {
            let v = values::read(ctx, name)?;
            seen[5] = true;
            self.rush = v;
            return Ok(true);
        }
        if !seen[6] && name.is("urn:example:orders", "tag") {
            let v = values::read(ctx, name)?;
            seen[6] = true;
            self.tag = v;
            return Ok(true);
        }
        if !seen[7] && name.is("urn:example:orders", "gift") {
            let v = super::gift::Gift::parse(ctx, name, attrs).map(|v| Some(Box::new(v)))?;
            seen[7] = true;
            self.gift = v;
            return Ok(true);
        }
        Ok(false)
    }

    pub(crate) fn finish(&mut self, ctx: &mut ParseContext<'_>, seen: &[bool], element: &QName, text: &str) -> ParseResult<()> {
        if !seen[0] {
            ctx.missing_required(Self::NAME, "customer")?;
        }
        if !seen[3] {
            ctx.missing_required(Self::NAME, "total")?;
        }
        Ok(())
    }

    /// Whether an unknown child in `ns` is let through silently.
    fn skips(ns: &str) -> bool {
        false
    }

    pub(crate) fn push_fields(&self, out: &mut Value) {
        if let Some(v) = &self.id {
            out.push_field("id", v.to_value());
        }
        if let Some(v) = &self.placed {
            out.push_field("placed", v.to_value());
        }
        if let Some(v) = &self.codes {
            out.push_field("codes", v.to_value());
        }
        if let Some(v) = &self.customer {
            out.push_field("customer", v.to_value());
        }
        if let Some(v) = &self.ship_to {
            out.push_field("ship_to", v.to_value());
        }
        if !self.line.is_empty() {
            out.push_field("line", self.line.to_value());
        }
        if let Some(v) = &self.total {
            out.push_field("total", v.to_value());
        }
        if let Some(v) = &self.comment {
            out.push_field("comment", v.to_value());
        }
        if let Some(v) = &self.rush {
            out.push_field("rush", v.to_value());
        }
        if let Some(v) = &self.tag {
            out.push_field("tag", v.to_value());
        }
        if let Some(v) = &self.gift {
            out.push_field("gift", v.to_value());
        }
    }
}

impl ToValue for Order {
    fn to_value(&self) -> Value {
        let mut out = Value::object(Self::NAME);
        self.push_fields(&mut out);
        out
    }
}
