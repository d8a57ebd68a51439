//! Element-name and `xsi:type` dispatch, and the document entry points.

use xsdbind_runtime::{Attribute, Mode, ParseContext, ParseResult, QName, Value, Warning};

use super::values::{self, ToValue};

/// Parses a whole document into its root value.
pub fn parse_document(src: &str, mode: Mode) -> ParseResult<(Root, Vec<Warning>)> {
    run(ParseContext::new(src, mode))
}

/// As [`parse_document`], decoding the bytes first.
pub fn parse_bytes(bytes: &[u8], mode: Mode) -> ParseResult<(Root, Vec<Warning>)> {
    run(ParseContext::from_bytes(bytes, mode)?)
}

fn run(mut ctx: ParseContext<'_>) -> ParseResult<(Root, Vec<Warning>)> {
    let (name, attrs) = ctx.root_start()?;
    let xsi = ctx.xsi_type(&attrs);
    let Some(root) = Root::parse(&mut ctx, &name, xsi.as_ref(), &attrs)? else {
        return Err(ctx.unknown_root(&name));
    };
    let root = root.expect("root entries always yield a value");
    ctx.finish()?;
    Ok((root, ctx.take_warnings()))
}

/// Document root elements.
#[derive(Debug, Clone, PartialEq)]
pub enum Root {
    /// `{urn:example:sensors}capabilities`
    Capabilities(Option<Box<super::capabilities::Capabilities>>),
}

impl Root {
    /// `None` when no entry takes the element; `Some(None)` when the taking
    /// entry's value was unusable.
    pub fn parse(
        ctx: &mut ParseContext<'_>,
        name: &QName,
        xsi: Option<&QName>,
        attrs: &[Attribute],
    ) -> ParseResult<Option<Option<Self>>> {
        let v = match (name.as_pair(), xsi.map(QName::as_pair)) {
            (("urn:example:sensors", "capabilities"), _) => {
                Some(Self::Capabilities(Some(Box::new(super::capabilities::Capabilities::parse(ctx, name, attrs)?))))
            }
            _ => return Ok(None),
        };
        Ok(Some(v))
    }
}

impl ToValue for Root {
    fn to_value(&self) -> Value {
        let (tag, value) = match *self {
            Self::Capabilities(ref v) => ("{urn:example:sensors}capabilities", v.to_value()),
        };
        Value::Choice {
            tag: tag.to_string(),
            value: Box::new(value),
        }
    }
}
