//! Model-walking generic binder. Produces the same [`Value`] trees and
//! warnings as generated parsers, straight from a [`BindingModel`]; tests use
//! it as the reference for generated code.

use xsdbind_runtime::{
    Attribute, Mode, ParseContext, ParseResult, QName, Value, Warning, XmlEvent,
};

use crate::binding::*;

pub fn interpret(
    model: &BindingModel,
    src: &str,
    mode: Mode,
) -> ParseResult<(Value, Vec<Warning>)> {
    run(model, ParseContext::new(src, mode))
}

pub fn interpret_bytes(
    model: &BindingModel,
    bytes: &[u8],
    mode: Mode,
) -> ParseResult<(Value, Vec<Warning>)> {
    run(model, ParseContext::from_bytes(bytes, mode)?)
}

fn run(model: &BindingModel, mut ctx: ParseContext<'_>) -> ParseResult<(Value, Vec<Warning>)> {
    let (name, attrs) = ctx.root_start()?;
    let xsi = ctx.xsi_type(&attrs);
    let Some(i) = model.roots.select(&name, xsi.as_ref()) else {
        return Err(ctx.unknown_root(&name));
    };
    let entry = &model.roots.entries[i];
    let value = Interp { model }.entry(&mut ctx, entry, &name, &attrs)?;
    ctx.finish()?;
    let value = Value::Choice {
        tag: entry.tag.clone(),
        value: Box::new(value.unwrap_or(Value::Nil)),
    };
    Ok((value, ctx.take_warnings()))
}

fn trimmed_int(raw: &str) -> Option<i64> {
    let t = raw.trim();
    let digits = t.strip_prefix(['+', '-']).unwrap_or(t);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

fn is_decimal(t: &str) -> bool {
    let body = t.strip_prefix(['+', '-']).unwrap_or(t);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    (!int.is_empty() || !frac.is_empty())
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
}

fn double(raw: &str) -> Option<f64> {
    let t = raw.trim();
    match t {
        "INF" | "+INF" => return Some(f64::INFINITY),
        "-INF" => return Some(f64::NEG_INFINITY),
        "NaN" => return Some(f64::NAN),
        _ => {}
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], Some(&t[i + 1..])),
        None => (t, None),
    };
    let exp_ok = exp.is_none_or(|e| {
        let d = e.strip_prefix(['+', '-']).unwrap_or(e);
        !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())
    });
    (is_decimal(mantissa) && exp_ok)
        .then(|| t.parse().ok())
        .flatten()
}

/// Lexical-to-value conversion for one simple category.
pub fn convert(category: SimpleCategory, raw: &str) -> Option<Value> {
    match category {
        SimpleCategory::String | SimpleCategory::RawLexical => Some(Value::Str(raw.to_string())),
        SimpleCategory::Integer => trimmed_int(raw).map(Value::Int),
        SimpleCategory::Decimal => {
            let t = raw.trim();
            is_decimal(t).then(|| Value::Decimal(t.to_string()))
        }
        SimpleCategory::Boolean => match raw.trim() {
            "true" | "1" => Some(Value::Bool(true)),
            "false" | "0" => Some(Value::Bool(false)),
            _ => None,
        },
        SimpleCategory::Double => double(raw).map(Value::Double),
    }
}

enum Slot {
    Empty,
    One(Option<Value>),
    Many(Vec<Value>),
}

#[derive(Clone, Copy)]
struct Interp<'m> {
    model: &'m BindingModel,
}

impl<'m> Interp<'m> {
    fn class(&self, name: &str) -> &'m BindingClass {
        self.model.class(name).expect("validated model")
    }

    /// The class and its bases, root-most first.
    fn chain(&self, class: &'m BindingClass) -> Vec<&'m BindingClass> {
        let mut chain = vec![class];
        let mut cur = class;
        while let Some(b) = cur.base.as_deref() {
            cur = self.class(b);
            chain.push(cur);
        }
        chain.reverse();
        chain
    }

    fn entry(
        self,
        ctx: &mut ParseContext<'_>,
        entry: &'m DispatchEntry,
        name: &QName,
        attrs: &[Attribute],
    ) -> ParseResult<Option<Value>> {
        if entry.nillable && ctx.is_nil(attrs) {
            ctx.skip_subtree()?;
            return Ok(Some(Value::Nil));
        }
        self.target(ctx, &entry.target, name, attrs)
    }

    fn target(
        self,
        ctx: &mut ParseContext<'_>,
        target: &'m FieldTarget,
        name: &QName,
        attrs: &[Attribute],
    ) -> ParseResult<Option<Value>> {
        match target {
            FieldTarget::Class { class } => {
                let c = self.class(class);
                self.object(ctx, c, name, attrs).map(Some)
            }
            FieldTarget::Simple { category } => {
                let raw = ctx.read_simple_text()?;
                match convert(*category, &raw) {
                    Some(v) => Ok(Some(v)),
                    None => {
                        ctx.bad_simple_value(name, &raw)?;
                        Ok(None)
                    }
                }
            }
            FieldTarget::Dispatch { .. } | FieldTarget::Skip => unreachable!("not a value target"),
        }
    }

    fn object(
        self,
        ctx: &mut ParseContext<'_>,
        class: &'m BindingClass,
        element: &QName,
        attrs: &[Attribute],
    ) -> ParseResult<Value> {
        let chain = self.chain(class);
        let fields: Vec<(&'m BindingClass, &'m BindingField)> = chain
            .iter()
            .flat_map(|c| c.fields.iter().map(move |f| (*c, f)))
            .collect();
        let mut slots: Vec<Slot> = fields.iter().map(|_| Slot::Empty).collect();
        let accepts_text = chain.iter().any(|c| c.accepts_text());

        for (i, (owner, f)) in fields.iter().enumerate() {
            if f.kind != FieldKind::Attribute {
                continue;
            }
            let FieldTarget::Simple { category } = f.target else {
                unreachable!("attributes are simple")
            };
            match attrs.iter().find(|a| a.name == f.xml_name) {
                Some(a) => match convert(category, &a.value) {
                    Some(v) => slots[i] = Slot::One(Some(v)),
                    None => ctx.bad_simple_value(&f.xml_name, &a.value)?,
                },
                None if f.cardinality == Cardinality::ScalarRequired => {
                    ctx.missing_required(&owner.name, &f.name)?
                }
                None => {}
            }
        }

        let mut text = String::new();
        loop {
            match ctx.next_event()? {
                XmlEvent::StartElement { name, attributes } => {
                    if !self.child(ctx, &fields, &mut slots, &name, &attributes)? {
                        if chain
                            .iter()
                            .any(|c| c.skip_namespaces.iter().any(|r| r.admits(&name.namespace)))
                        {
                            ctx.skip_subtree()?;
                        } else {
                            ctx.unknown_element(&name)?;
                        }
                    }
                }
                XmlEvent::Text(t) => {
                    if accepts_text {
                        text.push_str(&t);
                    } else {
                        ctx.unexpected_text(&t)?;
                    }
                }
                XmlEvent::EndElement(_) => break,
                XmlEvent::EndDocument => return Err(ctx.unexpected_end()),
            }
        }

        for (i, (owner, f)) in fields.iter().enumerate() {
            match f.kind {
                FieldKind::TextContent => {
                    let FieldTarget::Simple { category } = f.target else {
                        unreachable!("text is simple")
                    };
                    if f.cardinality == Cardinality::ScalarOptional && text.is_empty() {
                        continue;
                    }
                    match convert(category, &text) {
                        Some(v) => slots[i] = Slot::One(Some(v)),
                        None => ctx.bad_simple_value(element, &text)?,
                    }
                }
                FieldKind::Element
                    if f.cardinality == Cardinality::ScalarRequired
                        && !f.ignored
                        && matches!(slots[i], Slot::Empty) =>
                {
                    ctx.missing_required(&owner.name, &f.name)?
                }
                _ => {}
            }
        }

        let mut out = Value::object(&class.name);
        for ((_, f), slot) in fields.iter().zip(slots) {
            match slot {
                Slot::One(Some(v)) => out.push_field(&f.name, v),
                Slot::Many(vs) if !vs.is_empty() => out.push_field(&f.name, Value::List(vs)),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Binds one child element to the first field that takes it. False when
    /// no field does.
    fn child(
        self,
        ctx: &mut ParseContext<'_>,
        fields: &[(&'m BindingClass, &'m BindingField)],
        slots: &mut [Slot],
        name: &QName,
        attrs: &[Attribute],
    ) -> ParseResult<bool> {
        let xsi = ctx.xsi_type(attrs);
        for (i, (_, f)) in fields.iter().enumerate() {
            if f.kind != FieldKind::Element {
                continue;
            }
            let free = f.cardinality.is_list() || matches!(slots[i], Slot::Empty);
            let value = match &f.target {
                FieldTarget::Skip if f.xml_name == *name => {
                    ctx.skip_subtree()?;
                    return Ok(true);
                }
                FieldTarget::Dispatch { table } if free => {
                    let table = &self.model.dispatch_tables[table];
                    let Some(e) = table.select(name, xsi.as_ref()) else {
                        continue;
                    };
                    let entry = &table.entries[e];
                    self.entry(ctx, entry, name, attrs)?.map(|v| Value::Choice {
                        tag: entry.tag.clone(),
                        value: Box::new(v),
                    })
                }
                FieldTarget::Class { .. } | FieldTarget::Simple { .. }
                    if free && f.xml_name == *name =>
                {
                    if let Some(inner) = f.wrappers.last() {
                        let path: Vec<(&str, &str)> =
                            f.wrappers.iter().map(|q| q.as_pair()).collect();
                        ctx.descend(&path, |ctx, attrs| {
                            self.target(ctx, &f.target, inner, attrs)
                        })?
                        .flatten()
                    } else if f.nillable && ctx.is_nil(attrs) {
                        ctx.skip_subtree()?;
                        Some(Value::Nil)
                    } else {
                        self.target(ctx, &f.target, name, attrs)?
                    }
                }
                _ => continue,
            };
            let slot = &mut slots[i];
            if f.cardinality.is_list() {
                if let Slot::Empty = slot {
                    *slot = Slot::Many(Vec::new());
                }
                if let (Slot::Many(vs), Some(v)) = (slot, value) {
                    vs.push(v);
                }
            } else {
                *slot = Slot::One(value);
            }
            return Ok(true);
        }
        Ok(false)
    }
}

#[cfg(test)]
pub(crate) mod tests;
