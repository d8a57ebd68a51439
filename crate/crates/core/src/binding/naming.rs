//! Identifier mangling for generated code.
//!
//! * Names are split into words at non-alphanumeric characters, at
//!   lower-to-upper case changes and before the last capital of an acronym
//!   (`USAddress` gives `US`, `Address`).
//! * Class-like names join capitalized words (`UsAddress`); field names join
//!   lowercase words with `_` (`us_address`).
//! * A name that would start with a digit gets an `X` (classes) or `x_`
//!   (fields) prefix; an empty name becomes `X` or `x`.
//! * Reserved words get a `_` suffix.
//! * Collisions within one scope get `_2`, `_3`, … in claim order.

use std::collections::BTreeSet;

const KEYWORDS: &[&str] = &[
    "as", "async", "await", "break", "const", "continue", "crate", "dyn", "else", "enum", "extern",
    "false", "fn", "for", "if", "impl", "in", "let", "loop", "match", "mod", "move", "mut", "pub",
    "ref", "return", "self", "Self", "static", "struct", "super", "trait", "true", "type",
    "unsafe", "use", "where", "while", "abstract", "become", "box", "do", "final", "macro",
    "override", "priv", "typeof", "unsized", "virtual", "yield", "try", "gen",
];

/// Type names the generated code uses itself.
const RESERVED_TYPES: &[&str] = &[
    "Root",
    "Value",
    "QName",
    "Attribute",
    "XmlEvent",
    "ParseContext",
    "ParseResult",
    "ParseError",
    "Warning",
    "Mode",
    "Option",
    "Some",
    "None",
    "Vec",
    "String",
    "Box",
    "Result",
    "Ok",
    "Err",
    "Default",
    "ToValue",
    "Lexical",
];

/// Field names the generated code uses itself.
const RESERVED_FIELDS: &[&str] = &["base"];

pub fn words(name: &str) -> Vec<String> {
    let chars: Vec<char> = name.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_ascii_alphanumeric() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if !cur.is_empty() && c.is_ascii_uppercase() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_ascii_lowercase());
            if prev.is_ascii_lowercase()
                || prev.is_ascii_digit()
                || (prev.is_ascii_uppercase() && next_lower)
            {
                out.push(std::mem::take(&mut cur));
            }
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn capitalize(w: &str) -> String {
    let lower = w.to_ascii_lowercase();
    let mut c = lower.chars();
    match c.next() {
        Some(f) => f.to_ascii_uppercase().to_string() + c.as_str(),
        None => String::new(),
    }
}

pub fn type_ident(name: &str) -> String {
    let mut s: String = words(name).iter().map(|w| capitalize(w)).collect();
    if s.is_empty() {
        s.push('X');
    } else if s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'X');
    }
    if KEYWORDS.contains(&s.as_str()) || RESERVED_TYPES.contains(&s.as_str()) {
        s.push('_');
    }
    s
}

pub fn field_ident(name: &str) -> String {
    let mut s = words(name)
        .iter()
        .map(|w| w.to_ascii_lowercase())
        .collect::<Vec<_>>()
        .join("_");
    if s.is_empty() {
        s.push('x');
    } else if s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert_str(0, "x_");
    }
    if KEYWORDS.contains(&s.as_str()) || RESERVED_FIELDS.contains(&s.as_str()) {
        s.push('_');
    }
    s
}

/// One naming scope.
#[derive(Debug, Default)]
pub struct Scope {
    used: BTreeSet<String>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    /// Marks a name as taken without claiming it.
    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn claim(&mut self, base: String) -> String {
        if self.used.insert(base.clone()) {
            return base;
        }
        (2..)
            .map(|n| format!("{base}_{n}"))
            .find(|cand| self.used.insert(cand.clone()))
            .expect("unbounded suffixes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_words() {
        assert_eq!(words("purchaseOrder"), ["purchase", "Order"]);
        assert_eq!(words("USAddress"), ["US", "Address"]);
        assert_eq!(words("item-2.name"), ["item", "2", "name"]);
        assert_eq!(words("a1B"), ["a1", "B"]);
    }

    #[test]
    fn mangles() {
        assert_eq!(type_ident("purchaseOrder"), "PurchaseOrder");
        assert_eq!(type_ident("USAddress"), "UsAddress");
        assert_eq!(type_ident("2d"), "X2d");
        assert_eq!(type_ident("root"), "Root_");
        assert_eq!(type_ident("self"), "Self_");
        assert_eq!(field_ident("orderDate"), "order_date");
        assert_eq!(field_ident("type"), "type_");
        assert_eq!(field_ident("base"), "base_");
        assert_eq!(field_ident("3rd"), "x_3rd");
        assert_eq!(field_ident("-"), "x");
    }

    #[test]
    fn collisions_get_suffixes() {
        let mut s = Scope::new();
        assert_eq!(s.claim("a".into()), "a");
        assert_eq!(s.claim("a".into()), "a_2");
        assert_eq!(s.claim("a".into()), "a_3");
        s.reserve("b");
        assert_eq!(s.claim("b".into()), "b_2");
    }
}
