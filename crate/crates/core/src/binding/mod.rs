//! The code-generation IR: classes, fields, cardinalities and dispatch
//! tables derived from a retained schema subset plus corpus usage.

mod build;
pub mod naming;
mod path;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use xsdbind_runtime::QName;

pub use crate::builtins::SimpleCategory;
pub use build::{build_binding_model, widen_for_substitutions};
pub use path::IgnorePath;

pub const IR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindingError {
    #[error("INCONSISTENT_USAGE usage mentions {0}, which is not retained")]
    InconsistentUsage(String),
    #[error("EMPTY_MODEL no root elements")]
    EmptyModel,
    #[error("INVALID_MODEL {0}")]
    Invalid(String),
    #[error("IR_VERSION unsupported version {0}")]
    Version(u32),
    #[error("IR_ERROR {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BindingOptions {
    pub flatten_inheritance: bool,
    pub collapse_single_child: bool,
    pub tighten_occurrences: bool,
    pub bound_substitutions: bool,
    pub ignore_paths: Vec<IgnorePath>,
    pub lenient: bool,
    pub corpus_is_synthetic: bool,
}

impl Default for BindingOptions {
    fn default() -> Self {
        BindingOptions {
            flatten_inheritance: true,
            collapse_single_child: true,
            tighten_occurrences: true,
            bound_substitutions: true,
            ignore_paths: Vec::new(),
            lenient: false,
            corpus_is_synthetic: false,
        }
    }
}

impl BindingOptions {
    /// Every optimization off.
    pub fn unoptimized() -> Self {
        BindingOptions {
            flatten_inheritance: false,
            collapse_single_child: false,
            tighten_occurrences: false,
            bound_substitutions: false,
            ..Default::default()
        }
    }

    /// The options actually applied: a synthetic corpus says nothing about
    /// real occurrence counts or substitutions.
    pub fn effective(&self) -> Self {
        let mut o = self.clone();
        if o.corpus_is_synthetic {
            o.tighten_occurrences = false;
            o.bound_substitutions = false;
        }
        o
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FieldKind {
    Element,
    Attribute,
    TextContent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Cardinality {
    ScalarRequired,
    ScalarOptional,
    List,
}

impl Cardinality {
    pub fn is_list(self) -> bool {
        self == Cardinality::List
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum FieldTarget {
    Class {
        class: String,
    },
    Simple {
        category: SimpleCategory,
    },
    Dispatch {
        table: String,
    },
    /// Ignored content: consumed without building anything.
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BindingField {
    pub name: String,
    /// Instance name; empty for text content and for wildcard slots.
    #[serde(with = "clark")]
    pub xml_name: QName,
    pub kind: FieldKind,
    pub target: FieldTarget,
    pub cardinality: Cardinality,
    pub ignored: bool,
    pub nillable: bool,
    /// Single-child wrapper elements between `xml_name` and the value,
    /// outermost first. Non-empty only after collapse.
    #[serde(with = "clark_vec")]
    pub wrappers: Vec<QName>,
    /// Key of the particle or attribute the field comes from.
    pub source: String,
}

/// How unknown children in a namespace are let through silently (lax and
/// skip wildcards).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "namespaces", rename_all = "camelCase")]
pub enum NamespaceRule {
    Any,
    Not(Vec<String>),
    Only(Vec<String>),
}

impl NamespaceRule {
    pub fn admits(&self, namespace: &str) -> bool {
        match self {
            NamespaceRule::Any => true,
            NamespaceRule::Not(list) => !list.iter().any(|n| n == namespace),
            NamespaceRule::Only(list) => list.iter().any(|n| n == namespace),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BindingClass {
    pub name: String,
    /// Key of the complex type the class binds.
    pub source_type: String,
    #[serde(with = "clark_opt")]
    pub xml_type: Option<QName>,
    /// Present only without inheritance flattening.
    pub base: Option<String>,
    pub is_abstract: bool,
    pub fields: Vec<BindingField>,
    pub skip_namespaces: Vec<NamespaceRule>,
    pub is_collapsed_away: bool,
}

impl BindingClass {
    pub fn accepts_text(&self) -> bool {
        self.fields.iter().any(|f| f.kind == FieldKind::TextContent)
    }

    /// Number of element slots the class tracks itself (excluding its base).
    pub fn element_slots(&self) -> usize {
        self.fields
            .iter()
            .filter(|f| f.kind == FieldKind::Element)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DispatchEntry {
    #[serde(with = "clark")]
    pub element: QName,
    #[serde(with = "clark_opt")]
    pub xsi_type: Option<QName>,
    /// `Class` or `Simple`.
    pub target: FieldTarget,
    /// Label carried by the bound value.
    pub tag: String,
    /// Identifier for the alternative in generated code.
    pub variant: String,
    pub nillable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DispatchTable {
    /// Identifier of the generated sum type.
    pub name: String,
    pub entries: Vec<DispatchEntry>,
}

impl DispatchTable {
    /// Entry for an element with an optional `xsi:type`: the exact pair
    /// first, then the element's declared-type entry.
    pub fn select(&self, element: &QName, xsi_type: Option<&QName>) -> Option<usize> {
        if let Some(t) = xsi_type {
            if let Some(i) = self
                .entries
                .iter()
                .position(|e| &e.element == element && e.xsi_type.as_ref() == Some(t))
            {
                return Some(i);
            }
        }
        self.entries
            .iter()
            .position(|e| &e.element == element && e.xsi_type.is_none())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BindingModel {
    pub ir_version: u32,
    pub name: String,
    pub options: BindingOptions,
    pub classes: Vec<BindingClass>,
    pub roots: DispatchTable,
    /// Keyed by `Class.field`.
    pub dispatch_tables: BTreeMap<String, DispatchTable>,
    /// Keys of the elements removed by single-child collapse.
    pub collapsed_elements: Vec<String>,
}

pub fn field_id(class: &str, field: &str) -> String {
    format!("{class}.{field}")
}

impl BindingModel {
    pub fn class(&self, name: &str) -> Option<&BindingClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Classes that are emitted (not collapsed away).
    pub fn live_classes(&self) -> impl Iterator<Item = &BindingClass> {
        self.classes.iter().filter(|c| !c.is_collapsed_away)
    }

    pub fn class_count(&self) -> usize {
        self.live_classes().count()
    }

    pub fn field_count(&self) -> usize {
        self.live_classes().map(|c| c.fields.len()).sum()
    }

    /// Fields of a class with its base chain prepended, as bound values
    /// list them.
    pub fn all_fields<'m>(&'m self, class: &'m BindingClass) -> Vec<&'m BindingField> {
        let mut chain = vec![class];
        let mut cur = class;
        while let Some(b) = cur.base.as_deref().and_then(|b| self.class(b)) {
            chain.push(b);
            cur = b;
        }
        chain.iter().rev().flat_map(|c| c.fields.iter()).collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), BindingError> {
        let bad = |m: String| Err(BindingError::Invalid(m));
        if self.roots.entries.is_empty() {
            return Err(BindingError::EmptyModel);
        }
        let mut names = BTreeSet::new();
        for c in &self.classes {
            if !names.insert(c.name.as_str()) {
                return bad(format!("duplicate class {}", c.name));
            }
        }
        let class_ok = |t: &FieldTarget| match t {
            FieldTarget::Class { class } => names.contains(class.as_str()),
            FieldTarget::Dispatch { table } => self.dispatch_tables.contains_key(table),
            _ => true,
        };
        for c in self.live_classes() {
            if let Some(b) = &c.base {
                if !names.contains(b.as_str()) {
                    return bad(format!("{} has unknown base {b}", c.name));
                }
            }
            let mut fields = BTreeSet::new();
            for f in &c.fields {
                if !fields.insert(f.name.as_str()) {
                    return bad(format!("duplicate field {}.{}", c.name, f.name));
                }
                if !class_ok(&f.target) {
                    return bad(format!("{}.{} has a dangling target", c.name, f.name));
                }
                if f.ignored != (f.target == FieldTarget::Skip) {
                    return bad(format!(
                        "{}.{} ignored flag disagrees with its target",
                        c.name, f.name
                    ));
                }
            }
        }
        for t in self.dispatch_tables.values().chain([&self.roots]) {
            for e in &t.entries {
                if !matches!(
                    e.target,
                    FieldTarget::Class { .. } | FieldTarget::Simple { .. }
                ) || !class_ok(&e.target)
                {
                    return bad(format!("{} entry {} has a bad target", t.name, e.tag));
                }
            }
        }
        Ok(())
    }

    /// Deterministic JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("IR serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, BindingError> {
        let model: BindingModel =
            serde_json::from_str(text).map_err(|e| BindingError::Json(e.to_string()))?;
        if model.ir_version != IR_VERSION {
            return Err(BindingError::Version(model.ir_version));
        }
        Ok(model)
    }
}

pub(crate) mod clark {
    use serde::{Deserialize, Deserializer, Serializer};
    use xsdbind_runtime::QName;

    pub fn serialize<S: Serializer>(q: &QName, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }

    pub fn parse(text: &str) -> Option<QName> {
        if text.is_empty() {
            Some(QName::default())
        } else {
            QName::parse_clark(text)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<QName, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad name {text:?}")))
    }
}

mod clark_opt {
    use serde::{Deserialize, Deserializer, Serializer};
    use xsdbind_runtime::QName;

    pub fn serialize<S: Serializer>(q: &Option<QName>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.collect_str(q),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<QName>, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(None),
            Some(t) => super::clark::parse(&t)
                .map(Some)
                .ok_or_else(|| serde::de::Error::custom(format!("bad name {t:?}"))),
        }
    }
}

mod clark_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};
    use xsdbind_runtime::QName;

    pub fn serialize<S: Serializer>(v: &[QName], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&q.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<QName>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|t| {
                super::clark::parse(&t)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad name {t:?}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests;
