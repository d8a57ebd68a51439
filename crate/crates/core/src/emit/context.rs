//! The render context: a JSON view of a [`BindingModel`] that templates read.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};
use xsdbind_runtime::QName;

use super::template::Template;
use super::EmitError;
use crate::binding::naming::{field_ident, Scope};
use crate::binding::*;

/// Category and reference type spellings for one backend. Keys are the
/// simple categories (`string`, `integer`, `decimal`, `boolean`, `double`,
/// `raw-lexical`) plus `class` and `table`, whose templates see `name` and
/// `module`.
pub type TypeMap = BTreeMap<String, Template>;

pub(super) const TYPE_KEYS: &[&str] = &[
    "string",
    "integer",
    "decimal",
    "boolean",
    "double",
    "raw-lexical",
    "class",
    "table",
];

fn category_key(c: SimpleCategory) -> &'static str {
    match c {
        SimpleCategory::String => "string",
        SimpleCategory::Integer => "integer",
        SimpleCategory::Decimal => "decimal",
        SimpleCategory::Boolean => "boolean",
        SimpleCategory::Double => "double",
        SimpleCategory::RawLexical => "raw-lexical",
    }
}

fn qname(q: &QName) -> Json {
    json!({"ns": q.namespace, "local": q.local, "clark": q.to_string()})
}

struct Builder<'m> {
    model: &'m BindingModel,
    types: &'m TypeMap,
    modules: BTreeMap<&'m str, String>,
}

impl<'m> Builder<'m> {
    fn spell(&self, key: &str, scope: Json) -> Result<String, EmitError> {
        let t = self.types.get(key).ok_or_else(|| EmitError::Template {
            template: "types".into(),
            line: 0,
            reason: format!("no type spelling for {key:?}"),
        })?;
        t.render(&[&scope], &|_| None)
    }

    fn class_ref(&self, name: &str) -> Result<Json, EmitError> {
        let module = self.modules.get(name).ok_or_else(|| {
            EmitError::Model(BindingError::Invalid(format!(
                "reference to class {name}, which is not live"
            )))
        })?;
        Ok(json!({"name": name, "module": module}))
    }

    /// Shared by fields and dispatch entries.
    fn target(&self, target: &FieldTarget, out: &mut Map<String, Json>) -> Result<(), EmitError> {
        let (kind, value_type) = match target {
            FieldTarget::Class { class } => {
                let r = self.class_ref(class)?;
                let t = self.spell("class", r.clone())?;
                out.insert("class".into(), r);
                ("class", t)
            }
            FieldTarget::Simple { category } => {
                out.insert("category".into(), json!(category_key(*category)));
                ("simple", self.spell(category_key(*category), json!({}))?)
            }
            FieldTarget::Dispatch { table } => {
                let t = self.model.dispatch_tables.get(table).ok_or_else(|| {
                    EmitError::Model(BindingError::Invalid(format!(
                        "reference to missing dispatch table {table}"
                    )))
                })?;
                let r = json!({"id": table, "name": t.name});
                let t = self.spell("table", r.clone())?;
                out.insert("table".into(), r);
                ("dispatch", t)
            }
            FieldTarget::Skip => ("skip", String::new()),
        };
        for k in ["class", "category", "table"] {
            out.entry(k).or_insert(Json::Null);
        }
        out.insert("target".into(), json!(kind));
        out.insert("isClass".into(), json!(kind == "class"));
        out.insert("isSimple".into(), json!(kind == "simple"));
        out.insert("isDispatch".into(), json!(kind == "dispatch"));
        out.insert("isSkip".into(), json!(kind == "skip"));
        out.insert("valueType".into(), json!(value_type));
        Ok(())
    }

    fn chain(&self, class: &'m BindingClass) -> Vec<&'m BindingClass> {
        let mut chain = vec![class];
        while let Some(b) = chain.last().and_then(|c| c.base.as_deref()) {
            chain.push(self.model.class(b).expect("validated model"));
        }
        chain.reverse();
        chain
    }

    fn class(&self, class: &'m BindingClass) -> Result<Json, EmitError> {
        let chain = self.chain(class);
        let base_slots: usize = chain[..chain.len() - 1]
            .iter()
            .map(|c| c.element_slots())
            .sum();
        let mut fields = Vec::new();
        let mut slot = base_slots;
        for f in &class.fields {
            let mut m = Map::new();
            m.insert("name".into(), json!(f.name));
            m.insert("xmlName".into(), qname(&f.xml_name));
            let kind = match f.kind {
                FieldKind::Element => "element",
                FieldKind::Attribute => "attribute",
                FieldKind::TextContent => "text",
            };
            m.insert("kind".into(), json!(kind));
            m.insert("isElement".into(), json!(f.kind == FieldKind::Element));
            m.insert("isAttribute".into(), json!(f.kind == FieldKind::Attribute));
            m.insert("isText".into(), json!(f.kind == FieldKind::TextContent));
            let card = match f.cardinality {
                Cardinality::ScalarRequired => "SCALAR_REQUIRED",
                Cardinality::ScalarOptional => "SCALAR_OPTIONAL",
                Cardinality::List => "LIST",
            };
            m.insert("cardinality".into(), json!(card));
            m.insert("isList".into(), json!(f.cardinality.is_list()));
            m.insert("isScalar".into(), json!(!f.cardinality.is_list()));
            m.insert(
                "isRequired".into(),
                json!(f.cardinality == Cardinality::ScalarRequired),
            );
            m.insert("ignored".into(), json!(f.ignored));
            m.insert("nillable".into(), json!(f.nillable));
            m.insert(
                "checkRequired".into(),
                json!(
                    f.kind == FieldKind::Element
                        && f.cardinality == Cardinality::ScalarRequired
                        && !f.ignored
                ),
            );
            m.insert(
                "wrappers".into(),
                Json::Array(f.wrappers.iter().map(qname).collect()),
            );
            m.insert("hasWrappers".into(), json!(!f.wrappers.is_empty()));
            m.insert(
                "inner".into(),
                f.wrappers.last().map(qname).unwrap_or(Json::Null),
            );
            m.insert("source".into(), json!(f.source));
            m.insert("hasValue".into(), json!(f.target != FieldTarget::Skip));
            let direct = matches!(
                f.target,
                FieldTarget::Class { .. } | FieldTarget::Simple { .. }
            );
            m.insert(
                "nilSlot".into(),
                json!(f.nillable && direct && f.wrappers.is_empty()),
            );
            if f.kind == FieldKind::Element {
                m.insert("slot".into(), json!(slot));
                slot += 1;
            } else {
                m.insert("slot".into(), Json::Null);
            }
            self.target(&f.target, &mut m)?;
            fields.push(Json::Object(m));
        }
        let pick = |k: &str| -> Vec<Json> {
            fields
                .iter()
                .filter(|f| f[k] == json!(true))
                .cloned()
                .collect()
        };
        let (attributes, elements, texts) =
            (pick("isAttribute"), pick("isElement"), pick("isText"));
        let rules: Vec<Json> = chain
            .iter()
            .flat_map(|c| &c.skip_namespaces)
            .map(|r| {
                let (kind, list) = match r {
                    NamespaceRule::Any => ("any", &[][..]),
                    NamespaceRule::Not(l) if l.is_empty() => ("any", &[][..]),
                    NamespaceRule::Not(l) => ("not", &l[..]),
                    NamespaceRule::Only(l) if l.is_empty() => ("none", &[][..]),
                    NamespaceRule::Only(l) => ("only", &l[..]),
                };
                json!({
                    "rule": kind,
                    "any": kind == "any",
                    "none": kind == "none",
                    "not": kind == "not",
                    "only": kind == "only",
                    "namespaces": list,
                })
            })
            .collect();
        let has_dispatch = elements.iter().any(|f| f["isDispatch"] == json!(true));
        let has_required = fields.iter().any(|f| f["checkRequired"] == json!(true));
        Ok(json!({
            "name": class.name,
            "module": self.modules[class.name.as_str()],
            "sourceType": class.source_type,
            "xmlType": class.xml_type.as_ref().map(qname),
            "isAbstract": class.is_abstract,
            "base": class.base.as_deref().map(|b| self.class_ref(b)).transpose()?,
            "fields": fields,
            "attributes": attributes,
            "elements": elements,
            "texts": texts,
            "hasDispatch": has_dispatch,
            "hasRequired": has_required,
            "acceptsText": chain.iter().any(|c| c.accepts_text()),
            "skipRules": rules,
            "slots": slot,
        }))
    }

    fn table(&self, table: &DispatchTable, is_root: bool) -> Result<Json, EmitError> {
        let mut entries = Vec::new();
        for e in &table.entries {
            let mut m = Map::new();
            m.insert("variant".into(), json!(e.variant));
            m.insert("tag".into(), json!(e.tag));
            m.insert("element".into(), qname(&e.element));
            m.insert(
                "xsiType".into(),
                e.xsi_type.as_ref().map(qname).unwrap_or(Json::Null),
            );
            m.insert("hasXsi".into(), json!(e.xsi_type.is_some()));
            m.insert("nillable".into(), json!(e.nillable));
            m.insert("holdsOption".into(), json!(e.nillable || is_root));
            self.target(&e.target, &mut m)?;
            entries.push(Json::Object(m));
        }
        let by_xsi = |want: bool| -> Vec<Json> {
            entries
                .iter()
                .filter(|e| e["hasXsi"] == json!(want))
                .cloned()
                .collect()
        };
        Ok(json!({
            "name": table.name,
            "isRoot": is_root,
            "entries": entries,
            "typedEntries": by_xsi(true),
            "plainEntries": by_xsi(false),
        }))
    }
}

/// Module names for live classes, unique and clear of the fixed modules.
pub(super) fn module_names(model: &BindingModel) -> BTreeMap<&str, String> {
    let mut scope = Scope::new();
    for r in ["dispatch", "values", "mod", "lib", "main"] {
        scope.reserve(r);
    }
    model
        .live_classes()
        .map(|c| (c.name.as_str(), scope.claim(field_ident(&c.name))))
        .collect()
}

pub fn render_context(model: &BindingModel, types: &TypeMap) -> Result<Json, EmitError> {
    let b = Builder {
        model,
        types,
        modules: module_names(model),
    };
    let classes = model
        .live_classes()
        .map(|c| b.class(c))
        .collect::<Result<Vec<_>, _>>()?;
    let tables = model
        .dispatch_tables
        .values()
        .map(|t| b.table(t, false))
        .collect::<Result<Vec<_>, _>>()?;
    let eff = model.options.effective();
    Ok(json!({
        "name": model.name,
        "irVersion": model.ir_version,
        "options": serde_json::to_value(&model.options).map_err(|e| EmitError::Model(BindingError::Json(e.to_string())))?,
        "tighteningApplied": eff.tighten_occurrences,
        "boundingApplied": eff.bound_substitutions,
        "classes": classes,
        "classCount": model.class_count(),
        "tables": tables,
        "root": b.table(&model.roots, true)?,
        "collapsedElements": model.collapsed_elements,
    }))
}
