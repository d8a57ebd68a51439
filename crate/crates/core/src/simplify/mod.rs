//! Retained-subset computation, reduced XSD emission, and the reduction
//! report.

mod xsd;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use thiserror::Error;

use crate::analyzer::UsageReport;
use crate::model::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplifyError {
    #[error("UNKNOWN_COMPONENT {0}")]
    UnknownComponent(ComponentId),
    #[error("NOT_CLOSED {from} requires {to}, which is not retained")]
    NotClosed { from: String, to: String },
    #[error("IO_ERROR {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Dependency closure of the used components over the mandatory edges.
pub fn compute_retained_set(
    schema: &SchemaSet,
    usage: &UsageReport,
) -> Result<BTreeSet<ComponentId>, SimplifyError> {
    schema
        .dependency_closure(&usage.used_components, &EdgeLabel::MANDATORY)
        .map_err(|e| match e {
            ModelError::UnknownComponent(id) => SimplifyError::UnknownComponent(id),
            other => unreachable!("closure only fails on unknown ids: {other}"),
        })
}

/// Checks that `retained` can be emitted on its own: mandatory edges stay
/// inside it and every anonymous component's owner is retained.
pub fn check_closed(
    schema: &SchemaSet,
    retained: &BTreeSet<ComponentId>,
) -> Result<(), SimplifyError> {
    for &id in retained {
        let c = schema.get(id).ok_or(SimplifyError::UnknownComponent(id))?;
        for e in schema.out_edges(id) {
            if EdgeLabel::MANDATORY.contains(&e.label) && !retained.contains(&e.to) {
                return Err(SimplifyError::NotClosed {
                    from: c.key.clone(),
                    to: schema.key(e.to).to_string(),
                });
            }
        }
        if let Some(owner) = c.owner {
            if !c.builtin && !retained.contains(&owner) {
                return Err(SimplifyError::NotClosed {
                    from: c.key.clone(),
                    to: schema.key(owner).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// A reduced schema document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaFile {
    pub file_name: String,
    pub namespace: String,
    pub text: String,
}

/// Renders one XSD document per namespace holding retained components.
pub fn render_reduced_schemas(
    schema: &SchemaSet,
    retained: &BTreeSet<ComponentId>,
) -> Result<Vec<SchemaFile>, SimplifyError> {
    check_closed(schema, retained)?;
    Ok(xsd::render(schema, retained))
}

/// Writes the reduced schema documents into `out_dir`.
pub fn emit_reduced_schemas(
    schema: &SchemaSet,
    retained: &BTreeSet<ComponentId>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, SimplifyError> {
    let files = render_reduced_schemas(schema, retained)?;
    let io = |path: &Path, e: std::io::Error| SimplifyError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    };
    if !files.is_empty() {
        fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    }
    let mut written = Vec::new();
    for f in files {
        let path = out_dir.join(&f.file_name);
        fs::write(&path, f.text.as_bytes()).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Deterministic file-name stem for a namespace.
pub fn namespace_slug(namespace: &str) -> String {
    let trimmed = namespace
        .strip_prefix("http://")
        .or_else(|| namespace.strip_prefix("https://"))
        .or_else(|| namespace.strip_prefix("urn:"))
        .unwrap_or(namespace);
    let mut slug = String::new();
    for c in trimmed.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c.to_ascii_lowercase());
        } else if !slug.ends_with('-') {
            slug.push('-');
        }
    }
    let slug = slug.trim_matches('-').to_string();
    if slug.is_empty() {
        "no-namespace".to_string()
    } else {
        slug
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub total_components: usize,
    pub retained_components: usize,
    pub usage_ratio: f64,
    /// namespace → (retained, total)
    pub retained_by_namespace: BTreeMap<String, (usize, usize)>,
    pub removed_globals: Vec<QName>,
}

/// Counts over global components that come from schema documents; the
/// built-in types are present in every set and are not counted.
pub fn reduction_report(schema: &SchemaSet, retained: &BTreeSet<ComponentId>) -> ReductionReport {
    let mut total = 0;
    let mut kept = 0;
    let mut by_ns: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut removed = Vec::new();
    for c in schema.user_globals() {
        total += 1;
        let slot = by_ns.entry(c.namespace.clone()).or_default();
        slot.1 += 1;
        if retained.contains(&c.id) {
            kept += 1;
            slot.0 += 1;
        } else {
            removed.push(c.name.clone().expect("globals are named"));
        }
    }
    removed.sort();
    ReductionReport {
        total_components: total,
        retained_components: kept,
        usage_ratio: if total == 0 {
            1.0
        } else {
            kept as f64 / total as f64
        },
        retained_by_namespace: by_ns,
        removed_globals: removed,
    }
}

impl ReductionReport {
    /// Usage ratio as a percentage with one decimal, e.g. `25.0%`.
    pub fn percent(&self) -> String {
        format!("{:.1}%", self.usage_ratio * 100.0)
    }

    pub fn to_json(&self) -> Value {
        let by_ns: serde_json::Map<String, Value> = self
            .retained_by_namespace
            .iter()
            .map(|(ns, (r, t))| (ns.clone(), json!({ "retained": r, "total": t })))
            .collect();
        json!({
            "totalComponents": self.total_components,
            "retainedComponents": self.retained_components,
            "usageRatio": self.usage_ratio,
            "retainedByNamespace": by_ns,
            "removedGlobals": self.removed_globals.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    }
}
