//! Template-driven source emission from a [`BindingModel`].

mod context;
pub mod template;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value as Json};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::binding::{BindingError, BindingModel};
pub use context::{render_context, TypeMap};
pub use template::Template;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("TEMPLATE_ERROR {template}:{line}: {reason}")]
    Template {
        template: String,
        line: usize,
        reason: String,
    },
    #[error("UNRESOLVED_PLACEHOLDER {template}:{line}: {placeholder}")]
    Unresolved {
        template: String,
        line: usize,
        placeholder: String,
    },
    #[error("EMPTY_MODEL no root elements to emit")]
    EmptyModel,
    #[error(transparent)]
    Model(#[from] BindingError),
    #[error("TEMPLATE_ERROR two artifacts render to {0}")]
    DuplicatePath(String),
    #[error("IO_ERROR {path}: {message}")]
    Io { path: String, message: String },
}

fn io_error(path: &Path, e: std::io::Error) -> EmitError {
    EmitError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// What one manifest entry is instantiated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Per {
    #[default]
    Model,
    Class,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub template: String,
    /// Itself a template, rendered in the same scope as the content.
    pub path: String,
    #[serde(default)]
    pub per: Per,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    name: String,
    #[serde(rename = "output")]
    outputs: Vec<OutputSpec>,
    types: BTreeMap<String, String>,
}

pub const MANIFEST_FILE: &str = "templates.toml";
pub const TEMPLATE_EXT: &str = "tmpl";

/// Named templates plus the manifest saying which ones become files.
#[derive(Debug, Clone)]
pub struct TemplateSet {
    pub name: String,
    pub outputs: Vec<OutputSpec>,
    templates: BTreeMap<String, Template>,
    paths: Vec<Template>,
    types: TypeMap,
}

const RUST_SOURCES: &[(&str, &str)] = &[
    (
        "class.rs",
        include_str!("../../templates/rust/class.rs.tmpl"),
    ),
    (
        "dispatch.rs",
        include_str!("../../templates/rust/dispatch.rs.tmpl"),
    ),
    (
        "values.rs",
        include_str!("../../templates/rust/values.rs.tmpl"),
    ),
    ("mod.rs", include_str!("../../templates/rust/mod.rs.tmpl")),
    ("table", include_str!("../../templates/rust/table.tmpl")),
    ("entry", include_str!("../../templates/rust/entry.tmpl")),
    (
        "entry_value",
        include_str!("../../templates/rust/entry_value.tmpl"),
    ),
    ("direct", include_str!("../../templates/rust/direct.tmpl")),
    ("store", include_str!("../../templates/rust/store.tmpl")),
    (
        "field_type",
        include_str!("../../templates/rust/field_type.tmpl"),
    ),
    (
        "read_value",
        include_str!("../../templates/rust/read_value.tmpl"),
    ),
];
const RUST_MANIFEST: &str = include_str!("../../templates/rust/templates.toml");

impl TemplateSet {
    /// Builds a set from manifest text and template sources keyed by name.
    pub fn from_sources<I, K, V>(manifest: &str, sources: I) -> Result<TemplateSet, EmitError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: AsRef<str>,
    {
        let file: ManifestFile = toml::from_str(manifest).map_err(|e| {
            let line = e
                .span()
                .map(|s| manifest[..s.start].matches('\n').count() + 1)
                .unwrap_or(0);
            EmitError::Template {
                template: MANIFEST_FILE.into(),
                line,
                reason: e.message().to_string(),
            }
        })?;
        let mut templates = BTreeMap::new();
        for (name, src) in sources {
            let name = name.into();
            let t = Template::parse(&name, src.as_ref())?;
            templates.insert(name, t);
        }
        let manifest_error = |reason: String| EmitError::Template {
            template: MANIFEST_FILE.into(),
            line: 0,
            reason,
        };
        for (name, t) in &templates {
            for p in t.partials() {
                if !templates.contains_key(p) {
                    return Err(manifest_error(format!(
                        "{name} includes unknown partial {p:?}"
                    )));
                }
            }
        }
        let mut paths = Vec::new();
        for (i, o) in file.outputs.iter().enumerate() {
            if !templates.contains_key(&o.template) {
                return Err(manifest_error(format!(
                    "output {} names unknown template {:?}",
                    i + 1,
                    o.template
                )));
            }
            paths.push(Template::parse(&format!("{} path", o.template), &o.path)?);
        }
        let mut types = TypeMap::new();
        for (k, v) in &file.types {
            if !context::TYPE_KEYS.contains(&k.as_str()) {
                return Err(manifest_error(format!("unknown type key {k:?}")));
            }
            types.insert(k.clone(), Template::parse(&format!("types.{k}"), v)?);
        }
        if let Some(missing) = context::TYPE_KEYS.iter().find(|k| !types.contains_key(**k)) {
            return Err(manifest_error(format!("no type spelling for {missing:?}")));
        }
        Ok(TemplateSet {
            name: file.name,
            outputs: file.outputs,
            templates,
            paths,
            types,
        })
    }

    /// Loads `templates.toml` and every `*.tmpl` file of a directory.
    pub fn from_dir(dir: &Path) -> Result<TemplateSet, EmitError> {
        let manifest_path = dir.join(MANIFEST_FILE);
        let manifest =
            fs::read_to_string(&manifest_path).map_err(|e| io_error(&manifest_path, e))?;
        let mut sources = Vec::new();
        let entries = fs::read_dir(dir).map_err(|e| io_error(dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| io_error(dir, e))?.path();
            if path.extension().is_some_and(|x| x == TEMPLATE_EXT) {
                let name = path
                    .file_stem()
                    .expect("has extension")
                    .to_string_lossy()
                    .into_owned();
                let src = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
                sources.push((name, src));
            }
        }
        sources.sort();
        TemplateSet::from_sources(&manifest, sources)
    }

    /// The built-in backend: recursive-descent parsers in Rust against
    /// `xsdbind-runtime`.
    pub fn rust() -> TemplateSet {
        TemplateSet::from_sources(RUST_MANIFEST, RUST_SOURCES.iter().copied())
            .expect("built-in templates are valid")
    }

    /// The built-in backend's files, for copying and customizing.
    pub fn rust_sources() -> Vec<(String, &'static str)> {
        let mut v: Vec<(String, &str)> = RUST_SOURCES
            .iter()
            .map(|(n, s)| (format!("{n}.{TEMPLATE_EXT}"), *s))
            .collect();
        v.push((MANIFEST_FILE.to_string(), RUST_MANIFEST));
        v
    }

    pub fn template(&self, name: &str) -> Option<&Template> {
        self.templates.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedArtifact {
    pub path: String,
    pub content: String,
}

impl GeneratedArtifact {
    pub fn byte_size(&self) -> usize {
        self.content.len()
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(self.content.as_bytes()))
    }
}

/// Renders every manifest entry. Per-class entries run once per live class,
/// per-table entries once per dispatch table (roots excluded).
pub fn render(
    model: &BindingModel,
    set: &TemplateSet,
) -> Result<Vec<GeneratedArtifact>, EmitError> {
    model.validate()?;
    let ctx = render_context(model, &set.types)?;
    let mut jobs: Vec<(usize, Option<&Json>)> = Vec::new();
    for (i, o) in set.outputs.iter().enumerate() {
        match o.per {
            Per::Model => jobs.push((i, None)),
            Per::Class => jobs.extend(
                ctx["classes"]
                    .as_array()
                    .expect("classes")
                    .iter()
                    .map(|c| (i, Some(c))),
            ),
            Per::Table => jobs.extend(
                ctx["tables"]
                    .as_array()
                    .expect("tables")
                    .iter()
                    .map(|t| (i, Some(t))),
            ),
        }
    }
    let partial = |n: &str| set.templates.get(n);
    let artifacts = jobs
        .par_iter()
        .map(|&(i, item)| {
            let scopes: Vec<&Json> = std::iter::once(&ctx).chain(item).collect();
            let o = &set.outputs[i];
            let path = set.paths[i].render(&scopes, &partial)?;
            let content = set.templates[&o.template].render(&scopes, &partial)?;
            Ok(GeneratedArtifact { path, content })
        })
        .collect::<Result<Vec<_>, EmitError>>()?;
    let mut seen = BTreeSet::new();
    for a in &artifacts {
        if !is_relative_path(&a.path) {
            return Err(EmitError::Template {
                template: format!("{} path", a.path),
                line: 1,
                reason: format!(
                    "output path {:?} must be relative and stay inside the output directory",
                    a.path
                ),
            });
        }
        if !seen.insert(a.path.as_str()) {
            return Err(EmitError::DuplicatePath(a.path.clone()));
        }
    }
    Ok(artifacts)
}

fn is_relative_path(p: &str) -> bool {
    !p.is_empty()
        && !p.starts_with(['/', '\\'])
        && p.split(['/', '\\'])
            .all(|seg| !seg.is_empty() && seg != "..")
}

/// Parser sources from the built-in Rust backend.
pub fn emit_parser_backend(model: &BindingModel) -> Result<Vec<GeneratedArtifact>, EmitError> {
    if model.roots.entries.is_empty() {
        return Err(EmitError::EmptyModel);
    }
    render(model, &TemplateSet::rust())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub total: usize,
    /// (path, bytes), largest first.
    pub rows: Vec<(String, usize)>,
}

pub fn size_report(artifacts: &[GeneratedArtifact]) -> SizeReport {
    let mut rows: Vec<(String, usize)> = artifacts
        .iter()
        .map(|a| (a.path.clone(), a.byte_size()))
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    SizeReport {
        total: rows.iter().map(|r| r.1).sum(),
        rows,
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .map(|r| r.0.len())
            .max()
            .unwrap_or(0)
            .max(5);
        for (path, bytes) in &self.rows {
            writeln!(f, "{path:<width$}  {bytes:>9}")?;
        }
        writeln!(f, "{:<width$}  {:>9}", "total", self.total)
    }
}

/// `MANIFEST.json` content for a generation run.
pub fn manifest_json(model: &BindingModel, artifacts: &[GeneratedArtifact]) -> String {
    let eff = model.options.effective();
    let files: Vec<Json> = artifacts
        .iter()
        .map(|a| json!({"path": a.path, "bytes": a.byte_size(), "sha256": a.sha256()}))
        .collect();
    let doc = json!({
        "model": model.name,
        "irVersion": model.ir_version,
        "options": model.options,
        "flags": {
            "syntheticCorpus": model.options.corpus_is_synthetic,
            "tighteningDisabled": !eff.tighten_occurrences,
            "boundingDisabled": !eff.bound_substitutions,
        },
        "classCount": model.class_count(),
        "totalBytes": size_report(artifacts).total,
        "artifacts": files,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
    s.push('\n');
    s
}

/// Writes artifacts and `MANIFEST.json` under `<out>/gen/<model-name>/`,
/// replacing what an earlier run left there. Returns that directory.
pub fn write_generated(
    out: &Path,
    model: &BindingModel,
    artifacts: &[GeneratedArtifact],
) -> Result<PathBuf, EmitError> {
    if !is_relative_path(&model.name) || model.name.contains(['/', '\\']) {
        return Err(EmitError::Model(BindingError::Invalid(format!(
            "model name {:?} is not usable as a directory name",
            model.name
        ))));
    }
    let dir = out.join("gen").join(&model.name);
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    }
    for a in artifacts {
        let p = dir.join(&a.path);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
        fs::write(&p, &a.content).map_err(|e| io_error(&p, e))?;
    }
    fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
    let m = dir.join("MANIFEST.json");
    fs::write(&m, manifest_json(model, artifacts)).map_err(|e| io_error(&m, e))?;
    Ok(dir)
}
