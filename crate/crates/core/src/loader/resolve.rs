//! Locating included and imported schema documents without network access.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Component as PathPart, Path, PathBuf};

use super::{LoadError, SchemaSource};

/// Finds the document named by an `include`/`import`.
pub trait Resolver {
    /// `location` is the `schemaLocation` attribute, `namespace` the imported
    /// namespace (imports only), `base` the system id of the referencing
    /// document. `Ok(None)` means not found.
    fn resolve(
        &self,
        location: Option<&str>,
        namespace: Option<&str>,
        base: &str,
    ) -> Result<Option<SchemaSource>, LoadError>;
}

fn is_remote(location: &str) -> bool {
    location.contains("://")
}

/// Catalog file: one `namespace-or-systemid TAB path` mapping per line,
/// paths relative to the catalog file. Lookup order: the `schemaLocation`
/// as written, then the namespace, then the location as a file relative to
/// the referencing document. Remote locations are never fetched.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: BTreeMap<String, PathBuf>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str, dir: &Path) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((key, path)) = line.split_once('\t') else {
                return Err(format!("line {}: expected `key<TAB>path`", n + 1));
            };
            entries.insert(key.trim().to_string(), dir.join(path.trim()));
        }
        Ok(Catalog { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self, LoadError> {
        let text = fs::read_to_string(path).map_err(|e| LoadError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Catalog::parse(&text, dir).map_err(|reason| LoadError::Malformed {
            system_id: path.display().to_string(),
            location: "catalog".into(),
            reason,
        })
    }

    pub fn insert(&mut self, key: impl Into<String>, path: impl Into<PathBuf>) {
        self.entries.insert(key.into(), path.into());
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Reads a schema file, using its normalized path as the system id.
pub fn read_source(path: &Path) -> Result<SchemaSource, LoadError> {
    let bytes = fs::read(path).map_err(|e| LoadError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let system_id = fs::canonicalize(path).unwrap_or_else(|_| normalize(path));
    let text =
        xsdbind_runtime::encoding::decode(&bytes).map_err(|reason| LoadError::Malformed {
            system_id: system_id.display().to_string(),
            location: "1:1".into(),
            reason,
        })?;
    Ok(SchemaSource::new(
        system_id.display().to_string(),
        text.into_owned(),
    ))
}

impl Resolver for Catalog {
    fn resolve(
        &self,
        location: Option<&str>,
        namespace: Option<&str>,
        base: &str,
    ) -> Result<Option<SchemaSource>, LoadError> {
        let mapped = location
            .and_then(|l| self.entries.get(l))
            .or_else(|| namespace.and_then(|n| self.entries.get(n)));
        if let Some(path) = mapped {
            return read_source(path).map(Some);
        }
        match location {
            Some(l) if !is_remote(l) => {
                let dir = Path::new(base).parent().unwrap_or(Path::new("."));
                let path = dir.join(l);
                if path.is_file() {
                    read_source(&path).map(Some)
                } else {
                    Ok(None)
                }
            }
            _ => Ok(None),
        }
    }
}

/// In-memory documents keyed by system id, with an optional namespace map.
/// Relative locations are joined to the referencing document's directory.
#[derive(Debug, Clone, Default)]
pub struct MemoryResolver {
    docs: BTreeMap<String, String>,
    namespaces: BTreeMap<String, String>,
}

impl MemoryResolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, system_id: impl Into<String>, text: impl Into<String>) -> &mut Self {
        self.docs.insert(system_id.into(), text.into());
        self
    }

    pub fn map_namespace(
        &mut self,
        namespace: impl Into<String>,
        system_id: impl Into<String>,
    ) -> &mut Self {
        self.namespaces.insert(namespace.into(), system_id.into());
        self
    }

    pub fn source(&self, system_id: &str) -> Option<SchemaSource> {
        self.docs
            .get(system_id)
            .map(|t| SchemaSource::new(system_id.to_string(), t.clone()))
    }
}

impl Resolver for MemoryResolver {
    fn resolve(
        &self,
        location: Option<&str>,
        namespace: Option<&str>,
        base: &str,
    ) -> Result<Option<SchemaSource>, LoadError> {
        if let Some(l) = location {
            if let Some(s) = self.source(l) {
                return Ok(Some(s));
            }
            if !is_remote(l) {
                let dir = Path::new(base).parent().unwrap_or(Path::new(""));
                let joined = normalize(&dir.join(l));
                if let Some(s) = self.source(&joined.to_string_lossy()) {
                    return Ok(Some(s));
                }
            }
        }
        Ok(namespace
            .and_then(|n| self.namespaces.get(n))
            .and_then(|id| self.source(id)))
    }
}

/// Lexically removes `.` and `..` segments.
fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for part in path.components() {
        match part {
            PathPart::CurDir => {}
            PathPart::ParentDir => {
                if !out.pop() {
                    out.push("..");
                }
            }
            other => out.push(other.as_os_str()),
        }
    }
    out
}
