//! The fixture suite and the binding variants generated for each fixture.
//!
//! Shared between the build script and the tests.

use std::fs;
use std::path::{Path, PathBuf};

use xsdbind_core::analyzer::{analyze_corpus, saturated_usage, Document, UsageReport};
use xsdbind_core::binding::{BindingModel, BindingOptions};
use xsdbind_core::loader::{load_files, load_schema_set, MemoryResolver, SchemaSource};
use xsdbind_core::model::SchemaSet;
use xsdbind_core::pipeline;
use xsdbind_runtime::Mode;

use crate::synth::{records_document, Suite, RECORDS_XSD};

pub const SYNTH_SEED: u64 = 0x5eed;
pub const SYNTH_USED: usize = 25;
pub const SYNTH_UNUSED: usize = 75;
pub const SYNTH_DOCS: usize = 8;
pub const RECORDS_SEED: u64 = 11;
pub const CAPABILITIES_IGNORE: &str = "{urn:example:sensors}capabilities/contents";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// `fixtures/<name>/schemas/<entry>` and `fixtures/<name>/corpus/*.xml`.
    Files(&'static [&'static str]),
    Synth,
    Records,
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub source: Source,
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "orders",
        source: Source::Files(&["orders.xsd"]),
    },
    Fixture {
        name: "substitution",
        source: Source::Files(&["shapes.xsd"]),
    },
    Fixture {
        name: "capabilities",
        source: Source::Files(&["sensors.xsd"]),
    },
    Fixture {
        name: "synth",
        source: Source::Synth,
    },
    Fixture {
        name: "records",
        source: Source::Records,
    },
];

pub fn fixture(name: &str) -> &'static Fixture {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .unwrap_or_else(|| panic!("no fixture {name}"))
}

pub struct Loaded {
    pub schema: SchemaSet,
    /// (file name, text), sorted by name.
    pub documents: Vec<(String, String)>,
    pub usage: UsageReport,
}

impl Loaded {
    pub fn corpus(&self) -> Vec<Document> {
        self.documents
            .iter()
            .map(|(n, t)| Document::new(n.clone(), t.as_bytes()))
            .collect()
    }
}

pub fn synth_suite() -> Suite {
    Suite::generate(SYNTH_SEED, SYNTH_USED, SYNTH_UNUSED, SYNTH_DOCS)
}

pub fn fixtures_dir(manifest_dir: &Path) -> PathBuf {
    manifest_dir.join("fixtures")
}

fn xml_files(dir: &Path) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if path.extension().is_some_and(|x| x == "xml") {
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let name = path
                .file_name()
                .expect("file")
                .to_string_lossy()
                .into_owned();
            out.push((name, text));
        }
    }
    out.sort();
    Ok(out)
}

impl Fixture {
    pub fn schema_paths(&self, root: &Path) -> Vec<PathBuf> {
        match self.source {
            Source::Files(entry) => entry
                .iter()
                .map(|e| root.join(self.name).join("schemas").join(e))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Loads the schema and corpus and analyzes the corpus strictly.
    pub fn load(&self, root: &Path) -> Result<Loaded, String> {
        let (schema, documents) = match self.source {
            Source::Files(_) => {
                let schema =
                    load_files(&self.schema_paths(root), None).map_err(|e| e.to_string())?;
                (schema, xml_files(&root.join(self.name).join("corpus"))?)
            }
            Source::Synth => {
                let suite = synth_suite();
                let schema = load_schema_set(
                    &[SchemaSource::new("synth.xsd", suite.xsd())],
                    &MemoryResolver::new(),
                )
                .map_err(|e| e.to_string())?;
                (schema, suite.documents)
            }
            Source::Records => {
                let schema = load_schema_set(
                    &[SchemaSource::new("records.xsd", RECORDS_XSD)],
                    &MemoryResolver::new(),
                )
                .map_err(|e| e.to_string())?;
                (
                    schema,
                    vec![(
                        "records.xml".to_string(),
                        records_document(RECORDS_SEED, 16 * 1024),
                    )],
                )
            }
        };
        let docs: Vec<Document> = documents
            .iter()
            .map(|(n, t)| Document::new(n.clone(), t.as_bytes()))
            .collect();
        let (usage, failures) = analyze_corpus(&schema, &docs, Mode::Strict);
        if let Some(f) = failures.first() {
            return Err(format!("{}: {f:?}", self.name));
        }
        Ok(Loaded {
            schema,
            documents,
            usage,
        })
    }

    pub fn variants(&self) -> Vec<Variant> {
        let mut v = vec![
            Variant::new("default", BindingOptions::default()),
            Variant::unpruned(),
        ];
        let opts = |f: fn(&mut BindingOptions)| {
            let mut o = BindingOptions::default();
            f(&mut o);
            o
        };
        match self.name {
            "orders" => {
                v.push(Variant::new(
                    "no_collapse",
                    opts(|o| o.collapse_single_child = false),
                ));
                v.push(Variant::new(
                    "keep_occurrences",
                    opts(|o| o.tighten_occurrences = false),
                ));
            }
            "substitution" => {
                v.push(Variant::new(
                    "no_flatten",
                    opts(|o| o.flatten_inheritance = false),
                ));
                v.push(Variant::new(
                    "unbounded",
                    opts(|o| o.bound_substitutions = false),
                ));
                v.push(Variant::new(
                    "inherited_unbounded",
                    opts(|o| {
                        o.flatten_inheritance = false;
                        o.bound_substitutions = false;
                    }),
                ));
            }
            "capabilities" => {
                v.push(Variant::new(
                    "no_collapse",
                    opts(|o| o.collapse_single_child = false),
                ));
                v.push(Variant::new(
                    "ignore_contents",
                    opts(|o| {
                        o.ignore_paths = vec![CAPABILITIES_IGNORE.parse().expect("valid path")]
                    }),
                ));
            }
            "synth" => {
                v.push(Variant::new(
                    "synthetic",
                    opts(|o| o.corpus_is_synthetic = true),
                ));
                v.push(Variant::new(
                    "no_flatten",
                    opts(|o| o.flatten_inheritance = false),
                ));
            }
            _ => {}
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct Variant {
    pub name: &'static str,
    pub options: BindingOptions,
    /// Bind against [`saturated_usage`] instead of the corpus.
    pub saturated: bool,
}

impl Variant {
    fn new(name: &'static str, options: BindingOptions) -> Self {
        Variant {
            name,
            options,
            saturated: false,
        }
    }

    /// Every optimization off, corpus pruning included.
    pub fn unpruned() -> Self {
        Variant {
            name: "unoptimized",
            options: BindingOptions::unoptimized(),
            saturated: true,
        }
    }

    pub fn bind(&self, loaded: &Loaded, name: &str) -> Result<BindingModel, String> {
        let usage = if self.saturated {
            saturated_usage(&loaded.schema)
        } else {
            loaded.usage.clone()
        };
        pipeline::bind(&loaded.schema, &usage, &self.options, name).map_err(|e| e.to_string())
    }
}

pub fn parser_name(fixture: &str, variant: &str) -> String {
    format!("{fixture}_{variant}")
}
