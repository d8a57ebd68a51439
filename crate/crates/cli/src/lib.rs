//! The `xsdbind` command line: `analyze`, `simplify` and `generate`.
//!
//! Each command runs a prefix of the same pipeline over the same inputs:
//! load schemas, analyze the corpus, compute the retained set, build the
//! binding model, render templates. Everything is written below `--out`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use walkdir::WalkDir;
use xsdbind_core::analyzer::{analyze_corpus, Document, UsageReport};
use xsdbind_core::binding::naming::field_ident;
use xsdbind_core::binding::{BindingError, BindingOptions, IgnorePath};
use xsdbind_core::emit::{emit_parser_backend, render, size_report, write_generated, EmitError, TemplateSet};
use xsdbind_core::loader::load_files;
use xsdbind_core::model::SchemaSet;
use xsdbind_core::pipeline::{self, PipelineError};
use xsdbind_core::simplify::{compute_retained_set, emit_reduced_schemas, reduction_report};
use xsdbind_runtime::Mode;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 1;
pub const EXIT_CORPUS: i32 = 2;
pub const EXIT_TEMPLATE: i32 = 3;

pub const USAGE_REPORT: &str = "usage-report.json";
pub const REDUCTION_REPORT: &str = "reduction-report.json";
pub const REDUCED_DIR: &str = "reduced";
pub const MODEL_FILE: &str = "binding-model.json";

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  1  schema or configuration error (unreadable or invalid schema, unresolved import, bad flags, output not writable)
  2  corpus error (a document failed analysis in strict mode, or no usage was recorded)
  3  template error (invalid template set, unresolved placeholder)";

#[derive(Debug, Parser)]
#[command(
    name = "xsdbind",
    version,
    about = "Corpus-driven XML Schema subsetting and parser generation",
    after_help = EXIT_HELP
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Entry schema files.
    #[arg(long, global = true, num_args = 1.., value_name = "FILE")]
    schemas: Vec<PathBuf>,
    /// Catalog mapping namespaces or schema locations to local files.
    #[arg(long, global = true, value_name = "FILE")]
    catalog: Option<PathBuf>,
    /// Corpus directories (searched recursively for *.xml) or files.
    #[arg(long, global = true, num_args = 1.., value_name = "PATH")]
    docs: Vec<PathBuf>,
    /// Output directory; must differ from the schema and corpus directories.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Fail on the first violation in a document (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Record violations as warnings and keep going.
    #[arg(long, global = true)]
    lenient: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analyze the corpus and write usage-report.json.
    Analyze,
    /// Analyze, then write the reduced schemas and reduction-report.json.
    Simplify,
    /// Run the whole pipeline and write generated sources under gen/.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Keep derived classes linked to their bases.
    #[arg(long)]
    no_flatten: bool,
    /// Keep single-child wrapper elements as classes.
    #[arg(long)]
    no_collapse: bool,
    /// Keep declared occurrence bounds even when the corpus never repeats.
    #[arg(long)]
    keep_occurrences: bool,
    /// Dispatch on every schema-possible substitution, not just observed ones.
    #[arg(long)]
    all_substitutions: bool,
    /// The corpus is synthetic; disables tightening and substitution bounding.
    #[arg(long)]
    synthetic_corpus: bool,
    /// Element path whose subtree the parser skips, e.g. {urn:x}root/child.
    #[arg(long = "ignore", value_name = "PATH")]
    ignore: Vec<IgnorePath>,
    /// Directory holding templates.toml and *.tmpl files.
    #[arg(long, value_name = "DIR")]
    templates: Option<PathBuf>,
    /// Model name; defaults to the first schema's file stem.
    #[arg(long)]
    name: Option<String>,
}

/// Everything a command needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub schemas: Vec<PathBuf>,
    pub catalog: Option<PathBuf>,
    pub docs: Vec<PathBuf>,
    pub out_dir: PathBuf,
    pub mode: Mode,
    pub options: BindingOptions,
    pub templates: Option<PathBuf>,
    pub model_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn absolute(p: &Path) -> PathBuf {
    fs::canonicalize(p).or_else(|_| std::path::absolute(p)).unwrap_or_else(|_| p.to_path_buf())
}

impl RunConfig {
    pub fn new(schemas: Vec<PathBuf>, docs: Vec<PathBuf>, out_dir: PathBuf) -> Self {
        let model_name = schemas
            .first()
            .and_then(|p| p.file_stem())
            .map(|s| field_ident(&s.to_string_lossy()))
            .unwrap_or_else(|| "model".to_string());
        RunConfig {
            schemas,
            catalog: None,
            docs,
            out_dir,
            mode: Mode::Strict,
            options: BindingOptions::default(),
            templates: None,
            model_name,
        }
    }

    pub fn validate(&self) -> Outcome<()> {
        if self.schemas.is_empty() {
            return Err(Failure::new(EXIT_SCHEMA, "--schemas is required"));
        }
        let out = absolute(&self.out_dir);
        let mut inputs: Vec<PathBuf> = self.schemas.iter().filter_map(|s| absolute(s).parent().map(Path::to_path_buf)).collect();
        for d in &self.docs {
            let d = absolute(d);
            inputs.push(if d.is_dir() { d } else { d.parent().map(Path::to_path_buf).unwrap_or(d) });
        }
        if let Some(clash) = inputs.iter().find(|i| **i == out) {
            return Err(Failure::new(
                EXIT_SCHEMA,
                format!("output directory {} is also an input directory", clash.display()),
            ));
        }
        Ok(())
    }
}

/// Where command output goes.
pub struct Console<'a> {
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Console<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", line.as_ref());
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, console: &mut Console<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                console.warn(text.trim_end());
            } else {
                console.say(text.trim_end());
            }
            return code;
        }
    };
    let Some(out_dir) = cli.common.out.clone() else {
        console.warn("error: --out is required");
        return EXIT_SCHEMA;
    };
    let mut cfg = RunConfig::new(cli.common.schemas, cli.common.docs, out_dir);
    cfg.catalog = cli.common.catalog;
    if cli.common.lenient {
        cfg.mode = Mode::Lenient;
        cfg.options.lenient = true;
    }
    let result = match cli.command {
        Command::Analyze => cmd_analyze(&cfg, console),
        Command::Simplify => cmd_simplify(&cfg, console),
        Command::Generate(g) => {
            cfg.options.flatten_inheritance = !g.no_flatten;
            cfg.options.collapse_single_child = !g.no_collapse;
            cfg.options.tighten_occurrences = !g.keep_occurrences;
            cfg.options.bound_substitutions = !g.all_substitutions;
            cfg.options.corpus_is_synthetic = g.synthetic_corpus;
            cfg.options.ignore_paths = g.ignore;
            cfg.templates = g.templates;
            if let Some(n) = g.name {
                cfg.model_name = n;
            }
            cmd_generate(&cfg, console)
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            console.warn(format!("error: {}", f.message));
            f.code
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(EXIT_SCHEMA, format!("IO_ERROR {}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn load_schema(cfg: &RunConfig, console: &mut Console<'_>) -> Outcome<SchemaSet> {
    let schema = load_files(&cfg.schemas, cfg.catalog.as_deref()).map_err(|e| Failure::new(EXIT_SCHEMA, e.to_string()))?;
    for w in schema.warnings() {
        console.warn(format!("warning: {w}"));
    }
    Ok(schema)
}

/// Corpus documents: `*.xml` files found recursively under each directory,
/// plus files named directly, in lexicographic path order.
pub fn discover_corpus(docs: &[PathBuf]) -> Outcome<Vec<Document>> {
    let mut paths = Vec::new();
    for d in docs {
        if d.is_dir() {
            for entry in WalkDir::new(d) {
                let entry = entry.map_err(|e| Failure::new(EXIT_CORPUS, format!("IO_ERROR {}: {e}", d.display())))?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "xml") {
                    paths.push(entry.into_path());
                }
            }
        } else if d.is_file() {
            paths.push(d.clone());
        } else {
            return Err(Failure::new(EXIT_CORPUS, format!("IO_ERROR {}: no such file or directory", d.display())));
        }
    }
    paths.sort();
    paths.dedup();
    paths
        .into_iter()
        .map(|p| {
            let bytes = fs::read(&p).map_err(|e| Failure::new(EXIT_CORPUS, format!("IO_ERROR {}: {e}", p.display())))?;
            Ok(Document::new(p.display().to_string(), bytes))
        })
        .collect()
}

/// Loads and analyzes, writing the usage report. Fails with the corpus exit
/// code when a document fails in strict mode or nothing was used.
fn analyze_step(cfg: &RunConfig, console: &mut Console<'_>) -> Outcome<(SchemaSet, UsageReport)> {
    cfg.validate()?;
    let schema = load_schema(cfg, console)?;
    let docs = discover_corpus(&cfg.docs)?;
    let (usage, failures) = analyze_corpus(&schema, &docs, cfg.mode);
    for f in &failures {
        console.warn(format!("{}: {}: {}", if cfg.mode == Mode::Strict { "error" } else { "warning" }, f.name, f.error));
    }
    if usage.is_empty() {
        return Err(Failure::new(EXIT_CORPUS, "no usage recorded"));
    }
    write_file(&cfg.out_dir.join(USAGE_REPORT), &usage.to_json_string(&schema))?;
    console.say(format!(
        "analyzed {} of {} documents; {} components used",
        usage.document_count,
        docs.len(),
        usage.used_components.len()
    ));
    if cfg.mode == Mode::Strict && !failures.is_empty() {
        return Err(Failure::new(EXIT_CORPUS, format!("{} document(s) failed analysis", failures.len())));
    }
    Ok((schema, usage))
}

pub fn cmd_analyze(cfg: &RunConfig, console: &mut Console<'_>) -> Outcome<()> {
    analyze_step(cfg, console).map(|_| ())
}

fn simplify_step(cfg: &RunConfig, schema: &SchemaSet, usage: &UsageReport, console: &mut Console<'_>) -> Outcome<()> {
    let retained = compute_retained_set(schema, usage).map_err(|e| Failure::new(EXIT_SCHEMA, e.to_string()))?;
    let dir = cfg.out_dir.join(REDUCED_DIR);
    if dir.is_dir() {
        for entry in fs::read_dir(&dir).map_err(|e| io_failure(&dir, e))? {
            let path = entry.map_err(|e| io_failure(&dir, e))?.path();
            if path.extension().is_some_and(|x| x == "xsd") {
                fs::remove_file(&path).map_err(|e| io_failure(&path, e))?;
            }
        }
    }
    emit_reduced_schemas(schema, &retained, &dir).map_err(|e| Failure::new(EXIT_SCHEMA, e.to_string()))?;
    let report = reduction_report(schema, &retained);
    write_file(&cfg.out_dir.join(REDUCTION_REPORT), &json_text(&report.to_json()))?;
    console.say(format!(
        "usage ratio {} ({} of {} global components retained)",
        report.percent(),
        report.retained_components,
        report.total_components
    ));
    Ok(())
}

pub fn cmd_simplify(cfg: &RunConfig, console: &mut Console<'_>) -> Outcome<()> {
    let (schema, usage) = analyze_step(cfg, console)?;
    simplify_step(cfg, &schema, &usage, console)
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let code = match &e {
        PipelineError::Simplify(_) => EXIT_SCHEMA,
        PipelineError::Binding(BindingError::EmptyModel | BindingError::InconsistentUsage(_)) => EXIT_CORPUS,
        PipelineError::Binding(_) => EXIT_SCHEMA,
        PipelineError::Emit(e) => emit_code(e),
    };
    Failure::new(code, e.to_string())
}

fn emit_code(e: &EmitError) -> i32 {
    match e {
        EmitError::Io { .. } => EXIT_SCHEMA,
        EmitError::EmptyModel => EXIT_CORPUS,
        _ => EXIT_TEMPLATE,
    }
}

pub fn cmd_generate(cfg: &RunConfig, console: &mut Console<'_>) -> Outcome<()> {
    let templates = match &cfg.templates {
        Some(dir) => Some(TemplateSet::from_dir(dir).map_err(|e| Failure::new(emit_code(&e), e.to_string()))?),
        None => None,
    };
    let (schema, usage) = analyze_step(cfg, console)?;
    simplify_step(cfg, &schema, &usage, console)?;
    let model = pipeline::bind(&schema, &usage, &cfg.options, &cfg.model_name).map_err(pipeline_failure)?;
    let artifacts = match &templates {
        Some(set) => render(&model, set),
        None => emit_parser_backend(&model),
    }
    .map_err(|e| Failure::new(emit_code(&e), e.to_string()))?;
    write_file(&cfg.out_dir.join(MODEL_FILE), &model.to_json())?;
    let dir = write_generated(&cfg.out_dir, &model, &artifacts).map_err(|e| Failure::new(emit_code(&e), e.to_string()))?;
    let eff = cfg.options.effective();
    if cfg.options.corpus_is_synthetic {
        console.say("synthetic corpus: occurrence tightening and substitution bounding disabled");
    } else if !eff.tighten_occurrences || !eff.bound_substitutions {
        console.say(format!(
            "tightening {}, substitution bounding {}",
            if eff.tighten_occurrences { "on" } else { "off" },
            if eff.bound_substitutions { "on" } else { "off" }
        ));
    }
    console.say(format!("{} classes, {} artifacts in {}", model.class_count(), artifacts.len(), dir.display()));
    console.say(size_report(&artifacts).to_string().trim_end());
    Ok(())
}
