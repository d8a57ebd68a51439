//! Reads XSD documents, follows include/import through a [`Resolver`], and
//! resolves every QName reference into a [`SchemaSet`].
//!
//! Component ids are assigned after all documents are read, in order of
//! component key, so the same set of documents always yields the same ids
//! whatever order the entry points were given in.

mod dom;
mod resolve;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::Path;

use thiserror::Error;
use xsdbind_runtime::{QName, XmlEvent, XmlReader, XML_NS};

use crate::builtins;
use crate::model::*;
use dom::Element;
pub use resolve::{read_source, Catalog, MemoryResolver, Resolver};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaSource {
    pub system_id: String,
    pub target_namespace: String,
    pub raw_text: String,
}

impl SchemaSource {
    pub fn new(system_id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let target_namespace = scan_target_namespace(&raw_text);
        SchemaSource {
            system_id: system_id.into(),
            target_namespace,
            raw_text,
        }
    }
}

fn scan_target_namespace(text: &str) -> String {
    let mut reader = XmlReader::new(text);
    while let Ok(event) = reader.next_event() {
        match event {
            XmlEvent::StartElement { attributes, .. } => {
                return attributes
                    .into_iter()
                    .find(|a| a.name.namespace.is_empty() && a.name.local == "targetNamespace")
                    .map(|a| a.value)
                    .unwrap_or_default();
            }
            XmlEvent::EndDocument => break,
            _ => {}
        }
    }
    String::new()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("UNRESOLVED_IMPORT {system_id} (referenced from {referenced_from})")]
    UnresolvedImport {
        system_id: String,
        referenced_from: String,
    },
    #[error("DANGLING_REFERENCE {name} referenced from {referrer}")]
    DanglingReference { name: QName, referrer: String },
    #[error("CYCLIC_DERIVATION involving {0}")]
    CyclicDerivation(String),
    #[error("MALFORMED_SCHEMA {system_id}:{location}: {reason}")]
    Malformed {
        system_id: String,
        location: String,
        reason: String,
    },
    #[error("IO_ERROR {path}: {reason}")]
    Io { path: String, reason: String },
}

impl From<ModelError> for LoadError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::CyclicDerivation(name) => LoadError::CyclicDerivation(name),
            other => LoadError::Malformed {
                system_id: String::new(),
                location: String::new(),
                reason: other.to_string(),
            },
        }
    }
}

type Result<T> = std::result::Result<T, LoadError>;

/// Loads the transitive include/import closure of `entry_points`.
pub fn load_schema_set(
    entry_points: &[SchemaSource],
    resolver: &dyn Resolver,
) -> Result<SchemaSet> {
    let mut loader = Loader::new(resolver);
    // Sorting makes warning order independent of entry-point order too.
    let mut entries: Vec<&SchemaSource> = entry_points.iter().collect();
    entries.sort_by(|a, b| a.system_id.cmp(&b.system_id));
    for source in entries {
        loader.queue.push_back(Pending {
            source: source.clone(),
            chameleon_tns: None,
        });
    }
    loader.run()?;
    loader.finish()
}

/// Loads schema files from disk. Without a catalog, relative
/// `schemaLocation`s are looked up next to the referencing file.
pub fn load_files<P: AsRef<Path>>(paths: &[P], catalog: Option<&Path>) -> Result<SchemaSet> {
    let catalog = match catalog {
        Some(path) => Catalog::from_file(path)?,
        None => Catalog::new(),
    };
    let sources = paths
        .iter()
        .map(|p| read_source(p.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    load_schema_set(&sources, &catalog)
}

const PENDING: u32 = 1 << 31;

struct PendingRef {
    category: Category,
    name: QName,
    referrer: String,
}

struct Pending {
    source: SchemaSource,
    chameleon_tns: Option<String>,
}

struct DocCtx {
    system_id: String,
    tns: String,
    chameleon: bool,
    elements_qualified: bool,
    attributes_qualified: bool,
}

struct Loader<'r> {
    resolver: &'r dyn Resolver,
    comps: Vec<Component>,
    refs: Vec<PendingRef>,
    globals: HashMap<(Category, QName), ComponentId>,
    keys: HashSet<String>,
    type_from_head: Vec<ComponentId>,
    warnings: Vec<String>,
    loaded: HashSet<(String, String)>,
    queue: VecDeque<Pending>,
    namespaces: BTreeSet<String>,
    unresolved_imports: Vec<(String, String, String)>,
}

fn truthy(v: Option<&str>) -> bool {
    matches!(v.map(str::trim), Some("true" | "1"))
}

impl<'r> Loader<'r> {
    fn new(resolver: &'r dyn Resolver) -> Self {
        let comps = builtins::components(0);
        let mut globals = HashMap::new();
        let mut keys = HashSet::new();
        for c in &comps {
            keys.insert(c.key.clone());
            if let Some(n) = &c.name {
                globals.insert((c.kind.category(), n.clone()), c.id);
            }
        }
        Loader {
            resolver,
            comps,
            refs: Vec::new(),
            globals,
            keys,
            type_from_head: Vec::new(),
            warnings: Vec::new(),
            loaded: HashSet::new(),
            queue: VecDeque::new(),
            namespaces: [XSD_NS.to_string(), XML_NS.to_string()]
                .into_iter()
                .collect(),
            unresolved_imports: Vec::new(),
        }
    }

    fn builtin(&self, local: &str) -> ComponentId {
        self.globals[&(Category::Type, QName::new(XSD_NS, local))]
    }

    fn run(&mut self) -> Result<()> {
        while let Some(p) = self.queue.pop_front() {
            let effective = p.chameleon_tns.clone().unwrap_or_default();
            if !self.loaded.insert((p.source.system_id.clone(), effective)) {
                continue;
            }
            self.document(&p.source, p.chameleon_tns)?;
        }
        for (ns, location, from) in std::mem::take(&mut self.unresolved_imports) {
            if !self.namespaces.contains(&ns) {
                return Err(LoadError::UnresolvedImport {
                    system_id: if location.is_empty() { ns } else { location },
                    referenced_from: from,
                });
            }
        }
        Ok(())
    }

    fn malformed(&self, d: &DocCtx, e: &Element, reason: impl Into<String>) -> LoadError {
        LoadError::Malformed {
            system_id: d.system_id.clone(),
            location: e.location.to_string(),
            reason: reason.into(),
        }
    }

    fn document(&mut self, source: &SchemaSource, chameleon_tns: Option<String>) -> Result<()> {
        let root = dom::parse(&source.raw_text).map_err(|e| LoadError::Malformed {
            system_id: source.system_id.clone(),
            location: e.location.to_string(),
            reason: e.reason,
        })?;
        let declared = root.attr("targetNamespace").unwrap_or("").to_string();
        let (tns, chameleon) = match chameleon_tns {
            Some(outer) if declared.is_empty() && !outer.is_empty() => (outer, true),
            Some(outer) if declared != outer && !declared.is_empty() => {
                return Err(LoadError::Malformed {
                    system_id: source.system_id.clone(),
                    location: root.location.to_string(),
                    reason: format!(
                        "included document has targetNamespace {declared:?}, expected {outer:?}"
                    ),
                })
            }
            _ => (declared, false),
        };
        let d = DocCtx {
            system_id: source.system_id.clone(),
            tns: tns.clone(),
            chameleon,
            elements_qualified: root.attr("elementFormDefault") == Some("qualified"),
            attributes_qualified: root.attr("attributeFormDefault") == Some("qualified"),
        };
        if !root.name.is(XSD_NS, "schema") {
            return Err(self.malformed(
                &d,
                &root,
                format!("root element is {}, expected xs:schema", root.name),
            ));
        }
        self.namespaces.insert(tns.clone());

        for child in root.children_in(XSD_NS) {
            match child.name.local.as_str() {
                "include" | "redefine" => {
                    if child.name.local == "redefine" {
                        self.warnings.push(format!(
                            "{}:{}: redefine is not supported; the redefined document is included unchanged",
                            d.system_id, child.location
                        ));
                    }
                    let location = child.attr("schemaLocation").ok_or_else(|| {
                        self.malformed(&d, child, "include without schemaLocation")
                    })?;
                    match self.resolver.resolve(Some(location), None, &d.system_id)? {
                        Some(src) => self.queue.push_back(Pending {
                            source: src,
                            chameleon_tns: Some(tns.clone()),
                        }),
                        None => {
                            return Err(LoadError::UnresolvedImport {
                                system_id: location.to_string(),
                                referenced_from: d.system_id.clone(),
                            })
                        }
                    }
                }
                "import" => {
                    let ns = child.attr("namespace").unwrap_or("").to_string();
                    let location = child.attr("schemaLocation");
                    match self.resolver.resolve(location, Some(&ns), &d.system_id)? {
                        Some(src) => self.queue.push_back(Pending {
                            source: src,
                            chameleon_tns: None,
                        }),
                        None => self.unresolved_imports.push((
                            ns,
                            location.unwrap_or("").to_string(),
                            d.system_id.clone(),
                        )),
                    }
                }
                "element" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let id =
                        self.element_decl(&d, child, name.to_string(), qn.clone(), None, true)?;
                    self.register(&d, child, Category::Element, qn, id)?;
                }
                "attribute" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let id =
                        self.attribute_decl(&d, child, format!("@{name}"), qn.clone(), None, true)?;
                    self.register(&d, child, Category::Attribute, qn, id)?;
                }
                "complexType" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let id =
                        self.complex_type(&d, child, name.to_string(), Some(qn.clone()), None)?;
                    self.register(&d, child, Category::Type, qn, id)?;
                }
                "simpleType" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let id =
                        self.simple_type(&d, child, name.to_string(), Some(qn.clone()), None)?;
                    self.register(&d, child, Category::Type, qn, id)?;
                }
                "group" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let id = self.group_def(&d, child, qn.clone())?;
                    self.register(&d, child, Category::ModelGroup, qn, id)?;
                }
                "attributeGroup" => {
                    let name = self.required_name(&d, child)?;
                    let qn = QName::new(&tns, name);
                    let path = format!("attributeGroup({name})");
                    let id = self.reserve(
                        &d,
                        ComponentKind::AttributeGroupDef,
                        Some(qn.clone()),
                        path.clone(),
                        None,
                    );
                    let (attributes, attribute_groups, attribute_wildcard, _) =
                        self.attribute_content(&d, child.children_in(XSD_NS), id, &path)?;
                    self.comps[id.index()].detail =
                        ComponentDetail::AttributeGroup(AttributeGroupDetail {
                            attributes,
                            attribute_groups,
                            attribute_wildcard,
                        });
                    self.register(&d, child, Category::AttributeGroup, qn, id)?;
                }
                "annotation" | "notation" => {}
                other => self.warnings.push(format!(
                    "{}:{}: ignored top-level xs:{other}",
                    d.system_id, child.location
                )),
            }
        }
        Ok(())
    }

    fn required_name<'e>(&self, d: &DocCtx, e: &'e Element) -> Result<&'e str> {
        match e.attr("name") {
            Some(n) if xsdbind_runtime::is_ncname(n) => Ok(n),
            Some(n) => Err(self.malformed(d, e, format!("invalid name {n:?}"))),
            None => Err(self.malformed(d, e, format!("xs:{} requires a name", e.name.local))),
        }
    }

    fn register(
        &mut self,
        d: &DocCtx,
        e: &Element,
        category: Category,
        name: QName,
        id: ComponentId,
    ) -> Result<()> {
        if self.globals.insert((category, name.clone()), id).is_some() {
            return Err(self.malformed(d, e, format!("duplicate global {category} {name}")));
        }
        Ok(())
    }

    /// Adds a placeholder component and returns its id; the caller fills in
    /// the detail.
    fn reserve(
        &mut self,
        d: &DocCtx,
        kind: ComponentKind,
        name: Option<QName>,
        path: String,
        owner: Option<ComponentId>,
    ) -> ComponentId {
        let base = format!("{}:{}:{}", kind.key_prefix(), d.tns, path);
        let mut key = base.clone();
        let mut n = 2;
        while !self.keys.insert(key.clone()) {
            key = format!("{base}[{n}]");
            n += 1;
        }
        let id = ComponentId(self.comps.len() as u32);
        self.comps.push(Component {
            id,
            kind,
            name,
            key,
            namespace: d.tns.clone(),
            owner,
            builtin: false,
            detail: ComponentDetail::Wildcard(WildcardDetail {
                namespaces: NamespaceConstraint::Any,
                process: ProcessContents::Skip,
            }),
        });
        id
    }

    /// The path segment after the namespace in a component key.
    fn path_of(&self, id: ComponentId) -> String {
        let key = &self.comps[id.index()].key;
        let after_kind = &key[key.find(':').map_or(0, |i| i + 1)..];
        let tns_len = self.comps[id.index()].namespace.len();
        after_kind[tns_len + 1..].to_string()
    }

    fn reference(
        &mut self,
        d: &DocCtx,
        e: &Element,
        lexical: &str,
        category: Category,
        referrer: ComponentId,
    ) -> Result<ComponentId> {
        let mut name = e
            .resolve_qname(lexical)
            .map_err(|v| self.malformed(d, e, format!("cannot resolve QName {v:?}")))?;
        if d.chameleon && name.namespace.is_empty() {
            name.namespace = d.tns.clone();
        }
        let idx = self.refs.len() as u32;
        self.refs.push(PendingRef {
            category,
            name,
            referrer: self.comps[referrer.index()].key.clone(),
        });
        Ok(ComponentId(PENDING | idx))
    }

    fn element_decl(
        &mut self,
        d: &DocCtx,
        e: &Element,
        path: String,
        name: QName,
        owner: Option<ComponentId>,
        global: bool,
    ) -> Result<ComponentId> {
        let id = self.reserve(
            d,
            ComponentKind::ElementDecl,
            global.then(|| name.clone()),
            path,
            owner,
        );
        let type_path = format!("{}/~type", self.path_of(id));
        let substitution_head = match e.attr("substitutionGroup") {
            Some(h) if global => Some(self.reference(d, e, h, Category::Element, id)?),
            Some(_) => return Err(self.malformed(d, e, "substitutionGroup on a local element")),
            None => None,
        };
        let inline_complex = e
            .children_in(XSD_NS)
            .find(|c| c.name.local == "complexType");
        let inline_simple = e.children_in(XSD_NS).find(|c| c.name.local == "simpleType");
        let declared_type = match (e.attr("type"), inline_complex, inline_simple) {
            (Some(t), None, None) => self.reference(d, e, t, Category::Type, id)?,
            (None, Some(ct), None) => self.complex_type(d, ct, type_path, None, Some(id))?,
            (None, None, Some(st)) => self.simple_type(d, st, type_path, None, Some(id))?,
            (None, None, None) => {
                if substitution_head.is_some() {
                    self.type_from_head.push(id);
                }
                self.builtin("anyType")
            }
            _ => return Err(self.malformed(d, e, "element has more than one type definition")),
        };
        for c in e.children_in(XSD_NS) {
            if matches!(c.name.local.as_str(), "key" | "keyref" | "unique") {
                self.warnings.push(format!(
                    "{}:{}: identity constraint xs:{} ignored",
                    d.system_id, c.location, c.name.local
                ));
            }
        }
        self.comps[id.index()].detail = ComponentDetail::Element(ElementDetail {
            name,
            declared_type,
            substitution_head,
            is_abstract: truthy(e.attr("abstract")),
            nillable: truthy(e.attr("nillable")),
        });
        Ok(id)
    }

    fn attribute_decl(
        &mut self,
        d: &DocCtx,
        e: &Element,
        path: String,
        name: QName,
        owner: Option<ComponentId>,
        global: bool,
    ) -> Result<ComponentId> {
        let id = self.reserve(
            d,
            ComponentKind::AttributeDecl,
            global.then(|| name.clone()),
            path,
            owner,
        );
        let type_path = format!("{}/~type", self.path_of(id));
        let inline = e.children_in(XSD_NS).find(|c| c.name.local == "simpleType");
        let type_ref = match (e.attr("type"), inline) {
            (Some(t), None) => self.reference(d, e, t, Category::Type, id)?,
            (None, Some(st)) => self.simple_type(d, st, type_path, None, Some(id))?,
            (None, None) => self.builtin("anySimpleType"),
            _ => {
                return Err(self.malformed(
                    d,
                    e,
                    "attribute has both type and an inline simpleType",
                ))
            }
        };
        self.comps[id.index()].detail =
            ComponentDetail::Attribute(AttributeDetail { name, type_ref });
        Ok(id)
    }

    fn complex_type(
        &mut self,
        d: &DocCtx,
        e: &Element,
        path: String,
        name: Option<QName>,
        owner: Option<ComponentId>,
    ) -> Result<ComponentId> {
        let id = self.reserve(d, ComponentKind::ComplexType, name, path, owner);
        let path = self.path_of(id);
        let mut mixed = truthy(e.attr("mixed"));
        let base;
        let derivation;
        let mut content = ContentModel::Empty;
        let body: &Element;

        let simple = e
            .children_in(XSD_NS)
            .find(|c| c.name.local == "simpleContent");
        let complex = e
            .children_in(XSD_NS)
            .find(|c| c.name.local == "complexContent");
        match (simple, complex) {
            (Some(sc), None) => {
                let der = self.derivation_child(d, sc)?;
                derivation = if der.name.local == "extension" {
                    Derivation::Extension
                } else {
                    Derivation::Restriction
                };
                let b = self.base_ref(d, der, id)?;
                base = Some(b);
                let inline = der
                    .children_in(XSD_NS)
                    .find(|c| c.name.local == "simpleType");
                content = match inline {
                    Some(st) => ContentModel::Simple(self.simple_type(
                        d,
                        st,
                        format!("{path}/~simple"),
                        None,
                        Some(id),
                    )?),
                    None => ContentModel::Simple(b),
                };
                body = der;
            }
            (None, Some(cc)) => {
                if let Some(m) = cc.attr("mixed") {
                    mixed = truthy(Some(m));
                }
                let der = self.derivation_child(d, cc)?;
                derivation = if der.name.local == "extension" {
                    Derivation::Extension
                } else {
                    Derivation::Restriction
                };
                base = Some(self.base_ref(d, der, id)?);
                body = der;
            }
            (None, None) => {
                base = Some(self.builtin("anyType"));
                derivation = Derivation::Restriction;
                body = e;
            }
            _ => return Err(self.malformed(d, e, "both simpleContent and complexContent")),
        }

        if !matches!(content, ContentModel::Simple(_)) {
            let mut particles = Vec::new();
            for c in body.children_in(XSD_NS) {
                if matches!(
                    c.name.local.as_str(),
                    "sequence" | "choice" | "all" | "group"
                ) {
                    if let Some(p) = self.particle(d, c, id, &path, vec![])? {
                        particles.push(p);
                    }
                }
            }
            if particles.len() > 1 {
                return Err(self.malformed(d, body, "more than one content model particle"));
            }
            if let Some(p) = particles.pop() {
                content = ContentModel::Elements(p);
            }
        }

        let (attributes, attribute_groups, attribute_wildcard, prohibited) =
            self.attribute_content(d, body.children_in(XSD_NS), id, &path)?;
        self.comps[id.index()].detail = ComponentDetail::Complex(ComplexTypeDetail {
            base,
            derivation,
            content,
            attributes,
            attribute_groups,
            attribute_wildcard,
            prohibited,
            is_abstract: truthy(e.attr("abstract")),
            mixed,
        });
        Ok(id)
    }

    fn derivation_child<'e>(&self, d: &DocCtx, e: &'e Element) -> Result<&'e Element> {
        e.children_in(XSD_NS)
            .find(|c| matches!(c.name.local.as_str(), "extension" | "restriction"))
            .ok_or_else(|| self.malformed(d, e, "expected xs:extension or xs:restriction"))
    }

    fn base_ref(&mut self, d: &DocCtx, der: &Element, id: ComponentId) -> Result<ComponentId> {
        let b = der
            .attr("base")
            .ok_or_else(|| self.malformed(d, der, "derivation without base"))?;
        self.reference(d, der, b, Category::Type, id)
    }

    fn occurs(&self, d: &DocCtx, e: &Element) -> Result<Option<OccurrenceRange>> {
        let min = match e.attr("minOccurs") {
            Some(v) => v
                .trim()
                .parse::<u32>()
                .map_err(|_| self.malformed(d, e, format!("invalid minOccurs {v:?}")))?,
            None => 1,
        };
        let max = match e.attr("maxOccurs").map(str::trim) {
            Some("unbounded") => None,
            Some(v) => Some(
                v.parse::<u32>()
                    .map_err(|_| self.malformed(d, e, format!("invalid maxOccurs {v:?}")))?,
            ),
            None => Some(1),
        };
        if max == Some(0) {
            return Ok(None);
        }
        OccurrenceRange::new(min, max)
            .map(Some)
            .ok_or_else(|| self.malformed(d, e, "maxOccurs is less than minOccurs"))
    }

    /// One particle. `Ok(None)` for `maxOccurs="0"`, which contributes
    /// nothing to the content model.
    fn particle(
        &mut self,
        d: &DocCtx,
        e: &Element,
        owner: ComponentId,
        owner_path: &str,
        path: Vec<u16>,
    ) -> Result<Option<Particle>> {
        let Some(occurs) = self.occurs(d, e)? else {
            return Ok(None);
        };
        let pid = ParticlePathId { owner, path };
        let term = match e.name.local.as_str() {
            "element" => match e.attr("ref") {
                Some(r) => Term::Element(self.reference(d, e, r, Category::Element, owner)?),
                None => {
                    let local = self.required_name(d, e)?;
                    let qualified = match e.attr("form") {
                        Some(f) => f == "qualified",
                        None => d.elements_qualified,
                    };
                    let qn = QName::new(if qualified { d.tns.as_str() } else { "" }, local);
                    let id = self.element_decl(
                        d,
                        e,
                        format!("{owner_path}/{local}"),
                        qn,
                        Some(owner),
                        false,
                    )?;
                    Term::Element(id)
                }
            },
            "sequence" | "choice" | "all" => {
                let compositor = match e.name.local.as_str() {
                    "sequence" => Compositor::Sequence,
                    "choice" => Compositor::Choice,
                    _ => Compositor::All,
                };
                let mut children = Vec::new();
                for c in e.children_in(XSD_NS) {
                    if !matches!(
                        c.name.local.as_str(),
                        "element" | "sequence" | "choice" | "all" | "group" | "any"
                    ) {
                        continue;
                    }
                    let mut child_path = pid.path.clone();
                    child_path.push(children.len() as u16);
                    if let Some(p) = self.particle(d, c, owner, owner_path, child_path)? {
                        if compositor == Compositor::All
                            && (!matches!(p.term, Term::Element(_))
                                || p.occurs.max.is_none_or(|m| m > 1))
                        {
                            return Err(self.malformed(
                                d,
                                c,
                                "xs:all may only contain elements with maxOccurs ≤ 1",
                            ));
                        }
                        children.push(p);
                    }
                }
                Term::Group {
                    compositor,
                    children,
                }
            }
            "group" => {
                let r = e
                    .attr("ref")
                    .ok_or_else(|| self.malformed(d, e, "local xs:group requires ref"))?;
                Term::GroupRef(self.reference(d, e, r, Category::ModelGroup, owner)?)
            }
            "any" => Term::Wildcard(self.wildcard(d, e, owner, format!("{owner_path}/~any"))?),
            other => {
                return Err(self.malformed(d, e, format!("unexpected xs:{other} in content model")))
            }
        };
        Ok(Some(Particle {
            occurs,
            term,
            path: pid,
        }))
    }

    fn wildcard(
        &mut self,
        d: &DocCtx,
        e: &Element,
        owner: ComponentId,
        path: String,
    ) -> Result<ComponentId> {
        let id = self.reserve(d, ComponentKind::Wildcard, None, path, Some(owner));
        let namespaces = match e.attr("namespace").map(str::trim).unwrap_or("##any") {
            "##any" => NamespaceConstraint::Any,
            "##other" => NamespaceConstraint::Not(vec![d.tns.clone(), String::new()]),
            list => NamespaceConstraint::Enumerated(
                list.split_whitespace()
                    .map(|t| match t {
                        "##local" => String::new(),
                        "##targetNamespace" => d.tns.clone(),
                        other => other.to_string(),
                    })
                    .collect(),
            ),
        };
        let process = match e.attr("processContents").map(str::trim) {
            Some("lax") => ProcessContents::Lax,
            Some("skip") => ProcessContents::Skip,
            None | Some("strict") => ProcessContents::Strict,
            Some(other) => {
                return Err(self.malformed(d, e, format!("invalid processContents {other:?}")))
            }
        };
        self.comps[id.index()].detail = ComponentDetail::Wildcard(WildcardDetail {
            namespaces,
            process,
        });
        Ok(id)
    }

    #[allow(clippy::type_complexity)]
    fn attribute_content<'e>(
        &mut self,
        d: &DocCtx,
        children: impl Iterator<Item = &'e Element>,
        owner: ComponentId,
        owner_path: &str,
    ) -> Result<(
        Vec<AttributeUse>,
        Vec<ComponentId>,
        Option<ComponentId>,
        Vec<QName>,
    )> {
        let mut uses = Vec::new();
        let mut groups = Vec::new();
        let mut wildcard = None;
        let mut prohibited = Vec::new();
        for c in children {
            match c.name.local.as_str() {
                "attribute" => {
                    let use_ = c.attr("use").map(str::trim).unwrap_or("optional");
                    let required = use_ == "required";
                    match c.attr("ref") {
                        Some(r) => {
                            if use_ == "prohibited" {
                                let mut qn = c.resolve_qname(r).map_err(|v| {
                                    self.malformed(d, c, format!("cannot resolve QName {v:?}"))
                                })?;
                                if d.chameleon && qn.namespace.is_empty() {
                                    qn.namespace = d.tns.clone();
                                }
                                prohibited.push(qn);
                            } else {
                                let attribute =
                                    self.reference(d, c, r, Category::Attribute, owner)?;
                                uses.push(AttributeUse {
                                    attribute,
                                    required,
                                });
                            }
                        }
                        None => {
                            let local = self.required_name(d, c)?;
                            let qualified = match c.attr("form") {
                                Some(f) => f == "qualified",
                                None => d.attributes_qualified,
                            };
                            let qn = QName::new(if qualified { d.tns.as_str() } else { "" }, local);
                            if use_ == "prohibited" {
                                prohibited.push(qn);
                            } else {
                                let attribute = self.attribute_decl(
                                    d,
                                    c,
                                    format!("{owner_path}/@{local}"),
                                    qn,
                                    Some(owner),
                                    false,
                                )?;
                                uses.push(AttributeUse {
                                    attribute,
                                    required,
                                });
                            }
                        }
                    }
                }
                "attributeGroup" => {
                    let r = c.attr("ref").ok_or_else(|| {
                        self.malformed(d, c, "local xs:attributeGroup requires ref")
                    })?;
                    groups.push(self.reference(d, c, r, Category::AttributeGroup, owner)?);
                }
                "anyAttribute" => {
                    wildcard =
                        Some(self.wildcard(d, c, owner, format!("{owner_path}/~anyAttribute"))?);
                }
                _ => {}
            }
        }
        Ok((uses, groups, wildcard, prohibited))
    }

    fn group_def(&mut self, d: &DocCtx, e: &Element, name: QName) -> Result<ComponentId> {
        let path = format!("group({})", name.local);
        let id = self.reserve(
            d,
            ComponentKind::ModelGroupDef,
            Some(name),
            path.clone(),
            None,
        );
        let body = e
            .children_in(XSD_NS)
            .find(|c| matches!(c.name.local.as_str(), "sequence" | "choice" | "all"))
            .ok_or_else(|| self.malformed(d, e, "group definition without a compositor"))?;
        let particle = self
            .particle(d, body, id, &path, vec![])?
            .unwrap_or(Particle {
                occurs: OccurrenceRange::ONCE,
                term: Term::Group {
                    compositor: Compositor::Sequence,
                    children: vec![],
                },
                path: ParticlePathId {
                    owner: id,
                    path: vec![],
                },
            });
        // The definition itself carries no occurrence range.
        let particle = Particle {
            occurs: OccurrenceRange::ONCE,
            ..particle
        };
        self.comps[id.index()].detail = ComponentDetail::ModelGroup(ModelGroupDetail { particle });
        Ok(id)
    }

    fn simple_type(
        &mut self,
        d: &DocCtx,
        e: &Element,
        path: String,
        name: Option<QName>,
        owner: Option<ComponentId>,
    ) -> Result<ComponentId> {
        let id = self.reserve(d, ComponentKind::SimpleType, name, path, owner);
        let path = self.path_of(id);
        let any_simple = self.builtin("anySimpleType");
        let body = e
            .children_in(XSD_NS)
            .find(|c| matches!(c.name.local.as_str(), "restriction" | "list" | "union"))
            .ok_or_else(|| self.malformed(d, e, "simpleType needs restriction, list or union"))?;
        let inline: Vec<&Element> = body
            .children_in(XSD_NS)
            .filter(|c| c.name.local == "simpleType")
            .collect();
        let detail = match body.name.local.as_str() {
            "restriction" => {
                let base = match (body.attr("base"), inline.first()) {
                    (Some(b), None) => self.reference(d, body, b, Category::Type, id)?,
                    (None, Some(st)) => {
                        self.simple_type(d, st, format!("{path}/~base"), None, Some(id))?
                    }
                    _ => {
                        return Err(self.malformed(
                            d,
                            body,
                            "restriction needs exactly one of base or simpleType",
                        ))
                    }
                };
                let facets = body
                    .children_in(XSD_NS)
                    .filter(|c| !matches!(c.name.local.as_str(), "annotation" | "simpleType"))
                    .map(|c| Facet {
                        name: c.name.local.clone(),
                        value: c.attr("value").unwrap_or("").to_string(),
                    })
                    .collect();
                SimpleTypeDetail {
                    variety: SimpleVariety::Atomic,
                    base: Some(base),
                    item_type: None,
                    member_types: vec![],
                    facets,
                }
            }
            "list" => {
                let item = match (body.attr("itemType"), inline.first()) {
                    (Some(t), None) => self.reference(d, body, t, Category::Type, id)?,
                    (None, Some(st)) => {
                        self.simple_type(d, st, format!("{path}/~item"), None, Some(id))?
                    }
                    _ => {
                        return Err(self.malformed(
                            d,
                            body,
                            "list needs exactly one of itemType or simpleType",
                        ))
                    }
                };
                SimpleTypeDetail {
                    variety: SimpleVariety::List,
                    base: Some(any_simple),
                    item_type: Some(item),
                    member_types: vec![],
                    facets: vec![],
                }
            }
            _ => {
                let mut members = Vec::new();
                for t in body.attr("memberTypes").unwrap_or("").split_whitespace() {
                    members.push(self.reference(d, body, t, Category::Type, id)?);
                }
                for (i, st) in inline.iter().enumerate() {
                    members.push(self.simple_type(
                        d,
                        st,
                        format!("{path}/~member{}", i + 1),
                        None,
                        Some(id),
                    )?);
                }
                if members.is_empty() {
                    return Err(self.malformed(d, body, "union without member types"));
                }
                SimpleTypeDetail {
                    variety: SimpleVariety::Union,
                    base: Some(any_simple),
                    item_type: None,
                    member_types: members,
                    facets: vec![],
                }
            }
        };
        self.comps[id.index()].detail = ComponentDetail::Simple(detail);
        Ok(id)
    }

    fn finish(mut self) -> Result<SchemaSet> {
        // Resolve named references.
        let mut dangling: Vec<(String, String, QName)> = Vec::new();
        let refs = std::mem::take(&mut self.refs);
        let globals = &self.globals;
        for c in &mut self.comps {
            c.for_each_id_mut(&mut |id| {
                if id.0 & PENDING != 0 {
                    let r = &refs[(id.0 & !PENDING) as usize];
                    match globals.get(&(r.category, r.name.clone())) {
                        Some(&target) => *id = target,
                        None => {
                            dangling.push((r.referrer.clone(), r.name.to_string(), r.name.clone()))
                        }
                    }
                }
            });
        }
        if let Some((referrer, _, name)) = dangling.into_iter().min() {
            return Err(LoadError::DanglingReference { name, referrer });
        }
        for c in &self.comps {
            if let ComponentDetail::Simple(s) = &c.detail {
                for t in s.base.iter().chain(&s.item_type).chain(&s.member_types) {
                    if self.comps[t.index()].kind != ComponentKind::SimpleType {
                        return Err(LoadError::Malformed {
                            system_id: String::new(),
                            location: c.key.clone(),
                            reason: format!(
                                "simple type refers to complex type {}",
                                self.comps[t.index()].key
                            ),
                        });
                    }
                }
            }
        }

        // Elements without a type take their substitution head's type.
        let mut unresolved: BTreeSet<ComponentId> = self.type_from_head.iter().copied().collect();
        for _ in 0..=unresolved.len() {
            let ready: Vec<(ComponentId, ComponentId)> = unresolved
                .iter()
                .filter_map(|&id| {
                    let head = self.comps[id.index()].as_element()?.substitution_head?;
                    let ty = self.comps[head.index()].as_element()?.declared_type;
                    (!unresolved.contains(&head)).then_some((id, ty))
                })
                .collect();
            if ready.is_empty() {
                break;
            }
            for (id, ty) in ready {
                if let ComponentDetail::Element(e) = &mut self.comps[id.index()].detail {
                    e.declared_type = ty;
                }
                unresolved.remove(&id);
            }
        }

        // Renumber in key order.
        let mut order: Vec<usize> = (0..self.comps.len()).collect();
        order.sort_by(|&a, &b| self.comps[a].key.cmp(&self.comps[b].key));
        let mut remap = vec![ComponentId(0); order.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = ComponentId(new as u32);
        }
        let mut slots: Vec<Option<Component>> = self.comps.into_iter().map(Some).collect();
        let mut comps = Vec::with_capacity(slots.len());
        for &old in &order {
            let mut c = slots[old].take().expect("each slot taken once");
            c.for_each_id_mut(&mut |id| *id = remap[id.index()]);
            comps.push(c);
        }
        self.warnings.sort();
        Ok(SchemaSet::from_components(comps, self.warnings)?)
    }
}

#[cfg(test)]
mod tests;
