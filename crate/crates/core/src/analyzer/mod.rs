//! Assigns schema components to the nodes of corpus documents and gathers
//! usage facts.

mod matcher;
mod report;

use std::collections::HashMap;
use std::rc::Rc;

use rayon::prelude::*;
use thiserror::Error;
use xsdbind_runtime::{Attribute, Location, Mode, QName, XmlError, XmlEvent, XmlReader, XSI_NS};

use crate::model::*;
pub use matcher::{Ambiguous, Hit, HitKind, Matcher, Tables};
pub use report::{particle_key, saturated_usage, UsageReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyzeError {
    #[error("MALFORMED_DOCUMENT {0}")]
    Malformed(#[from] XmlError),
    #[error("{location}: UNKNOWN_ROOT_ELEMENT {name}")]
    UnknownRoot { name: QName, location: Location },
    #[error("{location}: INVALID_TYPE_OVERRIDE xsi:type {ty} is not derived from the declared type of {element}")]
    InvalidTypeOverride {
        element: String,
        ty: String,
        location: Location,
    },
    #[error("{location}: UNMATCHED_CHILD {name} at position {position} in {parent}")]
    UnmatchedChild {
        name: QName,
        position: usize,
        parent: String,
        location: Location,
    },
    #[error("{location}: UNMATCHED_ATTRIBUTE {name} on {parent}")]
    UnmatchedAttribute {
        name: QName,
        parent: String,
        location: Location,
    },
    #[error("{location}: AMBIGUOUS_MATCH {name} matches more than one particle in {parent}")]
    AmbiguousMatch {
        name: QName,
        parent: String,
        location: Location,
    },
}

impl AnalyzeError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalyzeError::Malformed(_) => "MALFORMED_DOCUMENT",
            AnalyzeError::UnknownRoot { .. } => "UNKNOWN_ROOT_ELEMENT",
            AnalyzeError::InvalidTypeOverride { .. } => "INVALID_TYPE_OVERRIDE",
            AnalyzeError::UnmatchedChild { .. } => "UNMATCHED_CHILD",
            AnalyzeError::UnmatchedAttribute { .. } => "UNMATCHED_ATTRIBUTE",
            AnalyzeError::AmbiguousMatch { .. } => "AMBIGUOUS_MATCH",
        }
    }
}

/// A corpus member.
#[derive(Debug, Clone)]
pub struct Document {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Document {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Document {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentFailure {
    pub index: usize,
    pub name: String,
    pub error: AnalyzeError,
}

/// Effective type of an element instance: the declared type, or the
/// `xsi:type` override when it derives from it.
pub fn effective_type(
    schema: &SchemaSet,
    element: ComponentId,
    xsi_type: Option<&QName>,
) -> Result<ComponentId, (String, String)> {
    let declared = schema
        .element_detail(element)
        .map(|e| e.declared_type)
        .unwrap_or_else(|| schema.any_type());
    let Some(name) = xsi_type else {
        return Ok(declared);
    };
    match schema.lookup(Category::Type, name) {
        Some(t) if schema.derives_from(t, declared) => Ok(t),
        _ => Err((schema.key(element).to_string(), name.to_string())),
    }
}

/// The global element for a document root and its effective type.
pub fn assign_root(
    schema: &SchemaSet,
    root_name: &QName,
    xsi_type: Option<&QName>,
) -> Result<(ComponentId, ComponentId), AnalyzeError> {
    let element = schema
        .global_element(root_name)
        .ok_or_else(|| AnalyzeError::UnknownRoot {
            name: root_name.clone(),
            location: Location::default(),
        })?;
    let ty = effective_type(schema, element, xsi_type).map_err(|(element, ty)| {
        AnalyzeError::InvalidTypeOverride {
            element,
            ty,
            location: Location::default(),
        }
    })?;
    Ok((element, ty))
}

/// One child's assignment; all `None` is the lenient-mode skip marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildAssignment {
    pub particle: Option<ParticlePathId>,
    pub element: Option<ComponentId>,
    pub ty: Option<ComponentId>,
}

impl ChildAssignment {
    pub const SKIP: ChildAssignment = ChildAssignment {
        particle: None,
        element: None,
        ty: None,
    };
}

/// Matches a sequence of child names against a type's content model.
pub fn assign_children(
    schema: &SchemaSet,
    parent_type: ComponentId,
    child_names: &[QName],
    mode: Mode,
) -> Result<Vec<ChildAssignment>, AnalyzeError> {
    let tables = Tables::new(schema);
    let mut m = Matcher::new(&tables, schema.effective_particles(parent_type));
    let mut out = Vec::new();
    for (position, name) in child_names.iter().enumerate() {
        let parent = schema.key(parent_type).to_string();
        match m.next(name) {
            Ok(Some(hit)) => {
                let element = match hit.kind {
                    HitKind::Element { decl, .. } => Some(decl),
                    HitKind::Wildcard { element, .. } => element,
                };
                out.push(ChildAssignment {
                    particle: Some(hit.particle.path.clone()),
                    element,
                    ty: element.map(|e| effective_type(schema, e, None).expect("declared type")),
                });
            }
            Ok(None) if mode == Mode::Lenient => out.push(ChildAssignment::SKIP),
            Ok(None) => {
                return Err(AnalyzeError::UnmatchedChild {
                    name: name.clone(),
                    position,
                    parent,
                    location: Location::default(),
                })
            }
            Err(Ambiguous) => {
                return Err(AnalyzeError::AmbiguousMatch {
                    name: name.clone(),
                    parent,
                    location: Location::default(),
                })
            }
        }
    }
    Ok(out)
}

/// Analyzes every document, in parallel. Failed documents are listed and
/// contribute nothing to the report.
pub fn analyze_corpus(
    schema: &SchemaSet,
    documents: &[Document],
    mode: Mode,
) -> (UsageReport, Vec<DocumentFailure>) {
    let tables = Tables::new(schema);
    let results: Vec<Result<UsageReport, AnalyzeError>> = documents
        .par_iter()
        .map(|d| analyze_document(&tables, &d.bytes, mode))
        .collect();
    let mut report = UsageReport::default();
    let mut failures = Vec::new();
    for (index, result) in results.into_iter().enumerate() {
        match result {
            Ok(r) => report = report.merge(r),
            Err(error) => failures.push(DocumentFailure {
                index,
                name: documents[index].name.clone(),
                error,
            }),
        }
    }
    (report, failures)
}

/// Analyzes one document.
pub fn analyze_document(
    tables: &Tables<'_>,
    bytes: &[u8],
    mode: Mode,
) -> Result<UsageReport, AnalyzeError> {
    let mut reader = XmlReader::from_bytes(bytes)?;
    let mut walk = Walk {
        tables,
        schema: tables.schema,
        mode,
        report: UsageReport {
            document_count: 1,
            ..UsageReport::default()
        },
        attributes: HashMap::new(),
    };
    let (name, attrs) = loop {
        match reader.next_event()? {
            XmlEvent::StartElement { name, attributes } => break (name, attributes),
            _ => continue,
        }
    };
    let Some(root) = walk.schema.global_element(&name) else {
        return Err(AnalyzeError::UnknownRoot {
            name,
            location: reader.location(),
        });
    };
    walk.report.root_elements.insert(root);
    walk.element(&mut reader, root, &attrs)?;
    while reader.next_event()? != XmlEvent::EndDocument {}
    Ok(walk.report)
}

type AttributeTable = Rc<Vec<(QName, ComponentId)>>;

struct Walk<'s, 't> {
    tables: &'t Tables<'s>,
    schema: &'s SchemaSet,
    mode: Mode,
    report: UsageReport,
    attributes: HashMap<ComponentId, AttributeTable>,
}

fn skip(reader: &mut XmlReader<'_>) -> Result<(), XmlError> {
    let mut depth = 1usize;
    while depth > 0 {
        match reader.next_event()? {
            XmlEvent::StartElement { .. } => depth += 1,
            XmlEvent::EndElement(_) => depth -= 1,
            _ => {}
        }
    }
    Ok(())
}

impl<'s> Walk<'s, '_> {
    fn attribute_table(&mut self, ty: ComponentId) -> AttributeTable {
        let schema = self.schema;
        Rc::clone(self.attributes.entry(ty).or_insert_with(|| {
            Rc::new(
                schema
                    .effective_attribute_uses(ty)
                    .into_iter()
                    .map(|u| (schema.attribute_name(u.attribute), u.attribute))
                    .collect(),
            )
        }))
    }

    /// Processes an element whose start tag was just read, through its end
    /// tag.
    fn element(
        &mut self,
        reader: &mut XmlReader<'_>,
        decl: ComponentId,
        attrs: &[Attribute],
    ) -> Result<(), AnalyzeError> {
        let schema = self.schema;
        let xsi_type = attrs
            .iter()
            .find(|a| a.name.is(XSI_NS, "type"))
            .and_then(|a| reader.resolve_qname_value(&a.value));
        let ty = match effective_type(schema, decl, xsi_type.as_ref()) {
            Ok(t) => t,
            Err(_) if self.mode == Mode::Lenient => {
                effective_type(schema, decl, None).expect("declared type")
            }
            Err((element, ty)) => {
                return Err(AnalyzeError::InvalidTypeOverride {
                    element,
                    ty,
                    location: reader.location(),
                })
            }
        };
        let declared = effective_type(schema, decl, None).expect("declared type");
        if ty != declared {
            self.report
                .type_substitutions
                .entry(decl)
                .or_default()
                .insert(ty);
        }
        self.report.used_components.insert(decl);
        self.report.used_components.insert(ty);
        self.report.instanced_types.insert(ty);

        self.attributes_of(reader, decl, ty, attrs)?;
        let nil = attrs
            .iter()
            .any(|a| a.name.is(XSI_NS, "nil") && matches!(a.value.trim(), "true" | "1"));
        if nil {
            self.report.disqualified.insert(decl);
            self.report.single_child_elements.remove(&decl);
            skip(reader)?;
            return Ok(());
        }

        let is_complex = schema.component(ty).kind == ComponentKind::ComplexType;
        let simple = !is_complex || schema.simple_content_type(ty).is_some();
        let mixed = is_complex && schema.is_mixed(ty);
        let mut matcher = Matcher::new(
            self.tables,
            if simple {
                Vec::new()
            } else {
                schema.effective_particles(ty)
            },
        );
        let mut counts: HashMap<&'s ParticlePathId, u32> = HashMap::new();
        let mut children = 0usize;
        let mut text = false;
        let mut skipped = false;
        loop {
            match reader.next_event()? {
                XmlEvent::StartElement { name, attributes } => {
                    let position = children;
                    children += 1;
                    let found = if simple {
                        Ok(None)
                    } else {
                        matcher.next(&name)
                    };
                    match found {
                        Ok(Some(hit)) => {
                            *counts.entry(&hit.particle.path).or_insert(0) += 1;
                            self.report.used_components.insert(hit.particle.path.owner);
                            match hit.kind {
                                HitKind::Element { decl: child, via } => {
                                    if child != via {
                                        self.report
                                            .element_substitutions
                                            .entry(via)
                                            .or_default()
                                            .insert(child);
                                    }
                                    self.element(reader, child, &attributes)?;
                                }
                                HitKind::Wildcard { wildcard, element } => {
                                    self.report.used_components.insert(wildcard);
                                    match element {
                                        Some(e) => {
                                            self.report
                                                .wildcard_fillers
                                                .entry(wildcard)
                                                .or_default()
                                                .insert(e);
                                            self.element(reader, e, &attributes)?;
                                        }
                                        None => skip(reader)?,
                                    }
                                }
                            }
                        }
                        Ok(None) if self.mode == Mode::Lenient => {
                            skipped = true;
                            skip(reader)?;
                        }
                        Ok(None) => {
                            return Err(AnalyzeError::UnmatchedChild {
                                name,
                                position,
                                parent: schema.key(ty).to_string(),
                                location: reader.location(),
                            })
                        }
                        Err(Ambiguous) => {
                            return Err(AnalyzeError::AmbiguousMatch {
                                name,
                                parent: schema.key(ty).to_string(),
                                location: reader.location(),
                            })
                        }
                    }
                }
                XmlEvent::Text(t) => {
                    if !t.trim().is_empty() {
                        text = true;
                    }
                }
                XmlEvent::EndElement(_) => break,
                XmlEvent::EndDocument => unreachable!("reader reports unclosed elements as errors"),
            }
        }
        for (p, n) in counts {
            let slot = self.report.occurrence_maxima.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(n);
        }
        if children == 1 && !text && attrs.is_empty() && !mixed && !skipped {
            if !self.report.disqualified.contains(&decl) {
                self.report.single_child_elements.insert(decl);
            }
        } else {
            self.report.disqualified.insert(decl);
            self.report.single_child_elements.remove(&decl);
        }
        Ok(())
    }

    fn attributes_of(
        &mut self,
        reader: &mut XmlReader<'_>,
        decl: ComponentId,
        ty: ComponentId,
        attrs: &[Attribute],
    ) -> Result<(), AnalyzeError> {
        if attrs.iter().all(|a| a.name.namespace == XSI_NS) {
            return Ok(());
        }
        let table = self.attribute_table(ty);
        let wildcard = self.schema.attribute_wildcard(ty);
        for a in attrs.iter().filter(|a| a.name.namespace != XSI_NS) {
            if let Some((_, id)) = table.iter().find(|(n, _)| *n == a.name) {
                self.report.used_components.insert(*id);
                continue;
            }
            let admitted = wildcard.filter(|w| {
                self.schema
                    .component(*w)
                    .as_wildcard()
                    .is_some_and(|d| d.namespaces.admits(&a.name.namespace))
            });
            match admitted {
                Some(w) => {
                    self.report.used_components.insert(w);
                }
                None if self.mode == Mode::Lenient => {}
                None => {
                    return Err(AnalyzeError::UnmatchedAttribute {
                        name: a.name.clone(),
                        parent: self.schema.key(decl).to_string(),
                        location: reader.location(),
                    })
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests;
