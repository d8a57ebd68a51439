//! In-memory XML Schema component graph.
//!
//! Components live in one id-indexed vector. References between them are
//! [`ComponentId`]s, and every reference also appears as a labelled
//! [`Edge`] so usage closure can run over the graph without knowing the
//! component kinds.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use xsdbind_runtime::QName;

use crate::builtins::{self, SimpleCategory};

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId(pub u32);

impl ComponentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ComponentKind {
    ComplexType,
    SimpleType,
    ElementDecl,
    AttributeDecl,
    ModelGroupDef,
    AttributeGroupDef,
    Wildcard,
}

impl ComponentKind {
    /// Prefix used in rendered component keys.
    pub fn key_prefix(self) -> &'static str {
        match self {
            ComponentKind::ComplexType => "complexType",
            ComponentKind::SimpleType => "simpleType",
            ComponentKind::ElementDecl => "element",
            ComponentKind::AttributeDecl => "attribute",
            ComponentKind::ModelGroupDef => "group",
            ComponentKind::AttributeGroupDef => "attributeGroup",
            ComponentKind::Wildcard => "wildcard",
        }
    }

    pub fn category(self) -> Category {
        match self {
            ComponentKind::ComplexType | ComponentKind::SimpleType => Category::Type,
            ComponentKind::ElementDecl => Category::Element,
            ComponentKind::AttributeDecl => Category::Attribute,
            ComponentKind::ModelGroupDef => Category::ModelGroup,
            ComponentKind::AttributeGroupDef => Category::AttributeGroup,
            ComponentKind::Wildcard => Category::Wildcard,
        }
    }
}

/// Symbol space of a global name. Complex and simple types share one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Type,
    Element,
    Attribute,
    ModelGroup,
    AttributeGroup,
    Wildcard,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Type => "type",
            Category::Element => "element",
            Category::Attribute => "attribute",
            Category::ModelGroup => "group",
            Category::AttributeGroup => "attributeGroup",
            Category::Wildcard => "wildcard",
        })
    }
}

/// `minOccurs`/`maxOccurs`; `max = None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccurrenceRange {
    pub min: u32,
    pub max: Option<u32>,
}

impl OccurrenceRange {
    pub const ONCE: OccurrenceRange = OccurrenceRange {
        min: 1,
        max: Some(1),
    };

    pub fn new(min: u32, max: Option<u32>) -> Option<Self> {
        match max {
            Some(m) if m < min => None,
            _ => Some(OccurrenceRange { min, max }),
        }
    }

    pub fn allows(&self, count: u32) -> bool {
        self.max.is_none_or(|m| count < m)
    }

    pub fn repeats(&self) -> bool {
        self.max != Some(1) && self.max != Some(0)
    }
}

/// Stable handle for one particle: the component that lexically declares it
/// (a complex type or model group definition) and the child-index path from
/// that component's particle root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParticlePathId {
    pub owner: ComponentId,
    pub path: Vec<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Compositor {
    Sequence,
    Choice,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub occurs: OccurrenceRange,
    pub term: Term,
    pub path: ParticlePathId,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Element(ComponentId),
    Group {
        compositor: Compositor,
        children: Vec<Particle>,
    },
    GroupRef(ComponentId),
    Wildcard(ComponentId),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContentModel {
    Empty,
    /// Character content of the given type. The id may name a complex type
    /// with simple content, which is followed to its simple type.
    Simple(ComponentId),
    Elements(Particle),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    None,
    Extension,
    Restriction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttributeUse {
    pub attribute: ComponentId,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTypeDetail {
    pub base: Option<ComponentId>,
    pub derivation: Derivation,
    pub content: ContentModel,
    pub attributes: Vec<AttributeUse>,
    pub attribute_groups: Vec<ComponentId>,
    pub attribute_wildcard: Option<ComponentId>,
    /// Attribute names removed by `use="prohibited"` in a restriction.
    pub prohibited: Vec<QName>,
    pub is_abstract: bool,
    pub mixed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleVariety {
    Atomic,
    List,
    Union,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimpleTypeDetail {
    pub variety: SimpleVariety,
    pub base: Option<ComponentId>,
    pub item_type: Option<ComponentId>,
    pub member_types: Vec<ComponentId>,
    /// Kept for re-emission only; never enforced.
    pub facets: Vec<Facet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementDetail {
    /// Expanded name matched in instances (for local elements this depends
    /// on the element form).
    pub name: QName,
    pub declared_type: ComponentId,
    pub substitution_head: Option<ComponentId>,
    pub is_abstract: bool,
    pub nillable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDetail {
    pub name: QName,
    pub type_ref: ComponentId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelGroupDetail {
    pub particle: Particle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeGroupDetail {
    pub attributes: Vec<AttributeUse>,
    pub attribute_groups: Vec<ComponentId>,
    pub attribute_wildcard: Option<ComponentId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamespaceConstraint {
    Any,
    /// Any namespace except these (`##other` excludes the target namespace
    /// and no-namespace).
    Not(Vec<String>),
    /// Exactly these namespaces; the empty string stands for no namespace.
    Enumerated(Vec<String>),
}

impl NamespaceConstraint {
    pub fn admits(&self, namespace: &str) -> bool {
        match self {
            NamespaceConstraint::Any => true,
            NamespaceConstraint::Not(list) => !list.iter().any(|n| n == namespace),
            NamespaceConstraint::Enumerated(list) => list.iter().any(|n| n == namespace),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessContents {
    Strict,
    Lax,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WildcardDetail {
    pub namespaces: NamespaceConstraint,
    pub process: ProcessContents,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentDetail {
    Complex(ComplexTypeDetail),
    Simple(SimpleTypeDetail),
    Element(ElementDetail),
    Attribute(AttributeDetail),
    ModelGroup(ModelGroupDetail),
    AttributeGroup(AttributeGroupDetail),
    Wildcard(WildcardDetail),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: ComponentId,
    pub kind: ComponentKind,
    /// Present iff the component is global.
    pub name: Option<QName>,
    /// `{kind}:{namespace}:{localOrPath}`; unique and stable across loads.
    pub key: String,
    /// Target namespace of the schema document that declares it.
    pub namespace: String,
    /// Enclosing component for anonymous components.
    pub owner: Option<ComponentId>,
    pub builtin: bool,
    pub detail: ComponentDetail,
}

impl Component {
    pub fn is_global(&self) -> bool {
        self.name.is_some()
    }

    pub fn as_complex(&self) -> Option<&ComplexTypeDetail> {
        match &self.detail {
            ComponentDetail::Complex(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_simple(&self) -> Option<&SimpleTypeDetail> {
        match &self.detail {
            ComponentDetail::Simple(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_element(&self) -> Option<&ElementDetail> {
        match &self.detail {
            ComponentDetail::Element(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_attribute(&self) -> Option<&AttributeDetail> {
        match &self.detail {
            ComponentDetail::Attribute(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_wildcard(&self) -> Option<&WildcardDetail> {
        match &self.detail {
            ComponentDetail::Wildcard(d) => Some(d),
            _ => None,
        }
    }

    /// Name used for reporting: the global QName, else the key.
    pub fn display_name(&self) -> String {
        match &self.name {
            Some(q) => q.to_string(),
            None => self.key.clone(),
        }
    }

    /// Calls `f` on every component id stored in this component.
    pub(crate) fn for_each_id_mut(&mut self, f: &mut dyn FnMut(&mut ComponentId)) {
        f(&mut self.id);
        if let Some(o) = &mut self.owner {
            f(o);
        }
        fn uses(list: &mut [AttributeUse], f: &mut dyn FnMut(&mut ComponentId)) {
            for u in list {
                f(&mut u.attribute);
            }
        }
        match &mut self.detail {
            ComponentDetail::Complex(d) => {
                if let Some(b) = &mut d.base {
                    f(b);
                }
                match &mut d.content {
                    ContentModel::Empty => {}
                    ContentModel::Simple(s) => f(s),
                    ContentModel::Elements(p) => particle_ids_mut(p, f),
                }
                uses(&mut d.attributes, f);
                d.attribute_groups.iter_mut().for_each(&mut *f);
                if let Some(w) = &mut d.attribute_wildcard {
                    f(w);
                }
            }
            ComponentDetail::Simple(d) => {
                if let Some(b) = &mut d.base {
                    f(b);
                }
                if let Some(i) = &mut d.item_type {
                    f(i);
                }
                d.member_types.iter_mut().for_each(&mut *f);
            }
            ComponentDetail::Element(d) => {
                f(&mut d.declared_type);
                if let Some(h) = &mut d.substitution_head {
                    f(h);
                }
            }
            ComponentDetail::Attribute(d) => f(&mut d.type_ref),
            ComponentDetail::ModelGroup(d) => particle_ids_mut(&mut d.particle, f),
            ComponentDetail::AttributeGroup(d) => {
                uses(&mut d.attributes, f);
                d.attribute_groups.iter_mut().for_each(&mut *f);
                if let Some(w) = &mut d.attribute_wildcard {
                    f(w);
                }
            }
            ComponentDetail::Wildcard(_) => {}
        }
    }
}

fn particle_ids_mut(p: &mut Particle, f: &mut dyn FnMut(&mut ComponentId)) {
    f(&mut p.path.owner);
    match &mut p.term {
        Term::Element(e) => f(e),
        Term::GroupRef(g) => f(g),
        Term::Wildcard(w) => f(w),
        Term::Group { children, .. } => {
            for c in children {
                particle_ids_mut(c, f);
            }
        }
    }
}

/// Dependency edge labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    /// Type to its base type, or to the type of its simple content.
    BaseType,
    /// Element declaration to its type.
    DeclaredType,
    /// Content model to an element declaration it contains or references.
    ParticleElement,
    /// Complex type or attribute group to an attribute declaration.
    AttributeUse,
    /// Attribute declaration to its simple type.
    AttributeType,
    /// Reference to a model group or attribute group definition.
    GroupRef,
    /// Substitution group member to its head.
    SubstitutionHead,
    /// Content model to a wildcard component.
    Wildcard,
    /// List or union type to its item or member types.
    MemberType,
}

impl EdgeLabel {
    pub const ALL: [EdgeLabel; 9] = [
        EdgeLabel::BaseType,
        EdgeLabel::DeclaredType,
        EdgeLabel::ParticleElement,
        EdgeLabel::AttributeUse,
        EdgeLabel::AttributeType,
        EdgeLabel::GroupRef,
        EdgeLabel::SubstitutionHead,
        EdgeLabel::Wildcard,
        EdgeLabel::MemberType,
    ];

    /// Edges a retained component cannot drop without leaving a dangling
    /// reference.
    pub const MANDATORY: [EdgeLabel; 6] = [
        EdgeLabel::BaseType,
        EdgeLabel::DeclaredType,
        EdgeLabel::AttributeType,
        EdgeLabel::GroupRef,
        EdgeLabel::SubstitutionHead,
        EdgeLabel::MemberType,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: ComponentId,
    pub to: ComponentId,
    pub label: EdgeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("UNKNOWN_COMPONENT {0}")]
    UnknownComponent(ComponentId),
    #[error("NOT_AN_ELEMENT {0} is not a global element declaration")]
    NotAnElement(String),
    #[error("CYCLIC_DERIVATION involving {0}")]
    CyclicDerivation(String),
    #[error("duplicate global {category} {name}")]
    DuplicateGlobal { category: Category, name: QName },
}

/// Resolved schema component graph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct SchemaSet {
    components: Vec<Component>,
    global_index: BTreeMap<(Category, QName), ComponentId>,
    key_index: HashMap<String, ComponentId>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<Edge>>,
    direct_members: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    direct_derived: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    warnings: Vec<String>,
}

impl SchemaSet {
    /// Builds the graph from components whose ids equal their positions.
    pub(crate) fn from_components(
        components: Vec<Component>,
        warnings: Vec<String>,
    ) -> Result<Self, ModelError> {
        let mut global_index = BTreeMap::new();
        let mut key_index = HashMap::new();
        for c in &components {
            debug_assert_eq!(c.id.index(), key_index.len());
            key_index.insert(c.key.clone(), c.id);
            if let Some(name) = &c.name {
                let slot = (c.kind.category(), name.clone());
                if global_index.insert(slot, c.id).is_some() {
                    return Err(ModelError::DuplicateGlobal {
                        category: c.kind.category(),
                        name: name.clone(),
                    });
                }
            }
        }

        let mut edges = BTreeSet::new();
        for c in &components {
            collect_edges(c, &mut edges);
        }
        let edges: Vec<Edge> = edges.into_iter().collect();
        let mut out_edges = vec![Vec::new(); components.len()];
        let mut direct_members: BTreeMap<ComponentId, BTreeSet<ComponentId>> = BTreeMap::new();
        let mut direct_derived: BTreeMap<ComponentId, BTreeSet<ComponentId>> = BTreeMap::new();
        for e in &edges {
            if e.to.index() >= components.len() {
                return Err(ModelError::UnknownComponent(e.to));
            }
            out_edges[e.from.index()].push(*e);
            match e.label {
                EdgeLabel::SubstitutionHead => {
                    direct_members.entry(e.to).or_default().insert(e.from);
                }
                EdgeLabel::BaseType if is_type_base(&components[e.from.index()], e.to) => {
                    direct_derived.entry(e.to).or_default().insert(e.from);
                }
                _ => {}
            }
        }

        let mut set = SchemaSet {
            components,
            global_index,
            key_index,
            edges,
            out_edges,
            direct_members,
            direct_derived,
            warnings,
        };
        set.check_acyclic()?;
        Ok(set)
    }

    fn check_acyclic(&mut self) -> Result<(), ModelError> {
        let n = self.components.len();
        // Base chains and substitution chains: single successor each.
        let successor = |c: &Component| -> Option<ComponentId> {
            match &c.detail {
                ComponentDetail::Complex(d) => d.base,
                ComponentDetail::Simple(d) => d.base,
                ComponentDetail::Element(d) => d.substitution_head,
                _ => None,
            }
        };
        for start in 0..n {
            let mut seen = BTreeSet::new();
            let mut cur = Some(ComponentId(start as u32));
            while let Some(id) = cur {
                if !seen.insert(id) {
                    return Err(ModelError::CyclicDerivation(
                        self.components[start].display_name(),
                    ));
                }
                cur = successor(&self.components[id.index()]);
            }
        }
        // Group definitions must not contain themselves.
        let mut state = vec![0u8; n];
        for start in 0..n {
            let kind = self.components[start].kind;
            if matches!(
                kind,
                ComponentKind::ModelGroupDef | ComponentKind::AttributeGroupDef
            ) {
                self.group_dfs(ComponentId(start as u32), &mut state)?;
            }
        }
        Ok(())
    }

    fn group_dfs(&self, id: ComponentId, state: &mut [u8]) -> Result<(), ModelError> {
        match state[id.index()] {
            1 => {
                return Err(ModelError::CyclicDerivation(
                    self.components[id.index()].display_name(),
                ))
            }
            2 => return Ok(()),
            _ => {}
        }
        state[id.index()] = 1;
        for e in &self.out_edges[id.index()] {
            if e.label == EdgeLabel::GroupRef {
                self.group_dfs(e.to, state)?;
            }
        }
        state[id.index()] = 2;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, id: ComponentId) -> &Component {
        &self.components[id.index()]
    }

    pub fn get(&self, id: ComponentId) -> Option<&Component> {
        self.components.get(id.index())
    }

    pub fn lookup(&self, category: Category, name: &QName) -> Option<ComponentId> {
        self.global_index.get(&(category, name.clone())).copied()
    }

    pub fn lookup_key(&self, key: &str) -> Option<ComponentId> {
        self.key_index.get(key).copied()
    }

    pub fn key(&self, id: ComponentId) -> &str {
        &self.components[id.index()].key
    }

    pub fn globals(&self) -> impl Iterator<Item = &Component> {
        self.global_index
            .values()
            .map(|id| &self.components[id.index()])
    }

    /// Global components that come from schema documents (not built in).
    pub fn user_globals(&self) -> impl Iterator<Item = &Component> {
        self.globals().filter(|c| !c.builtin)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, id: ComponentId) -> &[Edge] {
        &self.out_edges[id.index()]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Ids of the built-in types present in every schema set.
    pub fn builtin_types(&self) -> BTreeSet<ComponentId> {
        self.components
            .iter()
            .filter(|c| {
                c.builtin
                    && matches!(
                        c.kind,
                        ComponentKind::ComplexType | ComponentKind::SimpleType
                    )
            })
            .map(|c| c.id)
            .collect()
    }

    pub fn any_type(&self) -> ComponentId {
        self.lookup(Category::Type, &QName::new(XSD_NS, "anyType"))
            .expect("anyType is always present")
    }

    pub fn any_simple_type(&self) -> ComponentId {
        self.lookup(Category::Type, &QName::new(XSD_NS, "anySimpleType"))
            .expect("anySimpleType is always present")
    }

    /// Smallest superset of `roots` closed under outgoing edges whose label
    /// passes `filter`.
    pub fn dependency_closure(
        &self,
        roots: &BTreeSet<ComponentId>,
        filter: &[EdgeLabel],
    ) -> Result<BTreeSet<ComponentId>, ModelError> {
        let mut out = BTreeSet::new();
        let mut stack = Vec::new();
        for &r in roots {
            if r.index() >= self.components.len() {
                return Err(ModelError::UnknownComponent(r));
            }
            if out.insert(r) {
                stack.push(r);
            }
        }
        while let Some(id) = stack.pop() {
            for e in &self.out_edges[id.index()] {
                if filter.contains(&e.label) && out.insert(e.to) {
                    stack.push(e.to);
                }
            }
        }
        Ok(out)
    }

    /// Global elements whose head chain reaches `head`, excluding `head`.
    pub fn substitution_members(
        &self,
        head: ComponentId,
    ) -> Result<BTreeSet<ComponentId>, ModelError> {
        let c = self.get(head).ok_or(ModelError::UnknownComponent(head))?;
        if c.kind != ComponentKind::ElementDecl || !c.is_global() {
            return Err(ModelError::NotAnElement(c.key.clone()));
        }
        let mut out = BTreeSet::new();
        let mut stack = vec![head];
        while let Some(id) = stack.pop() {
            if let Some(members) = self.direct_members.get(&id) {
                for &m in members {
                    if out.insert(m) {
                        stack.push(m);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Types derived (directly or transitively) from `base`, excluding it.
    pub fn derived_types(&self, base: ComponentId) -> BTreeSet<ComponentId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![base];
        while let Some(id) = stack.pop() {
            if let Some(derived) = self.direct_derived.get(&id) {
                for &d in derived {
                    if out.insert(d) {
                        stack.push(d);
                    }
                }
            }
        }
        if base == self.any_type() {
            out.extend(
                self.components
                    .iter()
                    .filter(|c| c.kind == ComponentKind::ComplexType && c.id != base)
                    .map(|c| c.id),
            );
        }
        out
    }

    /// The base type of a type, if any.
    pub fn base_of(&self, ty: ComponentId) -> Option<ComponentId> {
        match &self.component(ty).detail {
            ComponentDetail::Complex(d) => d.base,
            ComponentDetail::Simple(d) => d.base,
            _ => None,
        }
    }

    /// True when `ty` equals `base` or derives from it. Every complex type
    /// derives from `anyType`.
    pub fn derives_from(&self, ty: ComponentId, base: ComponentId) -> bool {
        if base == self.any_type() && self.component(ty).kind == ComponentKind::ComplexType {
            return true;
        }
        let mut cur = Some(ty);
        while let Some(id) = cur {
            if id == base {
                return true;
            }
            cur = self.base_of(id);
        }
        false
    }

    /// Extension chain ending at `ty`, root-most first. Restriction ends
    /// the chain because a restriction redeclares the whole content model.
    pub fn extension_chain(&self, ty: ComponentId) -> Vec<ComponentId> {
        let mut chain = vec![ty];
        let mut cur = ty;
        while let Some(d) = self.component(cur).as_complex() {
            match (d.derivation, d.base) {
                (Derivation::Extension, Some(b))
                    if self.component(b).kind == ComponentKind::ComplexType
                        && !self.component(b).builtin =>
                {
                    chain.push(b);
                    cur = b;
                }
                _ => break,
            }
        }
        chain.reverse();
        chain
    }

    /// Particle roots that make up the element content of a complex type, in
    /// matching order (inherited content first).
    pub fn effective_particles(&self, ty: ComponentId) -> Vec<&Particle> {
        let mut out = Vec::new();
        if self.component(ty).builtin {
            if let Some(ContentModel::Elements(p)) =
                self.component(ty).as_complex().map(|d| &d.content)
            {
                out.push(p);
            }
            return out;
        }
        for id in self.extension_chain(ty) {
            if let Some(ContentModel::Elements(p)) =
                self.component(id).as_complex().map(|d| &d.content)
            {
                out.push(p);
            }
        }
        out
    }

    /// Attribute uses a complex type declares itself, attribute groups
    /// expanded.
    pub fn own_attribute_uses(&self, ty: ComponentId) -> Vec<AttributeUse> {
        let mut out = Vec::new();
        match &self.component(ty).detail {
            ComponentDetail::Complex(d) => {
                out.extend(d.attributes.iter().copied());
                for &g in &d.attribute_groups {
                    self.expand_attribute_group(g, &mut out);
                }
            }
            ComponentDetail::AttributeGroup(_) => self.expand_attribute_group(ty, &mut out),
            _ => {}
        }
        dedup_uses(self, out)
    }

    fn expand_attribute_group(&self, group: ComponentId, out: &mut Vec<AttributeUse>) {
        if let ComponentDetail::AttributeGroup(d) = &self.component(group).detail {
            out.extend(d.attributes.iter().copied());
            for &g in &d.attribute_groups {
                self.expand_attribute_group(g, out);
            }
        }
    }

    /// All attribute uses in effect for a complex type, inherited ones first.
    pub fn effective_attribute_uses(&self, ty: ComponentId) -> Vec<AttributeUse> {
        let Some(d) = self.component(ty).as_complex() else {
            return Vec::new();
        };
        let own = self.own_attribute_uses(ty);
        let inherited = match d.base {
            Some(b)
                if self.component(b).kind == ComponentKind::ComplexType
                    && d.derivation != Derivation::None =>
            {
                self.effective_attribute_uses(b)
            }
            _ => Vec::new(),
        };
        let name_of = |u: &AttributeUse| self.attribute_name(u.attribute);
        let mut out: Vec<AttributeUse> = inherited
            .into_iter()
            .filter(|u| {
                let n = name_of(u);
                !d.prohibited.contains(&n) && !own.iter().any(|o| name_of(o) == n)
            })
            .collect();
        out.extend(own);
        out
    }

    pub fn attribute_name(&self, attribute: ComponentId) -> QName {
        self.component(attribute)
            .as_attribute()
            .map(|a| a.name.clone())
            .unwrap_or_default()
    }

    /// Attribute wildcard in effect for a complex type.
    pub fn attribute_wildcard(&self, ty: ComponentId) -> Option<ComponentId> {
        let d = self.component(ty).as_complex()?;
        if let Some(w) = d.attribute_wildcard {
            return Some(w);
        }
        for &g in &d.attribute_groups {
            if let ComponentDetail::AttributeGroup(gd) = &self.component(g).detail {
                if gd.attribute_wildcard.is_some() {
                    return gd.attribute_wildcard;
                }
            }
        }
        match (d.derivation, d.base) {
            (Derivation::Extension, Some(b))
                if self.component(b).kind == ComponentKind::ComplexType =>
            {
                self.attribute_wildcard(b)
            }
            _ => None,
        }
    }

    /// The simple type governing character content of `ty`, if it has any.
    pub fn simple_content_type(&self, ty: ComponentId) -> Option<ComponentId> {
        let mut cur = ty;
        for _ in 0..64 {
            let c = self.component(cur);
            match &c.detail {
                ComponentDetail::Simple(_) => return Some(cur),
                ComponentDetail::Complex(d) => match &d.content {
                    ContentModel::Simple(s) if *s != cur => cur = *s,
                    _ => return None,
                },
                _ => return None,
            }
        }
        None
    }

    /// Primitive value category of a simple type.
    pub fn simple_category(&self, ty: ComponentId) -> SimpleCategory {
        let c = self.component(ty);
        if c.builtin {
            if let Some(name) = &c.name {
                return builtins::category_of(&name.local);
            }
        }
        SimpleCategory::RawLexical
    }

    pub fn is_mixed(&self, ty: ComponentId) -> bool {
        self.component(ty).as_complex().is_some_and(|d| d.mixed)
    }

    /// Global element ids keyed by their instance name.
    pub fn global_element(&self, name: &QName) -> Option<ComponentId> {
        self.lookup(Category::Element, name)
    }

    pub fn element_detail(&self, id: ComponentId) -> Option<&ElementDetail> {
        self.get(id).and_then(Component::as_element)
    }
}

fn dedup_uses(schema: &SchemaSet, uses: Vec<AttributeUse>) -> Vec<AttributeUse> {
    let mut seen = BTreeSet::new();
    uses.into_iter()
        .filter(|u| seen.insert(schema.attribute_name(u.attribute)))
        .collect()
}

fn is_type_base(from: &Component, to: ComponentId) -> bool {
    match &from.detail {
        ComponentDetail::Complex(d) => d.base == Some(to),
        ComponentDetail::Simple(d) => d.base == Some(to),
        _ => false,
    }
}

fn collect_edges(c: &Component, out: &mut BTreeSet<Edge>) {
    let from = c.id;
    let mut add = |to: ComponentId, label: EdgeLabel| {
        out.insert(Edge { from, to, label });
    };
    match &c.detail {
        ComponentDetail::Complex(d) => {
            if let Some(b) = d.base {
                add(b, EdgeLabel::BaseType);
            }
            match &d.content {
                ContentModel::Empty => {}
                ContentModel::Simple(s) => {
                    if *s != from {
                        add(*s, EdgeLabel::BaseType)
                    }
                }
                ContentModel::Elements(p) => particle_edges(p, &mut add),
            }
            for u in &d.attributes {
                add(u.attribute, EdgeLabel::AttributeUse);
            }
            for &g in &d.attribute_groups {
                add(g, EdgeLabel::GroupRef);
            }
            if let Some(w) = d.attribute_wildcard {
                add(w, EdgeLabel::Wildcard);
            }
        }
        ComponentDetail::Simple(d) => {
            if let Some(b) = d.base {
                add(b, EdgeLabel::BaseType);
            }
            if let Some(i) = d.item_type {
                add(i, EdgeLabel::MemberType);
            }
            for &m in &d.member_types {
                add(m, EdgeLabel::MemberType);
            }
        }
        ComponentDetail::Element(d) => {
            add(d.declared_type, EdgeLabel::DeclaredType);
            if let Some(h) = d.substitution_head {
                add(h, EdgeLabel::SubstitutionHead);
            }
        }
        ComponentDetail::Attribute(d) => add(d.type_ref, EdgeLabel::AttributeType),
        ComponentDetail::ModelGroup(d) => particle_edges(&d.particle, &mut add),
        ComponentDetail::AttributeGroup(d) => {
            for u in &d.attributes {
                add(u.attribute, EdgeLabel::AttributeUse);
            }
            for &g in &d.attribute_groups {
                add(g, EdgeLabel::GroupRef);
            }
            if let Some(w) = d.attribute_wildcard {
                add(w, EdgeLabel::Wildcard);
            }
        }
        ComponentDetail::Wildcard(_) => {}
    }
}

fn particle_edges(p: &Particle, add: &mut impl FnMut(ComponentId, EdgeLabel)) {
    match &p.term {
        Term::Element(e) => add(*e, EdgeLabel::ParticleElement),
        Term::GroupRef(g) => add(*g, EdgeLabel::GroupRef),
        Term::Wildcard(w) => add(*w, EdgeLabel::Wildcard),
        Term::Group { children, .. } => {
            for c in children {
                particle_edges(c, add);
            }
        }
    }
}

/// Visits every particle in a tree, parents before children.
pub fn walk_particles<'p>(p: &'p Particle, f: &mut impl FnMut(&'p Particle)) {
    f(p);
    if let Term::Group { children, .. } = &p.term {
        for c in children {
            walk_particles(c, f);
        }
    }
}
