//! Seeded generators for synthetic schemas and corpora.
//!
//! A [`Suite`] is a random schema whose first `used` globals are reachable
//! from the corpus and whose remaining globals are referenced only through
//! optional particles and attributes the corpus never instantiates. The
//! generator keeps its own dependency graph, so [`Suite::oracle_closure`] is
//! computed without looking at the loaded schema.
//!
//! Shared between the build script and the tests.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYNTH_NS: &str = "urn:example:synth";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Element,
    Complex,
    Simple,
    Group,
    AttrGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeRef {
    Builtin(&'static str),
    Global(usize),
}

#[derive(Debug, Clone)]
pub enum Term {
    Local { name: String, ty: TypeRef },
    Ref(usize),
    Group(usize),
}

#[derive(Debug, Clone)]
pub struct Particle {
    pub term: Term,
    pub min: u32,
    /// `None` is unbounded.
    pub max: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Attr {
    pub name: String,
    pub ty: TypeRef,
    pub required: bool,
}

#[derive(Debug, Clone)]
pub enum SimpleDef {
    Restriction(TypeRef),
    Union(Vec<TypeRef>),
}

#[derive(Debug, Clone)]
pub struct Node {
    pub kind: Kind,
    pub name: String,
    pub used: bool,
    pub ty: Option<TypeRef>,
    pub head: Option<usize>,
    pub base: Option<usize>,
    pub particles: Vec<Particle>,
    pub attrs: Vec<Attr>,
    pub attr_groups: Vec<usize>,
    pub simple: Option<SimpleDef>,
}

impl Node {
    fn new(kind: Kind, name: String, used: bool) -> Self {
        Node {
            kind,
            name,
            used,
            ty: None,
            head: None,
            base: None,
            particles: Vec::new(),
            attrs: Vec::new(),
            attr_groups: Vec::new(),
            simple: None,
        }
    }
}

/// A component in the generator's own dependency graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Vertex {
    Global(usize),
    /// Local element `k` in the particles of global `owner`.
    LocalElement(usize, usize),
    LocalAttribute(usize, usize),
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub nodes: Vec<Node>,
    pub used: usize,
    pub documents: Vec<(String, String)>,
    /// What the documents instantiate, in generator terms.
    pub instantiated: BTreeSet<Vertex>,
    /// Longest run one parent instance holds, per particle `(owner, k)`.
    pub runs: BTreeMap<(usize, usize), u32>,
}

#[derive(Debug, Default)]
struct Trace {
    instantiated: BTreeSet<Vertex>,
    runs: BTreeMap<(usize, usize), u32>,
}

fn kind_prefix(k: Kind) -> &'static str {
    match k {
        Kind::Element => "el",
        Kind::Complex => "Ct",
        Kind::Simple => "St",
        Kind::Group => "Gr",
        Kind::AttrGroup => "Ag",
    }
}

fn random_max(rng: &mut ChaCha8Rng) -> Option<u32> {
    match rng.random_range(0..3) {
        0 => Some(1),
        1 => Some(3),
        _ => None,
    }
}

impl Suite {
    /// A schema with `used + unused` globals and `docs` documents.
    pub fn generate(seed: u64, used: usize, unused: usize, docs: usize) -> Suite {
        assert!(used >= 2, "root element and its type");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nodes: Vec<Node> = Vec::new();
        nodes.push(Node::new(Kind::Element, "root".into(), true));
        nodes.push(Node::new(Kind::Complex, "RootType".into(), true));
        nodes[0].ty = Some(TypeRef::Global(1));
        let mut used_member = vec![false; used + unused];

        for i in 2..used {
            let kinds = [
                Kind::Complex,
                Kind::Complex,
                Kind::Simple,
                Kind::Simple,
                Kind::Element,
                Kind::Group,
                Kind::AttrGroup,
            ];
            let kind = *kinds.choose(&mut rng).expect("non-empty");
            let parents: Vec<usize> = (0..i).collect();
            let mut attached = None;
            for _ in 0..8 {
                let p = *parents.choose(&mut rng).expect("non-empty");
                if let Some(how) = Self::attach(&mut rng, &nodes, &used_member, kind, p) {
                    attached = Some((kind, p, how));
                    break;
                }
            }
            let (kind, p, how) = attached.unwrap_or((Kind::Complex, 1, Attach::Local));
            let name = format!("{}{i}", kind_prefix(kind));
            nodes.push(Node::new(kind, name, true));
            let max = if rng.random_bool(0.4) {
                random_max(&mut rng)
            } else {
                Some(1)
            };
            let ty = TypeRef::Global(i);
            match how {
                Attach::Local => nodes[p].particles.push(Particle {
                    term: Term::Local {
                        name: format!("e{i}"),
                        ty,
                    },
                    min: 1,
                    max,
                }),
                Attach::Base => nodes[p].base = Some(i),
                Attach::DeclaredType => nodes[p].ty = Some(ty),
                Attach::Attribute => nodes[p].attrs.push(Attr {
                    name: format!("a{i}"),
                    ty,
                    required: true,
                }),
                Attach::Restriction => nodes[p].simple = Some(SimpleDef::Restriction(ty)),
                Attach::UnionMember => match &mut nodes[p].simple {
                    Some(SimpleDef::Union(m)) => m.push(ty),
                    _ => {
                        nodes[p].simple = Some(SimpleDef::Union(vec![ty, TypeRef::Builtin("int")]))
                    }
                },
                Attach::Ref => nodes[p].particles.push(Particle {
                    term: Term::Ref(i),
                    min: 1,
                    max,
                }),
                Attach::Member => {
                    nodes[i].head = Some(p);
                    used_member[p] = true;
                }
                Attach::GroupRef => nodes[p].particles.push(Particle {
                    term: Term::Group(i),
                    min: 1,
                    max: Some(1),
                }),
                Attach::AttrGroupRef => nodes[p].attr_groups.push(i),
            }
        }

        for i in used..used + unused {
            let kinds = [
                Kind::Complex,
                Kind::Simple,
                Kind::Element,
                Kind::Group,
                Kind::AttrGroup,
            ];
            let kind = *kinds.choose(&mut rng).expect("non-empty");
            nodes.push(Node::new(kind, format!("{}{i}", kind_prefix(kind)), false));
        }

        // Optional extras. Used holders point at later used types, which the
        // corpus may instantiate, and at unused components, which it never
        // does. Unused holders point anywhere earlier.
        let mut unused_refs: Vec<usize> = (used..used + unused)
            .filter(|&j| nodes[j].kind == Kind::Element)
            .collect();
        for i in 0..used + unused {
            let holder = nodes[i].kind;
            let is_used = nodes[i].used;
            if matches!(holder, Kind::Complex | Kind::Group) {
                for k in 0..rng.random_range(0..3) {
                    let cands: Vec<usize> = if is_used {
                        (i + 1..used)
                            .filter(|&j| matches!(nodes[j].kind, Kind::Complex | Kind::Simple))
                            .collect()
                    } else {
                        (0..i)
                            .filter(|&j| matches!(nodes[j].kind, Kind::Complex | Kind::Simple))
                            .collect()
                    };
                    let ty = cands
                        .choose(&mut rng)
                        .map(|&j| TypeRef::Global(j))
                        .unwrap_or(TypeRef::Builtin("string"));
                    let max = random_max(&mut rng);
                    nodes[i].particles.push(Particle {
                        term: Term::Local {
                            name: format!("o{i}x{k}"),
                            ty,
                        },
                        min: 0,
                        max,
                    });
                }
                if is_used || holder == Kind::Complex {
                    for k in 0..rng.random_range(0..3) {
                        let pick = rng.random_range(used..used + unused.max(used + 1));
                        if pick < used + unused && rng.random_bool(0.5) {
                            if matches!(nodes[pick].kind, Kind::Complex | Kind::Simple) {
                                let max = random_max(&mut rng);
                                nodes[i].particles.push(Particle {
                                    term: Term::Local {
                                        name: format!("u{i}x{k}"),
                                        ty: TypeRef::Global(pick),
                                    },
                                    min: 0,
                                    max,
                                });
                            }
                        } else if let Some(pos) = (!unused_refs.is_empty())
                            .then(|| rng.random_range(0..unused_refs.len()))
                        {
                            let e = unused_refs.swap_remove(pos);
                            let max = random_max(&mut rng);
                            nodes[i].particles.push(Particle {
                                term: Term::Ref(e),
                                min: 0,
                                max,
                            });
                        }
                    }
                }
            }
            if matches!(holder, Kind::Complex | Kind::AttrGroup) {
                for k in 0..rng.random_range(0..3) {
                    let cands: Vec<usize> = if is_used && rng.random_bool(0.5) {
                        (i + 1..used)
                            .filter(|&j| nodes[j].kind == Kind::Simple)
                            .collect()
                    } else {
                        (used..used + unused)
                            .filter(|&j| nodes[j].kind == Kind::Simple && (is_used || j < i))
                            .collect()
                    };
                    let ty = cands
                        .choose(&mut rng)
                        .map(|&j| TypeRef::Global(j))
                        .unwrap_or(TypeRef::Builtin("int"));
                    nodes[i].attrs.push(Attr {
                        name: format!("b{i}x{k}"),
                        ty,
                        required: false,
                    });
                }
            }
            if !is_used {
                match holder {
                    Kind::Element => {
                        let heads: Vec<usize> =
                            (1..i).filter(|&j| nodes[j].kind == Kind::Element).collect();
                        if rng.random_bool(0.4) && !heads.is_empty() {
                            nodes[i].head = heads.choose(&mut rng).copied();
                        } else {
                            let types: Vec<usize> = (0..i)
                                .filter(|&j| matches!(nodes[j].kind, Kind::Complex | Kind::Simple))
                                .collect();
                            nodes[i].ty = types.choose(&mut rng).map(|&j| TypeRef::Global(j));
                        }
                    }
                    Kind::Complex => {
                        let bases: Vec<usize> =
                            (1..i).filter(|&j| nodes[j].kind == Kind::Complex).collect();
                        if rng.random_bool(0.3) && !bases.is_empty() {
                            nodes[i].base = bases.choose(&mut rng).copied();
                        } else {
                            if let Some(&g) = (used..i)
                                .filter(|&j| nodes[j].kind == Kind::Group)
                                .collect::<Vec<_>>()
                                .choose(&mut rng)
                            {
                                nodes[i].particles.push(Particle {
                                    term: Term::Group(g),
                                    min: 1,
                                    max: Some(1),
                                });
                            }
                            if let Some(&g) = (used..i)
                                .filter(|&j| nodes[j].kind == Kind::AttrGroup)
                                .collect::<Vec<_>>()
                                .choose(&mut rng)
                            {
                                nodes[i].attr_groups.push(g);
                            }
                        }
                    }
                    Kind::Simple => {
                        let simples: Vec<usize> =
                            (0..i).filter(|&j| nodes[j].kind == Kind::Simple).collect();
                        if let Some(&s) = simples.choose(&mut rng) {
                            nodes[i].simple = Some(if rng.random_bool(0.5) {
                                SimpleDef::Restriction(TypeRef::Global(s))
                            } else {
                                SimpleDef::Union(vec![
                                    TypeRef::Global(s),
                                    TypeRef::Builtin("string"),
                                ])
                            });
                        }
                    }
                    Kind::Group | Kind::AttrGroup => {}
                }
            }
        }

        // Members take their head's type.
        for i in 0..nodes.len() {
            if nodes[i].kind == Kind::Element {
                if let Some(h) = nodes[i].head {
                    nodes[i].ty = nodes[h].ty;
                }
            }
        }

        let mut suite = Suite {
            nodes,
            used,
            documents: Vec::new(),
            instantiated: BTreeSet::new(),
            runs: BTreeMap::new(),
        };
        let mut trace = Trace::default();
        for d in 0..docs {
            let mut out = String::new();
            suite.write_root(&mut rng, &mut out, &mut trace);
            suite.documents.push((format!("doc{d:03}.xml"), out));
        }
        suite.instantiated = trace.instantiated;
        suite.runs = trace.runs;
        suite
    }

    fn attach(
        rng: &mut ChaCha8Rng,
        nodes: &[Node],
        used_member: &[bool],
        kind: Kind,
        p: usize,
    ) -> Option<Attach> {
        let parent = &nodes[p];
        let untyped_element =
            parent.kind == Kind::Element && parent.ty.is_none() && parent.head.is_none();
        let mut options = Vec::new();
        match kind {
            Kind::Complex => {
                if matches!(parent.kind, Kind::Complex | Kind::Group) {
                    options.push(Attach::Local);
                }
                if parent.kind == Kind::Complex && parent.base.is_none() {
                    options.push(Attach::Base);
                }
                if untyped_element {
                    options.push(Attach::DeclaredType);
                }
            }
            Kind::Simple => {
                if matches!(parent.kind, Kind::Complex | Kind::Group) {
                    options.push(Attach::Local);
                }
                if matches!(parent.kind, Kind::Complex | Kind::AttrGroup) {
                    options.push(Attach::Attribute);
                }
                if parent.kind == Kind::Simple {
                    match parent.simple {
                        None => {
                            options.push(Attach::Restriction);
                            options.push(Attach::UnionMember);
                        }
                        Some(SimpleDef::Union(_)) => options.push(Attach::UnionMember),
                        Some(SimpleDef::Restriction(_)) => {}
                    }
                }
                if untyped_element {
                    options.push(Attach::DeclaredType);
                }
            }
            Kind::Element => {
                if matches!(parent.kind, Kind::Complex | Kind::Group) {
                    options.push(Attach::Ref);
                }
                if parent.kind == Kind::Element && p != 0 && !used_member[p] {
                    options.push(Attach::Member);
                }
            }
            Kind::Group => {
                if matches!(parent.kind, Kind::Complex | Kind::Group) {
                    options.push(Attach::GroupRef);
                }
            }
            Kind::AttrGroup => {
                if matches!(parent.kind, Kind::Complex | Kind::AttrGroup) {
                    options.push(Attach::AttrGroupRef);
                }
            }
        }
        options.choose(rng).copied()
    }

    /// The dependency closure of what the corpus instantiates, over the
    /// generator's own mandatory edges. Names of user globals.
    pub fn oracle_closure(&self) -> BTreeSet<String> {
        let mut seen: BTreeSet<Vertex> = BTreeSet::new();
        let mut queue: VecDeque<Vertex> = self.instantiated.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if !seen.insert(v) {
                continue;
            }
            let push_ty = |t: &TypeRef, q: &mut VecDeque<Vertex>| {
                if let TypeRef::Global(j) = t {
                    q.push_back(Vertex::Global(*j));
                }
            };
            match v {
                Vertex::Global(i) => {
                    let n = &self.nodes[i];
                    if let Some(t) = &n.ty {
                        push_ty(t, &mut queue);
                    }
                    if let Some(h) = n.head {
                        queue.push_back(Vertex::Global(h));
                    }
                    if let Some(b) = n.base {
                        queue.push_back(Vertex::Global(b));
                    }
                    for p in &n.particles {
                        if let Term::Group(g) = p.term {
                            queue.push_back(Vertex::Global(g));
                        }
                    }
                    for &g in &n.attr_groups {
                        queue.push_back(Vertex::Global(g));
                    }
                    match &n.simple {
                        Some(SimpleDef::Restriction(t)) => push_ty(t, &mut queue),
                        Some(SimpleDef::Union(ms)) => {
                            ms.iter().for_each(|t| push_ty(t, &mut queue))
                        }
                        None => {}
                    }
                }
                Vertex::LocalElement(o, k) => {
                    if let Term::Local { ty, .. } = &self.nodes[o].particles[k].term {
                        push_ty(ty, &mut queue);
                    }
                }
                Vertex::LocalAttribute(o, k) => push_ty(&self.nodes[o].attrs[k].ty, &mut queue),
            }
        }
        seen.into_iter()
            .filter_map(|v| match v {
                Vertex::Global(i) => Some(self.nodes[i].name.clone()),
                _ => None,
            })
            .collect()
    }

    /// Element-declaring particles by the element's local name, which the
    /// generator keeps unique.
    pub fn particles_by_name(&self) -> BTreeMap<String, (usize, usize)> {
        let mut out = BTreeMap::new();
        for (o, n) in self.nodes.iter().enumerate() {
            for (k, p) in n.particles.iter().enumerate() {
                let name = match &p.term {
                    Term::Local { name, .. } => name.clone(),
                    Term::Ref(e) => self.nodes[*e].name.clone(),
                    Term::Group(_) => continue,
                };
                out.insert(name, (o, k));
            }
        }
        out
    }

    pub fn total_globals(&self) -> usize {
        self.nodes.len()
    }

    fn type_ref(&self, t: &TypeRef) -> String {
        match t {
            TypeRef::Builtin(b) => format!("xs:{b}"),
            TypeRef::Global(j) => format!("tns:{}", self.nodes[*j].name),
        }
    }

    fn occurs(p: &Particle) -> String {
        let mut s = String::new();
        if p.min != 1 {
            write!(s, r#" minOccurs="{}""#, p.min).unwrap();
        }
        match p.max {
            Some(1) => {}
            Some(m) => write!(s, r#" maxOccurs="{m}""#).unwrap(),
            None => s.push_str(r#" maxOccurs="unbounded""#),
        }
        s
    }

    fn write_particles(&self, out: &mut String, particles: &[Particle]) {
        out.push_str("<xs:sequence>");
        for p in particles {
            let occ = Self::occurs(p);
            match &p.term {
                Term::Local { name, ty } => write!(
                    out,
                    r#"<xs:element name="{name}" type="{}"{occ}/>"#,
                    self.type_ref(ty)
                )
                .unwrap(),
                Term::Ref(e) => write!(
                    out,
                    r#"<xs:element ref="tns:{}"{occ}/>"#,
                    self.nodes[*e].name
                )
                .unwrap(),
                Term::Group(g) => {
                    write!(out, r#"<xs:group ref="tns:{}"{occ}/>"#, self.nodes[*g].name).unwrap()
                }
            }
        }
        out.push_str("</xs:sequence>");
    }

    fn write_attrs(&self, out: &mut String, n: &Node) {
        for a in &n.attrs {
            let use_ = if a.required { r#" use="required""# } else { "" };
            write!(
                out,
                r#"<xs:attribute name="{}" type="{}"{use_}/>"#,
                a.name,
                self.type_ref(&a.ty)
            )
            .unwrap();
        }
        for &g in &n.attr_groups {
            write!(
                out,
                r#"<xs:attributeGroup ref="tns:{}"/>"#,
                self.nodes[g].name
            )
            .unwrap();
        }
    }

    pub fn xsd(&self) -> String {
        let mut out = format!(
            r#"<?xml version="1.0"?>
<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" xmlns:tns="{SYNTH_NS}" targetNamespace="{SYNTH_NS}" elementFormDefault="qualified">
"#
        );
        for n in &self.nodes {
            match n.kind {
                Kind::Element => {
                    write!(out, r#"<xs:element name="{}""#, n.name).unwrap();
                    if let Some(t) = &n.ty {
                        write!(out, r#" type="{}""#, self.type_ref(t)).unwrap();
                    }
                    if let Some(h) = n.head {
                        write!(out, r#" substitutionGroup="tns:{}""#, self.nodes[h].name).unwrap();
                    }
                    out.push_str("/>\n");
                }
                Kind::Complex => {
                    write!(out, r#"<xs:complexType name="{}">"#, n.name).unwrap();
                    match n.base {
                        Some(b) => {
                            write!(
                                out,
                                r#"<xs:complexContent><xs:extension base="tns:{}">"#,
                                self.nodes[b].name
                            )
                            .unwrap();
                            self.write_particles(&mut out, &n.particles);
                            self.write_attrs(&mut out, n);
                            out.push_str("</xs:extension></xs:complexContent>");
                        }
                        None => {
                            self.write_particles(&mut out, &n.particles);
                            self.write_attrs(&mut out, n);
                        }
                    }
                    out.push_str("</xs:complexType>\n");
                }
                Kind::Simple => {
                    write!(out, r#"<xs:simpleType name="{}">"#, n.name).unwrap();
                    match &n.simple {
                        None => out.push_str(r#"<xs:restriction base="xs:string"/>"#),
                        Some(SimpleDef::Restriction(t)) => {
                            write!(out, r#"<xs:restriction base="{}"/>"#, self.type_ref(t)).unwrap()
                        }
                        Some(SimpleDef::Union(ms)) => {
                            let list: Vec<String> = ms.iter().map(|t| self.type_ref(t)).collect();
                            write!(out, r#"<xs:union memberTypes="{}"/>"#, list.join(" ")).unwrap();
                        }
                    }
                    out.push_str("</xs:simpleType>\n");
                }
                Kind::Group => {
                    write!(out, r#"<xs:group name="{}">"#, n.name).unwrap();
                    self.write_particles(&mut out, &n.particles);
                    out.push_str("</xs:group>\n");
                }
                Kind::AttrGroup => {
                    write!(out, r#"<xs:attributeGroup name="{}">"#, n.name).unwrap();
                    self.write_attrs(&mut out, n);
                    out.push_str("</xs:attributeGroup>\n");
                }
            }
        }
        out.push_str("</xs:schema>\n");
        out
    }

    fn write_root(&self, rng: &mut ChaCha8Rng, out: &mut String, trace: &mut Trace) {
        out.push_str("<?xml version=\"1.0\"?>\n");
        trace.instantiated.insert(Vertex::Global(0));
        let mut attrs = String::new();
        let mut body = String::new();
        self.content(rng, &TypeRef::Global(1), &mut attrs, &mut body, trace, 0);
        write!(out, r#"<root xmlns="{SYNTH_NS}"{attrs}>{body}</root>"#).unwrap();
        out.push('\n');
    }

    /// Attributes and children for a value of type `t`.
    fn content(
        &self,
        rng: &mut ChaCha8Rng,
        t: &TypeRef,
        attrs: &mut String,
        body: &mut String,
        trace: &mut Trace,
        depth: usize,
    ) {
        let j = match t {
            TypeRef::Builtin(_) => {
                body.push('7');
                return;
            }
            TypeRef::Global(j) => *j,
        };
        let n = &self.nodes[j];
        match n.kind {
            Kind::Simple => body.push('7'),
            Kind::Complex => {
                let mut chain = vec![j];
                while let Some(b) = self.nodes[*chain.last().expect("non-empty")].base {
                    chain.push(b);
                }
                chain.reverse();
                for &c in &chain {
                    self.attributes(rng, c, attrs, trace);
                }
                for &c in &chain {
                    self.particles(rng, c, body, trace, depth);
                }
            }
            _ => unreachable!("types are complex or simple"),
        }
    }

    fn attributes(
        &self,
        rng: &mut ChaCha8Rng,
        owner: usize,
        attrs: &mut String,
        trace: &mut Trace,
    ) {
        let n = &self.nodes[owner];
        for (k, a) in n.attrs.iter().enumerate() {
            let usable = matches!(a.ty, TypeRef::Builtin(_))
                || matches!(a.ty, TypeRef::Global(j) if self.nodes[j].used);
            if a.required || (usable && rng.random_bool(0.5)) {
                trace.instantiated.insert(Vertex::LocalAttribute(owner, k));
                write!(attrs, r#" {}="7""#, a.name).unwrap();
            }
        }
        for &g in &n.attr_groups {
            self.attributes(rng, g, attrs, trace);
        }
    }

    fn particles(
        &self,
        rng: &mut ChaCha8Rng,
        owner: usize,
        body: &mut String,
        trace: &mut Trace,
        depth: usize,
    ) {
        for (k, p) in self.nodes[owner].particles.iter().enumerate() {
            let target_used = match &p.term {
                Term::Local {
                    ty: TypeRef::Global(j),
                    ..
                }
                | Term::Ref(j)
                | Term::Group(j) => self.nodes[*j].used,
                Term::Local { .. } => true,
            };
            let count = if p.min > 0 {
                p.min
            } else if target_used && depth < 12 && rng.random_bool(0.5) {
                1
            } else {
                0
            };
            let count = match p.max {
                _ if count == 0 => 0,
                Some(m) => rng.random_range(count..=m),
                None => rng.random_range(count..=3),
            };
            if count > 0 && !matches!(p.term, Term::Group(_)) {
                let run = trace.runs.entry((owner, k)).or_insert(0);
                *run = (*run).max(count);
            }
            for _ in 0..count {
                match &p.term {
                    Term::Local { name, ty } => {
                        trace.instantiated.insert(Vertex::LocalElement(owner, k));
                        self.element(rng, name, ty, body, trace, depth);
                    }
                    Term::Ref(e) => {
                        let mut e = *e;
                        while let Some(m) = (0..self.used).find(|&m| self.nodes[m].head == Some(e))
                        {
                            e = m;
                        }
                        trace.instantiated.insert(Vertex::Global(e));
                        let ty = self.nodes[e].ty.unwrap_or(TypeRef::Builtin("string"));
                        self.element(rng, &self.nodes[e].name, &ty, body, trace, depth);
                    }
                    Term::Group(g) => self.particles(rng, *g, body, trace, depth),
                }
            }
        }
    }

    fn element(
        &self,
        rng: &mut ChaCha8Rng,
        name: &str,
        ty: &TypeRef,
        body: &mut String,
        trace: &mut Trace,
        depth: usize,
    ) {
        let mut attrs = String::new();
        let mut inner = String::new();
        self.content(rng, ty, &mut attrs, &mut inner, trace, depth + 1);
        write!(body, "<{name}{attrs}>{inner}</{name}>").unwrap();
    }
}

#[derive(Debug, Clone, Copy)]
enum Attach {
    Local,
    Base,
    DeclaredType,
    Attribute,
    Restriction,
    UnionMember,
    Ref,
    Member,
    GroupRef,
    AttrGroupRef,
}

/// A flat record list, for throughput measurements.
pub const RECORDS_XSD: &str = r#"<?xml version="1.0"?>
<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" xmlns="urn:example:records" targetNamespace="urn:example:records" elementFormDefault="qualified">
  <xs:element name="log">
    <xs:complexType>
      <xs:sequence>
        <xs:element name="record" type="Record" maxOccurs="unbounded"/>
      </xs:sequence>
      <xs:attribute name="source" type="xs:string"/>
    </xs:complexType>
  </xs:element>
  <xs:complexType name="Record">
    <xs:sequence>
      <xs:element name="when" type="xs:dateTime"/>
      <xs:element name="sensor" type="xs:string"/>
      <xs:element name="value" type="xs:double"/>
      <xs:element name="count" type="xs:int"/>
      <xs:element name="ok" type="xs:boolean" minOccurs="0"/>
      <xs:element name="tag" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
      <xs:element name="note" type="xs:string" minOccurs="0"/>
    </xs:sequence>
    <xs:attribute name="id" type="xs:long" use="required"/>
    <xs:attribute name="unit" type="xs:string"/>
  </xs:complexType>
  <xs:element name="archive" type="Record"/>
</xs:schema>
"#;

/// A records document of at least `target_bytes`.
pub fn records_document(seed: u64, target_bytes: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(target_bytes + 512);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<log xmlns=\"urn:example:records\" source=\"bench\">\n");
    let mut id = 0u64;
    while out.len() < target_bytes {
        id += 1;
        write!(out, "  <record id=\"{id}\"").unwrap();
        if rng.random_bool(0.5) {
            out.push_str(" unit=\"C\"");
        }
        out.push_str(">\n");
        write!(
            out,
            "    <when>2024-03-{:02}T10:{:02}:00Z</when>\n",
            rng.random_range(1..29),
            rng.random_range(0..60)
        )
        .unwrap();
        write!(
            out,
            "    <sensor>probe-{}</sensor>\n",
            rng.random_range(0..64)
        )
        .unwrap();
        write!(
            out,
            "    <value>{:.3}</value>\n",
            rng.random_range(-40.0..60.0f64)
        )
        .unwrap();
        write!(out, "    <count>{}</count>\n", rng.random_range(0..10_000)).unwrap();
        if rng.random_bool(0.5) {
            out.push_str("    <ok>true</ok>\n");
        }
        for _ in 0..rng.random_range(0..3) {
            write!(out, "    <tag>t{}</tag>\n", rng.random_range(0..9)).unwrap();
        }
        if rng.random_bool(0.2) {
            out.push_str("    <note>recalibrated &amp; checked</note>\n");
        }
        out.push_str("  </record>\n");
    }
    out.push_str("</log>\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Injection {
    UnknownElement,
    MissingRequired,
    MalformedNumber,
}

/// Injects `n` violations into distinct records of a records document,
/// each of which a lenient parse reports exactly once.
pub fn inject_violations(doc: &str, seed: u64, n: usize) -> (String, Vec<Injection>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<usize> = doc.match_indices("  <record ").map(|(i, _)| i).collect();
    assert!(n <= starts.len(), "only {} records", starts.len());
    let mut picked = rand::seq::index::sample(&mut rng, starts.len(), n).into_vec();
    picked.sort_unstable();
    let mut out = String::with_capacity(doc.len() + n * 64);
    let mut kinds = Vec::new();
    let mut at = 0;
    for r in picked {
        let start = starts[r];
        let end = start + doc[start..].find("  </record>\n").expect("closed record");
        out.push_str(&doc[at..start]);
        let body = &doc[start..end];
        let kind = *[
            Injection::UnknownElement,
            Injection::MissingRequired,
            Injection::MalformedNumber,
        ]
        .choose(&mut rng)
        .expect("non-empty");
        let sensor = body.find("    <sensor>").expect("sensor line");
        let sensor_end = sensor + body[sensor..].find('\n').expect("line") + 1;
        match kind {
            Injection::UnknownElement => {
                out.push_str(&body[..sensor_end]);
                out.push_str("    <calibration><offset>0.5</offset></calibration>\n");
                out.push_str(&body[sensor_end..]);
            }
            Injection::MissingRequired => {
                out.push_str(&body[..sensor]);
                out.push_str(&body[sensor_end..]);
            }
            Injection::MalformedNumber => {
                let tag = if rng.random_bool(0.5) {
                    "</count>"
                } else {
                    "</value>"
                };
                let close = body.find(tag).expect("numeric field");
                out.push_str(&body[..close]);
                out.push_str("x1");
                out.push_str(&body[close..]);
            }
        }
        kinds.push(kind);
        at = end;
    }
    out.push_str(&doc[at..]);
    (out, kinds)
}
