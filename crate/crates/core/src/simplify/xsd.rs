//! XSD text rendering for retained components.

use std::collections::{BTreeMap, BTreeSet};

use xsdbind_runtime::XML_NS;

use super::{namespace_slug, SchemaFile};
use crate::model::*;

struct Node {
    tag: &'static str,
    attrs: Vec<(&'static str, String)>,
    children: Vec<Node>,
}

impl Node {
    fn new(tag: &'static str) -> Self {
        Node {
            tag,
            attrs: Vec::new(),
            children: Vec::new(),
        }
    }

    fn attr(mut self, name: &'static str, value: impl Into<String>) -> Self {
        self.attrs.push((name, value.into()));
        self
    }

    fn attr_opt(self, name: &'static str, value: Option<String>) -> Self {
        match value {
            Some(v) => self.attr(name, v),
            None => self,
        }
    }

    fn child(mut self, c: Node) -> Self {
        self.children.push(c);
        self
    }

    fn write(&self, out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push('<');
        out.push_str(self.tag);
        let rank = |n: &str| match n {
            "name" => 0,
            "ref" => 1,
            "type" => 2,
            "minOccurs" => 3,
            "maxOccurs" => 4,
            _ => 5,
        };
        let mut attrs: Vec<&(&str, String)> = self.attrs.iter().collect();
        attrs.sort_by_key(|(n, _)| rank(n));
        for (n, v) in attrs {
            out.push(' ');
            out.push_str(n);
            out.push_str("=\"");
            escape_into(out, v);
            out.push('"');
        }
        if self.children.is_empty() {
            out.push_str("/>\n");
            return;
        }
        out.push_str(">\n");
        for c in &self.children {
            c.write(out, depth + 1);
        }
        for _ in 0..depth {
            out.push_str("  ");
        }
        out.push_str("</");
        out.push_str(self.tag);
        out.push_str(">\n");
    }
}

fn escape_into(out: &mut String, v: &str) {
    for c in v.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
}

fn occurs(node: Node, o: OccurrenceRange) -> Node {
    let node = if o.min != 1 {
        node.attr("minOccurs", o.min.to_string())
    } else {
        node
    };
    match o.max {
        Some(1) => node,
        Some(m) => node.attr("maxOccurs", m.to_string()),
        None => node.attr("maxOccurs", "unbounded"),
    }
}

struct FileCtx<'s> {
    schema: &'s SchemaSet,
    retained: &'s BTreeSet<ComponentId>,
    tns: &'s str,
    prefixes: BTreeMap<String, String>,
}

impl FileCtx<'_> {
    fn keep(&self, id: ComponentId) -> bool {
        self.retained.contains(&id)
    }

    fn qname(&self, id: ComponentId) -> String {
        let name = self
            .schema
            .component(id)
            .name
            .as_ref()
            .expect("references target globals");
        match self.prefixes.get(&name.namespace) {
            Some(p) => format!("{p}:{}", name.local),
            None => name.local.clone(),
        }
    }

    fn is_inline(&self, id: ComponentId, owner: ComponentId) -> bool {
        let c = self.schema.component(id);
        c.name.is_none() && c.owner == Some(owner)
    }

    fn type_node(&self, id: ComponentId) -> Node {
        match self.schema.component(id).kind {
            ComponentKind::ComplexType => self.complex(id),
            _ => self.simple(id),
        }
    }

    fn element(&self, id: ComponentId) -> Node {
        let c = self.schema.component(id);
        let d = c.as_element().expect("element");
        let mut n = Node::new("xs:element").attr("name", d.name.local.clone());
        let inline = self.is_inline(d.declared_type, id);
        if !inline {
            if self.schema.component(d.declared_type).name.is_some() {
                n = n.attr("type", self.qname(d.declared_type));
            } else if d.substitution_head.is_none() {
                unreachable!(
                    "anonymous type {} owned elsewhere",
                    self.schema.key(d.declared_type)
                );
            }
        }
        if c.name.is_none() {
            let form = if d.name.namespace.is_empty() {
                "unqualified"
            } else {
                "qualified"
            };
            n = n.attr("form", form);
        }
        if let Some(h) = d.substitution_head {
            n = n.attr("substitutionGroup", self.qname(h));
        }
        if d.is_abstract {
            n = n.attr("abstract", "true");
        }
        if d.nillable {
            n = n.attr("nillable", "true");
        }
        if inline {
            n = n.child(self.type_node(d.declared_type));
        }
        n
    }

    fn attribute(&self, id: ComponentId) -> Node {
        let c = self.schema.component(id);
        let d = c.as_attribute().expect("attribute");
        let mut n = Node::new("xs:attribute").attr("name", d.name.local.clone());
        if c.name.is_none() {
            let form = if d.name.namespace.is_empty() {
                "unqualified"
            } else {
                "qualified"
            };
            n = n.attr("form", form);
        }
        if self.is_inline(d.type_ref, id) {
            n.child(self.simple(d.type_ref))
        } else {
            n.attr("type", self.qname(d.type_ref))
        }
    }

    fn particle(&self, p: &Particle) -> Option<Node> {
        let n = match &p.term {
            Term::Element(e) => {
                if !self.keep(*e) {
                    return None;
                }
                if self.schema.component(*e).name.is_some() {
                    Node::new("xs:element").attr("ref", self.qname(*e))
                } else {
                    self.element(*e)
                }
            }
            Term::Wildcard(w) => {
                if !self.keep(*w) {
                    return None;
                }
                self.wildcard("xs:any", *w)
            }
            Term::GroupRef(g) => Node::new("xs:group").attr("ref", self.qname(*g)),
            Term::Group {
                compositor,
                children,
            } => {
                let tag = match compositor {
                    Compositor::Sequence => "xs:sequence",
                    Compositor::Choice => "xs:choice",
                    Compositor::All => "xs:all",
                };
                let mut n = Node::new(tag);
                n.children = children.iter().filter_map(|c| self.particle(c)).collect();
                n
            }
        };
        Some(occurs(n, p.occurs))
    }

    fn wildcard(&self, tag: &'static str, id: ComponentId) -> Node {
        let d = self.schema.component(id).as_wildcard().expect("wildcard");
        let ns = match &d.namespaces {
            NamespaceConstraint::Any => None,
            NamespaceConstraint::Not(_) => Some("##other".to_string()),
            NamespaceConstraint::Enumerated(list) => Some(
                list.iter()
                    .map(|n| {
                        if n.is_empty() {
                            "##local".to_string()
                        } else {
                            n.clone()
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
        };
        let process = match d.process {
            ProcessContents::Strict => None,
            ProcessContents::Lax => Some("lax".to_string()),
            ProcessContents::Skip => Some("skip".to_string()),
        };
        Node::new(tag)
            .attr_opt("namespace", ns)
            .attr_opt("processContents", process)
    }

    fn attribute_content(
        &self,
        mut n: Node,
        uses: &[AttributeUse],
        groups: &[ComponentId],
        wildcard: Option<ComponentId>,
        prohibited: &[QName],
    ) -> Node {
        for u in uses.iter().filter(|u| self.keep(u.attribute)) {
            let a = self.schema.component(u.attribute);
            let node = if a.name.is_some() {
                Node::new("xs:attribute").attr("ref", self.qname(u.attribute))
            } else {
                self.attribute(u.attribute)
            };
            n = n.child(if u.required {
                node.attr("use", "required")
            } else {
                node
            });
        }
        for &g in groups {
            n = n.child(Node::new("xs:attributeGroup").attr("ref", self.qname(g)));
        }
        for name in prohibited {
            if name.namespace.is_empty() || name.namespace == self.tns {
                let form = if name.namespace.is_empty() {
                    "unqualified"
                } else {
                    "qualified"
                };
                n = n.child(
                    Node::new("xs:attribute")
                        .attr("name", name.local.clone())
                        .attr("form", form)
                        .attr("use", "prohibited"),
                );
            }
        }
        if let Some(w) = wildcard.filter(|w| self.keep(*w)) {
            n = n.child(self.wildcard("xs:anyAttribute", w));
        }
        n
    }

    fn complex(&self, id: ComponentId) -> Node {
        let c = self.schema.component(id);
        let d = c.as_complex().expect("complex type");
        let mut n = Node::new("xs:complexType");
        if let Some(name) = &c.name {
            n = n.attr("name", name.local.clone());
        }
        if d.is_abstract {
            n = n.attr("abstract", "true");
        }
        if d.mixed {
            n = n.attr("mixed", "true");
        }
        let der_tag = match d.derivation {
            Derivation::Extension => "xs:extension",
            _ => "xs:restriction",
        };
        let particle = match &d.content {
            ContentModel::Elements(p) => self.particle(p),
            _ => None,
        };
        match (&d.content, d.base) {
            (ContentModel::Simple(s), Some(base)) => {
                let mut der = Node::new(der_tag).attr("base", self.qname(base));
                if *s != base && self.is_inline(*s, id) {
                    der = der.child(self.simple(*s));
                }
                der = self.attribute_content(
                    der,
                    &d.attributes,
                    &d.attribute_groups,
                    d.attribute_wildcard,
                    &d.prohibited,
                );
                n.child(Node::new("xs:simpleContent").child(der))
            }
            (_, Some(base))
                if !(base == self.schema.any_type() && d.derivation == Derivation::Restriction) =>
            {
                let mut der = Node::new(der_tag).attr("base", self.qname(base));
                if let Some(p) = particle {
                    der = der.child(p);
                }
                der = self.attribute_content(
                    der,
                    &d.attributes,
                    &d.attribute_groups,
                    d.attribute_wildcard,
                    &d.prohibited,
                );
                n.child(Node::new("xs:complexContent").child(der))
            }
            _ => {
                if let Some(p) = particle {
                    n = n.child(p);
                }
                self.attribute_content(
                    n,
                    &d.attributes,
                    &d.attribute_groups,
                    d.attribute_wildcard,
                    &d.prohibited,
                )
            }
        }
    }

    fn simple(&self, id: ComponentId) -> Node {
        let c = self.schema.component(id);
        let d = c.as_simple().expect("simple type");
        let mut n = Node::new("xs:simpleType");
        if let Some(name) = &c.name {
            n = n.attr("name", name.local.clone());
        }
        let body = match d.variety {
            SimpleVariety::Atomic => {
                let base = d.base.expect("restriction has a base");
                let mut r = Node::new("xs:restriction");
                if self.is_inline(base, id) {
                    r = r.child(self.simple(base));
                } else {
                    r = r.attr("base", self.qname(base));
                }
                for f in &d.facets {
                    r = r.child(Node {
                        tag: facet_tag(&f.name),
                        attrs: vec![("value", f.value.clone())],
                        children: vec![],
                    });
                }
                r
            }
            SimpleVariety::List => {
                let item = d.item_type.expect("list has an item type");
                if self.is_inline(item, id) {
                    Node::new("xs:list").child(self.simple(item))
                } else {
                    Node::new("xs:list").attr("itemType", self.qname(item))
                }
            }
            SimpleVariety::Union => {
                let named: Vec<String> = d
                    .member_types
                    .iter()
                    .filter(|m| !self.is_inline(**m, id))
                    .map(|m| self.qname(*m))
                    .collect();
                let mut u = Node::new("xs:union");
                if !named.is_empty() {
                    u = u.attr("memberTypes", named.join(" "));
                }
                for m in d.member_types.iter().filter(|m| self.is_inline(**m, id)) {
                    u = u.child(self.simple(*m));
                }
                u
            }
        };
        n.child(body)
    }

    fn global(&self, id: ComponentId) -> Node {
        let c = self.schema.component(id);
        match &c.detail {
            ComponentDetail::Complex(_) => self.complex(id),
            ComponentDetail::Simple(_) => self.simple(id),
            ComponentDetail::Element(_) => self.element(id),
            ComponentDetail::Attribute(_) => self.attribute(id),
            ComponentDetail::ModelGroup(d) => {
                let name = c.name.as_ref().expect("global").local.clone();
                let body = self
                    .particle(&d.particle)
                    .unwrap_or_else(|| Node::new("xs:sequence"));
                Node::new("xs:group").attr("name", name).child(body)
            }
            ComponentDetail::AttributeGroup(d) => {
                let name = c.name.as_ref().expect("global").local.clone();
                let n = Node::new("xs:attributeGroup").attr("name", name);
                self.attribute_content(
                    n,
                    &d.attributes,
                    &d.attribute_groups,
                    d.attribute_wildcard,
                    &[],
                )
            }
            ComponentDetail::Wildcard(_) => unreachable!("wildcards are never global"),
        }
    }
}

fn facet_tag(name: &str) -> &'static str {
    match name {
        "length" => "xs:length",
        "minLength" => "xs:minLength",
        "maxLength" => "xs:maxLength",
        "pattern" => "xs:pattern",
        "enumeration" => "xs:enumeration",
        "whiteSpace" => "xs:whiteSpace",
        "maxInclusive" => "xs:maxInclusive",
        "maxExclusive" => "xs:maxExclusive",
        "minInclusive" => "xs:minInclusive",
        "minExclusive" => "xs:minExclusive",
        "totalDigits" => "xs:totalDigits",
        "fractionDigits" => "xs:fractionDigits",
        _ => "xs:annotation",
    }
}

/// The global component an id lives under: itself, or its owner chain's top.
fn top_owner(schema: &SchemaSet, mut id: ComponentId) -> ComponentId {
    while let Some(o) = schema.component(id).owner {
        id = o;
    }
    id
}

pub(super) fn render(schema: &SchemaSet, retained: &BTreeSet<ComponentId>) -> Vec<SchemaFile> {
    let mut by_ns: BTreeMap<&str, Vec<ComponentId>> = BTreeMap::new();
    for &id in retained {
        let c = schema.component(id);
        if !c.builtin && c.name.is_some() {
            by_ns.entry(c.namespace.as_str()).or_default().push(id);
        }
    }
    let mut files: BTreeMap<&str, String> = BTreeMap::new();
    let mut used_names = BTreeSet::new();
    for ns in by_ns.keys() {
        let base = namespace_slug(ns);
        let mut name = format!("{base}.xsd");
        let mut n = 2;
        while !used_names.insert(name.clone()) {
            name = format!("{base}-{n}.xsd");
            n += 1;
        }
        files.insert(ns, name);
    }

    let mut out = Vec::new();
    for (ns, globals) in &by_ns {
        // Namespaces referenced from this file, through anything it renders.
        let mut referenced = BTreeSet::new();
        for &id in retained {
            let top = top_owner(schema, id);
            if schema.component(top).builtin || schema.component(top).namespace != *ns {
                continue;
            }
            for e in schema.out_edges(id) {
                let t = schema.component(e.to);
                if retained.contains(&e.to) {
                    if let Some(name) = &t.name {
                        referenced.insert(name.namespace.clone());
                    }
                }
            }
        }
        let mut prefixes = BTreeMap::new();
        prefixes.insert(XSD_NS.to_string(), "xs".to_string());
        prefixes.insert(XML_NS.to_string(), "xml".to_string());
        if !ns.is_empty() {
            prefixes.insert(ns.to_string(), "tns".to_string());
        }
        let mut next = 1;
        for r in &referenced {
            if !r.is_empty() && !prefixes.contains_key(r) {
                prefixes.insert(r.clone(), format!("ns{next}"));
                next += 1;
            }
        }
        let ctx = FileCtx {
            schema,
            retained,
            tns: ns,
            prefixes: prefixes.clone(),
        };

        let mut text = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<xs:schema");
        let mut decls: Vec<(&String, &String)> = prefixes
            .iter()
            .filter(|(u, p)| *p != "xml" && !u.is_empty())
            .map(|(u, p)| (p, u))
            .collect();
        decls.sort_by_key(|(p, _)| match p.as_str() {
            "xs" => (0, 0),
            "tns" => (1, 0),
            other => (2, other[2..].parse::<usize>().unwrap_or(0)),
        });
        for (p, u) in decls {
            text.push_str(&format!(" xmlns:{p}=\""));
            escape_into(&mut text, u);
            text.push('"');
        }
        if !ns.is_empty() {
            text.push_str(" targetNamespace=\"");
            escape_into(&mut text, ns);
            text.push('"');
        }
        text.push_str(">\n");
        for r in &referenced {
            if r == ns || r == XSD_NS || r == XML_NS {
                continue;
            }
            let mut import = Node::new("xs:import");
            if !r.is_empty() {
                import = import.attr("namespace", r.clone());
            }
            import = import.attr("schemaLocation", files[r.as_str()].clone());
            import.write(&mut text, 1);
        }
        for &id in globals {
            ctx.global(id).write(&mut text, 1);
        }
        text.push_str("</xs:schema>\n");
        out.push(SchemaFile {
            file_name: files[ns].clone(),
            namespace: ns.to_string(),
            text,
        });
    }
    out
}
