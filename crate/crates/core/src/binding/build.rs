use std::collections::{BTreeMap, BTreeSet};

use xsdbind_runtime::QName;

use super::naming::{self, Scope};
use super::*;
use crate::analyzer::{particle_key, UsageReport};
use crate::model::*;

#[derive(Debug, Clone, PartialEq)]
enum Target {
    Class(ComponentId),
    Simple(SimpleCategory),
    Table(usize),
    Skip,
}

#[derive(Debug, Clone)]
struct Entry {
    element: ComponentId,
    xsi: Option<ComponentId>,
    target: Target,
    nillable: bool,
}

#[derive(Debug, Clone)]
struct Field {
    hint: String,
    xml_name: QName,
    kind: FieldKind,
    target: Target,
    card: Cardinality,
    nillable: bool,
    wrappers: Vec<QName>,
    /// Innermost element whose content the target binds.
    element: Option<ComponentId>,
    source: String,
}

#[derive(Debug)]
struct Class {
    base: Option<ComponentId>,
    fields: Vec<Field>,
    skips: Vec<NamespaceRule>,
    collapsed_away: bool,
}

#[derive(Debug)]
struct Table {
    owner: ComponentId,
    field: usize,
    entries: Vec<Entry>,
}

struct Builder<'a> {
    schema: &'a SchemaSet,
    retained: &'a BTreeSet<ComponentId>,
    usage: &'a UsageReport,
    opts: BindingOptions,
    classes: BTreeMap<ComponentId, Class>,
    tables: Vec<Table>,
    queue: Vec<ComponentId>,
}

/// Builds the IR. `retained` must be closed and contain everything `usage`
/// mentions.
pub fn build_binding_model(
    schema: &SchemaSet,
    retained: &BTreeSet<ComponentId>,
    usage: &UsageReport,
    options: &BindingOptions,
) -> Result<BindingModel, BindingError> {
    for id in usage.mentioned_ids() {
        if schema.get(id).is_none() {
            return Err(BindingError::InconsistentUsage(format!(
                "component #{}",
                id.index()
            )));
        }
        if !retained.contains(&id) {
            return Err(BindingError::InconsistentUsage(schema.key(id).to_string()));
        }
    }
    let mut b = Builder {
        schema,
        retained,
        usage,
        opts: options.effective(),
        classes: BTreeMap::new(),
        tables: Vec::new(),
        queue: Vec::new(),
    };
    let roots = b.root_entries();
    if roots.is_empty() {
        return Err(BindingError::EmptyModel);
    }
    b.drain();
    b.apply_ignores(&roots);
    let reachable = b.reachable(&roots);
    b.classes.retain(|ty, _| reachable.contains(ty));
    let collapsed = if b.opts.collapse_single_child {
        b.collapse()
    } else {
        BTreeSet::new()
    };
    let live = b.reachable(&roots);
    for (ty, c) in b.classes.iter_mut() {
        c.collapsed_away = !live.contains(ty);
    }
    Ok(b.finish(roots, collapsed, options.clone()))
}

/// Adds every substitution member of retained elements and every type
/// derived from a retained user type, keeping the result closed. Used when
/// substitutions are not bounded by the corpus, so that all schema-possible
/// alternatives have something to bind to.
pub fn widen_for_substitutions(
    schema: &SchemaSet,
    retained: &BTreeSet<ComponentId>,
) -> BTreeSet<ComponentId> {
    let mut set = retained.clone();
    loop {
        let mut add = BTreeSet::new();
        for &id in &set {
            let c = schema.component(id);
            if c.builtin {
                continue;
            }
            match c.kind {
                ComponentKind::ElementDecl if c.is_global() => {
                    add.extend(schema.substitution_members(id).unwrap_or_default());
                }
                ComponentKind::ComplexType | ComponentKind::SimpleType => {
                    add.extend(schema.derived_types(id));
                }
                _ => {}
            }
        }
        add.retain(|id| !set.contains(id));
        if add.is_empty() {
            return set;
        }
        add.extend(set.iter().copied());
        set = schema
            .dependency_closure(&add, &EdgeLabel::MANDATORY)
            .expect("ids come from the schema");
    }
}

fn mul(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(0), _) | (_, Some(0)) => Some(0),
        (Some(x), Some(y)) => Some(x.saturating_mul(y)),
        _ => None,
    }
}

/// Element and wildcard particles reachable from `p` without crossing an
/// element, with the occurrence bounds the surrounding groups impose.
fn leaves<'s>(
    schema: &'s SchemaSet,
    p: &'s Particle,
    min: u32,
    max: Option<u32>,
    out: &mut Vec<(&'s Particle, u32, Option<u32>)>,
) {
    let emin = min.saturating_mul(p.occurs.min);
    let emax = mul(max, p.occurs.max);
    match &p.term {
        Term::Element(_) | Term::Wildcard(_) => out.push((p, emin, emax)),
        Term::Group {
            compositor,
            children,
        } => {
            let cmin = if *compositor == Compositor::Choice && children.len() > 1 {
                0
            } else {
                emin
            };
            for c in children {
                leaves(schema, c, cmin, emax, out);
            }
        }
        Term::GroupRef(g) => {
            if let ComponentDetail::ModelGroup(d) = &schema.component(*g).detail {
                leaves(schema, &d.particle, emin, emax, out);
            }
        }
    }
}

impl Builder<'_> {
    fn retained(&self, id: ComponentId) -> bool {
        self.retained.contains(&id)
    }

    fn element(&self, id: ComponentId) -> &ElementDetail {
        self.schema
            .component(id)
            .as_element()
            .expect("element declaration")
    }

    fn type_is_abstract(&self, ty: ComponentId) -> bool {
        self.schema
            .component(ty)
            .as_complex()
            .is_some_and(|d| d.is_abstract)
    }

    fn target_of_type(&mut self, ty: ComponentId) -> Target {
        if self.schema.component(ty).kind == ComponentKind::ComplexType {
            self.queue.push(ty);
            Target::Class(ty)
        } else {
            Target::Simple(self.schema.simple_category(ty))
        }
    }

    fn entry(&mut self, element: ComponentId, xsi: Option<ComponentId>, ty: ComponentId) -> Entry {
        Entry {
            element,
            xsi,
            target: self.target_of_type(ty),
            nillable: self.element(element).nillable,
        }
    }

    /// Entries for the type alternatives of each element in `alts`.
    fn type_entries(&mut self, alts: &BTreeSet<ComponentId>) -> Vec<Entry> {
        let mut out = Vec::new();
        for &a in alts {
            let t = self.element(a).declared_type;
            if self.opts.bound_substitutions {
                if self.usage.instanced_types.contains(&t) {
                    out.push(self.entry(a, None, t));
                }
                let subs = self
                    .usage
                    .type_substitutions
                    .get(&a)
                    .cloned()
                    .unwrap_or_default();
                for x in subs {
                    out.push(self.entry(a, Some(x), x));
                }
            } else {
                if !self.type_is_abstract(t) {
                    out.push(self.entry(a, None, t));
                }
                let derived: Vec<ComponentId> = self
                    .schema
                    .derived_types(t)
                    .into_iter()
                    .filter(|&x| {
                        let c = self.schema.component(x);
                        x != t
                            && !c.builtin
                            && self.retained(x)
                            && c.is_global()
                            && !self.type_is_abstract(x)
                    })
                    .collect();
                for x in derived {
                    out.push(self.entry(a, Some(x), x));
                }
            }
        }
        out
    }

    fn element_entries(&mut self, e: ComponentId) -> Vec<Entry> {
        let mut alts = BTreeSet::new();
        if self.opts.bound_substitutions {
            if self.usage.used_components.contains(&e) {
                alts.insert(e);
            }
            if let Some(m) = self.usage.element_substitutions.get(&e) {
                alts.extend(m.iter().copied());
            }
        } else {
            alts.insert(e);
            if self.schema.component(e).is_global() {
                alts.extend(self.schema.substitution_members(e).unwrap_or_default());
            }
            let schema = self.schema;
            alts.retain(|&a| {
                self.retained.contains(&a)
                    && !schema
                        .component(a)
                        .as_element()
                        .is_some_and(|d| d.is_abstract)
            });
        }
        self.type_entries(&alts)
    }

    fn wildcard_entries(&mut self, w: ComponentId) -> Vec<Entry> {
        let alts: BTreeSet<ComponentId> = if self.opts.bound_substitutions {
            self.usage
                .wildcard_fillers
                .get(&w)
                .cloned()
                .unwrap_or_default()
        } else {
            let wd = self.schema.component(w).as_wildcard().expect("wildcard");
            self.schema
                .user_globals()
                .filter(|c| c.kind == ComponentKind::ElementDecl && self.retained(c.id))
                .filter(|c| {
                    let d = c.as_element().expect("element");
                    !d.is_abstract && wd.namespaces.admits(&d.name.namespace)
                })
                .map(|c| c.id)
                .collect()
        };
        self.type_entries(&alts)
    }

    fn root_entries(&mut self) -> Vec<Entry> {
        let mut alts = BTreeSet::new();
        for &r in &self.usage.root_elements {
            alts.insert(r);
            if !self.opts.bound_substitutions {
                alts.extend(self.schema.substitution_members(r).unwrap_or_default());
            }
        }
        let schema = self.schema;
        alts.retain(|&a| {
            self.retained.contains(&a)
                && !schema
                    .component(a)
                    .as_element()
                    .is_some_and(|d| d.is_abstract)
        });
        self.type_entries(&alts)
    }

    fn drain(&mut self) {
        while let Some(ty) = self.queue.pop() {
            if self.classes.contains_key(&ty) {
                continue;
            }
            let class = self.make_class(ty);
            self.classes.insert(ty, class);
        }
    }

    fn make_class(&mut self, ty: ComponentId) -> Class {
        let chain = self.schema.extension_chain(ty);
        let (levels, base) = if self.opts.flatten_inheritance {
            (0..chain.len(), None)
        } else {
            let last = chain.len() - 1;
            let base = last.checked_sub(1).map(|i| chain[i]);
            if let Some(b) = base {
                self.queue.push(b);
            }
            (last..chain.len(), base)
        };
        let mut fields = Vec::new();
        let mut skips = Vec::new();
        for i in levels {
            let prev = i.checked_sub(1).map(|j| chain[j]);
            self.level_fields(ty, chain[i], prev, &mut fields, &mut skips);
        }
        Class {
            base,
            fields,
            skips,
            collapsed_away: false,
        }
    }

    fn needs_text(&self, t: ComponentId) -> bool {
        self.schema.simple_content_type(t).is_some() || self.schema.is_mixed(t)
    }

    /// Fields a type adds over its extension base.
    fn level_fields(
        &mut self,
        owner: ComponentId,
        t: ComponentId,
        prev: Option<ComponentId>,
        fields: &mut Vec<Field>,
        skips: &mut Vec<NamespaceRule>,
    ) {
        let schema = self.schema;
        if self.needs_text(t) && prev.is_none_or(|p| !self.needs_text(p)) {
            let (hint, target, card) = match schema.simple_content_type(t) {
                Some(st) => (
                    "value",
                    schema.simple_category(st),
                    Cardinality::ScalarRequired,
                ),
                None => (
                    "text",
                    SimpleCategory::RawLexical,
                    Cardinality::ScalarOptional,
                ),
            };
            fields.push(Field {
                hint: hint.to_string(),
                xml_name: QName::default(),
                kind: FieldKind::TextContent,
                target: Target::Simple(target),
                card,
                nillable: false,
                wrappers: Vec::new(),
                element: None,
                source: format!("{}#text", schema.key(t)),
            });
        }

        let inherited: BTreeSet<QName> = prev
            .map(|p| {
                schema
                    .effective_attribute_uses(p)
                    .iter()
                    .map(|u| schema.attribute_name(u.attribute))
                    .collect()
            })
            .unwrap_or_default();
        for u in schema.effective_attribute_uses(t) {
            let name = schema.attribute_name(u.attribute);
            if inherited.contains(&name) || !self.usage.used_components.contains(&u.attribute) {
                continue;
            }
            let aty = schema
                .component(u.attribute)
                .as_attribute()
                .expect("attribute")
                .type_ref;
            fields.push(Field {
                hint: name.local.clone(),
                xml_name: name,
                kind: FieldKind::Attribute,
                target: Target::Simple(schema.simple_category(aty)),
                card: if u.required {
                    Cardinality::ScalarRequired
                } else {
                    Cardinality::ScalarOptional
                },
                nillable: false,
                wrappers: Vec::new(),
                element: None,
                source: schema.key(u.attribute).to_string(),
            });
        }

        if schema.simple_content_type(t).is_some() {
            return;
        }
        let Some(ContentModel::Elements(root)) =
            schema.component(t).as_complex().map(|d| &d.content)
        else {
            return;
        };
        let mut found = Vec::new();
        leaves(schema, root, 1, Some(1), &mut found);
        for (leaf, emin, emax) in found {
            if let Term::Wildcard(w) = leaf.term {
                let wd = schema.component(w).as_wildcard().expect("wildcard");
                if self.retained(w) && wd.process != ProcessContents::Strict {
                    let rule = match &wd.namespaces {
                        NamespaceConstraint::Any => NamespaceRule::Any,
                        NamespaceConstraint::Not(l) => NamespaceRule::Not(l.clone()),
                        NamespaceConstraint::Enumerated(l) => NamespaceRule::Only(l.clone()),
                    };
                    if !skips.contains(&rule) {
                        skips.push(rule);
                    }
                }
            }
            let observed = self.usage.occurrences(&leaf.path);
            if observed == 0 || emax == Some(0) {
                continue;
            }
            let declared_list = emax.is_none_or(|m| m > 1);
            let list = if self.opts.tighten_occurrences {
                declared_list && observed > 1
            } else {
                declared_list
            };
            let card = if list {
                Cardinality::List
            } else if emin >= 1 {
                Cardinality::ScalarRequired
            } else {
                Cardinality::ScalarOptional
            };
            let source = particle_key(schema, &leaf.path);
            let field = match leaf.term {
                Term::Element(e) => {
                    if !self.retained(e) {
                        continue;
                    }
                    let entries = self.element_entries(e);
                    let d = self.element(e);
                    if entries.len() == 1 && entries[0].element == e && entries[0].xsi.is_none() {
                        Field {
                            hint: d.name.local.clone(),
                            xml_name: d.name.clone(),
                            kind: FieldKind::Element,
                            target: entries[0].target.clone(),
                            card,
                            nillable: d.nillable,
                            wrappers: Vec::new(),
                            element: Some(e),
                            source,
                        }
                    } else if entries.is_empty() {
                        continue;
                    } else {
                        let hint = d.name.local.clone();
                        let xml_name = d.name.clone();
                        self.tables.push(Table {
                            owner,
                            field: fields.len(),
                            entries,
                        });
                        Field {
                            hint,
                            xml_name,
                            kind: FieldKind::Element,
                            target: Target::Table(self.tables.len() - 1),
                            card,
                            nillable: false,
                            wrappers: Vec::new(),
                            element: None,
                            source,
                        }
                    }
                }
                Term::Wildcard(w) => {
                    if !self.retained(w) {
                        continue;
                    }
                    let entries = self.wildcard_entries(w);
                    if entries.is_empty() {
                        continue;
                    }
                    self.tables.push(Table {
                        owner,
                        field: fields.len(),
                        entries,
                    });
                    Field {
                        hint: "any".to_string(),
                        xml_name: QName::default(),
                        kind: FieldKind::Element,
                        target: Target::Table(self.tables.len() - 1),
                        card,
                        nillable: false,
                        wrappers: Vec::new(),
                        element: None,
                        source,
                    }
                }
                _ => unreachable!("leaves are elements or wildcards"),
            };
            fields.push(field);
        }
    }

    fn element_name(&self, e: ComponentId) -> &QName {
        &self.element(e).name
    }

    /// Classes bound by the field when its element is named by `step`.
    fn step_targets(&self, f: &Field, step: &path::Step) -> Option<Vec<ComponentId>> {
        if f.kind != FieldKind::Element {
            return None;
        }
        match &f.target {
            Target::Table(i) => {
                let entries = &self.tables[*i].entries;
                if !entries
                    .iter()
                    .all(|e| step.matches(self.element_name(e.element)))
                {
                    return None;
                }
                Some(entries.iter().filter_map(|e| class_of(&e.target)).collect())
            }
            Target::Skip => None,
            t => step
                .matches(&f.xml_name)
                .then(|| class_of(t).into_iter().collect()),
        }
    }

    fn apply_ignores(&mut self, roots: &[Entry]) {
        let paths = self.opts.ignore_paths.clone();
        for p in &paths {
            let (last, init) = p.steps.split_last().expect("paths have steps");
            let mut marked: Vec<(ComponentId, usize)> = Vec::new();
            let mut reach = |classes: &BTreeMap<ComponentId, Class>,
                             owner: Option<&BTreeSet<ComponentId>>| {
                for (ty, c) in classes {
                    if owner.is_none_or(|o| o.contains(ty)) {
                        for (i, f) in c.fields.iter().enumerate() {
                            if self.step_targets(f, last).is_some() {
                                marked.push((*ty, i));
                            }
                        }
                    }
                }
            };
            match init.split_first() {
                None if p.absolute => {}
                None => reach(&self.classes, None),
                Some((first, rest)) => {
                    let mut set: BTreeSet<ComponentId> = roots
                        .iter()
                        .filter(|e| first.matches(self.element_name(e.element)))
                        .filter_map(|e| class_of(&e.target))
                        .collect();
                    if !p.absolute {
                        for c in self.classes.values() {
                            for f in &c.fields {
                                set.extend(self.step_targets(f, first).unwrap_or_default());
                            }
                        }
                    }
                    for step in rest {
                        let mut next = BTreeSet::new();
                        for ty in &set {
                            if let Some(c) = self.classes.get(ty) {
                                for f in &c.fields {
                                    next.extend(self.step_targets(f, step).unwrap_or_default());
                                }
                            }
                        }
                        set = next;
                    }
                    reach(&self.classes, Some(&set));
                }
            }
            for (ty, i) in marked {
                let f = &mut self.classes.get_mut(&ty).expect("marked class").fields[i];
                f.target = Target::Skip;
                f.element = None;
                f.wrappers.clear();
            }
        }
    }

    fn reachable(&self, roots: &[Entry]) -> BTreeSet<ComponentId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<ComponentId> =
            roots.iter().filter_map(|e| class_of(&e.target)).collect();
        while let Some(ty) = stack.pop() {
            if !seen.insert(ty) {
                continue;
            }
            let Some(c) = self.classes.get(&ty) else {
                continue;
            };
            stack.extend(c.base);
            for f in &c.fields {
                match &f.target {
                    Target::Class(t) => stack.push(*t),
                    Target::Table(i) => stack.extend(
                        self.tables[*i]
                            .entries
                            .iter()
                            .filter_map(|e| class_of(&e.target)),
                    ),
                    _ => {}
                }
            }
        }
        seen
    }

    /// The one field a wrapper class may be collapsed onto.
    fn collapsible(&self, ty: ComponentId) -> Option<&Field> {
        let c = self.classes.get(&ty)?;
        if c.base.is_some() || !c.skips.is_empty() || c.fields.len() != 1 {
            return None;
        }
        let g = &c.fields[0];
        let direct = matches!(g.target, Target::Class(_) | Target::Simple(_));
        (g.kind == FieldKind::Element
            && direct
            && !g.card.is_list()
            && !g.nillable
            && g.element.is_some())
        .then_some(g)
    }

    /// Retargets fields whose element always wraps one child, to a fixed
    /// point (at most 32 rounds). Returns the collapsed elements.
    fn collapse(&mut self) -> BTreeSet<ComponentId> {
        let mut collapsed = BTreeSet::new();
        for _ in 0..32 {
            let mut changes = Vec::new();
            for (ty, c) in &self.classes {
                for (i, f) in c.fields.iter().enumerate() {
                    let (Target::Class(inner), Some(el)) = (&f.target, f.element) else {
                        continue;
                    };
                    if f.kind != FieldKind::Element
                        || !self.usage.single_child_elements.contains(&el)
                    {
                        continue;
                    }
                    if let Some(g) = self.collapsible(*inner) {
                        let mut wrappers = f.wrappers.clone();
                        wrappers.push(g.xml_name.clone());
                        wrappers.extend(g.wrappers.iter().cloned());
                        changes.push((*ty, i, g.target.clone(), wrappers, g.element, el));
                    }
                }
            }
            if changes.is_empty() {
                break;
            }
            for (ty, i, target, wrappers, element, el) in changes {
                let f = &mut self.classes.get_mut(&ty).expect("changed class").fields[i];
                f.target = target;
                f.wrappers = wrappers;
                f.element = element;
                f.nillable = false;
                collapsed.insert(el);
            }
        }
        collapsed
    }

    fn class_hint(&self, ty: ComponentId) -> String {
        let mut cur = ty;
        loop {
            let c = self.schema.component(cur);
            if let Some(n) = &c.name {
                return n.local.clone();
            }
            if let Some(d) = c.as_element() {
                return d.name.local.clone();
            }
            match c.owner {
                Some(o) => cur = o,
                None => return "anonymous".to_string(),
            }
        }
    }

    fn finish(
        self,
        roots: Vec<Entry>,
        collapsed: BTreeSet<ComponentId>,
        options: BindingOptions,
    ) -> BindingModel {
        let schema = self.schema;
        let mut types = Scope::new();
        let mut class_names: BTreeMap<ComponentId, String> = BTreeMap::new();
        for &ty in self.classes.keys() {
            class_names.insert(ty, types.claim(naming::type_ident(&self.class_hint(ty))));
        }

        // Field names, ancestors first so that bound values never repeat a name.
        let mut field_names: BTreeMap<ComponentId, Vec<String>> = BTreeMap::new();
        fn names_for(
            ty: ComponentId,
            classes: &BTreeMap<ComponentId, Class>,
            memo: &mut BTreeMap<ComponentId, Vec<String>>,
        ) -> Vec<String> {
            if let Some(n) = memo.get(&ty) {
                return n.clone();
            }
            let c = &classes[&ty];
            let mut scope = Scope::new();
            let mut inherited = Vec::new();
            let mut cur = c.base;
            while let Some(b) = cur {
                inherited.extend(names_for(b, classes, memo));
                cur = classes[&b].base;
            }
            for n in &inherited {
                scope.reserve(n);
            }
            let own: Vec<String> = c
                .fields
                .iter()
                .map(|f| scope.claim(naming::field_ident(&f.hint)))
                .collect();
            memo.insert(ty, own.clone());
            own
        }
        for &ty in self.classes.keys() {
            names_for(ty, &self.classes, &mut field_names);
        }

        let qname_of = |id: ComponentId| schema.component(id).name.clone().expect("global");
        let convert_entries = |entries: &[Entry], scope: &mut Scope| -> Vec<DispatchEntry> {
            entries
                .iter()
                .map(|e| {
                    let element = schema
                        .component(e.element)
                        .as_element()
                        .expect("element")
                        .name
                        .clone();
                    let xsi_type = e.xsi.map(qname_of);
                    let mut variant = naming::type_ident(&element.local);
                    let mut tag = element.to_string();
                    if let Some(x) = &xsi_type {
                        variant.push_str("As");
                        variant.push_str(&naming::type_ident(&x.local));
                        tag = format!("{tag}@{x}");
                    }
                    DispatchEntry {
                        element,
                        xsi_type,
                        target: ir_target(&e.target, &class_names, &BTreeMap::new()),
                        tag,
                        variant: scope.claim(variant),
                        nillable: e.nillable,
                    }
                })
                .collect()
        };

        // Tables still referenced by a kept class, in owner/field order.
        let mut used_tables: Vec<(String, String, usize)> = Vec::new();
        for (ty, c) in &self.classes {
            for (i, f) in c.fields.iter().enumerate() {
                if let Target::Table(t) = f.target {
                    debug_assert_eq!((self.tables[t].owner, self.tables[t].field), (*ty, i));
                    used_tables.push((class_names[ty].clone(), field_names[ty][i].clone(), t));
                }
            }
        }
        used_tables.sort();
        let mut table_ids: BTreeMap<usize, String> = BTreeMap::new();
        let mut dispatch_tables = BTreeMap::new();
        for (class, field, t) in used_tables {
            let id = field_id(&class, &field);
            let name = types.claim(naming::type_ident(&format!("{class}_{field}")));
            let mut scope = Scope::new();
            let entries = convert_entries(&self.tables[t].entries, &mut scope);
            dispatch_tables.insert(id.clone(), DispatchTable { name, entries });
            table_ids.insert(t, id);
        }
        let mut root_scope = Scope::new();
        let roots = DispatchTable {
            name: "Root".to_string(),
            entries: convert_entries(&roots, &mut root_scope),
        };

        let mut classes: Vec<BindingClass> = self
            .classes
            .iter()
            .map(|(ty, c)| {
                let comp = schema.component(*ty);
                BindingClass {
                    name: class_names[ty].clone(),
                    source_type: comp.key.clone(),
                    xml_type: comp.name.clone(),
                    base: c.base.map(|b| class_names[&b].clone()),
                    is_abstract: comp.as_complex().is_some_and(|d| d.is_abstract),
                    fields: c
                        .fields
                        .iter()
                        .zip(&field_names[ty])
                        .map(|(f, name)| BindingField {
                            name: name.clone(),
                            xml_name: f.xml_name.clone(),
                            kind: f.kind,
                            target: ir_target(&f.target, &class_names, &table_ids),
                            cardinality: f.card,
                            ignored: f.target == Target::Skip,
                            nillable: f.nillable,
                            wrappers: f.wrappers.clone(),
                            source: f.source.clone(),
                        })
                        .collect(),
                    skip_namespaces: c.skips.clone(),
                    is_collapsed_away: c.collapsed_away,
                }
            })
            .collect();
        classes.sort_by(|a, b| a.name.cmp(&b.name));
        let mut collapsed_elements: Vec<String> = collapsed
            .iter()
            .map(|e| schema.key(*e).to_string())
            .collect();
        collapsed_elements.sort();
        BindingModel {
            ir_version: IR_VERSION,
            name: "model".to_string(),
            options,
            classes,
            roots,
            dispatch_tables,
            collapsed_elements,
        }
    }
}

fn class_of(t: &Target) -> Option<ComponentId> {
    match t {
        Target::Class(c) => Some(*c),
        _ => None,
    }
}

fn ir_target(
    t: &Target,
    classes: &BTreeMap<ComponentId, String>,
    tables: &BTreeMap<usize, String>,
) -> FieldTarget {
    match t {
        Target::Class(c) => FieldTarget::Class {
            class: classes[c].clone(),
        },
        Target::Simple(category) => FieldTarget::Simple {
            category: *category,
        },
        Target::Table(i) => FieldTarget::Dispatch {
            table: tables[i].clone(),
        },
        Target::Skip => FieldTarget::Skip,
    }
}
