use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::model::{
    walk_particles, Component, ComponentDetail, ComponentId, ComponentKind, ContentModel,
    ParticlePathId, SchemaSet, Term,
};

/// Usage facts aggregated over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UsageReport {
    pub document_count: u64,
    pub used_components: BTreeSet<ComponentId>,
    pub instanced_types: BTreeSet<ComponentId>,
    /// Element → types seen through `xsi:type` on its instances.
    pub type_substitutions: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    /// Head element → members seen in its place.
    pub element_substitutions: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    /// Wildcard → global elements seen matching it.
    pub wildcard_fillers: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    /// Largest number of children one parent matched to the particle.
    pub occurrence_maxima: BTreeMap<ParticlePathId, u32>,
    pub single_child_elements: BTreeSet<ComponentId>,
    pub root_elements: BTreeSet<ComponentId>,
    /// Elements seen at least once failing the single-child test. Kept so
    /// that merging partial reports stays exact.
    pub(crate) disqualified: BTreeSet<ComponentId>,
}

fn union_map(
    into: &mut BTreeMap<ComponentId, BTreeSet<ComponentId>>,
    from: BTreeMap<ComponentId, BTreeSet<ComponentId>>,
) {
    for (k, v) in from {
        into.entry(k).or_default().extend(v);
    }
}

/// Renders a particle path id as `{ownerKey}#{i.j.k}`.
pub fn particle_key(schema: &SchemaSet, p: &ParticlePathId) -> String {
    let path: Vec<String> = p.path.iter().map(u16::to_string).collect();
    format!("{}#{}", schema.key(p.owner), path.join("."))
}

impl UsageReport {
    /// Combines two partial reports: set union and pointwise maximum.
    pub fn merge(mut self, other: UsageReport) -> UsageReport {
        self.document_count += other.document_count;
        self.used_components.extend(other.used_components);
        self.instanced_types.extend(other.instanced_types);
        union_map(&mut self.type_substitutions, other.type_substitutions);
        union_map(&mut self.element_substitutions, other.element_substitutions);
        union_map(&mut self.wildcard_fillers, other.wildcard_fillers);
        for (k, v) in other.occurrence_maxima {
            let slot = self.occurrence_maxima.entry(k).or_insert(0);
            *slot = (*slot).max(v);
        }
        self.single_child_elements
            .extend(other.single_child_elements);
        self.disqualified.extend(other.disqualified);
        let disq = &self.disqualified;
        self.single_child_elements.retain(|e| !disq.contains(e));
        self.root_elements.extend(other.root_elements);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.used_components.is_empty()
    }

    /// Observed maximum for a particle; 0 when never matched.
    pub fn occurrences(&self, p: &ParticlePathId) -> u32 {
        self.occurrence_maxima.get(p).copied().unwrap_or(0)
    }

    /// Every id mentioned anywhere in the report.
    pub fn mentioned_ids(&self) -> BTreeSet<ComponentId> {
        let mut out: BTreeSet<ComponentId> = self.used_components.clone();
        out.extend(&self.instanced_types);
        for m in [
            &self.type_substitutions,
            &self.element_substitutions,
            &self.wildcard_fillers,
        ] {
            for (k, v) in m {
                out.insert(*k);
                out.extend(v);
            }
        }
        out.extend(self.occurrence_maxima.keys().map(|p| p.owner));
        out.extend(&self.single_child_elements);
        out.extend(&self.root_elements);
        out
    }

    /// JSON form with component keys in place of ids. Keys sort
    /// lexicographically because `serde_json` maps are ordered.
    pub fn to_json(&self, schema: &SchemaSet) -> Value {
        let keys = |set: &BTreeSet<ComponentId>| -> Value {
            let mut v: Vec<&str> = set.iter().map(|id| schema.key(*id)).collect();
            v.sort_unstable();
            json!(v)
        };
        let map = |m: &BTreeMap<ComponentId, BTreeSet<ComponentId>>| -> Value {
            let mut out = Map::new();
            for (k, v) in m {
                out.insert(schema.key(*k).to_string(), keys(v));
            }
            Value::Object(out)
        };
        let mut occ = Map::new();
        for (p, n) in &self.occurrence_maxima {
            occ.insert(particle_key(schema, p), json!(n));
        }
        json!({
            "documentCount": self.document_count,
            "usedComponents": keys(&self.used_components),
            "instancedTypes": keys(&self.instanced_types),
            "typeSubstitutions": map(&self.type_substitutions),
            "elementSubstitutions": map(&self.element_substitutions),
            "wildcardFillers": map(&self.wildcard_fillers),
            "occurrenceMaxima": Value::Object(occ),
            "singleChildElements": keys(&self.single_child_elements),
            "rootElements": keys(&self.root_elements),
        })
    }

    /// Pretty JSON text with a trailing newline.
    pub fn to_json_string(&self, schema: &SchemaSet) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.to_json(schema)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// The report a corpus exercising everything the schema allows would
/// produce: every user component used, every repeatable particle seen
/// twice, every possible substitution seen. Binding against it gives the
/// unpruned model.
pub fn saturated_usage(schema: &SchemaSet) -> UsageReport {
    let mut r = UsageReport::default();
    let user: Vec<&Component> = schema.components().iter().filter(|c| !c.builtin).collect();
    let mut note = |p: &crate::model::Particle| {
        if matches!(p.term, Term::Element(_) | Term::Wildcard(_)) {
            let n = if p.occurs.repeats() { 2 } else { 1 };
            r.occurrence_maxima.insert(p.path.clone(), n);
        }
    };
    for c in &user {
        match &c.detail {
            ComponentDetail::Complex(d) => {
                if let ContentModel::Elements(root) = &d.content {
                    walk_particles(root, &mut note);
                }
            }
            ComponentDetail::ModelGroup(d) => walk_particles(&d.particle, &mut note),
            _ => {}
        }
    }
    for c in &user {
        r.used_components.insert(c.id);
        match c.kind {
            ComponentKind::ComplexType | ComponentKind::SimpleType => {
                if !c.as_complex().is_some_and(|d| d.is_abstract) {
                    r.instanced_types.insert(c.id);
                }
            }
            ComponentKind::ElementDecl => {
                let d = c.as_element().expect("element");
                if c.is_global() {
                    r.root_elements.insert(c.id);
                    let members = schema.substitution_members(c.id).unwrap_or_default();
                    if !members.is_empty() {
                        r.element_substitutions.insert(c.id, members);
                    }
                }
                let derived: BTreeSet<ComponentId> = schema
                    .derived_types(d.declared_type)
                    .into_iter()
                    .filter(|&t| {
                        t != d.declared_type
                            && schema.component(t).is_global()
                            && !schema.component(t).builtin
                    })
                    .collect();
                if !derived.is_empty() {
                    r.type_substitutions.insert(c.id, derived);
                }
            }
            ComponentKind::Wildcard => {
                let w = c.as_wildcard().expect("wildcard");
                let fillers: BTreeSet<ComponentId> = user
                    .iter()
                    .filter(|g| g.kind == ComponentKind::ElementDecl && g.is_global())
                    .filter(|g| {
                        w.namespaces
                            .admits(&g.as_element().expect("element").name.namespace)
                    })
                    .map(|g| g.id)
                    .collect();
                if !fillers.is_empty() {
                    r.wildcard_fillers.insert(c.id, fillers);
                }
            }
            _ => {}
        }
    }
    r
}
