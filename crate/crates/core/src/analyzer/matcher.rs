//! Single-pass greedy matching of child element names against a content
//! model. Content models are deterministic (UPA), so no backtracking is
//! needed; a choice with two viable branches is reported instead of guessed.

use std::collections::HashMap;

use xsdbind_runtime::QName;

use crate::model::*;

/// What a child element matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitKind {
    /// `decl` is the element actually present; `via` is the particle's
    /// element, which differs when a substitution group member appears.
    Element { decl: ComponentId, via: ComponentId },
    /// `element` is the global declaration for the child, if one exists and
    /// the wildcard processes its content.
    Wildcard {
        wildcard: ComponentId,
        element: Option<ComponentId>,
    },
}

#[derive(Debug, Clone, Copy)]
pub struct Hit<'s> {
    pub particle: &'s Particle,
    pub kind: HitKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambiguous;

type Step<T> = Result<T, Ambiguous>;

/// Lookup tables shared by all matchers over one schema.
pub struct Tables<'s> {
    pub schema: &'s SchemaSet,
    members: HashMap<ComponentId, HashMap<QName, ComponentId>>,
}

impl<'s> Tables<'s> {
    pub fn new(schema: &'s SchemaSet) -> Self {
        let mut members: HashMap<ComponentId, HashMap<QName, ComponentId>> = HashMap::new();
        for c in schema.globals() {
            if c.kind != ComponentKind::ElementDecl {
                continue;
            }
            let mut head = c.as_element().and_then(|e| e.substitution_head);
            while let Some(h) = head {
                let name = c.as_element().expect("element").name.clone();
                members.entry(h).or_default().insert(name, c.id);
                head = schema.element_detail(h).and_then(|e| e.substitution_head);
            }
        }
        Tables { schema, members }
    }

    /// Element declaration matching `name` at a particle for `decl`.
    pub fn element_match(&self, decl: ComponentId, name: &QName) -> Option<ComponentId> {
        let d = self.schema.element_detail(decl)?;
        if &d.name == name {
            return Some(decl);
        }
        self.members.get(&decl).and_then(|m| m.get(name)).copied()
    }

    pub fn wildcard_match(&self, wildcard: ComponentId, name: &QName) -> Option<HitKind> {
        let w = self.schema.component(wildcard).as_wildcard()?;
        if !w.namespaces.admits(&name.namespace) {
            return None;
        }
        let element = match w.process {
            ProcessContents::Skip => None,
            _ => self.schema.global_element(name),
        };
        Some(HitKind::Wildcard { wildcard, element })
    }

    fn body(&self, p: &'s Particle) -> Body<'s> {
        match &p.term {
            Term::Element(e) => Body::Element(*e),
            Term::Wildcard(w) => Body::Wildcard(*w),
            Term::Group {
                compositor,
                children,
            } => Body::Group(*compositor, children),
            Term::GroupRef(g) => match &self.schema.component(*g).detail {
                ComponentDetail::ModelGroup(d) => match &d.particle.term {
                    Term::Group {
                        compositor,
                        children,
                    } => Body::Group(*compositor, children),
                    _ => Body::Group(Compositor::Sequence, &[]),
                },
                _ => Body::Group(Compositor::Sequence, &[]),
            },
        }
    }

    fn leaf_accepts(&self, p: &'s Particle, name: &QName) -> Option<Hit<'s>> {
        let kind = match self.body(p) {
            Body::Element(e) => HitKind::Element {
                decl: self.element_match(e, name)?,
                via: e,
            },
            Body::Wildcard(w) => self.wildcard_match(w, name)?,
            Body::Group(..) => return None,
        };
        Some(Hit { particle: p, kind })
    }

    fn nullable(&self, p: &'s Particle) -> bool {
        p.occurs.min == 0 || self.body_nullable(p)
    }

    fn body_nullable(&self, p: &'s Particle) -> bool {
        match self.body(p) {
            Body::Element(_) | Body::Wildcard(_) => false,
            Body::Group(Compositor::Choice, children) => {
                children.is_empty() || children.iter().any(|c| self.nullable(c))
            }
            Body::Group(_, children) => children.iter().all(|c| self.nullable(c)),
        }
    }

    /// Whether a fresh occurrence of `p` can begin with `name`.
    fn first_accepts(&self, p: &'s Particle, name: &QName) -> Step<Option<Hit<'s>>> {
        match self.body(p) {
            Body::Element(_) | Body::Wildcard(_) => Ok(self.leaf_accepts(p, name)),
            Body::Group(Compositor::Sequence, children) => {
                for c in children {
                    if let Some(hit) = self.first_accepts(c, name)? {
                        return Ok(Some(hit));
                    }
                    if !self.nullable(c) {
                        return Ok(None);
                    }
                }
                Ok(None)
            }
            Body::Group(_, children) => {
                let mut found = None;
                for c in children {
                    if let Some(hit) = self.first_accepts(c, name)? {
                        if found.is_some() {
                            return Err(Ambiguous);
                        }
                        found = Some(hit);
                    }
                }
                Ok(found)
            }
        }
    }

    fn fresh(&self, p: &'s Particle) -> State<'s> {
        State {
            p,
            count: 0,
            iter: None,
        }
    }

    fn fresh_iter(&self, p: &'s Particle) -> Iter<'s> {
        match self.body(p) {
            Body::Group(Compositor::Sequence, children) => Iter::Seq {
                states: children.iter().map(|c| self.fresh(c)).collect(),
                pos: 0,
            },
            Body::Group(Compositor::Choice, children) => Iter::Choice {
                options: children,
                chosen: None,
            },
            Body::Group(Compositor::All, children) => Iter::All {
                states: children.iter().map(|c| self.fresh(c)).collect(),
            },
            Body::Element(_) | Body::Wildcard(_) => unreachable!("leaves have no iterations"),
        }
    }

    fn is_leaf(&self, p: &'s Particle) -> bool {
        matches!(self.body(p), Body::Element(_) | Body::Wildcard(_))
    }

    fn state_accepts(&self, st: &State<'s>, name: &QName) -> Step<Option<Hit<'s>>> {
        if self.is_leaf(st.p) {
            return Ok(if st.p.occurs.allows(st.count) {
                self.leaf_accepts(st.p, name)
            } else {
                None
            });
        }
        if let Some(iter) = &st.iter {
            if let Some(hit) = self.iter_accepts(iter, name)? {
                return Ok(Some(hit));
            }
            if !self.iter_can_finish(iter) {
                return Ok(None);
            }
        }
        if st.p.occurs.allows(st.count) {
            self.first_accepts(st.p, name)
        } else {
            Ok(None)
        }
    }

    fn iter_accepts(&self, iter: &Iter<'s>, name: &QName) -> Step<Option<Hit<'s>>> {
        match iter {
            Iter::Seq { states, pos } => {
                for st in &states[*pos..] {
                    if let Some(hit) = self.state_accepts(st, name)? {
                        return Ok(Some(hit));
                    }
                    if !self.satisfied(st) {
                        return Ok(None);
                    }
                }
                Ok(None)
            }
            Iter::Choice {
                chosen: Some(c), ..
            } => self.state_accepts(c, name),
            Iter::Choice {
                options,
                chosen: None,
            } => {
                let mut found = None;
                for c in options.iter() {
                    if let Some(hit) = self.first_accepts(c, name)? {
                        if found.is_some() {
                            return Err(Ambiguous);
                        }
                        found = Some(hit);
                    }
                }
                Ok(found)
            }
            Iter::All { states } => {
                let mut found = None;
                for st in states.iter().filter(|s| s.count == 0) {
                    if let Some(hit) = self.state_accepts(st, name)? {
                        if found.is_some() {
                            return Err(Ambiguous);
                        }
                        found = Some(hit);
                    }
                }
                Ok(found)
            }
        }
    }

    fn satisfied(&self, st: &State<'s>) -> bool {
        if self.is_leaf(st.p) {
            return st.count >= st.p.occurs.min;
        }
        let current_ok = st.iter.as_ref().is_none_or(|i| self.iter_can_finish(i));
        current_ok && (st.count >= st.p.occurs.min || self.body_nullable(st.p))
    }

    fn iter_can_finish(&self, iter: &Iter<'s>) -> bool {
        match iter {
            Iter::Seq { states, pos } => states[*pos..].iter().all(|s| self.satisfied(s)),
            Iter::Choice {
                chosen: Some(c), ..
            } => self.satisfied(c),
            Iter::Choice {
                options,
                chosen: None,
            } => options.is_empty() || options.iter().any(|c| self.nullable(c)),
            Iter::All { states } => states.iter().all(|s| self.satisfied(s)),
        }
    }

    /// Consumes `name`; callers first check `state_accepts`, and this makes
    /// the same choices.
    fn feed(&self, st: &mut State<'s>, name: &QName) -> Step<Option<Hit<'s>>> {
        if self.is_leaf(st.p) {
            let hit = self.state_accepts(st, name)?;
            if hit.is_some() {
                st.count += 1;
            }
            return Ok(hit);
        }
        if let Some(iter) = &mut st.iter {
            if self.iter_accepts(iter, name)?.is_some() {
                return self.feed_iter(iter, name);
            }
        }
        if !st.p.occurs.allows(st.count) || self.first_accepts(st.p, name)?.is_none() {
            return Ok(None);
        }
        st.count += 1;
        let iter = st.iter.insert(self.fresh_iter(st.p));
        self.feed_iter(iter, name)
    }

    fn feed_iter(&self, iter: &mut Iter<'s>, name: &QName) -> Step<Option<Hit<'s>>> {
        match iter {
            Iter::Seq { states, pos } => {
                for j in *pos..states.len() {
                    if self.state_accepts(&states[j], name)?.is_some() {
                        *pos = j;
                        return self.feed(&mut states[j], name);
                    }
                    if !self.satisfied(&states[j]) {
                        return Ok(None);
                    }
                }
                Ok(None)
            }
            Iter::Choice { options, chosen } => {
                if let Some(c) = chosen {
                    return self.feed(c, name);
                }
                for c in options.iter() {
                    if self.first_accepts(c, name)?.is_some() {
                        let st = chosen.insert(Box::new(self.fresh(c)));
                        return self.feed(st, name);
                    }
                }
                Ok(None)
            }
            Iter::All { states } => {
                for st in states.iter_mut().filter(|s| s.count == 0) {
                    if self.state_accepts(st, name)?.is_some() {
                        return self.feed(st, name);
                    }
                }
                Ok(None)
            }
        }
    }
}

enum Body<'s> {
    Element(ComponentId),
    Wildcard(ComponentId),
    Group(Compositor, &'s [Particle]),
}

#[derive(Debug, Clone)]
struct State<'s> {
    p: &'s Particle,
    /// Matches for leaves, started iterations for groups.
    count: u32,
    iter: Option<Iter<'s>>,
}

#[derive(Debug, Clone)]
enum Iter<'s> {
    Seq {
        states: Vec<State<'s>>,
        pos: usize,
    },
    Choice {
        options: &'s [Particle],
        chosen: Option<Box<State<'s>>>,
    },
    All {
        states: Vec<State<'s>>,
    },
}

/// Matches the children of one element against its type's content: the
/// particle roots of the extension chain, in sequence.
pub struct Matcher<'s, 't> {
    tables: &'t Tables<'s>,
    top: Iter<'s>,
}

impl<'s, 't> Matcher<'s, 't> {
    pub fn new(tables: &'t Tables<'s>, roots: Vec<&'s Particle>) -> Self {
        let states = roots.into_iter().map(|p| tables.fresh(p)).collect();
        Matcher {
            tables,
            top: Iter::Seq { states, pos: 0 },
        }
    }

    /// The particle that `name` matches next, consuming it. `Ok(None)` when
    /// the content model does not admit `name` here.
    pub fn next(&mut self, name: &QName) -> Result<Option<Hit<'s>>, Ambiguous> {
        if self.tables.iter_accepts(&self.top, name)?.is_none() {
            return Ok(None);
        }
        self.tables.feed_iter(&mut self.top, name)
    }

    /// True when the children seen so far form a complete content.
    pub fn complete(&self) -> bool {
        self.tables.iter_can_finish(&self.top)
    }
}
