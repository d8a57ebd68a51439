//! Small element tree for schema documents, built on the runtime reader.

use std::rc::Rc;

use xsdbind_runtime::{Location, QName, XmlError, XmlEvent, XmlReader, XML_NS};

#[derive(Debug)]
pub(crate) struct Element {
    pub name: QName,
    pub attributes: Vec<(QName, String)>,
    pub children: Vec<Element>,
    pub location: Location,
    scope: Rc<Vec<(String, String)>>,
}

impl Element {
    pub fn attr(&self, local: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n.namespace.is_empty() && n.local == local)
            .map(|(_, v)| v.as_str())
    }

    /// Resolves a QName-valued attribute against the namespace declarations
    /// in scope at this element. `Err` carries the offending lexical form.
    pub fn resolve_qname(&self, lexical: &str) -> Result<QName, String> {
        let lexical = lexical.trim();
        let (prefix, local) = lexical.split_once(':').unwrap_or(("", lexical));
        if !xsdbind_runtime::is_ncname(local) {
            return Err(lexical.to_string());
        }
        let ns = if prefix == "xml" {
            Some(XML_NS)
        } else {
            self.scope
                .iter()
                .rev()
                .find(|(p, _)| p == prefix)
                .map(|(_, u)| u.as_str())
        };
        match ns {
            Some(ns) => Ok(QName::new(ns, local)),
            None if prefix.is_empty() => Ok(QName::local(local)),
            None => Err(lexical.to_string()),
        }
    }

    /// Child elements in the given namespace.
    pub fn children_in<'e>(&'e self, ns: &'e str) -> impl Iterator<Item = &'e Element> + 'e {
        self.children.iter().filter(move |c| c.name.namespace == ns)
    }
}

pub(crate) fn parse(text: &str) -> Result<Element, XmlError> {
    let mut reader = XmlReader::new(text);
    let mut stack: Vec<Element> = Vec::new();
    let root_scope = Rc::new(Vec::new());
    loop {
        match reader.next_event()? {
            XmlEvent::StartElement { name, attributes } => {
                let location = reader.location();
                let parent_scope = stack.last().map_or(&root_scope, |p| &p.scope);
                let scope = if reader.bindings().len() == parent_scope.len() {
                    Rc::clone(parent_scope)
                } else {
                    Rc::new(reader.bindings().to_vec())
                };
                stack.push(Element {
                    name,
                    attributes: attributes.into_iter().map(|a| (a.name, a.value)).collect(),
                    children: Vec::new(),
                    location,
                    scope,
                });
            }
            XmlEvent::EndElement(_) => {
                let done = stack.pop().expect("reader guarantees nesting");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(done),
                    None => return Ok(done),
                }
            }
            XmlEvent::Text(_) => {}
            XmlEvent::EndDocument => {
                unreachable!("root element closes before the end of the document")
            }
        }
    }
}
