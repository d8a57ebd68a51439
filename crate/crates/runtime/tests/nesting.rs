use proptest::prelude::*;
use xsdbind_runtime::{traverse, XmlEvent, XmlReader};

#[derive(Debug, Clone)]
enum Tree {
    Text(String),
    Element(String, Vec<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = "[a-z &<>]{1,6}".prop_map(Tree::Text);
    leaf.prop_recursive(5, 48, 4, |inner| {
        ("[a-z][a-z0-9]{0,3}", proptest::collection::vec(inner, 0..4))
            .prop_map(|(n, c)| Tree::Element(n, c))
    })
}

fn render(t: &Tree, out: &mut String) {
    match t {
        Tree::Text(s) => out.push_str(
            &s.replace('&', "&amp;")
                .replace('<', "&lt;")
                .replace('>', "&gt;"),
        ),
        Tree::Element(n, c) => {
            out.push_str(&format!("<{n}>"));
            c.iter().for_each(|k| render(k, out));
            out.push_str(&format!("</{n}>"));
        }
    }
}

fn count(t: &Tree) -> usize {
    match t {
        Tree::Text(_) => 0,
        Tree::Element(_, c) => 1 + c.iter().map(count).sum::<usize>(),
    }
}

proptest! {
    #[test]
    fn start_and_end_events_nest((name, children) in ("[a-z]{1,4}", proptest::collection::vec(tree(), 0..4))) {
        let root = Tree::Element(name, children);
        let mut doc = String::new();
        render(&root, &mut doc);
        let mut reader = XmlReader::new(&doc);
        let mut stack = Vec::new();
        let mut starts = 0;
        let mut events = 0;
        loop {
            events += 1;
            match reader.next_event().unwrap() {
                XmlEvent::StartElement { name, .. } => {
                    starts += 1;
                    stack.push(name);
                    prop_assert_eq!(reader.depth(), stack.len());
                }
                XmlEvent::EndElement(name) => prop_assert_eq!(Some(name), stack.pop()),
                XmlEvent::Text(_) => prop_assert!(!stack.is_empty()),
                XmlEvent::EndDocument => break,
            }
        }
        prop_assert!(stack.is_empty());
        prop_assert_eq!(starts, count(&root));
        prop_assert_eq!(traverse(&doc).unwrap(), events);
    }
}
