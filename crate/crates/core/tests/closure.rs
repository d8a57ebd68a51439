use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use xsdbind_core::loader::{load_schema_set, MemoryResolver, SchemaSource};
use xsdbind_core::model::{Category, ComponentId, EdgeLabel, SchemaSet};
use xsdbind_runtime::QName;

const NS: &str = "urn:example:graph";

/// `T{i}` holds one element of type `T{j}` for every edge `i -> j`.
fn schema_for(n: usize, edges: &[(usize, usize)]) -> SchemaSet {
    let mut xsd = format!(r#"<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema" xmlns:g="{NS}" targetNamespace="{NS}">"#);
    for i in 0..n {
        xsd.push_str(&format!(r#"<xs:complexType name="T{i}"><xs:sequence>"#));
        for (k, &(_, j)) in edges.iter().filter(|e| e.0 == i).enumerate() {
            xsd.push_str(&format!(r#"<xs:element name="f{k}" type="g:T{j}" minOccurs="0"/>"#));
        }
        xsd.push_str(r#"</xs:sequence><xs:attribute name="a" type="xs:string"/></xs:complexType>"#);
    }
    xsd.push_str("</xs:schema>");
    load_schema_set(&[SchemaSource::new("g.xsd", xsd)], &MemoryResolver::new()).expect("schema loads")
}

fn reachable(n: usize, edges: &[(usize, usize)], roots: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut seen = roots.clone();
    let mut queue: VecDeque<usize> = roots.iter().copied().collect();
    while let Some(i) = queue.pop_front() {
        for &(_, j) in edges.iter().filter(|e| e.0 == i) {
            if j < n && seen.insert(j) {
                queue.push_back(j);
            }
        }
    }
    seen
}

fn type_ids(schema: &SchemaSet, idx: &BTreeSet<usize>) -> BTreeSet<ComponentId> {
    idx.iter()
        .map(|i| schema.lookup(Category::Type, &QName::new(NS, format!("T{i}"))).expect("declared"))
        .collect()
}

fn user_types(schema: &SchemaSet, set: &BTreeSet<ComponentId>) -> BTreeSet<usize> {
    schema
        .user_globals()
        .filter(|c| set.contains(&c.id))
        .filter_map(|c| c.name.as_ref()?.local.strip_prefix('T')?.parse().ok())
        .collect()
}

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, BTreeSet<usize>, BTreeSet<usize>)> {
    (1usize..12).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec((0..n, 0..n), 0..3 * n),
            proptest::collection::btree_set(0..n, 0..n),
            proptest::collection::btree_set(0..n, 0..n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_matches_reachability((n, edges, a, extra) in graph()) {
        let schema = schema_for(n, &edges);
        let closure = |roots: &BTreeSet<usize>| schema.dependency_closure(&type_ids(&schema, roots), &EdgeLabel::ALL).unwrap();
        let small = closure(&a);
        prop_assert_eq!(user_types(&schema, &small), reachable(n, &edges, &a));

        let again = schema.dependency_closure(&small, &EdgeLabel::ALL).unwrap();
        prop_assert_eq!(&again, &small);

        let bigger: BTreeSet<usize> = a.union(&extra).copied().collect();
        prop_assert!(small.is_subset(&closure(&bigger)));
    }
}
