use std::collections::BTreeSet;

use xsdbind_runtime::{Mode, QName};

use super::*;
use crate::analyzer::tests::schema_of;
use crate::analyzer::{analyze_corpus, Document, UsageReport};
use crate::model::{ComponentId, SchemaSet};
use crate::simplify::compute_retained_set;

fn usage(s: &SchemaSet, docs: &[&str]) -> UsageReport {
    let docs: Vec<Document> = docs
        .iter()
        .map(|d| Document::new("d.xml", d.as_bytes()))
        .collect();
    let (r, failures) = analyze_corpus(s, &docs, Mode::Strict);
    assert!(failures.is_empty(), "{failures:?}");
    r
}

fn model(s: &SchemaSet, docs: &[&str], opts: &BindingOptions) -> BindingModel {
    let u = usage(s, docs);
    let mut retained = compute_retained_set(s, &u).unwrap();
    if !opts.effective().bound_substitutions {
        retained = widen_for_substitutions(s, &retained);
    }
    let m = build_binding_model(s, &retained, &u, opts).unwrap();
    m.validate().unwrap();
    m
}

fn field_names(m: &BindingModel, class: &str) -> Vec<String> {
    m.class(class)
        .unwrap()
        .fields
        .iter()
        .map(|f| f.name.clone())
        .collect()
}

fn field<'m>(m: &'m BindingModel, class: &str, name: &str) -> &'m BindingField {
    m.class(class)
        .unwrap()
        .fields
        .iter()
        .find(|f| f.name == name)
        .unwrap()
}

#[test]
fn empty_type_gives_one_class() {
    let s = schema_of(r#"<xs:complexType name="T"/><xs:element name="e" type="T"/>"#);
    let m = model(&s, &["<e/>"], &BindingOptions::default());
    assert_eq!(m.classes.len(), 1);
    assert_eq!(m.classes[0].name, "T");
    assert!(m.classes[0].fields.is_empty());
    assert_eq!(m.roots.entries.len(), 1);
    assert_eq!(
        m.roots.entries[0].target,
        FieldTarget::Class { class: "T".into() }
    );
}

const INHERIT: &str = r#"
    <xs:complexType name="B"><xs:sequence><xs:element name="b" type="xs:string"/></xs:sequence></xs:complexType>
    <xs:complexType name="D"><xs:complexContent><xs:extension base="B">
      <xs:sequence><xs:element name="d" type="xs:int"/></xs:sequence>
    </xs:extension></xs:complexContent></xs:complexType>
    <xs:element name="r"><xs:complexType><xs:sequence>
      <xs:element name="x" type="B" maxOccurs="unbounded"/>
    </xs:sequence></xs:complexType></xs:element>"#;

const INHERIT_DOC: &str = r#"<r xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"><x><b>1</b></x><x xsi:type="D"><b>2</b><d>3</d></x></r>"#;

#[test]
fn flattening_copies_inherited_fields() {
    let s = schema_of(INHERIT);
    let m = model(&s, &[INHERIT_DOC], &BindingOptions::default());
    assert_eq!(field_names(&m, "D"), ["b", "d"]);
    assert_eq!(field_names(&m, "B"), ["b"]);
    assert!(m.classes.iter().all(|c| c.base.is_none()));
    assert_eq!(
        field(&m, "D", "d").target,
        FieldTarget::Simple {
            category: SimpleCategory::Integer
        }
    );
}

#[test]
fn unflattened_classes_keep_base_and_same_field_sequence() {
    let s = schema_of(INHERIT);
    let flat = model(&s, &[INHERIT_DOC], &BindingOptions::default());
    let opts = BindingOptions {
        flatten_inheritance: false,
        ..Default::default()
    };
    let deep = model(&s, &[INHERIT_DOC], &opts);
    let d = deep.class("D").unwrap();
    assert_eq!(d.base.as_deref(), Some("B"));
    assert_eq!(field_names(&deep, "D"), ["d"]);
    let chained: Vec<(QName, FieldKind)> = deep
        .all_fields(d)
        .iter()
        .map(|f| (f.xml_name.clone(), f.kind))
        .collect();
    let flattened: Vec<(QName, FieldKind)> = flat
        .class("D")
        .unwrap()
        .fields
        .iter()
        .map(|f| (f.xml_name.clone(), f.kind))
        .collect();
    assert_eq!(chained, flattened);
}

#[test]
fn xsi_type_gives_dispatch_entry() {
    let s = schema_of(INHERIT);
    let m = model(&s, &[INHERIT_DOC], &BindingOptions::default());
    let x = field(&m, "R", "x");
    let FieldTarget::Dispatch { table } = &x.target else {
        panic!("{x:?}")
    };
    let t = &m.dispatch_tables[table];
    let pairs: Vec<(String, Option<String>)> = t
        .entries
        .iter()
        .map(|e| {
            (
                e.element.local.clone(),
                e.xsi_type.as_ref().map(|q| q.local.clone()),
            )
        })
        .collect();
    assert_eq!(
        pairs,
        [
            ("x".to_string(), None),
            ("x".to_string(), Some("D".to_string()))
        ]
    );
    assert_eq!(
        t.select(&QName::local("x"), Some(&QName::local("D"))),
        Some(1)
    );
    assert_eq!(
        t.select(&QName::local("x"), Some(&QName::local("Z"))),
        Some(0)
    );
    assert_eq!(x.cardinality, Cardinality::List);
}

const ITEMS: &str = r#"
    <xs:element name="list"><xs:complexType><xs:sequence>
      <xs:element name="item" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
      <xs:element name="tail" type="xs:string"/>
    </xs:sequence></xs:complexType></xs:element>"#;

#[test]
fn tightening_follows_observed_maximum() {
    let s = schema_of(ITEMS);
    let docs = ["<list><item>a</item><tail/></list>", "<list><tail/></list>"];
    let m = model(&s, &docs, &BindingOptions::default());
    assert_eq!(
        field(&m, "List", "item").cardinality,
        Cardinality::ScalarOptional
    );
    assert_eq!(
        field(&m, "List", "tail").cardinality,
        Cardinality::ScalarRequired
    );
    let loose = BindingOptions {
        tighten_occurrences: false,
        ..Default::default()
    };
    let m = model(&s, &docs, &loose);
    assert_eq!(field(&m, "List", "item").cardinality, Cardinality::List);

    let m = model(
        &s,
        &["<list><item>a</item><item>b</item><tail/></list>"],
        &BindingOptions::default(),
    );
    assert_eq!(field(&m, "List", "item").cardinality, Cardinality::List);
}

#[test]
fn unobserved_particles_have_no_field() {
    let s = schema_of(ITEMS);
    let m = model(&s, &["<list><tail/></list>"], &BindingOptions::default());
    assert_eq!(field_names(&m, "List"), ["tail"]);
}

const SUBST: &str = r#"
    <xs:element name="h" type="xs:string" abstract="true"/>
    <xs:element name="m1" substitutionGroup="h"/>
    <xs:element name="m2" substitutionGroup="h"/>
    <xs:element name="m3" substitutionGroup="m2"/>
    <xs:element name="r"><xs:complexType><xs:sequence>
      <xs:element ref="h" maxOccurs="unbounded"/>
    </xs:sequence></xs:complexType></xs:element>"#;

fn table_elements(m: &BindingModel, class: &str, field_name: &str) -> Vec<String> {
    let FieldTarget::Dispatch { table } = &field(m, class, field_name).target else {
        panic!()
    };
    m.dispatch_tables[table]
        .entries
        .iter()
        .map(|e| e.element.local.clone())
        .collect()
}

#[test]
fn substitutions_bounded_by_corpus() {
    let s = schema_of(SUBST);
    let docs = ["<r><m1>a</m1></r>"];
    let m = model(&s, &docs, &BindingOptions::default());
    assert_eq!(table_elements(&m, "R", "h"), ["m1"]);
    let all = BindingOptions {
        bound_substitutions: false,
        ..Default::default()
    };
    let m = model(&s, &docs, &all);
    assert_eq!(table_elements(&m, "R", "h"), ["m1", "m2", "m3"]);
}

#[test]
fn synthetic_corpus_disables_tightening_and_bounding() {
    let s = schema_of(SUBST);
    let opts = BindingOptions {
        corpus_is_synthetic: true,
        ..Default::default()
    };
    let m = model(&s, &["<r><m1>a</m1></r>"], &opts);
    assert_eq!(table_elements(&m, "R", "h"), ["m1", "m2", "m3"]);
    assert_eq!(field(&m, "R", "h").cardinality, Cardinality::List);
    assert!(m.options.corpus_is_synthetic);
    assert!(
        m.options.tighten_occurrences,
        "stored options are the requested ones"
    );
}

const WRAP: &str = r#"
    <xs:element name="doc"><xs:complexType><xs:sequence>
      <xs:element name="meta"><xs:complexType><xs:sequence>
        <xs:element name="inner"><xs:complexType><xs:sequence>
          <xs:element name="leaf"><xs:complexType><xs:attribute name="v" type="xs:int"/></xs:complexType></xs:element>
        </xs:sequence></xs:complexType></xs:element>
      </xs:sequence></xs:complexType></xs:element>
      <xs:element name="n" type="xs:int"/>
    </xs:sequence></xs:complexType></xs:element>"#;

const WRAP_DOC: &str = r#"<doc><meta><inner><leaf v="1"/></inner></meta><n>2</n></doc>"#;

#[test]
fn collapse_retargets_through_wrapper_chain() {
    let s = schema_of(WRAP);
    let off = BindingOptions {
        collapse_single_child: false,
        ..Default::default()
    };
    let plain = model(&s, &[WRAP_DOC], &off);
    let m = model(&s, &[WRAP_DOC], &BindingOptions::default());
    let meta = field(&m, "Doc", "meta");
    assert_eq!(
        meta.target,
        FieldTarget::Class {
            class: "Leaf".into()
        }
    );
    assert_eq!(meta.wrappers, [QName::local("inner"), QName::local("leaf")]);
    assert_eq!(m.collapsed_elements.len(), 2);
    assert_eq!(
        plain.class_count() - m.class_count(),
        m.collapsed_elements.len()
    );
    assert!(m.class("Meta").unwrap().is_collapsed_away);
    assert!(plain.collapsed_elements.is_empty());
}

#[test]
fn collapse_needs_single_child_in_every_instance() {
    let s = schema_of(WRAP);
    let m = model(
        &s,
        &[
            WRAP_DOC,
            r#"<doc><meta><inner><leaf/></inner></meta><n>2</n></doc>"#,
        ],
        &BindingOptions::default(),
    );
    // `leaf` has no children in either document, so it stays a class.
    assert_eq!(field(&m, "Doc", "meta").wrappers.len(), 2);
    let s2 = schema_of(&WRAP.replace(
        r#"<xs:element name="meta">"#,
        r#"<xs:element name="meta" nillable="true">"#,
    ));
    let nil = r#"<doc xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"><meta xsi:nil="true"/><n>2</n></doc>"#;
    let m = model(&s2, &[WRAP_DOC, nil], &BindingOptions::default());
    assert_eq!(
        field(&m, "Doc", "meta").target,
        FieldTarget::Class {
            class: "Meta".into()
        }
    );
}

#[test]
fn ignore_paths_skip_fields() {
    let s = schema_of(WRAP);
    let opts = BindingOptions {
        ignore_paths: vec!["meta/inner".parse().unwrap()],
        collapse_single_child: false,
        ..Default::default()
    };
    let m = model(&s, &[WRAP_DOC], &opts);
    let f = field(&m, "Meta", "inner");
    assert!(f.ignored);
    assert_eq!(f.target, FieldTarget::Skip);
    assert!(
        m.class("Inner").is_none(),
        "classes only reachable through ignored fields are dropped"
    );

    let opts = BindingOptions {
        ignore_paths: vec!["/doc/n".parse().unwrap()],
        ..Default::default()
    };
    let m = model(&s, &[WRAP_DOC], &opts);
    assert!(field(&m, "Doc", "n").ignored);
    assert!(!field(&m, "Doc", "meta").ignored);

    let opts = BindingOptions {
        ignore_paths: vec!["/meta/inner".parse().unwrap()],
        ..Default::default()
    };
    let m = model(&s, &[WRAP_DOC], &opts);
    assert!(m.classes.iter().flat_map(|c| &c.fields).all(|f| !f.ignored));
}

#[test]
fn attributes_and_simple_content() {
    let s = schema_of(
        r#"<xs:complexType name="Price"><xs:simpleContent><xs:extension base="xs:decimal">
             <xs:attribute name="currency" type="xs:string" use="required"/>
             <xs:attribute name="unused" type="xs:string"/>
           </xs:extension></xs:simpleContent></xs:complexType>
           <xs:element name="p" type="Price"/>"#,
    );
    let m = model(
        &s,
        &[r#"<p currency="EUR">1.5</p>"#],
        &BindingOptions::default(),
    );
    let c = m.class("Price").unwrap();
    let kinds: Vec<(&str, FieldKind, Cardinality)> = c
        .fields
        .iter()
        .map(|f| (f.name.as_str(), f.kind, f.cardinality))
        .collect();
    assert_eq!(
        kinds,
        [
            ("value", FieldKind::TextContent, Cardinality::ScalarRequired),
            (
                "currency",
                FieldKind::Attribute,
                Cardinality::ScalarRequired
            )
        ]
    );
    assert_eq!(
        c.fields[0].target,
        FieldTarget::Simple {
            category: SimpleCategory::Decimal
        }
    );
}

#[test]
fn mixed_content_has_text_field() {
    let s = schema_of(
        r#"<xs:element name="p"><xs:complexType mixed="true"><xs:sequence>
             <xs:element name="b" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
           </xs:sequence></xs:complexType></xs:element>"#,
    );
    let m = model(
        &s,
        &["<p>x<b>y</b>z<b>w</b></p>"],
        &BindingOptions::default(),
    );
    assert_eq!(field_names(&m, "P"), ["text", "b"]);
    assert_eq!(
        field(&m, "P", "text").cardinality,
        Cardinality::ScalarOptional
    );
}

#[test]
fn wildcards_dispatch_on_fillers_and_skip_lax_content() {
    let s = schema_of(
        r#"<xs:element name="ext" type="xs:int"/>
           <xs:element name="bag"><xs:complexType><xs:sequence>
             <xs:any processContents="lax" maxOccurs="unbounded"/>
           </xs:sequence></xs:complexType></xs:element>"#,
    );
    let m = model(
        &s,
        &["<bag><ext>1</ext><other/></bag>"],
        &BindingOptions::default(),
    );
    assert_eq!(table_elements(&m, "Bag", "any"), ["ext"]);
    assert_eq!(
        m.class("Bag").unwrap().skip_namespaces,
        [NamespaceRule::Any]
    );
}

#[test]
fn name_collisions_are_suffixed() {
    let s = schema_of(
        r#"<xs:complexType name="item"/><xs:complexType name="Item"/>
           <xs:element name="r"><xs:complexType><xs:sequence>
             <xs:element name="a" type="item"/><xs:element name="b" type="Item"/>
           </xs:sequence>
           <xs:attribute name="a" type="xs:string"/></xs:complexType></xs:element>"#,
    );
    let m = model(
        &s,
        &[r#"<r a="x"><a/><b/></r>"#],
        &BindingOptions::default(),
    );
    let mut names: Vec<&str> = m.classes.iter().map(|c| c.name.as_str()).collect();
    names.sort();
    assert_eq!(names, ["Item", "Item_2", "R"]);
    assert_eq!(field_names(&m, "R"), ["a", "a_2", "b"]);
}

#[test]
fn inconsistent_usage_and_empty_model() {
    let s = schema_of(
        r#"<xs:element name="e" type="xs:string"/><xs:element name="f" type="xs:string"/>"#,
    );
    let u = usage(&s, &["<e>x</e>"]);
    let retained = compute_retained_set(&s, &u).unwrap();
    let e = s.global_element(&QName::local("e")).unwrap();
    let narrowed: BTreeSet<ComponentId> = retained.iter().copied().filter(|&i| i != e).collect();
    assert!(matches!(
        build_binding_model(&s, &narrowed, &u, &BindingOptions::default()),
        Err(BindingError::InconsistentUsage(k)) if k == "element::e"
    ));
    assert_eq!(
        build_binding_model(
            &s,
            &retained,
            &UsageReport::default(),
            &BindingOptions::default()
        ),
        Err(BindingError::EmptyModel)
    );
}

#[test]
fn json_round_trip_and_determinism() {
    let s = schema_of(INHERIT);
    let m = model(&s, &[INHERIT_DOC], &BindingOptions::default());
    let text = m.to_json();
    assert!(text.contains("\"irVersion\": 1"));
    assert_eq!(BindingModel::from_json(&text).unwrap(), m);
    assert_eq!(
        model(&s, &[INHERIT_DOC], &BindingOptions::default()).to_json(),
        text
    );

    let trivial = schema_of(r#"<xs:complexType name="T"/><xs:element name="e" type="T"/>"#);
    let t = model(&trivial, &["<e/>"], &BindingOptions::default()).to_json();
    let v: serde_json::Value = serde_json::from_str(&t).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);

    let bumped = text.replace("\"irVersion\": 1", "\"irVersion\": 2");
    assert_eq!(
        BindingModel::from_json(&bumped),
        Err(BindingError::Version(2))
    );
}
