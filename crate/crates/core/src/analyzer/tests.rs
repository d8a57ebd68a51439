use std::collections::BTreeSet;

use super::*;
use crate::loader::{load_schema_set, MemoryResolver};

pub(crate) fn schema_of(body: &str) -> SchemaSet {
    let text =
        format!(r#"<xs:schema xmlns:xs="http://www.w3.org/2001/XMLSchema">{body}</xs:schema>"#);
    let mut r = MemoryResolver::new();
    r.add("s.xsd", text);
    load_schema_set(&[r.source("s.xsd").unwrap()], &r).unwrap()
}

fn ty(s: &SchemaSet, n: &str) -> ComponentId {
    s.lookup(Category::Type, &QName::local(n)).unwrap()
}

fn el(s: &SchemaSet, n: &str) -> ComponentId {
    s.global_element(&QName::local(n)).unwrap()
}

fn analyze(s: &SchemaSet, docs: &[&str], mode: Mode) -> (UsageReport, Vec<DocumentFailure>) {
    let docs: Vec<Document> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| Document::new(format!("d{i}.xml"), d.as_bytes()))
        .collect();
    analyze_corpus(s, &docs, mode)
}

const XSI: &str = r#"xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance""#;

fn derivation_schema() -> SchemaSet {
    schema_of(
        r#"<xs:complexType name="T"><xs:sequence><xs:element name="a" type="xs:string" minOccurs="0"/></xs:sequence></xs:complexType>
           <xs:complexType name="U"><xs:complexContent><xs:extension base="T">
             <xs:sequence><xs:element name="b" type="xs:int"/></xs:sequence></xs:extension></xs:complexContent></xs:complexType>
           <xs:complexType name="V"/>
           <xs:element name="e" type="T"/>"#,
    )
}

#[test]
fn root_assignment() {
    let s = derivation_schema();
    let e = el(&s, "e");
    assert_eq!(
        assign_root(&s, &QName::local("e"), None).unwrap(),
        (e, ty(&s, "T"))
    );
    assert_eq!(
        assign_root(&s, &QName::local("e"), Some(&QName::local("U"))).unwrap(),
        (e, ty(&s, "U"))
    );
    assert!(matches!(
        assign_root(&s, &QName::local("e"), Some(&QName::local("V"))),
        Err(AnalyzeError::InvalidTypeOverride { .. })
    ));
    assert!(matches!(
        assign_root(&s, &QName::local("nope"), None),
        Err(AnalyzeError::UnknownRoot { .. })
    ));
}

#[test]
fn children_assignment() {
    let s = schema_of(
        r#"<xs:complexType name="P"><xs:sequence><xs:element name="a" type="xs:string"/><xs:element name="b" type="xs:int" minOccurs="0"/></xs:sequence></xs:complexType>
           <xs:complexType name="H"><xs:sequence><xs:element ref="h" maxOccurs="unbounded"/></xs:sequence></xs:complexType>
           <xs:element name="h" type="xs:string"/><xs:element name="m" substitutionGroup="h"/>"#,
    );
    let p = ty(&s, "P");
    let got = assign_children(&s, p, &[QName::local("a")], Mode::Strict).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(got[0].particle.as_ref().unwrap().path, vec![0]);
    assert_eq!(
        got[0].ty,
        s.lookup(Category::Type, &QName::new(XSD_NS, "string"))
    );

    let h = ty(&s, "H");
    let got =
        assign_children(&s, h, &[QName::local("m"), QName::local("m")], Mode::Strict).unwrap();
    assert!(got.iter().all(|c| c.element == Some(el(&s, "m"))));
    assert_eq!(got[0].particle, got[1].particle);

    let err = assign_children(&s, p, &[QName::local("z")], Mode::Strict).unwrap_err();
    assert!(
        matches!(err, AnalyzeError::UnmatchedChild { position: 0, .. }),
        "{err}"
    );
    let lenient = assign_children(
        &s,
        p,
        &[QName::local("z"), QName::local("a")],
        Mode::Lenient,
    )
    .unwrap();
    assert_eq!(lenient[0], ChildAssignment::SKIP);
    assert!(lenient[1].element.is_some());
}

#[test]
fn substitution_recorded_in_corpus() {
    let s = schema_of(
        r#"<xs:complexType name="H"><xs:sequence><xs:element ref="h" maxOccurs="unbounded"/></xs:sequence></xs:complexType>
           <xs:element name="r" type="H"/><xs:element name="h" type="xs:string"/><xs:element name="m" substitutionGroup="h"/>"#,
    );
    let (r, f) = analyze(&s, &["<r><m>x</m><m>y</m></r>"], Mode::Strict);
    assert!(f.is_empty());
    let h = el(&s, "h");
    assert_eq!(
        r.element_substitutions[&h],
        s.substitution_members(h).unwrap()
    );
    assert!(!r.used_components.contains(&h));
}

#[test]
fn empty_corpus() {
    let s = derivation_schema();
    let (r, f) = analyze(&s, &[], Mode::Strict);
    assert!(f.is_empty());
    assert_eq!(r, UsageReport::default());
}

#[test]
fn usage_ratio_fixture() {
    let s = schema_of(
        r#"<xs:complexType name="T"/><xs:complexType name="U"/><xs:element name="e" type="T"/><xs:element name="f" type="U"/>"#,
    );
    let (r, _) = analyze(&s, &["<e/>"], Mode::Strict);
    let used_globals: BTreeSet<_> = s
        .user_globals()
        .filter(|c| r.used_components.contains(&c.id))
        .map(|c| c.id)
        .collect();
    assert_eq!(
        used_globals,
        [el(&s, "e"), ty(&s, "T")].into_iter().collect()
    );
    assert_eq!(s.user_globals().count(), 4);
}

#[test]
fn occurrence_maximum_over_documents() {
    let s = schema_of(
        r#"<xs:complexType name="L"><xs:sequence><xs:element name="item" type="xs:string" maxOccurs="unbounded"/></xs:sequence></xs:complexType>
           <xs:element name="list" type="L"/>"#,
    );
    let (r, f) = analyze(
        &s,
        &["<list><item/><item/><item/></list>", "<list><item/></list>"],
        Mode::Strict,
    );
    assert!(f.is_empty());
    let p = ParticlePathId {
        owner: ty(&s, "L"),
        path: vec![0],
    };
    assert_eq!(r.occurrence_maxima[&p], 3);
    assert_eq!(r.document_count, 2);
}

#[test]
fn type_substitution_and_nil() {
    let s = derivation_schema();
    let doc = format!(r#"<e {XSI} xsi:type="U"><a/><b>1</b></e>"#);
    let (r, f) = analyze(&s, &[&doc], Mode::Strict);
    assert!(f.is_empty(), "{f:?}");
    let e = el(&s, "e");
    assert_eq!(
        r.type_substitutions[&e],
        [ty(&s, "U")].into_iter().collect()
    );
    assert!(r.instanced_types.contains(&ty(&s, "U")));

    let nil = format!(r#"<e {XSI} xsi:nil="true"/>"#);
    let (r, _) = analyze(&s, &[&nil], Mode::Strict);
    assert!(r.instanced_types.contains(&ty(&s, "T")));
    assert!(r.occurrence_maxima.is_empty());
    assert!(r.type_substitutions.is_empty());
}

#[test]
fn single_child_rules() {
    let s = schema_of(
        r#"<xs:complexType name="W"><xs:sequence><xs:element name="x" type="xs:string" minOccurs="0" maxOccurs="2"/></xs:sequence>
             <xs:attribute name="k" type="xs:string"/></xs:complexType>
           <xs:complexType name="R"><xs:sequence><xs:element name="w" type="W" maxOccurs="unbounded"/></xs:sequence></xs:complexType>
           <xs:element name="r" type="R"/>"#,
    );
    let w = s.lookup_key("element::R/w").unwrap();
    let r_el = el(&s, "r");
    let (rep, _) = analyze(&s, &["<r><w><x/></w><w><x/></w></r>"], Mode::Strict);
    assert!(rep.single_child_elements.contains(&w));
    assert!(!rep.single_child_elements.contains(&r_el));
    for bad in [
        "<r><w><x/><x/></w></r>",
        r#"<r><w k="1"><x/></w></r>"#,
        "<r><w>t<x/></w></r>",
    ] {
        let (rep, _) = analyze(&s, &["<r><w><x/></w></r>", bad], Mode::Strict);
        assert!(!rep.single_child_elements.contains(&w), "{bad}");
    }
}

#[test]
fn merge_is_commutative_and_matches_joint_analysis() {
    let s = derivation_schema();
    let docs = [
        "<e><a/></e>".to_string(),
        format!(r#"<e {XSI} xsi:type="U"><b>2</b></e>"#),
        "<e/>".to_string(),
    ];
    let refs: Vec<&str> = docs.iter().map(String::as_str).collect();
    let (all, _) = analyze(&s, &refs, Mode::Strict);
    let (one, _) = analyze(&s, &refs[..1], Mode::Strict);
    let (two, _) = analyze(&s, &refs[1..], Mode::Strict);
    assert_eq!(one.clone().merge(two.clone()), all);
    assert_eq!(two.merge(one), all);
}

#[test]
fn strict_failures_and_lenient_skips() {
    let s = derivation_schema();
    let (r, f) = analyze(
        &s,
        &["<e><a/></e>", "<e><zz/></e>", "<notroot/>", "<e><a></e>"],
        Mode::Strict,
    );
    assert_eq!(r.document_count, 1);
    let codes: Vec<&str> = f.iter().map(|x| x.error.code()).collect();
    assert_eq!(
        codes,
        [
            "UNMATCHED_CHILD",
            "UNKNOWN_ROOT_ELEMENT",
            "MALFORMED_DOCUMENT"
        ]
    );
    assert_eq!(f[0].name, "d1.xml");
    let (r, f) = analyze(&s, &["<e><zz/><a/></e>"], Mode::Lenient);
    assert!(f.is_empty());
    assert!(r
        .used_components
        .contains(&s.lookup_key("element::T/a").unwrap()));
}

#[test]
fn ambiguous_choice_reported() {
    let s = schema_of(
        r#"<xs:element name="a" type="xs:string"/>
           <xs:complexType name="C"><xs:choice><xs:sequence><xs:element ref="a"/></xs:sequence><xs:element ref="a"/></xs:choice></xs:complexType>
           <xs:element name="c" type="C"/>"#,
    );
    let (_, f) = analyze(&s, &["<c><a/></c>"], Mode::Strict);
    assert_eq!(f[0].error.code(), "AMBIGUOUS_MATCH");
}

#[test]
fn nested_groups_and_all() {
    let s = schema_of(
        r#"<xs:group name="g"><xs:sequence><xs:element name="p" type="xs:string"/><xs:element name="q" type="xs:string" minOccurs="0"/></xs:sequence></xs:group>
           <xs:complexType name="N"><xs:sequence>
             <xs:choice maxOccurs="unbounded"><xs:group ref="g"/><xs:element name="z" type="xs:string"/></xs:choice>
             <xs:all minOccurs="0"><xs:element name="m" type="xs:string"/><xs:element name="n" type="xs:string"/></xs:all>
           </xs:sequence></xs:complexType>
           <xs:element name="root" type="N"/>"#,
    );
    let (r, f) = analyze(
        &s,
        &["<root><p/><q/><z/><p/><z/><n/><m/></root>"],
        Mode::Strict,
    );
    assert!(f.is_empty(), "{f:?}");
    let g = s.lookup(Category::ModelGroup, &QName::local("g")).unwrap();
    assert!(r.used_components.contains(&g));
    assert_eq!(
        r.occurrence_maxima[&ParticlePathId {
            owner: g,
            path: vec![0]
        }],
        2
    );
    assert_eq!(
        r.occurrence_maxima[&ParticlePathId {
            owner: ty(&s, "N"),
            path: vec![0, 1]
        }],
        2
    );
    let (_, f) = analyze(&s, &["<root><p/><m/><m/></root>"], Mode::Strict);
    assert_eq!(f.len(), 1);
}

#[test]
fn wildcard_fillers() {
    let s = schema_of(
        r#"<xs:complexType name="A"><xs:sequence><xs:any processContents="lax" maxOccurs="unbounded"/></xs:sequence></xs:complexType>
           <xs:element name="box" type="A"/><xs:element name="k" type="xs:int"/>"#,
    );
    let (r, f) = analyze(
        &s,
        &["<box><k>1</k><unknown><deep/></unknown></box>"],
        Mode::Strict,
    );
    assert!(f.is_empty(), "{f:?}");
    let w = s.lookup_key("wildcard::A/~any").unwrap();
    assert_eq!(r.wildcard_fillers[&w], [el(&s, "k")].into_iter().collect());
    assert_eq!(
        r.occurrence_maxima[&ParticlePathId {
            owner: ty(&s, "A"),
            path: vec![0]
        }],
        2
    );
}

#[test]
fn report_json_keys() {
    let s = derivation_schema();
    let (r, _) = analyze(&s, &["<e><a/></e>"], Mode::Strict);
    let v = r.to_json(&s);
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        [
            "documentCount",
            "elementSubstitutions",
            "instancedTypes",
            "occurrenceMaxima",
            "rootElements",
            "singleChildElements",
            "typeSubstitutions",
            "usedComponents",
            "wildcardFillers"
        ]
    );
    assert_eq!(v["occurrenceMaxima"]["complexType::T#0"], 1);
    assert_eq!(v["rootElements"][0], "element::e");
}
