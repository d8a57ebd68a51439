use super::*;

const XS: &str = r#"xmlns:xs="http://www.w3.org/2001/XMLSchema""#;

fn schema(tns: &str, body: &str) -> String {
    if tns.is_empty() {
        format!(r#"<xs:schema {XS}>{body}</xs:schema>"#)
    } else {
        format!(
            r#"<xs:schema {XS} xmlns:t="{tns}" targetNamespace="{tns}" elementFormDefault="qualified">{body}</xs:schema>"#
        )
    }
}

fn load(docs: &[(&str, String)]) -> Result<SchemaSet> {
    let mut r = MemoryResolver::new();
    for (id, text) in docs {
        r.add(*id, text.clone());
    }
    load_schema_set(&[r.source(docs[0].0).unwrap()], &r)
}

fn user_counts(s: &SchemaSet) -> (usize, usize) {
    let elements = s
        .user_globals()
        .filter(|c| c.kind == ComponentKind::ElementDecl)
        .count();
    let complex = s
        .user_globals()
        .filter(|c| c.kind == ComponentKind::ComplexType)
        .count();
    (elements, complex)
}

#[test]
fn single_string_element() {
    let s = load(&[(
        "a.xsd",
        schema("", r#"<xs:element name="e" type="xs:string"/>"#),
    )])
    .unwrap();
    assert_eq!(user_counts(&s), (1, 0));
    let e = s.global_element(&QName::local("e")).unwrap();
    let string = s
        .lookup(Category::Type, &QName::new(XSD_NS, "string"))
        .unwrap();
    assert_eq!(s.element_detail(e).unwrap().declared_type, string);
}

#[test]
fn include_resolves_type() {
    let a = schema(
        "urn:x",
        r#"<xs:include schemaLocation="b.xsd"/><xs:element name="e" type="t:T"/>"#,
    );
    let b = schema("urn:x", r#"<xs:complexType name="T"/>"#);
    let s = load(&[("a.xsd", a), ("b.xsd", b)]).unwrap();
    let e = s.global_element(&QName::new("urn:x", "e")).unwrap();
    let t = s.lookup(Category::Type, &QName::new("urn:x", "T")).unwrap();
    assert!(s
        .out_edges(e)
        .iter()
        .any(|edge| edge.to == t && edge.label == EdgeLabel::DeclaredType));
}

#[test]
fn dangling_type() {
    let err = load(&[("a.xsd", schema("", r#"<xs:element name="e" type="U"/>"#))]).unwrap_err();
    match err {
        LoadError::DanglingReference { name, referrer } => {
            assert_eq!(name, QName::local("U"));
            assert_eq!(referrer, "element::e");
        }
        other => panic!("{other}"),
    }
}

#[test]
fn builtin_lookup() {
    let s = load(&[("a.xsd", schema("", ""))]).unwrap();
    assert!(s
        .lookup(Category::Type, &QName::new(XSD_NS, "string"))
        .is_some());
    assert!(s
        .lookup(Category::Type, &QName::new(XSD_NS, "dateTime"))
        .is_some());
    assert!(s
        .lookup(Category::Type, &QName::new(XSD_NS, "bogus"))
        .is_none());
    assert!(s.builtin_types().contains(&s.any_type()));
    assert_eq!(s.user_globals().count(), 0);
}

#[test]
fn any_type_is_implicit_base() {
    let s = load(&[("a.xsd", schema("", r#"<xs:complexType name="T"/>"#))]).unwrap();
    let t = s.lookup(Category::Type, &QName::local("T")).unwrap();
    assert_eq!(s.base_of(t), Some(s.any_type()));
    assert!(s.derives_from(t, s.any_type()));
}

#[test]
fn unresolved_import_named() {
    let a = schema(
        "urn:a",
        r#"<xs:import namespace="urn:b" schemaLocation="missing.xsd"/>"#,
    );
    match load(&[("a.xsd", a)]).unwrap_err() {
        LoadError::UnresolvedImport { system_id, .. } => assert_eq!(system_id, "missing.xsd"),
        other => panic!("{other}"),
    }
}

#[test]
fn cyclic_base_rejected() {
    let body = r#"
      <xs:complexType name="A"><xs:complexContent><xs:extension base="B"/></xs:complexContent></xs:complexType>
      <xs:complexType name="B"><xs:complexContent><xs:extension base="A"/></xs:complexContent></xs:complexType>"#;
    assert!(matches!(
        load(&[("a.xsd", schema("", body))]),
        Err(LoadError::CyclicDerivation(_))
    ));
}

#[test]
fn cyclic_substitution_and_groups_rejected() {
    let subst = r#"<xs:element name="a" substitutionGroup="b"/><xs:element name="b" substitutionGroup="a"/>"#;
    assert!(matches!(
        load(&[("a.xsd", schema("", subst))]),
        Err(LoadError::CyclicDerivation(_))
    ));
    let groups = r#"<xs:group name="g"><xs:sequence><xs:group ref="h"/></xs:sequence></xs:group>
                    <xs:group name="h"><xs:sequence><xs:group ref="g"/></xs:sequence></xs:group>"#;
    assert!(matches!(
        load(&[("a.xsd", schema("", groups))]),
        Err(LoadError::CyclicDerivation(_))
    ));
}

#[test]
fn malformed_reports_location() {
    match load(&[("a.xsd", "<xs:schema".to_string())]).unwrap_err() {
        LoadError::Malformed { system_id, .. } => assert_eq!(system_id, "a.xsd"),
        other => panic!("{other}"),
    }
    let bad_occurs = schema(
        "",
        r#"<xs:complexType name="T"><xs:sequence><xs:element name="a" minOccurs="2" maxOccurs="1"/></xs:sequence></xs:complexType>"#,
    );
    assert!(matches!(
        load(&[("a.xsd", bad_occurs)]),
        Err(LoadError::Malformed { .. })
    ));
}

#[test]
fn chameleon_include_adopts_namespace() {
    let a = schema(
        "urn:c",
        r#"<xs:include schemaLocation="b.xsd"/><xs:element name="e" type="t:T"/>"#,
    );
    let b = schema(
        "",
        r#"<xs:complexType name="T"><xs:sequence><xs:element name="x" type="U"/></xs:sequence></xs:complexType><xs:simpleType name="U"><xs:restriction base="xs:string"/></xs:simpleType>"#,
    );
    let s = load(&[("a.xsd", a), ("b.xsd", b)]).unwrap();
    assert!(s
        .lookup(Category::Type, &QName::new("urn:c", "T"))
        .is_some());
    assert!(s
        .lookup(Category::Type, &QName::new("urn:c", "U"))
        .is_some());
}

#[test]
fn loading_is_order_independent() {
    let a = schema(
        "urn:a",
        r#"<xs:import namespace="urn:b" schemaLocation="b.xsd"/><xs:element name="a" xmlns:b="urn:b" type="b:B"/>"#,
    );
    let b = schema(
        "urn:b",
        r#"<xs:complexType name="B"><xs:sequence><xs:element name="x" type="xs:int"/></xs:sequence></xs:complexType><xs:element name="top" type="t:B"/>"#,
    );
    let mut r = MemoryResolver::new();
    r.add("a.xsd", a).add("b.xsd", b);
    let one = load_schema_set(
        &[r.source("a.xsd").unwrap(), r.source("b.xsd").unwrap()],
        &r,
    )
    .unwrap();
    let two = load_schema_set(
        &[r.source("b.xsd").unwrap(), r.source("a.xsd").unwrap()],
        &r,
    )
    .unwrap();
    assert_eq!(one.components(), two.components());
    assert_eq!(one.edges(), two.edges());
}

#[test]
fn member_without_type_takes_head_type() {
    let body = r#"<xs:complexType name="H"/><xs:element name="h" type="H"/>
                  <xs:element name="m" substitutionGroup="h"/><xs:element name="n" substitutionGroup="m"/>"#;
    let s = load(&[("a.xsd", schema("", body))]).unwrap();
    let h_ty = s.lookup(Category::Type, &QName::local("H")).unwrap();
    for n in ["m", "n"] {
        let e = s.global_element(&QName::local(n)).unwrap();
        assert_eq!(s.element_detail(e).unwrap().declared_type, h_ty, "{n}");
    }
    let h = s.global_element(&QName::local("h")).unwrap();
    let names: BTreeSet<String> = s
        .substitution_members(h)
        .unwrap()
        .into_iter()
        .map(|id| s.component(id).display_name())
        .collect();
    assert_eq!(
        names,
        ["m".to_string(), "n".to_string()].into_iter().collect()
    );
}

#[test]
fn anonymous_keys_follow_owner_names() {
    let body = r###"<xs:element name="e"><xs:complexType><xs:sequence>
        <xs:element name="a" type="xs:string"/><xs:any namespace="##other"/>
        <xs:choice><xs:element name="a" type="xs:int"/></xs:choice>
      </xs:sequence><xs:attribute name="id" type="xs:ID"/><xs:anyAttribute/></xs:complexType></xs:element>"###;
    let s = load(&[("a.xsd", schema("urn:k", body))]).unwrap();
    for key in [
        "complexType:urn:k:e/~type",
        "element:urn:k:e/~type/a",
        "element:urn:k:e/~type/a[2]",
        "wildcard:urn:k:e/~type/~any",
        "attribute:urn:k:e/~type/@id",
        "wildcard:urn:k:e/~type/~anyAttribute",
    ] {
        assert!(s.lookup_key(key).is_some(), "{key}");
    }
    let local = s.lookup_key("element:urn:k:e/~type/a").unwrap();
    assert_eq!(
        s.element_detail(local).unwrap().name,
        QName::new("urn:k", "a")
    );
    let attr = s.lookup_key("attribute:urn:k:e/~type/@id").unwrap();
    assert_eq!(s.attribute_name(attr), QName::local("id"));
}

#[test]
fn unsupported_constructs_warn() {
    let body = r#"<xs:element name="e" type="xs:string"><xs:key name="k"><xs:selector xpath="."/><xs:field xpath="@a"/></xs:key></xs:element>"#;
    let s = load(&[("a.xsd", schema("", body))]).unwrap();
    assert_eq!(s.warnings().len(), 1);
    assert!(s.warnings()[0].contains("identity constraint"));
}

#[test]
fn extension_attributes_and_particles_accumulate() {
    let body = r#"
      <xs:complexType name="B"><xs:sequence><xs:element name="b" type="xs:string"/></xs:sequence>
        <xs:attribute name="x" type="xs:string"/><xs:attribute name="y" type="xs:string"/></xs:complexType>
      <xs:complexType name="D"><xs:complexContent><xs:extension base="B">
        <xs:sequence><xs:element name="d" type="xs:int"/></xs:sequence>
        <xs:attribute name="z" type="xs:int" use="required"/></xs:extension></xs:complexContent></xs:complexType>
      <xs:complexType name="R"><xs:complexContent><xs:restriction base="B">
        <xs:sequence><xs:element name="b" type="xs:string"/></xs:sequence>
        <xs:attribute name="y" use="prohibited"/></xs:restriction></xs:complexContent></xs:complexType>"#;
    let s = load(&[("a.xsd", schema("", body))]).unwrap();
    let d = s.lookup(Category::Type, &QName::local("D")).unwrap();
    let b = s.lookup(Category::Type, &QName::local("B")).unwrap();
    let r = s.lookup(Category::Type, &QName::local("R")).unwrap();
    assert_eq!(s.extension_chain(d), vec![b, d]);
    assert_eq!(s.effective_particles(d).len(), 2);
    let names = |t| -> Vec<String> {
        s.effective_attribute_uses(t)
            .into_iter()
            .map(|u| s.attribute_name(u.attribute).local)
            .collect()
    };
    assert_eq!(names(d), ["x", "y", "z"]);
    assert_eq!(names(r), ["x"]);
    assert_eq!(s.extension_chain(r), vec![r]);
    assert_eq!(s.derived_types(b), [d, r].into_iter().collect());
}
