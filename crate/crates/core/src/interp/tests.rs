use xsdbind_runtime::{Mode, ParseError, Value, ViolationCode};

use super::*;
use crate::analyzer::tests::schema_of;
use crate::analyzer::{analyze_corpus, Document};

pub(crate) fn model_for(body: &str, docs: &[&str], opts: BindingOptions) -> BindingModel {
    let s = schema_of(body);
    let docs: Vec<Document> = docs
        .iter()
        .map(|d| Document::new("d.xml", d.as_bytes()))
        .collect();
    let (u, failures) = analyze_corpus(&s, &docs, Mode::Strict);
    assert!(failures.is_empty(), "{failures:?}");
    crate::pipeline::bind(&s, &u, &opts, "model").unwrap()
}

fn obj(class: &str, fields: Vec<(&str, Value)>) -> Value {
    Value::Object {
        class: class.to_string(),
        fields: fields
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect(),
    }
}

fn root(tag: &str, v: Value) -> Value {
    Value::Choice {
        tag: tag.to_string(),
        value: Box::new(v),
    }
}

fn s(v: &str) -> Value {
    Value::Str(v.to_string())
}

pub(crate) const ORDER: &str = r#"
    <xs:element name="order"><xs:complexType><xs:sequence>
      <xs:element name="id" type="xs:int"/>
      <xs:element name="note" type="xs:string" minOccurs="0" maxOccurs="unbounded"/>
      <xs:element name="flag" type="xs:boolean" minOccurs="0"/>
      <xs:element name="price" type="xs:decimal" minOccurs="0"/>
      <xs:element name="ratio" type="xs:double" minOccurs="0"/>
    </xs:sequence><xs:attribute name="v" type="xs:string" use="required"/></xs:complexType></xs:element>"#;

pub(crate) const ORDER_DOCS: &[&str] = &[
    r#"<order v="1"><id>7</id><note>a</note><note>b</note><flag>1</flag><price> 2.50 </price><ratio>1e3</ratio></order>"#,
];

#[test]
fn binds_simple_values() {
    let m = model_for(ORDER, ORDER_DOCS, BindingOptions::default());
    let (v, w) = interpret(&m, ORDER_DOCS[0], Mode::Strict).unwrap();
    assert!(w.is_empty());
    assert_eq!(
        v,
        root(
            "order",
            obj(
                "Order",
                vec![
                    ("v", s("1")),
                    ("id", Value::Int(7)),
                    ("note", Value::List(vec![s("a"), s("b")])),
                    ("flag", Value::Bool(true)),
                    ("price", Value::Decimal("2.50".into())),
                    ("ratio", Value::Double(1000.0)),
                ]
            )
        )
    );
}

#[test]
fn strict_violations_are_typed() {
    let m = model_for(ORDER, ORDER_DOCS, BindingOptions::default());
    let cases: &[(&str, ViolationCode)] = &[
        (
            r#"<order v="1"><id>7</id><extra/></order>"#,
            ViolationCode::UnknownElement,
        ),
        (
            r#"<order><id>7</id></order>"#,
            ViolationCode::MissingRequired,
        ),
        (r#"<order v="1"></order>"#, ViolationCode::MissingRequired),
        (
            r#"<order v="1"><id>x7</id></order>"#,
            ViolationCode::BadSimpleValue,
        ),
        (
            r#"<order v="1">junk<id>7</id></order>"#,
            ViolationCode::UnexpectedText,
        ),
    ];
    for (doc, code) in cases {
        let err = interpret(&m, doc, Mode::Strict).unwrap_err();
        assert_eq!(err.code(), Some(*code), "{doc}: {err}");
    }
}

#[test]
fn lenient_counts_each_violation() {
    let m = model_for(ORDER, ORDER_DOCS, BindingOptions::default());
    let doc = r#"<order><id>x7</id><extra><deep/></extra>junk<flag>maybe</flag></order>"#;
    let (v, w) = interpret(&m, doc, Mode::Lenient).unwrap();
    let codes: Vec<ViolationCode> = w.iter().map(|w| w.code).collect();
    assert_eq!(
        codes,
        [
            ViolationCode::MissingRequired,
            ViolationCode::BadSimpleValue,
            ViolationCode::UnknownElement,
            ViolationCode::UnexpectedText,
            ViolationCode::BadSimpleValue,
        ]
    );
    assert_eq!(w[1].raw.as_deref(), Some("x7"));
    assert_eq!(v, root("order", obj("Order", vec![])));
}

#[test]
fn second_occurrence_of_scalar_is_unknown() {
    let m = model_for(ORDER, ORDER_DOCS, BindingOptions::default());
    let err = interpret(
        &m,
        r#"<order v="1"><id>1</id><id>2</id></order>"#,
        Mode::Strict,
    )
    .unwrap_err();
    assert!(matches!(err, ParseError::UnknownElement { ref name, .. } if name.local == "id"));
}

#[test]
fn unknown_root() {
    let m = model_for(ORDER, ORDER_DOCS, BindingOptions::default());
    assert!(matches!(
        interpret(&m, "<other/>", Mode::Lenient),
        Err(ParseError::UnknownRoot { .. })
    ));
}

#[test]
fn collapsed_wrappers_bind_inner_value() {
    let body = r#"
        <xs:element name="doc"><xs:complexType><xs:sequence>
          <xs:element name="meta"><xs:complexType><xs:sequence>
            <xs:element name="n" type="xs:int"/>
          </xs:sequence></xs:complexType></xs:element>
        </xs:sequence></xs:complexType></xs:element>"#;
    let doc = "<doc><meta><n>5</n></meta></doc>";
    let m = model_for(body, &[doc], BindingOptions::default());
    assert_eq!(m.collapsed_elements.len(), 1);
    let (v, _) = interpret(&m, doc, Mode::Strict).unwrap();
    assert_eq!(v, root("doc", obj("Doc", vec![("meta", Value::Int(5))])));

    let plain = model_for(
        body,
        &[doc],
        BindingOptions {
            collapse_single_child: false,
            ..Default::default()
        },
    );
    let (v, _) = interpret(&plain, doc, Mode::Strict).unwrap();
    assert_eq!(
        v,
        root(
            "doc",
            obj(
                "Doc",
                vec![("meta", obj("Meta", vec![("n", Value::Int(5))]))]
            )
        )
    );
}

#[test]
fn dispatch_and_nil() {
    let body = r#"
        <xs:complexType name="B"><xs:sequence><xs:element name="b" type="xs:string"/></xs:sequence></xs:complexType>
        <xs:complexType name="D"><xs:complexContent><xs:extension base="B">
          <xs:sequence><xs:element name="d" type="xs:int"/></xs:sequence>
        </xs:extension></xs:complexContent></xs:complexType>
        <xs:element name="r"><xs:complexType><xs:sequence>
          <xs:element name="x" type="B" nillable="true" maxOccurs="unbounded"/>
        </xs:sequence></xs:complexType></xs:element>"#;
    let doc = r#"<r xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"><x><b>1</b></x><x xsi:type="D"><b>2</b><d>3</d></x><x xsi:nil="true"/></r>"#;
    for flatten in [true, false] {
        let m = model_for(
            body,
            &[doc],
            BindingOptions {
                flatten_inheritance: flatten,
                ..Default::default()
            },
        );
        let (v, _) = interpret(&m, doc, Mode::Strict).unwrap();
        let ch = |tag: &str, v: Value| Value::Choice {
            tag: tag.into(),
            value: Box::new(v),
        };
        assert_eq!(
            v,
            root(
                "r",
                obj(
                    "R",
                    vec![(
                        "x",
                        Value::List(vec![
                            ch("x", obj("B", vec![("b", s("1"))])),
                            ch("x@D", obj("D", vec![("b", s("2")), ("d", Value::Int(3))])),
                            ch("x", Value::Nil),
                        ])
                    )]
                )
            ),
            "flatten={flatten}"
        );
    }
}

#[test]
fn ignored_subtrees_are_skipped() {
    let body = r#"
        <xs:element name="doc"><xs:complexType><xs:sequence>
          <xs:element name="big" minOccurs="0"><xs:complexType><xs:sequence>
            <xs:element name="n" type="xs:int" maxOccurs="unbounded"/>
          </xs:sequence></xs:complexType></xs:element>
          <xs:element name="keep" type="xs:string"/>
        </xs:sequence></xs:complexType></xs:element>"#;
    let doc = "<doc><big><n>1</n><n>2</n></big><keep>k</keep></doc>";
    let opts = BindingOptions {
        ignore_paths: vec!["doc/big".parse().unwrap()],
        ..Default::default()
    };
    let m = model_for(body, &[doc], opts);
    let (v, w) = interpret(&m, doc, Mode::Strict).unwrap();
    assert!(w.is_empty());
    assert_eq!(v, root("doc", obj("Doc", vec![("keep", s("k"))])));
    assert_eq!(v.object_count(), 1);
}

#[test]
fn mixed_and_simple_content_text() {
    let body = r#"
        <xs:complexType name="P"><xs:simpleContent><xs:extension base="xs:int">
          <xs:attribute name="u" type="xs:string"/></xs:extension></xs:simpleContent></xs:complexType>
        <xs:element name="m"><xs:complexType mixed="true"><xs:sequence>
          <xs:element name="p" type="P" minOccurs="0" maxOccurs="unbounded"/>
        </xs:sequence></xs:complexType></xs:element>"#;
    let doc = r#"<m>a<p u="x">1</p>b<p>2</p></m>"#;
    let m = model_for(body, &[doc], BindingOptions::default());
    let (v, _) = interpret(&m, doc, Mode::Strict).unwrap();
    assert_eq!(
        v,
        root(
            "m",
            obj(
                "M",
                vec![
                    ("text", s("ab")),
                    (
                        "p",
                        Value::List(vec![
                            obj("P", vec![("value", Value::Int(1)), ("u", s("x"))]),
                            obj("P", vec![("value", Value::Int(2))])
                        ])
                    )
                ]
            )
        )
    );
    let (_, w) = interpret(&m, "<m><p>zz</p></m>", Mode::Lenient).unwrap();
    assert_eq!(w.len(), 1);
    assert!(w[0].message.contains("p"), "{}", w[0].message);
}

#[test]
fn lax_wildcard_content_is_skipped_silently() {
    let body = r#"
        <xs:element name="ext" type="xs:int"/>
        <xs:element name="bag"><xs:complexType><xs:sequence>
          <xs:any processContents="lax" maxOccurs="unbounded"/>
        </xs:sequence></xs:complexType></xs:element>"#;
    let doc = "<bag><ext>1</ext><other><x/></other><ext>2</ext></bag>";
    let m = model_for(body, &[doc], BindingOptions::default());
    let (v, w) = interpret(&m, doc, Mode::Strict).unwrap();
    assert!(w.is_empty());
    let ext = |n| Value::Choice {
        tag: "ext".into(),
        value: Box::new(Value::Int(n)),
    };
    assert_eq!(
        v,
        root(
            "bag",
            obj("Bag", vec![("any", Value::List(vec![ext(1), ext(2)]))])
        )
    );
}

#[test]
fn conversions() {
    use SimpleCategory::*;
    assert_eq!(convert(Integer, " +12 "), Some(Value::Int(12)));
    assert_eq!(convert(Integer, "1 2"), None);
    assert_eq!(convert(Integer, ""), None);
    assert_eq!(convert(Decimal, "-.5"), Some(Value::Decimal("-.5".into())));
    assert_eq!(convert(Decimal, "."), None);
    assert_eq!(convert(Decimal, "1e2"), None);
    assert_eq!(
        convert(Double, "-INF"),
        Some(Value::Double(f64::NEG_INFINITY))
    );
    assert_eq!(convert(Double, "2.5E-1"), Some(Value::Double(0.25)));
    assert_eq!(convert(Double, "inf"), None);
    assert_eq!(convert(Boolean, "0"), Some(Value::Bool(false)));
    assert_eq!(convert(Boolean, "yes"), None);
    assert_eq!(convert(RawLexical, " x "), Some(s(" x ")));
}
