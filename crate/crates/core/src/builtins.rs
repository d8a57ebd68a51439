//! The predefined XML Schema types, plus the `xml:` namespace attributes that
//! schemas routinely reference.

use serde::{Deserialize, Serialize};
use xsdbind_runtime::XML_NS;

use crate::model::*;

/// Value category a simple type converts to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimpleCategory {
    String,
    Integer,
    Decimal,
    Boolean,
    Double,
    RawLexical,
}

/// (local name, base local name, variety, list item local name)
const SIMPLE_TYPES: &[(&str, &str, SimpleVariety, Option<&str>)] = &[
    ("anySimpleType", "anyType", SimpleVariety::Atomic, None),
    ("string", "anySimpleType", SimpleVariety::Atomic, None),
    ("boolean", "anySimpleType", SimpleVariety::Atomic, None),
    ("decimal", "anySimpleType", SimpleVariety::Atomic, None),
    ("float", "anySimpleType", SimpleVariety::Atomic, None),
    ("double", "anySimpleType", SimpleVariety::Atomic, None),
    ("duration", "anySimpleType", SimpleVariety::Atomic, None),
    ("dateTime", "anySimpleType", SimpleVariety::Atomic, None),
    ("time", "anySimpleType", SimpleVariety::Atomic, None),
    ("date", "anySimpleType", SimpleVariety::Atomic, None),
    ("gYearMonth", "anySimpleType", SimpleVariety::Atomic, None),
    ("gYear", "anySimpleType", SimpleVariety::Atomic, None),
    ("gMonthDay", "anySimpleType", SimpleVariety::Atomic, None),
    ("gDay", "anySimpleType", SimpleVariety::Atomic, None),
    ("gMonth", "anySimpleType", SimpleVariety::Atomic, None),
    ("hexBinary", "anySimpleType", SimpleVariety::Atomic, None),
    ("base64Binary", "anySimpleType", SimpleVariety::Atomic, None),
    ("anyURI", "anySimpleType", SimpleVariety::Atomic, None),
    ("QName", "anySimpleType", SimpleVariety::Atomic, None),
    ("NOTATION", "anySimpleType", SimpleVariety::Atomic, None),
    ("normalizedString", "string", SimpleVariety::Atomic, None),
    ("token", "normalizedString", SimpleVariety::Atomic, None),
    ("language", "token", SimpleVariety::Atomic, None),
    ("NMTOKEN", "token", SimpleVariety::Atomic, None),
    (
        "NMTOKENS",
        "anySimpleType",
        SimpleVariety::List,
        Some("NMTOKEN"),
    ),
    ("Name", "token", SimpleVariety::Atomic, None),
    ("NCName", "Name", SimpleVariety::Atomic, None),
    ("ID", "NCName", SimpleVariety::Atomic, None),
    ("IDREF", "NCName", SimpleVariety::Atomic, None),
    (
        "IDREFS",
        "anySimpleType",
        SimpleVariety::List,
        Some("IDREF"),
    ),
    ("ENTITY", "NCName", SimpleVariety::Atomic, None),
    (
        "ENTITIES",
        "anySimpleType",
        SimpleVariety::List,
        Some("ENTITY"),
    ),
    ("integer", "decimal", SimpleVariety::Atomic, None),
    ("nonPositiveInteger", "integer", SimpleVariety::Atomic, None),
    (
        "negativeInteger",
        "nonPositiveInteger",
        SimpleVariety::Atomic,
        None,
    ),
    ("long", "integer", SimpleVariety::Atomic, None),
    ("int", "long", SimpleVariety::Atomic, None),
    ("short", "int", SimpleVariety::Atomic, None),
    ("byte", "short", SimpleVariety::Atomic, None),
    ("nonNegativeInteger", "integer", SimpleVariety::Atomic, None),
    (
        "unsignedLong",
        "nonNegativeInteger",
        SimpleVariety::Atomic,
        None,
    ),
    ("unsignedInt", "unsignedLong", SimpleVariety::Atomic, None),
    ("unsignedShort", "unsignedInt", SimpleVariety::Atomic, None),
    ("unsignedByte", "unsignedShort", SimpleVariety::Atomic, None),
    (
        "positiveInteger",
        "nonNegativeInteger",
        SimpleVariety::Atomic,
        None,
    ),
];

const XML_ATTRIBUTES: &[(&str, &str)] = &[
    ("lang", "language"),
    ("space", "NCName"),
    ("base", "anyURI"),
    ("id", "ID"),
];

/// Whether `local` names a built-in type in the XML Schema namespace.
pub fn is_builtin_type(local: &str) -> bool {
    local == "anyType" || SIMPLE_TYPES.iter().any(|t| t.0 == local)
}

/// Value category of a built-in simple type by local name.
pub fn category_of(local: &str) -> SimpleCategory {
    match local {
        "integer" | "nonPositiveInteger" | "negativeInteger" | "long" | "int" | "short"
        | "byte" | "nonNegativeInteger" | "unsignedLong" | "unsignedInt" | "unsignedShort"
        | "unsignedByte" | "positiveInteger" => SimpleCategory::Integer,
        "decimal" => SimpleCategory::Decimal,
        "boolean" => SimpleCategory::Boolean,
        "float" | "double" => SimpleCategory::Double,
        "string" | "normalizedString" | "token" | "language" | "NMTOKEN" | "Name" | "NCName"
        | "ID" | "IDREF" | "ENTITY" => SimpleCategory::String,
        _ => SimpleCategory::RawLexical,
    }
}

/// Builds the built-in components with ids `first..`. References between
/// them are already resolved.
pub(crate) fn components(first: u32) -> Vec<Component> {
    let id_of = |local: &str| -> ComponentId {
        if local == "anyType" {
            return ComponentId(first);
        }
        let pos = SIMPLE_TYPES
            .iter()
            .position(|t| t.0 == local)
            .expect("known builtin");
        ComponentId(first + 1 + pos as u32)
    };
    let any_type = ComponentId(first);
    let any_wildcard = ComponentId(first + 1 + SIMPLE_TYPES.len() as u32);
    let any_attribute = ComponentId(any_wildcard.0 + 1);

    let mut out = Vec::new();
    out.push(Component {
        id: any_type,
        kind: ComponentKind::ComplexType,
        name: Some(QName::new(XSD_NS, "anyType")),
        key: format!("complexType:{XSD_NS}:anyType"),
        namespace: XSD_NS.into(),
        owner: None,
        builtin: true,
        detail: ComponentDetail::Complex(ComplexTypeDetail {
            base: None,
            derivation: Derivation::None,
            content: ContentModel::Elements(Particle {
                occurs: OccurrenceRange::ONCE,
                term: Term::Group {
                    compositor: Compositor::Sequence,
                    children: vec![Particle {
                        occurs: OccurrenceRange { min: 0, max: None },
                        term: Term::Wildcard(any_wildcard),
                        path: ParticlePathId {
                            owner: any_type,
                            path: vec![0],
                        },
                    }],
                },
                path: ParticlePathId {
                    owner: any_type,
                    path: vec![],
                },
            }),
            attributes: vec![],
            attribute_groups: vec![],
            attribute_wildcard: Some(any_attribute),
            prohibited: vec![],
            is_abstract: false,
            mixed: true,
        }),
    });
    for &(local, base, variety, item) in SIMPLE_TYPES {
        // anySimpleType's base is anyType, which is complex; keep the chain
        // within simple types so derives_from stays meaningful.
        let base = (local != "anySimpleType").then(|| id_of(base));
        out.push(Component {
            id: id_of(local),
            kind: ComponentKind::SimpleType,
            name: Some(QName::new(XSD_NS, local)),
            key: format!("simpleType:{XSD_NS}:{local}"),
            namespace: XSD_NS.into(),
            owner: None,
            builtin: true,
            detail: ComponentDetail::Simple(SimpleTypeDetail {
                variety,
                base,
                item_type: item.map(id_of),
                member_types: vec![],
                facets: vec![],
            }),
        });
    }
    for (id, suffix) in [(any_wildcard, "~any"), (any_attribute, "~anyAttribute")] {
        out.push(Component {
            id,
            kind: ComponentKind::Wildcard,
            name: None,
            key: format!("wildcard:{XSD_NS}:anyType/{suffix}"),
            namespace: XSD_NS.into(),
            owner: Some(any_type),
            builtin: true,
            detail: ComponentDetail::Wildcard(WildcardDetail {
                namespaces: NamespaceConstraint::Any,
                process: ProcessContents::Lax,
            }),
        });
    }
    let mut next = any_attribute.0 + 1;
    for &(local, ty) in XML_ATTRIBUTES {
        out.push(Component {
            id: ComponentId(next),
            kind: ComponentKind::AttributeDecl,
            name: Some(QName::new(XML_NS, local)),
            key: format!("attribute:{XML_NS}:{local}"),
            namespace: XML_NS.into(),
            owner: None,
            builtin: true,
            detail: ComponentDetail::Attribute(AttributeDetail {
                name: QName::new(XML_NS, local),
                type_ref: id_of(ty),
            }),
        });
        next += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_match_positions() {
        for (i, c) in components(0).iter().enumerate() {
            assert_eq!(c.id.index(), i, "{}", c.key);
        }
    }

    #[test]
    fn categories() {
        assert_eq!(category_of("unsignedByte"), SimpleCategory::Integer);
        assert_eq!(category_of("float"), SimpleCategory::Double);
        assert_eq!(category_of("dateTime"), SimpleCategory::RawLexical);
        assert!(is_builtin_type("anyType"));
        assert!(!is_builtin_type("notAType"));
    }
}
