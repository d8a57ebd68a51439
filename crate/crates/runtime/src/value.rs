/// Generic bound-object tree. Generated parsers and the model-walking
/// interpreter both render their results into this shape so the two can be
/// compared with `==`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Str(String),
    Int(i64),
    /// Validated decimal lexical form, whitespace-trimmed.
    Decimal(String),
    Bool(bool),
    Double(f64),
    /// An element carrying `xsi:nil="true"` in a nillable slot.
    Nil,
    List(Vec<Value>),
    /// Present fields only, in declaration order (inherited fields first).
    Object {
        class: String,
        fields: Vec<(String, Value)>,
    },
    /// One alternative of a dispatch table or root set.
    Choice {
        tag: String,
        value: Box<Value>,
    },
}

impl Value {
    pub fn object(class: &str) -> Self {
        Value::Object {
            class: class.to_string(),
            fields: Vec::new(),
        }
    }

    /// Appends a field to an object value; no-op for other variants.
    pub fn push_field(&mut self, name: &str, value: Value) {
        if let Value::Object { fields, .. } = self {
            fields.push((name.to_string(), value));
        }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Object { fields, .. } => fields.iter().find(|(n, _)| n == name).map(|(_, v)| v),
            _ => None,
        }
    }

    /// Number of objects in the tree, including this one.
    pub fn object_count(&self) -> usize {
        match self {
            Value::Object { fields, .. } => {
                1 + fields.iter().map(|(_, v)| v.object_count()).sum::<usize>()
            }
            Value::List(items) => items.iter().map(Value::object_count).sum(),
            Value::Choice { value, .. } => value.object_count(),
            _ => 0,
        }
    }
}
