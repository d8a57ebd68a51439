use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use xsdbind_runtime::{is_ncname, QName};

/// A chain of element names whose last step is to be skipped while parsing.
///
/// Written as steps separated by `/`. A step is `{uri}local`, `{}local` for
/// no namespace, or a bare `local` that matches the local name in any
/// namespace. A leading `/` anchors the first step at the document root;
/// otherwise the chain may start anywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IgnorePath {
    pub absolute: bool,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    /// `None` matches any namespace.
    pub namespace: Option<String>,
    pub local: String,
}

impl Step {
    pub fn matches(&self, name: &QName) -> bool {
        name.local == self.local
            && self
                .namespace
                .as_ref()
                .is_none_or(|ns| *ns == name.namespace)
    }
}

impl FromStr for IgnorePath {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let (absolute, rest) = match text.strip_prefix('/') {
            Some(r) => (true, r),
            None => (false, text),
        };
        let mut steps = Vec::new();
        let mut start = 0;
        let mut in_braces = false;
        let mut raw = Vec::new();
        for (i, c) in rest.char_indices() {
            match c {
                '{' if !in_braces => in_braces = true,
                '}' if in_braces => in_braces = false,
                '/' if !in_braces => {
                    raw.push(&rest[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if in_braces {
            return Err(format!("unclosed '{{' in {text:?}"));
        }
        raw.push(&rest[start..]);
        for r in raw {
            let step = match r.strip_prefix('{') {
                Some(body) => {
                    let end = body.find('}').expect("braces balanced");
                    Step {
                        namespace: Some(body[..end].to_string()),
                        local: body[end + 1..].to_string(),
                    }
                }
                None => Step {
                    namespace: None,
                    local: r.to_string(),
                },
            };
            if !is_ncname(&step.local) {
                return Err(format!("bad step {r:?} in {text:?}"));
            }
            steps.push(step);
        }
        Ok(IgnorePath { absolute, steps })
    }
}

impl fmt::Display for IgnorePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.absolute {
            f.write_str("/")?;
        }
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            if let Some(ns) = &s.namespace {
                write!(f, "{{{ns}}}")?;
            }
            f.write_str(&s.local)?;
        }
        Ok(())
    }
}

impl Serialize for IgnorePath {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IgnorePath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
