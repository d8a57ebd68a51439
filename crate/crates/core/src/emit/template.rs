//! A minimal mustache-style template language. See `docs/templates.md` in the
//! repository for the syntax and the render context.

use std::borrow::Cow;

use serde_json::Value as Json;

use super::EmitError;

const MAX_PARTIAL_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    Each,
    If,
    Unless,
    With,
}

impl BlockKind {
    fn keyword(self) -> &'static str {
        match self {
            BlockKind::Each => "each",
            BlockKind::If => "if",
            BlockKind::Unless => "unless",
            BlockKind::With => "with",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Filter {
    Str,
    Upper,
    Lower,
}

#[derive(Debug, Clone)]
enum Node {
    Text(String),
    Var {
        path: String,
        filters: Vec<Filter>,
        line: usize,
    },
    Block {
        kind: BlockKind,
        path: String,
        line: usize,
        body: Vec<Node>,
        otherwise: Vec<Node>,
    },
    Partial {
        name: String,
        indent: String,
        standalone: bool,
        line: usize,
    },
}

/// A parsed template.
#[derive(Debug, Clone)]
pub struct Template {
    name: String,
    nodes: Vec<Node>,
}

enum Token {
    Text(String),
    Tag {
        body: String,
        line: usize,
        indent: String,
        standalone: bool,
    },
}

fn is_standalone_kind(body: &str) -> bool {
    matches!(body.chars().next(), Some('#' | '/' | '!' | '>')) || body == "else"
}

/// Splits source into text and tags, dropping the whitespace and line break
/// around block tags that sit alone on their line.
fn tokenize(name: &str, src: &str) -> Result<Vec<Token>, EmitError> {
    let mut out = Vec::new();
    for (i, line) in src.split_inclusive('\n').enumerate() {
        let lineno = i + 1;
        let mut parts = Vec::new();
        let mut rest = line;
        while let Some(open) = rest.find("{{") {
            let after = &rest[open + 2..];
            let Some(close) = after.find("}}") else {
                return Err(template_error(name, lineno, "unclosed '{{'"));
            };
            parts.push((&rest[..open], after[..close].trim().to_string()));
            rest = &after[close + 2..];
        }
        if let [(lead, body)] = parts.as_slice() {
            if is_standalone_kind(body) && lead.trim().is_empty() && rest.trim().is_empty() {
                out.push(Token::Tag {
                    body: body.clone(),
                    line: lineno,
                    indent: lead.to_string(),
                    standalone: true,
                });
                continue;
            }
        }
        for (text, body) in parts {
            if !text.is_empty() {
                out.push(Token::Text(text.to_string()));
            }
            out.push(Token::Tag {
                body,
                line: lineno,
                indent: String::new(),
                standalone: false,
            });
        }
        if !rest.is_empty() {
            out.push(Token::Text(rest.to_string()));
        }
    }
    Ok(out)
}

fn template_error(name: &str, line: usize, reason: impl Into<String>) -> EmitError {
    EmitError::Template {
        template: name.to_string(),
        line,
        reason: reason.into(),
    }
}

fn valid_path(path: &str) -> bool {
    matches!(path, "this" | "." | "@index" | "@first" | "@last")
        || (!path.is_empty()
            && path.split('.').all(|seg| {
                !seg.is_empty() && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            }))
}

struct Open {
    kind: BlockKind,
    path: String,
    line: usize,
    body: Vec<Node>,
    otherwise: Option<Vec<Node>>,
}

impl Template {
    pub fn parse(name: &str, src: &str) -> Result<Template, EmitError> {
        let mut stack: Vec<Open> = Vec::new();
        let mut top: Vec<Node> = Vec::new();
        fn sink<'a>(stack: &'a mut [Open], top: &'a mut Vec<Node>) -> &'a mut Vec<Node> {
            match stack.last_mut() {
                Some(o) => o.otherwise.as_mut().unwrap_or(&mut o.body),
                None => top,
            }
        }
        for tok in tokenize(name, src)? {
            let (body, line, indent, standalone) = match tok {
                Token::Text(t) => {
                    let dst = sink(&mut stack, &mut top);
                    match dst.last_mut() {
                        Some(Node::Text(prev)) => prev.push_str(&t),
                        _ => dst.push(Node::Text(t)),
                    }
                    continue;
                }
                Token::Tag {
                    body,
                    line,
                    indent,
                    standalone,
                } => (body, line, indent, standalone),
            };
            let err = |reason: String| template_error(name, line, reason);
            if body.starts_with('!') {
                continue;
            }
            if let Some(rest) = body.strip_prefix('#') {
                let (kw, path) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let path = path.trim();
                let kind = match kw {
                    "each" => BlockKind::Each,
                    "if" => BlockKind::If,
                    "unless" => BlockKind::Unless,
                    "with" => BlockKind::With,
                    _ => return Err(err(format!("unknown block '#{kw}'"))),
                };
                if !valid_path(path) {
                    return Err(err(format!("bad path {path:?} in '#{kw}'")));
                }
                stack.push(Open {
                    kind,
                    path: path.to_string(),
                    line,
                    body: Vec::new(),
                    otherwise: None,
                });
            } else if let Some(kw) = body.strip_prefix('/') {
                let Some(open) = stack.pop() else {
                    return Err(err(format!("'/{kw}' without an open block")));
                };
                if open.kind.keyword() != kw.trim() {
                    return Err(err(format!(
                        "'/{}' closes '#{}' opened on line {}",
                        kw.trim(),
                        open.kind.keyword(),
                        open.line
                    )));
                }
                let node = Node::Block {
                    kind: open.kind,
                    path: open.path,
                    line: open.line,
                    body: open.body,
                    otherwise: open.otherwise.unwrap_or_default(),
                };
                sink(&mut stack, &mut top).push(node);
            } else if body == "else" {
                match stack.last_mut() {
                    Some(o) if o.otherwise.is_none() => o.otherwise = Some(Vec::new()),
                    Some(_) => return Err(err("second 'else' in one block".into())),
                    None => return Err(err("'else' outside a block".into())),
                }
            } else if let Some(p) = body.strip_prefix('>') {
                let p = p.trim();
                if p.is_empty() {
                    return Err(err("partial without a name".into()));
                }
                sink(&mut stack, &mut top).push(Node::Partial {
                    name: p.to_string(),
                    indent,
                    standalone,
                    line,
                });
            } else {
                let mut pieces = body.split('|').map(str::trim);
                let path = pieces.next().unwrap_or_default();
                if !valid_path(path) {
                    return Err(err(format!("bad placeholder {path:?}")));
                }
                let filters = pieces
                    .map(|f| match f {
                        "str" => Ok(Filter::Str),
                        "upper" => Ok(Filter::Upper),
                        "lower" => Ok(Filter::Lower),
                        _ => Err(err(format!("unknown filter {f:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                sink(&mut stack, &mut top).push(Node::Var {
                    path: path.to_string(),
                    filters,
                    line,
                });
            }
        }
        if let Some(open) = stack.pop() {
            return Err(template_error(
                name,
                open.line,
                format!("'#{}' is never closed", open.kind.keyword()),
            ));
        }
        Ok(Template {
            name: name.to_string(),
            nodes: top,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Names of the partials this template includes directly.
    pub fn partials(&self) -> Vec<&str> {
        fn walk<'a>(nodes: &'a [Node], out: &mut Vec<&'a str>) {
            for n in nodes {
                match n {
                    Node::Partial { name, .. } => out.push(name),
                    Node::Block {
                        body, otherwise, ..
                    } => {
                        walk(body, out);
                        walk(otherwise, out);
                    }
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.nodes, &mut out);
        out
    }

    /// Renders against a stack of scopes, innermost last. `partial` looks up
    /// included templates by name.
    pub fn render<'t>(
        &self,
        scopes: &[&Json],
        partial: &dyn Fn(&str) -> Option<&'t Template>,
    ) -> Result<String, EmitError> {
        let mut frames: Vec<Frame<'_>> = scopes
            .iter()
            .map(|v| Frame {
                value: *v,
                index: None,
            })
            .collect();
        let mut out = String::new();
        Renderer { partial, depth: 0 }.nodes(self, &self.nodes, &mut frames, &mut out)?;
        Ok(out)
    }
}

struct Frame<'v> {
    value: &'v Json,
    index: Option<(usize, usize)>,
}

struct Renderer<'p, 't> {
    partial: &'p dyn Fn(&str) -> Option<&'t Template>,
    depth: usize,
}

fn lookup<'v>(frames: &[Frame<'v>], path: &str) -> Option<Cow<'v, Json>> {
    let loop_index = || frames.iter().rev().find_map(|f| f.index);
    match path {
        "this" | "." => return frames.last().map(|f| Cow::Borrowed(f.value)),
        "@index" => return loop_index().map(|(i, _)| Cow::Owned(Json::from(i))),
        "@first" => return loop_index().map(|(i, _)| Cow::Owned(Json::Bool(i == 0))),
        "@last" => return loop_index().map(|(i, n)| Cow::Owned(Json::Bool(i + 1 == n))),
        _ => {}
    }
    let mut segs = path.split('.');
    let first = segs.next()?;
    let mut cur: &'v Json = if first == "this" {
        frames.last()?.value
    } else {
        frames.iter().rev().find_map(|f| f.value.get(first))?
    };
    for seg in segs {
        cur = cur.get(seg)?;
    }
    Some(Cow::Borrowed(cur))
}

fn truthy(v: &Json) -> bool {
    match v {
        Json::Null => false,
        Json::Bool(b) => *b,
        Json::Number(n) => n.as_f64().is_some_and(|x| x != 0.0),
        Json::String(s) => !s.is_empty(),
        Json::Array(a) => !a.is_empty(),
        Json::Object(o) => !o.is_empty(),
    }
}

/// A double-quoted literal with backslash escapes, valid in Rust and in most
/// C-family languages for printable text.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{{{:x}}}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl<'t> Renderer<'_, 't> {
    fn nodes<'v>(
        &mut self,
        t: &Template,
        nodes: &[Node],
        frames: &mut Vec<Frame<'v>>,
        out: &mut String,
    ) -> Result<(), EmitError> {
        for node in nodes {
            match node {
                Node::Text(s) => out.push_str(s),
                Node::Var {
                    path,
                    filters,
                    line,
                } => {
                    let v = lookup(frames, path).ok_or_else(|| unresolved(t, *line, path))?;
                    let mut s = match v.as_ref() {
                        Json::String(s) => s.clone(),
                        Json::Number(n) => n.to_string(),
                        Json::Bool(b) => b.to_string(),
                        other => {
                            let what = match other {
                                Json::Null => "null",
                                Json::Array(_) => "a list",
                                _ => "an object",
                            };
                            return Err(template_error(
                                &t.name,
                                *line,
                                format!("{path} is {what}, not text"),
                            ));
                        }
                    };
                    for f in filters {
                        s = match f {
                            Filter::Str => quote(&s),
                            Filter::Upper => s.to_uppercase(),
                            Filter::Lower => s.to_lowercase(),
                        };
                    }
                    out.push_str(&s);
                }
                Node::Block {
                    kind,
                    path,
                    line,
                    body,
                    otherwise,
                } => {
                    let v = lookup(frames, path).ok_or_else(|| unresolved(t, *line, path))?;
                    match kind {
                        BlockKind::With => {
                            if truthy(&v) {
                                let Cow::Borrowed(inner) = v else {
                                    unreachable!("loop variables are scalars")
                                };
                                frames.push(Frame {
                                    value: inner,
                                    index: None,
                                });
                                let r = self.nodes(t, body, frames, out);
                                frames.pop();
                                r?;
                            } else {
                                self.nodes(t, otherwise, frames, out)?;
                            }
                        }
                        BlockKind::If | BlockKind::Unless => {
                            let branch = if truthy(&v) == (*kind == BlockKind::If) {
                                body
                            } else {
                                otherwise
                            };
                            self.nodes(t, branch, frames, out)?;
                        }
                        BlockKind::Each => {
                            let Cow::Borrowed(Json::Array(items)) = v else {
                                return Err(template_error(
                                    &t.name,
                                    *line,
                                    format!("#each over {path}, which is not a list"),
                                ));
                            };
                            if items.is_empty() {
                                self.nodes(t, otherwise, frames, out)?;
                            }
                            for (i, item) in items.iter().enumerate() {
                                frames.push(Frame {
                                    value: item,
                                    index: Some((i, items.len())),
                                });
                                let r = self.nodes(t, body, frames, out);
                                frames.pop();
                                r?;
                            }
                        }
                    }
                }
                Node::Partial {
                    name,
                    indent,
                    standalone,
                    line,
                } => {
                    let p = (self.partial)(name).ok_or_else(|| {
                        template_error(&t.name, *line, format!("unknown partial {name:?}"))
                    })?;
                    if self.depth >= MAX_PARTIAL_DEPTH {
                        return Err(template_error(&t.name, *line, "partials nest too deeply"));
                    }
                    self.depth += 1;
                    let mut buf = String::new();
                    let r = self.nodes(p, &p.nodes, frames, &mut buf);
                    self.depth -= 1;
                    r?;
                    if !standalone && buf.ends_with('\n') {
                        buf.pop();
                    }
                    if indent.is_empty() {
                        out.push_str(&buf);
                    } else {
                        for l in buf.split_inclusive('\n') {
                            if l.trim().is_empty() {
                                out.push_str(l.trim_start_matches([' ', '\t']));
                            } else {
                                out.push_str(indent);
                                out.push_str(l);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn unresolved(t: &Template, line: usize, path: &str) -> EmitError {
    EmitError::Unresolved {
        template: t.name.clone(),
        line,
        placeholder: path.to_string(),
    }
}
