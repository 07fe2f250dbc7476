//! The line-oriented problem format.
//!
//! ```text
//! file        := item*
//! item        := domain | function | instance | graph
//! domain      := "domain" SIZE
//! function    := "function" NAME ARITY VALUE{SIZE^ARITY}
//! instance    := "instance" NAME VARS application* "end"
//! application := NAME VAR{arity of NAME}
//! graph       := "graph" NAME VERTICES edge* "end"
//! edge        := VERTEX VERTEX
//! VALUE       := INT | INT "/" INT        (non-negative)
//! ```
//!
//! Tokens are separated by whitespace and `#` starts a comment that runs to
//! the end of the line. `domain` comes first and appears once; a function
//! must be defined before an instance uses it. Function values are listed
//! in row-major order with the last coordinate fastest and may span lines.
//! Variables and vertices are numbered from 1.

use std::fmt::Write as _;
use std::sync::Arc;

use wcsp_core::reductions::Graph;
use wcsp_core::weight::{self, Weight};
use wcsp_core::{Domain, FunctionTable, Instance, Language};

/// Largest function table the parser accepts.
const MAX_TABLE: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {}{message}", token.as_ref().map_or(String::new(), |t| format!("at '{t}': ")))]
pub struct ParseError {
    pub line: usize,
    /// The offending token, or `None` at end of input.
    pub token: Option<String>,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub language: Arc<Language>,
    pub instances: Vec<(String, Instance)>,
    pub graphs: Vec<(String, Graph)>,
}

impl ProblemFile {
    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|(n, _)| n == name).map(|(_, i)| i)
    }

    pub fn graph(&self, name: &str) -> Option<&Graph> {
        self.graphs.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }
}

struct Token<'a> {
    line: usize,
    text: &'a str,
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    last_line: usize,
}

const KEYWORDS: [&str; 5] = ["domain", "function", "instance", "graph", "end"];

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut last_line = 1;
        for (i, raw) in src.lines().enumerate() {
            last_line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            tokens.extend(content.split_whitespace().map(|text| Token { line: i + 1, text }));
        }
        Self {
            tokens,
            pos: 0,
            last_line,
        }
    }

    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                line: t.line,
                token: Some(t.text.to_string()),
                message: message.into(),
            },
            None => ParseError {
                line: self.last_line,
                token: None,
                message: format!("unexpected end of input: {}", message.into()),
            },
        }
    }

    fn error_at(&self, index: usize, message: impl Into<String>) -> ParseError {
        let t = &self.tokens[index];
        ParseError {
            line: t.line,
            token: Some(t.text.to_string()),
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<&'a str, ParseError> {
        let text = self
            .peek()
            .map(|t| t.text)
            .ok_or_else(|| self.error_here(format!("expected {what}")))?;
        self.pos += 1;
        Ok(text)
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        let valid = |s: &str| {
            let mut chars = s.chars();
            chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || "_-'.".contains(c))
                && !KEYWORDS.contains(&s)
        };
        match self.peek().map(|t| t.text) {
            Some(text) if valid(text) => {
                self.pos += 1;
                Ok(text.to_string())
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn count(&mut self, what: &str, min: usize) -> Result<usize, ParseError> {
        match self.peek().map(|t| t.text.parse::<usize>()) {
            Some(Ok(v)) if v >= min => {
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error_here(format!("expected {what} (an integer >= {min})"))),
        }
    }

    /// A 1-based index in `1..=max`, returned zero-based.
    fn index(&mut self, what: &str, max: usize) -> Result<usize, ParseError> {
        match self.peek().map(|t| t.text.parse::<usize>()) {
            Some(Ok(v)) if (1..=max).contains(&v) => {
                self.pos += 1;
                Ok(v - 1)
            }
            _ => Err(self.error_here(format!("expected {what} in 1..={max}"))),
        }
    }

    fn keyword(&mut self, word: &str) -> bool {
        if self.peek().is_some_and(|t| t.text == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

pub fn parse(src: &str) -> Result<ProblemFile, ParseError> {
    let mut p = Parser::new(src);
    if !p.keyword("domain") {
        return Err(p.error_here("expected 'domain' first"));
    }
    let d = p.count("domain size", 1)?;
    let domain = Domain::new(d).map_err(|e| p.error_here(e.to_string()))?;

    let mut functions: Vec<FunctionTable> = Vec::new();
    let mut language: Option<Arc<Language>> = None;
    let mut instances: Vec<(String, Instance)> = Vec::new();
    let mut graphs: Vec<(String, Graph)> = Vec::new();

    while let Some(tok) = p.peek() {
        let start = p.pos;
        match tok.text {
            "function" => {
                p.pos += 1;
                if language.is_some() {
                    return Err(p.error_at(start, "functions must be defined before any instance"));
                }
                let name_at = p.pos;
                let name = p.name("function name")?;
                if functions.iter().any(|f| f.name() == name) {
                    return Err(p.error_at(name_at, "duplicate function name"));
                }
                let arity = p.count("arity", 1)?;
                let size = (arity <= 64)
                    .then(|| domain.count(arity))
                    .flatten()
                    .filter(|&s| s <= MAX_TABLE)
                    .ok_or_else(|| p.error_at(p.pos - 1, "function table too large"))?;
                let mut values = Vec::with_capacity(size);
                for _ in 0..size {
                    let at = p.pos;
                    let text = p.next("function value")?;
                    if KEYWORDS.contains(&text) {
                        return Err(p.error_at(at, format!("expected {size} values for '{name}'")));
                    }
                    values.push(weight::parse(text).map_err(|e| p.error_at(at, e.to_string()))?);
                }
                let f =
                    FunctionTable::new(&name, domain, arity, values).map_err(|e| p.error_at(start, e.to_string()))?;
                functions.push(f);
            }
            "instance" => {
                p.pos += 1;
                let lang = match &language {
                    Some(l) => l.clone(),
                    None => {
                        let l = Arc::new(
                            Language::new(domain, functions.clone()).map_err(|e| p.error_at(start, e.to_string()))?,
                        );
                        language = Some(l.clone());
                        l
                    }
                };
                let name_at = p.pos;
                let name = p.name("instance name")?;
                if instances.iter().any(|(n, _)| *n == name) {
                    return Err(p.error_at(name_at, "duplicate instance name"));
                }
                let n = p.count("variable count", 1)?;
                let mut inst = Instance::new(lang.clone(), n).map_err(|e| p.error_at(start, e.to_string()))?;
                while !p.keyword("end") {
                    let f_at = p.pos;
                    let fname = p.name("function name or 'end'")?;
                    let f = lang
                        .index_of(&fname)
                        .ok_or_else(|| p.error_at(f_at, "unknown function"))?;
                    let vars = (0..lang.function(f).arity())
                        .map(|_| p.index("variable", n))
                        .collect::<Result<Vec<_>, _>>()?;
                    inst.push_index(f, vars).map_err(|e| p.error_at(f_at, e.to_string()))?;
                }
                instances.push((name, inst));
            }
            "graph" => {
                p.pos += 1;
                let name_at = p.pos;
                let name = p.name("graph name")?;
                if graphs.iter().any(|(n, _)| *n == name) {
                    return Err(p.error_at(name_at, "duplicate graph name"));
                }
                let v = p.count("vertex count", 1)?;
                let mut edges = Vec::new();
                while !p.keyword("end") {
                    let x = p.index("vertex or 'end'", v)?;
                    let y = p.index("vertex", v)?;
                    edges.push((x, y));
                }
                let g = Graph::new(v, edges).map_err(|e| p.error_at(start, e.to_string()))?;
                graphs.push((name, g));
            }
            "domain" => return Err(p.error_here("domain declared twice")),
            _ => return Err(p.error_here("expected 'function', 'instance' or 'graph'")),
        }
    }

    let language = match language {
        Some(l) => l,
        None => Arc::new(Language::new(domain, functions).map_err(|e| ParseError {
            line: p.last_line,
            token: None,
            message: e.to_string(),
        })?),
    };
    Ok(ProblemFile {
        language,
        instances,
        graphs,
    })
}

pub fn write_function(out: &mut String, f: &FunctionTable, explicit_denominator: bool) {
    let d = f.domain().size();
    let _ = writeln!(out, "function {} {}", f.name(), f.arity());
    for row in f.values().chunks(d) {
        let vals: Vec<String> = row.iter().map(|w| weight::format(w, explicit_denominator)).collect();
        let _ = writeln!(out, "  {}", vals.join(" "));
    }
}

pub fn write_instance(out: &mut String, name: &str, inst: &Instance) {
    let _ = writeln!(out, "instance {name} {}", inst.num_vars());
    for app in inst.applications() {
        let _ = write!(out, "  {}", inst.language().function(app.function).name());
        for v in &app.vars {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    out.push_str("end\n");
}

pub fn write_graph(out: &mut String, name: &str, g: &Graph) {
    let _ = writeln!(out, "graph {name} {}", g.vertices());
    for (x, y) in g.edges() {
        let _ = writeln!(out, "  {} {}", x + 1, y + 1);
    }
    out.push_str("end\n");
}

/// Renders `file` in the problem format; `parse` reads it back unchanged.
pub fn write(file: &ProblemFile, explicit_denominator: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", file.language.domain().size());
    for f in file.language.functions() {
        out.push('\n');
        write_function(&mut out, f, explicit_denominator);
    }
    for (name, inst) in &file.instances {
        out.push('\n');
        write_instance(&mut out, name, inst);
    }
    for (name, g) in &file.graphs {
        out.push('\n');
        write_graph(&mut out, name, g);
    }
    out
}

/// Formats a weight list separated by spaces.
pub fn weights(ws: &[Weight], explicit_denominator: bool) -> String {
    ws.iter()
        .map(|w| weight::format(w, explicit_denominator))
        .collect::<Vec<_>>()
        .join(" ")
}
