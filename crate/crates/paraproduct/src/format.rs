//! Versioned text formats: graphs, graph templates, certificates.
//!
//! Graph files are line oriented:
//!
//! ```text
//! # format-version: 1
//! vertices: 0 1 2 *9
//! edge: 0 1 -2
//! edge: 9 0 0
//! ```
//!
//! `*` marks the distinguished vertex. Blank lines and other `#` lines are
//! ignored. A template may use `A`, `A+k` or `A-k` as an edge weight.

use std::fmt::Write as _;

use paraproduct_core::certificate::CERTIFICATE_FORMAT_VERSION;
use paraproduct_core::{Certificate, Edge, Graph, VertexId};
use thiserror::Error;

pub const GRAPH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `# format-version` header")]
    MissingVersion,
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("missing `vertices:` line")]
    MissingVertices,
    #[error("input is empty")]
    Empty,
    #[error("invalid certificate: {0}")]
    Certificate(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, message: message.into() }
}

/// Edge weight in a template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightExpr {
    Const(i64),
    /// `A + offset`
    Param(i64),
}

impl WeightExpr {
    pub fn at(self, a: i64) -> i64 {
        match self {
            WeightExpr::Const(w) => w,
            WeightExpr::Param(k) => a + k,
        }
    }

    fn parse(tok: &str) -> Option<Self> {
        if let Ok(w) = tok.parse() {
            return Some(WeightExpr::Const(w));
        }
        let rest = tok.strip_prefix('A')?;
        if rest.is_empty() {
            return Some(WeightExpr::Param(0));
        }
        let k: i64 = rest.strip_prefix('+').unwrap_or(rest).parse().ok()?;
        Some(WeightExpr::Param(k))
    }
}

/// A graph whose edge weights may depend on one integer parameter `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphTemplate {
    pub vertices: Vec<VertexId>,
    pub distinguished: Option<VertexId>,
    pub edges: Vec<(VertexId, VertexId, WeightExpr)>,
}

impl GraphTemplate {
    pub fn is_parametric(&self) -> bool {
        self.edges.iter().any(|e| matches!(e.2, WeightExpr::Param(_)))
    }

    pub fn instantiate(&self, a: i64) -> Graph {
        let g = Graph::new(self.vertices.iter().copied(), self.edges.iter().map(|&(s, d, w)| Edge::new(s, d, w.at(a))))
            .expect("endpoints validated at parse time");
        match self.distinguished {
            Some(v) => g.with_distinguished(v).expect("validated at parse time"),
            None => g,
        }
    }
}

pub fn parse_template(text: &str) -> Result<GraphTemplate, FormatError> {
    if text.trim().is_empty() {
        return Err(FormatError::Empty);
    }
    let mut version = None;
    let mut vertices: Option<(Vec<VertexId>, Option<VertexId>)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if let Some(c) = l.strip_prefix('#') {
            if let Some(v) = c.trim().strip_prefix("format-version:") {
                let v: u32 = v.trim().parse().map_err(|_| syntax(line, "bad format version"))?;
                if v != GRAPH_FORMAT_VERSION {
                    return Err(FormatError::Version(v));
                }
                version = Some(v);
            }
            continue;
        }
        if version.is_none() {
            return Err(FormatError::MissingVersion);
        }
        let (key, rest) = l.split_once(':').ok_or_else(|| syntax(line, "expected `key: value`"))?;
        match key.trim() {
            "vertices" => {
                if vertices.is_some() {
                    return Err(syntax(line, "duplicate `vertices:` line"));
                }
                let mut vs = Vec::new();
                let mut star = None;
                for tok in rest.split_whitespace() {
                    let (marked, digits) = match tok.strip_prefix('*') {
                        Some(d) => (true, d),
                        None => (false, tok),
                    };
                    let v: VertexId = digits.parse().map_err(|_| syntax(line, format!("bad vertex id `{tok}`")))?;
                    if vs.contains(&v) {
                        return Err(syntax(line, format!("vertex {v} listed twice")));
                    }
                    if marked {
                        if star.is_some() {
                            return Err(syntax(line, "more than one distinguished vertex"));
                        }
                        star = Some(v);
                    }
                    vs.push(v);
                }
                vertices = Some((vs, star));
            }
            "edge" => {
                let (vs, _) = vertices.as_ref().ok_or_else(|| syntax(line, "edge before `vertices:`"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(syntax(line, "edge needs `src dst weight`"));
                }
                let mut ends = [0; 2];
                for (slot, tok) in ends.iter_mut().zip(&toks[..2]) {
                    let v: VertexId = tok.parse().map_err(|_| syntax(line, format!("bad vertex id `{tok}`")))?;
                    if !vs.contains(&v) {
                        return Err(syntax(line, format!("unknown vertex {v}")));
                    }
                    *slot = v;
                }
                let w = WeightExpr::parse(toks[2]).ok_or_else(|| syntax(line, format!("bad weight `{}`", toks[2])))?;
                edges.push((ends[0], ends[1], w));
            }
            other => return Err(syntax(line, format!("unknown key `{other}`"))),
        }
    }
    if version.is_none() {
        return Err(FormatError::MissingVersion);
    }
    let (vertices, distinguished) = vertices.ok_or(FormatError::MissingVertices)?;
    Ok(GraphTemplate { vertices, distinguished, edges })
}

/// Parses a graph file; parametric weights are rejected.
pub fn parse_graph(text: &str) -> Result<Graph, FormatError> {
    let t = parse_template(text)?;
    if t.is_parametric() {
        let line = text.lines().position(|l| l.contains('A') && !l.trim_start().starts_with('#')).map_or(0, |i| i + 1);
        return Err(syntax(line, "parametric weight in a plain graph file"));
    }
    Ok(t.instantiate(0))
}

pub fn write_graph(g: &Graph) -> String {
    let mut s = format!("# format-version: {GRAPH_FORMAT_VERSION}\nvertices:");
    for v in g.vertices() {
        let mark = if g.distinguished() == Some(*v) { "*" } else { "" };
        let _ = write!(s, " {mark}{v}");
    }
    s.push('\n');
    for e in g.edges() {
        let _ = writeln!(s, "edge: {} {} {}", e.src, e.dst, e.weight);
    }
    s
}

pub fn write_certificate(c: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(c).expect("certificates serialize");
    s.push('\n');
    s
}

pub fn parse_certificate(text: &str) -> Result<Certificate, FormatError> {
    if text.trim().is_empty() {
        return Err(FormatError::Empty);
    }
    let c: Certificate = serde_json::from_str(text).map_err(|e| FormatError::Certificate(e.to_string()))?;
    if c.format_version != CERTIFICATE_FORMAT_VERSION {
        return Err(FormatError::Version(c.format_version));
    }
    if c.nodes.is_empty() {
        return Err(FormatError::Certificate("no nodes".into()));
    }
    Ok(c)
}
