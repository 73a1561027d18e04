//! Finite oriented multigraphs.
//!
//! Vertices and edges are addressed by dense indices that follow declaration
//! order; that order is the canonical order used for every tie-break in the
//! crate (edge enumeration, path ordering, cycle placement).

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

pub type VertexIdx = usize;
pub type EdgeIdx = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(String);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(String);

pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl VertexId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !is_token(&name) {
            return Err(Error::InvalidGraph(format!("bad vertex name {name:?}")));
        }
        Ok(VertexId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl EdgeId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !is_token(&name) {
            return Err(Error::InvalidGraph(format!("bad edge name {name:?}")));
        }
        Ok(EdgeId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub origin: VertexIdx,
    pub terminus: VertexIdx,
}

#[derive(Debug, Clone)]
pub struct MultiGraph {
    name: String,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexIdx>,
    edge_index: HashMap<String, EdgeIdx>,
    out_edges: Vec<Vec<EdgeIdx>>,
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for MultiGraph {}

impl MultiGraph {
    /// Builds a graph from names; edges are `(edge, origin, terminus)`.
    pub fn new<S: AsRef<str>>(
        name: &str,
        vertices: &[S],
        edges: &[(S, S, S)],
    ) -> Result<Self> {
        let mut b = GraphBuilder::new(name)?;
        for v in vertices {
            b.vertex(v.as_ref())?;
        }
        for (e, o, t) in edges {
            b.edge(e.as_ref(), o.as_ref(), t.as_ref())?;
        }
        b.finish()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: VertexIdx) -> &VertexId {
        &self.vertices[v]
    }

    pub fn edge(&self, e: EdgeIdx) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexIdx> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_index(&self, name: &str) -> Option<EdgeIdx> {
        self.edge_index.get(name).copied()
    }

    /// Out-edges of `v` in canonical order.
    pub fn out_edges(&self, v: VertexIdx) -> &[EdgeIdx] {
        &self.out_edges[v]
    }

    pub fn origin(&self, e: EdgeIdx) -> VertexIdx {
        self.edges[e].origin
    }

    pub fn terminus(&self, e: EdgeIdx) -> VertexIdx {
        self.edges[e].terminus
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        let n = self.vertices.len();
        let mut m = IntMatrix::zeros(n, n);
        for e in &self.edges {
            let cur = m.get(e.origin, e.terminus).clone();
            m.set(e.origin, e.terminus, cur + 1);
        }
        m
    }

    /// Every ordered vertex pair is joined by a path of positive length.
    pub fn is_diconnected(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|v| {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<VertexIdx> = VecDeque::new();
            for &e in &self.out_edges[v] {
                let t = self.edges[e].terminus;
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
            while let Some(u) = queue.pop_front() {
                for &e in &self.out_edges[u] {
                    let t = self.edges[e].terminus;
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
            seen.iter().all(|&s| s)
        })
    }

    /// The adjacency matrix is not a permutation matrix.
    pub fn is_non_circular(&self) -> bool {
        !self.adjacency_matrix().is_permutation_matrix()
    }

    pub fn is_admissible(&self) -> bool {
        self.is_diconnected() && self.is_non_circular()
    }

    pub fn check_admissible(&self) -> Result<()> {
        if !self.is_diconnected() {
            return Err(Error::Inadmissible(format!(
                "graph {} is not diconnected",
                self.name
            )));
        }
        if !self.is_non_circular() {
            return Err(Error::Inadmissible(format!(
                "graph {} is a disjoint union of cycles",
                self.name
            )));
        }
        Ok(())
    }

    /// Matui's graph for the Higman-Thompson group with parameters `d`, `k`:
    /// a directed `k`-cycle `v1 -> ... -> vk` with `d` parallel edges `vk -> v1`.
    pub fn matui(d: usize, k: usize) -> Result<Self> {
        if d < 2 || k < 1 {
            return Err(Error::InvalidGraph(format!(
                "matui graph needs d >= 2 and k >= 1, got d={d} k={k}"
            )));
        }
        let mut b = GraphBuilder::new(&format!("matui_{d}_{k}"))?;
        for i in 1..=k {
            b.vertex(&format!("v{i}"))?;
        }
        for i in 1..k {
            b.edge(&format!("c{i}"), &format!("v{i}"), &format!("v{}", i + 1))?;
        }
        for j in 1..=d {
            b.edge(&format!("b{j}"), &format!("v{k}"), "v1")?;
        }
        b.finish()
    }

    /// Graph with adjacency `[[1,1],[1,p]]`: vertices `1`, `2`; edges `a: 1->1`,
    /// `b: 1->2`, `c: 2->1` and loops `l1..lp` at `2`.
    pub fn loop_pair(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidGraph("loop count must be positive".into()));
        }
        let mut b = GraphBuilder::new(&format!("m{p}"))?;
        b.vertex("1")?;
        b.vertex("2")?;
        b.edge("a", "1", "1")?;
        b.edge("b", "1", "2")?;
        b.edge("c", "2", "1")?;
        for i in 1..=p {
            b.edge(&format!("l{i}"), "2", "2")?;
        }
        b.finish()
    }

    /// One vertex `a` carrying `n` loops named `x`, `y`, `z`, then `l4`, `l5`, ...
    pub fn bouquet(n: usize) -> Result<Self> {
        let mut b = GraphBuilder::new(&format!("r{n}"))?;
        b.vertex("a")?;
        for i in 0..n {
            let name = match i {
                0 => "x".to_string(),
                1 => "y".to_string(),
                2 => "z".to_string(),
                _ => format!("l{}", i + 1),
            };
            b.edge(&name, "a", "a")?;
        }
        b.finish()
    }

    /// Inverts [`MultiGraph::adjacency_matrix`]: vertices `v1..vn`, and
    /// `M(i,j)` parallel edges `<prefix>_i_j_k` (1-based) in row-major order.
    pub fn from_matrix(m: &IntMatrix, prefix: &str) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape("adjacency matrix must be square".into()));
        }
        if !is_token(prefix) {
            return Err(Error::InvalidGraph(format!("bad edge prefix {prefix:?}")));
        }
        let n = m.rows();
        let mut b = GraphBuilder::new(&format!("{prefix}_graph"))?;
        for i in 1..=n {
            b.vertex(&format!("v{i}"))?;
        }
        for i in 0..n {
            for j in 0..n {
                let entry = m.get(i, j);
                if entry.is_negative() {
                    return Err(Error::InvalidGraph(format!(
                        "negative entry {entry} at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                let count = entry
                    .to_usize()
                    .ok_or_else(|| Error::InvalidGraph(format!("entry {entry} too large")))?;
                for k in 1..=count {
                    b.edge(
                        &format!("{prefix}_{}_{}_{k}", i + 1, j + 1),
                        &format!("v{}", i + 1),
                        &format!("v{}", j + 1),
                    )?;
                }
            }
        }
        b.finish()
    }

    pub fn with_name(mut self, name: &str) -> Result<Self> {
        if !is_token(name) {
            return Err(Error::InvalidGraph(format!("bad graph name {name:?}")));
        }
        self.name = name.to_string();
        Ok(self)
    }

    /// Rejection-samples an admissible graph from `n × n` matrices with
    /// `1 ≤ n ≤ max_vertices` and entries in `0..=max_entry`.
    pub fn random_admissible<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_entry: u32) -> Self {
        loop {
            let n = rng.gen_range(1..=max_vertices);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| i64::from(rng.gen_range(0..=max_entry))).collect())
                .collect();
            let g = MultiGraph::from_matrix(&IntMatrix::from_rows(&rows), "e")
                .expect("nonnegative square matrix");
            if g.is_admissible() {
                return g;
            }
        }
    }

    /// Deterministic DOT rendering with edges in canonical order.
    pub fn to_dot(&self) -> String {
        let mut s = format!("digraph {} {{\n", self.name);
        for e in &self.edges {
            s.push_str(&format!(
                "  {} -> {} [label={}];\n",
                self.vertices[e.origin], self.vertices[e.terminus], e.id
            ));
        }
        s.push_str("}\n");
        s
    }

    /// Parses the line-oriented graph format starting at `first_line`
    /// (1-based, for diagnostics).
    pub fn parse_lines<'a, I>(lines: I, first_line: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut builder: Option<GraphBuilder> = None;
        let mut last = first_line;
        for (k, raw) in lines.into_iter().enumerate() {
            let lineno = first_line + k;
            last = lineno;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match (words[0], &mut builder) {
                ("graph", None) if words.len() == 2 => {
                    builder = Some(
                        GraphBuilder::new(words[1]).map_err(|e| Error::parse(lineno, e.to_string()))?,
                    );
                }
                ("graph", _) => return Err(Error::parse(lineno, "unexpected graph header")),
                (_, None) => return Err(Error::parse(lineno, "expected `graph <name>` first")),
                ("vertex", Some(b)) if words.len() == 2 => {
                    if !b.edges.is_empty() {
                        return Err(Error::parse(lineno, "vertex declared after edges"));
                    }
                    b.vertex(words[1])
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                }
                ("edge", Some(b)) if words.len() == 4 => {
                    b.edge(words[1], words[2], words[3])
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                }
                _ => return Err(Error::parse(lineno, format!("cannot parse {line:?}"))),
            }
        }
        builder
            .ok_or_else(|| Error::parse(last, "missing `graph <name>` header"))?
            .finish()
            .map_err(|e| Error::parse(last, e.to_string()))
    }

    /// The graph text format (round-trips through [`FromStr`]).
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "graph {}", self.name)?;
        for v in &self.vertices {
            writeln!(f, "vertex {v}")?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {} {} {}",
                e.id, self.vertices[e.origin], self.vertices[e.terminus]
            )?;
        }
        Ok(())
    }
}

impl FromStr for MultiGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MultiGraph::parse_lines(s.lines(), 1)
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

/// Incremental construction with duplicate and endpoint checks.
#[derive(Debug)]
pub struct GraphBuilder {
    name: String,
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, VertexIdx>,
    edge_index: HashMap<String, EdgeIdx>,
}

impl GraphBuilder {
    pub fn new(name: &str) -> Result<Self> {
        if !is_token(name) {
            return Err(Error::InvalidGraph(format!("bad graph name {name:?}")));
        }
        Ok(GraphBuilder {
            name: name.to_string(),
            vertices: Vec::new(),
            edges: Vec::new(),
            vertex_index: HashMap::new(),
            edge_index: HashMap::new(),
        })
    }

    pub fn vertex(&mut self, name: &str) -> Result<VertexIdx> {
        let id = VertexId::new(name)?;
        if self.vertex_index.contains_key(name) {
            return Err(Error::InvalidGraph(format!("duplicate vertex {name}")));
        }
        let idx = self.vertices.len();
        self.vertex_index.insert(name.to_string(), idx);
        self.vertices.push(id);
        Ok(idx)
    }

    pub fn edge(&mut self, name: &str, origin: &str, terminus: &str) -> Result<EdgeIdx> {
        let id = EdgeId::new(name)?;
        if self.edge_index.contains_key(name) {
            return Err(Error::InvalidGraph(format!("duplicate edge {name}")));
        }
        let o = *self
            .vertex_index
            .get(origin)
            .ok_or_else(|| Error::InvalidGraph(format!("undeclared vertex {origin}")))?;
        let t = *self
            .vertex_index
            .get(terminus)
            .ok_or_else(|| Error::InvalidGraph(format!("undeclared vertex {terminus}")))?;
        let idx = self.edges.len();
        self.edge_index.insert(name.to_string(), idx);
        self.edges.push(Edge {
            id,
            origin: o,
            terminus: t,
        });
        Ok(idx)
    }

    pub fn finish(self) -> Result<MultiGraph> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        let mut out_edges = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out_edges[e.origin].push(i);
        }
        Ok(MultiGraph {
            name: self.name,
            vertices: self.vertices,
            edges: self.edges,
            vertex_index: self.vertex_index,
            edge_index: self.edge_index,
            out_edges,
        })
    }
}

impl IntMatrix {
    /// All entries in {0,1} with every row and column summing to 1.
    pub fn is_permutation_matrix(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows();
        let one = BigInt::from(1);
        let entries_ok = (0..n).all(|i| (0..n).all(|j| {
            let x = self.get(i, j);
            x.is_zero() || *x == one
        }));
        entries_ok
            && (0..n).all(|i| (0..n).map(|j| self.get(i, j)).sum::<BigInt>() == one)
            && (0..n).all(|j| (0..n).map(|i| self.get(i, j)).sum::<BigInt>() == one)
    }
}
