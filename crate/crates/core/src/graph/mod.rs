//! Finite directed multigraphs and their paths.
//!
//! Paths follow operator-composition order: the word `(e_1, ..., e_n)` is a
//! path when `r(e_i) = s(e_{i-1})` for `2 <= i <= n`, so it starts at
//! `s(e_n)` and ends at `r(e_1)`, and the product `L_{e_1} L_{e_2}` is the
//! word `(e_1, e_2)`.

mod cycles;
mod fixtures;

pub use cycles::{enumerate_paths, enumerate_primitive_cycles, paths_by_length};
pub use fixtures::{
    cycle_graph, cycle_with_chord, gilfeather_graph, single_vertex_graph,
};

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    /// s(e)
    pub src: usize,
    /// r(e)
    pub dst: usize,
}

/// A finite directed multigraph with ordered vertex and edge sets.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

impl PartialEq for DirectedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for DirectedGraph {}

impl DirectedGraph {
    /// Builds a graph from vertex ids and `(edge id, source, range)` triples.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut list = Vec::new();
        let mut edge_index = HashMap::new();
        for (id, src, dst) in edges {
            let (id, src, dst): (String, String, String) = (id.into(), src.into(), dst.into());
            if vertex_index.contains_key(&id) || edge_index.contains_key(&id) {
                return Err(Error::DuplicateId(id));
            }
            let s = *vertex_index
                .get(&src)
                .ok_or_else(|| Error::UnknownVertex(src.clone()))?;
            let r = *vertex_index
                .get(&dst)
                .ok_or_else(|| Error::UnknownVertex(dst.clone()))?;
            edge_index.insert(id.clone(), list.len());
            list.push(Edge { id, src: s, dst: r });
        }
        Ok(DirectedGraph {
            vertices,
            edges: list,
            vertex_index,
            edge_index,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e].id
    }

    pub fn vertex(&self, id: &str) -> Result<usize> {
        self.vertex_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// s(e)
    pub fn source(&self, e: usize) -> usize {
        self.edges[e].src
    }

    /// r(e)
    pub fn range(&self, e: usize) -> usize {
        self.edges[e].dst
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.source(e) == self.range(e)
    }

    /// Edges `e` with `s(e) = r(e) = v`, in graph order.
    pub fn loops_at(&self, v: usize) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| self.source(e) == v && self.range(e) == v)
            .collect()
    }

    /// Resolves edge ids and tests consecutive composability.
    pub fn is_path(&self, seq: &[&str]) -> Result<bool> {
        let idx = seq
            .iter()
            .map(|id| self.edge(id))
            .collect::<Result<Vec<_>>>()?;
        Ok(!idx.is_empty() && self.composable(&idx))
    }

    pub(crate) fn composable(&self, idx: &[usize]) -> bool {
        idx.windows(2)
            .all(|w| self.range(w[1]) == self.source(w[0]))
    }

    /// Parses a comma-free list of edge ids into a validated path.
    pub fn path(&self, seq: &[&str]) -> Result<PathWord> {
        let idx = seq
            .iter()
            .map(|id| self.edge(id))
            .collect::<Result<Vec<_>>>()?;
        self.path_from_indices(idx)
    }

    pub fn path_from_indices(&self, idx: Vec<usize>) -> Result<PathWord> {
        if idx.is_empty() {
            return Err(Error::NotAPath("empty edge sequence".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&e| e >= self.edge_count()) {
            return Err(Error::UnknownEdge(format!("#{bad}")));
        }
        if !self.composable(&idx) {
            let names: Vec<&str> = idx.iter().map(|&e| self.edge_name(e)).collect();
            return Err(Error::NotAPath(names.join(",")));
        }
        Ok(PathWord(idx))
    }

    /// True when `r(e_1) = s(e_n)`.
    pub fn is_cycle(&self, w: &PathWord) -> bool {
        self.range(w.first()) == self.source(w.last())
    }

    /// Reachability closure; a vertex reaches itself through the empty path.
    pub fn is_transitive(&self) -> bool {
        let n = self.vertex_count();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            out[e.src].push(e.dst);
        }
        (0..n).all(|start| {
            let mut seen = vec![false; n];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &out[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        })
    }

    /// Edge ids of a word, e.g. `["e1", "e2"]`.
    pub fn word_names(&self, w: &PathWord) -> Vec<String> {
        w.edges().iter().map(|&e| self.edge_name(e).to_string()).collect()
    }

    /// Compact label such as `e1·e2`.
    pub fn word_label(&self, w: &PathWord) -> String {
        self.word_names(w).join("·")
    }

    pub fn to_wire(&self) -> GraphJson {
        GraphJson {
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    dst: self.vertices[e.dst].clone(),
                    id: e.id.clone(),
                    src: self.vertices[e.src].clone(),
                })
                .collect(),
            vertices: self.vertices.clone(),
        }
    }

    pub fn from_wire(wire: GraphJson) -> Result<Self> {
        DirectedGraph::new(
            wire.vertices,
            wire.edges.into_iter().map(|e| (e.id, e.src, e.dst)),
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_wire()).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }
}

// Field order is alphabetical so serialized output has sorted keys.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub edges: Vec<EdgeJson>,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub dst: String,
    pub id: String,
    pub src: String,
}

/// A nonempty composable edge sequence (edge indices into its graph).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathWord(Vec<usize>);

impl PathWord {
    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1]
    }

    /// `r(e_1)`, where the path ends.
    pub fn range(&self, g: &DirectedGraph) -> usize {
        g.range(self.first())
    }

    /// `s(e_n)`, where the path starts.
    pub fn source(&self, g: &DirectedGraph) -> usize {
        g.source(self.last())
    }

    /// Concatenation `self · other` when composable.
    pub fn concat(&self, other: &PathWord, g: &DirectedGraph) -> Option<PathWord> {
        if g.range(other.first()) == g.source(self.last()) {
            let mut v = self.0.clone();
            v.extend_from_slice(&other.0);
            Some(PathWord(v))
        } else {
            None
        }
    }

    /// Contiguous subword `e_{start+1} .. e_{end}`; panics on an empty range.
    pub fn subword(&self, start: usize, end: usize) -> PathWord {
        assert!(start < end && end <= self.len());
        PathWord(self.0[start..end].to_vec())
    }

    /// Cyclic rotation starting at position `k` (zero-based).
    pub fn rotate(&self, k: usize) -> PathWord {
        let mut v = self.0.clone();
        v.rotate_left(k % self.len());
        PathWord(v)
    }

    /// The shortest `v` with `self = v^k`, and `k`.
    pub fn primitive_root(&self) -> (PathWord, usize) {
        let n = self.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i % d]) {
                return (PathWord(self.0[..d].to_vec()), n / d);
            }
        }
        unreachable!("d = n always divides")
    }

    /// True when the word is not a proper power of a shorter word.
    pub fn is_primitive(&self) -> bool {
        self.primitive_root().1 == 1
    }

    /// `w^k` without composability checks (callers pass cycles).
    pub fn power(&self, k: usize) -> PathWord {
        PathWord(self.0.repeat(k))
    }

    pub(crate) fn from_raw(v: Vec<usize>) -> PathWord {
        PathWord(v)
    }
}

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| format!("#{e}")).collect();
        write!(f, "({})", parts.join(","))
    }
}
