use crate::error::{Error, Result};

use super::{DirectedGraph, PathWord};

/// All paths of length `1..=max_len`, grouped by length (index 0 holds length 1).
///
/// Within a length, words are in lexicographic order of edge index.
pub fn paths_by_length(g: &DirectedGraph, max_len: usize) -> Vec<Vec<PathWord>> {
    let mut out: Vec<Vec<PathWord>> = Vec::with_capacity(max_len);
    if max_len == 0 {
        return out;
    }
    out.push((0..g.edge_count()).map(|e| PathWord::from_raw(vec![e])).collect());
    for _ in 1..max_len {
        let prev = out.last().expect("nonempty");
        let mut next = Vec::new();
        for w in prev {
            let tail = w.last();
            for e in 0..g.edge_count() {
                if g.range(e) == g.source(tail) {
                    let mut v = w.edges().to_vec();
                    v.push(e);
                    next.push(PathWord::from_raw(v));
                }
            }
        }
        out.push(next);
    }
    out
}

/// All paths of length `1..=max_len`, shortest first.
pub fn enumerate_paths(g: &DirectedGraph, max_len: usize) -> Vec<PathWord> {
    paths_by_length(g, max_len).into_iter().flatten().collect()
}

/// Primitive cycles of length at most `max_len`, rotations listed separately,
/// sorted lexicographically by edge sequence (graph edge order).
pub fn enumerate_primitive_cycles(g: &DirectedGraph, max_len: usize) -> Result<Vec<PathWord>> {
    if max_len == 0 {
        return Err(Error::invalid("max_len must be at least 1"));
    }
    let mut found: Vec<PathWord> = enumerate_paths(g, max_len)
        .into_iter()
        .filter(|w| g.is_cycle(w) && w.is_primitive())
        .collect();
    found.sort();
    Ok(found)
}
