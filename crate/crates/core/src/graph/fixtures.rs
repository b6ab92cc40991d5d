use crate::error::{Error, Result};

use super::DirectedGraph;

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("fixture size must be at least 1"))
    } else {
        Ok(())
    }
}

/// The cycle graph `C_n`: vertices `v1..vn`, edges `e_i : v_{i+1} -> v_i`
/// (indices mod n), so `s(e_i) = r(e_{i+1})` and `s(e_n) = r(e_1)`.
pub fn cycle_graph(n: usize) -> Result<DirectedGraph> {
    require_positive(n)?;
    let vertices: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (1..=n)
        .map(|i| {
            let src = format!("v{}", i % n + 1);
            (format!("e{i}"), src, format!("v{i}"))
        })
        .collect();
    DirectedGraph::new(vertices, edges)
}

/// `B_n`: one vertex `v0` carrying loops `f1..fn`.
pub fn single_vertex_graph(n: usize) -> Result<DirectedGraph> {
    require_positive(n)?;
    let edges: Vec<(String, String, String)> = (1..=n)
        .map(|i| (format!("f{i}"), "v0".to_string(), "v0".to_string()))
        .collect();
    DirectedGraph::new(["v0".to_string()], edges)
}

/// The non-transitive zigzag graph on `2n` vertices.
///
/// Orientation: every odd vertex points at its even neighbours
/// (`v1->v2, v3->v2, v3->v4, ...`, edges `e1..e_{2n-1}` in that order), plus
/// the long arc `e_{2n} : v1 -> v_{2n}`. Even vertices are sinks.
pub fn gilfeather_graph(n: usize) -> Result<DirectedGraph> {
    require_positive(n)?;
    let m = 2 * n;
    let vertices: Vec<String> = (1..=m).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(m);
    for k in 1..m {
        // edge k joins v_k and v_{k+1}; the odd endpoint is the source
        let (src, dst) = if k % 2 == 1 { (k, k + 1) } else { (k + 1, k) };
        edges.push((format!("e{k}"), format!("v{src}"), format!("v{dst}")));
    }
    edges.push((format!("e{m}"), "v1".to_string(), format!("v{m}")));
    DirectedGraph::new(vertices, edges)
}

/// `C_2` with an extra edge `c : v2 -> v1` parallel to `e1`.
pub fn cycle_with_chord() -> DirectedGraph {
    DirectedGraph::new(
        ["v1", "v2"],
        [("e1", "v2", "v1"), ("e2", "v1", "v2"), ("c", "v2", "v1")],
    )
    .expect("fixture is well formed")
}
