//! Linear spans of the images of paths under a linear assignment of
//! generator images, built length by length without enumerating words.

use crate::graph::DirectedGraph;
use crate::linalg::{orthonormal_basis, unvectorize, vectorize, CMat, CVec, RANK_TOL};

/// `spans[l][v]` is an orthonormal basis (row-major vectorized `n x n`
/// matrices) of the span of the images of paths of length `l` ending at
/// vertex `v`, i.e. with `r(e_1) = v`. Length 0 holds the vertex images.
///
/// Uses `span{paths of length l at v} = sum_{r(e)=v} E_e * span{paths of
/// length l-1 at s(e)}`, which holds for any assignment of images.
pub fn path_spans(
    g: &DirectedGraph,
    vertex_images: &[CMat],
    edge_images: &[CMat],
    max_len: usize,
) -> Vec<Vec<Vec<CVec>>> {
    let n = vertex_images
        .first()
        .or(edge_images.first())
        .map(|m| m.nrows())
        .unwrap_or(0);
    let dim = n * n;
    let mut spans: Vec<Vec<Vec<CVec>>> = Vec::with_capacity(max_len + 1);
    spans.push(
        vertex_images
            .iter()
            .map(|p| orthonormal_basis(dim, &[vectorize(p)], RANK_TOL))
            .collect(),
    );
    for len in 1..=max_len {
        let mut level = vec![Vec::new(); g.vertex_count()];
        for (v, slot) in level.iter_mut().enumerate() {
            let mut cands: Vec<CVec> = Vec::new();
            for e in (0..g.edge_count()).filter(|&e| g.range(e) == v) {
                if len == 1 {
                    cands.push(vectorize(&edge_images[e]));
                } else {
                    for b in &spans[len - 1][g.source(e)] {
                        cands.push(vectorize(&(&edge_images[e] * unvectorize(b, n))));
                    }
                }
            }
            *slot = orthonormal_basis(dim, &cands, RANK_TOL);
        }
        spans.push(level);
    }
    spans
}
