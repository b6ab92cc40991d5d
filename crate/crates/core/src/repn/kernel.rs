use super::MatrixRep;
use crate::linalg::{columns, nullspace, orthonormal_basis, vectorize, CVec, RANK_TOL};
use crate::poly::{fock_basis, Basis, NcPoly};
use crate::span::path_spans;

/// Dimension of the span of the images of all vertices and all words of
/// length at most `max_len`.
pub fn image_dimension(rep: &MatrixRep, max_len: usize) -> usize {
    let n = rep.dimension();
    let spans = path_spans(rep.graph(), rep.vertex_images(), rep.edge_images(), max_len);
    let all: Vec<CVec> = spans.into_iter().flatten().flatten().collect();
    orthonormal_basis(n * n, &all, RANK_TOL).len()
}

/// A basis of the polynomials supported on vertices and words of length at
/// most `max_len` that the representation annihilates.
pub fn kernel_sample(rep: &MatrixRep, max_len: usize) -> Vec<NcPoly> {
    let (basis, vectors) = kernel_vectors(rep, max_len);
    vectors
        .into_iter()
        .map(|v| NcPoly::from_terms(rep.graph(), basis.iter().cloned().zip(v.iter().copied())))
        .collect()
}

/// The coefficient basis and an orthonormal basis of kernel coefficient
/// vectors over it.
fn kernel_vectors(rep: &MatrixRep, max_len: usize) -> (Vec<Basis>, Vec<CVec>) {
    let n = rep.dimension();
    let basis = fock_basis(rep.graph(), max_len);
    let images: Vec<CVec> = basis.iter().map(|b| vectorize(&rep.basis_image(b))).collect();
    let kernel = nullspace(&columns(n * n, &images), RANK_TOL);
    (basis, kernel)
}
