use std::sync::Arc;

use super::GradedMatrixFn;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, PathWord};
use crate::linalg::{vectorize, CMat, CVec, C64};
use crate::poly::{Basis, NcPoly};
use crate::span::path_spans;

/// Relative tolerance for span membership of coefficient matrices.
const MEMBERSHIP_TOL: f64 = 1e-9;

/// The map from the path algebra into the cycle-algebra model attached to a
/// cycle `w = (e_1, ..., e_n)`: `P_v ↦ Σ_{s(e_j)=v} e_{j,j}` and
/// `L_{e_j} ↦ Z_{j-1}` with `Z_0 = Z_n`, summed over repeated edges.
///
/// The shift by one is what makes this a homomorphism under the path
/// convention `r(e_j) = s(e_{j-1})`: `L_{e_j}` has to land between
/// `ι(P_{r(e_j)}) ∋ e_{j-1,j-1}` and `ι(P_{s(e_j)}) ∋ e_{j,j}`.
#[derive(Clone, Debug)]
pub struct Iota {
    graph: Arc<DirectedGraph>,
    word: PathWord,
    vertex_images: Vec<GradedMatrixFn>,
    edge_images: Vec<GradedMatrixFn>,
}

impl Iota {
    pub fn new(graph: &Arc<DirectedGraph>, w: &PathWord) -> Result<Self> {
        if w.is_empty() || !graph.is_cycle(w) {
            return Err(Error::NotAPath(format!(
                "{} is not a cycle",
                graph.word_label(w)
            )));
        }
        let n = w.len();
        let mut vertex_images = vec![GradedMatrixFn::zero(n); graph.vertex_count()];
        let mut edge_images = vec![GradedMatrixFn::zero(n); graph.edge_count()];
        for (p, &e) in w.edges().iter().enumerate() {
            let v = graph.source(e);
            vertex_images[v] = vertex_images[v].add(&GradedMatrixFn::unit_proj(n, p + 1)?)?;
            let gen = if p == 0 { n } else { p };
            edge_images[e] = edge_images[e].add(&GradedMatrixFn::z_gen(n, gen)?)?;
        }
        Ok(Iota {
            graph: graph.clone(),
            word: w.clone(),
            vertex_images,
            edge_images,
        })
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &PathWord {
        &self.word
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn vertex_image(&self, v: usize) -> &GradedMatrixFn {
        &self.vertex_images[v]
    }

    pub fn edge_image(&self, e: usize) -> &GradedMatrixFn {
        &self.edge_images[e]
    }

    pub fn basis_image(&self, b: &Basis) -> GradedMatrixFn {
        match b {
            Basis::Vertex(v) => self.vertex_images[*v].clone(),
            Basis::Word(w) => {
                let mut it = w.edges().iter();
                let first = self.edge_images[*it.next().expect("words are nonempty")].clone();
                it.fold(first, |acc, &e| {
                    acc.mul(&self.edge_images[e]).expect("sizes agree")
                })
            }
        }
    }

    pub fn apply(&self, a: &NcPoly) -> Result<GradedMatrixFn> {
        if **a.graph() != *self.graph {
            return Err(Error::GraphMismatch);
        }
        if a.degree() > a.degree_cap() {
            return Err(Error::DegreeCap {
                degree: a.degree(),
                cap: a.degree_cap(),
            });
        }
        a.terms().try_fold(GradedMatrixFn::zero(self.n()), |acc, (b, c)| {
            acc.add(&self.basis_image(b).scale(*c))
        })
    }

    /// Whether `f` lies in the image of the polynomials of degree at most
    /// `deg_bound`.
    ///
    /// Images of words of length `l` are homogeneous of degree `l`, so the
    /// test splits by degree: the `z^l` coefficient matrix of `f` has to lie
    /// in the span of the images of length-`l` paths (the vertex images for
    /// `l = 0`).
    pub fn range_contains(&self, f: &GradedMatrixFn, deg_bound: usize) -> Result<bool> {
        if f.n() != self.n() {
            return Err(Error::invalid("matrix size differs from the cycle length"));
        }
        if f.degree() > deg_bound {
            return Err(Error::DegreeCap {
                degree: f.degree(),
                cap: deg_bound,
            });
        }
        let n = self.n();
        let vertex: Vec<CMat> = self.vertex_images.iter().map(|m| m.coefficient_matrix(0)).collect();
        let edge: Vec<CMat> = self.edge_images.iter().map(|m| m.coefficient_matrix(1)).collect();
        let spans = path_spans(&self.graph, &vertex, &edge, f.degree());
        for (k, level) in spans.iter().enumerate() {
            let target = vectorize(&f.coefficient_matrix(k));
            let gens: Vec<CVec> = level.iter().flatten().cloned().collect();
            let basis = crate::linalg::orthonormal_basis(n * n, &gens, crate::linalg::RANK_TOL);
            let mut rest = target.clone();
            for b in &basis {
                let coeff: C64 = b.dotc(&rest);
                rest -= b * coeff;
            }
            if rest.norm() > MEMBERSHIP_TOL * target.norm().max(1.0) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Whether `ι_w` is onto the model, i.e. the sources of `w` are distinct.
pub fn iota_onto_predicate(g: &DirectedGraph, w: &PathWord) -> Result<bool> {
    if w.is_empty() || !g.is_cycle(w) || !w.is_primitive() {
        return Err(Error::invalid(format!(
            "{} is not a primitive cycle",
            g.word_label(w)
        )));
    }
    let mut sources: Vec<usize> = w.edges().iter().map(|&e| g.source(e)).collect();
    sources.sort_unstable();
    sources.dedup();
    Ok(sources.len() == w.len())
}

pub fn ran_iota_contains(
    g: &Arc<DirectedGraph>,
    w: &PathWord,
    f: &GradedMatrixFn,
    deg_bound: usize,
) -> Result<bool> {
    if !w.is_primitive() {
        return Err(Error::invalid(format!("{} is not primitive", g.word_label(w))));
    }
    Iota::new(g, w)?.range_contains(f, deg_bound)
}
