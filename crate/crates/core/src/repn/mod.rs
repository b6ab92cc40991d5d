//! Finite-dimensional representations of the graph algebra, given by their
//! generator images.

mod family;
mod kernel;

pub use family::{pi_w_lambda_mu, verify_factorization, FactorizationCheck, FactorizationReport};
pub use kernel::{image_dimension, kernel_sample};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, GraphJson};
use crate::linalg::{matrix_from_wire, matrix_to_wire, spectral_norm, CMat, ComplexJson, C64};
use crate::poly::{Basis, NcPoly};

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRep {
    graph: Arc<DirectedGraph>,
    n: usize,
    vertex_images: Vec<CMat>,
    edge_images: Vec<CMat>,
}

impl MatrixRep {
    pub fn new(graph: &Arc<DirectedGraph>, vertex_images: Vec<CMat>, edge_images: Vec<CMat>) -> Result<Self> {
        if vertex_images.len() != graph.vertex_count() || edge_images.len() != graph.edge_count() {
            return Err(Error::invalid("one image per vertex and per edge is required"));
        }
        let n = vertex_images
            .first()
            .or(edge_images.first())
            .map(|m| m.nrows())
            .unwrap_or(0);
        if n == 0 || vertex_images.iter().chain(&edge_images).any(|m| m.shape() != (n, n)) {
            return Err(Error::invalid("images must be nonempty square matrices of one size"));
        }
        Ok(MatrixRep {
            graph: graph.clone(),
            n,
            vertex_images,
            edge_images,
        })
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn vertex_image(&self, v: usize) -> &CMat {
        &self.vertex_images[v]
    }

    pub fn edge_image(&self, e: usize) -> &CMat {
        &self.edge_images[e]
    }

    pub fn vertex_images(&self) -> &[CMat] {
        &self.vertex_images
    }

    pub fn edge_images(&self) -> &[CMat] {
        &self.edge_images
    }

    pub fn basis_image(&self, b: &Basis) -> CMat {
        match b {
            Basis::Vertex(v) => self.vertex_images[*v].clone(),
            Basis::Word(w) => {
                let mut it = w.edges().iter();
                let first = self.edge_images[*it.next().expect("words are nonempty")].clone();
                it.fold(first, |acc, &e| acc * &self.edge_images[e])
            }
        }
    }

    pub fn apply(&self, a: &NcPoly) -> Result<CMat> {
        if **a.graph() != *self.graph {
            return Err(Error::GraphMismatch);
        }
        Ok(a.terms()
            .fold(CMat::zeros(self.n, self.n), |acc, (b, c)| acc + self.basis_image(b) * *c))
    }

    /// Checks the generator conditions for complete contractivity: the
    /// vertex images are mutually orthogonal projections, each edge image
    /// sits between its range and source projections, and the row of edge
    /// images is a contraction.
    pub fn validate_cc(&self, tol: f64) -> CcReport {
        let g = &self.graph;
        let mut violations = Vec::new();
        let mut flag = |condition: u8, generator: String, what: &str, value: f64| {
            violations.push(CcViolation {
                condition,
                generator,
                detail: what.to_string(),
                value,
            })
        };
        for (v, p) in self.vertex_images.iter().enumerate() {
            let idem = spectral_norm(&(p * p - p));
            if idem > tol {
                flag(1, format!("P_{}", g.vertex_name(v)), "not idempotent", idem);
            }
            let herm = spectral_norm(&(p - p.adjoint()));
            if herm > tol {
                flag(1, format!("P_{}", g.vertex_name(v)), "not self-adjoint", herm);
            }
            for (w, q) in self.vertex_images.iter().enumerate().skip(v + 1) {
                let overlap = spectral_norm(&(p * q));
                if overlap > tol {
                    let name = format!("P_{}, P_{}", g.vertex_name(v), g.vertex_name(w));
                    flag(1, name, "ranges not orthogonal", overlap);
                }
            }
        }
        for (e, l) in self.edge_images.iter().enumerate() {
            let sandwiched = &self.vertex_images[g.range(e)] * l * &self.vertex_images[g.source(e)];
            let gap = spectral_norm(&(sandwiched - l));
            if gap > tol {
                flag(2, format!("L_{}", g.edge_name(e)), "P_r(e) L_e P_s(e) differs from L_e", gap);
            }
        }
        let gram = self
            .edge_images
            .iter()
            .fold(CMat::zeros(self.n, self.n), |acc, l| acc + l * l.adjoint());
        let row_norm = spectral_norm(&gram).sqrt();
        if row_norm > 1.0 + tol {
            flag(3, "[L_e]".to_string(), "row of edge images is not a contraction", row_norm);
        }
        let failed = |k: u8| violations.iter().any(|x| x.condition == k);
        CcReport {
            passed: violations.is_empty(),
            projections: !failed(1),
            sandwich: !failed(2),
            row_contraction: !failed(3),
            row_norm,
            violations,
        }
    }

    pub fn to_wire(&self) -> RepJson {
        let g = &self.graph;
        RepJson {
            dimension: self.n,
            edges: (0..g.edge_count())
                .map(|e| (g.edge_name(e).to_string(), matrix_to_wire(&self.edge_images[e])))
                .collect(),
            graph: g.to_wire(),
            vertices: (0..g.vertex_count())
                .map(|v| (g.vertex_name(v).to_string(), matrix_to_wire(&self.vertex_images[v])))
                .collect(),
        }
    }

    pub fn from_wire(w: RepJson) -> Result<Self> {
        let g = Arc::new(DirectedGraph::from_wire(w.graph)?);
        Self::from_parts(&g, w.dimension, &w.vertices, &w.edges)
    }

    pub(crate) fn from_parts(
        g: &Arc<DirectedGraph>,
        n: usize,
        vertices: &BTreeMap<String, Vec<Vec<ComplexJson>>>,
        edges: &BTreeMap<String, Vec<Vec<ComplexJson>>>,
    ) -> Result<Self> {
        let lookup = |map: &BTreeMap<String, Vec<Vec<ComplexJson>>>, name: &str| {
            map.get(name)
                .ok_or_else(|| Error::invalid(format!("missing image for {name}")))
                .and_then(|m| matrix_from_wire(m, n))
        };
        if vertices.len() != g.vertex_count() || edges.len() != g.edge_count() {
            return Err(Error::invalid("image keys do not match the graph"));
        }
        let vs = g.vertices().iter().map(|v| lookup(vertices, v)).collect::<Result<Vec<_>>>()?;
        let es = g.edges().iter().map(|e| lookup(edges, &e.id)).collect::<Result<Vec<_>>>()?;
        Self::new(g, vs, es)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("representation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcViolation {
    /// 1: projections, 2: sandwich, 3: row contraction.
    pub condition: u8,
    pub generator: String,
    pub detail: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcReport {
    pub passed: bool,
    pub projections: bool,
    pub sandwich: bool,
    pub row_contraction: bool,
    pub row_norm: f64,
    pub violations: Vec<CcViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepJson {
    pub dimension: usize,
    pub edges: BTreeMap<String, Vec<Vec<ComplexJson>>>,
    pub graph: GraphJson,
    pub vertices: BTreeMap<String, Vec<Vec<ComplexJson>>>,
}

pub(crate) fn check_disk(lambda: C64) -> Result<()> {
    if lambda.norm() > 1.0 + 1e-12 {
        return Err(Error::invalid(format!("|λ| = {} exceeds 1", lambda.norm())));
    }
    Ok(())
}
