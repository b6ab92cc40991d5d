//! Derivations at a matrix representation `π`: linear maps with
//! `D(ab) = D(a)π(b) + π(a)D(b)`, stored by their generator values.

mod factor;
mod profile;
mod report;
mod space;

pub use factor::{
    build_noninner_case_i, build_noninner_case_ii, continuity_bound_check, factors_through_cycle,
    noninner_exists, ContinuityReport, FactorReport, NoninnerCase, NoninnerCertificate,
};
pub use profile::{derivation_norm_profile, lambda_derivative, NormOracle, ProfilePoint};
pub use report::{classify, ClassificationReport};
pub use space::{
    derivation_space, inner_dimension, inner_iff_kernel_vanishing, outer_dimension, solve_inner,
    DerivationSpace, InnerSolve, KernelReport,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, matrix_from_wire, matrix_to_wire, unvectorize, zeros, CMat, CVec, ComplexJson, C64,
};
use crate::poly::{Basis, NcPoly};
use crate::repn::{MatrixRep, RepJson};

#[derive(Clone, Debug, PartialEq)]
pub struct DerivationAtRep {
    rep: MatrixRep,
    d_vertex: Vec<CMat>,
    d_edge: Vec<CMat>,
}

impl DerivationAtRep {
    pub fn new(rep: &MatrixRep, d_vertex: Vec<CMat>, d_edge: Vec<CMat>) -> Result<Self> {
        let g = rep.graph();
        let n = rep.dimension();
        if d_vertex.len() != g.vertex_count() || d_edge.len() != g.edge_count() {
            return Err(Error::invalid("one value per vertex and per edge is required"));
        }
        if d_vertex.iter().chain(&d_edge).any(|m| m.shape() != (n, n)) {
            return Err(Error::invalid(format!("derivation values must be {n} x {n}")));
        }
        Ok(DerivationAtRep {
            rep: rep.clone(),
            d_vertex,
            d_edge,
        })
    }

    pub fn zero(rep: &MatrixRep) -> Self {
        let n = rep.dimension();
        let g = rep.graph();
        DerivationAtRep {
            rep: rep.clone(),
            d_vertex: vec![zeros(n); g.vertex_count()],
            d_edge: vec![zeros(n); g.edge_count()],
        }
    }

    /// `δ_X(a) = π(a)X − Xπ(a)`.
    pub fn inner_from(rep: &MatrixRep, x: &CMat) -> Self {
        let comm = |p: &CMat| p * x - x * p;
        DerivationAtRep {
            rep: rep.clone(),
            d_vertex: rep.vertex_images().iter().map(comm).collect(),
            d_edge: rep.edge_images().iter().map(comm).collect(),
        }
    }

    pub fn rep(&self) -> &MatrixRep {
        &self.rep
    }

    pub fn d_vertex(&self, v: usize) -> &CMat {
        &self.d_vertex[v]
    }

    pub fn d_edge(&self, e: usize) -> &CMat {
        &self.d_edge[e]
    }

    /// Generator values stacked as one vector: vertices first, then edges,
    /// each row-major.
    pub fn to_vector(&self) -> CVec {
        let n = self.rep.dimension();
        let mats: Vec<&CMat> = self.d_vertex.iter().chain(&self.d_edge).collect();
        CVec::from_fn(mats.len() * n * n, |k, _| {
            let m = mats[k / (n * n)];
            let r = k % (n * n);
            m[(r / n, r % n)]
        })
    }

    pub fn from_vector(rep: &MatrixRep, v: &CVec) -> Result<Self> {
        let n = rep.dimension();
        let g = rep.graph();
        let count = g.vertex_count() + g.edge_count();
        if v.len() != count * n * n {
            return Err(Error::invalid("coefficient vector has the wrong length"));
        }
        let mut mats: Vec<CMat> = (0..count)
            .map(|k| unvectorize(&v.rows(k * n * n, n * n).into_owned(), n))
            .collect();
        let d_edge = mats.split_off(g.vertex_count());
        Self::new(rep, mats, d_edge)
    }

    /// Frobenius norm of the stacked generator values.
    pub fn norm(&self) -> f64 {
        self.d_vertex
            .iter()
            .chain(&self.d_edge)
            .map(|m| frobenius(m).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rep != other.rep {
            return Err(Error::invalid("derivations live at different representations"));
        }
        let sum = |a: &[CMat], b: &[CMat]| a.iter().zip(b).map(|(x, y)| x + y).collect();
        Ok(DerivationAtRep {
            rep: self.rep.clone(),
            d_vertex: sum(&self.d_vertex, &other.d_vertex),
            d_edge: sum(&self.d_edge, &other.d_edge),
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        DerivationAtRep {
            rep: self.rep.clone(),
            d_vertex: self.d_vertex.iter().map(|m| m * c).collect(),
            d_edge: self.d_edge.iter().map(|m| m * c).collect(),
        }
    }

    /// Checks the defining relations of the path algebra against `D`.
    pub fn validate(&self, tol: f64) -> DerivationReport {
        let rep = &self.rep;
        let g = rep.graph();
        let n = rep.dimension();
        let p = rep.vertex_images();
        let dp = &self.d_vertex;
        let mut violations = Vec::new();
        let mut record = |relation: &str, at: String, value: f64| {
            if value > tol {
                violations.push(RelationViolation {
                    relation: relation.to_string(),
                    at,
                    value,
                });
            }
        };
        for v in 0..g.vertex_count() {
            let lhs = &dp[v] - (&p[v] * &dp[v] + &dp[v] * &p[v]);
            record("idempotent", format!("P_{}", g.vertex_name(v)), frobenius(&lhs));
            for w in (0..g.vertex_count()).filter(|&w| w != v) {
                let lhs = &p[v] * &dp[w] + &dp[v] * &p[w];
                let at = format!("P_{} P_{}", g.vertex_name(v), g.vertex_name(w));
                record("orthogonality", at, frobenius(&lhs));
            }
        }
        if unital(rep) {
            let total = dp.iter().fold(zeros(n), |acc, m| acc + m);
            record("unit", "Σ P_v".to_string(), frobenius(&total));
        }
        for e in 0..g.edge_count() {
            let (r, s) = (g.range(e), g.source(e));
            let l = rep.edge_image(e);
            let expanded = &dp[r] * l * &p[s] + &p[r] * &self.d_edge[e] * &p[s] + &p[r] * l * &dp[s];
            let at = format!("L_{}", g.edge_name(e));
            record("sandwich", at, frobenius(&(&self.d_edge[e] - expanded)));
        }
        let failed = |name: &str| violations.iter().any(|x| x.relation == name);
        DerivationReport {
            passed: violations.is_empty(),
            idempotent: !failed("idempotent"),
            orthogonality: !failed("orthogonality"),
            unit: !failed("unit"),
            sandwich: !failed("sandwich"),
            violations,
        }
    }

    /// `D` of a basis element by the Leibniz rule over its edges.
    pub fn basis_value(&self, b: &Basis) -> CMat {
        match b {
            Basis::Vertex(v) => self.d_vertex[*v].clone(),
            Basis::Word(w) => {
                let n = self.rep.dimension();
                let edges = w.edges();
                let imgs: Vec<&CMat> = edges.iter().map(|&e| self.rep.edge_image(e)).collect();
                // suffix[t] = π(e_{t+1} ... e_k)
                let mut suffix = vec![crate::linalg::identity(n); edges.len() + 1];
                for t in (0..edges.len()).rev() {
                    suffix[t] = imgs[t] * &suffix[t + 1];
                }
                let mut prefix = crate::linalg::identity(n);
                let mut acc = zeros(n);
                for (t, &e) in edges.iter().enumerate() {
                    acc += &prefix * &self.d_edge[e] * &suffix[t + 1];
                    prefix = &prefix * imgs[t];
                }
                acc
            }
        }
    }

    /// Linear Leibniz extension to polynomials.
    pub fn extend(&self, a: &NcPoly) -> Result<CMat> {
        if **a.graph() != **self.rep.graph() {
            return Err(Error::GraphMismatch);
        }
        if a.degree() > a.degree_cap() {
            return Err(Error::DegreeCap {
                degree: a.degree(),
                cap: a.degree_cap(),
            });
        }
        let n = self.rep.dimension();
        Ok(a.terms()
            .fold(zeros(n), |acc, (b, c)| acc + self.basis_value(b) * *c))
    }

    pub fn to_wire(&self) -> DerivationJson {
        let g = self.rep.graph();
        DerivationJson {
            d_edges: (0..g.edge_count())
                .map(|e| (g.edge_name(e).to_string(), matrix_to_wire(&self.d_edge[e])))
                .collect(),
            d_vertices: (0..g.vertex_count())
                .map(|v| (g.vertex_name(v).to_string(), matrix_to_wire(&self.d_vertex[v])))
                .collect(),
            rep: self.rep.to_wire(),
        }
    }

    pub fn from_wire(w: DerivationJson) -> Result<Self> {
        let rep = MatrixRep::from_wire(w.rep)?;
        let n = rep.dimension();
        let g = rep.graph().clone();
        let lookup = |map: &BTreeMap<String, Vec<Vec<ComplexJson>>>, name: &str| {
            map.get(name)
                .ok_or_else(|| Error::invalid(format!("missing derivation value for {name}")))
                .and_then(|m| matrix_from_wire(m, n))
        };
        if w.d_vertices.len() != g.vertex_count() || w.d_edges.len() != g.edge_count() {
            return Err(Error::invalid("derivation keys do not match the graph"));
        }
        let dv = g.vertices().iter().map(|v| lookup(&w.d_vertices, v)).collect::<Result<Vec<_>>>()?;
        let de = g.edges().iter().map(|e| lookup(&w.d_edges, &e.id)).collect::<Result<Vec<_>>>()?;
        Self::new(&rep, dv, de)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("derivation serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(text)?)
    }
}

fn unital(rep: &MatrixRep) -> bool {
    let n = rep.dimension();
    let total = rep.vertex_images().iter().fold(zeros(n), |acc, m| acc + m);
    frobenius(&(total - crate::linalg::identity(n))) <= 1e-12
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationViolation {
    pub relation: String,
    pub at: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub passed: bool,
    pub idempotent: bool,
    pub orthogonality: bool,
    pub unit: bool,
    pub sandwich: bool,
    pub violations: Vec<RelationViolation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationJson {
    pub d_edges: BTreeMap<String, Vec<Vec<ComplexJson>>>,
    pub d_vertices: BTreeMap<String, Vec<Vec<ComplexJson>>>,
    pub rep: RepJson,
}
