//! Characters (scalar representations) of the graph algebra and their point
//! derivations.
//!
//! A character is fixed by one vertex `v0` with `χ(P_{v0}) = 1` and a point
//! `λ` of the closed unit ball, indexed by loops at `v0`; every other
//! generator goes to zero.

mod boundary;
mod deriv;

pub use boundary::{
    boundary_peaking_witness, boundary_profile, exp_orbit_diagnostic, inner_range_in_commutator_check, peaking_value,
    PeakingReport, RangeReport,
};
pub use deriv::{
    canonical_derivation, cauchy_bound, cauchy_bound_check, char_derivation, decompose,
    derivative_formula_check, extend_char, parametrization_rank, CauchyReport, CharDerivation,
    Decomposition, FormulaReport, ParametrizationReport,
};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::{ComplexJson, C64};
use crate::poly::{Basis, CommPoly, NcPoly};

pub const BALL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    graph: Arc<DirectedGraph>,
    v0: usize,
    loops: Vec<usize>,
    lambda: Vec<C64>,
    /// `slot[e]` is the position of edge `e` in `loops`.
    slot: Vec<Option<usize>>,
}

impl Character {
    pub fn new(graph: &Arc<DirectedGraph>, v0: usize, loops: Vec<usize>, lambda: Vec<C64>) -> Result<Self> {
        if v0 >= graph.vertex_count() {
            return Err(Error::invalid(format!("vertex index {v0} out of range")));
        }
        if loops.len() != lambda.len() {
            return Err(Error::invalid("one coordinate per loop is required"));
        }
        let mut slot = vec![None; graph.edge_count()];
        for (i, &e) in loops.iter().enumerate() {
            if e >= graph.edge_count() || graph.source(e) != v0 || graph.range(e) != v0 {
                return Err(Error::invalid(format!(
                    "edge {e} is not a loop at {}",
                    graph.vertex_name(v0)
                )));
            }
            if slot[e].replace(i).is_some() {
                return Err(Error::invalid(format!("loop {} listed twice", graph.edge_name(e))));
            }
        }
        let norm = l2(&lambda);
        if norm > 1.0 + BALL_TOL {
            return Err(Error::invalid(format!("‖λ‖ = {norm} exceeds 1")));
        }
        Ok(Character {
            graph: graph.clone(),
            v0,
            loops,
            lambda,
            slot,
        })
    }

    /// The character at `v0` over all its loops, in edge order.
    pub fn at_vertex(graph: &Arc<DirectedGraph>, v0: &str, lambda: Vec<C64>) -> Result<Self> {
        let v = graph.vertex(v0)?;
        Self::new(graph, v, graph.loops_at(v), lambda)
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn v0(&self) -> usize {
        self.v0
    }

    pub fn loops(&self) -> &[usize] {
        &self.loops
    }

    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }

    pub fn norm(&self) -> f64 {
        l2(&self.lambda)
    }

    pub fn is_boundary(&self) -> bool {
        (self.norm() - 1.0).abs() <= BALL_TOL
    }

    pub(crate) fn slot(&self, e: usize) -> Option<usize> {
        self.slot[e]
    }

    pub fn eval_basis(&self, b: &Basis) -> C64 {
        match b {
            Basis::Vertex(v) if *v == self.v0 => C64::new(1.0, 0.0),
            Basis::Vertex(_) => C64::new(0.0, 0.0),
            Basis::Word(w) => w.edges().iter().fold(C64::new(1.0, 0.0), |acc, &e| match self.slot[e] {
                Some(i) => acc * self.lambda[i],
                None => C64::new(0.0, 0.0),
            }),
        }
    }

    /// The image of `a` as a polynomial in commuting variables, one per
    /// loop: words outside the loops at `v0` and other vertices vanish.
    /// On a one-vertex graph this is the abelianization.
    pub fn gelfand(&self, a: &NcPoly) -> Result<CommPoly> {
        check_graph(self, a)?;
        let m = self.loops.len();
        let terms = a.terms().filter_map(|(b, c)| match b {
            Basis::Vertex(v) => (*v == self.v0).then(|| (vec![0u32; m], *c)),
            Basis::Word(w) => {
                let mut exps = vec![0u32; m];
                for &e in w.edges() {
                    exps[self.slot[e]?] += 1;
                }
                Some((exps, *c))
            }
        });
        Ok(CommPoly::from_terms(m, terms))
    }

    pub fn to_wire(&self) -> CharacterJson {
        CharacterJson {
            v0: self.graph.vertex_name(self.v0).to_string(),
            loops: self.loops.iter().map(|&e| self.graph.edge_name(e).to_string()).collect(),
            lambda: self.lambda.iter().map(|&z| z.into()).collect(),
        }
    }

    pub fn from_wire(graph: &Arc<DirectedGraph>, w: &CharacterJson) -> Result<Self> {
        let v0 = graph.vertex(&w.v0)?;
        let loops = w.loops.iter().map(|e| graph.edge(e)).collect::<Result<Vec<_>>>()?;
        Self::new(graph, v0, loops, w.lambda.iter().map(|&z| z.into()).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("character serializes")
    }

    pub fn from_json(graph: &Arc<DirectedGraph>, text: &str) -> Result<Self> {
        Self::from_wire(graph, &serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterJson {
    pub v0: String,
    pub loops: Vec<String>,
    pub lambda: Vec<ComplexJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterStructure {
    pub v0: String,
    pub loops: Vec<String>,
}

/// One family per vertex: characters at `v0` are parametrized by the closed
/// ball over the loops at `v0`.
pub fn enumerate_character_structures(g: &DirectedGraph) -> Vec<CharacterStructure> {
    (0..g.vertex_count())
        .map(|v| CharacterStructure {
            v0: g.vertex_name(v).to_string(),
            loops: g.loops_at(v).iter().map(|&e| g.edge_name(e).to_string()).collect(),
        })
        .collect()
}

pub fn eval_character(chi: &Character, a: &NcPoly) -> Result<C64> {
    check_graph(chi, a)?;
    Ok(a.terms().map(|(b, c)| chi.eval_basis(b) * c).sum())
}

pub(crate) fn l2(z: &[C64]) -> f64 {
    z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn check_graph(chi: &Character, a: &NcPoly) -> Result<()> {
    if **a.graph() != *chi.graph {
        return Err(Error::GraphMismatch);
    }
    Ok(())
}
