//! The dense polynomial subalgebra of the graph tensor algebra: finite
//! complex combinations of vertex projections `P_v` and path words.

mod comm;
mod fock;

pub use comm::CommPoly;
pub use fock::{fock_basis, fock_norm_lower_bound};

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, PathWord};
use crate::linalg::C64;

/// Coefficients with modulus at or below this are dropped.
pub const PRUNE_TOL: f64 = 1e-14;
pub const DEFAULT_DEGREE_CAP: usize = 16;

/// A basis element of the path algebra: a vertex projection or a path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Vertex(usize),
    Word(PathWord),
}

impl Basis {
    pub fn degree(&self) -> usize {
        match self {
            Basis::Vertex(_) => 0,
            Basis::Word(w) => w.len(),
        }
    }

    /// Product of basis elements in the path algebra; `None` means zero.
    pub fn product(&self, other: &Basis, g: &DirectedGraph) -> Option<Basis> {
        match (self, other) {
            (Basis::Vertex(v), Basis::Vertex(w)) => (v == w).then_some(Basis::Vertex(*v)),
            (Basis::Vertex(v), Basis::Word(u)) => (*v == u.range(g)).then(|| other.clone()),
            (Basis::Word(u), Basis::Vertex(v)) => (*v == u.source(g)).then(|| self.clone()),
            (Basis::Word(u), Basis::Word(x)) => u.concat(x, g).map(Basis::Word),
        }
    }

    pub fn label(&self, g: &DirectedGraph) -> String {
        match self {
            Basis::Vertex(v) => format!("P_{}", g.vertex_name(*v)),
            Basis::Word(w) => format!("L_{}", g.word_label(w)),
        }
    }
}

/// Element of the free semigroupoid algebra of a finite graph.
#[derive(Clone, Debug)]
pub struct NcPoly {
    graph: Arc<DirectedGraph>,
    terms: BTreeMap<Basis, C64>,
    degree_cap: usize,
}

impl PartialEq for NcPoly {
    fn eq(&self, other: &Self) -> bool {
        self.same_graph(other) && self.terms == other.terms
    }
}

impl NcPoly {
    pub fn zero(graph: &Arc<DirectedGraph>) -> Self {
        NcPoly {
            graph: Arc::clone(graph),
            terms: BTreeMap::new(),
            degree_cap: DEFAULT_DEGREE_CAP,
        }
    }

    pub fn basis(graph: &Arc<DirectedGraph>, b: Basis) -> Self {
        Self::zero(graph).with_term(b, C64::new(1.0, 0.0))
    }

    /// `P_v`
    pub fn vertex(graph: &Arc<DirectedGraph>, v: usize) -> Self {
        Self::basis(graph, Basis::Vertex(v))
    }

    /// `L_e`
    pub fn edge(graph: &Arc<DirectedGraph>, e: usize) -> Self {
        Self::basis(graph, Basis::Word(PathWord::from_raw(vec![e])))
    }

    pub fn word(graph: &Arc<DirectedGraph>, w: PathWord) -> Self {
        Self::basis(graph, Basis::Word(w))
    }

    /// `sum_v P_v`, the unit of the algebra of a finite graph.
    pub fn unit(graph: &Arc<DirectedGraph>) -> Self {
        let mut p = Self::zero(graph);
        for v in 0..graph.vertex_count() {
            p.add_term(Basis::Vertex(v), C64::new(1.0, 0.0));
        }
        p
    }

    pub fn from_terms<I>(graph: &Arc<DirectedGraph>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Basis, C64)>,
    {
        let mut p = Self::zero(graph);
        for (b, c) in terms {
            p.add_term(b, c);
        }
        p
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    fn with_term(mut self, b: Basis, c: C64) -> Self {
        self.add_term(b, c);
        self
    }

    /// Accumulates `c * b`, pruning the result.
    pub fn add_term(&mut self, b: Basis, c: C64) {
        match self.terms.entry(b) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() <= PRUNE_TOL {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if c.norm() > PRUNE_TOL {
                    v.insert(c);
                }
            }
        }
    }

    pub fn graph(&self) -> &Arc<DirectedGraph> {
        &self.graph
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &Basis) -> C64 {
        self.terms.get(b).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Largest word length among the terms (vertices have degree 0).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Basis::degree).max().unwrap_or(0)
    }

    fn same_graph(&self, other: &NcPoly) -> bool {
        Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph
    }

    fn check_graph(&self, other: &NcPoly) -> Result<()> {
        if self.same_graph(other) {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_graph(other)?;
        let mut out = self.clone();
        out.degree_cap = self.degree_cap.min(other.degree_cap);
        for (b, c) in &other.terms {
            out.add_term(b.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> NcPoly {
        let mut out = NcPoly::zero(&self.graph).with_degree_cap(self.degree_cap);
        for (b, v) in &self.terms {
            out.add_term(b.clone(), c * v);
        }
        out
    }

    /// Bilinear extension of concatenation; errors past the degree cap.
    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly> {
        self.check_graph(other)?;
        let cap = self.degree_cap.min(other.degree_cap);
        let degree = self.degree() + other.degree();
        if !self.is_zero() && !other.is_zero() && degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        let mut acc: BTreeMap<Basis, C64> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some(p) = a.product(b, &self.graph) {
                    *acc.entry(p).or_insert(C64::new(0.0, 0.0)) += x * y;
                }
            }
        }
        acc.retain(|_, v| v.norm() > PRUNE_TOL);
        Ok(NcPoly {
            graph: Arc::clone(&self.graph),
            terms: acc,
            degree_cap: cap,
        })
    }

    /// `ab - ba`
    pub fn commutator(&self, other: &NcPoly) -> Result<NcPoly> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Commutative image on `B_n`: each word maps to the monomial counting its
    /// edge multiplicities and the vertex projection maps to 1.
    pub fn abelianize(&self) -> Result<CommPoly> {
        if self.graph.vertex_count() != 1 {
            return Err(Error::invalid(
                "abelianization is defined on single-vertex graphs only",
            ));
        }
        let nvars = self.graph.edge_count();
        Ok(CommPoly::from_terms(
            nvars,
            self.terms.iter().map(|(b, c)| {
                let mut exps = vec![0u32; nvars];
                if let Basis::Word(w) = b {
                    for &e in w.edges() {
                        exps[e] += 1;
                    }
                }
                (exps, *c)
            }),
        ))
    }

    /// Membership in the commutator ideal of `A_n`: the abelianization vanishes.
    pub fn in_commutator_ideal(&self) -> Result<bool> {
        Ok(self.abelianize()?.is_zero())
    }

    pub fn to_wire(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(b, c)| TermJson {
                word: match b {
                    Basis::Vertex(v) => WordJson::Vertex {
                        vertex: self.graph.vertex_name(*v).to_string(),
                    },
                    Basis::Word(w) => WordJson::Path(self.graph.word_names(w)),
                },
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_wire(graph: &Arc<DirectedGraph>, terms: &[TermJson]) -> Result<NcPoly> {
        let mut p = NcPoly::zero(graph);
        for t in terms {
            let b = match &t.word {
                WordJson::Vertex { vertex } => Basis::Vertex(graph.vertex(vertex)?),
                WordJson::Path(names) => {
                    let ids: Vec<&str> = names.iter().map(String::as_str).collect();
                    Basis::Word(graph.path(&ids)?)
                }
            };
            p.add_term(b, C64::new(t.re, t.im));
        }
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("polynomial serializes")
    }

    pub fn from_json(graph: &Arc<DirectedGraph>, text: &str) -> Result<NcPoly> {
        let terms: Vec<TermJson> = serde_json::from_str(text)?;
        NcPoly::from_wire(graph, &terms)
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(b, c)| format!("({}{:+}i)·{}", c.re, c.im, b.label(&self.graph)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub word: WordJson,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordJson {
    Path(Vec<String>),
    Vertex { vertex: String },
}

/// `terms` random basis elements of degree at most `max_deg`, with small
/// nonzero integer coefficients (so that cancellations are exact) or with
/// real and imaginary parts uniform in `[-1, 1]`.
pub fn random_poly<R: Rng>(g: &Arc<DirectedGraph>, max_deg: usize, terms: usize, integer: bool, rng: &mut R) -> NcPoly {
    let basis = fock_basis(g, max_deg);
    let mut p = NcPoly::zero(g).with_degree_cap(max_deg.max(DEFAULT_DEGREE_CAP));
    for _ in 0..terms {
        let b = basis[rng.random_range(0..basis.len())].clone();
        let c = if integer {
            let k = rng.random_range(1..=3) as f64;
            C64::new(if rng.random_bool(0.5) { k } else { -k }, 0.0)
        } else {
            C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        };
        p.add_term(b, c);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, single_vertex_graph};

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn add_and_scale() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let l1 = NcPoly::edge(&g, 0);
        let two = l1.add(&l1).unwrap();
        assert_eq!(two.coeff(&Basis::Word(PathWord::from_raw(vec![0]))), C64::new(2.0, 0.0));
        assert!(l1.add(&l1.scale(-one())).unwrap().is_zero());
        assert!(l1.scale(C64::new(0.0, 0.0)).is_zero());
    }

    #[test]
    fn multiplication_rules() {
        let g = Arc::new(cycle_graph(2).unwrap());
        let l1 = NcPoly::edge(&g, 0);
        let l2 = NcPoly::edge(&g, 1);
        let w = g.path(&["e1", "e2"]).unwrap();
        assert_eq!(l1.mul(&l2).unwrap(), NcPoly::word(&g, w));
        assert!(l1.mul(&l1).unwrap().is_zero());
        let pr = NcPoly::vertex(&g, g.range(0));
        let ps = NcPoly::vertex(&g, g.source(0));
        assert_eq!(pr.mul(&l1).unwrap().mul(&ps).unwrap(), l1);
        let p1 = NcPoly::vertex(&g, 0);
        let p2 = NcPoly::vertex(&g, 1);
        assert!(p1.mul(&p2).unwrap().is_zero());
        assert_eq!(p1.mul(&p1).unwrap(), p1);
    }

    #[test]
    fn commutators() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let l1 = NcPoly::edge(&g, 0);
        let l2 = NcPoly::edge(&g, 1);
        let c = l1.commutator(&l2).unwrap();
        let f12 = NcPoly::word(&g, g.path(&["f1", "f2"]).unwrap());
        let f21 = NcPoly::word(&g, g.path(&["f2", "f1"]).unwrap());
        assert_eq!(c, f12.sub(&f21).unwrap());
        assert!(l1.commutator(&l1).unwrap().is_zero());
        let p = NcPoly::vertex(&g, 0);
        assert!(p.commutator(&p).unwrap().is_zero());
    }

    #[test]
    fn degree_cap_is_an_error() {
        let g = Arc::new(single_vertex_graph(1).unwrap());
        let l = NcPoly::edge(&g, 0).with_degree_cap(3);
        let l3 = l.mul(&l).unwrap().mul(&l).unwrap();
        assert!(matches!(l3.mul(&l), Err(Error::DegreeCap { degree: 4, cap: 3 })));
    }

    #[test]
    fn graph_mismatch() {
        let a = Arc::new(single_vertex_graph(1).unwrap());
        let b = Arc::new(cycle_graph(2).unwrap());
        assert!(matches!(
            NcPoly::edge(&a, 0).add(&NcPoly::edge(&b, 0)),
            Err(Error::GraphMismatch)
        ));
        // structurally equal graphs are interchangeable
        let a2 = Arc::new(single_vertex_graph(1).unwrap());
        assert!(NcPoly::edge(&a, 0).mul(&NcPoly::edge(&a2, 0)).is_ok());
    }

    #[test]
    fn abelianization() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let l1 = NcPoly::edge(&g, 0);
        let l2 = NcPoly::edge(&g, 1);
        let ab = l1.mul(&l2).unwrap().abelianize().unwrap();
        assert_eq!(ab, CommPoly::monomial(2, &[1, 1], one()));
        assert!(l1.commutator(&l2).unwrap().abelianize().unwrap().is_zero());
        let three = NcPoly::vertex(&g, 0).scale(C64::new(3.0, 0.0));
        assert_eq!(three.abelianize().unwrap(), CommPoly::constant(2, C64::new(3.0, 0.0)));
        let c2 = Arc::new(cycle_graph(2).unwrap());
        assert!(NcPoly::edge(&c2, 0).abelianize().is_err());
    }

    #[test]
    fn commutator_ideal_membership() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let l1 = NcPoly::edge(&g, 0);
        let l2 = NcPoly::edge(&g, 1);
        let comm = l1.commutator(&l2).unwrap();
        assert!(comm.in_commutator_ideal().unwrap());
        assert!(!l1.in_commutator_ideal().unwrap());
        let sandwiched = l1.mul(&comm).unwrap().mul(&l2).unwrap();
        assert!(sandwiched.in_commutator_ideal().unwrap());
    }

    #[test]
    fn json_round_trip() {
        let g = Arc::new(cycle_graph(2).unwrap());
        let p = NcPoly::from_terms(
            &g,
            [
                (Basis::Vertex(1), C64::new(0.5, -1.0)),
                (Basis::Word(g.path(&["e1", "e2"]).unwrap()), C64::new(2.0, 0.25)),
            ],
        );
        let text = p.to_json();
        assert!(text.contains("\"vertex\": \"v2\""));
        assert_eq!(NcPoly::from_json(&g, &text).unwrap(), p);
        assert!(NcPoly::from_json(&g, r#"[{"word":["e1","e1"],"re":1,"im":0}]"#).is_err());
    }
}
