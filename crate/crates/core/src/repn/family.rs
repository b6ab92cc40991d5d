use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{check_disk, MatrixRep};
use crate::cycle_algebra::{GradedMatrixFn, Iota};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, PathWord};
use crate::linalg::{frobenius, unit, zeros, CMat, C64};
use crate::par::Strategy;

/// The representation attached to a path `w = (e_1, ..., e_n)`:
/// `P_v ↦ Σ_{s(e_j)=v} e_{j,j}` and `L_e ↦ Σ_{e_j=e} λ e_{j-1,j}`, where
/// `e_{0,1}` stands for `μ e_{n,1}`.
pub fn pi_w_lambda_mu(g: &Arc<DirectedGraph>, w: &PathWord, lambda: C64, mu: C64) -> Result<MatrixRep> {
    check_disk(lambda)?;
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("|μ| = {} is not 1", mu.norm())));
    }
    if w.is_empty() || w.edges().iter().any(|&e| e >= g.edge_count()) || !g.composable(w.edges()) {
        return Err(Error::NotAPath(format!("{w} is not a path")));
    }
    let n = w.len();
    let mut vertices = vec![zeros(n); g.vertex_count()];
    let mut edges = vec![zeros(n); g.edge_count()];
    for (j, &e) in w.edges().iter().enumerate() {
        vertices[g.source(e)] += unit(n, j, j);
        edges[e] += if j == 0 {
            unit(n, n - 1, 0) * (lambda * mu)
        } else {
            unit(n, j - 1, j) * lambda
        };
    }
    MatrixRep::new(g, vertices, edges)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub passed: bool,
    pub max_discrepancy: f64,
    /// Words plus vertices compared.
    pub elements_checked: usize,
    pub worst: Option<String>,
}

/// Words of bounded length together with their images in the cycle-algebra
/// model, reusable across many `(λ, μ)`.
pub struct FactorizationCheck {
    graph: Arc<DirectedGraph>,
    word: PathWord,
    /// `(word, index of the word with the last edge removed, last edge)`
    words: Vec<(PathWord, Option<usize>, usize)>,
    model: Vec<GradedMatrixFn>,
    vertex_model: Vec<GradedMatrixFn>,
}

impl FactorizationCheck {
    pub fn new(g: &Arc<DirectedGraph>, w: &PathWord, max_len: usize) -> Result<Self> {
        let iota = Iota::new(g, w)?;
        let mut words: Vec<(PathWord, Option<usize>, usize)> = Vec::new();
        let mut model: Vec<GradedMatrixFn> = Vec::new();
        let mut level: Vec<usize> = Vec::new();
        for e in 0..g.edge_count() {
            level.push(words.len());
            words.push((PathWord::from_raw(vec![e]), None, e));
            model.push(iota.edge_image(e).clone());
        }
        for _ in 1..max_len {
            let mut next = Vec::new();
            for &p in &level {
                let start = words[p].0.source(g);
                for e in (0..g.edge_count()).filter(|&e| g.range(e) == start) {
                    let mut edges = words[p].0.edges().to_vec();
                    edges.push(e);
                    next.push(words.len());
                    model.push(model[p].mul(iota.edge_image(e))?);
                    words.push((PathWord::from_raw(edges), Some(p), e));
                }
            }
            level = next;
        }
        if max_len == 0 {
            words.clear();
            model.clear();
        }
        let vertex_model = (0..g.vertex_count()).map(|v| iota.vertex_image(v).clone()).collect();
        Ok(FactorizationCheck {
            graph: g.clone(),
            word: w.clone(),
            words,
            model,
            vertex_model,
        })
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    /// Compares `τ_λ ∘ π_μ ∘ ι_w` against `π_{w,λ,μ}` on every stored word
    /// and vertex. The right-hand side is built by matrix products in the
    /// representation, independently of the model.
    pub fn run(&self, lambda: C64, mu: C64, tol: f64, strategy: Strategy) -> Result<FactorizationReport> {
        let rep = pi_w_lambda_mu(&self.graph, &self.word, lambda, mu)?;
        let mut direct: Vec<CMat> = Vec::with_capacity(self.words.len());
        for (_, parent, e) in &self.words {
            let m = match parent {
                None => rep.edge_image(*e).clone(),
                Some(p) => &direct[*p] * rep.edge_image(*e),
            };
            direct.push(m);
        }
        let gap = |f: &GradedMatrixFn, m: &CMat| -> Result<f64> {
            Ok(frobenius(&(f.mu_twist(mu)?.eval_at(lambda)? - m)))
        };
        let word_gaps = strategy.map_range(self.words.len(), |k| gap(&self.model[k], &direct[k]));
        let mut worst: Option<(f64, String)> = None;
        let mut consider = |d: f64, label: String| {
            if worst.as_ref().is_none_or(|(w, _)| d > *w || d.is_nan()) {
                worst = Some((d, label));
            }
        };
        for (k, d) in word_gaps.into_iter().enumerate() {
            consider(d?, format!("L_{}", self.graph.word_label(&self.words[k].0)));
        }
        for (v, f) in self.vertex_model.iter().enumerate() {
            consider(gap(f, rep.vertex_image(v))?, format!("P_{}", self.graph.vertex_name(v)));
        }
        let max = worst.as_ref().map_or(0.0, |w| w.0);
        Ok(FactorizationReport {
            passed: max <= tol,
            max_discrepancy: max,
            elements_checked: self.words.len() + self.vertex_model.len(),
            worst: worst.map(|w| w.1),
        })
    }
}

pub fn verify_factorization(
    g: &Arc<DirectedGraph>,
    w: &PathWord,
    lambda: C64,
    mu: C64,
    max_len: usize,
    tol: f64,
) -> Result<FactorizationReport> {
    FactorizationCheck::new(g, w, max_len)?.run(lambda, mu, tol, Strategy::default())
}
