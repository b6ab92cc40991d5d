use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DerivationAtRep;
use crate::cycle_algebra::Iota;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, PathWord};
use crate::linalg::{frobenius, norm_on_kernel, spectral_norm, unit, vectorize, zeros, CMat, C64, RANK_TOL};
use crate::poly::{fock_basis, fock_norm_lower_bound, Basis, NcPoly};
use crate::repn::pi_w_lambda_mu;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub factors: bool,
    /// Largest `‖D(k)‖ / ‖D‖` over unit-norm `k` in the kernel of `ι_w`.
    pub kernel_max: f64,
    /// Words killed by `ι_w` on which `D` is nonzero, shortest first, then
    /// the leading terms of the worst kernel element.
    pub witnesses: Vec<String>,
}

/// Whether `D` vanishes on the kernel of `ι_w` restricted to vertices and
/// words of length at most `max_len`.
pub fn factors_through_cycle(d: &DerivationAtRep, w: &PathWord, max_len: usize, tol: f64) -> Result<FactorReport> {
    let rep = d.rep();
    let g = rep.graph();
    let n = rep.dimension();
    let iota = Iota::new(g, w)?;
    if iota.n() != n {
        return Err(Error::invalid("cycle length differs from the representation size"));
    }
    let scale = d.norm();
    let basis = fock_basis(g, max_len);
    // ι images of basis elements are homogeneous; stack coefficients by degree
    let rows = (max_len + 1) * n * n;
    let mut a = CMat::zeros(rows, basis.len());
    let mut v = CMat::zeros(n * n, basis.len());
    let mut witnesses = Vec::new();
    for (col, b) in basis.iter().enumerate() {
        let img = iota.basis_image(b).coefficient_matrix(b.degree());
        let block = vectorize(&img);
        a.view_mut((b.degree() * n * n, col), (n * n, 1)).copy_from(&block);
        let dv = d.basis_value(b);
        v.set_column(col, &vectorize(&dv));
        if scale > 0.0 && img.norm() == 0.0 && frobenius(&dv) / scale > tol && witnesses.len() < 5 {
            witnesses.push(b.label(g));
        }
    }
    let (val, x) = norm_on_kernel(&a, &v, RANK_TOL);
    let kernel_max = if scale == 0.0 { 0.0 } else { val / scale };
    let factors = kernel_max <= tol;
    if !factors {
        if let Some(x) = x {
            witnesses.push(leading_terms(g, &basis, &x));
        }
    }
    Ok(FactorReport {
        factors,
        kernel_max,
        witnesses: if factors { Vec::new() } else { witnesses },
    })
}

pub(crate) fn leading_terms(g: &DirectedGraph, basis: &[Basis], x: &crate::linalg::CVec) -> String {
    let mut terms: Vec<(f64, usize)> = x.iter().enumerate().map(|(i, c)| (c.norm(), i)).collect();
    terms.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.cmp(&q.1)));
    terms
        .iter()
        .take(3)
        .filter(|(m, _)| *m > 1e-8)
        .map(|&(_, i)| format!("({:.3}{:+.3}i){}", x[i].re, x[i].im, basis[i].label(g)))
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum NoninnerCase {
    /// An edge off the cycle with `s(e) = s(e_i)` and `r(e) = s(e_j)`
    /// (1-based positions in the cycle).
    #[serde(rename = "i")]
    OffCycleEdge { edge: String, i: usize, j: usize },
    /// A loop occurring `multiplicity` times in a cycle of length at least 2.
    #[serde(rename = "ii")]
    LoopOnCycle { edge: String, multiplicity: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoninnerCertificate {
    pub exists: bool,
    pub cases: Vec<NoninnerCase>,
}

fn check_primitive_cycle(g: &DirectedGraph, w: &PathWord) -> Result<()> {
    if w.is_empty() || !g.is_cycle(w) || !w.is_primitive() {
        return Err(Error::invalid(format!("{} is not a primitive cycle", g.word_label(w))));
    }
    Ok(())
}

/// First `(i, j)` with `s(e) = s(e_i)` and `r(e) = s(e_j)`, 1-based.
fn positions(g: &DirectedGraph, w: &PathWord, e: usize) -> Option<(usize, usize)> {
    let at = |v: usize| w.edges().iter().position(|&x| g.source(x) == v).map(|p| p + 1);
    Some((at(g.source(e))?, at(g.range(e))?))
}

/// Decides whether some derivation at `π_{w,λ,μ}` fails to factor through
/// the cycle algebra, listing every edge that witnesses it.
///
/// A loop that makes up the whole cycle (length 1) is not counted: there
/// `ι_w` is injective, so every derivation factors.
pub fn noninner_exists(g: &DirectedGraph, w: &PathWord) -> Result<NoninnerCertificate> {
    check_primitive_cycle(g, w)?;
    let mut cases = Vec::new();
    for e in 0..g.edge_count() {
        if w.edges().contains(&e) {
            if g.is_loop(e) && w.len() >= 2 {
                let multiplicity = w.edges().iter().filter(|&&x| x == e).count();
                cases.push(NoninnerCase::LoopOnCycle {
                    edge: g.edge_name(e).to_string(),
                    multiplicity,
                });
            }
        } else if let Some((i, j)) = positions(g, w, e) {
            cases.push(NoninnerCase::OffCycleEdge {
                edge: g.edge_name(e).to_string(),
                i,
                j,
            });
        }
    }
    Ok(NoninnerCertificate {
        exists: !cases.is_empty(),
        cases,
    })
}

/// The derivation vanishing on every generator except `D(L_e) = e_{j,i}`,
/// for an off-cycle edge with `s(e) = s(e_i)` and `r(e) = s(e_j)`.
pub fn build_noninner_case_i(
    g: &Arc<DirectedGraph>,
    w: &PathWord,
    lambda: C64,
    mu: C64,
    e: usize,
) -> Result<DerivationAtRep> {
    check_primitive_cycle(g, w)?;
    if e >= g.edge_count() {
        return Err(Error::invalid(format!("edge index {e} out of range")));
    }
    if w.edges().contains(&e) {
        return Err(Error::invalid(format!("{} lies on the cycle", g.edge_name(e))));
    }
    let (i, j) = positions(g, w, e).ok_or_else(|| {
        Error::invalid(format!(
            "{} does not start and end at sources of the cycle",
            g.edge_name(e)
        ))
    })?;
    let rep = pi_w_lambda_mu(g, w, lambda, mu)?;
    let n = w.len();
    let mut de = vec![zeros(n); g.edge_count()];
    de[e] = unit(n, j - 1, i - 1);
    DerivationAtRep::new(&rep, vec![zeros(n); g.vertex_count()], de)
}

/// The derivation vanishing on every generator except `D(L_e) = π(P_v)`,
/// for a loop `e` at `v` lying on a cycle of length at least 2.
pub fn build_noninner_case_ii(
    g: &Arc<DirectedGraph>,
    w: &PathWord,
    lambda: C64,
    mu: C64,
    e: usize,
) -> Result<DerivationAtRep> {
    check_primitive_cycle(g, w)?;
    if e >= g.edge_count() || !w.edges().contains(&e) || !g.is_loop(e) {
        return Err(Error::invalid("the edge must be a loop lying on the cycle"));
    }
    if w.len() < 2 {
        return Err(Error::invalid(
            "a loop forming the whole cycle gives an injective ι_w; nothing fails to factor",
        ));
    }
    let rep = pi_w_lambda_mu(g, w, lambda, mu)?;
    let n = w.len();
    let mut de = vec![zeros(n); g.edge_count()];
    de[e] = rep.vertex_image(g.source(e)).clone();
    DerivationAtRep::new(&rep, vec![zeros(n); g.vertex_count()], de)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub samples: usize,
    /// Largest `‖D(X)‖ / (‖D(L_e)‖ · ‖X‖_N)` over `X = L_e X̃`.
    pub max_ratio: f64,
    pub passed: bool,
    pub continuity_verified: bool,
}

/// Samples `X = L_e X̃` with random `X̃` of degree at most `degree` and
/// compares `‖D(X)‖` with `‖D(L_e)‖` times the Fock lower bound for `‖X‖`
/// at truncation `deg X + extra`.
pub fn continuity_bound_check<R: Rng>(
    d: &DerivationAtRep,
    e: usize,
    samples: usize,
    degree: usize,
    extra: usize,
    rng: &mut R,
) -> Result<ContinuityReport> {
    let rep = d.rep();
    let g = rep.graph().clone();
    let de = spectral_norm(d.d_edge(e));
    let le = NcPoly::edge(&g, e);
    // X̃ only matters through basis elements that compose with L_e
    let usable: Vec<Basis> = fock_basis(&g, degree)
        .into_iter()
        .filter(|b| Basis::Word(PathWord::from_raw(vec![e])).product(b, &g).is_some())
        .collect();
    if usable.is_empty() {
        return Err(Error::invalid("no element composes with the edge"));
    }
    let mut max_ratio: f64 = 0.0;
    for _ in 0..samples {
        let terms = rng.random_range(1..=usable.len().min(6));
        let xt = NcPoly::from_terms(
            &g,
            (0..terms).map(|_| {
                let b = usable[rng.random_range(0..usable.len())].clone();
                (b, C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            }),
        );
        let x = le.mul(&xt)?;
        if x.is_zero() {
            continue;
        }
        let lb = fock_norm_lower_bound(&x, x.degree() + extra)?;
        let dx = spectral_norm(&d.extend(&x)?);
        let ratio = if de * lb == 0.0 { if dx == 0.0 { 0.0 } else { f64::INFINITY } } else { dx / (de * lb) };
        max_ratio = max_ratio.max(ratio);
    }
    // the continuity argument needs |λ| < 1
    let lam = rep.edge_images().iter().map(spectral_norm).fold(0.0, f64::max);
    Ok(ContinuityReport {
        samples,
        max_ratio,
        passed: max_ratio <= 1.0 + 1e-9,
        continuity_verified: lam < 1.0 - 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::{solve_inner, DerivationAtRep};
    use crate::graph::{cycle_graph, cycle_with_chord, single_vertex_graph};
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mu() -> C64 {
        C64::from_polar(1.0, 0.8)
    }

    #[test]
    fn plain_cycles_have_no_certificate() {
        for n in 2..=5 {
            let g = cycle_graph(n).unwrap();
            let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            assert!(!noninner_exists(&g, &g.path(&refs).unwrap()).unwrap().exists);
        }
        let b1 = single_vertex_graph(1).unwrap();
        assert!(!noninner_exists(&b1, &b1.path(&["f1"]).unwrap()).unwrap().exists);
    }

    #[test]
    fn chord_certificate() {
        let g = cycle_with_chord();
        let cert = noninner_exists(&g, &g.path(&["e1", "e2"]).unwrap()).unwrap();
        assert!(cert.exists);
        assert_eq!(
            cert.cases,
            vec![NoninnerCase::OffCycleEdge {
                edge: "c".into(),
                i: 1,
                j: 2
            }]
        );
    }

    #[test]
    fn case_i_construction() {
        let g = Arc::new(cycle_with_chord());
        let w = g.path(&["e1", "e2"]).unwrap();
        let cidx = g.edge("c").unwrap();
        let d = build_noninner_case_i(&g, &w, c(0.4, 0.0), mu(), cidx).unwrap();
        assert_eq!(d.d_edge(cidx), &unit(2, 1, 0));
        assert!(d.validate(1e-12).passed);
        assert!(solve_inner(&d, 1e-9).residual >= 0.1);
        let f = factors_through_cycle(&d, &w, 4, 1e-9).unwrap();
        assert!(!f.factors);
        assert_eq!(f.witnesses[0], "L_c");
        assert!(build_noninner_case_i(&g, &w, c(0.4, 0.0), mu(), 0).is_err());
    }

    #[test]
    fn case_ii_construction() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let w = g.path(&["f1", "f2"]).unwrap();
        let cert = noninner_exists(&g, &w).unwrap();
        assert_eq!(cert.cases.len(), 2);
        let lam = c(0.4, 0.0);
        let d = build_noninner_case_ii(&g, &w, lam, mu(), 0).unwrap();
        assert!(d.validate(1e-12).passed);
        assert!(solve_inner(&d, 1e-9).residual >= 0.1);
        let f = factors_through_cycle(&d, &w, 4, 1e-9).unwrap();
        assert!(!f.factors);
        assert_eq!(f.witnesses[0], "L_f1·f1");
        // D(L_f1^2) = 2 π(L_f1)
        let sq = NcPoly::word(&g, g.path(&["f1", "f1"]).unwrap());
        let expect = d.rep().edge_image(0) * c(2.0, 0.0);
        assert!((d.extend(&sq).unwrap() - expect).norm() < 1e-14);

        let b1 = Arc::new(single_vertex_graph(1).unwrap());
        assert!(build_noninner_case_ii(&b1, &b1.path(&["f1"]).unwrap(), lam, mu(), 0).is_err());
    }

    #[test]
    fn inner_derivations_factor() {
        let g = Arc::new(cycle_with_chord());
        let w = g.path(&["e1", "e2"]).unwrap();
        let rep = pi_w_lambda_mu(&g, &w, c(0.3, 0.3), mu()).unwrap();
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 - 0.3, j as f64 + 0.1));
        let d = DerivationAtRep::inner_from(&rep, &x);
        let f = factors_through_cycle(&d, &w, 5, 1e-9).unwrap();
        assert!(f.factors, "{f:?}");
        assert!(f.witnesses.is_empty());
    }

    #[test]
    fn continuity_of_constructions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = Arc::new(cycle_with_chord());
        let w = g.path(&["e1", "e2"]).unwrap();
        let cidx = g.edge("c").unwrap();
        let d = build_noninner_case_i(&g, &w, c(0.4, 0.0), mu(), cidx).unwrap();
        let r = continuity_bound_check(&d, cidx, 30, 6, 4, &mut rng).unwrap();
        assert!(r.passed && r.continuity_verified, "{r:?}");
    }
}
