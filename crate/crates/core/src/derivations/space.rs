use serde::{Deserialize, Serialize};

use super::{unital, DerivationAtRep};
use crate::error::{Error, Result};
use crate::linalg::{
    columns, identity, least_squares, norm_on_kernel, nullspace, rank, sandwich_operator, unvectorize,
    vectorize, CMat, CVec, C64, RANK_TOL,
};
use crate::poly::fock_basis;
use crate::repn::{image_dimension, MatrixRep};

/// An orthonormal basis (in the stacked coefficient inner product) of all
/// derivations at a representation.
#[derive(Clone, Debug)]
pub struct DerivationSpace {
    pub dimension: usize,
    pub basis: Vec<DerivationAtRep>,
}

/// Writes the block `op` acting on unknown block `col` into rows starting
/// at `row`.
fn put(m: &mut CMat, row: usize, col: usize, op: &CMat) {
    let k = op.nrows();
    let mut view = m.view_mut((row, col * k), (k, k));
    view += op;
}

/// Solves the linear relations a derivation must satisfy on the generators.
///
/// Imposing `D = 0` on the defining relations of the path algebra
/// (`P_v P_w = δ_{vw} P_v`, `L_e = P_{r(e)} L_e P_{s(e)}` and, for unital
/// `π`, `Σ P_v = 1`) is enough: `π` kills the relation ideal, so a
/// Leibniz extension vanishing on the relations vanishes on the ideal.
pub fn derivation_space(rep: &MatrixRep) -> DerivationSpace {
    let g = rep.graph();
    let n = rep.dimension();
    let (nv, ne) = (g.vertex_count(), g.edge_count());
    let k = n * n;
    let id = identity(n);
    let p = rep.vertex_images();
    let with_unit = unital(rep);
    let blocks = nv + nv * nv.saturating_sub(1) + usize::from(with_unit) + ne;
    let mut m = CMat::zeros(blocks * k, (nv + ne) * k);
    let mut row = 0;
    let eye = identity(k);
    for v in 0..nv {
        let op = &eye - sandwich_operator(&p[v], &id) - sandwich_operator(&id, &p[v]);
        put(&mut m, row, v, &op);
        row += k;
        for w in (0..nv).filter(|&w| w != v) {
            put(&mut m, row, w, &sandwich_operator(&p[v], &id));
            put(&mut m, row, v, &sandwich_operator(&id, &p[w]));
            row += k;
        }
    }
    if with_unit {
        for v in 0..nv {
            put(&mut m, row, v, &eye);
        }
        row += k;
    }
    for e in 0..ne {
        let (r, s) = (g.range(e), g.source(e));
        let l = rep.edge_image(e);
        put(&mut m, row, nv + e, &(&eye - sandwich_operator(&p[r], &p[s])));
        put(&mut m, row, r, &-sandwich_operator(&id, &(l * &p[s])));
        put(&mut m, row, s, &-sandwich_operator(&(&p[r] * l), &id));
        row += k;
    }
    let basis: Vec<DerivationAtRep> = nullspace(&m, RANK_TOL)
        .iter()
        .map(|v| DerivationAtRep::from_vector(rep, v).expect("length matches"))
        .collect();
    DerivationSpace {
        dimension: basis.len(),
        basis,
    }
}

/// Matrix of `X ↦ (π(g)X − Xπ(g))_g` over all generators, acting on
/// row-major `vec(X)`.
fn inner_operator(rep: &MatrixRep) -> CMat {
    let n = rep.dimension();
    let id = identity(n);
    let gens: Vec<&CMat> = rep.vertex_images().iter().chain(rep.edge_images()).collect();
    let k = n * n;
    let mut m = CMat::zeros(gens.len() * k, k);
    for (t, p) in gens.iter().enumerate() {
        let op = sandwich_operator(p, &id) - sandwich_operator(&id, p);
        m.view_mut((t * k, 0), (k, k)).copy_from(&op);
    }
    m
}

/// Dimension of `{δ_X : X ∈ M_n}`, i.e. `n²` minus the dimension of the
/// commutant of the image.
pub fn inner_dimension(rep: &MatrixRep) -> usize {
    rank(&inner_operator(rep), RANK_TOL)
}

pub fn outer_dimension(rep: &MatrixRep) -> usize {
    derivation_space(rep).dimension - inner_dimension(rep)
}

#[derive(Clone, Debug)]
pub struct InnerSolve {
    /// Present when the normalized residual is within tolerance.
    pub x: Option<CMat>,
    /// Least-squares minimizer regardless of success.
    pub best: CMat,
    /// `‖δ_X − D‖ / ‖D‖` over the generators (0 for `D = 0`).
    pub residual: f64,
}

/// Least-squares search for `X` with `δ_X = D` on every generator.
pub fn solve_inner(d: &DerivationAtRep, tol: f64) -> InnerSolve {
    let rep = d.rep();
    let n = rep.dimension();
    let rhs = d.to_vector();
    let scale = rhs.norm();
    if scale == 0.0 {
        return InnerSolve {
            x: Some(CMat::zeros(n, n)),
            best: CMat::zeros(n, n),
            residual: 0.0,
        };
    }
    let (sol, res) = least_squares(&inner_operator(rep), &rhs, RANK_TOL);
    let best = unvectorize(&sol, n);
    let residual = res / scale;
    InnerSolve {
        x: (residual <= tol).then(|| best.clone()),
        best,
        residual,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub inner: bool,
    pub residual: f64,
    pub kernel_vanishes: bool,
    /// Largest `‖D(k)‖ / ‖D‖` over unit-norm kernel coefficient vectors.
    pub kernel_max: f64,
    pub kernel_size: usize,
    pub agree: bool,
    /// Leading terms of the worst kernel element, when `D` does not vanish.
    pub witnesses: Vec<String>,
}

/// Compares the two sides of the criterion "inner iff `D` kills `ker π`"
/// on the kernel of `π` restricted to words of length at most `max_len`.
pub fn inner_iff_kernel_vanishing(d: &DerivationAtRep, max_len: usize, tol: f64) -> Result<KernelReport> {
    let rep = d.rep();
    let n = rep.dimension();
    if image_dimension(rep, 2 * n) != n * n {
        return Err(Error::Precondition(
            "the representation is not onto the full matrix algebra".to_string(),
        ));
    }
    let solve = solve_inner(d, tol);
    let scale = d.norm();
    let basis = fock_basis(rep.graph(), max_len);
    let images = columns(n * n, &basis.iter().map(|b| vectorize(&rep.basis_image(b))).collect::<Vec<_>>());
    let values = columns(n * n, &basis.iter().map(|b| vectorize(&d.basis_value(b))).collect::<Vec<_>>());
    let kernel_size = basis.len() - rank(&images, RANK_TOL);
    let (val, worst) = norm_on_kernel(&images, &values, RANK_TOL);
    let kernel_max = if scale == 0.0 { 0.0 } else { val / scale };
    let mut witnesses = Vec::new();
    if kernel_max > tol {
        if let Some(k) = worst {
            witnesses.push(leading_label(rep, &basis, &k));
        }
    }
    let inner = solve.x.is_some();
    let kernel_vanishes = kernel_max <= tol;
    Ok(KernelReport {
        inner,
        residual: solve.residual,
        kernel_vanishes,
        kernel_max,
        kernel_size,
        agree: inner == kernel_vanishes,
        witnesses,
    })
}

fn leading_label(rep: &MatrixRep, basis: &[crate::poly::Basis], k: &CVec) -> String {
    let g = rep.graph();
    let mut terms: Vec<(f64, usize)> = k.iter().enumerate().map(|(i, c)| (c.norm(), i)).collect();
    terms.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    terms
        .iter()
        .take(3)
        .filter(|(m, _)| *m > 1e-8)
        .map(|&(_, i)| {
            let c: C64 = k[i];
            format!("({:.3}{:+.3}i){}", c.re, c.im, basis[i].label(g))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graph::{cycle_graph, single_vertex_graph};
    use crate::linalg::{c, zeros};
    use crate::repn::pi_w_lambda_mu;

    fn cycle_rep(n: usize, lam: C64) -> MatrixRep {
        let g = Arc::new(cycle_graph(n).unwrap());
        let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        pi_w_lambda_mu(&g, &g.path(&refs).unwrap(), lam, C64::from_polar(1.0, 0.3)).unwrap()
    }

    /// Brute force over the single-loop algebra: D(P) and D(L) scalars with
    /// D(P) = 2 D(P) and D(L) = D(P)λ + D(L) + λ D(P).
    #[test]
    fn one_loop_space() {
        for lam in [c(0.5, 0.0), c(0.0, 0.0), c(-0.3, 0.9)] {
            let g = Arc::new(single_vertex_graph(1).unwrap());
            let rep = pi_w_lambda_mu(&g, &g.path(&["f1"]).unwrap(), lam, c(1.0, 0.0)).unwrap();
            let space = derivation_space(&rep);
            assert_eq!(space.dimension, 1);
            let d = &space.basis[0];
            assert!(d.d_vertex(0).norm() < 1e-12);
            assert!((d.d_edge(0).norm() - 1.0).abs() < 1e-12);
            assert_eq!(inner_dimension(&rep), 0);
            assert_eq!(outer_dimension(&rep), 1);
        }
    }

    #[test]
    fn inner_derivations_lie_in_the_space() {
        let rep = cycle_rep(2, c(0.5, 0.0));
        let space = derivation_space(&rep);
        assert!(space.dimension >= 3);
        assert_eq!(inner_dimension(&rep), 3);
        assert!(outer_dimension(&rep) >= 1);
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 0.25));
        let d = DerivationAtRep::inner_from(&rep, &x).to_vector();
        let mut rest = d.clone();
        for b in &space.basis {
            let v = b.to_vector();
            rest -= &v * v.dotc(&d);
        }
        assert!(rest.norm() < 1e-10);
        for b in &space.basis {
            assert!(b.validate(1e-10).passed);
        }
    }

    #[test]
    fn solve_inner_recovers_commutators() {
        let rep = cycle_rep(3, c(0.3, 0.2));
        let x = CMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64 * 0.1, 0.2));
        let d = DerivationAtRep::inner_from(&rep, &x);
        let s = solve_inner(&d, 1e-10);
        let y = s.x.expect("inner");
        assert!(s.residual < 1e-12);
        assert!((DerivationAtRep::inner_from(&rep, &y).to_vector() - d.to_vector()).norm() < 1e-10);
        let z = solve_inner(&DerivationAtRep::zero(&rep), 1e-10);
        assert_eq!(z.x.unwrap(), zeros(3));
    }

    #[test]
    fn kernel_criterion_on_both_sides() {
        let rep = cycle_rep(2, c(0.5, 0.0));
        let x = CMat::from_fn(2, 2, |i, j| c(i as f64, 1.0 + j as f64));
        let inner = DerivationAtRep::inner_from(&rep, &x);
        let r = inner_iff_kernel_vanishing(&inner, 8, 1e-9).unwrap();
        assert!(r.inner && r.kernel_vanishes && r.agree);

        let space = derivation_space(&rep);
        let outer = space
            .basis
            .iter()
            .find(|b| solve_inner(b, 1e-9).x.is_none())
            .expect("an outer derivation exists for |λ| < 1");
        let r = inner_iff_kernel_vanishing(outer, 8, 1e-9).unwrap();
        assert!(!r.inner && !r.kernel_vanishes && r.agree);
        assert!(!r.witnesses.is_empty());

        let flat = cycle_rep(2, c(0.0, 0.0));
        assert!(inner_iff_kernel_vanishing(&DerivationAtRep::zero(&flat), 4, 1e-9).is_err());
    }
}
