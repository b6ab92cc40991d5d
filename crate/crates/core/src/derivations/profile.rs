use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::DerivationAtRep;
use crate::cycle_algebra::Iota;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, PathWord};
use crate::linalg::{rank, spectral_norm, svd, unit, unvectorize, vectorize, zeros, CMat, CVec, C64, RANK_TOL};
use crate::par::Strategy;
use crate::poly::{fock_basis, fock_norm_lower_bound, Basis, NcPoly};
use crate::repn::pi_w_lambda_mu;

const LAWSON_STEPS: usize = 60;

/// The derivation `d/dλ π_{w,λ,μ}`: zero on vertices and
/// `L_e ↦ Σ_{e_j=e} e_{j-1,j}` (with `e_{0,1} = μ e_{n,1}`).
pub fn lambda_derivative(g: &Arc<DirectedGraph>, w: &PathWord, lambda: C64, mu: C64) -> Result<DerivationAtRep> {
    let rep = pi_w_lambda_mu(g, w, lambda, mu)?;
    let n = w.len();
    let mut de = vec![zeros(n); g.edge_count()];
    for (j, &e) in w.edges().iter().enumerate() {
        de[e] += if j == 0 { unit(n, n - 1, 0) * mu } else { unit(n, j - 1, j) };
    }
    DerivationAtRep::new(&rep, vec![zeros(n); g.vertex_count()], de)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormOracle {
    /// Sup over the circle of the cycle-algebra image, on `grid` points.
    Circle { grid: usize },
    /// Fock truncation lower bound at truncation `N`.
    Fock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub n: usize,
    /// Running maximum over all truncations up to `n`.
    pub value: f64,
    /// Best ratio found at this truncation alone.
    pub at_n: f64,
    pub witness: String,
}

/// Estimates `sup{‖D(a)‖ : deg a ≤ N, ‖a‖ ≤ 1}` for each `N`.
///
/// Every reported value is realized by an explicit polynomial, so it is a
/// lower estimate of the supremum up to the accuracy of the norm oracle
/// (which, for the circle, is evaluated on a grid four times finer than the
/// one used to search).
pub fn derivation_norm_profile(
    d: &DerivationAtRep,
    w: &PathWord,
    ns: &[usize],
    oracle: NormOracle,
    strategy: Strategy,
) -> Result<Vec<ProfilePoint>> {
    let iota = Iota::new(d.rep().graph(), w)?;
    let points = strategy.map(ns, |&n| match oracle {
        NormOracle::Circle { grid } => circle_point(d, &iota, n, grid),
        NormOracle::Fock => fock_point(d, n),
    });
    let mut out = Vec::with_capacity(ns.len());
    let mut running: f64 = 0.0;
    for (&n, p) in ns.iter().zip(points) {
        let (at_n, witness) = p?;
        running = running.max(at_n);
        out.push(ProfilePoint {
            n,
            value: running,
            at_n,
            witness,
        });
    }
    Ok(out)
}

struct Candidate {
    ratio: f64,
    coeffs: CVec,
}

fn witness_label(g: &DirectedGraph, basis: &[Basis], a: &CVec) -> String {
    super::factor::leading_terms(g, basis, a)
}

fn circle_point(d: &DerivationAtRep, iota: &Iota, big_n: usize, grid: usize) -> Result<(f64, String)> {
    let g = d.rep().graph();
    let n = iota.n();
    let basis = fock_basis(g, big_n);
    let m = basis.len();
    let degs: Vec<usize> = basis.iter().map(Basis::degree).collect();
    let coef: Vec<CVec> = basis
        .iter()
        .map(|b| vectorize(&iota.basis_image(b).coefficient_matrix(b.degree())))
        .collect();
    // injectivity: images of distinct degrees are independent, so check per degree
    for k in 0..=big_n {
        let cols: Vec<CVec> = (0..m).filter(|&i| degs[i] == k).map(|i| coef[i].clone()).collect();
        if !cols.is_empty() && rank(&crate::linalg::columns(n * n, &cols), RANK_TOL) < cols.len() {
            return Err(Error::Precondition(
                "the cycle-algebra image is not injective here; use the Fock oracle".to_string(),
            ));
        }
    }
    let vals = CMat::from_fn(n * n, m, |r, c| vectorize(&d.basis_value(&basis[c]))[r]);
    let inner: CMat = CMat::from_fn(m, m, |i, j| coef[i].dotc(&coef[j]));
    let coarse = grid.max(8 * big_n).max(8);
    let fine = 4 * coarse;
    let zs: Vec<C64> = (0..coarse).map(|t| C64::from_polar(1.0, 2.0 * PI * t as f64 / coarse as f64)).collect();

    let sup = |a: &CVec, pts: usize| -> f64 {
        // group by degree, then Horner on each grid point
        let mut by_deg = vec![CVec::zeros(n * n); big_n + 1];
        for i in 0..m {
            by_deg[degs[i]] += &coef[i] * a[i];
        }
        (0..pts)
            .map(|t| {
                let z = C64::from_polar(1.0, 2.0 * PI * t as f64 / pts as f64);
                let v = by_deg.iter().rev().fold(CVec::zeros(n * n), |acc, c| acc * z + c);
                spectral_norm(&unvectorize(&v, n))
            })
            .fold(0.0, f64::max)
    };
    let realized = |a: &CVec| -> f64 {
        let s = sup(a, fine);
        if s == 0.0 {
            0.0
        } else {
            spectral_norm(&unvectorize(&(&vals * a), n)) / s
        }
    };

    let mut best = Candidate {
        ratio: 0.0,
        coeffs: CVec::zeros(m),
    };
    for i in 0..m {
        let mut e = CVec::zeros(m);
        e[i] = C64::new(1.0, 0.0);
        let r = realized(&e);
        if r > best.ratio {
            best = Candidate { ratio: r, coeffs: e };
        }
    }

    // Lawson-type reweighting: maximize ‖D a‖ against a weighted L² norm of
    // the image on the grid, moving weight to where the image peaks
    let mut weights = vec![1.0 / coarse as f64; coarse];
    for _ in 0..LAWSON_STEPS {
        // moments Σ_t w_t z_t^k for k in -N..=N
        let moments: Vec<C64> = (0..=2 * big_n)
            .map(|k| {
                let p = k as i32 - big_n as i32;
                zs.iter().zip(&weights).map(|(z, &wt)| z.powi(p) * wt).sum()
            })
            .collect();
        let mut gram = CMat::from_fn(m, m, |i, j| {
            inner[(i, j)] * moments[(degs[j] as i32 - degs[i] as i32 + big_n as i32) as usize]
        });
        let ridge = 1e-13 * (0..m).map(|i| gram[(i, i)].re).sum::<f64>().max(1e-300) / m as f64;
        for i in 0..m {
            gram[(i, i)] += C64::new(ridge, 0.0);
        }
        let Some(chol) = gram.clone().cholesky() else { break };
        let l = chol.l();
        let k = l
            .solve_lower_triangular(&CMat::identity(m, m))
            .expect("cholesky factor is invertible");
        let kadj = k.adjoint();
        let target = &vals * &kadj;
        let svd = svd(&target, false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let top = (0..svd.singular_values.len())
            .max_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
            .unwrap_or(0);
        if svd.singular_values.is_empty() || svd.singular_values[top] == 0.0 {
            break;
        }
        let y: CVec = v_t.row(top).adjoint();
        let a = &kadj * y;
        let r = realized(&a);
        if r > best.ratio {
            best = Candidate { ratio: r, coeffs: a.clone() };
        }
        // new weights proportional to w_t · |image at z_t|
        let mut by_deg = vec![CVec::zeros(n * n); big_n + 1];
        for i in 0..m {
            by_deg[degs[i]] += &coef[i] * a[i];
        }
        let mut total = 0.0;
        for (t, z) in zs.iter().enumerate() {
            let v = by_deg.iter().rev().fold(CVec::zeros(n * n), |acc, c| acc * *z + c);
            weights[t] *= v.norm();
            total += weights[t];
        }
        if total == 0.0 || !total.is_finite() {
            break;
        }
        weights.iter_mut().for_each(|x| *x /= total);
    }
    Ok((best.ratio, witness_label(g, &basis, &best.coeffs)))
}

fn fock_point(d: &DerivationAtRep, big_n: usize) -> Result<(f64, String)> {
    let g = d.rep().graph();
    let n = d.rep().dimension();
    let basis = fock_basis(g, big_n);
    let m = basis.len();
    let vals = CMat::from_fn(n * n, m, |r, c| vectorize(&d.basis_value(&basis[c]))[r]);
    let mut cands: Vec<CVec> = (0..m)
        .map(|i| {
            let mut e = CVec::zeros(m);
            e[i] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let svd = svd(&vals, false, true);
    if let Some(v_t) = svd.v_t {
        for k in 0..svd.singular_values.len().min(3) {
            if svd.singular_values[k] > 0.0 {
                cands.push(v_t.row(k).adjoint());
            }
        }
    }
    let mut best = (0.0f64, CVec::zeros(m));
    for a in cands {
        let poly = NcPoly::from_terms(g, basis.iter().cloned().zip(a.iter().copied()));
        if poly.is_zero() {
            continue;
        }
        let lb = fock_norm_lower_bound(&poly, big_n)?;
        if lb == 0.0 {
            continue;
        }
        let r = spectral_norm(&unvectorize(&(&vals * &a), n)) / lb;
        if r > best.0 {
            best = (r, a);
        }
    }
    Ok((best.0, witness_label(g, &basis, &best.1)))
}
