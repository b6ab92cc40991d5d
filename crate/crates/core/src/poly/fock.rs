//! Truncations of the left regular representation on the path space.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{paths_by_length, DirectedGraph};
use crate::linalg::{spectral_norm, CMat, C64};

use super::{Basis, NcPoly};

/// Truncations at or below this many basis paths use a dense SVD.
const DENSE_LIMIT: usize = 400;
const MAX_BASIS: usize = 200_000;
const POWER_STEPS: usize = 200;

/// Vertices followed by every path of length `1..=max_len`.
pub fn fock_basis(g: &DirectedGraph, max_len: usize) -> Vec<Basis> {
    let mut out: Vec<Basis> = (0..g.vertex_count()).map(Basis::Vertex).collect();
    out.extend(
        paths_by_length(g, max_len)
            .into_iter()
            .flatten()
            .map(Basis::Word),
    );
    out
}

/// Spectral norm of the compression of the left regular representation of
/// `a` to paths of length at most `truncation`.
///
/// Compressions only shrink norms, so this is a lower bound for the norm in
/// the tensor algebra, and it is nondecreasing in `truncation`. Large
/// truncations fall back to power iteration, whose Rayleigh quotient is still
/// a lower bound.
pub fn fock_norm_lower_bound(a: &NcPoly, truncation: usize) -> Result<f64> {
    if truncation < a.degree() {
        return Err(Error::Precondition(format!(
            "truncation {truncation} is below the degree {}",
            a.degree()
        )));
    }
    if a.is_zero() {
        return Ok(0.0);
    }
    let g = a.graph();
    let basis = fock_basis(g, truncation);
    if basis.len() > MAX_BASIS {
        return Err(Error::TooLarge(basis.len()));
    }
    let index: HashMap<&Basis, usize> = basis.iter().enumerate().map(|(i, b)| (b, i)).collect();
    // sparse entries (row, col, value) of the compressed operator
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    for (col, u) in basis.iter().enumerate() {
        for (x, c) in a.terms() {
            if let Some(y) = x.product(u, g) {
                if let Some(&row) = index.get(&y) {
                    entries.push((row, col, *c));
                }
            }
        }
    }
    let n = basis.len();
    if n <= DENSE_LIMIT {
        let mut m = CMat::zeros(n, n);
        for (r, c, v) in entries {
            m[(r, c)] += v;
        }
        return Ok(spectral_norm(&m));
    }
    Ok(power_norm(n, &entries))
}

fn power_norm(n: usize, entries: &[(usize, usize, C64)]) -> f64 {
    let apply = |x: &[C64]| {
        let mut y = vec![C64::new(0.0, 0.0); n];
        for &(r, c, v) in entries {
            y[r] += v * x[c];
        }
        y
    };
    let apply_adj = |y: &[C64]| {
        let mut x = vec![C64::new(0.0, 0.0); n];
        for &(r, c, v) in entries {
            x[c] += v.conj() * y[r];
        }
        x
    };
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // deterministic, non-degenerate start
    let mut x: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05))
        .collect();
    let mut best = 0.0f64;
    for _ in 0..POWER_STEPS {
        let nx = norm(&x);
        if nx == 0.0 {
            break;
        }
        x.iter_mut().for_each(|z| *z /= nx);
        let y = apply(&x);
        best = best.max(norm(&y));
        x = apply_adj(&y);
    }
    best
}
