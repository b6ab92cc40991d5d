//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Everything here works with column vectors of length `rows` and treats
//! ranks numerically: a singular value counts when it exceeds
//! `rel_tol * sigma_max` (and an absolute floor, so an all-zero input has
//! rank zero rather than rank-by-roundoff).

use nalgebra::{DMatrix, DVector, Dyn, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative singular-value threshold used for ranks and nullspaces.
pub const RANK_TOL: f64 = 1e-10;
/// Singular values below this are zero regardless of scale.
pub const ABS_FLOOR: f64 = 1e-13;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// The elementary matrix `e_{i,j}` (zero-based indices).
pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Entries this far below the largest are flushed before factorizing.
const FLUSH: f64 = 1e-30;

/// SVD of the input scaled to unit max entry, with negligible entries
/// flushed to zero, computed by `faer`. (The complex SVD in `nalgebra` loses
/// accuracy on clustered singular values and yields NaN on underflowing
/// columns, both of which the commutator and span matrices here produce.)
pub fn svd(a: &CMat, want_u: bool, want_v: bool) -> SVD<C64, Dyn, Dyn> {
    let (r, k) = (a.nrows(), a.ncols());
    let m = r.min(k);
    let scale = max_abs(a);
    if m == 0 || scale == 0.0 || !scale.is_finite() {
        return SVD {
            u: want_u.then(|| CMat::identity(r, m)),
            v_t: want_v.then(|| CMat::identity(m, k)),
            singular_values: DVector::from_element(m, if scale.is_finite() { 0.0 } else { f64::NAN }),
        };
    }
    let b = faer::Mat::<C64>::from_fn(r, k, |i, j| {
        let z = a[(i, j)];
        if z.norm() < FLUSH * scale {
            C64::new(0.0, 0.0)
        } else {
            z / scale
        }
    });
    if !want_u && !want_v {
        let s = b.singular_values().expect("svd converges");
        return SVD {
            u: None,
            v_t: None,
            singular_values: DVector::from_iterator(m, s.into_iter().map(|x| x * scale)),
        };
    }
    let f = b.thin_svd().expect("svd converges");
    let (u, v, s) = (f.U(), f.V(), f.S().column_vector());
    SVD {
        u: want_u.then(|| CMat::from_fn(r, m, |i, j| u[(i, j)])),
        v_t: want_v.then(|| CMat::from_fn(m, k, |i, j| v[(j, i)].conj())),
        singular_values: DVector::from_fn(m, |i, _| s[i].re * scale),
    }
}

fn singular_values(a: &CMat) -> Vec<f64> {
    svd(a, false, false).singular_values.iter().cloned().collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return frobenius(m);
    }
    singular_values(m).into_iter().fold(0.0, f64::max)
}

/// Row-major flattening of a square matrix: entry `(i, j)` lands at `i * n + j`.
pub fn vectorize(m: &CMat) -> CVec {
    let n = m.ncols();
    CVec::from_fn(m.nrows() * n, |k, _| m[(k / n, k % n)])
}

pub fn unvectorize(v: &CVec, n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

fn threshold(sigmas: &[f64], rel_tol: f64) -> f64 {
    let smax = sigmas.iter().cloned().fold(0.0, f64::max);
    (rel_tol * smax).max(ABS_FLOOR)
}

/// Numerical rank of `a`.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = singular_values(a);
    let t = threshold(&s, rel_tol);
    s.iter().filter(|&&x| x > t).count()
}

/// Stacks column vectors into a matrix with `rows` rows.
pub fn columns(rows: usize, cols: &[CVec]) -> CMat {
    let mut m = CMat::zeros(rows, cols.len());
    for (j, v) in cols.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Orthonormal basis of the column span of `cols`.
pub fn orthonormal_basis(rows: usize, cols: &[CVec], rel_tol: f64) -> Vec<CVec> {
    if cols.is_empty() {
        return Vec::new();
    }
    let a = columns(rows, cols);
    let svd = svd(&a, true, false);
    let u = svd.u.expect("left singular vectors requested");
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let t = threshold(&s, rel_tol);
    s.iter()
        .enumerate()
        .filter(|(_, &x)| x > t)
        .map(|(k, _)| u.column(k).into_owned())
        .collect()
}

/// Orthonormal basis of the right nullspace `{x : a x = 0}`.
pub fn nullspace(a: &CMat, rel_tol: f64) -> Vec<CVec> {
    let cols = a.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // thin SVD only yields min(rows, cols) right vectors; pad to a full set
    let padded = if a.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = svd(&padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let t = threshold(&s, rel_tol);
    s.iter()
        .enumerate()
        .filter(|(_, &x)| x <= t)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// Least-squares solution of `a x = b` by truncated SVD.
///
/// Returns `(x, ||a x - b||)`. Rank deficiency is expected: the minimum-norm
/// solution is returned.
pub fn least_squares(a: &CMat, b: &CVec, rel_tol: f64) -> (CVec, f64) {
    if a.ncols() == 0 {
        return (CVec::zeros(0), b.norm());
    }
    let svd = svd(a, true, true);
    let s: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let t = threshold(&s, rel_tol);
    let x = svd
        .solve(b, t)
        .unwrap_or_else(|_| CVec::zeros(a.ncols()));
    let r = (a * &x - b).norm();
    (x, r)
}

/// Coefficients of `vec(A X B)` with respect to `vec(X)`, both row-major.
///
/// Row `i * n + j`, column `k * n + l` holds `A[i,k] * B[l,j]`.
pub fn sandwich_operator(a: &CMat, b: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros(n * n, n * n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for l in 0..n {
                for j in 0..n {
                    let blj = b[(l, j)];
                    if blj != C64::new(0.0, 0.0) {
                        out[(i * n + j, k * n + l)] += aik * blj;
                    }
                }
            }
        }
    }
    out
}

/// Largest value of `‖v x‖` over unit vectors `x` in the nullspace of `a`
/// (both with the same number of columns), with a maximizing `x`.
///
/// Works through the row space of `a`, which is small when `a` is wide, so
/// the nullspace itself is never formed.
pub fn norm_on_kernel(a: &CMat, v: &CMat, rel_tol: f64) -> (f64, Option<CVec>) {
    let cols = a.ncols();
    if cols == 0 {
        return (0.0, None);
    }
    let rows = orthonormal_basis(cols, &(0..a.nrows()).map(|i| a.row(i).adjoint()).collect::<Vec<_>>(), rel_tol);
    let mut r = v.clone();
    for q in &rows {
        // remove the row-space component: r -= (r q) q^*
        let rq = &r * q;
        r -= rq * q.adjoint();
    }
    if r.nrows() == 0 {
        return (0.0, None);
    }
    let svd = svd(&r, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (k, s) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (k, &s)| if s > best.1 { (k, s) } else { best });
    if s == 0.0 {
        return (0.0, None);
    }
    (s, Some(v_t.row(k).adjoint()))
}

/// Wire form of a complex scalar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexJson {
    fn from(z: C64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for C64 {
    fn from(z: ComplexJson) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Row-major nested arrays of `{re, im}`.
pub fn matrix_to_wire(m: &CMat) -> Vec<Vec<ComplexJson>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn matrix_from_wire(rows: &[Vec<ComplexJson>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("expected a {n} x {n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j].into()))
}
