//! The matrix-function model of the cycle-graph algebra: `n x n` matrices of
//! polynomials in `z` whose `(i, j)` entry only carries powers
//! `k ≡ j - i (mod n)`.
//!
//! Indices in the public constructors ([`GradedMatrixFn::z_gen`],
//! [`GradedMatrixFn::unit_proj`]) are 1-based to match the usual `Z_i`,
//! `e_{i,i}` names; everything else is zero-based.

mod iota;
mod twist;

pub use iota::{iota_onto_predicate, ran_iota_contains, Iota};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMat, C64};
use crate::par::Strategy;
use crate::poly::PRUNE_TOL;

pub const DEFAULT_GRID: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct GradedMatrixFn {
    n: usize,
    /// Row-major; entry `i * n + j` holds coefficients indexed by exponent.
    entries: Vec<Vec<C64>>,
}

fn trim(p: &mut Vec<C64>) {
    for c in p.iter_mut() {
        if c.norm() <= PRUNE_TOL {
            *c = C64::new(0.0, 0.0);
        }
    }
    while p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
}

impl GradedMatrixFn {
    pub fn zero(n: usize) -> Self {
        GradedMatrixFn {
            n,
            entries: vec![Vec::new(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = vec![C64::new(1.0, 0.0)];
        }
        m
    }

    /// Builds from row-major coefficient lists, checking the grading.
    pub fn from_entries(n: usize, mut entries: Vec<Vec<C64>>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries for n = {n}", n * n)));
        }
        entries.iter_mut().for_each(trim);
        let m = GradedMatrixFn { n, entries };
        if let Some((i, j, k)) = m.grading_violation() {
            return Err(Error::invalid(format!(
                "z^{k} at ({}, {}) breaks the grading k ≡ j - i (mod {n})",
                i + 1,
                j + 1
            )));
        }
        Ok(m)
    }

    /// `c z^k` at zero-based `(i, j)`.
    pub fn monomial(n: usize, i: usize, j: usize, k: usize, c: C64) -> Result<Self> {
        let mut entries = vec![Vec::new(); n * n];
        let mut p = vec![C64::new(0.0, 0.0); k + 1];
        p[k] = c;
        entries[i * n + j] = p;
        Self::from_entries(n, entries)
    }

    /// `Z_i`: `z` at `(i, i+1)` for `i < n`, and at `(n, 1)` for `i = n`.
    pub fn z_gen(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::OutOfRange { index: i, n });
        }
        Self::monomial(n, i - 1, i % n, 1, C64::new(1.0, 0.0))
    }

    /// The diagonal idempotent `e_{i,i}`.
    pub fn unit_proj(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::OutOfRange { index: i, n });
        }
        Self::monomial(n, i - 1, i - 1, 0, C64::new(1.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients of the zero-based entry `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &[C64] {
        &self.entries[i * self.n + j]
    }

    pub fn degree(&self) -> usize {
        self.entries
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Vec::is_empty)
    }

    /// First `(i, j, k)` whose exponent breaks the grading, if any.
    pub fn grading_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.entry(i, j).iter().enumerate() {
                    if c.norm() > 0.0 && (k + i) % n != j % n {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            Err(Error::invalid(format!("size mismatch {} vs {}", self.n, other.n)))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let mut p = vec![C64::new(0.0, 0.0); a.len().max(b.len())];
                for (k, c) in a.iter().enumerate() {
                    p[k] += c;
                }
                for (k, c) in b.iter().enumerate() {
                    p[k] += c;
                }
                trim(&mut p);
                p
            })
            .collect();
        Ok(GradedMatrixFn { n: self.n, entries })
    }

    pub fn scale(&self, s: C64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|p| {
                let mut q: Vec<C64> = p.iter().map(|c| c * s).collect();
                trim(&mut q);
                q
            })
            .collect();
        GradedMatrixFn { n: self.n, entries }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        let n = self.n;
        let mut entries = vec![Vec::new(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: Vec<C64> = Vec::new();
                for l in 0..n {
                    let a = self.entry(i, l);
                    let b = other.entry(l, j);
                    if a.is_empty() || b.is_empty() {
                        continue;
                    }
                    if acc.len() < a.len() + b.len() - 1 {
                        acc.resize(a.len() + b.len() - 1, C64::new(0.0, 0.0));
                    }
                    for (p, x) in a.iter().enumerate() {
                        if x.norm() == 0.0 {
                            continue;
                        }
                        for (q, y) in b.iter().enumerate() {
                            acc[p + q] += x * y;
                        }
                    }
                }
                trim(&mut acc);
                entries[i * n + j] = acc;
            }
        }
        Ok(GradedMatrixFn { n, entries })
    }

    /// The coefficient matrix of `z^k`.
    pub fn coefficient_matrix(&self, k: usize) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| {
            self.entry(i, j).get(k).copied().unwrap_or(C64::new(0.0, 0.0))
        })
    }

    fn eval_unchecked(&self, z: C64) -> CMat {
        CMat::from_fn(self.n, self.n, |i, j| {
            self.entry(i, j)
                .iter()
                .rev()
                .fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
        })
    }

    /// Entrywise evaluation at a point of the closed unit disk.
    pub fn eval_at(&self, lambda: C64) -> Result<CMat> {
        if lambda.norm() > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "|λ| = {} lies outside the closed unit disk",
                lambda.norm()
            )));
        }
        Ok(self.eval_unchecked(lambda))
    }

    /// Max of the spectral norm over `grid` equispaced points of the circle,
    /// together with the value on a grid twice as fine.
    pub fn circle_sup_norm(&self, grid: usize) -> Result<SupNorm> {
        self.circle_sup_norm_with(grid, Strategy::default())
    }

    pub fn circle_sup_norm_with(&self, grid: usize, strategy: Strategy) -> Result<SupNorm> {
        if grid < 8 {
            return Err(Error::invalid("circle grid needs at least 8 points"));
        }
        Ok(SupNorm {
            grid,
            value: self.grid_max(grid, strategy),
            refined: self.grid_max(2 * grid, strategy),
        })
    }

    pub(crate) fn grid_max(&self, grid: usize, strategy: Strategy) -> f64 {
        let vals = strategy.map_range(grid, |t| {
            let theta = 2.0 * std::f64::consts::PI * t as f64 / grid as f64;
            spectral_norm(&self.eval_unchecked(C64::from_polar(1.0, theta)))
        });
        vals.into_iter().fold(0.0, crate::par::nan_max)
    }

    pub fn to_wire(&self) -> MatrixFnJson {
        let n = self.n;
        MatrixFnJson {
            n,
            entries: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            self.entry(i, j)
                                .iter()
                                .enumerate()
                                .filter(|(_, c)| c.norm() > 0.0)
                                .map(|(k, c)| (k, c.re, c.im))
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_wire(w: &MatrixFnJson) -> Result<Self> {
        let n = w.n;
        if w.entries.len() != n || w.entries.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("entries must be an n x n array"));
        }
        let mut entries = vec![Vec::new(); n * n];
        for (i, row) in w.entries.iter().enumerate() {
            for (j, terms) in row.iter().enumerate() {
                let p: &mut Vec<C64> = &mut entries[i * n + j];
                for &(k, re, im) in terms {
                    if p.len() <= k {
                        p.resize(k + 1, C64::new(0.0, 0.0));
                    }
                    p[k] += C64::new(re, im);
                }
            }
        }
        Self::from_entries(n, entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("matrix function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_wire(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for GradedMatrixFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let terms: Vec<String> = self
                        .entry(i, j)
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.norm() > 0.0)
                        .map(|(k, c)| format!("({c})z^{k}"))
                        .collect();
                    if terms.is_empty() {
                        "0".to_string()
                    } else {
                        terms.join("+")
                    }
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Two-level grid estimate of the circle sup-norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub grid: usize,
    pub value: f64,
    pub refined: f64,
}

impl SupNorm {
    pub fn best(&self) -> f64 {
        self.value.max(self.refined)
    }
}

/// Wire form: `{"n": n, "entries": [[[[k, re, im], ...], ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFnJson {
    pub n: usize,
    pub entries: Vec<Vec<Vec<(usize, f64, f64)>>>,
}
