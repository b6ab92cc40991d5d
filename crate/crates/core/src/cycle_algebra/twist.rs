//! The automorphism fixing `e_{i,i}` and `Z_1, ..., Z_{n-1}` and scaling
//! `Z_n` by a unimodular `μ`, three ways.

use super::GradedMatrixFn;
use crate::error::{Error, Result};
use crate::linalg::C64;

const UNIMODULAR_TOL: f64 = 1e-12;

fn check_unimodular(mu: C64) -> Result<()> {
    if (mu.norm() - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::invalid(format!("|μ| = {} is not 1", mu.norm())));
    }
    Ok(())
}

/// Zero-based generator indices of the unique length-`k` word of `Z`s that
/// starts in row `i`: `Z_i Z_{i+1} ... ` cyclically.
pub fn cycle_word(n: usize, i: usize, k: usize) -> Vec<usize> {
    (0..k).map(|t| (i + t) % n).collect()
}

/// Number of `Z_n` factors in that word.
pub fn wrap_count(n: usize, i: usize, k: usize) -> usize {
    (i + k) / n
}

impl GradedMatrixFn {
    /// Twist via the wrap count: `c z^k` at `(i, j)` picks up `μ^{⌊(i+k)/n⌋}`
    /// (zero-based `i`).
    pub fn mu_twist(&self, mu: C64) -> Result<Self> {
        check_unimodular(mu)?;
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for p in entries[i * n..(i + 1) * n].iter_mut() {
                for (k, c) in p.iter_mut().enumerate() {
                    *c *= mu.powu(wrap_count(n, i, k) as u32);
                }
            }
        }
        Ok(GradedMatrixFn { n, entries })
    }

    /// Twist by rewriting each monomial as a product of generators and
    /// applying the generator action factor by factor.
    pub fn mu_twist_rewriting(&self, mu: C64) -> Result<Self> {
        check_unimodular(mu)?;
        let n = self.n;
        let gens: Vec<GradedMatrixFn> = (1..=n)
            .map(|i| {
                let z = GradedMatrixFn::z_gen(n, i).expect("index in range");
                if i == n {
                    z.scale(mu)
                } else {
                    z
                }
            })
            .collect();
        let mut out = GradedMatrixFn::zero(n);
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.entry(i, j).iter().enumerate() {
                    if c.norm() == 0.0 {
                        continue;
                    }
                    let start = GradedMatrixFn::unit_proj(n, i + 1)?.scale(*c);
                    let mono = cycle_word(n, i, k)
                        .into_iter()
                        .try_fold(start, |acc, g| acc.mul(&gens[g]))?;
                    out = out.add(&mono)?;
                }
            }
        }
        Ok(out)
    }

    /// Twist as the rotation `z ↦ ωz` followed by conjugation with
    /// `diag(1, ω, ..., ω^{n-1})`, where `ω^n = μ`.
    pub fn mu_twist_rotation(&self, mu: C64) -> Result<Self> {
        check_unimodular(mu)?;
        let n = self.n;
        let omega = C64::from_polar(1.0, mu.arg() / n as f64);
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in entries[i * n + j].iter_mut().enumerate() {
                    // ω^k from the rotation, ω^i ω^{-j} from the conjugation
                    *c *= omega.powi(k as i32 + i as i32 - j as i32);
                }
            }
        }
        Ok(GradedMatrixFn { n, entries })
    }
}
