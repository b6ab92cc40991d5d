use std::collections::BTreeMap;

use crate::linalg::C64;

use super::PRUNE_TOL;

/// A polynomial in commuting variables `z_1..z_n`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CommPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl CommPoly {
    pub fn zero(nvars: usize) -> Self {
        CommPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        Self::monomial(nvars, &vec![0; nvars], c)
    }

    pub fn monomial(nvars: usize, exps: &[u32], c: C64) -> Self {
        Self::from_terms(nvars, [(exps.to_vec(), c)])
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut acc: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            *acc.entry(e).or_insert(C64::new(0.0, 0.0)) += c;
        }
        acc.retain(|_, v| v.norm() > PRUNE_TOL);
        CommPoly { nvars, terms: acc }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, other.nvars);
        CommPoly::from_terms(
            self.nvars,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (e.clone(), *c)),
        )
    }

    pub fn mul(&self, other: &CommPoly) -> CommPoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.push((e, x * y));
            }
        }
        CommPoly::from_terms(self.nvars, out)
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(z)
                    .fold(*c, |acc, (&k, zi)| acc * zi.powu(k))
            })
            .sum()
    }

    /// `∂/∂z_i`
    pub fn partial(&self, i: usize) -> CommPoly {
        CommPoly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                let mut d = e.clone();
                d[i] -= 1;
                (d, c * e[i] as f64)
            }),
        )
    }

    /// Gradient evaluated at `z`.
    pub fn gradient(&self, z: &[C64]) -> Vec<C64> {
        (0..self.nvars).map(|i| self.partial(i).eval(z)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_of_product() {
        let z1z2 = CommPoly::monomial(2, &[1, 1], C64::new(1.0, 0.0));
        let z = [C64::new(0.3, 0.0), C64::new(0.4, 0.0)];
        assert!((z1z2.partial(0).eval(&z) - C64::new(0.4, 0.0)).norm() < 1e-15);
        assert!((z1z2.partial(1).eval(&z) - C64::new(0.3, 0.0)).norm() < 1e-15);
        assert!(CommPoly::constant(2, C64::new(5.0, 0.0)).partial(0).is_zero());
    }

    #[test]
    fn cancellation_prunes() {
        let a = CommPoly::monomial(1, &[2], C64::new(1.0, 0.0));
        let b = CommPoly::monomial(1, &[2], C64::new(-1.0, 0.0));
        assert!(a.add(&b).is_zero());
        assert_eq!(a.mul(&a).degree(), 4);
    }
}
