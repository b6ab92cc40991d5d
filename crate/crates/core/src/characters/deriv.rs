use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{l2, Character, BALL_TOL};
use crate::error::{Error, Result};
use crate::linalg::{rank, CMat, ComplexJson, C64, RANK_TOL};
use crate::poly::{Basis, CommPoly, NcPoly};

/// A point derivation at a character, given by its values on the loops.
/// Vertices and all other edges are forced to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CharDerivation {
    chi: Character,
    d: Vec<C64>,
}

impl CharDerivation {
    pub fn character(&self) -> &Character {
        &self.chi
    }

    pub fn d(&self) -> &[C64] {
        &self.d
    }

    pub fn basis_value(&self, b: &Basis) -> C64 {
        let Basis::Word(w) = b else {
            return C64::new(0.0, 0.0);
        };
        let mut vals = Vec::with_capacity(w.len());
        for &e in w.edges() {
            match self.chi.slot(e) {
                Some(i) => vals.push(i),
                None => return C64::new(0.0, 0.0),
            }
        }
        let lam = self.chi.lambda();
        // Σ_t χ(prefix) D(g_t) χ(suffix)
        let mut suffix = vec![C64::new(1.0, 0.0); vals.len() + 1];
        for t in (0..vals.len()).rev() {
            suffix[t] = suffix[t + 1] * lam[vals[t]];
        }
        let mut prefix = C64::new(1.0, 0.0);
        let mut total = C64::new(0.0, 0.0);
        for (t, &i) in vals.iter().enumerate() {
            total += prefix * self.d[i] * suffix[t + 1];
            prefix *= lam[i];
        }
        total
    }

    pub fn d_wire(&self) -> Vec<ComplexJson> {
        self.d.iter().map(|&z| z.into()).collect()
    }
}

pub fn char_derivation(chi: &Character, d: Vec<C64>) -> Result<CharDerivation> {
    if d.len() != chi.loops().len() {
        return Err(Error::invalid(format!(
            "expected {} derivation values, one per loop",
            chi.loops().len()
        )));
    }
    Ok(CharDerivation { chi: chi.clone(), d })
}

pub fn extend_char(d: &CharDerivation, a: &NcPoly) -> Result<C64> {
    if **a.graph() != **d.chi.graph() {
        return Err(Error::GraphMismatch);
    }
    Ok(a.terms().map(|(b, c)| d.basis_value(b) * c).sum())
}

/// `D_i`: `L_{e_i} ↦ 1`, every other loop to 0. `i` counts loops from 1.
pub fn canonical_derivation(chi: &Character, i: usize) -> Result<CharDerivation> {
    let m = chi.loops().len();
    if i == 0 || i > m {
        return Err(Error::invalid(format!("loop index {i} outside 1..={m}")));
    }
    if chi.lambda()[i - 1].norm() > BALL_TOL {
        return Err(Error::invalid(format!("λ_{i} is nonzero; D_{i} needs λ_{i} = 0")));
    }
    let mut d = vec![C64::new(0.0, 0.0); m];
    d[i - 1] = C64::new(1.0, 0.0);
    char_derivation(chi, d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub d1: CharDerivation,
    pub d2: CharDerivation,
    /// `(i, ω_i)` for each loop with `λ_i = 0`, so that `D2 = Σ ω_i D_i`.
    pub omega: Vec<(usize, C64)>,
}

/// Splits off the canonical part: `D2 = Σ_{λ_i = 0} D(L_i) D_i`, `D1 = D − D2`.
pub fn decompose(d: &CharDerivation) -> Decomposition {
    let lam = d.chi.lambda();
    let m = lam.len();
    let mut d1 = d.d.clone();
    let mut d2 = vec![C64::new(0.0, 0.0); m];
    let mut omega = Vec::new();
    for i in 0..m {
        if lam[i].norm() <= BALL_TOL {
            omega.push((i + 1, d.d[i]));
            d2[i] = d.d[i];
            d1[i] = C64::new(0.0, 0.0);
        }
    }
    Decomposition {
        d1: CharDerivation { chi: d.chi.clone(), d: d1 },
        d2: CharDerivation { chi: d.chi.clone(), d: d2 },
        omega,
    }
}

/// `Σ_i d_i ∂_i â(λ)`
fn directional(d: &CharDerivation, hat: &CommPoly) -> C64 {
    let lam = d.chi.lambda();
    d.d.iter()
        .enumerate()
        .filter(|(_, di)| di.norm() > 0.0)
        .map(|(i, di)| di * hat.partial(i).eval(lam))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaReport {
    pub samples: usize,
    pub max_error: f64,
    pub passed: bool,
}

/// Compares the Leibniz extension with the directional derivative of the
/// commutative image at `λ`.
pub fn derivative_formula_check(d: &CharDerivation, samples: &[NcPoly], tol: f64) -> Result<FormulaReport> {
    let mut max_error: f64 = 0.0;
    for a in samples {
        let lhs = extend_char(d, a)?;
        let rhs = directional(d, &d.chi.gelfand(a)?);
        max_error = max_error.max((lhs - rhs).norm());
    }
    Ok(FormulaReport {
        samples: samples.len(),
        max_error,
        passed: max_error <= tol,
    })
}

/// `‖d‖ / (1 − ‖λ‖)`: the Cauchy estimate on the ball of radius
/// `1 − ‖λ‖` around `λ`. `None` on the boundary.
pub fn cauchy_bound(d: &CharDerivation) -> Option<f64> {
    let r = 1.0 - d.chi.norm();
    (r > BALL_TOL).then(|| l2(&d.d) / r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub bound: f64,
    pub samples: usize,
    /// Largest `|D(a)| / (C · sup |â|)` with the sup taken over sphere samples.
    pub max_ratio: f64,
    pub passed: bool,
}

/// Points on the unit sphere: the coordinate directions, `λ/‖λ‖` and
/// `count` random ones.
pub(crate) fn sphere_points<R: Rng>(lambda: &[C64], count: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let m = lambda.len();
    let mut pts = Vec::with_capacity(count + m + 1);
    for i in 0..m {
        let mut z = vec![C64::new(0.0, 0.0); m];
        z[i] = C64::new(1.0, 0.0);
        pts.push(z);
    }
    let nl = l2(lambda);
    if nl > 0.0 {
        pts.push(lambda.iter().map(|z| z / nl).collect());
    }
    while pts.len() < count + m + 1 && m > 0 {
        let z: Vec<C64> = (0..m)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let nz = l2(&z);
        if nz > 1e-3 {
            pts.push(z.iter().map(|x| x / nz).collect());
        }
    }
    pts
}

/// Checks `|D(a)| ≤ C(λ) · sup_ball |â|` on samples, for interior `λ`.
/// The sup is estimated from below on sphere points, which only makes the
/// check harder to pass.
pub fn cauchy_bound_check<R: Rng>(
    d: &CharDerivation,
    samples: &[NcPoly],
    sphere: usize,
    rng: &mut R,
) -> Result<CauchyReport> {
    let bound = cauchy_bound(d)
        .ok_or_else(|| Error::Precondition("the Cauchy bound needs ‖λ‖ < 1".to_string()))?;
    let pts = sphere_points(d.chi.lambda(), sphere, rng);
    let mut max_ratio: f64 = 0.0;
    for a in samples {
        let hat = d.chi.gelfand(a)?;
        let val = extend_char(d, a)?.norm();
        if val == 0.0 {
            continue;
        }
        let sup = pts.iter().map(|z| hat.eval(z).norm()).fold(0.0, f64::max);
        max_ratio = max_ratio.max(if sup == 0.0 { f64::INFINITY } else { val / (bound * sup) });
    }
    Ok(CauchyReport {
        bound,
        samples: samples.len(),
        max_ratio,
        passed: max_ratio <= 1.0 + 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametrizationReport {
    pub loops: usize,
    pub rank: usize,
    pub injective: bool,
}

/// Rank of `d ↦ (D_d(a))_a` over the samples; full rank means a point
/// derivation at `χ` is determined by its values on these polynomials.
pub fn parametrization_rank(chi: &Character, samples: &[NcPoly]) -> Result<ParametrizationReport> {
    let m = chi.loops().len();
    let lam = chi.lambda();
    let mut rows = Vec::with_capacity(samples.len());
    for a in samples {
        let hat = chi.gelfand(a)?;
        rows.push((0..m).map(|i| hat.partial(i).eval(lam)).collect::<Vec<_>>());
    }
    let r = if m == 0 || rows.is_empty() {
        0
    } else {
        rank(&CMat::from_fn(rows.len(), m, |s, i| rows[s][i]), RANK_TOL)
    };
    Ok(ParametrizationReport {
        loops: m,
        rank: r,
        injective: r == m,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::{single_vertex_graph, DirectedGraph};
    use crate::linalg::c;
    use crate::poly::random_poly;

    fn b2() -> Arc<DirectedGraph> {
        Arc::new(single_vertex_graph(2).unwrap())
    }

    fn word(g: &Arc<DirectedGraph>, w: &[&str]) -> NcPoly {
        NcPoly::word(g, g.path(w).unwrap())
    }

    #[test]
    fn leibniz_values() {
        let g = b2();
        let chi = Character::at_vertex(&g, "v0", vec![c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let d = char_derivation(&chi, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(extend_char(&d, &word(&g, &["f1", "f2"])).unwrap(), c(0.5, 0.0));
        assert_eq!(extend_char(&d, &NcPoly::vertex(&g, 0)).unwrap(), c(0.0, 0.0));
        assert_eq!(extend_char(&d, &NcPoly::unit(&g)).unwrap(), c(0.0, 0.0));
        assert!(char_derivation(&chi, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn canonical() {
        let g = b2();
        let chi = Character::at_vertex(&g, "v0", vec![c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let d2 = canonical_derivation(&chi, 2).unwrap();
        assert_eq!(d2.d(), [c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(extend_char(&d2, &word(&g, &["f2", "f2"])).unwrap(), c(0.0, 0.0));
        assert_eq!(extend_char(&d2, &word(&g, &["f1", "f2"])).unwrap(), c(0.5, 0.0));
        assert!(canonical_derivation(&chi, 1).is_err());
        assert!(canonical_derivation(&chi, 3).is_err());
    }

    #[test]
    fn decomposition() {
        let g = b2();
        let chi = Character::at_vertex(&g, "v0", vec![c(0.5, 0.0), c(0.0, 0.0)]).unwrap();
        let d = char_derivation(&chi, vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let parts = decompose(&d);
        assert_eq!(parts.omega, [(2, c(3.0, 0.0))]);
        assert_eq!(parts.d1.d(), [c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(parts.d2.d(), [c(0.0, 0.0), c(3.0, 0.0)]);

        let di = canonical_derivation(&chi, 2).unwrap();
        let parts = decompose(&di);
        assert!(parts.d1.d().iter().all(|z| z.norm() == 0.0));
        assert_eq!(parts.d2, di);

        let all = Character::at_vertex(&g, "v0", vec![c(0.5, 0.0), c(0.1, 0.2)]).unwrap();
        let d = char_derivation(&all, vec![c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!(decompose(&d).omega.is_empty());
    }

    #[test]
    fn formula() {
        let g = b2();
        let chi = Character::at_vertex(&g, "v0", vec![c(0.3, 0.0), c(0.4, 0.0)]).unwrap();
        let d = char_derivation(&chi, vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let a = word(&g, &["f1", "f2"]);
        assert!((extend_char(&d, &a).unwrap() - c(0.4, 0.0)).norm() < 1e-15);
        let comm = a.commutator(&word(&g, &["f2"])).unwrap();
        let samples = [a, comm, NcPoly::vertex(&g, 0)];
        let r = derivative_formula_check(&d, &samples, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn cauchy_and_rank() {
        let g = Arc::new(single_vertex_graph(3).unwrap());
        let chi = Character::at_vertex(&g, "v0", vec![c(0.2, 0.1), c(-0.3, 0.0), c(0.0, 0.4)]).unwrap();
        let d = char_derivation(&chi, vec![c(1.0, 0.0), c(0.0, -1.0), c(0.5, 0.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<NcPoly> = (0..40).map(|_| random_poly(&g, 4, 5, false, &mut rng)).collect();
        let r = cauchy_bound_check(&d, &samples, 256, &mut rng).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(parametrization_rank(&chi, &samples).unwrap().injective);
        let constants = [NcPoly::unit(&g)];
        assert_eq!(parametrization_rank(&chi, &constants).unwrap().rank, 0);

        let edge = Character::at_vertex(&g, "v0", vec![c(0.6, 0.0), c(0.8, 0.0), c(0.0, 0.0)]).unwrap();
        let d = char_derivation(&edge, vec![c(1.0, 0.0); 3]).unwrap();
        assert!(cauchy_bound(&d).is_none());
    }
}
