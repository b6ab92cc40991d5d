use serde::{Deserialize, Serialize};

use super::{
    derivation_norm_profile, derivation_space, factors_through_cycle, inner_dimension, solve_inner,
    DerivationAtRep, NormOracle, ProfilePoint,
};
use crate::error::Result;
use crate::graph::PathWord;
use crate::par::Strategy;

const NOTE: &str = "dimensions count algebraic derivations of the polynomial algebra; \
continuity on the norm closure is judged by the profile";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub dim: usize,
    pub inner_dim: usize,
    pub outer_dim: usize,
    pub inner: bool,
    pub residual: f64,
    pub factors: bool,
    pub kernel_max: f64,
    pub witnesses: Vec<String>,
    pub profile: Vec<ProfilePoint>,
    pub note: String,
}

/// Everything known about one derivation: where it sits in the derivation
/// space, whether it is inner, whether it factors through the cycle model,
/// and (for nonempty `profile_ns`) its norm profile.
pub fn classify(
    d: &DerivationAtRep,
    w: &PathWord,
    max_len: usize,
    tol: f64,
    profile_ns: &[usize],
    oracle: NormOracle,
    strategy: Strategy,
) -> Result<ClassificationReport> {
    let rep = d.rep();
    let dim = derivation_space(rep).dimension;
    let inner_dim = inner_dimension(rep);
    let solve = solve_inner(d, tol);
    let factor = factors_through_cycle(d, w, max_len, tol)?;
    let profile = if profile_ns.is_empty() {
        Vec::new()
    } else {
        derivation_norm_profile(d, w, profile_ns, oracle, strategy)?
    };
    Ok(ClassificationReport {
        dim,
        inner_dim,
        outer_dim: dim - inner_dim,
        inner: solve.x.is_some(),
        residual: solve.residual,
        factors: factor.factors,
        kernel_max: factor.kernel_max,
        witnesses: factor.witnesses,
        profile,
        note: NOTE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::derivations::{build_noninner_case_i, lambda_derivative};
    use crate::graph::{cycle_graph, cycle_with_chord};
    use crate::linalg::{c, CMat};
    use crate::repn::pi_w_lambda_mu;

    #[test]
    fn inner_sample() {
        let g = Arc::new(cycle_graph(2).unwrap());
        let w = g.path(&["e1", "e2"]).unwrap();
        let rep = pi_w_lambda_mu(&g, &w, c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let x = CMat::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let d = DerivationAtRep::inner_from(&rep, &x);
        let r = classify(&d, &w, 6, 1e-9, &[], NormOracle::Fock, Strategy::Sequential).unwrap();
        assert!(r.inner && r.factors);
        assert_eq!(r.dim, r.inner_dim + r.outer_dim);
        assert!(r.profile.is_empty());
        let back: ClassificationReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn outer_samples() {
        let g = Arc::new(cycle_graph(1).unwrap());
        let w = g.path(&["e1"]).unwrap();
        let d = lambda_derivative(&g, &w, c(0.5, 0.0), c(1.0, 0.0)).unwrap();
        let r = classify(&d, &w, 6, 1e-9, &[2, 4], NormOracle::Circle { grid: 64 }, Strategy::Sequential).unwrap();
        assert!(!r.inner && r.factors);
        assert_eq!((r.dim, r.outer_dim), (1, 1));
        assert_eq!(r.profile.len(), 2);

        let g = Arc::new(cycle_with_chord());
        let w = g.path(&["e1", "e2"]).unwrap();
        let d = build_noninner_case_i(&g, &w, c(0.5, 0.0), c(1.0, 0.0), 2).unwrap();
        let r = classify(&d, &w, 4, 1e-9, &[], NormOracle::Fock, Strategy::Sequential).unwrap();
        assert!(!r.inner && !r.factors);
        assert_eq!(r.witnesses[0], "L_c");
    }
}
