use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::deriv::sphere_points;
use super::{eval_character, l2, CharDerivation, Character, BALL_TOL};
use crate::derivations::ProfilePoint;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::poly::NcPoly;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakingReport {
    /// `|λ_1|`, the radius of the slice disk.
    pub radius: f64,
    /// `|g(λ_1)|`
    pub peak: f64,
    /// Largest `|g(z)|` over grid points at distance at least `margin` from
    /// `λ_1`.
    pub max_off: f64,
    pub gap: f64,
    pub passed: bool,
}

/// `g(z) = (z + λ_1) / (2 λ_1)`
pub fn peaking_value(lambda1: C64, z: C64) -> C64 {
    (z + lambda1) / (lambda1 * 2.0)
}

/// Grid check that `g` peaks at `λ_1` on the slice disk `|z| ≤ |λ_1|`.
/// Uses `grid` angles and `grid` radii (plus the centre).
pub fn boundary_peaking_witness(lambda: &[C64], grid: usize, margin: f64) -> Result<PeakingReport> {
    let norm = l2(lambda);
    if (norm - 1.0).abs() > BALL_TOL {
        return Err(Error::invalid(format!("‖λ‖ = {norm}, expected a boundary point")));
    }
    let l1 = *lambda.first().ok_or_else(|| Error::invalid("λ is empty"))?;
    if l1.norm() == 0.0 {
        return Err(Error::invalid("λ_1 = 0"));
    }
    if grid < 2 {
        return Err(Error::invalid("grid must be at least 2"));
    }
    let radius = l1.norm();
    let mut max_off: f64 = 0.0;
    for k in 0..=grid {
        let r = radius * k as f64 / grid as f64;
        for t in 0..grid {
            let z = C64::from_polar(r, 2.0 * PI * t as f64 / grid as f64);
            if (z - l1).norm() >= margin {
                max_off = max_off.max(peaking_value(l1, z).norm());
            }
        }
    }
    let peak = peaking_value(l1, l1).norm();
    let gap = 1.0 - max_off;
    Ok(PeakingReport {
        radius,
        peak,
        max_off,
        gap,
        passed: (peak - 1.0).abs() <= 1e-12 && gap > 0.0,
    })
}

/// Lower estimates of `sup{|D(a)| : deg a ≤ N, sup_ball |â| ≤ 1}`.
///
/// Candidates are powers of `u(z) = ⟨z, λ⟩` and of `(1 + u)/2`, whose sup
/// over the ball is attained at `λ/‖λ‖`, and powers of single coordinates.
/// The sup is estimated on sphere samples that include those points.
pub fn boundary_profile<R: Rng>(d: &CharDerivation, ns: &[usize], sphere: usize, rng: &mut R) -> Vec<ProfilePoint> {
    let lam = d.character().lambda();
    let dv = d.d();
    let pts = sphere_points(lam, sphere, rng);
    let us: Vec<C64> = pts
        .iter()
        .map(|z| z.iter().zip(lam).map(|(zi, li)| zi * li.conj()).sum())
        .collect();
    let u_lam: C64 = lam.iter().map(|l| l.norm_sqr()).sum::<f64>().into();
    // D(f∘u) = f'(u(λ)) · Σ d_i conj(λ_i)
    let du: C64 = dv.iter().zip(lam).map(|(di, li)| di * li.conj()).sum();
    let max_n = ns.iter().copied().max().unwrap_or(0);
    // best[k] = (ratio, label) over candidates of degree exactly k
    let mut best: Vec<(f64, String)> = vec![(0.0, String::new()); max_n + 1];
    let mut offer = |k: usize, ratio: f64, label: String| {
        if ratio > best[k].0 {
            best[k] = (ratio, label);
        }
    };
    for k in 1..=max_n {
        let kf = k as f64;
        let sup = us.iter().map(|u| u.norm().powi(k as i32)).fold(0.0, f64::max);
        if sup > 0.0 {
            offer(k, (du * u_lam.powu(k as u32 - 1) * kf).norm() / sup, format!("u^{k}"));
        }
        let half = |u: C64| (u + 1.0) / 2.0;
        let sup = us.iter().map(|&u| half(u).norm().powi(k as i32)).fold(0.0, f64::max);
        if sup > 0.0 {
            let val = du * half(u_lam).powu(k as u32 - 1) * (kf / 2.0);
            offer(k, val.norm() / sup, format!("((1+u)/2)^{k}"));
        }
        for (i, (di, li)) in dv.iter().zip(lam).enumerate() {
            // sup of |z_i|^k over the ball is 1
            offer(k, (di * li.powu(k as u32 - 1) * kf).norm(), format!("z{}^{k}", i + 1));
        }
    }
    // candidates of degree ≤ n are all admissible at n, so the profile is a prefix max
    for k in 1..=max_n {
        if best[k - 1].0 > best[k].0 {
            best[k] = best[k - 1].clone();
        }
    }
    ns.iter()
        .map(|&n| ProfilePoint {
            n,
            value: best[n].0,
            at_n: best[n].0,
            witness: best[n].1.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeReport {
    pub samples: usize,
    pub all_in_ideal: bool,
    /// Largest `|χ_λ(aX − Xa)|` over samples and points.
    pub max_char_value: f64,
    pub passed: bool,
}

/// For the inner derivation `a ↦ aX − Xa` on a one-vertex graph, checks
/// that every sampled value lies in the commutator ideal, and that
/// characters vanish on it.
pub fn inner_range_in_commutator_check(
    x: &NcPoly,
    samples: &[NcPoly],
    lambdas: &[Vec<C64>],
    tol: f64,
) -> Result<RangeReport> {
    let g = x.graph();
    let chars = lambdas
        .iter()
        .map(|l| Character::at_vertex(g, g.vertex_name(0), l.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut all_in_ideal = true;
    let mut max_char_value: f64 = 0.0;
    for a in samples {
        let cap = a.degree() + x.degree();
        let a = a.clone().with_degree_cap(cap);
        let y = a.mul(x)?.sub(&x.clone().with_degree_cap(cap).mul(&a)?)?;
        all_in_ideal &= y.in_commutator_ideal()?;
        for chi in &chars {
            max_char_value = max_char_value.max(eval_character(chi, &y)?.norm());
        }
    }
    Ok(RangeReport {
        samples: samples.len(),
        all_in_ideal,
        max_char_value,
        passed: all_in_ideal && max_char_value <= tol,
    })
}

/// Coefficients `χ(D^k a) / k!` of `z^k` in `χ(e^{zD} a)` for the inner
/// derivation `D = [·, X]`, `k = 0..=order`. Evidence only: a truncated
/// orbit says nothing about the full series.
pub fn exp_orbit_diagnostic(chi: &Character, x: &NcPoly, a: &NcPoly, order: usize) -> Result<Vec<C64>> {
    let cap = a.degree() + order * x.degree();
    let x = x.clone().with_degree_cap(cap);
    let mut cur = a.clone().with_degree_cap(cap);
    let mut fact = 1.0;
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
            cur = cur.mul(&x)?.sub(&x.mul(&cur)?)?;
        }
        out.push(eval_character(chi, &cur)? / fact);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::characters::char_derivation;
    use crate::graph::single_vertex_graph;
    use crate::linalg::c;
    use crate::poly::random_poly;

    #[test]
    fn peaking_formula() {
        assert_eq!(peaking_value(c(1.0, 0.0), c(0.0, 0.0)), c(0.5, 0.0));
        assert_eq!(peaking_value(c(1.0, 0.0), c(-1.0, 0.0)).norm(), 0.0);
        let r = boundary_peaking_witness(&[c(0.6, 0.0), c(0.8, 0.0)], 512, 0.1).unwrap();
        assert!((r.radius - 0.6).abs() < 1e-15);
        assert!(r.passed && r.gap > 0.0, "{r:?}");
        assert!(boundary_peaking_witness(&[c(0.0, 0.0), c(1.0, 0.0)], 64, 0.1).is_err());
        assert!(boundary_peaking_witness(&[c(0.5, 0.0)], 64, 0.1).is_err());
    }

    #[test]
    fn boundary_profile_grows() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let chi = Character::at_vertex(&g, "v0", vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let d = char_derivation(&chi, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = boundary_profile(&d, &[4, 8, 16], 128, &mut rng);
        assert!(p[1].value > p[0].value && p[2].value > p[1].value, "{p:?}");
        // u^N witnesses N |⟨d, λ⟩| exactly
        assert!((p[2].value - 16.0 * 1.4).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn range_lies_in_commutator_ideal() {
        let g = Arc::new(single_vertex_graph(2).unwrap());
        let x = NcPoly::edge(&g, 0);
        let a = NcPoly::edge(&g, 1);
        let lams = vec![vec![c(0.3, 0.1), c(0.5, -0.2)]];
        let r = inner_range_in_commutator_check(&x, std::slice::from_ref(&a), &lams, 1e-12).unwrap();
        assert!(r.passed);
        let scalar = NcPoly::unit(&g).scale(c(2.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<NcPoly> = (0..10).map(|_| random_poly(&g, 4, 4, true, &mut rng)).collect();
        let r = inner_range_in_commutator_check(&scalar, &samples, &lams, 0.0).unwrap();
        assert!(r.passed && r.max_char_value == 0.0);

        let chi = Character::at_vertex(&g, "v0", lams[0].clone()).unwrap();
        let orbit = exp_orbit_diagnostic(&chi, &x, &a, 4).unwrap();
        assert!((orbit[0] - c(0.5, -0.2)).norm() < 1e-15);
        assert!(orbit[1..].iter().all(|z| z.norm() < 1e-15));
    }
}
