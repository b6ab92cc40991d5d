use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semilab::characters::{char_derivation, decompose, eval_character, extend_char, Character};
use semilab::cycle_algebra::{GradedMatrixFn, Iota};
use semilab::derivations::DerivationAtRep;
use semilab::graph::{
    cycle_graph, cycle_with_chord, enumerate_primitive_cycles, single_vertex_graph, DirectedGraph, PathWord,
};
use semilab::linalg::{c, spectral_norm, CMat, C64};
use semilab::poly::{random_poly, NcPoly};
use semilab::repn::pi_w_lambda_mu;

fn graph(k: usize) -> Arc<DirectedGraph> {
    Arc::new(match k {
        0 => cycle_graph(1).unwrap(),
        1 => cycle_graph(2).unwrap(),
        2 => cycle_graph(3).unwrap(),
        3 => single_vertex_graph(2).unwrap(),
        _ => cycle_with_chord(),
    })
}

fn first_cycle(g: &DirectedGraph) -> PathWord {
    enumerate_primitive_cycles(g, 4).unwrap().remove(0)
}

fn ball_point(r: f64, t: f64) -> C64 {
    C64::from_polar(r, 2.0 * PI * t)
}

fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) <= tol * (1.0 + a.norm())
}

/// Dyadic point of the closed ball, coordinates multiples of 1/8.
fn dyadic_lambda() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-4i32..=4, -4i32..=4), 1..=3).prop_map(|v| {
        let m = v.len() as f64;
        v.into_iter()
            .map(|(a, b)| c(a as f64 / 8.0, b as f64 / 8.0) * if m > 1.0 { 0.5 } else { 1.0 })
            .collect()
    })
}

fn ncmax(f: &GradedMatrixFn) -> f64 {
    let n = f.n();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for z in f.entry(i, j) {
                m = m.max(z.norm());
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iota_images_respect_grading(k in 0usize..5, seed in any::<u64>()) {
        let g = graph(k);
        let w = first_cycle(&g);
        let iota = Iota::new(&g, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 5, 6, false, &mut rng);
        let b = random_poly(&g, 5, 6, false, &mut rng);
        let fa = iota.apply(&a).unwrap();
        prop_assert!(fa.grading_violation().is_none());
        let prod = fa.mul(&iota.apply(&b).unwrap()).unwrap();
        prop_assert!(prod.grading_violation().is_none());
        // ι is multiplicative
        let ab = iota.apply(&a.clone().with_degree_cap(16).mul(&b).unwrap()).unwrap();
        prop_assert!(ncmax(&ab.sub(&prod).unwrap()) <= 1e-12);
    }

    #[test]
    fn twist_is_multiplicative(k in 0usize..5, seed in any::<u64>(), t in 0.0f64..1.0) {
        let g = graph(k);
        let w = first_cycle(&g);
        let iota = Iota::new(&g, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = iota.apply(&random_poly(&g, 4, 5, false, &mut rng)).unwrap();
        let h = iota.apply(&random_poly(&g, 4, 5, false, &mut rng)).unwrap();
        let mu = ball_point(1.0, t);
        let lhs = f.mul(&h).unwrap().mu_twist(mu).unwrap();
        let rhs = f.mu_twist(mu).unwrap().mul(&h.mu_twist(mu).unwrap()).unwrap();
        prop_assert!(ncmax(&lhs.sub(&rhs).unwrap()) <= 1e-12);
    }

    #[test]
    fn evaluation_is_multiplicative(k in 0usize..5, seed in any::<u64>(), r in 0.0f64..=1.0, t in 0.0f64..1.0) {
        let g = graph(k);
        let w = first_cycle(&g);
        let iota = Iota::new(&g, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = iota.apply(&random_poly(&g, 4, 5, false, &mut rng)).unwrap();
        let h = iota.apply(&random_poly(&g, 4, 5, false, &mut rng)).unwrap();
        let z = ball_point(r, t);
        let lhs = f.mul(&h).unwrap().eval_at(z).unwrap();
        let rhs = f.eval_at(z).unwrap() * h.eval_at(z).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn representations_are_multiplicative(k in 0usize..5, seed in any::<u64>(), r in 0.0f64..=1.0, t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let g = graph(k);
        let w = first_cycle(&g);
        let rep = pi_w_lambda_mu(&g, &w, ball_point(r, t), ball_point(1.0, s)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 4, 5, false, &mut rng);
        let b = random_poly(&g, 4, 5, false, &mut rng);
        let lhs = rep.apply(&a.mul(&b).unwrap()).unwrap();
        let rhs = rep.apply(&a).unwrap() * rep.apply(&b).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn leibniz_extension_is_associative(k in 0usize..5, seed in any::<u64>()) {
        let g = graph(k);
        let w = first_cycle(&g);
        let rep = pi_w_lambda_mu(&g, &w, c(0.5, 0.25), c(1.0, 0.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = w.len();
        let x = CMat::from_fn(n, n, |i, j| c((i + 2 * j) as f64 - 1.0, (seed % 5) as f64));
        let d = DerivationAtRep::inner_from(&rep, &x);
        let a = random_poly(&g, 3, 4, false, &mut rng);
        let b = random_poly(&g, 3, 4, false, &mut rng);
        let e = random_poly(&g, 3, 4, false, &mut rng);
        let left = d.extend(&a.mul(&b).unwrap().mul(&e).unwrap()).unwrap();
        let right = d.extend(&a.mul(&b.mul(&e).unwrap()).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-11));
        // D(ab) = D(a)π(b) + π(a)D(b)
        let ab = d.extend(&a.mul(&b).unwrap()).unwrap();
        let split = d.extend(&a).unwrap() * rep.apply(&b).unwrap() + rep.apply(&a).unwrap() * d.extend(&b).unwrap();
        prop_assert!(close(&ab, &split, 1e-11));
    }

    #[test]
    fn rotated_cycles_give_equivalent_reps(n in 1usize..=4, rot in 0usize..4, seed in any::<u64>(), r in 0.0f64..=1.0, t in 0.0f64..1.0) {
        let g = Arc::new(cycle_graph(n).unwrap());
        let w = first_cycle(&g);
        let wr = w.rotate(rot % n);
        let (lam, mu) = (ball_point(r, t), c(1.0, 0.0));
        let p = pi_w_lambda_mu(&g, &w, lam, mu).unwrap();
        let q = pi_w_lambda_mu(&g, &wr, lam, mu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 6, 6, false, &mut rng);
        let (na, nb) = (spectral_norm(&p.apply(&a).unwrap()), spectral_norm(&q.apply(&a).unwrap()));
        prop_assert!((na - nb).abs() <= 1e-10 * (1.0 + na));
    }

    #[test]
    fn characters_are_multiplicative(lam in dyadic_lambda(), seed in any::<u64>()) {
        let g = Arc::new(single_vertex_graph(lam.len()).unwrap());
        let chi = Character::at_vertex(&g, "v0", lam).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 4, 5, false, &mut rng);
        let b = random_poly(&g, 4, 5, false, &mut rng);
        let lhs = eval_character(&chi, &a.mul(&b).unwrap()).unwrap();
        let rhs = eval_character(&chi, &a).unwrap() * eval_character(&chi, &b).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn characters_kill_commutators_exactly(lam in dyadic_lambda(), seed in any::<u64>()) {
        let g = Arc::new(single_vertex_graph(lam.len()).unwrap());
        let chi = Character::at_vertex(&g, "v0", lam).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 3, 4, true, &mut rng);
        let b = random_poly(&g, 3, 4, true, &mut rng);
        let comm = a.commutator(&b).unwrap();
        prop_assert!(comm.in_commutator_ideal().unwrap());
        prop_assert_eq!(eval_character(&chi, &comm).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn decomposition_sums_back(lam in dyadic_lambda(), d in prop::collection::vec(-8i32..=8, 3), seed in any::<u64>()) {
        let m = lam.len();
        let g = Arc::new(single_vertex_graph(m).unwrap());
        let chi = Character::at_vertex(&g, "v0", lam.clone()).unwrap();
        let dv: Vec<C64> = d[..m].iter().map(|&x| c(x as f64 / 8.0, 0.0)).collect();
        let der = char_derivation(&chi, dv).unwrap();
        let parts = decompose(&der);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly(&g, 5, 6, false, &mut rng);
        let whole = extend_char(&der, &a).unwrap();
        let sum = extend_char(&parts.d1, &a).unwrap() + extend_char(&parts.d2, &a).unwrap();
        prop_assert!((whole - sum).norm() <= 1e-12 * (1.0 + whole.norm()));
        for (i, _) in &parts.omega {
            prop_assert_eq!(lam[i - 1], c(0.0, 0.0));
        }
    }
}

#[test]
fn unit_poly_maps_to_identity_on_one_vertex() {
    let g = Arc::new(single_vertex_graph(2).unwrap());
    let rep = pi_w_lambda_mu(&g, &g.path(&["f1", "f2"]).unwrap(), c(0.5, 0.0), c(1.0, 0.0)).unwrap();
    assert_eq!(rep.apply(&NcPoly::unit(&g)).unwrap(), CMat::identity(2, 2));
}
