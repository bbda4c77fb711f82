use proptest::prelude::*;

use motlab::algebraic::{bezout_bound, complete_at_infinity_d2, PolynomialFamily};
use motlab::cost::CostModel;
use motlab::linalg::SquareMatrix;
use motlab::mot::{solve_mot_lp, DiscreteMeasure, MOTInstance, Sense};
use motlab::multipoly::MultiPoly;
use motlab::support::solve_support_power;

const QUAD: [[u32; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];

fn quadratic(c: &[f64]) -> MultiPoly {
    MultiPoly::from_terms(2, c.iter().zip(&QUAD).map(|(c, e)| (*c, e.as_slice())))
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 6)
}

fn invertible() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-2.0..2.0f64, 4), prop::collection::vec(-1.0..1.0f64, 2))
        .prop_filter("invertible", |(l, _)| (l[0] * l[3] - l[1] * l[2]).abs() > 0.1)
}

fn rotation(theta: f64) -> SquareMatrix {
    let (s, c) = theta.sin_cos();
    SquareMatrix::from_rows(&[vec![c, -s], vec![s, c]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bezout_and_completeness_survive_affine_changes(c1 in coeffs(), c2 in coeffs(), (l, b) in invertible()) {
        let (p1, p2) = (quadratic(&c1), quadratic(&c2));
        let lm = SquareMatrix::from_rows(&[l[..2].to_vec(), l[2..].to_vec()]);
        let (q1, q2) = (p1.compose_affine(&lm, &b), p2.compose_affine(&lm, &b));
        let before = bezout_bound(&PolynomialFamily::new(vec![p1.clone(), p2.clone()]).unwrap()).unwrap();
        let after = bezout_bound(&PolynomialFamily::new(vec![q1.clone(), q2.clone()]).unwrap()).unwrap();
        prop_assert_eq!(before, after);
        let v1 = complete_at_infinity_d2(&p1, &p2).unwrap();
        let v2 = complete_at_infinity_d2(&q1, &q2).unwrap();
        // the resultant scales by det(L)^4, so skip verdicts near the threshold
        if v1.resultant.abs() > 1e-6 && v2.resultant.abs() > 1e-6 {
            prop_assert_eq!(v1.complete, v2.complete);
        }
    }

    #[test]
    fn power_support_is_rotation_equivariant(theta in 0.0..std::f64::consts::TAU, tilt in 0.0..1.0f64, p in prop::sample::select(vec![0.5, 1.5, 3.0])) {
        let cost = CostModel::power(p).unwrap();
        let seeds = vec![vec![1.0, 0.1 * tilt], vec![-0.6, 0.9], vec![-0.5, -0.8 - 0.2 * tilt]];
        let r = rotation(theta);
        let turned: Vec<Vec<f64>> = seeds.iter().map(|s| r.mul_vec(s)).collect();
        let a = solve_support_power(&cost, &[0.0, 0.0], &seeds).unwrap().points();
        let b = solve_support_power(&cost, &[0.0, 0.0], &turned).unwrap().points();
        prop_assert_eq!(a.len(), b.len());
        for y in &a {
            let ry = r.mul_vec(y);
            prop_assert!(b.iter().any(|z| (z[0] - ry[0]).abs() + (z[1] - ry[1]).abs() < 1e-7), "{:?} not in {:?}", ry, b);
        }
    }

    #[test]
    fn lp_value_ignores_atom_order(w in 0.2..0.8f64, shift in -1.0..1.0f64, swap in any::<bool>()) {
        let ys = vec![vec![shift - 1.0], vec![shift], vec![shift + 1.5]];
        let mut nu_atoms = ys.clone();
        let mut nu_w = vec![0.3, 0.4, 0.3];
        if swap {
            nu_atoms.reverse();
            nu_w.reverse();
        }
        let mean = 0.3 * (shift - 1.0) + 0.4 * shift + 0.3 * (shift + 1.5);
        let mu = DiscreteMeasure::new(vec![vec![mean - 0.1], vec![mean + 0.1 * (1.0 - w) / w]], vec![1.0 - w, w]).unwrap();
        let cost = CostModel::power(3.0).unwrap();
        let a = MOTInstance::from_cost(mu.clone(), DiscreteMeasure::new(ys, vec![0.3, 0.4, 0.3]).unwrap(), &cost).unwrap();
        let b = MOTInstance::from_cost(mu, DiscreteMeasure::new(nu_atoms, nu_w).unwrap(), &cost).unwrap();
        for sense in [Sense::Max, Sense::Min] {
            let (va, vb) = (solve_mot_lp(&a, sense).unwrap().value, solve_mot_lp(&b, sense).unwrap().value);
            prop_assert!((va - vb).abs() < 1e-9, "{:?}: {} vs {}", sense, va, vb);
        }
    }
}
