mod common;

use motlab::cost::{CostModel, RadialProfile};
use motlab::mot::{solve_mot_lp, Sense};
use motlab::sampling::{sample_seeds, trial_rng, SeedGuard};
use motlab::support::{solve_support_norm1, solve_support_norminf, solve_support_power, solve_support_radial};
use motlab::linalg::AffineMap;

use common::*;

#[test]
fn lp_optimum_matches_vertex_enumeration() {
    let corpus = small_corpus();
    assert!(corpus.len() > 100);
    for (k, inst) in corpus.iter().enumerate() {
        for sense in [Sense::Max, Sense::Min] {
            let want = vertex_enumeration(inst, sense).expect("corpus instances are feasible");
            let got = solve_mot_lp(inst, sense).unwrap().value;
            let tol = 1e-9 * inst.cost_scale().max(1.0);
            assert!((got - want).abs() <= tol, "instance {k} {sense:?}: lp {got} vs enumeration {want}");
        }
    }
}

#[test]
fn chi_roots_match_grid_scan() {
    let ps = [0.5, 1.5, 3.0, 1.9, 2.1, 1.0];
    for t in 0..30u64 {
        let d = 1 + (t % 3) as usize;
        let p = ps[(t / 3 % 6) as usize];
        let chi = random_chi(7, t, d, p);
        if let Err(e) = chi_agrees_with_scan(&chi) {
            panic!("trial {t}, d = {d}, p = {p}: {e}");
        }
    }
}

fn cubic() -> CostModel {
    CostModel::radial(RadialProfile::new("t^3", |t| t.powi(3), |t| 3.0 * t * t))
}

#[test]
fn radial_scan_matches_power_roots() {
    let power = CostModel::power(3.0).unwrap();
    for t in 0..40u64 {
        let d = 1 + (t % 3) as usize;
        let mut rng = trial_rng(11, t);
        let (seeds, _) = sample_seeds(&mut rng, d, &power, &SeedGuard::default()).unwrap();
        let x0 = vec![0.0; d];
        let s = solve_support_power(&power, &x0, &seeds).unwrap();
        let r = solve_support_radial(&cubic(), &x0, &s.affine).unwrap();
        assert!(same_point_set(&r.points(), &s.points(), 1e-8), "trial {t}: {:?} vs {:?}", r.points(), s.points());
    }
}

#[test]
fn norm_sets_at_minus_identity() {
    for d in 1..=4 {
        let a = AffineMap::identity(d).negated();
        let x0 = vec![0.0; d];
        let one: Vec<Vec<f64>> = solve_support_norm1(&x0, &a).unwrap().into_iter().filter(|q| q.is_point()).map(|q| q.vertex).collect();
        let inf: Vec<Vec<f64>> = solve_support_norminf(&x0, &a).unwrap().into_iter().filter(|q| q.is_point()).map(|q| q.vertex).collect();
        assert!(same_point_set(&one, &cube_vertices(d), 1e-10), "d = {d}: {one:?}");
        assert!(same_point_set(&inf, &cross_vertices(d), 1e-10), "d = {d}: {inf:?}");
    }
}
