//! Completeness at infinity, Bezout bounds, real solutions of two conics,
//! and the random search for many simple real zeros.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{real_roots, Polynomial, RootError, SquareMatrix};
use crate::multipoly::MultiPoly;
use crate::sampling::trial_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraicError {
    #[error("family has {polys} polynomials in {dim} variables; need {need}")]
    Shape { polys: usize, dim: usize, need: &'static str },
    #[error("polynomial {0} is zero or constant")]
    Degenerate(usize),
    #[error("polynomial of degree {0} is not quadratic")]
    NotQuadratic(u32),
    #[error("monomial exponents must be positive, got {0:?}")]
    BadExponents(Vec<u32>),
    #[error("the system has a positive-dimensional solution set")]
    PositiveDimensional,
    #[error("family is not complete at infinity")]
    NotComplete,
    #[error("coefficient {0} is not finite")]
    NonFinite(f64),
    #[error(transparent)]
    Roots(#[from] RootError),
}

/// `(P_1, …, P_k)` in `dim` variables, each of degree at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFamily {
    polys: Vec<MultiPoly>,
    dim: usize,
}

impl PolynomialFamily {
    pub fn new(polys: Vec<MultiPoly>) -> Result<Self, AlgebraicError> {
        let dim = polys.first().map_or(0, |p| p.nvars());
        if polys.is_empty() || polys.len() > dim || polys.iter().any(|p| p.nvars() != dim) {
            return Err(AlgebraicError::Shape { polys: polys.len(), dim, need: "1 ≤ k ≤ d polynomials in d variables" });
        }
        if let Some(i) = polys.iter().position(|p| p.degree().unwrap_or(0) == 0) {
            return Err(AlgebraicError::Degenerate(i));
        }
        Ok(Self { polys, dim })
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// The top-degree slice of `p`.
pub fn homogeneous_part(p: &MultiPoly) -> MultiPoly {
    p.homogeneous_part()
}

/// Product of degrees of a square family.
pub fn bezout_bound(fam: &PolynomialFamily) -> Result<u64, AlgebraicError> {
    if fam.polys.len() != fam.dim {
        return Err(AlgebraicError::Shape { polys: fam.polys.len(), dim: fam.dim, need: "k = d" });
    }
    Ok(fam.polys.iter().map(|p| p.degree().unwrap_or(0) as u64).product())
}

/// `(Y_1^{k_1}, …, Y_d^{k_d})` is always complete at infinity.
pub fn complete_monomial(k: &[u32]) -> Result<bool, AlgebraicError> {
    if k.is_empty() || k.contains(&0) {
        return Err(AlgebraicError::BadExponents(k.to_vec()));
    }
    Ok(true)
}

fn to_rational(x: f64) -> Result<BigRational, AlgebraicError> {
    BigRational::from_float(x).ok_or(AlgebraicError::NonFinite(x))
}

/// Exact determinant by fraction-valued Gaussian elimination.
fn rational_det(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::from_integer(BigInt::from(1));
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Sylvester matrix of two coefficient lists, highest power first.
fn sylvester<T: Clone>(f: &[T], g: &[T], zero: T) -> Vec<Vec<T>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![zero.clone(); size];
        r[i..i + m + 1].clone_from_slice(f);
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![zero.clone(); size];
        r[i..i + n + 1].clone_from_slice(g);
        rows.push(r);
    }
    rows
}

/// Coefficients of a binary form `F(X, Y)` of degree `deg`, `X^deg` first.
fn binary_form_coeffs(p: &MultiPoly, deg: u32) -> Vec<f64> {
    (0..=deg).map(|i| p.coeff(&[deg - i, i])).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessVerdict {
    pub complete: bool,
    /// Homogeneous resultant of the two top-degree forms.
    pub resultant: f64,
    /// The same value as an exact fraction.
    pub resultant_exact: String,
}

/// Two polynomials in two variables are complete at infinity iff their
/// top-degree forms have no common projective zero, i.e. the resultant of
/// the binary forms is nonzero. Computed exactly.
pub fn complete_at_infinity_d2(p1: &MultiPoly, p2: &MultiPoly) -> Result<CompletenessVerdict, AlgebraicError> {
    if p1.nvars() != 2 || p2.nvars() != 2 {
        return Err(AlgebraicError::Shape { polys: 2, dim: p1.nvars().max(p2.nvars()), need: "d = 2" });
    }
    let forms = [p1, p2].map(|p| (p.homogeneous_part(), p.degree().unwrap_or(0)));
    for (i, (_, deg)) in forms.iter().enumerate() {
        if *deg == 0 {
            return Err(AlgebraicError::Degenerate(i));
        }
    }
    let coeffs: Vec<Vec<BigRational>> = forms
        .iter()
        .map(|(f, deg)| binary_form_coeffs(f, *deg).into_iter().map(to_rational).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let res = rational_det(sylvester(&coeffs[0], &coeffs[1], BigRational::zero()));
    Ok(CompletenessVerdict {
        complete: !res.is_zero(),
        resultant: res.to_f64().unwrap_or(f64::NAN),
        resultant_exact: res.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealSolution {
    pub point: [f64; 2],
    pub simple: bool,
}

/// Fixed generic rotation used before elimination.
const ELIMINATION_ANGLE: f64 = 0.537_714_268_1;

/// `Q(z1, ·)` as a polynomial in `z2` whose coefficients are polynomials in `z1`, highest first.
fn as_poly_in_second(q: &MultiPoly) -> Vec<Polynomial> {
    let deg = q.degree().unwrap_or(0);
    let mut by_power = vec![Polynomial::zero(); deg as usize + 1];
    for (e, c) in q.terms() {
        by_power[e[1] as usize] = by_power[e[1] as usize].add(&Polynomial::monomial(e[0] as usize, c));
    }
    while by_power.len() > 1 && by_power.last().is_some_and(|p| p.is_zero()) {
        by_power.pop();
    }
    by_power.reverse();
    by_power
}

fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    if n == 0 {
        return Polynomial::constant(1.0);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Polynomial::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Polynomial>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = m[0][j].mul(&poly_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn gradient(q: &MultiPoly, y: &[f64; 2]) -> [f64; 2] {
    [q.derivative(0).eval(y), q.derivative(1).eval(y)]
}

fn newton_polish(q1: &MultiPoly, q2: &MultiPoly, mut y: [f64; 2]) -> [f64; 2] {
    for _ in 0..50 {
        let f = [q1.eval(&y), q2.eval(&y)];
        let (g1, g2) = (gradient(q1, &y), gradient(q2, &y));
        let det = g1[0] * g2[1] - g1[1] * g2[0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = (f[0] * g2[1] - f[1] * g1[1]) / det;
        let dy = (g1[0] * f[1] - g2[0] * f[0]) / det;
        let next = [y[0] - dx, y[1] - dy];
        let moved = dx.abs().max(dy.abs());
        if !next.iter().all(|v| v.is_finite()) {
            break;
        }
        y = next;
        if moved <= 1e-15 * (1.0 + y[0].abs().max(y[1].abs())) {
            break;
        }
    }
    y
}

/// Candidate roots of a univariate polynomial, complex ones replaced by their real part.
fn candidate_roots(coeffs_high_first: &[f64]) -> Vec<f64> {
    match coeffs_high_first {
        [a, b, c] if *a != 0.0 => {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let q = -0.5 * (b + b.signum() * s);
                let mut r = vec![q / a];
                if q != 0.0 {
                    r.push(c / q);
                } else {
                    r.push(-b / (2.0 * a));
                }
                r
            } else {
                vec![-b / (2.0 * a)]
            }
        }
        [_, b, c] | [b, c] if *b != 0.0 => vec![-c / b],
        _ => Vec::new(),
    }
}

/// All real solutions of `Q1 = Q2 = 0` in two variables, degrees at most two.
pub fn solve_quadratic_system_d2(q1: &MultiPoly, q2: &MultiPoly) -> Result<Vec<RealSolution>, AlgebraicError> {
    for q in [q1, q2] {
        if q.nvars() != 2 {
            return Err(AlgebraicError::Shape { polys: 2, dim: q.nvars(), need: "d = 2" });
        }
        match q.degree() {
            None | Some(0) => return Err(AlgebraicError::Degenerate(0)),
            Some(d) if d > 2 => return Err(AlgebraicError::NotQuadratic(d)),
            _ => {}
        }
    }
    let (s, c) = ELIMINATION_ANGLE.sin_cos();
    let rot = SquareMatrix::from_rows(&[vec![c, -s], vec![s, c]]);
    let r1 = q1.compose_affine(&rot, &[0.0, 0.0]);
    let r2 = q2.compose_affine(&rot, &[0.0, 0.0]);
    let (f, g) = (as_poly_in_second(&r1), as_poly_in_second(&r2));
    let res = if f.len() == 1 && g.len() == 1 {
        // neither depends on z2: only a gcd in z1 could give solutions, which are lines
        return if f[0].is_zero() || g[0].is_zero() { Err(AlgebraicError::PositiveDimensional) } else { Ok(Vec::new()) };
    } else {
        poly_det(&sylvester(&f, &g, Polynomial::zero()))
    };
    let coeff_scale = q1.max_abs_coeff().max(q2.max_abs_coeff());
    let res_scale = res.coeffs().iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    if res.is_zero() || res_scale <= 1e-12 * coeff_scale.powi(4).max(coeff_scale.powi(2)) {
        return Err(AlgebraicError::PositiveDimensional);
    }
    let res = Polynomial::new(res.coeffs().iter().map(|v| if v.abs() <= 1e-14 * res_scale { 0.0 } else { *v }).collect());
    if res.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let bound = res.root_bound();
    let z1s = real_roots(&res, -bound, bound)?;

    let mut out: Vec<RealSolution> = Vec::new();
    for (z1, _) in z1s {
        let fv: Vec<f64> = f.iter().map(|p| p.eval(z1)).collect();
        let gv: Vec<f64> = g.iter().map(|p| p.eval(z1)).collect();
        let mut cands = candidate_roots(&fv);
        cands.extend(candidate_roots(&gv));
        let eval = |z2: f64| (r1.eval(&[z1, z2]).abs() / (1.0 + r1.eval_abs(&[z1, z2]))) + (r2.eval(&[z1, z2]).abs() / (1.0 + r2.eval_abs(&[z1, z2])));
        let Some(z2) = cands.into_iter().min_by(|a, b| eval(*a).total_cmp(&eval(*b))) else { continue };
        let y0 = rot.mul_vec(&[z1, z2]);
        let y = newton_polish(q1, q2, [y0[0], y0[1]]);
        let scale = 1.0 + q1.eval_abs(&y).max(q2.eval_abs(&y));
        if q1.eval(&y).abs() > 1e-8 * scale || q2.eval(&y).abs() > 1e-8 * scale {
            continue;
        }
        if out.iter().any(|o| (o.point[0] - y[0]).abs().max((o.point[1] - y[1]).abs()) <= 1e-8 * (1.0 + y[0].abs().max(y[1].abs()))) {
            continue;
        }
        let (g1, g2) = (gradient(q1, &y), gradient(q2, &y));
        let jac = (g1[0] * g2[1] - g1[1] * g2[0]).abs();
        let jscale = g1[0].hypot(g1[1]) * g2[0].hypot(g2[1]);
        out.push(RealSolution { point: y, simple: jac > 1e-8 * jscale.max(f64::MIN_POSITIVE) });
    }
    out.sort_by(|a, b| a.point[0].total_cmp(&b.point[0]).then(a.point[1].total_cmp(&b.point[1])));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NcReport {
    pub best: usize,
    /// First trial reaching `best`.
    pub witness_trial: Option<u64>,
    /// Perturbation `(a_i0, a_i1, a_i2)` per polynomial at the witness.
    pub witness: Vec<[f64; 3]>,
    /// `histogram[k]` trials had `k` simple real zeros.
    pub histogram: Vec<usize>,
    pub trials: u64,
}

fn perturbation(master: u64, trial: u64) -> Vec<[f64; 3]> {
    let mut rng = trial_rng(master, trial);
    (0..2).map(|_| [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect()
}

fn perturbed(h: &MultiPoly, a: &[f64; 3]) -> MultiPoly {
    h.add(&MultiPoly::from_terms(2, [(a[0], [0u32, 0].as_slice()), (a[1], [1, 0].as_slice()), (a[2], [0, 1].as_slice())]))
}

/// Largest count of simple real zeros of `H + P` over random affine `P`.
pub fn nc_lower_experiment(h: &[MultiPoly], trials: u64, seed: u64) -> Result<NcReport, AlgebraicError> {
    let [h1, h2] = h else {
        return Err(AlgebraicError::Shape { polys: h.len(), dim: 2, need: "two quadratics in two variables" });
    };
    if !complete_at_infinity_d2(h1, h2)?.complete {
        return Err(AlgebraicError::NotComplete);
    }
    let unit = |p: &MultiPoly| p.scale(1.0 / p.max_abs_coeff());
    let (h1, h2) = (unit(h1), unit(h2));
    let counts: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let a = perturbation(seed, t);
            match solve_quadratic_system_d2(&perturbed(&h1, &a[0]), &perturbed(&h2, &a[1])) {
                Ok(sols) => sols.iter().filter(|s| s.simple).count(),
                Err(_) => 0,
            }
        })
        .collect();
    let best = counts.iter().copied().max().unwrap_or(0);
    let witness_trial = counts.iter().position(|c| *c == best && trials > 0).map(|i| i as u64);
    let mut histogram = vec![0; best + 1];
    for c in &counts {
        histogram[*c] += 1;
    }
    Ok(NcReport {
        best,
        witness_trial,
        witness: witness_trial.map(|t| perturbation(seed, t)).unwrap_or_default(),
        histogram,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> MultiPoly {
        MultiPoly::var(2, i)
    }

    fn k(c: f64) -> MultiPoly {
        MultiPoly::constant(2, c)
    }

    #[test]
    fn homogeneous_parts() {
        let p = y(0).pow(3).add(&y(0).mul(&y(1))).add(&k(3.0));
        assert_eq!(homogeneous_part(&p), y(0).pow(3));
    }

    #[test]
    fn completeness_examples() {
        assert!(complete_at_infinity_d2(&y(0).pow(2), &y(1).pow(2)).unwrap().complete);
        let xy = y(0).mul(&y(1));
        assert!(!complete_at_infinity_d2(&xy, &xy.add(&y(0).pow(2))).unwrap().complete);
        let e1 = y(0).pow(2).add(&y(1).pow(2).scale(2.0));
        let e2 = y(0).pow(2).scale(2.0).add(&y(1).pow(2));
        let v = complete_at_infinity_d2(&e1, &e2).unwrap();
        assert!(v.complete);
        assert_eq!(v.resultant_exact, "9");
        // X³+XY+3, Y³−X²+X
        let p1 = y(0).pow(3).add(&y(0).mul(&y(1))).add(&k(3.0));
        let p2 = y(1).pow(3).sub(&y(0).pow(2)).add(&y(0));
        assert!(complete_at_infinity_d2(&p1, &p2).unwrap().complete);
        // common zero at the axis point [0:1]
        assert!(!complete_at_infinity_d2(&y(0).pow(2), &y(0).mul(&y(1))).unwrap().complete);
    }

    #[test]
    fn monomial_certificate() {
        assert!(complete_monomial(&[1, 1, 1]).unwrap());
        assert!(complete_monomial(&[3, 1, 2]).unwrap());
        assert!(complete_monomial(&[2, 0]).is_err());
        for (a, b) in [(1u32, 1u32), (2, 3), (4, 1)] {
            let v = complete_at_infinity_d2(&y(0).pow(a), &y(1).pow(b)).unwrap();
            assert_eq!(v.complete, complete_monomial(&[a, b]).unwrap());
        }
    }

    #[test]
    fn bezout_products() {
        let q = y(0).pow(2).add(&y(1));
        let fam = PolynomialFamily::new(vec![q.clone(), q.clone()]).unwrap();
        assert_eq!(bezout_bound(&fam).unwrap(), 4);
        let z = |i| MultiPoly::var(3, i);
        let fam = PolynomialFamily::new(vec![z(0).pow(2), z(1).pow(3), z(2).mul(&z(0))]).unwrap();
        assert_eq!(bezout_bound(&fam).unwrap(), 12);
        assert!(PolynomialFamily::new(vec![k(1.0)]).is_err());
    }

    #[test]
    fn ellipses_meet_in_four_points() {
        let q1 = y(0).pow(2).add(&y(1).pow(2).scale(2.0)).add(&k(-3.0));
        let q2 = y(0).pow(2).scale(2.0).add(&y(1).pow(2)).add(&k(-3.0));
        let sols = solve_quadratic_system_d2(&q1, &q2).unwrap();
        assert_eq!(sols.len(), 4);
        for s in &sols {
            assert!(s.simple);
            assert!((s.point[0].abs() - 1.0).abs() < 1e-12 && (s.point[1].abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_family_reaches_bound() {
        let q1 = y(0).add(&k(-1.0)).mul(&y(0).add(&k(-2.0)));
        let q2 = y(1).add(&k(-1.0)).mul(&y(1).add(&k(-2.0)));
        let sols = solve_quadratic_system_d2(&q1, &q2).unwrap();
        assert_eq!(sols.len(), 4);
        for s in &sols {
            for v in s.point {
                assert!((v - 1.0).abs() < 1e-12 || (v - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn circles_and_identical_conics() {
        let c1 = y(0).pow(2).add(&y(1).pow(2)).add(&k(-1.0));
        let c2 = y(0).pow(2).add(&y(1).pow(2)).add(&k(-4.0));
        assert!(solve_quadratic_system_d2(&c1, &c2).unwrap().is_empty());
        assert_eq!(solve_quadratic_system_d2(&c1, &c1), Err(AlgebraicError::PositiveDimensional));
    }

    #[test]
    fn tangent_conics_are_not_simple() {
        // unit circle and the line-pair y² = 1 touch at (0, ±1)
        let c = y(0).pow(2).add(&y(1).pow(2)).add(&k(-1.0));
        let l = y(1).pow(2).add(&k(-1.0));
        let sols = solve_quadratic_system_d2(&c, &l).unwrap();
        assert_eq!(sols.len(), 2);
        assert!(sols.iter().all(|s| !s.simple));
    }

    #[test]
    fn nc_search_is_deterministic() {
        let e1 = y(0).pow(2).add(&y(1).pow(2).scale(2.0));
        let e2 = y(0).pow(2).scale(2.0).add(&y(1).pow(2));
        let a = nc_lower_experiment(&[e1.clone(), e2.clone()], 300, 9).unwrap();
        let b = nc_lower_experiment(&[e1, e2], 300, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best, 4);
        let xy = y(0).mul(&y(1));
        assert_eq!(nc_lower_experiment(&[xy.clone(), xy], 10, 1), Err(AlgebraicError::NotComplete));
    }
}
