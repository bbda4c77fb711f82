use thiserror::Error;

use super::poly::Polynomial;

/// Roots closer than `MULTIPLICITY_MERGE·(1+|r|)` are merged into one root
/// whose multiplicity is the sum.
pub const MULTIPLICITY_MERGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("ill-conditioned near {at}: |p| = {value:e} is within rounding noise of a tangency")]
    IllConditioned { at: f64, value: f64 },
}

/// All real roots of `p` in `[lo, hi]`, ascending, with multiplicities.
///
/// Works by recursion on the derivative: between consecutive critical points
/// `p` is monotone, so each sign change is bracketed and bisected, and a
/// critical point where `|p|` is within rounding noise of zero is a multiple
/// root.
pub fn real_roots(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<(f64, usize)>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(RootError::BadInterval { lo, hi });
    }
    isolate(p, lo, hi)
}

fn noise(p: &Polynomial, x: f64) -> f64 {
    let deg = p.degree().unwrap_or(0).max(1) as f64;
    8.0 * deg * f64::EPSILON * p.eval_abs(x)
}

fn isolate(p: &Polynomial, lo: f64, hi: f64) -> Result<Vec<(f64, usize)>, RootError> {
    let c = p.coeffs();
    match p.degree() {
        None | Some(0) => return Ok(Vec::new()),
        Some(1) => {
            let r = -c[0] / c[1];
            return Ok(if (lo..=hi).contains(&r) { vec![(r, 1)] } else { Vec::new() });
        }
        _ => {}
    }
    let crit = isolate(&p.derivative(), lo, hi)?;
    let mut knots = vec![(lo, 0usize)];
    knots.extend(crit.into_iter().filter(|&(x, _)| x > lo && x < hi));
    knots.push((hi, 0));

    let vals: Vec<f64> = knots.iter().map(|&(x, _)| p.eval(x)).collect();
    let zero: Vec<bool> = knots
        .iter()
        .zip(&vals)
        .map(|(&(x, _), v)| v.abs() <= noise(p, x))
        .collect();

    let mut roots = Vec::new();
    for (k, &(x, m)) in knots.iter().enumerate() {
        if zero[k] {
            roots.push((x, m + 1));
            continue;
        }
        let interior = k > 0 && k + 1 < knots.len();
        if interior && vals[k].abs() <= 16.0 * noise(p, x) {
            let same_sign = |j: usize| zero[j] || vals[j].signum() == vals[k].signum();
            if same_sign(k - 1) && same_sign(k + 1) {
                return Err(RootError::IllConditioned { at: x, value: vals[k] });
            }
        }
    }
    for k in 0..knots.len() - 1 {
        if zero[k] || zero[k + 1] {
            continue;
        }
        if vals[k].signum() != vals[k + 1].signum() {
            roots.push((bisect(p, knots[k].0, knots[k + 1].0, vals[k]), 1));
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(merge(roots))
}

fn bisect(p: &Polynomial, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..300 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn merge(sorted: Vec<(f64, usize)>) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::with_capacity(sorted.len());
    for (r, m) in sorted {
        if let Some(last) = out.last_mut() {
            if r - last.0 <= MULTIPLICITY_MERGE * (1.0 + last.0.abs()) {
                let total = last.1 + m;
                last.0 = (last.0 * last.1 as f64 + r * m as f64) / total as f64;
                last.1 = total;
                continue;
            }
        }
        out.push((r, m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_cases() {
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        let r = real_roots(&p, -2.0, 2.0).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].0 + 1.0).abs() < 1e-15 && r[0].1 == 1);
        assert!((r[1].0 - 1.0).abs() < 1e-15 && r[1].1 == 1);

        let sq = Polynomial::from_roots(&[1.0, 1.0]);
        assert_eq!(real_roots(&sq, 0.0, 2.0).unwrap(), vec![(1.0, 2)]);
        let cube = Polynomial::from_roots(&[1.0, 1.0, 1.0]);
        assert_eq!(real_roots(&cube, 0.0, 2.0).unwrap(), vec![(1.0, 3)]);
        let none = Polynomial::new(vec![1.0, 0.0, 1.0]);
        assert!(real_roots(&none, -5.0, 5.0).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(real_roots(&Polynomial::zero(), 0.0, 1.0), Err(RootError::ZeroPolynomial));
        assert!(matches!(
            real_roots(&Polynomial::constant(1.0), 1.0, 0.0),
            Err(RootError::BadInterval { .. })
        ));
    }

    #[test]
    fn mixed_multiplicities() {
        let p = Polynomial::from_roots(&[-2.0, 0.5, 0.5, 3.0]);
        let r = real_roots(&p, -10.0, 10.0).unwrap();
        let mults: Vec<usize> = r.iter().map(|x| x.1).collect();
        assert_eq!(mults, vec![1, 2, 1]);
        assert!((r[1].0 - 0.5).abs() < 1e-7);
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn degree_eight_matches_dense_sign_scan() {
        let mut seed = 99u64;
        for _ in 0..5 {
            let p = Polynomial::new((0..9).map(|_| lcg(&mut seed)).collect());
            let (lo, hi) = (-3.0, 3.0);
            let found = real_roots(&p, lo, hi).unwrap();
            // oracle: sign changes on a 10^6-point grid
            let n = 1_000_000;
            let mut oracle = Vec::new();
            let mut prev = p.eval(lo);
            for k in 1..=n {
                let x = lo + (hi - lo) * k as f64 / n as f64;
                let v = p.eval(x);
                if v.signum() != prev.signum() {
                    oracle.push(x);
                }
                prev = v;
            }
            assert_eq!(found.len(), oracle.len());
            for ((r, m), o) in found.iter().zip(&oracle) {
                assert_eq!(*m, 1);
                assert!((r - o).abs() <= 6.0 / n as f64);
                let bound = 1e-8 * p.coeffs().iter().fold(0.0, |a: f64, c| a.max(c.abs()))
                    * (1.0 + r.abs()).powi(8);
                assert!(p.eval(*r).abs() <= bound);
            }
        }
    }
}
