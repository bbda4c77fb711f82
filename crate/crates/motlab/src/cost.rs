//! Cost families, their x-gradients, the radial profile `g(t) = −f′(t)/t`
//! and second-order data.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{vector, SquareMatrix};
use crate::multipoly::MultiPoly;

/// Gap below which a point is treated as off the differentiability domain.
pub const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("exponent p = {0} is not allowed (p must be finite and differ from 0 and 2)")]
    InvalidExponent(f64),
    #[error("not differentiable: {0}")]
    NotDifferentiable(String),
    #[error("{op} is undefined for the {variant} cost")]
    WrongVariant { op: &'static str, variant: &'static str },
    #[error("value {0} is not attained by g")]
    OutOfRange(f64),
    #[error("g is not monotone on (0, inf)")]
    NonMonotone,
    #[error("cost is not twice differentiable at the diagonal: {0}")]
    NotSmoothEnough(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomial-gradient basis is singular")]
    SingularBasis,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `c(x, y) = f(|x − y|)` given by `f` and `f′`.
#[derive(Clone)]
pub struct RadialProfile {
    pub label: String,
    f: ScalarFn,
    df: ScalarFn,
}

impl RadialProfile {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), f: Arc::new(f), df: Arc::new(df) }
    }

    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn df(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

#[derive(Clone)]
pub enum CostModel {
    PowerDistance { p: f64 },
    OneNorm,
    InfNorm,
    /// `c_x(x, y) = Σ P_i(y) u_i`, i.e. `c(x, y) = Σ P_i(y) (u_i · x)`.
    PolyGradient { polys: Vec<MultiPoly>, basis: Vec<Vec<f64>> },
    Radial(RadialProfile),
}

impl fmt::Debug for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerDistance { p } => write!(f, "PowerDistance {{ p: {p} }}"),
            Self::OneNorm => write!(f, "OneNorm"),
            Self::InfNorm => write!(f, "InfNorm"),
            Self::PolyGradient { polys, basis } => f
                .debug_struct("PolyGradient")
                .field("polys", polys)
                .field("basis", basis)
                .finish(),
            Self::Radial(r) => write!(f, "Radial({})", r.label),
        }
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        -1.0
    }
}

impl CostModel {
    pub fn power(p: f64) -> Result<Self, CostError> {
        if !p.is_finite() || p == 0.0 || p == 2.0 {
            return Err(CostError::InvalidExponent(p));
        }
        Ok(Self::PowerDistance { p })
    }

    pub fn poly_gradient(polys: Vec<MultiPoly>, basis: Vec<Vec<f64>>) -> Result<Self, CostError> {
        let d = polys.len();
        if basis.len() != d {
            return Err(CostError::DimensionMismatch { expected: d, got: basis.len() });
        }
        for p in &polys {
            if p.nvars() != d {
                return Err(CostError::DimensionMismatch { expected: d, got: p.nvars() });
            }
        }
        for u in &basis {
            if u.len() != d {
                return Err(CostError::DimensionMismatch { expected: d, got: u.len() });
            }
        }
        let m = SquareMatrix::from_rows(&basis);
        if m.lu().min_pivot() <= 1e-12 * (1.0 + m.max_norm()) {
            return Err(CostError::SingularBasis);
        }
        Ok(Self::PolyGradient { polys, basis })
    }

    /// `PolyGradient` with the standard basis.
    pub fn poly_gradient_std(polys: Vec<MultiPoly>) -> Result<Self, CostError> {
        let d = polys.len();
        let basis = (0..d).map(|i| (0..d).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        Self::poly_gradient(polys, basis)
    }

    pub fn radial(profile: RadialProfile) -> Self {
        Self::Radial(profile)
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            Self::PowerDistance { .. } => "power-distance",
            Self::OneNorm => "one-norm",
            Self::InfNorm => "inf-norm",
            Self::PolyGradient { .. } => "polynomial-gradient",
            Self::Radial(_) => "radial",
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Self::PowerDistance { .. } | Self::Radial(_))
    }

    fn wrong(&self, op: &'static str) -> CostError {
        CostError::WrongVariant { op, variant: self.variant_name() }
    }

    fn check_dims(x: &[f64], y: &[f64]) -> Result<(), CostError> {
        if x.len() != y.len() {
            return Err(CostError::DimensionMismatch { expected: x.len(), got: y.len() });
        }
        Ok(())
    }

    pub fn cost(&self, x: &[f64], y: &[f64]) -> f64 {
        let u = vector::sub(y, x);
        match self {
            Self::PowerDistance { p } => vector::norm(&u).powf(*p),
            Self::OneNorm => u.iter().map(|v| v.abs()).sum(),
            Self::InfNorm => vector::norm_inf(&u),
            Self::PolyGradient { polys, basis } => polys
                .iter()
                .zip(basis)
                .map(|(p, b)| p.eval(y) * vector::dot(b, x))
                .sum(),
            Self::Radial(r) => r.f(vector::norm(&u)),
        }
    }

    /// `∂c/∂x (x, y)`.
    pub fn grad_x(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>, CostError> {
        Self::check_dims(x, y)?;
        let u = vector::sub(y, x);
        match self {
            Self::PowerDistance { .. } | Self::Radial(_) => {
                let r = vector::norm(&u);
                if r <= DOMAIN_TOL {
                    return Err(CostError::NotDifferentiable("x = y for a radial cost".into()));
                }
                Ok(vector::scale(&u, self.g_of(r)?))
            }
            Self::OneNorm => {
                if let Some(i) = u.iter().position(|v| v.abs() <= DOMAIN_TOL) {
                    return Err(CostError::NotDifferentiable(format!("x_{i} = y_{i} for the 1-norm")));
                }
                Ok(u.iter().map(|v| -sign(*v)).collect())
            }
            Self::InfNorm => {
                let i = argmax_strict(&u).ok_or_else(|| {
                    CostError::NotDifferentiable("no unique argmax coordinate for the inf-norm".into())
                })?;
                let mut g = vec![0.0; u.len()];
                g[i] = -sign(u[i]);
                Ok(g)
            }
            Self::PolyGradient { polys, basis } => {
                if polys.len() != x.len() {
                    return Err(CostError::DimensionMismatch { expected: polys.len(), got: x.len() });
                }
                let mut g = vec![0.0; x.len()];
                for (p, b) in polys.iter().zip(basis) {
                    let v = p.eval(y);
                    for (gk, bk) in g.iter_mut().zip(b) {
                        *gk += v * bk;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Radial profile `g(t) = −f′(t)/t`.
    pub fn g_of(&self, t: f64) -> Result<f64, CostError> {
        match self {
            Self::PowerDistance { p } => Ok(-p * t.powf(p - 2.0)),
            Self::Radial(r) => Ok(-r.df(t) / t),
            _ => Err(self.wrong("g")),
        }
    }

    /// `−g`, the profile in the reflected (minimization) convention.
    pub fn reflected_g_of(&self, t: f64) -> Result<f64, CostError> {
        self.g_of(t).map(|v| -v)
    }

    /// `g′(t)`; closed form for power costs, central differences otherwise.
    pub fn g_prime(&self, t: f64) -> Result<f64, CostError> {
        match self {
            Self::PowerDistance { p } => Ok(-p * (p - 2.0) * t.powf(p - 3.0)),
            Self::Radial(_) => {
                let h = 1e-5 * t;
                Ok((self.g_of(t + h)? - self.g_of(t - h)?) / (2.0 * h))
            }
            _ => Err(self.wrong("g'")),
        }
    }

    /// The unique `t > 0` with `g(t) = s`.
    pub fn g_inverse(&self, s: f64) -> Result<f64, CostError> {
        match self {
            Self::PowerDistance { p } => {
                let q = -s / p;
                if !(q > 0.0) || !q.is_finite() {
                    return Err(CostError::OutOfRange(s));
                }
                Ok(q.powf(1.0 / (p - 2.0)))
            }
            Self::Radial(_) => {
                let scan = self.radial_scan()?;
                scan.invert(|t| self.g_of(t).expect("radial"), s)
            }
            _ => Err(self.wrong("g inverse")),
        }
    }

    /// Range of `g` over the scanned window of `t`.
    pub fn g_range(&self) -> Result<(f64, f64), CostError> {
        match self {
            Self::PowerDistance { p } => Ok(if *p > 0.0 {
                (f64::NEG_INFINITY, 0.0)
            } else {
                (0.0, f64::INFINITY)
            }),
            Self::Radial(_) => {
                let scan = self.radial_scan()?;
                Ok(scan.range())
            }
            _ => Err(self.wrong("g range")),
        }
    }

    /// Checks that `g` is monotone on the scan window.
    pub fn check_monotone(&self) -> Result<(), CostError> {
        match self {
            Self::PowerDistance { .. } => Ok(()),
            Self::Radial(_) => self.radial_scan().map(|_| ()),
            _ => Err(self.wrong("monotonicity check")),
        }
    }

    fn radial_scan(&self) -> Result<GScan, CostError> {
        GScan::new(|t| self.g_of(t).expect("radial"))
    }

    /// `∂²c/∂x∂y`, entry `(k, l) = ∂_{y_l} c_{x_k}`.
    pub fn grad_xy(&self, x: &[f64], y: &[f64]) -> Result<SquareMatrix, CostError> {
        Self::check_dims(x, y)?;
        let d = x.len();
        match self {
            Self::PowerDistance { .. } | Self::Radial(_) => {
                let u = vector::sub(y, x);
                let r = vector::norm(&u);
                if r <= DOMAIN_TOL {
                    return Err(CostError::NotDifferentiable("x = y for a radial cost".into()));
                }
                let g = self.g_of(r)?;
                let gp = self.g_prime(r)?;
                Ok(SquareMatrix::from_fn(d, |k, l| {
                    let delta = if k == l { g } else { 0.0 };
                    delta + gp * u[k] * u[l] / r
                }))
            }
            Self::OneNorm | Self::InfNorm => {
                self.grad_x(x, y)?;
                Ok(SquareMatrix::zeros(d))
            }
            Self::PolyGradient { polys, basis } => {
                let mut m = SquareMatrix::zeros(d);
                for (p, b) in polys.iter().zip(basis) {
                    for l in 0..d {
                        let dp = p.derivative(l).eval(y);
                        for k in 0..d {
                            m[(k, l)] += b[k] * dp;
                        }
                    }
                }
                Ok(m)
            }
        }
    }

    /// `∂²c/∂x²`.
    pub fn hess_xx(&self, x: &[f64], y: &[f64]) -> Result<SquareMatrix, CostError> {
        match self {
            Self::PowerDistance { .. } | Self::Radial(_) => Ok(self.grad_xy(x, y)?.scale(-1.0)),
            Self::OneNorm | Self::InfNorm => {
                self.grad_x(x, y)?;
                Ok(SquareMatrix::zeros(x.len()))
            }
            Self::PolyGradient { .. } => Ok(SquareMatrix::zeros(x.len())),
        }
    }

    /// The quadratics `Y ↦ c_{x_i yy}(x0, x0)[Y²]`, without the Taylor ½.
    pub fn second_order_family(&self, x0: &[f64]) -> Result<Vec<MultiPoly>, CostError> {
        let d = x0.len();
        match self {
            Self::PolyGradient { polys, basis } => {
                if polys.len() != d {
                    return Err(CostError::DimensionMismatch { expected: polys.len(), got: d });
                }
                let mut out = vec![MultiPoly::zero(d); d];
                for (p, b) in polys.iter().zip(basis) {
                    for j in 0..d {
                        for l in 0..d {
                            let h = p.derivative(j).derivative(l).eval(x0);
                            if h == 0.0 {
                                continue;
                            }
                            let mono = MultiPoly::var(d, j).mul(&MultiPoly::var(d, l));
                            for (k, q) in out.iter_mut().enumerate() {
                                *q = q.add(&mono.scale(h * b[k]));
                            }
                        }
                    }
                }
                Ok(out)
            }
            // c_x(x0, y) = −p|y−x0|^{p−2}(y−x0) is homogeneous of degree p−1 in y−x0:
            // C² at the diagonal iff p−1 > 2 or it is a polynomial (even p), and its
            // second derivative there vanishes in both cases.
            Self::PowerDistance { p } => {
                let even_poly = p.fract() == 0.0 && *p >= 4.0 && (*p as i64) % 2 == 0;
                if *p > 3.0 || even_poly {
                    Ok(vec![MultiPoly::zero(d); d])
                } else {
                    Err(CostError::NotSmoothEnough(format!(
                        "|x-y|^p with p = {p} is not C^2 in y at the diagonal"
                    )))
                }
            }
            Self::OneNorm | Self::InfNorm | Self::Radial(_) => Err(CostError::NotSmoothEnough(
                format!("no closed-form second-order family for the {} cost", self.variant_name()),
            )),
        }
    }
}

fn argmax_strict(u: &[f64]) -> Option<usize> {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    idx.sort_by(|&a, &b| u[b].abs().total_cmp(&u[a].abs()));
    let top = idx[0];
    if u[top].abs() <= DOMAIN_TOL {
        return None;
    }
    if idx.len() > 1 && u[top].abs() - u[idx[1]].abs() <= DOMAIN_TOL {
        return None;
    }
    Some(top)
}

/// Log-spaced samples of a radial `g`, used to check monotonicity and invert.
struct GScan {
    ts: Vec<f64>,
    gs: Vec<f64>,
    increasing: bool,
}

impl GScan {
    const LOG_LO: f64 = -18.0;
    const LOG_HI: f64 = 18.0;
    const N: usize = 4000;

    fn new(g: impl Fn(f64) -> f64) -> Result<Self, CostError> {
        let mut ts = Vec::with_capacity(Self::N);
        let mut gs = Vec::with_capacity(Self::N);
        for k in 0..Self::N {
            let lt = Self::LOG_LO + (Self::LOG_HI - Self::LOG_LO) * k as f64 / (Self::N - 1) as f64;
            let t = lt.exp();
            let v = g(t);
            if !v.is_finite() {
                if ts.is_empty() {
                    continue;
                }
                break;
            }
            ts.push(t);
            gs.push(v);
        }
        if gs.len() < 2 {
            return Err(CostError::NonMonotone);
        }
        let increasing = gs[gs.len() - 1] > gs[0];
        let tol = |a: f64| 1e-12 * (1.0 + a.abs());
        let monotone = gs.windows(2).all(|w| {
            if increasing {
                w[1] >= w[0] - tol(w[0])
            } else {
                w[1] <= w[0] + tol(w[0])
            }
        });
        if !monotone || gs[0] == gs[gs.len() - 1] {
            return Err(CostError::NonMonotone);
        }
        Ok(Self { ts, gs, increasing })
    }

    fn range(&self) -> (f64, f64) {
        let (a, b) = (self.gs[0], self.gs[self.gs.len() - 1]);
        (a.min(b), a.max(b))
    }

    fn invert(&self, g: impl Fn(f64) -> f64, s: f64) -> Result<f64, CostError> {
        let (lo, hi) = self.range();
        if !(s >= lo && s <= hi) {
            return Err(CostError::OutOfRange(s));
        }
        let above = |v: f64| if self.increasing { v >= s } else { v <= s };
        let k = self.gs.iter().position(|&v| above(v)).ok_or(CostError::OutOfRange(s))?;
        if k == 0 {
            return Ok(self.ts[0]);
        }
        let (mut a, mut b) = (self.ts[k - 1], self.ts[k]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if above(g(m)) {
                b = m;
            } else {
                a = m;
            }
        }
        Ok(0.5 * (a + b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(c: &CostModel, x: &[f64], y: &[f64]) -> Vec<f64> {
        let h = 1e-6 * (1.0 + vector::norm(y));
        (0..x.len())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (c.cost(&xp, y) - c.cost(&xm, y)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn rejects_trivial_exponents() {
        assert!(CostModel::power(0.0).is_err());
        assert!(CostModel::power(2.0).is_err());
        assert!(CostModel::power(f64::NAN).is_err());
    }

    #[test]
    fn gradient_examples() {
        // p = 2 is rejected by the constructor; the formula is still exercised directly
        let c = CostModel::PowerDistance { p: 2.0 };
        assert_eq!(c.grad_x(&[0.0, 0.0], &[1.0, -3.0]).unwrap(), vec![-2.0, 6.0]);
        let g = CostModel::OneNorm.grad_x(&[0.0, 0.0], &[1.0, -2.0]).unwrap();
        assert_eq!(g, vec![-1.0, 1.0]);
        assert!(CostModel::OneNorm.grad_x(&[0.0, 0.0], &[0.0, 1.0]).is_err());
        let g = CostModel::InfNorm.grad_x(&[0.0, 0.0, 0.0], &[1.0, -3.0, 2.0]).unwrap();
        assert_eq!(g, vec![0.0, 1.0, 0.0]);
        assert!(CostModel::InfNorm.grad_x(&[0.0, 0.0], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn power_gradient_matches_finite_differences() {
        let c = CostModel::power(0.5).unwrap();
        for y in [[0.3, -1.2], [2.0, 0.7], [-0.4, -0.9]] {
            let x = [0.1, 0.2];
            let g = c.grad_x(&x, &y).unwrap();
            let fd = fd_grad(&c, &x, &y);
            for (a, b) in g.iter().zip(&fd) {
                assert!((a - b).abs() < 1e-6, "{a} vs {b}");
            }
            let r = vector::dist(&x, &y);
            let radial = vector::scale(&vector::sub(&y, &x), c.g_of(r).unwrap());
            for (a, b) in g.iter().zip(&radial) {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn g_values_and_inverse() {
        let p1 = CostModel::power(1.0).unwrap();
        assert!((p1.g_of(3.0).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        assert!((p1.g_inverse(-1.0 / 3.0).unwrap() - 3.0).abs() < 1e-12);
        let ph = CostModel::power(0.5).unwrap();
        assert!((ph.g_of(4.0).unwrap() + 1.0 / 16.0).abs() < 1e-15);
        let p3 = CostModel::power(3.0).unwrap();
        assert_eq!(p3.g_of(2.0).unwrap(), -6.0);
        assert!((p3.g_inverse(-6.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(p3.g_inverse(1.0), Err(CostError::OutOfRange(1.0)));
        assert!(CostModel::OneNorm.g_of(1.0).is_err());
        for t in [1e-3, 0.5, 1.0, 7.0, 300.0] {
            for c in [&p1, &ph, &p3] {
                let back = c.g_inverse(c.g_of(t).unwrap()).unwrap();
                assert!((back - t).abs() <= 1e-10 * t);
            }
        }
    }

    #[test]
    fn cosh_profile_inverts_by_scan() {
        let c = CostModel::radial(RadialProfile::new("cosh", f64::cosh, f64::sinh));
        for s in [-1.5, -3.0, -40.0, -1e4] {
            let t = c.g_inverse(s).unwrap();
            assert!((c.g_of(t).unwrap() - s).abs() <= 1e-10 * s.abs());
        }
        assert!(matches!(c.g_inverse(-0.5), Err(CostError::OutOfRange(_))));
        let wiggly = CostModel::radial(RadialProfile::new("wiggly", |t| t.sin(), |t| t.cos()));
        assert_eq!(wiggly.check_monotone(), Err(CostError::NonMonotone));
    }

    #[test]
    fn second_order_family_examples() {
        let y1 = MultiPoly::var(2, 0);
        let y2 = MultiPoly::var(2, 1);
        let p1 = y1.pow(2).add(&y2.pow(2).scale(2.0));
        let p2 = y1.pow(2).scale(2.0).add(&y2.pow(2));
        let c = CostModel::poly_gradient_std(vec![p1.clone(), p2.clone()]).unwrap();
        let h = c.second_order_family(&[0.3, -0.8]).unwrap();
        assert_eq!(h, vec![p1.scale(2.0), p2.scale(2.0)]);

        let lin = CostModel::poly_gradient_std(vec![y1.clone(), y2.add(&y1)]).unwrap();
        assert!(lin.second_order_family(&[1.0, 1.0]).unwrap().iter().all(|q| q.is_zero()));

        assert!(CostModel::power(3.0).unwrap().second_order_family(&[0.0, 0.0]).is_err());
        assert!(CostModel::OneNorm.second_order_family(&[0.0]).is_err());
    }

    #[test]
    fn power_four_second_order_matches_finite_differences() {
        let c = CostModel::power(4.0).unwrap();
        let x0 = [0.0, 0.0];
        let fam = c.second_order_family(&x0).unwrap();
        // central second differences of y ↦ c_x(x0, y) at y = x0 (offset to stay off x = y)
        let h = 1e-3;
        let shift = [1e-9, 0.0];
        let gx = |y: [f64; 2]| c.grad_x(&x0, &[y[0] + shift[0], y[1] + shift[1]]).unwrap();
        for k in 0..2 {
            for j in 0..2 {
                let mut e = [0.0; 2];
                e[j] = h;
                let plus = gx(e)[k];
                let minus = gx([-e[0], -e[1]])[k];
                let center = gx([0.0, 0.0])[k];
                let second = (plus - 2.0 * center + minus) / (h * h);
                assert!(second.abs() < 1e-4);
                let mut unit = [0.0; 2];
                unit[j] = 1.0;
                assert_eq!(fam[k].eval(&unit), 0.0);
            }
        }
    }

    #[test]
    fn poly_gradient_independent_of_x() {
        let y1 = MultiPoly::var(2, 0);
        let y2 = MultiPoly::var(2, 1);
        let c = CostModel::poly_gradient(
            vec![y1.mul(&y2), y2.pow(2).add(&y1)],
            vec![vec![1.0, 1.0], vec![0.0, 2.0]],
        )
        .unwrap();
        let y = [0.4, -1.1];
        assert_eq!(c.grad_x(&[0.0, 0.0], &y).unwrap(), c.grad_x(&[3.0, -7.0], &y).unwrap());
        let fd = fd_grad(&c, &[0.5, 0.5], &y);
        for (a, b) in c.grad_x(&[0.5, 0.5], &y).unwrap().iter().zip(&fd) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(CostModel::poly_gradient(vec![y1.clone(), y2.clone()], vec![vec![1.0, 1.0], vec![2.0, 2.0]])
            .is_err());
    }

    #[test]
    fn mixed_second_derivative_matches_finite_differences() {
        for c in [CostModel::power(0.5).unwrap(), CostModel::power(3.0).unwrap()] {
            let x = [0.2, -0.1];
            let y = [1.0, 0.6];
            let m = c.grad_xy(&x, &y).unwrap();
            let h = 1e-6;
            for l in 0..2 {
                let mut yp = y;
                let mut ym = y;
                yp[l] += h;
                ym[l] -= h;
                let gp = c.grad_x(&x, &yp).unwrap();
                let gm = c.grad_x(&x, &ym).unwrap();
                for k in 0..2 {
                    assert!((m[(k, l)] - (gp[k] - gm[k]) / (2.0 * h)).abs() < 1e-6);
                }
            }
            let hxx = c.hess_xx(&x, &y).unwrap();
            assert_eq!(hxx, m.scale(-1.0));
        }
    }
}
