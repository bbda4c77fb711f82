//! Generalized polynomials `Σ c_i X^{e_i}` with real exponents, the secular
//! function χ of a power cost, and positive root isolation.

use thiserror::Error;

use crate::cost::CostModel;
use crate::linalg::{char_poly_and_adjugate_series, real_eigenvalues, vector, AffineMap, Polynomial, SquareMatrix};

/// Exponents closer than this are one term.
pub const EXPONENT_MERGE: f64 = 1e-12;
/// Largest admissible `|2/(2−p)|`.
pub const MAX_EXPONENT: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignomialError {
    #[error("exponent {0} is negative or not finite")]
    BadExponent(f64),
    #[error("coefficient {0} is not finite")]
    BadCoefficient(f64),
    #[error("χ needs a power-distance cost, got {0}")]
    UnsupportedCost(&'static str),
    #[error("p = {p} gives exponent {exponent}, beyond ±{MAX_EXPONENT}")]
    ExponentOutOfRange { p: f64, exponent: f64 },
    #[error("ambiguous dip near X = {at}: |s| = {value:e} against scale {scale:e}")]
    UncertifiedCount { at: f64, value: f64, scale: f64 },
    #[error("empty root domain ({lo}, {hi}]")]
    EmptyDomain { lo: f64, hi: f64 },
}

/// `Σ c_i X^{e_i}` over `X > 0`, terms ascending by exponent, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Signomial {
    terms: Vec<(f64, f64)>,
}

impl Signomial {
    /// From `(coefficient, exponent)` pairs in any order.
    pub fn new(terms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, SignomialError> {
        let mut v: Vec<(f64, f64)> = Vec::new();
        for (c, e) in terms {
            if !c.is_finite() {
                return Err(SignomialError::BadCoefficient(c));
            }
            if !(e.is_finite() && e >= 0.0) {
                return Err(SignomialError::BadExponent(e));
            }
            v.push((c, e));
        }
        v.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (c, e) in v {
            match merged.last_mut() {
                Some(last) if e - last.1 <= EXPONENT_MERGE => last.0 += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|t| t.0 != 0.0);
        Ok(Self { terms: merged })
    }

    pub fn from_polynomial(p: &Polynomial) -> Self {
        Self::from_polynomial_shifted(p, 0.0, 1.0)
    }

    /// `k·X^shift·p(X)`, for `shift ≥ 0`.
    pub fn from_polynomial_shifted(p: &Polynomial, shift: f64, k: f64) -> Self {
        let terms = p.coeffs().iter().enumerate().map(|(i, c)| (k * c, i as f64 + shift));
        Self::new(terms).expect("finite polynomial with non-negative shift")
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).copied()).expect("terms already valid")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, e)| c * x.powf(*e)).sum()
    }

    /// `Σ |c_i| X^{e_i}`.
    pub fn eval_abs(&self, x: f64) -> f64 {
        self.terms.iter().map(|(c, e)| c.abs() * x.powf(*e)).sum()
    }

    /// Sign alternations of the coefficient sequence.
    pub fn descartes_bound(&self) -> usize {
        self.terms.windows(2).filter(|w| (w[0].0 > 0.0) != (w[1].0 > 0.0)).count()
    }

    /// `(lo, hi)` with every positive root strictly inside; `None` below two terms.
    pub fn root_bounds(&self) -> Option<(f64, f64)> {
        let n = self.terms.len();
        if n < 2 {
            return None;
        }
        let (c_lead, e_lead) = self.terms[n - 1];
        let rest_hi: f64 = self.terms[..n - 1].iter().map(|t| t.0.abs()).sum();
        let hi = (rest_hi / c_lead.abs()).powf(1.0 / (e_lead - self.terms[n - 2].1));
        let (c_low, e_low) = self.terms[0];
        let rest_lo: f64 = self.terms[1..].iter().map(|t| t.0.abs()).sum();
        let lo = (c_low.abs() / rest_lo).powf(1.0 / (self.terms[1].1 - e_low));
        Some((0.5 * lo.min(1.0), 2.0 * hi.max(1.0)))
    }
}

/// Something whose positive roots can be isolated: a value and a rounding scale.
pub trait RootTarget {
    fn eval_with_scale(&self, x: f64) -> (f64, f64);

    /// Points where roots are likely to cluster.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl RootTarget for Signomial {
    fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        (self.eval(x), self.eval_abs(x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsolationOptions {
    pub points_per_decade: usize,
    /// A dip with `|s| ≤ double_root_tol·scale` is a double root.
    pub double_root_tol: f64,
    /// Dips between the two tolerances are ambiguous.
    pub ambiguity_tol: f64,
}

impl Default for IsolationOptions {
    fn default() -> Self {
        Self { points_per_decade: 400, double_root_tol: 1e-9, ambiguity_tol: 1e-7 }
    }
}

/// Positive roots in `[lo, hi]` with multiplicity (1, or 2 for tangencies).
pub fn isolate_positive_roots<T: RootTarget + ?Sized>(
    s: &T,
    lo: f64,
    hi: f64,
    hints: &[f64],
    opts: &IsolationOptions,
) -> Result<Vec<(f64, usize)>, SignomialError> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(SignomialError::EmptyDomain { lo, hi });
    }
    let grid = build_grid(lo, hi, &s.breakpoints(), hints, opts.points_per_decade);
    let vals: Vec<(f64, f64)> = grid.iter().map(|&x| s.eval_with_scale(x)).collect();
    let f = |x: f64| s.eval_with_scale(x).0;

    let mut roots: Vec<(f64, usize)> = Vec::new();
    let n = grid.len();
    for k in 0..n {
        let v = vals[k].0;
        if v == 0.0 {
            let left = (k > 0).then(|| vals[k - 1].0.signum());
            let right = (k + 1 < n).then(|| vals[k + 1].0.signum());
            let m = if left.is_some() && left == right { 2 } else { 1 };
            roots.push((grid[k], m));
            continue;
        }
        if k + 1 < n && vals[k + 1].0 != 0.0 && (vals[k + 1].0 > 0.0) != (v > 0.0) {
            roots.push((bisect(&f, grid[k], grid[k + 1], v), 1));
        }
        if k > 0 && k + 1 < n {
            let (a, b) = (vals[k - 1].0, vals[k + 1].0);
            let same = a != 0.0 && b != 0.0 && (a > 0.0) == (v > 0.0) && (b > 0.0) == (v > 0.0);
            if same && v.abs() < a.abs() && v.abs() <= b.abs() {
                roots.extend(resolve_dip(s, grid[k - 1], grid[k + 1], v.signum(), opts)?);
            }
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(roots)
}

fn build_grid(lo: f64, hi: f64, breaks: &[f64], hints: &[f64], per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).clamp(2000, 40_000);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..=n).map(|k| (llo + (lhi - llo) * k as f64 / n as f64).exp()).collect();
    for &b in breaks.iter().chain(hints) {
        if !(b > lo && b < hi) {
            continue;
        }
        g.push(b);
        for k in 2..=11 {
            let h = 10f64.powi(-k);
            g.extend([b * (1.0 - h), b * (1.0 + h)].into_iter().filter(|x| *x > lo && *x < hi));
        }
    }
    g.sort_by(|a, b| a.total_cmp(b));
    g.dedup();
    g
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
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

/// Golden-section search for the minimum of `sign·s` on `[a, b]` in log space.
fn resolve_dip<T: RootTarget + ?Sized>(
    s: &T,
    a: f64,
    b: f64,
    sign: f64,
    opts: &IsolationOptions,
) -> Result<Vec<(f64, usize)>, SignomialError> {
    let h = |lx: f64| sign * s.eval_with_scale(lx.exp()).0;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut l, mut r) = (a.ln(), b.ln());
    let mut c = r - phi * (r - l);
    let mut d = l + phi * (r - l);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..120 {
        if r - l <= 1e-15 * (1.0 + l.abs()) {
            break;
        }
        if hc < hd {
            r = d;
            d = c;
            hd = hc;
            c = r - phi * (r - l);
            hc = h(c);
        } else {
            l = c;
            c = d;
            hc = hd;
            d = l + phi * (r - l);
            hd = h(d);
        }
    }
    let m = if hc < hd { c.exp() } else { d.exp() };
    let (vm, scale) = s.eval_with_scale(m);
    if vm.abs() <= opts.double_root_tol * scale {
        return Ok(vec![(m, 2)]);
    }
    if sign * vm < 0.0 {
        let f = |x: f64| s.eval_with_scale(x).0;
        let fa = s.eval_with_scale(a).0;
        return Ok(vec![(bisect(&f, a, m, fa), 1), (bisect(&f, m, b, vm), 1)]);
    }
    if vm.abs() <= opts.ambiguity_tol * scale {
        return Err(SignomialError::UncertifiedCount { at: m, value: vm, scale });
    }
    Ok(Vec::new())
}

/// Coefficients of `X ↦ |adj(XI − M)·v|²`.
pub fn adjugate_norm_poly(m: &SquareMatrix, v: &[f64]) -> Polynomial {
    let (_, series) = char_poly_and_adjugate_series(m);
    let w: Vec<Vec<f64>> = series.iter().map(|b| b.mul_vec(v)).collect();
    let mut coeffs = vec![0.0; 2 * w.len()];
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            coeffs[i + j] += vector::dot(wi, wj);
        }
    }
    Polynomial::new(coeffs)
}

/// χ for a power cost: its roots `X > 0` are the values `|g(ρ)|` at which
/// `y(a)` sits at distance `ρ` from `x0`.
///
/// With `a = g(ρ) = −pρ^{p−2}`, `X = |a|`, `M = −sign(p)∇A`, `v = A(x0)`:
/// `χ(X) = det(XI − M)² − κ X^e |adj(XI − M) v|²`, `e = 2/(2−p)`,
/// `κ = |p|^{2/(p−2)}`. When `e < 0` the whole function is multiplied by
/// `X^{−e}` to keep exponents non-negative.
#[derive(Clone, Debug)]
pub struct Chi {
    pub p: f64,
    pub exponent: f64,
    pub kappa: f64,
    /// Whether χ was multiplied by `X^{−e}`.
    pub shifted: bool,
    pub matrix: SquareMatrix,
    pub v: Vec<f64>,
    /// Coefficient form, for Descartes bounds and cross-checks.
    pub signomial: Signomial,
}

pub fn build_chi(a: &AffineMap, x0: &[f64], c: &CostModel) -> Result<Chi, SignomialError> {
    let p = match c {
        CostModel::PowerDistance { p } => *p,
        other => return Err(SignomialError::UnsupportedCost(other.variant_name())),
    };
    let exponent = 2.0 / (2.0 - p);
    if !(exponent.abs() <= MAX_EXPONENT) {
        return Err(SignomialError::ExponentOutOfRange { p, exponent });
    }
    let kappa = p.abs().powf(2.0 / (p - 2.0));
    let matrix = a.linear.scale(-p.signum());
    let v = a.apply(x0);
    let (charp, _) = char_poly_and_adjugate_series(&matrix);
    let det2 = charp.mul(&charp);
    let adj2 = adjugate_norm_poly(&matrix, &v);
    let shifted = exponent < 0.0;
    let signomial = if shifted {
        Signomial::from_polynomial_shifted(&det2, -exponent, 1.0)
            .add(&Signomial::from_polynomial_shifted(&adj2, 0.0, -kappa))
    } else {
        Signomial::from_polynomial(&det2).add(&Signomial::from_polynomial_shifted(&adj2, exponent, -kappa))
    };
    Ok(Chi { p, exponent, kappa, shifted, matrix, v, signomial })
}

/// Root count the theory guarantees for generic interior seeds, when proved.
pub fn predicted_count(d: usize, p: f64) -> Option<usize> {
    if p <= 1.0 {
        Some(2 * d)
    } else if p < 1.6 || p > 2.0 + 2.0 / 3.0 {
        Some(2 * d + 1)
    } else {
        None
    }
}

impl Chi {
    pub fn dim(&self) -> usize {
        self.v.len()
    }

    /// The curve parameter `a` for a root variable `X`.
    pub fn a_of_x(&self, x: f64) -> f64 {
        -self.p.signum() * x
    }

    pub fn x_of_a(&self, a: f64) -> f64 {
        -self.p.signum() * a
    }

    /// `ρ` with `|g(ρ)| = X`.
    pub fn rho_of_x(&self, x: f64) -> f64 {
        (x / self.p.abs()).powf(1.0 / (self.p - 2.0))
    }

    /// `adj(XI − M)·v` and `det(XI − M)`, without forming an inverse.
    fn adj_v_and_det(&self, x: f64) -> (Vec<f64>, f64) {
        let shifted = self.matrix.shifted(x);
        let lu = shifted.lu();
        let d = lu.det();
        let tiny = 1e-10 * (1.0 + x.abs() + self.matrix.max_norm());
        if !lu.is_singular() && lu.min_pivot() > tiny {
            if let Some(y) = lu.solve(&self.v) {
                return (vector::scale(&y, d), d);
            }
        }
        (crate::linalg::adjugate(&shifted).mul_vec(&self.v), d)
    }

    /// The domain `(lo, hi]` holding every positive root, widened to cover `hints`.
    pub fn domain(&self, hints: &[f64]) -> (f64, f64) {
        let (mut lo, mut hi) = self.signomial.root_bounds().unwrap_or((1e-3, 1e3));
        for &h in hints.iter().chain(&self.breakpoints()) {
            if h > 0.0 {
                lo = lo.min(0.5 * h);
                hi = hi.max(2.0 * h);
            }
        }
        (lo, hi)
    }

    pub fn isolate(&self, hints: &[f64], opts: &IsolationOptions) -> Result<Vec<(f64, usize)>, SignomialError> {
        let (lo, hi) = self.domain(hints);
        isolate_positive_roots(self, lo, hi, hints, opts)
    }
}

impl RootTarget for Chi {
    fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let (w, d) = self.adj_v_and_det(x);
        let w2 = vector::dot(&w, &w);
        let (poly, sig) = if self.shifted {
            (x.powf(-self.exponent) * d * d, self.kappa * w2)
        } else {
            (d * d, self.kappa * x.powf(self.exponent) * w2)
        };
        (poly - sig, poly + sig)
    }

    /// Positive real eigenvalues of `M`, where `y(·)` has its poles.
    fn breakpoints(&self) -> Vec<f64> {
        real_eigenvalues(&self.matrix).into_iter().filter(|x| *x > 0.0).collect()
    }
}
