use std::fmt;

/// Univariate polynomial with ascending real coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl Polynomial {
    /// Trailing zeros are stripped, so the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(k: usize, c: f64) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_roots(roots: &[f64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(1.0), |acc, &r| acc.mul(&Self::new(vec![-r, 1.0])))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `Σ |c_k| |x|^k`, the natural scale for rounding error in `eval`.
    pub fn eval_abs(&self, x: f64) -> f64 {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Cauchy bound: every root has modulus below the returned value.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading().abs();
        let n = self.coeffs.len();
        1.0 + self.coeffs[..n.saturating_sub(1)]
            .iter()
            .fold(0.0, |m: f64, c| m.max(c.abs() / lead))
    }
}
