//! Sparse multivariate polynomials with real coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::SquareMatrix;

/// Map from exponent multi-index to coefficient. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultiPolyRepr", into = "MultiPolyRepr")]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

#[derive(Serialize, Deserialize)]
struct MultiPolyRepr {
    nvars: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl TryFrom<MultiPolyRepr> for MultiPoly {
    type Error = String;
    fn try_from(r: MultiPolyRepr) -> Result<Self, String> {
        if let Some((_, e)) = r.terms.iter().find(|(_, e)| e.len() != r.nvars) {
            return Err(format!("exponent {e:?} does not have {} entries", r.nvars));
        }
        Ok(MultiPoly::from_terms(r.nvars, r.terms.iter().map(|(c, e)| (*c, e.as_slice()))))
    }
}

impl From<MultiPoly> for MultiPolyRepr {
    fn from(p: MultiPoly) -> Self {
        MultiPolyRepr { nvars: p.nvars, terms: p.terms.into_iter().map(|(e, c)| (c, e)).collect() }
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(i, k)| if *k == 1 { format!("Y{}", i + 1) } else { format!("Y{}^{k}", i + 1) })
                    .collect();
                if mono.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::from_terms(nvars, [(c, vec![0; nvars].as_slice())])
    }

    /// The coordinate function `Y_i` (zero-based `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(nvars, [(1.0, e.as_slice())])
    }

    pub fn from_terms<'a>(nvars: usize, terms: impl IntoIterator<Item = (f64, &'a [u32])>) -> Self {
        let mut p = Self::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent length must equal the number of variables");
            p.add_term(e.to_vec(), c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn coeff(&self, e: &[u32]) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(y).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }

    /// `Σ |c_α| |y|^α`, the rounding scale for `eval`.
    pub fn eval_abs(&self, y: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.abs() * e.iter().zip(y).map(|(k, v)| v.abs().powi(*k as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, 1.0), |acc, _| acc.mul(self))
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * e[i] as f64);
            }
        }
        out
    }

    /// Top-degree slice `P^hom`.
    pub fn homogeneous_part(&self) -> Self {
        let Some(deg) = self.degree() else {
            return self.clone();
        };
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == deg {
                out.add_term(e.clone(), *c);
            }
        }
        out
    }

    /// Substitute `Y = L·Z + b`.
    pub fn compose_affine(&self, l: &SquareMatrix, b: &[f64]) -> Self {
        let n = self.nvars;
        assert_eq!(l.dim(), n);
        let images: Vec<MultiPoly> = (0..n)
            .map(|i| {
                let mut p = Self::constant(n, b[i]);
                for j in 0..n {
                    p = p.add(&Self::var(n, j).scale(l[(i, j)]));
                }
                p
            })
            .collect();
        let mut out = Self::zero(n);
        for (e, c) in &self.terms {
            let mut term = Self::constant(n, *c);
            for (i, k) in e.iter().enumerate() {
                term = term.mul(&images[i].pow(*k));
            }
            out = out.add(&term);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_part_keeps_top_degree() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = x.pow(3).add(&x.mul(&y)).add(&MultiPoly::constant(2, 3.0));
        assert_eq!(p.homogeneous_part(), x.pow(3));
        assert_eq!(x.pow(3).homogeneous_part(), x.pow(3));
        assert_eq!(p.degree(), Some(3));
    }

    #[test]
    fn derivative_and_eval() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = x.pow(2).add(&y.pow(2).scale(2.0));
        assert_eq!(p.eval(&[1.0, 1.0]), 3.0);
        assert_eq!(p.derivative(1), y.scale(4.0));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn compose_affine_matches_pointwise() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = x.pow(2).add(&x.mul(&y).scale(-3.0)).add(&y);
        let l = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]);
        let b = [0.3, -0.2];
        let q = p.compose_affine(&l, &b);
        let z = [0.7, 1.9];
        let yv: Vec<f64> = l.mul_vec(&z).iter().zip(&b).map(|(a, c)| a + c).collect();
        assert!((q.eval(&z) - p.eval(&yv)).abs() < 1e-12);
        assert_eq!(q.degree(), Some(2));
    }

    #[test]
    fn json_roundtrip() {
        let p = MultiPoly::from_terms(2, [(1.5, [2u32, 0].as_slice()), (-1.0, [0, 1].as_slice())]);
        let s = serde_json::to_string(&p).unwrap();
        let q: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<MultiPoly>(r#"{"nvars":2,"terms":[[1.0,[1]]]}"#).is_err());
    }
}
