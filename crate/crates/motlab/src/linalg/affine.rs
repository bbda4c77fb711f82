use super::matrix::SquareMatrix;

/// `y ↦ linear·y + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: SquareMatrix,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(linear: SquareMatrix, offset: Vec<f64>) -> Self {
        assert_eq!(linear.dim(), offset.len(), "offset length must match matrix size");
        Self { linear, offset }
    }

    pub fn identity(d: usize) -> Self {
        Self::new(SquareMatrix::identity(d), vec![0.0; d])
    }

    pub fn constant(v: Vec<f64>) -> Self {
        Self::new(SquareMatrix::zeros(v.len()), v)
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.linear
            .mul_vec(y)
            .iter()
            .zip(&self.offset)
            .map(|(a, b)| a + b)
            .collect()
    }

    pub fn negated(&self) -> Self {
        Self::new(self.linear.scale(-1.0), self.offset.iter().map(|v| -v).collect())
    }

    /// The same map written in the variable `u = y − x0`: `u ↦ linear·u + A(x0)`.
    pub fn recentered(&self, x0: &[f64]) -> Self {
        Self::new(self.linear.clone(), self.apply(x0))
    }

    /// Given `A` in coordinates `u = s·(y − x0)`, return the map on `y` whose
    /// values are `k·A(s·(y − x0))`.
    pub fn pull_back(&self, x0: &[f64], s: f64, k: f64) -> Self {
        let linear = self.linear.scale(s * k);
        let shift = self.linear.mul_vec(x0);
        let offset = self
            .offset
            .iter()
            .zip(&shift)
            .map(|(o, l)| k * (o - s * l))
            .collect();
        Self::new(linear, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pull_back_roundtrip() {
        let a = AffineMap::new(
            SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5]]),
            vec![0.3, -0.7],
        );
        let x0 = [0.4, -1.0];
        let (s, k) = (2.5, 0.3);
        let b = a.pull_back(&x0, s, k);
        let y = [1.1, 0.9];
        let u: Vec<f64> = y.iter().zip(&x0).map(|(y, x)| s * (y - x)).collect();
        let expect: Vec<f64> = a.apply(&u).iter().map(|v| k * v).collect();
        for (p, q) in b.apply(&y).iter().zip(&expect) {
            assert!((p - q).abs() < 1e-14);
        }
        assert_eq!(a.recentered(&x0).apply(&[0.0, 0.0]), a.apply(&x0));
    }
}
