//! Monotone cubic (Fritsch-Carlson) interpolation for tabulated profiles.
//!
//! Monotone data produces a monotone interpolant, so a strictly decreasing
//! occupation table keeps f' < 0 everywhere between the nodes.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    /// node derivatives
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// Build from strictly increasing abscissae.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Config("interpolation table: length mismatch".into()));
        }
        if x.len() < 2 {
            return Err(Error::Config("interpolation table: need at least 2 rows".into()));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Config(
                    "interpolation table: abscissae must be strictly increasing".into(),
                ));
            }
        }
        let n = x.len();
        let mut slopes = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            slopes.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
        }
        let mut d = vec![0.0; n];
        d[0] = slopes[0];
        d[n - 1] = slopes[n - 2];
        for i in 1..n - 1 {
            if slopes[i - 1] * slopes[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                // harmonic mean weighted by interval widths
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                d[i] = (w1 + w2) / (w1 / slopes[i - 1] + w2 / slopes[i]);
            }
        }
        // Fritsch-Carlson clamp
        for i in 0..n - 1 {
            if slopes[i] == 0.0 {
                d[i] = 0.0;
                d[i + 1] = 0.0;
            } else {
                let a = d[i] / slopes[i];
                let b = d[i + 1] / slopes[i];
                let s = a * a + b * b;
                if s > 9.0 {
                    let t = 3.0 / s.sqrt();
                    d[i] = t * a * slopes[i];
                    d[i + 1] = t * b * slopes[i];
                }
            }
        }
        Ok(Self { x, y, d })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    fn segment(&self, x: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value at `x`; clamped to the end values outside the table.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.x[0] {
            return self.y[0];
        }
        if x >= *self.x.last().unwrap() {
            return *self.y.last().unwrap();
        }
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
    }

    /// Analytic derivative of the interpolant; zero outside the table.
    pub fn deriv(&self, x: f64) -> f64 {
        if x < self.x[0] || x > *self.x.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        let t2 = t * t;
        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -6.0 * t2 + 6.0 * t;
        let dh11 = 3.0 * t2 - 2.0 * t;
        (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
    }

    /// Second derivative (piecewise linear).
    pub fn deriv2(&self, x: f64) -> f64 {
        if x < self.x[0] || x > *self.x.last().unwrap() {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.d[i], self.d[i + 1]);
        let d2h00 = 12.0 * t - 6.0;
        let d2h10 = 6.0 * t - 4.0;
        let d2h01 = -12.0 * t + 6.0;
        let d2h11 = 6.0 * t - 2.0;
        (d2h00 * y0 + d2h01 * y1) / (h * h) + (d2h10 * d0 + d2h11 * d1) / h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_nodes_exactly() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|&v| (-v).exp()).collect();
        let s = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(y.iter()) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn preserves_monotonicity() {
        let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.21).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1.0 / (v.exp() + 1.0)).collect();
        let s = MonotoneCubic::new(x, y).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..500 {
            let xi = 10.2 * i as f64 / 500.0;
            let v = s.eval(xi);
            assert!(v <= prev + 1e-12, "not monotone at {xi}");
            assert!(s.deriv(xi) <= 1e-12);
            prev = v;
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let x: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|&v| (-v * v / 3.0).exp()).collect();
        let s = MonotoneCubic::new(x, y).unwrap();
        for &xi in &[0.51, 2.03, 5.5, 8.97] {
            let h = 1e-6;
            let fd = (s.eval(xi + h) - s.eval(xi - h)) / (2.0 * h);
            assert!((s.deriv(xi) - fd).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_unsorted_abscissae() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
    }
}
