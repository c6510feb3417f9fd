//! Interpolation for regridding.
//!
//! [`OddLagrange`] is a local high-order interpolant on data extended by odd
//! reflection through both endpoints, the natural extension of a warped
//! profile `h(r)` across a smooth pole. [`MonotoneCubic`] is the
//! shape-preserving fallback.
//!
//! Monotone cubic Hermite:
//! Node slopes come from fourth-order finite differences on the (possibly
//! nonuniform) abscissae and are then limited with Hyman's filter wherever
//! the data is locally monotone, so smooth extrema keep full accuracy while
//! monotone stretches never overshoot.

use crate::stencil::fornberg_weights;

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// `xs` must be strictly increasing with at least five nodes.
    pub fn new(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        assert!(n >= 5 && ys.len() == n);
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n {
            let start = i.saturating_sub(2).min(n - 5);
            let w = fornberg_weights(xs[i], &xs[start..start + 5], 1);
            let mut d: f64 = w[1]
                .iter()
                .zip(&ys[start..start + 5])
                .map(|(w, y)| w * y)
                .sum();
            // Hyman limiter: only where neighbouring secants agree in sign.
            let (left, right) = match i {
                0 => (secant[0], secant[0]),
                _ if i == n - 1 => (secant[n - 2], secant[n - 2]),
                _ => (secant[i - 1], secant[i]),
            };
            if left == 0.0 || right == 0.0 {
                d = 0.0;
            } else if left * right > 0.0 {
                let bound = 3.0 * left.abs().min(right.abs());
                if d * left <= 0.0 {
                    d = 0.0;
                } else if d.abs() > bound {
                    d = bound * d.signum();
                }
            }
            slopes.push(d);
        }
        MonotoneCubic {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slopes,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        if x == self.xs[i] {
            return self.ys[i];
        }
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ys[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// Local Lagrange interpolation on `width` nodes around the evaluation
/// point. Beyond each end the data continues as `y(2x_e − x) = 2y_e − y(x)`,
/// so stencils never shrink near the boundary.
#[derive(Debug, Clone)]
pub struct OddLagrange {
    xs: Vec<f64>,
    ys: Vec<f64>,
    width: usize,
    ghosts: usize,
}

impl OddLagrange {
    /// `xs` strictly increasing with more than `width / 2` nodes; `width` even.
    pub fn new(xs: &[f64], ys: &[f64], width: usize) -> Self {
        let n = xs.len();
        let ghosts = width / 2;
        assert!(width >= 2 && width.is_multiple_of(2) && n > ghosts && ys.len() == n);
        let (x0, y0, x1, y1) = (xs[0], ys[0], xs[n - 1], ys[n - 1]);
        let mut ex = Vec::with_capacity(n + 2 * ghosts);
        let mut ey = Vec::with_capacity(n + 2 * ghosts);
        for j in (1..=ghosts).rev() {
            ex.push(2.0 * x0 - xs[j]);
            ey.push(2.0 * y0 - ys[j]);
        }
        ex.extend_from_slice(xs);
        ey.extend_from_slice(ys);
        for j in 1..=ghosts {
            ex.push(2.0 * x1 - xs[n - 1 - j]);
            ey.push(2.0 * y1 - ys[n - 1 - j]);
        }
        OddLagrange {
            xs: ex,
            ys: ey,
            width,
            ghosts,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.xs.len();
        let k = self.xs.partition_point(|&xi| xi <= x);
        if k > 0 && self.xs[k - 1] == x {
            return self.ys[k - 1];
        }
        // Interval [k − 1, k] sits in the middle of the stencil.
        let start = k.saturating_sub(self.ghosts).min(m - self.width);
        let xs = &self.xs[start..start + self.width];
        let mut p: Vec<f64> = self.ys[start..start + self.width].to_vec();
        // Neville's scheme.
        for level in 1..self.width {
            for i in 0..self.width - level {
                let (xa, xb) = (xs[i], xs[i + level]);
                p[i] = ((x - xb) * p[i] + (xa - x) * p[i + 1]) / (xa - xb);
            }
        }
        p[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_nodes() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64).powf(1.3)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let m = MonotoneCubic::new(&xs, &ys);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.eval(*x), *y);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let ys = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 5.0, 5.0];
        let m = MonotoneCubic::new(&xs, &ys);
        let mut prev = m.eval(0.0);
        for k in 1..=700 {
            let v = m.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15, "overshoot at {}", k as f64 * 0.01);
            prev = v;
        }
    }

    #[test]
    fn smooth_accuracy_is_high_order() {
        let err = |n: usize| {
            let xs: Vec<f64> = (0..n)
                .map(|i| std::f64::consts::PI * i as f64 / (n - 1) as f64)
                .collect();
            let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            let m = MonotoneCubic::new(&xs, &ys);
            (0..1000)
                .map(|k| {
                    let x = std::f64::consts::PI * (k as f64 + 0.37) / 1000.0;
                    (m.eval(x) - x.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        let rate = (err(41) / err(81)).log2();
        assert!(rate > 3.5, "rate {rate}");
    }
}
