//! Fourth-order finite differences on a uniform grid.
//!
//! Interior nodes use centered stencils; nodes too close to an end use
//! shifted one-sided stencils with enough points to keep fourth order.
//! Weights come from Fornberg's recursion so the same code produces every
//! pattern.

/// Finite-difference weights for derivatives `0..=max_order` at `x0` using
/// the nodes `xs`. Returns `w[k][j]`, the weight of node `j` in the `k`-th
/// derivative.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Debug, Clone)]
struct Pattern {
    /// Offset of the first stencil node relative to the evaluation node.
    start: isize,
    weights: Vec<f64>,
}

#[derive(Debug, Clone)]
struct OrderStencils {
    central: Pattern,
    half: usize,
    left: Vec<Pattern>,
    right: Vec<Pattern>,
}

impl OrderStencils {
    fn build(order: usize, n: usize) -> Self {
        // Centered stencils of width 5 are fourth order for d = 1, 2; d = 3
        // needs 7. One-sided stencils need d + 4 nodes.
        let central_pts = if order <= 2 { 5 } else { 7 };
        let half = central_pts / 2;
        let side_pts = order + 4;
        let make = |i: usize, start: usize, pts: usize| {
            let xs: Vec<f64> = (start..start + pts).map(|j| j as f64).collect();
            let w = fornberg_weights(i as f64, &xs, order);
            Pattern {
                start: start as isize - i as isize,
                weights: w[order].clone(),
            }
        };
        let central = make(half, 0, central_pts);
        let left = (0..half).map(|i| make(i, 0, side_pts)).collect();
        let right = (n - half..n)
            .map(|i| make(i, n - side_pts, side_pts))
            .collect();
        OrderStencils {
            central,
            half,
            left,
            right,
        }
    }

    fn pattern(&self, i: usize, n: usize) -> &Pattern {
        if i < self.half {
            &self.left[i]
        } else if i + self.half >= n {
            &self.right[i + self.half - n]
        } else {
            &self.central
        }
    }
}

/// Fourth-order derivative operators for a uniform grid with `n` nodes and
/// spacing `ds`.
#[derive(Debug, Clone)]
pub struct Stencils {
    n: usize,
    ds: f64,
    orders: [OrderStencils; 3],
}

impl Stencils {
    /// Requires `n >= 7` so the widest one-sided stencil fits.
    pub fn new(n: usize, ds: f64) -> Self {
        assert!(n >= 7, "stencils need at least 7 nodes");
        Stencils {
            n,
            ds,
            orders: [
                OrderStencils::build(1, n),
                OrderStencils::build(2, n),
                OrderStencils::build(3, n),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.ds
    }

    /// `order`-th derivative of `values` at node `i`; `order` in 1..=3.
    pub fn at(&self, values: &[f64], i: usize, order: usize) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        let p = self.orders[order - 1].pattern(i, self.n);
        let start = (i as isize + p.start) as usize;
        // Differences against the centre value make the rounded weights act
        // as if they summed to exactly zero.
        let centre = values[i];
        let acc: f64 = p
            .weights
            .iter()
            .zip(&values[start..start + p.weights.len()])
            .map(|(w, v)| w * (v - centre))
            .sum();
        acc / self.ds.powi(order as i32)
    }

    /// `order`-th derivative at every node, written into `out`.
    pub fn apply_into(&self, values: &[f64], order: usize, out: &mut [f64]) {
        let n = self.n;
        let st = &self.orders[order - 1];
        let half = st.half;
        for i in (0..half).chain(n - half..n) {
            out[i] = self.at(values, i, order);
        }
        let w = &st.central.weights;
        let scale = 1.0 / self.ds.powi(order as i32);
        for i in half..n - half {
            let centre = values[i];
            let window = &values[i - half..=i + half];
            let mut acc = 0.0;
            for (wj, vj) in w.iter().zip(window) {
                acc += wj * (vj - centre);
            }
            out[i] = acc * scale;
        }
    }

    pub fn apply(&self, values: &[f64], order: usize) -> Vec<f64> {
        let mut out = vec![0.0; values.len()];
        self.apply_into(values, order, &mut out);
        out
    }
}
