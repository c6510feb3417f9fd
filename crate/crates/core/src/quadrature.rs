//! Composite quadrature on uniform grids.

/// Composite Simpson rule. `values.len()` must be odd and at least 3.
pub fn simpson(values: &[f64], ds: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd node count");
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    ds / 3.0 * (values[0] + 4.0 * odd + 2.0 * even + values[n - 1])
}

/// Final value of [`cumulative`] without the intermediate sums.
pub fn integral(values: &[f64], ds: f64) -> f64 {
    *cumulative(values, ds).last().expect("non-empty")
}

const WIDTH: usize = 8;

/// `weights()[a][j]` integrates the Lagrange basis polynomial of node `j`
/// (nodes `0..WIDTH`) over `[a, a + 1]`.
fn weights() -> [[f64; WIDTH]; WIDTH - 1] {
    const LCM: i128 = 840;
    let mut out = [[0.0; WIDTH]; WIDTH - 1];
    for j in 0..WIDTH {
        let mut coeffs = vec![1i128];
        let mut denom = 1i128;
        for k in 0..WIDTH {
            if k == j {
                continue;
            }
            let mut next = vec![0i128; coeffs.len() + 1];
            for (m, c) in coeffs.iter().enumerate() {
                next[m + 1] += c;
                next[m] -= c * k as i128;
            }
            coeffs = next;
            denom *= j as i128 - k as i128;
        }
        for (a, row) in out.iter_mut().enumerate() {
            let (lo, hi) = (a as i128, a as i128 + 1);
            let num: i128 = coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| {
                    let p = m as u32 + 1;
                    c * (hi.pow(p) - lo.pow(p)) * (LCM / p as i128)
                })
                .sum();
            let (mut num, mut den) = (num, denom * LCM);
            let g = gcd(num.abs(), den.abs());
            num /= g;
            den /= g;
            row[j] = num as f64 / den as f64;
        }
    }
    out
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn cell4(f: &[f64], i: usize) -> f64 {
    let n = f.len();
    if i == 0 {
        (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0
    } else if i == n - 2 {
        (9.0 * f[n - 1] + 19.0 * f[n - 2] - 5.0 * f[n - 3] + f[n - 4]) / 24.0
    } else {
        (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]) / 24.0
    }
}

/// Running integral `out[i] = ∫_{s_0}^{s_i} f ds`.
///
/// Eighth order: each cell integrates the degree-7 interpolant through the
/// eight nearest nodes, shifted inward near the ends. Grids with fewer than
/// eight nodes use the fourth-order cubic rule. Constants integrate exactly.
pub fn cumulative(values: &[f64], ds: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 4, "cumulative quadrature needs at least 4 nodes");
    let f = values;
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    if n < WIDTH {
        for i in 0..n - 1 {
            acc += cell4(f, i) * ds;
            out.push(acc);
        }
        return out;
    }
    let w = weights();
    let half = WIDTH / 2 - 1;
    for i in 0..n - 1 {
        let first = i.saturating_sub(half).min(n - WIDTH);
        let reference = f[i];
        let correction: f64 = w[i - first]
            .iter()
            .zip(&f[first..first + WIDTH])
            .map(|(wj, fj)| wj * (fj - reference))
            .sum();
        acc += (reference + correction) * ds;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn simpson_exact_for_cubics() {
        let n = 9;
        let ds = 0.25;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * ds).powi(3)).collect();
        assert_relative_eq!(simpson(&v, ds), 2.0f64.powi(4) / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let n = 201;
        let ds = PI / (n - 1) as f64;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * ds).sin()).collect();
        let c = cumulative(&v, ds);
        for (i, ci) in c.iter().enumerate() {
            assert!((ci - (1.0 - (i as f64 * ds).cos())).abs() < 1e-8);
        }
    }

    #[test]
    fn cumulative_exact_for_constants() {
        let c = cumulative(&[2.0; 11], 0.1);
        assert_relative_eq!(c[10], 2.0, epsilon = 1e-15);
        assert!(c.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn weights_match_known_central_rule() {
        let w = weights();
        for row in &w {
            assert_relative_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        }
        // symmetric about the central cell
        for j in 0..WIDTH {
            assert_relative_eq!(w[3][j], w[3][WIDTH - 1 - j], epsilon = 1e-16);
        }
        assert_relative_eq!(w[3][3], 68323.0 / 120960.0, epsilon = 1e-15);
        assert_relative_eq!(w[3][0], -191.0 / 120960.0, epsilon = 1e-18);
    }

    #[test]
    fn cumulative_exact_for_degree_seven() {
        let n = 13;
        let ds = 0.1;
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * ds).powi(7)).collect();
        let c = cumulative(&v, ds);
        for (i, ci) in c.iter().enumerate() {
            assert_relative_eq!(*ci, (i as f64 * ds).powi(8) / 8.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn cumulative_converges_at_eighth_order() {
        let err = |n: usize| {
            let ds = PI / (n - 1) as f64;
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * ds).exp()).collect();
            let c = cumulative(&v, ds);
            c.iter()
                .enumerate()
                .map(|(i, ci)| (ci - ((i as f64 * ds).exp() - 1.0)).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(21) / err(41);
        assert!(ratio > 200.0, "ratio {ratio}");
    }

    #[test]
    fn short_grids_use_cubic_rule() {
        let c = cumulative(&[0.0, 1.0, 4.0, 9.0, 16.0], 1.0);
        assert_relative_eq!(c[4], 64.0 / 3.0, epsilon = 1e-13);
    }
}
