//! Per-mode radial two-point problem `(r sigma R')' = n^2 sigma R / r`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{HardyError, Result};

/// Radial profile on Chebyshev points of `[a, b]`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    /// Barycentric interpolation on the second-kind Chebyshev points.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let d = r - self.nodes[j];
            if d == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                w *= 0.5;
            }
            num += w / d * self.values[j];
            den += w / d;
        }
        num / den
    }
}

fn cheb(a: f64, b: f64, n: usize) -> (Vec<f64>, DMatrix<f64>) {
    // points x_j = cos(pi j / n) mapped to [a, b], ascending
    let x: Vec<f64> = (0..=n).map(|j| -(PI * j as f64 / n as f64).cos()).collect();
    let c =
        |j: usize| (if j == 0 || j == n { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    let scale = 2.0 / (b - a);
    let r: Vec<f64> = x.iter().map(|t| a + 0.5 * (b - a) * (t + 1.0)).collect();
    (r, d * scale)
}

/// Solves the mode-n problem on `[r_in, 1]` with `R(r_in) = left` and
/// `R(1) = right`; for the disk (`r_in = 0`) regularity replaces `left`.
pub fn radial_mode_bvp(
    sigma: &dyn Fn(f64) -> f64,
    n: u32,
    r_in: f64,
    left: f64,
    right: f64,
) -> Result<RadialProfile> {
    let m = 48;
    let (r, d) = cheb(r_in, 1.0, m);
    if n == 0 {
        if r_in == 0.0 {
            return Ok(RadialProfile {
                nodes: r,
                values: vec![right; m + 1],
            });
        }
        // R = left + (right - left) I(r) / I(1), I(r) = int_{r_in}^r ds / (s sigma)
        let integral = |b: f64| -> f64 {
            let k = 2000;
            let h = (b - r_in) / k as f64;
            let f = |s: f64| 1.0 / (s * sigma(s));
            let mut acc = f(r_in) + f(b);
            for i in 1..k {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(r_in + i as f64 * h);
            }
            acc * h / 3.0
        };
        let total = integral(1.0);
        let values = r
            .iter()
            .map(|&x| left + (right - left) * integral(x) / total)
            .collect();
        return Ok(RadialProfile { nodes: r, values });
    }
    let nn = (n * n) as f64;
    let sig: Vec<f64> = r.iter().map(|&x| sigma(x)).collect();
    let dsig = &d * DVector::from_vec(sig.clone());
    let d2 = &d * &d;
    // r^2 sigma R'' + r (sigma + r sigma') R' - n^2 sigma R = 0
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let mut rhs = DVector::zeros(m + 1);
    for i in 0..=m {
        for j in 0..=m {
            a[(i, j)] =
                r[i] * r[i] * sig[i] * d2[(i, j)] + r[i] * (sig[i] + r[i] * dsig[i]) * d[(i, j)];
        }
        a[(i, i)] -= nn * sig[i];
    }
    for (row, val) in [(0usize, if r_in == 0.0 { 0.0 } else { left }), (m, right)] {
        for j in 0..=m {
            a[(row, j)] = 0.0;
        }
        a[(row, row)] = 1.0;
        rhs[row] = val;
    }
    let x = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| HardyError::SolverFailure("collocation matrix singular".into()))?;
    Ok(RadialProfile {
        nodes: r,
        values: x.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_mode_one() {
        let rho: f64 = 0.4;
        let p = radial_mode_bvp(&|_| 1.0, 1, rho, 0.0, 1.0).unwrap();
        for r in [0.45, 0.6, 0.83] {
            let exact = (r - rho * rho / r) / (1.0 - rho * rho);
            assert!((p.eval(r) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_mode_two() {
        let p = radial_mode_bvp(&|_| 1.0, 2, 0.0, 0.0, 1.0).unwrap();
        for r in [0.1, 0.5, 0.9] {
            assert!((p.eval(r) - r * r).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_zero_by_quadrature() {
        let rho: f64 = 0.5;
        let p = radial_mode_bvp(&|r| 1.0 + r, 0, rho, 2.0, 1.0).unwrap();
        // int ds/(s(1+s)) = log(s/(1+s))
        let g = |s: f64| (s / (1.0 + s)).ln();
        for r in [0.6, 0.8] {
            let exact = 2.0 - (g(r) - g(rho)) / (g(1.0) - g(rho));
            assert!((p.eval(r) - exact).abs() < 1e-10);
        }
    }
}
