//! Gauss–Legendre rules and barycentric interpolation on their nodes.

use std::f64::consts::PI;

/// Nodes (ascending) and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Barycentric weights for Gauss–Legendre nodes, from the closed form
/// `(-1)^j sqrt((1 - x_j^2) w_j)`; any common scale cancels.
pub fn gauss_bary_weights(x: &[f64], w: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(w)
        .enumerate()
        .map(|(j, (&xj, &wj))| {
            let s = ((1.0 - xj * xj) * wj).sqrt();
            if j % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// Weights `l_j(t)` of the polynomial interpolant through `nodes` at `t`.
pub fn bary_eval_weights(nodes: &[f64], bw: &[f64], t: f64) -> Vec<f64> {
    let mut out = vec![0.0; nodes.len()];
    for (j, &xj) in nodes.iter().enumerate() {
        if t == xj {
            out[j] = 1.0;
            return out;
        }
    }
    let mut den = 0.0;
    for j in 0..nodes.len() {
        let c = bw[j] / (t - nodes[j]);
        out[j] = c;
        den += c;
    }
    for v in out.iter_mut() {
        *v /= den;
    }
    out
}

/// Spectral differentiation matrix (row-major) on the given nodes.
pub fn diff_matrix(nodes: &[f64], bw: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}
