//! Restarted GMRES for real linear systems given as matrix-free operators.

use crate::error::{HardyError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub restart: usize,
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 50,
            rtol: 1e-10,
            max_iter: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresReport {
    pub iterations: usize,
    /// Relative residual `|b - A x| / |b|`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b`. Fails with `NoConvergence` when `max_iter` is exhausted.
pub fn gmres<F>(
    mut op: F,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: GmresOptions,
) -> Result<(Vec<f64>, GmresReport)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            GmresReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let m = opts.restart.max(1);
    let mut total = 0usize;
    let mut ax = vec![0.0; n];
    let mut rel;
    loop {
        op(&x, &mut ax);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        rel = beta / bnorm;
        if rel <= opts.rtol {
            return Ok((
                x,
                GmresReport {
                    iterations: total,
                    residual: rel,
                },
            ));
        }
        if total >= opts.max_iter {
            return Err(HardyError::NoConvergence {
                iterations: total,
                residual: rel,
            });
        }
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            let mut w = vec![0.0; n];
            op(&v[k], &mut w);
            for (j, vj) in v.iter().enumerate() {
                let hj = dot(&w, vj);
                h[j][k] = hj;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hj * vi;
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let den = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if den == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / den;
                sn[k] = h[k + 1][k] / den;
            }
            h[k][k] = cs[k] * h[k][k] + sn[k] * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            rel = g[k + 1].abs() / bnorm;
            if rel <= opts.rtol * 0.5 || total >= opts.max_iter || hn <= 1e-300 {
                break;
            }
            v.push(w.iter().map(|wi| wi / hn).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vi;
            }
        }
    }
}
