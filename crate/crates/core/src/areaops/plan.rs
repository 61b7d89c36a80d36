//! Precomputed radial weights for the modal Cauchy transform.
//!
//! For `h = sum h_m(rho) e^{i m phi}` the transform is the single mode `m - 1`
//! with profile `2 int_0^r h_m (rho/r)^(1-m) drho` for `m <= 0` and
//! `-2 int_r^R h_m (r/rho)^(m-1) drho` for `m >= 1`. The kernels peak at
//! `rho = r`, so each integral is split into segments graded towards `r`
//! and intersected with the panels, where `h_m` is a polynomial interpolant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::gauss::{bary_eval_weights, gauss_legendre};
use crate::domain::PolarGrid;

const INNER_EDGES: [f64; 6] = [0.0, 0.3, 0.55, 0.75, 0.88, 1.0];
const OUTER_EDGES: [f64; 12] = [
    1.0, 1.1, 1.25, 1.45, 1.7, 2.0, 2.5, 3.2, 4.0, 5.5, 8.0, 12.0,
];

#[derive(Debug)]
pub struct CauchyPlan {
    n_out: usize,
    n_in: usize,
    kmax: usize,
    /// `w[(mi * n_out + i) * n_in + j]`, input mode `m = mi - kmax + 1`.
    w: Vec<f64>,
}

impl CauchyPlan {
    pub fn build(grid: &PolarGrid, out_radii: &[f64]) -> Self {
        let kmax = grid.k_max();
        let n_in = grid.n_r();
        let n_out = out_radii.len();
        let n_modes = 2 * kmax;
        let blocks: Vec<Vec<f64>> = out_radii
            .par_iter()
            .map(|&r| radius_block(grid, r, kmax))
            .collect();
        let mut w = vec![0.0; n_modes * n_out * n_in];
        for (i, blk) in blocks.iter().enumerate() {
            for mi in 0..n_modes {
                let dst = (mi * n_out + i) * n_in;
                w[dst..dst + n_in].copy_from_slice(&blk[mi * n_in..(mi + 1) * n_in]);
            }
        }
        CauchyPlan {
            n_out,
            n_in,
            kmax,
            w,
        }
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Maps input ring modes (n_in rings of length nt) to output ring modes.
    pub fn apply_modes(&self, modes: &[Complex64], nt: usize) -> Vec<Complex64> {
        let kmax = self.kmax as i64;
        let n_in = self.n_in;
        let n_out = self.n_out;
        let slot = |m: i64| m.rem_euclid(nt as i64) as usize;
        let cols: Vec<(usize, Vec<Complex64>)> = (0..2 * self.kmax)
            .into_par_iter()
            .map(|mi| {
                let m = mi as i64 - kmax + 1;
                let src = slot(m);
                let prof: Vec<Complex64> = (0..n_in).map(|j| modes[j * nt + src]).collect();
                let mut col = vec![Complex64::new(0.0, 0.0); n_out];
                for (i, c) in col.iter_mut().enumerate() {
                    let row = &self.w[(mi * n_out + i) * n_in..(mi * n_out + i + 1) * n_in];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (wv, p) in row.iter().zip(&prof) {
                        acc += p * *wv;
                    }
                    *c = acc;
                }
                (slot(m - 1), col)
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n_out * nt];
        for (dst, col) in cols {
            for (i, v) in col.into_iter().enumerate() {
                out[i * nt + dst] = v;
            }
        }
        out
    }
}

/// Weights for one output radius: `2 kmax` rows of length n_r.
fn radius_block(grid: &PolarGrid, r: f64, kmax: usize) -> Vec<f64> {
    let n_in = grid.n_r();
    let n_modes = 2 * kmax;
    let mut blk = vec![0.0; n_modes * n_in];
    let r_out = grid.r_out();
    let r_in = grid.r_in();

    let inner: Vec<f64> = INNER_EDGES.iter().map(|t| t * r).collect();
    let mut outer: Vec<f64> = OUTER_EDGES.iter().map(|t| t * r).collect();
    if r <= 0.0 {
        outer = vec![0.0, r_out];
    } else {
        let mut last = *outer.last().unwrap();
        while last < r_out {
            last *= 2.0;
            outer.push(last);
        }
    }

    for panel in grid.panels() {
        let nodes = &grid.radii()[panel.start..panel.start + panel.len];
        let half = 0.5 * (panel.b - panel.a);
        let ref_nodes: Vec<f64> = nodes.iter().map(|x| (x - panel.a) / half - 1.0).collect();
        let nq = panel.len.div_ceil(2) + 16;
        let (gx, gw) = gauss_legendre(nq);
        for side_inner in [true, false] {
            let edges = if side_inner { &inner } else { &outer };
            let mut q_r = Vec::new();
            let mut q_w = Vec::new();
            for e in edges.windows(2) {
                let lo = e[0].max(panel.a).max(r_in);
                let hi = e[1].min(panel.b).min(r_out);
                if hi <= lo {
                    continue;
                }
                let h = 0.5 * (hi - lo);
                for (x, wq) in gx.iter().zip(&gw) {
                    q_r.push(lo + h * (x + 1.0));
                    q_w.push(wq * h);
                }
            }
            if q_r.is_empty() {
                continue;
            }
            let nq_tot = q_r.len();
            let mut interp = DMatrix::<f64>::zeros(nq_tot, panel.len);
            for (q, &rho) in q_r.iter().enumerate() {
                let t = (rho - panel.a) / half - 1.0;
                let l = bary_eval_weights(&ref_nodes, &panel.bary, t);
                for (j, v) in l.into_iter().enumerate() {
                    interp[(q, j)] = v;
                }
            }
            let (mi_lo, mi_hi) = if side_inner {
                (0, kmax)
            } else {
                (kmax, n_modes)
            };
            let nm = mi_hi - mi_lo;
            let mut kern = DMatrix::<f64>::zeros(nm, nq_tot);
            for (q, (&rho, &wq)) in q_r.iter().zip(&q_w).enumerate() {
                if side_inner {
                    // m = 0, -1, ..., -(kmax-1): 2 (rho/r)^(1-m)
                    let t = rho / r;
                    let mut pw = 2.0 * t;
                    for m_neg in 0..kmax {
                        let mi = kmax - 1 - m_neg;
                        kern[(mi - mi_lo, q)] = pw * wq;
                        pw *= t;
                    }
                } else {
                    // m = 1..=kmax: -2 (r/rho)^(m-1)
                    let t = if r <= 0.0 { 0.0 } else { r / rho };
                    let mut pw = -2.0;
                    for m in 1..=kmax {
                        kern[(kmax + m - 1 - mi_lo, q)] = pw * wq;
                        pw *= t;
                    }
                }
            }
            let prod = kern * interp;
            for row in 0..nm {
                let mi = mi_lo + row;
                for j in 0..panel.len {
                    blk[mi * n_in + panel.start + j] += prod[(row, j)];
                }
            }
        }
    }
    blk
}
