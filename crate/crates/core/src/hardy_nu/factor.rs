//! Factorization `w = e^s F` with F holomorphic and Im s constant on each boundary circle.

use num_complex::Complex64;

use crate::areaops::{cauchy_area, cauchy_area_on_circle, AreaField};
use crate::circfft::fourier;
use crate::error::{HardyError, Result};

#[derive(Debug, Clone)]
pub struct Factorization {
    pub s: AreaField,
    pub f: AreaField,
    /// Values of `s` on the outer circle and, for annular grids, the inner one.
    pub s_boundary: Vec<Vec<Complex64>>,
    /// The constant value of Im s on each of those circles; they sum to zero.
    pub im_constants: Vec<f64>,
}

/// Factorizes a solution of `dbar w = alpha conj w` on a disk or annulus grid.
pub fn factorize(w: &AreaField, alpha: &AreaField) -> Result<Factorization> {
    w.same_grid(alpha)?;
    let grid = w.grid.clone();
    let scale = w.max_abs();
    if scale == 0.0 {
        return Err(HardyError::ZeroField);
    }
    let ratio = AreaField {
        grid: grid.clone(),
        data: w
            .data
            .iter()
            .zip(&alpha.data)
            .map(|(&v, &a)| {
                if v.norm() <= 1e-300 * scale {
                    0.0.into()
                } else {
                    v.conj() / v * a
                }
            })
            .collect(),
    };
    let lam = cauchy_area(&ratio);
    let area: f64 = grid.area_weights().iter().sum();
    let mean = lam.integral() / area;

    let r_out = grid.r_out();
    let r_in = grid.r_in();
    let mut radii = vec![r_out];
    if r_in > 0.0 {
        radii.push(r_in);
    }
    let traces: Vec<Vec<Complex64>> = radii
        .iter()
        .map(|&r| {
            cauchy_area_on_circle(&ratio, r)
                .into_iter()
                .map(|v| v - mean)
                .collect()
        })
        .collect();

    // holomorphic G with Re G = harmonic extension of Im s, minus the log part
    let kmax = grid.k_max();
    let im_c: Vec<Vec<Complex64>> = traces
        .iter()
        .map(|t| {
            fourier(
                &t.iter()
                    .map(|v| Complex64::new(v.im, 0.0))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut pos = vec![Complex64::new(0.0, 0.0); kmax + 1];
    let mut neg = vec![Complex64::new(0.0, 0.0); kmax + 1];
    let a0;
    let mut b_log = 0.0;
    if radii.len() == 1 {
        a0 = im_c[0][0].re;
        for k in 1..=kmax {
            pos[k] = 2.0 * im_c[0][k];
        }
    } else {
        let q = r_in / r_out;
        a0 = im_c[0][0].re;
        b_log = (im_c[1][0].re - a0) / q.ln();
        for k in 1..=kmax {
            // u_k = A q^0 + B at r_out, A q^k + B q^-k at r_in (scaled radius)
            let (d1, dq) = (im_c[0][k], im_c[1][k]);
            let qk = q.powi(k as i32);
            let det = 1.0 / qk - qk;
            let a = (d1 / qk - dq) / det;
            let b = (dq - d1 * qk) / det;
            pos[k] = 2.0 * a;
            // coefficient B_k multiplies r^-k e^{ik theta}: Re(2 conj(B_k) z^-k)
            neg[k] = 2.0 * b.conj();
        }
    }
    let g_at = |z: Complex64| -> Complex64 {
        let zs = z / r_out;
        let mut acc = Complex64::new(a0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in pos.iter().skip(1) {
            p *= zs;
            acc += c * p;
        }
        if radii.len() > 1 {
            let inv = 1.0 / zs;
            let mut p = Complex64::new(1.0, 0.0);
            for c in neg.iter().skip(1) {
                p *= inv;
                acc += c * p;
            }
        }
        acc
    };
    let consts: Vec<f64> = if radii.len() == 1 {
        vec![0.0]
    } else {
        vec![0.0, b_log * (r_in / r_out).ln()]
    };
    let shift = consts.iter().sum::<f64>() / consts.len() as f64;
    let im_constants: Vec<f64> = consts.iter().map(|c| c - shift).collect();

    let i = Complex64::new(0.0, 1.0);
    let pts = grid.points();
    let s_data: Vec<Complex64> = lam
        .data
        .iter()
        .zip(&pts)
        .map(|(&l, &z)| l - mean - i * g_at(z) - i * shift)
        .collect();
    let s_boundary: Vec<Vec<Complex64>> = traces
        .iter()
        .zip(&radii)
        .map(|(t, &r)| {
            t.iter()
                .zip(grid.angles())
                .map(|(&v, &th)| v - i * g_at(Complex64::from_polar(r, th)) - i * shift)
                .collect()
        })
        .collect();
    let f_data: Vec<Complex64> = w
        .data
        .iter()
        .zip(&s_data)
        .map(|(&v, &s)| v * (-s).exp())
        .collect();
    Ok(Factorization {
        s: AreaField {
            grid: grid.clone(),
            data: s_data,
        },
        f: AreaField { grid, data: f_data },
        s_boundary,
        im_constants,
    })
}
