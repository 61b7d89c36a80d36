//! Splitting a solution on an annulus into a disk piece and an exterior piece.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::field::{HardyField, Piece};
use super::multi::MultiDirichlet;
use crate::circfft::fourier;
use crate::domain::{Circle, DomainKind};
use crate::error::{HardyError, Result};
use crate::hardy_nu::GSolution;

#[derive(Debug, Clone)]
pub struct AnnulusSplit {
    pub inner: HardyField,
    pub outer: HardyField,
    /// Relative L2 mismatch of `inner + outer` against the trace on the unit circle.
    pub reconstruction: f64,
}

fn combine(sols: &[GSolution], y: &[f64]) -> GSolution {
    let mut w = sols[0].w.scale(0.0.into());
    let mut circles: Vec<(f64, Vec<Complex64>)> = sols[0]
        .circles
        .iter()
        .map(|(r, v)| (*r, vec![Complex64::new(0.0, 0.0); v.len()]))
        .collect();
    for (s, &c) in sols.iter().zip(y) {
        w.add_scaled(&s.w, c.into());
        for ((_, a), (_, v)) in circles.iter_mut().zip(&s.circles) {
            a.iter_mut().zip(v).for_each(|(x, z)| *x += c * z);
        }
    }
    GSolution {
        w,
        circles,
        iterations: 0,
        residual: 0.0,
    }
}

/// `f = f_i + f_e` with `f_i` solving the filled-disk equation and `f_e`
/// solving the equation outside the hole and vanishing at infinity, fitted on
/// the unit circle.
pub fn split_annulus(solver: &MultiDirichlet, f: &HardyField) -> Result<AnnulusSplit> {
    let d = solver.domain();
    if d.kind() != DomainKind::Annulus {
        return Err(HardyError::UnsupportedDomain(
            "split needs an annulus".into(),
        ));
    }
    let comps = solver.components();
    let (c0, c1) = (&comps[0], &comps[1]);
    let b0 = c0.basis()?;
    let b1 = c1.basis()?;
    let unit = Circle::unit();
    let n = c0.n_theta();
    let m = n - 1;
    // exterior basis without the two constants (slots 0 and m)
    let ext_idx: Vec<usize> = (1..m).collect();
    let v0 = c0.values_on_many(&b0.sols, &unit);
    let v1 = c1.values_on_many(&b1.sols, &unit);
    let kmax = n / 2 - 1;
    let rows = |v: &[Complex64]| -> Vec<f64> {
        let c = fourier(v);
        let mut out = Vec::with_capacity(2 * m);
        for k in 0..=kmax {
            out.push(c[k].re);
            out.push(c[k].im);
        }
        for k in 1..=kmax {
            out.push(c[n - k].re);
            out.push(c[n - k].im);
        }
        out
    };
    let ncol = v0.len() + ext_idx.len();
    let mut a = DMatrix::zeros(2 * m, ncol);
    for (j, v) in v0.iter().enumerate() {
        a.set_column(j, &DVector::from_vec(rows(v)));
    }
    for (j, &b) in ext_idx.iter().enumerate() {
        a.set_column(v0.len() + j, &DVector::from_vec(rows(&v1[b])));
    }
    let target = f.on_circle(&unit);
    let rhs = DVector::from_vec(rows(&target));
    let svd = a.svd(true, true);
    let x = svd
        .solve(&rhs, 1e-13)
        .map_err(|e| HardyError::SolverFailure(e.into()))?;
    let x: Vec<f64> = x.iter().copied().collect();
    let inner_sol = combine(&b0.sols, &x[..v0.len()]);
    let mut y1 = vec![0.0; m + 1];
    for (j, &b) in ext_idx.iter().enumerate() {
        y1[b] = x[v0.len() + j];
    }
    let outer_sol = combine(&b1.sols, &y1);
    let inner = HardyField::new(d.clone(), vec![Piece::new(c0.clone(), inner_sol)], vec![]);
    let outer = HardyField::new(d.clone(), vec![Piece::new(c1.clone(), outer_sol)], vec![]);
    let rec: Vec<Complex64> = inner
        .on_circle(&unit)
        .iter()
        .zip(outer.on_circle(&unit))
        .map(|(a, b)| a + b)
        .collect();
    let num = rec
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den = target
        .iter()
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    Ok(AnnulusSplit {
        inner,
        outer,
        reconstruction: num / den,
    })
}
