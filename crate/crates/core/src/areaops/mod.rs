//! Area Cauchy transform, the operator `T_alpha` and spectral derivatives.

mod plan;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::PolarGrid;
use crate::error::{HardyError, Result};
pub use plan::CauchyPlan;

/// Complex samples on the nodes of a polar grid, ring-major.
#[derive(Debug, Clone)]
pub struct AreaField {
    pub grid: Arc<PolarGrid>,
    pub data: Vec<Complex64>,
}

impl AreaField {
    pub fn new(grid: Arc<PolarGrid>, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(HardyError::GridMismatch);
        }
        Ok(AreaField { grid, data })
    }

    pub fn zeros(grid: &Arc<PolarGrid>) -> Self {
        AreaField {
            grid: grid.clone(),
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_fn<F: Fn(Complex64) -> Complex64>(grid: &Arc<PolarGrid>, f: F) -> Self {
        AreaField {
            grid: grid.clone(),
            data: grid.sample(f),
        }
    }

    pub fn same_grid(&self, other: &AreaField) -> Result<()> {
        if self.grid.id() != other.grid.id() {
            return Err(HardyError::GridMismatch);
        }
        Ok(())
    }

    pub fn conj(&self) -> AreaField {
        self.map(|v| v.conj())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> AreaField {
        AreaField {
            grid: self.grid.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        o: &AreaField,
        f: F,
    ) -> Result<AreaField> {
        self.same_grid(o)?;
        Ok(AreaField {
            grid: self.grid.clone(),
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, s: Complex64) -> AreaField {
        self.map(|v| v * s)
    }

    pub fn add_scaled(&mut self, o: &AreaField, s: Complex64) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b * s;
        }
    }

    /// Area-weighted L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let nt = self.grid.n_theta();
        let mut s = 0.0;
        for i in 0..self.grid.n_r() {
            let w = self.grid.area_weight(i);
            s += w * self.data[i * nt..(i + 1) * nt]
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>();
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Area integral.
    pub fn integral(&self) -> Complex64 {
        let nt = self.grid.n_theta();
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..self.grid.n_r() {
            let w = self.grid.area_weight(i);
            s += self.data[i * nt..(i + 1) * nt].iter().sum::<Complex64>() * w;
        }
        s
    }

    pub fn eval_at(&self, pts: &[Complex64]) -> Vec<Complex64> {
        self.grid.interpolator(pts).apply(&self.data)
    }
}

/// Pairing `(1/2 pi i) iint a conj(b) dxi ^ dxibar = -(1/pi) iint a conj(b) dm`.
pub fn pairing(a: &AreaField, b: &AreaField) -> Result<Complex64> {
    let prod = a.zip_map(b, |x, y| x * y.conj())?;
    Ok(-prod.integral() / PI)
}

fn cached_plan(grid: &Arc<PolarGrid>) -> Arc<CauchyPlan> {
    grid.cauchy
        .get_or_init(|| Arc::new(CauchyPlan::build(grid, grid.radii())))
        .clone()
}

/// Plan evaluating the transform on one circle of radius r (cached per grid).
pub fn circle_plan(grid: &Arc<PolarGrid>, r: f64) -> Arc<CauchyPlan> {
    let key = r.to_bits();
    {
        let guard = grid.edge_plans.lock().unwrap();
        if let Some((_, p)) = guard.iter().find(|(k, _)| *k == key) {
            return p.clone();
        }
    }
    let plan = Arc::new(CauchyPlan::build(grid, &[r]));
    grid.edge_plans.lock().unwrap().push((key, plan.clone()));
    plan
}

/// Warms the per-grid transform cache.
pub fn prepare(grid: &Arc<PolarGrid>) {
    let _ = cached_plan(grid);
}

/// `C h(z) = (1/pi) iint h(xi)/(z - xi) dm(xi)`, so that `dbar C h = h`.
pub fn cauchy_area(h: &AreaField) -> AreaField {
    let modes = h.grid.to_modes(&h.data);
    let out = cached_plan(&h.grid).apply_modes(&modes, h.grid.n_theta());
    AreaField {
        grid: h.grid.clone(),
        data: h.grid.from_modes(&out),
    }
}

/// Transform of a field given by its ring modes, returned as ring modes.
pub fn cauchy_area_modes(grid: &Arc<PolarGrid>, modes: &[Complex64]) -> Vec<Complex64> {
    cached_plan(grid).apply_modes(modes, grid.n_theta())
}

/// Values of `C h` on the circle |z| = r, at the grid angles.
pub fn cauchy_area_on_circle(h: &AreaField, r: f64) -> Vec<Complex64> {
    let modes = h.grid.to_modes(&h.data);
    cauchy_modes_on_circle(&h.grid, &modes, r)
}

pub fn cauchy_modes_on_circle(
    grid: &Arc<PolarGrid>,
    modes: &[Complex64],
    r: f64,
) -> Vec<Complex64> {
    let mut ring = circle_plan(grid, r).apply_modes(modes, grid.n_theta());
    grid.ring_inverse(&mut ring);
    ring
}

/// Product of two fields with 2x zero padding in angle; result as ring modes.
pub fn dealiased_product_modes(a: &AreaField, b: &AreaField) -> Result<Vec<Complex64>> {
    a.same_grid(b)?;
    let pa = PaddedField::new(a);
    Ok(pa.times_modes(&b.grid.to_modes(&b.data)))
}

/// A field held as angular values on the doubled grid, for repeated products.
#[derive(Debug, Clone)]
pub struct PaddedField {
    grid: Arc<PolarGrid>,
    values: Vec<Complex64>,
}

impl PaddedField {
    pub fn new(a: &AreaField) -> Self {
        let grid = a.grid.clone();
        let modes = grid.to_modes(&a.data);
        let values = pad_to_values(&grid, &modes);
        PaddedField { grid, values }
    }

    /// Modes of `self * b`, band-limited to |k| <= k_max.
    pub fn times_modes(&self, b_modes: &[Complex64]) -> Vec<Complex64> {
        let g = &self.grid;
        let nt = g.n_theta();
        let n2 = 2 * nt;
        let (f2, _) = g.fft2();
        let mut bv = pad_to_values(g, b_modes);
        for (x, a) in bv.iter_mut().zip(&self.values) {
            *x *= a;
        }
        let kmax = g.k_max();
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        for (ring_out, ring) in out.chunks_mut(nt).zip(bv.chunks_mut(n2)) {
            f2.process(ring);
            let s = 1.0 / n2 as f64;
            ring_out[0] = ring[0] * s;
            for k in 1..=kmax {
                ring_out[k] = ring[k] * s;
                ring_out[nt - k] = ring[n2 - k] * s;
            }
        }
        out
    }
}

fn pad_to_values(grid: &PolarGrid, modes: &[Complex64]) -> Vec<Complex64> {
    let nt = grid.n_theta();
    let n2 = 2 * nt;
    let kmax = grid.k_max();
    let (_, i2) = grid.fft2();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.n_r() * n2];
    for (ring, src) in out.chunks_mut(n2).zip(modes.chunks(nt)) {
        ring[0] = src[0];
        for k in 1..=kmax {
            ring[k] = src[k];
            ring[n2 - k] = src[nt - k];
        }
        i2.process(ring);
    }
    out
}

/// `T_alpha h = C(alpha conj h)`, with the alpha factor pre-padded.
#[derive(Debug, Clone)]
pub struct TAlpha {
    alpha: PaddedField,
}

impl TAlpha {
    pub fn new(alpha: &AreaField) -> Self {
        prepare(&alpha.grid);
        TAlpha {
            alpha: PaddedField::new(alpha),
        }
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.alpha.grid
    }

    /// Ring modes of `alpha * conj(h)`.
    pub fn source_modes(&self, h: &[Complex64]) -> Vec<Complex64> {
        let g = &self.alpha.grid;
        let conj: Vec<Complex64> = h.iter().map(|v| v.conj()).collect();
        self.alpha.times_modes(&g.to_modes(&conj))
    }

    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let g = &self.alpha.grid;
        let src = self.source_modes(h);
        g.from_modes(&cauchy_area_modes(g, &src))
    }

    /// `T_alpha h` restricted to the circle |z| = r.
    pub fn apply_on_circle(&self, h: &[Complex64], r: f64) -> Vec<Complex64> {
        let g = &self.alpha.grid;
        cauchy_modes_on_circle(g, &self.source_modes(h), r)
    }
}

pub fn apply_t_alpha(alpha: &AreaField, h: &AreaField) -> Result<AreaField> {
    alpha.same_grid(h)?;
    let t = TAlpha::new(alpha);
    Ok(AreaField {
        grid: h.grid.clone(),
        data: t.apply(&h.data),
    })
}

/// `T#_alpha g = -alpha C(conj g)`.
pub fn apply_t_adjoint(alpha: &AreaField, g: &AreaField) -> Result<AreaField> {
    alpha.same_grid(g)?;
    let c = cauchy_area(&g.conj());
    let grid = &alpha.grid;
    let prod = dealiased_product_modes(alpha, &c)?;
    Ok(AreaField {
        grid: grid.clone(),
        data: grid.from_modes(&prod).into_iter().map(|v| -v).collect(),
    })
}

/// Spectral `dbar` on the grid.
pub fn dbar(f: &AreaField) -> AreaField {
    spectral_derivative(f, true)
}

/// Spectral `d/dz` on the grid.
pub fn dz(f: &AreaField) -> AreaField {
    spectral_derivative(f, false)
}

fn spectral_derivative(f: &AreaField, bar: bool) -> AreaField {
    let g = &f.grid;
    let nt = g.n_theta();
    let kmax = g.k_max() as i64;
    let modes = g.to_modes(&f.data);
    let dr = g.radial_derivative(&modes);
    let mut out = vec![Complex64::new(0.0, 0.0); f.data.len()];
    out.par_chunks_mut(nt).enumerate().for_each(|(i, ring)| {
        let r = g.radii()[i];
        for k in 0..nt {
            let m = g.mode_of(k);
            if m.abs() > kmax {
                continue;
            }
            let (shift, sgn) = if bar { (m + 1, -1.0) } else { (m - 1, 1.0) };
            if shift.abs() > kmax {
                continue;
            }
            let v = 0.5 * (dr[i * nt + k] + modes[i * nt + k] * (sgn * m as f64 / r));
            ring[g.slot_of(shift)] = v;
        }
        g.ring_inverse(ring);
    });
    AreaField {
        grid: g.clone(),
        data: out,
    }
}

#[cfg(test)]
mod tests;
