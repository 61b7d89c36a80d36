//! Coefficient fields, the Bers–Nirenberg transform, the G-equation solver,
//! factorization and Hardy norms.

mod factor;
mod gsolve;
mod norm;
pub mod profile;

use std::sync::Arc;

use num_complex::Complex64;

use crate::areaops::{dbar, AreaField};
use crate::domain::PolarGrid;
use crate::error::{HardyError, Result};
pub use factor::{factorize, Factorization};
pub use gsolve::{solve_g, GSolution, GSolver, GSource};
pub use norm::{hardy_norm, max_principle_gap, HardyNorm};
pub use profile::{NuFn, NuProfile, TabulatedNu};

/// Conductivity associated with `nu`.
pub fn sigma_of(nu: f64) -> f64 {
    (1.0 - nu) / (1.0 + nu)
}

/// `nu` associated with a conductivity.
pub fn nu_of_sigma(sigma: f64) -> f64 {
    (1.0 - sigma) / (1.0 + sigma)
}

/// `nu` sampled on a grid, with the pointwise rule kept for off-grid evaluation.
#[derive(Clone)]
pub struct NuField {
    pub grid: Arc<PolarGrid>,
    pub values: Vec<f64>,
    pub kappa: f64,
    eval: NuFn,
}

impl std::fmt::Debug for NuField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NuField")
            .field("grid", &self.grid.id())
            .field("kappa", &self.kappa)
            .finish()
    }
}

impl NuField {
    pub fn new(grid: &Arc<PolarGrid>, eval: NuFn, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa < 1.0) {
            return Err(HardyError::KappaViolated {
                found: kappa,
                kappa: 1.0,
            });
        }
        let values: Vec<f64> = grid.points().into_iter().map(|z| eval(z)).collect();
        let edge = crate::domain::Circle::new(Complex64::new(0.0, 0.0), grid.r_out())
            .points(grid.n_theta());
        let found = values
            .iter()
            .copied()
            .chain(edge.into_iter().map(|z| eval(z)))
            .map(f64::abs)
            .fold(0.0, f64::max);
        if found > kappa + 1e-12 {
            return Err(HardyError::KappaViolated { found, kappa });
        }
        Ok(NuField {
            grid: grid.clone(),
            values,
            kappa,
            eval,
        })
    }

    pub fn from_profile(grid: &Arc<PolarGrid>, p: &NuProfile, kappa: f64) -> Result<Self> {
        Self::new(grid, p.as_fn(), kappa)
    }

    pub fn constant(grid: &Arc<PolarGrid>, c: f64) -> Result<Self> {
        Self::new(grid, Arc::new(move |_| c), c.abs())
    }

    pub fn at(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }

    pub fn func(&self) -> NuFn {
        self.eval.clone()
    }

    pub fn sigma_values(&self) -> Vec<f64> {
        self.values.iter().map(|&v| sigma_of(v)).collect()
    }

    pub fn as_area(&self) -> AreaField {
        AreaField {
            grid: self.grid.clone(),
            data: self.values.iter().map(|&v| v.into()).collect(),
        }
    }

    pub fn negated(&self) -> NuField {
        let f = self.eval.clone();
        NuField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| -v).collect(),
            kappa: self.kappa,
            eval: Arc::new(move |z| -f(z)),
        }
    }
}

/// `alpha = -dbar(nu) / (1 - nu^2)`.
pub fn alpha_from_nu(nu: &NuField) -> AreaField {
    alpha_with_sign(nu, 1.0)
}

/// The same with an overall sign; a negative sign exists only to let the
/// validation suite prove that it detects a corrupted coefficient.
pub fn alpha_with_sign(nu: &NuField, sign: f64) -> AreaField {
    let d = dbar(&nu.as_area());
    AreaField {
        grid: nu.grid.clone(),
        data: d
            .data
            .iter()
            .zip(&nu.values)
            .map(|(dv, &v)| -sign * dv / (1.0 - v * v))
            .collect(),
    }
}

pub fn bn_forward_at(f: Complex64, nu: f64) -> Complex64 {
    (f - nu * f.conj()) / (1.0 - nu * nu).sqrt()
}

pub fn bn_inverse_at(w: Complex64, nu: f64) -> Complex64 {
    (w + nu * w.conj()) / (1.0 - nu * nu).sqrt()
}

/// `w = (f - nu conj f) / sqrt(1 - nu^2) = sigma^(1/2) u + i sigma^(-1/2) v`.
pub fn bn_forward(f: &AreaField, nu: &NuField) -> Result<AreaField> {
    if f.grid.id() != nu.grid.id() {
        return Err(HardyError::GridMismatch);
    }
    Ok(AreaField {
        grid: f.grid.clone(),
        data: f
            .data
            .iter()
            .zip(&nu.values)
            .map(|(&v, &n)| bn_forward_at(v, n))
            .collect(),
    })
}

pub fn bn_inverse(w: &AreaField, nu: &NuField) -> Result<AreaField> {
    if w.grid.id() != nu.grid.id() {
        return Err(HardyError::GridMismatch);
    }
    Ok(AreaField {
        grid: w.grid.clone(),
        data: w
            .data
            .iter()
            .zip(&nu.values)
            .map(|(&v, &n)| bn_inverse_at(v, n))
            .collect(),
    })
}

/// Relative residual of `dbar f - nu conj(d f)` against `|d f| + |dbar f|`.
pub fn cb_residual(f: &AreaField, nu: &NuField) -> f64 {
    let fz = crate::areaops::dz(f);
    let fb = dbar(f);
    let res = AreaField {
        grid: f.grid.clone(),
        data: fb
            .data
            .iter()
            .zip(&fz.data)
            .zip(&nu.values)
            .map(|((b, d), &n)| b - n * d.conj())
            .collect(),
    };
    let scale = fz.l2_norm() + fb.l2_norm();
    res.l2_norm() / scale.max(1e-300)
}

/// Relative residual of `dbar w - alpha conj w`.
pub fn g_residual(w: &AreaField, alpha: &AreaField) -> f64 {
    let wb = dbar(w);
    let res = AreaField {
        grid: w.grid.clone(),
        data: wb
            .data
            .iter()
            .zip(&w.data)
            .zip(&alpha.data)
            .map(|((b, v), a)| b - a * v.conj())
            .collect(),
    };
    res.l2_norm() / w.l2_norm().max(1e-300)
}
