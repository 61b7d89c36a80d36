//! One boundary component: a disk problem in local coordinates.
//!
//! Component 0 lives on the unit disk directly. A hole (or the exterior of
//! a disk) is mapped to the unit disk by `zeta = r / conj(z - a)`, with the
//! solution read back as `f(z) = conj(F(zeta))`.

use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::extend::NuExtension;
use crate::circfft::real_basis_coeffs;
use crate::domain::{Circle, GridSpec, PolarGrid};
use crate::error::{HardyError, Result};
use crate::hardy_nu::{bn_inverse_at, sigma_of, GSolution, GSolver, GSource, NuField};
use crate::krylov::{gmres, GmresOptions};

#[derive(Debug, Clone, Copy)]
pub struct Resolution {
    pub n_r: usize,
    pub n_theta: usize,
    pub gmres: GmresOptions,
}

impl Resolution {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        Resolution {
            n_r,
            n_theta,
            gmres: GmresOptions::default(),
        }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::new(64, 128)
    }
}

/// Dense basis of the disk problem: one G-solution per holomorphic seed.
pub(crate) struct Basis {
    pub sols: Vec<GSolution>,
    pub lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

pub struct ComponentSolver {
    pub(crate) index: usize,
    pub(crate) placement: Option<Circle>,
    pub(crate) grid: Arc<PolarGrid>,
    pub(crate) g: GSolver,
    /// Local radii where solution values are computed exactly (1.0 first).
    pub(crate) specials: Vec<f64>,
    pub(crate) sigma_half_edge: Vec<f64>,
    basis: OnceLock<std::result::Result<Arc<Basis>, HardyError>>,
}

impl std::fmt::Debug for ComponentSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComponentSolver")
            .field("index", &self.index)
            .field("placement", &self.placement)
            .finish()
    }
}

/// Holomorphic seed number b in the order matching the constraint rows:
/// 1, z, -iz, z^2, -iz^2, ..., i.
fn seed(b: usize, m: usize, z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    if b == 0 {
        Complex64::new(1.0, 0.0)
    } else if b == m {
        i
    } else {
        let k = b.div_ceil(2) as i32;
        let p = z.powi(k);
        if b % 2 == 1 {
            p
        } else {
            -i * p
        }
    }
}

impl ComponentSolver {
    pub fn new(ext: &NuExtension, index: usize, res: Resolution, specials: &[f64]) -> Result<Self> {
        let spec = GridSpec::disk(res.n_r, res.n_theta).with_breaks(&ext.breaks(index));
        let grid = PolarGrid::new(spec)?;
        let e = ext.clone();
        let nu = NuField::new(&grid, Arc::new(move |z| e.local(index, z)), ext.kappa())?;
        let g = GSolver::new(&nu, res.gmres);
        let mut sp = vec![1.0];
        for &r in specials {
            if r > 0.0 && r < 1.0 && !sp.iter().any(|s: &f64| (s - r).abs() < 1e-14) {
                sp.push(r);
            }
        }
        let nu_edge: Vec<f64> = grid
            .angles()
            .iter()
            .map(|&t| ext.local(index, Complex64::from_polar(1.0, t)))
            .collect();
        let sigma_half_edge = nu_edge.iter().map(|&v| sigma_of(v).sqrt()).collect();
        Ok(ComponentSolver {
            index,
            placement: ext.placement(index),
            grid,
            g,
            specials: sp,
            sigma_half_edge,
            basis: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.grid
    }
    pub fn nu(&self) -> &NuField {
        self.g.nu()
    }
    pub fn n_theta(&self) -> usize {
        self.grid.n_theta()
    }
    /// Number of real Fourier rows, `2K + 1`.
    pub fn n_modes(&self) -> usize {
        self.grid.n_theta() - 1
    }

    pub fn to_local(&self, z: Complex64) -> Complex64 {
        match self.placement {
            None => z,
            Some(c) => c.radius / (z - c.center).conj(),
        }
    }

    pub fn to_global(&self, zeta: Complex64) -> Complex64 {
        match self.placement {
            None => zeta,
            Some(c) => c.center + c.radius / zeta.conj(),
        }
    }

    pub fn is_reflected(&self) -> bool {
        self.placement.is_some()
    }

    /// Local special radius at which the global circle appears, if it is centred.
    pub fn special_for(&self, circle: &Circle) -> Option<f64> {
        let r = match self.placement {
            None if circle.center.norm() < 1e-14 => circle.radius,
            Some(c) if (circle.center - c.center).norm() < 1e-14 => c.radius / circle.radius,
            _ => return None,
        };
        self.specials
            .iter()
            .copied()
            .find(|s| (s - r).abs() < 1e-12)
    }

    pub(crate) fn source(&self, g: impl Fn(Complex64) -> Complex64) -> GSource {
        GSource::from_fn(&self.grid, &self.specials, g)
    }

    fn holomorphic(&self, y: &[f64]) -> GSource {
        let m = self.n_modes();
        self.source(|z| (0..=m).map(|b| y[b] * seed(b, m, z)).sum())
    }

    /// Rows of the constraint map applied to an edge trace of w.
    fn read(&self, edge_w: &[Complex64]) -> Vec<f64> {
        let k = self.n_theta() / 2 - 1;
        let re: Vec<f64> = edge_w.iter().map(|c| c.re).collect();
        let mut out = real_basis_coeffs(&re, k);
        let im = edge_w
            .iter()
            .zip(&self.sigma_half_edge)
            .map(|(c, s)| s * c.im)
            .sum::<f64>()
            / edge_w.len() as f64;
        out.push(im);
        out
    }

    /// Constraint target for `Re tr F = u`, `mean Im tr F = c`.
    pub(crate) fn target(&self, u: &[f64], c: f64) -> Vec<f64> {
        let k = self.n_theta() / 2 - 1;
        let wu: Vec<f64> = u
            .iter()
            .zip(&self.sigma_half_edge)
            .map(|(a, s)| a * s)
            .collect();
        let mut t = real_basis_coeffs(&wu, k);
        t.push(c);
        t
    }

    pub(crate) fn basis(&self) -> Result<Arc<Basis>> {
        self.basis
            .get_or_init(|| {
                let m = self.n_modes();
                let sols: Vec<GSolution> = (0..=m)
                    .into_par_iter()
                    .map(|b| self.g.solve(&self.source(|z| seed(b, m, z)), None))
                    .collect::<Result<_>>()?;
                let mut a = DMatrix::zeros(m + 1, m + 1);
                for (b, s) in sols.iter().enumerate() {
                    let col = self.read(s.on_circle(1.0).unwrap());
                    for (r, v) in col.into_iter().enumerate() {
                        a[(r, b)] = v;
                    }
                }
                let sv = a.clone().singular_values();
                let smin = sv.min();
                if !(smin > 1e-12 * sv.max()) {
                    let mut v: Vec<f64> = sv.iter().copied().collect();
                    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    v.truncate(4);
                    return Err(HardyError::SingularSystem(v));
                }
                Ok(Arc::new(Basis { sols, lu: a.lu() }))
            })
            .clone()
    }

    /// Basis coefficients for the disk problem with data (u, c), by dense LU.
    pub fn coeffs(&self, u: &[f64], c: f64) -> Result<Vec<f64>> {
        let b = self.basis()?;
        let t = DVector::from_vec(self.target(u, c));
        let y =
            b.lu.solve(&t)
                .ok_or_else(|| HardyError::SingularSystem(vec![0.0]))?;
        Ok(y.iter().copied().collect())
    }

    /// Combination of basis solutions.
    pub fn combine(&self, y: &[f64]) -> Result<GSolution> {
        let b = self.basis()?;
        let mut w = crate::areaops::AreaField::zeros(&self.grid);
        let mut circles: Vec<(f64, Vec<Complex64>)> = self
            .specials
            .iter()
            .map(|&r| (r, vec![Complex64::new(0.0, 0.0); self.n_theta()]))
            .collect();
        for (s, &yb) in b.sols.iter().zip(y) {
            if yb == 0.0 {
                continue;
            }
            w.add_scaled(&s.w, yb.into());
            for (acc, (_, v)) in circles.iter_mut().zip(&s.circles) {
                for (a, x) in acc.1.iter_mut().zip(v) {
                    *a += yb * x;
                }
            }
        }
        Ok(GSolution {
            w,
            circles,
            iterations: 0,
            residual: 0.0,
        })
    }

    /// Disk problem solved by an outer Krylov iteration on the constraint map.
    pub fn solve_krylov(
        &self,
        u: &[f64],
        c: f64,
        guess: Option<&[f64]>,
    ) -> Result<(Vec<f64>, GSolution)> {
        let t = self.target(u, c);
        let mut err = None;
        let op = |y: &[f64], out: &mut [f64]| match self.g.solve(&self.holomorphic(y), None) {
            Ok(s) => out.copy_from_slice(&self.read(s.on_circle(1.0).unwrap())),
            Err(e) => {
                err = Some(e);
                out.iter_mut().for_each(|v| *v = 0.0);
            }
        };
        let mut opts = self.g.options();
        opts.rtol = opts.rtol.min(1e-12);
        let (y, _) = gmres(op, &t, guess, opts)?;
        if let Some(e) = err {
            return Err(e);
        }
        let sol = self.g.solve(&self.holomorphic(&y), None)?;
        Ok((y, sol))
    }

    /// Real-linear BN inverse in local coordinates at local points.
    pub(crate) fn local_value(&self, w: Complex64, zeta: Complex64) -> Complex64 {
        let f = bn_inverse_at(w, self.nu().at(zeta));
        if self.is_reflected() {
            f.conj()
        } else {
            f
        }
    }

    /// Solution values on a global circle at the grid angles.
    pub fn values_on(&self, sol: &GSolution, circle: &Circle) -> Vec<Complex64> {
        self.values_on_many(std::slice::from_ref(sol), circle)
            .pop()
            .unwrap()
    }

    /// The same for several solutions, sharing the interpolation weights.
    pub fn values_on_many(&self, sols: &[GSolution], circle: &Circle) -> Vec<Vec<Complex64>> {
        let n = self.n_theta();
        let pts = circle.points(n);
        let local: Vec<Complex64> = pts.iter().map(|&z| self.to_local(z)).collect();
        if let Some(r) = self.special_for(circle) {
            let nus: Vec<f64> = local.iter().map(|&z| self.nu().at(z)).collect();
            return sols
                .iter()
                .map(|s| {
                    s.on_circle(r)
                        .unwrap()
                        .iter()
                        .zip(&nus)
                        .map(|(&w, &v)| {
                            let f = bn_inverse_at(w, v);
                            if self.is_reflected() {
                                f.conj()
                            } else {
                                f
                            }
                        })
                        .collect()
                })
                .collect();
        }
        let ip = self.grid.interpolator(&local);
        sols.iter()
            .map(|s| {
                ip.apply(&s.w.data)
                    .into_iter()
                    .zip(&local)
                    .map(|(w, &z)| self.local_value(w, z))
                    .collect()
            })
            .collect()
    }
}
