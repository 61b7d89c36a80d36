//! Solver for `w - T_alpha w = g`, i.e. `dbar w = alpha conj w` with holomorphic part g.

use std::sync::Arc;

use num_complex::Complex64;

use super::{alpha_from_nu, NuField};
use crate::areaops::{AreaField, TAlpha};
use crate::domain::PolarGrid;
use crate::error::Result;
use crate::krylov::{gmres, GmresOptions};

/// Right-hand side on the grid, plus its values on extra circles |z| = r
/// where the solution is wanted exactly.
#[derive(Debug, Clone)]
pub struct GSource {
    pub grid: Vec<Complex64>,
    pub circles: Vec<(f64, Vec<Complex64>)>,
}

impl GSource {
    pub fn from_fn<F: Fn(Complex64) -> Complex64>(grid: &PolarGrid, radii: &[f64], f: F) -> Self {
        let circles = radii
            .iter()
            .map(|&r| {
                (
                    r,
                    grid.angles()
                        .iter()
                        .map(|&t| f(Complex64::from_polar(r, t)))
                        .collect(),
                )
            })
            .collect();
        GSource {
            grid: grid.sample(&f),
            circles,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GSolution {
    pub w: AreaField,
    /// Solution values on the requested circles, at the grid angles.
    pub circles: Vec<(f64, Vec<Complex64>)>,
    pub iterations: usize,
    pub residual: f64,
}

impl GSolution {
    pub fn on_circle(&self, r: f64) -> Option<&[Complex64]> {
        self.circles
            .iter()
            .find(|(rr, _)| (rr - r).abs() < 1e-14)
            .map(|(_, v)| v.as_slice())
    }
}

/// Holds `alpha` and the precomputed transform for repeated solves.
#[derive(Clone)]
pub struct GSolver {
    nu: NuField,
    alpha: AreaField,
    t: Arc<TAlpha>,
    opts: GmresOptions,
}

impl GSolver {
    pub fn new(nu: &NuField, opts: GmresOptions) -> Self {
        Self::with_alpha(nu, alpha_from_nu(nu), opts)
    }

    pub fn with_alpha(nu: &NuField, alpha: AreaField, opts: GmresOptions) -> Self {
        let t = Arc::new(TAlpha::new(&alpha));
        GSolver {
            nu: nu.clone(),
            alpha,
            t,
            opts,
        }
    }

    pub fn nu(&self) -> &NuField {
        &self.nu
    }

    pub fn alpha(&self) -> &AreaField {
        &self.alpha
    }

    pub fn grid(&self) -> &Arc<PolarGrid> {
        &self.nu.grid
    }

    pub fn t_alpha(&self) -> &TAlpha {
        &self.t
    }

    pub fn options(&self) -> GmresOptions {
        self.opts
    }

    pub fn solve(&self, src: &GSource, guess: Option<&[Complex64]>) -> Result<GSolution> {
        let grid = self.grid().clone();
        let m = grid.len();
        let pack = |v: &[Complex64]| -> Vec<f64> {
            v.iter()
                .map(|c| c.re)
                .chain(v.iter().map(|c| c.im))
                .collect()
        };
        let unpack = |x: &[f64]| -> Vec<Complex64> {
            (0..m).map(|i| Complex64::new(x[i], x[m + i])).collect()
        };
        let b = pack(&src.grid);
        let x0 = guess.map(pack);
        let t = &self.t;
        let op = |x: &[f64], out: &mut [f64]| {
            let w = unpack(x);
            let tw = t.apply(&w);
            for i in 0..m {
                out[i] = x[i] - tw[i].re;
                out[m + i] = x[m + i] - tw[i].im;
            }
        };
        let (x, rep) = gmres(op, &b, x0.as_deref(), self.opts)?;
        let w = unpack(&x);
        let circles = src
            .circles
            .iter()
            .map(|(r, g)| {
                let tw = t.apply_on_circle(&w, *r);
                (*r, g.iter().zip(&tw).map(|(a, b)| a + b).collect())
            })
            .collect();
        Ok(GSolution {
            w: AreaField { grid, data: w },
            circles,
            iterations: rep.iterations,
            residual: rep.residual,
        })
    }
}

/// One-shot solve of `w - T_alpha w = g` on the grid of `alpha`.
pub fn solve_g(alpha: &AreaField, g: &AreaField, opts: GmresOptions) -> Result<GSolution> {
    alpha.same_grid(g)?;
    let t = TAlpha::new(alpha);
    let nu = NuField::constant(&alpha.grid, 0.0)?;
    let solver = GSolver {
        nu,
        alpha: alpha.clone(),
        t: Arc::new(t),
        opts,
    };
    solver.solve(
        &GSource {
            grid: g.data.clone(),
            circles: vec![],
        },
        None,
    )
}
