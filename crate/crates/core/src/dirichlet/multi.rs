//! Dense solver for the Dirichlet problem on a circular domain.
//!
//! Every boundary component carries a disk (or reflected exterior) problem.
//! The unknowns are the Fourier data of each piece plus one log-seed
//! coefficient per hole; the rows are the Fourier coefficients of the real
//! trace on every circle.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::component::{ComponentSolver, Resolution};
use super::extend::{ExtensionVariant, NuExtension};
use super::field::{HardyField, LogSeed, Piece};
use crate::areaops::{cauchy_area, cauchy_area_on_circle, AreaField};
use crate::circfft::{real_basis_coeffs, real_basis_eval};
use crate::domain::{Circle, CircularDomain, DomainKind};
use crate::error::{HardyError, Result};
use crate::hardy_nu::{GSolution, GSource, NuProfile};

/// Holomorphic-free solution carrying the non-periodic part of a log seed.
#[derive(Debug, Clone)]
struct SeedPiece {
    seed: LogSeed,
    sol: GSolution,
}

pub struct MultiDirichlet {
    domain: CircularDomain,
    ext: NuExtension,
    res: Resolution,
    comps: Vec<Arc<ComponentSolver>>,
    seeds: Vec<SeedPiece>,
    /// Data coefficients to basis coefficients, per component.
    data_maps: Vec<DMatrix<f64>>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    smallest_sv: f64,
}

impl std::fmt::Debug for MultiDirichlet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiDirichlet")
            .field("domain", &self.domain)
            .field("res", &self.res)
            .finish()
    }
}

fn smallest(sv: &DVector<f64>, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = sv.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.truncate(k);
    v
}

impl MultiDirichlet {
    pub fn new(
        domain: &CircularDomain,
        profile: &NuProfile,
        kappa: f64,
        res: Resolution,
    ) -> Result<Self> {
        Self::with_variant(domain, profile, kappa, res, ExtensionVariant::Reflect)
    }

    pub fn with_variant(
        domain: &CircularDomain,
        profile: &NuProfile,
        kappa: f64,
        res: Resolution,
        variant: ExtensionVariant,
    ) -> Result<Self> {
        let ext = NuExtension::new(domain, profile, kappa, variant)?;
        Self::from_extension(ext, res)
    }

    pub fn from_extension(ext: NuExtension, res: Resolution) -> Result<Self> {
        let domain = ext.domain().clone();
        let circles = domain.boundary();
        let nc = circles.len();
        let comps: Vec<Arc<ComponentSolver>> = (0..nc)
            .into_par_iter()
            .map(|i| {
                let place = ext.placement(i);
                let specials: Vec<f64> = circles
                    .iter()
                    .filter_map(|c| match place {
                        None if c.center.norm() < 1e-14 => Some(c.radius),
                        Some(p) if (c.center - p.center).norm() < 1e-14 => {
                            Some(p.radius / c.radius)
                        }
                        _ => None,
                    })
                    .collect();
                let comp = ComponentSolver::new(&ext, i, res, &specials)?;
                comp.basis()?;
                Ok(Arc::new(comp))
            })
            .collect::<Result<_>>()?;

        let m = comps[0].n_modes();
        let n = comps[0].n_theta();
        let exterior = domain.kind() == DomainKind::ExteriorDisk;

        // data coefficient r -> basis coefficients
        let data_maps: Vec<DMatrix<f64>> = comps
            .iter()
            .map(|c| {
                let mut y = DMatrix::zeros(m + 1, m);
                for r in 0..m {
                    let mut e = vec![0.0; m];
                    e[r] = 1.0;
                    let col = c.coeffs(&real_basis_eval(&e, n), 0.0)?;
                    y.set_column(r, &DVector::from_vec(col));
                }
                Ok(y)
            })
            .collect::<Result<_>>()?;

        let seeds: Vec<SeedPiece> = if exterior {
            vec![]
        } else {
            (1..nc)
                .into_par_iter()
                .map(|j| build_seed(&ext, &comps[0], j))
                .collect::<Result<_>>()?
        };

        // columns per component: real Fourier data, holes without the constant
        let mut cols: Vec<(usize, usize)> = Vec::new();
        for i in 0..nc {
            let first = if i == 0 { 0 } else { 1 };
            for r in first..m {
                cols.push((i, r));
            }
        }
        let dim = nc * m;
        assert_eq!(cols.len() + seeds.len(), dim);
        let kmax = n / 2 - 1;

        // Re f_i on circle k for every basis element
        let blocks: Vec<Vec<DMatrix<f64>>> = comps
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let b = c.basis().unwrap();
                circles
                    .iter()
                    .map(|circ| {
                        let vals = c.values_on_many(&b.sols, circ);
                        let mut proj = DMatrix::zeros(m, m + 1);
                        for (bi, v) in vals.iter().enumerate() {
                            let re: Vec<f64> = v.iter().map(|z| z.re).collect();
                            proj.set_column(bi, &DVector::from_vec(real_basis_coeffs(&re, kmax)));
                        }
                        proj * &data_maps[i]
                    })
                    .collect()
            })
            .collect();

        let mut a = DMatrix::zeros(dim, dim);
        for (col, &(i, r)) in cols.iter().enumerate() {
            for k in 0..nc {
                for row in 0..m {
                    a[(k * m + row, col)] = blocks[i][k][(row, r)];
                }
            }
        }
        for (s, sp) in seeds.iter().enumerate() {
            let col = cols.len() + s;
            for (k, circ) in circles.iter().enumerate() {
                let vals = comps[0].values_on(&sp.sol, circ);
                let pts = circ.points(n);
                let re: Vec<f64> = vals
                    .iter()
                    .zip(&pts)
                    .map(|(v, &z)| v.re + sp.seed.real(z))
                    .collect();
                for (row, v) in real_basis_coeffs(&re, kmax).into_iter().enumerate() {
                    a[(k * m + row, col)] = v;
                }
            }
        }
        let sv = a.clone().singular_values();
        let smin = sv.min();
        if !(smin > 1e-11 * sv.max()) {
            return Err(HardyError::SingularSystem(smallest(&sv, 4)));
        }
        Ok(MultiDirichlet {
            domain,
            ext,
            res,
            comps,
            seeds,
            data_maps,
            lu: a.lu(),
            smallest_sv: smin,
        })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }
    pub fn extension(&self) -> &NuExtension {
        &self.ext
    }
    pub fn resolution(&self) -> Resolution {
        self.res
    }
    pub fn n_theta(&self) -> usize {
        self.res.n_theta
    }
    pub fn smallest_singular_value(&self) -> f64 {
        self.smallest_sv
    }
    pub(crate) fn components(&self) -> &[Arc<ComponentSolver>] {
        &self.comps
    }

    /// Solves for the solution with real boundary values `u` (one sample
    /// vector of length `n_theta` per boundary component).
    pub fn solve(&self, u: &[Vec<f64>]) -> Result<HardyField> {
        let circles = self.domain.boundary();
        let n = self.n_theta();
        if u.len() != circles.len() || u.iter().any(|c| c.len() != n) {
            return Err(HardyError::BadData(format!(
                "expected {} components of {} samples",
                circles.len(),
                n
            )));
        }
        if u.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HardyError::BadData("non-finite boundary data".into()));
        }
        let m = n - 1;
        let kmax = n / 2 - 1;
        let rhs: Vec<f64> = u.iter().flat_map(|c| real_basis_coeffs(c, kmax)).collect();
        let x = self
            .lu
            .solve(&DVector::from_vec(rhs))
            .ok_or_else(|| HardyError::SingularSystem(vec![0.0]))?;
        let base = x.len() - self.seeds.len();
        let mut pos = 0;
        let mut pieces = Vec::new();
        for (i, c) in self.comps.iter().enumerate() {
            let mut data = vec![0.0; m];
            let first = if i == 0 { 0 } else { 1 };
            for r in first..m {
                data[r] = x[pos];
                pos += 1;
            }
            let y = &self.data_maps[i] * DVector::from_vec(data);
            let mut sol = c.combine(y.as_slice())?;
            if i == 0 {
                for (s, sp) in self.seeds.iter().enumerate() {
                    let cj = x[base + s];
                    sol.w.add_scaled(&sp.sol.w, cj.into());
                    for ((_, acc), (_, v)) in sol.circles.iter_mut().zip(&sp.sol.circles) {
                        acc.iter_mut().zip(v).for_each(|(a, b)| *a += cj * b);
                    }
                }
            }
            pieces.push(Piece::new(c.clone(), sol));
        }
        let seeds = self
            .seeds
            .iter()
            .enumerate()
            .map(|(s, sp)| LogSeed {
                coef: x[base + s],
                ..sp.seed
            })
            .collect();
        Ok(HardyField::new(self.domain.clone(), pieces, seeds))
    }
}

/// Log seed for hole j with its correction vanishing in real part on the unit circle.
fn build_seed(ext: &NuExtension, comp0: &ComponentSolver, j: usize) -> Result<SeedPiece> {
    let hole = ext.domain().holes()[j - 1];
    let a = hole.center;
    let beta = ext.hole_value(j);
    let grid = comp0.grid().clone();
    let nu = comp0.nu();
    let q = |z: Complex64, v: f64| -> Complex64 {
        let d = z - a;
        if d.norm() < 1e-14 {
            return Complex64::new(0.0, 0.0);
        }
        (v - beta) / d.conj() / (1.0 - v * v).sqrt()
    };
    let qf = AreaField::new(
        grid.clone(),
        grid.points()
            .iter()
            .zip(&nu.values)
            .map(|(&z, &v)| q(z, v))
            .collect(),
    )?;
    let src = GSource {
        grid: cauchy_area(&qf).data,
        circles: comp0
            .specials
            .iter()
            .map(|&r| (r, cauchy_area_on_circle(&qf, r)))
            .collect(),
    };
    let part = comp0.g.solve(&src, None)?;
    let seed = LogSeed {
        center: a,
        beta,
        coef: 1.0,
    };
    let unit = Circle::unit();
    let pts = unit.points(comp0.n_theta());
    let fp = comp0.values_on(&part, &unit);
    let h: Vec<f64> = fp
        .iter()
        .zip(&pts)
        .map(|(v, &z)| -seed.real(z) - v.re)
        .collect();
    let y = comp0.coeffs(&h, 0.0)?;
    let mut sol = comp0.combine(&y)?;
    sol.w.add_scaled(&part.w, 1.0.into());
    for ((_, acc), (_, v)) in sol.circles.iter_mut().zip(&part.circles) {
        acc.iter_mut().zip(v).for_each(|(x, y)| *x += y);
    }
    Ok(SeedPiece { seed, sol })
}
