//! Dirichlet problems for the conductivity equation on circular domains.

mod component;
mod extend;
mod field;
mod multi;
mod solution;
mod split;

#[cfg(test)]
mod tests;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use component::{ComponentSolver, Resolution};
pub use extend::{sample_domain, ExtensionVariant, NuExtension};
pub use field::{BeltramiFunction, HardyField, LogSeed};
pub use multi::MultiDirichlet;
pub use solution::{BoundaryFlux, ConductivitySolution, Part, PeriodVector};
pub use split::{split_annulus, AnnulusSplit};

use crate::domain::{Circle, CircularDomain};
use crate::error::{HardyError, Result};
use crate::hardy_nu::NuProfile;
use field::Piece;

/// Disk problem `Re tr f = u`, `mean Im tr f = c`, by the outer Krylov iteration.
/// Returns the field and the converged coefficient vector (usable as a guess).
pub fn solve_dirichlet_disk(
    nu: &NuProfile,
    kappa: f64,
    u: &[f64],
    c: f64,
    res: Resolution,
    guess: Option<&[f64]>,
) -> Result<(BeltramiFunction, Vec<f64>)> {
    if u.iter().any(|v| !v.is_finite()) || !c.is_finite() {
        return Err(HardyError::BadData("non-finite boundary data".into()));
    }
    if u.len() != res.n_theta {
        return Err(HardyError::BadData(format!(
            "expected {} samples",
            res.n_theta
        )));
    }
    let d = CircularDomain::disk();
    let ext = NuExtension::new(&d, nu, kappa, ExtensionVariant::Reflect)?;
    let comp = Arc::new(ComponentSolver::new(&ext, 0, res, &[])?);
    let (y, sol) = comp.solve_krylov(u, c, guess)?;
    Ok((HardyField::new(d, vec![Piece::new(comp, sol)], vec![]), y))
}

/// Exterior of the disk `|z - center| < radius`, solved by reflection.
/// With `zero_mean` the trace mean is removed afterwards.
pub fn solve_dirichlet_exterior(
    center: Complex64,
    radius: f64,
    nu: &NuProfile,
    kappa: f64,
    u: &[f64],
    c: f64,
    res: Resolution,
    zero_mean: bool,
) -> Result<BeltramiFunction> {
    if u.iter().any(|v| !v.is_finite()) || !c.is_finite() {
        return Err(HardyError::BadData("non-finite boundary data".into()));
    }
    if u.len() != res.n_theta {
        return Err(HardyError::BadData(format!(
            "expected {} samples",
            res.n_theta
        )));
    }
    let d = crate::domain::build_domain(&crate::domain::DomainDescriptor::Exterior {
        center: [center.re, center.im],
        radius,
    })?;
    let ext = NuExtension::new(&d, nu, kappa, ExtensionVariant::Reflect)?;
    let comp = Arc::new(ComponentSolver::new(&ext, 0, res, &[])?);
    let (_, sol) = comp.solve_krylov(u, -c, None)?;
    let mut f = HardyField::new(d, vec![Piece::new(comp, sol)], vec![]);
    if zero_mean {
        let tr = f.on_circle(&Circle::new(center, radius));
        let m = tr.iter().sum::<Complex64>() / tr.len() as f64;
        f.add_constant(-m);
    }
    Ok(f)
}

/// Dirichlet problem on any circular domain: one sample vector per boundary circle.
pub fn solve_dirichlet_multi(
    domain: &CircularDomain,
    nu: &NuProfile,
    kappa: f64,
    u: &[Vec<f64>],
    res: Resolution,
) -> Result<ConductivitySolution> {
    let solver = MultiDirichlet::new(domain, nu, kappa, res)?;
    Ok(ConductivitySolution::from_field(solver.solve(u)?, nu))
}

/// Quadrature periods of a solution.
pub fn compute_periods(sol: &ConductivitySolution) -> PeriodVector {
    sol.compute_periods()
}

pub fn conjugate_solution(sol: &ConductivitySolution) -> Result<ConductivitySolution> {
    sol.conjugate()
}

pub fn normal_flux(sol: &ConductivitySolution) -> BoundaryFlux {
    sol.normal_flux()
}

/// Constants `C_0..C_n`, one per boundary circle, summing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SOmegaElement {
    pub constants: Vec<f64>,
}

impl SOmegaElement {
    /// Boundary data with the constant on each circle.
    pub fn data(&self, n_theta: usize) -> Vec<Vec<f64>> {
        self.constants.iter().map(|&c| vec![c; n_theta]).collect()
    }
}

/// Solutions with boundary data 1 on circle k and 0 elsewhere, with their seed periods.
pub fn indicator_solutions(solver: &MultiDirichlet) -> Result<Vec<ConductivitySolution>> {
    let nc = solver.domain().n_components();
    let n = solver.n_theta();
    (0..nc)
        .map(|k| {
            let data: Vec<Vec<f64>> = (0..nc)
                .map(|i| vec![if i == k { 1.0 } else { 0.0 }; n])
                .collect();
            Ok(ConductivitySolution::from_field(
                solver.solve(&data)?,
                solver.extension().profile(),
            ))
        })
        .collect()
}

/// The unique element of S_Omega whose solution has the requested periods.
pub fn solve_s_omega(
    solver: &MultiDirichlet,
    target: &[f64],
) -> Result<(SOmegaElement, ConductivitySolution)> {
    let nh = solver.domain().n_holes();
    if target.len() != nh {
        return Err(HardyError::BadData(format!("expected {nh} periods")));
    }
    let nc = nh + 1;
    let basis = indicator_solutions(solver)?;
    let mut a = DMatrix::zeros(nc, nc);
    for (k, b) in basis.iter().enumerate() {
        for (j, p) in b.seed_periods().into_iter().enumerate() {
            a[(j, k)] = p;
        }
        a[(nh, k)] = 1.0;
    }
    let mut rhs = DVector::zeros(nc);
    for (j, &t) in target.iter().enumerate() {
        rhs[j] = t;
    }
    let sv = a.clone().singular_values();
    if !(sv.min() > 1e-12 * sv.max()) {
        return Err(HardyError::SingularSystem(sv.iter().copied().collect()));
    }
    let c = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| HardyError::SingularSystem(vec![0.0]))?;
    let constants: Vec<f64> = c.iter().copied().collect();
    let elem = SOmegaElement { constants };
    let sol = ConductivitySolution::from_field(
        solver.solve(&elem.data(solver.n_theta()))?,
        solver.extension().profile(),
    );
    Ok((elem, sol))
}

pub(crate) fn piece(comp: Arc<ComponentSolver>, sol: crate::hardy_nu::GSolution) -> Piece {
    Piece::new(comp, sol)
}

pub(crate) fn field_from_pieces(domain: CircularDomain, pieces: Vec<Piece>) -> HardyField {
    HardyField::new(domain, pieces, vec![])
}

/// Removes from `raw` the S_Omega element carrying its periods and shifts it to
/// zero arclength mean, so that its solution has a single-valued conjugate.
pub fn compatible_part(solver: &MultiDirichlet, raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let profile = solver.extension().profile().clone();
    let sol = ConductivitySolution::from_field(solver.solve(raw)?, &profile);
    let (_, ups) = solve_s_omega(solver, &sol.seed_periods())?;
    let circles = solver.domain().boundary();
    let mut out: Vec<Vec<f64>> = raw
        .iter()
        .zip(ups.trace())
        .map(|(a, b)| a.iter().zip(&b).map(|(x, y)| x - y).collect())
        .collect();
    let (mut acc, mut len) = (0.0, 0.0);
    for (c, v) in circles.iter().zip(&out) {
        acc += v.iter().sum::<f64>() / v.len() as f64 * c.radius;
        len += c.radius;
    }
    out.iter_mut().flatten().for_each(|v| *v -= acc / len);
    Ok(out)
}
