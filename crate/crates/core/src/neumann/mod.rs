//! Weighted Neumann problem `sigma dU/dn = phi`, solved through conjugation.
//!
//! The per-hole fluxes are matched by an S_Omega solution; the remainder is a
//! tangential derivative `d_t v`, and `v` is the trace of the conjugate of the
//! wanted solution, which is (1/sigma)-harmonic.

use num_complex::Complex64;

use crate::circfft::antiderivative_real;
use crate::dirichlet::{
    solve_s_omega, BoundaryFlux, ConductivitySolution, MultiDirichlet, Resolution,
};
use crate::domain::{CircularDomain, DomainKind};
use crate::error::{HardyError, Result};
use crate::hardy_nu::NuProfile;

/// Flux data: density per unit arclength on each boundary circle, outward normal.
pub type NeumannData = BoundaryFlux;

/// Both Dirichlet solvers needed by the pipeline.
pub struct NeumannSolver {
    sigma: MultiDirichlet,
    inverse: MultiDirichlet,
}

impl NeumannSolver {
    pub fn new(
        domain: &CircularDomain,
        nu: &NuProfile,
        kappa: f64,
        res: Resolution,
    ) -> Result<Self> {
        if domain.kind() == DomainKind::ExteriorDisk {
            return Err(HardyError::UnsupportedDomain(
                "Neumann problem on an exterior domain".into(),
            ));
        }
        let (a, b) = rayon::join(
            || MultiDirichlet::new(domain, nu, kappa, res),
            || MultiDirichlet::new(domain, &nu.negated(), kappa, res),
        );
        Ok(NeumannSolver {
            sigma: a?,
            inverse: b?,
        })
    }

    /// Reuses an existing solver for sigma.
    pub fn from_solver(sigma: MultiDirichlet) -> Result<Self> {
        let ext = sigma.extension();
        let inverse = MultiDirichlet::with_variant(
            ext.domain(),
            &ext.profile().negated(),
            ext.kappa(),
            sigma.resolution(),
            ext.variant(),
        )?;
        Ok(NeumannSolver { sigma, inverse })
    }

    pub fn dirichlet(&self) -> &MultiDirichlet {
        &self.sigma
    }

    pub fn solve(&self, phi: &NeumannData) -> Result<ConductivitySolution> {
        self.solve_shifted(phi, &[])
    }

    /// `shifts` are added to the tangential antiderivatives; any choice gives the same answer.
    pub(crate) fn solve_shifted(
        &self,
        phi: &NeumannData,
        shifts: &[f64],
    ) -> Result<ConductivitySolution> {
        let domain = self.sigma.domain();
        let circles = domain.boundary();
        let n = self.sigma.n_theta();
        if phi.density.len() != circles.len() || phi.density.iter().any(|d| d.len() != n) {
            return Err(HardyError::BadData(format!(
                "expected {} flux components of {} samples",
                circles.len(),
                n
            )));
        }
        if phi.density.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HardyError::BadData("non-finite flux".into()));
        }
        let total: f64 = phi.totals.iter().sum();
        let scale: f64 = phi.totals.iter().map(|t| t.abs()).sum::<f64>()
            + phi.density.iter().flatten().map(|v| v.abs()).sum::<f64>() / n as f64;
        if total.abs() > 1e-8 * (1.0 + scale) {
            return Err(HardyError::MeanNotZero(total));
        }
        // hole periods (radial normal from each centre) are minus the outward totals
        let periods: Vec<f64> = phi.totals[1..].iter().map(|t| -t).collect();
        let (_, upsilon) = solve_s_omega(&self.sigma, &periods)?;
        let flux_up = upsilon.normal_flux();
        let v: Vec<Vec<f64>> = circles
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let sign = if k == 0 { 1.0 } else { -1.0 };
                let psi: Vec<f64> = phi.density[k]
                    .iter()
                    .zip(&flux_up.density[k])
                    .map(|(a, b)| sign * c.radius * (a - b))
                    .collect();
                let c0 = shifts.get(k).copied().unwrap_or(0.0);
                antiderivative_real(&psi)
                    .into_iter()
                    .map(|x| x + c0)
                    .collect()
            })
            .collect();
        let inv = |data: &[Vec<f64>]| -> Result<ConductivitySolution> {
            Ok(ConductivitySolution::from_field(
                self.inverse.solve(data)?,
                self.inverse.extension().profile(),
            ))
        };
        let raw = inv(&v)?;
        let target: Vec<f64> = raw.seed_periods().iter().map(|p| -p).collect();
        let (s, _) = solve_s_omega(&self.inverse, &target).map_err(|e| match e {
            HardyError::SingularSystem(_) => HardyError::CompatibilityUnreachable,
            other => other,
        })?;
        let data: Vec<Vec<f64>> = v
            .iter()
            .zip(&s.constants)
            .map(|(vk, c)| vk.iter().map(|x| x + c).collect())
            .collect();
        let conj = inv(&data)?.conjugate().map_err(|e| match e {
            HardyError::CompatibilityViolated(_) => HardyError::CompatibilityUnreachable,
            other => other,
        })?;
        // U = -V_conj = Re(i f) and the conjugate of U is Re f
        let mut w = conj.clone();
        w.nu = upsilon.nu.clone();
        for p in &mut w.parts {
            p.phase *= Complex64::new(0.0, 1.0);
        }
        w.offset = -conj.v_offset;
        w.v_offset = conj.offset;
        let mut u = upsilon.combine(1.0, &w, 1.0);
        let t0 = u.u_on_circle(&circles[0]);
        u.offset -= t0.iter().sum::<f64>() / t0.len() as f64;
        Ok(u)
    }
}

/// One-shot Neumann solve.
pub fn solve_neumann(
    domain: &CircularDomain,
    nu: &NuProfile,
    kappa: f64,
    phi: &NeumannData,
    res: Resolution,
) -> Result<ConductivitySolution> {
    NeumannSolver::new(domain, nu, kappa, res)?.solve(phi)
}
