//! Real solutions `U` (and conjugates `V`) of the conductivity equation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::field::HardyField;
use crate::circfft::{d_theta_real, fourier_real};
use crate::domain::{Circle, CircularDomain};
use crate::error::{HardyError, Result};
use crate::hardy_nu::{sigma_of, NuProfile};

/// `scale * Re(phase * f)` contributes to U, `scale * Im(phase * f)` to V.
#[derive(Debug, Clone)]
pub struct Part {
    pub field: Arc<HardyField>,
    pub phase: Complex64,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct ConductivitySolution {
    pub domain: CircularDomain,
    pub nu: NuProfile,
    pub parts: Vec<Part>,
    pub offset: f64,
    pub v_offset: f64,
    /// Set once V is known to be single-valued.
    pub has_conjugate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodVector {
    /// Flux of `sigma dU/dr` around each hole (radial normal from the hole centre).
    pub values: Vec<f64>,
    /// Max minus min over the probe circles.
    pub spread: Vec<f64>,
    /// Periods read off the log-seed coefficients.
    pub seeds: Vec<f64>,
}

/// Normal flux `sigma dU/dn` on each boundary circle, outward from the domain.
#[derive(Debug, Clone)]
pub struct BoundaryFlux {
    pub totals: Vec<f64>,
    /// Density per unit arclength at the grid angles.
    pub density: Vec<Vec<f64>>,
}

impl BoundaryFlux {
    /// Complex Fourier coefficients of the density on component j, FFT order.
    pub fn coefficients(&self, j: usize) -> Vec<Complex64> {
        fourier_real(&self.density[j])
    }

    /// Density minus its mean.
    pub fn oscillatory(&self, j: usize) -> Vec<f64> {
        let d = &self.density[j];
        let m = d.iter().sum::<f64>() / d.len() as f64;
        d.iter().map(|v| v - m).collect()
    }

    pub fn n(&self) -> usize {
        self.density.first().map_or(0, |d| d.len())
    }

    /// Flux from a density sampled on each circle.
    pub fn from_density(domain: &CircularDomain, density: Vec<Vec<f64>>) -> Result<Self> {
        let circles = domain.boundary();
        if density.len() != circles.len() {
            return Err(HardyError::BadData("flux does not match the domain".into()));
        }
        let totals = circles
            .iter()
            .zip(&density)
            .map(|(c, d)| d.iter().sum::<f64>() * 2.0 * PI * c.radius / d.len() as f64)
            .collect();
        Ok(BoundaryFlux { totals, density })
    }
}

impl ConductivitySolution {
    pub fn from_field(field: HardyField, nu: &NuProfile) -> Self {
        ConductivitySolution {
            domain: field.domain().clone(),
            nu: nu.clone(),
            parts: vec![Part {
                field: Arc::new(field),
                phase: Complex64::new(1.0, 0.0),
                scale: 1.0,
            }],
            offset: 0.0,
            v_offset: 0.0,
            has_conjugate: false,
        }
    }

    pub fn n_theta(&self) -> usize {
        self.parts[0].field.n_theta()
    }

    pub fn sigma(&self, z: Complex64) -> f64 {
        sigma_of(self.nu.eval(z))
    }

    /// Linear combination `a * self + b * other` (same domain and sampling).
    pub fn combine(&self, a: f64, other: &ConductivitySolution, b: f64) -> ConductivitySolution {
        let mut parts: Vec<Part> = self
            .parts
            .iter()
            .map(|p| Part {
                scale: p.scale * a,
                ..p.clone()
            })
            .collect();
        parts.extend(other.parts.iter().map(|p| Part {
            scale: p.scale * b,
            ..p.clone()
        }));
        ConductivitySolution {
            domain: self.domain.clone(),
            nu: self.nu.clone(),
            parts,
            offset: a * self.offset + b * other.offset,
            v_offset: a * self.v_offset + b * other.v_offset,
            has_conjugate: self.has_conjugate && other.has_conjugate,
        }
    }

    pub fn u_at(&self, pts: &[Complex64]) -> Vec<f64> {
        let mut out = vec![self.offset; pts.len()];
        for p in &self.parts {
            for (o, f) in out.iter_mut().zip(p.field.eval(pts)) {
                *o += p.scale * (p.phase * f).re;
            }
        }
        out
    }

    /// V at points; multivalued parts use the principal branch.
    pub fn v_at(&self, pts: &[Complex64]) -> Vec<f64> {
        let mut out = vec![self.v_offset; pts.len()];
        for p in &self.parts {
            for (o, f) in out.iter_mut().zip(p.field.eval(pts)) {
                *o += p.scale * (p.phase * f).im;
            }
        }
        out
    }

    /// `(dU, dV)` as complex Wirtinger derivatives `d/dz`.
    pub fn wirtinger(&self, pts: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let zero = Complex64::new(0.0, 0.0);
        let mut du = vec![zero; pts.len()];
        let mut dv = vec![zero; pts.len()];
        for p in &self.parts {
            let (a, b) = p.field.eval_derivs(pts);
            for i in 0..pts.len() {
                let fa = p.phase * a[i];
                let fb = p.phase * b[i];
                du[i] += p.scale * 0.5 * (fa + fb.conj());
                dv[i] += p.scale * Complex64::new(0.0, -0.5) * (fa - fb.conj());
            }
        }
        (du, dv)
    }

    /// `grad U` at points.
    pub fn grad_u(&self, pts: &[Complex64]) -> Vec<[f64; 2]> {
        self.wirtinger(pts)
            .0
            .iter()
            .map(|d| [2.0 * d.re, -2.0 * d.im])
            .collect()
    }

    /// Real trace of U on each boundary circle.
    pub fn trace(&self) -> Vec<Vec<f64>> {
        self.domain
            .boundary()
            .iter()
            .map(|c| self.u_on_circle(c))
            .collect()
    }

    pub fn u_on_circle(&self, c: &Circle) -> Vec<f64> {
        let mut out = vec![self.offset; self.n_theta()];
        for p in &self.parts {
            for (o, f) in out.iter_mut().zip(p.field.on_circle(c)) {
                *o += p.scale * (p.phase * f).re;
            }
        }
        out
    }

    /// Single-valued part of V on a circle.
    pub fn v_on_circle(&self, c: &Circle) -> Vec<f64> {
        let mut out = vec![self.v_offset; self.n_theta()];
        for p in &self.parts {
            for (o, f) in out.iter_mut().zip(p.field.on_circle_single_valued(c)) {
                *o += p.scale * (p.phase * f).im;
            }
        }
        out
    }

    /// Trace of V per boundary component.
    pub fn v_trace(&self) -> Vec<Vec<f64>> {
        self.domain
            .boundary()
            .iter()
            .map(|c| self.v_on_circle(c))
            .collect()
    }

    /// Periods from the log-seed coefficients.
    pub fn seed_periods(&self) -> Vec<f64> {
        let n = self.domain.n_holes();
        let mut out = vec![0.0; n];
        if self.domain.kind() == crate::domain::DomainKind::ExteriorDisk {
            return vec![0.0; n];
        }
        for p in &self.parts {
            for (o, v) in out.iter_mut().zip(p.field.seed_periods()) {
                *o += p.scale * p.phase.re * v;
            }
        }
        out
    }

    /// Quadrature periods around each hole, with the spread across 5 probe circles.
    pub fn compute_periods(&self) -> PeriodVector {
        let n = self.n_theta() * 2;
        let mut values = Vec::new();
        let mut spread = Vec::new();
        let holes: Vec<Circle> = if self.domain.kind() == crate::domain::DomainKind::ExteriorDisk {
            vec![]
        } else {
            self.domain.holes().to_vec()
        };
        for (j, h) in holes.iter().enumerate() {
            let gap = self.domain.hole_gap(j + 1);
            let per: Vec<f64> = [0.2, 0.35, 0.5, 0.65, 0.8]
                .iter()
                .map(|t| {
                    let c = Circle::new(h.center, h.radius + t * gap);
                    let pts = c.points(n);
                    let du = self.wirtinger(&pts).0;
                    pts.iter()
                        .zip(&du)
                        .map(|(&z, d)| {
                            let e = (z - h.center) / c.radius;
                            self.sigma(z) * 2.0 * (e * d).re
                        })
                        .sum::<f64>()
                        * 2.0
                        * PI
                        * c.radius
                        / n as f64
                })
                .collect();
            let mx = per.iter().copied().fold(f64::MIN, f64::max);
            let mn = per.iter().copied().fold(f64::MAX, f64::min);
            values.push(per.iter().sum::<f64>() / per.len() as f64);
            spread.push(mx - mn);
        }
        PeriodVector {
            values,
            spread,
            seeds: self.seed_periods(),
        }
    }

    /// `sigma dU/dn` on each boundary circle, from the tangential derivative of V.
    pub fn normal_flux(&self) -> BoundaryFlux {
        let circles = self.domain.boundary();
        let exterior = self.domain.kind() == crate::domain::DomainKind::ExteriorDisk;
        let density = circles
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut rate = d_theta_real(&self.v_on_circle(c));
                for p in &self.parts {
                    let s = p.scale * p.phase.re;
                    if s != 0.0 {
                        for (r, a) in rate.iter_mut().zip(p.field.seed_arg_rate(c)) {
                            *r += s * a;
                        }
                    }
                }
                let sign = if k == 0 && !exterior { 1.0 } else { -1.0 };
                rate.iter().map(|r| sign * r / c.radius).collect()
            })
            .collect();
        BoundaryFlux::from_density(&self.domain, density).expect("matching components")
    }

    /// Conjugate V, provided every period vanishes; V has zero arclength mean on the boundary.
    pub fn conjugate(&self) -> Result<ConductivitySolution> {
        let periods = self.seed_periods();
        let tr = self.trace();
        let norm = (tr.iter().flatten().map(|v| v * v).sum::<f64>()
            / tr.iter().map(|c| c.len()).sum::<usize>() as f64)
            .sqrt();
        if periods.iter().any(|l| l.abs() > 1e-8 * (1.0 + norm)) {
            return Err(HardyError::CompatibilityViolated(periods));
        }
        let mut out = self.clone();
        for p in &mut out.parts {
            if !p.field.seeds().is_empty() {
                p.field = Arc::new(p.field.without_seeds());
            }
        }
        out.v_offset = 0.0;
        let circles = self.domain.boundary();
        let (mut acc, mut len) = (0.0, 0.0);
        for c in &circles {
            let v = out.v_on_circle(c);
            acc += v.iter().sum::<f64>() / v.len() as f64 * c.radius;
            len += c.radius;
        }
        out.v_offset = -acc / len;
        out.has_conjugate = true;
        Ok(out)
    }
}
