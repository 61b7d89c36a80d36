//! Circular domains, polar grids and collar families.

pub mod gauss;
pub mod grid;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
pub use grid::{GridSpec, Interpolator, Panel, PolarGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

/// User-facing description of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    Disk,
    Annulus { rho: f64 },
    Multi { holes: Vec<HoleSpec> },
    Exterior { center: [f64; 2], radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn unit() -> Self {
        Circle::new(Complex64::new(0.0, 0.0), 1.0)
    }

    pub fn point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }

    pub fn points(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| self.point(2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    Disk,
    Annulus,
    MultiHole,
    ExteriorDisk,
}

/// A validated circular domain. Boundary component 0 is the unit circle,
/// components 1..=n are the holes; an exterior domain has only its circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularDomain {
    kind: DomainKind,
    holes: Vec<Circle>,
}

pub fn build_domain(desc: &DomainDescriptor) -> Result<CircularDomain> {
    match desc {
        DomainDescriptor::Disk => Ok(CircularDomain {
            kind: DomainKind::Disk,
            holes: vec![],
        }),
        DomainDescriptor::Annulus { rho } => {
            if !(*rho > 0.0 && *rho < 1.0) {
                return Err(HardyError::BadAnnulusRadius(*rho));
            }
            Ok(CircularDomain {
                kind: DomainKind::Annulus,
                holes: vec![Circle::new(Complex64::new(0.0, 0.0), *rho)],
            })
        }
        DomainDescriptor::Multi { holes } => {
            let circles: Vec<Circle> = holes
                .iter()
                .map(|h| Circle::new(Complex64::new(h.center[0], h.center[1]), h.radius))
                .collect();
            for (j, c) in circles.iter().enumerate() {
                if !(c.radius > 0.0) || c.center.norm() + c.radius >= 1.0 {
                    return Err(HardyError::HoleOutsideDisk(j + 1));
                }
            }
            for i in 0..circles.len() {
                for j in i + 1..circles.len() {
                    let d = (circles[i].center - circles[j].center).norm();
                    if d <= circles[i].radius + circles[j].radius {
                        return Err(HardyError::OverlappingHoles(i + 1, j + 1));
                    }
                }
            }
            let kind = if circles.is_empty() {
                DomainKind::Disk
            } else {
                DomainKind::MultiHole
            };
            Ok(CircularDomain {
                kind,
                holes: circles,
            })
        }
        DomainDescriptor::Exterior { center, radius } => {
            if !(*radius > 0.0) {
                return Err(HardyError::BadData(format!("exterior radius {radius}")));
            }
            Ok(CircularDomain {
                kind: DomainKind::ExteriorDisk,
                holes: vec![Circle::new(Complex64::new(center[0], center[1]), *radius)],
            })
        }
    }
}

impl CircularDomain {
    pub fn disk() -> Self {
        CircularDomain {
            kind: DomainKind::Disk,
            holes: vec![],
        }
    }

    pub fn annulus(rho: f64) -> Result<Self> {
        build_domain(&DomainDescriptor::Annulus { rho })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn holes(&self) -> &[Circle] {
        &self.holes
    }

    pub fn n_holes(&self) -> usize {
        match self.kind {
            DomainKind::ExteriorDisk => 0,
            _ => self.holes.len(),
        }
    }

    /// Boundary circles in component order.
    pub fn boundary(&self) -> Vec<Circle> {
        match self.kind {
            DomainKind::ExteriorDisk => self.holes.clone(),
            _ => {
                let mut v = vec![Circle::unit()];
                v.extend(self.holes.iter().copied());
                v
            }
        }
    }

    pub fn n_components(&self) -> usize {
        self.boundary().len()
    }

    /// All holes centred at the origin, so every extension kink is a circle |z| = const.
    pub fn is_concentric(&self) -> bool {
        self.kind != DomainKind::ExteriorDisk && self.holes.iter().all(|h| h.center.norm() < 1e-14)
    }

    /// Minimal gap between distinct boundary components (infinite for one component).
    pub fn min_gap(&self) -> f64 {
        if self.kind == DomainKind::ExteriorDisk {
            return f64::INFINITY;
        }
        let mut g = f64::INFINITY;
        for (i, h) in self.holes.iter().enumerate() {
            g = g.min(1.0 - h.center.norm() - h.radius);
            for k in self.holes.iter().skip(i + 1) {
                g = g.min((h.center - k.center).norm() - h.radius - k.radius);
            }
        }
        g
    }

    /// Gap between hole j (1-based component) and its nearest other component.
    pub fn hole_gap(&self, j: usize) -> f64 {
        let h = self.holes[j - 1];
        let mut g = 1.0 - h.center.norm() - h.radius;
        for (i, k) in self.holes.iter().enumerate() {
            if i + 1 != j {
                g = g.min((h.center - k.center).norm() - h.radius - k.radius);
            }
        }
        g
    }

    /// Collar scale: 1/2 for the disk, else half the minimal gap.
    pub fn delta(&self) -> f64 {
        match self.kind {
            DomainKind::Disk => 0.5,
            DomainKind::ExteriorDisk => 0.5 * self.holes[0].radius,
            _ => 0.5 * self.min_gap(),
        }
    }

    /// Signed distance to the boundary, positive inside.
    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        match self.kind {
            DomainKind::ExteriorDisk => (z - self.holes[0].center).norm() - self.holes[0].radius,
            _ => {
                let mut d = 1.0 - z.norm();
                for h in &self.holes {
                    d = d.min((z - h.center).norm() - h.radius);
                }
                d
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.distance_to_boundary(z) > 0.0
    }

    /// Total boundary length.
    pub fn boundary_length(&self) -> f64 {
        self.boundary()
            .iter()
            .map(|c| 2.0 * std::f64::consts::PI * c.radius)
            .sum()
    }

    pub fn collars(&self, levels: &[f64]) -> Result<CollarFamily> {
        if levels.is_empty() {
            return Err(HardyError::BadData("empty collar family".into()));
        }
        for &e in levels {
            if !(e > 0.0 && e <= 1.0) {
                return Err(HardyError::EpsilonTooLarge(e));
            }
        }
        if levels.windows(2).any(|w| w[1] >= w[0]) {
            return Err(HardyError::BadData(
                "collar levels must decrease strictly".into(),
            ));
        }
        let delta = self.delta();
        let exterior = self.kind == DomainKind::ExteriorDisk;
        let circles = levels
            .iter()
            .map(|&e| {
                self.boundary()
                    .iter()
                    .enumerate()
                    .map(|(c, circ)| {
                        let inward_shrinks = c == 0 && !exterior;
                        let r = if inward_shrinks {
                            circ.radius - e * delta
                        } else {
                            circ.radius + e * delta
                        };
                        Circle::new(circ.center, r)
                    })
                    .collect()
            })
            .collect();
        Ok(CollarFamily {
            levels: levels.to_vec(),
            delta,
            circles,
        })
    }
}

/// Nested collar circles at distance `eps * delta` from each boundary component.
#[derive(Debug, Clone, PartialEq)]
pub struct CollarFamily {
    pub levels: Vec<f64>,
    pub delta: f64,
    /// `circles[level][component]`
    pub circles: Vec<Vec<Circle>>,
}

impl CollarFamily {
    pub fn finest(&self) -> &[Circle] {
        self.circles.last().unwrap()
    }
}
