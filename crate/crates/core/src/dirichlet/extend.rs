//! Extensions of `nu` from the domain to the filled disk and across each hole.

use num_complex::Complex64;

use crate::domain::{Circle, CircularDomain, DomainKind};
use crate::error::{HardyError, Result};
use crate::hardy_nu::NuProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExtensionVariant {
    /// Reflect across each hole circle, blend to the circle mean, clip.
    #[default]
    Reflect,
    /// Evaluate the profile formula itself, clipped; meant for fields smooth on the sphere.
    Global,
}

/// `nu` on the domain together with the extensions used by every component problem.
#[derive(Debug, Clone)]
pub struct NuExtension {
    domain: CircularDomain,
    profile: NuProfile,
    variant: ExtensionVariant,
    kappa: f64,
    clip: f64,
    hole_means: Vec<f64>,
    blend: Vec<f64>,
}

/// Points covering a domain, used to bound |nu| on it.
pub fn sample_domain(domain: &CircularDomain, n: usize) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for c in domain.boundary() {
        pts.extend(c.points(n));
    }
    match domain.kind() {
        DomainKind::ExteriorDisk => {
            let h = domain.holes()[0];
            for s in 1..=12 {
                let r = h.radius * (1.0 + 0.25 * s as f64 * s as f64);
                pts.extend(Circle::new(h.center, r).points(n));
            }
        }
        _ => {
            for i in 1..40 {
                for k in 0..n {
                    let z = Complex64::from_polar(
                        i as f64 / 40.0,
                        2.0 * std::f64::consts::PI * k as f64 / n as f64,
                    );
                    if domain.contains(z) {
                        pts.push(z);
                    }
                }
            }
        }
    }
    pts
}

impl NuExtension {
    pub fn new(
        domain: &CircularDomain,
        profile: &NuProfile,
        kappa: f64,
        variant: ExtensionVariant,
    ) -> Result<Self> {
        if !(kappa >= 0.0 && kappa < 1.0) {
            return Err(HardyError::KappaViolated {
                found: kappa,
                kappa: 1.0,
            });
        }
        let sup = profile.sup_on(&sample_domain(domain, 128));
        if sup > kappa + 1e-12 {
            return Err(HardyError::KappaViolated { found: sup, kappa });
        }
        let clip = (kappa - (1.0 - kappa) / 10.0).max(sup);
        let n = domain.n_holes();
        let hole_means = (1..=n)
            .map(|j| {
                let pts = domain.holes()[j - 1].points(256);
                pts.iter().map(|&z| profile.eval(z)).sum::<f64>() / pts.len() as f64
            })
            .collect();
        let blend = (1..=n)
            .map(|j| 0.5 * domain.holes()[j - 1].radius.min(domain.hole_gap(j)))
            .collect();
        Ok(NuExtension {
            domain: domain.clone(),
            profile: profile.clone(),
            variant,
            kappa,
            clip,
            hole_means,
            blend,
        })
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }
    pub fn profile(&self) -> &NuProfile {
        &self.profile
    }
    pub fn variant(&self) -> ExtensionVariant {
        self.variant
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The extension of `-nu`, built the same way.
    pub fn negated(&self) -> NuExtension {
        NuExtension {
            domain: self.domain.clone(),
            profile: self.profile.negated(),
            variant: self.variant,
            kappa: self.kappa,
            clip: self.clip,
            hole_means: self.hole_means.iter().map(|v| -v).collect(),
            blend: self.blend.clone(),
        }
    }

    fn clipped(&self, v: f64) -> f64 {
        v.clamp(-self.clip, self.clip)
    }

    /// `nu` on the domain itself.
    pub fn nu(&self, z: Complex64) -> f64 {
        self.profile.eval(z)
    }

    /// `nu` on the unit disk with every hole filled.
    pub fn filled(&self, z: Complex64) -> f64 {
        for (j, h) in self.domain.holes().iter().enumerate() {
            let d = z - h.center;
            let dist = d.norm();
            if dist < h.radius {
                return match self.variant {
                    ExtensionVariant::Global => self.clipped(self.profile.eval(z)),
                    ExtensionVariant::Reflect => {
                        let t = (h.radius - dist) / self.blend[j];
                        let c = self.hole_means[j];
                        if t >= 1.0 {
                            c
                        } else {
                            let refl = self.profile.eval(h.center + h.radius * h.radius / d.conj());
                            self.clipped((1.0 - t) * refl + t * c)
                        }
                    }
                };
            }
        }
        self.profile.eval(z)
    }

    /// Value of the filled field at the centre of hole j (1-based).
    pub fn hole_value(&self, j: usize) -> f64 {
        self.filled(self.domain.holes()[j - 1].center)
    }

    /// `nu_j`: for component 0 the filled disk field; for hole j the field on
    /// the complement of that hole, continued past the unit circle.
    pub fn component(&self, j: usize, z: Complex64) -> f64 {
        if self.domain.kind() == DomainKind::ExteriorDisk {
            return self.profile.eval(z);
        }
        if z.norm() <= 1.0 || j == 0 {
            return self.filled(z);
        }
        match self.variant {
            ExtensionVariant::Reflect => self.filled(1.0 / z.conj()),
            ExtensionVariant::Global => self.clipped(self.profile.eval(z)),
        }
    }

    /// Component field in its local disk coordinate.
    pub fn local(&self, j: usize, zeta: Complex64) -> f64 {
        match self.placement(j) {
            None => self.component(j, zeta),
            Some(c) => {
                let zeta = if zeta.norm() < 1e-12 {
                    Complex64::new(1e-12, 0.0)
                } else {
                    zeta
                };
                self.component(j, c.center + c.radius / zeta.conj())
            }
        }
    }

    /// Circle reflected onto the unit disk for component j, if it is an exterior problem.
    pub fn placement(&self, j: usize) -> Option<Circle> {
        match self.domain.kind() {
            DomainKind::ExteriorDisk => Some(self.domain.holes()[0]),
            _ if j == 0 => None,
            _ => Some(self.domain.holes()[j - 1]),
        }
    }

    /// Radii (local coordinate) where the component field may have kinks.
    pub fn breaks(&self, j: usize) -> Vec<f64> {
        if !self.domain.is_concentric() || self.domain.n_holes() == 0 {
            return vec![];
        }
        let rho = self.domain.holes()[0].radius;
        let w = self.blend[0];
        match (self.variant, j) {
            (ExtensionVariant::Reflect, 0) => vec![rho - w, rho],
            (ExtensionVariant::Reflect, _) => vec![rho * (rho - w), rho * rho, rho],
            (ExtensionVariant::Global, 0) => vec![rho],
            (ExtensionVariant::Global, _) => vec![rho],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_extends_to_constant() {
        let d = CircularDomain::annulus(0.5).unwrap();
        let e =
            NuExtension::new(&d, &NuProfile::Const(0.3), 0.3, ExtensionVariant::Reflect).unwrap();
        for z in [
            Complex64::new(0.1, 0.2),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.5, -2.0),
        ] {
            assert!((e.component(0, z) - 0.3).abs() < 1e-14);
            assert!((e.component(1, z) - 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_field_reflects_radially() {
        let rho = 0.5;
        let d = CircularDomain::annulus(rho).unwrap();
        let p = NuProfile::Radial(vec![0.1, 0.2]);
        let e = NuExtension::new(&d, &p, 0.5, ExtensionVariant::Reflect).unwrap();
        let r = 0.45;
        let t = (rho - r) / 0.25;
        let refl = 0.1 + 0.2 * (rho * rho / r).powi(2);
        let mean = 0.1 + 0.2 * rho * rho;
        for th in [0.0, 1.0, 2.5] {
            let v = e.filled(Complex64::from_polar(r, th));
            assert!((v - ((1.0 - t) * refl + t * mean)).abs() < 1e-14);
        }
        assert!((e.filled(Complex64::new(0.1, 0.0)) - mean).abs() < 1e-14);
    }

    #[test]
    fn extensions_keep_the_bound_and_agree_on_the_domain() {
        let d = CircularDomain::annulus(0.4).unwrap();
        let p = NuProfile::random_smooth(0.5, 3);
        let e = NuExtension::new(&d, &p, 0.5, ExtensionVariant::Reflect).unwrap();
        for k in 0..400 {
            let z = Complex64::from_polar(0.01 + 0.006 * k as f64, 0.37 * k as f64);
            assert!(e.component(0, z).abs() <= 0.5);
            assert!(e.component(1, z).abs() <= 0.5);
            if d.contains(z) {
                assert_eq!(e.component(0, z), p.eval(z));
                assert_eq!(e.component(1, z), p.eval(z));
            }
        }
    }

    #[test]
    fn extension_is_continuous_across_hole_circle() {
        let d = CircularDomain::annulus(0.5).unwrap();
        let p = NuProfile::Bump {
            amp: 0.4,
            center: Complex64::new(0.5, 0.1),
            width: 0.3,
        };
        let e = NuExtension::new(&d, &p, 0.4, ExtensionVariant::Reflect).unwrap();
        for th in [0.0, 0.3, 2.0] {
            let a = e.filled(Complex64::from_polar(0.5 - 1e-9, th));
            let b = e.filled(Complex64::from_polar(0.5 + 1e-9, th));
            assert!((a - b).abs() < 1e-7);
            let a = e.component(1, Complex64::from_polar(1.0 - 1e-9, th));
            let b = e.component(1, Complex64::from_polar(1.0 + 1e-9, th));
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn kappa_violation_is_reported() {
        let d = CircularDomain::disk();
        assert!(matches!(
            NuExtension::new(&d, &NuProfile::XLinear(0.8), 0.5, ExtensionVariant::Reflect),
            Err(HardyError::KappaViolated { .. })
        ));
    }
}
