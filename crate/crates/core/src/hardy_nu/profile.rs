//! Real coefficient fields `nu`, given by formula, table or closure.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HardyError, Result};

pub type NuFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

/// A coefficient field `nu(z)`, real and bounded by some `kappa < 1` on the domain.
#[derive(Clone)]
pub enum NuProfile {
    Const(f64),
    /// `a x`
    XLinear(f64),
    /// `a (1 - |z|^2) x`
    XDamped(f64),
    /// `amp exp(-|z - center|^2 / width^2)`
    Bump {
        amp: f64,
        center: Complex64,
        width: f64,
    },
    /// `sum_k c_k |z|^(2k)`
    Radial(Vec<f64>),
    /// conductivity `sigma = sum_k c_k |z|^(2k)`, converted to `nu`
    SigmaRadial(Vec<f64>),
    /// `amp 2 Re(z e^{-i phase}) / (1 + |z|^2)`, smooth on the whole sphere
    Dipole {
        amp: f64,
        phase: f64,
    },
    /// `kappa tanh(p(x, y))` for a random cubic p fixed by a seed
    TanhPoly {
        kappa: f64,
        seed: u64,
        terms: Vec<(u32, u32, f64)>,
    },
    Table(Arc<TabulatedNu>),
    Scaled(f64, Arc<NuProfile>),
    Custom(NuFn),
}

impl std::fmt::Debug for NuProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NuProfile::Custom(_) => write!(f, "Custom(..)"),
            NuProfile::Table(_) => write!(f, "Table(..)"),
            NuProfile::TanhPoly { kappa, seed, .. } => write!(f, "TanhPoly({kappa}, {seed})"),
            NuProfile::Scaled(s, p) => write!(f, "Scaled({s}, {p:?})"),
            other => write!(f, "{}", other.describe()),
        }
    }
}

fn poly_r2(c: &[f64], r2: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * r2 + ck)
}

impl NuProfile {
    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            NuProfile::Const(c) => *c,
            NuProfile::XLinear(a) => a * z.re,
            NuProfile::XDamped(a) => a * (1.0 - z.norm_sqr()) * z.re,
            NuProfile::Bump { amp, center, width } => {
                amp * (-(z - center).norm_sqr() / (width * width)).exp()
            }
            NuProfile::Radial(c) => poly_r2(c, z.norm_sqr()),
            NuProfile::SigmaRadial(c) => {
                let s = poly_r2(c, z.norm_sqr());
                (1.0 - s) / (1.0 + s)
            }
            NuProfile::Dipole { amp, phase } => {
                amp * 2.0 * (z * Complex64::from_polar(1.0, -phase)).re / (1.0 + z.norm_sqr())
            }
            NuProfile::TanhPoly { kappa, terms, .. } => {
                let p: f64 = terms
                    .iter()
                    .map(|&(a, b, c)| c * z.re.powi(a as i32) * z.im.powi(b as i32))
                    .sum();
                kappa * p.tanh()
            }
            NuProfile::Table(t) => t.eval(z),
            NuProfile::Scaled(s, p) => s * p.eval(z),
            NuProfile::Custom(f) => f(z),
        }
    }

    pub fn as_fn(&self) -> NuFn {
        let p = self.clone();
        Arc::new(move |z| p.eval(z))
    }

    pub fn negated(&self) -> NuProfile {
        match self {
            NuProfile::Const(c) => NuProfile::Const(-c),
            NuProfile::Scaled(s, p) => NuProfile::Scaled(-s, p.clone()),
            other => NuProfile::Scaled(-1.0, Arc::new(other.clone())),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NuProfile::Const(c) if *c == 0.0)
    }

    /// Random smooth field `kappa tanh(p)` with a cubic `p`.
    pub fn random_smooth(kappa: f64, seed: u64) -> NuProfile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=(3 - a) {
                let scale = if a + b == 0 {
                    0.3
                } else {
                    0.9 / (a + b) as f64
                };
                terms.push((a, b, rng.gen_range(-scale..scale)));
            }
        }
        NuProfile::TanhPoly { kappa, seed, terms }
    }

    /// Parses the builtin names accepted by the command line.
    pub fn parse(spec: &str) -> Result<NuProfile> {
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| HardyError::BadData(format!("bad number in {spec}")))
                })
                .collect()
        };
        let need = |v: &Vec<f64>, n: usize| -> Result<()> {
            if v.len() != n {
                return Err(HardyError::BadData(format!(
                    "{spec}: expected {n} parameters"
                )));
            }
            Ok(())
        };
        let v = nums()?;
        match name.trim() {
            "const" => {
                need(&v, 1)?;
                Ok(NuProfile::Const(v[0]))
            }
            "sigma" => {
                need(&v, 1)?;
                if !(v[0] > 0.0) {
                    return Err(HardyError::BadData("conductivity must be positive".into()));
                }
                Ok(NuProfile::Const((1.0 - v[0]) / (1.0 + v[0])))
            }
            "xlinear" => {
                need(&v, 1)?;
                Ok(NuProfile::XLinear(v[0]))
            }
            "xdamped" => {
                need(&v, 1)?;
                Ok(NuProfile::XDamped(v[0]))
            }
            "bump" => {
                need(&v, 4)?;
                Ok(NuProfile::Bump {
                    amp: v[0],
                    center: Complex64::new(v[1], v[2]),
                    width: v[3],
                })
            }
            "radial" if !v.is_empty() => Ok(NuProfile::Radial(v)),
            "sigma-radial" if !v.is_empty() => Ok(NuProfile::SigmaRadial(v)),
            "dipole" => {
                need(&v, 2)?;
                Ok(NuProfile::Dipole {
                    amp: v[0],
                    phase: v[1],
                })
            }
            "random" => {
                need(&v, 2)?;
                Ok(NuProfile::random_smooth(v[0], v[1] as u64))
            }
            _ => Err(HardyError::BadData(format!("unknown field {spec}"))),
        }
    }

    pub fn describe(&self) -> String {
        let join = |c: &[f64]| {
            c.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            NuProfile::Const(c) => format!("const:{c}"),
            NuProfile::XLinear(a) => format!("xlinear:{a}"),
            NuProfile::XDamped(a) => format!("xdamped:{a}"),
            NuProfile::Bump { amp, center, width } => {
                format!("bump:{amp},{},{},{width}", center.re, center.im)
            }
            NuProfile::Radial(c) => format!("radial:{}", join(c)),
            NuProfile::SigmaRadial(c) => format!("sigma-radial:{}", join(c)),
            NuProfile::Dipole { amp, phase } => format!("dipole:{amp},{phase}"),
            NuProfile::TanhPoly { kappa, seed, .. } => format!("random:{kappa},{seed}"),
            NuProfile::Table(_) => "table".into(),
            NuProfile::Scaled(s, p) => format!("{s}*({})", p.describe()),
            NuProfile::Custom(_) => "custom".into(),
        }
    }

    /// Largest |nu| over a sampling of the given circles and the annular region between.
    pub fn sup_on(&self, pts: &[Complex64]) -> f64 {
        pts.iter().map(|z| self.eval(*z).abs()).fold(0.0, f64::max)
    }
}

/// Samples on a polar tensor table: radii ascending, uniform angles.
/// Piecewise linear in radius, linear and periodic in angle.
#[derive(Debug, Clone)]
pub struct TabulatedNu {
    radii: Vec<f64>,
    n_theta: usize,
    values: Vec<f64>,
}

impl TabulatedNu {
    pub fn new(radii: Vec<f64>, n_theta: usize, values: Vec<f64>) -> Result<Self> {
        if radii.len() < 2 || n_theta < 2 || values.len() != radii.len() * n_theta {
            return Err(HardyError::BadData("table shape mismatch".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HardyError::BadData("table radii must increase".into()));
        }
        Ok(TabulatedNu {
            radii,
            n_theta,
            values,
        })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let r = z.norm().clamp(self.radii[0], *self.radii.last().unwrap());
        let i = match self.radii.iter().position(|&x| x >= r) {
            Some(0) => 1,
            Some(i) => i,
            None => self.radii.len() - 1,
        };
        let (r0, r1) = (self.radii[i - 1], self.radii[i]);
        let s = (r - r0) / (r1 - r0);
        let th = z.arg().rem_euclid(2.0 * PI) / (2.0 * PI) * self.n_theta as f64;
        let k0 = (th.floor() as usize) % self.n_theta;
        let k1 = (k0 + 1) % self.n_theta;
        let t = th - th.floor();
        let at = |ii: usize, k: usize| self.values[ii * self.n_theta + k];
        let v0 = at(i - 1, k0) * (1.0 - t) + at(i - 1, k1) * t;
        let v1 = at(i, k0) * (1.0 - t) + at(i, k1) * t;
        v0 * (1.0 - s) + v1 * s
    }
}
