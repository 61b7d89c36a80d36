//! Solutions of the conjugate Beltrami equation assembled from component pieces.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::component::ComponentSolver;
use crate::areaops::{dbar, dz, AreaField};
use crate::domain::{Circle, CircularDomain};
use crate::hardy_nu::{bn_inverse, GSolution};

/// `log(z - a) + beta conj(log(z - a))`, a multivalued solution around a hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSeed {
    pub center: Complex64,
    pub beta: f64,
    pub coef: f64,
}

impl LogSeed {
    pub fn value(&self, z: Complex64) -> Complex64 {
        let d = z - self.center;
        self.coef
            * Complex64::new(
                (1.0 + self.beta) * d.norm().ln(),
                (1.0 - self.beta) * d.arg(),
            )
    }
    /// Single-valued real part only.
    pub fn real(&self, z: Complex64) -> f64 {
        self.coef * (1.0 + self.beta) * (z - self.center).norm().ln()
    }
    pub fn derivs(&self, z: Complex64) -> (Complex64, Complex64) {
        let d = z - self.center;
        (self.coef / d, self.coef * self.beta / d.conj())
    }
    /// Jump of the imaginary part around the hole.
    pub fn period(&self) -> f64 {
        2.0 * PI * (1.0 - self.beta) * self.coef
    }
}

#[derive(Debug)]
pub(crate) struct Piece {
    pub comp: Arc<ComponentSolver>,
    pub sol: GSolution,
    local: OnceLock<[AreaField; 3]>,
}

impl Clone for Piece {
    fn clone(&self) -> Self {
        Piece::new(self.comp.clone(), self.sol.clone())
    }
}

impl Piece {
    pub fn new(comp: Arc<ComponentSolver>, sol: GSolution) -> Self {
        Piece {
            comp,
            sol,
            local: OnceLock::new(),
        }
    }

    /// Local F, dF, dbar F on the component grid.
    fn local(&self) -> &[AreaField; 3] {
        self.local.get_or_init(|| {
            let f = bn_inverse(&self.sol.w, self.comp.nu()).expect("same grid");
            let a = dz(&f);
            let b = dbar(&f);
            [f, a, b]
        })
    }
}

/// A solution `f` of the conjugate Beltrami equation on a circular domain.
#[derive(Debug, Clone)]
pub struct HardyField {
    pub(crate) domain: CircularDomain,
    pub(crate) pieces: Vec<Piece>,
    pub(crate) seeds: Vec<LogSeed>,
}

pub type BeltramiFunction = HardyField;

impl HardyField {
    pub(crate) fn new(domain: CircularDomain, pieces: Vec<Piece>, seeds: Vec<LogSeed>) -> Self {
        HardyField {
            domain,
            pieces,
            seeds,
        }
    }

    pub fn domain(&self) -> &CircularDomain {
        &self.domain
    }

    pub fn seeds(&self) -> &[LogSeed] {
        &self.seeds
    }

    /// Periods of Im f around each hole.
    pub fn seed_periods(&self) -> Vec<f64> {
        self.seeds.iter().map(|s| s.period()).collect()
    }

    /// Copy with the multivalued log terms removed.
    pub fn without_seeds(&self) -> HardyField {
        let mut out = self.clone();
        out.seeds.clear();
        out
    }

    /// Values on a circle at `n_theta` equispaced angles; a component's own
    /// circle and other centred circles use exact values.
    pub fn on_circle(&self, c: &Circle) -> Vec<Complex64> {
        let mut acc: Option<Vec<Complex64>> = None;
        for p in &self.pieces {
            let v = p.comp.values_on(&p.sol, c);
            match &mut acc {
                None => acc = Some(v),
                Some(a) => a.iter_mut().zip(v).for_each(|(x, y)| *x += y),
            }
        }
        let mut acc = acc.unwrap_or_default();
        if !self.seeds.is_empty() {
            let pts = c.points(acc.len());
            for (a, z) in acc.iter_mut().zip(pts) {
                *a += self.seeds.iter().map(|s| s.value(z)).sum::<Complex64>();
            }
        }
        acc
    }

    /// Boundary trace, one entry per boundary component.
    pub fn trace(&self) -> Vec<Vec<Complex64>> {
        self.domain
            .boundary()
            .iter()
            .map(|c| self.on_circle(c))
            .collect()
    }

    pub fn n_theta(&self) -> usize {
        self.pieces[0].comp.n_theta()
    }

    /// Values at interior points (principal branch of the log seeds).
    pub fn eval(&self, pts: &[Complex64]) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = pts
            .iter()
            .map(|&z| self.seeds.iter().map(|s| s.value(z)).sum())
            .collect();
        for p in &self.pieces {
            let local: Vec<Complex64> = pts.iter().map(|&z| p.comp.to_local(z)).collect();
            let w = p.sol.w.grid.interpolator(&local).apply(&p.sol.w.data);
            for ((o, wv), z) in out.iter_mut().zip(w).zip(&local) {
                *o += p.comp.local_value(wv, *z);
            }
        }
        out
    }

    /// `(d f, dbar f)` at interior points.
    pub fn eval_derivs(&self, pts: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut d: Vec<Complex64> = Vec::with_capacity(pts.len());
        let mut db: Vec<Complex64> = Vec::with_capacity(pts.len());
        for &z in pts {
            let (a, b) = self.seeds.iter().fold(
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                |acc, s| {
                    let (x, y) = s.derivs(z);
                    (acc.0 + x, acc.1 + y)
                },
            );
            d.push(a);
            db.push(b);
        }
        for p in &self.pieces {
            let local: Vec<Complex64> = pts.iter().map(|&z| p.comp.to_local(z)).collect();
            let [_, fz, fzb] = p.local();
            let ip = fz.grid.interpolator(&local);
            let a = ip.apply(&fz.data);
            let b = ip.apply(&fzb.data);
            for (i, &z) in pts.iter().enumerate() {
                match p.comp.placement {
                    None => {
                        d[i] += a[i];
                        db[i] += b[i];
                    }
                    Some(c) => {
                        let e = z - c.center;
                        d[i] += a[i].conj() * (-c.radius / (e * e));
                        db[i] += b[i].conj() * (-c.radius / (e * e).conj());
                    }
                }
            }
        }
        (d, db)
    }

    /// Relative CB residual of the whole field on each component grid. The
    /// log seeds are added analytically on the grid of component 0.
    pub fn piece_residuals(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| {
                let [_, fz, fzb] = p.local();
                let nu = &p.comp.nu().values;
                let pts = fz.grid.points();
                let (mut num, mut den) = (0.0, 0.0);
                for (i, z) in pts.iter().enumerate() {
                    let mut r = fzb.data[i] - nu[i] * fz.data[i].conj();
                    let (mut a, mut b) = (fz.data[i], fzb.data[i]);
                    if p.comp.placement.is_none() {
                        for s in &self.seeds {
                            let (sa, sb) = s.derivs(*z);
                            r += sb - nu[i] * sa.conj();
                            a += sa;
                            b += sb;
                        }
                    }
                    let w = fz.grid.area_weight(i / fz.grid.n_theta());
                    num += w * r.norm_sqr();
                    den += w * (a.norm() + b.norm()).powi(2);
                }
                (num / den.max(1e-300)).sqrt()
            })
            .collect()
    }

    /// The piece for component i, as a stand-alone field.
    pub fn piece(&self, i: usize) -> Option<HardyField> {
        self.pieces
            .iter()
            .find(|p| p.comp.index == i)
            .map(|p| HardyField::new(self.domain.clone(), vec![p.clone()], vec![]))
    }

    /// Local F values on the component grid of piece i.
    pub fn local_values(&self, i: usize) -> Option<AreaField> {
        self.pieces
            .iter()
            .find(|p| p.comp.index == i)
            .map(|p| p.local()[0].clone())
    }

    /// Adds a real constant.
    pub fn add_constant(&mut self, c: Complex64) {
        let p = &mut self.pieces[0];
        let nu = p.comp.nu().clone();
        // w of a constant a is sqrt(1-nu^2)^{-1} (a - nu conj a); keep exact circle values in step.
        let grid = p.sol.w.grid.clone();
        for (v, &n) in p.sol.w.data.iter_mut().zip(&nu.values) {
            *v +=
                crate::hardy_nu::bn_forward_at(if p.comp.is_reflected() { c.conj() } else { c }, n);
        }
        for (r, vals) in p.sol.circles.iter_mut() {
            for (v, &t) in vals.iter_mut().zip(grid.angles()) {
                let n = nu.at(Complex64::from_polar(*r, t));
                *v += crate::hardy_nu::bn_forward_at(
                    if p.comp.is_reflected() { c.conj() } else { c },
                    n,
                );
            }
        }
        p.local = OnceLock::new();
    }
}

impl HardyField {
    /// Circle values without the multivalued imaginary part of the seeds.
    pub fn on_circle_single_valued(&self, c: &Circle) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.n_theta()];
        for p in &self.pieces {
            let v = p.comp.values_on(&p.sol, c);
            acc.iter_mut().zip(v).for_each(|(x, y)| *x += y);
        }
        if !self.seeds.is_empty() {
            let pts = c.points(acc.len());
            for (a, z) in acc.iter_mut().zip(pts) {
                *a += self.seeds.iter().map(|s| s.real(z)).sum::<f64>();
            }
        }
        acc
    }

    /// `d/dtheta` of the multivalued part of Im f along a circle, at the grid angles.
    pub fn seed_arg_rate(&self, c: &Circle) -> Vec<f64> {
        let n = self.n_theta();
        c.points(n)
            .iter()
            .map(|&z| {
                self.seeds
                    .iter()
                    .map(|s| s.coef * (1.0 - s.beta) * ((z - c.center) / (z - s.center)).re)
                    .sum()
            })
            .collect()
    }
}
