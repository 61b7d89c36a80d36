//! The cross-check suite: each check reproduces one acceptance criterion and
//! reports named metrics against limits. Failures inside a check (errors or
//! panics) become report entries instead of aborting the suite.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::areaops::{
    apply_t_adjoint, apply_t_alpha, cauchy_area, dbar, pairing, AreaField, TAlpha,
};
use crate::bep::{build_trace_basis, in_arcs, solve_bep, BepProblem, TraceBasis};
use crate::circfft::{cauchy_boundary, fourier, synthesize, BoundaryTrace};
use crate::dirichlet::{
    compatible_part, solve_dirichlet_multi, split_annulus, ConductivitySolution, HardyField,
    MultiDirichlet, Resolution,
};
use crate::domain::{CircularDomain, GridSpec, PolarGrid};
use crate::error::{HardyError, Result};
use crate::hardy_nu::{
    alpha_from_nu, alpha_with_sign, bn_inverse, cb_residual, factorize, g_residual,
    max_principle_gap, GSolver, GSource, NuField, NuProfile,
};
use crate::krylov::GmresOptions;
use crate::neumann::NeumannSolver;
use crate::oracle::{fd_dirichlet, singular_quadrature_cauchy};

#[derive(Debug, Clone, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// The metric passes when `value >= limit` rather than `value <= limit`.
    pub at_least: bool,
}

impl Metric {
    pub fn passed(&self) -> bool {
        if self.at_least {
            self.value >= self.limit
        } else {
            self.value <= self.limit
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub metrics: Vec<Metric>,
    pub error: Option<String>,
    pub seconds: f64,
    pub passed: bool,
}

/// Knobs of the suite. `coarsen` divides every resolution (1 = as specified).
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub coarsen: usize,
    pub seed: u64,
    /// Sign applied to the coefficient `alpha` fed to the G-solver; -1 is a mutation hook.
    pub alpha_sign: f64,
    pub scaling_threads: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            coarsen: 1,
            seed: 2024,
            alpha_sign: 1.0,
            scaling_threads: 8,
        }
    }
}

impl Settings {
    fn nr(&self, n: usize) -> usize {
        (n / self.coarsen).max(4)
    }
    fn nt(&self, n: usize) -> usize {
        (n / self.coarsen).max(8).next_power_of_two()
    }
    fn res(&self, n_r: usize, n_theta: usize) -> Resolution {
        Resolution::new(self.nr(n_r), self.nt(n_theta))
    }
}

pub const CHECK_NAMES: [&str; 14] = [
    "laplace reduction",
    "cauchy identity",
    "adjoint identity",
    "factorization",
    "g-solver",
    "period homotopy invariance",
    "conjugation involution",
    "compatibility obstruction",
    "finite-difference equivalence",
    "dirichlet-neumann roundtrip",
    "annulus decomposition",
    "bounded extremal problem",
    "maximum principle",
    "performance envelope",
];

/// Solutions collected along the way for the maximum-principle check.
#[derive(Default)]
pub struct Collected {
    fields: Mutex<Vec<(String, CircularDomain, Arc<HardyField>)>>,
}

impl Collected {
    fn push(&self, name: &str, domain: &CircularDomain, f: HardyField) {
        self.fields
            .lock()
            .unwrap()
            .push((name.to_string(), domain.clone(), Arc::new(f)));
    }
}

struct Out(Vec<Metric>);

impl Out {
    fn le(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Metric {
            name: name.into(),
            value: nan_to_inf(value),
            limit,
            at_least: false,
        });
    }
    fn ge(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Metric {
            name: name.into(),
            value: if value.is_nan() {
                f64::NEG_INFINITY
            } else {
                value
            },
            limit,
            at_least: true,
        });
    }
}

fn nan_to_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn run_check(id: u32, s: &Settings, col: &Collected) -> Check {
    let t0 = Instant::now();
    let mut out = Out(Vec::new());
    let res = catch_unwind(AssertUnwindSafe(|| -> Result<()> {
        match id {
            1 => laplace(s, col, &mut out),
            2 => cauchy_identity(s, &mut out),
            3 => adjoint(s, &mut out),
            4 => factorization(s, &mut out),
            5 => g_solver(s, &mut out),
            6 => periods(s, &mut out),
            7 => involution(s, col, &mut out),
            8 => obstruction(s, &mut out),
            9 => fd_equivalence(s, &mut out),
            10 => roundtrip(s, &mut out),
            11 => decomposition(s, col, &mut out),
            12 => extremal(s, col, &mut out),
            13 => max_principle(s, col, &mut out),
            14 => performance(s, &mut out),
            _ => Err(HardyError::BadData(format!("no check {id}"))),
        }
    }));
    let error = match res {
        Ok(Ok(())) => None,
        Ok(Err(e)) => Some(e.to_string()),
        Err(p) => Some(
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()),
        ),
    };
    let passed = error.is_none() && !out.0.is_empty() && out.0.iter().all(Metric::passed);
    Check {
        id,
        name: CHECK_NAMES
            .get(id as usize - 1)
            .copied()
            .unwrap_or("unknown")
            .to_string(),
        metrics: out.0,
        error,
        seconds: t0.elapsed().as_secs_f64(),
        passed,
    }
}

/// Runs every check in order; `on_done` sees each report as it completes.
pub fn run_all(s: &Settings, mut on_done: impl FnMut(&Check)) -> Vec<Check> {
    let col = Collected::default();
    (1..=14)
        .map(|id| {
            let c = run_check(id, s, &col);
            on_done(&c);
            c
        })
        .collect()
}

fn angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den.max(1e-300)).sqrt()
}

/// Polar sample of points at least `margin` inside the domain.
fn interior_points(d: &CircularDomain, n: usize, margin: f64) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 0..n {
        for k in 0..2 * n {
            let z =
                Complex64::from_polar((i as f64 + 0.5) / n as f64, 0.1 + PI * k as f64 / n as f64);
            if d.distance_to_boundary(z) > margin {
                pts.push(z);
            }
        }
    }
    pts
}

fn random_field(g: &Arc<PolarGrid>, rng: &mut ChaCha8Rng, deg: usize) -> AreaField {
    let mut coefs = Vec::new();
    for a in 0..=deg {
        for b in 0..=(deg - a) {
            coefs.push((
                a as u32,
                b as u32,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ));
        }
    }
    AreaField::from_fn(g, |z| {
        coefs
            .iter()
            .map(|&(a, b, k)| k * z.powu(a) * z.conj().powu(b))
            .sum()
    })
}

fn random_trig(rng: &mut ChaCha8Rng, n: usize, kmax: usize) -> Vec<f64> {
    let c: Vec<(f64, f64)> = (0..=kmax)
        .map(|k| {
            let s = 1.0 / (1.0 + k as f64);
            (rng.gen_range(-s..s), rng.gen_range(-s..s))
        })
        .collect();
    angles(n)
        .iter()
        .map(|t| {
            c.iter()
                .enumerate()
                .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                .sum()
        })
        .collect()
}

fn laplace(s: &Settings, col: &Collected, out: &mut Out) -> Result<()> {
    let t0 = Instant::now();
    let d = CircularDomain::disk();
    let res = s.res(64, 128);
    let data = vec![angles(res.n_theta)
        .iter()
        .map(|t| (3.0 * t).cos())
        .collect::<Vec<_>>()];
    let sol = solve_dirichlet_multi(&d, &NuProfile::Const(0.0), 0.5, &data, res)?;
    let pts = interior_points(&d, 40, 0.0);
    let err = sol
        .u_at(&pts)
        .iter()
        .zip(&pts)
        .map(|(u, z)| (u - z.norm().powi(3) * (3.0 * z.arg()).cos()).abs())
        .fold(0.0, f64::max);
    out.le("max interior error", err, 1e-8);
    out.le("runtime seconds", t0.elapsed().as_secs_f64(), 5.0);
    col.push("disk cos 3t", &d, (*sol.parts[0].field).clone());
    Ok(())
}

fn cauchy_identity(s: &Settings, out: &mut Out) -> Result<()> {
    let g = PolarGrid::new(GridSpec::disk(s.nr(32), s.nt(64)))?;
    let one = AreaField::from_fn(&g, |_| Complex64::new(1.0, 0.0));
    let ca = cauchy_area(&one);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let pts: Vec<Complex64> = (0..20)
        .map(|_| Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), 2.0 * PI * rng.gen::<f64>()))
        .collect();
    let grid_vals = ca.eval_at(&pts);
    let (mut e_grid, mut e_quad) = (0.0f64, 0.0f64);
    for (z, v) in pts.iter().zip(&grid_vals) {
        let q = singular_quadrature_cauchy(&|_| Complex64::new(1.0, 0.0), *z, 256, 4);
        e_grid = e_grid.max((v - z.conj()).norm());
        e_quad = e_quad.max((q - z.conj()).norm());
    }
    out.le("grid transform vs conj z", e_grid, 1e-8);
    out.le("direct quadrature vs conj z", e_quad, 1e-8);
    // a non-polynomial density, where the two evaluations are the only references
    let h = |z: Complex64| (0.7 * z).exp() * (1.0 + z.conj() * 0.3);
    let hf = AreaField::from_fn(&g, h);
    let cv = cauchy_area(&hf).eval_at(&pts[..5]);
    let mut e_cross = 0.0f64;
    for (z, v) in pts[..5].iter().zip(&cv) {
        let q = singular_quadrature_cauchy(&h, *z, 256, 6);
        e_cross = e_cross.max((v - q).norm());
    }
    out.le("grid vs quadrature, smooth density", e_cross, 1e-7);
    Ok(())
}

fn adjoint(s: &Settings, out: &mut Out) -> Result<()> {
    let g = PolarGrid::new(GridSpec::disk(s.nr(32), s.nt(64)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed + 1);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let alpha = random_field(&g, &mut rng, 3);
        let h = random_field(&g, &mut rng, 4);
        let k = random_field(&g, &mut rng, 4);
        let lhs = pairing(&apply_t_alpha(&alpha, &h)?, &k)?;
        let rhs = pairing(&apply_t_adjoint(&alpha, &k)?, &h)?;
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    out.le("pairing mismatch", worst, 1e-10);
    Ok(())
}

/// Values of the holomorphic extension of the outermost ring of `f`, on the whole grid.
fn holomorphic_from_ring(f: &AreaField) -> Vec<Complex64> {
    let g = &f.grid;
    let (nr, nt) = (g.n_r(), g.n_theta());
    let rr = g.radii()[nr - 1];
    let c = fourier(&f.data[(nr - 1) * nt..]);
    let mut out = Vec::with_capacity(g.len());
    for &r in g.radii() {
        let q = r / rr;
        let ring: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k < nt / 2 {
                    v * q.powi(k as i32)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        out.extend(synthesize(&ring));
    }
    out
}

fn factorization(s: &Settings, out: &mut Out) -> Result<()> {
    let g = PolarGrid::new(GridSpec::disk(s.nr(32), s.nt(64)))?;
    let (mut rec, mut db, mut sd, mut cb) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..5 {
        let nu = NuField::from_profile(&g, &NuProfile::random_smooth(0.5, s.seed + 10 + k), 0.5)?;
        let solver = GSolver::with_alpha(
            &nu,
            alpha_with_sign(&nu, s.alpha_sign),
            GmresOptions::default(),
        );
        let w = solver
            .solve(
                &GSource::from_fn(&g, &[], |z| 1.0 + 0.3 * z + 0.1 * z * z),
                None,
            )?
            .w;
        let fac = factorize(&w, &alpha_from_nu(&nu))?;
        let fh = holomorphic_from_ring(&fac.f);
        let scale = w.max_abs();
        let r = fac
            .s
            .data
            .iter()
            .zip(&fh)
            .zip(&w.data)
            .map(|((s, f), w)| (s.exp() * f - w).norm())
            .fold(0.0, f64::max);
        rec = rec.max(r / scale);
        db = db.max(dbar(&fac.f).l2_norm() / fac.f.l2_norm());
        for (tr, c) in fac.s_boundary.iter().zip(&fac.im_constants) {
            let dev = (tr.iter().map(|v| (v.im - c).powi(2)).sum::<f64>() / tr.len() as f64).sqrt();
            sd = sd.max(dev);
        }
        cb = cb.max(cb_residual(&bn_inverse(&w, &nu)?, &nu));
    }
    out.le("|e^s F - w| / |w| (F from its boundary values)", rec, 1e-8);
    out.le("|dbar F| / |F|", db, 1e-6);
    out.le("Im s deviation on the boundary", sd, 1e-6);
    out.le("equation residual of the transformed solution", cb, 1e-6);
    Ok(())
}

fn g_solver(s: &Settings, out: &mut Out) -> Result<()> {
    let g = PolarGrid::new(GridSpec::disk(s.nr(32), s.nt(64)))?;
    let nu = NuField::from_profile(&g, &NuProfile::random_smooth(0.5, s.seed + 20), 0.5)?;
    let solver = GSolver::with_alpha(
        &nu,
        alpha_with_sign(&nu, s.alpha_sign),
        GmresOptions::default(),
    );
    let w = solver
        .solve(
            &GSource::from_fn(&g, &[], |z| Complex64::new(0.5, 1.0) + z * z * z),
            None,
        )?
        .w;
    out.le(
        "relative residual",
        g_residual(&w, &alpha_from_nu(&nu)),
        1e-6,
    );
    let tr = TAlpha::new(&alpha_from_nu(&nu)).apply_on_circle(&w.data, 1.0);
    let trace = BoundaryTrace::new(vec![tr])?;
    let d = CircularDomain::disk();
    let mut worst = 0.0f64;
    // stay outside the quadrature guard band of the trapezoidal boundary rule
    let reach = 1.0 - 6.0 * 2.0 * PI / g.n_theta() as f64;
    for k in 0..10 {
        let z = Complex64::from_polar(reach * (0.1 + 0.09 * k as f64), 0.9 * k as f64);
        worst = worst.max(cauchy_boundary(&trace, &d, z)?.norm());
    }
    out.le(
        "boundary Cauchy integral of the transform / |w|",
        worst / w.max_abs(),
        1e-7,
    );
    Ok(())
}

fn periods(s: &Settings, out: &mut Out) -> Result<()> {
    let rho = 0.5;
    let d = CircularDomain::annulus(rho)?;
    let res = s.res(48, 64);
    let n = res.n_theta;
    let th = angles(n);
    let problems: [(&str, NuProfile, f64, Vec<Vec<f64>>); 3] = [
        (
            "log data, unit conductivity",
            NuProfile::Const(0.0),
            0.1,
            vec![vec![0.0; n], vec![1.0; n]],
        ),
        (
            "radial conductivity",
            NuProfile::SigmaRadial(vec![1.0, 0.5]),
            0.25,
            vec![th.iter().map(|t| 1.0 + t.cos()).collect(), vec![0.0; n]],
        ),
        (
            "nonradial field",
            NuProfile::Bump {
                amp: 0.4,
                center: Complex64::new(0.3, 0.5),
                width: 0.5,
            },
            0.4,
            vec![
                th.iter().map(|t| (2.0 * t).sin()).collect(),
                th.iter().map(|t| 0.5 + t.cos()).collect(),
            ],
        ),
    ];
    for (name, nu, kappa, data) in problems {
        let sol = solve_dirichlet_multi(&d, &nu, kappa, &data, res)?;
        let p = sol.compute_periods();
        out.le(
            format!("{name}: spread"),
            p.spread[0],
            1e-6 * p.values[0].abs() + 1e-10,
        );
    }
    Ok(())
}

fn involution(s: &Settings, col: &Collected, out: &mut Out) -> Result<()> {
    let d = CircularDomain::annulus(0.5)?;
    let nu = NuProfile::random_smooth(0.4, s.seed + 30);
    let res = s.res(48, 64);
    let (a, b) = rayon::join(
        || MultiDirichlet::new(&d, &nu, 0.4, res),
        || MultiDirichlet::new(&d, &nu.negated(), 0.4, res),
    );
    let (sa, sb) = (a?, b?);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed + 31);
    let mut worst = 0.0f64;
    for k in 0..5 {
        let raw: Vec<Vec<f64>> = (0..2)
            .map(|_| random_trig(&mut rng, res.n_theta, 5))
            .collect();
        let u = compatible_part(&sa, &raw)?;
        let first = ConductivitySolution::from_field(sa.solve(&u)?, &nu).conjugate()?;
        if k == 0 {
            col.push(
                "annulus compatible",
                &d,
                (*first.parts[0].field).clone().without_seeds(),
            );
        }
        let v = first.v_trace();
        let back = ConductivitySolution::from_field(sb.solve(&v)?, &nu.negated())
            .conjugate()?
            .v_trace();
        let flat = |x: &Vec<Vec<f64>>| x.iter().flatten().copied().collect::<Vec<_>>();
        let neg: Vec<f64> = flat(&u).iter().map(|x| -x).collect();
        worst = worst.max(rel_l2(&flat(&back), &neg));
    }
    out.le("|H(H u) + u| / |u|", worst, 1e-5);
    Ok(())
}

fn obstruction(s: &Settings, out: &mut Out) -> Result<()> {
    let rho: f64 = 0.5;
    let d = CircularDomain::annulus(rho)?;
    let res = s.res(64, 128);
    let n = res.n_theta;
    let sol = solve_dirichlet_multi(
        &d,
        &NuProfile::Const(0.0),
        0.1,
        &[vec![0.0; n], vec![1.0; n]],
        res,
    )?;
    let want = 2.0 * PI / rho.ln();
    match sol.conjugate() {
        Err(HardyError::CompatibilityViolated(p)) => {
            out.le(
                "relative error of the reported period",
                (p[0] - want).abs() / want.abs(),
                1e-6,
            );
            Ok(())
        }
        Err(e) => Err(e),
        Ok(_) => {
            out.le("conjugation must fail", f64::INFINITY, 0.0);
            Ok(())
        }
    }
}

fn fd_equivalence(s: &Settings, out: &mut Out) -> Result<()> {
    let t0 = Instant::now();
    let d = CircularDomain::annulus(0.5)?;
    let nu = NuProfile::random_smooth(0.5, s.seed + 40);
    let res = s.res(64, 128);
    let data_fn = |z: Complex64| (1.3 * z.re).sin() + z.im * z.re;
    let circles = d.boundary();
    let data: Vec<Vec<f64>> = circles
        .iter()
        .map(|c| c.points(res.n_theta).iter().map(|&z| data_fn(z)).collect())
        .collect();
    let sol = solve_dirichlet_multi(&d, &nu, 0.5, &data, res)?;
    let fd = fd_dirichlet(
        &d,
        &|z| crate::hardy_nu::sigma_of(nu.eval(z)),
        &|c, t| data_fn(circles[c].point(t)),
        s.nr(256),
    )?;
    let (mut pts, mut want) = (Vec::new(), Vec::new());
    for i in (0..fd.radii.len()).step_by(2) {
        for j in (0..fd.n_theta).step_by(4) {
            let z = fd.node(i, j);
            if d.distance_to_boundary(z) > 0.05 {
                pts.push(z);
                want.push(fd.values[i * fd.n_theta + j]);
            }
        }
    }
    out.le(
        "relative interior L2 difference",
        rel_l2(&sol.u_at(&pts), &want),
        2e-3,
    );
    out.le("runtime seconds", t0.elapsed().as_secs_f64(), 60.0);
    Ok(())
}

fn roundtrip(s: &Settings, out: &mut Out) -> Result<()> {
    let d = CircularDomain::annulus(0.5)?;
    let nu = NuProfile::Bump {
        amp: 0.4,
        center: Complex64::new(-0.4, 0.5),
        width: 0.5,
    };
    let res = s.res(48, 64);
    let solver = NeumannSolver::new(&d, &nu, 0.4, res)?;
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(res.n_theta)
                .iter()
                .map(|z| (1.5 * z.re).cos() + z.im)
                .collect()
        })
        .collect();
    let u = ConductivitySolution::from_field(solver.dirichlet().solve(&data)?, &nu);
    let phi = u.normal_flux();
    let back = solver.solve(&phi)?;
    let pts = interior_points(&d, 30, 0.02);
    let (a, b) = (u.u_at(&pts), back.u_at(&pts));
    let shift = a.iter().zip(&b).map(|(x, y)| x - y).sum::<f64>() / a.len() as f64;
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let num = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y - shift).powi(2))
        .sum::<f64>()
        .sqrt();
    let den = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>().sqrt();
    out.le("relative L2 difference up to a constant", num / den, 1e-6);
    let phi2 = back.normal_flux();
    let flat = |x: &Vec<Vec<f64>>| x.iter().flatten().copied().collect::<Vec<_>>();
    out.le(
        "flux fidelity",
        rel_l2(&flat(&phi2.density), &flat(&phi.density)),
        1e-6,
    );
    Ok(())
}

fn decomposition(s: &Settings, col: &Collected, out: &mut Out) -> Result<()> {
    let d = CircularDomain::annulus(0.5)?;
    let nu = NuProfile::Bump {
        amp: 0.3,
        center: Complex64::new(0.2, -0.6),
        width: 0.6,
    };
    let res = s.res(96, 64);
    let solver = MultiDirichlet::new(&d, &nu, 0.3, res)?;
    let raw: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(res.n_theta)
                .iter()
                .map(|z| z.re - 0.2 * (2.0 * z.im).cos())
                .collect()
        })
        .collect();
    let u = compatible_part(&solver, &raw)?;
    let f = solver.solve(&u)?.without_seeds();
    let sp = split_annulus(&solver, &f)?;
    out.le("reconstruction on the unit circle", sp.reconstruction, 1e-6);
    out.le(
        "equation residual, disk part",
        sp.inner.piece_residuals()[0],
        1e-5,
    );
    out.le(
        "equation residual, exterior part",
        sp.outer.piece_residuals()[0],
        1e-5,
    );
    col.push("annulus split source", &d, f);
    Ok(())
}

fn bep_problem(b: &TraceBasis, budget: f64) -> BepProblem {
    let th = angles(b.n_theta());
    let target = th
        .iter()
        .map(|&t| Complex64::from_polar(1.0, -t) + 0.3 * Complex64::from_polar(1.0, -4.0 * t))
        .collect();
    let phi_outer = th.iter().map(|t| (2.0 * t).cos()).collect();
    let phi_inner = th.iter().map(|t| 0.2 * t.sin()).collect();
    BepProblem::new(vec![(0.0, 2.0)], target, phi_outer, phi_inner, budget)
}

fn extremal(s: &Settings, col: &Collected, out: &mut Out) -> Result<()> {
    let b = build_trace_basis(0.5, &NuProfile::XDamped(0.2), 0.2, 2, s.res(48, 64))?;
    // saturation
    let sat = solve_bep(&b, &bep_problem(&b, 0.3))?;
    out.ge(
        "budget is active (lambda > 0)",
        sat.lambda,
        f64::MIN_POSITIVE,
    );
    out.le(
        "|constraint - M| / M",
        (sat.constraint - 0.3).abs() / 0.3,
        1e-6,
    );
    col.push(
        "extremal solution",
        &CircularDomain::annulus(0.5)?,
        b.field(&sat.coeffs),
    );
    // monotone in the budget
    let mut last = f64::INFINITY;
    let mut worst_rise = 0.0f64;
    for k in 0..8 {
        let m = 0.05 * 2f64.powi(k);
        let r = solve_bep(&b, &bep_problem(&b, m))?;
        worst_rise = worst_rise.max(r.objective - last);
        if r.lambda > 0.0 {
            out.le(
                format!("saturation at M = {m}"),
                (r.constraint - m).abs() / m,
                1e-6,
            );
        }
        last = r.objective;
    }
    out.le(
        "largest objective increase over increasing M",
        worst_rise.max(0.0),
        0.0,
    );
    // unconstrained case against the normal equations
    let p = bep_problem(&b, 1e6);
    let free = solve_bep(&b, &p)?;
    let nb = b.len();
    let mut g = DMatrix::<f64>::zeros(nb, nb);
    let mut rhs = DVector::<f64>::zeros(nb);
    for (l, t) in angles(b.n_theta()).iter().enumerate() {
        if !in_arcs(&p.arcs, *t) {
            continue;
        }
        for i in 0..nb {
            rhs[i] += (b.inner[i][l].conj() * p.target[l]).re;
            for j in 0..nb {
                g[(i, j)] += (b.inner[i][l].conj() * b.inner[j][l]).re;
            }
        }
    }
    let x = g
        .lu()
        .solve(&rhs)
        .ok_or(HardyError::SingularSystem(vec![]))?;
    out.le("unconstrained lambda", free.lambda, 0.0);
    let diff = free
        .coeffs
        .iter()
        .zip(x.iter())
        .map(|(a, c)| (a - c).abs())
        .fold(0.0, f64::max);
    out.le("unconstrained solution vs normal equations", diff, 1e-9);
    Ok(())
}

fn max_principle(s: &Settings, col: &Collected, out: &mut Out) -> Result<()> {
    let mut fields = col.fields.lock().unwrap().clone();
    {
        // a non-constant disk solution with a variable coefficient
        let d = CircularDomain::disk();
        let res = s.res(48, 64);
        let data = vec![angles(res.n_theta)
            .iter()
            .map(|t| t.cos() + 0.4 * (2.0 * t).sin())
            .collect::<Vec<_>>()];
        let sol = solve_dirichlet_multi(&d, &NuProfile::XDamped(0.3), 0.3, &data, res)?;
        fields.push(("disk damped field".into(), d, sol.parts[0].field.clone()));
    }
    for (name, d, f) in &fields {
        let collars = d.collars(&[0.2, 0.1, 0.05])?;
        let pts = interior_points(d, 40, 0.0);
        let (imax, bmax) = max_principle_gap(|p| f.eval(p), d, &collars, &pts, 512);
        out.le(
            format!("{name}: interior max / collar max - 1"),
            imax / bmax - 1.0,
            1e-8,
        );
    }
    Ok(())
}

fn performance(s: &Settings, out: &mut Out) -> Result<()> {
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| HardyError::SolverFailure(e.to_string()))?;
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(s.scaling_threads)
        .build()
        .map_err(|e| HardyError::SolverFailure(e.to_string()))?;
    let ms = one.install(|| -> Result<f64> {
        let g = PolarGrid::new(GridSpec::disk(s.nr(128), s.nt(256)))?;
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed + 50);
        let alpha = random_field(&g, &mut rng, 3);
        let h = random_field(&g, &mut rng, 3);
        let t = TAlpha::new(&alpha);
        t.apply(&h.data);
        let mut times: Vec<f64> = (0..5)
            .map(|_| {
                let t0 = Instant::now();
                std::hint::black_box(t.apply(&h.data));
                t0.elapsed().as_secs_f64() * 1e3
            })
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(times[2])
    })?;
    out.le("transform at 128x256, one thread (ms)", ms, 200.0);
    let assemble = |pool: &rayon::ThreadPool| -> Result<f64> {
        pool.install(|| {
            let d = CircularDomain::annulus(0.5)?;
            let t0 = Instant::now();
            let m = MultiDirichlet::new(
                &d,
                &NuProfile::Dipole {
                    amp: 0.3,
                    phase: 0.4,
                },
                0.3,
                s.res(48, 128),
            )?;
            std::hint::black_box(m.smallest_singular_value());
            Ok(t0.elapsed().as_secs_f64())
        })
    };
    let t1 = assemble(&one)?;
    let tn = assemble(&many)?;
    out.ge(
        format!("assembly speedup on {} threads", s.scaling_threads),
        t1 / tn,
        3.0,
    );
    Ok(())
}
