//! Task execution and artifact writing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use cond_hardy::bep::{build_trace_basis, in_arcs, solve_bep, BepProblem};
use cond_hardy::dirichlet::{
    sample_domain, BoundaryFlux, ConductivitySolution, MultiDirichlet, Resolution,
};
use cond_hardy::domain::{
    build_domain, CircularDomain, DomainDescriptor, DomainKind, GridSpec, PolarGrid,
};
use cond_hardy::hardy_nu::{NuField, NuProfile};
use cond_hardy::krylov::GmresOptions;
use cond_hardy::neumann::NeumannSolver;
use cond_hardy::validation::{self, Collected, Settings};
use cond_hardy::{areaops, HardyError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{RunConfig, Task};
use crate::error::{CliError, Context};
use crate::io::{angles, boundary_samples, coefficient, complex_samples, write_csv};

/// Everything a task leaves behind for the manifest.
#[derive(Default)]
pub struct Record {
    pub residuals: Map<String, Value>,
    pub outputs: Vec<String>,
    pub timings: Map<String, Value>,
    pub extra: Map<String, Value>,
}

impl Record {
    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let v = f();
        self.timings
            .insert(format!("{name}_s"), json!(t0.elapsed().as_secs_f64()));
        v
    }

    fn csv(
        &mut self,
        dir: &Path,
        name: &str,
        header: &[&str],
        rows: &[Vec<f64>],
    ) -> Result<(), CliError> {
        write_csv(&dir.join(name), header, rows)?;
        self.outputs.push(name.to_string());
        Ok(())
    }
}

/// Resolved problem setup shared by the solver tasks.
struct Setup {
    domain: CircularDomain,
    nu: NuProfile,
    kappa: f64,
    res: Resolution,
}

fn setup(cfg: &RunConfig, rec: &mut Record) -> Result<Setup, CliError> {
    let domain = build_domain(&cfg.domain).during("domain.build")?;
    let nu = coefficient(cfg.nu.as_ref(), cfg.sigma.as_ref())?;
    let sup = nu.sup_on(&sample_domain(&domain, 128));
    let kappa = match cfg.kappa {
        Some(k) => k,
        None if sup < 1.0 => 0.5 * (1.0 + sup),
        None => {
            return Err(HardyError::KappaViolated {
                found: sup,
                kappa: 1.0,
            })
            .during("hardy_nu.bound")
        }
    };
    rec.extra.insert("kappa".into(), json!(kappa));
    rec.extra.insert("nu_sup".into(), json!(sup));
    rec.extra.insert("nu".into(), json!(nu.describe()));
    let r = &cfg.resolution;
    if r.n_r < 2 || r.n_theta < 8 || !r.n_theta.is_power_of_two() {
        return Err(CliError::Config(
            "resolution needs n_r >= 2 and n_theta a power of two >= 8".into(),
        ));
    }
    let t = &cfg.tolerances;
    if !(t.gmres_rtol > 0.0) || t.gmres_max_iter == 0 || t.gmres_restart == 0 {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    let res = Resolution {
        n_r: r.n_r,
        n_theta: r.n_theta,
        gmres: GmresOptions {
            restart: t.gmres_restart,
            rtol: t.gmres_rtol,
            max_iter: t.gmres_max_iter,
        },
    };
    Ok(Setup {
        domain,
        nu,
        kappa,
        res,
    })
}

fn component_data(cfg: &RunConfig, s: &Setup) -> Result<Vec<Vec<f64>>, CliError> {
    let nc = s.domain.n_components();
    if cfg.data.len() != nc {
        return Err(CliError::Config(format!(
            "data has {} entries, the domain has {nc} boundary circles",
            cfg.data.len()
        )));
    }
    cfg.data
        .iter()
        .map(|d| boundary_samples(d, s.res.n_theta))
        .collect()
}

/// Output lattice: polar in the disk or annulus, filtered in multiply
/// connected domains, inverted radii outside an exterior circle.
pub fn lattice(domain: &CircularDomain, nr: usize, nt: usize) -> Vec<Complex64> {
    let nr = nr.max(2);
    let th = angles(nt);
    let mut pts = Vec::new();
    match domain.kind() {
        DomainKind::ExteriorDisk => {
            let h = domain.holes()[0];
            for i in 0..nr {
                let r = h.radius * nr as f64 / (nr - i) as f64;
                pts.extend(th.iter().map(|&t| h.center + Complex64::from_polar(r, t)));
            }
        }
        DomainKind::Annulus => {
            let rho = domain.holes()[0].radius;
            for i in 0..nr {
                let r = rho + (1.0 - rho) * i as f64 / (nr - 1) as f64;
                pts.extend(th.iter().map(|&t| Complex64::from_polar(r, t)));
            }
        }
        _ => {
            pts.push(Complex64::new(0.0, 0.0));
            for i in 1..nr {
                let r = i as f64 / (nr - 1) as f64;
                pts.extend(th.iter().map(|&t| Complex64::from_polar(r, t)));
            }
            pts.retain(|&z| domain.distance_to_boundary(z) >= -1e-14);
        }
    }
    pts
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn cb_residual(sol: &ConductivitySolution) -> f64 {
    sol.parts
        .iter()
        .flat_map(|p| p.field.piece_residuals())
        .fold(0.0, f64::max)
}

/// Residuals common to every real solution.
fn solution_residuals(
    sol: &ConductivitySolution,
    cfg: &RunConfig,
    rec: &mut Record,
) -> Result<(), CliError> {
    rec.residuals
        .insert("cb_residual".into(), json!(cb_residual(sol)));
    let p = sol.compute_periods();
    rec.residuals.insert(
        "periods".into(),
        json!({"quadrature": p.values, "spread": p.spread, "seeds": p.seeds}),
    );
    let flux = sol.normal_flux();
    rec.residuals
        .insert("flux_totals".into(), json!(flux.totals));
    let collars = sol
        .domain
        .collars(&cfg.resolution.collar_levels)
        .during("domain.collars")?;
    let tr = sol.trace();
    let dist: Vec<f64> = collars
        .circles
        .iter()
        .map(|level| {
            level
                .iter()
                .zip(&tr)
                .map(|(c, t)| max_abs_diff(&sol.u_on_circle(c), t))
                .fold(0.0, f64::max)
        })
        .collect();
    rec.residuals
        .insert("collar_levels".into(), json!(collars.levels));
    rec.residuals.insert("collar_distance".into(), json!(dist));
    Ok(())
}

/// fields.csv and one trace file per boundary circle.
fn write_solution(
    dir: &Path,
    sol: &ConductivitySolution,
    conj: Option<&ConductivitySolution>,
    data: Option<&[Vec<f64>]>,
    data_name: &str,
    cfg: &RunConfig,
    rec: &mut Record,
) -> Result<(), CliError> {
    let pts = lattice(
        &sol.domain,
        cfg.resolution.field_r,
        cfg.resolution.field_theta,
    );
    let u = sol.u_at(&pts);
    let rows: Vec<Vec<f64>> = match conj {
        Some(c) => {
            let v = c.v_at(&pts);
            pts.iter()
                .zip(&u)
                .zip(&v)
                .map(|((z, &a), &b)| vec![z.re, z.im, a, b, a.hypot(b)])
                .collect()
        }
        None => pts
            .iter()
            .zip(&u)
            .map(|(z, &a)| vec![z.re, z.im, a])
            .collect(),
    };
    let header: &[&str] = if conj.is_some() {
        &["x", "y", "U", "V", "abs_f"]
    } else {
        &["x", "y", "U"]
    };
    rec.csv(dir, "fields.csv", header, &rows)?;
    let th = angles(sol.n_theta());
    let tr = sol.trace();
    let vtr = conj.map(|c| c.v_trace());
    for (k, t) in tr.iter().enumerate() {
        let mut header = vec!["theta"];
        if data.is_some() {
            header.push(data_name);
        }
        header.push("U");
        if vtr.is_some() {
            header.push("V");
        }
        let rows: Vec<Vec<f64>> = (0..th.len())
            .map(|j| {
                let mut r = vec![th[j]];
                if let Some(d) = data {
                    r.push(d[k][j]);
                }
                r.push(t[j]);
                if let Some(v) = &vtr {
                    r.push(v[k][j]);
                }
                r
            })
            .collect();
        rec.csv(dir, &format!("trace_{k}.csv"), &header, &rows)?;
    }
    Ok(())
}

fn dirichlet(cfg: &RunConfig, dir: &Path, rec: &mut Record, strict: bool) -> Result<(), CliError> {
    let s = setup(cfg, rec)?;
    let u = component_data(cfg, &s)?;
    let solver = rec
        .time("assemble", || {
            MultiDirichlet::new(&s.domain, &s.nu, s.kappa, s.res)
        })
        .during("dirichlet.assemble")?;
    rec.residuals.insert(
        "smallest_singular_value".into(),
        json!(solver.smallest_singular_value()),
    );
    let field = rec
        .time("solve", || solver.solve(&u))
        .during("dirichlet.solve")?;
    let sol = ConductivitySolution::from_field(field, &s.nu);
    let fidelity = sol
        .trace()
        .iter()
        .zip(&u)
        .map(|(a, b)| max_abs_diff(a, b))
        .fold(0.0, f64::max);
    let scale = u.iter().flatten().map(|v| v.abs()).fold(1.0, f64::max);
    rec.residuals
        .insert("trace_fidelity".into(), json!(fidelity / scale));
    solution_residuals(&sol, cfg, rec)?;
    let conj = match sol.conjugate() {
        Ok(c) => Some(c),
        Err(e @ HardyError::CompatibilityViolated(_)) => {
            rec.extra.insert(
                "conjugate".into(),
                json!({"available": false, "reason": e.to_string()}),
            );
            if strict {
                write_solution(dir, &sol, None, Some(&u), "data", cfg, rec)?;
                return Err(e).during("dirichlet.conjugate");
            }
            None
        }
        Err(e) => return Err(e).during("dirichlet.conjugate"),
    };
    if conj.is_some() {
        rec.extra
            .insert("conjugate".into(), json!({"available": true}));
    }
    let t0 = Instant::now();
    write_solution(dir, &sol, conj.as_ref(), Some(&u), "data", cfg, rec)?;
    rec.timings
        .insert("write_s".into(), json!(t0.elapsed().as_secs_f64()));
    Ok(())
}

fn neumann(cfg: &RunConfig, dir: &Path, rec: &mut Record) -> Result<(), CliError> {
    let s = setup(cfg, rec)?;
    let phi = component_data(cfg, &s)?;
    let flux = BoundaryFlux::from_density(&s.domain, phi.clone()).during("neumann.data")?;
    rec.residuals
        .insert("flux_data_totals".into(), json!(flux.totals));
    let total: f64 = flux.totals.iter().sum();
    let scale: f64 = flux.totals.iter().map(|t| t.abs()).sum::<f64>()
        + phi.iter().flatten().map(|v| v.abs()).sum::<f64>() / s.res.n_theta as f64;
    if total.abs() > 1e-8 * (1.0 + scale) {
        return Err(HardyError::MeanNotZero(total)).during("neumann.solve");
    }
    let solver = rec
        .time("assemble", || {
            NeumannSolver::new(&s.domain, &s.nu, s.kappa, s.res)
        })
        .during("neumann.assemble")?;
    let sol = rec
        .time("solve", || solver.solve(&flux))
        .during("neumann.solve")?;
    let got = sol.normal_flux();
    let fidelity = got
        .density
        .iter()
        .zip(&phi)
        .map(|(a, b)| max_abs_diff(a, b))
        .fold(0.0, f64::max);
    let sc = phi.iter().flatten().map(|v| v.abs()).fold(1.0, f64::max);
    rec.residuals
        .insert("flux_fidelity".into(), json!(fidelity / sc));
    solution_residuals(&sol, cfg, rec)?;
    let conj = sol.conjugate().ok();
    rec.extra
        .insert("conjugate".into(), json!({"available": conj.is_some()}));
    let t0 = Instant::now();
    write_solution(dir, &sol, conj.as_ref(), Some(&phi), "flux", cfg, rec)?;
    rec.timings
        .insert("write_s".into(), json!(t0.elapsed().as_secs_f64()));
    Ok(())
}

fn bep(cfg: &RunConfig, dir: &Path, rec: &mut Record) -> Result<(), CliError> {
    let spec = cfg
        .bep
        .as_ref()
        .ok_or_else(|| CliError::Config("task bep needs a bep section".into()))?;
    let rho = match cfg.domain {
        DomainDescriptor::Annulus { rho } => rho,
        _ => return Err(CliError::Config("task bep needs an annulus domain".into())),
    };
    if spec.budgets.is_empty() || spec.budgets.iter().any(|b| !(*b > 0.0)) {
        return Err(CliError::Config("bep budgets must be positive".into()));
    }
    if !(spec.p >= 1.0) {
        return Err(CliError::Config("bep exponent p must be at least 1".into()));
    }
    let s = setup(cfg, rec)?;
    let n = s.res.n_theta;
    let basis = rec
        .time("basis", || {
            build_trace_basis(rho, &s.nu, s.kappa, spec.basis_size, s.res)
        })
        .during("bep.basis")?;
    rec.residuals
        .insert("gram_min_eigenvalue".into(), json!(basis.gram_min));
    let target = complex_samples(&spec.target, n)?;
    let phi_outer = boundary_samples(&spec.phi_outer, n)?;
    let phi_inner = boundary_samples(&spec.phi_inner, n)?;
    let mut rows = Vec::new();
    let mut last = None;
    let t0 = Instant::now();
    for &m in &spec.budgets {
        let mut prob = BepProblem::new(
            spec.arcs.clone(),
            target.clone(),
            phi_outer.clone(),
            phi_inner.clone(),
            m,
        );
        prob.p = spec.p;
        let sol = solve_bep(&basis, &prob).during("bep.solve")?;
        rows.push(vec![
            m,
            sol.objective,
            sol.constraint,
            sol.lambda,
            if sol.saturated { 1.0 } else { 0.0 },
            sol.iterations as f64,
            sol.kkt_residual,
        ]);
        last = Some(sol);
    }
    rec.timings
        .insert("solve_s".into(), json!(t0.elapsed().as_secs_f64()));
    rec.csv(
        dir,
        "sweep.csv",
        &[
            "budget",
            "objective",
            "constraint",
            "lambda",
            "saturated",
            "iterations",
            "kkt_residual",
        ],
        &rows,
    )?;
    let sol = last.expect("at least one budget");
    rec.residuals.insert(
        "constraint_values".into(),
        json!(rows
            .iter()
            .map(|r| json!({"budget": r[0], "constraint": r[2], "objective": r[1]}))
            .collect::<Vec<_>>()),
    );
    rec.residuals.insert(
        "kkt_residual".into(),
        json!(rows.iter().map(|r| r[6]).fold(0.0, f64::max)),
    );
    let field = basis.field(&sol.coeffs);
    rec.residuals.insert(
        "cb_residual".into(),
        json!(field.piece_residuals().into_iter().fold(0.0, f64::max)),
    );
    let pts = lattice(
        field.domain(),
        cfg.resolution.field_r,
        cfg.resolution.field_theta,
    );
    let f = field.eval(&pts);
    let frows: Vec<Vec<f64>> = pts
        .iter()
        .zip(&f)
        .map(|(z, v)| vec![z.re, z.im, v.re, v.im, v.norm()])
        .collect();
    rec.csv(dir, "fields.csv", &["x", "y", "U", "V", "abs_f"], &frows)?;
    let th = angles(n);
    let outer: Vec<Vec<f64>> = (0..n)
        .map(|j| vec![th[j], sol.outer[j].re, sol.outer[j].im, phi_outer[j]])
        .collect();
    rec.csv(dir, "trace_0.csv", &["theta", "re", "im", "phi"], &outer)?;
    let inner: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let on = if in_arcs(&spec.arcs, th[j]) { 1.0 } else { 0.0 };
            vec![
                th[j],
                sol.inner[j].re,
                sol.inner[j].im,
                target[j].re,
                target[j].im,
                phi_inner[j],
                on,
            ]
        })
        .collect();
    rec.csv(
        dir,
        "trace_1.csv",
        &[
            "theta",
            "re",
            "im",
            "target_re",
            "target_im",
            "phi",
            "in_arcs",
        ],
        &inner,
    )?;
    Ok(())
}

fn validate(cfg: &RunConfig, dir: &Path, rec: &mut Record, threads: usize) -> Result<(), CliError> {
    let spec = cfg.validate.clone().unwrap_or_default();
    if spec.coarsen == 0 {
        return Err(CliError::Config("coarsen must be at least 1".into()));
    }
    if let Some(&bad) = spec.checks.iter().find(|&&c| !(1..=14).contains(&c)) {
        return Err(CliError::Config(format!("no check {bad}")));
    }
    let settings = Settings {
        coarsen: spec.coarsen,
        seed: cfg.seed.unwrap_or(Settings::default().seed),
        alpha_sign: if spec.inject_alpha_sign_flip {
            -1.0
        } else {
            1.0
        },
        scaling_threads: cfg.threads.unwrap_or(threads).max(2),
    };
    let ids: Vec<u32> = if spec.checks.is_empty() {
        (1..=14).collect()
    } else {
        spec.checks.clone()
    };
    let col = Collected::default();
    let t0 = Instant::now();
    let checks: Vec<_> = ids
        .iter()
        .map(|&id| {
            let c = validation::run_check(id, &settings, &col);
            eprintln!(
                "check {:2} {} {}",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.name
            );
            c
        })
        .collect();
    rec.timings
        .insert("validate_s".into(), json!(t0.elapsed().as_secs_f64()));
    let passed = checks.iter().filter(|c| c.passed).count();
    let report = json!({
        "coarsen": spec.coarsen,
        "seed": settings.seed,
        "alpha_sign": settings.alpha_sign,
        "passed": passed,
        "total": checks.len(),
        "all_passed": passed == checks.len(),
        "checks": checks,
    });
    let path = dir.join("validate.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&report).expect("plain data"),
    )
    .map_err(|e| CliError::io(&path, e))?;
    rec.outputs.push("validate.json".into());
    rec.extra.insert(
        "validate".into(),
        json!({"passed": passed, "total": checks.len()}),
    );
    Ok(())
}

fn median_ms(repeats: usize, mut f: impl FnMut()) -> f64 {
    f();
    let mut t: Vec<f64> = (0..repeats.max(1))
        .map(|_| {
            let t0 = Instant::now();
            f();
            t0.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    t.sort_by(|a, b| a.total_cmp(b));
    t[t.len() / 2]
}

fn bench(cfg: &RunConfig, dir: &Path, rec: &mut Record, threads: usize) -> Result<(), CliError> {
    let b = cfg.bench.clone().unwrap_or_default();
    if b.n_r < 2 || b.n_theta < 8 || !b.n_theta.is_power_of_two() {
        return Err(CliError::Config(
            "bench needs n_r >= 2 and n_theta a power of two >= 8".into(),
        ));
    }
    let s = setup(cfg, rec)?;
    let grid = PolarGrid::new(GridSpec::disk(b.n_r, b.n_theta)).during("bench.grid")?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    let h: Vec<Complex64> = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let hf = areaops::AreaField::new(grid.clone(), h.clone()).during("bench.field")?;
    let nu = NuField::from_profile(&grid, &s.nu, s.kappa).during("bench.nu")?;
    let t = areaops::TAlpha::new(&cond_hardy::hardy_nu::alpha_from_nu(&nu));
    let transform = median_ms(b.repeats, || {
        std::hint::black_box(t.apply(&h));
    });
    let cauchy = median_ms(b.repeats, || {
        std::hint::black_box(areaops::cauchy_area(&hf));
    });
    let disk = CircularDomain::disk();
    let u: Vec<f64> = angles(s.res.n_theta)
        .iter()
        .map(|t| (3.0 * t).cos())
        .collect();
    let solve = median_ms(b.repeats, || {
        let m = MultiDirichlet::new(&disk, &s.nu, s.kappa, s.res).expect("validated setup");
        std::hint::black_box(m.solve(&[u.clone()]).expect("disk solve"));
    });
    let report = json!({
        "threads": threads,
        "grid": [b.n_r, b.n_theta],
        "repeats": b.repeats,
        "transform_ms": transform,
        "cauchy_ms": cauchy,
        "dirichlet_disk_ms": solve,
        "dirichlet_resolution": [s.res.n_r, s.res.n_theta],
    });
    let path = dir.join("bench.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&report).expect("plain data"),
    )
    .map_err(|e| CliError::io(&path, e))?;
    rec.outputs.push("bench.json".into());
    rec.extra.insert("bench".into(), report);
    Ok(())
}

/// Runs the configured task, writing artifacts and a manifest into the output
/// directory. Returns the process exit code.
pub fn run(cfg: &RunConfig, config_path: &Path, threads: usize) -> i32 {
    let dir: PathBuf = cfg.output.clone();
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return 1;
    }
    let mut rec = Record::default();
    let t0 = Instant::now();
    let result = match cfg.task {
        Task::Dirichlet => dirichlet(cfg, &dir, &mut rec, false),
        Task::Conjugate => dirichlet(cfg, &dir, &mut rec, true),
        Task::Neumann => neumann(cfg, &dir, &mut rec),
        Task::Bep => bep(cfg, &dir, &mut rec),
        Task::Validate => validate(cfg, &dir, &mut rec, threads),
        Task::Bench => bench(cfg, &dir, &mut rec, threads),
    };
    rec.timings
        .insert("total_s".into(), json!(t0.elapsed().as_secs_f64()));
    let (code, error) = match &result {
        Ok(()) => (0, Value::Null),
        Err(e) => {
            eprintln!("error: {e}");
            (
                e.exit_code(),
                serde_json::to_value(e.report()).expect("plain data"),
            )
        }
    };
    let manifest = json!({
        "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
        "library": {"name": "cond-hardy", "version": cond_hardy::VERSION},
        "config_path": config_path.display().to_string(),
        "config": cfg,
        "threads": threads,
        "status": if code == 0 { "ok" } else { "error" },
        "exit_code": code,
        "error": error,
        "setup": rec.extra,
        "residuals": rec.residuals,
        "timings": rec.timings,
        "outputs": rec.outputs,
        "angles": "theta_k = 2 pi k / n_theta",
    });
    let path = dir.join("manifest.json");
    if let Err(e) = std::fs::write(
        &path,
        serde_json::to_string_pretty(&manifest).expect("plain data"),
    ) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return if code == 0 { 1 } else { code };
    }
    code
}
