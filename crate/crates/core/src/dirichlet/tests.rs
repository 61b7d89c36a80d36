use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::domain::{DomainDescriptor, HoleSpec};

fn angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den.max(1e-300)).sqrt()
}

fn probe_points(domain: &CircularDomain, n: usize) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let z = Complex64::from_polar(
                0.05 + 0.9 * i as f64 / n as f64,
                0.3 + 2.0 * PI * k as f64 / n as f64,
            );
            if domain.contains(z) && domain.distance_to_boundary(z) > 0.05 {
                pts.push(z);
            }
        }
    }
    pts
}

#[test]
fn free_disk_gives_powers() {
    let res = Resolution::new(24, 32);
    let u: Vec<f64> = angles(32).iter().map(|t| (3.0 * t).cos()).collect();
    let (f, _) = solve_dirichlet_disk(&NuProfile::Const(0.0), 0.0, &u, 0.0, res, None).unwrap();
    let pts = probe_points(&CircularDomain::disk(), 8);
    for (v, z) in f.eval(&pts).iter().zip(&pts) {
        assert!((v - z.powi(3)).norm() < 1e-11);
    }
    let one = vec![1.0; 32];
    let (f, _) = solve_dirichlet_disk(&NuProfile::Const(0.0), 0.0, &one, 0.0, res, None).unwrap();
    for v in f.eval(&pts) {
        assert!((v - 1.0).norm() < 1e-12);
    }
}

#[test]
fn damped_field_trace_and_equation() {
    let res = Resolution::new(32, 64);
    let u: Vec<f64> = angles(64)
        .iter()
        .map(|t| (2.0 * t).cos() + 0.5 * t.sin() + 0.2)
        .collect();
    let nu = NuProfile::XDamped(0.3);
    let (f, y) = solve_dirichlet_disk(&nu, 0.3, &u, 0.0, res, None).unwrap();
    let tr: Vec<f64> = f.trace()[0].iter().map(|c| c.re).collect();
    assert!(rel_l2(&tr, &u) < 1e-7, "{}", rel_l2(&tr, &u));
    let m = f.trace()[0].iter().map(|c| c.im).sum::<f64>() / 64.0;
    assert!(m.abs() < 1e-9);
    assert!(f.piece_residuals()[0] < 1e-6, "{:?}", f.piece_residuals());
    // uniqueness: a different start converges to the same solution
    let guess: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, v)| v + 0.3 * (i as f64).sin())
        .collect();
    let (g, _) = solve_dirichlet_disk(&nu, 0.3, &u, 0.0, res, Some(&guess)).unwrap();
    let pts = probe_points(&CircularDomain::disk(), 6);
    for (a, b) in f.eval(&pts).iter().zip(g.eval(&pts)) {
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn non_finite_data_is_rejected() {
    let mut u = vec![0.0; 32];
    u[3] = f64::NAN;
    let r = solve_dirichlet_disk(
        &NuProfile::Const(0.0),
        0.0,
        &u,
        0.0,
        Resolution::new(24, 32),
        None,
    );
    assert!(matches!(r, Err(HardyError::BadData(_))));
}

#[test]
fn exterior_reflects_powers() {
    let res = Resolution::new(24, 32);
    let n = 2;
    let u: Vec<f64> = angles(32).iter().map(|t| (n as f64 * t).cos()).collect();
    let f = solve_dirichlet_exterior(
        Complex64::new(0.0, 0.0),
        1.0,
        &NuProfile::Const(0.0),
        0.0,
        &u,
        0.0,
        res,
        false,
    )
    .unwrap();
    for z in [
        Complex64::new(1.5, 0.3),
        Complex64::new(-2.0, 1.0),
        Complex64::new(0.2, -3.0),
    ] {
        assert!((f.eval(&[z])[0] - z.powi(-n)).norm() < 1e-11);
    }
    let c = vec![2.0; 32];
    let a = Complex64::new(0.3, -0.2);
    let f =
        solve_dirichlet_exterior(a, 0.5, &NuProfile::Const(0.0), 0.0, &c, 0.0, res, false).unwrap();
    assert!((f.eval(&[Complex64::new(2.0, 1.0)])[0] - 2.0).norm() < 1e-12);
    let f =
        solve_dirichlet_exterior(a, 0.5, &NuProfile::Const(0.0), 0.0, &c, 0.0, res, true).unwrap();
    assert!(f.eval(&[Complex64::new(2.0, 1.0)])[0].norm() < 1e-12);
}

#[test]
fn exterior_with_dipole_field_solves_equation() {
    let res = Resolution::new(32, 64);
    let u: Vec<f64> = angles(64)
        .iter()
        .map(|t| t.cos() + 0.3 * (2.0 * t).sin())
        .collect();
    let nu = NuProfile::Dipole {
        amp: 0.3,
        phase: 0.4,
    };
    let f = solve_dirichlet_exterior(Complex64::new(0.0, 0.0), 1.0, &nu, 0.3, &u, 0.0, res, false)
        .unwrap();
    let tr: Vec<f64> = f.trace()[0].iter().map(|c| c.re).collect();
    assert!(rel_l2(&tr, &u) < 1e-7);
    assert!(f.piece_residuals()[0] < 1e-6);
}

fn annulus_log(rho: f64, res: Resolution) -> (MultiDirichlet, ConductivitySolution) {
    let d = CircularDomain::annulus(rho).unwrap();
    let s = MultiDirichlet::new(&d, &NuProfile::Const(0.0), 0.0, res).unwrap();
    let n = res.n_theta;
    let sol = ConductivitySolution::from_field(
        s.solve(&[vec![0.0; n], vec![1.0; n]]).unwrap(),
        &NuProfile::Const(0.0),
    );
    (s, sol)
}

#[test]
fn annulus_log_solution_periods_and_flux() {
    let rho = 0.5;
    let (solver, sol) = annulus_log(rho, Resolution::new(64, 128));
    let d = solver.domain().clone();
    let pts = probe_points(&d, 16);
    let err = sol
        .u_at(&pts)
        .iter()
        .zip(&pts)
        .map(|(u, z)| (u - z.norm().ln() / rho.ln()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-8, "{err}");
    let p = sol.compute_periods();
    let want = 2.0 * PI / rho.ln();
    assert!((p.values[0] - want).abs() < 1e-6, "{:?}", p);
    assert!((p.seeds[0] - want).abs() < 1e-6);
    assert!(p.spread[0] <= 1e-6 * want.abs() + 1e-10);
    let fl = sol.normal_flux();
    assert!((fl.totals[0] - want).abs() < 1e-8);
    assert!((fl.totals[0] + fl.totals[1]).abs() < 1e-8);
    assert!(fl.oscillatory(0).iter().all(|v| v.abs() < 1e-8));
    assert!(matches!(
        sol.conjugate(),
        Err(HardyError::CompatibilityViolated(_))
    ));
}

#[test]
fn harmonic_polynomial_has_no_period() {
    let d = CircularDomain::annulus(0.4).unwrap();
    let res = Resolution::new(32, 64);
    let s = MultiDirichlet::new(&d, &NuProfile::Const(0.0), 0.0, res).unwrap();
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| c.points(64).iter().map(|z| z.powi(3).re).collect())
        .collect();
    let sol = ConductivitySolution::from_field(s.solve(&data).unwrap(), &NuProfile::Const(0.0));
    let p = sol.compute_periods();
    assert!(p.values[0].abs() < 1e-9 && p.seeds[0].abs() < 1e-9, "{p:?}");
    let fl = sol.conjugate().unwrap().normal_flux();
    for (v, t) in fl.density[0].iter().zip(angles(64)) {
        assert!((v - 3.0 * (3.0 * t).cos()).abs() < 1e-8);
    }
}

#[test]
fn s_omega_matches_log_periods() {
    let rho = 0.5;
    let d = CircularDomain::annulus(rho).unwrap();
    let s = MultiDirichlet::new(&d, &NuProfile::Const(0.0), 0.0, Resolution::new(32, 64)).unwrap();
    let (e, _) = solve_s_omega(&s, &[0.0]).unwrap();
    assert!(e.constants.iter().all(|c| c.abs() < 1e-12));
    let lam = 1.7;
    let (e, sol) = solve_s_omega(&s, &[lam]).unwrap();
    assert!((e.constants[1] - e.constants[0] - lam * rho.ln() / (2.0 * PI)).abs() < 1e-10);
    assert!((e.constants[0] + e.constants[1]).abs() < 1e-12);
    assert!((sol.compute_periods().values[0] - lam).abs() < 1e-7);
    let disk = MultiDirichlet::new(
        &CircularDomain::disk(),
        &NuProfile::Const(0.0),
        0.0,
        Resolution::new(16, 16),
    )
    .unwrap();
    assert_eq!(solve_s_omega(&disk, &[]).unwrap().0.constants, vec![0.0]);
}

#[test]
fn kernel_elements_are_not_conjugable() {
    let d = CircularDomain::annulus(0.5).unwrap();
    let nu = NuProfile::Radial(vec![0.1, 0.2]);
    let s = MultiDirichlet::new(&d, &nu, 0.4, Resolution::new(32, 64)).unwrap();
    let e = SOmegaElement {
        constants: vec![0.4, -0.4],
    };
    let sol = ConductivitySolution::from_field(s.solve(&e.data(64)).unwrap(), &nu);
    assert!(matches!(
        sol.conjugate(),
        Err(HardyError::CompatibilityViolated(_))
    ));
}

#[test]
fn disk_conjugate_of_x_is_y() {
    let d = CircularDomain::disk();
    let s = MultiDirichlet::new(&d, &NuProfile::Const(0.0), 0.0, Resolution::new(16, 32)).unwrap();
    let u: Vec<f64> = angles(32).iter().map(|t| t.cos()).collect();
    let sol = ConductivitySolution::from_field(s.solve(&[u]).unwrap(), &NuProfile::Const(0.0))
        .conjugate()
        .unwrap();
    let pts = probe_points(&d, 6);
    for (v, z) in sol.v_at(&pts).iter().zip(&pts) {
        assert!((v - z.im).abs() < 1e-12);
    }
}

/// Data on the annulus minus its log components, so that it is compatible.
fn compatible_data(s: &MultiDirichlet, raw: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    compatible_part(s, &raw).unwrap()
}

#[test]
fn conjugation_is_an_involution_up_to_sign() {
    let d = CircularDomain::annulus(0.5).unwrap();
    let nu = NuProfile::Bump {
        amp: 0.3,
        center: Complex64::new(0.6, 0.2),
        width: 0.4,
    };
    let res = Resolution::new(48, 64);
    let s = MultiDirichlet::new(&d, &nu, 0.3, res).unwrap();
    let raw: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(64)
                .iter()
                .map(|z| (z.re * 2.0).sin() + z.im * z.im)
                .collect()
        })
        .collect();
    let u = compatible_data(&s, raw);
    let sol = ConductivitySolution::from_field(s.solve(&u).unwrap(), &nu);
    let p = sol.seed_periods();
    assert!(p[0].abs() < 1e-8, "{p:?}");
    let v = sol.conjugate().unwrap().v_trace();
    let s2 = MultiDirichlet::new(&d, &nu.negated(), 0.3, res).unwrap();
    let sol2 = ConductivitySolution::from_field(s2.solve(&v).unwrap(), &nu.negated());
    let back = sol2.conjugate().unwrap().v_trace();
    let flat = |x: &Vec<Vec<f64>>| x.iter().flatten().copied().collect::<Vec<_>>();
    let neg: Vec<f64> = flat(&u).iter().map(|x| -x).collect();
    assert!(
        rel_l2(&flat(&back), &neg) < 1e-5,
        "{}",
        rel_l2(&flat(&back), &neg)
    );
}

#[test]
fn two_hole_trace_fidelity_and_flux_balance() {
    let d = crate::domain::build_domain(&DomainDescriptor::Multi {
        holes: vec![
            HoleSpec {
                center: [0.4, 0.1],
                radius: 0.2,
            },
            HoleSpec {
                center: [-0.35, -0.2],
                radius: 0.15,
            },
        ],
    })
    .unwrap();
    let nu = NuProfile::XDamped(0.2);
    let res = Resolution::new(32, 128);
    let s = MultiDirichlet::new(&d, &nu, 0.2, res).unwrap();
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(128)
                .iter()
                .map(|z| (z.re + 0.5 * z.im).cos())
                .collect()
        })
        .collect();
    let sol = ConductivitySolution::from_field(s.solve(&data).unwrap(), &nu);
    for (a, b) in sol.trace().iter().zip(&data) {
        assert!(rel_l2(a, b) < 1e-7, "{}", rel_l2(a, b));
    }
    let fl = sol.normal_flux();
    let total: f64 = fl.totals.iter().sum();
    assert!(total.abs() < 1e-8, "{fl:?}");
    // seed periods are exact for the discrete field; quadrature periods only
    // converge algebraically because the filled field has kinks on off-centre circles
    let p = sol.compute_periods();
    for j in 0..2 {
        assert!((p.seeds[j] + fl.totals[j + 1]).abs() < 1e-9);
        assert!(
            (p.values[j] - p.seeds[j]).abs() < 2e-2 * p.seeds[j].abs(),
            "{p:?}"
        );
    }
}

#[test]
fn extension_choice_does_not_change_u() {
    let d = CircularDomain::annulus(0.5).unwrap();
    let nu = NuProfile::Dipole {
        amp: 0.3,
        phase: 0.2,
    };
    let res = Resolution::new(48, 64);
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(64)
                .iter()
                .map(|z| z.re + 0.3 * (z.im * 3.0).sin())
                .collect()
        })
        .collect();
    let a = MultiDirichlet::with_variant(&d, &nu, 0.3, res, ExtensionVariant::Reflect).unwrap();
    let b = MultiDirichlet::with_variant(&d, &nu, 0.3, res, ExtensionVariant::Global).unwrap();
    let pts = probe_points(&d, 10);
    let ua = ConductivitySolution::from_field(a.solve(&data).unwrap(), &nu).u_at(&pts);
    let ub = ConductivitySolution::from_field(b.solve(&data).unwrap(), &nu).u_at(&pts);
    let err = ua
        .iter()
        .zip(&ub)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn annulus_split_reconstructs_the_trace() {
    let d = CircularDomain::annulus(0.5).unwrap();
    let nu = NuProfile::Radial(vec![0.1, 0.15]);
    let s = MultiDirichlet::new(&d, &nu, 0.3, Resolution::new(64, 64)).unwrap();
    let raw: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(64)
                .iter()
                .map(|z| z.re - 0.2 * (z.im * 2.0).cos())
                .collect()
        })
        .collect();
    let u = compatible_data(&s, raw);
    let f = s.solve(&u).unwrap().without_seeds();
    let sp = split_annulus(&s, &f).unwrap();
    assert!(sp.reconstruction < 1e-6, "{}", sp.reconstruction);
    assert!(sp.inner.piece_residuals()[0] < 1e-6);
    assert!(sp.outer.piece_residuals()[0] < 1e-6);
}

#[test]
fn radial_conductivity_matches_mode_problem() {
    let rho = 0.5;
    let d = CircularDomain::annulus(rho).unwrap();
    let nu = NuProfile::SigmaRadial(vec![1.0, 0.5]);
    let res = Resolution::new(48, 64);
    let data = vec![
        angles(64).iter().map(|t| t.cos()).collect::<Vec<_>>(),
        vec![0.0; 64],
    ];
    let sol = solve_dirichlet_multi(&d, &nu, 0.25, &data, res).unwrap();
    let prof = crate::oracle::radial_mode_bvp(&|r| 1.0 + 0.5 * r * r, 1, rho, 0.0, 1.0).unwrap();
    let pts = probe_points(&d, 12);
    let exact: Vec<f64> = pts
        .iter()
        .map(|z| prof.eval(z.norm()) * z.arg().cos())
        .collect();
    let e = rel_l2(&sol.u_at(&pts), &exact);
    assert!(e < 1e-6, "{e}");
}

fn fd_compare(d: &CircularDomain, nu: &NuProfile, kappa: f64, res: Resolution, n_fd: usize) -> f64 {
    let data_fn = |z: Complex64| (z.re * 1.3).sin() + z.im * z.re;
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| c.points(res.n_theta).iter().map(|&z| data_fn(z)).collect())
        .collect();
    let sol = solve_dirichlet_multi(d, nu, kappa, &data, res).unwrap();
    let circles = d.boundary();
    let fd = crate::oracle::fd_dirichlet(
        d,
        &|z| crate::hardy_nu::sigma_of(nu.eval(z)),
        &|c, t| data_fn(circles[c].point(t)),
        n_fd,
    )
    .unwrap();
    let mut pts = Vec::new();
    let mut want = Vec::new();
    for i in 0..fd.radii.len() {
        for j in 0..fd.n_theta {
            let z = fd.node(i, j);
            if d.distance_to_boundary(z) > 0.05 {
                pts.push(z);
                want.push(fd.values[i * fd.n_theta + j]);
            }
        }
    }
    rel_l2(&sol.u_at(&pts), &want)
}

#[test]
fn disk_solution_agrees_with_finite_differences() {
    let e = fd_compare(
        &CircularDomain::disk(),
        &NuProfile::XDamped(0.3),
        0.3,
        Resolution::new(32, 64),
        96,
    );
    assert!(e < 2e-3, "{e}");
}

#[test]
fn annulus_solution_agrees_with_finite_differences() {
    let nu = NuProfile::Bump {
        amp: 0.3,
        center: Complex64::new(0.3, 0.6),
        width: 0.5,
    };
    let e = fd_compare(
        &CircularDomain::annulus(0.4).unwrap(),
        &nu,
        0.3,
        Resolution::new(32, 64),
        96,
    );
    assert!(e < 2e-3, "{e}");
}

#[test]
fn flux_pairing_matches_energy_integral() {
    use crate::domain::gauss::gauss_legendre;
    let rho = 0.5;
    let d = CircularDomain::annulus(rho).unwrap();
    let nu = NuProfile::Bump {
        amp: 0.3,
        center: Complex64::new(0.3, -0.5),
        width: 0.5,
    };
    let s = MultiDirichlet::new(&d, &nu, 0.3, Resolution::new(48, 64)).unwrap();
    let data: Vec<Vec<f64>> = d
        .boundary()
        .iter()
        .map(|c| {
            c.points(64)
                .iter()
                .map(|z| (z.re + 0.3 * z.im).cos() + z.re)
                .collect()
        })
        .collect();
    let u = ConductivitySolution::from_field(s.solve(&data).unwrap(), &nu);
    let flux = u.normal_flux();
    let (x, w) = gauss_legendre(48);
    let nt = 128;
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        let r = rho + (1.0 - rho) * (xi + 1.0) / 2.0;
        for k in 0..nt {
            pts.push(Complex64::from_polar(r, 2.0 * PI * k as f64 / nt as f64));
            wts.push(wi * (1.0 - rho) / 2.0 * r * 2.0 * PI / nt as f64);
        }
    }
    let grads = u.grad_u(&pts);
    let tests: [(fn(Complex64) -> f64, fn(Complex64) -> [f64; 2]); 5] = [
        (|z| z.re, |_| [1.0, 0.0]),
        (|z| z.im, |_| [0.0, 1.0]),
        (|z| z.re * z.im, |z| [z.im, z.re]),
        (|z| z.norm_sqr(), |z| [2.0 * z.re, 2.0 * z.im]),
        (
            |z| (z.re - z.im).sin(),
            |z| [(z.re - z.im).cos(), -(z.re - z.im).cos()],
        ),
    ];
    for (phi, grad) in tests {
        let vol: f64 = pts
            .iter()
            .zip(&grads)
            .zip(&wts)
            .map(|((z, g), w)| {
                let gp = grad(*z);
                w * u.sigma(*z) * (g[0] * gp[0] + g[1] * gp[1])
            })
            .sum();
        let mut bnd = 0.0;
        let mut scale = 0.0;
        for (c, dens) in d.boundary().iter().zip(&flux.density) {
            let n = dens.len();
            for (z, f) in c.points(n).iter().zip(dens) {
                bnd += f * phi(*z) * 2.0 * PI * c.radius / n as f64;
                scale += (f * phi(*z)).abs() * 2.0 * PI * c.radius / n as f64;
            }
        }
        assert!((vol - bnd).abs() <= 1e-6 * scale, "{vol} {bnd}");
    }
}

#[test]
fn collar_samples_approach_the_trace() {
    let d = CircularDomain::disk();
    let nu = NuProfile::XDamped(0.3);
    let s = MultiDirichlet::new(&d, &nu, 0.3, Resolution::new(32, 64)).unwrap();
    let data = vec![angles(64)
        .iter()
        .map(|t| (2.0 * t).cos() + (t + 0.4).sin())
        .collect::<Vec<f64>>()];
    let f = s.solve(&data).unwrap();
    let tr = f.trace();
    let mut last = f64::INFINITY;
    for eps in [0.2, 0.1, 0.05, 0.025] {
        let pts: Vec<Complex64> = angles(64)
            .iter()
            .map(|t| Complex64::from_polar(1.0 - eps, *t))
            .collect();
        let vals = f.eval(&pts);
        let dist = (vals
            .iter()
            .zip(&tr[0])
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / 64.0)
            .sqrt();
        assert!(dist < last);
        last = dist;
    }
}
