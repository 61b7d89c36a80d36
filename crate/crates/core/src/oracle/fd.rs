//! Conservative finite differences for `div(sigma grad u) = 0` in polar form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{CircularDomain, DomainKind};
use crate::error::{HardyError, Result};

/// Nodal solution on a uniform polar grid, boundary rows included.
#[derive(Debug, Clone)]
pub struct FdSolution {
    pub radii: Vec<f64>,
    pub n_theta: usize,
    /// Ring-major values, one ring per radius.
    pub values: Vec<f64>,
    pub iterations: usize,
}

impl FdSolution {
    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angle(j))
    }

    /// Bilinear interpolation in `(r, theta)`.
    pub fn eval(&self, z: Complex64) -> f64 {
        let nt = self.n_theta;
        let r = z.norm().clamp(self.radii[0], *self.radii.last().unwrap());
        let i = match self.radii.iter().position(|&x| x > r) {
            Some(0) => 0,
            Some(k) => k - 1,
            None => self.radii.len() - 2,
        };
        let t = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        let th = z.arg().rem_euclid(2.0 * PI) / (2.0 * PI) * nt as f64;
        let j = th.floor() as usize % nt;
        let s = th - th.floor();
        let v = |i: usize, j: usize| self.values[i * nt + j % nt];
        (1.0 - t) * ((1.0 - s) * v(i, j) + s * v(i, j + 1))
            + t * ((1.0 - s) * v(i + 1, j) + s * v(i + 1, j + 1))
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Solves the Dirichlet problem on the disk or a centred annulus with `n`
/// radial intervals and `4 n` angles. `data(component, theta)` gives the
/// boundary values, component 0 being the unit circle.
pub fn fd_dirichlet(
    domain: &CircularDomain,
    sigma: &dyn Fn(Complex64) -> f64,
    data: &dyn Fn(usize, f64) -> f64,
    n: usize,
) -> Result<FdSolution> {
    let nt = 4 * n;
    let dth = 2.0 * PI / nt as f64;
    // radii of unknown rings, plus boundary rings
    let (radii, first_unknown, h) = match domain.kind() {
        DomainKind::Disk => {
            // cell centred so that the origin is a face of zero area
            let h = 1.0 / (n as f64 + 0.5);
            (
                (0..=n).map(|i| (i as f64 + 0.5) * h).collect::<Vec<_>>(),
                0usize,
                h,
            )
        }
        DomainKind::Annulus => {
            let rho = domain.holes()[0].radius;
            let h = (1.0 - rho) / n as f64;
            (
                (0..=n).map(|i| rho + i as f64 * h).collect::<Vec<_>>(),
                1usize,
                h,
            )
        }
        _ => {
            return Err(HardyError::UnsupportedDomain(
                "finite differences need a disk or annulus".into(),
            ))
        }
    };
    let nr = radii.len();
    let last = nr - 1;
    let mut values = vec![0.0; nr * nt];
    for j in 0..nt {
        let th = j as f64 * dth;
        values[last * nt + j] = data(0, th);
        if first_unknown == 1 {
            values[j] = data(1, th);
        }
    }
    let sig: Vec<f64> = (0..nr)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .map(|(i, j)| sigma(Complex64::from_polar(radii[i], j as f64 * dth)))
        .collect();
    let s = |i: usize, j: usize| sig[i * nt + j % nt];
    // face coefficients
    let n_unk = last - first_unknown;
    let idx = |i: usize, j: usize| (i - first_unknown) * nt + j;
    let mut cr = vec![0.0; (nr - 1) * nt]; // between ring i and i+1
    let mut ct = vec![0.0; nr * nt]; // between j and j+1 on ring i
    for i in 0..nr - 1 {
        let rf = 0.5 * (radii[i] + radii[i + 1]);
        for j in 0..nt {
            cr[i * nt + j] = rf * harmonic(s(i, j), s(i + 1, j)) * dth / h;
        }
    }
    for i in 0..nr {
        for j in 0..nt {
            ct[i * nt + j] = harmonic(s(i, j), s(i, j + 1)) * h / (radii[i] * dth);
        }
    }
    // operator on unknowns (positive definite form)
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in first_unknown..last {
            for j in 0..nt {
                let jp = (j + 1) % nt;
                let jm = (j + nt - 1) % nt;
                let c_out = cr[i * nt + j];
                let c_in = if i > 0 { cr[(i - 1) * nt + j] } else { 0.0 };
                let c_p = ct[i * nt + j];
                let c_m = ct[i * nt + jm];
                let u = x[idx(i, j)];
                let mut acc =
                    (c_out + c_in + c_p + c_m) * u - c_p * x[idx(i, jp)] - c_m * x[idx(i, jm)];
                if i + 1 < last {
                    acc -= c_out * x[idx(i + 1, j)];
                }
                if i > first_unknown {
                    acc -= c_in * x[idx(i - 1, j)];
                }
                out[idx(i, j)] = acc;
            }
        }
    };
    let mut b = vec![0.0; n_unk * nt];
    let mut diag = vec![0.0; n_unk * nt];
    for i in first_unknown..last {
        for j in 0..nt {
            let jm = (j + nt - 1) % nt;
            let c_out = cr[i * nt + j];
            let c_in = if i > 0 { cr[(i - 1) * nt + j] } else { 0.0 };
            diag[idx(i, j)] = c_out + c_in + ct[i * nt + j] + ct[i * nt + jm];
            if i + 1 == last {
                b[idx(i, j)] += c_out * values[last * nt + j];
            }
            if first_unknown == 1 && i == 1 {
                b[idx(i, j)] += c_in * values[j];
            }
        }
    }
    // Jacobi-preconditioned conjugate gradients
    let m = b.len();
    let mut x = vec![0.0; m];
    let mut r = b.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(a, d)| a / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; m];
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 20 * m.max(100);
    let mut it = 0;
    while it < max_iter {
        let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rn <= 1e-13 * bnorm {
            break;
        }
        apply(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            p[k] = z[k] + beta * p[k];
        }
        it += 1;
    }
    if it == max_iter {
        return Err(HardyError::SolverFailure(
            "finite-difference CG did not converge".into(),
        ));
    }
    for i in first_unknown..last {
        for j in 0..nt {
            values[i * nt + j] = x[idx(i, j)];
        }
    }
    Ok(FdSolution {
        radii,
        n_theta: nt,
        values,
        iterations: it,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(sol: &FdSolution, exact: impl Fn(Complex64) -> f64) -> f64 {
        let mut e: f64 = 0.0;
        for i in 0..sol.radii.len() {
            for j in 0..sol.n_theta {
                e = e.max((sol.values[i * sol.n_theta + j] - exact(sol.node(i, j))).abs());
            }
        }
        e
    }

    #[test]
    fn annulus_log_and_order() {
        let rho: f64 = 0.5;
        let d = CircularDomain::annulus(rho).unwrap();
        let exact = |z: Complex64| z.norm().ln() / rho.ln();
        let data = |c: usize, _t: f64| if c == 0 { 0.0 } else { 1.0 };
        // a nonconstant conductivity with the same exact solution would need a
        // source; the order check uses sigma = 1
        let e64 = max_err(&fd_dirichlet(&d, &|_| 1.0, &data, 64).unwrap(), exact);
        let e128 = max_err(&fd_dirichlet(&d, &|_| 1.0, &data, 128).unwrap(), exact);
        assert!(e128 <= 5e-4, "{e128}");
        let ratio = e64 / e128;
        assert!((3.6..=4.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn disk_quadratic() {
        let d = CircularDomain::disk();
        let s = fd_dirichlet(&d, &|_| 1.0, &|_, t| (2.0 * t).cos(), 128).unwrap();
        let e = max_err(&s, |z| (z * z).re);
        assert!(e <= 1e-3, "{e}");
        let z = Complex64::new(0.3, -0.4);
        assert!((s.eval(z) - (z * z).re).abs() < 2e-3);
    }

    #[test]
    fn radial_conductivity_log_solution() {
        // sigma = 1/r makes u = r - rho harmonic in the weighted sense
        let rho = 0.4;
        let d = CircularDomain::annulus(rho).unwrap();
        let s = fd_dirichlet(
            &d,
            &|z| 1.0 / z.norm(),
            &|c, _| if c == 0 { 1.0 - rho } else { 0.0 },
            64,
        )
        .unwrap();
        assert!(max_err(&s, |z| z.norm() - rho) < 1e-10);
    }
}
