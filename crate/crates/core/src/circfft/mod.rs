//! Fourier analysis of boundary traces on circles.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::{CircularDomain, PolarGrid};
use crate::error::{HardyError, Result};

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> Plans {
    static CACHE: OnceLock<Mutex<HashMap<usize, Plans>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut p = FftPlanner::new();
            (p.plan_fft_forward(n), p.plan_fft_inverse(n))
        })
        .clone()
}

fn mode(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Samples of each boundary component at `theta_k = 2 pi k / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub components: Vec<Vec<Complex64>>,
}

impl BoundaryTrace {
    pub fn new(components: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = components.first().map(|c| c.len()).unwrap_or(0);
        if n < 8 || !n.is_power_of_two() {
            return Err(HardyError::BadResolution(format!("trace length {n}")));
        }
        if components.iter().any(|c| c.len() != n) {
            return Err(HardyError::BadResolution(
                "components have different lengths".into(),
            ));
        }
        Ok(BoundaryTrace { components })
    }

    pub fn from_real(components: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            components
                .into_iter()
                .map(|c| c.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.components[0].len()
    }

    pub fn real_parts(&self) -> Vec<Vec<f64>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|v| v.re).collect())
            .collect()
    }

    pub fn imag_parts(&self) -> Vec<Vec<f64>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|v| v.im).collect())
            .collect()
    }
}

/// Normalised Fourier coefficients (FFT order, Nyquist zeroed) of one circle.
pub fn fourier(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let (f, _) = plans(n);
    let mut buf = values.to_vec();
    f.process(&mut buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
    buf[n / 2] = Complex64::new(0.0, 0.0);
    buf
}

pub fn synthesize(coeffs: &[Complex64]) -> Vec<Complex64> {
    let (_, inv) = plans(coeffs.len());
    let mut buf = coeffs.to_vec();
    inv.process(&mut buf);
    buf
}

pub fn fourier_real(values: &[f64]) -> Vec<Complex64> {
    fourier(
        &values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>(),
    )
}

fn apply_multiplier<F: Fn(i64) -> Complex64>(values: &[Complex64], mult: F) -> Vec<Complex64> {
    let n = values.len();
    let mut c = fourier(values);
    for (k, v) in c.iter_mut().enumerate() {
        *v *= mult(mode(k, n));
    }
    synthesize(&c)
}

/// Keeps the modes k >= 0.
pub fn riesz_project(values: &[Complex64]) -> Vec<Complex64> {
    apply_multiplier(values, |m| if m >= 0 { 1.0.into() } else { 0.0.into() })
}

/// Harmonic conjugate on the unit circle: multiplier `-i sign(k)`.
pub fn conjugate_trace(values: &[f64]) -> Vec<f64> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    apply_multiplier(&z, |m| Complex64::new(0.0, -(m.signum() as f64)))
        .iter()
        .map(|v| v.re)
        .collect()
}

/// d/dtheta of a periodic sample vector.
pub fn d_theta(values: &[Complex64]) -> Vec<Complex64> {
    apply_multiplier(values, |m| Complex64::new(0.0, m as f64))
}

pub fn d_theta_real(values: &[f64]) -> Vec<f64> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    d_theta(&z).iter().map(|v| v.re).collect()
}

/// Periodic antiderivative with zero mean; the mean of the input is ignored.
pub fn antiderivative_real(values: &[f64]) -> Vec<f64> {
    let z: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    apply_multiplier(&z, |m| {
        if m == 0 {
            0.0.into()
        } else {
            Complex64::new(0.0, -1.0 / m as f64)
        }
    })
    .iter()
    .map(|v| v.re)
    .collect()
}

/// Poisson extension of a unit-circle trace onto the nodes of a disk grid.
pub fn poisson_extend(values: &[Complex64], grid: &PolarGrid) -> Result<Vec<Complex64>> {
    if values.len() != grid.n_theta() {
        return Err(HardyError::GridMismatch);
    }
    let c = fourier(values);
    let n = values.len();
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid.radii() {
        let mut ring: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(k, v)| v * r.powi(mode(k, n).unsigned_abs() as i32))
            .collect();
        grid.ring_inverse(&mut ring);
        out.extend(ring);
    }
    Ok(out)
}

/// Coefficients in the real basis `1, cos k, sin k` for k = 1..=kmax.
pub fn real_basis_coeffs(values: &[f64], kmax: usize) -> Vec<f64> {
    let c = fourier_real(values);
    let n = values.len();
    let mut out = Vec::with_capacity(2 * kmax + 1);
    out.push(c[0].re);
    for k in 1..=kmax {
        let ck = c[k];
        let cmk = c[n - k];
        out.push((ck + cmk).re);
        out.push((Complex64::new(0.0, 1.0) * (ck - cmk)).re);
    }
    out
}

pub fn real_basis_eval(coeffs: &[f64], n: usize) -> Vec<f64> {
    let kmax = (coeffs.len() - 1) / 2;
    (0..n)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / n as f64;
            let mut v = coeffs[0];
            for k in 1..=kmax {
                v += coeffs[2 * k - 1] * (k as f64 * th).cos()
                    + coeffs[2 * k] * (k as f64 * th).sin();
            }
            v
        })
        .collect()
}

/// Boundary Cauchy integral over all components (positive orientation) at an interior point.
pub fn cauchy_boundary(
    trace: &BoundaryTrace,
    domain: &CircularDomain,
    z: Complex64,
) -> Result<Complex64> {
    let circles = domain.boundary();
    if circles.len() != trace.components.len() {
        return Err(HardyError::BadData(
            "trace does not match the domain".into(),
        ));
    }
    let n = trace.n();
    let exterior = domain.kind() == crate::domain::DomainKind::ExteriorDisk;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, (circ, vals)) in circles.iter().zip(&trace.components).enumerate() {
        let guard = 5.0 * 2.0 * PI / n as f64 * circ.radius;
        if ((z - circ.center).norm() - circ.radius).abs() < guard {
            return Err(HardyError::PointTooCloseToBoundary(format!("{z}")));
        }
        let sign = if c == 0 && !exterior { 1.0 } else { -1.0 };
        let mut s = Complex64::new(0.0, 0.0);
        for (k, v) in vals.iter().enumerate() {
            let e = Complex64::from_polar(circ.radius, 2.0 * PI * k as f64 / n as f64);
            s += v * e / (circ.center + e - z);
        }
        acc += s * sign / n as f64;
    }
    Ok(acc)
}
