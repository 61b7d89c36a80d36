//! Direct quadrature of the area Cauchy transform on the unit disk.

use std::f64::consts::PI;

use num_complex::Complex64;

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// `(1/pi) iint_D h(xi) / (z - xi) dm(xi)` in polar coordinates centred at z,
/// where the kernel singularity cancels against the Jacobian:
/// `-(1/pi) int_0^{2pi} int_0^{T(phi)} h(z + t e^{i phi}) e^{-i phi} dt dphi`.
pub fn singular_quadrature_cauchy(
    h: &dyn Fn(Complex64) -> Complex64,
    z: Complex64,
    n_phi: usize,
    n_panels: usize,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n_phi {
        let phi = 2.0 * PI * k as f64 / n_phi as f64;
        let e = Complex64::from_polar(1.0, phi);
        let b = (z.conj() * e).re;
        let reach = -b + (b * b + 1.0 - z.norm_sqr()).sqrt();
        let dt = reach / n_panels as f64;
        let mut inner = Complex64::new(0.0, 0.0);
        for p in 0..n_panels {
            let mid = (p as f64 + 0.5) * dt;
            for (x, w) in GL5_X.iter().zip(GL5_W.iter()) {
                inner += h(z + (mid + 0.5 * dt * x) * e) * (0.5 * dt * w);
            }
        }
        acc += inner * e.conj();
    }
    -acc * (2.0 * PI / n_phi as f64) / PI
}
