//! Hardy norms over collar families and the maximum-principle diagnostic.

use num_complex::Complex64;

use crate::domain::{CircularDomain, CollarFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct HardyNorm {
    /// Largest circle norm at each collar level.
    pub per_level: Vec<f64>,
    /// Supremum over all levels.
    pub value: f64,
}

/// `max` over collar circles of `(mean |f|^p)^(1/p)`, with normalized arclength.
pub fn hardy_norm<F>(eval: F, collars: &CollarFamily, p: f64, n_samples: usize) -> HardyNorm
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let per_level: Vec<f64> = collars
        .circles
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|c| {
                    let vals = eval(&c.points(n_samples));
                    if p.is_infinite() {
                        vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
                    } else {
                        (vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n_samples as f64)
                            .powf(1.0 / p)
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let value = per_level.iter().copied().fold(0.0, f64::max);
    HardyNorm { per_level, value }
}

/// Returns `(max |f| over interior points inside the finest collar, max |f| on the finest collar)`.
pub fn max_principle_gap<F>(
    eval: F,
    domain: &CircularDomain,
    collars: &CollarFamily,
    interior: &[Complex64],
    n_samples: usize,
) -> (f64, f64)
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let eps = *collars.levels.last().unwrap();
    let margin = eps * collars.delta;
    let inside: Vec<Complex64> = interior
        .iter()
        .copied()
        .filter(|&z| domain.distance_to_boundary(z) >= margin)
        .collect();
    let imax = eval(&inside).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bmax = collars
        .finest()
        .iter()
        .map(|c| {
            eval(&c.points(n_samples))
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    (imax, bmax)
}
