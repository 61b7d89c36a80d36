use super::*;
use crate::domain::GridSpec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den.max(1e-300)).sqrt()
}

/// Smooth band-limited field built from low-degree monomials in z and conj z.
pub(crate) fn random_poly_field(
    grid: &Arc<PolarGrid>,
    rng: &mut ChaCha8Rng,
    deg: usize,
) -> AreaField {
    let mut coefs = Vec::new();
    for a in 0..=deg {
        for b in 0..=(deg - a) {
            coefs.push((a, b, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        }
    }
    AreaField::from_fn(grid, |z| {
        coefs
            .iter()
            .map(|&(a, b, k)| k * z.powu(a as u32) * z.conj().powu(b as u32))
            .sum()
    })
}

#[test]
fn transform_of_one_is_conj_z() {
    let g = PolarGrid::new(GridSpec::disk(32, 64)).unwrap();
    let one = AreaField::from_fn(&g, |_| c(1.0, 0.0));
    let out = cauchy_area(&one);
    let exact = g.sample(|z| z.conj());
    let err = out
        .data
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn transform_of_z_is_abs2_minus_one() {
    let g = PolarGrid::new(GridSpec::disk(24, 32)).unwrap();
    let h = AreaField::from_fn(&g, |z| z);
    let out = cauchy_area(&h);
    let exact = g.sample(|z| c(z.norm_sqr() - 1.0, 0.0));
    assert!(rel_err(&out.data, &exact) < 1e-12);
    let edge = cauchy_area_on_circle(&h, 1.0);
    assert!(edge.iter().all(|v| v.norm() < 1e-13));
}

#[test]
fn transform_over_annulus_excludes_the_hole() {
    let rho = 0.4;
    let g = PolarGrid::new(GridSpec::annulus(rho, 24, 32)).unwrap();
    let one = AreaField::from_fn(&g, |_| c(1.0, 0.0));
    let out = cauchy_area(&one);
    let exact = g.sample(|z| z.conj() - rho * rho / z);
    assert!(rel_err(&out.data, &exact) < 1e-12);
}

#[test]
fn dbar_inverts_transform_on_panelled_grid() {
    let g = PolarGrid::new(GridSpec::disk(40, 32).with_breaks(&[0.3, 0.6])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_poly_field(&g, &mut rng, 5);
    let back = dbar(&cauchy_area(&h));
    assert!(rel_err(&back.data, &h.data) < 1e-10);
}

#[test]
fn spectral_derivatives_of_monomials() {
    let g = PolarGrid::new(GridSpec::disk(16, 32)).unwrap();
    let f = AreaField::from_fn(&g, |z| z * z * z.conj() + z.conj().powu(3));
    let fz = dz(&f);
    let fb = dbar(&f);
    let ez = g.sample(|z| 2.0 * z * z.conj());
    let eb = g.sample(|z| z * z + 3.0 * z.conj() * z.conj());
    assert!(rel_err(&fz.data, &ez) < 1e-12);
    assert!(rel_err(&fb.data, &eb) < 1e-12);
}

#[test]
fn circle_plan_matches_grid_interpolation() {
    let g = PolarGrid::new(GridSpec::disk(24, 32)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = random_poly_field(&g, &mut rng, 4);
    let full = cauchy_area(&h);
    let r = 0.63;
    let on = cauchy_area_on_circle(&h, r);
    let pts: Vec<Complex64> = g
        .angles()
        .iter()
        .map(|&t| Complex64::from_polar(r, t))
        .collect();
    let interp = full.eval_at(&pts);
    assert!(rel_err(&on, &interp) < 1e-11);
}

#[test]
fn adjoint_pairing_holds() {
    let g = PolarGrid::new(GridSpec::disk(32, 64)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let alpha = random_poly_field(&g, &mut rng, 3);
        let h = random_poly_field(&g, &mut rng, 4);
        let gg = random_poly_field(&g, &mut rng, 4);
        let lhs = pairing(&apply_t_alpha(&alpha, &h).unwrap(), &gg).unwrap();
        let rhs = pairing(&apply_t_adjoint(&alpha, &gg).unwrap(), &h).unwrap();
        assert!(
            (lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()),
            "{lhs} {rhs}"
        );
    }
}

#[test]
fn grid_mismatch_is_reported() {
    let g1 = PolarGrid::new(GridSpec::disk(8, 16)).unwrap();
    let g2 = PolarGrid::new(GridSpec::disk(8, 16)).unwrap();
    let a = AreaField::zeros(&g1);
    let b = AreaField::zeros(&g2);
    assert!(matches!(
        apply_t_alpha(&a, &b),
        Err(HardyError::GridMismatch)
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn transform_is_complex_linear(seed in 0u64..1000, s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let g = PolarGrid::new(GridSpec::disk(12, 16)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_poly_field(&g, &mut rng, 3);
        let b = random_poly_field(&g, &mut rng, 3);
        let k = c(s, t);
        let mut comb = a.clone();
        comb.add_scaled(&b, k);
        let lhs = cauchy_area(&comb);
        let mut rhs = cauchy_area(&a);
        rhs.add_scaled(&cauchy_area(&b), k);
        prop_assert!(rel_err(&lhs.data, &rhs.data) < 1e-12);
    }
}
