//! Bounded extremal problem on an annulus: best approximation of data on an
//! arc set `I` of the inner circle by traces of solutions, under a budget on
//! the real part elsewhere.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dirichlet::{ComponentSolver, ExtensionVariant, HardyField, NuExtension, Resolution};
use crate::domain::{Circle, CircularDomain};
use crate::error::{HardyError, Result};
use crate::hardy_nu::{GSolution, NuProfile};

/// Which basis element: seed `z^k` (or `i z^k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub k: i32,
    pub imaginary: bool,
}

/// Normalized traces of solutions from the seeds `z^k`, `i z^k`, |k| <= n_b.
pub struct TraceBasis {
    pub rho: f64,
    pub labels: Vec<BasisLabel>,
    /// Values on the unit circle and on the inner circle, per element.
    pub outer: Vec<Vec<Complex64>>,
    pub inner: Vec<Vec<Complex64>>,
    /// Scale applied to the raw element to normalize its trace.
    pub scales: Vec<f64>,
    /// Smallest eigenvalue of the Gram matrix of the normalized traces.
    pub gram_min: f64,
    domain: CircularDomain,
    comps: [Arc<ComponentSolver>; 2],
    sols: Vec<(usize, GSolution)>,
}

impl std::fmt::Debug for TraceBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TraceBasis")
            .field("rho", &self.rho)
            .field("len", &self.labels.len())
            .field("gram_min", &self.gram_min)
            .finish()
    }
}

fn inner_product(a: (&[Complex64], &[Complex64]), b: (&[Complex64], &[Complex64])) -> f64 {
    let m = |x: &[Complex64], y: &[Complex64]| {
        x.iter().zip(y).map(|(p, q)| (p * q.conj()).re).sum::<f64>() / x.len() as f64
    };
    m(a.0, b.0) + m(a.1, b.1)
}

impl TraceBasis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
    pub fn n_theta(&self) -> usize {
        self.outer[0].len()
    }

    /// Solution with coefficients x over the normalized basis.
    pub fn field(&self, x: &[f64]) -> HardyField {
        let mut acc: [Option<GSolution>; 2] = [None, None];
        for ((c, s), (&xb, &sc)) in self.sols.iter().zip(x.iter().zip(&self.scales)) {
            let a = xb * sc;
            match &mut acc[*c] {
                None => {
                    let mut t = s.clone();
                    t.w = t.w.scale(a.into());
                    t.circles
                        .iter_mut()
                        .for_each(|(_, v)| v.iter_mut().for_each(|z| *z *= a));
                    acc[*c] = Some(t);
                }
                Some(t) => {
                    t.w.add_scaled(&s.w, a.into());
                    for ((_, v), (_, w)) in t.circles.iter_mut().zip(&s.circles) {
                        v.iter_mut().zip(w).for_each(|(p, q)| *p += a * q);
                    }
                }
            }
        }
        let pieces = acc
            .into_iter()
            .enumerate()
            .filter_map(|(c, s)| s.map(|s| crate::dirichlet::piece(self.comps[c].clone(), s)))
            .collect();
        crate::dirichlet::field_from_pieces(self.domain.clone(), pieces)
    }

    /// Traces `(outer, inner)` for coefficients x.
    pub fn traces(&self, x: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n_theta();
        let mut o = vec![Complex64::new(0.0, 0.0); n];
        let mut i = vec![Complex64::new(0.0, 0.0); n];
        for (b, &xb) in x.iter().enumerate() {
            for l in 0..n {
                o[l] += xb * self.outer[b][l];
                i[l] += xb * self.inner[b][l];
            }
        }
        (o, i)
    }
}

/// Builds the trace basis on the annulus of inner radius rho.
pub fn build_trace_basis(
    rho: f64,
    nu: &NuProfile,
    kappa: f64,
    n_b: usize,
    res: Resolution,
) -> Result<TraceBasis> {
    let domain = CircularDomain::annulus(rho)?;
    if 2 * n_b + 2 > res.n_theta {
        return Err(HardyError::BadResolution(format!(
            "basis size {n_b} needs more than {} angles",
            res.n_theta
        )));
    }
    let ext = NuExtension::new(&domain, nu, kappa, ExtensionVariant::Reflect)?;
    let c0 = Arc::new(ComponentSolver::new(&ext, 0, res, &[rho])?);
    let c1 = Arc::new(ComponentSolver::new(&ext, 1, res, &[rho])?);
    let mut labels = Vec::new();
    for k in -(n_b as i32)..=(n_b as i32) {
        labels.push(BasisLabel {
            k,
            imaginary: false,
        });
        labels.push(BasisLabel { k, imaginary: true });
    }
    let i = Complex64::new(0.0, 1.0);
    let unit = Circle::unit();
    let hole = domain.holes()[0];
    let built: Vec<(usize, GSolution, Vec<Complex64>, Vec<Complex64>)> = labels
        .par_iter()
        .map(|l| {
            let (c, comp, seed): (
                usize,
                &Arc<ComponentSolver>,
                Box<dyn Fn(Complex64) -> Complex64 + Sync>,
            ) = if l.k >= 0 {
                let k = l.k;
                let a = if l.imaginary {
                    i
                } else {
                    Complex64::new(1.0, 0.0)
                };
                (0, &c0, Box::new(move |z: Complex64| a * z.powi(k)))
            } else {
                // conj(F(rho / conj z)) with F = zeta^m gives rho^m z^-m
                let m = -l.k;
                let a = if l.imaginary {
                    -i
                } else {
                    Complex64::new(1.0, 0.0)
                } * rho.powi(-m);
                (1, &c1, Box::new(move |z: Complex64| a * z.powi(m)))
            };
            let s = comp.g.solve(&comp.source(|z| seed(z)), None)?;
            let o = comp.values_on(&s, &unit);
            let h = comp.values_on(&s, &hole);
            Ok((c, s, o, h))
        })
        .collect::<Result<_>>()?;
    let mut outer: Vec<Vec<Complex64>> = Vec::new();
    let mut inner: Vec<Vec<Complex64>> = Vec::new();
    let mut scales = Vec::new();
    let mut sols = Vec::new();
    for (c, s, o, h) in built {
        let nrm = inner_product((&o, &h), (&o, &h)).sqrt();
        let sc = 1.0 / nrm;
        outer.push(o.iter().map(|v| v * sc).collect());
        inner.push(h.iter().map(|v| v * sc).collect());
        scales.push(sc);
        sols.push((c, s));
    }
    let nb = labels.len();
    let mut gram = DMatrix::zeros(nb, nb);
    for a in 0..nb {
        for b in 0..nb {
            gram[(a, b)] = inner_product((&outer[a], &inner[a]), (&outer[b], &inner[b]));
        }
    }
    let gram_min = gram.symmetric_eigenvalues().min();
    if gram_min < 1e-10 {
        return Err(HardyError::IllConditioned(gram_min));
    }
    Ok(TraceBasis {
        rho,
        labels,
        outer,
        inner,
        scales,
        gram_min,
        domain,
        comps: [c0, c1],
        sols,
    })
}

/// Data of the extremal problem. `target` and `phi_inner` are sampled on the
/// inner circle, `phi_outer` on the unit circle, all at the basis angles;
/// samples outside their set are ignored.
#[derive(Debug, Clone)]
pub struct BepProblem {
    pub arcs: Vec<(f64, f64)>,
    pub target: Vec<Complex64>,
    pub phi_outer: Vec<f64>,
    pub phi_inner: Vec<f64>,
    pub budget: f64,
    pub p: f64,
    /// Starting value for the multiplier search.
    pub lambda_start: f64,
}

impl BepProblem {
    pub fn new(
        arcs: Vec<(f64, f64)>,
        target: Vec<Complex64>,
        phi_outer: Vec<f64>,
        phi_inner: Vec<f64>,
        budget: f64,
    ) -> Self {
        BepProblem {
            arcs,
            target,
            phi_outer,
            phi_inner,
            budget,
            p: 2.0,
            lambda_start: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BepSolution {
    pub coeffs: Vec<f64>,
    pub outer: Vec<Complex64>,
    pub inner: Vec<Complex64>,
    pub objective: f64,
    pub constraint: f64,
    pub lambda: f64,
    pub saturated: bool,
    pub iterations: usize,
    /// Relative stationarity residual of the Lagrangian at the returned point.
    pub kkt_residual: f64,
}

/// Membership of angle t in an arc `[a, b]` taken counter-clockwise.
pub fn in_arcs(arcs: &[(f64, f64)], t: f64) -> bool {
    arcs.iter().any(|&(a, b)| {
        let len = (b - a).rem_euclid(2.0 * PI);
        let len = if len == 0.0 && b != a { 2.0 * PI } else { len };
        (t - a).rem_euclid(2.0 * PI) <= len
    })
}

struct Layout {
    /// Rows on I: (basis values, target) per sample.
    on_i: Vec<(usize, Complex64)>,
    /// Rows on J: (circle, sample, phi).
    on_j: Vec<(usize, usize, f64)>,
    n: usize,
}

fn layout(basis: &TraceBasis, prob: &BepProblem) -> Result<Layout> {
    let n = basis.n_theta();
    if prob.target.len() != n || prob.phi_outer.len() != n || prob.phi_inner.len() != n {
        return Err(HardyError::BadData(format!(
            "BEP data must have {n} samples per circle"
        )));
    }
    if !(prob.budget > 0.0) {
        return Err(HardyError::BadData("budget must be positive".into()));
    }
    if !(prob.p > 1.0 && prob.p.is_finite()) {
        return Err(HardyError::BadData("p must lie in (1, inf)".into()));
    }
    let mut on_i = Vec::new();
    let mut on_j: Vec<(usize, usize, f64)> = (0..n).map(|l| (0, l, prob.phi_outer[l])).collect();
    for l in 0..n {
        let t = 2.0 * PI * l as f64 / n as f64;
        if in_arcs(&prob.arcs, t) {
            on_i.push((l, prob.target[l]));
        } else {
            on_j.push((1, l, prob.phi_inner[l]));
        }
    }
    if on_i.is_empty() {
        return Err(HardyError::BadData(
            "the arc set contains no samples".into(),
        ));
    }
    Ok(Layout { on_i, on_j, n })
}

fn kkt(basis: &TraceBasis, lay: &Layout, x: &[f64], p: f64, lam: f64) -> f64 {
    let (o, i) = basis.traces(x);
    let nb = basis.len();
    let mut go = vec![0.0; nb];
    let mut gc = vec![0.0; nb];
    for &(l, t) in &lay.on_i {
        let r = t - i[l];
        let w = p * r.norm().max(1e-300).powf(p - 2.0);
        for b in 0..nb {
            go[b] -= w * (r.conj() * basis.inner[b][l]).re;
        }
    }
    for &(c, l, f) in &lay.on_j {
        let g = if c == 0 { o[l] } else { i[l] };
        let r = g.re - f;
        let w = p * r.abs().max(1e-300).powf(p - 2.0) * r;
        for b in 0..nb {
            gc[b] += lam
                * w
                * if c == 0 {
                    basis.outer[b][l].re
                } else {
                    basis.inner[b][l].re
                };
        }
    }
    let n2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let sum: Vec<f64> = go.iter().zip(&gc).map(|(a, b)| a + b).collect();
    n2(&sum) / (n2(&go) + n2(&gc) + 1e-300)
}

fn norms(basis: &TraceBasis, lay: &Layout, x: &[f64], p: f64) -> (f64, f64) {
    let (o, i) = basis.traces(x);
    let n = lay.n as f64;
    let obj = lay
        .on_i
        .iter()
        .map(|&(l, t)| (t - i[l]).norm().powf(p))
        .sum::<f64>()
        / n;
    let con = lay
        .on_j
        .iter()
        .map(|&(c, l, f)| ((if c == 0 { o[l] } else { i[l] }).re - f).abs().powf(p))
        .sum::<f64>()
        / n;
    (obj.powf(1.0 / p), con.powf(1.0 / p))
}

/// Weighted least squares `sum wi |t - g|^2 + lam sum wj (Re g - phi)^2`.
fn weighted_ls(
    basis: &TraceBasis,
    lay: &Layout,
    lam: f64,
    wi: &[f64],
    wj: &[f64],
    use_i: bool,
) -> Result<Vec<f64>> {
    let nb = basis.len();
    let rows_i = if use_i { 2 * lay.on_i.len() } else { 0 };
    let rows_j = if lam > 0.0 { lay.on_j.len() } else { 0 };
    let mut a = DMatrix::zeros(rows_i + rows_j, nb);
    let mut rhs = DVector::zeros(rows_i + rows_j);
    if use_i {
        for (r, &(l, t)) in lay.on_i.iter().enumerate() {
            let s = wi[r].sqrt();
            for b in 0..nb {
                a[(2 * r, b)] = s * basis.inner[b][l].re;
                a[(2 * r + 1, b)] = s * basis.inner[b][l].im;
            }
            rhs[2 * r] = s * t.re;
            rhs[2 * r + 1] = s * t.im;
        }
    }
    if lam > 0.0 {
        for (r, &(c, l, f)) in lay.on_j.iter().enumerate() {
            let s = (lam * wj[r]).sqrt();
            for b in 0..nb {
                a[(rows_i + r, b)] = s * if c == 0 {
                    basis.outer[b][l].re
                } else {
                    basis.inner[b][l].re
                };
            }
            rhs[rows_i + r] = s * f;
        }
    }
    let svd = a.svd(true, true);
    let tol = 1e-13 * svd.singular_values.max();
    let x = svd
        .solve(&rhs, tol)
        .map_err(|e| HardyError::SolverFailure(e.into()))?;
    Ok(x.iter().copied().collect())
}

/// Inner solve for a fixed multiplier; iteratively reweighted when p != 2.
fn penalized(
    basis: &TraceBasis,
    lay: &Layout,
    lam: f64,
    p: f64,
    use_i: bool,
) -> Result<(Vec<f64>, usize)> {
    let mut wi = vec![1.0; lay.on_i.len()];
    let mut wj = vec![1.0; lay.on_j.len()];
    let mut x = weighted_ls(basis, lay, lam, &wi, &wj, use_i)?;
    if p == 2.0 {
        return Ok((x, 1));
    }
    let eps = 1e-10;
    for it in 0..200 {
        let (o, i) = basis.traces(&x);
        for (w, &(l, t)) in wi.iter_mut().zip(&lay.on_i) {
            *w = (t - i[l]).norm().max(eps).powf(p - 2.0);
        }
        for (w, &(c, l, f)) in wj.iter_mut().zip(&lay.on_j) {
            *w = ((if c == 0 { o[l] } else { i[l] }).re - f)
                .abs()
                .max(eps)
                .powf(p - 2.0);
        }
        let nx = weighted_ls(basis, lay, lam, &wi, &wj, use_i)?;
        let change = nx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let size = nx.iter().map(|v| v.abs()).fold(0.0, f64::max);
        x = nx;
        if change <= 1e-12 * (1.0 + size) {
            return Ok((x, it + 2));
        }
    }
    Ok((x, 201))
}

pub fn solve_bep(basis: &TraceBasis, prob: &BepProblem) -> Result<BepSolution> {
    let lay = layout(basis, prob)?;
    let p = prob.p;
    let m = prob.budget;
    let finish = |x: Vec<f64>, lam: f64, saturated: bool, iterations: usize| {
        let (objective, constraint) = norms(basis, &lay, &x, p);
        let (outer, inner) = basis.traces(&x);
        let kkt_residual = kkt(basis, &lay, &x, p, lam);
        BepSolution {
            coeffs: x,
            outer,
            inner,
            objective,
            constraint,
            lambda: lam,
            saturated,
            iterations,
            kkt_residual,
        }
    };
    let (x0, it0) = penalized(basis, &lay, 0.0, p, true)?;
    if norms(basis, &lay, &x0, p).1 <= m {
        return Ok(finish(x0, 0.0, false, it0));
    }
    let (xinf, _) = penalized(basis, &lay, 1.0, p, false)?;
    let inf = norms(basis, &lay, &xinf, p).1;
    if inf > m * (1.0 - 1e-9) {
        return Err(HardyError::BudgetUnreachable {
            budget: m,
            infimum: inf,
        });
    }
    let c = |lam: f64| -> Result<(f64, Vec<f64>)> {
        let (x, _) = penalized(basis, &lay, lam, p, true)?;
        Ok((norms(basis, &lay, &x, p).1, x))
    };
    // bracket in log lambda
    let mut lo = prob.lambda_start.max(1e-300).ln();
    let mut hi = lo;
    let mut evals = 0;
    if c(lo.exp())?.0 > m {
        loop {
            hi += 2.0_f64.ln() * 4.0;
            evals += 1;
            if c(hi.exp())?.0 <= m {
                break;
            }
            lo = hi;
            if hi > 700.0 {
                return Err(HardyError::BudgetUnreachable {
                    budget: m,
                    infimum: inf,
                });
            }
        }
    } else {
        loop {
            lo -= 2.0_f64.ln() * 4.0;
            evals += 1;
            if c(lo.exp())?.0 > m {
                break;
            }
            hi = lo;
            if lo < -700.0 {
                return Ok(finish(c(lo.exp())?.1, lo.exp(), true, evals));
            }
        }
    }
    let mut best = c(hi.exp())?;
    for _ in 0..200 {
        evals += 1;
        let mid = 0.5 * (lo + hi);
        let v = c(mid.exp())?;
        if v.0 > m {
            lo = mid;
        } else {
            hi = mid;
            best = v;
        }
        if (best.0 - m).abs() <= 1e-12 * m || hi - lo < 1e-15 {
            break;
        }
    }
    Ok(finish(best.1, hi.exp(), true, evals))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res() -> Resolution {
        Resolution::new(24, 64)
    }

    #[test]
    fn free_basis_is_monomials_and_orthonormal() {
        let b = build_trace_basis(0.5, &NuProfile::Const(0.0), 0.0, 3, res()).unwrap();
        assert!((b.gram_min - 1.0).abs() < 1e-10);
        for (e, l) in b.labels.iter().enumerate() {
            let a = if l.imaginary {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(1.0, 0.0)
            };
            for (j, v) in b.inner[e].iter().enumerate() {
                let z = Complex64::from_polar(0.5, 2.0 * PI * j as f64 / 64.0);
                assert!((v / b.scales[e] - a * z.powi(l.k)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_elements_solve_the_equation() {
        let nu = NuProfile::Bump {
            amp: 0.3,
            center: Complex64::new(0.2, 0.6),
            width: 0.5,
        };
        let b = build_trace_basis(0.5, &nu, 0.3, 2, Resolution::new(96, 64)).unwrap();
        for e in 0..b.len() {
            let mut x = vec![0.0; b.len()];
            x[e] = 1.0;
            let r = b.field(&x).piece_residuals();
            assert!(r.iter().all(|v| *v < 1e-6), "{:?} {r:?}", b.labels[e]);
        }
    }

    fn sample_problem(b: &TraceBasis, budget: f64) -> BepProblem {
        let n = b.n_theta();
        let th: Vec<f64> = (0..n).map(|l| 2.0 * PI * l as f64 / n as f64).collect();
        let target = th
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -t) + 0.3 * Complex64::from_polar(1.0, -4.0 * t))
            .collect();
        let phi_outer = th.iter().map(|t| (2.0 * t).cos()).collect();
        let phi_inner = th.iter().map(|t| 0.2 * t.sin()).collect();
        BepProblem::new(vec![(0.0, 2.0)], target, phi_outer, phi_inner, budget)
    }

    #[test]
    fn feasible_data_is_interpolated() {
        let b = build_trace_basis(
            0.5,
            &NuProfile::XDamped(0.2),
            0.2,
            2,
            Resolution::new(32, 64),
        )
        .unwrap();
        let mut x = vec![0.0; b.len()];
        x[3] = 0.7;
        x[6] = -0.2;
        let (o, i) = b.traces(&x);
        let mut prob = sample_problem(&b, 1e6);
        prob.target = i;
        prob.phi_outer = o.iter().map(|v| v.re).collect();
        let s = solve_bep(&b, &prob).unwrap();
        assert_eq!(s.lambda, 0.0);
        assert!(!s.saturated);
        assert!(s.objective < 1e-9);
    }

    #[test]
    fn saturation_matches_multiplier_scan() {
        let b = build_trace_basis(0.5, &NuProfile::Const(0.0), 0.0, 2, res()).unwrap();
        let prob = sample_problem(&b, 0.3);
        let s = solve_bep(&b, &prob).unwrap();
        assert!(s.saturated);
        assert!((s.constraint - 0.3).abs() <= 1e-6 * 0.3);
        // brute-force scan: the feasible point with smallest objective
        let lay = layout(&b, &prob).unwrap();
        let mut best = f64::INFINITY;
        for k in 0..4000 {
            let lam = (-10.0 + 20.0 * k as f64 / 4000.0_f64).exp();
            let (x, _) = penalized(&b, &lay, lam, 2.0, true).unwrap();
            let (o, c) = norms(&b, &lay, &x, 2.0);
            if c <= 0.3 {
                best = best.min(o);
            }
        }
        assert!(s.objective <= best + 1e-9);
        assert!(s.objective >= best - 1e-3 * best);
        // a different starting multiplier lands on the same solution
        let mut p2 = prob.clone();
        p2.lambda_start = 37.0;
        let s2 = solve_bep(&b, &p2).unwrap();
        for (a, c) in s.coeffs.iter().zip(&s2.coeffs) {
            assert!((a - c).abs() < 1e-8);
        }
    }

    #[test]
    fn objective_decreases_with_budget() {
        let b = build_trace_basis(
            0.5,
            &NuProfile::Radial(vec![0.1, 0.1]),
            0.3,
            2,
            Resolution::new(32, 64),
        )
        .unwrap();
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let m = 0.05 * 2.0_f64.powi(k);
            let s = solve_bep(&b, &sample_problem(&b, m)).unwrap();
            assert!(s.objective <= last + 1e-12);
            assert!(s.constraint <= m * (1.0 + 1e-9));
            last = s.objective;
        }
    }

    #[test]
    fn unconstrained_case_is_least_squares() {
        let b = build_trace_basis(0.5, &NuProfile::Const(0.1), 0.1, 2, res()).unwrap();
        let prob = sample_problem(&b, 1e6);
        let s = solve_bep(&b, &prob).unwrap();
        assert_eq!(s.lambda, 0.0);
        let lay = layout(&b, &prob).unwrap();
        let nb = b.len();
        let mut g: DMatrix<f64> = DMatrix::zeros(nb, nb);
        let mut r: DVector<f64> = DVector::zeros(nb);
        for &(l, t) in &lay.on_i {
            for a in 0..nb {
                r[a] += (b.inner[a][l].conj() * t).re;
                for c in 0..nb {
                    g[(a, c)] += (b.inner[a][l].conj() * b.inner[c][l]).re;
                }
            }
        }
        let x = g.lu().solve(&r).unwrap();
        for (a, c) in s.coeffs.iter().zip(x.iter()) {
            assert!((a - c).abs() < 1e-9, "{a} {c}");
        }
    }

    #[test]
    fn budget_below_infimum_is_reported() {
        let b = build_trace_basis(0.5, &NuProfile::Const(0.0), 0.0, 1, res()).unwrap();
        let prob = sample_problem(&b, 1e-6);
        assert!(matches!(
            solve_bep(&b, &prob),
            Err(HardyError::BudgetUnreachable { .. })
        ));
    }

    #[test]
    fn non_quadratic_exponent_respects_budget() {
        let b = build_trace_basis(0.5, &NuProfile::Const(0.0), 0.0, 2, res()).unwrap();
        let mut prob = sample_problem(&b, 0.4);
        prob.p = 1.5;
        let s = solve_bep(&b, &prob).unwrap();
        assert!(s.constraint <= 0.4 * (1.0 + 1e-9));
        assert!(s.saturated);
        assert!((s.constraint - 0.4).abs() < 1e-6 * 0.4);
        assert!(s.kkt_residual < 1e-4, "{}", s.kkt_residual);
    }
}
