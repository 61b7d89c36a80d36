//! Polar tensor grids: Gauss–Legendre panels in radius, uniform angles.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::gauss::{bary_eval_weights, diff_matrix, gauss_bary_weights, gauss_legendre};
use crate::areaops::CauchyPlan;
use crate::error::{HardyError, Result};

static NEXT_GRID_ID: AtomicU64 = AtomicU64::new(1);

/// Requested resolution of a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_in: f64,
    pub r_out: f64,
    /// Radii where the sampled fields may have kinks; panels break there.
    pub breaks: Vec<f64>,
}

impl GridSpec {
    pub fn disk(n_r: usize, n_theta: usize) -> Self {
        GridSpec {
            n_r,
            n_theta,
            r_in: 0.0,
            r_out: 1.0,
            breaks: vec![],
        }
    }

    pub fn annulus(rho: f64, n_r: usize, n_theta: usize) -> Self {
        GridSpec {
            n_r,
            n_theta,
            r_in: rho,
            r_out: 1.0,
            breaks: vec![],
        }
    }

    pub fn with_breaks(mut self, breaks: &[f64]) -> Self {
        self.breaks = breaks.to_vec();
        self
    }
}

/// One radial panel with its own Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub start: usize,
    pub len: usize,
    pub(crate) bary: Vec<f64>,
    /// d/dr on this panel's nodes, row-major.
    pub(crate) diff: Vec<f64>,
}

impl Panel {
    fn radii<'a>(&self, all: &'a [f64]) -> &'a [f64] {
        &all[self.start..self.start + self.len]
    }
}

pub struct PolarGrid {
    id: u64,
    spec: GridSpec,
    pub(crate) panels: Vec<Panel>,
    radii: Vec<f64>,
    rweights: Vec<f64>,
    angles: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    fft2: Arc<dyn Fft<f64>>,
    ifft2: Arc<dyn Fft<f64>>,
    pub(crate) cauchy: OnceLock<Arc<CauchyPlan>>,
    pub(crate) edge_plans: Mutex<Vec<(u64, Arc<CauchyPlan>)>>,
}

impl std::fmt::Debug for PolarGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PolarGrid")
            .field("id", &self.id)
            .field("spec", &self.spec)
            .finish()
    }
}

impl PolarGrid {
    pub fn new(spec: GridSpec) -> Result<Arc<Self>> {
        let GridSpec {
            n_r,
            n_theta,
            r_in,
            r_out,
            ..
        } = spec.clone();
        if n_r < 4 {
            return Err(HardyError::BadResolution(format!("n_r = {n_r} < 4")));
        }
        if n_theta < 8 || !n_theta.is_power_of_two() {
            return Err(HardyError::BadResolution(format!(
                "n_theta = {n_theta} must be a power of two >= 8"
            )));
        }
        if !(r_in >= 0.0 && r_out > r_in) {
            return Err(HardyError::BadResolution(format!(
                "radial range [{r_in}, {r_out}]"
            )));
        }
        let mut cuts: Vec<f64> = spec
            .breaks
            .iter()
            .copied()
            .filter(|&b| b > r_in + 1e-9 && b < r_out - 1e-9)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let mut edges = vec![r_in];
        edges.extend(cuts);
        edges.push(r_out);
        let counts = allocate_nodes(&edges, n_r)?;

        let mut panels = Vec::new();
        let mut radii = Vec::with_capacity(n_r);
        let mut rweights = Vec::with_capacity(n_r);
        for (p, &cnt) in counts.iter().enumerate() {
            let (a, b) = (edges[p], edges[p + 1]);
            let (x, w) = gauss_legendre(cnt);
            let bw = gauss_bary_weights(&x, &w);
            let half = 0.5 * (b - a);
            let nodes: Vec<f64> = x.iter().map(|t| a + half * (t + 1.0)).collect();
            let mut diff = diff_matrix(&x, &bw);
            for v in diff.iter_mut() {
                *v /= half;
            }
            let start = radii.len();
            radii.extend_from_slice(&nodes);
            rweights.extend(w.iter().map(|wi| wi * half));
            panels.push(Panel {
                a,
                b,
                start,
                len: cnt,
                bary: bw,
                diff,
            });
        }

        let mut planner = FftPlanner::new();
        let angles = (0..n_theta)
            .map(|k| 2.0 * PI * k as f64 / n_theta as f64)
            .collect();
        Ok(Arc::new(PolarGrid {
            id: NEXT_GRID_ID.fetch_add(1, Ordering::Relaxed),
            spec,
            panels,
            radii,
            rweights,
            angles,
            fft: planner.plan_fft_forward(n_theta),
            ifft: planner.plan_fft_inverse(n_theta),
            fft2: planner.plan_fft_forward(2 * n_theta),
            ifft2: planner.plan_fft_inverse(2 * n_theta),
            cauchy: OnceLock::new(),
            edge_plans: Mutex::new(Vec::new()),
        }))
    }

    pub fn id(&self) -> u64 {
        self.id
    }
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }
    pub fn n_r(&self) -> usize {
        self.radii.len()
    }
    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }
    pub fn len(&self) -> usize {
        self.n_r() * self.n_theta()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn r_in(&self) -> f64 {
        self.spec.r_in
    }
    pub fn r_out(&self) -> f64 {
        self.spec.r_out
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn radial_weights(&self) -> &[f64] {
        &self.rweights
    }
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    /// Largest retained Fourier mode; the Nyquist mode is always discarded.
    pub fn k_max(&self) -> usize {
        self.n_theta() / 2 - 1
    }

    pub fn point(&self, i: usize, k: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angles[k])
    }

    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_r() {
            for k in 0..self.n_theta() {
                out.push(self.point(i, k));
            }
        }
        out
    }

    /// Area weight of node (i, k): `w_i * r_i * 2 pi / N`.
    pub fn area_weight(&self, i: usize) -> f64 {
        self.rweights[i] * self.radii[i] * 2.0 * PI / self.n_theta() as f64
    }

    pub fn area_weights(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_r() {
            let w = self.area_weight(i);
            out.extend(std::iter::repeat_n(w, self.n_theta()));
        }
        out
    }

    /// Signed Fourier mode stored at FFT slot `k`.
    pub fn mode_of(&self, k: usize) -> i64 {
        let n = self.n_theta();
        if k < n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// FFT slot of a mode with |m| <= k_max.
    pub fn slot_of(&self, m: i64) -> usize {
        let n = self.n_theta() as i64;
        m.rem_euclid(n) as usize
    }

    /// Normalised Fourier coefficients of one ring, Nyquist zeroed.
    pub fn ring_forward(&self, ring: &mut [Complex64]) {
        self.fft.process(ring);
        let s = 1.0 / self.n_theta() as f64;
        for v in ring.iter_mut() {
            *v *= s;
        }
        ring[self.n_theta() / 2] = Complex64::new(0.0, 0.0);
    }

    pub fn ring_inverse(&self, ring: &mut [Complex64]) {
        self.ifft.process(ring);
    }

    pub(crate) fn fft2(&self) -> (&Arc<dyn Fft<f64>>, &Arc<dyn Fft<f64>>) {
        (&self.fft2, &self.ifft2)
    }

    /// Samples to Fourier coefficients ring by ring.
    pub fn to_modes(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        for ring in out.chunks_mut(self.n_theta()) {
            self.ring_forward(ring);
        }
        out
    }

    pub fn from_modes(&self, modes: &[Complex64]) -> Vec<Complex64> {
        let mut out = modes.to_vec();
        for ring in out.chunks_mut(self.n_theta()) {
            self.ring_inverse(ring);
        }
        out
    }

    /// Radial derivative of mode profiles, panel by panel.
    pub fn radial_derivative(&self, modes: &[Complex64]) -> Vec<Complex64> {
        let nt = self.n_theta();
        let mut out = vec![Complex64::new(0.0, 0.0); modes.len()];
        for p in &self.panels {
            for i in 0..p.len {
                let row = &p.diff[i * p.len..(i + 1) * p.len];
                let dst = (p.start + i) * nt;
                for (j, &d) in row.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let src = (p.start + j) * nt;
                    for k in 0..nt {
                        out[dst + k] += modes[src + k] * d;
                    }
                }
            }
        }
        out
    }

    /// Panel containing radius r (clamped to the grid range).
    pub fn panel_of(&self, r: f64) -> usize {
        for (p, panel) in self.panels.iter().enumerate() {
            if r <= panel.b {
                return p;
            }
        }
        self.panels.len() - 1
    }

    /// Interpolation weights from panel `p` nodes to radius r.
    pub fn radial_weights_at(&self, p: usize, r: f64) -> Vec<f64> {
        let panel = &self.panels[p];
        let half = 0.5 * (panel.b - panel.a);
        let t = (r - panel.a) / half - 1.0;
        let ref_nodes: Vec<f64> = panel
            .radii(&self.radii)
            .iter()
            .map(|x| (x - panel.a) / half - 1.0)
            .collect();
        bary_eval_weights(&ref_nodes, &panel.bary, t)
    }

    /// Precomputed evaluation of grid fields at arbitrary points (grid coordinates).
    pub fn interpolator(&self, pts: &[Complex64]) -> Interpolator {
        let nt = self.n_theta();
        let entries = pts
            .iter()
            .map(|z| {
                let r = z.norm();
                let th = z.arg();
                let p = self.panel_of(r);
                let rw = self.radial_weights_at(p, r);
                let aw: Vec<f64> = (0..nt)
                    .map(|k| periodic_kernel(nt, th - self.angles[k]))
                    .collect();
                InterpEntry {
                    start: self.panels[p].start,
                    rw,
                    aw,
                }
            })
            .collect();
        Interpolator {
            grid_id: self.id,
            n_theta: nt,
            entries,
        }
    }

    /// Samples a function at the grid nodes.
    pub fn sample<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points().into_iter().map(f).collect()
    }
}

/// Dirichlet kernel of the band |k| <= N/2 - 1.
fn periodic_kernel(n: usize, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    let nf = n as f64;
    if s.abs() < 1e-13 {
        // x is a multiple of 2 pi, where every retained mode equals one
        return (nf - 1.0) / nf;
    }
    ((nf - 1.0) * 0.5 * x).sin() / (nf * s)
}

fn allocate_nodes(edges: &[f64], n_r: usize) -> Result<Vec<usize>> {
    let np = edges.len() - 1;
    let min_per = 6usize.min(n_r);
    if np * min_per > n_r {
        return Err(HardyError::BadResolution(format!(
            "n_r = {n_r} too small for {np} radial panels"
        )));
    }
    let total = edges[np] - edges[0];
    let mut counts: Vec<usize> = (0..np)
        .map(|p| {
            let share = (edges[p + 1] - edges[p]) / total * n_r as f64;
            (share.round() as usize).max(min_per)
        })
        .collect();
    loop {
        let s: usize = counts.iter().sum();
        if s == n_r {
            break;
        }
        if s > n_r {
            let idx = (0..np)
                .filter(|&p| counts[p] > min_per)
                .max_by_key(|&p| counts[p])
                .unwrap();
            counts[idx] -= 1;
        } else {
            let idx = (0..np).max_by(|&a, &b| {
                let la = (edges[a + 1] - edges[a]) / counts[a] as f64;
                let lb = (edges[b + 1] - edges[b]) / counts[b] as f64;
                la.partial_cmp(&lb).unwrap()
            });
            counts[idx.unwrap()] += 1;
        }
    }
    Ok(counts)
}

#[derive(Debug, Clone)]
struct InterpEntry {
    start: usize,
    rw: Vec<f64>,
    aw: Vec<f64>,
}

/// Linear evaluation map from grid samples to a fixed point set.
#[derive(Debug, Clone)]
pub struct Interpolator {
    grid_id: u64,
    n_theta: usize,
    entries: Vec<InterpEntry>,
}

impl Interpolator {
    pub fn grid_id(&self) -> u64 {
        self.grid_id
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply(&self, data: &[Complex64]) -> Vec<Complex64> {
        let nt = self.n_theta;
        self.entries
            .iter()
            .map(|e| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &l) in e.rw.iter().enumerate() {
                    let ring = &data[(e.start + j) * nt..(e.start + j + 1) * nt];
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..nt {
                        s += ring[k] * e.aw[k];
                    }
                    acc += s * l;
                }
                acc
            })
            .collect()
    }

    pub fn apply_real(&self, data: &[f64]) -> Vec<f64> {
        let nt = self.n_theta;
        self.entries
            .iter()
            .map(|e| {
                let mut acc = 0.0;
                for (j, &l) in e.rw.iter().enumerate() {
                    let ring = &data[(e.start + j) * nt..(e.start + j + 1) * nt];
                    let s: f64 = ring.iter().zip(&e.aw).map(|(a, b)| a * b).sum();
                    acc += s * l;
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_quadrature_integrates_polynomials() {
        let g = PolarGrid::new(GridSpec::disk(16, 32)).unwrap();
        let w = g.area_weights();
        let pts = g.points();
        // integral over the unit disk of |z|^(2j) = pi / (j + 1)
        for j in 0..8 {
            let q: f64 = pts
                .iter()
                .zip(&w)
                .map(|(z, w)| w * z.norm_sqr().powi(j))
                .sum();
            assert!((q - PI / (j as f64 + 1.0)).abs() < 1e-13);
        }
        let total: f64 = w.iter().sum();
        assert!((total - PI).abs() < 1e-13);
    }

    #[test]
    fn panels_respect_breaks() {
        let g = PolarGrid::new(GridSpec::disk(48, 32).with_breaks(&[0.25, 0.5])).unwrap();
        assert_eq!(g.panels().len(), 3);
        assert_eq!(g.n_r(), 48);
        let total: f64 = g.area_weights().iter().sum();
        assert!((total - PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(matches!(
            PolarGrid::new(GridSpec::disk(3, 32)),
            Err(HardyError::BadResolution(_))
        ));
        assert!(matches!(
            PolarGrid::new(GridSpec::disk(8, 48)),
            Err(HardyError::BadResolution(_))
        ));
    }

    #[test]
    fn interpolation_reproduces_smooth_fields() {
        let g = PolarGrid::new(GridSpec::annulus(0.3, 48, 32).with_breaks(&[0.6])).unwrap();
        let f = |z: Complex64| z * z * z.conj() + Complex64::new(0.0, 1.0) / z;
        let data = g.sample(f);
        let pts = [
            Complex64::new(0.5, 0.2),
            Complex64::new(-0.1, -0.8),
            Complex64::from_polar(0.6, 1.0),
        ];
        let vals = g.interpolator(&pts).apply(&data);
        for (z, v) in pts.iter().zip(vals) {
            assert!((v - f(*z)).norm() < 1e-9, "{z} {v} {}", f(*z));
        }
    }
}
