//! Run configuration, read from JSON. Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use cond_hardy::domain::DomainDescriptor;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Dirichlet,
    Neumann,
    Conjugate,
    Bep,
    Validate,
    Bench,
}

/// A coefficient field: a builtin name such as `bump:0.3,0.2,0.6,0.5`, or a table file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Builtin(String),
    Table(TableSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    /// CSV with columns r, theta, value on a tensor grid.
    pub table: PathBuf,
}

/// Real samples on one boundary circle, as a function of the angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    Constant(f64),
    Series(Series),
    Csv(CsvSpec),
}

/// `constant + sum a cos(k t) + sum b sin(k t)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub cos: Vec<(u32, f64)>,
    #[serde(default)]
    pub sin: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSpec {
    /// CSV with columns theta, value (or theta, re, im for complex data) at uniform angles.
    pub csv: PathBuf,
}

/// Complex samples on the inner circle: `sum c_k e^{i k t}` or a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Powers(Powers),
    Csv(CsvSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Powers {
    /// `(k, re, im)` triples.
    pub powers: Vec<(i32, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_collars")]
    pub collar_levels: Vec<f64>,
    /// Radial and angular counts of the sample lattice written to fields.csv.
    #[serde(default = "default_field_r")]
    pub field_r: usize,
    #[serde(default = "default_field_theta")]
    pub field_theta: usize,
}

fn default_n_r() -> usize {
    48
}
fn default_n_theta() -> usize {
    64
}
fn default_collars() -> Vec<f64> {
    vec![0.2, 0.1, 0.05]
}
fn default_field_r() -> usize {
    16
}
fn default_field_theta() -> usize {
    64
}

impl Default for ResolutionSpec {
    fn default() -> Self {
        ResolutionSpec {
            n_r: default_n_r(),
            n_theta: default_n_theta(),
            collar_levels: default_collars(),
            field_r: default_field_r(),
            field_theta: default_field_theta(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rtol")]
    pub gmres_rtol: f64,
    #[serde(default = "default_max_iter")]
    pub gmres_max_iter: usize,
    #[serde(default = "default_restart")]
    pub gmres_restart: usize,
}

fn default_rtol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    2000
}
fn default_restart() -> usize {
    50
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gmres_rtol: default_rtol(),
            gmres_max_iter: default_max_iter(),
            gmres_restart: default_restart(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BepSpec {
    /// Arcs `[start, end]` of the inner circle, counter-clockwise, in radians.
    pub arcs: Vec<(f64, f64)>,
    pub basis_size: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    pub budgets: Vec<f64>,
    pub target: ComplexSpec,
    pub phi_outer: BoundarySpec,
    pub phi_inner: BoundarySpec,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSpec {
    /// Divides every resolution of the suite.
    #[serde(default = "one")]
    pub coarsen: usize,
    /// Checks to run, 1 to 14; empty runs all.
    #[serde(default)]
    pub checks: Vec<u32>,
    /// Test hook: flips the sign of the coefficient fed to the G-solver.
    #[serde(default)]
    pub inject_alpha_sign_flip: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default = "bench_n_r")]
    pub n_r: usize,
    #[serde(default = "bench_n_theta")]
    pub n_theta: usize,
    #[serde(default = "bench_repeats")]
    pub repeats: usize,
}

fn bench_n_r() -> usize {
    128
}
fn bench_n_theta() -> usize {
    256
}
fn bench_repeats() -> usize {
    5
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            n_r: bench_n_r(),
            n_theta: bench_n_theta(),
            repeats: bench_repeats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default = "default_domain")]
    pub domain: DomainDescriptor,
    /// Either `nu` or `sigma` may be given; the default is `nu = const:0`.
    #[serde(default)]
    pub nu: Option<FieldSpec>,
    #[serde(default)]
    pub sigma: Option<FieldSpec>,
    /// Bound on |nu|; defaults to the sampled supremum rounded up.
    #[serde(default)]
    pub kappa: Option<f64>,
    /// Boundary data, one entry per boundary circle (unit circle first).
    #[serde(default)]
    pub data: Vec<BoundarySpec>,
    #[serde(default)]
    pub resolution: ResolutionSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Seed for randomized tasks (validate, bench).
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub bep: Option<BepSpec>,
    #[serde(default)]
    pub validate: Option<ValidateSpec>,
    #[serde(default)]
    pub bench: Option<BenchSpec>,
}

fn default_domain() -> DomainDescriptor {
    DomainDescriptor::Disk
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("invalid configuration: {e}"))
    }

    /// Makes relative paths relative to the directory of the config file.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output);
        for f in [&mut self.nu, &mut self.sigma].into_iter().flatten() {
            if let FieldSpec::Table(t) = f {
                fix(&mut t.table);
            }
        }
        let fix_b = |b: &mut BoundarySpec| {
            if let BoundarySpec::Csv(c) = b {
                if c.csv.is_relative() {
                    c.csv = base.join(&c.csv);
                }
            }
        };
        self.data.iter_mut().for_each(fix_b);
        if let Some(b) = &mut self.bep {
            fix_b(&mut b.phi_outer);
            fix_b(&mut b.phi_inner);
            if let ComplexSpec::Csv(c) = &mut b.target {
                fix(&mut c.csv);
            }
        }
    }
}
