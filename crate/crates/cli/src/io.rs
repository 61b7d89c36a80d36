//! CSV import and export. Numbers are written with 17 significant digits.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use cond_hardy::circfft::{fourier, real_basis_coeffs, real_basis_eval, synthesize};
use cond_hardy::hardy_nu::{nu_of_sigma, NuProfile, TabulatedNu};
use num_complex::Complex64;

use crate::config::{BoundarySpec, ComplexSpec, FieldSpec};
use crate::error::CliError;

pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Writes a header line and one row per record.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(header).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.write_record(r.iter().map(|&v| fmt(v)))
            .map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Reads a numeric CSV with a header line.
pub fn read_csv(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() != columns {
            return Err(CliError::Config(format!(
                "{}: row {} has {} columns, expected {columns}",
                path.display(),
                i + 2,
                rec.len()
            )));
        }
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("{}: bad number {s:?}", path.display())))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config(format!(
                "{}: non-finite value",
                path.display()
            )));
        }
        out.push(row);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(out)
}

/// Checks that the first column holds `2 pi k / m` for k = 0..m.
fn check_uniform(path: &Path, rows: &[Vec<f64>]) -> Result<(), CliError> {
    let m = rows.len();
    for (k, r) in rows.iter().enumerate() {
        if (r[0] - 2.0 * PI * k as f64 / m as f64).abs() > 1e-9 {
            return Err(CliError::Config(format!(
                "{}: angles must be uniform, starting at 0",
                path.display()
            )));
        }
    }
    Ok(())
}

/// Trigonometric resampling from `m` to `n` uniform samples.
fn resample_complex(v: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = v.len();
    if m == n {
        return v.to_vec();
    }
    let c = fourier(v);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    // the Nyquist mode of the shorter grid is ambiguous; drop it
    let keep = (m.min(n) - 1) / 2;
    for k in 0..m {
        let mode = if k <= m / 2 {
            k as i64
        } else {
            k as i64 - m as i64
        };
        if mode.unsigned_abs() as usize > keep {
            continue;
        }
        let slot = if mode >= 0 {
            mode as usize
        } else {
            (n as i64 + mode) as usize
        };
        out[slot] = c[k];
    }
    synthesize(&out)
}

fn resample_real(v: &[f64], n: usize) -> Vec<f64> {
    if v.len() == n {
        return v.to_vec();
    }
    let kmax = (v.len().min(n) - 1) / 2;
    real_basis_eval(&real_basis_coeffs(v, kmax), n)
}

/// Samples real boundary data at `n` uniform angles.
pub fn boundary_samples(spec: &BoundarySpec, n: usize) -> Result<Vec<f64>, CliError> {
    match spec {
        BoundarySpec::Constant(c) => Ok(vec![*c; n]),
        BoundarySpec::Series(s) => Ok(angles(n)
            .into_iter()
            .map(|t| {
                s.constant
                    + s.cos
                        .iter()
                        .map(|&(k, a)| a * (k as f64 * t).cos())
                        .sum::<f64>()
                    + s.sin
                        .iter()
                        .map(|&(k, b)| b * (k as f64 * t).sin())
                        .sum::<f64>()
            })
            .collect()),
        BoundarySpec::Csv(c) => {
            let rows = read_csv(&c.csv, 2)?;
            check_uniform(&c.csv, &rows)?;
            let v: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            Ok(resample_real(&v, n))
        }
    }
}

/// Samples complex data at `n` uniform angles.
pub fn complex_samples(spec: &ComplexSpec, n: usize) -> Result<Vec<Complex64>, CliError> {
    match spec {
        ComplexSpec::Powers(p) => Ok(angles(n)
            .into_iter()
            .map(|t| {
                p.powers
                    .iter()
                    .map(|&(k, a, b)| {
                        Complex64::new(a, b) * Complex64::from_polar(1.0, k as f64 * t)
                    })
                    .sum()
            })
            .collect()),
        ComplexSpec::Csv(c) => {
            let rows = read_csv(&c.csv, 3)?;
            check_uniform(&c.csv, &rows)?;
            let v: Vec<Complex64> = rows.iter().map(|r| Complex64::new(r[1], r[2])).collect();
            Ok(resample_complex(&v, n))
        }
    }
}

/// A table `r, theta, value` on a tensor grid: radii ascending, uniform angles per radius.
fn read_table(path: &Path, to_nu: bool) -> Result<TabulatedNu, CliError> {
    let rows = read_csv(path, 3)?;
    let mut radii: Vec<f64> = Vec::new();
    for r in &rows {
        if radii.last().map_or(true, |&x| r[0] != x) {
            radii.push(r[0]);
        }
    }
    let nr = radii.len();
    if nr < 2 || rows.len() % nr != 0 {
        return Err(CliError::Config(format!(
            "{}: not a tensor table",
            path.display()
        )));
    }
    let nt = rows.len() / nr;
    for (i, chunk) in rows.chunks(nt).enumerate() {
        if chunk.iter().any(|r| r[0] != radii[i]) {
            return Err(CliError::Config(format!(
                "{}: rows must be grouped by radius",
                path.display()
            )));
        }
        check_uniform(path, &chunk.iter().map(|r| vec![r[1]]).collect::<Vec<_>>())?;
    }
    let values: Vec<f64> = rows
        .iter()
        .map(|r| {
            if to_nu {
                if r[2] > 0.0 {
                    Ok(nu_of_sigma(r[2]))
                } else {
                    Err(CliError::Config(format!(
                        "{}: conductivity must be positive",
                        path.display()
                    )))
                }
            } else {
                Ok(r[2])
            }
        })
        .collect::<Result<_, _>>()?;
    TabulatedNu::new(radii, nt, values)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Builds the coefficient field from either `nu` or `sigma`.
pub fn coefficient(
    nu: Option<&FieldSpec>,
    sigma: Option<&FieldSpec>,
) -> Result<NuProfile, CliError> {
    let parse =
        |s: &str| NuProfile::parse(s).map_err(|e| CliError::Config(format!("field {s:?}: {e}")));
    match (nu, sigma) {
        (Some(_), Some(_)) => Err(CliError::Config("give either nu or sigma, not both".into())),
        (None, None) => Ok(NuProfile::Const(0.0)),
        (Some(FieldSpec::Builtin(s)), None) => parse(s),
        (Some(FieldSpec::Table(t)), None) => {
            Ok(NuProfile::Table(Arc::new(read_table(&t.table, false)?)))
        }
        (None, Some(FieldSpec::Table(t))) => {
            Ok(NuProfile::Table(Arc::new(read_table(&t.table, true)?)))
        }
        (None, Some(FieldSpec::Builtin(s))) => {
            let (name, args) = s.split_once(':').unwrap_or((s, ""));
            match name.trim() {
                "const" => parse(&format!("sigma:{args}")),
                "radial" => parse(&format!("sigma-radial:{args}")),
                _ => {
                    let p = parse(s)?;
                    Ok(NuProfile::Custom(Arc::new(move |z| nu_of_sigma(p.eval(z)))))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CsvSpec, Series};

    #[test]
    fn series_and_csv_agree() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.csv");
        let m = 32;
        let rows: Vec<Vec<f64>> = angles(m)
            .iter()
            .map(|&t| vec![t, 0.5 + (3.0 * t).cos() - 0.25 * (2.0 * t).sin()])
            .collect();
        write_csv(&p, &["theta", "value"], &rows).unwrap();
        let from_csv = boundary_samples(&BoundarySpec::Csv(CsvSpec { csv: p }), 64).unwrap();
        let s = Series {
            constant: 0.5,
            cos: vec![(3, 1.0)],
            sin: vec![(2, -0.25)],
        };
        let direct = boundary_samples(&BoundarySpec::Series(s), 64).unwrap();
        let e = from_csv
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(e < 1e-13, "{e}");
    }

    #[test]
    fn complex_resampling_keeps_negative_modes() {
        let v: Vec<Complex64> = angles(16)
            .iter()
            .map(|&t| Complex64::from_polar(1.0, -3.0 * t) + 0.5)
            .collect();
        let up = resample_complex(&v, 64);
        for (t, u) in angles(64).iter().zip(up) {
            assert!((u - Complex64::from_polar(1.0, -3.0 * t) - 0.5).norm() < 1e-13);
        }
        let down = resample_complex(&up_to(&v, 64), 16);
        assert!(down.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    fn up_to(v: &[Complex64], n: usize) -> Vec<Complex64> {
        resample_complex(v, n)
    }

    #[test]
    fn sigma_specs_convert() {
        let z = Complex64::new(0.3, -0.2);
        let a = coefficient(None, Some(&FieldSpec::Builtin("const:3".into()))).unwrap();
        assert!((a.eval(z) + 0.5).abs() < 1e-15);
        let b = coefficient(None, Some(&FieldSpec::Builtin("xlinear:0.5".into()))).unwrap();
        let s = 0.5 * z.re;
        assert!((b.eval(z) - (1.0 - s) / (1.0 + s)).abs() < 1e-15);
        assert!(coefficient(
            Some(&FieldSpec::Builtin("const:0".into())),
            Some(&FieldSpec::Builtin("const:1".into()))
        )
        .is_err());
        assert!(coefficient(Some(&FieldSpec::Builtin("wobble:1".into())), None).is_err());
    }

    #[test]
    fn tables_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nu.csv");
        let radii = [0.0, 0.5, 1.0];
        let mut rows = Vec::new();
        for &r in &radii {
            for t in angles(8) {
                rows.push(vec![r, t, 0.1 * r]);
            }
        }
        write_csv(&p, &["r", "theta", "value"], &rows).unwrap();
        let nu = coefficient(
            Some(&FieldSpec::Table(crate::config::TableSpec { table: p })),
            None,
        )
        .unwrap();
        assert!((nu.eval(Complex64::new(0.0, 0.75)) - 0.075).abs() < 1e-14);
    }
}
