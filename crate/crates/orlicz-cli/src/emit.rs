//! Output formatting: 12-significant-digit numerics, CSV tables, and the
//! file-or-stdout sink.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use orlicz::{DensityModel, OrliczError, OrliczFunction, Result};

/// All numeric output uses 12 significant digits.
pub fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|source| OrliczError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// The atom table lands next to the main table: `tail.csv` pairs with
/// `tail.atoms.csv`.
pub fn atoms_path(out: &Path) -> PathBuf {
    out.with_extension("atoms.csv")
}

/// `t,tail,pdf` rows over `grid`.
pub fn density_table(d: &DensityModel<f64>, grid: &[f64]) -> String {
    let mut out = String::from("t,tail,pdf\n");
    for &t in grid {
        writeln!(out, "{},{},{}", fmt12(t), fmt12(d.tail().tail(t)), fmt12(d.pdf(t)))
            .expect("writing to a string cannot fail");
    }
    out
}

/// `location,mass` rows, one per atom (possibly none — header only).
pub fn atom_table(d: &DensityModel<f64>) -> String {
    let mut out = String::from("location,mass\n");
    for a in d.atoms() {
        writeln!(out, "{},{}", fmt12(a.location), fmt12(a.mass))
            .expect("writing to a string cannot fail");
    }
    out
}

/// `t,M,N,M'',N''` rows over `grid`, preceded by a comment carrying the
/// ramp width the smoothing chose.
pub fn smooth_table(
    m: &OrliczFunction<f64>,
    n: &OrliczFunction<f64>,
    delta: f64,
    grid: &[f64],
) -> Result<String> {
    let mut out = format!("# delta={}\nt,M,N,M'',N''\n", fmt12(delta));
    for &t in grid {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt12(t),
            fmt12(m.eval(t, 0)?),
            fmt12(n.eval(t, 0)?),
            fmt12(m.eval(t, 2)?),
            fmt12(n.eval(t, 2)?),
        )
        .expect("writing to a string cannot fail");
    }
    Ok(out)
}
