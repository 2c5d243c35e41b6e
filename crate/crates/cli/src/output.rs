//! Output files: pretty JSON and CSV.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use aniso_core::{Eigenpair1D, GridField, ScanReport};

pub const OUT_DIR_ENV: &str = "ANISO_OUT_DIR";

/// `--out`, else `$ANISO_OUT_DIR`, else the working directory.
pub fn out_dir(flag: Option<PathBuf>) -> Result<PathBuf> {
    let dir = flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_field(path: &Path, field: &GridField) -> Result<()> {
    let mut w = create(path)?;
    field.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_eigen_csv(path: &Path, e: &Eigenpair1D) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,v,dv")?;
    for s in e.samples() {
        writeln!(w, "{},{},{}", s.x, s.v, s.dv)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ladder(path: &Path, report: &ScanReport) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "lambda,classified,success,path,positive_mass,residual,outer_iterations")?;
    let mut points: Vec<_> = report.points.iter().collect();
    points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for p in points {
        let class = serde_json::to_value(p.classification)?;
        let path = serde_json::to_value(p.path)?;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.lambda,
            class.as_str().unwrap_or_default(),
            p.success,
            path.as_str().unwrap_or_default(),
            p.positive_mass,
            p.residual,
            p.outer_iterations
        )?;
    }
    w.flush()?;
    Ok(())
}
