//! CSV, JSON and gnuplot writers.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which
//! round-trips every f64 exactly.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use pwshift_core::PhaseShiftRecord;
use thiserror::Error;

use crate::config::{Format, SweepConfig};
use crate::sweep::{SweepFailure, SweepResult};

pub const CSV_HEADER: &str = "method,mode,wave,l,J,k,alpha,delta,im_residual,quad_order";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("nothing to write: the sweep produced no records")]
    Empty,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[PhaseShiftRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.mode,
            r.wave,
            r.l,
            r.j,
            num(r.k),
            num(r.alpha),
            num(r.delta),
            num(r.im_residual),
            r.quad_order
        )?;
    }
    Ok(())
}

/// One object per record, same keys as the CSV header.
pub fn write_json<W: Write>(records: &[PhaseShiftRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "[")?;
    for (i, r) in records.iter().enumerate() {
        let sep = if i + 1 < records.len() { "," } else { "" };
        writeln!(
            w,
            "  {{\"method\": \"{}\", \"mode\": \"{}\", \"wave\": \"{}\", \"l\": {}, \"J\": {}, \
             \"k\": {}, \"alpha\": {}, \"delta\": {}, \"im_residual\": {}, \"quad_order\": {}}}{sep}",
            r.method,
            r.mode,
            r.wave,
            r.l,
            r.j,
            num(r.k),
            num(r.alpha),
            num(r.delta),
            num(r.im_residual),
            r.quad_order
        )?;
    }
    writeln!(w, "]")
}

pub fn read_json(text: &str) -> serde_json::Result<Vec<PhaseShiftRecord>> {
    serde_json::from_str(text)
}

/// Records grouped into curves keyed by (method, mode, wave, alpha), each
/// sorted by k. Keys sort in the same order as the sweep output.
pub fn curves(records: &[PhaseShiftRecord]) -> Vec<(String, Vec<&PhaseShiftRecord>)> {
    let mut map: BTreeMap<String, Vec<&PhaseShiftRecord>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for r in records {
        let name = curve_name(r);
        let entry = map.entry(name.clone()).or_default();
        if entry.is_empty() {
            order.push(name);
        }
        entry.push(r);
    }
    order
        .into_iter()
        .map(|name| {
            let mut v = map.remove(&name).unwrap_or_default();
            v.sort_by(|a, b| a.k.total_cmp(&b.k));
            (name, v)
        })
        .collect()
}

/// File stem for one curve, e.g. `A_full-plain-both_S_alpha1.0000000000000000e0`.
pub fn curve_name(r: &PhaseShiftRecord) -> String {
    let mode = r.mode.to_string().replace(['/', '='], "-");
    format!("{}_{}_{}_alpha{}", r.method, mode, r.wave, num(r.alpha))
}

fn write_curve<W: Write>(curve: &[&PhaseShiftRecord], mut w: W) -> io::Result<()> {
    if let Some(r) = curve.first() {
        writeln!(
            w,
            "# method={} mode={} wave={} alpha={}",
            r.method,
            r.mode,
            r.wave,
            num(r.alpha)
        )?;
    }
    writeln!(w, "# k delta")?;
    for r in curve {
        writeln!(w, "{} {}", num(r.k), num(r.delta))?;
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "phase_shifts".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Directory holding the gnuplot curve files for `output`.
pub fn curve_dir(output: &Path) -> PathBuf {
    sibling(output, "_curves")
}

pub fn errors_path(output: &Path) -> PathBuf {
    sibling(output, ".errors.txt")
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>, OutputError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(io::BufWriter::new(
        fs::File::create(path).map_err(io_err(path))?,
    ))
}

fn finish(mut w: io::BufWriter<fs::File>, path: &Path) -> Result<(), OutputError> {
    w.flush().map_err(io_err(path))
}

pub fn write_failures<W: Write>(failures: &[SweepFailure], mut w: W) -> io::Result<()> {
    for f in failures {
        writeln!(w, "{f}")?;
    }
    Ok(())
}

/// Write the table, one gnuplot file per curve and, if anything failed, an
/// errors file. Returns every path written.
pub fn write_output(
    config: &SweepConfig,
    result: &SweepResult,
) -> Result<Vec<PathBuf>, OutputError> {
    if result.records.is_empty() && result.failures.is_empty() {
        return Err(OutputError::Empty);
    }
    let mut written = Vec::new();
    let path = &config.output;
    let mut w = create(path)?;
    match config.format {
        Format::Csv => write_csv(&result.records, &mut w),
        Format::Json => write_json(&result.records, &mut w),
    }
    .map_err(io_err(path))?;
    finish(w, path)?;
    written.push(path.clone());

    let dir = curve_dir(path);
    if dir.exists() {
        // stale curves from an earlier sweep would survive otherwise
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let p = entry.map_err(io_err(&dir))?.path();
            if p.extension().is_some_and(|e| e == "dat") {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
    }
    for (name, curve) in curves(&result.records) {
        let p = dir.join(format!("{name}.dat"));
        let mut w = create(&p)?;
        write_curve(&curve, &mut w).map_err(io_err(&p))?;
        finish(w, &p)?;
        written.push(p);
    }

    let ep = errors_path(path);
    if result.failures.is_empty() {
        if ep.exists() {
            fs::remove_file(&ep).map_err(io_err(&ep))?;
        }
    } else {
        let mut w = create(&ep)?;
        write_failures(&result.failures, &mut w).map_err(io_err(&ep))?;
        finish(w, &ep)?;
        written.push(ep);
    }
    Ok(written)
}
