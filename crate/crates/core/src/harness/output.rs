//! `profiles.csv`, `errors.csv`, `run.json` and `study.json`.
//!
//! CSV files use `,` separators, `.` decimals and `\n` line endings; floats
//! are written in their shortest round-trip form.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::SimConfig;
use crate::harness::study::ErrorTable;
use crate::harness::Profile;

pub const PROFILE_HEADER: [&str; 7] = ["t", "x", "rho", "u", "T", "solver", "eps"];
pub const ERROR_HEADER: [&str; 7] = ["solver", "eps", "N", "sigma2_rho", "sigma2_u", "sigma2_T", "slope"];

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let kind = std::io::Error::other(e.to_string());
    Error::io(path, kind)
}

fn write_rows<I>(path: &Path, header: [&str; 7], rows: I) -> Result<()>
where
    I: IntoIterator<Item = [String; 7]>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_profiles(path: &Path, profiles: &[Profile]) -> Result<()> {
    let rows = profiles.iter().flat_map(|p| {
        p.x.iter().zip(p.observables()).map(move |(x, [rho, u, temp])| {
            [
                p.t.to_string(),
                x.to_string(),
                rho.to_string(),
                u.to_string(),
                temp.to_string(),
                p.solver.name().to_owned(),
                p.eps.to_string(),
            ]
        })
    });
    write_rows(path, PROFILE_HEADER, rows)
}

/// One row per `(solver, eps, N)`; `slope` repeats the fitted slope of the
/// series built from the summed `Sigma^2`.
pub fn write_errors(path: &Path, table: &ErrorTable) -> Result<()> {
    let rows = table.series.iter().flat_map(|s| {
        s.rows.iter().map(move |r| {
            [
                s.solver.name().to_owned(),
                s.eps.to_string(),
                r.n.to_string(),
                r.sigma2[0].to_string(),
                r.sigma2[1].to_string(),
                r.sigma2[2].to_string(),
                s.slope.to_string(),
            ]
        })
    });
    write_rows(path, ERROR_HEADER, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// `profiles.csv` and `run.json` in `cfg.output_dir`.
pub fn write_run(cfg: &SimConfig, profiles: &[Profile]) -> Result<()> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_profiles(&dir.join("profiles.csv"), profiles)?;
    write_json(&dir.join("run.json"), cfg)
}

/// `errors.csv`, `study.json` (per-quantity slopes) and `run.json`.
pub fn write_study(cfg: &SimConfig, table: &ErrorTable) -> Result<()> {
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_errors(&dir.join("errors.csv"), table)?;
    write_json(&dir.join("study.json"), table)?;
    write_json(&dir.join("run.json"), cfg)
}
