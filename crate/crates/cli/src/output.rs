//! CSV and manifest writers. Numbers are written with 17 significant digits
//! so that parsing them back yields the same `f64`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use biphoton_core::schmidt::SchmidtSpectrum;
use biphoton_core::sweep::{EntropyMap, ExtremaReport, Extremum};
use biphoton_core::Axis;
use serde::{Deserialize, Serialize};

use crate::config::ConfigFile;

/// `x` with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// `n,lambda` for every Schmidt eigenvalue.
pub fn write_eigenvalues<W: Write>(w: W, spectrum: &SchmidtSpectrum) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(["n", "lambda"])?;
    for (n, l) in spectrum.eigenvalues().iter().enumerate() {
        out.write_record([(n + 1).to_string(), fmt_f64(*l)])?;
    }
    out.flush()?;
    Ok(())
}

/// `node, re_1, im_1, density_1, re_2, ...` for the given mode samples.
pub fn write_modes<W: Write>(w: W, axis: &Axis, modes: &[&[biphoton_core::c64]]) -> csv::Result<()> {
    let mut out = writer(w);
    let mut header = vec!["node".to_string()];
    for n in 1..=modes.len() {
        header.extend([format!("re_{n}"), format!("im_{n}"), format!("density_{n}")]);
    }
    out.write_record(&header)?;
    for (j, node) in axis.nodes().iter().enumerate() {
        let mut row = Vec::with_capacity(1 + 3 * modes.len());
        row.push(fmt_f64(*node));
        for m in modes {
            let z = m[j];
            row.extend([fmt_f64(z.re), fmt_f64(z.im), fmt_f64(z.norm_sqr())]);
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// `axis1,axis2,S_bits,status`, one row per cell in axis1-major order.
/// One-dimensional maps leave `axis2` empty; failed cells leave `S_bits`
/// empty and give the error kind as status.
pub fn write_map<W: Write>(w: W, map: &EntropyMap) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(["axis1", "axis2", "S_bits", "status"])?;
    let (n1, n2) = map.shape();
    for i in 0..n1 {
        for j in 0..n2 {
            let (a, b) = map.coords(i, j);
            let b = b.map(fmt_f64).unwrap_or_default();
            let (s, status) = match map.get(i, j) {
                Some(s) => (fmt_f64(s), "ok".to_string()),
                None => {
                    let f = map.failures.iter().find(|f| f.i == i && f.j == j);
                    (String::new(), f.map_or_else(|| "error".into(), |f| failure_kind(&f.error).to_string()))
                }
            };
            out.write_record([fmt_f64(a), b, s, status])?;
        }
    }
    out.flush()?;
    Ok(())
}

fn failure_kind(e: &biphoton_core::Error) -> &'static str {
    use biphoton_core::Error::*;
    match e {
        NullKernel { .. } => "null-kernel",
        Decomposition(_) => "decomposition-failure",
        NumericalSanity { .. } => "numerical-sanity",
        _ => "invalid",
    }
}

/// `kind,axis1,axis2,S_bits` with kinds `global_max`, `global_min`,
/// `local_max`, `local_min`.
pub fn write_extrema<W: Write>(w: W, report: &ExtremaReport) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(["kind", "axis1", "axis2", "S_bits"])?;
    let mut row = |kind: &str, e: &Extremum| {
        out.write_record([kind.to_string(), fmt_f64(e.coords.0), e.coords.1.map(fmt_f64).unwrap_or_default(), fmt_f64(e.value)])
    };
    row("global_max", &report.global_max)?;
    row("global_min", &report.global_min)?;
    for e in &report.maxima {
        row("local_max", e)?;
    }
    for e in &report.minima {
        row("local_min", e)?;
    }
    out.flush()?;
    Ok(())
}

/// Provenance record written next to the outputs of every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved parameters, in the config-file schema.
    pub parameters: ConfigFile,
    /// Command-line values that are not part of the config file.
    pub arguments: std::collections::BTreeMap<String, String>,
    pub tool_version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: ConfigFile) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            arguments: Default::default(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Write `manifest.json` into `dir`; the manifest lists itself.
    pub fn write(mut self, dir: &Path, elapsed: Duration) -> std::io::Result<PathBuf> {
        let path = dir.join("manifest.json");
        self.duration_seconds = elapsed.as_secs_f64();
        self.outputs.push(path.clone());
        let text = serde_json::to_string_pretty(&self).map_err(std::io::Error::other)?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }
}
