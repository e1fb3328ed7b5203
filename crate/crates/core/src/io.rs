// Copyright 2026 The ptdirac Authors
// SPDX-License-Identifier: Apache-2.0

//! File formats.
//!
//! CSV output uses a fixed numeric format (17 significant digits in
//! scientific notation, `.` decimal separator, `\n` line endings) so that
//! reruns can be diffed byte for byte. JSON reports are pretty-printed with
//! shortest round-trip floats.
//!
//! | file | columns / content |
//! |------|-------------------|
//! | `gapmap.csv` | `kx,ky,gap[,E_low,E_high][,valid]` |
//! | `phase_diagram.csv` | `lambda,node_count,min_gap` |
//! | `trajectories.csv` | `lambda,node_id,kx,ky,charge` (empty charge if unknown) |
//! | dataset bundle | `i,j,kx,ky,f,amplitude` |

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::experiment::SpectroscopyDataset;
use crate::spectrum::GapMap;
use crate::topology::PhaseDiagram;

/// Fixed CSV number format: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_gap_map_csv<W: Write>(mut w: W, map: &GapMap) -> io::Result<()> {
    let bands = map.bands_low.as_ref().zip(map.bands_high.as_ref());
    let mut header = String::from("kx,ky,gap");
    if bands.is_some() {
        header.push_str(",E_low,E_high");
    }
    if map.valid.is_some() {
        header.push_str(",valid");
    }
    writeln!(w, "{header}")?;
    for i in 0..map.nx {
        for j in 0..map.ny {
            let idx = map.index(i, j);
            write!(
                w,
                "{},{},{}",
                fmt_f64(map.kx_values[i]),
                fmt_f64(map.ky_values[j]),
                fmt_f64(map.gap[idx])
            )?;
            if let Some((lo, hi)) = bands {
                write!(w, ",{},{}", fmt_f64(lo[idx]), fmt_f64(hi[idx]))?;
            }
            if let Some(valid) = &map.valid {
                write!(w, ",{}", u8::from(valid[idx]))?;
            }
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Grid metadata accompanying `gapmap.csv`.
pub fn gap_map_header(map: &GapMap, omega: f64) -> serde_json::Value {
    json!({
        "nx": map.nx,
        "ny": map.ny,
        "kx_range": [-std::f64::consts::PI, std::f64::consts::PI],
        "ky_range": [-std::f64::consts::PI, std::f64::consts::PI],
        "endpoint_exclusive": true,
        "order": "row-major, kx slow",
        "units": {"k": "rad", "gap": "MHz"},
        "omega": omega,
        "params": map.params_used,
        "has_bands": map.bands_low.is_some(),
        "masked_cells": map.valid.as_ref().map_or(0, |v| v.iter().filter(|x| !**x).count()),
    })
}

pub fn write_phase_diagram_csv<W: Write>(mut w: W, diagram: &PhaseDiagram) -> io::Result<()> {
    writeln!(w, "{},node_count,min_gap", diagram.parameter)?;
    for ((value, count), gap) in diagram
        .lambda_values
        .iter()
        .zip(&diagram.node_counts)
        .zip(&diagram.min_gaps)
    {
        writeln!(w, "{},{},{}", fmt_f64(*value), count, fmt_f64(*gap))?;
    }
    Ok(())
}

pub fn write_trajectories_csv<W: Write>(mut w: W, diagram: &PhaseDiagram) -> io::Result<()> {
    writeln!(w, "{},node_id,kx,ky,charge", diagram.parameter)?;
    for (value, nodes) in diagram.lambda_values.iter().zip(&diagram.node_trajectories) {
        for node in nodes {
            let charge = node.charge.map(|c| c.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(*value),
                node.node_id,
                fmt_f64(node.k.kx),
                fmt_f64(node.k.ky),
                charge
            )?;
        }
    }
    Ok(())
}

pub fn dataset_metadata(ds: &SpectroscopyDataset) -> serde_json::Value {
    json!({
        "nx": ds.nx,
        "ny": ds.ny,
        "kx_values": ds.kx_values,
        "ky_values": ds.ky_values,
        "freq_axis": {
            "min": ds.freq_axis[0],
            "max": ds.freq_axis[ds.freq_axis.len() - 1],
            "points": ds.freq_axis.len(),
        },
        "profile": ds.profile,
        "fwhm_mhz": ds.profile.fwhm(),
        "model": ds.model,
        "params": ds.params,
        "columns": ["i", "j", "kx", "ky", "f", "amplitude"],
        "noise_stream": "ChaCha8, seed = profile.seed, stream = i * ny + j",
    })
}

const DATASET_HEADER: &str = "i,j,kx,ky,f,amplitude\n";

fn write_trace_rows<W: Write>(w: &mut W, ds: &SpectroscopyDataset, i: usize) -> io::Result<()> {
    let kx = fmt_f64(ds.kx_values[i]);
    for j in 0..ds.ny {
        let trace = &ds.traces[i * ds.ny + j];
        let ky = fmt_f64(ds.ky_values[j]);
        for (f, a) in trace.freq_axis.iter().zip(&trace.amplitude) {
            writeln!(w, "{i},{j},{kx},{ky},{},{}", fmt_f64(*f), fmt_f64(*a))?;
        }
    }
    Ok(())
}

/// Every trace as one CSV stream.
pub fn write_dataset_bundle<W: Write>(mut w: W, ds: &SpectroscopyDataset) -> io::Result<()> {
    w.write_all(DATASET_HEADER.as_bytes())?;
    for i in 0..ds.nx {
        write_trace_rows(&mut w, ds, i)?;
    }
    Ok(())
}

/// `metadata.json` plus `rows/row_NNNN.csv`, one file per `kx` index.
pub fn write_dataset_dir(dir: &Path, ds: &SpectroscopyDataset) -> Result<()> {
    let rows = dir.join("rows");
    fs::create_dir_all(&rows)?;
    write_json(&dir.join("metadata.json"), &dataset_metadata(ds))?;
    for i in 0..ds.nx {
        let mut w = BufWriter::new(File::create(rows.join(format!("row_{i:04}.csv")))?);
        w.write_all(DATASET_HEADER.as_bytes())?;
        write_trace_rows(&mut w, ds, i)?;
        w.flush()?;
    }
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::from)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

/// A `Write` sink that only hashes.
#[derive(Default)]
pub struct HashingWriter(Sha256);

impl HashingWriter {
    pub fn hex(self) -> String {
        self.0.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Write for HashingWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_paper_model, Params};
    use crate::spectrum::sample_gap_map;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(fmt_f64(10.0), "1.0000000000000000e1");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn gap_map_csv_layout() {
        let model = build_paper_model(0.0, 0.0, 0.0, 10.0).unwrap();
        let map = sample_gap_map(&model.bind(&Params::new()).unwrap(), 3, 2, true).unwrap();
        let mut buf = Vec::new();
        write_gap_map_csv(&mut buf, &map).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "kx,ky,gap,E_low,E_high");
        assert_eq!(lines.len(), 1 + 6 + 1);
        assert_eq!(lines[7], "");
        assert!(!text.contains('\r'));
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], -std::f64::consts::PI);
        assert_eq!(first[2], map.gap[0]);
        assert_eq!(first[4] - first[3], first[2]);
    }
}
