//! CSV/JSON output helpers shared by the library and the command-line tool.
//!
//! Floats are written with 12 significant digits, `.` as decimal separator
//! and `\n` line endings; every CSV file starts with a header row.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::som::SomState;
use crate::tessellation::Tiling;

/// Formats `x` with 12 significant digits, like C's `%.12g`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Opens a CSV writer with `\n` terminators.
pub fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = BufWriter::new(File::create(path)?);
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// Writes a header and rows of floats.
pub fn write_float_table(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_float(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `nodes.csv` (id, layer, coordinates) and `edges.csv` (id_a, id_b).
pub fn write_tiling(dir: &Path, tiling: &Tiling) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let dim = tiling.space().dimension();
    let mut w = csv_writer(&dir.join("nodes.csv"))?;
    let mut header = vec!["id".to_string(), "layer".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (i, (p, l)) in tiling.nodes().iter().zip(tiling.layers()).enumerate() {
        let mut rec = vec![i.to_string(), l.to_string()];
        rec.extend(p.coords().iter().map(|&c| format_float(c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    let mut w = csv_writer(&dir.join("edges.csv"))?;
    w.write_record(["id_a", "id_b"])?;
    for &(a, b) in tiling.adjacency() {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a state snapshot: neuron id, map coordinates, feature coordinates.
pub fn write_state(path: &Path, state: &SomState) -> Result<()> {
    write_state_features(path, state, state.features_flat())
}

/// Like [`write_state`] but with externally supplied feature coordinates (e.g. a mean state).
pub fn write_state_features(path: &Path, state: &SomState, features: &[f64]) -> Result<()> {
    let mdim = state.map_space().dimension();
    let fdim = state.feature_space().dimension();
    let mut w = csv_writer(path)?;
    let mut header = vec!["neuron_id".to_string()];
    header.extend((0..mdim).map(|i| format!("map{i}")));
    header.extend((0..fdim).map(|i| format!("feature{i}")));
    w.write_record(&header)?;
    for i in 0..state.len() {
        let mut rec = vec![i.to_string()];
        rec.extend(state.map_point(i).coords().iter().map(|&c| format_float(c)));
        rec.extend(features[i * fdim..(i + 1) * fdim].iter().map(|&c| format_float(c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a pretty-printed JSON document.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}
