//! CSV exchange of tensor-grid samples. Radial data uses the header
//! `t,theta,value_re,value_im`; line data uses `eta,theta,value_re,value_im`
//! with grid metadata in a JSON sidecar.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{EtaGrid, MellinLineData, RadialFunction, TGrid};
use crate::angular::AngularGrid;
use crate::domain::CornerConfig;
use crate::error::{Error, Result};

pub const RADIAL_HEADER: &str = "t,theta,value_re,value_im";
pub const LINE_HEADER: &str = "eta,theta,value_re,value_im";

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_rows(
    out: &mut impl Write,
    header: &str,
    outer: &[f64],
    thetas: &[f64],
    values: &[C64],
) -> Result<()> {
    writeln!(out, "{header}").map_err(io_err)?;
    let n = thetas.len();
    for (k, x) in outer.iter().enumerate() {
        for (j, th) in thetas.iter().enumerate() {
            let v = values[k * n + j];
            writeln!(out, "{x},{th},{},{}", v.re, v.im).map_err(io_err)?;
        }
    }
    Ok(())
}

type Row = [f64; 4];

fn read_rows(input: impl Read, header: &str) -> Result<Vec<Row>> {
    let mut lines = BufReader::new(input).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))?
        .map_err(io_err)?;
    if first.trim() != header {
        return Err(Error::Parse(format!("expected header `{header}`, got `{}`", first.trim())));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", i + 2)));
        }
        let mut row = [0.0; 4];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = f
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number `{f}`", i + 2)))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Splits rows into the outer coordinate, the angular block and the values,
/// checking that every block repeats the same angles.
fn split_blocks(rows: &[Row]) -> Result<(Vec<f64>, Vec<f64>, Vec<C64>)> {
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    let block = rows.iter().take_while(|r| r[0] == rows[0][0]).count();
    if rows.len() % block != 0 {
        return Err(Error::Parse("rows do not form a tensor grid".into()));
    }
    let thetas: Vec<f64> = rows[..block].iter().map(|r| r[1]).collect();
    let mut outer = Vec::with_capacity(rows.len() / block);
    for (b, chunk) in rows.chunks(block).enumerate() {
        if chunk.iter().any(|r| r[0] != chunk[0][0]) || chunk.iter().zip(&thetas).any(|(r, t)| r[1] != *t) {
            return Err(Error::Parse(format!("block {b} does not match the angular grid")));
        }
        outer.push(chunk[0][0]);
    }
    let values = rows.iter().map(|r| C64::new(r[2], r[3])).collect();
    Ok((outer, thetas, values))
}

fn angular_grid_from(thetas: &[f64]) -> Result<AngularGrid> {
    if thetas.len() % 2 != 0 {
        return Err(Error::Parse("angular block must have two equal sectors".into()));
    }
    let per = thetas.len() / 2;
    let corner = CornerConfig::new(thetas[per - 1]).map_err(|e| Error::Parse(e.to_string()))?;
    let grid = AngularGrid::new(corner, per).map_err(|e| Error::Parse(e.to_string()))?;
    check_nodes(&grid.flat_nodes(), thetas, "theta")?;
    Ok(grid)
}

fn check_nodes(want: &[f64], got: &[f64], what: &str) -> Result<()> {
    for (a, b) in want.iter().zip(got) {
        if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
            return Err(Error::Parse(format!("{what} nodes are not uniform ({b} vs {a})")));
        }
    }
    Ok(())
}

pub fn write_radial_csv(v: &RadialFunction, out: &mut impl Write) -> Result<()> {
    write_rows(out, RADIAL_HEADER, &v.tgrid.nodes(), &v.agrid.flat_nodes(), &v.values)
}

pub fn read_radial_csv(input: impl Read) -> Result<RadialFunction> {
    let rows = read_rows(input, RADIAL_HEADER)?;
    let (ts, thetas, values) = split_blocks(&rows)?;
    let agrid = angular_grid_from(&thetas)?;
    let tgrid = TGrid::new(ts[0], ts[ts.len() - 1], ts.len()).map_err(|e| Error::Parse(e.to_string()))?;
    check_nodes(&tgrid.nodes(), &ts, "t")?;
    RadialFunction::new(tgrid, agrid, values)
}

/// Grid metadata stored next to line data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineMeta {
    pub xi: f64,
    pub eta: EtaGrid,
    pub tgrid: TGrid,
    pub omega: f64,
    pub per_sector: usize,
}

impl LineMeta {
    pub fn of(data: &MellinLineData) -> Self {
        Self {
            xi: data.xi,
            eta: data.eta,
            tgrid: data.tgrid,
            omega: data.agrid.corner().omega(),
            per_sector: data.agrid.per_sector(),
        }
    }
}

pub fn write_line_csv(data: &MellinLineData, out: &mut impl Write) -> Result<()> {
    write_rows(out, LINE_HEADER, &data.eta.nodes(), &data.agrid.flat_nodes(), &data.values)
}

pub fn read_line_csv(input: impl Read, meta: &LineMeta) -> Result<MellinLineData> {
    let rows = read_rows(input, LINE_HEADER)?;
    let (etas, thetas, values) = split_blocks(&rows)?;
    let agrid = angular_grid_from(&thetas)?;
    if agrid.per_sector() != meta.per_sector || agrid.corner().omega() != meta.omega {
        return Err(Error::Parse("angular grid disagrees with the sidecar".into()));
    }
    if etas.len() != meta.eta.n {
        return Err(Error::Parse("eta grid disagrees with the sidecar".into()));
    }
    check_nodes(&meta.eta.nodes(), &etas, "eta")?;
    Ok(MellinLineData {
        xi: meta.xi,
        eta: meta.eta,
        agrid,
        tgrid: meta.tgrid,
        values,
    })
}

/// Sidecar path: the CSV path with extension `json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn save_radial(v: &RadialFunction, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_radial_csv(v, &mut w)?;
    w.flush().map_err(io_err)
}

pub fn load_radial(path: &Path) -> Result<RadialFunction> {
    let file = std::fs::File::open(path).map_err(io_err)?;
    read_radial_csv(file)
}

pub fn save_line(data: &MellinLineData, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    write_line_csv(data, &mut w)?;
    w.flush().map_err(io_err)?;
    let meta = serde_json::to_string_pretty(&LineMeta::of(data)).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(sidecar_path(path), meta + "\n").map_err(io_err)
}

pub fn load_line(path: &Path) -> Result<MellinLineData> {
    let text = std::fs::read_to_string(sidecar_path(path)).map_err(io_err)?;
    let meta: LineMeta = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let file = std::fs::File::open(path).map_err(io_err)?;
    read_line_csv(file, &meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RadialFunction {
        let tg = TGrid::new(-5.0, 5.0, 11).unwrap();
        let ag = AngularGrid::new(CornerConfig::new(2.4).unwrap(), 5).unwrap();
        RadialFunction::from_fn(tg, ag, |t, _, th| C64::new((t * th).sin() / 3.0, t - th) * (-t * t).exp())
    }

    #[test]
    fn radial_round_trip_is_byte_identical() {
        let v = sample();
        let mut a = Vec::new();
        write_radial_csv(&v, &mut a).unwrap();
        let back = read_radial_csv(a.as_slice()).unwrap();
        assert_eq!(back, v);
        let mut b = Vec::new();
        write_radial_csv(&back, &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn line_round_trip() {
        let v = sample();
        let data = crate::mellin::mellin_forward(&v, 0.0, EtaGrid::new(3.0, 9).unwrap()).unwrap();
        let meta = LineMeta::of(&data);
        let json = serde_json::to_string(&meta).unwrap();
        let meta: LineMeta = serde_json::from_str(&json).unwrap();
        let mut a = Vec::new();
        write_line_csv(&data, &mut a).unwrap();
        let back = read_line_csv(a.as_slice(), &meta).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn malformed_input_is_reported() {
        assert!(matches!(read_radial_csv("x,y\n".as_bytes()), Err(Error::Parse(_))));
        let text = format!("{RADIAL_HEADER}\n0,0,1,abc\n");
        assert!(matches!(read_radial_csv(text.as_bytes()), Err(Error::Parse(_))));
    }
}
