//! File formats: point lists and kernel values (CSV), 2-D slices (CSV) and
//! the binary sample container.
//!
//! Container layout (little endian): magic `NILSF001`, `u32` y axes,
//! `u32` t axes, `f64` y extent, `u32` y points, `f64` t extent,
//! `u32` t points, `u32` space tag (0 = `(y,t)`, 1 = `(y,τ)`), `u64` sample
//! count, then `count` pairs of `f32` (real, imaginary).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nilproj_core::{GroupPoint, C64};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction, Space};

/// Magic bytes of the sample container.
pub const MAGIC: &[u8; 8] = b"NILSF001";

/// Reads points `y1,…,y2n,t1,…,tr`; a non-numeric first row is a header.
pub fn read_points_csv(path: &Path, n: usize, r: usize) -> Result<Vec<GroupPoint>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(csv_err)?;
    let width = 2 * n + r;
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = match parsed {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(e) => return Err(Error::Format(format!("line {}: {e}", line + 1))),
        };
        if vals.len() != width {
            return Err(Error::Format(format!("line {}: expected {width} columns, got {}", line + 1, vals.len())));
        }
        out.push(GroupPoint::new(vals[..2 * n].to_vec(), vals[2 * n..].to_vec()));
    }
    Ok(out)
}

/// Writes points.
pub fn write_points_csv(path: &Path, points: &[GroupPoint]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if let Some(p) = points.first() {
        w.write_record(header(p.y.len(), p.t.len(), &[])).map_err(csv_err)?;
    }
    for p in points {
        w.write_record(p.y.iter().chain(&p.t).map(|v| fmt(*v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `y…, t…, m, re, im` rows.
pub fn write_kernel_csv(path: &Path, points: &[GroupPoint], m: usize, values: &[C64]) -> Result<()> {
    if points.len() != values.len() {
        return Err(Error::Format(format!("{} points but {} values", points.len(), values.len())));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if let Some(p) = points.first() {
        w.write_record(header(p.y.len(), p.t.len(), &["m", "re", "im"])).map_err(csv_err)?;
    }
    for (p, v) in points.iter().zip(values) {
        let mut row: Vec<String> = p.y.iter().chain(&p.t).map(|x| fmt(*x)).collect();
        row.push(m.to_string());
        row.extend([fmt(v.re), fmt(v.im)]);
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `re, im` from the last two columns of a kernel CSV.
pub fn read_kernel_csv(path: &Path) -> Result<Vec<C64>> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let k = rec.len();
        if k < 2 {
            return Err(Error::Format("kernel rows need re and im".into()));
        }
        let p = |i: usize| rec[i].trim().parse::<f64>().map_err(|e| Error::Format(e.to_string()));
        out.push(C64::new(p(k - 2)?, p(k - 1)?));
    }
    Ok(out)
}

/// Writes the `y` slice at flat `t`/`τ` index `j` as `y1,…,y2n,re,im`.
pub fn write_slice_csv(path: &Path, f: &SampledFunction, j: usize) -> Result<()> {
    if j >= f.grid.t_len() {
        return Err(Error::Format(format!("slice {j} out of range")));
    }
    write_y_values_csv(path, &f.grid, f.slice(j))
}

/// Writes values on the `y` grid as `y1,…,y2n,re,im`.
pub fn write_y_values_csv(path: &Path, grid: &Grid, values: &[C64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header(grid.y_dim, 0, &["re", "im"])).map_err(csv_err)?;
    for (i, v) in values.iter().enumerate() {
        let row: Vec<String> = grid.y_point(i).iter().chain([&v.re, &v.im]).map(|x| fmt(*x)).collect();
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a sampled function to the binary container.
pub fn write_container(path: &Path, f: &SampledFunction) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_container_to(&mut w, f)?;
    w.flush()?;
    Ok(())
}

/// Serialises into any writer.
pub fn write_container_to<W: Write>(w: &mut W, f: &SampledFunction) -> Result<()> {
    let g = &f.grid;
    w.write_all(MAGIC)?;
    w.write_all(&(g.y_dim as u32).to_le_bytes())?;
    w.write_all(&(g.t_dim as u32).to_le_bytes())?;
    w.write_all(&g.y_extent.to_le_bytes())?;
    w.write_all(&(g.y_points as u32).to_le_bytes())?;
    w.write_all(&g.t_extent.to_le_bytes())?;
    w.write_all(&(g.t_points as u32).to_le_bytes())?;
    let tag: u32 = match f.space {
        Space::Yt => 0,
        Space::YTau => 1,
    };
    w.write_all(&tag.to_le_bytes())?;
    w.write_all(&(f.values.len() as u64).to_le_bytes())?;
    for v in &f.values {
        w.write_all(&(v.re as f32).to_le_bytes())?;
        w.write_all(&(v.im as f32).to_le_bytes())?;
    }
    Ok(())
}

/// Reads a sampled function from the binary container.
pub fn read_container(path: &Path) -> Result<SampledFunction> {
    read_container_from(&mut BufReader::new(File::open(path)?))
}

/// Deserialises from any reader.
pub fn read_container_from<R: Read>(r: &mut R) -> Result<SampledFunction> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let y_dim = read_u32(r)? as usize;
    let t_dim = read_u32(r)? as usize;
    let y_extent = read_f64(r)?;
    let y_points = read_u32(r)? as usize;
    let t_extent = read_f64(r)?;
    let t_points = read_u32(r)? as usize;
    let space = match read_u32(r)? {
        0 => Space::Yt,
        1 => Space::YTau,
        t => return Err(Error::Format(format!("unknown space tag {t}"))),
    };
    let grid = Grid::new(y_dim, y_extent, y_points, t_dim, t_extent, t_points)?;
    let mut cnt = [0u8; 8];
    r.read_exact(&mut cnt)?;
    let count = u64::from_le_bytes(cnt) as usize;
    if count != grid.len() {
        return Err(Error::Format(format!("header says {count} samples, grid has {}", grid.len())));
    }
    let mut values = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let re = f32::from_le_bytes(buf[..4].try_into().expect("4 bytes"));
        let im = f32::from_le_bytes(buf[4..].try_into().expect("4 bytes"));
        values.push(C64::new(re as f64, im as f64));
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    SampledFunction::new(grid, values, space)
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn header(ny: usize, nt: usize, extra: &[&str]) -> Vec<String> {
    (1..=ny)
        .map(|i| format!("y{i}"))
        .chain((1..=nt).map(|i| format!("t{i}")))
        .chain(extra.iter().map(|s| s.to_string()))
        .collect()
}

/// Shortest representation that round-trips.
fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}
