//! Field files.
//!
//! CSV: an optional first line `# meta: {json}` carrying [`FieldMeta`], a
//! header `x1,…,xd,X1,…,Xm`, then one row per node in row-major order (last
//! axis fastest) with every number written to 17 significant digits, which
//! parses back to the identical `f64`.
//!
//! Binary: the bytes `OSSF1`, then little-endian `u32` d, `u32` m, `d` `u32`
//! axis counts, and the `f64` field values in the same node order. Node
//! coordinates are implied by the counts.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::synthesis::{FieldMeta, FieldSample, GridSpec};

pub const MAGIC: &[u8; 5] = b"OSSF1";
const META_PREFIX: &str = "# meta: ";

fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(sample: &FieldSample, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    if let Some(meta) = &sample.meta {
        writeln!(w, "{META_PREFIX}{}", serde_json::to_string(meta)?)?;
    }
    let d = sample.grid.d();
    let header: Vec<String> = (1..=d)
        .map(|i| format!("x{i}"))
        .chain((1..=sample.m).map(|i| format!("X{i}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    let mut row = String::new();
    for node in 0..sample.grid.len() {
        row.clear();
        let idx = sample.grid.multi_index(node);
        for (a, &i) in idx.iter().enumerate() {
            row.push_str(&number(sample.grid.coordinate(a, i)));
            row.push(',');
        }
        for (k, v) in sample.value(node).iter().enumerate() {
            if k > 0 {
                row.push(',');
            }
            row.push_str(&number(*v));
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: BufRead>(mut r: R) -> Result<FieldSample> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    // Every row is newline-terminated, so a missing final newline means the
    // file was cut short, possibly inside a number that still parses.
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(Error::Format(format!(
            "line {}: truncated row (no terminating newline)",
            text.lines().count()
        )));
    }
    let mut lines = text.lines().enumerate();
    let mut meta = None;
    let header = loop {
        let Some((no, line)) = lines.next() else {
            return Err(Error::Format("empty field file".into()));
        };
        if let Some(json) = line.strip_prefix(META_PREFIX) {
            if meta.is_some() || no > 0 {
                return Err(Error::Format(format!("line {}: unexpected meta line", no + 1)));
            }
            meta = Some(serde_json::from_str::<FieldMeta>(json).map_err(|e| {
                Error::Format(format!("line {}: bad meta: {e}", no + 1))
            })?);
        } else {
            break (no, line);
        };
    };
    let (d, m) = parse_header(&header.1)
        .ok_or_else(|| Error::Format(format!("line {}: expected header x1,…,xd,X1,…,Xm", header.0 + 1)))?;

    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut values = Vec::new();
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + m {
            return Err(Error::Format(format!(
                "line {}: expected {} fields, found {}",
                no + 1,
                d + m,
                fields.len()
            )));
        }
        let mut row = Vec::with_capacity(d + m);
        for f in fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad number {f:?}", no + 1)))?;
            if !v.is_finite() {
                return Err(Error::Format(format!("line {}: non-finite value", no + 1)));
            }
            row.push(v);
        }
        values.extend_from_slice(&row[d..]);
        row.truncate(d);
        coords.push(row);
    }
    let grid = infer_grid(&coords, d)?;
    let sample = FieldSample { grid, m, values, meta };
    check_shape(&sample)?;
    Ok(sample)
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let names: Vec<&str> = line.split(',').map(str::trim).collect();
    let d = names.iter().take_while(|n| n.starts_with('x')).count();
    let m = names.len() - d;
    let ok = d > 0
        && m > 0
        && names[..d].iter().enumerate().all(|(i, n)| *n == format!("x{}", i + 1))
        && names[d..].iter().enumerate().all(|(i, n)| *n == format!("X{}", i + 1));
    ok.then_some((d, m))
}

/// Recovers the grid from row coordinates and checks that every row sits on
/// its node.
fn infer_grid(coords: &[Vec<f64>], d: usize) -> Result<GridSpec> {
    if coords.is_empty() {
        return Err(Error::Format("field file has no data rows".into()));
    }
    // Row-major order: axis a repeats with period prod(n_{a+1..d}).
    let mut counts = vec![0usize; d];
    let mut period = 1usize;
    for a in (0..d).rev() {
        let mut n = 1;
        while n * period < coords.len() && coords[n * period][a] != coords[0][a] {
            n += 1;
        }
        counts[a] = n;
        period *= n;
    }
    let grid = GridSpec::new(counts).map_err(|e| Error::Format(format!("inferred grid: {e}")))?;
    if grid.len() != coords.len() {
        return Err(Error::Format(format!(
            "{} rows do not fill the inferred grid {:?}",
            coords.len(),
            grid.points_per_axis
        )));
    }
    for (node, c) in coords.iter().enumerate() {
        let idx = grid.multi_index(node);
        for a in 0..d {
            if c[a] != grid.coordinate(a, idx[a]) {
                return Err(Error::Format(format!(
                    "data row {}: coordinate x{} = {} is off the grid",
                    node + 1,
                    a + 1,
                    c[a]
                )));
            }
        }
    }
    Ok(grid)
}

fn check_shape(sample: &FieldSample) -> Result<()> {
    if sample.values.len() != sample.grid.len() * sample.m {
        return Err(Error::Format("value count does not match the grid".into()));
    }
    if let Some(meta) = &sample.meta {
        if meta.d.len() != sample.m || meta.e.len() != sample.grid.d() {
            return Err(Error::Format("meta matrices disagree with the data shape".into()));
        }
    }
    Ok(())
}

pub fn write_binary<W: Write>(sample: &FieldSample, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(MAGIC)?;
    let d = u32::try_from(sample.grid.d()).map_err(|_| Error::Format("d too large".into()))?;
    let m = u32::try_from(sample.m).map_err(|_| Error::Format("m too large".into()))?;
    w.write_all(&d.to_le_bytes())?;
    w.write_all(&m.to_le_bytes())?;
    for &n in &sample.grid.points_per_axis {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for v in &sample.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary(bytes: &[u8]) -> Result<FieldSample> {
    let mut at = 0usize;
    let mut take = |n: usize, what: &str| -> Result<&[u8]> {
        let s = bytes.get(at..at + n).ok_or_else(|| {
            Error::Format(format!("offset {at}: file truncated while reading {what}"))
        })?;
        at += n;
        Ok(s)
    };
    if take(MAGIC.len(), "magic")? != MAGIC {
        return Err(Error::Format("offset 0: missing OSSF1 magic".into()));
    }
    let u32_at = |s: &[u8]| u32::from_le_bytes(s.try_into().expect("4 bytes")) as usize;
    let d = u32_at(take(4, "d")?);
    let m = u32_at(take(4, "m")?);
    if d == 0 || m == 0 || d > 16 || m > 16 {
        return Err(Error::Format(format!("offset 5: implausible shape d = {d}, m = {m}")));
    }
    let mut counts = Vec::with_capacity(d);
    for a in 0..d {
        counts.push(u32_at(take(4, &format!("axis {} count", a + 1))?));
    }
    let grid = GridSpec::new(counts).map_err(|e| Error::Format(format!("header grid: {e}")))?;
    let n = grid.len() * m;
    let payload = take(8 * n, "values")?;
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format(format!("offset {}: non-finite value", 13 + 4 * d + 8 * k)));
    }
    if at != bytes.len() {
        return Err(Error::Format(format!("offset {at}: trailing bytes after payload")));
    }
    Ok(FieldSample { grid, m, values, meta: None })
}

/// Reads a CSV or binary field file, telling them apart by the magic bytes.
pub fn read_field_file(path: &Path) -> Result<FieldSample> {
    let mut f = File::open(path)?;
    let mut bytes = Vec::new();
    f.read_to_end(&mut bytes)?;
    if bytes.starts_with(MAGIC) {
        read_binary(&bytes)
    } else {
        read_csv(BufReader::new(bytes.as_slice()))
    }
}

pub fn write_field_file(path: &Path, sample: &FieldSample, binary: bool) -> Result<()> {
    let f = File::create(path)?;
    if binary {
        write_binary(sample, f)
    } else {
        write_csv(sample, f)
    }
}
