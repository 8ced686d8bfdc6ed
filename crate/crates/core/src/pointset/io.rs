//! Point-set file formats.
//!
//! Text: a header line
//! `discrepancy-pointset v1 dim=<d> n=<N> generator=<name>` followed by `N`
//! lines of `d` space-separated coordinates with 17 significant digits.
//!
//! Binary: magic `DPS1`, then `d` and `N` as little-endian `u32`, then
//! `N·d` little-endian `f64` in row-major order.

use std::io::{BufRead, Read, Write};

use super::{Generator, PointSet};
use crate::error::{Error, Result};

pub const TEXT_MAGIC: &str = "discrepancy-pointset";
pub const BINARY_MAGIC: &[u8; 4] = b"DPS1";

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_text<W: Write>(points: &PointSet, mut out: W) -> Result<()> {
    let name = points.generator().name.replace(char::is_whitespace, "_");
    let name = if name.is_empty() {
        "unknown".to_string()
    } else {
        name
    };
    writeln!(
        out,
        "{TEXT_MAGIC} v1 dim={} n={} generator={name}",
        points.dim(),
        points.len()
    )?;
    let mut line = String::new();
    for p in points.points() {
        line.clear();
        for (j, v) in p.iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{v:.16e}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_text<R: BufRead>(input: R) -> Result<PointSet> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| format_err("empty file"))??;
    let mut fields = header.split_whitespace();
    if fields.next() != Some(TEXT_MAGIC) || fields.next() != Some("v1") {
        return Err(format_err("missing point-set header"));
    }
    let (mut dim, mut n, mut name) = (None, None, String::from("unknown"));
    for f in fields {
        let (key, value) = f
            .split_once('=')
            .ok_or_else(|| format_err(format!("bad header field {f:?}")))?;
        match key {
            "dim" => dim = value.parse::<usize>().ok(),
            "n" => n = value.parse::<usize>().ok(),
            "generator" => name = value.to_string(),
            _ => {}
        }
    }
    let dim = dim.ok_or_else(|| format_err("header lacks dim"))?;
    let n = n.ok_or_else(|| format_err("header lacks n"))?;
    let mut coords = Vec::with_capacity(dim * n);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = coords.len();
        for tok in line.split_whitespace() {
            coords.push(
                tok.parse::<f64>()
                    .map_err(|_| format_err(format!("bad coordinate {tok:?}")))?,
            );
        }
        if coords.len() - before != dim {
            return Err(format_err(format!(
                "line with {} coordinates, expected {dim}",
                coords.len() - before
            )));
        }
    }
    if coords.len() != dim * n {
        return Err(format_err(format!(
            "header announces {n} points, found {}",
            coords.len() / dim.max(1)
        )));
    }
    PointSet::new(dim, coords, Generator::named(name))
}

pub fn write_binary<W: Write>(points: &PointSet, mut out: W) -> Result<()> {
    let dim = u32::try_from(points.dim()).map_err(|_| format_err("dimension exceeds u32"))?;
    let n = u32::try_from(points.len()).map_err(|_| format_err("N exceeds u32"))?;
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&dim.to_le_bytes())?;
    out.write_all(&n.to_le_bytes())?;
    for v in points.coords() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<PointSet> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(format_err("bad binary magic"));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let dim = u32::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    let mut buf = [0u8; 8];
    let mut coords = Vec::with_capacity(dim * n);
    for _ in 0..dim * n {
        input.read_exact(&mut buf)?;
        coords.push(f64::from_le_bytes(buf));
    }
    PointSet::new(dim, coords, Generator::named("binary"))
}

/// Reads either format, sniffing the binary magic.
pub fn read_any(path: &std::path::Path) -> Result<PointSet> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(&bytes[..])
    } else {
        read_text(&bytes[..])
    }
}
