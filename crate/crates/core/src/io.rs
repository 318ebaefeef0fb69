//! Serialization: JSON documents and point-set CSV files.
//!
//! Every floating-point value is written with 17 significant digits
//! (`{:.16e}`), which round-trips `f64` exactly.

use std::io::{self, BufRead, Write};

use serde::Serialize;

use crate::discrepancy::PointSet;
use crate::error::{Error, Result};
use crate::geometry::PartitionSpec;
use crate::sampling::SeedSpec;

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON formatter writing floats with 17 significant digits.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one line of JSON.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// Provenance header line of a point-set block.
pub fn point_set_header(spec: &PartitionSpec, seed: &SeedSpec) -> String {
    format!(
        "# spec m={} d={} theta={} seed={} replicate={}",
        spec.m(),
        spec.d(),
        spec.theta(),
        seed.seed,
        seed.replicate
    )
}

/// Writes one point per row, comma-separated.
pub fn write_points<W: Write>(out: &mut W, points: &PointSet) -> io::Result<()> {
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// One block of a point-set file, with its header line if present.
#[derive(Clone, Debug)]
pub struct PointBlock {
    pub header: Option<String>,
    pub points: PointSet,
}

/// Reads point-set blocks. Each `#` line starts a new block; blank lines are
/// skipped. All rows in a block must have the same number of columns.
pub fn read_point_blocks<R: BufRead>(input: R) -> Result<Vec<PointBlock>> {
    let mut blocks: Vec<(Option<String>, Option<usize>, Vec<f64>)> = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            blocks.push((Some(trimmed.to_string()), None, Vec::new()));
            continue;
        }
        if blocks.is_empty() {
            blocks.push((None, None, Vec::new()));
        }
        let (_, dim, coords) = blocks.last_mut().expect("non-empty");
        let start = coords.len();
        for field in trimmed.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("not a number: {:?}", field.trim()),
            })?;
            coords.push(v);
        }
        let cols = coords.len() - start;
        match dim {
            None => *dim = Some(cols),
            Some(d) if *d != cols => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {d} columns, found {cols}"),
                })
            }
            _ => {}
        }
    }
    blocks
        .into_iter()
        .filter(|(_, dim, _)| dim.is_some())
        .map(|(header, dim, coords)| {
            Ok(PointBlock {
                header,
                points: PointSet::new(dim.expect("filtered"), coords)?,
            })
        })
        .collect()
}
