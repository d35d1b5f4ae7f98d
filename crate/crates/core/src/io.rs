//! File formats.
//!
//! * Masks: PGM, plain (`P2`) or raw (`P5`), `maxval` 255. Samples of 128
//!   and above read as foreground; written masks use 0 and 255 only.
//! * Fields: headerless row-major CSV, or a 16-bit raw PGM holding an affine
//!   quantization of the values next to a JSON sidecar with the range.
//! * Polylines: CSV with an `x,y` header, one vertex per line, a blank line
//!   between polylines. A closed polyline repeats its first vertex at the end.
//!
//! Row `i` of an image is grid row `i`, i.e. images are stored with the
//! smallest second coordinate first.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, GridSpec, Polyline, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// `P2`
    Plain,
    /// `P5`
    Raw,
}

/// Decoded grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray {
    pub rows: usize,
    pub cols: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Reads a `P2` or `P5` graymap of any bit depth.
pub fn decode_pgm(bytes: &[u8]) -> Result<Gray> {
    let mut pos = 0usize;
    let mut token = |bytes: &[u8]| -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(parse_err("unexpected end of PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token(bytes)?;
    let encoding = match magic.as_str() {
        "P2" => PgmEncoding::Plain,
        "P5" => PgmEncoding::Raw,
        other => return Err(parse_err(format!("unsupported magic `{other}` (expected P2 or P5)"))),
    };
    let num = |s: String| s.parse::<usize>().map_err(|_| parse_err(format!("bad header number `{s}`")));
    let cols = num(token(bytes)?)?;
    let rows = num(token(bytes)?)?;
    let maxval = num(token(bytes)?)?;
    if rows == 0 || cols == 0 {
        return Err(parse_err("image has zero size"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(format!("maxval {maxval} out of range")));
    }
    let n = rows * cols;
    let samples = match encoding {
        PgmEncoding::Plain => {
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let v = num(token(bytes)?)?;
                if v > maxval {
                    return Err(parse_err(format!("sample {v} exceeds maxval {maxval}")));
                }
                out.push(v as u16);
            }
            out
        }
        PgmEncoding::Raw => {
            // Exactly one whitespace byte separates the header from the raster.
            let start = pos + 1;
            let width = if maxval < 256 { 1 } else { 2 };
            let data = bytes
                .get(start..start + n * width)
                .ok_or_else(|| parse_err("truncated P5 raster"))?;
            let out: Vec<u16> = if width == 1 {
                data.iter().map(|&b| b as u16).collect()
            } else {
                data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
            };
            if let Some(v) = out.iter().find(|&&v| v as usize > maxval) {
                return Err(parse_err(format!("sample {v} exceeds maxval {maxval}")));
            }
            out
        }
    };
    Ok(Gray { rows, cols, maxval: maxval as u16, samples })
}

pub fn encode_pgm(img: &Gray, encoding: PgmEncoding) -> Vec<u8> {
    let mut out = Vec::new();
    match encoding {
        PgmEncoding::Plain => {
            out.extend_from_slice(format!("P2\n{} {}\n{}\n", img.cols, img.rows, img.maxval).as_bytes());
            for row in img.samples.chunks(img.cols) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Raw => {
            out.extend_from_slice(format!("P5\n{} {}\n{}\n", img.cols, img.rows, img.maxval).as_bytes());
            if img.maxval < 256 {
                out.extend(img.samples.iter().map(|&v| v as u8));
            } else {
                for v in &img.samples {
                    out.extend_from_slice(&v.to_be_bytes());
                }
            }
        }
    }
    out
}

/// Decodes a binary mask. `maxval` must be 255.
pub fn mask_from_pgm(bytes: &[u8], grid: Option<GridSpec>) -> Result<BinaryMask> {
    let img = decode_pgm(bytes)?;
    if img.maxval != 255 {
        return Err(parse_err(format!("mask images need maxval 255, got {}", img.maxval)));
    }
    let grid = match grid {
        Some(g) if g.rows == img.rows && g.cols == img.cols => g,
        Some(_) => return Err(Error::GridMismatch),
        None => GridSpec::pixels(img.rows, img.cols)?,
    };
    BinaryMask::new(grid, img.samples.iter().map(|&v| v >= 128).collect())
}

pub fn mask_to_pgm(mask: &BinaryMask, encoding: PgmEncoding) -> Vec<u8> {
    let g = mask.grid();
    let img = Gray {
        rows: g.rows,
        cols: g.cols,
        maxval: 255,
        samples: mask.bits().iter().map(|&b| if b { 255 } else { 0 }).collect(),
    };
    encode_pgm(&img, encoding)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    mask_from_pgm(&fs::read(path)?, None)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    fs::write(path, mask_to_pgm(mask, PgmEncoding::Raw))?;
    Ok(())
}

/// Writes an 8-bit grayscale image of the grid's shape.
pub fn write_gray8(path: impl AsRef<Path>, grid: &GridSpec, samples: &[u8]) -> Result<()> {
    let img = Gray {
        rows: grid.rows,
        cols: grid.cols,
        maxval: 255,
        samples: samples.iter().map(|&v| v as u16).collect(),
    };
    fs::write(path, encode_pgm(&img, PgmEncoding::Raw))?;
    Ok(())
}

pub fn field_to_csv(field: &ScalarField) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(g.len() * 12);
    for row in field.values().chunks(g.cols) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Parses a headerless CSV field. Without a grid the pixel grid is used.
pub fn field_from_csv(text: &str, grid: Option<GridSpec>) -> Result<ScalarField> {
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| parse_err(format!("line {}: bad number `{s}`", n + 1))))
            .collect::<Result<_>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(parse_err(format!("line {}: {} columns, expected {c}", n + 1, row.len())))
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err("empty field CSV"))?;
    let grid = match grid {
        Some(g) if g.rows == rows && g.cols == cols => g,
        Some(_) => return Err(Error::GridMismatch),
        None => GridSpec::pixels(rows, cols)?,
    };
    ScalarField::new(grid, values)
}

pub fn write_field_csv(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    fs::write(path, field_to_csv(field))?;
    Ok(())
}

pub fn read_field_csv(path: impl AsRef<Path>, grid: Option<GridSpec>) -> Result<ScalarField> {
    field_from_csv(&fs::read_to_string(path)?, grid)
}

/// Range and geometry needed to undo a 16-bit field quantization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizationSidecar {
    pub min: f64,
    pub max: f64,
    pub grid: GridSpec,
}

/// Maps `[min, max]` affinely onto `0..=65535`.
pub fn quantize_field(field: &ScalarField) -> (Vec<u8>, QuantizationSidecar) {
    let g = *field.grid();
    let (min, max) = (field.min(), field.max());
    let span = max - min;
    let samples = field
        .values()
        .iter()
        .map(|&v| if span > 0.0 { ((v - min) / span * 65535.0).round() as u16 } else { 0 })
        .collect();
    let img = Gray { rows: g.rows, cols: g.cols, maxval: 65535, samples };
    (encode_pgm(&img, PgmEncoding::Raw), QuantizationSidecar { min, max, grid: g })
}

pub fn dequantize_field(pgm: &[u8], sidecar: &QuantizationSidecar) -> Result<ScalarField> {
    let img = decode_pgm(pgm)?;
    let g = sidecar.grid;
    if img.rows != g.rows || img.cols != g.cols {
        return Err(Error::GridMismatch);
    }
    let scale = (sidecar.max - sidecar.min) / img.maxval as f64;
    ScalarField::new(g, img.samples.iter().map(|&s| sidecar.min + s as f64 * scale).collect())
}

/// Writes `<stem>.pgm` and `<stem>.json` into `dir`.
pub fn write_quantized_field(dir: impl AsRef<Path>, stem: &str, field: &ScalarField) -> Result<()> {
    let (pgm, sidecar) = quantize_field(field);
    fs::write(dir.as_ref().join(format!("{stem}.pgm")), pgm)?;
    write_json(dir.as_ref().join(format!("{stem}.json")), &sidecar)
}

pub fn polylines_to_csv(lines: &[Polyline]) -> String {
    let mut out = String::from("x,y\n");
    for (k, line) in lines.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for p in &line.points {
            out.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        if line.closed && line.points.len() > 2 {
            let p = line.points[0];
            out.push_str(&format!("{},{}\n", p[0], p[1]));
        }
    }
    out
}

pub fn polylines_from_csv(text: &str) -> Result<Vec<Polyline>> {
    let mut out = Vec::new();
    let mut current: Vec<[f64; 2]> = Vec::new();
    let mut flush = |pts: &mut Vec<[f64; 2]>| -> Result<()> {
        if pts.is_empty() {
            return Ok(());
        }
        let closed = pts.len() > 3 && pts.first() == pts.last();
        if closed {
            pts.pop();
        }
        out.push(Polyline::new(std::mem::take(pts), closed)?);
        Ok(())
    };
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if n == 0 && line == "x,y" {
            continue;
        }
        if line.is_empty() {
            flush(&mut current)?;
            continue;
        }
        let mut parts = line.split(',');
        let mut coord = || -> Result<f64> {
            let s = parts.next().ok_or_else(|| parse_err(format!("line {}: missing column", n + 1)))?;
            s.trim().parse().map_err(|_| parse_err(format!("line {}: bad number `{s}`", n + 1)))
        };
        current.push([coord()?, coord()?]);
    }
    flush(&mut current)?;
    Ok(out)
}

pub fn write_polylines(path: impl AsRef<Path>, lines: &[Polyline]) -> Result<()> {
    fs::write(path, polylines_to_csv(lines))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_pgm_with_comments() {
        let text = b"P2\n# made by hand\n3 2\n255\n0 255 0\n255 # inline\n 0 255\n";
        let m = mask_from_pgm(text, None).unwrap();
        assert_eq!(m.bits(), &[false, true, false, true, false, true]);
    }

    #[test]
    fn raw_and_plain_round_trip() {
        let g = GridSpec::pixels(5, 7).unwrap();
        let m = BinaryMask::from_fn(g, |x| (x[0] - 3.0).hypot(x[1] - 2.0) < 2.2);
        for enc in [PgmEncoding::Plain, PgmEncoding::Raw] {
            assert_eq!(mask_from_pgm(&mask_to_pgm(&m, enc), None).unwrap(), m);
        }
    }

    #[test]
    fn rejects_wrong_maxval_and_magic() {
        assert!(matches!(mask_from_pgm(b"P2 1 1 15 0", None), Err(Error::Parse(_))));
        assert!(matches!(mask_from_pgm(b"P3 1 1 255 0 0 0", None), Err(Error::Parse(_))));
        assert!(matches!(mask_from_pgm(b"P5 2 2 255\n\x00", None), Err(Error::Parse(_))));
        assert!(matches!(mask_from_pgm(b"P2 2 1 255 0 300", None), Err(Error::Parse(_))));
    }

    #[test]
    fn field_csv_is_lossless() {
        let g = GridSpec::new([0.5, -1.0], 0.1, 3, 4).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] * 3.7).sin() / 7.0 + x[1]).unwrap();
        let back = field_from_csv(&field_to_csv(&f), Some(g)).unwrap();
        assert_eq!(back, f);
        assert!(matches!(field_from_csv("1,2\n3\n", None), Err(Error::Parse(_))));
    }

    #[test]
    fn quantization_error_is_bounded() {
        let g = GridSpec::new([0.0, 0.0], 0.05, 20, 30).unwrap();
        let f = ScalarField::from_fn(g, |x| x[0] * x[0] - x[1]).unwrap();
        let (pgm, side) = quantize_field(&f);
        let back = dequantize_field(&pgm, &side).unwrap();
        let step = (side.max - side.min) / 65535.0;
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).abs() <= 0.5 * step + 1e-12);
        }
    }

    #[test]
    fn polyline_csv_round_trip() {
        let lines = vec![
            Polyline::new(vec![[0.0, 0.0], [1.0, 0.5], [2.0, 0.25]], false).unwrap(),
            Polyline::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], true).unwrap(),
        ];
        let text = polylines_to_csv(&lines);
        assert!(text.starts_with("x,y\n0,0\n"));
        assert_eq!(polylines_from_csv(&text).unwrap(), lines);
    }
}
