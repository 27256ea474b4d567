//! XYZ and ASCII PLY readers and writers.
//!
//! XYZ: one `x y z` triple per line, whitespace separated; `#` starts a comment
//! that runs to the end of the line. PLY: ASCII only, with a leading `vertex`
//! element carrying exactly the `x`, `y` and `z` scalar properties.
//!
//! Floats are written with the shortest representation that parses back to
//! the identical value.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::cloud::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Xyz,
    PlyAscii,
    /// Extension first (`.ply` vs anything else), then content sniffing.
    Auto,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(Format::Xyz),
            "ply" | "ply-ascii" => Ok(Format::PlyAscii),
            "auto" => Ok(Format::Auto),
            other => Err(Error::InvalidArgument(format!("unknown format '{other}'"))),
        }
    }
}

fn resolve(format: Format, path: Option<&Path>, content: Option<&str>) -> Format {
    if format != Format::Auto {
        return format;
    }
    if let Some(ext) = path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        if ext.eq_ignore_ascii_case("ply") {
            return Format::PlyAscii;
        }
        if ext.eq_ignore_ascii_case("xyz") || ext.eq_ignore_ascii_case("txt") {
            return Format::Xyz;
        }
    }
    match content {
        Some(text) if text.trim_start().starts_with("ply") => Format::PlyAscii,
        _ => Format::Xyz,
    }
}

pub fn load_pointcloud<T: Scalar>(path: impl AsRef<Path>, format: Format) -> Result<PointCloud<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match resolve(format, Some(path), Some(&text)) {
        Format::PlyAscii => parse_ply(&text),
        _ => parse_xyz(&text),
    }
}

/// Writes the cloud through a sibling temporary file and renames it into
/// place, so readers never observe a half-written file.
pub fn save_pointcloud<T: Scalar>(
    pc: &PointCloud<T>,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    pc.ensure_nonempty()?;
    let path = path.as_ref();
    let text = match resolve(format, Some(path), None) {
        Format::PlyAscii => to_ply_string(pc),
        _ => to_xyz_string(pc),
    };
    write_atomic(path, text.as_bytes())
}

/// Writes through a temporary sibling file and renames it into place, so
/// readers never see a partial file. Existing targets that are not regular
/// files (devices, pipes, symlinks) are written in place instead.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if fs::symlink_metadata(path).is_ok_and(|m| !m.file_type().is_file() && !m.is_dir()) {
        return fs::File::create(path)
            .and_then(|mut f| f.write_all(bytes))
            .map_err(|e| Error::io(path, e));
    }
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

fn parse_coord<T: Scalar>(token: &str, line: usize) -> Result<T> {
    let v: T = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number '{token}'"),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite { line });
    }
    Ok(v)
}

pub fn parse_xyz<T: Scalar>(text: &str) -> Result<PointCloud<T>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 coordinates, found {}", tokens.len()),
            });
        }
        points.push(Point3::new(
            parse_coord(tokens[0], line_no)?,
            parse_coord(tokens[1], line_no)?,
            parse_coord(tokens[2], line_no)?,
        ));
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    PointCloud::new(points)
}

pub fn parse_ply<T: Scalar>(text: &str) -> Result<PointCloud<T>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let perr = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };

    match lines.next() {
        Some((_, "ply")) => {}
        Some((n, _)) => return Err(perr(n, "missing 'ply' magic")),
        None => return Err(Error::EmptyCloud),
    }

    let mut vertex_count: Option<usize> = None;
    let mut in_vertex = false;
    let mut seen_element = false;
    let mut axis_slots: Vec<Option<usize>> = Vec::new();
    let mut header_done = false;
    for (n, line) in lines.by_ref() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => continue,
            ["comment", ..] | ["obj_info", ..] => continue,
            ["format", "ascii", _] => {}
            ["format", other, ..] => {
                return Err(perr(n, &format!("unsupported PLY format '{other}'")));
            }
            ["element", name, count] => {
                let count: usize = count.parse().map_err(|_| perr(n, "invalid element count"))?;
                if !seen_element {
                    if *name != "vertex" {
                        return Err(perr(n, "first element must be 'vertex'"));
                    }
                    vertex_count = Some(count);
                    in_vertex = true;
                } else {
                    in_vertex = false;
                }
                seen_element = true;
            }
            ["property", "list", ..] if in_vertex => {
                return Err(perr(n, "list properties on vertices are not supported"));
            }
            ["property", ty, name] if in_vertex => {
                if !matches!(*ty, "float" | "double" | "float32" | "float64") {
                    return Err(perr(n, &format!("unsupported vertex property type '{ty}'")));
                }
                let slot = match *name {
                    "x" => 0,
                    "y" => 1,
                    "z" => 2,
                    other => {
                        return Err(perr(n, &format!("unsupported vertex property '{other}'")));
                    }
                };
                axis_slots.push(Some(slot));
            }
            ["property", ..] => {}
            ["end_header"] => {
                header_done = true;
                break;
            }
            _ => return Err(perr(n, &format!("unrecognised header line '{line}'"))),
        }
    }
    if !header_done {
        return Err(perr(0, "missing end_header"));
    }
    let count = vertex_count.ok_or_else(|| perr(0, "no vertex element"))?;
    let mut slots = axis_slots.iter().flatten().copied().collect::<Vec<_>>();
    slots.sort_unstable();
    if slots != [0, 1, 2] {
        return Err(perr(0, "vertex element must have exactly x, y and z properties"));
    }

    let mut points = Vec::with_capacity(count);
    let mut last_line = 0;
    while points.len() < count {
        let Some((n, line)) = lines.next() else {
            return Err(perr(
                last_line + 1,
                &format!("expected {count} vertices, found {}", points.len()),
            ));
        };
        last_line = n;
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != axis_slots.len() {
            return Err(perr(
                n,
                &format!("expected {} values, found {}", axis_slots.len(), tokens.len()),
            ));
        }
        let mut xyz = [T::zero(); 3];
        for (tok, slot) in tokens.iter().zip(&axis_slots) {
            if let Some(s) = slot {
                xyz[*s] = parse_coord(tok, n)?;
            }
        }
        points.push(Point3::from_array(xyz));
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    PointCloud::new(points)
}

pub fn to_xyz_string<T: Scalar>(pc: &PointCloud<T>) -> String {
    let mut out = String::with_capacity(pc.len() * 48);
    for p in pc {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    out
}

pub fn to_ply_string<T: Scalar>(pc: &PointCloud<T>) -> String {
    let ty = if std::mem::size_of::<T>() == 4 { "float" } else { "double" };
    let mut out = String::with_capacity(pc.len() * 48 + 128);
    let _ = write!(
        out,
        "ply\nformat ascii 1.0\nelement vertex {}\nproperty {ty} x\nproperty {ty} y\nproperty {ty} z\nend_header\n",
        pc.len()
    );
    out.push_str(&to_xyz_string(pc));
    out
}
