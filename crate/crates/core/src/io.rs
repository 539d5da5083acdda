//! On-disk formats: OBJ meshes, JSON Lines tracks, raw `f32` depth with a
//! JSON sidecar, binary PGM masks and plain JSON documents.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{GeomError, TrackFrame, TrackedPoints, TriMesh};
use crate::linalg::Vec3;
use crate::metrics::BinaryMask;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Geom {
        path: PathBuf,
        #[source]
        source: GeomError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format { path: path.to_path_buf(), msg: msg.into() }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.to_path_buf(), source })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| IoError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Parses `v` and triangular `f` records; other records are ignored.
/// Face indices may be 1-based or negative, with optional `/vt/vn` parts.
pub fn parse_obj(text: &str, path: &Path) -> Result<TriMesh<f64>, IoError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let mut it = line.split_whitespace();
        let parse_err = |msg: String| IoError::Parse { path: path.to_path_buf(), line: line_no, msg };
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|e| parse_err(format!("bad vertex coordinate: {e}"))))
                    .collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(parse_err("vertex needs 3 coordinates".into()));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        let i: i64 = first.parse().map_err(|e| parse_err(format!("bad face index: {e}")))?;
                        let n = vertices.len() as i64;
                        let resolved = if i > 0 { i - 1 } else { n + i };
                        if i == 0 || resolved < 0 {
                            return Err(parse_err(format!("face index {i} out of range")));
                        }
                        Ok(resolved as usize)
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(format!("only triangular faces are supported, got {}", idx.len())));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, faces).map_err(|source| IoError::Geom { path: path.to_path_buf(), source })
}

pub fn read_obj(path: &Path) -> Result<TriMesh<f64>, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_obj(&text, path)
}

pub fn obj_string(mesh: &TriMesh<f64>) -> String {
    let mut s = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in mesh.faces() {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

pub fn write_obj(path: &Path, mesh: &TriMesh<f64>) -> Result<(), IoError> {
    fs::write(path, obj_string(mesh)).map_err(io_err(path))
}

/// One `{frame, points, valid}` record per line; blank lines skipped.
pub fn read_tracks(path: &Path) -> Result<TrackedPoints<f64>, IoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut frames = Vec::new();
    for (ln, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TrackFrame<f64> = serde_json::from_str(&line).map_err(|e| IoError::Parse {
            path: path.to_path_buf(),
            line: ln + 1,
            msg: e.to_string(),
        })?;
        frames.push(rec);
    }
    TrackedPoints::new(frames).map_err(|source| IoError::Geom { path: path.to_path_buf(), source })
}

pub fn write_tracks(path: &Path, tracks: &TrackedPoints<f64>) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for f in tracks.frames() {
        let line = serde_json::to_string(f).map_err(|source| IoError::Json { path: path.to_path_buf(), source })?;
        writeln!(w, "{line}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthHeader {
    pub width: usize,
    pub height: usize,
    pub frame_index: usize,
}

/// Sidecar path for a raw depth file: same stem, `.json`.
pub fn depth_sidecar(raw: &Path) -> PathBuf {
    raw.with_extension("json")
}

/// Row-major little-endian `f32` depth and its sidecar header.
pub fn read_depth(raw: &Path) -> Result<(DepthHeader, Vec<f32>), IoError> {
    let header: DepthHeader = read_json(&depth_sidecar(raw))?;
    let bytes = fs::read(raw).map_err(io_err(raw))?;
    let expected = header.width * header.height * 4;
    if bytes.len() != expected {
        return Err(format_err(raw, format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let data = bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    Ok((header, data))
}

pub fn write_depth(raw: &Path, header: &DepthHeader, data: &[f32]) -> Result<(), IoError> {
    if data.len() != header.width * header.height {
        return Err(format_err(raw, "depth length does not match header"));
    }
    let bytes: Vec<u8> = data.iter().flat_map(|d| d.to_le_bytes()).collect();
    fs::write(raw, bytes).map_err(io_err(raw))?;
    write_json(&depth_sidecar(raw), header)
}

fn pgm_tokens(bytes: &[u8], path: &Path) -> Result<([usize; 3], usize), IoError> {
    // magic, width, height, maxval separated by whitespace and comments
    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(format_err(path, "truncated PGM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(format_err(path, "not a binary PGM (P5)"));
    }
    let mut nums = [0usize; 3];
    for (k, f) in fields[1..].iter().enumerate() {
        nums[k] = f.parse().map_err(|_| format_err(path, format!("bad PGM header field {f:?}")))?;
    }
    if nums[2] == 0 || nums[2] > 255 {
        return Err(format_err(path, "PGM maxval must be in 1..=255"));
    }
    // exactly one whitespace byte before the raster
    Ok((nums, pos + 1))
}

/// Binary PGM; any non-zero pixel is foreground.
pub fn read_pgm(path: &Path) -> Result<BinaryMask, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let ([w, h, _], start) = pgm_tokens(&bytes, path)?;
    let raster = bytes.get(start..start + w * h).ok_or_else(|| format_err(path, "truncated PGM raster"))?;
    BinaryMask::new(w, h, raster.iter().map(|b| *b != 0).collect()).map_err(|e| format_err(path, e.to_string()))
}

/// Foreground 255, background 0.
pub fn write_pgm(path: &Path, mask: &BinaryMask) -> Result<(), IoError> {
    let mut bytes = format!("P5\n{} {}\n255\n", mask.width, mask.height).into_bytes();
    bytes.extend(mask.data.iter().map(|b| if *b { 255u8 } else { 0 }));
    fs::write(path, bytes).map_err(io_err(path))
}

pub fn depth_file_name(frame: usize) -> String {
    format!("depth_{frame:05}.f32")
}

pub fn mask_file_name(frame: usize) -> String {
    format!("mask_{frame:05}.pgm")
}

/// Every `*.f32` in `dir`, ordered by the sidecar frame index.
pub fn read_depth_dir(dir: &Path) -> Result<Vec<(DepthHeader, Vec<f32>)>, IoError> {
    let mut raws: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "f32"))
        .collect();
    raws.sort();
    let mut out = raws.iter().map(|p| read_depth(p)).collect::<Result<Vec<_>, _>>()?;
    out.sort_by_key(|(h, _)| h.frame_index);
    Ok(out)
}

/// `mask_NNNNN.pgm` for frames `0..n`; absent files give `None`.
pub fn read_mask_dir(dir: &Path, n: usize) -> Result<Vec<Option<BinaryMask>>, IoError> {
    if !dir.is_dir() {
        return Err(format_err(dir, "mask directory not found"));
    }
    (0..n)
        .map(|i| {
            let p = dir.join(mask_file_name(i));
            if p.exists() {
                read_pgm(&p).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_roundtrip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.obj");
        let mesh = TriMesh::tetrahedron(0.1, 0);
        write_obj(&p, &mesh).unwrap();
        let back = read_obj(&p).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.faces(), mesh.faces());
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(parse_obj(quad, &p), Err(IoError::Parse { line: 5, .. })));
        let neg = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3/1/1 -2//2 -1\n";
        assert_eq!(parse_obj(neg, &p).unwrap().faces(), &[[0, 1, 2]]);
    }

    #[test]
    fn pgm_and_depth_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = BinaryMask::empty(3, 2);
        m.set(1, 1);
        let p = dir.path().join("m.pgm");
        write_pgm(&p, &m).unwrap();
        assert_eq!(read_pgm(&p).unwrap(), m);
        let commented = b"P5\n# c\n3 2\n255\n\0\0\0\0\xff\0".to_vec();
        fs::write(&p, commented).unwrap();
        assert_eq!(read_pgm(&p).unwrap(), m);

        let raw = dir.path().join(depth_file_name(4));
        let h = DepthHeader { width: 2, height: 1, frame_index: 4 };
        write_depth(&raw, &h, &[1.5, 0.0]).unwrap();
        assert_eq!(read_depth(&raw).unwrap(), (h, vec![1.5, 0.0]));
        fs::write(&raw, [0u8; 3]).unwrap();
        assert!(matches!(read_depth(&raw), Err(IoError::Format { .. })));
    }

    #[test]
    fn tracks_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        let t = TrackedPoints::from_points(vec![vec![Vec3::new(0.1, 0.2, 0.3)]; 3]).unwrap();
        write_tracks(&p, &t).unwrap();
        assert_eq!(read_tracks(&p).unwrap(), t);
        fs::write(&p, "{\"frame\":0,\"points\":[[0,0,0]],\"valid\":[true]}\nnot json\n").unwrap();
        assert!(matches!(read_tracks(&p), Err(IoError::Parse { line: 2, .. })));
    }
}
