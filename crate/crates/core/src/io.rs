//! Point clouds, label metadata, dataset manifests and their on-disk formats.
//!
//! Matrices are stored either in a small binary container (`TACT` magic,
//! little-endian header, row-major `f32` payload) or as header-less CSV.
//! Every JSON artifact is written in canonical form: sorted keys, compact
//! separators and shortest round-trip float formatting, so identical inputs
//! always produce identical bytes.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nerve::MapperGraph;

pub const MATRIX_MAGIC: &[u8; 4] = b"TACT";
pub const MATRIX_VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

/// An `N x d` row-major matrix of finite `f32` values.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    data: Vec<f32>,
    n_points: usize,
    dim: usize,
}

impl PointCloud {
    pub fn new(data: Vec<f32>, n_points: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Format("dimension must be at least 1".into()));
        }
        let expected = n_points
            .checked_mul(dim)
            .ok_or_else(|| Error::Format("matrix dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} values for {n_points}x{dim}, got {}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::non_finite(pos / dim, pos % dim));
        }
        Ok(PointCloud {
            data,
            n_points,
            dim,
        })
    }

    /// Builds a cloud from rows; all rows must share the same length.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).unwrap_or(1);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::Format(format!(
                    "row {i} has {} values, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        PointCloud::new(data, rows.len(), dim)
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    /// Returns a copy with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f32) -> Result<Self> {
        PointCloud::new(
            self.data.iter().map(|v| v * factor).collect(),
            self.n_points,
            self.dim,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Binary,
    Csv,
}

impl MatrixFormat {
    /// `.csv` files are CSV, everything else is the binary container.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::Binary,
        }
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<PointCloud> {
    match format {
        MatrixFormat::Binary => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            decode_binary(&bytes)
        }
        MatrixFormat::Csv => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_csv(&text)
        }
    }
}

pub fn save_matrix(cloud: &PointCloud, path: &Path, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Binary => encode_binary(cloud),
        MatrixFormat::Csv => format_csv(cloud).into_bytes(),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn encode_binary(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + cloud.data.len() * 4);
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&MATRIX_VERSION.to_le_bytes());
    out.extend_from_slice(&(cloud.n_points as u64).to_le_bytes());
    out.extend_from_slice(&(cloud.dim as u64).to_le_bytes());
    for v in &cloud.data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<PointCloud> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file too short for header: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MATRIX_MAGIC {
        return Err(Error::Format("bad magic, expected \"TACT\"".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != MATRIX_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let d = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if d == 0 {
        return Err(Error::Format("header declares d = 0".into()));
    }
    let count = usize::try_from(n)
        .ok()
        .zip(usize::try_from(d).ok())
        .and_then(|(n, d)| n.checked_mul(d))
        .filter(|c| c.checked_mul(4).is_some())
        .ok_or_else(|| Error::Format(format!("header dimensions {n}x{d} overflow")))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != count * 4 {
        return Err(Error::Format(format!(
            "header declares {n}x{d} = {count} values but payload holds {} bytes ({} values)",
            payload.len(),
            payload.len() / 4
        )));
    }
    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    PointCloud::new(data, n as usize, d as usize)
}

pub fn parse_csv(text: &str) -> Result<PointCloud> {
    let mut data = Vec::new();
    let mut dim = None;
    let mut n = 0usize;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut width = 0usize;
        for (col, field) in line.split(',').enumerate() {
            let v: f32 = field.trim().parse().map_err(|_| {
                Error::Format(format!(
                    "line {}: cannot parse {:?} as a real",
                    line_no + 1,
                    field.trim()
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::non_finite(n, col));
            }
            data.push(v);
            width += 1;
        }
        match dim {
            None => dim = Some(width),
            Some(d) if d != width => {
                return Err(Error::Format(format!(
                    "line {}: {width} values, expected {d}",
                    line_no + 1
                )))
            }
            _ => {}
        }
        n += 1;
    }
    let dim = dim.ok_or_else(|| Error::Format("csv contains no rows".into()))?;
    PointCloud::new(data, n, dim)
}

pub fn format_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for row in cloud.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point_id: usize,
    pub class_label: String,
    #[serde(default)]
    pub example_ref: Option<String>,
}

/// Per-point class labels; `records[i].point_id == i` always holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PointMetadata {
    pub records: Vec<PointRecord>,
}

impl PointMetadata {
    /// Validates `records` against `n_points` and orders them by point id.
    pub fn new(mut records: Vec<PointRecord>, n_points: usize) -> Result<Self> {
        let mut seen = vec![false; n_points];
        for r in &records {
            if r.point_id >= n_points {
                return Err(Error::Data(format!(
                    "point_id {} out of range for {n_points} points",
                    r.point_id
                )));
            }
            if seen[r.point_id] {
                return Err(Error::Data(format!("duplicate point_id {}", r.point_id)));
            }
            seen[r.point_id] = true;
            if r.class_label.is_empty() {
                return Err(Error::Data(format!(
                    "empty class_label for point_id {}",
                    r.point_id
                )));
            }
        }
        if records.len() != n_points {
            let missing = seen.iter().position(|s| !s).unwrap_or(0);
            return Err(Error::Data(format!(
                "count mismatch: {} records for {n_points} points (first missing id {missing})",
                records.len()
            )));
        }
        records.sort_by_key(|r| r.point_id);
        Ok(PointMetadata { records })
    }

    /// Metadata assigning `labels[i]` to point `i`, without example references.
    pub fn from_labels<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let records: Vec<PointRecord> = labels
            .into_iter()
            .enumerate()
            .map(|(point_id, l)| PointRecord {
                point_id,
                class_label: l.into(),
                example_ref: None,
            })
            .collect();
        let n = records.len();
        PointMetadata::new(records, n)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[inline]
    pub fn label(&self, point: usize) -> &str {
        &self.records[point].class_label
    }

    pub fn example_ref(&self, point: usize) -> Option<&str> {
        self.records[point].example_ref.as_deref()
    }
}

pub fn load_metadata(path: &Path, n_points: usize) -> Result<PointMetadata> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: PointMetadata = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    PointMetadata::new(raw.records, n_points)
}

pub fn save_metadata(metadata: &PointMetadata, path: &Path) -> Result<()> {
    write_canonical_json(metadata, path)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerEntry {
    pub layer_name: String,
    pub matrix_path: PathBuf,
    /// Absent for unlabeled layers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata_path: Option<PathBuf>,
    /// Prebuilt graph for serving; defaults to `<layer_name>.graph.json`
    /// next to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_path: Option<PathBuf>,
}

/// Layers of one dataset, in network order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub layers: Vec<LayerEntry>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for layer in &self.layers {
            if !names.insert(layer.layer_name.as_str()) {
                return Err(Error::Data(format!(
                    "duplicate layer name {:?} in dataset {:?}",
                    layer.layer_name, self.name
                )));
            }
        }
        Ok(())
    }

    pub fn layer(&self, name: &str) -> Option<&LayerEntry> {
        self.layers.iter().find(|l| l.layer_name == name)
    }

    /// Makes every relative path absolute with respect to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for layer in &mut self.layers {
            fix(&mut layer.matrix_path);
            if let Some(meta) = &mut layer.metadata_path {
                fix(meta);
            }
            let graph = layer
                .graph_path
                .get_or_insert_with(|| PathBuf::from(format!("{}.graph.json", layer.layer_name)));
            fix(graph);
        }
    }
}

/// Loads a manifest, checks layer-name uniqueness and resolves paths
/// relative to the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut manifest: DatasetManifest = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    manifest.validate()?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    manifest.resolve_paths(base);
    Ok(manifest)
}

/// Serializes with sorted keys and shortest round-trip floats.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's default Map is a BTreeMap, so going through Value sorts keys.
    let value = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&value)?)
}

pub fn write_canonical_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = to_canonical_json(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_graph(graph: &MapperGraph, path: &Path) -> Result<()> {
    write_canonical_json(graph, path)
}

pub fn read_graph(path: &Path) -> Result<MapperGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(n: u64, d: u64) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(b"TACT");
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&n.to_le_bytes());
        b.extend_from_slice(&d.to_le_bytes());
        b
    }

    #[test]
    fn binary_declared_header() {
        let mut b = header(4, 3);
        for i in 0..12 {
            b.extend_from_slice(&(i as f32).to_le_bytes());
        }
        let cloud = decode_binary(&b).unwrap();
        assert_eq!((cloud.n_points(), cloud.dim()), (4, 3));
        assert_eq!(cloud.row(3), &[9.0, 10.0, 11.0]);
    }

    #[test]
    fn binary_truncated_payload() {
        let mut b = header(4, 3);
        for i in 0..11 {
            b.extend_from_slice(&(i as f32).to_le_bytes());
        }
        assert!(matches!(decode_binary(&b), Err(Error::Format(_))));
    }

    #[test]
    fn binary_bad_magic_and_version() {
        let mut b = header(0, 1);
        b[0] = b'X';
        assert!(matches!(decode_binary(&b), Err(Error::Format(_))));
        let mut b = header(0, 1);
        b[4] = 2;
        assert!(matches!(decode_binary(&b), Err(Error::Format(_))));
        assert!(matches!(decode_binary(b"TACT"), Err(Error::Format(_))));
    }

    #[test]
    fn binary_non_finite_reports_position() {
        let mut b = header(2, 2);
        for v in [1.0f32, 2.0, f32::NAN, 4.0] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        match decode_binary(&b) {
            Err(Error::Data(msg)) => assert!(msg.contains("row 1, col 0"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_two_rows() {
        let cloud = parse_csv("1.0,2.0\n3.0,4.0\n").unwrap();
        assert_eq!((cloud.n_points(), cloud.dim()), (2, 2));
        assert_eq!(cloud.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(parse_csv("1,2\n3\n"), Err(Error::Format(_))));
        assert!(matches!(parse_csv("1,x\n"), Err(Error::Format(_))));
        assert!(matches!(parse_csv("1,inf\n"), Err(Error::Data(_))));
        assert!(matches!(parse_csv(""), Err(Error::Format(_))));
    }

    fn records(ids: &[usize]) -> Vec<PointRecord> {
        ids.iter()
            .map(|&point_id| PointRecord {
                point_id,
                class_label: "c".into(),
                example_ref: None,
            })
            .collect()
    }

    #[test]
    fn metadata_validation() {
        assert_eq!(PointMetadata::new(records(&[2, 0, 1]), 3).unwrap().len(), 3);
        match PointMetadata::new(records(&[0, 0, 1]), 3) {
            Err(Error::Data(msg)) => assert!(msg.contains("duplicate point_id 0")),
            other => panic!("unexpected {other:?}"),
        }
        match PointMetadata::new(records(&[0, 1]), 3) {
            Err(Error::Data(msg)) => assert!(msg.contains("count mismatch")),
            other => panic!("unexpected {other:?}"),
        }
        let mut r = records(&[0]);
        r[0].class_label.clear();
        assert!(PointMetadata::new(r, 1).is_err());
    }

    #[test]
    fn manifest_rejects_duplicate_layers() {
        let entry = LayerEntry {
            layer_name: "4c".into(),
            matrix_path: "a.bin".into(),
            metadata_path: Some("a.json".into()),
            graph_path: None,
        };
        let m = DatasetManifest {
            name: "d".into(),
            layers: vec![entry.clone(), entry],
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn canonical_json_sorts_keys() {
        #[derive(Serialize)]
        struct S {
            zeta: f64,
            alpha: u32,
        }
        let s = to_canonical_json(&S { zeta: 0.1, alpha: 2 }).unwrap();
        assert_eq!(s, r#"{"alpha":2,"zeta":0.1}"#);
    }
}
