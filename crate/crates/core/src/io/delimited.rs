//! CSV data files and histogram sidecars.
//!
//! Every CSV starts with a header naming its columns; lines beginning with
//! `#` are comments. Histograms are written as `(bin_center_ns, counts)`
//! with a `<stem>.meta.toml` sidecar holding the exact bin edges and the
//! generating parameters.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_text, write_atomic, IoError};
use crate::data::{uniform_edges, CorrelationHistogram, DecayHistogram, Spectrum, SpectrumKind};
use crate::resonator::ModeField;
use crate::units::UM;

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a CSV whose header must equal one of `headers`. Returns the index
/// of the matching header and `(line, row)` pairs.
type Rows = Vec<(u64, Vec<f64>)>;

fn read_table(path: &Path, headers: &[&[&str]]) -> Result<(usize, Rows), IoError> {
    let text = read_text(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => {
            return Err(parse_err(
                path,
                e.position().map_or(0, |p| p.line()),
                e.to_string(),
            ))
        }
        None => return Err(parse_err(path, 1, "missing header")),
    };
    let header_line = header.position().map_or(1, |p| p.line());
    let names: Vec<&str> = header.iter().collect();
    let which = headers
        .iter()
        .position(|h| *h == names.as_slice())
        .ok_or_else(|| {
            let expected: Vec<String> = headers.iter().map(|h| h.join(",")).collect();
            parse_err(
                path,
                header_line,
                format!(
                    "header '{}' is not one of: {}",
                    names.join(","),
                    expected.join(" | ")
                ),
            )
        })?;
    let width = headers[which].len();
    let mut rows = Vec::new();
    for rec in records {
        let rec =
            rec.map_err(|e| parse_err(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(parse_err(
                path,
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(path, line, format!("'{f}' is not a finite number")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push((line, row));
    }
    if rows.is_empty() {
        return Err(parse_err(path, header_line, "no data rows"));
    }
    Ok((which, rows))
}

fn check_axis(path: &Path, rows: &[(u64, Vec<f64>)]) -> Result<(), IoError> {
    for w in rows.windows(2) {
        let (a, b) = (w[0].1[0], w[1].1[0]);
        if b == a {
            return Err(IoError::DuplicateWavelength {
                path: path.display().to_string(),
                line: w[1].0,
            });
        }
        if b < a {
            return Err(IoError::NonMonotonicAxis {
                path: path.display().to_string(),
                line: w[1].0,
            });
        }
    }
    Ok(())
}

fn write_table(path: &Path, header: &[&str], columns: &[&[f64]]) -> Result<(), IoError> {
    let mut out = header.join(",");
    out.push('\n');
    for i in 0..columns[0].len() {
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", c[i]);
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads `wavelength_nm,transmission` or `wavelength_nm,counts`.
pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Spectrum, IoError> {
    let path = path.as_ref();
    let (which, rows) = read_table(
        path,
        &[
            &["wavelength_nm", "transmission"],
            &["wavelength_nm", "counts"],
        ],
    )?;
    check_axis(path, &rows)?;
    let kind = if which == 0 {
        SpectrumKind::Transmission
    } else {
        SpectrumKind::Counts
    };
    let (x, y) = rows.into_iter().map(|(_, r)| (r[0], r[1])).unzip();
    Ok(Spectrum::new(x, y, kind)?)
}

pub fn write_spectrum(path: impl AsRef<Path>, s: &Spectrum) -> Result<(), IoError> {
    write_table(
        path.as_ref(),
        &["wavelength_nm", s.kind().column_name()],
        &[s.wavelength_nm(), s.values()],
    )
}

/// Reads `voltage_v,wavelength_nm` pairs (any order of voltages).
pub fn read_tuning_points(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>, IoError> {
    let (_, rows) = read_table(path.as_ref(), &[&["voltage_v", "wavelength_nm"]])?;
    Ok(rows.into_iter().map(|(_, r)| (r[0], r[1])).collect())
}

pub fn write_tuning_points(path: impl AsRef<Path>, points: &[(f64, f64)]) -> Result<(), IoError> {
    let (v, w): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    write_table(path.as_ref(), &["voltage_v", "wavelength_nm"], &[&v, &w])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramKind {
    Decay,
    Correlation,
}

/// Sidecar contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramMeta {
    pub kind: HistogramKind,
    pub bins: usize,
    pub bin_start_ns: f64,
    /// Set for uniform bins; otherwise `bin_edges_ns` lists every edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_edges_ns: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irf_sigma_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetition_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_algorithm: Option<String>,
    #[serde(default)]
    pub model: BTreeMap<String, f64>,
}

impl HistogramMeta {
    pub fn new(kind: HistogramKind, edges: &[f64]) -> Self {
        let n = edges.len() - 1;
        let w = (edges[n] - edges[0]) / n as f64;
        let uniform = uniform_edges(edges[0], w, n) == edges;
        Self {
            kind,
            bins: n,
            bin_start_ns: edges[0],
            bin_width_ns: uniform.then_some(w),
            bin_edges_ns: (!uniform).then(|| edges.to_vec()),
            irf_sigma_ns: None,
            repetition_ns: None,
            seed: None,
            noise_algorithm: None,
            model: BTreeMap::new(),
        }
    }

    pub fn edges(&self) -> Option<Vec<f64>> {
        match (&self.bin_edges_ns, self.bin_width_ns) {
            (Some(e), _) => Some(e.clone()),
            (None, Some(w)) => Some(uniform_edges(self.bin_start_ns, w, self.bins)),
            (None, None) => None,
        }
    }
}

/// `decay.csv` → `decay.meta.toml`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Histogram as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramFile {
    pub centers_ns: Vec<f64>,
    pub counts: Vec<f64>,
    pub meta: Option<HistogramMeta>,
}

impl HistogramFile {
    /// Bin edges from the sidecar, or reconstructed from uniformly spaced
    /// centres.
    pub fn edges(&self) -> Vec<f64> {
        if let Some(e) = self.meta.as_ref().and_then(|m| m.edges()) {
            return e;
        }
        let n = self.centers_ns.len();
        let w = if n > 1 {
            (self.centers_ns[n - 1] - self.centers_ns[0]) / (n - 1) as f64
        } else {
            1.0
        };
        uniform_edges(self.centers_ns[0] - 0.5 * w, w, n)
    }

    /// Decay histogram; `irf_sigma_ns` overrides the sidecar value.
    pub fn to_decay(&self, irf_sigma_ns: Option<f64>) -> Result<DecayHistogram, IoError> {
        let sigma = irf_sigma_ns
            .or_else(|| self.meta.as_ref().and_then(|m| m.irf_sigma_ns))
            .ok_or_else(|| IoError::Schema {
                path: "<histogram>".into(),
                message: "IRF sigma is neither in the sidecar nor given".into(),
            })?;
        Ok(DecayHistogram::new(
            self.edges(),
            self.counts.clone(),
            sigma,
        )?)
    }

    /// Correlation histogram; `repetition_ns` overrides the sidecar value.
    pub fn to_correlation(
        &self,
        repetition_ns: Option<f64>,
    ) -> Result<CorrelationHistogram, IoError> {
        let t = repetition_ns
            .or_else(|| self.meta.as_ref().and_then(|m| m.repetition_ns))
            .ok_or_else(|| IoError::Schema {
                path: "<histogram>".into(),
                message: "repetition period is neither in the sidecar nor given".into(),
            })?;
        Ok(CorrelationHistogram::new(
            self.edges(),
            self.counts.clone(),
            t,
        )?)
    }
}

/// Writes the CSV and its sidecar; returns the sidecar path.
pub fn write_histogram(
    csv_path: impl AsRef<Path>,
    edges: &[f64],
    counts: &[f64],
    meta: &HistogramMeta,
) -> Result<PathBuf, IoError> {
    let csv_path = csv_path.as_ref();
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    write_table(csv_path, &["bin_center_ns", "counts"], &[&centers, counts])?;
    let side = sidecar_path(csv_path);
    let text = toml::to_string(meta).map_err(|e| IoError::Schema {
        path: side.display().to_string(),
        message: e.to_string(),
    })?;
    write_atomic(&side, text.as_bytes())?;
    Ok(side)
}

pub fn read_histogram(csv_path: impl AsRef<Path>) -> Result<HistogramFile, IoError> {
    let path = csv_path.as_ref();
    let (_, rows) = read_table(path, &[&["bin_center_ns", "counts"]])?;
    check_axis(path, &rows)?;
    let (centers_ns, counts): (Vec<f64>, Vec<f64>) =
        rows.into_iter().map(|(_, r)| (r[0], r[1])).unzip();
    let side = sidecar_path(path);
    let meta = if side.exists() {
        let text = read_text(&side)?;
        let meta: HistogramMeta = toml::from_str(&text).map_err(|e| IoError::Schema {
            path: side.display().to_string(),
            message: e.to_string(),
        })?;
        if meta.bins != counts.len() {
            return Err(IoError::Schema {
                path: side.display().to_string(),
                message: format!(
                    "sidecar lists {} bins, data has {}",
                    meta.bins,
                    counts.len()
                ),
            });
        }
        Some(meta)
    } else {
        None
    };
    Ok(HistogramFile {
        centers_ns,
        counts,
        meta,
    })
}

/// Writes a uniform-grid mode field as `x_um,y_um,z_um,permittivity,field_sq`.
pub fn write_mode_field(
    path: impl AsRef<Path>,
    field: &ModeField,
    origin_um: [f64; 3],
    spacing_um: [f64; 3],
) -> Result<(), IoError> {
    let [nx, ny, nz] = field.dims();
    let n = nx * ny * nz;
    let mut cols: [Vec<f64>; 3] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                for (a, idx) in [i, j, k].into_iter().enumerate() {
                    cols[a].push(origin_um[a] + spacing_um[a] * idx as f64);
                }
            }
        }
    }
    write_table(
        path.as_ref(),
        &["x_um", "y_um", "z_um", "permittivity", "field_sq"],
        &[
            &cols[0],
            &cols[1],
            &cols[2],
            field.permittivity(),
            field.field_sq(),
        ],
    )
}

/// Reads a full, uniformly spaced grid with z varying fastest.
pub fn read_mode_field(path: impl AsRef<Path>) -> Result<ModeField, IoError> {
    let path = path.as_ref();
    let (_, rows) = read_table(
        path,
        &[&["x_um", "y_um", "z_um", "permittivity", "field_sq"]],
    )?;
    let mut axes: [Vec<f64>; 3] = Default::default();
    for (a, axis) in axes.iter_mut().enumerate() {
        let mut v: Vec<f64> = rows.iter().map(|(_, r)| r[a]).collect();
        v.sort_by(|x, y| x.total_cmp(y));
        v.dedup();
        *axis = v;
    }
    let dims = [axes[0].len(), axes[1].len(), axes[2].len()];
    if dims.iter().product::<usize>() != rows.len() {
        return Err(parse_err(
            path,
            0,
            format!("{} rows do not form a {:?} grid", rows.len(), dims),
        ));
    }
    let mut spacing = [1.0; 3];
    for a in 0..3 {
        let v = &axes[a];
        if v.len() < 2 {
            return Err(parse_err(path, 0, "each axis needs at least two samples"));
        }
        let d = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        if v.windows(2)
            .any(|w| ((w[1] - w[0]) - d).abs() > 1e-9 * d.abs())
        {
            return Err(parse_err(path, 0, "grid spacing is not uniform"));
        }
        spacing[a] = d;
    }
    let mut i = 0;
    for x in &axes[0] {
        for y in &axes[1] {
            for z in &axes[2] {
                let (line, r) = &rows[i];
                if r[0] != *x || r[1] != *y || r[2] != *z {
                    return Err(parse_err(
                        path,
                        *line,
                        "rows are not ordered x, y, z with z fastest",
                    ));
                }
                i += 1;
            }
        }
    }
    let cell = spacing.iter().product::<f64>() * UM * UM * UM;
    let eps = rows.iter().map(|(_, r)| r[3]).collect();
    let e2 = rows.iter().map(|(_, r)| r[4]).collect();
    ModeField::uniform(dims, cell, eps, e2).map_err(|e| parse_err(path, 0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn spectrum_with_comments() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "s.csv",
            "# a\n# b\n# c\nwavelength_nm,transmission\n909.9,0.9\n910.0,0.1\n910.1,0.9\n",
        );
        let s = read_spectrum(&p).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.kind(), SpectrumKind::Transmission);
    }

    #[test]
    fn spectrum_errors_carry_lines() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "a.csv",
            "wavelength_nm,counts\n910.1,1\n910.0,2\n",
        );
        assert!(matches!(
            read_spectrum(&p),
            Err(IoError::NonMonotonicAxis { line: 3, .. })
        ));
        let p = write(
            d.path(),
            "b.csv",
            "# c\nwavelength_nm,counts\n910.0,1\n910.0,2\n",
        );
        assert!(matches!(
            read_spectrum(&p),
            Err(IoError::DuplicateWavelength { line: 4, .. })
        ));
        let p = write(
            d.path(),
            "c.csv",
            "wavelength_nm,counts\n910.0,1\n910.1,abc\n",
        );
        assert!(matches!(
            read_spectrum(&p),
            Err(IoError::Parse { line: 3, .. })
        ));
        let p = write(d.path(), "d.csv", "910.0,1\n910.1,2\n");
        assert!(matches!(
            read_spectrum(&p),
            Err(IoError::Parse { line: 1, .. })
        ));
        let p = write(d.path(), "e.csv", "wavelength_nm,counts\n910.0,1,3\n");
        assert!(matches!(
            read_spectrum(&p),
            Err(IoError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn spectrum_round_trip_is_exact() {
        let d = tempfile::tempdir().unwrap();
        let x: Vec<f64> = (0..100).map(|i| 909.0 + i as f64 * 0.013_7).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 17.0).sin().abs() / 3.0).collect();
        let s = Spectrum::new(x, y, SpectrumKind::Counts).unwrap();
        let p = d.path().join("s.csv");
        write_spectrum(&p, &s).unwrap();
        assert_eq!(read_spectrum(&p).unwrap(), s);
    }

    #[test]
    fn histogram_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let edges = uniform_edges(-1.0, 0.016, 300);
        let counts: Vec<f64> = (0..300).map(|i| (i * 7 % 13) as f64).collect();
        let mut meta = HistogramMeta::new(HistogramKind::Decay, &edges);
        meta.irf_sigma_ns = Some(0.0422);
        meta.seed = Some(7);
        meta.model.insert("rate_per_ns".into(), 1.9);
        let p = d.path().join("decay.csv");
        let side = write_histogram(&p, &edges, &counts, &meta).unwrap();
        assert!(side.ends_with("decay.meta.toml"));
        let back = read_histogram(&p).unwrap();
        assert_eq!(back.meta.as_ref().unwrap(), &meta);
        let h = back.to_decay(None).unwrap();
        assert_eq!(h.bin_edges_ns(), edges.as_slice());
        assert_eq!(h.counts(), counts.as_slice());

        // Non-uniform edges are stored explicitly.
        let edges = vec![0.0, 0.1, 0.3, 0.7];
        let meta = HistogramMeta::new(HistogramKind::Decay, &edges);
        assert!(meta.bin_edges_ns.is_some());
        write_histogram(&p, &edges, &[1.0, 2.0, 3.0], &meta).unwrap();
        assert_eq!(read_histogram(&p).unwrap().edges(), edges);
    }

    #[test]
    fn histogram_without_sidecar() {
        let d = tempfile::tempdir().unwrap();
        let p = write(
            d.path(),
            "h.csv",
            "bin_center_ns,counts\n-0.5,1\n0.5,4\n1.5,2\n",
        );
        let h = read_histogram(&p).unwrap();
        assert!(h.meta.is_none());
        assert_eq!(h.edges(), vec![-1.0, 0.0, 1.0, 2.0]);
        assert!(h.to_decay(None).is_err());
        assert!(h.to_decay(Some(0.1)).is_ok());
    }

    #[test]
    fn tuning_points_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let pts = vec![(-500.0, 910.235), (0.0, 910.0), (500.0, 909.765)];
        let p = d.path().join("t.csv");
        write_tuning_points(&p, &pts).unwrap();
        assert_eq!(read_tuning_points(&p).unwrap(), pts);
    }

    #[test]
    fn mode_field_round_trip() {
        let d = tempfile::tempdir().unwrap();
        let dims = [3, 4, 5];
        let n = 60;
        let eps: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
        let e2: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos().abs()).collect();
        let f = ModeField::uniform(dims, 0.02 * 0.03 * 0.05 * UM * UM * UM, eps, e2).unwrap();
        let p = d.path().join("m.csv");
        write_mode_field(&p, &f, [0.0, 0.0, 0.0], [0.02, 0.03, 0.05]).unwrap();
        let g = read_mode_field(&p).unwrap();
        assert_eq!(g.dims(), dims);
        assert_eq!(g.field_sq(), f.field_sq());
        assert!((g.cell_volume_m3()[0] / f.cell_volume_m3()[0] - 1.0).abs() < 1e-12);
    }
}
