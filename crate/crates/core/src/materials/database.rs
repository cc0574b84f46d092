//! Plain-text material database.
//!
//! ```text
//! # comments start with '#', blank lines are ignored
//! [gaas.compliance_per_pa] 6x6
//! s11 s12 s12 0   0   0
//! ...                       (six rows, whitespace- or comma-separated)
//! [ln.piezo_z_c_per_m2] 3x6
//! ...                       (three rows, z-cut crystal frame)
//! [gaas.deformation_potentials_ev]
//! a_c = -7.17
//! a_v = -1.16
//! b = -2.0
//! d = -4.8
//! ```
//!
//! All three blocks are required. The compliance block must have the cubic
//! pattern and the piezoelectric block the trigonal 3m pattern. Every parse
//! error carries the 1-based line number it was found on.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix6, SMatrix};

use super::{DeformationPotentials, ElasticCompliance, MaterialsError, PiezoTensor};

const COMPLIANCE: &str = "gaas.compliance_per_pa";
const PIEZO: &str = "ln.piezo_z_c_per_m2";
const POTENTIALS: &str = "gaas.deformation_potentials_ev";

const BUNDLED_TEXT: &str = include_str!("../../data/materials.db");

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialSet {
    pub gaas_compliance: ElasticCompliance,
    pub ln_piezo_z: PiezoTensor,
    pub gaas_potentials: DeformationPotentials,
}

impl MaterialSet {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, MaterialsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| MaterialsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        parse_database(&text)
    }

    /// Location of the database shipped with this crate.
    pub fn bundled_path() -> &'static str {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/materials.db")
    }

    /// The shipped database, compiled into the binary.
    pub fn bundled() -> Result<Self, MaterialsError> {
        parse_database(BUNDLED_TEXT)
    }
}

enum Block {
    Matrix {
        name: String,
        header_line: usize,
        rows: usize,
        cols: usize,
        values: Vec<Vec<f64>>,
    },
    KeyValue {
        name: String,
        header_line: usize,
        entries: BTreeMap<String, (usize, f64)>,
    },
}

fn parse_err(line: usize, message: impl Into<String>) -> MaterialsError {
    MaterialsError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64, MaterialsError> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("expected a number, found '{token}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value '{token}'")));
    }
    Ok(v)
}

fn parse_header(rest: &str, line: usize) -> Result<Block, MaterialsError> {
    let close = rest
        .find(']')
        .ok_or_else(|| parse_err(line, "unterminated block header"))?;
    let name = rest[..close].trim().to_string();
    if name.is_empty() {
        return Err(parse_err(line, "empty block name"));
    }
    let shape = rest[close + 1..].trim();
    if shape.is_empty() {
        return Ok(Block::KeyValue {
            name,
            header_line: line,
            entries: BTreeMap::new(),
        });
    }
    let (r, c) = shape
        .split_once('x')
        .ok_or_else(|| parse_err(line, format!("bad block shape '{shape}', expected RxC")))?;
    let rows = r
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad row count '{r}'")))?;
    let cols = c
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad column count '{c}'")))?;
    Ok(Block::Matrix {
        name,
        header_line: line,
        rows,
        cols,
        values: Vec::new(),
    })
}

fn tokenize(blocks: &str) -> Result<Vec<Block>, MaterialsError> {
    let mut out: Vec<Block> = Vec::new();
    for (idx, raw) in blocks.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix('[') {
            out.push(parse_header(rest, line)?);
            continue;
        }
        match out.last_mut() {
            None => return Err(parse_err(line, "data before the first block header")),
            Some(Block::Matrix {
                name,
                rows,
                cols,
                values,
                ..
            }) => {
                if values.len() == *rows {
                    return Err(parse_err(
                        line,
                        format!("block [{name}] has more than {rows} rows"),
                    ));
                }
                let row = text
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                    .map(|t| parse_number(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != *cols {
                    return Err(parse_err(
                        line,
                        format!("block [{name}] expects {cols} columns, found {}", row.len()),
                    ));
                }
                values.push(row);
            }
            Some(Block::KeyValue { name, entries, .. }) => {
                let (k, v) = text.split_once('=').ok_or_else(|| {
                    parse_err(line, format!("expected 'key = value' in [{name}]"))
                })?;
                let key = k.trim().to_string();
                if entries.contains_key(&key) {
                    return Err(parse_err(line, format!("duplicate key '{key}'")));
                }
                entries.insert(key, (line, parse_number(v.trim(), line)?));
            }
        }
    }
    Ok(out)
}

/// Parses database text into a validated [`MaterialSet`].
pub fn parse_database(text: &str) -> Result<MaterialSet, MaterialsError> {
    let mut compliance = None;
    let mut piezo = None;
    let mut potentials = None;
    let last_line = text.lines().count().max(1);

    for block in tokenize(text)? {
        match block {
            Block::Matrix {
                name,
                header_line,
                rows,
                cols,
                values,
            } => {
                if values.len() != rows {
                    return Err(parse_err(
                        header_line,
                        format!("block [{name}] has {} of {rows} rows", values.len()),
                    ));
                }
                let flat: Vec<f64> = values.into_iter().flatten().collect();
                match (name.as_str(), rows, cols) {
                    (COMPLIANCE, 6, 6) => {
                        let s = ElasticCompliance::new(Matrix6::from_row_slice(&flat))
                            .map_err(|e| parse_err(header_line, e.to_string()))?;
                        if s.cubic_constants().is_none() {
                            return Err(parse_err(
                                header_line,
                                MaterialsError::NotCubic.to_string(),
                            ));
                        }
                        compliance = Some(s);
                    }
                    (PIEZO, 3, 6) => {
                        let e = PiezoTensor::new(SMatrix::<f64, 3, 6>::from_row_slice(&flat))
                            .map_err(|e| parse_err(header_line, e.to_string()))?;
                        if !e.satisfies_3m_pattern() {
                            return Err(parse_err(header_line, MaterialsError::Not3m.to_string()));
                        }
                        piezo = Some(e);
                    }
                    (COMPLIANCE | PIEZO, _, _) => {
                        return Err(parse_err(
                            header_line,
                            format!("block [{name}] has the wrong shape"),
                        ))
                    }
                    _ => return Err(parse_err(header_line, format!("unknown block [{name}]"))),
                }
            }
            Block::KeyValue {
                name,
                header_line,
                entries,
            } => {
                if name != POTENTIALS {
                    return Err(parse_err(header_line, format!("unknown block [{name}]")));
                }
                let get = |key: &str| {
                    entries.get(key).map(|(_, v)| *v).ok_or_else(|| {
                        parse_err(header_line, format!("missing key '{key}' in [{name}]"))
                    })
                };
                if let Some((k, (line, _))) = entries
                    .iter()
                    .find(|(k, _)| !["a_c", "a_v", "b", "d"].contains(&k.as_str()))
                {
                    return Err(parse_err(*line, format!("unknown key '{k}' in [{name}]")));
                }
                let p = DeformationPotentials::new(get("a_c")?, get("a_v")?, get("b")?, get("d")?)
                    .map_err(|e| parse_err(header_line, e.to_string()))?;
                p.check_zincblende_signs()
                    .map_err(|e| parse_err(header_line, e.to_string()))?;
                potentials = Some(p);
            }
        }
    }

    let missing = |name: &str| parse_err(last_line, format!("missing block [{name}]"));
    Ok(MaterialSet {
        gaas_compliance: compliance.ok_or_else(|| missing(COMPLIANCE))?,
        ln_piezo_z: piezo.ok_or_else(|| missing(PIEZO))?,
        gaas_potentials: potentials.ok_or_else(|| missing(POTENTIALS))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundled() -> MaterialSet {
        MaterialSet::load(MaterialSet::bundled_path()).unwrap()
    }

    #[test]
    fn bundled_database_has_expected_structure() {
        let m = bundled();
        let (s11, s12, s44) = m.gaas_compliance.cubic_constants().unwrap();
        assert!(s11 > 0.0 && s12 < 0.0 && s44 > 0.0);
        assert!(m.ln_piezo_z.satisfies_3m_pattern());
        // Exact zero pattern of class 3m.
        let e = m.ln_piezo_z.matrix();
        for (i, j) in [
            (0, 0),
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 4),
            (1, 5),
            (2, 3),
            (2, 4),
            (2, 5),
        ] {
            assert_eq!(e[(i, j)], 0.0, "e[{i}][{j}]");
        }
        assert_eq!(e[(1, 0)], -e[(1, 1)]);
        assert_eq!(e[(0, 5)], -e[(1, 1)]);
        assert_eq!(e[(1, 3)], e[(0, 4)]);
        assert!(m.gaas_potentials.b < 0.0 && m.gaas_potentials.d < 0.0);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "# header\n[gaas.compliance_per_pa] 6x6\n1 2 3\n";
        match parse_database(text) {
            Err(MaterialsError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("6 columns"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "[gaas.deformation_potentials_ev]\na_c = -7\na_v = oops\n";
        assert!(matches!(
            parse_database(text),
            Err(MaterialsError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_database("a = 1\n"),
            Err(MaterialsError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_missing_blocks_and_broken_patterns() {
        let text = std::fs::read_to_string(MaterialSet::bundled_path()).unwrap();
        let without_piezo: String = {
            let start = text.find("[ln.piezo_z_c_per_m2]").unwrap();
            let end = text.find("[gaas.deformation_potentials_ev]").unwrap();
            format!("{}{}", &text[..start], &text[end..])
        };
        let err = parse_database(&without_piezo).unwrap_err();
        assert!(err
            .to_string()
            .contains("missing block [ln.piezo_z_c_per_m2]"));

        let broken = text.replacen(
            "\n 0    0    0    0    3.7",
            "\n 0.5  0    0    0    3.7",
            1,
        );
        assert_ne!(broken, text);
        assert!(parse_database(&broken)
            .unwrap_err()
            .to_string()
            .contains("3m"));
    }
}
