//! JSON interchange for accumulator complexes, merged complexes and
//! validation reports.
//!
//! Files use 1-based indices throughout. Object keys are written in sorted
//! order, arrays of scalars on one line, and floats in shortest round-trip
//! form, so saving a loaded file reproduces it byte for byte.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::congruence::{AccumulatorComplex, CellArray, QuotientComplex};
use crate::error::{Error, Result};
use crate::partition::ClassPartition;
use crate::sparse::{Coeff, Sign, SignedSparseMatrix};
use crate::validation::ValidationReport;
use crate::vertex::PointCloud;

pub const COMPLEX_SCHEMA: &str = "chaincongruence.complex/1";
pub const QUOTIENT_SCHEMA: &str = "chaincongruence.quotient/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub ncols: usize,
    pub nrows: usize,
    pub triples: Vec<(usize, usize, Coeff)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub delta0: MatrixFile,
    pub delta1: MatrixFile,
    pub schema_version: String,
    pub vertices: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassMapFile {
    pub classes: Vec<Vec<usize>>,
    pub dropped: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<Vec<Sign>>>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta0: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<MatrixFile>,
    pub eclasses: ClassMapFile,
    pub ev: Vec<Vec<usize>>,
    pub fclasses: ClassMapFile,
    pub fe: Vec<Vec<usize>>,
    pub schema_version: String,
    pub vclasses: ClassMapFile,
    pub vertices: Vec<[f64; 3]>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidQuotient(msg.into())
}

fn to_zero_based(i: usize, what: &str) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| invalid(format!("{what}: indices are 1-based, found 0")))
}

fn matrix_to_file(m: &SignedSparseMatrix) -> MatrixFile {
    MatrixFile {
        ncols: m.ncols(),
        nrows: m.nrows(),
        triples: m.triples().map(|(r, c, v)| (r + 1, c + 1, v)).collect(),
    }
}

fn matrix_from_file(m: &MatrixFile, what: &str) -> Result<SignedSparseMatrix> {
    let triples = m
        .triples
        .iter()
        .map(|&(r, c, v)| Ok((to_zero_based(r, what)?, to_zero_based(c, what)?, v)))
        .collect::<Result<Vec<_>>>()?;
    SignedSparseMatrix::from_triples(m.nrows, m.ncols, triples)
        .map_err(|e| Error::InvalidAccumulator(format!("{what}: {e}")))
}

fn points_to_file(p: &PointCloud) -> Vec<[f64; 3]> {
    p.points().map(|q| [q[0], q[1], q[2]]).collect()
}

fn points_from_file(v: &[[f64; 3]]) -> Result<PointCloud> {
    PointCloud::from_points3(v)
}

fn class_map_to_file(p: &ClassPartition, signs: Option<&Vec<Vec<Sign>>>) -> ClassMapFile {
    let one_based = |v: &Vec<usize>| v.iter().map(|i| i + 1).collect();
    ClassMapFile {
        classes: p.classes.iter().map(one_based).collect(),
        dropped: one_based(&p.dropped),
        signs: signs.cloned(),
        size: p.size,
    }
}

fn class_map_from_file(f: &ClassMapFile, what: &str) -> Result<ClassPartition> {
    let zero_based = |v: &Vec<usize>| {
        v.iter()
            .map(|&i| to_zero_based(i, what))
            .collect::<Result<Vec<_>>>()
    };
    Ok(ClassPartition {
        size: f.size,
        classes: f.classes.iter().map(zero_based).collect::<Result<_>>()?,
        dropped: zero_based(&f.dropped)?,
    })
}

fn cells_to_file(c: &CellArray) -> Vec<Vec<usize>> {
    c.cells
        .iter()
        .map(|cell| cell.iter().map(|i| i + 1).collect())
        .collect()
}

fn cells_from_file(c: &[Vec<usize>], what: &str) -> Result<CellArray> {
    let cells = c
        .iter()
        .map(|cell| cell.iter().map(|&i| to_zero_based(i, what)).collect())
        .collect::<Result<_>>()?;
    Ok(CellArray { cells })
}

impl ComplexFile {
    pub fn from_complex(acc: &AccumulatorComplex) -> Self {
        Self {
            delta0: matrix_to_file(acc.delta0()),
            delta1: matrix_to_file(acc.delta1()),
            schema_version: COMPLEX_SCHEMA.into(),
            vertices: points_to_file(acc.vertices()),
        }
    }

    pub fn into_complex(self) -> Result<AccumulatorComplex> {
        if self.schema_version != COMPLEX_SCHEMA {
            return Err(Error::InvalidAccumulator(format!(
                "unsupported schema_version {:?}",
                self.schema_version
            )));
        }
        let vertices = points_from_file(&self.vertices)?;
        let delta0 = matrix_from_file(&self.delta0, "delta0")?;
        let delta1 = matrix_from_file(&self.delta1, "delta1")?;
        AccumulatorComplex::new(vertices, delta0, delta1)
    }
}

impl QuotientFile {
    pub fn from_quotient(q: &QuotientComplex) -> Self {
        Self {
            delta0: q.delta0.as_ref().map(matrix_to_file),
            delta1: q.delta1.as_ref().map(matrix_to_file),
            eclasses: class_map_to_file(&q.eclasses, q.edge_signs.as_ref()),
            ev: cells_to_file(&q.ev),
            fclasses: class_map_to_file(&q.fclasses, q.face_signs.as_ref()),
            fe: cells_to_file(&q.fe),
            schema_version: QUOTIENT_SCHEMA.into(),
            vclasses: class_map_to_file(&q.vclasses, None),
            vertices: points_to_file(&q.vertices),
        }
    }

    /// Structural checks only: index ranges and operator shapes. Class maps
    /// are loaded as given so that validation can report on them.
    pub fn into_quotient(self) -> Result<QuotientComplex> {
        if self.schema_version != QUOTIENT_SCHEMA {
            return Err(invalid(format!(
                "unsupported schema_version {:?}",
                self.schema_version
            )));
        }
        if self.vclasses.signs.is_some() {
            return Err(invalid("vclasses carry no signs"));
        }
        let vertices = points_from_file(&self.vertices)?;
        let ev = cells_from_file(&self.ev, "ev")?;
        let fe = cells_from_file(&self.fe, "fe")?;
        ev.check(vertices.len())?;
        fe.check(ev.len())?;
        let delta0 = self
            .delta0
            .as_ref()
            .map(|m| matrix_from_file(m, "delta0"))
            .transpose()?;
        let delta1 = self
            .delta1
            .as_ref()
            .map(|m| matrix_from_file(m, "delta1"))
            .transpose()?;
        if delta0.is_some() != delta1.is_some() {
            return Err(invalid("delta0 and delta1 must be given together"));
        }
        if let Some(d0) = &delta0 {
            if (d0.nrows(), d0.ncols()) != (ev.len(), vertices.len()) {
                return Err(invalid("delta0 must be #E x #V"));
            }
        }
        if let Some(d1) = &delta1 {
            if (d1.nrows(), d1.ncols()) != (fe.len(), ev.len()) {
                return Err(invalid("delta1 must be #F x #E"));
            }
        }
        Ok(QuotientComplex {
            vertices,
            ev,
            fe,
            delta0,
            delta1,
            vclasses: class_map_from_file(&self.vclasses, "vclasses")?,
            eclasses: class_map_from_file(&self.eclasses, "eclasses")?,
            fclasses: class_map_from_file(&self.fclasses, "fclasses")?,
            edge_signs: self.eclasses.signs,
            face_signs: self.fclasses.signs,
        })
    }
}

/// Render JSON with sorted keys, two-space indentation, and arrays holding
/// only scalars kept on a single line.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("file types serialize to JSON");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(indent + 2, out);
                write_value(item, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 2, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn complex_from_json(text: &str) -> Result<AccumulatorComplex> {
    parse::<ComplexFile>(text, Path::new("<string>"))?.into_complex()
}

pub fn complex_to_json(acc: &AccumulatorComplex) -> String {
    to_canonical_json(&ComplexFile::from_complex(acc))
}

pub fn quotient_from_json(text: &str) -> Result<QuotientComplex> {
    parse::<QuotientFile>(text, Path::new("<string>"))?.into_quotient()
}

pub fn quotient_to_json(q: &QuotientComplex) -> String {
    to_canonical_json(&QuotientFile::from_quotient(q))
}

pub fn report_to_json(r: &ValidationReport) -> String {
    to_canonical_json(r)
}

pub fn load_complex(path: impl AsRef<Path>) -> Result<AccumulatorComplex> {
    let path = path.as_ref();
    parse::<ComplexFile>(&read(path)?, path)?.into_complex()
}

pub fn save_complex(acc: &AccumulatorComplex, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &complex_to_json(acc))
}

pub fn load_quotient(path: impl AsRef<Path>) -> Result<QuotientComplex> {
    let path = path.as_ref();
    parse::<QuotientFile>(&read(path)?, path)?.into_quotient()
}

pub fn save_quotient(q: &QuotientComplex, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &quotient_to_json(q))
}

pub fn save_report(r: &ValidationReport, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &report_to_json(r))
}
