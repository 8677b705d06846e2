//! Matrix files: dense row-major CSV, and JSON objects of the form
//! `{"n": 2, "entries": [a11, a12, a21, a22]}`. Nested row arrays are also
//! accepted for `entries`. Complex matrices are `{"re": {...}, "im": {...}}`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, RealMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Entries {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealMatrixJson {
    pub n: usize,
    #[serde(with = "entries")]
    pub entries: Vec<f64>,
}

mod entries {
    use super::Entries;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Ok(match Entries::deserialize(d)? {
            Entries::Flat(v) => v,
            Entries::Rows(rows) => rows.into_iter().flatten().collect(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexMatrixJson {
    pub re: RealMatrixJson,
    pub im: RealMatrixJson,
}

impl From<&RealMatrix> for RealMatrixJson {
    fn from(m: &RealMatrix) -> Self {
        RealMatrixJson { n: m.n(), entries: m.data().to_vec() }
    }
}

impl TryFrom<RealMatrixJson> for RealMatrix {
    type Error = Error;

    fn try_from(j: RealMatrixJson) -> Result<Self> {
        RealMatrix::from_row_major(j.n, j.entries)
    }
}

impl TryFrom<ComplexMatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: ComplexMatrixJson) -> Result<Self> {
        ComplexMatrix::new(j.re.try_into()?, j.im.try_into()?)
    }
}

pub fn read_real_json<R: Read>(reader: R) -> Result<RealMatrix> {
    let j: RealMatrixJson = serde_json::from_reader(reader).map_err(|e| Error::Format(e.to_string()))?;
    j.try_into()
}

pub fn read_complex_json<R: Read>(reader: R) -> Result<ComplexMatrix> {
    let j: ComplexMatrixJson = serde_json::from_reader(reader).map_err(|e| Error::Format(e.to_string()))?;
    j.try_into()
}

pub fn read_real_csv<R: Read>(reader: R) -> Result<RealMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut data = Vec::new();
    let mut rows = 0;
    let mut width = None;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Format(e.to_string()))?;
        if *width.get_or_insert(record.len()) != record.len() {
            return Err(Error::Format(format!("row {r} has {} fields, expected {}", record.len(), width.unwrap())));
        }
        for field in record.iter() {
            let v = field
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("row {r}: cannot parse `{field}`")))?;
            data.push(v);
        }
        rows += 1;
    }
    if width.unwrap_or(0) != rows {
        return Err(Error::Format(format!("expected a square matrix, got {rows} rows of {} fields", width.unwrap_or(0))));
    }
    RealMatrix::from_row_major(rows, data)
}

pub fn write_real_csv<W: Write>(m: &RealMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| format!("{:?}", m.get(i, j))).collect();
        wtr.write_record(&row).map_err(|e| Error::Format(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}
