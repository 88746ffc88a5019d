//! CSV datasets with header `f1,…,fd,target`.

use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub fn read_csv_from<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || headers.get(headers.len() - 1).map(str::trim) != Some("target") {
        return Err(Error::Parse { line: 1, msg: "header must read f1,…,fd,target".into() });
    }
    let dim = headers.len() - 1;
    let mut points = Vec::new();
    let mut targets = Vec::new();
    for (n, record) in rdr.records().enumerate() {
        let record = record?;
        let line = n + 2;
        if record.len() != dim + 1 {
            return Err(Error::Parse { line, msg: format!("expected {} fields, found {}", dim + 1, record.len()) });
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("`{field}` is not a number") })?;
            if j < dim {
                points.push(v);
            } else {
                targets.push(v);
            }
        }
    }
    Dataset::new(dim, points, targets)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    read_csv_from(std::fs::File::open(path)?)
}

/// Values are written in shortest round-trip form.
pub fn write_csv_to<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    let mut header: Vec<String> = (1..=data.dim()).map(|j| format!("f{j}")).collect();
    header.push("target".into());
    w.write_record(&header)?;
    for (t, x) in data.points().zip(data.targets()) {
        let row: Vec<String> = t.iter().chain(std::iter::once(x)).map(|v| format!("{v:?}")).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: impl AsRef<Path>, data: &Dataset) -> Result<()> {
    write_csv_to(std::io::BufWriter::new(std::fs::File::create(path)?), data)
}
