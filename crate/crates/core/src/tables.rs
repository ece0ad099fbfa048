//! CSV tables: norm-form rows `(N', x, y, z, t)` and register traces laid out
//! one series per row.

use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::register::{RegisterError, RegisterSpec, RegisterState, Simulator};

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
}

/// One norm-form row: `N'` and the grid arguments
/// `(x, y, z, t) = (q~_00, q~_10, q~_01, q~_11)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(rename = "N_prime")]
    pub n_prime: u64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub t: i64,
}

pub fn parse_table1<R: Read>(reader: R) -> Result<Vec<Table1Row>, TableError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["N_prime", "x", "y", "z", "t"] {
        return Err(TableError::Header(headers.iter().collect::<Vec<_>>().join(",")));
    }
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}

/// A trace: header `series,0,1,..`, then the output coordinates `a_j` and the
/// memory coordinates `m_k_j` (k-major), one row each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTable {
    columns: usize,
    rows: Vec<(String, Vec<BigInt>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMismatch {
    pub series: String,
    pub column: usize,
    pub expected: Option<BigInt>,
    pub got: Option<BigInt>,
}

impl SequenceTable {
    pub fn new(columns: usize, rows: Vec<(String, Vec<BigInt>)>) -> Self {
        assert!(rows.iter().all(|(_, v)| v.len() == columns), "ragged sequence table");
        SequenceTable { columns, rows }
    }

    /// Runs `steps` transitions. Column `i` holds `a_i` and the memory of the
    /// state that emits `a_i` (so column 0 is the initial memory).
    pub fn from_run(
        spec: &RegisterSpec,
        state: &RegisterState,
        steps: usize,
        memory_bound: Option<&BigInt>,
    ) -> Result<Self, RegisterError> {
        let g = spec.ground();
        let (d, n) = (g.d(), g.n());
        let mut outputs = vec![Vec::with_capacity(steps); n];
        let mut memory = vec![Vec::with_capacity(steps); d * n];
        let mut sim = Simulator::new(spec, state)?;
        for _ in 0..steps {
            for (j, &a) in sim.output().iter().enumerate() {
                outputs[j].push(BigInt::from(a));
            }
            let m = sim.memory();
            for k in 0..d {
                for j in 0..n {
                    memory[k * n + j].push(m.get(k, j).clone());
                }
            }
            sim.advance();
            if let Some(bound) = memory_bound {
                sim.check_memory_bound(bound)?;
            }
        }
        let mut rows: Vec<(String, Vec<BigInt>)> = Vec::with_capacity(n + d * n);
        if steps > 0 {
            rows.extend(outputs.into_iter().enumerate().map(|(j, v)| (format!("a_{j}"), v)));
            rows.extend(
                memory
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (format!("m_{}_{}", i / n, i % n), v)),
            );
        }
        Ok(SequenceTable { columns: steps, rows })
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> &[(String, Vec<BigInt>)] {
        &self.rows
    }

    pub fn row(&self, series: &str) -> Option<&[BigInt]> {
        self.rows.iter().find(|(s, _)| s == series).map(|(_, v)| v.as_slice())
    }

    pub fn parse<R: Read>(reader: R) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = records.next().ok_or_else(|| TableError::Header("empty input".into()))??;
        if header.get(0) != Some("series")
            || header.iter().skip(1).enumerate().any(|(i, h)| h != i.to_string())
        {
            return Err(TableError::Header(header.iter().collect::<Vec<_>>().join(",")));
        }
        let columns = header.len() - 1;
        let mut rows = Vec::new();
        for record in records {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let name = record.get(0).unwrap_or_default().to_string();
            let values = record
                .iter()
                .skip(1)
                .map(|v| {
                    BigInt::from_str(v).map_err(|_| TableError::Row {
                        line,
                        message: format!("{v:?} is not an integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push((name, values));
        }
        Ok(SequenceTable { columns, rows })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(writer);
        let mut header = vec!["series".to_string()];
        header.extend((0..self.columns).map(|i| i.to_string()));
        wtr.write_record(&header)?;
        for (name, values) in &self.rows {
            let mut record = vec![name.clone()];
            record.extend(values.iter().map(BigInt::to_string));
            wtr.write_record(&record)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Cells of `expected` that `self` lacks or disagrees with.
    pub fn diff(&self, expected: &SequenceTable) -> Vec<CellMismatch> {
        let mut out = Vec::new();
        for (series, want) in &expected.rows {
            let have = self.row(series);
            for (column, w) in want.iter().enumerate() {
                let got = have.and_then(|h| h.get(column));
                if got != Some(w) {
                    out.push(CellMismatch {
                        series: series.clone(),
                        column,
                        expected: Some(w.clone()),
                        got: got.cloned(),
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_round_trip() {
        let rows = parse_table1("N_prime,x,y,z,t\n151,0,1,2,2\n 9, 2,1,4,0\n".as_bytes()).unwrap();
        assert_eq!(rows[0], Table1Row { n_prime: 151, x: 0, y: 1, z: 2, t: 2 });
        assert_eq!(rows[1].n_prime, 9);
        assert!(matches!(parse_table1("N,x,y,z,t\n".as_bytes()), Err(TableError::Header(_))));
        assert!(parse_table1("N_prime,x,y,z,t\n151,0,one,2,2\n".as_bytes()).is_err());
    }

    #[test]
    fn sequence_table_round_trip() {
        let t = SequenceTable::new(
            3,
            vec![
                ("a_0".into(), vec![1.into(), 0.into(), 1.into()]),
                ("m_0_0".into(), vec![5.into(), BigInt::from(-1), 0.into()]),
            ],
        );
        let text = t.to_csv_string();
        assert_eq!(text, "series,0,1,2\na_0,1,0,1\nm_0_0,5,-1,0\n");
        assert_eq!(SequenceTable::parse(text.as_bytes()).unwrap(), t);
        assert!(t.diff(&t).is_empty());
        let mut other = t.clone();
        other.rows[1].1[2] = 7.into();
        let d = t.diff(&other);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].series.as_str(), d[0].column), ("m_0_0", 2));
    }

    #[test]
    fn sequence_table_rejects_bad_input() {
        assert!(SequenceTable::parse("".as_bytes()).is_err());
        assert!(SequenceTable::parse("series,1,0\n".as_bytes()).is_err());
        assert!(SequenceTable::parse("series,0\na_0,x\n".as_bytes()).is_err());
    }

    #[test]
    fn empty_run_has_only_a_header() {
        let f = crate::fixtures::example1();
        let t = SequenceTable::from_run(&f.spec, &f.initial_state(), 0, None).unwrap();
        assert_eq!(t.to_csv_string(), "series\n");
    }
}
