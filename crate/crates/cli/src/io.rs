//! File formats: JSONL state records, CSV tables and checksums.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use entangle_core::measures::MeasureRecord;
use entangle_core::{ComplexMatrix, DensityMatrix, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// One line of a state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: u64,
    pub dim_a: usize,
    pub dim_b: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

impl StateRecord {
    pub fn from_state(id: u64, rho: &DensityMatrix) -> Self {
        let (dim_a, dim_b) = rho.dims();
        Self {
            id,
            dim_a,
            dim_b,
            entries: rho.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self) -> entangle_core::Result<DensityMatrix> {
        let d = self.dim_a * self.dim_b;
        if self.entries.len() != d * d {
            return Err(entangle_core::Error::Shape(format!(
                "{} entries for a {d}x{d} matrix",
                self.entries.len()
            )));
        }
        let data = self.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        DensityMatrix::new(ComplexMatrix::from_vec(d, d, data)?, self.dim_a, self.dim_b)
    }
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn write_states(path: &Path, records: &[StateRecord]) -> CliResult<()> {
    let mut w = create(path)?;
    for rec in records {
        let line = serde_json::to_string(rec).map_err(|e| CliError::Data(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Parses and validates every line; errors carry the 1-based line number.
pub fn read_states(path: &Path) -> CliResult<Vec<(u64, DensityMatrix)>> {
    let mut out = Vec::new();
    for (k, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Data(format!("{}:{}: {msg}", path.display(), k + 1));
        let rec: StateRecord = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let rho = rec.to_state().map_err(|e| bad(e.to_string()))?;
        out.push((rec.id, rho));
    }
    Ok(out)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes rows with `\n` terminators.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?);
    let csv_err = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// A CSV file held as header plus string cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> CliResult<Self> {
        let mut r = csv::Reader::from_reader(open(path)?);
        let bad = |e: csv::Error| CliError::Data(format!("{}: {e}", path.display()));
        let header = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(bad)?;
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric cell; empty cells are `None`.
    pub fn number(&self, row: usize, col: usize) -> CliResult<Option<f64>> {
        let cell = self.rows[row].get(col).map(|s| s.trim()).unwrap_or("");
        if cell.is_empty() {
            return Ok(None);
        }
        cell.parse()
            .map(Some)
            .map_err(|_| CliError::Data(format!("row {}: bad number {cell:?}", row + 1)))
    }

    fn ids(&self, name: &str) -> CliResult<Vec<u64>> {
        let col = self
            .column(name)
            .ok_or_else(|| CliError::Data(format!("missing column {name:?}")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                r[col]
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Data(format!("row {}: bad id {:?}", k + 1, r[col])))
            })
            .collect()
    }
}

pub const MEASURE_HEADER: [&str; 9] = [
    "id",
    "concurrence",
    "c_max",
    "negativity",
    "log_negativity",
    "neg_eig",
    "eof",
    "ree",
    "ree_gap",
];

pub fn measure_row(id: u64, r: &MeasureRecord) -> Vec<String> {
    let mut row = vec![id.to_string()];
    row.extend(
        [
            r.concurrence,
            r.c_max,
            r.negativity,
            r.log_negativity,
            r.neg_eig_measure,
            r.eof,
            r.ree,
            r.ree_gap,
        ]
        .map(fmt_opt),
    );
    row
}

/// Measurement rows keyed by id, optionally joined with optimizer output.
pub fn read_records(results: &Path, mqfi: Option<&Path>) -> CliResult<Vec<(u64, MeasureRecord)>> {
    let t = Table::read(results)?;
    let ids = t.ids("id")?;
    let col = |name: &str| t.column(name);
    let cols: Vec<Option<usize>> = MEASURE_HEADER[1..].iter().map(|n| col(n)).collect();
    let mut out = Vec::with_capacity(ids.len());
    for (k, &id) in ids.iter().enumerate() {
        let get = |c: Option<usize>| -> CliResult<Option<f64>> {
            match c {
                Some(c) => t.number(k, c),
                None => Ok(None),
            }
        };
        out.push((
            id,
            MeasureRecord {
                concurrence: get(cols[0])?,
                c_max: get(cols[1])?,
                negativity: get(cols[2])?,
                log_negativity: get(cols[3])?,
                neg_eig_measure: get(cols[4])?,
                eof: get(cols[5])?,
                ree: get(cols[6])?,
                ree_gap: get(cols[7])?,
                ..MeasureRecord::default()
            },
        ));
    }
    if let Some(path) = mqfi {
        let m = Table::read(path)?;
        let mids = m.ids("state_id")?;
        if mids != ids {
            return Err(CliError::Data(format!(
                "ids in {} do not match ids in {}",
                path.display(),
                results.display()
            )));
        }
        let need = |name: &str| {
            m.column(name)
                .ok_or_else(|| CliError::Data(format!("{}: missing column {name:?}", path.display())))
        };
        let (q, qmax, qmin) = (need("qfi")?, need("mqfi_max")?, need("mqfi_min")?);
        for (k, (_, rec)) in out.iter_mut().enumerate() {
            rec.mean_qfi = m.number(k, q)?;
            rec.mqfi_max = m.number(k, qmax)?;
            rec.mqfi_min = m.number(k, qmin)?;
        }
    }
    Ok(out)
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
