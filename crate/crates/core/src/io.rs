//! CSV and JSON persistence for matrices, points and metadata.
//!
//! Matrices are stored with one CSV row per matrix row (so a generator file
//! has `d` rows and `n` columns), no header, `.` decimals, LF line endings.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Zonotope;
use crate::linalg::Matrix;

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn read_matrix<R: Read>(r: R) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| Error::BadShape(format!("bad number {f:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let cols = rows.first().map(Vec::len).unwrap_or(0);
    if rows.is_empty() || cols == 0 {
        return Err(Error::BadShape("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::BadShape("ragged matrix rows".into()));
    }
    Ok(Matrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    read_matrix(File::open(path)?)
}

pub fn write_matrix<W: Write>(w: W, m: &Matrix) -> Result<()> {
    let mut wtr = writer(w);
    for row in m.row_iter() {
        wtr.write_record(row.iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<()> {
    write_matrix(File::create(path)?, m)
}

/// One point per row.
pub fn write_points<W: Write>(w: W, points: &[Vec<f64>]) -> Result<()> {
    let mut wtr = writer(w);
    for p in points {
        wtr.write_record(p.iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub d: usize,
    pub n: usize,
    pub dropped_zero_columns: Vec<usize>,
}

impl Sidecar {
    pub fn of(z: &Zonotope) -> Sidecar {
        Sidecar { d: z.dim(), n: z.count(), dropped_zero_columns: z.dropped_zero_columns().to_vec() }
    }
}

/// `W.csv` gets `W.json` next to it.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Writes the generators and the metadata sidecar.
pub fn write_zonotope(path: &Path, z: &Zonotope) -> Result<()> {
    write_matrix_csv(path, z.generators())?;
    let meta = serde_json::to_string_pretty(&Sidecar::of(z))?;
    std::fs::write(sidecar_path(path), meta + "\n")?;
    Ok(())
}

pub fn read_zonotope(path: &Path) -> Result<Zonotope> {
    Zonotope::new(read_matrix_csv(path)?)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_row_slice(2, 3, &[1.0, -0.5, 1e-17, 3.25, 0.1, 2.0]);
        let mut buf = Vec::new();
        write_matrix(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(read_matrix(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn ragged_rejected() {
        assert!(read_matrix("1,2\n3\n".as_bytes()).is_err());
        assert!(read_matrix("".as_bytes()).is_err());
        assert!(read_matrix("1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn zonotope_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        let z = Zonotope::new(Matrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 0.0, 1.0])).unwrap();
        write_zonotope(&p, &z).unwrap();
        let meta: Sidecar = read_json(&sidecar_path(&p)).unwrap();
        assert_eq!(meta, Sidecar { d: 2, n: 2, dropped_zero_columns: vec![1] });
        assert_eq!(read_zonotope(&p).unwrap().generators(), z.generators());
    }
}
