//! MatrixMarket (.mtx) and CSV readers/writers.
//!
//! CSV layout: one matrix row per line, comma-separated; right-hand sides are
//! a single column. MatrixMarket supports the standard `array` and
//! `coordinate` formats for real matrices (general or symmetric).

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::system::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    MatrixMarket,
    Csv,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Loads `A` from `matrix_path` and `b` from `rhs_path`, then classifies the
/// system (rank, consistency).
pub fn load_system(
    matrix_path: impl AsRef<Path>,
    rhs_path: impl AsRef<Path>,
    format: FileFormat,
) -> Result<LinearSystem> {
    let a = read_matrix(matrix_path.as_ref(), format)?;
    let b = read_vector(rhs_path.as_ref(), format)?;
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "matrix file has {} rows but rhs file has {} entries",
            a.nrows(),
            b.len()
        )));
    }
    LinearSystem::new(a, b)
}

pub fn read_matrix(path: &Path, format: FileFormat) -> Result<Matrix> {
    match format {
        FileFormat::Csv => read_csv_matrix(path),
        FileFormat::MatrixMarket => read_matrix_market(path),
    }
}

pub fn read_vector(path: &Path, format: FileFormat) -> Result<Vector> {
    let m = read_matrix(path, format)?;
    if m.ncols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "{}: expected a single column, found {}",
            path.display(),
            m.ncols()
        )));
    }
    Ok(Vector::from_column_slice(m.column(0).as_slice()))
}

pub fn read_csv_matrix(path: &Path) -> Result<Matrix> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                parse_err(path, lineno + 1, format!("cannot parse '{}' as a number", field.trim()))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    path,
                    lineno + 1,
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(path, 1, "no data rows"));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(Matrix::from_fn(nr, nc, |i, j| rows[i][j]))
}

pub fn write_csv_matrix(path: &Path, m: &Matrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:?}", m[(i, j)]));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn write_csv_vector(path: &Path, v: &Vector) -> Result<()> {
    let m = Matrix::from_fn(v.len(), 1, |i, _| v[i]);
    write_csv_matrix(path, &m)
}

struct MmHeader {
    coordinate: bool,
    symmetric: bool,
}

fn parse_mm_header(path: &Path, line: &str) -> Result<MmHeader> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() < 4 || fields[0] != "%%MatrixMarket" || fields[1] != "matrix" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix ...' header"));
    }
    let coordinate = match fields[2] {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(path, 1, format!("unsupported layout '{other}'"))),
    };
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(parse_err(path, 1, format!("unsupported field type '{}'", fields[3])));
    }
    let symmetric = match fields.get(4).copied().unwrap_or("general") {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry '{other}'"))),
    };
    Ok(MmHeader { coordinate, symmetric })
}

pub fn read_matrix_market(path: &Path) -> Result<Matrix> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let header = parse_mm_header(path, &first.map_err(|e| io_err(path, e))?)?;

    let mut data_lines = Vec::new();
    for (lineno, line) in lines {
        let line = line.map_err(|e| io_err(path, e))?;
        let t = line.trim().to_string();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        data_lines.push((lineno + 1, t));
    }
    let (size_lineno, size_line) = data_lines
        .first()
        .ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| parse_err(path, *size_lineno, format!("bad size field '{f}'")))
        })
        .collect::<Result<_>>()?;

    if header.coordinate {
        if dims.len() != 3 {
            return Err(parse_err(path, *size_lineno, "coordinate size line needs 'rows cols nnz'"));
        }
        let (nr, nc, nnz) = (dims[0], dims[1], dims[2]);
        let mut m = Matrix::zeros(nr, nc);
        let entries = &data_lines[1..];
        if entries.len() != nnz {
            return Err(parse_err(
                path,
                *size_lineno,
                format!("expected {nnz} entries, found {}", entries.len()),
            ));
        }
        for (lineno, entry) in entries {
            let f: Vec<&str> = entry.split_whitespace().collect();
            if f.len() != 3 {
                return Err(parse_err(path, *lineno, "expected 'i j value'"));
            }
            let i: usize = f[0]
                .parse()
                .map_err(|_| parse_err(path, *lineno, "bad row index"))?;
            let j: usize = f[1]
                .parse()
                .map_err(|_| parse_err(path, *lineno, "bad col index"))?;
            let v: f64 = f[2]
                .parse()
                .map_err(|_| parse_err(path, *lineno, "bad value"))?;
            if i == 0 || j == 0 || i > nr || j > nc {
                return Err(parse_err(path, *lineno, "index out of bounds (1-based)"));
            }
            m[(i - 1, j - 1)] = v;
            if header.symmetric && i != j {
                m[(j - 1, i - 1)] = v;
            }
        }
        Ok(m)
    } else {
        if dims.len() != 2 {
            return Err(parse_err(path, *size_lineno, "array size line needs 'rows cols'"));
        }
        let (nr, nc) = (dims[0], dims[1]);
        let mut values = Vec::with_capacity(nr * nc);
        for (lineno, entry) in &data_lines[1..] {
            for f in entry.split_whitespace() {
                let v: f64 = f
                    .parse()
                    .map_err(|_| parse_err(path, *lineno, format!("bad value '{f}'")))?;
                values.push(v);
            }
        }
        if values.len() != nr * nc {
            return Err(parse_err(
                path,
                *size_lineno,
                format!("expected {} values, found {}", nr * nc, values.len()),
            ));
        }
        // array format is column-major
        Ok(Matrix::from_fn(nr, nc, |i, j| values[j * nr + i]))
    }
}

pub fn write_matrix_market(path: &Path, m: &Matrix) -> Result<()> {
    let mut file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} {}\n", m.nrows(), m.ncols()));
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out.push_str(&format!("{:?}\n", m[(i, j)]));
        }
    }
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("rbas-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn csv_identity_system() {
        let ap = write_temp("id2.csv", "1,0\n0,1\n");
        let bp = write_temp("id2_b.csv", "1\n1\n");
        let sys = load_system(&ap, &bp, FileFormat::Csv).unwrap();
        assert_eq!(sys.rank(), 2);
        assert!(sys.is_consistent());
    }

    #[test]
    fn csv_contradictory_rows() {
        let ap = write_temp("c.csv", "1,0\n1,0\n");
        let bp = write_temp("c_b.csv", "0\n1\n");
        let sys = load_system(&ap, &bp, FileFormat::Csv).unwrap();
        assert!(!sys.is_consistent());
    }

    #[test]
    fn csv_parse_failure_reports_line() {
        let ap = write_temp("bad.csv", "1,0\n1,x\n");
        let err = read_csv_matrix(&ap).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains(":2:"), "unexpected message: {msg}");
    }

    #[test]
    fn csv_rhs_length_mismatch() {
        let ap = write_temp("m32.csv", "1,0\n0,1\n1,1\n");
        let bp = write_temp("m32_b.csv", "1\n1\n");
        assert!(load_system(&ap, &bp, FileFormat::Csv).is_err());
    }

    #[test]
    fn matrix_market_coordinate_rank() {
        // the 4x3 demo matrix, coordinate format
        let mm = "%%MatrixMarket matrix coordinate real general\n\
                  % comment line\n\
                  4 3 10\n\
                  1 1 2\n1 2 1\n2 1 -1\n2 2 2\n2 3 3\n\
                  3 1 1\n3 2 -3\n3 3 6\n4 2 1\n4 3 -5\n";
        let ap = write_temp("demo.mtx", mm);
        let bp = write_temp("demo_b.csv", "0\n0\n0\n0\n");
        let b = read_vector(&bp, FileFormat::Csv).unwrap();
        let a = read_matrix(&ap, FileFormat::MatrixMarket).unwrap();
        let sys = LinearSystem::new(a, b).unwrap();
        assert_eq!(sys.rank(), 3);
    }

    #[test]
    fn matrix_market_roundtrip() {
        let m = Matrix::from_row_slice(2, 3, &[1.5, -2.0, 0.0, 0.25, 4.0, -1.0]);
        let dir = std::env::temp_dir().join("rbas-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rt.mtx");
        write_matrix_market(&path, &m).unwrap();
        let back = read_matrix_market(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_roundtrip() {
        let m = Matrix::from_row_slice(3, 2, &[1.0, 2.5, -0.125, 3.0, 0.0, -9.75]);
        let dir = std::env::temp_dir().join("rbas-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rt.csv");
        write_csv_matrix(&path, &m).unwrap();
        let back = read_csv_matrix(&path).unwrap();
        assert_eq!(m, back);
    }
}
