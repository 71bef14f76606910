//! CSV serialization for paths.
//!
//! The format is a two-column file with header `t,value`, rows sorted by
//! time. Finite values are written with 17 significant digits so a
//! write/read round-trip reproduces every `f64` bit-exactly; boundary paths
//! may use the literals `inf` and `-inf`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::path::GridPath;

/// Formats one value the way the CSV writer does: `inf`/`-inf` literals for
/// infinities, 17 significant digits otherwise.
pub fn format_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{:.16e}", v)
    }
}

fn parse_value(s: &str, line: usize) -> Result<f64> {
    let t = s.trim();
    let parsed = match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => t.parse::<f64>().ok(),
    };
    match parsed {
        Some(v) if !v.is_nan() => Ok(v),
        _ => Err(Error::Parse {
            line,
            msg: format!("cannot parse {t:?} as a value"),
        }),
    }
}

/// Writes a path as `t,value` CSV.
pub fn write_path(path: &GridPath, mut out: impl Write) -> Result<()> {
    writeln!(out, "t,value")?;
    for (&t, &v) in path.grid().points().iter().zip(path.values()) {
        writeln!(out, "{},{}", format_value(t), format_value(v))?;
    }
    Ok(())
}

/// Convenience wrapper writing straight to a file.
pub fn write_path_file(path: &GridPath, file: impl AsRef<std::path::Path>) -> Result<()> {
    let f = std::fs::File::create(file)?;
    write_path(path, std::io::BufWriter::new(f))
}

/// Reads a `t,value` CSV into a path. Errors carry the 1-based line number
/// of the offending row.
pub fn read_path(input: impl BufRead) -> Result<GridPath> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut lines = input.lines().enumerate();

    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let header = header?;
    if header.trim() != "t,value" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header \"t,value\", got {:?}", header.trim()),
        });
    }

    for (idx, line) in lines {
        let line_no = idx + 1;
        let row = line?;
        if row.trim().is_empty() {
            continue;
        }
        let mut cols = row.split(',');
        let (t, v) = match (cols.next(), cols.next(), cols.next()) {
            (Some(t), Some(v), None) => (t, v),
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 2 columns, got {:?}", row),
                })
            }
        };
        let t = parse_value(t, line_no)?;
        if !t.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                msg: "time must be finite".into(),
            });
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("rows must be sorted by strictly increasing t ({t} after {prev})"),
                });
            }
        } else if t != 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("first row must be at t=0, got t={t}"),
            });
        }
        times.push(t);
        values.push(parse_value(v, line_no)?);
    }

    let grid = TimeGrid::new(times).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    GridPath::new(grid, values)
}

/// Reads a path from a file.
pub fn read_path_file(file: impl AsRef<std::path::Path>) -> Result<GridPath> {
    let f = std::fs::File::open(file)?;
    read_path(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;
    use std::sync::Arc;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = TimeGrid::new(vec![0.0, 0.1, 0.2 + 1e-17, 7.0 / 3.0]).unwrap();
        let path = GridPath::new(
            Arc::clone(&grid),
            vec![1.0 / 3.0, -2.0e-308, f64::INFINITY, 6.02214076e23],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_path(&path, &mut buf).unwrap();
        let back = read_path(Cursor::new(&buf)).unwrap();
        assert_eq!(back.grid().points(), path.grid().points());
        for (a, b) in back.values().iter().zip(path.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_value = "t,value\n0,1\n1,zzz\n";
        match read_path(Cursor::new(bad_value)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let unsorted = "t,value\n0,1\n2,1\n1,1\n";
        match read_path(Cursor::new(unsorted)) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
        let nan = "t,value\n0,nan\n1,0\n";
        assert!(read_path(Cursor::new(nan)).is_err());
    }
}
