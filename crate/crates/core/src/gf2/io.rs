//! Sparse triplet text format: a `rows cols nnz` header followed by one
//! zero-indexed `i j` pair per line.

use std::io::{BufRead, Write};

use super::SparseBinMatrix;
use crate::error::{Error, Result};

pub fn write_triplets<W: Write>(m: &SparseBinMatrix, mut out: W) -> Result<()> {
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (i, j) in m.entries() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

pub fn to_triplet_string(m: &SparseBinMatrix) -> String {
    let mut buf = Vec::new();
    write_triplets(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("triplet output is ASCII")
}

pub fn read_triplets<R: BufRead>(input: R) -> Result<SparseBinMatrix> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let (line_no, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header line".into(),
            })
        }
    };
    let header = parse_numbers(&header, 3, line_no)?;
    let (rows, cols, nnz) = (header[0], header[1], header[2]);

    let mut entries = Vec::with_capacity(nnz);
    for (line_no, line) in lines {
        let line = line?;
        let ij = parse_numbers(&line, 2, line_no)?;
        let (i, j) = (ij[0], ij[1]);
        if i >= rows || j >= cols {
            return Err(Error::Parse {
                line: line_no,
                message: format!("entry ({i}, {j}) outside a {rows}x{cols} matrix"),
            });
        }
        entries.push((line_no, i, j));
    }
    if entries.len() != nnz {
        return Err(Error::Parse {
            line: line_no,
            message: format!("header declares {nnz} entries but {} were found", entries.len()),
        });
    }
    let mut seen = std::collections::HashSet::with_capacity(nnz);
    for &(line_no, i, j) in &entries {
        if !seen.insert((i, j)) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate entry ({i}, {j})"),
            });
        }
    }
    SparseBinMatrix::from_entries(rows, cols, entries.into_iter().map(|(_, i, j)| (i, j)))
}

pub fn from_triplet_str(s: &str) -> Result<SparseBinMatrix> {
    read_triplets(s.as_bytes())
}

fn parse_numbers(line: &str, expected: usize, line_no: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {expected} integers, found {}", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("invalid integer {f:?}: {e}"),
            })
        })
        .collect()
}
