//! Matrix CSV files.
//!
//! The first record is a header such as `dim=3,field=real` (self-adjoint) or
//! `rows=5,cols=2,field=complex` (rectangular). Each following record is one
//! row of entries. Complex entries are written as `a+bi` literals.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;

use super::{Entries, Field, RectMatrix, SymMatrix};
use crate::error::{Error, Result};
use crate::Scalar;

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_real<T: Scalar>(s: &str, line: usize) -> Result<T> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(T::lit(x)),
        _ => parse_err(line, format!("bad number `{s}`")),
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, with optional exponents.
pub(crate) fn parse_complex<T: Scalar>(s: &str, line: usize) -> Result<Complex<T>> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(parse_real(s, line)?, T::zero()));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex::new(parse_real(re, line)?, parse_real(im, line)?))
}

fn format_complex<T: Scalar>(z: Complex<T>) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

struct Parsed<T: Scalar> {
    header: HashMap<String, String>,
    field: Field,
    rows: Vec<Vec<Complex<T>>>,
}

fn parse<T: Scalar, R: Read>(reader: R) -> Result<Parsed<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = rdr.records();
    let head = match records.next() {
        Some(r) => r?,
        None => return parse_err(1, "empty matrix file"),
    };
    let mut header = HashMap::new();
    for item in head.iter() {
        let Some((k, v)) = item.split_once('=') else {
            return parse_err(1, format!("header item `{item}` is not key=value"));
        };
        header.insert(k.trim().to_string(), v.trim().to_string());
    }
    let field = match header.get("field") {
        Some(f) => f.parse::<Field>().or_else(|e| parse_err(1, e.to_string()))?,
        None => return parse_err(1, "header lacks `field=`"),
    };
    let mut rows = Vec::new();
    for (k, rec) in records.enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(k + 2, |p| p.line() as usize);
        let row = rec
            .iter()
            .map(|s| match field {
                Field::Real => parse_real(s, line).map(|x| Complex::new(x, T::zero())),
                Field::Complex => parse_complex(s, line),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(Parsed { header, field, rows })
}

fn header_usize(h: &HashMap<String, String>, key: &str) -> Result<usize> {
    match h.get(key).map(|v| v.parse::<usize>()) {
        Some(Ok(n)) if n >= 1 => Ok(n),
        _ => parse_err(1, format!("header needs a positive `{key}=`")),
    }
}

fn collect<T: Scalar>(p: &Parsed<T>, rows: usize, cols: usize) -> Result<Entries<T>> {
    if p.rows.len() != rows {
        return parse_err(p.rows.len() + 1, format!("expected {rows} rows, found {}", p.rows.len()));
    }
    for (i, r) in p.rows.iter().enumerate() {
        if r.len() != cols {
            return parse_err(i + 2, format!("expected {cols} entries, found {}", r.len()));
        }
    }
    let flat: Vec<Complex<T>> = p.rows.iter().flatten().copied().collect();
    Ok(match p.field {
        Field::Real => Entries::Real(flat.into_iter().map(|z| z.re).collect()),
        Field::Complex => Entries::Complex(flat),
    })
}

/// Reads a self-adjoint matrix file.
pub fn read_sym_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<SymMatrix<T>> {
    let p = parse::<T, _>(std::fs::File::open(path)?)?;
    let d = header_usize(&p.header, "dim")?;
    SymMatrix::from_entries(d, collect(&p, d, d)?)
}

/// Reads a rectangular matrix file. A `dim=` header is accepted for square input.
pub fn read_rect_csv<T: Scalar>(path: impl AsRef<Path>) -> Result<RectMatrix<T>> {
    let p = parse::<T, _>(std::fs::File::open(path)?)?;
    let (r, c) = if p.header.contains_key("dim") {
        let d = header_usize(&p.header, "dim")?;
        (d, d)
    } else {
        (header_usize(&p.header, "rows")?, header_usize(&p.header, "cols")?)
    };
    let e = collect(&p, r, c)?;
    match e {
        Entries::Real(v) => RectMatrix::from_real(r, c, v),
        Entries::Complex(v) => RectMatrix::from_complex(r, c, v),
    }
}

fn write_rows<T: Scalar, W: Write>(
    w: W,
    header: Vec<String>,
    field: Field,
    rows: usize,
    cols: usize,
    get: impl Fn(usize, usize) -> Complex<T>,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().flexible(true).from_writer(w);
    wtr.write_record(&header)?;
    for i in 0..rows {
        let rec: Vec<String> = (0..cols)
            .map(|j| match field {
                Field::Real => get(i, j).re.to_string(),
                Field::Complex => format_complex(get(i, j)),
            })
            .collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_sym_csv<T: Scalar>(m: &SymMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let header = vec![format!("dim={}", m.dim()), format!("field={}", m.field())];
    write_rows(std::fs::File::create(path)?, header, m.field(), m.dim(), m.dim(), |i, j| m.get(i, j))
}

pub fn write_rect_csv<T: Scalar>(m: &RectMatrix<T>, path: impl AsRef<Path>) -> Result<()> {
    let header = vec![format!("rows={}", m.rows()), format!("cols={}", m.cols()), format!("field={}", m.field())];
    write_rows(std::fs::File::create(path)?, header, m.field(), m.rows(), m.cols(), |i, j| m.get(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = |s| parse_complex::<f64>(s, 1).unwrap();
        assert_eq!(c("1.5-2i"), Complex::new(1.5, -2.0));
        assert_eq!(c("3"), Complex::new(3.0, 0.0));
        assert_eq!(c("-i"), Complex::new(0.0, -1.0));
        assert_eq!(c("2.5i"), Complex::new(0.0, 2.5));
        assert_eq!(c("1e-3+2E-4i"), Complex::new(1e-3, 2e-4));
        assert_eq!(c("-1e+2-1e-2i"), Complex::new(-100.0, -0.01));
        assert!(parse_complex::<f64>("1+xi", 1).is_err());
    }

    #[test]
    fn sym_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let m = SymMatrix::<f64>::from_complex(
            2,
            vec![
                Complex::new(1.0, 0.0),
                Complex::new(0.25, -1.0 / 3.0),
                Complex::new(0.25, 1.0 / 3.0),
                Complex::new(-2.0, 0.0),
            ],
        )
        .unwrap();
        write_sym_csv(&m, &path).unwrap();
        assert_eq!(read_sym_csv::<f64>(&path).unwrap(), m);
    }

    #[test]
    fn rect_round_trip_and_shape_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        let q = RectMatrix::<f64>::random_orthonormal(5, 2, Field::Real, 4).unwrap();
        write_rect_csv(&q, &path).unwrap();
        assert_eq!(read_rect_csv::<f64>(&path).unwrap(), q);

        std::fs::write(&path, "dim=2,field=real\n1,2\n2\n").unwrap();
        assert!(matches!(read_sym_csv::<f64>(&path), Err(Error::Parse { .. })));
        std::fs::write(&path, "dim=2,field=real\n1,2\n3,1\n").unwrap();
        assert!(matches!(read_sym_csv::<f64>(&path), Err(Error::Validation(_))));
    }
}
