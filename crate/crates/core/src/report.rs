//! CSV output shared by the library and the command line.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Significant digits used for every float written to CSV.
pub const SIG_DIGITS: usize = 12;

/// Formats like C's `%.12g`.
pub fn fmt_g(x: f64) -> String {
    fmt_sig(x, SIG_DIGITS)
}

/// `%.{digits}g` formatting.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A type that serializes to one CSV row.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

/// Writes a header and rows as RFC 4180 CSV.
pub fn write_csv_to<W: Write, R: CsvRecord>(w: W, rows: &[R]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(R::header())?;
    for r in rows {
        wtr.write_record(r.record())?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv<R: CsvRecord>(rows: &[R], path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(std::fs::File::create(path)?, rows)
}

/// CSV text for `rows`.
pub fn csv_string<R: CsvRecord>(rows: &[R]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv_to(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}
