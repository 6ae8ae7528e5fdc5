//! Key/value model descriptor files.
//!
//! ```text
//! # comparison model for a small weighted sum
//! dim = 3
//! field = real
//! shift = identity 2          # or: zero | diag 1,2,3 | file shift.csv
//! component = goe 0.5
//! component = scalar 1
//! component = rank1 0.25 : 1, 0, 0    # weight : vector
//! component = rank1 0.25 : 0, 1, 0
//! component = series file h1.csv
//! component = compressed file q.csv
//! theorem = weighted          # or: iid
//! elmin = mc 2000 7           # or: analytic 1.5
//! ```
//!
//! `rank1` lines are collected into one rank-one series and `series` lines into
//! one general series. File paths are relative to the descriptor.

use std::path::{Path, PathBuf};

use num_complex::Complex;

use super::{Component, GaussianModel};
use crate::compare::{ElminSource, Theorem};
use crate::error::{Error, Result};
use crate::matcore::{read_rect_csv, read_sym_csv, Field, RectMatrix, SymMatrix};
use crate::Scalar;

/// A parsed descriptor.
#[derive(Clone, Debug)]
pub struct ModelDescriptor<T: Scalar> {
    pub model: GaussianModel<T>,
    pub theorem: Theorem,
    pub elmin: Option<ElminSource<T>>,
}

fn err<V>(line: usize, msg: impl Into<String>) -> Result<V> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn num<T: Scalar>(s: &str, line: usize) -> Result<T> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(T::lit(x)),
        _ => err(line, format!("bad number `{}`", s.trim())),
    }
}

fn list<T: Scalar>(s: &str, line: usize) -> Result<Vec<Complex<T>>> {
    s.split(',').map(|x| crate::matcore::io_parse_complex(x, line)).collect()
}

/// Parses descriptor text; `base` resolves relative file names.
pub fn parse_descriptor<T: Scalar>(text: &str, base: &Path) -> Result<ModelDescriptor<T>> {
    let mut dim = None;
    let mut field = Field::Real;
    let mut shift_spec: Option<(usize, String)> = None;
    let mut comps: Vec<(usize, String)> = Vec::new();
    let mut theorem = Theorem::Weighted;
    let mut elmin = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return err(line, "expected `key = value`");
        };
        let value = value.trim();
        match key.trim() {
            "dim" => match value.parse::<usize>() {
                Ok(d) if d >= 1 => dim = Some(d),
                _ => return err(line, "dim must be a positive integer"),
            },
            "field" => field = value.parse().or_else(|e: Error| err(line, e.to_string()))?,
            "shift" => shift_spec = Some((line, value.to_string())),
            "component" => comps.push((line, value.to_string())),
            "theorem" => {
                theorem = match value {
                    "weighted" => Theorem::Weighted,
                    "iid" => Theorem::Iid,
                    _ => return err(line, "theorem must be `weighted` or `iid`"),
                }
            }
            "elmin" => {
                let parts: Vec<&str> = value.split_whitespace().collect();
                elmin = Some(match parts.as_slice() {
                    ["analytic", v] => ElminSource::Analytic(num(v, line)?),
                    ["mc", trials, seed] => ElminSource::MonteCarlo {
                        trials: trials.parse().or_else(|_| err(line, "bad trial count"))?,
                        seed: seed.parse().or_else(|_| err(line, "bad seed"))?,
                    },
                    _ => return err(line, "elmin must be `analytic <value>` or `mc <trials> <seed>`"),
                });
            }
            other => return err(line, format!("unknown key `{other}`")),
        }
    }
    let Some(d) = dim else { return err(1, "descriptor lacks `dim`") };
    let resolve = |p: &str| -> PathBuf { base.join(p.trim()) };

    let shift = match shift_spec {
        None => SymMatrix::zeros(d, field),
        Some((line, s)) => {
            let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s.as_str(), ""));
            match kind {
                "zero" => SymMatrix::zeros(d, field),
                "identity" => {
                    SymMatrix::scalar(d, field, if rest.trim().is_empty() { T::one() } else { num(rest, line)? })
                }
                "diag" => {
                    let v: Vec<T> = rest.split(',').map(|x| num(x, line)).collect::<Result<_>>()?;
                    if v.len() != d {
                        return err(line, format!("diag shift needs {d} entries"));
                    }
                    SymMatrix::from_diag(field, &v)
                }
                "file" => read_sym_csv::<T>(resolve(rest.trim_start_matches("file").trim()))?.to_field(field)?,
                _ => return err(line, format!("unknown shift kind `{kind}`")),
            }
        }
    };

    let mut model = GaussianModel::new(shift);
    let mut rank1: Vec<(T, Vec<Complex<T>>)> = Vec::new();
    let mut series: Vec<SymMatrix<T>> = Vec::new();
    for (line, spec) in comps {
        let (kind, rest) = spec.split_once(char::is_whitespace).unwrap_or((spec.as_str(), ""));
        let rest = rest.trim();
        let at = |e: Error| match e {
            Error::Parse { .. } => e,
            other => Error::Parse { line, msg: other.to_string() },
        };
        let coeff = || num::<T>(rest, line);
        let c = match kind {
            "scalar" => Component::Scalar { coeff: coeff()? },
            "diagonal" => Component::Diagonal { coeff: coeff()? },
            "goe" => Component::Goe { coeff: coeff()? },
            "gue" => Component::Gue { coeff: coeff()? },
            "rank1" => {
                let Some((w, v)) = rest.split_once(':') else {
                    return err(line, "rank1 needs `weight : v1, v2, ...`");
                };
                let v = list::<T>(v, line)?;
                if v.len() != d {
                    return err(line, format!("rank1 vector needs {d} entries"));
                }
                rank1.push((num(w, line)?, v));
                continue;
            }
            "series" => {
                let p = rest.strip_prefix("file").map(str::trim).unwrap_or(rest);
                series.push(read_sym_csv::<T>(resolve(p)).map_err(at)?);
                continue;
            }
            "compressed" => {
                let p = rest.strip_prefix("file").map(str::trim).unwrap_or(rest);
                Component::CompressedDiagonal { q: read_rect_csv::<T>(resolve(p)).map_err(at)? }
            }
            _ => return err(line, format!("unknown component `{kind}`")),
        };
        model = model.with(c).map_err(at)?;
    }
    if !rank1.is_empty() {
        let weights = rank1.iter().map(|r| r.0).collect();
        let cols: Vec<Vec<Complex<T>>> = rank1.into_iter().map(|r| r.1).collect();
        let vectors = RectMatrix::from_complex_columns(&cols)?;
        let vectors = if field == Field::Real { vectors.to_field(Field::Real)? } else { vectors };
        model = model.with(Component::RankOneSeries { weights, vectors })?;
    }
    if !series.is_empty() {
        model = model.with(Component::GeneralSeries { matrices: series })?;
    }
    Ok(ModelDescriptor { model, theorem, elmin })
}

/// Reads a descriptor file.
pub fn read_descriptor<T: Scalar>(path: impl AsRef<Path>) -> Result<ModelDescriptor<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_descriptor(&text, path.parent().unwrap_or(Path::new(".")))
}
