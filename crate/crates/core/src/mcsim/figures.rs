use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::report::fmt_g;
use crate::rng::StreamRng;

use super::lemmas::WeightLaw;

/// Which figure to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    /// Scalar positive sum against its matching Gaussian.
    Sum1d,
    /// Minimum coordinate of a 2×2 diagonal positive sum with independent entries.
    Sum2x2,
}

impl std::str::FromStr for FigureKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum1d" => Ok(FigureKind::Sum1d),
            "sum2x2" => Ok(FigureKind::Sum2x2),
            other => invalid(format!("unknown figure kind {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureParams {
    pub law: WeightLaw,
    /// Number of summands.
    pub n: usize,
    /// Evaluation points; empty selects 101 points spanning ±5 standard deviations.
    pub grid: Vec<f64>,
}

impl FigureParams {
    pub fn new(law: WeightLaw, n: usize) -> Self {
        FigureParams { law, n, grid: Vec::new() }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = grid;
        self
    }

    /// Mean and standard deviation of the matching Gaussian.
    pub fn gaussian(&self) -> (f64, f64) {
        let (m1, m2) = self.law.moments();
        (self.n as f64 * m1, (self.n as f64 * m2).sqrt())
    }

    fn resolved_grid(&self) -> Vec<f64> {
        if !self.grid.is_empty() {
            return self.grid.clone();
        }
        let (mu, sd) = self.gaussian();
        let half = (5.0 * sd).max(1.0);
        let lo = (mu - half).max(0.0);
        let hi = mu + half;
        (0..=100).map(|i| lo + (hi - lo) * i as f64 / 100.0).collect()
    }
}

/// Tabulated figure data; `rows[i][0]` is the grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureData {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureData {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.columns)?;
        for r in &self.rows {
            wtr.write_record(r.iter().map(|x| fmt_g(*x)))?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

fn normal_cdf(mu: f64, sd: f64, x: f64) -> f64 {
    if sd == 0.0 {
        return f64::from(u8::from(x >= mu));
    }
    Normal::new(mu, sd).expect("positive sd").cdf(x)
}

/// `min(1, dim·e^{−(level − x)²/(2 var)})` below `level`, and 1 above it.
fn tail_curve(level: f64, var: f64, dim: f64, x: f64) -> f64 {
    if x >= level {
        return 1.0;
    }
    if var == 0.0 {
        return 0.0;
    }
    let t = level - x;
    (dim * (-t * t / (2.0 * var)).exp()).min(1.0)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Tabulates empirical and Gaussian CDFs with the lower-tail bound curve.
///
/// `Sum1d` columns: `x, ecdf, gaussian_cdf, tail_bound`. `Sum2x2` columns:
/// `x, ecdf_min, ecdf_y1, ecdf_y2, gaussian_cdf_min, tail_bound`, where the
/// Gaussian model has independent `N(n E W, n E W²)` diagonal entries and the
/// tail curve is centered at its expected minimum.
pub fn figure_data(kind: FigureKind, params: &FigureParams, trials: usize, seed: u64) -> Result<FigureData> {
    params.law.validate()?;
    if params.n == 0 || trials == 0 {
        return invalid("n and trials must be positive");
    }
    let law = &params.law;
    let n = params.n;
    let (mu, sd) = params.gaussian();
    let grid = params.resolved_grid();
    let draws: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = StreamRng::new(seed, i as u64);
            let y1: f64 = (0..n).map(|_| law.sample(&mut rng)).sum();
            let y2 = match kind {
                FigureKind::Sum1d => 0.0,
                FigureKind::Sum2x2 => (0..n).map(|_| law.sample(&mut rng)).sum(),
            };
            (y1, y2)
        })
        .collect();
    match kind {
        FigureKind::Sum1d => {
            let y = sorted(draws.iter().map(|d| d.0).collect());
            let rows = grid
                .iter()
                .map(|&x| vec![x, ecdf(&y, x), normal_cdf(mu, sd, x), tail_curve(mu, sd * sd, 1.0, x)])
                .collect();
            Ok(FigureData { columns: vec!["x", "ecdf", "gaussian_cdf", "tail_bound"], rows })
        }
        FigureKind::Sum2x2 => {
            let y1 = sorted(draws.iter().map(|d| d.0).collect());
            let y2 = sorted(draws.iter().map(|d| d.1).collect());
            let ymin = sorted(draws.iter().map(|d| d.0.min(d.1)).collect());
            let level = mu - sd / PI.sqrt();
            let rows = grid
                .iter()
                .map(|&x| {
                    let g = normal_cdf(mu, sd, x);
                    vec![
                        x,
                        ecdf(&ymin, x),
                        ecdf(&y1, x),
                        ecdf(&y2, x),
                        1.0 - (1.0 - g) * (1.0 - g),
                        tail_curve(level, sd * sd, 2.0, x),
                    ]
                })
                .collect();
            Ok(FigureData {
                columns: vec!["x", "ecdf_min", "ecdf_y1", "ecdf_y2", "gaussian_cdf_min", "tail_bound"],
                rows,
            })
        }
    }
}

/// Writes [`figure_data`] as CSV.
pub fn emit_figure_data<W: Write>(
    kind: FigureKind,
    params: &FigureParams,
    trials: usize,
    seed: u64,
    out: W,
) -> Result<()> {
    figure_data(kind, params, trials, seed)?.write_csv(out)
}
