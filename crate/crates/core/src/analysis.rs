//! Batch scans and machine-readable reports built on the exact engines:
//! `c_t` tables over step ranges, two-sided bounds for the pair inequality
//! `dens{s2(n+t) >= s2(n), s2(n+2t) <= s2(n+t)} > 1/4`, and moment /
//! Gaussian-shape diagnostics of the joint laws.
//!
//! Conjectural inequalities are reported with flags, never asserted: the
//! tables gather evidence, they do not presume unproved statements.

use crate::density1d::Density1d;
use crate::densitymd::{cusick_pair_density, MdEngine};
use crate::dyadic::DyadicRational;
use crate::par::map_range;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("scan range must satisfy 1 <= lo <= hi")]
    InvalidRange,
    #[error("moment reports support 1 <= m <= 3, got {0}")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Density(#[from] crate::density1d::DensityError),
    #[error(transparent)]
    Md(#[from] crate::densitymd::MdError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One scanned step: exact value bounds (equal for exact quantities) and a
/// below-threshold flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub t: u64,
    pub lo: DyadicRational,
    pub hi: DyadicRational,
    pub flagged: bool,
}

/// Exact `c_t` for every `t` in `[t_lo, t_hi]`; rows with `c_t <= 1/2` are
/// flagged (none are expected).
pub fn scan_cusick(t_lo: u64, t_hi: u64, jobs: usize) -> Result<Vec<ScanRow>, AnalysisError> {
    if t_lo < 1 || t_lo > t_hi {
        return Err(AnalysisError::InvalidRange);
    }
    let engine = Density1d::new();
    let half = DyadicRational::half();
    let rows = map_range(t_lo, t_hi, jobs, |t| {
        let c = engine.cusick(&BigUint::from(t)).expect("t >= 1");
        let flagged = c <= half;
        ScanRow { t, lo: c.clone(), hi: c, flagged }
    });
    Ok(rows)
}

/// Two-sided bounds on the pair density for every `t` in `[t_lo, t_hi]`;
/// rows whose lower bound is `<= 1/4` are flagged.
pub fn scan_problem1(
    t_lo: u64,
    t_hi: u64,
    precision: u32,
    jobs: usize,
) -> Result<Vec<ScanRow>, AnalysisError> {
    if t_lo < 1 || t_lo > t_hi {
        return Err(AnalysisError::InvalidRange);
    }
    let engine = MdEngine::new(precision)?;
    let quarter = DyadicRational::new(1, 2);
    let rows: Vec<Result<ScanRow, AnalysisError>> = map_range(t_lo, t_hi, jobs, |t| {
        let (lo, hi) = cusick_pair_density(&engine, &BigUint::from(t))?;
        let flagged = lo <= quarter;
        Ok(ScanRow { t, lo, hi, flagged })
    });
    rows.into_iter().collect()
}

/// Running minimum of the lower bounds: the scan's headline evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub flagged: usize,
    pub min_lo: DyadicRational,
    pub argmin_t: u64,
}

pub fn summarize(rows: &[ScanRow]) -> Option<ScanSummary> {
    let first = rows.first()?;
    let mut min_lo = first.lo.clone();
    let mut argmin_t = first.t;
    for row in rows {
        if row.lo < min_lo {
            min_lo = row.lo.clone();
            argmin_t = row.t;
        }
    }
    Some(ScanSummary {
        rows: rows.len(),
        flagged: rows.iter().filter(|r| r.flagged).count(),
        min_lo,
        argmin_t,
    })
}

/// Kept-support moments of a joint law with certified error bars, plus an
/// optional distance to a matched Gaussian.
///
/// Error bars bound the contribution of the lost mass: it lives in truncated
/// geometric rays, so mass `lambda` lying within distance `T` of the kept
/// support contributes at most `lambda * T` to a first moment and
/// `lambda * T_i * T_j` to a second moment.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub m: usize,
    pub t: u64,
    pub precision: u32,
    pub kept_mass: DyadicRational,
    pub lost_mass_bound: DyadicRational,
    pub mean: Vec<DyadicRational>,
    pub mean_error: Vec<DyadicRational>,
    pub covariance: Vec<Vec<DyadicRational>>,
    pub covariance_error: Vec<Vec<DyadicRational>>,
    pub tv_distance_to_gaussian: Option<f64>,
    pub metric: String,
    pub note: Option<String>,
}

/// Mean and covariance of the joint law at step `t` with all offsets zero.
pub fn gaussian_report(m: usize, t: u64, precision: u32) -> Result<MomentReport, AnalysisError> {
    if m == 0 || m > 3 {
        return Err(AnalysisError::UnsupportedDimension(m));
    }
    let engine = MdEngine::new(precision)?;
    let dist = engine.distribution(&BigUint::from(t), &vec![0u64; m])?;
    let lost = dist.lost_mass_bound().clone();

    // Reach of the lost mass: rays are cut `precision + 4` terms deep and
    // later shifted by at most one per halving level.
    let depth = 64 - t.leading_zeros() as i64;
    let slack = precision as i64 + 4 + depth + 2;
    let reach: Vec<i64> = (0..m)
        .map(|i| {
            let r = dist.entries().keys().map(|k| k[i].abs()).max().unwrap_or(0);
            r + slack
        })
        .collect();

    let zero = DyadicRational::zero;
    let mut mean = vec![zero(); m];
    let mut raw_second = vec![vec![zero(); m]; m];
    for (k, v) in dist.entries() {
        for i in 0..m {
            mean[i] = &mean[i] + &v.mul_int(k[i]);
            for j in i..m {
                raw_second[i][j] = &raw_second[i][j] + &v.mul_int(k[i] * k[j]);
            }
        }
    }
    let mean_error: Vec<DyadicRational> = (0..m).map(|i| lost.mul_int(reach[i])).collect();
    let mut covariance = vec![vec![zero(); m]; m];
    let mut covariance_error = vec![vec![zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let cov = &raw_second[i][j] - &(&mean[i] * &mean[j]);
            let second_err = lost.mul_int(reach[i] * reach[j]);
            let cross_err = &(&mean_error[i] * &mean[j].abs())
                + &(&(&mean_error[j] * &mean[i].abs()) + &(&mean_error[i] * &mean_error[j]));
            let err = &second_err + &cross_err;
            covariance[i][j] = cov.clone();
            covariance[j][i] = cov;
            covariance_error[i][j] = err.clone();
            covariance_error[j][i] = err;
        }
    }

    let kept_mass = dist.kept_mass();
    let mean_f: Vec<f64> = mean.iter().map(|v| v.to_f64()).collect();
    let cov_f: Vec<Vec<f64>> = covariance
        .iter()
        .map(|row| row.iter().map(|v| v.to_f64()).collect())
        .collect();
    let (tv, note) = match invert_symmetric(&cov_f) {
        Some((inv, _det)) => {
            // Lattice-evaluated Gaussian with matched moments, renormalized
            // to the kept mass, compared in total variation.
            let mut weights: Vec<f64> = Vec::with_capacity(dist.entries().len());
            for k in dist.entries().keys() {
                let d: Vec<f64> = (0..m).map(|i| k[i] as f64 - mean_f[i]).collect();
                let mut q = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        q += d[i] * inv[i][j] * d[j];
                    }
                }
                weights.push((-0.5 * q).exp());
            }
            let total: f64 = weights.iter().sum();
            let scale = kept_mass.to_f64() / total;
            let tv = 0.5
                * dist
                    .entries()
                    .values()
                    .zip(&weights)
                    .map(|(v, w)| (v.to_f64() - w * scale).abs())
                    .sum::<f64>();
            (Some(tv), None)
        }
        None => (
            None,
            Some("covariance is numerically degenerate; Gaussian comparison skipped".to_string()),
        ),
    };

    Ok(MomentReport {
        m,
        t,
        precision,
        kept_mass,
        lost_mass_bound: lost,
        mean,
        mean_error,
        covariance,
        covariance_error,
        tv_distance_to_gaussian: tv,
        metric: "0.5 * sum over kept lattice points of |density - matched-moment Gaussian, \
                 lattice-evaluated and renormalized to the kept mass|"
            .to_string(),
        note,
    })
}

/// Inverse and determinant of a symmetric positive matrix, dimensions 1..=3.
fn invert_symmetric(mat: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, f64)> {
    const EPS: f64 = 1e-12;
    match mat.len() {
        1 => {
            let det = mat[0][0];
            (det > EPS).then(|| (vec![vec![1.0 / det]], det))
        }
        2 => {
            let (a, b, d) = (mat[0][0], mat[0][1], mat[1][1]);
            let det = a * d - b * b;
            (det.abs() > EPS).then(|| {
                (vec![vec![d / det, -b / det], vec![-b / det, a / det]], det)
            })
        }
        3 => {
            let m = mat;
            let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            if det.abs() <= EPS {
                return None;
            }
            let c = |r: usize, s: usize| {
                let rows: Vec<usize> = (0..3).filter(|&x| x != r).collect();
                let cols: Vec<usize> = (0..3).filter(|&x| x != s).collect();
                let minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]]
                    - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
                if (r + s).is_multiple_of(2) {
                    minor
                } else {
                    -minor
                }
            };
            let mut inv = vec![vec![0.0; 3]; 3];
            for (r, row) in inv.iter_mut().enumerate() {
                for (s, cell) in row.iter_mut().enumerate() {
                    *cell = c(s, r) / det; // adjugate transpose
                }
            }
            Some((inv, det))
        }
        _ => None,
    }
}

/// Output encodings for the tabular exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

fn pow2_decimal(exp: u64) -> String {
    (BigInt::one() << exp).to_string()
}

#[derive(Serialize)]
struct CusickJsonRow<'a> {
    t: u64,
    c: &'a DyadicRational,
    below_half: bool,
}

/// `c_t` table; exact numerator/denominator columns plus a float rendering.
pub fn export_cusick(
    rows: &[ScanRow],
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), AnalysisError> {
    match format {
        TableFormat::Csv => {
            writeln!(out, "t,c_num,c_den,c_float,below_half")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    row.t,
                    row.lo.numerator(),
                    pow2_decimal(row.lo.exponent()),
                    row.lo.to_f64(),
                    row.flagged
                )?;
            }
        }
        TableFormat::Json => {
            let body: Vec<CusickJsonRow> = rows
                .iter()
                .map(|r| CusickJsonRow { t: r.t, c: &r.lo, below_half: r.flagged })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &body).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Problem1JsonRow<'a> {
    t: u64,
    lower: &'a DyadicRational,
    upper: &'a DyadicRational,
    below_quarter: bool,
}

/// Pair-density bounds table.
pub fn export_problem1(
    rows: &[ScanRow],
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), AnalysisError> {
    match format {
        TableFormat::Csv => {
            writeln!(out, "t,lo_num,lo_den,hi_num,hi_den,lo_float,hi_float,below_quarter")?;
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.t,
                    row.lo.numerator(),
                    pow2_decimal(row.lo.exponent()),
                    row.hi.numerator(),
                    pow2_decimal(row.hi.exponent()),
                    row.lo.to_f64(),
                    row.hi.to_f64(),
                    row.flagged
                )?;
            }
        }
        TableFormat::Json => {
            let body: Vec<Problem1JsonRow> = rows
                .iter()
                .map(|r| Problem1JsonRow {
                    t: r.t,
                    lower: &r.lo,
                    upper: &r.hi,
                    below_quarter: r.flagged,
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &body).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DensityJsonTable<'a> {
    t: String,
    k_lo: i64,
    k_hi: i64,
    tail_coeff: &'a DyadicRational,
    tail_rule: String,
    values: Vec<DensityJsonRow>,
}

#[derive(Serialize)]
struct DensityJsonRow {
    k: i64,
    value: DyadicRational,
}

/// One-dimensional law table down to `k_min`; the geometric tail rule is
/// included so deeper values stay recoverable.
pub fn export_density(
    t: &BigUint,
    dist: &crate::density1d::TailedDistribution,
    k_min: i64,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), AnalysisError> {
    let lo = k_min.min(dist.k_hi());
    match format {
        TableFormat::Csv => {
            writeln!(out, "k,num,den,float")?;
            for k in (lo..=dist.k_hi()).rev() {
                let v = dist.value_at(k);
                writeln!(out, "{},{},{},{}", k, v.numerator(), pow2_decimal(v.exponent()), v.to_f64())?;
            }
        }
        TableFormat::Json => {
            let table = DensityJsonTable {
                t: t.to_string(),
                k_lo: dist.k_lo(),
                k_hi: dist.k_hi(),
                tail_coeff: dist.tail_coeff(),
                tail_rule: format!(
                    "value(k) = tail_coeff * 2^(k - {}) for k < {}",
                    dist.k_lo(),
                    dist.k_lo()
                ),
                values: (lo..=dist.k_hi())
                    .rev()
                    .map(|k| DensityJsonRow { k, value: dist.value_at(k) })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &table).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MdJsonTable<'a> {
    m: usize,
    t: String,
    eps: &'a [u64],
    lost_mass_bound: &'a DyadicRational,
    entries: Vec<MdJsonRow<'a>>,
}

#[derive(Serialize)]
struct MdJsonRow<'a> {
    k: &'a [i64],
    value: &'a DyadicRational,
}

/// Joint law table, entries in lexicographic order of the difference vector.
pub fn export_md(
    dist: &crate::densitymd::MdDistribution,
    format: TableFormat,
    out: &mut dyn Write,
) -> Result<(), AnalysisError> {
    match format {
        TableFormat::Csv => {
            let heads: Vec<String> = (1..=dist.m).map(|i| format!("k{i}")).collect();
            writeln!(out, "{},num,den,float", heads.join(","))?;
            for (k, v) in dist.entries() {
                let key: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                writeln!(
                    out,
                    "{},{},{},{}",
                    key.join(","),
                    v.numerator(),
                    pow2_decimal(v.exponent()),
                    v.to_f64()
                )?;
            }
        }
        TableFormat::Json => {
            let table = MdJsonTable {
                m: dist.m,
                t: dist.t.to_string(),
                eps: &dist.eps,
                lost_mass_bound: dist.lost_mass_bound(),
                entries: dist
                    .entries()
                    .iter()
                    .map(|(k, v)| MdJsonRow { k, value: v })
                    .collect(),
            };
            serde_json::to_writer_pretty(&mut *out, &table).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Moment report as JSON.
pub fn export_gaussian(report: &MomentReport, out: &mut dyn Write) -> Result<(), AnalysisError> {
    serde_json::to_writer_pretty(&mut *out, report).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
