//! `s2ap` — digit sums along arithmetic progressions from the command line.
//!
//! Exit codes: 0 success; 1 verification or consistency failure (invalid
//! stored witness, I/O or engine failure); 2 invalid arguments.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use s2ap::analysis::{
    self, export_cusick, export_density, export_gaussian, export_md, export_problem1, summarize,
    TableFormat,
};
use s2ap::density1d::Density1d;
use s2ap::densitymd::MdEngine;
use s2ap::oracle;
use s2ap::witness::{
    realize_tm_word, witness, DiffTuple, M1Strategy, Witness, WitnessRecord,
};
use s2ap::BigUint;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Witnesses grow steeply with the tuple length (each induction level can
/// multiply the block count); longer tuples than this need --allow-large-m.
const DEFAULT_MAX_M: usize = 16;

/// Argument-shaped failures map to exit code 2, like clap's own errors;
/// everything else (verification, I/O, engine failures) exits 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(name = "s2ap", version, about = "Binary digit sums along arithmetic progressions: \
witnesses, exact difference laws, and brute-force cross-checks")]
struct Cli {
    /// Worker threads for scans and counting (never affects output content).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the machine-readable output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output encoding for tabular commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Direct,
    Shifted,
    Intermediate,
}

impl From<Strategy> for M1Strategy {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Direct => M1Strategy::Direct,
            Strategy::Shifted => M1Strategy::Shifted,
            Strategy::Intermediate => M1Strategy::Intermediate,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a verified witness (n, t) for cumulative targets k_l.
    Witness {
        /// Comma-separated cumulative targets, e.g. "3,-1,2".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        k: Vec<i64>,
        /// Base construction used when exactly one target is given.
        #[arg(long, value_enum, default_value_t = Strategy::Direct)]
        strategy: Strategy,
        /// Permit tuples longer than the documented default cap of 16.
        #[arg(long)]
        allow_large_m: bool,
    },
    /// Realize a 0/1 word as Thue-Morse values along a progression.
    TmWord {
        /// The word w_0 w_1 ... w_m, e.g. "01101" (w_0 first, length >= 2).
        #[arg(long)]
        w: String,
    },
    /// Exact one-dimensional law of s2(n+t) - s2(n).
    Density {
        #[arg(long)]
        t: String,
        /// Lowest k tabulated; deeper values follow the printed tail rule.
        #[arg(long, default_value_t = -20, allow_hyphen_values = true)]
        k_min: i64,
    },
    /// Exact c_t = dens{n : s2(n+t) >= s2(n)} over a range of steps.
    Cusick {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
    },
    /// Truncated joint law of the m differences with a certified lost-mass bound.
    DensityMd {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 30)]
        precision: u32,
        /// Comma-separated offsets eps_1,...,eps_m (default all zero).
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<u64>>,
    },
    /// Two-sided bounds on dens{s2(n+t) >= s2(n), s2(n+2t) <= s2(n+t)}.
    Problem1 {
        #[arg(long, default_value_t = 1)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
    /// Moments of the joint law and distance to a matched Gaussian.
    Gaussian {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 30)]
        precision: u32,
    },
    /// Re-verify a stored witness file by exact digit-sum recomputation.
    Verify {
        #[arg(long)]
        file: PathBuf,
    },
    /// Brute-force counts of the density definitions.
    Brute {
        /// "1d" counts s2(n+t)-s2(n) = k; "md" counts the joint event.
        #[arg(long)]
        mode: BruteMode,
        #[arg(long)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        kvec: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<u64>>,
        #[arg(long, default_value_t = 1 << 22)]
        n: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BruteMode {
    #[value(name = "1d")]
    OneDim,
    #[value(name = "md")]
    MultiDim,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Writes `body` to --out or stdout.
fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
        }
        None => {
            std::io::stdout().write_all(body)?;
        }
    }
    Ok(())
}

fn table_format(format: Format) -> TableFormat {
    match format {
        Format::Csv => TableFormat::Csv,
        _ => TableFormat::Json,
    }
}

fn parse_nat(text: &str) -> Result<BigUint> {
    text.trim()
        .parse::<BigUint>()
        .map_err(|_| usage(format!("'{text}' is not a nonnegative decimal integer")))
}

/// The exact laws cost memory and time quadratic in the bit length of the
/// step, so the CLI draws a practical line; the library itself is unbounded.
fn parse_step(text: &str) -> Result<BigUint> {
    let t = parse_nat(text)?;
    const MAX_BITS: u64 = 4096;
    if t.bits() > MAX_BITS {
        return Err(usage(format!(
            "step t has {} bits; law computations are practical only up to {MAX_BITS} bits",
            t.bits()
        )));
    }
    Ok(t)
}

fn witness_json(wit: &Witness) -> Result<Vec<u8>> {
    let record = WitnessRecord::from(wit);
    let mut body = serde_json::to_vec_pretty(&record)?;
    body.push(b'\n');
    Ok(body)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Witness { k, strategy, allow_large_m } => {
            if k.len() > DEFAULT_MAX_M && !allow_large_m {
                return Err(usage(format!(
                    "tuple length {} exceeds the default cap {DEFAULT_MAX_M} \
                     (witness size grows steeply with m); pass --allow-large-m to override",
                    k.len()
                )));
            }
            let targets = DiffTuple::new(k)?;
            let wit = if targets.m() == 1 {
                let block = s2ap::witness::witness_m1(targets.targets()[0], strategy.into());
                let mut wit =
                    Witness { n: block.n, t: block.t, m: 1, targets, verified: false };
                wit.verified = oracle::verify_witness(&wit);
                if !wit.verified {
                    bail!("internal verification failed for the m=1 construction");
                }
                wit
            } else {
                witness(&targets)?
            };
            emit(&cli.out, &witness_json(&wit)?)?;
        }
        Cmd::TmWord { w } => {
            let bits: Vec<u8> = w
                .trim()
                .chars()
                .map(|c| match c {
                    '0' => Ok(0u8),
                    '1' => Ok(1u8),
                    other => Err(usage(format!("word must be over {{0,1}}, found '{other}'"))),
                })
                .collect::<Result<_>>()?;
            if bits.len() < 2 {
                return Err(usage("word must have length at least 2 (w_0 plus at least one sample)"));
            }
            let wit = realize_tm_word(&bits)?;
            emit(&cli.out, &witness_json(&wit)?)?;
        }
        Cmd::Density { t, k_min } => {
            let t = parse_step(&t)?;
            let dist = Density1d::new().distribution(&t)?;
            match cli.format {
                Format::Table => {
                    let mut body = String::new();
                    body.push_str(&format!("law of s2(n+{t}) - s2(n)\n"));
                    body.push_str(&format!("{:>6}  {:>18}  {}\n", "k", "exact", "float"));
                    for k in (k_min.min(dist.k_hi())..=dist.k_hi()).rev() {
                        let v = dist.value_at(k);
                        body.push_str(&format!("{k:>6}  {:>18}  {}\n", v.to_string(), v.to_f64()));
                    }
                    body.push_str(&format!(
                        "tail: value(k) = {} * 2^(k - {}) for k < {}\n",
                        dist.tail_coeff(),
                        dist.k_lo(),
                        dist.k_lo()
                    ));
                    emit(&cli.out, body.as_bytes())?;
                }
                fmt => {
                    let mut buf = Vec::new();
                    export_density(&t, &dist, k_min, table_format(fmt), &mut buf)?;
                    emit(&cli.out, &buf)?;
                }
            }
        }
        Cmd::Cusick { from, to } => {
            let rows = analysis::scan_cusick(from, to, cli.jobs)?;
            match cli.format {
                Format::Table => {
                    let mut body = String::new();
                    body.push_str(&format!("{:>8}  {:>14}  {:>10}  flag\n", "t", "c_t", "float"));
                    for row in &rows {
                        body.push_str(&format!(
                            "{:>8}  {:>14}  {:>10}  {}\n",
                            row.t,
                            row.lo.to_string(),
                            row.lo.to_f64(),
                            if row.flagged { "<=1/2" } else { "" }
                        ));
                    }
                    if let Some(s) = summarize(&rows) {
                        body.push_str(&format!(
                            "rows: {}; flagged (c_t <= 1/2): {}; min c_t = {} at t = {}\n",
                            s.rows, s.flagged, s.min_lo, s.argmin_t
                        ));
                    }
                    emit(&cli.out, body.as_bytes())?;
                }
                fmt => {
                    let mut buf = Vec::new();
                    export_cusick(&rows, table_format(fmt), &mut buf)?;
                    emit(&cli.out, &buf)?;
                }
            }
        }
        Cmd::DensityMd { m, t, precision, eps } => {
            let t = parse_step(&t)?;
            let eps = eps.unwrap_or_else(|| vec![0; m]);
            if eps.len() != m {
                return Err(usage(format!("--eps must list exactly m = {m} offsets")));
            }
            let dist = MdEngine::new(precision)?.distribution(&t, &eps)?;
            match cli.format {
                Format::Table => {
                    let mut body = String::new();
                    body.push_str(&format!("joint law, m={m}, t={t}, eps={eps:?}\n"));
                    for (k, v) in dist.entries().iter().rev() {
                        body.push_str(&format!("{k:?}  {}  {}\n", v, v.to_f64()));
                    }
                    body.push_str(&format!(
                        "kept mass: {} ; lost-mass bound: {}\n",
                        dist.kept_mass().to_f64(),
                        dist.lost_mass_bound().to_f64()
                    ));
                    emit(&cli.out, body.as_bytes())?;
                }
                fmt => {
                    let mut buf = Vec::new();
                    export_md(&dist, table_format(fmt), &mut buf)?;
                    emit(&cli.out, &buf)?;
                }
            }
        }
        Cmd::Problem1 { from, to, precision } => {
            let rows = analysis::scan_problem1(from, to, precision, cli.jobs)?;
            match cli.format {
                Format::Table => {
                    let mut body = String::new();
                    body.push_str(&format!(
                        "{:>8}  {:>12}  {:>12}  flag\n",
                        "t", "lower", "upper"
                    ));
                    for row in &rows {
                        body.push_str(&format!(
                            "{:>8}  {:>12}  {:>12}  {}\n",
                            row.t,
                            row.lo.to_f64(),
                            row.hi.to_f64(),
                            if row.flagged { "<=1/4" } else { "" }
                        ));
                    }
                    if let Some(s) = summarize(&rows) {
                        body.push_str(&format!(
                            "rows: {}; flagged (lower <= 1/4): {}; running infimum of lower bounds = {} at t = {}\n",
                            s.rows, s.flagged, s.min_lo.to_f64(), s.argmin_t
                        ));
                    }
                    emit(&cli.out, body.as_bytes())?;
                }
                fmt => {
                    let mut buf = Vec::new();
                    export_problem1(&rows, table_format(fmt), &mut buf)?;
                    emit(&cli.out, &buf)?;
                }
            }
        }
        Cmd::Gaussian { m, t, precision } => {
            let report = analysis::gaussian_report(m, t, precision)?;
            match cli.format {
                Format::Table => {
                    let mut body = String::new();
                    body.push_str(&format!("moments of the joint law, m={m}, t={t}\n"));
                    for i in 0..m {
                        body.push_str(&format!(
                            "mean[{}] = {} (+- {})\n",
                            i + 1,
                            report.mean[i].to_f64(),
                            report.mean_error[i].to_f64()
                        ));
                    }
                    for i in 0..m {
                        for j in 0..m {
                            body.push_str(&format!(
                                "cov[{}][{}] = {} (+- {})\n",
                                i + 1,
                                j + 1,
                                report.covariance[i][j].to_f64(),
                                report.covariance_error[i][j].to_f64()
                            ));
                        }
                    }
                    match report.tv_distance_to_gaussian {
                        Some(tv) => body.push_str(&format!(
                            "total-variation distance to matched Gaussian: {tv}\n(metric: {})\n",
                            report.metric
                        )),
                        None => body.push_str(&format!(
                            "Gaussian comparison skipped: {}\n",
                            report.note.as_deref().unwrap_or("degenerate covariance")
                        )),
                    }
                    emit(&cli.out, body.as_bytes())?;
                }
                _ => {
                    let mut buf = Vec::new();
                    export_gaussian(&report, &mut buf)?;
                    emit(&cli.out, &buf)?;
                }
            }
        }
        Cmd::Verify { file } => {
            let text = fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let record: WitnessRecord =
                serde_json::from_str(&text).context("witness file is not valid JSON")?;
            let wit = record.to_witness()?;
            let diffs_ok = oracle::verify_witness(&wit);
            let bits_ok = record.bits_n == wit.n.bits() && record.bits_t == wit.t.bits();
            if diffs_ok && bits_ok && record.verified {
                println!("ok: witness verifies (m={}, bits_n={})", wit.m, record.bits_n);
            } else {
                eprintln!(
                    "verification FAILED: diffs_ok={diffs_ok} bits_ok={bits_ok} flag={}",
                    record.verified
                );
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Brute { mode, t, k, kvec, eps, n } => {
            let t = parse_nat(&t)?;
            let result = match mode {
                BruteMode::OneDim => {
                    let k = k.ok_or_else(|| usage("--k is required in 1d mode"))?;
                    oracle::brute_count_1d(k, &t, n, cli.jobs)?
                }
                BruteMode::MultiDim => {
                    let kvec = kvec.ok_or_else(|| usage("--kvec is required in md mode"))?;
                    let eps = eps.unwrap_or_else(|| vec![0; kvec.len()]);
                    if eps.len() != kvec.len() {
                        return Err(usage("--eps must have the same length as --kvec"));
                    }
                    oracle::brute_count_md(&kvec, &eps, &t, n, cli.jobs)?
                }
            };
            let mut body = serde_json::to_vec_pretty(&result)?;
            body.push(b'\n');
            emit(&cli.out, &body)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
