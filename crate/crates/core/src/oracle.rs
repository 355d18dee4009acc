//! Brute-force ground truth: finite counts of the density definitions,
//! exact witness re-verification, and detection of the power-of-two period
//! of the sets `{n : s2(n+t) >= s2(n)}`.
//!
//! Everything here is deliberately independent of the recurrence engines; it
//! only ever evaluates digit sums directly.

use crate::digits::s2;
use crate::dyadic::DyadicRational;
use crate::par::map_range;
use crate::witness::Witness;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("counting range must be nonempty")]
    EmptyRange,
    #[error("no power-of-two period up to 2^{k_max} for t={t}")]
    PeriodNotFound { t: u64, k_max: u32 },
}

const SHARD: u64 = 1 << 16;

/// Exact count over a finite range, with the fraction in lowest terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub count: u64,
    pub n: u64,
    pub num: u64,
    pub den: u64,
    pub float: f64,
}

impl CountResult {
    fn new(count: u64, n: u64) -> Self {
        let g = gcd(count, n);
        CountResult { count, n, num: count / g, den: n / g, float: count as f64 / n as f64 }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn shard_sum(n_limit: u64, jobs: usize, count_shard: impl Fn(u64, u64) -> u64 + Sync) -> u64 {
    let shards = n_limit.div_ceil(SHARD);
    map_range(0, shards - 1, jobs, |i| {
        let lo = i * SHARD;
        let hi = n_limit.min(lo + SHARD);
        count_shard(lo, hi)
    })
    .into_iter()
    .sum()
}

/// `|{n < N : s2(n+t) - s2(n) = k}|`.
pub fn brute_count_1d(k: i64, t: &BigUint, n_limit: u64, jobs: usize) -> Result<CountResult, OracleError> {
    if n_limit == 0 {
        return Err(OracleError::EmptyRange);
    }
    let count = match t.to_u64().filter(|t64| t64.checked_add(n_limit).is_some()) {
        Some(t64) => shard_sum(n_limit, jobs, |lo, hi| {
            (lo..hi)
                .filter(|&n| (n + t64).count_ones() as i64 - n.count_ones() as i64 == k)
                .count() as u64
        }),
        None => {
            let mut count = 0u64;
            let mut shifted = t.clone();
            for n in 0..n_limit {
                if s2(&shifted) as i64 - (n.count_ones() as i64) == k {
                    count += 1;
                }
                shifted += 1u32;
            }
            count
        }
    };
    Ok(CountResult::new(count, n_limit))
}

/// Full histogram of `s2(n+t) - s2(n)` over `n < N`; sums to `N`.
pub fn brute_histogram_1d(t: u64, n_limit: u64, jobs: usize) -> BTreeMap<i64, u64> {
    let shards = n_limit.div_ceil(SHARD);
    let maps = map_range(0, shards.saturating_sub(1), jobs, |i| {
        let lo = i * SHARD;
        let hi = n_limit.min(lo + SHARD);
        let mut local: BTreeMap<i64, u64> = BTreeMap::new();
        for n in lo..hi {
            let d = (n + t).count_ones() as i64 - n.count_ones() as i64;
            *local.entry(d).or_insert(0) += 1;
        }
        local
    });
    let mut out: BTreeMap<i64, u64> = BTreeMap::new();
    for local in maps {
        for (k, c) in local {
            *out.entry(k).or_insert(0) += c;
        }
    }
    out
}

/// `|{n < N : s2(n + l*t + eps_l) - s2(n) = k_l for all l}|`.
pub fn brute_count_md(
    kvec: &[i64],
    eps: &[u64],
    t: &BigUint,
    n_limit: u64,
    jobs: usize,
) -> Result<CountResult, OracleError> {
    assert_eq!(kvec.len(), eps.len(), "kvec and eps must have equal length");
    if n_limit == 0 {
        return Err(OracleError::EmptyRange);
    }
    let m = kvec.len() as u64;
    let fast = t
        .to_u64()
        .and_then(|t64| t64.checked_mul(m))
        .and_then(|mt| mt.checked_add(n_limit))
        .and_then(|top| top.checked_add(eps.iter().copied().max().unwrap_or(0)));
    let count = match fast {
        Some(_) => {
            let t64 = t.to_u64().expect("checked above");
            shard_sum(n_limit, jobs, |lo, hi| {
                (lo..hi)
                    .filter(|&n| {
                        let base = n.count_ones() as i64;
                        kvec.iter().enumerate().all(|(idx, &k)| {
                            let shifted = n + (idx as u64 + 1) * t64 + eps[idx];
                            shifted.count_ones() as i64 - base == k
                        })
                    })
                    .count() as u64
            })
        }
        None => (0..n_limit)
            .filter(|&n| {
                let nb = BigUint::from(n);
                let base = n.count_ones() as i64;
                kvec.iter().enumerate().all(|(idx, &k)| {
                    let shifted = &nb + t * (idx as u64 + 1) + eps[idx];
                    s2(&shifted) as i64 - base == k
                })
            })
            .count() as u64,
    };
    Ok(CountResult::new(count, n_limit))
}

/// Joint histogram of the difference vectors over `n < N`; sums to `N`.
pub fn brute_histogram_md(
    t: u64,
    eps: &[u64],
    n_limit: u64,
    jobs: usize,
) -> BTreeMap<Vec<i64>, u64> {
    let shards = n_limit.div_ceil(SHARD);
    let maps = map_range(0, shards.saturating_sub(1), jobs, |i| {
        let lo = i * SHARD;
        let hi = n_limit.min(lo + SHARD);
        let mut local: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
        for n in lo..hi {
            let base = n.count_ones() as i64;
            let key: Vec<i64> = eps
                .iter()
                .enumerate()
                .map(|(idx, &e)| (n + (idx as u64 + 1) * t + e).count_ones() as i64 - base)
                .collect();
            *local.entry(key).or_insert(0) += 1;
        }
        local
    });
    let mut out: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for local in maps {
        for (k, c) in local {
            *out.entry(k).or_insert(0) += c;
        }
    }
    out
}

/// Recomputes every difference of a stored witness with exact arithmetic.
pub fn verify_witness(w: &Witness) -> bool {
    let base = s2(&w.n) as i64;
    w.targets
        .targets()
        .iter()
        .enumerate()
        .all(|(idx, &k)| s2(&(&w.n + &w.t * (idx as u64 + 1))) as i64 - base == k)
}

/// Evidence that `{n : s2(n+t) >= s2(n)}` is periodic with period `2^k`:
/// the indicator agreed on 16 consecutive blocks, and `exact_value` is the
/// density over one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodCertificate {
    pub t: u64,
    pub k: u32,
    pub exact_value: DyadicRational,
    pub window_checked: u64,
}

/// Smallest `K <= k_max` such that the indicator of `s2(n+t) >= s2(n)` is
/// identical on consecutive blocks of size `2^K` throughout the checked
/// window.
///
/// At least 16 blocks are compared, and the window always reaches `32 t`:
/// the indicator is constantly true below the first carry chain long enough
/// to destroy `s2(t)` ones, and such a chain first appears only around
/// `2^(bits(t)+3) - t < 16 t`, so windows independent of `t` would certify
/// spurious tiny periods for larger steps.
pub fn detect_period(t: u64, k_max: u32) -> Result<PeriodCertificate, OracleError> {
    let ind = |n: u64| (n + t).count_ones() >= n.count_ones();
    for k in 0..=k_max {
        let period = 1u64 << k;
        let blocks = 16u64.max(t.saturating_mul(32).div_ceil(period));
        let window = blocks.saturating_mul(period);
        if (period..window).all(|n| ind(n) == ind(n % period)) {
            let count = (0..period).filter(|&n| ind(n)).count() as u64;
            return Ok(PeriodCertificate {
                t,
                k,
                exact_value: DyadicRational::new(count as i64, k as u64),
                window_checked: window,
            });
        }
    }
    Err(OracleError::PeriodNotFound { t, k_max })
}
