//! Exact one-dimensional law of the digit-sum difference `s2(n+t) - s2(n)`.
//!
//! For each step `t >= 1` the asymptotic density `delta(k, t)` of
//! `{n : s2(n+t) - s2(n) = k}` satisfies
//!
//! ```text
//! delta(k, 1)    = 2^(k-2) for k <= 1, else 0
//! delta(k, 2t)   = delta(k, t)
//! delta(k, 2t+1) = 1/2 delta(k-1, t) + 1/2 delta(k+1, t+1)
//! ```
//!
//! The base case has an exact geometric tail `2^(k-2)` toward `k -> -inf`,
//! and every operation the recurrence applies (shift by one, halving mixture)
//! maps geometric tails of ratio 1/2 to geometric tails of ratio 1/2. Storing
//! the tail coefficient alongside the finite part therefore represents the
//! whole law exactly, with no truncation anywhere.

use crate::digits::s2;
use crate::dyadic::DyadicRational;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    /// The one-dimensional law requires `t >= 1`; the `t = 0` point mass is
    /// available separately via [`TailedDistribution::point_mass_zero`].
    #[error("the difference law requires t >= 1")]
    ZeroParameter,
}

/// Exact law of `k -> delta(k, t)`: a finite part on `[k_lo, k_hi]` plus a
/// geometric tail `value(k) = tail * 2^(k - k_lo)` for all `k < k_lo`.
///
/// The parameter is stored as the odd part of `t` (doubling the step leaves
/// the law unchanged), so laws for `t` and `2t` are structurally identical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailedDistribution {
    t_odd: BigUint,
    k_lo: i64,
    /// `values[i]` is the density at `k_lo + i`; the top entry sits at `s2(t)`.
    values: Vec<DyadicRational>,
    tail: DyadicRational,
}

impl TailedDistribution {
    /// Law for `t = 1`: mass `2^(k-2)` at every `k <= 1`.
    fn base_t1() -> Self {
        TailedDistribution {
            t_odd: BigUint::one(),
            k_lo: 1,
            values: vec![DyadicRational::half()],
            tail: DyadicRational::half(),
        }
    }

    /// Degenerate law for `t = 0`: unit mass at `k = 0`.
    pub fn point_mass_zero() -> Self {
        TailedDistribution {
            t_odd: BigUint::zero(),
            k_lo: 0,
            values: vec![DyadicRational::one()],
            tail: DyadicRational::zero(),
        }
    }

    /// Odd part of the step this law was computed for.
    pub fn parameter_odd_part(&self) -> &BigUint {
        &self.t_odd
    }

    pub fn k_lo(&self) -> i64 {
        self.k_lo
    }

    /// Upper end of the support; equals `s2(t)`.
    pub fn k_hi(&self) -> i64 {
        self.k_lo + self.values.len() as i64 - 1
    }

    /// Geometric tail coefficient: the density at `k < k_lo` is
    /// `tail_coeff * 2^(k - k_lo)`.
    pub fn tail_coeff(&self) -> &DyadicRational {
        &self.tail
    }

    /// Density at an arbitrary `k`, reading the tail formula below `k_lo`.
    pub fn value_at(&self, k: i64) -> DyadicRational {
        if k > self.k_hi() {
            DyadicRational::zero()
        } else if k >= self.k_lo {
            self.values[(k - self.k_lo) as usize].clone()
        } else {
            self.tail.div_pow2((self.k_lo - k) as u64)
        }
    }

    /// Finite entries as `(k, density)` pairs, lowest `k` first.
    pub fn finite_entries(&self) -> impl Iterator<Item = (i64, &DyadicRational)> {
        let k_lo = self.k_lo;
        self.values.iter().enumerate().map(move |(i, v)| (k_lo + i as i64, v))
    }

    /// Total mass, tail summed in closed form; exactly 1 for every law.
    pub fn total_mass(&self) -> DyadicRational {
        let finite: DyadicRational = self.values.iter().sum();
        &finite + &self.tail
    }

    /// Mean, tail summed in closed form
    /// (`sum_{k < k_lo} k * tail * 2^(k - k_lo) = tail * (k_lo - 2)`);
    /// exactly 0 for every law.
    pub fn mean(&self) -> DyadicRational {
        let finite = self
            .finite_entries()
            .fold(DyadicRational::zero(), |acc, (k, v)| &acc + &v.mul_int(k));
        &finite + &self.tail.mul_int(self.k_lo - 2)
    }

    /// Mixture `1/2 shift_{+1}(low) + 1/2 shift_{-1}(high)` — the odd step of
    /// the recurrence. Both tails are geometric with ratio 1/2, so the result
    /// keeps the exact tail form.
    fn odd_mixture(t_odd: BigUint, low: &TailedDistribution, high: &TailedDistribution) -> Self {
        let lo_shifted_klo = low.k_lo + 1;
        let hi_shifted_klo = high.k_lo - 1;
        let k_lo = lo_shifted_klo.min(hi_shifted_klo);
        let k_hi = (low.k_hi() + 1).max(high.k_hi() - 1);
        let values: Vec<DyadicRational> = (k_lo..=k_hi)
            .map(|k| (&low.value_at(k - 1) + &high.value_at(k + 1)).div_pow2(1))
            .collect();
        let tail_low = low.tail.div_pow2((lo_shifted_klo - k_lo) as u64);
        let tail_high = high.tail.div_pow2((hi_shifted_klo - k_lo) as u64);
        let tail = (&tail_low + &tail_high).div_pow2(1);
        let mixed = TailedDistribution { t_odd, k_lo, values, tail };
        debug_assert!(mixed.total_mass() == DyadicRational::one());
        debug_assert!(mixed.mean().is_zero());
        debug_assert!(mixed.values.iter().all(|v| v.is_positive()));
        mixed
    }
}

/// Memoizing engine for the one-dimensional laws.
///
/// The memo table is keyed by the odd part of `t`; concurrent lookups may
/// recompute a value already being built elsewhere, but every insert carries
/// the identical distribution, so results are deterministic.
pub struct Density1d {
    memo: Mutex<HashMap<BigUint, Arc<TailedDistribution>>>,
}

impl Default for Density1d {
    fn default() -> Self {
        Self::new()
    }
}

impl Density1d {
    pub fn new() -> Self {
        Density1d { memo: Mutex::new(HashMap::new()) }
    }

    /// Exact law for step `t >= 1`.
    pub fn distribution(&self, t: &BigUint) -> Result<Arc<TailedDistribution>, DensityError> {
        if t.is_zero() {
            return Err(DensityError::ZeroParameter);
        }
        let odd = t >> t.trailing_zeros().expect("nonzero");
        Ok(self.odd_distribution(odd))
    }

    fn odd_distribution(&self, u: BigUint) -> Arc<TailedDistribution> {
        if let Some(hit) = self.memo.lock().unwrap().get(&u) {
            return Arc::clone(hit);
        }
        let dist = if u.is_one() {
            Arc::new(TailedDistribution::base_t1())
        } else {
            // u = 2v + 1 with v >= 1.
            let v = &u >> 1u32;
            let low = self.distribution(&v).expect("v >= 1");
            let high = self.distribution(&(&v + 1u32)).expect("v + 1 >= 2");
            Arc::new(TailedDistribution::odd_mixture(u.clone(), &low, &high))
        };
        self.memo
            .lock()
            .unwrap()
            .entry(u)
            .or_insert_with(|| Arc::clone(&dist));
        dist
    }

    /// `c_t = dens{n : s2(n+t) >= s2(n)}`, the sum of the law over `k >= 0`.
    ///
    /// Finite because the law vanishes above `s2(t)`; the tail portion over
    /// `0 <= k < k_lo` is summed in closed form. `c_0 = 1`.
    pub fn cusick(&self, t: &BigUint) -> Result<DyadicRational, DensityError> {
        if t.is_zero() {
            return Ok(DyadicRational::one());
        }
        let dist = self.distribution(t)?;
        let finite = dist
            .finite_entries()
            .filter(|(k, _)| *k >= 0)
            .map(|(_, v)| v)
            .sum::<DyadicRational>();
        if dist.k_lo() > 0 {
            // Tail entries at 0 <= k < k_lo sum to tail * (1 - 2^(-k_lo)).
            let partial = &dist.tail - &dist.tail.div_pow2(dist.k_lo() as u64);
            Ok(&finite + &partial)
        } else {
            Ok(finite)
        }
    }

    /// True iff the law is strictly positive at every `k_floor <= k <= s2(t)`.
    pub fn positivity_check(&self, t: &BigUint, k_floor: i64) -> Result<bool, DensityError> {
        let dist = self.distribution(t)?;
        let finite_ok = dist
            .finite_entries()
            .filter(|(k, _)| *k >= k_floor)
            .all(|(_, v)| v.is_positive());
        let tail_ok = k_floor >= dist.k_lo() || dist.tail.is_positive();
        Ok(finite_ok && tail_ok)
    }
}

/// One-shot law for step `t`.
pub fn delta_1d(t: &BigUint) -> Result<TailedDistribution, DensityError> {
    Density1d::new().distribution(t).map(|d| (*d).clone())
}

/// One-shot `c_t`.
pub fn cusick_c(t: &BigUint) -> Result<DyadicRational, DensityError> {
    Density1d::new().cusick(t)
}

/// One-shot positivity check down to `k_floor`.
pub fn positivity_check(t: &BigUint, k_floor: i64) -> Result<bool, DensityError> {
    Density1d::new().positivity_check(t, k_floor)
}

/// The claimed support bound: `delta(k, t) = 0` for `k > s2(t)`.
pub fn support_upper_bound(t: &BigUint) -> i64 {
    s2(t) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn dy(num: i64, exp: u64) -> DyadicRational {
        DyadicRational::new(num, exp)
    }

    #[test]
    fn base_law_matches_formula() {
        let d = delta_1d(&big(1)).unwrap();
        assert_eq!(d.value_at(1), dy(1, 1));
        assert_eq!(d.value_at(0), dy(1, 2));
        assert_eq!(d.value_at(-1), dy(1, 3));
        assert_eq!(d.value_at(2), DyadicRational::zero());
        assert_eq!(d.k_hi(), 1);
    }

    #[test]
    fn doubling_shares_structure() {
        let engine = Density1d::new();
        let d1 = engine.distribution(&big(1)).unwrap();
        let d2 = engine.distribution(&big(2)).unwrap();
        assert_eq!(*d1, *d2);
    }

    #[test]
    fn law_for_three() {
        let d = delta_1d(&big(3)).unwrap();
        assert_eq!(d.value_at(2), dy(1, 2));
        assert_eq!(d.value_at(1), dy(1, 3));
        assert_eq!(d.value_at(0), dy(5, 4));
        assert_eq!(d.k_hi(), 2); // s2(3)
    }

    #[test]
    fn recurrence_consistent_with_point_mass_base() {
        // Applying the odd step to t = 1 via the t = 0 point mass must
        // reproduce the closed-form base law.
        let point = TailedDistribution::point_mass_zero();
        let base = TailedDistribution::base_t1();
        let rebuilt = TailedDistribution::odd_mixture(BigUint::one(), &point, &base);
        for k in -12..=2 {
            assert_eq!(rebuilt.value_at(k), base.value_at(k), "k={k}");
        }
    }

    #[test]
    fn cusick_values() {
        assert_eq!(cusick_c(&big(0)).unwrap(), DyadicRational::one());
        assert_eq!(cusick_c(&big(1)).unwrap(), dy(3, 2));
        assert_eq!(cusick_c(&big(2)).unwrap(), dy(3, 2));
        assert_eq!(cusick_c(&big(3)).unwrap(), dy(11, 4));
    }

    #[test]
    fn normalization_and_mean_exact_small() {
        let engine = Density1d::new();
        for t in 1u64..=128 {
            let d = engine.distribution(&big(t)).unwrap();
            assert_eq!(d.total_mass(), DyadicRational::one(), "t={t}");
            assert!(d.mean().is_zero(), "t={t}");
            assert_eq!(d.k_hi(), s2(&big(t)) as i64, "t={t}");
        }
    }

    #[test]
    fn positivity_examples() {
        assert!(positivity_check(&big(1), -10).unwrap());
        assert!(positivity_check(&big(6), -20).unwrap());
        assert!(positivity_check(&(BigUint::one() << 10u32), -30).unwrap());
    }

    #[test]
    fn memoization_is_transparent() {
        let cold = delta_1d(&big(45)).unwrap();
        let engine = Density1d::new();
        let _ = engine.distribution(&big(45)).unwrap();
        let warm = engine.distribution(&big(45)).unwrap();
        assert_eq!(cold, *warm);
    }

    #[test]
    fn rejects_zero_step() {
        assert_eq!(delta_1d(&big(0)), Err(DensityError::ZeroParameter));
    }
}
