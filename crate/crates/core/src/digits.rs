//! Elementary digit functions on unbounded nonnegative integers.
//!
//! Naturals are [`BigUint`] and may be thousands of bits wide. Digit counts
//! and their signed differences are returned as machine integers: a count of
//! ones can never exceed the bit length of a value that fits in memory, so
//! `u64`/`i64` are exact here.

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigitsError {
    /// The 2-adic valuation is only defined for positive integers.
    #[error("2-adic valuation is undefined for 0")]
    ZeroValuation,
}

/// Number of ones in the binary expansion of `n`.
pub fn s2(n: &BigUint) -> u64 {
    n.count_ones()
}

/// Exponent of the largest power of two dividing `n`; requires `n >= 1`.
pub fn nu2(n: &BigUint) -> Result<u64, DigitsError> {
    n.trailing_zeros().ok_or(DigitsError::ZeroValuation)
}

/// First difference of the digit sum, `s2(j + 1) - s2(j)`.
///
/// Equals `1 - nu2(j + 1)`: incrementing turns the trailing run of ones into
/// zeros and sets the next bit.
pub fn g(j: &BigUint) -> i64 {
    let next = j + 1u32;
    s2(&next) as i64 - s2(j) as i64
}

/// Thue-Morse bit of `n`: the digit sum modulo 2.
pub fn tm(n: &BigUint) -> u8 {
    (s2(n) & 1) as u8
}

/// Sum of `g` over the window `[a, a + len)`, telescoping to
/// `s2(a + len) - s2(a)`.
///
/// When `len = 2^L` the window covers every residue modulo `2^L` once and the
/// sum collapses to `g(floor(a / 2^L))`.
pub fn g_interval_sum(a: &BigUint, len: &BigUint) -> i64 {
    let end = a + len;
    s2(&end) as i64 - s2(a) as i64
}

/// `2^k` as an unbounded integer.
pub fn pow2(k: u64) -> BigUint {
    BigUint::one() << k
}

/// `2^k - 1`: a run of `k` one bits.
pub fn ones_run(k: u64) -> BigUint {
    pow2(k) - 1u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn s2_small_values() {
        assert_eq!(s2(&big(0)), 0);
        assert_eq!(s2(&pow2(0)), 1);
        assert_eq!(s2(&pow2(5)), 1);
        assert_eq!(s2(&pow2(100)), 1);
        assert_eq!(s2(&big(23)), 4); // 10111
    }

    #[test]
    fn nu2_small_values() {
        assert_eq!(nu2(&big(1)), Ok(0));
        assert_eq!(nu2(&big(8)), Ok(3));
        assert_eq!(nu2(&big(12)), Ok(2));
        assert_eq!(nu2(&big(0)), Err(DigitsError::ZeroValuation));
    }

    #[test]
    fn g_small_values() {
        assert_eq!(g(&big(0)), 1);
        assert_eq!(g(&big(1)), 0);
        assert_eq!(g(&big(2)), 1);
        assert_eq!(g(&big(3)), -1);
    }

    #[test]
    fn tm_small_values() {
        assert_eq!(tm(&big(0)), 0);
        assert_eq!(tm(&big(3)), 0);
        assert_eq!(tm(&big(5)), 0);
        assert_eq!(tm(&big(7)), 1);
    }

    #[test]
    fn interval_sums_collapse() {
        assert_eq!(g_interval_sum(&big(0), &big(8)), g(&big(0)));
        assert_eq!(g_interval_sum(&big(6), &big(4)), g(&big(1)));
        assert_eq!(g_interval_sum(&big(12), &big(4)), g(&big(3)));
    }

    #[test]
    fn g_matches_valuation_identity_exhaustive() {
        for n in 0u64..(1 << 16) {
            let nb = big(n);
            assert_eq!(g(&nb), 1 - nu2(&big(n + 1)).unwrap() as i64, "n={n}");
        }
    }

    #[test]
    fn interval_sum_collapses_over_grid() {
        // Exhaustive on a dense prefix, sampled across the rest of a < 2^20.
        for l in 0u64..=12 {
            let len = pow2(l);
            for a in 0u64..(1 << 16) {
                let expected = g(&big(a >> l));
                assert_eq!(g_interval_sum(&big(a), &len), expected, "a={a} L={l}");
            }
            for a in ((1u64 << 16)..(1 << 20)).step_by(997) {
                let expected = g(&big(a >> l));
                assert_eq!(g_interval_sum(&big(a), &len), expected, "a={a} L={l}");
            }
        }
    }

    #[test]
    fn tm_recurrences_exhaustive() {
        for n in 0u64..(1 << 16) {
            let t = tm(&big(n));
            assert_eq!(tm(&big(2 * n)), t);
            assert_eq!(tm(&big(2 * n + 1)), 1 - t);
        }
    }

    proptest! {
        #[test]
        fn g_matches_valuation_identity_wide(bytes in proptest::collection::vec(any::<u8>(), 1..32)) {
            let n = BigUint::from_bytes_le(&bytes);
            let next = &n + 1u32;
            prop_assert_eq!(g(&n), 1 - nu2(&next).unwrap() as i64);
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn g_matches_valuation_identity_256bit(bytes in proptest::collection::vec(any::<u8>(), 32)) {
            let n = BigUint::from_bytes_le(&bytes);
            let next = &n + 1u32;
            prop_assert_eq!(g(&n), 1 - nu2(&next).unwrap() as i64);
        }

        #[test]
        fn digit_sum_subadditive(a_bytes in proptest::collection::vec(any::<u8>(), 1..48),
                                 b_bytes in proptest::collection::vec(any::<u8>(), 1..48)) {
            let a = BigUint::from_bytes_le(&a_bytes);
            let b = BigUint::from_bytes_le(&b_bytes);
            let sum = &a + &b;
            prop_assert!(s2(&sum) <= s2(&a) + s2(&b));
        }
    }
}
