//! Constructs explicit pairs `(n, t)` whose digit-sum differences along the
//! arithmetic progression `n, n+t, ..., n+mt` hit any prescribed integer
//! tuple, i.e. `s2(n + l*t) - s2(n) = k_l` for `1 <= l <= m`.
//!
//! The construction works blockwise: small base pairs realize the `m = 1` and
//! `m = 2` cases directly from explicit binary layouts, and carry-free
//! concatenation of blocks adds their consecutive differences. For `m >= 3`
//! the last difference is corrected in steps of `+-1` by gadget families of
//! `(n_j, 1)` blocks whose summed contribution vanishes at every position
//! except the last.

use crate::digits::{ones_run, pow2, s2, tm};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Targets larger than this are rejected up front: realizing `|k| = 2^40`
/// already requires numbers of at least 2^40 bits.
const MAX_ABS_TARGET: i64 = 1 << 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("difference tuple must be nonempty")]
    EmptyTuple,
    #[error("target magnitude {0} exceeds the representable range")]
    TargetTooLarge(i64),
    #[error("block concatenation needs at least one block")]
    EmptyBlocks,
    #[error("gadgets require m >= 2, got {0}")]
    GadgetWidth(u64),
    #[error("internal verification failed at position {position}: expected {expected}, got {actual}")]
    Verification { position: usize, expected: i64, actual: i64 },
    #[error("stored witness is malformed: {0}")]
    MalformedRecord(String),
}

/// One building block `(n, t)`; `t = 0` is permitted for intermediate blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub n: BigUint,
    pub t: BigUint,
}

impl Block {
    pub fn new(n: impl Into<BigUint>, t: impl Into<BigUint>) -> Self {
        Block { n: n.into(), t: t.into() }
    }

    /// Consecutive difference at position `l`:
    /// `s2(n + l*t) - s2(n + (l-1)*t)`.
    pub fn consecutive_difference(&self, l: u64) -> i64 {
        let hi = &self.n + &self.t * l;
        let lo = &self.n + &self.t * (l - 1);
        s2(&hi) as i64 - s2(&lo) as i64
    }
}

/// Cumulative targets `k_l = s2(n + l*t) - s2(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffTuple {
    k: Vec<i64>,
}

impl DiffTuple {
    pub fn new(k: Vec<i64>) -> Result<Self, WitnessError> {
        if k.is_empty() {
            return Err(WitnessError::EmptyTuple);
        }
        if let Some(&bad) = k.iter().find(|v| v.unsigned_abs() > MAX_ABS_TARGET as u64) {
            return Err(WitnessError::TargetTooLarge(bad));
        }
        Ok(DiffTuple { k })
    }

    pub fn m(&self) -> usize {
        self.k.len()
    }

    pub fn targets(&self) -> &[i64] {
        &self.k
    }
}

/// Consecutive differences `d_l = k_l - k_{l-1}` with `k_0 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsecDiffs {
    d: Vec<i64>,
}

impl ConsecDiffs {
    pub fn new(d: Vec<i64>) -> Result<Self, WitnessError> {
        if d.is_empty() {
            return Err(WitnessError::EmptyTuple);
        }
        Ok(ConsecDiffs { d })
    }

    pub fn m(&self) -> usize {
        self.d.len()
    }

    pub fn diffs(&self) -> &[i64] {
        &self.d
    }
}

pub fn cumulative_to_consecutive(k: &DiffTuple) -> ConsecDiffs {
    let mut prev = 0i64;
    let d = k
        .k
        .iter()
        .map(|&cur| {
            let step = cur - prev;
            prev = cur;
            step
        })
        .collect();
    ConsecDiffs { d }
}

pub fn consecutive_to_cumulative(d: &ConsecDiffs) -> DiffTuple {
    let mut acc = 0i64;
    let k = d
        .d
        .iter()
        .map(|&step| {
            acc += step;
            acc
        })
        .collect();
    DiffTuple { k }
}

/// Stack two blocks without carry interaction: with `2^N > n_lo + m * t_lo`,
/// the pair `(2^N n_hi + n_lo, 2^N t_hi + t_lo)` has, at every position
/// `l <= m`, the sum of the two blocks' consecutive differences.
fn combine(low: &Block, high: &Block, m: u64) -> Block {
    let room = &low.n + &low.t * m;
    let shift = room.bits();
    Block {
        n: (&high.n << shift) + &low.n,
        t: (&high.t << shift) + &low.t,
    }
}

/// Left fold of the carry-free stacking over the sequence: the result's
/// consecutive differences at every position `l <= m` are the blockwise sums.
pub fn concat_blocks(blocks: &[Block], m: u64) -> Result<Block, WitnessError> {
    let (first, rest) = blocks.split_first().ok_or(WitnessError::EmptyBlocks)?;
    Ok(rest.iter().fold(first.clone(), |acc, b| combine(&acc, b, m)))
}

/// Balanced variant of [`concat_blocks`] with the same contract on the
/// consecutive differences; used internally where the flat fold would cost
/// quadratic time in the total bit length.
fn concat_balanced(mut blocks: Vec<Block>, m: u64) -> Result<Block, WitnessError> {
    if blocks.is_empty() {
        return Err(WitnessError::EmptyBlocks);
    }
    while blocks.len() > 1 {
        blocks = blocks
            .chunks(2)
            .map(|pair| match pair {
                [a, b] => combine(a, b, m),
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    Ok(blocks.pop().expect("nonempty"))
}

/// `count` stacked copies of one block, by binary doubling.
fn repeat_block(block: &Block, count: u64, m: u64) -> Block {
    debug_assert!(count >= 1);
    let mut result: Option<Block> = None;
    let mut power = block.clone();
    let mut left = count;
    loop {
        if left & 1 == 1 {
            result = Some(match result {
                None => power.clone(),
                Some(acc) => combine(&acc, &power, m),
            });
        }
        left >>= 1;
        if left == 0 {
            break;
        }
        power = combine(&power.clone(), &power, m);
    }
    result.expect("count >= 1")
}

/// Strategy for the single-difference base case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M1Strategy {
    /// `k > 0`: `(2^(k+1), 2^k - 1)`; `k < 0`: `(2^(|k|+1) - 1, 1)`;
    /// `k = 0`: `(2, 2)` so the step stays positive.
    Direct,
    /// Shifted-run layout `(2^(c-1) (2^a - 1), 2^c - 1)` with `c - a = k`.
    Shifted,
    /// Pick `n` and `n'` inside consecutive binades with prescribed digit
    /// sums and take `t = n' - n`.
    Intermediate,
}

/// Shifted-run block for parameters `a, c >= 1`: digit sums are
/// `s2(n) = a`, `s2(n + t) = c`, so the difference realized is `c - a`.
pub fn m1_shifted(a: u64, c: u64) -> Block {
    debug_assert!(a >= 1 && c >= 1);
    Block {
        n: ones_run(a) << (c - 1),
        t: ones_run(c),
    }
}

/// Block with `s2(n + t) - s2(n) = k` and `t >= 1`.
pub fn witness_m1(k: i64, strategy: M1Strategy) -> Block {
    match strategy {
        M1Strategy::Direct => {
            if k > 0 {
                Block { n: pow2(k as u64 + 1), t: ones_run(k as u64) }
            } else if k < 0 {
                Block { n: ones_run(k.unsigned_abs() + 1), t: BigUint::one() }
            } else {
                Block::new(2u32, 2u32)
            }
        }
        M1Strategy::Shifted => {
            let a = 1.max(1 - k) as u64;
            let c = (a as i64 + k) as u64;
            m1_shifted(a, c)
        }
        M1Strategy::Intermediate => {
            let abs = k.unsigned_abs();
            let ell = 2 * abs;
            let n = pow2(ell) + ones_run(abs);
            let n_next = pow2(ell + 1) + ones_run((abs as i64 + k) as u64);
            let t = &n_next - &n;
            Block { n, t }
        }
    }
}

/// Which two-difference digit layout applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum M2Config {
    /// Covers `k2 <= k1`; digit sums along the progression are
    /// `(a+b, b+c+d, c+d)`.
    A,
    /// Covers `k1 < k2`; digit sums are `(a, d, c+d)`.
    B,
}

/// Parameters of the two-difference layouts. `offset` is the inner bit gap:
/// `e` for config A, `f = d - 1 + a` for config B.
///
/// The admissible ranges are tighter than the naive ones: config A needs
/// `a >= 2, c >= 2, d >= 1, e >= d + b + 1` and config B needs
/// `a >= 2, d >= 2` with `f = d - 1 + a`, otherwise carries collide and the
/// claimed digit sums fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct M2Params {
    pub config: M2Config,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub offset: u64,
}

impl M2Params {
    /// Parameters realizing the cumulative pair `(k1, k2)`; ties go to A.
    pub fn for_targets(k1: i64, k2: i64) -> Self {
        if k2 <= k1 {
            let b = (k1 - k2) as u64;
            let a = 2.max(3 - k1) as u64;
            let d = 1u64;
            let c = (k1 + a as i64 - 1) as u64;
            let e = d + b + 1;
            M2Params { config: M2Config::A, a, b, c, d, offset: e }
        } else {
            let a = 2.max(2 - k1) as u64;
            let d = (k1 + a as i64) as u64;
            let c = (k2 - k1) as u64;
            let f = d - 1 + a;
            M2Params { config: M2Config::B, a, b: 0, c, d, offset: f }
        }
    }

    /// Bounds under which the layouts provably avoid carry collisions.
    pub fn in_tightened_range(&self) -> bool {
        match self.config {
            M2Config::A => {
                self.a >= 2 && self.c >= 2 && self.d >= 1 && self.offset > self.d + self.b
            }
            M2Config::B => self.a >= 2 && self.d >= 2 && self.offset == self.d - 1 + self.a,
        }
    }

    /// The `(n, t)` block with the layout's digit pattern.
    pub fn block(&self) -> Block {
        match self.config {
            M2Config::A => {
                let e = self.offset;
                let n = (ones_run(self.a) << (e + self.c - 1)) + (ones_run(self.b) << self.d);
                let t = (ones_run(self.c) << e) + ones_run(self.d);
                Block { n, t }
            }
            M2Config::B => {
                let f = self.offset;
                let n = ones_run(self.a) << (self.d - 1);
                let t = (ones_run(self.c) << f) + ones_run(self.d);
                Block { n, t }
            }
        }
    }

    /// Claimed digit sums `(s2(n), s2(n+t), s2(n+2t))`.
    pub fn claimed_digit_sums(&self) -> (u64, u64, u64) {
        match self.config {
            M2Config::A => (self.a + self.b, self.b + self.c + self.d, self.c + self.d),
            M2Config::B => (self.a, self.d, self.c + self.d),
        }
    }
}

/// Block with `s2(n+t) - s2(n) = k1` and `s2(n+2t) - s2(n) = k2`, `t >= 1`.
pub fn witness_m2(k1: i64, k2: i64) -> Block {
    let params = M2Params::for_targets(k1, k2);
    debug_assert!(params.in_tightened_range());
    let block = params.block();
    debug_assert_eq!(block.consecutive_difference(1), k1);
    debug_assert_eq!(
        block.consecutive_difference(1) + block.consecutive_difference(2),
        k2
    );
    block
}

fn gadget_width(m: u64) -> Result<u64, WitnessError> {
    if m < 2 {
        return Err(WitnessError::GadgetWidth(m));
    }
    // Least L with 2^L >= m; this makes floor((l - m) / 2^L) = -1 for every
    // 1 <= l < m, which is exactly what the window identities need.
    Ok(64 - (m - 1).leading_zeros() as u64)
}

/// Blocks `(n_j, 1)` whose summed consecutive differences are
/// `(0, ..., 0, +1)` across positions `1..=m`.
pub fn gadget_plus(m: u64) -> Result<Vec<Block>, WitnessError> {
    let l = gadget_width(m)?;
    let start = pow2(l + 1) - m + 1u32;
    Ok((0..pow2_u64(l))
        .map(|j| Block { n: &start + j, t: BigUint::one() })
        .collect())
}

/// Blocks `(n_j, 1)` whose summed consecutive differences are
/// `(0, ..., 0, -1)` across positions `1..=m`.
///
/// The first window alone sums to `(+1, ..., +1, 0)`; the second, twice as
/// wide, contributes a constant `-1` everywhere.
pub fn gadget_minus(m: u64) -> Result<Vec<Block>, WitnessError> {
    let l = gadget_width(m)?;
    let first_start = pow2(l) - m + 1u32;
    let second_start = pow2(l + 1) * 3u32 + 1u32;
    let mut blocks: Vec<Block> = (0..pow2_u64(l))
        .map(|j| Block { n: &first_start + j, t: BigUint::one() })
        .collect();
    blocks.extend((0..2 * pow2_u64(l)).map(|j| Block { n: &second_start + j, t: BigUint::one() }));
    Ok(blocks)
}

fn pow2_u64(l: u64) -> u64 {
    1u64 << l
}

/// A verified realization of a difference tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub n: BigUint,
    pub t: BigUint,
    pub m: usize,
    pub targets: DiffTuple,
    pub verified: bool,
}

/// Build the block list realizing consecutive differences `d`, valid for
/// concatenation up to multiplier `m_final`.
fn build_blocks(d: &[i64], m_final: u64) -> Result<Vec<Block>, WitnessError> {
    let m = d.len();
    match m {
        0 => Err(WitnessError::EmptyTuple),
        1 => Ok(vec![witness_m1(d[0], M1Strategy::Direct)]),
        2 => Ok(vec![witness_m2(d[0], d[0] + d[1])]),
        _ => {
            let mut blocks = build_blocks(&d[..m - 1], m_final)?;
            let level = m as u64;
            let residual: i64 = blocks
                .iter()
                .map(|b| b.consecutive_difference(level))
                .sum();
            let delta = d[m - 1] - residual;
            if delta != 0 {
                let gadget = if delta > 0 { gadget_plus(level)? } else { gadget_minus(level)? };
                let one_copy = concat_balanced(gadget, m_final)?;
                blocks.push(repeat_block(&one_copy, delta.unsigned_abs(), m_final));
            }
            Ok(blocks)
        }
    }
}

fn check_targets(n: &BigUint, t: &BigUint, targets: &[i64]) -> Result<(), WitnessError> {
    let base = s2(n) as i64;
    for (idx, &expected) in targets.iter().enumerate() {
        let l = idx as u64 + 1;
        let actual = s2(&(n + t * l)) as i64 - base;
        if actual != expected {
            return Err(WitnessError::Verification { position: idx + 1, expected, actual });
        }
    }
    Ok(())
}

/// Explicit `(n, t)` with `s2(n + l*t) - s2(n) = k_l` for `1 <= l <= m`,
/// self-verified by exact digit-sum recomputation before returning.
pub fn witness(targets: &DiffTuple) -> Result<Witness, WitnessError> {
    let d = cumulative_to_consecutive(targets);
    let m = targets.m() as u64;
    let blocks = build_blocks(d.diffs(), m)?;
    let Block { n, t } = concat_balanced(blocks, m)?;
    check_targets(&n, &t, targets.targets())?;
    debug_assert!(!t.is_zero());
    Ok(Witness { n, t, m: targets.m(), targets: targets.clone(), verified: true })
}

/// Explicit `(n, t)` whose Thue-Morse samples along the progression spell the
/// word: `tm(n + l*t) = w[l]` for `0 <= l <= m`.
///
/// Realizes cumulative targets `w[l] XOR w[0]`, which pins every parity
/// relative to `tm(n)`; if `tm(n)` lands on the wrong side, stacking the
/// block `(1, 0)` below (i.e. `n -> 2n + 1`, `t -> 2t`) flips it while
/// leaving all differences unchanged.
pub fn realize_tm_word(word: &[u8]) -> Result<Witness, WitnessError> {
    if word.len() < 2 {
        return Err(WitnessError::EmptyTuple);
    }
    debug_assert!(word.iter().all(|&b| b <= 1));
    let targets = DiffTuple::new(
        word[1..]
            .iter()
            .map(|&bit| i64::from(bit ^ word[0]))
            .collect(),
    )?;
    let mut wit = witness(&targets)?;
    if tm(&wit.n) != word[0] {
        let flipped = combine(&Block::new(1u32, 0u32), &Block { n: wit.n, t: wit.t }, wit.m as u64);
        wit.n = flipped.n;
        wit.t = flipped.t;
        check_targets(&wit.n, &wit.t, wit.targets.targets())?;
    }
    for (l, &bit) in word.iter().enumerate() {
        let value = tm(&(&wit.n + &wit.t * (l as u64)));
        if value != bit {
            return Err(WitnessError::Verification {
                position: l,
                expected: i64::from(bit),
                actual: i64::from(value),
            });
        }
    }
    Ok(wit)
}

/// Serialized form: unbounded integers as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub m: usize,
    pub k: Vec<i64>,
    pub n: String,
    pub t: String,
    pub bits_n: u64,
    pub bits_t: u64,
    pub verified: bool,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord {
            m: w.m,
            k: w.targets.targets().to_vec(),
            n: w.n.to_string(),
            t: w.t.to_string(),
            bits_n: w.n.bits(),
            bits_t: w.t.bits(),
            verified: w.verified,
        }
    }
}

impl WitnessRecord {
    pub fn to_witness(&self) -> Result<Witness, WitnessError> {
        let n: BigUint = self
            .n
            .parse()
            .map_err(|_| WitnessError::MalformedRecord("n is not a decimal integer".into()))?;
        let t: BigUint = self
            .t
            .parse()
            .map_err(|_| WitnessError::MalformedRecord("t is not a decimal integer".into()))?;
        let targets = DiffTuple::new(self.k.clone())?;
        if self.m != targets.m() {
            return Err(WitnessError::MalformedRecord("m does not match target count".into()));
        }
        Ok(Witness { n, t, m: self.m, targets, verified: self.verified })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diffs_of(block: &Block, m: u64) -> Vec<i64> {
        (1..=m).map(|l| block.consecutive_difference(l)).collect()
    }

    #[test]
    fn tuple_conversions() {
        let k = DiffTuple::new(vec![3]).unwrap();
        assert_eq!(cumulative_to_consecutive(&k).diffs(), &[3]);
        let k = DiffTuple::new(vec![1, 1]).unwrap();
        assert_eq!(cumulative_to_consecutive(&k).diffs(), &[1, 0]);
        let k = DiffTuple::new(vec![2, -1, 0]).unwrap();
        assert_eq!(cumulative_to_consecutive(&k).diffs(), &[2, -3, 1]);
    }

    #[test]
    fn concat_single_block_is_identity() {
        let b = Block::new(7u32, 5u32);
        assert_eq!(concat_blocks(std::slice::from_ref(&b), 3).unwrap(), b);
    }

    #[test]
    fn concat_two_blocks_example() {
        let combined =
            concat_blocks(&[Block::new(1u32, 1u32), Block::new(2u32, 1u32)], 1).unwrap();
        assert_eq!(combined, Block::new(9u32, 5u32));
        assert_eq!(combined.consecutive_difference(1), 1);
    }

    #[test]
    fn stacking_one_zero_block_flips_parity_only() {
        let base = Block::new(50u32, 25u32);
        let m = 2u64;
        let combined = concat_blocks(&[Block::new(1u32, 0u32), base.clone()], m).unwrap();
        assert_eq!(diffs_of(&combined, m), diffs_of(&base, m));
        assert_eq!(s2(&combined.n), s2(&base.n) + 1);
    }

    #[test]
    fn m1_direct_examples() {
        let b = witness_m1(3, M1Strategy::Direct);
        assert_eq!(b, Block::new(16u32, 7u32));
        let b = witness_m1(-2, M1Strategy::Direct);
        assert_eq!(b, Block::new(7u32, 1u32));
        let b = witness_m1(0, M1Strategy::Direct);
        assert_eq!(b, Block::new(2u32, 2u32));
    }

    #[test]
    fn m1_shifted_example() {
        let b = m1_shifted(2, 3);
        assert_eq!(b, Block::new(12u32, 7u32));
        assert_eq!(b.consecutive_difference(1), 1);
    }

    #[test]
    fn m1_all_strategies_hit_target() {
        for k in -12..=12i64 {
            for strat in [M1Strategy::Direct, M1Strategy::Shifted, M1Strategy::Intermediate] {
                let b = witness_m1(k, strat);
                assert!(!b.t.is_zero(), "k={k} {strat:?}");
                assert_eq!(b.consecutive_difference(1), k, "k={k} {strat:?}");
            }
        }
    }

    #[test]
    fn m2_examples() {
        let b = witness_m2(1, 0);
        assert_eq!(b, Block::new(50u32, 25u32));
        let sums = (s2(&b.n), s2(&(&b.n + &b.t)), s2(&(&b.n + &b.t * 2u32)));
        assert_eq!(sums, (3, 4, 3));

        // (0, 0) routes to config A with a = 3.
        let b = witness_m2(0, 0);
        assert_eq!(b, Block::new(56u32, 13u32));
        let sums = (s2(&b.n), s2(&(&b.n + &b.t)), s2(&(&b.n + &b.t * 2u32)));
        assert_eq!(sums, (3, 3, 3));

        let b = witness_m2(0, 1);
        assert_eq!(b, Block::new(6u32, 11u32));
        let sums = (s2(&b.n), s2(&(&b.n + &b.t)), s2(&(&b.n + &b.t * 2u32)));
        assert_eq!(sums, (2, 2, 3));

        let b = witness_m2(-2, 0);
        let sums = (s2(&b.n), s2(&(&b.n + &b.t)), s2(&(&b.n + &b.t * 2u32)));
        assert_eq!(sums, (4, 2, 4));
    }

    #[test]
    fn m2_layout_grids_match_claimed_digit_sums() {
        for a in 2..=5 {
            for b in 0..=3 {
                for c in 2..=5 {
                    for d in 1..=3 {
                        for e in (d + b + 1)..=(d + b + 3) {
                            let p = M2Params { config: M2Config::A, a, b, c, d, offset: e };
                            assert!(p.in_tightened_range());
                            let block = p.block();
                            let (s0, s1, s2v) = p.claimed_digit_sums();
                            assert_eq!(s2(&block.n), s0, "{p:?}");
                            assert_eq!(s2(&(&block.n + &block.t)), s1, "{p:?}");
                            assert_eq!(s2(&(&block.n + &block.t * 2u32)), s2v, "{p:?}");
                        }
                    }
                }
            }
        }
        for a in 2..=5 {
            for d in 2..=5 {
                for c in 0..=3 {
                    let p = M2Params { config: M2Config::B, a, b: 0, c, d, offset: d - 1 + a };
                    assert!(p.in_tightened_range());
                    let block = p.block();
                    let (s0, s1, s2v) = p.claimed_digit_sums();
                    assert_eq!(s2(&block.n), s0, "{p:?}");
                    assert_eq!(s2(&(&block.n + &block.t)), s1, "{p:?}");
                    assert_eq!(s2(&(&block.n + &block.t * 2u32)), s2v, "{p:?}");
                }
            }
        }
    }

    fn gadget_sums(blocks: &[Block], m: u64) -> Vec<i64> {
        (1..=m)
            .map(|l| blocks.iter().map(|b| b.consecutive_difference(l)).sum())
            .collect()
    }

    #[test]
    fn gadget_plus_examples() {
        let g = gadget_plus(3).unwrap();
        let ns: Vec<u64> = g.iter().map(|b| b.n.to_string().parse().unwrap()).collect();
        assert_eq!(ns, vec![6, 7, 8, 9]);
        assert_eq!(gadget_sums(&g, 3), vec![0, 0, 1]);

        assert_eq!(gadget_sums(&gadget_plus(4).unwrap(), 4), vec![0, 0, 0, 1]);
        let g = gadget_plus(2).unwrap();
        let ns: Vec<u64> = g.iter().map(|b| b.n.to_string().parse().unwrap()).collect();
        assert_eq!(ns, vec![3, 4]);
        assert_eq!(gadget_sums(&g, 2), vec![0, 1]);
    }

    #[test]
    fn gadget_minus_examples() {
        let g = gadget_minus(3).unwrap();
        let ns: Vec<u64> = g.iter().map(|b| b.n.to_string().parse().unwrap()).collect();
        let expected: Vec<u64> = (2..=5).chain(25..=32).collect();
        assert_eq!(ns, expected);
        assert_eq!(gadget_sums(&g, 3), vec![0, 0, -1]);

        let g = gadget_minus(2).unwrap();
        let ns: Vec<u64> = g.iter().map(|b| b.n.to_string().parse().unwrap()).collect();
        let expected: Vec<u64> = (1..=2).chain(13..=16).collect();
        assert_eq!(ns, expected);
        assert_eq!(gadget_sums(&g, 2), vec![0, -1]);

        assert_eq!(gadget_sums(&gadget_minus(4).unwrap(), 4), vec![0, 0, 0, -1]);
    }

    #[test]
    fn gadgets_reject_width_one() {
        assert!(matches!(gadget_plus(1), Err(WitnessError::GadgetWidth(1))));
        assert!(matches!(gadget_minus(1), Err(WitnessError::GadgetWidth(1))));
    }

    #[test]
    fn witness_examples() {
        let w = witness(&DiffTuple::new(vec![3]).unwrap()).unwrap();
        assert_eq!((w.n.to_string().as_str(), w.t.to_string().as_str()), ("16", "7"));
        assert!(w.verified);

        let w = witness(&DiffTuple::new(vec![0, 0, 1]).unwrap()).unwrap();
        assert!(w.verified);

        let w = witness(&DiffTuple::new(vec![-1, 2, 0, -3]).unwrap()).unwrap();
        assert!(w.verified);
        assert!(!w.t.is_zero());
    }

    #[test]
    fn tm_word_examples() {
        for word in [vec![0u8, 1], vec![1, 1, 1], vec![0, 0, 0, 0]] {
            let w = realize_tm_word(&word).unwrap();
            for (l, &bit) in word.iter().enumerate() {
                assert_eq!(tm(&(&w.n + &w.t * (l as u64))), bit, "word={word:?} l={l}");
            }
        }
    }

    #[test]
    fn record_round_trip() {
        let w = witness(&DiffTuple::new(vec![2, -1]).unwrap()).unwrap();
        let rec = WitnessRecord::from(&w);
        let back = rec.to_witness().unwrap();
        assert_eq!(back, w);
    }

    proptest! {
        #[test]
        fn conversion_round_trips(k in proptest::collection::vec(-50i64..=50, 1..8)) {
            let tuple = DiffTuple::new(k).unwrap();
            let back = consecutive_to_cumulative(&cumulative_to_consecutive(&tuple));
            prop_assert_eq!(back, tuple);
        }

        #[test]
        fn concat_adds_differences(
            raw in proptest::collection::vec((0u64..1024, 0u64..1024), 1..5),
            m in 1u64..=6,
        ) {
            let blocks: Vec<Block> = raw.iter().map(|&(n, t)| Block::new(n, t)).collect();
            let combined = concat_blocks(&blocks, m).unwrap();
            for l in 1..=m {
                let expected: i64 = blocks.iter().map(|b| b.consecutive_difference(l)).sum();
                prop_assert_eq!(combined.consecutive_difference(l), expected);
            }
        }

        #[test]
        fn small_random_witnesses_verify(k in proptest::collection::vec(-5i64..=5, 1..=4)) {
            let w = witness(&DiffTuple::new(k).unwrap()).unwrap();
            prop_assert!(w.verified);
        }
    }
}
